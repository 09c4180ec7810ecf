//! The small spec languages for sequences, functions, weights and index lists.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use onskit_core::{
    banach_seed_function, doubled_function, CoefficientSeq, UnitIntervalFn, WeightSeq,
};

/// `unit:k`, `power:α`, `list:a,b,…`, `file:path` or `zero`, extended with
/// zeros (or truncated) to `len` entries.
pub fn parse_sequence(spec: &str, len: usize) -> Result<CoefficientSeq> {
    let (kind, arg) = split(spec);
    let seq = match (kind, arg) {
        ("zero", None) => CoefficientSeq::zeros(len),
        ("unit", Some(k)) => {
            let k: usize = k.parse().with_context(|| format!("--seq: bad unit index '{k}'"))?;
            if k == 0 {
                bail!("--seq: unit index starts at 1");
            }
            CoefficientSeq::unit(k, len.max(k))?
        }
        ("power", Some(a)) => {
            let alpha: f64 = a.parse().with_context(|| format!("--seq: bad exponent '{a}'"))?;
            if !alpha.is_finite() {
                bail!("--seq: exponent must be finite");
            }
            CoefficientSeq::power(alpha, len)
        }
        ("list", Some(items)) => padded(spec, parse_floats(items).context("--seq")?, len)?,
        ("file", Some(path)) => padded(spec, read_numbers(Path::new(path)).context("--seq")?, len)?,
        _ => bail!("--seq: unknown sequence spec '{spec}' (expected unit:k, power:α, list:…, file:path or zero)"),
    };
    Ok(seq)
}

fn padded(label: &str, mut values: Vec<f64>, len: usize) -> Result<CoefficientSeq> {
    values.resize(len.max(values.len()), 0.0);
    Ok(CoefficientSeq::new(label, values)?)
}

/// `const:c`, `linear`, `banach-seed`, `doubled:<f>` or `file:path`.
pub fn parse_function(spec: &str) -> Result<UnitIntervalFn> {
    let (kind, arg) = split(spec);
    match (kind, arg) {
        ("const", Some(c)) => {
            let c: f64 = c.parse().with_context(|| format!("--f: bad constant '{c}'"))?;
            if !c.is_finite() {
                bail!("--f: constant must be finite");
            }
            Ok(UnitIntervalFn::constant(c))
        }
        ("linear", None) => Ok(UnitIntervalFn::linear()),
        ("banach-seed", None) => Ok(banach_seed_function()),
        ("doubled", Some(inner)) => Ok(doubled_function(&parse_function(inner)?)),
        ("file", Some(path)) => read_function(Path::new(path)),
        _ => bail!("--f: unknown function spec '{spec}' (expected const:c, linear, banach-seed, doubled:<f> or file:path)"),
    }
}

/// `sqrt`, `const:c` or `list:d1,d2,…`.
pub fn parse_weights(spec: &str, len: usize) -> Result<WeightSeq> {
    let (kind, arg) = split(spec);
    let w = match (kind, arg) {
        ("sqrt", None) => WeightSeq::sqrt(len),
        ("const", Some(c)) => {
            let c: f64 = c
                .parse()
                .with_context(|| format!("--weights: bad constant '{c}'"))?;
            WeightSeq::constant(c, len)?
        }
        ("list", Some(items)) => {
            let v = parse_floats(items).context("--weights")?;
            if v.len() < len {
                bail!("--weights: {} weights given, {len} needed", v.len());
            }
            WeightSeq::new(v)?
        }
        _ => bail!("--weights: unknown weight spec '{spec}' (expected sqrt, const:c or list:…)"),
    };
    Ok(w)
}

/// Comma-separated items, each `n`, `a..=b`, `a..b` or `pow2:a..=b`.
pub fn parse_index_list(flag: &str, spec: &str) -> Result<Vec<usize>> {
    if let Some(range) = spec.strip_prefix("pow2:") {
        let (lo, hi) =
            parse_range(range).with_context(|| format!("{flag}: bad range '{range}'"))?;
        if hi >= usize::BITS as usize {
            bail!("{flag}: exponent {hi} too large");
        }
        return Ok((lo..=hi).map(|p| 1usize << p).collect());
    }
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if item.contains("..") {
            let (lo, hi) =
                parse_range(item).with_context(|| format!("{flag}: bad range '{item}'"))?;
            out.extend(lo..=hi);
        } else {
            out.push(
                item.parse()
                    .with_context(|| format!("{flag}: bad index '{item}'"))?,
            );
        }
    }
    if out.is_empty() {
        bail!("{flag}: empty index list");
    }
    Ok(out)
}

fn parse_range(s: &str) -> Result<(usize, usize)> {
    let (lo, hi, inclusive) = if let Some((a, b)) = s.split_once("..=") {
        (a, b, true)
    } else if let Some((a, b)) = s.split_once("..") {
        (a, b, false)
    } else {
        bail!("expected a..=b or a..b");
    };
    let lo: usize = lo.trim().parse()?;
    let hi: usize = hi.trim().parse()?;
    let hi = if inclusive {
        hi
    } else {
        hi.checked_sub(1).ok_or_else(|| anyhow!("empty range"))?
    };
    if hi < lo {
        bail!("empty range");
    }
    Ok((lo, hi))
}

pub fn parse_floats(items: &str) -> Result<Vec<f64>> {
    items
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .with_context(|| format!("bad number '{s}'"))
        })
        .collect()
}

fn split(spec: &str) -> (&str, Option<&str>) {
    match spec.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a)),
        None => (spec.trim(), None),
    }
}

/// Numbers separated by whitespace or commas; `#` starts a comment.
fn read_numbers(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            out.push(
                tok.parse()
                    .with_context(|| format!("{}: bad number '{tok}'", path.display()))?,
            );
        }
    }
    Ok(out)
}

/// `x,y` rows, piecewise-linear in between; a `# lip: L` line declares the
/// Lipschitz constant.
fn read_function(path: &Path) -> Result<UnitIntervalFn> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (mut xs, mut ys, mut lip) = (Vec::new(), Vec::new(), None);
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(v) = comment.trim().strip_prefix("lip:") {
                lip = Some(
                    v.trim()
                        .parse::<f64>()
                        .with_context(|| format!("{}: bad lip line", path.display()))?,
                );
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let v = parse_floats(line).with_context(|| format!("{}:{}", path.display(), lineno + 1))?;
        if v.len() != 2 {
            bail!("{}:{}: expected 'x,y'", path.display(), lineno + 1);
        }
        xs.push(v[0]);
        ys.push(v[1]);
    }
    let label = format!("file:{}", path.display());
    Ok(UnitIntervalFn::piecewise_linear(label, xs, ys, lip)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences() {
        assert_eq!(
            parse_sequence("unit:2", 4).unwrap().values(),
            &[0.0, 1.0, 0.0, 0.0]
        );
        assert_eq!(
            parse_sequence("list:1,2", 3).unwrap().values(),
            &[1.0, 2.0, 0.0]
        );
        assert_eq!(parse_sequence("power:1", 2).unwrap().values(), &[1.0, 0.5]);
        assert!(parse_sequence("fib:3", 4).is_err());
        assert!(parse_sequence("list:1,x", 4).is_err());
    }

    #[test]
    fn index_lists() {
        assert_eq!(parse_index_list("--n", "4").unwrap(), vec![4]);
        assert_eq!(
            parse_index_list("--n", "2,5..=7").unwrap(),
            vec![2, 5, 6, 7]
        );
        assert_eq!(parse_index_list("--n", "2..4").unwrap(), vec![2, 3]);
        assert_eq!(
            parse_index_list("--n", "pow2:1..=3").unwrap(),
            vec![2, 4, 8]
        );
        assert!(parse_index_list("--n", "").is_err());
        assert!(parse_index_list("--n", "5..=2").is_err());
    }

    #[test]
    fn functions() {
        assert_eq!(parse_function("const:2").unwrap().eval(0.3), 2.0);
        assert_eq!(parse_function("doubled:linear").unwrap().eval(0.75), 0.0);
        assert!(parse_function("cubic").is_err());
    }
}
