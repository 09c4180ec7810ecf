//! Finite coefficient and weight sequences, conjugate exponents and ℓp norms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sum::compensated_sum;

/// `ε ∈ (0,1)` with the conjugate pair `p = 2 − ε`, `q = (2 − ε)/(1 − ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonParams {
    eps: f64,
    p: f64,
    q: f64,
}

impl EpsilonParams {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::invalid(format!("eps must lie in (0,1), got {eps}")));
        }
        Ok(Self {
            eps,
            p: 2.0 - eps,
            q: (2.0 - eps) / (1.0 - eps),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Real sequence indexed from 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientSeq {
    values: Vec<f64>,
    label: String,
}

impl CoefficientSeq {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "sequence entry {} is not finite",
                pos + 1
            )));
        }
        Ok(Self {
            values,
            label: label.into(),
        })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![0.0; len],
            label: "zero".into(),
        }
    }

    /// The unit vector `e_k` of length `len` (`k` is 1-based).
    pub fn unit(k: usize, len: usize) -> Result<Self> {
        if k == 0 || k > len {
            return Err(Error::invalid(format!("unit index {k} outside 1..={len}")));
        }
        let mut values = vec![0.0; len];
        values[k - 1] = 1.0;
        Ok(Self {
            values,
            label: format!("unit:{k}"),
        })
    }

    /// `a_k = k^(−alpha)`, `k = 1..=len`.
    pub fn power(alpha: f64, len: usize) -> Self {
        Self {
            values: (1..=len).map(|k| (k as f64).powf(-alpha)).collect(),
            label: format!("power:{alpha}"),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// 1-based access; zero beyond the stored length.
    pub fn get(&self, k: usize) -> f64 {
        assert!(k >= 1, "sequences are indexed from 1");
        self.values.get(k - 1).copied().unwrap_or(0.0)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn head(&self, n: usize) -> Result<&[f64]> {
        self.values.get(..n).ok_or_else(|| {
            Error::invalid(format!(
                "sequence '{}' has {} entries, {n} requested",
                self.label,
                self.values.len()
            ))
        })
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(&self.values, p)
    }
}

/// `(Σ|a_k|^p)^{1/p}` for `p ≥ 1`, `p = ∞` allowed.
pub fn lp_norm(values: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("lp norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    // Scale by the largest entry so powers neither overflow nor underflow.
    let s = compensated_sum(values.iter().map(|v| (v.abs() / scale).powf(p)));
    Ok(scale * s.powf(1.0 / p))
}

/// `Σ_{n≤N} |C_n|^{2−ε}`, a partial sum only.
pub fn decay_sum(coeffs: &CoefficientSeq, eps: &EpsilonParams, n: usize) -> Result<f64> {
    let head = coeffs.head(n)?;
    Ok(compensated_sum(head.iter().map(|c| c.abs().powf(eps.p()))))
}

/// Positive nondecreasing weights `d_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSeq {
    values: Vec<f64>,
    sqrt_growth_const: Option<f64>,
}

impl WeightSeq {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::invalid(format!(
                "weight {} must be finite and positive",
                pos + 1
            )));
        }
        if let Some(pos) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::invalid(format!(
                "weights must be nondecreasing (index {})",
                pos + 2
            )));
        }
        let growth = values
            .iter()
            .enumerate()
            .map(|(i, d)| d / ((i + 1) as f64).sqrt())
            .fold(0.0f64, f64::max);
        Ok(Self {
            values,
            sqrt_growth_const: Some(growth),
        })
    }

    pub fn constant(c: f64, len: usize) -> Result<Self> {
        Self::new(vec![c; len])
    }

    /// `d_k = √k`.
    pub fn sqrt(len: usize) -> Self {
        Self::new((1..=len).map(|k| (k as f64).sqrt()).collect())
            .expect("√k is positive and increasing")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    /// Smallest `c` with `d_k ≤ c√k` over the stored entries.
    pub fn sqrt_growth_const(&self) -> Option<f64> {
        self.sqrt_growth_const
    }
}
