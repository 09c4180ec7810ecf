use super::{dyadic_cell, triangle, OrthonormalSystem};

/// Walsh system in Paley order.
///
/// `φ_n = w_{n−1}`, and for `j = Σ b_i 2^i`, `w_j = Π r_{i+1}^{b_i}`, so
/// `φ_1 ≡ 1`, `φ_2 = r_1`, `φ_3 = r_2`, `φ_4 = r_1 r_2`, …
#[derive(Debug, Clone, Copy, Default)]
pub struct Walsh;

/// Rademacher functions `r_k(x) = (−1)^{⌊2^k x⌋}`, `k ≥ 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rademacher;

const MAX_LEVEL: u32 = 62;
/// `2^{−(k−1)}` stays a normal double up to here.
const RADEMACHER_MAX: usize = 1022;
const BREAKPOINT_LEVEL: u32 = 20;

/// Number of binary digits of `j` (0 for `j = 0`).
#[inline]
fn bit_length(j: u64) -> u32 {
    64 - j.leading_zeros()
}

/// Paley-ordered `w_j(x)`.
#[inline]
pub(crate) fn walsh_value(j: u64, x: f64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let level = bit_length(j);
    assert!(level <= MAX_LEVEL, "Walsh index beyond 2^{MAX_LEVEL}");
    let cell = dyadic_cell(x, level);
    // Digit k of x (k = 1 most significant) sits at bit level−k of `cell`;
    // it pairs with bit k−1 of j, i.e. j reversed within `level` bits.
    let rev = j.reverse_bits() >> (64 - level);
    if (cell & rev).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn walsh_primitive(j: u64, x: f64) -> f64 {
    if j == 0 {
        return x;
    }
    // w_j = r_L · w_{j'} with j' = j − 2^{L−1}; w_{j'} is constant on cells of
    // width 2^{−(L−1)}, on each of which r_L integrates to zero.
    let level = bit_length(j);
    let rest = j - (1u64 << (level - 1));
    let width = 1.0 / (1u64 << (level - 1)) as f64;
    walsh_value(rest, x) * triangle(x, width)
}

fn dyadic_grid(level: u32) -> Vec<f64> {
    let cells = 1u64 << level;
    (1..cells).map(|i| i as f64 / cells as f64).collect()
}

impl OrthonormalSystem for Walsh {
    fn label(&self) -> String {
        "walsh".into()
    }

    fn eval(&self, n: usize, x: f64) -> f64 {
        walsh_value(n as u64 - 1, x)
    }

    fn primitive(&self, n: usize, x: f64) -> f64 {
        walsh_primitive(n as u64 - 1, x)
    }

    /// `w_{j + 2^l} = w_j r_{l+1}` builds all values in one pass; each
    /// level then shares one triangle.
    fn primitive_row(&self, x: f64, out: &mut [f64]) {
        let len = out.len();
        if len == 0 {
            return;
        }
        let mut w = vec![0.0; len];
        w[0] = 1.0;
        let mut block = 1;
        let mut level = 1;
        while block < len {
            let r = if dyadic_cell(x, level).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            let (lo, hi) = w.split_at_mut(block);
            let count = block.min(hi.len());
            for (dst, src) in hi[..count].iter_mut().zip(lo.iter()) {
                *dst = src * r;
            }
            block *= 2;
            level += 1;
        }
        out[0] = x;
        let mut start = 1;
        let mut width = 1.0;
        while start < len {
            let end = (2 * start).min(len);
            let tri = triangle(x, width);
            for (slot, wj) in out[start..end].iter_mut().zip(&w) {
                *slot = wj * tri;
            }
            start = end;
            width *= 0.5;
        }
    }

    fn is_complete(&self) -> bool {
        true
    }

    fn is_piecewise_constant(&self) -> bool {
        true
    }

    fn breakpoints(&self, n: usize) -> Vec<f64> {
        dyadic_grid(bit_length(n as u64 - 1))
    }

    fn frequency(&self, n: usize) -> usize {
        let level = bit_length(n as u64 - 1);
        if level == 0 {
            1
        } else {
            1usize << (level - 1)
        }
    }

    fn parseval_tail_bound(&self, count: usize) -> Option<f64> {
        super::dyadic_tail_bound(count)
    }

    fn sup_abs(&self, _n: usize) -> f64 {
        1.0
    }
}

impl OrthonormalSystem for Rademacher {
    fn label(&self) -> String {
        "rademacher".into()
    }

    fn eval(&self, k: usize, x: f64) -> f64 {
        assert!(
            (1..=RADEMACHER_MAX).contains(&k),
            "Rademacher index out of range"
        );
        // Scaling by 2^k is exact, so the parity is read off without rounding.
        let scaled = (x.clamp(0.0, 1.0) * 2f64.powi(k as i32)).floor();
        if scaled % 2.0 == 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    fn primitive(&self, k: usize, x: f64) -> f64 {
        assert!(
            (1..=RADEMACHER_MAX).contains(&k),
            "Rademacher index out of range"
        );
        triangle(x, 0.5f64.powi(k as i32 - 1))
    }

    /// `r_k(x) = r_1(2^{k−1} x)` and the integrand is 1-periodic after
    /// rescaling, so `∫ r_i r_j = ∫ r_1 r_{j−i+1}`, a sum over the two
    /// halves where `r_1` is constant.
    fn exact_inner_product(&self, i: usize, j: usize) -> Option<f64> {
        let m = i.max(j) - i.min(j) + 1;
        let p = |x: f64| self.primitive(m, x);
        Some((p(0.5) - p(0.0)) - (p(1.0) - p(0.5)))
    }

    fn is_complete(&self) -> bool {
        false
    }

    fn is_piecewise_constant(&self) -> bool {
        true
    }

    /// Capped at `2^BREAKPOINT_LEVEL` cells; finer jumps are left to the
    /// adaptive quadrature.
    fn breakpoints(&self, k: usize) -> Vec<f64> {
        dyadic_grid((k as u32).min(BREAKPOINT_LEVEL))
    }

    fn frequency(&self, k: usize) -> usize {
        1usize << (k as u32 - 1).min(BREAKPOINT_LEVEL)
    }

    fn sup_abs(&self, _k: usize) -> f64 {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::gram_deviation;

    #[test]
    fn walsh_examples() {
        assert_eq!(Walsh.eval(1, 0.7), 1.0);
        assert_eq!(Walsh.eval(2, 0.25), 1.0);
        assert_eq!(Walsh.eval(2, 0.75), -1.0);
        assert_eq!(Walsh.primitive(2, 0.75), 0.25);
    }

    #[test]
    fn walsh_is_rademacher_product() {
        // φ_4 = w_3 = r_1 r_2.
        for i in 0..64 {
            let x = (i as f64 + 0.5) / 64.0;
            assert_eq!(
                Walsh.eval(4, x),
                Rademacher.eval(1, x) * Rademacher.eval(2, x)
            );
            assert_eq!(Walsh.eval(3, x), Rademacher.eval(2, x));
        }
    }

    #[test]
    fn row_matches_pointwise() {
        let mut row = vec![0.0; 300];
        for i in 0..=257 {
            let x = i as f64 / 257.0;
            Walsh.primitive_row(x, &mut row);
            for (k, v) in row.iter().enumerate() {
                assert_eq!(*v, Walsh.primitive(k + 1, x), "k={} x={x}", k + 1);
            }
        }
    }

    #[test]
    fn rademacher_beyond_u64_levels() {
        assert_eq!(gram_deviation(&Rademacher, 64), 0.0);
        assert_eq!(Rademacher.eval(64, 0.75), 1.0);
        assert_eq!(Rademacher.eval(2, 0.3), -1.0);
        assert_eq!(Rademacher.eval(63, 2f64.powi(-63)), -1.0);
    }

    #[test]
    fn rademacher_examples() {
        assert_eq!(Rademacher.eval(1, 0.25), 1.0);
        assert_eq!(Rademacher.primitive(1, 1.0), 0.0);
        assert_eq!(Rademacher.eval(3, 0.2), -1.0);
    }

    #[test]
    fn endpoint_convention() {
        // x = 1 is treated as the right end of the last cell's successor: all digits zero.
        assert_eq!(Walsh.eval(8, 1.0), 1.0);
        assert_eq!(Walsh.primitive(8, 1.0), 0.0);
    }
}
