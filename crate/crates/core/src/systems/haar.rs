use std::f64::consts::SQRT_2;

use super::OrthonormalSystem;

/// Haar system: `X_1 ≡ 1`; for `n − 1 = 2^m + j` (`0 ≤ j < 2^m`), `X_n` is
/// `+2^{m/2}` on the left half and `−2^{m/2}` on the right half of
/// `[j 2^{−m}, (j+1) 2^{−m})`, zero elsewhere.
#[derive(Debug, Clone, Copy, Default)]
pub struct Haar;

/// Level `m`, position `j` and the support of `X_n`, `n ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarCell {
    pub level: u32,
    pub position: u64,
    pub start: f64,
    pub width: f64,
}

impl HaarCell {
    pub fn of(n: usize) -> Self {
        assert!(n >= 2, "X_1 is the constant function");
        let idx = n as u64 - 1;
        let level = 63 - idx.leading_zeros();
        let position = idx - (1u64 << level);
        let width = 1.0 / (1u64 << level) as f64;
        Self {
            level,
            position,
            start: position as f64 * width,
            width,
        }
    }

    /// `2^{m/2}`.
    pub fn amplitude(&self) -> f64 {
        let whole = (1u64 << (self.level / 2)) as f64;
        if self.level.is_multiple_of(2) {
            whole
        } else {
            SQRT_2 * whole
        }
    }

    /// Distance-to-edge profile `t` with `∫₀ˣ X_n = amplitude · t`.
    #[inline]
    fn tent(&self, x: f64) -> f64 {
        let u = x - self.start;
        if u <= 0.0 || u >= self.width {
            return 0.0;
        }
        let half = 0.5 * self.width;
        if u < half {
            u
        } else {
            self.width - u
        }
    }
}

/// Index range `2^m + 1 ..= 2^{m+1}` of level `m`.
pub fn haar_level_range(level: u32) -> std::ops::RangeInclusive<usize> {
    (1usize << level) + 1..=(1usize << (level + 1))
}

impl OrthonormalSystem for Haar {
    fn label(&self) -> String {
        "haar".into()
    }

    fn eval(&self, n: usize, x: f64) -> f64 {
        if n == 1 {
            return 1.0;
        }
        let cell = HaarCell::of(n);
        let u = x - cell.start;
        if u < 0.0 || u >= cell.width {
            0.0
        } else if u < 0.5 * cell.width {
            cell.amplitude()
        } else {
            -cell.amplitude()
        }
    }

    fn primitive(&self, n: usize, x: f64) -> f64 {
        if n == 1 {
            return x;
        }
        let cell = HaarCell::of(n);
        cell.amplitude() * cell.tent(x)
    }

    fn primitive_squared(&self, n: usize, x: f64) -> f64 {
        if n == 1 {
            return x * x;
        }
        // 2^m t² has no irrational factor, so it is exact on dyadic grids.
        let cell = HaarCell::of(n);
        let t = cell.tent(x);
        (1u64 << cell.level) as f64 * t * t
    }

    fn is_complete(&self) -> bool {
        true
    }

    fn is_piecewise_constant(&self) -> bool {
        true
    }

    fn support(&self, n: usize) -> (f64, f64) {
        if n == 1 {
            return (0.0, 1.0);
        }
        let cell = HaarCell::of(n);
        (cell.start, cell.start + cell.width)
    }

    fn breakpoints(&self, n: usize) -> Vec<f64> {
        if n == 1 {
            return Vec::new();
        }
        let cell = HaarCell::of(n);
        [
            cell.start,
            cell.start + 0.5 * cell.width,
            cell.start + cell.width,
        ]
        .into_iter()
        .filter(|&x| x > 0.0 && x < 1.0)
        .collect()
    }

    fn frequency(&self, n: usize) -> usize {
        if n == 1 {
            1
        } else {
            1usize << HaarCell::of(n).level
        }
    }

    fn parseval_tail_bound(&self, count: usize) -> Option<f64> {
        super::dyadic_tail_bound(count)
    }

    fn sup_abs(&self, n: usize) -> f64 {
        if n == 1 {
            1.0
        } else {
            HaarCell::of(n).amplitude()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_examples() {
        assert_eq!(Haar.eval(2, 0.25), 1.0);
        assert_eq!(Haar.eval(2, 0.75), -1.0);
        assert_eq!(Haar.eval(3, 0.1), SQRT_2);
        assert_eq!(Haar.eval(3, 0.6), 0.0);
        assert_eq!(Haar.eval(4, 0.6), SQRT_2);
    }

    #[test]
    fn primitive_peak_by_grid_search() {
        // Brute-force grid max of |∫₀ˣ X_n| equals 2^{-m/2}/2.
        let grid = 1 << 12;
        for n in 2..=64usize {
            let m = HaarCell::of(n).level as i32;
            let peak = (0..=grid)
                .map(|i| Haar.primitive(n, i as f64 / grid as f64).abs())
                .fold(0.0f64, f64::max);
            let expected = 2f64.powf(-m as f64 / 2.0) / 2.0;
            assert!((peak - expected).abs() < 1e-15, "n={n}");
        }
    }

    #[test]
    fn squared_primitive_is_consistent() {
        for n in 1..40 {
            for i in 0..=128 {
                let x = i as f64 / 128.0;
                let p = Haar.primitive(n, x);
                assert!((Haar.primitive_squared(n, x) - p * p).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn levels() {
        assert_eq!(haar_level_range(0), 2..=2);
        assert_eq!(haar_level_range(2), 5..=8);
        assert_eq!(HaarCell::of(8).position, 3);
    }
}
