use std::f64::consts::{PI, SQRT_2};

use super::OrthonormalSystem;

/// `φ_{2k−1} = √2 cos 2πkx`, `φ_{2k} = √2 sin 2πkx`, `k ≥ 1`.
///
/// The constant function is not part of the family, so the system is not
/// complete; index `n` has frequency `⌈n/2⌉`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Trig;

/// `φ_k = √2 sin 2πkx`, the sine half of [`Trig`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SineSystem;

/// `(sin πkx, cos πkx)` with the argument reduced modulo 2 first.
#[inline]
fn half_angle(k: usize, x: f64) -> (f64, f64) {
    let t = (k as f64 * x) % 2.0;
    (PI * t).sin_cos()
}

/// `√2 sin(2πkx)`, `√2 cos(2πkx)`.
#[inline]
fn sin_cos_2pi(k: usize, x: f64) -> (f64, f64) {
    let t = (k as f64 * x).fract();
    let (s, c) = (2.0 * PI * t).sin_cos();
    (SQRT_2 * s, SQRT_2 * c)
}

#[inline]
fn cos_primitive(k: usize, x: f64) -> f64 {
    // ∫₀ˣ √2 cos 2πku = √2 sin(2πkx)/(2πk) = √2 sin(πkx)cos(πkx)/(πk)
    let (s, c) = half_angle(k, x);
    SQRT_2 * s * c / (PI * k as f64)
}

#[inline]
fn sin_primitive(k: usize, x: f64) -> f64 {
    // ∫₀ˣ √2 sin 2πku = √2 (1 − cos 2πkx)/(2πk) = √2 sin²(πkx)/(πk)
    let (s, _) = half_angle(k, x);
    SQRT_2 * s * s / (PI * k as f64)
}

impl OrthonormalSystem for Trig {
    fn label(&self) -> String {
        "trig".into()
    }

    fn eval(&self, n: usize, x: f64) -> f64 {
        let k = n.div_ceil(2);
        let (s, c) = sin_cos_2pi(k, x);
        if n % 2 == 1 {
            c
        } else {
            s
        }
    }

    fn primitive(&self, n: usize, x: f64) -> f64 {
        let k = n.div_ceil(2);
        if n % 2 == 1 {
            cos_primitive(k, x)
        } else {
            sin_primitive(k, x)
        }
    }

    fn primitive_row(&self, x: f64, out: &mut [f64]) {
        // Rotate (sin πkx, cos πkx) by πx per frequency; reseed every 32 steps
        // so the recurrence error stays at a few ulps.
        let (ds, dc) = (PI * (x % 2.0)).sin_cos();
        let (mut s, mut c) = (0.0, 1.0);
        let freqs = out.len().div_ceil(2);
        for k in 1..=freqs {
            if k % 32 == 1 {
                (s, c) = half_angle(k, x);
            } else {
                (s, c) = (s * dc + c * ds, c * dc - s * ds);
            }
            let scale = SQRT_2 / (PI * k as f64);
            out[2 * k - 2] = scale * s * c;
            if 2 * k - 1 < out.len() {
                out[2 * k - 1] = scale * s * s;
            }
        }
    }

    fn is_complete(&self) -> bool {
        false
    }

    fn frequency(&self, n: usize) -> usize {
        n.div_ceil(2)
    }

    fn sup_abs(&self, _n: usize) -> f64 {
        SQRT_2
    }
}

impl OrthonormalSystem for SineSystem {
    fn label(&self) -> String {
        "sine".into()
    }

    fn eval(&self, n: usize, x: f64) -> f64 {
        sin_cos_2pi(n, x).0
    }

    fn primitive(&self, n: usize, x: f64) -> f64 {
        sin_primitive(n, x)
    }

    fn is_complete(&self) -> bool {
        false
    }

    fn frequency(&self, n: usize) -> usize {
        n
    }

    fn sup_abs(&self, _n: usize) -> f64 {
        SQRT_2
    }
}
