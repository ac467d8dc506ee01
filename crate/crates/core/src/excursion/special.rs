//! Gamma, the Airy function `Ai` with its negative zeros, and Tricomi's confluent
//! hypergeometric function `U` on the positive axis.

#![allow(clippy::excessive_precision)]

use super::quadrature::integrate;
use crate::error::{Error, Result};
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `Γ(x)` by the Lanczos approximation (relative error ~1e-15), reflected for `x < 1/2`.
/// Poles return infinity.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (PI * x).sin();
        if s == 0.0 {
            return f64::INFINITY;
        }
        return PI / (s * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

const AI_0: f64 = 0.355_028_053_887_817_239;
const AI_PRIME_0: f64 = -0.258_819_403_792_806_798;
const AIRY_STEP: f64 = 0.125;

/// `(Ai, Ai')` at `x0 + t` from `(Ai, Ai')` at `x0`, by the Taylor series of `y'' = x y`.
fn airy_taylor(x0: f64, y0: f64, y1: f64, t: f64) -> (f64, f64) {
    // c[k + 2] (k + 2)(k + 1) = x0 c[k] + c[k − 1]
    let (mut c_prev, mut c_cur, mut c_next) = (y0, y1, 0.5 * x0 * y0);
    let mut value = y0 + y1 * t;
    let mut deriv = y1;
    let mut tk = t;
    let scale = y0.abs() + y1.abs();
    // Every third coefficient can vanish (at x0 = 0), so stop only after two small terms.
    let mut small_run = 0;
    for k in 2..80usize {
        // c_next holds c[k]
        deriv += k as f64 * c_next * tk;
        tk *= t;
        let term = c_next * tk;
        value += term;
        if term.abs() < 1e-18 * scale {
            small_run += 1;
            if small_run == 2 {
                break;
            }
        } else {
            small_run = 0;
        }
        let c_after = (x0 * c_cur + c_prev) / ((k + 1) as f64 * k as f64);
        c_prev = c_cur;
        c_cur = c_next;
        c_next = c_after;
    }
    (value, deriv)
}

/// `Ai` on `[−reach, 2]`: nodes every 1/8 on the negative axis, filled by Taylor marching from
/// the origin. In the oscillatory region both solutions stay bounded, so the marching error
/// grows only linearly (about 1e-13 at `x = −40`).
#[derive(Debug, Clone)]
pub struct Airy {
    nodes: Vec<(f64, f64)>,
}

impl Airy {
    pub fn new(reach: f64) -> Self {
        let count = (reach / AIRY_STEP).ceil() as usize + 2;
        let mut nodes = Vec::with_capacity(count);
        let (mut y, mut dy) = (AI_0, AI_PRIME_0);
        nodes.push((y, dy));
        for k in 0..count {
            let x0 = -(k as f64) * AIRY_STEP;
            (y, dy) = airy_taylor(x0, y, dy, -AIRY_STEP);
            nodes.push((y, dy));
        }
        Airy { nodes }
    }

    pub fn reach(&self) -> f64 {
        (self.nodes.len() - 1) as f64 * AIRY_STEP
    }

    /// `(Ai(x), Ai'(x))`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        if x > 2.0 || x < -self.reach() {
            return Err(Error::Domain(format!("Ai evaluated at {x}, outside [{}, 2]", -self.reach())));
        }
        if x >= 0.0 {
            return Ok(airy_taylor(0.0, AI_0, AI_PRIME_0, x));
        }
        let k = ((-x / AIRY_STEP).round() as usize).min(self.nodes.len() - 1);
        let x0 = -(k as f64) * AIRY_STEP;
        let (y, dy) = self.nodes[k];
        Ok(airy_taylor(x0, y, dy, x - x0))
    }

    pub fn ai(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.0)
    }
}

/// Asymptotic location of the `j`-th zero of `Ai` (1-based).
pub fn airy_zero_estimate(j: usize) -> f64 {
    let t = 3.0 * PI * (4.0 * j as f64 - 1.0) / 8.0;
    -t.powf(2.0 / 3.0) * (1.0 + 5.0 / (48.0 * t * t))
}

/// First `count` zeros of `Ai`, strictly decreasing, refined by bisection inside a bracket of
/// a quarter spacing around each asymptotic estimate.
pub fn airy_zeros(count: usize) -> Result<Vec<f64>> {
    let reach = if count == 0 { 1.0 } else { -airy_zero_estimate(count) + 2.0 };
    let airy = Airy::new(reach);
    (1..=count)
        .map(|j| {
            let guess = airy_zero_estimate(j);
            let half = 0.25 * PI / guess.abs().sqrt();
            let (mut lo, mut hi) = (guess - half, guess + half);
            let (f_lo, f_hi) = (airy.ai(lo)?, airy.ai(hi)?);
            if f_lo * f_hi > 0.0 {
                return Err(Error::NoConvergence(format!("no sign change of Ai around zero {j} (estimate {guess})")));
            }
            let lo_sign = f_lo.signum();
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if airy.ai(mid)?.signum() == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        })
        .collect()
}

/// `U(a, b, z)` for `a > 0`, `z > 0` from `Γ(a) U = ∫₀^∞ e^{−zt} t^{a−1} (1+t)^{b−a−1} dt`.
///
/// With `t = w⁶/z` the integrand becomes `6 z^{−a} w^{6a−1} e^{−w⁶} (1 + w⁶/z)^{b−a−1}`,
/// which is smooth for `a ≥ 1/6` and negligible beyond `w = 2.4`.
pub fn tricomi_u_positive(a: f64, b: f64, z: f64) -> f64 {
    debug_assert!(a >= 1.0 / 6.0 && z > 0.0);
    let c = b - a - 1.0;
    let power = 6.0 * a - 1.0;
    let integrand = |w: f64| {
        let w6 = w.powi(6);
        let base = if power == 0.0 { 1.0 } else { w.powf(power) };
        base * (-w6).exp() * (1.0 + w6 / z).powf(c)
    };
    // The kink of (1 + w⁶/z) sits at w ≈ z^{1/6}; start with panels that resolve it.
    let quad = integrate(integrand, 0.0, 2.4, 8, 0.0, 1e-14, 2000);
    6.0 * z.powf(-a) * quad.value / gamma(a)
}

/// `U(−5/6, 4/3, z)` for `z > 0`, by the contiguous relation
/// `U(a−1) = (z − 1) U(a) + U(a+1)/36` at `a = 1/6`, `b = 4/3`.
pub fn area_u(z: f64) -> f64 {
    const B: f64 = 4.0 / 3.0;
    (z - 1.0) * tricomi_u_positive(1.0 / 6.0, B, z) + tricomi_u_positive(7.0 / 6.0, B, z) / 36.0
}
