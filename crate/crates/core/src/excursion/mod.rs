//! Brownian-excursion area: exact moments, the density as a series over Airy zeros, its
//! characteristic function, and the phase-twisted trial state that bounds the chain's gap.

// `!(x > 0.0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod quadrature;
pub mod special;
mod trial;

#[cfg(test)]
mod tests;

pub use trial::{
    area_profile, trial_energy_exact, trial_state, trial_twist, variational_gap_bound, AreaProfile, GapBound,
    TrialEnergy, TrialState,
};

use crate::error::{domain, Result};
use crate::numeric::{ln_biguint, ln_factorial, ln_gamma_half};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use quadrature::{integrate, Quadrature};
use serde::Serialize;
use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

pub const DEFAULT_ZEROS: usize = 40;
pub const MAX_MOMENT: usize = 30;
/// Integration window for the density. Below 1e-3 every series term underflows and above 3
/// the tail mass is of order `e^{−54}`.
pub const SUPPORT: (f64, f64) = (1e-3, 3.0);
/// Largest `|θ|` accepted by the characteristic function.
pub const MAX_FREQUENCY: f64 = 100.0;
/// Scale between walk area and excursion area: `area ≈ SCALE · n^{3/2} · x` for walks of
/// length `2n`.
pub fn area_scale() -> f64 {
    4.0 / 3f64.sqrt()
}

/// `E[B]`, exact.
pub fn area_mean() -> f64 {
    0.5 * (PI / 2.0).sqrt()
}

/// Standard deviation of the excursion area, exact.
pub fn area_std() -> f64 {
    (5.0 / 12.0 - PI / 8.0).sqrt()
}

/// Exact rationals `K_0..=K_{k_max}` from `K_0 = −1/2`,
/// `K_k = (3k − 4)/4 · K_{k−1} + Σ_{j=1}^{k−1} K_j K_{k−j}`.
pub fn moment_constants(k_max: usize) -> Vec<BigRational> {
    let mut ks: Vec<BigRational> = vec![BigRational::new(BigInt::from(-1), BigInt::from(2))];
    for k in 1..=k_max {
        let lead = BigRational::new(BigInt::from(3 * k as i64 - 4), BigInt::from(4)) * &ks[k - 1];
        let conv = (1..k).fold(BigRational::zero(), |acc, j| acc + &ks[j] * &ks[k - j]);
        ks.push(lead + conv);
    }
    ks
}

/// `E[B^k]` for `k = 0..=k_max`:
/// `E[B^k] = 4√π · 2^{−k/2} · k! / Γ((3k − 1)/2) · K_k`.
pub fn excursion_moments(k_max: usize) -> Result<Vec<f64>> {
    if k_max > MAX_MOMENT {
        return Err(domain(format!("moment order {k_max} exceeds {MAX_MOMENT}")));
    }
    let ks = moment_constants(k_max);
    Ok(ks
        .iter()
        .enumerate()
        .map(|(k, kk)| {
            if k == 0 {
                return 1.0;
            }
            // K_k > 0 for k ≥ 1.
            let ln_k = ln_biguint(&kk.numer().abs().to_biguint().expect("positive")) - ln_biguint(&kk.denom().to_biguint().expect("positive"));
            let ln = 4f64.ln() + 0.5 * PI.ln() - 0.5 * k as f64 * LN_2 + ln_factorial(k) - ln_gamma_half(3 * k - 1) + ln_k;
            ln.exp()
        })
        .collect())
}

/// Large-order form `3√2 · k · (k / 12e)^{k/2}`.
pub fn moment_asymptotic(k: usize) -> f64 {
    let k = k as f64;
    3.0 * 2f64.sqrt() * k * (k / (12.0 * std::f64::consts::E)).powf(k / 2.0)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensityValue {
    pub value: f64,
    /// Magnitude of the last retained series term.
    pub truncation: f64,
    pub terms: usize,
}

/// Density of the excursion area as the series
/// `f(x) = (2√6 / x²) Σ_j v_j^{2/3} e^{−v_j} U(−5/6, 4/3; v_j)`, `v_j = 2|a_j|³ / (27 x²)`,
/// over the zeros `a_j` of `Ai`.
///
/// For `x ≳ 1.5` the leading terms cancel, so the value is accurate in absolute terms
/// (~1e-15) rather than relatively.
#[derive(Debug, Clone, Serialize)]
pub struct ExcursionDensity {
    zeros: Vec<f64>,
}

impl ExcursionDensity {
    pub fn new(num_zeros: usize) -> Result<Self> {
        if num_zeros == 0 {
            return Err(domain("the density needs at least one Airy zero"));
        }
        Ok(ExcursionDensity { zeros: special::airy_zeros(num_zeros)? })
    }

    /// Shared instance with [`DEFAULT_ZEROS`] zeros.
    pub fn standard() -> &'static ExcursionDensity {
        static DENSITY: OnceLock<ExcursionDensity> = OnceLock::new();
        DENSITY.get_or_init(|| ExcursionDensity::new(DEFAULT_ZEROS).expect("Airy zeros bracket at default size"))
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn eval(&self, x: f64) -> Result<DensityValue> {
        if !(x > 0.0) {
            return Err(domain(format!("density needs x > 0, got {x}")));
        }
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: f64) -> DensityValue {
        let mut sum = 0.0;
        let mut scale = 0.0;
        let mut last = 0.0;
        let mut terms = 0;
        for &a in &self.zeros {
            let v = 2.0 * a.abs().powi(3) / (27.0 * x * x);
            if v > 745.0 {
                break;
            }
            let term = v.powf(2.0 / 3.0) * (-v).exp() * special::area_u(v);
            sum += term;
            scale += term.abs();
            last = term.abs();
            terms += 1;
            // Terms fall off monotonically once v is past the peak of v^{3/2} e^{−v}.
            if v > 2.0 && last < 1e-17 * scale {
                break;
            }
        }
        let factor = 2.0 * 6f64.sqrt() / (x * x);
        DensityValue { value: factor * sum, truncation: factor * last, terms }
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        Ok(self.eval(x)?.value)
    }

    /// Pairs `(x, f(x))` on an inclusive grid of `points` from `start` to `end`.
    pub fn tabulate(&self, start: f64, end: f64, points: usize) -> Result<Vec<(f64, f64)>> {
        if points < 2 || !(start > 0.0) || !(end > start) {
            return Err(domain(format!("grid {start}:{end}:{points} needs 0 < start < end and at least 2 points")));
        }
        let step = (end - start) / (points - 1) as f64;
        (0..points).map(|i| {
            let x = if i + 1 == points { end } else { start + i as f64 * step };
            Ok((x, self.density(x)?))
        })
        .collect()
    }

    /// `∫ g(x) f(x) dx` over [`SUPPORT`].
    pub fn integrate_against(&self, g: impl Fn(f64) -> f64, tol: f64) -> Quadrature<f64> {
        let (lo, hi) = SUPPORT;
        integrate(|x| g(x) * self.eval_unchecked(x).value, lo, hi, 24, tol, 0.0, 4000)
    }

    /// `E[B^k]` by quadrature of the density.
    pub fn moment(&self, k: i32) -> f64 {
        self.integrate_against(|x| x.powi(k), 1e-12).value
    }

    /// `F(θ) = ∫ f(x) e^{2πixθ} dx`, with panels no wider than `1/(4|θ|)`.
    pub fn characteristic(&self, theta: f64) -> Result<Quadrature<Complex64>> {
        if !(theta.abs() <= MAX_FREQUENCY) {
            return Err(domain(format!("|theta| = {} exceeds {MAX_FREQUENCY}", theta.abs())));
        }
        let (lo, hi) = SUPPORT;
        let panels = (((hi - lo) * 4.0 * theta.abs()).ceil() as usize).max(24);
        let w = 2.0 * PI * theta;
        Ok(integrate(
            |x| Complex64::from_polar(self.eval_unchecked(x).value, w * x),
            lo,
            hi,
            panels,
            1e-10,
            0.0,
            panels + 4000,
        ))
    }

    /// Location and height of the density maximum (golden-section search).
    pub fn mode(&self) -> (f64, f64) {
        let f = |x: f64| self.eval_unchecked(x).value;
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (0.2, 1.2);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        while b - a > 1e-12 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = f(d);
            }
        }
        let x = 0.5 * (a + b);
        (x, f(x))
    }

    /// The pair `x₁ < mode < x₂` with `f(x₁) = f(x₂) = y` and `x₂ − x₁ = width`, found by
    /// bisection on `y` (the width of the level set shrinks as `y` rises).
    pub fn level_set(&self, width: f64) -> Result<LevelSet> {
        let f = |x: f64| self.eval_unchecked(x).value;
        let (mode, peak) = self.mode();
        let (left_end, right_end) = (0.05, SUPPORT.1);
        // `below` has f < y, `above` has f ≥ y; works on either side of the mode.
        let crossing = |y: f64, mut below: f64, mut above: f64| {
            for _ in 0..100 {
                let mid = 0.5 * (below + above);
                if f(mid) < y {
                    below = mid;
                } else {
                    above = mid;
                }
            }
            0.5 * (below + above)
        };
        let span = |y: f64| (crossing(y, left_end, mode), crossing(y, right_end, mode));
        let (full_lo, full_hi) = span(1e-9 * peak);
        if !(width > 0.0) || width >= full_hi - full_lo {
            return Err(domain(format!("level-set width {width} is outside (0, {})", full_hi - full_lo)));
        }
        let (mut y_lo, mut y_hi) = (1e-9 * peak, peak);
        for _ in 0..100 {
            let y = 0.5 * (y_lo + y_hi);
            let (x1, x2) = span(y);
            if x2 - x1 > width {
                y_lo = y;
            } else {
                y_hi = y;
            }
        }
        let height = 0.5 * (y_lo + y_hi);
        let (x1, x2) = span(height);
        Ok(LevelSet { x1, x2, height, mode, peak })
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LevelSet {
    pub x1: f64,
    pub x2: f64,
    pub height: f64,
    pub mode: f64,
    pub peak: f64,
}

impl LevelSet {
    /// `1 − y (x₂ − x₁)`, the bound on `|F(1/(x₂ − x₁))|`.
    pub fn rectangle_bound(&self) -> f64 {
        1.0 - self.height * (self.x2 - self.x1)
    }

    pub fn frequency(&self) -> f64 {
        1.0 / (self.x2 - self.x1)
    }
}

/// Density at `x` with the shared default zeros.
pub fn area_density(x: f64) -> Result<f64> {
    ExcursionDensity::standard().density(x)
}

/// Characteristic function at `theta` with the shared default zeros.
pub fn area_characteristic(theta: f64) -> Result<Quadrature<Complex64>> {
    ExcursionDensity::standard().characteristic(theta)
}
