//! Shared numerical helpers: log-factorials, log-sum-exp, big-integer logs, binomials and
//! least-squares fits.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

const LN_FACT_TABLE: usize = 1 << 16;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Neumaier-compensated running sum of ln k keeps the table exact to ~1 ulp.
        let mut table = Vec::with_capacity(LN_FACT_TABLE);
        table.push(0.0);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        for k in 1..LN_FACT_TABLE {
            let term = (k as f64).ln();
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            table.push(sum + comp);
        }
        table
    })
}

/// `ln(k!)`.
pub fn ln_factorial(k: usize) -> f64 {
    if k < LN_FACT_TABLE {
        return ln_fact_table()[k];
    }
    let x = k as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `ln Γ(h/2)` for a positive integer `h` (integer and half-integer arguments).
pub fn ln_gamma_half(h: usize) -> f64 {
    assert!(h > 0, "ln_gamma_half needs a positive argument");
    if h % 2 == 0 {
        ln_factorial(h / 2 - 1)
    } else {
        // Γ(j + 1/2) = (2j)! √π / (4^j j!)
        let j = (h - 1) / 2;
        ln_factorial(2 * j) - 2.0 * j as f64 * LN_2 - ln_factorial(j) + 0.5 * PI.ln()
    }
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Stable `ln Σ exp(v_i)`; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Log-sum-exp over a unimodal sequence `f(lo..=hi)` with mode `mode`, walking outward and
/// dropping terms more than `cutoff` below the running maximum.
pub fn log_sum_exp_unimodal(
    lo: usize,
    hi: usize,
    mode: usize,
    cutoff: f64,
    mut f: impl FnMut(usize) -> f64,
) -> f64 {
    debug_assert!(lo <= mode && mode <= hi);
    let peak = f(mode);
    if peak == f64::NEG_INFINITY {
        return peak;
    }
    let mut acc = 1.0;
    let mut i = mode;
    while i > lo {
        i -= 1;
        let d = f(i) - peak;
        if d < -cutoff {
            break;
        }
        acc += d.exp();
    }
    let mut i = mode;
    while i < hi {
        i += 1;
        let d = f(i) - peak;
        if d < -cutoff {
            break;
        }
        acc += d.exp();
    }
    peak + acc.ln()
}

/// Natural log of a big unsigned integer, accurate to double precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().expect("fits in u64").to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("fits in u64") as f64;
    top.ln() + shift as f64 * LN_2
}

/// Ratio `a / b` of big integers as a double, without overflow.
pub fn ratio_biguint(a: &BigUint, b: &BigUint) -> f64 {
    (ln_biguint(a) - ln_biguint(b)).exp()
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Rows of Pascal's triangle, grown on demand.
#[derive(Debug, Clone, Default)]
pub struct Pascal {
    rows: Vec<Vec<BigUint>>,
}

impl Pascal {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, n: usize, k: usize) -> BigUint {
        if k > n {
            return BigUint::zero();
        }
        while self.rows.len() <= n {
            let next = match self.rows.last() {
                None => vec![BigUint::one()],
                Some(prev) => {
                    let mut row = Vec::with_capacity(prev.len() + 1);
                    row.push(BigUint::one());
                    for w in prev.windows(2) {
                        row.push(&w[0] + &w[1]);
                    }
                    row.push(BigUint::one());
                    row
                }
            };
            self.rows.push(next);
        }
        self.rows[n][k].clone()
    }
}

/// Ordinary least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "a line needs at least two points");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if xs.len() > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LinearFit { slope, intercept, slope_stderr }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_direct_sum_and_stirling_branch() {
        let direct: f64 = (1..=170).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(170) - direct).abs() < 1e-11);
        let k = LN_FACT_TABLE - 1;
        let from_table = ln_factorial(k) + ((k + 1) as f64).ln();
        assert!((from_table - ln_factorial(k + 1)).abs() / from_table < 1e-15);
    }

    #[test]
    fn gamma_half_integers() {
        assert!((ln_gamma_half(1) - 0.5 * PI.ln()).abs() < 1e-15);
        assert!((ln_gamma_half(5).exp() - 0.75 * PI.sqrt()).abs() < 1e-14);
        assert!((ln_gamma_half(8).exp() - 6.0).abs() < 1e-13);
    }

    #[test]
    fn big_logs_and_binomials() {
        let c = binomial(200, 100);
        assert!((ln_biguint(&c) - ln_binomial(200, 100)).abs() < 1e-12);
        let mut p = Pascal::new();
        assert_eq!(p.get(30, 12), binomial(30, 12));
        assert_eq!(p.get(3, 5), BigUint::zero());
    }

    #[test]
    fn unimodal_lse_matches_full_sum() {
        let f = |i: usize| -((i as f64 - 40.0) / 3.0).powi(2);
        let all: Vec<f64> = (0..100).map(f).collect();
        let full = log_sum_exp(&all);
        let fast = log_sum_exp_unimodal(0, 99, 40, 60.0, f);
        assert!((full - fast).abs() < 1e-14);
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 - 0.5 * x).collect();
        let fit = linear_fit(&xs, &ys);
        assert!((fit.slope + 0.5).abs() < 1e-14 && fit.slope_stderr < 1e-12);
    }
}
