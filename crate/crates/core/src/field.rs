//! Chain without boundary projectors in a weak external field `(ε₀ / 2n) F`, where `F` counts
//! the non-flat sites.
//!
//! Without boundaries every class of strings connected by local moves carries a zero mode. The
//! field splits them at first order by the class average of `F`, which only depends on the
//! total number `m = p + q` of unmatched steps. The Motzkin class (`m = 0`) ends up lowest.

use crate::error::{check_size, domain, Result};
use crate::hamiltonian::{build_hamiltonian, local_move_classes, Boundary, ChainSpec, MAX_BASIS};
use crate::numeric::{ln_binomial, log_sum_exp, ratio_biguint};
use crate::schmidt::sigma;
use nalgebra::SymmetricEigen;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

/// Longest walk handled with exact integer sums.
pub const EXACT_FIELD_MAX: usize = 2000;
/// Longest walk handled in the log domain.
pub const LOG_FIELD_MAX: usize = 10_000_000;

/// Terms `M_{n,m,s,i}` (walks of `n` steps ending at height `m` with `i` down steps, the
/// colors of the `m` open up steps fixed), `i = 0..=(n−m)/2`.
fn halfwalk_terms(n: usize, m: usize, s: u32) -> Vec<BigUint> {
    let imax = (n - m) / 2;
    let mut terms = Vec::with_capacity(imax + 1);
    // M_{n,m,s,0} = C(n, m); the successive ratio is s·a(a−1) / ((i+m+2)(i+1)), a = n−2i−m.
    let mut t = crate::numeric::binomial(n as u64, m as u64);
    for i in 0..=imax {
        terms.push(t.clone());
        if i < imax {
            let a = (n - 2 * i - m) as u64;
            t = t * (u64::from(s) * a * (a - 1)) / ((i + m + 2) as u64 * (i + 1) as u64);
        }
    }
    terms
}

fn check_field(n: usize, m: usize, s: u32) -> Result<()> {
    if s == 0 {
        return Err(domain("number of colors must be at least 1"));
    }
    if m > n {
        return Err(domain(format!("height {m} exceeds walk length {n}")));
    }
    Ok(())
}

/// `⟨g_m|F|g_m⟩ = m + 2 Σ_i i M_{n,m,s,i} / Σ_i M_{n,m,s,i}` as an exact rational: the mean
/// number of non-flat steps over walks of `n` steps ending at height `m`.
pub fn field_expectation_rational(n: usize, m: usize, s: u32) -> Result<BigRational> {
    check_field(n, m, s)?;
    check_size("exact field expectation walk length", n as f64, EXACT_FIELD_MAX as f64)?;
    let terms = halfwalk_terms(n, m, s);
    let (weighted, total) = weighted_sums(&terms);
    Ok(BigRational::from_integer(m.into()) + BigRational::new((weighted * 2u32).into(), total.into()))
}

fn weighted_sums(terms: &[BigUint]) -> (BigUint, BigUint) {
    terms.iter().enumerate().fold((BigUint::zero(), BigUint::zero()), |(w, t), (i, x)| (w + x * i, t + x))
}

/// [`field_expectation_rational`] rounded to `f64`, from exact integer sums.
pub fn field_expectation_exact(n: usize, m: usize, s: u32) -> Result<f64> {
    check_field(n, m, s)?;
    check_size("exact field expectation walk length", n as f64, EXACT_FIELD_MAX as f64)?;
    let terms = halfwalk_terms(n, m, s);
    let (weighted, total) = weighted_sums(&terms);
    Ok(m as f64 + 2.0 * ratio_biguint(&weighted, &total))
}

/// The same mean evaluated in the log domain, for walks too long for exact sums.
pub fn field_expectation_log(n: usize, m: usize, s: u32) -> Result<f64> {
    check_field(n, m, s)?;
    check_size("log-domain field expectation walk length", n as f64, LOG_FIELD_MAX as f64)?;
    let imax = (n - m) / 2;
    let ln_s = f64::from(s).ln();
    // ln M_{n,m,s,i} = ln C(n, 2i+m) + ln ballot(2i+m, m) + i ln s, ballot = (m+1)/(i+m+1)·C(2i+m, i).
    let ln_term = |i: usize| {
        ln_binomial(n, 2 * i + m) + ((m + 1) as f64).ln() - ((i + m + 1) as f64).ln() + ln_binomial(2 * i + m, i)
            + i as f64 * ln_s
    };
    let terms: Vec<f64> = (0..=imax).map(ln_term).collect();
    let weighted: Vec<f64> = terms.iter().enumerate().skip(1).map(|(i, t)| t + (i as f64).ln()).collect();
    if weighted.is_empty() {
        return Ok(m as f64);
    }
    Ok(m as f64 + 2.0 * (log_sum_exp(&weighted) - log_sum_exp(&terms)).exp())
}

/// `2σn + (m / 4√s)(m/n) + ((4s − 1) m / (64 s√s))(m/n)³`.
pub fn field_expectation_asymptotic(n: usize, m: usize, s: u32) -> f64 {
    let (nf, mf, sf) = (n as f64, m as f64, f64::from(s));
    let x = mf / nf;
    2.0 * sigma(s) * nf + mf / (4.0 * sf.sqrt()) * x + (4.0 * sf - 1.0) * mf / (64.0 * sf * sf.sqrt()) * x.powi(3)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FieldLevel {
    pub m: usize,
    /// `⟨g_m|F|g_m⟩` on the chain of length `2n`.
    pub exact_expectation: f64,
    pub asymptotic: f64,
    /// `(ε₀ / 2n) ⟨g_m|F|g_m⟩`.
    pub delta_e: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldReport {
    pub n: usize,
    pub s: u32,
    pub epsilon0: f64,
    /// `2σε₀`, the leading-order ground energy.
    pub ground_energy: f64,
    pub levels: Vec<FieldLevel>,
}

impl FieldReport {
    /// `0 < ΔE_m ≤ ε₀` for every level.
    pub fn energies_bounded(&self) -> bool {
        self.levels.iter().all(|l| l.delta_e > 0.0 && l.delta_e <= self.epsilon0)
    }

    pub fn energies_nondecreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].delta_e >= w[0].delta_e)
    }
}

/// First-order energies `ΔE_m` for `m = 0..=m_max` (capped at `2n`) on the chain of length `2n`.
pub fn field_energies(n: usize, s: u32, epsilon0: f64, m_max: usize) -> Result<FieldReport> {
    if !(epsilon0 > 0.0 && epsilon0 < 1.0) {
        return Err(domain(format!("field strength ε₀ = {epsilon0} must lie in (0, 1)")));
    }
    if n == 0 {
        return Err(domain("chain half-length must be at least 1"));
    }
    let len = 2 * n;
    let scale = epsilon0 / len as f64;
    let levels = (0..=m_max.min(len))
        .map(|m| {
            let exact = if len <= EXACT_FIELD_MAX {
                field_expectation_exact(len, m, s)?
            } else {
                field_expectation_log(len, m, s)?
            };
            Ok(FieldLevel {
                m,
                exact_expectation: exact,
                asymptotic: field_expectation_asymptotic(len, m, s),
                delta_e: scale * exact,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FieldReport { n, s, epsilon0, ground_energy: 2.0 * sigma(s) * epsilon0, levels })
}

/// Normalization `(1 + α² + α⁻²)^{−n}` of the product state on `two_n` sites.
pub fn product_normalization(two_n: usize, alpha: f64) -> f64 {
    (1.0 + alpha * alpha + 1.0 / (alpha * alpha)).powf(-(two_n as f64) / 2.0)
}

/// `(1 + α² + α⁻²)^{−n} ⊗_j (α|ℓ⟩ + |0⟩ + α⁻¹|r⟩)` for `s = 1`, in the site basis.
pub fn product_ground_state(two_n: usize, alpha: f64) -> Result<Vec<f64>> {
    if alpha == 0.0 || !alpha.is_finite() {
        return Err(domain(format!("product state needs a finite nonzero alpha, got {alpha}")));
    }
    check_size("product state dimension", 3f64.powi(two_n as i32), MAX_BASIS)?;
    let site = [1.0, alpha, 1.0 / alpha];
    let norm = product_normalization(two_n, alpha);
    let dim = 3usize.pow(two_n as u32);
    Ok((0..dim)
        .map(|mut x| {
            let mut amp = norm;
            for _ in 0..two_n {
                amp *= site[x % 3];
                x /= 3;
            }
            amp
        })
        .collect())
}

/// Lowest energy of one move class of the boundary-free chain in the field, next to the
/// first-order prediction.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SectorEnergy {
    /// Unmatched down and up steps.
    pub p: usize,
    pub q: usize,
    pub size: usize,
    /// Lowest eigenvalue of `H + (ε₀/2n) F` restricted to the class.
    pub lowest: f64,
    /// `(ε₀/2n)` times the class average of `F`.
    pub class_average: f64,
    /// `(ε₀/2n) ⟨g_m|F|g_m⟩` with `m = p + q`.
    pub first_order: f64,
}

/// Diagonalizes the boundary-free chain in the field class by class. The Hamiltonian preserves
/// each move class, so the restriction is exact. Classes with a color mismatch are skipped.
pub fn sector_energies(two_n: usize, s: u32, epsilon0: f64) -> Result<Vec<SectorEnergy>> {
    let spec = ChainSpec { field_epsilon0: epsilon0, ..ChainSpec::new(two_n, s, Boundary::Open) };
    spec.validate()?;
    let h = build_hamiltonian(&spec)?;
    let classes = local_move_classes(two_n, s, false)?;
    let d = spec.local_dim();
    let eps = epsilon0 / two_n as f64;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes.classes.len()];
    for (x, &label) in classes.labels.iter().enumerate() {
        members[label as usize].push(x);
    }
    classes
        .classes
        .iter()
        .filter_map(|c| c.excess.map(|pq| (c, pq)))
        .map(|(class, (p, q))| {
            let idx = &members[class.id];
            let block = h.restrict(idx);
            let lowest = SymmetricEigen::new(block).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            let occupied: usize = idx
                .iter()
                .map(|&x| {
                    let mut x = x;
                    let mut count = 0;
                    for _ in 0..two_n {
                        count += usize::from(x % d != 0);
                        x /= d;
                    }
                    count
                })
                .sum();
            let class_average = eps * occupied as f64 / idx.len() as f64;
            let first_order = eps * field_expectation_exact(two_n, p + q, s)?;
            Ok(SectorEnergy { p, q, size: idx.len(), lowest, class_average, first_order })
        })
        .collect()
}
