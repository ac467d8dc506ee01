//! Position-space hopping chain for one excess parenthesis.
//!
//! The weights use uncolored Motzkin numbers `M_k`, so the only color dependence is the
//! overall `1/(2s)`.

use crate::error::{domain, Result};
use crate::numeric::ratio_biguint;
use crate::walks::motzkin_number;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct UnbalancedChain {
    pub two_n: usize,
    pub s: u32,
    /// `α_j² = M_{2n−j−1} / (2s M_{2n−j})` for bonds `j = 1..2n−1` (index `j − 1`).
    pub alpha_sq: Vec<f64>,
    /// `β_j² = M_{j−1} / (2s M_j)`.
    pub beta_sq: Vec<f64>,
    /// Normalized `g_j ∝ √(M_{j−1} M_{2n−j})`, `j = 1..2n`.
    pub ground: Vec<f64>,
    /// `‖Σ Γ g‖`.
    pub move_residual: f64,
    /// Lowest eigenvalue of `|1⟩⟨1| + Σ Γ`.
    pub lambda1: f64,
    /// `π(1) = ⟨1|g⟩²`.
    pub pi_one: f64,
    /// Smallest and largest off-diagonal entry of the induced transition matrix.
    pub rate_min: f64,
    pub rate_max: f64,
    #[serde(skip)]
    pub hamiltonian: DMatrix<f64>,
}

pub fn build_unbalanced_chain(two_n: usize, s: u32) -> Result<UnbalancedChain> {
    if two_n < 2 || s == 0 {
        return Err(domain(format!("need two_n ≥ 2 and s ≥ 1, got two_n = {two_n}, s = {s}")));
    }
    let motzkin: Vec<_> = (0..=two_n).map(|k| motzkin_number(k, 1)).collect();
    let ratio = |a: usize, b: usize| ratio_biguint(&motzkin[a], &motzkin[b]);
    let two_s = 2.0 * f64::from(s);
    let bonds = two_n - 1;
    let alpha_sq: Vec<f64> = (1..=bonds).map(|j| ratio(two_n - j - 1, two_n - j) / two_s).collect();
    let beta_sq: Vec<f64> = (1..=bonds).map(|j| ratio(j - 1, j) / two_s).collect();
    let mut moves = DMatrix::zeros(two_n, two_n);
    for b in 0..bonds {
        let (a2, b2) = (alpha_sq[b], beta_sq[b]);
        moves[(b, b)] += a2;
        moves[(b + 1, b + 1)] += b2;
        moves[(b, b + 1)] -= (a2 * b2).sqrt();
        moves[(b + 1, b)] -= (a2 * b2).sqrt();
    }
    // √(M_{j−1} M_{2n−j}) relative to j = 1, in logs to stay finite.
    let ln_m: Vec<f64> = motzkin.iter().map(crate::numeric::ln_biguint).collect();
    let ln_g: Vec<f64> = (1..=two_n).map(|j| 0.5 * (ln_m[j - 1] + ln_m[two_n - j])).collect();
    let top = ln_g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut ground: Vec<f64> = ln_g.iter().map(|l| (l - top).exp()).collect();
    let norm = ground.iter().map(|x| x * x).sum::<f64>().sqrt();
    ground.iter_mut().for_each(|x| *x /= norm);
    let g = nalgebra::DVector::from_column_slice(&ground);
    let move_residual = (&moves * &g).norm();
    let mut hamiltonian = moves.clone();
    hamiltonian[(0, 0)] += 1.0;
    let lambda1 = SymmetricEigen::new(hamiltonian.clone()).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let pi: Vec<f64> = ground.iter().map(|x| x * x).collect();
    let mut rate_min = f64::INFINITY;
    let mut rate_max = 0.0f64;
    for j in 0..bonds {
        for (a, b) in [(j, j + 1), (j + 1, j)] {
            let rate = -moves[(a, b)] * (pi[b] / pi[a]).sqrt();
            rate_min = rate_min.min(rate);
            rate_max = rate_max.max(rate);
        }
    }
    Ok(UnbalancedChain {
        two_n,
        s,
        alpha_sq,
        beta_sq,
        pi_one: pi[0],
        ground,
        move_residual,
        lambda1,
        rate_min,
        rate_max,
        hamiltonian,
    })
}
