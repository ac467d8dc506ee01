//! Lowest eigenpairs of a symmetric operator.
//!
//! Small problems are diagonalized densely. Larger ones use thick-restart Lanczos with full
//! reorthogonalization and locking: converged pairs are deflated, and a final run from a fresh
//! start vector certifies that no eigenvalue below the reported ones was missed (a single
//! Krylov sequence sees only one vector of a degenerate eigenspace).

use super::operator::{axpy_sub, dot, norm, scale, LinearOperator};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 42;
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Residuals must satisfy `‖Hv − λv‖ ≤ tol·‖H‖`.
    pub tol: f64,
    pub seed: u64,
    pub max_basis: usize,
    pub max_restarts: usize,
    /// Dimensions up to this size are diagonalized densely.
    pub dense_limit: usize,
    pub degeneracy_tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-9,
            seed: DEFAULT_SEED,
            max_basis: 48,
            max_restarts: 3000,
            dense_limit: 1500,
            degeneracy_tol: DEGENERACY_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub lowest_eigenvalues: Vec<f64>,
    pub residual_norms: Vec<f64>,
    /// Eigenvalues within `degeneracy_tol` of the lowest one: over the full spectrum on the
    /// dense path, over the reported ones otherwise.
    pub ground_degeneracy: usize,
    /// Largest |Ritz value| seen, a lower estimate of `‖H‖` used to scale the tolerance.
    pub norm_estimate: f64,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
}

impl SpectrumResult {
    pub fn gap(&self) -> Option<f64> {
        match self.lowest_eigenvalues.as_slice() {
            [a, b, ..] => Some(b - a),
            _ => None,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_norms.iter().copied().fold(0.0, f64::max)
    }
}

pub fn lowest_spectrum(op: &dyn LinearOperator, k: usize, tol: f64) -> Result<SpectrumResult> {
    lowest_spectrum_with(op, k, &EigenOptions { tol, ..EigenOptions::default() })
}

pub fn lowest_spectrum_with(op: &dyn LinearOperator, k: usize, opts: &EigenOptions) -> Result<SpectrumResult> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("requested {k} eigenvalues of a {n}-dimensional operator")));
    }
    if n <= opts.dense_limit {
        return Ok(dense_lowest(op, k, opts));
    }
    let mut norm_est = 0.0f64;
    let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut run = 0u64;
    while found.len() < k {
        let got = thick_restart(op, k - found.len(), &found, opts, run, &mut norm_est)?;
        run += 1;
        if got.is_empty() {
            break;
        }
        found.extend(got);
    }
    sort_pairs(&mut found);
    // Certification: a fresh start vector must not uncover anything below the k-th value.
    while found.len() < n {
        let kth = found[k.min(found.len()) - 1].0;
        let got = thick_restart(op, 1, &found, opts, run, &mut norm_est)?;
        run += 1;
        match got.into_iter().next() {
            Some(pair) if pair.0 < kth - opts.tol * norm_est.max(1.0) => {
                found.push(pair);
                sort_pairs(&mut found);
            }
            _ => break,
        }
    }
    found.truncate(k);
    let residual_norms: Vec<f64> = found.iter().map(|(l, v)| residual(op, *l, v)).collect();
    let limit = opts.tol * norm_est.max(f64::MIN_POSITIVE) * 10.0;
    if let Some(bad) = residual_norms.iter().find(|r| **r > limit) {
        return Err(Error::NoConvergence(format!("certified residual {bad:e} exceeds {limit:e}")));
    }
    let lowest = found[0].0;
    let ground_degeneracy = found.iter().filter(|p| p.0 - lowest <= opts.degeneracy_tol).count();
    Ok(SpectrumResult {
        lowest_eigenvalues: found.iter().map(|p| p.0).collect(),
        residual_norms,
        ground_degeneracy,
        norm_estimate: norm_est,
        eigenvectors: found.into_iter().map(|p| p.1).collect(),
    })
}

fn sort_pairs(pairs: &mut [(f64, Vec<f64>)]) {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
}

fn residual(op: &dyn LinearOperator, lambda: f64, v: &[f64]) -> f64 {
    let mut w = vec![0.0; v.len()];
    op.apply(v, &mut w);
    axpy_sub(&mut w, lambda, v);
    norm(&w)
}

fn dense_lowest(op: &dyn LinearOperator, k: usize, opts: &EigenOptions) -> SpectrumResult {
    let a = op.to_dense();
    let sym = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lowest = eig.eigenvalues[order[0]];
    let ground_degeneracy = order.iter().filter(|&&i| eig.eigenvalues[i] - lowest <= opts.degeneracy_tol).count();
    let norm_estimate = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let eigenvectors: Vec<Vec<f64>> =
        order[..k].iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect();
    let lowest_eigenvalues: Vec<f64> = order[..k].iter().map(|&i| eig.eigenvalues[i]).collect();
    let residual_norms =
        lowest_eigenvalues.iter().zip(&eigenvectors).map(|(l, v)| residual(op, *l, v)).collect();
    SpectrumResult { lowest_eigenvalues, residual_norms, ground_degeneracy, norm_estimate, eigenvectors }
}

fn orthogonalize(w: &mut [f64], basis: &[Vec<f64>], locked: &[(f64, Vec<f64>)]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            axpy_sub(w, c, q);
        }
        for (_, l) in locked {
            let c = dot(l, w);
            axpy_sub(w, c, l);
        }
    }
}

/// Random unit vector orthogonal to `basis` and `locked`, or `None` if they span everything.
fn fresh_vector(
    rng: &mut ChaCha8Rng,
    n: usize,
    basis: &[Vec<f64>],
    locked: &[(f64, Vec<f64>)],
) -> Option<Vec<f64>> {
    for _ in 0..5 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let before = norm(&v);
        orthogonalize(&mut v, basis, locked);
        let after = norm(&v);
        if after > 1e-8 * before {
            scale(&mut v, 1.0 / after);
            return Some(v);
        }
    }
    None
}

/// Converged lowest `want` pairs of the operator deflated by `locked`.
fn thick_restart(
    op: &dyn LinearOperator,
    want: usize,
    locked: &[(f64, Vec<f64>)],
    opts: &EigenOptions,
    run: u64,
    norm_est: &mut f64,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = op.dim();
    let avail = n - locked.len();
    if avail == 0 {
        return Ok(Vec::new());
    }
    let want = want.min(avail);
    let mut m = opts.max_basis.max(2 * want + 8).min(avail);
    let keep = (want + 8).min(m.saturating_sub(1)).max(want.min(m));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(run.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    let mut basis: Vec<Vec<f64>> = match fresh_vector(&mut rng, n, &[], locked) {
        Some(v) => vec![v],
        None => return Ok(Vec::new()),
    };
    let mut t = DMatrix::<f64>::zeros(m, m);
    let mut best = f64::INFINITY;
    let mut w = vec![0.0; n];
    for _restart in 0..=opts.max_restarts {
        let mut beta;
        loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            let mut h = vec![0.0; j + 1];
            for _ in 0..2 {
                for (i, q) in basis.iter().enumerate() {
                    let c = dot(q, &w);
                    axpy_sub(&mut w, c, q);
                    h[i] += c;
                }
                for (_, l) in locked {
                    let c = dot(l, &w);
                    axpy_sub(&mut w, c, l);
                }
            }
            for (i, hi) in h.iter().enumerate() {
                t[(i, j)] = *hi;
                t[(j, i)] = *hi;
            }
            beta = norm(&w);
            if j + 1 == m {
                break;
            }
            if beta > 1e-12 * norm_est.max(h[j].abs()).max(1e-300) {
                let mut q = w.clone();
                scale(&mut q, 1.0 / beta);
                basis.push(q);
            } else {
                // Invariant subspace: continue the basis with a fresh direction.
                beta = 0.0;
                match fresh_vector(&mut rng, n, &basis, locked) {
                    Some(q) => basis.push(q),
                    None => {
                        m = basis.len();
                        break;
                    }
                }
            }
        }
        let size = basis.len();
        let eig = SymmetricEigen::new(t.view((0, 0), (size, size)).clone_owned());
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        *norm_est = eig.eigenvalues.iter().map(|v| v.abs()).fold(*norm_est, f64::max);
        let threshold = opts.tol * norm_est.max(f64::MIN_POSITIVE);
        let estimate = |i: usize| beta * eig.eigenvectors[(size - 1, order[i])].abs();
        let ready = want.min(size);
        let worst = (0..ready).map(estimate).fold(0.0, f64::max);
        best = best.min(worst);
        let ritz = |i: usize| -> Vec<f64> {
            let col = order[i];
            let mut y = vec![0.0; n];
            for (c, q) in basis.iter().enumerate() {
                axpy_sub(&mut y, -eig.eigenvectors[(c, col)], q);
            }
            y
        };
        if worst <= threshold {
            let pairs: Vec<(f64, Vec<f64>)> = (0..ready).map(|i| (eig.eigenvalues[order[i]], ritz(i))).collect();
            // Loss of orthogonality would show up as an explicit residual far above the estimate.
            if pairs.iter().all(|(l, v)| residual(op, *l, v) <= 10.0 * threshold) {
                return Ok(pairs);
            }
        }
        let p = keep.min(size.saturating_sub(1)).max(1);
        let mut next: Vec<Vec<f64>> = (0..p).map(ritz).collect();
        t.fill(0.0);
        for i in 0..p {
            t[(i, i)] = eig.eigenvalues[order[i]];
        }
        let continuation = if beta > 0.0 {
            let mut q = w.clone();
            orthogonalize(&mut q, &next, locked);
            let nq = norm(&q);
            (nq > 1e-12 * beta).then(|| {
                scale(&mut q, 1.0 / nq);
                q
            })
        } else {
            None
        };
        match continuation.or_else(|| fresh_vector(&mut rng, n, &next, locked)) {
            Some(q) => next.push(q),
            None => {
                // The kept Ritz vectors already span the available space.
                return Ok((0..ready).map(|i| (eig.eigenvalues[order[i]], ritz(i))).collect());
            }
        }
        basis = next;
    }
    Err(Error::NoConvergence(format!("{} restarts, best residual estimate {best:e}", opts.max_restarts)))
}
