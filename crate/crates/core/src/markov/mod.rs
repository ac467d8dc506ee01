//! Dynamics on colored Dyck paths: the zero-insertion embedding, the effective Hamiltonian of
//! the interaction term, its Markov transition matrix, the peak-removal super-tree with
//! canonical paths, and the hopping chain of the unbalanced sector.

mod tree;
mod unbalanced;

pub use tree::{
    build_canonical_tree, canonical_path, column_sum, edge_load, fractional_matching, CanonicalTree, EdgeLoad,
    FractionalMatching, PAIR_LIMIT,
};
pub use unbalanced::{build_unbalanced_chain, UnbalancedChain};

use crate::error::{check_size, domain, Error, Result};
use crate::hamiltonian::{lowest_spectrum, SparseOperator};
use crate::numeric::binomial;
use crate::walks::{encode_walk, motzkin_number, Step, Walk};
use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::HashMap;
use std::ops::Range;

/// Largest Dyck basis the builders accept.
pub const MAX_DYCK_BASIS: f64 = 1e5;
/// Transitions below this are treated as rounding noise rather than negative entries.
const NEGATIVE_TOL: f64 = 1e-12;

/// All colored Dyck paths of length `2m`, `m = 0..=n`, ordered by length and then by the text
/// encoding of the path.
#[derive(Debug, Clone)]
pub struct DyckBasis {
    pub n: usize,
    pub s: u32,
    paths: Vec<Walk>,
    level_start: Vec<usize>,
    index: HashMap<Walk, usize>,
}

/// `Σ_{m ≤ n} s^m C_m` as a float, for size guards.
pub fn dyck_basis_size(n: usize, s: u32) -> f64 {
    let mut total = 0.0;
    let mut catalan = 1.0f64;
    for m in 0..=n {
        if m > 0 {
            catalan *= 2.0 * (2 * m - 1) as f64 / (m + 1) as f64;
        }
        total += f64::from(s).powi(m as i32) * catalan;
    }
    total
}

/// Colored Dyck paths with `m` up steps, in generation order.
pub fn dyck_paths(m: usize, s: u32) -> Vec<Walk> {
    fn go(steps: &mut Vec<Step>, open: &mut Vec<u32>, ups_left: usize, s: u32, out: &mut Vec<Walk>) {
        if ups_left == 0 && open.is_empty() {
            out.push(Walk::new(steps.clone()));
            return;
        }
        if ups_left > 0 {
            for c in 1..=s {
                steps.push(Step::Up(c));
                open.push(c);
                go(steps, open, ups_left - 1, s, out);
                open.pop();
                steps.pop();
            }
        }
        if let Some(c) = open.pop() {
            steps.push(Step::Down(c));
            go(steps, open, ups_left, s, out);
            steps.pop();
            open.push(c);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut Vec::new(), m, s, &mut out);
    out
}

impl DyckBasis {
    pub fn new(n: usize, s: u32) -> Result<Self> {
        if s == 0 {
            return Err(domain("number of colors must be at least 1"));
        }
        check_size("Dyck basis dimension", dyck_basis_size(n, s), MAX_DYCK_BASIS)?;
        let mut paths = Vec::new();
        let mut level_start = vec![0];
        for m in 0..=n {
            let mut level: Vec<(String, Walk)> = dyck_paths(m, s).into_iter().map(|w| (encode_walk(&w), w)).collect();
            level.sort();
            paths.extend(level.into_iter().map(|(_, w)| w));
            level_start.push(paths.len());
        }
        let index = paths.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Ok(DyckBasis { n, s, paths, level_start, index })
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[Walk] {
        &self.paths
    }

    pub fn path(&self, i: usize) -> &Walk {
        &self.paths[i]
    }

    pub fn level_range(&self, m: usize) -> Range<usize> {
        self.level_start[m]..self.level_start[m + 1]
    }

    /// Number of up steps of the `i`-th path.
    pub fn level_of(&self, i: usize) -> usize {
        self.paths[i].len() / 2
    }

    pub fn index_of(&self, w: &Walk) -> Option<usize> {
        self.index.get(w).copied()
    }
}

/// Positions `p` with an up step at `p` immediately followed by its matching down step.
pub fn peaks(w: &Walk) -> Vec<usize> {
    w.steps
        .windows(2)
        .enumerate()
        .filter_map(|(p, pair)| match (pair[0], pair[1]) {
            (Step::Up(a), Step::Down(b)) if a == b => Some(p),
            _ => None,
        })
        .collect()
}

pub fn remove_peak(w: &Walk, p: usize) -> Walk {
    let mut steps = w.steps.clone();
    steps.drain(p..p + 2);
    Walk::new(steps)
}

/// Inserts a peak of color `k` before step `gap` (`gap = len` appends).
pub fn insert_peak(w: &Walk, gap: usize, k: u32) -> Walk {
    let mut steps = w.steps.clone();
    steps.splice(gap..gap, [Step::Up(k), Step::Down(k)]);
    Walk::new(steps)
}

/// Number of distinct peaks of `larger` whose removal gives `smaller`.
pub fn peak_multiplicity(larger: &Walk, smaller: &Walk) -> usize {
    peaks(larger).into_iter().filter(|&p| remove_peak(larger, p) == *smaller).count()
}

fn binom_f64(n: usize, k: usize) -> f64 {
    binomial(n as u64, k as u64).to_f64().expect("binomial fits a double")
}

/// `V|𝔰⟩`: the uniform superposition of all placements of `two_n − |𝔰|` flat steps into the
/// path, as `(basis index, amplitude)` pairs in increasing index order.
pub fn embed_v(path: &Walk, two_n: usize, s: u32) -> Result<Vec<(u64, f64)>> {
    let k = path.len();
    if k > two_n {
        return Err(domain(format!("path of length {k} does not fit {two_n} sites")));
    }
    let count = binom_f64(two_n, k);
    check_size("zero insertions", count, 1e7)?;
    let amp = 1.0 / count.sqrt();
    let digits = path.digits(s);
    let mut out = Vec::with_capacity(count as usize);
    // Positions of the non-flat steps, advanced in lexicographic order.
    let mut pos: Vec<usize> = (0..k).collect();
    let d = u64::from(2 * s + 1);
    loop {
        let mut idx = 0u64;
        let mut next = 0usize;
        for site in 0..two_n {
            let digit = if next < k && pos[next] == site {
                next += 1;
                digits[next - 1]
            } else {
                0
            };
            idx = idx * d + u64::from(digit);
        }
        out.push((idx, amp));
        let Some(i) = (0..k).rev().find(|&i| pos[i] < two_n - k + i) else { break };
        pos[i] += 1;
        for j in i + 1..k {
            pos[j] = pos[j - 1] + 1;
        }
    }
    out.sort_by_key(|e| e.0);
    Ok(out)
}

/// `H_eff = V† H_int V` on the Dyck basis of a chain of `two_n` sites.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub two_n: usize,
    pub basis: DyckBasis,
    pub op: SparseOperator,
}

/// Entries from closed-form placement counts: a bond hosts `00` in `(L−1)·C(L−2, 2m)`
/// placements and a given peak of `𝔰` stays adjacent in `C(L−1, 2m−1)` of them.
pub fn build_heff(two_n: usize, s: u32) -> Result<EffectiveHamiltonian> {
    if two_n < 2 || two_n % 2 != 0 {
        return Err(domain(format!("chain length {two_n} must be even and at least 2")));
    }
    let basis = DyckBasis::new(two_n / 2, s)?;
    let l = two_n;
    let sf = f64::from(s);
    let mut trip = Vec::new();
    for (i, w) in basis.paths().iter().enumerate() {
        let m = w.len() / 2;
        let adjacent_zeros = if 2 * m + 2 <= l { (l - 1) as f64 * binom_f64(l - 2, 2 * m) } else { 0.0 };
        let glued_peaks = if m > 0 { peaks(w).len() as f64 * binom_f64(l - 1, 2 * m - 1) } else { 0.0 };
        trip.push((i, i, (0.5 * sf * adjacent_zeros + 0.5 * glued_peaks) / binom_f64(l, 2 * m)));
        if m == 0 {
            continue;
        }
        // Each peak of the larger path is a separate insertion/removal route.
        let norm = (binom_f64(l, 2 * m - 2) * binom_f64(l, 2 * m)).sqrt();
        let value = -0.5 * binom_f64(l - 1, 2 * m - 1) / norm;
        for p in peaks(w) {
            let j = basis.index_of(&remove_peak(w, p)).expect("peak removal stays in the basis");
            trip.push((i, j, value));
            trip.push((j, i, value));
        }
    }
    let op = SparseOperator::from_triplets(basis.len(), trip);
    Ok(EffectiveHamiltonian { two_n, basis, op })
}

impl EffectiveHamiltonian {
    /// `|D^s⟩` amplitudes `√(C(2n, 2m) / M_{2n,s})`.
    pub fn ground_state(&self) -> Vec<f64> {
        let total = motzkin_number(self.two_n, self.basis.s).to_f64().expect("Motzkin number fits a double");
        (0..self.basis.len())
            .map(|i| (binom_f64(self.two_n, 2 * self.basis.level_of(i)) / total).sqrt())
            .collect()
    }

    /// `s(2n − 1)`, the normalization between `H_eff` and `I − P`.
    pub fn scale(&self) -> f64 {
        f64::from(self.basis.s) * (self.two_n - 1) as f64
    }

    pub fn gap(&self) -> Result<f64> {
        lowest_spectrum(&self.op, 2, 1e-10)?.gap().ok_or_else(|| domain("one-dimensional Dyck basis has no gap"))
    }
}

/// `P = I − diag(1/√π) H_eff diag(√π) / (s(2n−1))`, stored row-wise.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    pub two_n: usize,
    pub s: u32,
    pub dim: usize,
    pub p: SparseOperator,
    pub stationary: Vec<f64>,
    /// Level (number of up steps) of every basis path.
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionBounds {
    pub min_diagonal: f64,
    pub min_insertion: f64,
    pub min_removal: f64,
    pub insertion_floor: f64,
    pub removal_floor: f64,
}

pub fn build_p(two_n: usize, s: u32) -> Result<TransitionMatrix> {
    transition_matrix(&build_heff(two_n, s)?)
}

pub fn transition_matrix(heff: &EffectiveHamiltonian) -> Result<TransitionMatrix> {
    let root = heff.ground_state();
    let scale = heff.scale();
    let mut trip = Vec::with_capacity(heff.op.nnz() + heff.basis.len());
    for (r, c, v) in heff.op.triplets() {
        let value = if r == c { 1.0 } else { 0.0 } - v * root[c] / root[r] / scale;
        if value < -NEGATIVE_TOL {
            return Err(Error::NegativeEntry { row: r, col: c, value });
        }
        trip.push((r, c, value));
    }
    for i in 0..heff.basis.len() {
        if heff.op.get(i, i) == 0.0 {
            trip.push((i, i, 1.0));
        }
    }
    let dim = heff.basis.len();
    Ok(TransitionMatrix {
        two_n: heff.two_n,
        s: heff.basis.s,
        dim,
        p: SparseOperator::from_triplets(dim, trip),
        stationary: root.iter().map(|a| a * a).collect(),
        levels: (0..dim).map(|i| heff.basis.level_of(i)).collect(),
    })
}

impl TransitionMatrix {
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.p.get(a, b)
    }

    pub fn max_row_sum_error(&self) -> f64 {
        (0..self.dim).map(|r| (self.p.row(r).map(|(_, v)| v).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn max_detailed_balance_error(&self) -> f64 {
        self.p
            .triplets()
            .map(|(a, b, v)| (self.stationary[a] * v - self.stationary[b] * self.p.get(b, a)).abs())
            .fold(0.0, f64::max)
    }

    /// `max_t |Σ_s π(s) P(s,t) − π(t)|`.
    pub fn max_stationarity_error(&self) -> f64 {
        let mut flow = vec![0.0; self.dim];
        for (a, b, v) in self.p.triplets() {
            flow[b] += self.stationary[a] * v;
        }
        flow.iter().zip(&self.stationary).map(|(f, p)| (f - p).abs()).fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.p.triplets().map(|(_, _, v)| v).fold(f64::INFINITY, f64::min)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.p.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Second largest eigenvalue, from the real Schur form of the non-symmetric matrix.
    pub fn lambda2_nonsymmetric(&self) -> Result<f64> {
        let schur = nalgebra::linalg::Schur::try_new(self.to_dense(), 1e-15, 100_000)
            .ok_or_else(|| Error::NoConvergence("Schur iteration on the transition matrix".into()))?;
        let mut ev: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        Ok(ev.get(1).copied().unwrap_or(f64::NAN))
    }

    pub fn bounds(&self) -> TransitionBounds {
        let n = (self.two_n / 2) as f64;
        let mut b = TransitionBounds {
            min_diagonal: f64::INFINITY,
            min_insertion: f64::INFINITY,
            min_removal: f64::INFINITY,
            insertion_floor: 1.0 / (16.0 * n.powi(3)),
            removal_floor: 1.0 / (8.0 * n * n),
        };
        for (r, c, v) in self.p.triplets() {
            let slot = match self.levels[c].cmp(&self.levels[r]) {
                std::cmp::Ordering::Equal => &mut b.min_diagonal,
                std::cmp::Ordering::Greater => &mut b.min_insertion,
                std::cmp::Ordering::Less => &mut b.min_removal,
            };
            *slot = slot.min(v);
        }
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaFraction {
    /// `(4s)^w π(w)` with `π(w) = C(2n, 2w) / M_{2n,s}`.
    pub lhs: f64,
    /// `σ_w = s^w C_w π(w)`, the weight of level `w` in the Motzkin state.
    pub sigma: f64,
    /// `σ_w √π w^{3/2}`, what `lhs` tends to as `s^w C_w ~ (4s)^w / (√π w^{3/2})`.
    pub rhs: f64,
}

pub fn sigma_fraction(two_n: usize, s: u32, w: usize) -> SigmaFraction {
    let total = motzkin_number(two_n, s).to_f64().expect("Motzkin number fits a double");
    let pi_w = binom_f64(two_n, 2 * w) / total;
    let catalan = binom_f64(2 * w, w) / (w + 1) as f64;
    let sigma = f64::from(s).powi(w as i32) * catalan * pi_w;
    SigmaFraction {
        lhs: (4.0 * f64::from(s)).powi(w as i32) * pi_w,
        sigma,
        rhs: sigma * std::f64::consts::PI.sqrt() * (w as f64).powf(1.5),
    }
}
