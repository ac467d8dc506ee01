//! The colored Motzkin Hamiltonian as a sparse or matrix-free operator, its low spectrum,
//! frustration-freeness checks and the local-move equivalence classes.
//!
//! Two-site terms (digits as in [`crate::walks`], `ℓ^k = k`, `r^k = s + k`):
//! `|R^k⟩ = (|0 r^k⟩ − |r^k 0⟩)/√2`, `|L^k⟩ = (|0 ℓ^k⟩ − |ℓ^k 0⟩)/√2`,
//! `|φ^k⟩ = (|00⟩ − |ℓ^k r^k⟩)/√2` and the crossing projectors `|ℓ^k r^i⟩⟨ℓ^k r^i|`, `k ≠ i`.
//! The bond operator is the plain sum of these rank-one projectors; for `s ≥ 2` the `φ^k`
//! overlap on `|00⟩`, so it is not itself a projector, but its kernel is the one required.

mod eigen;
mod operator;

pub use eigen::{lowest_spectrum, lowest_spectrum_with, EigenOptions, SpectrumResult, DEFAULT_SEED, DEGENERACY_TOL};
pub use operator::{dot, norm, Identity, LinearOperator, SparseOperator};

use crate::error::{check_size, Error, Result};
use crate::numeric::{linear_fit, LinearFit};
use crate::walks::{enumerate_walks, Walk, WalkFilter};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_1_SQRT_2;

/// Largest basis the builders accept.
pub const MAX_BASIS: f64 = 2e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Boundary {
    /// Open chain with the boundary projectors that pin the ground state to Motzkin walks.
    MotzkinBoundary,
    /// Open chain, no boundary projectors.
    Open,
    /// Ring: adds the bond between the last and first site, no boundary projectors.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainSpec {
    pub two_n: usize,
    pub s: u32,
    pub boundary: Boundary,
    /// Field strength `ε₀`; the field enters as `(ε₀ / two_n) F`. Zero disables it.
    pub field_epsilon0: f64,
}

impl ChainSpec {
    pub fn new(two_n: usize, s: u32, boundary: Boundary) -> Self {
        ChainSpec { two_n, s, boundary, field_epsilon0: 0.0 }
    }

    pub fn local_dim(&self) -> usize {
        2 * self.s as usize + 1
    }

    pub fn dim(&self) -> f64 {
        (self.local_dim() as f64).powi(self.two_n as i32)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(Error::InvalidSpec("number of colors must be at least 1".into()));
        }
        if self.two_n < 2 || self.two_n % 2 != 0 {
            return Err(Error::InvalidSpec(format!("chain length {} must be even and at least 2", self.two_n)));
        }
        if !(self.field_epsilon0 >= 0.0 && self.field_epsilon0.is_finite()) {
            return Err(Error::InvalidSpec(format!("field strength {} must be finite and non-negative", self.field_epsilon0)));
        }
        check_size("Hilbert space dimension", self.dim(), MAX_BASIS)
    }

    fn bonds(&self) -> Vec<(usize, usize)> {
        let mut bonds: Vec<(usize, usize)> = (0..self.two_n - 1).map(|j| (j, j + 1)).collect();
        if self.boundary == Boundary::Periodic {
            bonds.push((self.two_n - 1, 0));
        }
        bonds
    }
}

/// Multipliers of the term families; `TermWeights::of` gives the Hamiltonian of a spec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TermWeights {
    pub boundary: f64,
    pub moves: f64,
    pub interaction: f64,
    pub cross: f64,
    pub field: f64,
}

impl TermWeights {
    pub const MOVES: TermWeights = TermWeights { boundary: 0.0, moves: 1.0, interaction: 0.0, cross: 0.0, field: 0.0 };
    pub const INTERACTION: TermWeights =
        TermWeights { boundary: 0.0, moves: 0.0, interaction: 1.0, cross: 0.0, field: 0.0 };
    pub const FIELD: TermWeights = TermWeights { boundary: 0.0, moves: 0.0, interaction: 0.0, cross: 0.0, field: 1.0 };

    pub fn of(spec: &ChainSpec) -> Self {
        TermWeights {
            boundary: if spec.boundary == Boundary::MotzkinBoundary { 1.0 } else { 0.0 },
            moves: 1.0,
            interaction: 1.0,
            cross: 1.0,
            field: spec.field_epsilon0 / spec.two_n as f64,
        }
    }

    /// The full Hamiltonian with the interaction scaled by `epsilon`.
    pub fn scaled_interaction(spec: &ChainSpec, epsilon: f64) -> Self {
        TermWeights { interaction: epsilon, ..TermWeights::of(spec) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BondKind {
    MoveRight,
    MoveLeft,
    Interaction,
    Cross,
}

/// One rank-one two-site projector `|t⟩⟨t|` as a list of `((left, right), amplitude)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BondTerm {
    pub kind: BondKind,
    pub label: String,
    pub components: Vec<((u32, u32), f64)>,
}

pub fn bond_terms(s: u32) -> Vec<BondTerm> {
    let (up, down) = (|k: u32| k, |k: u32| s + k);
    let h = FRAC_1_SQRT_2;
    let mut terms = Vec::new();
    for k in 1..=s {
        terms.push(BondTerm {
            kind: BondKind::MoveRight,
            label: format!("R{k}"),
            components: vec![((0, down(k)), h), ((down(k), 0), -h)],
        });
        terms.push(BondTerm {
            kind: BondKind::MoveLeft,
            label: format!("L{k}"),
            components: vec![((0, up(k)), h), ((up(k), 0), -h)],
        });
        terms.push(BondTerm {
            kind: BondKind::Interaction,
            label: format!("phi{k}"),
            components: vec![((0, 0), h), ((up(k), down(k)), -h)],
        });
    }
    for k in 1..=s {
        for i in (1..=s).filter(|&i| i != k) {
            terms.push(BondTerm {
                kind: BondKind::Cross,
                label: format!("cross{k}{i}"),
                components: vec![((up(k), down(i)), 1.0)],
            });
        }
    }
    terms
}

fn kind_weight(w: &TermWeights, kind: BondKind) -> f64 {
    match kind {
        BondKind::MoveRight | BondKind::MoveLeft => w.moves,
        BondKind::Interaction => w.interaction,
        BondKind::Cross => w.cross,
    }
}

/// Two-site operator on the `d²`-dimensional space, row `a d + b`.
pub fn local_bond_matrix(s: u32, weights: &TermWeights) -> nalgebra::DMatrix<f64> {
    let d = (2 * s + 1) as usize;
    let mut m = nalgebra::DMatrix::zeros(d * d, d * d);
    for t in bond_terms(s) {
        let w = kind_weight(weights, t.kind);
        for &((a, b), x) in &t.components {
            for &((c, e), y) in &t.components {
                m[(a as usize * d + b as usize, c as usize * d + e as usize)] += w * x * y;
            }
        }
    }
    m
}

/// Matrix-free Hamiltonian; agrees entrywise with the assembled [`SparseOperator`].
#[derive(Debug, Clone)]
pub struct ChainOperator {
    spec: ChainSpec,
    weights: TermWeights,
    dim: usize,
    d: usize,
    powers: Vec<usize>,
    bonds: Vec<(usize, usize)>,
    /// Non-zero entries `⟨ab|P|a'b'⟩` of the bond operator, indexed by `a d + b`.
    table: Vec<Vec<(usize, usize, f64)>>,
}

impl ChainOperator {
    pub fn new(spec: &ChainSpec, weights: &TermWeights) -> Result<Self> {
        spec.validate()?;
        let d = spec.local_dim();
        let local = local_bond_matrix(spec.s, weights);
        let table = (0..d * d)
            .map(|row| {
                (0..d * d)
                    .filter(|&col| local[(row, col)] != 0.0)
                    .map(|col| (col / d, col % d, local[(row, col)]))
                    .collect()
            })
            .collect();
        let powers = (0..spec.two_n).map(|j| d.pow((spec.two_n - 1 - j) as u32)).collect();
        Ok(ChainOperator {
            spec: *spec,
            weights: *weights,
            dim: d.pow(spec.two_n as u32),
            d,
            powers,
            bonds: spec.bonds(),
            table,
        })
    }

    #[inline]
    fn digit(&self, x: usize, site: usize) -> usize {
        (x / self.powers[site]) % self.d
    }

    /// Boundary and field contributions, both diagonal in the site basis.
    fn diagonal(&self, x: usize) -> f64 {
        let s = self.spec.s as usize;
        let mut acc = 0.0;
        if self.weights.boundary != 0.0 {
            if self.digit(x, 0) > s {
                acc += self.weights.boundary;
            }
            let last = self.digit(x, self.spec.two_n - 1);
            if (1..=s).contains(&last) {
                acc += self.weights.boundary;
            }
        }
        if self.weights.field != 0.0 {
            let occupied = (0..self.spec.two_n).filter(|&j| self.digit(x, j) != 0).count();
            acc += self.weights.field * occupied as f64;
        }
        acc
    }

    fn for_each_entry(&self, x: usize, mut f: impl FnMut(usize, f64)) {
        let diag = self.diagonal(x);
        if diag != 0.0 {
            f(x, diag);
        }
        for &(i, j) in &self.bonds {
            let (a, b) = (self.digit(x, i), self.digit(x, j));
            for &(a2, b2, v) in &self.table[a * self.d + b] {
                let y = x + a2 * self.powers[i] + b2 * self.powers[j] - a * self.powers[i] - b * self.powers[j];
                f(y, v);
            }
        }
    }

    pub fn assemble(&self) -> SparseOperator {
        let rows: Vec<Vec<(u32, f64)>> = (0..self.dim)
            .into_par_iter()
            .map(|x| {
                let mut row = Vec::new();
                self.for_each_entry(x, |y, v| row.push((y as u32, v)));
                row
            })
            .collect();
        SparseOperator::from_rows(self.dim, rows)
    }
}

impl LinearOperator for ChainOperator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(r, slot)| {
            let mut acc = 0.0;
            self.for_each_entry(r, |c, v| acc += v * x[c]);
            *slot = acc;
        });
    }

    fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .into_par_iter()
            .map(|r| {
                let mut acc = 0.0;
                self.for_each_entry(r, |_, v| acc += v.abs());
                acc
            })
            .reduce(|| 0.0, f64::max)
    }
}

pub fn build_hamiltonian(spec: &ChainSpec) -> Result<SparseOperator> {
    build_operator(spec, &TermWeights::of(spec))
}

pub fn build_operator(spec: &ChainSpec, weights: &TermWeights) -> Result<SparseOperator> {
    Ok(ChainOperator::new(spec, weights)?.assemble())
}

/// Uniform superposition of all colored Motzkin walks of length `two_n`.
pub fn state_vector(two_n: usize, s: u32) -> Result<Vec<f64>> {
    let spec = ChainSpec::new(two_n, s, Boundary::MotzkinBoundary);
    spec.validate()?;
    let walks: Vec<Walk> = enumerate_walks(two_n, s, WalkFilter::Motzkin)?.collect();
    let amp = 1.0 / (walks.len() as f64).sqrt();
    let mut v = vec![0.0; spec.dim() as usize];
    for w in &walks {
        v[w.basis_index(s) as usize] = amp;
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermEnergy {
    pub label: String,
    /// First site of the term (0-based).
    pub site: usize,
    pub energy: f64,
}

/// `⟨ψ|P|ψ⟩` for every individual projector of the spec's Hamiltonian.
pub fn term_energies(spec: &ChainSpec, psi: &[f64]) -> Result<Vec<TermEnergy>> {
    spec.validate()?;
    let d = spec.local_dim();
    let dim = spec.dim() as usize;
    assert_eq!(psi.len(), dim, "state has the wrong dimension");
    let s = spec.s as usize;
    let powers: Vec<usize> = (0..spec.two_n).map(|j| d.pow((spec.two_n - 1 - j) as u32)).collect();
    let digit = |x: usize, site: usize| (x / powers[site]) % d;
    let mut out = Vec::new();
    if spec.boundary == Boundary::MotzkinBoundary {
        for k in 1..=s {
            let left: f64 = (0..dim).filter(|&x| digit(x, 0) == s + k).map(|x| psi[x] * psi[x]).sum();
            out.push(TermEnergy { label: format!("boundary_r{k}"), site: 0, energy: left });
            let last = spec.two_n - 1;
            let right: f64 = (0..dim).filter(|&x| digit(x, last) == k).map(|x| psi[x] * psi[x]).sum();
            out.push(TermEnergy { label: format!("boundary_l{k}"), site: last, energy: right });
        }
    }
    let terms = bond_terms(spec.s);
    for (i, j) in spec.bonds() {
        for t in &terms {
            let ((a0, b0), _) = t.components[0];
            let energy: f64 = (0..dim)
                .into_par_iter()
                .filter(|&x| digit(x, i) == a0 as usize && digit(x, j) == b0 as usize)
                .map(|x| {
                    let base = x - a0 as usize * powers[i] - b0 as usize * powers[j];
                    let amp: f64 = t
                        .components
                        .iter()
                        .map(|&((a, b), c)| c * psi[base + a as usize * powers[i] + b as usize * powers[j]])
                        .sum();
                    amp * amp
                })
                .sum();
            out.push(TermEnergy { label: t.label.clone(), site: i, energy });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrustrationReport {
    pub max_term_energy: f64,
    pub violations: Vec<TermEnergy>,
    pub lambda1: f64,
    pub passed: bool,
}

/// Checks that every projector annihilates the Motzkin state and that `λ₁(H) = 0`.
pub fn verify_frustration_free(spec: &ChainSpec) -> Result<FrustrationReport> {
    let psi = state_vector(spec.two_n, spec.s)?;
    let energies = term_energies(spec, &psi)?;
    let max_term_energy = energies.iter().map(|t| t.energy).fold(0.0, f64::max);
    let violations: Vec<TermEnergy> = energies.into_iter().filter(|t| t.energy >= 1e-12).collect();
    let h = build_hamiltonian(spec)?;
    let lambda1 = lowest_spectrum(&h, 1, 1e-9)?.lowest_eigenvalues[0];
    let passed = violations.is_empty() && lambda1.abs() < 1e-10;
    Ok(FrustrationReport { max_term_energy, violations, lambda1, passed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoveClass {
    pub id: usize,
    pub size: usize,
    /// Smallest basis index in the class.
    pub representative: u64,
    /// `(p, q)` = (unmatched down steps, unmatched up steps) on the open chain; `None` when a
    /// down step meets an up step of another color, or on the ring.
    pub excess: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoveClasses {
    pub two_n: usize,
    pub s: u32,
    /// Class id of every basis string.
    pub labels: Vec<u32>,
    pub classes: Vec<MoveClass>,
}

impl MoveClasses {
    pub fn members(&self, id: usize) -> Vec<usize> {
        self.labels.iter().enumerate().filter(|(_, &l)| l as usize == id).map(|(x, _)| x).collect()
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[parent[x as usize] as usize];
        parent[x as usize] = p;
        x = p;
    }
    x
}

/// Reduced form of a walk on the open chain: `(unmatched downs, unmatched ups)`.
pub fn excess(w: &Walk) -> Option<(usize, usize)> {
    let mut open: Vec<u32> = Vec::new();
    let mut unmatched_down = 0;
    for st in &w.steps {
        match *st {
            crate::walks::Step::Flat => {}
            crate::walks::Step::Up(c) => open.push(c),
            crate::walks::Step::Down(c) => match open.last() {
                None => unmatched_down += 1,
                Some(&top) if top == c => {
                    open.pop();
                }
                Some(_) => return None,
            },
        }
    }
    Some((unmatched_down, open.len()))
}

/// Union-find closure of all strings under `0r ↔ r0`, `0ℓ ↔ ℓ0`, `00 ↔ ℓ^k r^k` on every bond.
pub fn local_move_classes(two_n: usize, s: u32, periodic: bool) -> Result<MoveClasses> {
    let boundary = if periodic { Boundary::Periodic } else { Boundary::Open };
    let spec = ChainSpec::new(two_n, s, boundary);
    spec.validate()?;
    let d = spec.local_dim();
    let dim = spec.dim() as usize;
    let powers: Vec<usize> = (0..two_n).map(|j| d.pow((two_n - 1 - j) as u32)).collect();
    let mut moves: Vec<((usize, usize), (usize, usize))> = Vec::new();
    for k in 1..=s as usize {
        moves.push(((0, s as usize + k), (s as usize + k, 0)));
        moves.push(((0, k), (k, 0)));
        moves.push(((0, 0), (k, s as usize + k)));
    }
    let mut parent: Vec<u32> = (0..dim as u32).collect();
    for x in 0..dim {
        for &(i, j) in &spec.bonds() {
            let (a, b) = ((x / powers[i]) % d, (x / powers[j]) % d);
            for &(from, to) in &moves {
                if (a, b) == from {
                    let y = x + to.0 * powers[i] + to.1 * powers[j] - a * powers[i] - b * powers[j];
                    let (rx, ry) = (find(&mut parent, x as u32), find(&mut parent, y as u32));
                    if rx != ry {
                        parent[rx.max(ry) as usize] = rx.min(ry);
                    }
                }
            }
        }
    }
    let mut id_of_root = vec![u32::MAX; dim];
    let mut labels = vec![0u32; dim];
    let mut classes: Vec<MoveClass> = Vec::new();
    for x in 0..dim {
        let root = find(&mut parent, x as u32) as usize;
        if id_of_root[root] == u32::MAX {
            id_of_root[root] = classes.len() as u32;
            let w = Walk::from_basis_index(x as u64, two_n, s);
            classes.push(MoveClass {
                id: classes.len(),
                size: 0,
                representative: x as u64,
                excess: if periodic { None } else { excess(&w) },
            });
        }
        let id = id_of_root[root];
        labels[x] = id;
        classes[id as usize].size += 1;
    }
    Ok(MoveClasses { two_n, s, labels, classes })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub two_n: usize,
    pub s: u32,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap: f64,
    pub residual_max: f64,
    pub ground_degeneracy: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapScan {
    pub rows: Vec<GapRow>,
    /// Least-squares line of `ln Δ` against `ln two_n`; the decay exponent is `-slope`.
    pub fit: Option<LinearFit>,
}

pub fn gap_row(spec: &ChainSpec, opts: &EigenOptions) -> Result<GapRow> {
    let h = build_hamiltonian(spec)?;
    let r = lowest_spectrum_with(&h, 2, opts)?;
    Ok(GapRow {
        two_n: spec.two_n,
        s: spec.s,
        lambda1: r.lowest_eigenvalues[0],
        lambda2: r.lowest_eigenvalues[1],
        gap: r.lowest_eigenvalues[1] - r.lowest_eigenvalues[0],
        residual_max: r.max_residual(),
        ground_degeneracy: r.ground_degeneracy,
    })
}

/// `Δ = λ₂ − λ₁` for each spec, sizes solved concurrently.
pub fn gap_scan(specs: &[ChainSpec], opts: &EigenOptions) -> Result<GapScan> {
    for spec in specs {
        spec.validate()?;
    }
    let rows = specs.par_iter().map(|spec| gap_row(spec, opts)).collect::<Result<Vec<_>>>()?;
    let fit = (rows.len() >= 2 && rows.iter().all(|r| r.gap > 0.0)).then(|| {
        let xs: Vec<f64> = rows.iter().map(|r| (r.two_n as f64).ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.gap.ln()).collect();
        linear_fit(&xs, &ys)
    });
    Ok(GapScan { rows, fit })
}
