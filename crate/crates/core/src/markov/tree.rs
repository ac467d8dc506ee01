//! Peak-removal super-tree over colored Dyck paths and the canonical-path load bound.
//!
//! Level `m` paths decompose uniquely as `P_α ℓ^k P_β r^k` with `α + β = m − 1`. A row block
//! `(α, β)` splits its unit mass between removing a peak inside `P_α` (weight `w_α`) and inside
//! `P_β` (weight `1 − w_α`), reusing the lower-level matchings as tensor factors. Choosing
//! `w_0 = 0` and `w_{j+1} = (c_m − (1 − w_j) c_{m−1−j}) / c_{j+1}` with `c_k = s C_k / C_{k−1}`
//! makes every column sum equal to `c_m`.

use super::{peak_multiplicity, peaks, remove_peak, DyckBasis, TransitionMatrix};
use crate::error::{check_size, domain, Error, Result};
use crate::hamiltonian::lowest_spectrum;
use crate::walks::{Step, Walk};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{HashMap, VecDeque};

/// Guard on `dim²` for the exhaustive pair routing in [`edge_load`].
pub const PAIR_LIMIT: f64 = 1e8;
const WEIGHT_TOL: f64 = 1e-9;

/// `c_m = s C_m / C_{m−1} = s (4m − 2) / (m + 1)`, the common column sum at level `m ≥ 1`.
pub fn column_sum(m: usize, s: u32) -> f64 {
    f64::from(s) * (4 * m - 2) as f64 / (m + 1) as f64
}

/// Row `i` lists `(column, weight)` for the `i`-th path of level `level`; columns index level
/// `level − 1`. Both are local positions inside their level.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalMatching {
    pub level: usize,
    pub columns: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl FractionalMatching {
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.columns];
        for row in &self.rows {
            for &(c, x) in row {
                sums[c] += x;
            }
        }
        sums
    }
}

/// Splits a Dyck path at its last return to height zero: `(P_α, k, P_β)`.
fn decompose(w: &Walk) -> (Walk, u32, Walk) {
    let heights = w.heights();
    let len = w.len();
    let split = (0..len - 1).rev().find(|&i| heights[i] == 0).map_or(0, |i| i + 1);
    let k = w.steps[split].color().expect("Dyck path has no flat steps");
    (Walk::new(w.steps[..split].to_vec()), k, Walk::new(w.steps[split + 1..len - 1].to_vec()))
}

fn compose(alpha: &Walk, k: u32, beta: &Walk) -> Walk {
    let mut steps = alpha.steps.clone();
    steps.push(Step::Up(k));
    steps.extend_from_slice(&beta.steps);
    steps.push(Step::Down(k));
    Walk::new(steps)
}

/// Block weights `w_0..w_{m−1}` for level `m ≥ 2`.
fn block_weights(m: usize, s: u32) -> Result<Vec<f64>> {
    let cm = column_sum(m, s);
    let mut w = vec![0.0];
    for i in 0..m - 1 {
        let next = (cm - (1.0 - w[i]) * column_sum(m - 1 - i, s)) / column_sum(i + 1, s);
        w.push(next);
    }
    if w.iter().any(|&x| !(-WEIGHT_TOL..=1.0 + WEIGHT_TOL).contains(&x)) || (w[m - 1] - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::MatchingInfeasible { level: m, msg: format!("block weights {w:?} leave [0, 1]") });
    }
    Ok(w.into_iter().map(|x| x.clamp(0.0, 1.0)).collect())
}

/// Fractional matchings for levels `1..=basis.n` (entry `m − 1` is level `m`).
pub fn fractional_matching(basis: &DyckBasis) -> Result<Vec<FractionalMatching>> {
    let local = |w: &Walk| {
        let i = basis.index_of(w).expect("path in basis");
        i - basis.level_range(w.len() / 2).start
    };
    let mut out: Vec<FractionalMatching> = Vec::new();
    for m in 1..=basis.n {
        let range = basis.level_range(m);
        let columns = basis.level_range(m - 1).len();
        let rows: Vec<Vec<(usize, f64)>> = if m == 1 {
            range.map(|_| vec![(0, 1.0)]).collect()
        } else {
            let w = block_weights(m, basis.s)?;
            range
                .map(|i| {
                    let (alpha, k, beta) = decompose(basis.path(i));
                    let (a, b) = (alpha.len() / 2, beta.len() / 2);
                    let mut row = Vec::new();
                    if a > 0 && w[a] > 0.0 {
                        for &(c, x) in &out[a - 1].rows[local(&alpha)] {
                            let shorter = basis.path(basis.level_range(a - 1).start + c);
                            row.push((local(&compose(shorter, k, &beta)), w[a] * x));
                        }
                    }
                    if b > 0 && w[a] < 1.0 {
                        for &(c, x) in &out[b - 1].rows[local(&beta)] {
                            let shorter = basis.path(basis.level_range(b - 1).start + c);
                            row.push((local(&compose(&alpha, k, shorter)), (1.0 - w[a]) * x));
                        }
                    }
                    row.sort_by_key(|e| e.0);
                    row
                })
                .collect()
        };
        out.push(FractionalMatching { level: m, columns, rows });
    }
    Ok(out)
}

/// Integral assignment inside the support of `frac` with column loads in `[lo, hi]`.
///
/// Greedy least-loaded placement first, then augmenting paths for unplaced rows, then
/// augmenting paths that move rows into columns below `lo`. Ties go to the lowest index.
fn round_matching(frac: &FractionalMatching, lo: usize, hi: usize) -> Result<Vec<usize>> {
    let infeasible = |msg: String| Error::MatchingInfeasible { level: frac.level, msg };
    let adj: Vec<Vec<usize>> =
        frac.rows.iter().map(|r| r.iter().filter(|e| e.1 > WEIGHT_TOL).map(|e| e.0).collect()).collect();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); frac.columns];
    for (r, cols) in adj.iter().enumerate() {
        for &c in cols {
            rev[c].push(r);
        }
    }
    const NONE: usize = usize::MAX;
    let mut assign = vec![NONE; adj.len()];
    let mut load = vec![0usize; frac.columns];
    for (r, cols) in adj.iter().enumerate() {
        if let Some(&c) = cols.iter().filter(|&&c| load[c] < hi).min_by_key(|&&c| (load[c], c)) {
            assign[r] = c;
            load[c] += 1;
        }
    }
    for r in 0..adj.len() {
        if assign[r] != NONE {
            continue;
        }
        // BFS over columns; `via[c]` is the row that would move into `c`.
        let mut via = vec![NONE; frac.columns];
        let mut queue = VecDeque::from([r]);
        let mut target = NONE;
        'search: while let Some(x) = queue.pop_front() {
            for &c in &adj[x] {
                if via[c] != NONE {
                    continue;
                }
                via[c] = x;
                if load[c] < hi {
                    target = c;
                    break 'search;
                }
                queue.extend(rev[c].iter().copied().filter(|&y| assign[y] == c));
            }
        }
        if target == NONE {
            return Err(infeasible(format!("row {r} cannot be placed under capacity {hi}")));
        }
        load[target] += 1;
        let mut c = target;
        loop {
            let x = via[c];
            let previous = assign[x];
            assign[x] = c;
            if x == r {
                break;
            }
            c = previous;
        }
    }
    while let Some(a) = (0..frac.columns).find(|&c| load[c] < lo) {
        // BFS from the deficient column; row `via_row[b]` would move from `b` to `via_col[b]`.
        let mut via_row = vec![NONE; frac.columns];
        let mut via_col = vec![NONE; frac.columns];
        via_col[a] = a;
        let mut queue = VecDeque::from([a]);
        let mut target = NONE;
        'search: while let Some(c) = queue.pop_front() {
            for &y in &rev[c] {
                let b = assign[y];
                if b == c || via_col[b] != NONE {
                    continue;
                }
                via_row[b] = y;
                via_col[b] = c;
                if load[b] > lo {
                    target = b;
                    break 'search;
                }
                queue.push_back(b);
            }
        }
        if target == NONE {
            return Err(infeasible(format!("column {a} stays below {lo}")));
        }
        load[target] -= 1;
        load[a] += 1;
        let mut b = target;
        while b != a {
            assign[via_row[b]] = via_col[b];
            b = via_col[b];
        }
    }
    Ok(assign)
}

#[derive(Debug, Clone)]
pub struct CanonicalTree {
    pub basis: DyckBasis,
    /// Parent of each path (global index); `None` for the root.
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub fractional: Vec<FractionalMatching>,
}

pub fn build_canonical_tree(n: usize, s: u32) -> Result<CanonicalTree> {
    let basis = DyckBasis::new(n, s)?;
    let fractional = fractional_matching(&basis)?;
    let mut parent = vec![None; basis.len()];
    let mut children = vec![Vec::new(); basis.len()];
    for frac in &fractional {
        let c = column_sum(frac.level, s);
        let (lo, hi) = ((c + WEIGHT_TOL).floor() as usize, (c - WEIGHT_TOL).ceil() as usize);
        let assign = round_matching(frac, lo, hi)?;
        let (rows, cols) = (basis.level_range(frac.level).start, basis.level_range(frac.level - 1).start);
        for (r, &c) in assign.iter().enumerate() {
            parent[rows + r] = Some(cols + c);
            children[cols + c].push(rows + r);
        }
    }
    Ok(CanonicalTree { basis, parent, children, fractional })
}

impl CanonicalTree {
    /// `[i, parent(i), …, root]`.
    pub fn ancestors(&self, i: usize) -> Vec<usize> {
        let mut out = vec![i];
        while let Some(p) = self.parent[*out.last().unwrap()] {
            out.push(p);
        }
        out
    }

    /// `(min, max)` child count over the nodes of level `m` (requires `m < n`).
    pub fn child_count_range(&self, m: usize) -> (usize, usize) {
        self.basis.level_range(m).map(|i| self.children[i].len()).fold((usize::MAX, 0), |(lo, hi), k| (lo.min(k), hi.max(k)))
    }
}

/// One transition of a canonical path, identified per peak as the multi-edge it uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Hop {
    from: usize,
    to: usize,
    /// Position of the inserted or removed peak in the longer of the two paths.
    peak: usize,
}

fn concat(p: &Walk, q: &Walk) -> Walk {
    let mut steps = p.steps.clone();
    steps.extend_from_slice(&q.steps);
    Walk::new(steps)
}

fn lowest_peak_to(larger: &Walk, smaller: &Walk) -> usize {
    peaks(larger).into_iter().find(|&p| remove_peak(larger, p) == *smaller).expect("tree edge is one peak removal")
}

fn route(tree: &CanonicalTree, from: usize, to: usize) -> Vec<Hop> {
    if from == to {
        return Vec::new();
    }
    let b = &tree.basis;
    let shrink = tree.ancestors(from);
    let mut grow = tree.ancestors(to);
    grow.reverse();
    let (mut i, mut j) = (0, 0);
    let mut hops = Vec::with_capacity(shrink.len() + grow.len());
    let mut current = from;
    // Grow first when the target is longer so lengths stay within [min, max] where possible.
    let mut growing = b.level_of(from) < b.level_of(to);
    while i + 1 < shrink.len() || j + 1 < grow.len() {
        let p = b.path(shrink[i]);
        let q = b.path(grow[j]);
        if growing && j + 1 < grow.len() {
            let q2 = b.path(grow[j + 1]);
            let next = b.index_of(&concat(p, q2)).expect("concatenation is a Dyck path");
            hops.push(Hop { from: current, to: next, peak: p.len() + lowest_peak_to(q2, q) });
            current = next;
            j += 1;
        } else if !growing && i + 1 < shrink.len() {
            let p2 = b.path(shrink[i + 1]);
            let next = b.index_of(&concat(p2, q)).expect("concatenation is a Dyck path");
            hops.push(Hop { from: current, to: next, peak: lowest_peak_to(p, p2) });
            current = next;
            i += 1;
        }
        growing = !growing;
    }
    hops
}

/// Sequence of basis indices from `from` to `to`; consecutive entries differ by one peak.
pub fn canonical_path(tree: &CanonicalTree, from: usize, to: usize) -> Vec<usize> {
    let mut out = vec![from];
    out.extend(route(tree, from, to).into_iter().map(|h| h.to));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeLoad {
    pub dim: usize,
    pub rho: f64,
    /// Most loaded transition `(from, to)` and the peak position it uses.
    pub argmax: (usize, usize),
    pub argmax_peak: usize,
    /// Longest canonical path, in transitions.
    pub path_length: usize,
    pub gap_bound: f64,
    pub gap_true: f64,
    pub lambda2: f64,
}

/// Exact maximum edge load over all ordered pairs, with multi-edges kept apart per peak.
pub fn edge_load(tree: &CanonicalTree, chain: &TransitionMatrix) -> Result<EdgeLoad> {
    let b = &tree.basis;
    let dim = b.len();
    if chain.dim != dim || chain.two_n != 2 * b.n || chain.s != b.s {
        return Err(domain("tree and transition matrix describe different bases"));
    }
    check_size("ordered path pairs", (dim as f64).powi(2), PAIR_LIMIT)?;
    let pi = &chain.stationary;
    let (loads, longest) = (0..dim)
        .into_par_iter()
        .fold(
            || (HashMap::<Hop, f64>::new(), 0usize),
            |(mut acc, mut longest), src| {
                for dst in (0..dim).filter(|&d| d != src) {
                    let hops = route(tree, src, dst);
                    longest = longest.max(hops.len());
                    for h in hops {
                        *acc.entry(h).or_insert(0.0) += pi[src] * pi[dst];
                    }
                }
                (acc, longest)
            },
        )
        .reduce(
            || (HashMap::new(), 0),
            |(mut a, la), (b, lb)| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0.0) += v;
                }
                (a, la.max(lb))
            },
        );
    let mut best: Option<(f64, Hop)> = None;
    let mut keys: Vec<&Hop> = loads.keys().collect();
    keys.sort_by_key(|h| (h.from, h.to, h.peak));
    for h in keys {
        let (pa, pb) = (b.path(h.from), b.path(h.to));
        let mult = if pa.len() > pb.len() { peak_multiplicity(pa, pb) } else { peak_multiplicity(pb, pa) };
        let capacity = pi[h.from] * chain.get(h.from, h.to) / mult as f64;
        let load = loads[h] / capacity;
        if best.map_or(true, |(l, _)| load > l) {
            best = Some((load, *h));
        }
    }
    let (rho, hop) = best.ok_or_else(|| domain("a single-path basis has no transitions"))?;
    let heff_gap = {
        // 1 − λ₂(P) from the symmetric similar form I − H_eff / (s(2n − 1)).
        let heff = super::build_heff(chain.two_n, chain.s)?;
        lowest_spectrum(&heff.op, 2, 1e-11)?.gap().unwrap_or(f64::NAN) / heff.scale()
    };
    Ok(EdgeLoad {
        dim,
        rho,
        argmax: (hop.from, hop.to),
        argmax_peak: hop.peak,
        path_length: longest,
        gap_bound: 1.0 / (rho * longest as f64),
        gap_true: heff_gap,
        lambda2: 1.0 - heff_gap,
    })
}
