//! Phase-twisted Motzkin state `|φ⟩ ∝ Σ_p e^{2πi t A_p} |p⟩` and its exact energy.
//!
//! `A_p` is the sum of the post-step heights of walk `p`. Every local move (`0r ↔ r0`,
//! `0ℓ ↔ ℓ0`, `00 ↔ ℓr`) changes exactly one column height by one, so each pair of walks
//! linked by a move contributes `(1 − cos 2πt) / M` to `⟨φ|H|φ⟩`. The energy therefore only
//! needs the number of linked pairs, and the overlap with the ground state only needs the
//! area histogram.

use crate::error::{check_size, domain, Error, Result};
use crate::walks::{enumerate_walks, motzkin_number, WalkFilter};
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::Serialize;
use std::f64::consts::PI;

/// Twist `t = √3 / (2√(5/3 − π/2)) · n^{−3/2}` for walks of length `two_n = 2n`. In excursion
/// units it is the frequency `1/σ`, one over the standard deviation of the area.
pub fn trial_twist(two_n: usize) -> f64 {
    let n = two_n as f64 / 2.0;
    3f64.sqrt() / (2.0 * (5.0 / 3.0 - PI / 2.0).sqrt()) * n.powf(-1.5)
}

/// Longest chain the exact trial energy will enumerate for `s` colors.
pub fn max_trial_length(s: u32) -> usize {
    match s {
        1 => 18,
        2 => 12,
        _ => 10,
    }
}

fn check_trial(two_n: usize, s: u32) -> Result<()> {
    if s == 0 || two_n < 2 || two_n % 2 != 0 {
        return Err(domain(format!("trial state needs even two_n ≥ 2 and s ≥ 1, got two_n = {two_n}, s = {s}")));
    }
    check_size("trial-state chain length", two_n as f64, max_trial_length(s) as f64)
}

/// Area histogram and move-pair count of all colored Motzkin walks of one length.
#[derive(Debug, Clone, Serialize)]
pub struct AreaProfile {
    pub two_n: usize,
    pub s: u32,
    pub walks: u64,
    /// `counts[a]` walks have area `a`.
    pub counts: Vec<u64>,
    /// Unordered pairs of walks linked by one local move.
    pub move_pairs: u64,
}

impl AreaProfile {
    /// `⟨M|φ⟩ = (1/M) Σ_p e^{2πi t A_p}`.
    pub fn overlap(&self, twist: f64) -> Complex64 {
        let total: Complex64 = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(a, &c)| Complex64::from_polar(c as f64, 2.0 * PI * twist * a as f64))
            .sum();
        total / self.walks as f64
    }

    /// `⟨φ|H|φ⟩ = (1 − cos 2πt) · pairs / M`.
    pub fn energy(&self, twist: f64) -> f64 {
        // 1 − cos x = 2 sin²(x/2) avoids cancellation at small twist.
        let half = (PI * twist).sin();
        2.0 * half * half * self.move_pairs as f64 / self.walks as f64
    }

    pub fn mean_area(&self) -> f64 {
        let sum: f64 = self.counts.iter().enumerate().map(|(a, &c)| a as f64 * c as f64).sum();
        sum / self.walks as f64
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Shape {
    Flat,
    Up,
    Down,
}

struct Accumulator {
    len: usize,
    s: u64,
    counts: Vec<u64>,
    walks: u64,
    move_pairs: u64,
}

impl Accumulator {
    /// Depth-first over uncolored shapes; a shape with `u` up steps stands for `s^u` colored
    /// walks with the same area and the same move pairs (a down step's color is forced).
    fn descend(&mut self, pos: usize, height: usize, area: usize, pairs: u64, weight: u64, prev: Option<Shape>) {
        if pos == self.len {
            self.counts[area] += weight;
            self.walks += weight;
            self.move_pairs += weight * pairs;
            return;
        }
        let remaining = self.len - pos - 1;
        for step in [Shape::Flat, Shape::Up, Shape::Down] {
            let h = match step {
                Shape::Flat => height,
                Shape::Up => height + 1,
                Shape::Down if height > 0 => height - 1,
                Shape::Down => continue,
            };
            if h > remaining {
                continue;
            }
            // Pairs are counted at the walk holding the first component of each move
            // projector: 0r, 0ℓ and ℓr.
            let linked = matches!(
                (prev, step),
                (Some(Shape::Flat), Shape::Down) | (Some(Shape::Flat), Shape::Up) | (Some(Shape::Up), Shape::Down)
            );
            let w = if step == Shape::Up { weight * self.s } else { weight };
            self.descend(pos + 1, h, area + h, pairs + u64::from(linked), w, Some(step));
        }
    }
}

/// Exact area histogram and move-pair count by enumeration.
pub fn area_profile(two_n: usize, s: u32) -> Result<AreaProfile> {
    check_trial(two_n, s)?;
    let max_area = two_n * two_n / 4;
    let mut acc = Accumulator { len: two_n, s: u64::from(s), counts: vec![0; max_area + 1], walks: 0, move_pairs: 0 };
    acc.descend(0, 0, 0, 0, 1, None);
    debug_assert_eq!(Some(acc.walks), motzkin_number(two_n, s).to_u64());
    Ok(AreaProfile { two_n, s, walks: acc.walks, counts: acc.counts, move_pairs: acc.move_pairs })
}

/// Explicit trial state over the colored Motzkin walks, in basis order.
#[derive(Debug, Clone, Serialize)]
pub struct TrialState {
    pub two_n: usize,
    pub s: u32,
    pub twist: f64,
    /// Basis index of each Motzkin walk.
    pub indices: Vec<u64>,
    /// Column-height sum of each walk.
    pub areas: Vec<i64>,
}

impl TrialState {
    pub fn modulus(&self) -> f64 {
        (self.indices.len() as f64).sqrt().recip()
    }

    pub fn amplitude(&self, i: usize) -> Complex64 {
        Complex64::from_polar(self.modulus(), 2.0 * PI * self.twist * self.areas[i] as f64)
    }

    pub fn norm_sq(&self) -> f64 {
        (0..self.indices.len()).map(|i| self.amplitude(i).norm_sqr()).sum()
    }

    /// Real and imaginary parts as dense vectors over the full `(2s+1)^{2n}` basis.
    pub fn dense_parts(&self) -> (Vec<f64>, Vec<f64>) {
        let dim = (2 * self.s as usize + 1).pow(self.two_n as u32);
        let (mut re, mut im) = (vec![0.0; dim], vec![0.0; dim]);
        for (i, &idx) in self.indices.iter().enumerate() {
            let a = self.amplitude(i);
            re[idx as usize] = a.re;
            im[idx as usize] = a.im;
        }
        (re, im)
    }
}

pub fn trial_state(two_n: usize, s: u32, twist: f64) -> Result<TrialState> {
    check_trial(two_n, s)?;
    let (indices, areas) =
        enumerate_walks(two_n, s, WalkFilter::Motzkin)?.map(|w| (w.basis_index(s), w.area())).unzip();
    Ok(TrialState { two_n, s, twist, indices, areas })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrialEnergy {
    pub two_n: usize,
    pub s: u32,
    pub twist: f64,
    pub overlap: Complex64,
    pub energy: f64,
}

impl TrialEnergy {
    pub fn overlap_sq(&self) -> f64 {
        self.overlap.norm_sqr()
    }
}

/// `⟨M|φ⟩` and `⟨φ|H|φ⟩` for the trial state with the given twist, by exact enumeration.
pub fn trial_energy_exact(two_n: usize, s: u32, twist: f64) -> Result<TrialEnergy> {
    let profile = area_profile(two_n, s)?;
    Ok(TrialEnergy { two_n, s, twist, overlap: profile.overlap(twist), energy: profile.energy(twist) })
}

/// Variational upper bound on the gap of the Motzkin (balanced) sector.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapBound {
    pub two_n: usize,
    pub s: u32,
    pub twist: f64,
    /// Multiple of [`trial_twist`] needed to bring the overlap² to at most 1/2.
    pub twist_factor: f64,
    pub overlap_sq: f64,
    pub energy: f64,
    /// `2⟨φ|H|φ⟩`, valid once `|⟨M|φ⟩|² ≤ 1/2`.
    pub bound: f64,
    /// `⟨φ|H|φ⟩ / (1 − |⟨M|φ⟩|²)`, the sharper form of the same argument.
    pub sharp_bound: f64,
}

/// Largest multiple of the default twist tried before giving up.
pub const MAX_TWIST_FACTOR: f64 = 10.0;

/// Doubles the twist from [`trial_twist`] until the overlap² is at most 1/2.
pub fn variational_gap_bound(two_n: usize, s: u32) -> Result<GapBound> {
    let profile = area_profile(two_n, s)?;
    let base = trial_twist(two_n);
    let mut factor = 1.0;
    let mut last_overlap = 1.0;
    while factor <= MAX_TWIST_FACTOR {
        let twist = base * factor;
        let overlap_sq = profile.overlap(twist).norm_sqr();
        if overlap_sq <= 0.5 {
            let energy = profile.energy(twist);
            return Ok(GapBound {
                two_n,
                s,
                twist,
                twist_factor: factor,
                overlap_sq,
                energy,
                bound: 2.0 * energy,
                sharp_bound: energy / (1.0 - overlap_sq),
            });
        }
        last_overlap = overlap_sq;
        factor *= 2.0;
    }
    Err(Error::OverlapTooLarge { overlap_sq: last_overlap, theta: base * factor / 2.0 })
}
