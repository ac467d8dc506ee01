//! Schmidt spectrum of the half-chain cut and the entanglement entropy, exact and asymptotic.
//!
//! Cutting a chain of `2n` sites in the middle, the coefficient for height `m` is
//! `p_m = M_{n,m,s}^2 / N_{n,s}` and appears `s^m` times (one per coloring of the open steps).

use crate::error::{domain, Result};
use crate::walks::{halfwalk_mode, CountTable, LOG_CUTOFF};
use num_bigint::BigUint;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyUnit {
    Nats,
    Bits,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchmidtLevel {
    pub m: usize,
    /// `ln p_m` of a single Schmidt coefficient squared at this height.
    pub ln_weight: f64,
    /// `ln s^m`.
    pub ln_multiplicity: f64,
}

impl SchmidtLevel {
    pub fn weight(&self) -> f64 {
        self.ln_weight.exp()
    }

    /// Total probability carried by the height, `s^m p_m`.
    pub fn level_probability(&self) -> f64 {
        (self.ln_weight + self.ln_multiplicity).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtSpectrum {
    pub n: usize,
    pub s: u32,
    pub levels: Vec<SchmidtLevel>,
}

impl SchmidtSpectrum {
    pub fn total_probability(&self) -> f64 {
        self.levels.iter().map(SchmidtLevel::level_probability).sum()
    }

    /// Number of non-zero Schmidt coefficients, `Σ_m s^m`.
    pub fn rank(&self) -> BigUint {
        self.levels
            .iter()
            .filter(|l| l.ln_weight > f64::NEG_INFINITY)
            .map(|l| BigUint::from(self.s).pow(l.m as u32))
            .sum()
    }

    /// Von Neumann entropy in nats, dropping levels more than `LOG_CUTOFF` below the largest.
    pub fn entropy(&self) -> f64 {
        let top = self
            .levels
            .iter()
            .map(|l| l.ln_weight + l.ln_multiplicity)
            .fold(f64::NEG_INFINITY, f64::max);
        self.levels
            .iter()
            .filter(|l| l.ln_weight + l.ln_multiplicity >= top - LOG_CUTOFF)
            .map(|l| -l.level_probability() * l.ln_weight)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    pub n: usize,
    pub s: u32,
    pub exact_nats: f64,
    pub asymptotic_nats: f64,
    pub ratio: f64,
}

fn check_args(n: usize, s: u32) -> Result<()> {
    if s == 0 {
        return Err(domain("number of colors must be at least 1"));
    }
    if n == 0 {
        return Err(domain("half-chain length must be at least 1"));
    }
    Ok(())
}

pub fn schmidt_spectrum(n: usize, s: u32) -> Result<SchmidtSpectrum> {
    check_args(n, s)?;
    let table = CountTable::new(n, s)?;
    Ok(spectrum_from_table(&table))
}

pub fn spectrum_from_table(table: &CountTable) -> SchmidtSpectrum {
    let ln_s = f64::from(table.s).ln();
    let levels = (0..=table.n)
        .map(|m| SchmidtLevel {
            m,
            ln_weight: 2.0 * table.ln_count(m) - table.ln_total(),
            ln_multiplicity: m as f64 * ln_s,
        })
        .collect();
    SchmidtSpectrum { n: table.n, s: table.s, levels }
}

/// `(s^{n+1} - 1)/(s - 1)`, or `n + 1` for a single color.
pub fn schmidt_rank(n: usize, s: u32) -> BigUint {
    if s == 1 {
        return BigUint::from(n + 1);
    }
    (BigUint::from(s).pow(n as u32 + 1) - 1u32) / BigUint::from(s - 1)
}

pub fn entropy_exact(n: usize, s: u32) -> Result<f64> {
    Ok(schmidt_spectrum(n, s)?.entropy())
}

/// `√s / (2√s + 1)`.
pub fn sigma(s: u32) -> f64 {
    let r = f64::from(s).sqrt();
    r / (2.0 * r + 1.0)
}

pub fn entropy_asymptotic(n: usize, s: u32, unit: EntropyUnit) -> Result<f64> {
    check_args(n, s)?;
    let nf = n as f64;
    let sg = sigma(s);
    let spread = (2.0 * sg / PI).sqrt() * nf.sqrt();
    Ok(match unit {
        EntropyUnit::Nats => {
            2.0 * f64::from(s).ln() * spread + 0.5 * nf.ln() + EULER_GAMMA - 0.5
                + 0.5 * (LN_2 + PI.ln() + sg.ln())
        }
        EntropyUnit::Bits => {
            2.0 * f64::from(s).log2() * spread + 0.5 * nf.log2() + asymptotic_constant_bits(s)
        }
    })
}

/// Constant term of the asymptotic entropy in bits: `(γ - 1/2) log₂e + (1 + log₂π + log₂σ)/2`.
pub fn asymptotic_constant_bits(s: u32) -> f64 {
    (EULER_GAMMA - 0.5) * std::f64::consts::LOG2_E + 0.5 * (1.0 + PI.log2() + sigma(s).log2())
}

pub fn entropy_report(n: usize, s: u32) -> Result<EntropyReport> {
    let exact_nats = entropy_exact(n, s)?;
    let asymptotic_nats = entropy_asymptotic(n, s, EntropyUnit::Nats)?;
    Ok(EntropyReport { n, s, exact_nats, asymptotic_nats, ratio: exact_nats / asymptotic_nats })
}

/// Location of the largest term `M_{n,m,s,i}` over `i`, expanded to third order in `m/n`.
pub fn saddle_point(n: usize, m: usize, s: u32) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let rs = f64::from(s).sqrt();
    let x = mf / nf;
    sigma(s) * nf - mf / 2.0
        + mf / (8.0 * rs) * x
        + (4.0 * f64::from(s) - 1.0) * mf / (128.0 * f64::from(s) * rs) * x.powi(3)
}

/// The level weight `s^m M²` peaks at `m ≈ alpha_peak(s) √n`.
pub fn alpha_peak(s: u32) -> f64 {
    (2.0 * sigma(s)).sqrt()
}

/// Height `m` maximizing `s^m M_{n,m,s}^2`.
pub fn peak_height(n: usize, s: u32) -> Result<usize> {
    let spec = schmidt_spectrum(n, s)?;
    Ok(spec
        .levels
        .iter()
        .max_by(|a, b| {
            (a.ln_weight + a.ln_multiplicity).total_cmp(&(b.ln_weight + b.ln_multiplicity))
        })
        .map(|l| l.m)
        .expect("non-empty spectrum"))
}

/// Mean midpoint height under the ground-state measure.
pub fn expected_mid_height(n: usize, s: u32) -> Result<f64> {
    let spec = schmidt_spectrum(n, s)?;
    Ok(spec.levels.iter().map(|l| l.m as f64 * l.level_probability()).sum())
}

/// `2 √(2σ/π) √n`; for one color this is `2 √(2/(3π)) √n`.
pub fn expected_mid_height_asymptotic(n: usize, s: u32) -> f64 {
    2.0 * (2.0 * sigma(s) / PI).sqrt() * (n as f64).sqrt()
}

/// Index of the largest closed-form term, exposed for saddle-point diagnostics.
pub fn term_argmax(n: usize, m: usize, s: u32) -> usize {
    halfwalk_mode(n, m, s)
}
