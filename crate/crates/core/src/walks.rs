//! Colored Motzkin walks: steps, enumeration, exact and logarithmic counting, text encoding.
//!
//! A site holds one of `2s + 1` symbols. Digit 0 is a flat step, digits `1..=s` are up steps
//! of color `1..=s` and digits `s+1..=2s` are down steps of color `1..=s`. Walks are ordered
//! lexicographically by these digits, which is also the order of basis indices.

use crate::error::{check_size, domain, Error, Result};
use crate::numeric::{ln_biguint, ln_factorial, log_sum_exp, log_sum_exp_unimodal, Pascal};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

/// Enumeration refuses to touch more than this many raw strings.
pub const ENUMERATION_LIMIT: f64 = 1e8;

/// Terms this far (in nats) below the largest one are dropped from log-domain sums.
pub(crate) const LOG_CUTOFF: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Flat,
    Up(u32),
    Down(u32),
}

impl Step {
    /// Site digit of this step for `s` colors.
    pub fn digit(self, s: u32) -> u32 {
        match self {
            Step::Flat => 0,
            Step::Up(c) => c,
            Step::Down(c) => s + c,
        }
    }

    pub fn from_digit(d: u32, s: u32) -> Step {
        debug_assert!(d <= 2 * s);
        match d {
            0 => Step::Flat,
            d if d <= s => Step::Up(d),
            d => Step::Down(d - s),
        }
    }

    pub fn delta(self) -> i64 {
        match self {
            Step::Flat => 0,
            Step::Up(_) => 1,
            Step::Down(_) => -1,
        }
    }

    pub fn color(self) -> Option<u32> {
        match self {
            Step::Flat => None,
            Step::Up(c) | Step::Down(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Walk {
    pub steps: Vec<Step>,
}

impl Walk {
    pub fn new(steps: Vec<Step>) -> Self {
        Walk { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Heights after each step.
    pub fn heights(&self) -> Vec<i64> {
        self.steps
            .iter()
            .scan(0i64, |h, st| {
                *h += st.delta();
                Some(*h)
            })
            .collect()
    }

    pub fn final_height(&self) -> i64 {
        self.steps.iter().map(|s| s.delta()).sum()
    }

    /// Area as the sum of post-step heights.
    pub fn area(&self) -> i64 {
        self.heights().iter().sum()
    }

    pub fn digits(&self, s: u32) -> Vec<u32> {
        self.steps.iter().map(|st| st.digit(s)).collect()
    }

    pub fn from_digits(digits: &[u32], s: u32) -> Walk {
        Walk::new(digits.iter().map(|&d| Step::from_digit(d, s)).collect())
    }

    /// Basis index with the first site as the most significant base-`2s+1` digit.
    pub fn basis_index(&self, s: u32) -> u64 {
        let d = u64::from(2 * s + 1);
        self.steps.iter().fold(0u64, |acc, st| acc * d + u64::from(st.digit(s)))
    }

    pub fn from_basis_index(mut index: u64, len: usize, s: u32) -> Walk {
        let d = u64::from(2 * s + 1);
        let mut digits = vec![0u32; len];
        for slot in digits.iter_mut().rev() {
            *slot = (index % d) as u32;
            index /= d;
        }
        Walk::from_digits(&digits, s)
    }

    /// Walk with all flat steps removed.
    pub fn without_flats(&self) -> Walk {
        Walk::new(self.steps.iter().copied().filter(|s| *s != Step::Flat).collect())
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&encode_walk(self))
    }
}

impl FromStr for Walk {
    type Err = Error;
    fn from_str(text: &str) -> Result<Walk> {
        decode_walk(text)
    }
}

fn colors_in_range(w: &Walk, s: u32) -> bool {
    w.steps.iter().all(|st| st.color().map_or(true, |c| (1..=s).contains(&c)))
}

/// Height profile of a walk that never dips below zero and closes every down step on an up
/// step of the same color. Returns the colors still open at the end.
fn open_colors(w: &Walk) -> Option<Vec<u32>> {
    let mut stack = Vec::new();
    for st in &w.steps {
        match *st {
            Step::Flat => {}
            Step::Up(c) => stack.push(c),
            Step::Down(c) => {
                if stack.pop() != Some(c) {
                    return None;
                }
            }
        }
    }
    Some(stack)
}

/// Balanced, never negative, and every down step matches the color of its up step.
pub fn is_motzkin(w: &Walk, s: u32) -> bool {
    colors_in_range(w, s) && open_colors(w).is_some_and(|open| open.is_empty())
}

/// Prefix-valid walk ending at height `m`: a Motzkin half-chain with `m` open up steps.
pub fn is_halfwalk(w: &Walk, s: u32, m: usize) -> bool {
    colors_in_range(w, s) && open_colors(w).is_some_and(|open| open.len() == m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkFilter {
    All,
    Motzkin,
    /// Motzkin walks without flat steps.
    DyckStrict,
    /// Prefix-valid walks ending at the given height.
    EndHeight(usize),
}

/// Lazy lexicographic enumeration of walks of a fixed length.
#[derive(Debug, Clone)]
pub struct WalkIter {
    len: usize,
    s: u32,
    filter: WalkFilter,
    digits: Vec<u32>,
    height: i64,
    open: Vec<u32>,
    undo: Vec<Option<u32>>,
    started: bool,
    done: bool,
}

pub fn enumerate_walks(len: usize, s: u32, filter: WalkFilter) -> Result<WalkIter> {
    if s == 0 {
        return Err(domain("number of colors must be at least 1"));
    }
    let raw = f64::from(2 * s + 1).powi(len as i32);
    check_size("walk enumeration (2s+1)^L", raw, ENUMERATION_LIMIT)?;
    Ok(WalkIter {
        len,
        s,
        filter,
        digits: Vec::with_capacity(len),
        height: 0,
        open: Vec::with_capacity(len),
        undo: Vec::with_capacity(len),
        started: false,
        done: false,
    })
}

impl WalkIter {
    fn feasible(&self, d: u32) -> bool {
        let pos = self.digits.len();
        let rem = (self.len - pos - 1) as i64;
        let step = Step::from_digit(d, self.s);
        let h = self.height + step.delta();
        let matched = match step {
            Step::Down(c) => self.open.last() == Some(&c),
            _ => true,
        };
        match self.filter {
            WalkFilter::All => true,
            WalkFilter::Motzkin => matched && h >= 0 && h <= rem,
            WalkFilter::DyckStrict => {
                step != Step::Flat && matched && h >= 0 && h <= rem && (rem - h) % 2 == 0
            }
            WalkFilter::EndHeight(m) => matched && h >= 0 && (h - m as i64).abs() <= rem,
        }
    }

    fn apply(&mut self, d: u32) {
        let step = Step::from_digit(d, self.s);
        self.height += step.delta();
        let popped = match step {
            Step::Up(c) => {
                self.open.push(c);
                None
            }
            Step::Down(_) => self.open.pop(),
            Step::Flat => None,
        };
        self.undo.push(popped);
        self.digits.push(d);
    }

    fn retract(&mut self) -> u32 {
        let d = self.digits.pop().expect("non-empty prefix");
        let popped = self.undo.pop().expect("undo record");
        let step = Step::from_digit(d, self.s);
        self.height -= step.delta();
        match step {
            Step::Up(_) => {
                self.open.pop();
            }
            Step::Down(_) => {
                if let Some(c) = popped {
                    self.open.push(c);
                }
            }
            Step::Flat => {}
        }
        d
    }

    /// Completes the prefix with the smallest feasible digits.
    fn fill(&mut self) -> bool {
        let base = self.digits.len();
        while self.digits.len() < self.len {
            match (0..=2 * self.s).find(|&d| self.feasible(d)) {
                Some(d) => self.apply(d),
                None => {
                    while self.digits.len() > base {
                        self.retract();
                    }
                    return false;
                }
            }
        }
        true
    }

    fn current(&self) -> Walk {
        Walk::from_digits(&self.digits, self.s)
    }
}

impl Iterator for WalkIter {
    type Item = Walk;

    fn next(&mut self) -> Option<Walk> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            if self.fill() {
                return Some(self.current());
            }
            self.done = true;
            return None;
        }
        while !self.digits.is_empty() {
            let d = self.retract();
            for nd in d + 1..=2 * self.s {
                if self.feasible(nd) {
                    self.apply(nd);
                    if self.fill() {
                        return Some(self.current());
                    }
                    self.retract();
                }
            }
        }
        self.done = true;
        None
    }
}

/// Paths of `len` up/down steps that stay non-negative and end at height `m`:
/// `C(len, i) - C(len, i-1)` with `len = 2i + m`, zero on a parity mismatch.
pub fn ballot_count(len: usize, m: usize) -> BigUint {
    let mut pascal = Pascal::new();
    ballot_with(&mut pascal, len, m)
}

fn ballot_with(pascal: &mut Pascal, len: usize, m: usize) -> BigUint {
    if m > len || (len - m) % 2 != 0 {
        return BigUint::zero();
    }
    let i = (len - m) / 2;
    let a = pascal.get(len, i);
    if i == 0 {
        a
    } else {
        a - pascal.get(len, i - 1)
    }
}

/// Number of `s`-colored walks of `n` steps ending at height `m` (the half-chain count).
pub fn colored_halfwalk_count(n: usize, m: usize, s: u32) -> BigUint {
    let mut pascal = Pascal::new();
    halfwalk_with(&mut pascal, n, m, s)
}

fn halfwalk_with(pascal: &mut Pascal, n: usize, m: usize, s: u32) -> BigUint {
    if m > n {
        return BigUint::zero();
    }
    let base = BigUint::from(s);
    let mut power = BigUint::one();
    let mut total = BigUint::zero();
    for i in 0..=(n - m) / 2 {
        let len = 2 * i + m;
        total += pascal.get(n, len) * ballot_with(pascal, len, m) * &power;
        power *= &base;
    }
    total
}

/// Number of `s`-colored Motzkin walks of length `len`: `Σ_w s^w C_w C(len, 2w)`.
pub fn motzkin_number(len: usize, s: u32) -> BigUint {
    let mut pascal = Pascal::new();
    let base = BigUint::from(s);
    let mut power = BigUint::one();
    let mut total = BigUint::zero();
    for w in 0..=len / 2 {
        let catalan = ballot_with(&mut pascal, 2 * w, 0);
        total += &power * catalan * pascal.get(len, 2 * w);
        power *= &base;
    }
    total
}

/// `A_L = (3^{L+1} + (-1)^L) / 4`.
///
/// This is the total area (sum of post-step heights) of the uncolored walks `u w d` of
/// length `L + 2` whose interior `w` is any Motzkin walk of length `L`, i.e. the strictly
/// positive walks. Seeds: `A_0 = 1`, `A_1 = 2`.
pub fn dyck_area_total(len: usize) -> BigUint {
    let p = BigUint::from(3u32).pow(len as u32 + 1);
    let q = if len % 2 == 0 { p + 1u32 } else { p - 1u32 };
    q / 4u32
}

/// `ln M_{n,m,s}` from the closed-form term sum, evaluated in the log domain.
pub fn ln_halfwalk_count(n: usize, m: usize, s: u32) -> f64 {
    if m > n {
        return f64::NEG_INFINITY;
    }
    let imax = (n - m) / 2;
    let ln_s = f64::from(s).ln();
    let head = ((m + 1) as f64).ln() + ln_factorial(n);
    let term =
        |i: usize| head - ln_factorial(i + m + 1) - ln_factorial(i) - ln_factorial(n - 2 * i - m) + i as f64 * ln_s;
    let mode = halfwalk_mode(n, m, s);
    log_sum_exp_unimodal(0, imax, mode, LOG_CUTOFF, term)
}

/// Index `i` of the largest term `M_{n,m,s,i}`: the first `i` at which the successive term
/// ratio drops below one.
pub fn halfwalk_mode(n: usize, m: usize, s: u32) -> usize {
    let imax = (n - m) / 2;
    let ratio_below_one = |i: usize| -> bool {
        let a = (n - 2 * i - m) as f64;
        let num = f64::from(s) * a * (a - 1.0).max(0.0);
        num < ((i + m + 2) * (i + 1)) as f64
    };
    let (mut lo, mut hi) = (0usize, imax);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if ratio_below_one(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Half-chain counts `M_{n,m,s}` for `m = 0..=n`, exact for `n ≤ EXACT_MAX_N`, logarithmic always.
#[derive(Debug, Clone)]
pub struct CountTable {
    pub n: usize,
    pub s: u32,
    exact: Option<Vec<BigUint>>,
    exact_total: Option<BigUint>,
    ln_counts: Vec<f64>,
    ln_total: f64,
}

impl CountTable {
    pub const EXACT_MAX_N: usize = 300;

    pub fn new(n: usize, s: u32) -> Result<Self> {
        if n <= Self::EXACT_MAX_N {
            Self::exact(n, s)
        } else {
            Self::log_only(n, s)
        }
    }

    pub fn exact(n: usize, s: u32) -> Result<Self> {
        if s == 0 {
            return Err(domain("number of colors must be at least 1"));
        }
        check_size("exact count table n", n as f64, Self::EXACT_MAX_N as f64)?;
        let mut pascal = Pascal::new();
        let counts: Vec<BigUint> = (0..=n).map(|m| halfwalk_with(&mut pascal, n, m, s)).collect();
        let base = BigUint::from(s);
        let mut power = BigUint::one();
        let mut total = BigUint::zero();
        for c in &counts {
            total += &power * c * c;
            power *= &base;
        }
        let ln_counts = counts.iter().map(ln_biguint).collect();
        let ln_total = ln_biguint(&total);
        Ok(CountTable { n, s, exact: Some(counts), exact_total: Some(total), ln_counts, ln_total })
    }

    pub fn log_only(n: usize, s: u32) -> Result<Self> {
        if s == 0 {
            return Err(domain("number of colors must be at least 1"));
        }
        let ln_counts: Vec<f64> = (0..=n).into_par_iter().map(|m| ln_halfwalk_count(n, m, s)).collect();
        let ln_s = f64::from(s).ln();
        let weights: Vec<f64> = ln_counts.iter().enumerate().map(|(m, l)| m as f64 * ln_s + 2.0 * l).collect();
        let ln_total = log_sum_exp(&weights);
        Ok(CountTable { n, s, exact: None, exact_total: None, ln_counts, ln_total })
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_count(&self, m: usize) -> Option<&BigUint> {
        self.exact.as_ref().and_then(|v| v.get(m))
    }

    /// `N_{n,s} = Σ_m s^m M_{n,m,s}^2`, the number of colored Motzkin walks of length `2n`.
    pub fn exact_total(&self) -> Option<&BigUint> {
        self.exact_total.as_ref()
    }

    pub fn ln_count(&self, m: usize) -> f64 {
        self.ln_counts.get(m).copied().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn ln_counts(&self) -> &[f64] {
        &self.ln_counts
    }

    pub fn ln_total(&self) -> f64 {
        self.ln_total
    }
}

/// Text form: `0` for flat, `u<c>` / `d<c>` for up / down of color `c`, single-space separated.
pub fn encode_walk(w: &Walk) -> String {
    let tokens: Vec<String> = w
        .steps
        .iter()
        .map(|st| match st {
            Step::Flat => "0".to_string(),
            Step::Up(c) => format!("u{c}"),
            Step::Down(c) => format!("d{c}"),
        })
        .collect();
    tokens.join(" ")
}

pub fn decode_walk(text: &str) -> Result<Walk> {
    let err = |offset: usize, msg: &str| Error::Parse { offset, msg: msg.to_string() };
    let mut steps = Vec::new();
    if text.is_empty() {
        return Ok(Walk::new(steps));
    }
    let mut offset = 0usize;
    for token in text.split(' ') {
        let bytes = token.as_bytes();
        match bytes.first() {
            None => return Err(err(offset, "empty token")),
            Some(b'0') if bytes.len() == 1 => steps.push(Step::Flat),
            Some(&kind @ (b'u' | b'd')) => {
                let digits = &token[1..];
                if digits.is_empty() {
                    return Err(err(offset + 1, "missing color"));
                }
                if let Some(bad) = digits.bytes().position(|b| !b.is_ascii_digit()) {
                    return Err(err(offset + 1 + bad, "color must be decimal digits"));
                }
                let color: u32 = digits.parse().map_err(|_| err(offset + 1, "color out of range"))?;
                if color == 0 {
                    return Err(err(offset + 1, "colors start at 1"));
                }
                steps.push(if kind == b'u' { Step::Up(color) } else { Step::Down(color) });
            }
            Some(_) => return Err(err(offset, "expected 0, u<color> or d<color>")),
        }
        offset += token.len() + 1;
    }
    Ok(Walk::new(steps))
}
