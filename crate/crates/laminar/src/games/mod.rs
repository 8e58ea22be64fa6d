//! Benchmark games as paired treeplexes plus a sparse sequence-form payoff
//! matrix with chance probabilities folded into the entries.
//!
//! Matrix entries follow the saddle-point sign convention: an entry is the
//! (chance-weighted) amount player X loses and player Y gains at a terminal,
//! so X minimizes and Y maximizes the bilinear form.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::losses::SeparableLoss;
use crate::treeplex::Treeplex;

mod goofspiel;
mod kuhn;
mod leduc;

pub use goofspiel::build_goofspiel;
pub use kuhn::build_kuhn;
pub use leduc::build_leduc;

#[derive(Clone, Debug, PartialEq)]
pub enum GameError {
    InvalidParameter,
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameError::InvalidParameter => write!(f, "invalid game parameter"),
        }
    }
}

impl core::error::Error for GameError {}

/// Sparse matrix over (X sequence, Y sequence) pairs.
#[derive(Clone, Debug)]
pub struct SparsePayoff {
    rows: usize,
    cols: usize,
    entries: Vec<(u32, u32, f64)>,
}

/// Accumulating builder; duplicate coordinates are summed.
#[derive(Debug, Default)]
pub struct SparsePayoffBuilder {
    cells: BTreeMap<(u32, u32), f64>,
}

impl SparsePayoffBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        *self.cells.entry((row as u32, col as u32)).or_insert(0.0) += value;
    }

    pub fn build(self, rows: usize, cols: usize) -> SparsePayoff {
        let entries = self.cells.into_iter().map(|((r, c), v)| (r, c, v)).collect();
        SparsePayoff { rows, cols, entries }
    }
}

impl SparsePayoff {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    /// `A y` as a dense row-indexed vector.
    pub fn mul_right(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for &(r, c, v) in &self.entries {
            out[r as usize] += v * y[c as usize];
        }
        out
    }

    /// `A^T x` as a dense column-indexed vector.
    pub fn mul_left(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for &(r, c, v) in &self.entries {
            out[c as usize] += v * x[r as usize];
        }
        out
    }

    /// `<x, A y>`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &(r, c, v) in &self.entries {
            acc += v * x[r as usize] * y[c as usize];
        }
        acc
    }
}

/// A two-player zero-sum game in sequence form, optionally regularized.
#[derive(Clone, Debug)]
pub struct GameInstance {
    pub name: String,
    pub treeplex_x: Treeplex,
    pub treeplex_y: Treeplex,
    /// Loss to X / gain to Y per (X sequence, Y sequence), chance included.
    pub payoff: SparsePayoff,
    pub regularizer_x: Option<SeparableLoss>,
    pub regularizer_y: Option<SeparableLoss>,
    /// Information-set key per X decision point (used by rule-level oracles).
    pub keys_x: Vec<String>,
    pub keys_y: Vec<String>,
}

impl GameInstance {
    pub fn with_regularizers(
        mut self,
        d1: Option<SeparableLoss>,
        d2: Option<SeparableLoss>,
    ) -> Self {
        self.regularizer_x = d1;
        self.regularizer_y = d2;
        self
    }

    /// Expected payoff **to X** of a sequence-form profile (the negated
    /// bilinear loss).
    pub fn payoff_to_x(&self, mu_x: &[f64], mu_y: &[f64]) -> f64 {
        -self.payoff.bilinear(mu_x, mu_y)
    }

    pub fn key_map_x(&self) -> BTreeMap<&str, usize> {
        self.keys_x.iter().enumerate().map(|(i, k)| (k.as_str(), i)).collect()
    }

    pub fn key_map_y(&self) -> BTreeMap<&str, usize> {
        self.keys_y.iter().enumerate().map(|(i, k)| (k.as_str(), i)).collect()
    }

    /// Value of a regularizer at a behavioral strategy (0 when absent).
    pub fn regularizer_value_x(&self, x: &crate::treeplex::BehavioralStrategy) -> f64 {
        match &self.regularizer_x {
            Some(d) => self.treeplex_x.expected_loss(x, d),
            None => 0.0,
        }
    }

    pub fn regularizer_value_y(&self, y: &crate::treeplex::BehavioralStrategy) -> f64 {
        match &self.regularizer_y {
            Some(d) => self.treeplex_y.expected_loss(y, d),
            None => 0.0,
        }
    }
}

/// Weighted negative entropy at every decision point of a treeplex.
pub fn uniform_entropy_regularizer(tp: &Treeplex, weight: f64) -> SeparableLoss {
    let mut d = SeparableLoss::zeros(tp);
    for p in tp.points() {
        d.set_term(p.id, crate::losses::PointTerm::neg_entropy(weight));
    }
    d
}

/// Dilated quadratic at every decision point of a treeplex.
pub fn uniform_l2_regularizer(tp: &Treeplex, weight: f64) -> SeparableLoss {
    let mut d = SeparableLoss::zeros(tp);
    for p in tp.points() {
        d.set_term(p.id, crate::losses::PointTerm::dilated_l2(weight));
    }
    d
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<u8>> {
    fn rec(n: usize, current: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                current.push(i as u8);
                rec(n, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_payoff_accumulates_and_multiplies() {
        let mut b = SparsePayoffBuilder::new();
        b.add(0, 1, 2.0);
        b.add(0, 1, 1.0);
        b.add(1, 0, -1.0);
        let a = b.build(2, 2);
        assert_eq!(a.entries().len(), 2);
        assert_eq!(a.mul_right(&[1.0, 1.0]), vec![3.0, -1.0]);
        assert_eq!(a.mul_left(&[1.0, 1.0]), vec![-1.0, 3.0]);
        assert_eq!(a.bilinear(&[1.0, 0.0], &[0.0, 1.0]), 3.0);
    }

    #[test]
    fn permutations_enumerate_lexicographically() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(3)[0], vec![0, 1, 2]);
    }
}
