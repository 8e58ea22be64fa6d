//! Shared helpers for the integration suites: seeded randomness, random
//! treeplexes small enough for exhaustive enumeration, and random strategies
//! and losses.

#![allow(dead_code)]

use laminar::losses::{PointTerm, SeparableLoss};
use laminar::treeplex::{build_treeplex, BehavioralStrategy, PointDesc, Treeplex};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::VecDeque;
use std::vec::Vec;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

pub fn unit(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in `[lo, hi)`.
pub fn range(rng: &mut ChaCha12Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

pub fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
    assert!(
        (a - b).abs() <= tol,
        "{what}: {a} vs {b} (delta {:.3e}, tol {tol:.1e})",
        (a - b).abs()
    );
}

/// Random treeplex with at most three levels, at most three actions per
/// point, and at most `max_points` points total, which keeps the full
/// pure-strategy enumeration below 3^max_points.
pub fn random_treeplex(rng: &mut ChaCha12Rng, max_points: usize) -> Treeplex {
    let mut descs: Vec<PointDesc> = Vec::new();
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    let actions = 1 + (rng.next_u64() % 3) as usize;
    descs.push(PointDesc::leaf(actions));
    queue.push_back((0, 0));
    while let Some((idx, level)) = queue.pop_front() {
        if level >= 2 {
            continue;
        }
        for a in 0..descs[idx].action_count {
            let kids = (rng.next_u64() % 3) as usize; // 0..=2
            for _ in 0..kids {
                if descs.len() >= max_points {
                    break;
                }
                let n = 1 + (rng.next_u64() % 3) as usize;
                let child = descs.len();
                descs.push(PointDesc::leaf(n));
                descs[idx].children[a].push(child);
                queue.push_back((child, level + 1));
            }
        }
    }
    build_treeplex(&descs).expect("generated description is a tree")
}

/// Uniformly random point of each decision point's simplex (Dirichlet(1)).
pub fn random_strategy(rng: &mut ChaCha12Rng, tp: &Treeplex) -> BehavioralStrategy {
    let mut x = tp.uniform_strategy();
    for p in tp.points() {
        let block = x.point_mut(tp, p.id);
        let mut sum = 0.0;
        for b in block.iter_mut() {
            *b = -f64::ln(unit(rng).max(1e-12));
            sum += *b;
        }
        for b in block.iter_mut() {
            *b /= sum;
        }
    }
    x
}

/// Random interior simplex point with every entry at least `margin`-ish.
pub fn random_interior_point(rng: &mut ChaCha12Rng, n: usize, margin: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -f64::ln(unit(rng).max(1e-12))).collect();
    let sum: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x = (*x / sum + margin) / (1.0 + n as f64 * margin);
    }
    v
}

/// Linear loss with coefficients uniform in `[-scale, scale]`.
pub fn random_linear_loss(rng: &mut ChaCha12Rng, tp: &Treeplex, scale: f64) -> SeparableLoss {
    let mut loss = SeparableLoss::zeros(tp);
    for p in tp.points() {
        let coeffs = (0..p.action_count).map(|_| range(rng, -scale, scale)).collect();
        loss.set_term(p.id, PointTerm::linear(coeffs));
    }
    loss
}

/// Cumulative laminar linear coefficients (per sequence) and realized
/// laminar values (per point) for a fixed sequence of rounds, built straight
/// from the definition: base coefficients plus per-action child subtree
/// values of the round's played strategy.
pub fn laminar_accumulate(
    tp: &Treeplex,
    losses: &[SeparableLoss],
    played: &[BehavioralStrategy],
) -> (Vec<f64>, Vec<f64>) {
    let mut cum_linear = vec![0.0; tp.num_sequences()];
    let mut realized = vec![0.0; tp.num_points()];
    for (loss, x) in losses.iter().zip(played) {
        let values = tp.bottom_up_values(x, loss);
        for p in tp.points() {
            let (mut lin, _) = loss.terms[p.id].split(p.action_count).unwrap();
            for a in 0..p.action_count {
                for &ch in &p.children[a] {
                    lin[a] += values[ch];
                }
            }
            let block = x.point(tp, p.id);
            for (i, l) in lin.iter().enumerate() {
                realized[p.id] += l * block[i];
                cum_linear[p.first_sequence + i] += l;
            }
        }
    }
    (cum_linear, realized)
}
