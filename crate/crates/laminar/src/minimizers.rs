//! Local regret minimizers over a single decision point's domain.
//!
//! Three kinds: regret matching, regret matching+, and projected online
//! gradient descent (mirror descent with the Euclidean mirror map). Convex
//! loss terms are handled by RM/RM+ through gradient linearization at the
//! played point, which upper-bounds the true regret by convexity; OGD uses
//! the gradient directly.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::losses::{solve_local_min, ConvexPart, LossError};
use crate::math;
use crate::treeplex::DomainKind;

#[derive(Clone, Debug, PartialEq)]
pub enum MinimizerError {
    /// Regret matching variants are defined on the full simplex only.
    UnsupportedDomain,
    /// A loss gradient came out non-finite.
    NonFiniteGradient,
    /// Forwarded from the local cumulative solver.
    Loss(LossError),
}

impl fmt::Display for MinimizerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinimizerError::UnsupportedDomain => {
                write!(f, "regret matching requires a full simplex domain")
            }
            MinimizerError::NonFiniteGradient => write!(f, "non-finite loss gradient"),
            MinimizerError::Loss(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MinimizerError {}

impl From<LossError> for MinimizerError {
    fn from(e: LossError) -> Self {
        MinimizerError::Loss(e)
    }
}

/// Step-size schedule for gradient descent: `eta_t = c / t^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRule {
    pub c: f64,
    pub exponent: f64,
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule { c: 1.0, exponent: 0.5 }
    }
}

impl StepRule {
    pub fn step(&self, t: u64) -> f64 {
        self.c / math::powf(t as f64, self.exponent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MinimizerKind {
    RegretMatching,
    RegretMatchingPlus,
    GradientDescent(StepRule),
}

/// The loss a local minimizer observes in one round: per-action linear
/// coefficients plus an optional convex remainder.
#[derive(Clone, Debug)]
pub struct LocalLoss {
    pub linear: Vec<f64>,
    pub convex: Option<ConvexPart>,
}

impl LocalLoss {
    pub fn linear_only(linear: Vec<f64>) -> Self {
        LocalLoss { linear, convex: None }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut v = math::dot(&self.linear, x);
        if let Some(c) = &self.convex {
            v += c.value(x);
        }
        v
    }

    /// Gradient at `x`: the linear coefficients plus the convex term's
    /// gradient (the linearization RM-style minimizers observe).
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.linear.clone();
        if let Some(c) = &self.convex {
            c.gradient_into(x, &mut g);
        }
        g
    }
}

/// Euclidean projection onto the (possibly perturbed) probability simplex.
///
/// Sort-based exact method; perturbed domains reduce to the full simplex by
/// the substitution `x = lb + (1 - sum lb) z`.
pub fn project_simplex(v: &[f64], domain: &DomainKind) -> Vec<f64> {
    match domain {
        DomainKind::FullSimplex => project_full_simplex(v),
        DomainKind::PerturbedSimplex { lower_bounds } => {
            let slack = 1.0 - lower_bounds.iter().sum::<f64>();
            let shifted: Vec<f64> =
                v.iter().zip(lower_bounds).map(|(x, lb)| (x - lb) / slack).collect();
            let z = project_full_simplex(&shifted);
            z.iter().zip(lower_bounds).map(|(za, lb)| lb + slack * za).collect()
        }
    }
}

fn project_full_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite input"));
    let mut cumulative = 0.0;
    let mut threshold = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            threshold = candidate;
        } else {
            break;
        }
    }
    v.iter().map(|&x| (x - threshold).max(0.0)).collect()
}

/// State of one local minimizer.
///
/// `cumulative` holds cumulative regrets for RM, the clipped aggregates for
/// RM+, and the current iterate for gradient descent.
#[derive(Clone, Debug)]
pub struct LocalMinimizer {
    kind: MinimizerKind,
    domain: DomainKind,
    cumulative: Vec<f64>,
    rounds: u64,
}

impl LocalMinimizer {
    pub fn new(kind: MinimizerKind, domain: DomainKind, n: usize) -> Result<Self, MinimizerError> {
        match kind {
            MinimizerKind::RegretMatching | MinimizerKind::RegretMatchingPlus => {
                if !matches!(domain, DomainKind::FullSimplex) {
                    return Err(MinimizerError::UnsupportedDomain);
                }
                Ok(LocalMinimizer { kind, domain, cumulative: vec![0.0; n], rounds: 0 })
            }
            MinimizerKind::GradientDescent(_) => {
                let start = domain.uniform_point(n);
                Ok(LocalMinimizer { kind, domain, cumulative: start, rounds: 0 })
            }
        }
    }

    pub fn kind(&self) -> MinimizerKind {
        self.kind
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Next recommended point of the domain.
    pub fn recommend(&self) -> Vec<f64> {
        let n = self.cumulative.len();
        match self.kind {
            MinimizerKind::RegretMatching | MinimizerKind::RegretMatchingPlus => {
                let mut pos: Vec<f64> = self.cumulative.iter().map(|&r| r.max(0.0)).collect();
                let sum: f64 = pos.iter().sum();
                if sum <= 0.0 {
                    return self.domain.uniform_point(n);
                }
                for p in pos.iter_mut() {
                    *p /= sum;
                }
                pos
            }
            MinimizerKind::GradientDescent(_) => self.cumulative.clone(),
        }
    }

    /// Feeds back the loss for a round in which `played` was the
    /// recommendation.
    pub fn observe(&mut self, loss: &LocalLoss, played: &[f64]) -> Result<(), MinimizerError> {
        let g = loss.gradient(played);
        if g.iter().any(|x| !x.is_finite()) {
            return Err(MinimizerError::NonFiniteGradient);
        }
        match self.kind {
            MinimizerKind::RegretMatching => {
                let ev = math::dot(&g, played);
                for (c, ga) in self.cumulative.iter_mut().zip(&g) {
                    *c += ev - ga;
                }
            }
            MinimizerKind::RegretMatchingPlus => {
                let ev = math::dot(&g, played);
                for (c, ga) in self.cumulative.iter_mut().zip(&g) {
                    *c = (*c + ev - ga).max(0.0);
                }
            }
            MinimizerKind::GradientDescent(rule) => {
                let eta = rule.step(self.rounds + 1);
                let moved: Vec<f64> =
                    self.cumulative.iter().zip(&g).map(|(x, ga)| x - eta * ga).collect();
                self.cumulative = project_simplex(&moved, &self.domain);
            }
        }
        self.rounds += 1;
        Ok(())
    }
}

/// External regret of a played history against the best fixed point of the
/// domain in hindsight. True convex values on both sides; the hindsight
/// minimum is solved in closed form on the accumulated loss, which requires
/// the convex parts to be identical across rounds.
pub fn external_regret(
    domain: &DomainKind,
    history: &[(LocalLoss, Vec<f64>)],
) -> Result<f64, MinimizerError> {
    let (first, _) = history.first().ok_or(MinimizerError::Loss(LossError::DimensionMismatch))?;
    let n = first.linear.len();
    let mut cum_linear = vec![0.0; n];
    let mut convex: Option<ConvexPart> = None;
    let mut realized = 0.0;

    for (loss, played) in history {
        if loss.linear.len() != n || played.len() != n {
            return Err(MinimizerError::Loss(LossError::DimensionMismatch));
        }
        realized += loss.value(played);
        for (c, l) in cum_linear.iter_mut().zip(&loss.linear) {
            *c += l;
        }
        match (&mut convex, &loss.convex) {
            (slot @ None, Some(c)) => *slot = Some(c.clone()),
            (Some(prev), Some(c)) if prev != c => {
                return Err(MinimizerError::Loss(LossError::NonStationaryRegularizer))
            }
            (Some(_), None) | (None, None) | (Some(_), Some(_)) => {}
        }
    }

    let zero = ConvexPart::default();
    let convex_ref = convex.as_ref().unwrap_or(&zero);
    let (_, best) = solve_local_min(&cum_linear, convex_ref, history.len() as f64, domain)?;
    Ok(realized - best)
}
