//! Separable convex losses over a treeplex.
//!
//! A loss assigns every decision point a convex term; the total loss of a
//! strategy is the reach-weighted sum of the per-point terms. Supported
//! primitives are linear terms, weighted negative entropy, the dilated l2
//! norm, and a quadratic anchored at a reference point. These are exactly the
//! forms whose local cumulative minimum has a closed form (vertex pick,
//! softmax, or simplex projection), which the best-response and regret
//! machinery relies on.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::minimizers::project_simplex;
use crate::treeplex::{BehavioralStrategy, DomainKind, SequenceFormStrategy, Treeplex};

/// Entries below this are clamped before taking logarithms; `x ln x` is 0 at 0.
pub const ENTROPY_CLAMP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum LossError {
    /// The local objective has no closed-form or projection-form solver
    /// (e.g. entropy mixed with a quadratic, or entropy on a perturbed simplex).
    UnsupportedLossForm,
    /// A term was evaluated outside its domain under strict evaluation.
    DomainError,
    /// Term or vector length does not match the decision point it is attached to.
    DimensionMismatch,
    /// A cumulative loss saw different convex terms in different rounds.
    NonStationaryRegularizer,
    /// The dilated two-form identity failed beyond tolerance.
    TwoFormMismatch { point: usize, delta: f64 },
    /// A parameter outside its documented range (e.g. negative weight).
    InvalidParameter,
}

impl fmt::Display for LossError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LossError::UnsupportedLossForm => write!(f, "loss form has no local closed-form solver"),
            LossError::DomainError => write!(f, "term evaluated outside its domain"),
            LossError::DimensionMismatch => write!(f, "term length does not match decision point"),
            LossError::NonStationaryRegularizer => {
                write!(f, "cumulative loss requires identical convex terms every round")
            }
            LossError::TwoFormMismatch { point, delta } => {
                write!(f, "dilated two-form identity failed at point {point} (delta {delta:e})")
            }
            LossError::InvalidParameter => write!(f, "parameter outside valid range"),
        }
    }
}

impl core::error::Error for LossError {}

/// One convex primitive attached to a decision point.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    /// `<coeffs, x>`.
    Linear(Vec<f64>),
    /// `w * sum_a x_a ln x_a` with `w >= 0`.
    NegEntropy(f64),
    /// `(w / 2) * ||x||^2` with `w >= 0`.
    DilatedL2(f64),
    /// `(w / 2) * ||x - anchor||^2` with `w >= 0` and `anchor` in the domain.
    BregmanL2Anchor { weight: f64, anchor: Vec<f64> },
}

/// The convex term of one decision point: a sum of primitives.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointTerm {
    prims: Vec<Term>,
}

/// Non-linear content of a [`PointTerm`] folded into one entropy weight plus
/// one combined quadratic `(w/2)||x||^2 - <target, x> + constant`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvexPart {
    pub entropy_weight: f64,
    pub quad_weight: f64,
    pub quad_target: Vec<f64>,
    pub quad_constant: f64,
}

impl PointTerm {
    pub fn zero() -> Self {
        PointTerm { prims: Vec::new() }
    }

    pub fn linear(coeffs: Vec<f64>) -> Self {
        PointTerm { prims: vec![Term::Linear(coeffs)] }
    }

    pub fn neg_entropy(weight: f64) -> Self {
        PointTerm { prims: vec![Term::NegEntropy(weight)] }
    }

    pub fn dilated_l2(weight: f64) -> Self {
        PointTerm { prims: vec![Term::DilatedL2(weight)] }
    }

    pub fn bregman_anchor(weight: f64, anchor: Vec<f64>) -> Self {
        PointTerm { prims: vec![Term::BregmanL2Anchor { weight, anchor }] }
    }

    pub fn push(&mut self, term: Term) {
        self.prims.push(term);
    }

    pub fn prims(&self) -> &[Term] {
        &self.prims
    }

    pub fn is_zero(&self) -> bool {
        self.prims.is_empty()
    }

    /// Value of the term at `x` under the clamped entropy policy.
    pub fn value(&self, x: &[f64]) -> f64 {
        let mut v = 0.0;
        for p in &self.prims {
            v += prim_value(p, x);
        }
        v
    }

    /// Value and gradient at `x` under the clamped entropy policy.
    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut v = 0.0;
        let mut g = vec![0.0; x.len()];
        for p in &self.prims {
            v += prim_value(p, x);
            prim_gradient_into(p, x, &mut g);
        }
        (v, g)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.value_and_gradient(x).1
    }

    /// Like [`value_and_gradient`](Self::value_and_gradient) but errors instead
    /// of clamping when an entropy term meets an entry below [`ENTROPY_CLAMP`].
    pub fn value_and_gradient_strict(&self, x: &[f64]) -> Result<(f64, Vec<f64>), LossError> {
        let has_entropy = self
            .prims
            .iter()
            .any(|p| matches!(p, Term::NegEntropy(w) if *w > 0.0));
        if has_entropy && x.iter().any(|&xa| xa < ENTROPY_CLAMP) {
            return Err(LossError::DomainError);
        }
        Ok(self.value_and_gradient(x))
    }

    /// Splits the term into per-action linear coefficients and the folded
    /// convex remainder for a decision point with `n` actions.
    pub fn split(&self, n: usize) -> Result<(Vec<f64>, ConvexPart), LossError> {
        let mut linear = vec![0.0; n];
        let mut convex = ConvexPart::default();
        for p in &self.prims {
            match p {
                Term::Linear(c) => {
                    if c.len() != n {
                        return Err(LossError::DimensionMismatch);
                    }
                    for (l, ci) in linear.iter_mut().zip(c) {
                        *l += ci;
                    }
                }
                Term::NegEntropy(w) => {
                    if *w < 0.0 {
                        return Err(LossError::InvalidParameter);
                    }
                    convex.entropy_weight += w;
                }
                Term::DilatedL2(w) => {
                    if *w < 0.0 {
                        return Err(LossError::InvalidParameter);
                    }
                    convex.quad_weight += w;
                    if convex.quad_target.is_empty() {
                        convex.quad_target = vec![0.0; n];
                    }
                }
                Term::BregmanL2Anchor { weight, anchor } => {
                    if *weight < 0.0 {
                        return Err(LossError::InvalidParameter);
                    }
                    if anchor.len() != n {
                        return Err(LossError::DimensionMismatch);
                    }
                    convex.quad_weight += weight;
                    if convex.quad_target.is_empty() {
                        convex.quad_target = vec![0.0; n];
                    }
                    let mut anchor_sq = 0.0;
                    for (t, ua) in convex.quad_target.iter_mut().zip(anchor) {
                        *t += weight * ua;
                        anchor_sq += ua * ua;
                    }
                    convex.quad_constant += 0.5 * weight * anchor_sq;
                }
            }
        }
        Ok((linear, convex))
    }
}

fn prim_value(p: &Term, x: &[f64]) -> f64 {
    match p {
        Term::Linear(c) => math::dot(c, x),
        Term::NegEntropy(w) => {
            let mut s = 0.0;
            for &xa in x {
                if xa > 0.0 {
                    s += xa * math::ln(xa.max(ENTROPY_CLAMP));
                }
            }
            w * s
        }
        Term::DilatedL2(w) => 0.5 * w * math::dot(x, x),
        Term::BregmanL2Anchor { weight, anchor } => {
            let mut s = 0.0;
            for (&xa, &ua) in x.iter().zip(anchor) {
                let d = xa - ua;
                s += d * d;
            }
            0.5 * weight * s
        }
    }
}

fn prim_gradient_into(p: &Term, x: &[f64], g: &mut [f64]) {
    match p {
        Term::Linear(c) => {
            for (ga, ca) in g.iter_mut().zip(c) {
                *ga += ca;
            }
        }
        Term::NegEntropy(w) => {
            for (ga, &xa) in g.iter_mut().zip(x) {
                *ga += w * (math::ln(xa.max(ENTROPY_CLAMP)) + 1.0);
            }
        }
        Term::DilatedL2(w) => {
            for (ga, &xa) in g.iter_mut().zip(x) {
                *ga += w * xa;
            }
        }
        Term::BregmanL2Anchor { weight, anchor } => {
            for ((ga, &xa), &ua) in g.iter_mut().zip(x).zip(anchor) {
                *ga += weight * (xa - ua);
            }
        }
    }
}

impl ConvexPart {
    pub fn is_zero(&self) -> bool {
        self.entropy_weight == 0.0 && self.quad_weight == 0.0
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut v = 0.0;
        if self.entropy_weight > 0.0 {
            let mut s = 0.0;
            for &xa in x {
                if xa > 0.0 {
                    s += xa * math::ln(xa.max(ENTROPY_CLAMP));
                }
            }
            v += self.entropy_weight * s;
        }
        if self.quad_weight > 0.0 {
            v += 0.5 * self.quad_weight * math::dot(x, x) - math::dot(&self.quad_target, x)
                + self.quad_constant;
        }
        v
    }

    pub fn gradient_into(&self, x: &[f64], g: &mut [f64]) {
        if self.entropy_weight > 0.0 {
            for (ga, &xa) in g.iter_mut().zip(x) {
                *ga += self.entropy_weight * (math::ln(xa.max(ENTROPY_CLAMP)) + 1.0);
            }
        }
        if self.quad_weight > 0.0 {
            for ((ga, &xa), &ta) in g.iter_mut().zip(x).zip(&self.quad_target) {
                *ga += self.quad_weight * xa - ta;
            }
        }
    }

    pub fn scaled(&self, k: f64) -> ConvexPart {
        ConvexPart {
            entropy_weight: self.entropy_weight * k,
            quad_weight: self.quad_weight * k,
            quad_target: self.quad_target.iter().map(|t| t * k).collect(),
            quad_constant: self.quad_constant * k,
        }
    }
}

/// Minimizes `<linear, x> + count * convex(x)` over the domain.
///
/// Returns the argmin and the objective value at it. Pure linear objectives
/// resolve to a vertex (lowest index on ties; lower bounds are honored by
/// putting the free mass on the best action). Entropy resolves to a softmax,
/// quadratics to a Euclidean projection. Entropy mixed with a quadratic, or
/// entropy on a perturbed simplex, has no closed form and errors.
pub fn solve_local_min(
    linear: &[f64],
    convex: &ConvexPart,
    count: f64,
    domain: &DomainKind,
) -> Result<(Vec<f64>, f64), LossError> {
    let n = linear.len();
    let tau = convex.entropy_weight * count;
    let quad_w = convex.quad_weight * count;
    if tau > 0.0 && quad_w > 0.0 {
        return Err(LossError::UnsupportedLossForm);
    }
    if tau > 0.0 {
        if !matches!(domain, DomainKind::FullSimplex) {
            return Err(LossError::UnsupportedLossForm);
        }
        // argmin of <g,x> + tau * sum x ln x is softmax(-g / tau)
        let mut z: Vec<f64> = linear.iter().map(|&g| -g / tau).collect();
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for za in z.iter_mut() {
            *za = math::exp(*za - m);
            sum += *za;
        }
        for za in z.iter_mut() {
            *za /= sum;
        }
        let value = math::dot(linear, &z) + convex.scaled(count).value(&z);
        return Ok((z, value));
    }
    if quad_w > 0.0 {
        // argmin of <g,x> + (W/2)||x||^2 - <T,x> is the projection of (T - g)/W
        let scaled = convex.scaled(count);
        let point: Vec<f64> = linear
            .iter()
            .zip(&scaled.quad_target)
            .map(|(&g, &t)| (t - g) / quad_w)
            .collect();
        let x = project_simplex(&point, domain);
        let value = math::dot(linear, &x) + scaled.value(&x);
        return Ok((x, value));
    }
    // Pure linear: vertex of the domain, lowest index on ties.
    match domain {
        DomainKind::FullSimplex => {
            let best = math::argmin(linear);
            let mut x = vec![0.0; n];
            x[best] = 1.0;
            Ok((x, linear[best]))
        }
        DomainKind::PerturbedSimplex { lower_bounds } => {
            if lower_bounds.len() != n {
                return Err(LossError::DimensionMismatch);
            }
            let best = math::argmin(linear);
            let slack = 1.0 - lower_bounds.iter().sum::<f64>();
            let mut x = lower_bounds.clone();
            x[best] += slack;
            Ok((x.clone(), math::dot(linear, &x)))
        }
    }
}

/// Maximizes `<linear, x>` over the domain (used by the regret bound pass).
pub fn solve_local_max_linear(linear: &[f64], domain: &DomainKind) -> f64 {
    let negated: Vec<f64> = linear.iter().map(|g| -g).collect();
    let (_, v) = solve_local_min(&negated, &ConvexPart::default(), 1.0, domain)
        .expect("linear objective always solvable");
    -v
}

/// A convex loss per decision point of a treeplex.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableLoss {
    pub terms: Vec<PointTerm>,
}

impl SeparableLoss {
    /// All-zero loss over the treeplex.
    pub fn zeros(tp: &Treeplex) -> Self {
        SeparableLoss { terms: vec![PointTerm::zero(); tp.num_points()] }
    }

    /// Linear loss whose per-point coefficients are read off a dense
    /// sequence-indexed vector, so that the total loss of `x` is `<coeffs, mu(x)>`.
    pub fn from_sequence_coeffs(tp: &Treeplex, coeffs: &[f64]) -> Result<Self, LossError> {
        if coeffs.len() != tp.num_sequences() {
            return Err(LossError::DimensionMismatch);
        }
        let terms = tp
            .points()
            .map(|p| PointTerm::linear(coeffs[p.first_sequence..p.first_sequence + p.action_count].to_vec()))
            .collect();
        Ok(SeparableLoss { terms })
    }

    pub fn set_term(&mut self, point: usize, term: PointTerm) {
        self.terms[point] = term;
    }

    /// Adds every primitive of `other` into this loss, point by point.
    pub fn add(&mut self, other: &SeparableLoss) {
        debug_assert_eq!(self.terms.len(), other.terms.len());
        for (t, o) in self.terms.iter_mut().zip(&other.terms) {
            for p in o.prims() {
                t.push(p.clone());
            }
        }
    }
}

/// Sum of a sequence of separable losses in closed form: accumulated linear
/// coefficients plus the (round-independent) convex terms scaled by the
/// number of rounds.
#[derive(Clone, Debug)]
pub struct CumulativeLoss {
    /// Accumulated linear coefficients, one slot per sequence.
    pub linear: Vec<f64>,
    /// Per-point convex part of a single round.
    pub convex: Vec<ConvexPart>,
    pub rounds: u64,
}

impl CumulativeLoss {
    pub fn new(tp: &Treeplex) -> Self {
        CumulativeLoss {
            linear: vec![0.0; tp.num_sequences()],
            convex: vec![ConvexPart::default(); tp.num_points()],
            rounds: 0,
        }
    }

    /// Wraps one loss as a one-round cumulative loss.
    pub fn single(tp: &Treeplex, loss: &SeparableLoss) -> Result<Self, LossError> {
        let mut cum = CumulativeLoss::new(tp);
        cum.accumulate(tp, loss)?;
        Ok(cum)
    }

    /// Adds one round. The convex part must be identical across rounds;
    /// otherwise the closed-form cumulative minimum would not exist.
    pub fn accumulate(&mut self, tp: &Treeplex, loss: &SeparableLoss) -> Result<(), LossError> {
        if loss.terms.len() != tp.num_points() {
            return Err(LossError::DimensionMismatch);
        }
        for p in tp.points() {
            let (lin, convex) = loss.terms[p.id].split(p.action_count)?;
            for (slot, l) in self.linear[p.first_sequence..p.first_sequence + p.action_count]
                .iter_mut()
                .zip(&lin)
            {
                *slot += l;
            }
            if self.rounds == 0 {
                self.convex[p.id] = convex;
            } else if self.convex[p.id] != convex {
                return Err(LossError::NonStationaryRegularizer);
            }
        }
        self.rounds += 1;
        Ok(())
    }
}

/// Evaluates a separable loss both as the reach-weighted sum of local terms
/// and in its dilated sequence-form shape, checks the two agree within
/// `1e-9`, and returns the value.
///
/// Zero-reach points contribute 0 to both sides (`0 * d(.)` is taken as 0).
pub fn dilated_value(
    tp: &Treeplex,
    x: &BehavioralStrategy,
    loss: &SeparableLoss,
) -> Result<f64, LossError> {
    if loss.terms.len() != tp.num_points() {
        return Err(LossError::DimensionMismatch);
    }
    let reaches = tp.reaches(x);
    let mu = tp.to_sequence_form(x);

    let mut reach_form = 0.0;
    for p in tp.points() {
        if reaches[p.id] > 0.0 {
            reach_form += reaches[p.id] * loss.terms[p.id].value(x.point(tp, p.id));
        }
    }

    let mut mu_form = 0.0;
    for p in tp.points() {
        let parent_mass = match p.parent_sequence {
            Some(s) => mu.values[s],
            None => 1.0,
        };
        if parent_mass <= 0.0 {
            continue;
        }
        let ratio: Vec<f64> = mu.values[p.first_sequence..p.first_sequence + p.action_count]
            .iter()
            .map(|m| m / parent_mass)
            .collect();
        mu_form += parent_mass * loss.terms[p.id].value(&ratio);
    }

    let delta = (reach_form - mu_form).abs();
    if delta > 1e-9 * (1.0 + reach_form.abs()) {
        return Err(LossError::TwoFormMismatch { point: usize::MAX, delta });
    }
    Ok(reach_form)
}

/// Loss seen by player X when Y plays the sequence-form strategy `mu_y`:
/// linear coefficients `A mu(y)` sliced per decision point (so the total is
/// `<mu(x), A mu(y)>`, the amount X loses), plus X's regularizer if any.
pub fn game_loss_for_x(
    game: &crate::games::GameInstance,
    mu_y: &SequenceFormStrategy,
) -> Result<SeparableLoss, LossError> {
    if mu_y.values.len() != game.treeplex_y.num_sequences() {
        return Err(LossError::DimensionMismatch);
    }
    let coeffs = game.payoff.mul_right(&mu_y.values);
    let mut loss = SeparableLoss::from_sequence_coeffs(&game.treeplex_x, &coeffs)?;
    if let Some(d1) = &game.regularizer_x {
        loss.add(d1);
    }
    Ok(loss)
}

/// Loss seen by player Y when X plays `mu_x`: coefficients `-A^T mu(x)`
/// (Y gains what X loses), plus Y's regularizer if any.
pub fn game_loss_for_y(
    game: &crate::games::GameInstance,
    mu_x: &SequenceFormStrategy,
) -> Result<SeparableLoss, LossError> {
    if mu_x.values.len() != game.treeplex_x.num_sequences() {
        return Err(LossError::DimensionMismatch);
    }
    let mut coeffs = game.payoff.mul_left(&mu_x.values);
    for c in coeffs.iter_mut() {
        *c = -*c;
    }
    let mut loss = SeparableLoss::from_sequence_coeffs(&game.treeplex_y, &coeffs)?;
    if let Some(d2) = &game.regularizer_y {
        loss.add(d2);
    }
    Ok(loss)
}

/// Exploiter's loss against one sampled opponent realization: the game loss
/// plus `alpha` times a dilated quadratic anchored at a reference strategy
/// (per point, weight `alpha` on `0.5 ||x_j - anchor_j||^2`).
pub fn exploitation_loss(
    game: &crate::games::GameInstance,
    sample: &SequenceFormStrategy,
    anchor: &BehavioralStrategy,
    alpha: f64,
) -> Result<SeparableLoss, LossError> {
    if alpha < 0.0 {
        return Err(LossError::InvalidParameter);
    }
    let coeffs = game.payoff.mul_right(&sample.values);
    let mut loss = SeparableLoss::from_sequence_coeffs(&game.treeplex_x, &coeffs)?;
    if alpha > 0.0 {
        for p in game.treeplex_x.points() {
            loss.terms[p.id].push(Term::BregmanL2Anchor {
                weight: alpha,
                anchor: anchor.point(&game.treeplex_x, p.id).to_vec(),
            });
        }
    }
    Ok(loss)
}
