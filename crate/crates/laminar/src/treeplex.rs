//! The sequential decision space: an indexed tree of decision points, each
//! carrying a simplex-like domain over its actions.
//!
//! Actions occupy contiguous *sequence* indices laid out in topological
//! order, so a strategy is one dense vector per representation: behavioral
//! (each point's block is a point of its domain) or sequence form (each
//! entry is the product of action probabilities from the root). All
//! traversals are single bottom-up or top-down passes over the point list.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::losses::{solve_local_min, CumulativeLoss, LossError, SeparableLoss};

/// Tolerance used when validating strategies against their domains.
pub const DOMAIN_TOL: f64 = 1e-9;
/// Flow-conservation violations beyond this are errors.
pub const FLOW_TOL: f64 = 1e-6;
/// Parent masses at or below this are treated as unreached by the inverse map.
pub const ZERO_MASS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum TreeplexError {
    /// A point is referenced as a child twice, or a child reference does not
    /// point strictly forward (the decision points must form a tree).
    CycleOrSharedChild,
    /// Perturbed-simplex lower bounds are negative or sum to 1 or more.
    InfeasibleDomain,
    /// A description is structurally broken (zero actions, bad lengths).
    MalformedDescription,
    /// Sequence-form flow conservation fails beyond tolerance at a point.
    FlowViolation { point: usize, delta: f64 },
    /// A vector's length does not match the treeplex layout.
    DimensionMismatch,
}

impl fmt::Display for TreeplexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeplexError::CycleOrSharedChild => {
                write!(f, "decision points must form a tree (shared or backward child)")
            }
            TreeplexError::InfeasibleDomain => {
                write!(f, "perturbed simplex lower bounds must be nonnegative and sum below 1")
            }
            TreeplexError::MalformedDescription => write!(f, "malformed decision point description"),
            TreeplexError::FlowViolation { point, delta } => {
                write!(f, "flow conservation violated at point {point} (delta {delta:e})")
            }
            TreeplexError::DimensionMismatch => write!(f, "vector length does not match treeplex"),
        }
    }
}

impl core::error::Error for TreeplexError {}

/// The feasible set at one decision point.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind {
    /// The full probability simplex over the actions.
    FullSimplex,
    /// Simplex with per-action lower bounds (each >= 0, summing below 1).
    PerturbedSimplex { lower_bounds: Vec<f64> },
}

impl DomainKind {
    /// The canonical interior point: uniform, shifted by the lower bounds.
    pub fn uniform_point(&self, n: usize) -> Vec<f64> {
        match self {
            DomainKind::FullSimplex => vec![1.0 / n as f64; n],
            DomainKind::PerturbedSimplex { lower_bounds } => {
                let slack = 1.0 - lower_bounds.iter().sum::<f64>();
                lower_bounds.iter().map(|lb| lb + slack / n as f64).collect()
            }
        }
    }

    pub fn lower_bound(&self, action: usize) -> f64 {
        match self {
            DomainKind::FullSimplex => 0.0,
            DomainKind::PerturbedSimplex { lower_bounds } => lower_bounds[action],
        }
    }

    /// Membership within tolerance: entries above their lower bounds and
    /// summing to one.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > tol {
            return false;
        }
        x.iter().enumerate().all(|(a, &xa)| xa >= self.lower_bound(a) - tol)
    }
}

/// Description of one decision point fed to [`build_treeplex`].
///
/// Children are indices of later entries in the description list, one list
/// per action (parents come before children).
#[derive(Clone, Debug)]
pub struct PointDesc {
    pub action_count: usize,
    pub domain: DomainKind,
    pub children: Vec<Vec<usize>>,
}

impl PointDesc {
    pub fn leaf(action_count: usize) -> Self {
        PointDesc {
            action_count,
            domain: DomainKind::FullSimplex,
            children: vec![Vec::new(); action_count],
        }
    }

    pub fn with_children(action_count: usize, children: Vec<Vec<usize>>) -> Self {
        PointDesc { action_count, domain: DomainKind::FullSimplex, children }
    }
}

/// One decision point of a built treeplex.
#[derive(Clone, Debug)]
pub struct DecisionPoint {
    pub id: usize,
    /// Sequence index of the parent action, `None` at the root.
    pub parent_sequence: Option<usize>,
    pub action_count: usize,
    /// Sequence index of action 0; actions occupy contiguous indices.
    pub first_sequence: usize,
    /// Child decision points per action.
    pub children: Vec<Vec<usize>>,
    pub domain: DomainKind,
}

impl DecisionPoint {
    #[inline]
    pub fn sequence(&self, action: usize) -> usize {
        self.first_sequence + action
    }
}

/// A validated treeplex: points in topological (parent-before-child) order
/// with a contiguous sequence layout. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Treeplex {
    points: Vec<DecisionPoint>,
    total_sequences: usize,
    /// Owning decision point of each sequence index.
    seq_owner: Vec<usize>,
}

/// Builds a treeplex from point descriptions.
///
/// When several roots are described, a single dummy root decision point with
/// one action is synthesized in front and every described index shifts up by
/// one.
pub fn build_treeplex(descs: &[PointDesc]) -> Result<Treeplex, TreeplexError> {
    if descs.is_empty() {
        return Err(TreeplexError::MalformedDescription);
    }
    for d in descs {
        if d.action_count == 0 || d.children.len() != d.action_count {
            return Err(TreeplexError::MalformedDescription);
        }
        if let DomainKind::PerturbedSimplex { lower_bounds } = &d.domain {
            if lower_bounds.len() != d.action_count {
                return Err(TreeplexError::MalformedDescription);
            }
            if lower_bounds.iter().any(|&lb| lb < 0.0) || lower_bounds.iter().sum::<f64>() >= 1.0 {
                return Err(TreeplexError::InfeasibleDomain);
            }
        }
    }

    // Tree property: every point is the child of at most one action, and
    // children point strictly forward.
    let mut referenced = vec![false; descs.len()];
    for (i, d) in descs.iter().enumerate() {
        for ch in d.children.iter().flatten() {
            if *ch <= i || *ch >= descs.len() || referenced[*ch] {
                return Err(TreeplexError::CycleOrSharedChild);
            }
            referenced[*ch] = true;
        }
    }
    let roots: Vec<usize> =
        (0..descs.len()).filter(|&i| !referenced[i]).collect();
    debug_assert!(!roots.is_empty());

    let mut points: Vec<DecisionPoint> = Vec::with_capacity(descs.len() + 1);
    let shift = if roots.len() > 1 { 1 } else { 0 };
    if shift == 1 {
        points.push(DecisionPoint {
            id: 0,
            parent_sequence: None,
            action_count: 1,
            first_sequence: 0,
            children: vec![roots.iter().map(|r| r + 1).collect()],
            domain: DomainKind::FullSimplex,
        });
    }
    for (i, d) in descs.iter().enumerate() {
        points.push(DecisionPoint {
            id: i + shift,
            parent_sequence: None,
            action_count: d.action_count,
            first_sequence: 0,
            children: d.children.iter().map(|c| c.iter().map(|ch| ch + shift).collect()).collect(),
            domain: d.domain.clone(),
        });
    }

    // Contiguous sequence layout in topological order, then parent links.
    let mut next_seq = 0;
    for p in points.iter_mut() {
        p.first_sequence = next_seq;
        next_seq += p.action_count;
    }
    let mut parent_seq: Vec<Option<usize>> = vec![None; points.len()];
    for p in &points {
        for (a, children) in p.children.iter().enumerate() {
            for &ch in children {
                parent_seq[ch] = Some(p.sequence(a));
            }
        }
    }
    for (p, ps) in points.iter_mut().zip(&parent_seq) {
        p.parent_sequence = *ps;
    }

    let mut seq_owner = vec![0usize; next_seq];
    for p in &points {
        for a in 0..p.action_count {
            seq_owner[p.sequence(a)] = p.id;
        }
    }

    Ok(Treeplex { points, total_sequences: next_seq, seq_owner })
}

impl Treeplex {
    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_sequences(&self) -> usize {
        self.total_sequences
    }

    pub fn point(&self, id: usize) -> &DecisionPoint {
        &self.points[id]
    }

    pub fn points(&self) -> impl DoubleEndedIterator<Item = &DecisionPoint> {
        self.points.iter()
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Decision point owning a sequence index.
    pub fn sequence_owner(&self, seq: usize) -> usize {
        self.seq_owner[seq]
    }

    pub fn uniform_strategy(&self) -> BehavioralStrategy {
        let mut values = vec![0.0; self.total_sequences];
        for p in &self.points {
            let u = p.domain.uniform_point(p.action_count);
            values[p.first_sequence..p.first_sequence + p.action_count].copy_from_slice(&u);
        }
        BehavioralStrategy { values }
    }

    /// Pure strategy from one action index per decision point.
    pub fn pure_strategy(&self, actions: &[usize]) -> BehavioralStrategy {
        debug_assert_eq!(actions.len(), self.points.len());
        let mut values = vec![0.0; self.total_sequences];
        for (p, &a) in self.points.iter().zip(actions) {
            values[p.sequence(a)] = 1.0;
        }
        BehavioralStrategy { values }
    }

    /// Checks that every block of `x` lies in its point's domain.
    pub fn validate_strategy(&self, x: &BehavioralStrategy) -> Result<(), TreeplexError> {
        if x.values.len() != self.total_sequences {
            return Err(TreeplexError::DimensionMismatch);
        }
        for p in &self.points {
            if !p.domain.contains(x.point(self, p.id), DOMAIN_TOL) {
                return Err(TreeplexError::MalformedDescription);
            }
        }
        Ok(())
    }

    /// Maps a behavioral strategy to its sequence form: every entry becomes
    /// the product of action probabilities from the root to that action.
    pub fn to_sequence_form(&self, x: &BehavioralStrategy) -> SequenceFormStrategy {
        let mut mu = vec![0.0; self.total_sequences];
        for p in &self.points {
            let parent_mass = match p.parent_sequence {
                Some(s) => mu[s],
                None => 1.0,
            };
            for a in 0..p.action_count {
                mu[p.sequence(a)] = parent_mass * x.values[p.sequence(a)];
            }
        }
        SequenceFormStrategy { values: mu }
    }

    /// Inverse of [`to_sequence_form`](Self::to_sequence_form): divides each
    /// block by its parent mass. Blocks under an unreached parent get the
    /// domain's uniform point. Errors if flow conservation fails beyond
    /// [`FLOW_TOL`].
    pub fn from_sequence_form(
        &self,
        mu: &SequenceFormStrategy,
    ) -> Result<BehavioralStrategy, TreeplexError> {
        if mu.values.len() != self.total_sequences {
            return Err(TreeplexError::DimensionMismatch);
        }
        let mut x = vec![0.0; self.total_sequences];
        for p in &self.points {
            let parent_mass = match p.parent_sequence {
                Some(s) => mu.values[s],
                None => 1.0,
            };
            let block_sum: f64 =
                (0..p.action_count).map(|a| mu.values[p.sequence(a)]).sum();
            let delta = (block_sum - parent_mass).abs();
            if delta > FLOW_TOL {
                return Err(TreeplexError::FlowViolation { point: p.id, delta });
            }
            if parent_mass <= ZERO_MASS {
                let u = p.domain.uniform_point(p.action_count);
                x[p.first_sequence..p.first_sequence + p.action_count].copy_from_slice(&u);
            } else {
                for a in 0..p.action_count {
                    x[p.sequence(a)] = mu.values[p.sequence(a)] / parent_mass;
                }
            }
        }
        Ok(BehavioralStrategy { values: x })
    }

    /// Product of the owner's action probabilities on the path to `j`
    /// (opponent and chance probabilities live in the loss coefficients).
    pub fn reach(&self, x: &BehavioralStrategy, j: usize) -> f64 {
        let mut prob = 1.0;
        let mut cur = j;
        while let Some(ps) = self.points[cur].parent_sequence {
            prob *= x.values[ps];
            cur = self.seq_owner[ps];
        }
        prob
    }

    /// Reach of every decision point in one top-down pass.
    pub fn reaches(&self, x: &BehavioralStrategy) -> Vec<f64> {
        let mut reach = vec![1.0; self.points.len()];
        for p in &self.points {
            if let Some(ps) = p.parent_sequence {
                reach[p.id] = reach[self.seq_owner[ps]] * x.values[ps];
            }
        }
        reach
    }

    /// Per-point subtree values of `x` under `loss` in one bottom-up pass:
    /// the local term plus the action-weighted values of all children.
    pub fn bottom_up_values(&self, x: &BehavioralStrategy, loss: &SeparableLoss) -> Vec<f64> {
        debug_assert_eq!(loss.terms.len(), self.points.len());
        let mut vals = vec![0.0; self.points.len()];
        for p in self.points.iter().rev() {
            let mut v = loss.terms[p.id].value(x.point(self, p.id));
            for a in 0..p.action_count {
                for &ch in &p.children[a] {
                    v += x.values[p.sequence(a)] * vals[ch];
                }
            }
            vals[p.id] = v;
        }
        vals
    }

    /// Total loss of `x`: the reach-weighted sum of local terms, computed as
    /// the root subtree value (same arithmetic as
    /// [`bottom_up_values`](Self::bottom_up_values)).
    pub fn expected_loss(&self, x: &BehavioralStrategy, loss: &SeparableLoss) -> f64 {
        self.bottom_up_values(x, loss)[self.root()]
    }

    /// Minimizes a separable loss over the treeplex bottom-up, solving one
    /// local problem per decision point. Returns the argmin and its value.
    pub fn best_response(
        &self,
        loss: &SeparableLoss,
    ) -> Result<(BehavioralStrategy, f64), LossError> {
        let cum = CumulativeLoss::single(self, loss)?;
        let (strategy, vals) = self.cumulative_best_response(&cum)?;
        Ok((strategy, vals[self.root()]))
    }

    /// Best response to an accumulated loss. Returns the argmin together
    /// with the per-point subtree best values (the minimum cumulative value
    /// obtainable from each subtree).
    pub fn cumulative_best_response(
        &self,
        cum: &CumulativeLoss,
    ) -> Result<(BehavioralStrategy, Vec<f64>), LossError> {
        if cum.linear.len() != self.total_sequences || cum.convex.len() != self.points.len() {
            return Err(LossError::DimensionMismatch);
        }
        let rounds = cum.rounds.max(1) as f64;
        let mut vals = vec![0.0; self.points.len()];
        let mut strategy = vec![0.0; self.total_sequences];
        for p in self.points.iter().rev() {
            let mut lin =
                cum.linear[p.first_sequence..p.first_sequence + p.action_count].to_vec();
            for a in 0..p.action_count {
                for &ch in &p.children[a] {
                    lin[a] += vals[ch];
                }
            }
            let (x, v) = solve_local_min(&lin, &cum.convex[p.id], rounds, &p.domain)?;
            strategy[p.first_sequence..p.first_sequence + p.action_count].copy_from_slice(&x);
            vals[p.id] = v;
        }
        Ok((BehavioralStrategy { values: strategy }, vals))
    }
}

/// Tracks per-subtree cumulative best-response values between rounds so the
/// change from one round to the next can be read off.
#[derive(Clone, Debug)]
pub struct BrdTracker {
    prev: Vec<f64>,
}

impl BrdTracker {
    /// Starts from zero: the best response to an empty loss sum is 0, so the
    /// first differential equals the first best-response value.
    pub fn new(tp: &Treeplex) -> Self {
        BrdTracker { prev: vec![0.0; tp.num_points()] }
    }

    /// Per-subtree best-response values after the previous observation.
    pub fn previous(&self) -> &[f64] {
        &self.prev
    }

    /// One bottom-up pass over the cumulative loss through the current
    /// round: returns, per point, the change in the subtree's cumulative
    /// best-response value relative to the previous round, and advances the
    /// tracker.
    pub fn differentials(
        &mut self,
        tp: &Treeplex,
        cumulative: &CumulativeLoss,
    ) -> Result<Vec<f64>, LossError> {
        let (_, best) = tp.cumulative_best_response(cumulative)?;
        let db: Vec<f64> = best.iter().zip(&self.prev).map(|(b, p)| b - p).collect();
        self.prev = best;
        Ok(db)
    }
}

/// Per-decision-point simplex points stored as one dense vector over
/// sequence indices.
#[derive(Clone, Debug, PartialEq)]
pub struct BehavioralStrategy {
    pub values: Vec<f64>,
}

impl BehavioralStrategy {
    /// The block of this strategy belonging to decision point `j`.
    pub fn point<'a>(&'a self, tp: &Treeplex, j: usize) -> &'a [f64] {
        let p = tp.point(j);
        &self.values[p.first_sequence..p.first_sequence + p.action_count]
    }

    pub fn point_mut<'a>(&'a mut self, tp: &Treeplex, j: usize) -> &'a mut [f64] {
        let p = tp.point(j);
        &mut self.values[p.first_sequence..p.first_sequence + p.action_count]
    }
}

/// A dense sequence-form vector: entry = probability of playing the whole
/// sequence of actions from the root.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceFormStrategy {
    pub values: Vec<f64>,
}

impl SequenceFormStrategy {
    pub fn zeros(tp: &Treeplex) -> Self {
        SequenceFormStrategy { values: vec![0.0; tp.num_sequences()] }
    }

    /// Checks entries lie in `[0,1]` and flow conservation holds within `tol`.
    pub fn validate(&self, tp: &Treeplex, tol: f64) -> Result<(), TreeplexError> {
        if self.values.len() != tp.num_sequences() {
            return Err(TreeplexError::DimensionMismatch);
        }
        for p in tp.points() {
            let parent_mass = match p.parent_sequence {
                Some(s) => self.values[s],
                None => 1.0,
            };
            let block_sum: f64 = (0..p.action_count).map(|a| self.values[p.sequence(a)]).sum();
            let delta = (block_sum - parent_mass).abs();
            if delta > tol {
                return Err(TreeplexError::FlowViolation { point: p.id, delta });
            }
        }
        if self.values.iter().any(|&v| !(-tol..=1.0 + tol).contains(&v)) {
            return Err(TreeplexError::MalformedDescription);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::PointTerm;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    /// Two points: j0 with two actions, j1 hanging off j0's second action.
    fn chain() -> Treeplex {
        build_treeplex(&[
            PointDesc::with_children(2, vec![vec![], vec![1]]),
            PointDesc::leaf(2),
        ])
        .unwrap()
    }

    #[test]
    fn single_point_layout() {
        let tp = build_treeplex(&[PointDesc::leaf(2)]).unwrap();
        assert_eq!(tp.num_points(), 1);
        assert_eq!(tp.num_sequences(), 2);
    }

    #[test]
    fn multi_root_synthesizes_dummy() {
        let tp = build_treeplex(&[PointDesc::leaf(2), PointDesc::leaf(3)]).unwrap();
        assert_eq!(tp.num_points(), 3);
        assert_eq!(tp.point(0).action_count, 1);
        assert_eq!(tp.point(0).children[0], vec![1, 2]);
        assert_eq!(tp.num_sequences(), 1 + 2 + 3);
        assert_eq!(tp.point(1).parent_sequence, Some(0));
    }

    #[test]
    fn shared_child_rejected() {
        let err = build_treeplex(&[
            PointDesc::with_children(2, vec![vec![2], vec![]]),
            PointDesc::with_children(2, vec![vec![2], vec![]]),
            PointDesc::leaf(2),
        ])
        .unwrap_err();
        assert_eq!(err, TreeplexError::CycleOrSharedChild);
    }

    #[test]
    fn backward_child_rejected() {
        let err = build_treeplex(&[
            PointDesc::leaf(2),
            PointDesc::with_children(2, vec![vec![0], vec![]]),
        ])
        .unwrap_err();
        assert_eq!(err, TreeplexError::CycleOrSharedChild);
    }

    #[test]
    fn infeasible_lower_bounds_rejected() {
        let err = build_treeplex(&[PointDesc {
            action_count: 2,
            domain: DomainKind::PerturbedSimplex { lower_bounds: vec![0.6, 0.5] },
            children: vec![vec![], vec![]],
        }])
        .unwrap_err();
        assert_eq!(err, TreeplexError::InfeasibleDomain);
    }

    #[test]
    fn sequence_form_products() {
        let tp = chain();
        let x = BehavioralStrategy { values: vec![0.25, 0.75, 0.5, 0.5] };
        let mu = tp.to_sequence_form(&x);
        assert_close(mu.values[0], 0.25, 1e-15);
        assert_close(mu.values[1], 0.75, 1e-15);
        assert_close(mu.values[2], 0.375, 1e-15);
        assert_close(mu.values[3], 0.375, 1e-15);
        mu.validate(&tp, 1e-9).unwrap();
    }

    #[test]
    fn pure_strategy_sequence_form_is_unit_flow() {
        let tp = chain();
        let x = tp.pure_strategy(&[1, 0]);
        let mu = tp.to_sequence_form(&x);
        assert_eq!(mu.values, vec![0.0, 1.0, 1.0, 0.0]);
        mu.validate(&tp, 0.0).unwrap();
    }

    #[test]
    fn inverse_divides_by_parent() {
        let tp = chain();
        let mu = SequenceFormStrategy { values: vec![0.5, 0.5, 0.15, 0.35] };
        let x = tp.from_sequence_form(&mu).unwrap();
        assert_close(x.values[2], 0.3, 1e-12);
        assert_close(x.values[3], 0.7, 1e-12);
    }

    #[test]
    fn inverse_uniform_under_zero_parent() {
        let tp = chain();
        let mu = SequenceFormStrategy { values: vec![1.0, 0.0, 0.0, 0.0] };
        let x = tp.from_sequence_form(&mu).unwrap();
        assert_eq!(x.point(&tp, 1), &[0.5, 0.5]);
    }

    #[test]
    fn inverse_rejects_flow_violation() {
        let tp = chain();
        let mu = SequenceFormStrategy { values: vec![0.5, 0.5, 0.5, 0.5] };
        assert!(matches!(
            tp.from_sequence_form(&mu),
            Err(TreeplexError::FlowViolation { point: 1, .. })
        ));
    }

    #[test]
    fn reach_is_own_action_product() {
        let tp = chain();
        let x = BehavioralStrategy { values: vec![0.25, 0.75, 0.5, 0.5] };
        assert_close(tp.reach(&x, 0), 1.0, 0.0);
        assert_close(tp.reach(&x, 1), 0.75, 1e-15);
        let pure = tp.pure_strategy(&[0, 0]);
        assert_close(tp.reach(&pure, 1), 0.0, 0.0);
    }

    #[test]
    fn chain_values_match_recurrence() {
        let tp = chain();
        let mut loss = SeparableLoss::zeros(&tp);
        loss.set_term(0, PointTerm::linear(vec![1.0, 2.0]));
        loss.set_term(1, PointTerm::linear(vec![0.0, 4.0]));
        let x = BehavioralStrategy { values: vec![0.5, 0.5, 0.75, 0.25] };
        let vals = tp.bottom_up_values(&x, &loss);
        assert_close(vals[1], 1.0, 1e-12);
        assert_close(vals[0], 2.0, 1e-12);
        assert_close(tp.expected_loss(&x, &loss), 2.0, 1e-12);
    }

    #[test]
    fn single_simplex_expected_loss() {
        let tp = build_treeplex(&[PointDesc::leaf(2)]).unwrap();
        let mut loss = SeparableLoss::zeros(&tp);
        loss.set_term(0, PointTerm::linear(vec![1.0, 3.0]));
        let x = BehavioralStrategy { values: vec![0.5, 0.5] };
        assert_close(tp.expected_loss(&x, &loss), 2.0, 1e-12);
    }

    #[test]
    fn best_response_single_simplex() {
        let tp = build_treeplex(&[PointDesc::leaf(2)]).unwrap();
        let mut loss = SeparableLoss::zeros(&tp);
        loss.set_term(0, PointTerm::linear(vec![1.0, 3.0]));
        let (x, v) = tp.best_response(&loss).unwrap();
        assert_eq!(x.values, vec![1.0, 0.0]);
        assert_eq!(v, 1.0);
    }

    #[test]
    fn best_response_perturbed() {
        let tp = build_treeplex(&[PointDesc {
            action_count: 2,
            domain: DomainKind::PerturbedSimplex { lower_bounds: vec![0.1, 0.1] },
            children: vec![vec![], vec![]],
        }])
        .unwrap();
        let mut loss = SeparableLoss::zeros(&tp);
        loss.set_term(0, PointTerm::linear(vec![1.0, 3.0]));
        let (x, v) = tp.best_response(&loss).unwrap();
        assert_close(x.values[0], 0.9, 1e-12);
        assert_close(x.values[1], 0.1, 1e-12);
        assert_close(v, 1.2, 1e-12);
    }

    #[test]
    fn best_response_entropy() {
        let tp = build_treeplex(&[PointDesc::leaf(2)]).unwrap();
        let mut loss = SeparableLoss::zeros(&tp);
        let mut term = PointTerm::linear(vec![0.0, 0.0]);
        term.push(crate::losses::Term::NegEntropy(1.0));
        loss.set_term(0, term);
        let (x, v) = tp.best_response(&loss).unwrap();
        assert_close(x.values[0], 0.5, 1e-12);
        assert_close(v, -crate::math::ln(2.0), 1e-12);
    }

    #[test]
    fn best_response_descends_the_tree() {
        // Chain: picking j0's second action exposes j1's best value.
        let tp = chain();
        let mut loss = SeparableLoss::zeros(&tp);
        loss.set_term(0, PointTerm::linear(vec![1.0, 2.0]));
        loss.set_term(1, PointTerm::linear(vec![-3.0, 4.0]));
        let (x, v) = tp.best_response(&loss).unwrap();
        // action 1 at j0 costs 2 + (-3) = -1, action 0 costs 1.
        assert_eq!(x.point(&tp, 0), &[0.0, 1.0]);
        assert_eq!(x.point(&tp, 1), &[1.0, 0.0]);
        assert_eq!(v, -1.0);
    }

    #[test]
    fn brd_differentials_follow_definition() {
        let tp = build_treeplex(&[PointDesc::leaf(2)]).unwrap();
        let mut tracker = BrdTracker::new(&tp);
        let mut cum = CumulativeLoss::new(&tp);

        let mut l1 = SeparableLoss::zeros(&tp);
        l1.set_term(0, PointTerm::linear(vec![1.0, 3.0]));
        cum.accumulate(&tp, &l1).unwrap();
        let db1 = tracker.differentials(&tp, &cum).unwrap();
        assert_close(db1[0], 1.0, 1e-12);

        let mut l2 = SeparableLoss::zeros(&tp);
        l2.set_term(0, PointTerm::linear(vec![5.0, 0.0]));
        cum.accumulate(&tp, &l2).unwrap();
        let db2 = tracker.differentials(&tp, &cum).unwrap();
        // cumulative (6, 3): best 3, previous best 1.
        assert_close(db2[0], 2.0, 1e-12);
    }
}
