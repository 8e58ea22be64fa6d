//! The laminar regret decomposition engine and the two-player self-play
//! driver.
//!
//! Each decision point runs its own local minimizer against a *laminar*
//! loss: the point's own convex term plus, per action, linear coefficients
//! summarizing the subtrees below. In CFR mode the summary is the child
//! subtree's current value; in BRD mode it is the best-response
//! differential — how much the child subtree's cumulative best-response
//! value just changed, which is algebraically the value minus the regret
//! differential. Low laminar regret at every point bounds regret over
//! the whole treeplex by the reach-weighted sum, which the report computes
//! bottom-up.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::games::GameInstance;
use crate::losses::{
    game_loss_for_x, game_loss_for_y, solve_local_max_linear, solve_local_min, ConvexPart,
    CumulativeLoss, LossError, SeparableLoss,
};
use crate::minimizers::{LocalLoss, LocalMinimizer, MinimizerError, MinimizerKind};
use crate::treeplex::{
    BehavioralStrategy, BrdTracker, SequenceFormStrategy, Treeplex, TreeplexError,
};

#[derive(Clone, Debug, PartialEq)]
pub enum SolverError {
    Loss(LossError),
    Minimizer(MinimizerError),
    Treeplex(TreeplexError),
    /// An operation that needs at least one observed round ran on a fresh state.
    NoRounds,
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::Loss(e) => write!(f, "{e}"),
            SolverError::Minimizer(e) => write!(f, "{e}"),
            SolverError::Treeplex(e) => write!(f, "{e}"),
            SolverError::NoRounds => write!(f, "no rounds observed yet"),
        }
    }
}

impl core::error::Error for SolverError {}

impl From<LossError> for SolverError {
    fn from(e: LossError) -> Self {
        SolverError::Loss(e)
    }
}

impl From<MinimizerError> for SolverError {
    fn from(e: MinimizerError) -> Self {
        SolverError::Minimizer(e)
    }
}

impl From<TreeplexError> for SolverError {
    fn from(e: TreeplexError) -> Self {
        SolverError::Treeplex(e)
    }
}

/// Child-coefficient rule fed to the local minimizers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolverMode {
    /// Children enter with their current subtree value.
    Cfr,
    /// Children enter with the round-over-round change of their subtree's
    /// cumulative best-response value.
    Brd,
}

/// One regret minimizer per decision point plus the bookkeeping needed to
/// report exact laminar regrets afterwards.
#[derive(Clone, Debug)]
pub struct LaminarSolver<'a> {
    treeplex: &'a Treeplex,
    mode: SolverMode,
    locals: Vec<LocalMinimizer>,
    /// Accumulated laminar linear coefficients, per sequence.
    laminar_linear: Vec<f64>,
    /// Accumulated realized laminar loss, per point.
    laminar_played: Vec<f64>,
    /// Convex part of the observed loss (fixed across rounds), per point.
    base_convex: Vec<ConvexPart>,
    rounds: u64,
    /// BRD only: accumulated base loss and previous best-response values.
    brd_cumulative: Option<CumulativeLoss>,
    brd_tracker: Option<BrdTracker>,
}

/// Per-point laminar regrets and the reach-weighted bound they imply on the
/// regret over the whole treeplex.
#[derive(Clone, Debug)]
pub struct RegretReport {
    pub per_point: Vec<f64>,
    pub bound: f64,
}

impl<'a> LaminarSolver<'a> {
    pub fn new(
        treeplex: &'a Treeplex,
        kind: MinimizerKind,
        mode: SolverMode,
    ) -> Result<Self, SolverError> {
        let locals = treeplex
            .points()
            .map(|p| LocalMinimizer::new(kind, p.domain.clone(), p.action_count))
            .collect::<Result<Vec<_>, _>>()?;
        let (brd_cumulative, brd_tracker) = match mode {
            SolverMode::Cfr => (None, None),
            SolverMode::Brd => {
                (Some(CumulativeLoss::new(treeplex)), Some(BrdTracker::new(treeplex)))
            }
        };
        Ok(LaminarSolver {
            treeplex,
            mode,
            locals,
            laminar_linear: vec![0.0; treeplex.num_sequences()],
            laminar_played: vec![0.0; treeplex.num_points()],
            base_convex: vec![ConvexPart::default(); treeplex.num_points()],
            rounds: 0,
            brd_cumulative,
            brd_tracker,
        })
    }

    pub fn treeplex(&self) -> &Treeplex {
        self.treeplex
    }

    pub fn mode(&self) -> SolverMode {
        self.mode
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Concatenates every local recommendation into a strategy.
    pub fn recommend(&self) -> BehavioralStrategy {
        let mut values = vec![0.0; self.treeplex.num_sequences()];
        for (p, local) in self.treeplex.points().zip(&self.locals) {
            let x = local.recommend();
            values[p.first_sequence..p.first_sequence + p.action_count].copy_from_slice(&x);
        }
        BehavioralStrategy { values }
    }

    /// Observes one separable loss for the round in which `played` was the
    /// recommendation: builds each point's laminar loss and feeds it to the
    /// local minimizer.
    pub fn observe(
        &mut self,
        loss: &SeparableLoss,
        played: &BehavioralStrategy,
    ) -> Result<(), SolverError> {
        let tp = self.treeplex;
        if loss.terms.len() != tp.num_points() {
            return Err(SolverError::Loss(LossError::DimensionMismatch));
        }

        // Per-child coefficients for the laminar losses.
        let kappa: Vec<f64> = match self.mode {
            SolverMode::Cfr => tp.bottom_up_values(played, loss),
            SolverMode::Brd => {
                // child coefficient V - (R_T - R_{T-1}) collapses to the
                // change in the subtree's cumulative best-response value
                let cum = self.brd_cumulative.as_mut().expect("brd state");
                cum.accumulate(tp, loss)?;
                let tracker = self.brd_tracker.as_mut().expect("brd state");
                tracker.differentials(tp, cum)?
            }
        };

        for p in tp.points() {
            let (mut lin, convex) = loss.terms[p.id].split(p.action_count)?;
            for a in 0..p.action_count {
                for &ch in &p.children[a] {
                    lin[a] += kappa[ch];
                }
            }
            if self.rounds == 0 {
                self.base_convex[p.id] = convex.clone();
            } else if self.base_convex[p.id] != convex {
                return Err(SolverError::Loss(LossError::NonStationaryRegularizer));
            }
            let local_loss = LocalLoss {
                linear: lin,
                convex: if convex.is_zero() { None } else { Some(convex) },
            };
            let played_j = played.point(tp, p.id);
            self.laminar_played[p.id] += local_loss.value(played_j);
            for (slot, l) in self.laminar_linear
                [p.first_sequence..p.first_sequence + p.action_count]
                .iter_mut()
                .zip(&local_loss.linear)
            {
                *slot += l;
            }
            self.locals[p.id].observe(&local_loss, played_j)?;
        }
        self.rounds += 1;
        Ok(())
    }

    /// Exact per-point laminar regrets (realized laminar loss minus the best
    /// fixed local point against the accumulated laminar loss) and the
    /// bottom-up bound: at each point the regret plus the best achievable
    /// child total, maximized over the point's domain.
    pub fn regret_report(&self) -> Result<RegretReport, SolverError> {
        if self.rounds == 0 {
            return Err(SolverError::NoRounds);
        }
        let tp = self.treeplex;
        let mut per_point = vec![0.0; tp.num_points()];
        for p in tp.points() {
            let lin = &self.laminar_linear[p.first_sequence..p.first_sequence + p.action_count];
            let (_, best) =
                solve_local_min(lin, &self.base_convex[p.id], self.rounds as f64, &p.domain)?;
            per_point[p.id] = self.laminar_played[p.id] - best;
        }
        let mut subtree = vec![0.0; tp.num_points()];
        for p in tp.points().rev() {
            let mut child_totals = vec![0.0; p.action_count];
            for a in 0..p.action_count {
                for &ch in &p.children[a] {
                    child_totals[a] += subtree[ch];
                }
            }
            subtree[p.id] = per_point[p.id] + solve_local_max_linear(&child_totals, &p.domain);
        }
        Ok(RegretReport { per_point, bound: subtree[tp.root()] })
    }
}

/// Averaging schemes over the sequence-form iterates, both maintained
/// incrementally: the uniform average and the linearly weighted average
/// (iterate `t` weighted by `t`).
#[derive(Clone, Debug)]
pub struct RunAverages {
    uniform: Vec<f64>,
    linear: Vec<f64>,
    linear_weight: f64,
    count: u64,
}

impl RunAverages {
    pub fn new(tp: &Treeplex) -> Self {
        RunAverages {
            uniform: vec![0.0; tp.num_sequences()],
            linear: vec![0.0; tp.num_sequences()],
            linear_weight: 0.0,
            count: 0,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn update(&mut self, mu: &SequenceFormStrategy) {
        debug_assert_eq!(mu.values.len(), self.uniform.len());
        self.count += 1;
        let t = self.count as f64;
        for (u, m) in self.uniform.iter_mut().zip(&mu.values) {
            *u += (m - *u) / t;
        }
        self.linear_weight += t;
        let w = t / self.linear_weight;
        for (l, m) in self.linear.iter_mut().zip(&mu.values) {
            *l += (m - *l) * w;
        }
    }

    pub fn uniform(&self) -> SequenceFormStrategy {
        SequenceFormStrategy { values: self.uniform.clone() }
    }

    pub fn linear(&self) -> SequenceFormStrategy {
        SequenceFormStrategy { values: self.linear.clone() }
    }
}

/// Order of recommendations and observations within one self-play round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Schedule {
    /// Both players recommend, then both observe losses built from the
    /// other's current strategy.
    Simultaneous,
    /// Y observes the loss built from X's fresh strategy before
    /// recommending; X then observes the loss built from that strategy.
    Alternation,
}

/// Saddle-point residual of a profile: the best improvement available to
/// either player, including the regularizers. Nonnegative up to float error,
/// zero exactly at a saddle point.
pub fn saddle_point_gap(
    game: &GameInstance,
    x: &BehavioralStrategy,
    y: &BehavioralStrategy,
) -> Result<f64, SolverError> {
    let mu_x = game.treeplex_x.to_sequence_form(x);
    let mu_y = game.treeplex_y.to_sequence_form(y);
    let d1 = game.regularizer_value_x(x);
    let d2 = game.regularizer_value_y(y);
    let loss_x = game_loss_for_x(game, &mu_y)?;
    let (_, br_x) = game.treeplex_x.best_response(&loss_x)?;
    let loss_y = game_loss_for_y(game, &mu_x)?;
    let (_, br_y) = game.treeplex_y.best_response(&loss_y)?;
    Ok(d1 + d2 - br_x - br_y)
}

/// Metrics of one evaluation during self-play.
#[derive(Clone, Copy, Debug)]
pub struct TraceMetrics {
    pub iteration: u64,
    pub gap_uniform: f64,
    pub gap_linear: f64,
    /// Average external regret of each player over its observed losses.
    pub avg_regret_x: f64,
    pub avg_regret_y: f64,
    /// Laminar reach-weighted regret bounds, averaged per round.
    pub bound_x: f64,
    pub bound_y: f64,
}

/// Two-player self-play driver holding one laminar solver per player.
pub struct SelfPlay<'a> {
    pub game: &'a GameInstance,
    pub solver_x: LaminarSolver<'a>,
    pub solver_y: LaminarSolver<'a>,
    schedule: Schedule,
    averages_x: RunAverages,
    averages_y: RunAverages,
    realized_x: f64,
    realized_y: f64,
    rounds: u64,
}

impl<'a> SelfPlay<'a> {
    pub fn new(
        game: &'a GameInstance,
        kind_x: MinimizerKind,
        kind_y: MinimizerKind,
        mode: SolverMode,
        schedule: Schedule,
    ) -> Result<Self, SolverError> {
        Ok(SelfPlay {
            game,
            solver_x: LaminarSolver::new(&game.treeplex_x, kind_x, mode)?,
            solver_y: LaminarSolver::new(&game.treeplex_y, kind_y, mode)?,
            schedule,
            averages_x: RunAverages::new(&game.treeplex_x),
            averages_y: RunAverages::new(&game.treeplex_y),
            realized_x: 0.0,
            realized_y: 0.0,
            rounds: 0,
        })
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    pub fn averages_x(&self) -> &RunAverages {
        &self.averages_x
    }

    pub fn averages_y(&self) -> &RunAverages {
        &self.averages_y
    }

    /// Plays one round and returns the strategies that entered the averages.
    pub fn step(&mut self) -> Result<(BehavioralStrategy, BehavioralStrategy), SolverError> {
        let game = self.game;
        let (x, y) = match self.schedule {
            Schedule::Simultaneous => {
                let x = self.solver_x.recommend();
                let y = self.solver_y.recommend();
                let mu_x = game.treeplex_x.to_sequence_form(&x);
                let mu_y = game.treeplex_y.to_sequence_form(&y);
                let loss_x = game_loss_for_x(game, &mu_y)?;
                let loss_y = game_loss_for_y(game, &mu_x)?;
                self.realized_x += game.treeplex_x.expected_loss(&x, &loss_x);
                self.realized_y += game.treeplex_y.expected_loss(&y, &loss_y);
                self.solver_x.observe(&loss_x, &x)?;
                self.solver_y.observe(&loss_y, &y)?;
                (x, y)
            }
            Schedule::Alternation => {
                // Y sees the loss built from X's fresh strategy before
                // recommending; alternation scores that loss against Y's
                // standing recommendation.
                let x = self.solver_x.recommend();
                let mu_x = game.treeplex_x.to_sequence_form(&x);
                let loss_y = game_loss_for_y(game, &mu_x)?;
                let y_standing = self.solver_y.recommend();
                self.realized_y += game.treeplex_y.expected_loss(&y_standing, &loss_y);
                self.solver_y.observe(&loss_y, &y_standing)?;
                let y = self.solver_y.recommend();
                let mu_y = game.treeplex_y.to_sequence_form(&y);
                let loss_x = game_loss_for_x(game, &mu_y)?;
                self.realized_x += game.treeplex_x.expected_loss(&x, &loss_x);
                self.solver_x.observe(&loss_x, &x)?;
                (x, y)
            }
        };
        self.averages_x.update(&game.treeplex_x.to_sequence_form(&x));
        self.averages_y.update(&game.treeplex_y.to_sequence_form(&y));
        self.rounds += 1;
        Ok((x, y))
    }

    /// Gaps of both averaged profiles, average regrets, and laminar bounds.
    ///
    /// The average regrets reuse the best responses against the uniform
    /// averages: each player's cumulative observed linear loss equals `T`
    /// times the loss built from the opponent's uniform average.
    pub fn evaluate(&self) -> Result<TraceMetrics, SolverError> {
        if self.rounds == 0 {
            return Err(SolverError::NoRounds);
        }
        let game = self.game;
        let t = self.rounds as f64;

        let mu_xu = self.averages_x.uniform();
        let mu_yu = self.averages_y.uniform();
        let xu = game.treeplex_x.from_sequence_form(&mu_xu)?;
        let yu = game.treeplex_y.from_sequence_form(&mu_yu)?;

        let loss_x = game_loss_for_x(game, &mu_yu)?;
        let (_, br_x) = game.treeplex_x.best_response(&loss_x)?;
        let loss_y = game_loss_for_y(game, &mu_xu)?;
        let (_, br_y) = game.treeplex_y.best_response(&loss_y)?;

        let d1 = game.regularizer_value_x(&xu);
        let d2 = game.regularizer_value_y(&yu);
        let gap_uniform = d1 + d2 - br_x - br_y;

        let xl = game.treeplex_x.from_sequence_form(&self.averages_x.linear())?;
        let yl = game.treeplex_y.from_sequence_form(&self.averages_y.linear())?;
        let gap_linear = saddle_point_gap(game, &xl, &yl)?;

        let avg_regret_x = self.realized_x / t - br_x;
        let avg_regret_y = self.realized_y / t - br_y;
        let bound_x = self.solver_x.regret_report()?.bound / t;
        let bound_y = self.solver_y.regret_report()?.bound / t;

        Ok(TraceMetrics {
            iteration: self.rounds,
            gap_uniform,
            gap_linear,
            avg_regret_x,
            avg_regret_y,
            bound_x,
            bound_y,
        })
    }
}

/// Outcome of the alternation counterexample on the bilinear objective
/// `x * y` over the unit square.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlternationReport {
    pub rounds: u64,
    pub avg_regret_x: f64,
    pub avg_regret_y: f64,
    pub avg_x: f64,
    pub avg_y: f64,
    /// Saddle-point residual of the averaged profile.
    pub residual: f64,
}

/// Replays the zero-regret, non-converging alternation sequence: both
/// players alternate between the endpoints of `[0, 1]`, X's round-`t` loss
/// is `x * y_t` and Y's is `-y * x_{t+1}` (the index shift is what
/// alternation introduces). After `2T` rounds both average regrets are
/// exactly zero, yet the averaged profile `(0.5, 0.5)` has residual `0.5`
/// for `x * y`.
pub fn alternation_counterexample(half_rounds: u64) -> AlternationReport {
    let rounds = 2 * half_rounds;
    let x_at = |t: u64| (t % 2) as f64;
    let y_at = |t: u64| ((t + 1) % 2) as f64;

    let mut realized_x = 0.0;
    let mut realized_y = 0.0;
    let mut sum_x = 0.0;
    let mut sum_y = 0.0;
    let mut sum_y_coeff = 0.0; // sum over t of x_{t+1}
    for t in 1..=rounds {
        realized_x += x_at(t) * y_at(t);
        realized_y += -y_at(t) * x_at(t + 1);
        sum_x += x_at(t);
        sum_y += y_at(t);
        sum_y_coeff += x_at(t + 1);
    }
    // Cumulative losses are linear, so the hindsight optimum sits at an
    // endpoint of [0, 1].
    let best_x = 0.0_f64.min(sum_y);
    let best_y = 0.0_f64.min(-sum_y_coeff);
    let avg_regret_x = (realized_x - best_x) / rounds as f64;
    let avg_regret_y = (realized_y - best_y) / rounds as f64;

    let avg_x = sum_x / rounds as f64;
    let avg_y = sum_y / rounds as f64;
    // residual of the average profile for x*y on the square:
    // max_y avg_x * y - min_x x * avg_y
    let residual = avg_x.max(0.0) - 0.0_f64.min(avg_y);

    AlternationReport { rounds, avg_regret_x, avg_regret_y, avg_x, avg_y, residual }
}
