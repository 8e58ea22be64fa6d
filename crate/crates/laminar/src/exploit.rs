//! Online learning against a static sampled opponent, with a quadratic
//! penalty anchored at a pre-computed equilibrium strategy.
//!
//! Each round the learner sees one pure realization sampled from the
//! opponent's strategy and pays the game loss plus `alpha` times the dilated
//! squared distance to the anchor. Large `alpha` pins the learner to the
//! anchor; `alpha = 0` recovers plain best-response learning.

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::games::GameInstance;
use crate::losses::{exploitation_loss, game_loss_for_y, solve_local_min, CumulativeLoss};
use crate::minimizers::MinimizerKind;
use crate::solver::{LaminarSolver, RunAverages, SolverError, SolverMode};
use crate::treeplex::{BehavioralStrategy, SequenceFormStrategy, Treeplex};

/// Configuration of one exploitation run.
#[derive(Clone, Debug)]
pub struct ExploitConfig {
    /// Weight of the anchored quadratic penalty (0 disables it).
    pub alpha: f64,
    pub max_iterations: u64,
    /// Stop once the average regret drops to this level.
    pub regret_threshold: f64,
    pub seed: u64,
    /// The static opponent being exploited.
    pub opponent: BehavioralStrategy,
    /// The strategy the penalty anchors to.
    pub anchor: BehavioralStrategy,
}

impl ExploitConfig {
    pub fn new(opponent: BehavioralStrategy, anchor: BehavioralStrategy, alpha: f64) -> Self {
        ExploitConfig {
            alpha,
            max_iterations: 5000,
            regret_threshold: 0.0005,
            seed: 0,
            opponent,
            anchor,
        }
    }
}

/// One row of the run trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub iteration: u64,
    pub avg_regret: f64,
}

/// Result of an exploitation run.
#[derive(Clone, Debug)]
pub struct ExploitOutcome {
    /// Uniform average of the learner's iterates.
    pub average: BehavioralStrategy,
    pub iterations: u64,
    pub trace: Vec<TraceRow>,
}

/// Deterministic per-run sampling stream.
pub struct SampleStream {
    rng: ChaCha12Rng,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        SampleStream { rng: ChaCha12Rng::seed_from_u64(seed) }
    }

    fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Samples one action per decision point according to the behavioral
/// strategy and returns the pure strategy's sequence form (a 0/1
/// flow-conserving vector).
pub fn sample_pure_strategy(
    tp: &Treeplex,
    strategy: &BehavioralStrategy,
    stream: &mut SampleStream,
) -> SequenceFormStrategy {
    let mut actions = Vec::with_capacity(tp.num_points());
    for p in tp.points() {
        let block = strategy.point(tp, p.id);
        let draw = stream.unit();
        let mut acc = 0.0;
        let mut chosen = p.action_count - 1;
        for (a, &prob) in block.iter().enumerate() {
            acc += prob;
            if draw < acc {
                chosen = a;
                break;
            }
        }
        actions.push(chosen);
    }
    tp.to_sequence_form(&tp.pure_strategy(&actions))
}

/// Runs the regularized learner against repeated samples of the opponent.
///
/// Regret matching+ locals drive the run; the quadratic anchor term enters
/// through gradient linearization. Stops at `max_iterations` or as soon as
/// the average regret (measured exactly against the accumulated loss) falls
/// to the threshold.
pub fn exploit_run(
    game: &GameInstance,
    cfg: &ExploitConfig,
) -> Result<ExploitOutcome, SolverError> {
    let tp = &game.treeplex_x;
    let mut solver = LaminarSolver::new(tp, MinimizerKind::RegretMatchingPlus, SolverMode::Cfr)?;
    let mut stream = SampleStream::new(cfg.seed);
    let mut averages = RunAverages::new(tp);
    let mut cumulative = CumulativeLoss::new(tp);
    let mut realized = 0.0;
    let mut trace = Vec::new();

    let mut iterations = 0;
    for t in 1..=cfg.max_iterations {
        let x = solver.recommend();
        let sample = sample_pure_strategy(&game.treeplex_y, &cfg.opponent, &mut stream);
        let loss = exploitation_loss(game, &sample, &cfg.anchor, cfg.alpha)?;
        realized += tp.expected_loss(&x, &loss);
        cumulative.accumulate(tp, &loss)?;
        solver.observe(&loss, &x)?;
        averages.update(&tp.to_sequence_form(&x));
        iterations = t;

        let (_, best) = tp.cumulative_best_response(&cumulative)?;
        let avg_regret = (realized - best[tp.root()]) / t as f64;
        trace.push(TraceRow { iteration: t, avg_regret });
        if avg_regret <= cfg.regret_threshold {
            break;
        }
    }

    let average = tp.from_sequence_form(&averages.uniform())?;
    Ok(ExploitOutcome { average, iterations, trace })
}

/// Compares a strategy to the anchor against the true opponent: how much
/// utility it gains, and how much more an optimal adversary could win
/// against it than against the anchor. Both are zero at the anchor itself.
pub fn evaluate_tradeoff(
    game: &GameInstance,
    strategy: &BehavioralStrategy,
    anchor: &BehavioralStrategy,
    opponent: &BehavioralStrategy,
) -> Result<(f64, f64), SolverError> {
    let mu_s = game.treeplex_x.to_sequence_form(strategy);
    let mu_a = game.treeplex_x.to_sequence_form(anchor);
    let mu_o = game.treeplex_y.to_sequence_form(opponent);

    let utility_increase =
        game.payoff_to_x(&mu_s.values, &mu_o.values) - game.payoff_to_x(&mu_a.values, &mu_o.values);

    let exploitability = adversary_value(game, &mu_s)? - adversary_value(game, &mu_a)?;
    Ok((utility_increase, exploitability))
}

/// Best value the adversary (player Y) can achieve against a fixed X
/// strategy, ignoring regularizers.
pub fn adversary_value(
    game: &GameInstance,
    mu_x: &SequenceFormStrategy,
) -> Result<f64, SolverError> {
    let unregularized = game.clone().with_regularizers(None, None);
    let loss_y = game_loss_for_y(&unregularized, mu_x)?;
    let (_, br) = game.treeplex_y.best_response(&loss_y)?;
    // Y's loss is the negated gain, so the attainable gain is -br.
    Ok(-br)
}

/// Best-response value of X against a fixed opponent, ignoring regularizers
/// (the "maximal exploitation" reference line).
pub fn best_response_value(
    game: &GameInstance,
    opponent: &BehavioralStrategy,
) -> Result<(BehavioralStrategy, f64), SolverError> {
    let unregularized = game.clone().with_regularizers(None, None);
    let mu_o = game.treeplex_y.to_sequence_form(opponent);
    let loss_x = crate::losses::game_loss_for_x(&unregularized, &mu_o)?;
    let (br, loss_value) = game.treeplex_x.best_response(&loss_x)?;
    Ok((br, -loss_value))
}

/// Exact minimum of the accumulated exploitation loss, exposed for tests
/// that cross-check the stopping rule.
pub fn cumulative_minimum(
    tp: &Treeplex,
    cumulative: &CumulativeLoss,
) -> Result<f64, SolverError> {
    let (_, best) = tp.cumulative_best_response(cumulative)?;
    Ok(best[tp.root()])
}

/// Local solver sanity hook used in tests: the anchored quadratic alone is
/// minimized at the anchor.
pub fn anchored_quadratic_argmin(
    anchor: &[f64],
    alpha: f64,
) -> Result<Vec<f64>, crate::losses::LossError> {
    let term = crate::losses::PointTerm::bregman_anchor(alpha, anchor.to_vec());
    let (lin, convex) = term.split(anchor.len())?;
    let (x, _) = solve_local_min(&lin, &convex, 1.0, &crate::treeplex::DomainKind::FullSimplex)?;
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::build_kuhn;

    #[test]
    fn pure_opponent_always_samples_itself() {
        let game = build_kuhn();
        let ty = &game.treeplex_y;
        let pure = ty.pure_strategy(&[0, 1, 0, 1, 0, 1, 0]);
        let expected = ty.to_sequence_form(&pure);
        let mut stream = SampleStream::new(3);
        for _ in 0..50 {
            let s = sample_pure_strategy(ty, &pure, &mut stream);
            assert_eq!(s.values, expected.values);
        }
    }

    #[test]
    fn samples_are_flow_conserving_unit_vectors() {
        let game = build_kuhn();
        let ty = &game.treeplex_y;
        let uniform = ty.uniform_strategy();
        let mut stream = SampleStream::new(9);
        for _ in 0..100 {
            let s = sample_pure_strategy(ty, &uniform, &mut stream);
            s.validate(ty, 1e-12).unwrap();
            assert!(s.values.iter().all(|&v| v == 0.0 || v == 1.0));
        }
    }

    #[test]
    fn sample_frequencies_match_distribution() {
        let game = build_kuhn();
        let ty = &game.treeplex_y;
        let uniform = ty.uniform_strategy();
        let mut stream = SampleStream::new(12345);
        let seq = ty.point(1).sequence(0);
        let mut hits = 0u32;
        let n = 10_000;
        for _ in 0..n {
            let s = sample_pure_strategy(ty, &uniform, &mut stream);
            if s.values[seq] == 1.0 {
                hits += 1;
            }
        }
        let freq = hits as f64 / n as f64;
        assert!((freq - 0.5).abs() <= 0.015, "frequency {freq} too far from 0.5");
    }

    #[test]
    fn identical_seeds_reproduce_traces() {
        let game = build_kuhn();
        let cfg = ExploitConfig {
            alpha: 0.5,
            max_iterations: 50,
            regret_threshold: 0.0,
            seed: 77,
            opponent: game.treeplex_y.uniform_strategy(),
            anchor: game.treeplex_x.uniform_strategy(),
        };
        let a = exploit_run(&game, &cfg).unwrap();
        let b = exploit_run(&game, &cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.average.values, b.average.values);
    }

    #[test]
    fn tradeoff_is_zero_at_anchor() {
        let game = build_kuhn();
        let anchor = game.treeplex_x.uniform_strategy();
        let opponent = game.treeplex_y.uniform_strategy();
        let (du, de) = evaluate_tradeoff(&game, &anchor, &anchor, &opponent).unwrap();
        assert_eq!(du, 0.0);
        assert_eq!(de, 0.0);
    }

    #[test]
    fn huge_alpha_pins_average_to_anchor() {
        let game = build_kuhn();
        let cfg = ExploitConfig {
            alpha: 1e6,
            max_iterations: 2000,
            regret_threshold: 0.0005,
            seed: 5,
            opponent: game.treeplex_y.uniform_strategy(),
            anchor: game.treeplex_x.uniform_strategy(),
        };
        let out = exploit_run(&game, &cfg).unwrap();
        for (a, b) in out.average.values.iter().zip(&cfg.anchor.values) {
            assert!((a - b).abs() <= 0.01, "average strayed from anchor: {a} vs {b}");
        }
    }

    #[test]
    fn anchored_quadratic_minimized_at_anchor() {
        let anchor = [0.25, 0.75];
        let x = anchored_quadratic_argmin(&anchor, 3.0).unwrap();
        assert!((x[0] - 0.25).abs() < 1e-9 && (x[1] - 0.75).abs() < 1e-9);
    }
}
