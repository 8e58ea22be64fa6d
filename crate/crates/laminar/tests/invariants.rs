//! Cross-module invariants checked against the brute-force oracles.

mod common;

use common::*;
use laminar::exploit::{evaluate_tradeoff, exploit_run, ExploitConfig};
use laminar::games::{build_goofspiel, build_kuhn, build_leduc};
use laminar::losses::{
    dilated_value, exploitation_loss, game_loss_for_x, game_loss_for_y, CumulativeLoss,
    PointTerm, SeparableLoss, Term,
};
use laminar::minimizers::{
    external_regret, project_simplex, LocalLoss, LocalMinimizer, MinimizerKind, StepRule,
};
use laminar::oracles::{
    brute_force_minimum, brute_force_subtree_regret, enumerate_pure, kuhn_game_value,
    leduc_game_values, projection_kkt_check, subtree_points,
};
use laminar::solver::{saddle_point_gap, LaminarSolver, Schedule, SelfPlay, SolverMode};
use laminar::treeplex::{BrdTracker, DomainKind};

#[test]
fn sequence_form_round_trip_on_kuhn() {
    let game = build_kuhn();
    let tp = &game.treeplex_x;
    let mut r = rng(11);
    for _ in 0..100 {
        let x = random_strategy(&mut r, tp);
        let mu = tp.to_sequence_form(&x);
        mu.validate(tp, 1e-9).unwrap();
        let back = tp.from_sequence_form(&mu).unwrap();
        let mu2 = tp.to_sequence_form(&back);
        for (a, b) in mu.values.iter().zip(&mu2.values) {
            assert_close(*a, *b, 1e-9, "round trip");
        }
    }
}

#[test]
fn expected_loss_equals_sequence_inner_product() {
    let game = build_kuhn();
    let tp = &game.treeplex_x;
    let mut r = rng(12);
    for _ in 0..50 {
        let coeffs: Vec<f64> = (0..tp.num_sequences()).map(|_| range(&mut r, -2.0, 2.0)).collect();
        let loss = SeparableLoss::from_sequence_coeffs(tp, &coeffs).unwrap();
        let x = random_strategy(&mut r, tp);
        let mu = tp.to_sequence_form(&x);
        let dot: f64 = coeffs.iter().zip(&mu.values).map(|(c, m)| c * m).sum();
        assert_close(tp.expected_loss(&x, &loss), dot, 1e-9, "loss vs <g, mu>");
    }
}

#[test]
fn best_response_never_beaten_by_random_strategies() {
    let game = build_kuhn();
    let tp = &game.treeplex_x;
    let mut r = rng(13);
    let loss = random_linear_loss(&mut r, tp, 1.0);
    let (_, br_value) = tp.best_response(&loss).unwrap();
    for _ in 0..1000 {
        let x = random_strategy(&mut r, tp);
        assert!(tp.expected_loss(&x, &loss) >= br_value - 1e-9);
    }
}

#[test]
fn best_response_matches_pure_enumeration_exactly() {
    let game = build_kuhn();
    let tp = &game.treeplex_x;
    let mut r = rng(14);
    for _ in 0..20 {
        let loss = random_linear_loss(&mut r, tp, 1.0);
        let (_, br_value) = tp.best_response(&loss).unwrap();
        let brute = brute_force_minimum(tp, tp.root(), std::slice::from_ref(&loss)).unwrap();
        assert!(
            br_value == brute,
            "vertex minimum must match enumeration bit for bit: {br_value} vs {brute}"
        );
    }
    // and on a batch of random small treeplexes
    for seed in 0..20 {
        let mut r = rng(1000 + seed);
        let tp = random_treeplex(&mut r, 8);
        let loss = random_linear_loss(&mut r, &tp, 1.0);
        let (_, br_value) = tp.best_response(&loss).unwrap();
        let brute = brute_force_minimum(&tp, tp.root(), std::slice::from_ref(&loss)).unwrap();
        assert!(br_value == brute, "{br_value} vs {brute}");
    }
}

#[test]
fn best_response_differential_telescopes() {
    let mut r = rng(15);
    for _ in 0..20 {
        let tp = random_treeplex(&mut r, 8);
        let mut tracker = BrdTracker::new(&tp);
        let mut cum = CumulativeLoss::new(&tp);
        let mut telescoped = vec![0.0; tp.num_points()];
        let mut losses = Vec::new();
        for _ in 0..6 {
            let loss = random_linear_loss(&mut r, &tp, 1.0);
            cum.accumulate(&tp, &loss).unwrap();
            let db = tracker.differentials(&tp, &cum).unwrap();
            for (t, d) in telescoped.iter_mut().zip(&db) {
                *t += d;
            }
            losses.push(loss);
        }
        // telescoping sum equals the cumulative best-response value
        let (_, best) = tp.cumulative_best_response(&cum).unwrap();
        for j in 0..tp.num_points() {
            assert_close(telescoped[j], best[j], 1e-9, "telescoping");
        }
    }
}

#[test]
fn value_minus_regret_differential_is_br_differential() {
    // V(T) - (R(T) - R(T-1)) = B(T) - B(T-1) at every point: expanding the
    // two regrets cancels the value terms and leaves the change in the
    // cumulative best-response value.
    let mut r = rng(16);
    for _ in 0..15 {
        let tp = random_treeplex(&mut r, 7);
        let rounds = 4;
        let losses: Vec<SeparableLoss> =
            (0..rounds).map(|_| random_linear_loss(&mut r, &tp, 1.0)).collect();
        let played: Vec<_> = (0..rounds).map(|_| random_strategy(&mut r, &tp)).collect();

        let mut tracker = BrdTracker::new(&tp);
        let mut cum = CumulativeLoss::new(&tp);
        for t in 0..rounds {
            cum.accumulate(&tp, &losses[t]).unwrap();
            let db = tracker.differentials(&tp, &cum).unwrap();
            let values = tp.bottom_up_values(&played[t], &losses[t]);
            for j in 0..tp.num_points() {
                let r_now =
                    brute_force_subtree_regret(&tp, j, &losses[..=t], &played[..=t]).unwrap();
                let r_prev = if t == 0 {
                    0.0
                } else {
                    brute_force_subtree_regret(&tp, j, &losses[..t], &played[..t]).unwrap()
                };
                let delta = r_now - r_prev;
                assert_close(values[j] - delta, db[j], 1e-9, "V - dR = dB");
            }
        }
    }
}

#[test]
fn kuhn_values_match_deal_enumeration() {
    let game = build_kuhn();
    let mut r = rng(17);
    for _ in 0..25 {
        let x = random_strategy(&mut r, &game.treeplex_x);
        let y = random_strategy(&mut r, &game.treeplex_y);
        let mu_y = game.treeplex_y.to_sequence_form(&y);
        let loss_x = game_loss_for_x(&game, &mu_y).unwrap();
        // the loss of X is the negated payoff, per deal-by-deal enumeration
        let enumerated = kuhn_game_value(&game, &x, &y);
        assert_close(
            game.treeplex_x.expected_loss(&x, &loss_x),
            -enumerated,
            1e-9,
            "game loss vs rule walk",
        );
    }
}

#[test]
fn zero_sum_losses_cancel() {
    let game = build_kuhn();
    let mut r = rng(18);
    for _ in 0..20 {
        let x = random_strategy(&mut r, &game.treeplex_x);
        let y = random_strategy(&mut r, &game.treeplex_y);
        let mu_x = game.treeplex_x.to_sequence_form(&x);
        let mu_y = game.treeplex_y.to_sequence_form(&y);
        let lx = game.treeplex_x.expected_loss(&x, &game_loss_for_x(&game, &mu_y).unwrap());
        let ly = game.treeplex_y.expected_loss(&y, &game_loss_for_y(&game, &mu_x).unwrap());
        assert_close(lx + ly, 0.0, 1e-9, "zero sum");
    }
}

#[test]
fn leduc_matrix_agrees_with_rule_walk() {
    let game = build_leduc(2).unwrap();
    let mut r = rng(19);
    for _ in 0..10 {
        let x = random_strategy(&mut r, &game.treeplex_x);
        let y = random_strategy(&mut r, &game.treeplex_y);
        let mux = game.treeplex_x.to_sequence_form(&x);
        let muy = game.treeplex_y.to_sequence_form(&y);
        let (to_p1, to_p2) = leduc_game_values(&game, 2, &x, &y);
        assert_close(to_p1 + to_p2, 0.0, 1e-9, "seat payoffs negate");
        assert_close(
            game.payoff_to_x(&mux.values, &muy.values),
            to_p1,
            1e-9,
            "leduc matrix vs rules",
        );
    }
}

#[test]
fn goofspiel_mirrored_profiles_are_fair() {
    let game = build_goofspiel(3).unwrap();
    let mut r = rng(20);
    for _ in 0..10 {
        // both treeplexes share the same shape, so a strategy mirrors as-is
        let x = random_strategy(&mut r, &game.treeplex_x);
        let mux = game.treeplex_x.to_sequence_form(&x);
        let muy = game.treeplex_y.to_sequence_form(&x);
        assert_close(game.payoff_to_x(&mux.values, &muy.values), 0.0, 1e-9, "mirror");
    }
}

#[test]
fn projection_kkt_on_random_inputs() {
    let mut r = rng(21);
    for n in 2..=6 {
        for _ in 0..200 {
            let v: Vec<f64> = (0..n).map(|_| range(&mut r, -3.0, 3.0)).collect();
            let p = project_simplex(&v, &DomainKind::FullSimplex);
            assert!(projection_kkt_check(&v, &DomainKind::FullSimplex, &p, 1e-9), "{v:?} -> {p:?}");

            let mut lbs: Vec<f64> = (0..n).map(|_| unit(&mut r) * 0.8 / n as f64).collect();
            lbs[0] = lbs[0].min(0.2);
            let domain = DomainKind::PerturbedSimplex { lower_bounds: lbs };
            let p = project_simplex(&v, &domain);
            assert!(projection_kkt_check(&v, &domain, &p, 1e-9));
        }
    }
}

#[test]
fn projection_is_identity_on_feasible_points() {
    let mut r = rng(22);
    for _ in 0..100 {
        let x = random_interior_point(&mut r, 4, 0.0);
        let p = project_simplex(&x, &DomainKind::FullSimplex);
        for (a, b) in x.iter().zip(&p) {
            assert_close(*a, *b, 1e-9, "fixed point");
        }
    }
}

#[test]
fn rm_plus_state_stays_nonnegative() {
    let mut r = rng(23);
    let mut m =
        LocalMinimizer::new(MinimizerKind::RegretMatchingPlus, DomainKind::FullSimplex, 3).unwrap();
    for _ in 0..500 {
        let loss = LocalLoss::linear_only((0..3).map(|_| range(&mut r, -1.0, 1.0)).collect());
        let played = m.recommend();
        m.observe(&loss, &played).unwrap();
        assert!(m.cumulative().iter().all(|&q| q >= 0.0));
    }
}

#[test]
fn minimizers_are_hannan_consistent_on_iid_losses() {
    for kind in [
        MinimizerKind::RegretMatching,
        MinimizerKind::RegretMatchingPlus,
        MinimizerKind::GradientDescent(StepRule::default()),
    ] {
        let mut r = rng(24);
        let mut m = LocalMinimizer::new(kind, DomainKind::FullSimplex, 3).unwrap();
        let mut history: Vec<(LocalLoss, Vec<f64>)> = Vec::new();
        let mut avg_at_100 = f64::NAN;
        for t in 1..=10_000u32 {
            let loss = LocalLoss::linear_only((0..3).map(|_| unit(&mut r)).collect());
            let played = m.recommend();
            m.observe(&loss, &played).unwrap();
            history.push((loss, played));
            if t == 100 {
                avg_at_100 =
                    external_regret(&DomainKind::FullSimplex, &history).unwrap() / t as f64;
            }
        }
        let avg_at_end =
            external_regret(&DomainKind::FullSimplex, &history).unwrap() / history.len() as f64;
        assert!(
            avg_at_end < avg_at_100,
            "{kind:?}: average regret should fall, {avg_at_100} -> {avg_at_end}"
        );
    }
}

#[test]
fn regret_matching_respects_adversarial_bound() {
    // adversary always charges the action regret matching currently favors
    let mut m =
        LocalMinimizer::new(MinimizerKind::RegretMatching, DomainKind::FullSimplex, 2).unwrap();
    let t_max = 10_000u32;
    let mut history = Vec::new();
    for _ in 0..t_max {
        let played = m.recommend();
        let target = if played[0] >= played[1] { 0 } else { 1 };
        let mut coeffs = vec![-1.0, -1.0];
        coeffs[target] = 1.0;
        let loss = LocalLoss::linear_only(coeffs);
        m.observe(&loss, &played).unwrap();
        history.push((loss, played));
    }
    let regret = external_regret(&DomainKind::FullSimplex, &history).unwrap();
    let bound = 2.0 * (2.0 * t_max as f64).sqrt();
    assert!(regret <= bound, "regret {regret} above the matching bound {bound}");
}

#[test]
fn linearized_regret_upper_bounds_true_regret() {
    // convexity: measuring against the true convex losses can only shrink
    // regret relative to the linearization at the played points
    let mut r = rng(25);
    let (_, convex) = PointTerm::dilated_l2(0.7).split(3).unwrap();
    let mut m =
        LocalMinimizer::new(MinimizerKind::RegretMatching, DomainKind::FullSimplex, 3).unwrap();
    let mut true_history: Vec<(LocalLoss, Vec<f64>)> = Vec::new();
    let mut lin_history: Vec<(LocalLoss, Vec<f64>)> = Vec::new();
    for t in 1..=200u32 {
        let lin: Vec<f64> = (0..3).map(|_| range(&mut r, -1.0, 1.0)).collect();
        let loss = LocalLoss { linear: lin, convex: Some(convex.clone()) };
        let played = m.recommend();
        let grad = loss.gradient(&played);
        m.observe(&loss, &played).unwrap();
        true_history.push((loss, played.clone()));
        lin_history.push((LocalLoss::linear_only(grad), played));
        let true_regret = external_regret(&DomainKind::FullSimplex, &true_history).unwrap();
        let lin_regret = external_regret(&DomainKind::FullSimplex, &lin_history).unwrap();
        assert!(
            true_regret <= lin_regret + 1e-9,
            "round {t}: true {true_regret} vs linearized {lin_regret}"
        );
    }
}

#[test]
fn term_convexity_spot_checks() {
    let mut r = rng(26);
    let anchor = random_interior_point(&mut r, 3, 0.01);
    let kinds: Vec<PointTerm> = vec![
        PointTerm::linear(vec![0.3, -0.7, 1.1]),
        PointTerm::neg_entropy(0.8),
        PointTerm::dilated_l2(1.3),
        PointTerm::bregman_anchor(2.0, anchor),
    ];
    for term in &kinds {
        for _ in 0..200 {
            let u = random_interior_point(&mut r, 3, 0.0);
            let v = random_interior_point(&mut r, 3, 0.0);
            let lambda = unit(&mut r);
            let mix: Vec<f64> =
                u.iter().zip(&v).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
            let lhs = term.value(&mix);
            let rhs = lambda * term.value(&u) + (1.0 - lambda) * term.value(&v);
            assert!(lhs <= rhs + 1e-12, "convexity violated: {lhs} > {rhs}");
        }
    }
}

#[test]
fn game_loss_is_linear_in_opponent_sequence_form() {
    let game = build_kuhn();
    let mut r = rng(27);
    for _ in 0..20 {
        let x = random_strategy(&mut r, &game.treeplex_x);
        let y1 = game.treeplex_y.to_sequence_form(&random_strategy(&mut r, &game.treeplex_y));
        let y2 = game.treeplex_y.to_sequence_form(&random_strategy(&mut r, &game.treeplex_y));
        let lambda = unit(&mut r);
        let mix = laminar::treeplex::SequenceFormStrategy {
            values: y1
                .values
                .iter()
                .zip(&y2.values)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        };
        let l_mix =
            game.treeplex_x.expected_loss(&x, &game_loss_for_x(&game, &mix).unwrap());
        let l1 = game.treeplex_x.expected_loss(&x, &game_loss_for_x(&game, &y1).unwrap());
        let l2 = game.treeplex_x.expected_loss(&x, &game_loss_for_x(&game, &y2).unwrap());
        assert_close(l_mix, lambda * l1 + (1.0 - lambda) * l2, 1e-9, "loss linearity");
    }
}

#[test]
fn dilated_two_form_identity_on_random_weights() {
    let game = build_kuhn();
    let tp = &game.treeplex_x;
    let mut r = rng(28);
    for _ in 0..50 {
        let x = random_strategy(&mut r, tp);
        let mut d = SeparableLoss::zeros(tp);
        for p in tp.points() {
            let mut term = PointTerm::neg_entropy(unit(&mut r));
            term.push(Term::DilatedL2(unit(&mut r)));
            d.set_term(p.id, term);
        }
        // dilated_value errors if the two forms disagree beyond 1e-9
        dilated_value(tp, &x, &d).unwrap();
    }
    // pure strategies hit the zero-reach branch
    let pure = tp.pure_strategy(&[0, 0, 1, 0, 1, 0, 1]);
    let mut d = SeparableLoss::zeros(tp);
    for p in tp.points() {
        d.set_term(p.id, PointTerm::neg_entropy(1.0));
    }
    let v = dilated_value(tp, &pure, &d).unwrap();
    assert_close(v, 0.0, 1e-12, "vertex entropy is zero at reached points");
}

#[test]
fn laminar_bound_dominates_brute_force_regret() {
    // Theorem-2-style check on solver-generated runs, both modes.
    for (seed, mode) in [(41u64, SolverMode::Cfr), (42, SolverMode::Brd)] {
        for case in 0..10 {
            let mut r = rng(seed * 100 + case);
            let tp = random_treeplex(&mut r, 8);
            let mut solver =
                LaminarSolver::new(&tp, MinimizerKind::RegretMatching, mode).unwrap();
            let mut losses = Vec::new();
            let mut played = Vec::new();
            for _ in 0..5 {
                let loss = random_linear_loss(&mut r, &tp, 1.0);
                let x = solver.recommend();
                solver.observe(&loss, &x).unwrap();
                losses.push(loss);
                played.push(x);
                let report = solver.regret_report().unwrap();
                let brute =
                    brute_force_subtree_regret(&tp, tp.root(), &losses, &played).unwrap();
                assert!(
                    brute <= report.bound + 1e-9,
                    "{mode:?}: brute {brute} exceeds bound {}",
                    report.bound
                );
            }
        }
    }
}

#[test]
fn cfr_and_brd_coefficients_differ_by_first_round_regret() {
    // at t = 1 the child coefficient difference is exactly the first-round
    // subtree regret
    let mut r = rng(43);
    for _ in 0..15 {
        let tp = random_treeplex(&mut r, 8);
        let loss = random_linear_loss(&mut r, &tp, 1.0);
        let played = random_strategy(&mut r, &tp);
        let values = tp.bottom_up_values(&played, &loss);

        let mut tracker = BrdTracker::new(&tp);
        let cum = CumulativeLoss::single(&tp, &loss).unwrap();
        let db = tracker.differentials(&tp, &cum).unwrap();

        for j in 0..tp.num_points() {
            let r1 = brute_force_subtree_regret(
                &tp,
                j,
                std::slice::from_ref(&loss),
                std::slice::from_ref(&played),
            )
            .unwrap();
            // kappa_cfr - kappa_brd = V1 - dB1 = R1 (dB1 is the first
            // best-response value, so the difference is the first regret)
            assert_close(values[j] - db[j], r1, 1e-9, "coefficient difference");
        }
    }
}

#[test]
fn averaged_iterates_stay_flow_conserving() {
    let game = build_kuhn();
    let mut sp = SelfPlay::new(
        &game,
        MinimizerKind::RegretMatchingPlus,
        MinimizerKind::RegretMatchingPlus,
        SolverMode::Cfr,
        Schedule::Simultaneous,
    )
    .unwrap();
    for _ in 0..200 {
        sp.step().unwrap();
    }
    sp.averages_x().uniform().validate(&game.treeplex_x, 1e-9).unwrap();
    sp.averages_x().linear().validate(&game.treeplex_x, 1e-9).unwrap();
    sp.averages_y().uniform().validate(&game.treeplex_y, 1e-9).unwrap();
    sp.averages_y().linear().validate(&game.treeplex_y, 1e-9).unwrap();
}

#[test]
fn gap_never_negative_during_runs() {
    let game = build_kuhn();
    let mut sp = SelfPlay::new(
        &game,
        MinimizerKind::RegretMatching,
        MinimizerKind::RegretMatchingPlus,
        SolverMode::Cfr,
        Schedule::Simultaneous,
    )
    .unwrap();
    for t in 1..=500u32 {
        sp.step().unwrap();
        if t % 25 == 0 {
            let m = sp.evaluate().unwrap();
            assert!(m.gap_uniform >= -1e-9);
            assert!(m.gap_linear >= -1e-9);
        }
    }
}

#[test]
fn random_profile_gaps_are_nonnegative() {
    let game = build_kuhn();
    let mut r = rng(44);
    for _ in 0..50 {
        let x = random_strategy(&mut r, &game.treeplex_x);
        let y = random_strategy(&mut r, &game.treeplex_y);
        assert!(saddle_point_gap(&game, &x, &y).unwrap() >= -1e-9);
    }
}

#[test]
fn exploit_stopping_rule_is_honored() {
    let game = build_kuhn();
    let (x_ne, _) = laminar::oracles::kuhn_equilibrium(&game, 1.0 / 6.0);
    let cfg = ExploitConfig {
        alpha: 10.0,
        max_iterations: 5000,
        regret_threshold: 0.0005,
        seed: 3,
        opponent: game.treeplex_y.uniform_strategy(),
        anchor: x_ne,
    };
    let out = exploit_run(&game, &cfg).unwrap();
    assert!(out.iterations <= 5000);
    assert!(out.trace.len() as u64 == out.iterations);
    if out.iterations < 5000 {
        let last = out.trace.last().unwrap();
        assert!(last.avg_regret <= 0.0005);
    }
}

#[test]
fn exploitation_cannot_beat_the_best_response_line() {
    let game = build_kuhn();
    let (x_ne, y_ne) = laminar::oracles::kuhn_equilibrium(&game, 1.0 / 6.0);
    let mut r = rng(45);
    let opponent = random_strategy(&mut r, &game.treeplex_y);
    let (_, br_value) = laminar::exploit::best_response_value(&game, &opponent).unwrap();
    let mu_ne = game.treeplex_x.to_sequence_form(&x_ne);
    let mu_opp = game.treeplex_y.to_sequence_form(&opponent);
    let baseline = game.payoff_to_x(&mu_ne.values, &mu_opp.values);
    let _ = y_ne;
    for alpha in [0.0, 0.01, 1.0] {
        let cfg = ExploitConfig {
            alpha,
            max_iterations: 2000,
            regret_threshold: 0.0005,
            seed: 9,
            opponent: opponent.clone(),
            anchor: x_ne.clone(),
        };
        let out = exploit_run(&game, &cfg).unwrap();
        let (du, _) = evaluate_tradeoff(&game, &out.average, &x_ne, &opponent).unwrap();
        assert!(du <= (br_value - baseline) + 0.01, "alpha {alpha}: {du} too large");
    }
}

#[test]
fn exploitation_loss_alpha_zero_is_plain_game_loss() {
    let game = build_kuhn();
    let mut r = rng(46);
    let anchor = game.treeplex_x.uniform_strategy();
    let sample = game.treeplex_y.to_sequence_form(&random_strategy(&mut r, &game.treeplex_y));
    let with_zero = exploitation_loss(&game, &sample, &anchor, 0.0).unwrap();
    let plain = game_loss_for_x(&game, &sample).unwrap();
    let x = random_strategy(&mut r, &game.treeplex_x);
    assert_close(
        game.treeplex_x.expected_loss(&x, &with_zero),
        game.treeplex_x.expected_loss(&x, &plain),
        1e-12,
        "alpha 0",
    );
}

#[test]
fn enumerate_pure_counts_match_action_products() {
    let mut r = rng(47);
    for _ in 0..10 {
        let tp = random_treeplex(&mut r, 8);
        for j in [tp.root(), tp.num_points() - 1] {
            let expected: u64 = subtree_points(&tp, j)
                .iter()
                .map(|&p| tp.point(p).action_count as u64)
                .product();
            let e = enumerate_pure(&tp, j).unwrap();
            assert_eq!(e.strategy_count(), expected);
            assert_eq!(e.count() as u64, expected);
        }
    }
}
