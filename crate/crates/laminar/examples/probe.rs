// Scratch probe for convergence behavior; not part of the test suite.

use laminar::games::{build_kuhn, build_leduc, uniform_entropy_regularizer, uniform_l2_regularizer};
use laminar::minimizers::{MinimizerKind, StepRule};
use laminar::solver::{Schedule, SelfPlay, SolverMode};
use std::time::Instant;

fn run(
    game: &laminar::GameInstance,
    kind: MinimizerKind,
    mode: SolverMode,
    iters: u64,
    stride: u64,
    label: &str,
) {
    let t0 = Instant::now();
    let mut sp = SelfPlay::new(game, kind, kind, mode, Schedule::Simultaneous).unwrap();
    let mut first = None;
    for t in 1..=iters {
        sp.step().unwrap();
        if t % stride == 0 || t == iters {
            let m = sp.evaluate().unwrap();
            if first.is_none() {
                first = Some(m.gap_uniform);
            }
            if t == iters || t <= 5 * stride || t % (stride * 20) == 0 {
                println!(
                    "{label} t={t}: gap_u={:.6e} gap_l={:.6e} rx={:.3e} ry={:.3e} bx={:.3e} by={:.3e}",
                    m.gap_uniform, m.gap_linear, m.avg_regret_x, m.avg_regret_y, m.bound_x, m.bound_y
                );
            }
        }
    }
    println!("{label}: {:?}", t0.elapsed());
}

fn main() {
    let kuhn = build_kuhn();

    println!("== kuhn rm+ cfr 10000 ==");
    run(&kuhn, MinimizerKind::RegretMatchingPlus, SolverMode::Cfr, 10000, 50, "kuhn-rm+");

    println!("== kuhn rm+ brd 20000 ==");
    run(&kuhn, MinimizerKind::RegretMatchingPlus, SolverMode::Brd, 20000, 100, "kuhn-brd");

    println!("== kuhn qre ogd tau=1 5000 ==");
    let qre = build_kuhn().with_regularizers(
        Some(uniform_entropy_regularizer(&kuhn.treeplex_x, 1.0)),
        Some(uniform_entropy_regularizer(&kuhn.treeplex_y, 1.0)),
    );
    run(
        &qre,
        MinimizerKind::GradientDescent(StepRule::default()),
        SolverMode::Cfr,
        5000,
        50,
        "kuhn-qre-ogd",
    );

    println!("== leduc5 rm+ nash 10000 ==");
    let leduc = build_leduc(5).unwrap();
    let t0 = Instant::now();
    let mut sp = SelfPlay::new(
        &leduc,
        MinimizerKind::RegretMatchingPlus,
        MinimizerKind::RegretMatchingPlus,
        SolverMode::Cfr,
        Schedule::Simultaneous,
    )
    .unwrap();
    let mut hit = None;
    for t in 1..=10000u64 {
        sp.step().unwrap();
        if t % 100 == 0 {
            let m = sp.evaluate().unwrap();
            if hit.is_none() && m.gap_uniform <= 0.1 {
                hit = Some((t, m.gap_uniform));
            }
            if t % 2000 == 0 {
                println!("leduc5-rm+ t={t}: gap_u={:.6e} gap_l={:.6e}", m.gap_uniform, m.gap_linear);
            }
        }
    }
    println!("leduc5 rm+ first gap<=0.1 at {hit:?}, elapsed {:?}", t0.elapsed());

    println!("== leduc5 l2 sweep ogd ==");
    for beta in [1.0, 0.1, 0.01] {
        let g = build_leduc(5).unwrap();
        let reg = g.clone().with_regularizers(
            Some(uniform_l2_regularizer(&g.treeplex_x, beta)),
            Some(uniform_l2_regularizer(&g.treeplex_y, beta)),
        );
        let t0 = Instant::now();
        let mut sp = SelfPlay::new(
            &reg,
            MinimizerKind::GradientDescent(StepRule::default()),
            MinimizerKind::GradientDescent(StepRule::default()),
            SolverMode::Cfr,
            Schedule::Simultaneous,
        )
        .unwrap();
        let mut hit = None;
        for t in 1..=20000u64 {
            sp.step().unwrap();
            if t % 100 == 0 {
                let m = sp.evaluate().unwrap();
                if m.gap_uniform <= 0.05 {
                    hit = Some((t, m.gap_uniform));
                    break;
                }
            }
        }
        let final_gap = sp.evaluate().unwrap().gap_uniform;
        println!(
            "beta={beta}: to-0.05 {hit:?} (final gap {final_gap:.4e}) elapsed {:?}",
            t0.elapsed()
        );
    }

    println!("== leduc5 l2 sweep rm+ ==");
    for beta in [1.0, 0.1, 0.01] {
        let g = build_leduc(5).unwrap();
        let reg = g.clone().with_regularizers(
            Some(uniform_l2_regularizer(&g.treeplex_x, beta)),
            Some(uniform_l2_regularizer(&g.treeplex_y, beta)),
        );
        let t0 = Instant::now();
        let mut sp = SelfPlay::new(
            &reg,
            MinimizerKind::RegretMatchingPlus,
            MinimizerKind::RegretMatchingPlus,
            SolverMode::Cfr,
            Schedule::Simultaneous,
        )
        .unwrap();
        let mut hit = None;
        for t in 1..=20000u64 {
            sp.step().unwrap();
            if t % 100 == 0 {
                let m = sp.evaluate().unwrap();
                if m.gap_uniform <= 0.05 {
                    hit = Some((t, m.gap_uniform));
                    break;
                }
            }
        }
        println!("beta={beta}: to-0.05 {hit:?} elapsed {:?}", t0.elapsed());
    }
}
