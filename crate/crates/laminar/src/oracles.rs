//! Independent brute-force verifiers backing the test suite: pure-strategy
//! enumeration, exhaustive subtree regret for linear losses, central finite
//! differences, projection KKT checks, and rule-level game walkers that
//! recompute expected payoffs without touching the payoff matrices.
//!
//! Everything here recomputes results from definitions; the only thing
//! shared with the checked modules is data layout (sequence indices and
//! information-set keys).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::games::{permutations, GameInstance};
use crate::losses::{SeparableLoss, Term};
use crate::math;
use crate::treeplex::{BehavioralStrategy, DomainKind, Treeplex};

#[derive(Clone, Debug, PartialEq)]
pub enum OracleError {
    /// The enumeration would exceed the guard (2^20 pure strategies).
    TooLarge,
    /// Brute-force regret requires linear losses.
    NonLinearLoss,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge => write!(f, "enumeration too large"),
            OracleError::NonLinearLoss => write!(f, "brute force requires linear losses"),
        }
    }
}

impl core::error::Error for OracleError {}

const MAX_PURE: u64 = 1 << 20;

/// Decision points of the subtree rooted at `j`, parents before children.
pub fn subtree_points(tp: &Treeplex, j: usize) -> Vec<usize> {
    let mut out = vec![j];
    let mut cursor = 0;
    while cursor < out.len() {
        let p = tp.point(out[cursor]);
        for children in &p.children {
            out.extend(children.iter().copied());
        }
        cursor += 1;
    }
    out.sort_unstable();
    out
}

/// Iterator over every pure strategy of a subtree. Yields full-treeplex
/// strategies with action 0 everywhere outside the subtree.
pub struct PureStrategyEnumeration<'a> {
    tp: &'a Treeplex,
    points: Vec<usize>,
    counters: Vec<usize>,
    done: bool,
}

/// Enumerates the pure strategies of the subtree rooted at `j`.
pub fn enumerate_pure<'a>(
    tp: &'a Treeplex,
    j: usize,
) -> Result<PureStrategyEnumeration<'a>, OracleError> {
    let points = subtree_points(tp, j);
    let mut count: u64 = 1;
    for &p in &points {
        count = count.saturating_mul(tp.point(p).action_count as u64);
        if count > MAX_PURE {
            return Err(OracleError::TooLarge);
        }
    }
    Ok(PureStrategyEnumeration { tp, counters: vec![0; points.len()], points, done: false })
}

impl PureStrategyEnumeration<'_> {
    pub fn strategy_count(&self) -> u64 {
        self.points.iter().map(|&p| self.tp.point(p).action_count as u64).product()
    }
}

impl Iterator for PureStrategyEnumeration<'_> {
    type Item = BehavioralStrategy;

    fn next(&mut self) -> Option<BehavioralStrategy> {
        if self.done {
            return None;
        }
        let mut actions = vec![0usize; self.tp.num_points()];
        for (&p, &c) in self.points.iter().zip(&self.counters) {
            actions[p] = c;
        }
        let strategy = self.tp.pure_strategy(&actions);

        // odometer increment
        let mut i = 0;
        loop {
            if i == self.points.len() {
                self.done = true;
                break;
            }
            self.counters[i] += 1;
            if self.counters[i] < self.tp.point(self.points[i]).action_count {
                break;
            }
            self.counters[i] = 0;
            i += 1;
        }
        Some(strategy)
    }
}

fn linear_coeffs(loss: &SeparableLoss, tp: &Treeplex) -> Result<Vec<Vec<f64>>, OracleError> {
    let mut out = Vec::with_capacity(tp.num_points());
    for p in tp.points() {
        let term = &loss.terms[p.id];
        if term.prims().iter().any(|t| !matches!(t, Term::Linear(_))) {
            return Err(OracleError::NonLinearLoss);
        }
        let mut c = vec![0.0; p.action_count];
        for t in term.prims() {
            if let Term::Linear(coeffs) = t {
                for (slot, v) in c.iter_mut().zip(coeffs) {
                    *slot += v;
                }
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Subtree value of a strategy by direct recursion over the definition:
/// local coefficients first, then children in order (the summation order the
/// bottom-up solvers use, so vertex minima match bit for bit).
fn subtree_value(
    tp: &Treeplex,
    coeffs: &[Vec<f64>],
    x: &BehavioralStrategy,
    j: usize,
) -> f64 {
    let p = tp.point(j);
    let block = x.point(tp, j);
    let mut v = math::dot(&coeffs[j], block);
    for a in 0..p.action_count {
        for &ch in &p.children[a] {
            v += block[a] * subtree_value(tp, coeffs, x, ch);
        }
    }
    v
}

/// Cumulative regret of the subtree rooted at `j` by exhaustive enumeration:
/// realized subtree values minus the best pure subtree strategy in
/// hindsight (linear losses reach their minimum at a vertex).
pub fn brute_force_subtree_regret(
    tp: &Treeplex,
    j: usize,
    losses: &[SeparableLoss],
    played: &[BehavioralStrategy],
) -> Result<f64, OracleError> {
    assert_eq!(losses.len(), played.len());
    let all_coeffs: Vec<Vec<Vec<f64>>> =
        losses.iter().map(|l| linear_coeffs(l, tp)).collect::<Result<_, _>>()?;

    let mut realized = 0.0;
    for (coeffs, x) in all_coeffs.iter().zip(played) {
        realized += subtree_value(tp, coeffs, x, j);
    }

    let mut best = f64::INFINITY;
    for pure in enumerate_pure(tp, j)? {
        let mut total = 0.0;
        for coeffs in &all_coeffs {
            total += subtree_value(tp, coeffs, &pure, j);
        }
        if total < best {
            best = total;
        }
    }
    Ok(realized - best)
}

/// Minimum total value over all pure subtree strategies (the hindsight
/// optimum for linear losses), exposed for best-response cross-checks.
pub fn brute_force_minimum(
    tp: &Treeplex,
    j: usize,
    losses: &[SeparableLoss],
) -> Result<f64, OracleError> {
    let all_coeffs: Vec<Vec<Vec<f64>>> =
        losses.iter().map(|l| linear_coeffs(l, tp)).collect::<Result<_, _>>()?;
    let mut best = f64::INFINITY;
    for pure in enumerate_pure(tp, j)? {
        let mut total = 0.0;
        for coeffs in &all_coeffs {
            total += subtree_value(tp, coeffs, &pure, j);
        }
        if total < best {
            best = total;
        }
    }
    Ok(best)
}

/// Central finite differences of a scalar function.
pub fn finite_difference_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        probe[i] = x[i] + h;
        let hi = f(&probe);
        probe[i] = x[i] - h;
        let lo = f(&probe);
        probe[i] = x[i];
        g[i] = (hi - lo) / (2.0 * h);
    }
    g
}

/// Verifies that `p` is the Euclidean projection of `v` onto the domain:
/// feasibility, a consistent scalar multiplier on the inactive coordinates,
/// and complementary slackness on the active ones.
pub fn projection_kkt_check(v: &[f64], domain: &DomainKind, p: &[f64], tol: f64) -> bool {
    if v.len() != p.len() {
        return false;
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol {
        return false;
    }
    for (a, &pa) in p.iter().enumerate() {
        if pa < domain.lower_bound(a) - tol {
            return false;
        }
    }
    let inactive: Vec<usize> =
        (0..p.len()).filter(|&a| p[a] > domain.lower_bound(a) + tol).collect();
    let lambda = if inactive.is_empty() {
        (0..p.len()).map(|a| v[a] - p[a]).fold(f64::NEG_INFINITY, f64::max)
    } else {
        let s: f64 = inactive.iter().map(|&a| v[a] - p[a]).sum();
        s / inactive.len() as f64
    };
    for &a in &inactive {
        if (v[a] - p[a] - lambda).abs() > tol {
            return false;
        }
    }
    for a in 0..p.len() {
        if p[a] <= domain.lower_bound(a) + tol && v[a] - p[a] > lambda + tol {
            return false;
        }
    }
    true
}

fn behavioral_prob(
    tp: &Treeplex,
    strategy: &BehavioralStrategy,
    point: usize,
    action: usize,
) -> f64 {
    strategy.values[tp.point(point).sequence(action)]
}

/// Expected payoff to player 1 in Kuhn poker by walking every deal and
/// betting line directly from the rules.
pub fn kuhn_game_value(
    game: &GameInstance,
    x: &BehavioralStrategy,
    y: &BehavioralStrategy,
) -> f64 {
    let names = ["J", "Q", "K"];
    let map_x = game.key_map_x();
    let map_y = game.key_map_y();
    let tx = &game.treeplex_x;
    let ty = &game.treeplex_y;

    let mut total = 0.0;
    for c1 in 0..3usize {
        for c2 in 0..3usize {
            if c1 == c2 {
                continue;
            }
            let sd = if c1 > c2 { 1.0 } else { -1.0 };
            let p1_first = map_x[names[c1]];
            let p1_raised = map_x[alloc::format!("{}/kb", names[c1]).as_str()];
            let p2_checked = map_y[alloc::format!("{}/k", names[c2]).as_str()];
            let p2_bet = map_y[alloc::format!("{}/b", names[c2]).as_str()];

            let x_check = behavioral_prob(tx, x, p1_first, 0);
            let x_bet = behavioral_prob(tx, x, p1_first, 1);
            let x_fold = behavioral_prob(tx, x, p1_raised, 0);
            let x_call = behavioral_prob(tx, x, p1_raised, 1);
            let y_check = behavioral_prob(ty, y, p2_checked, 0);
            let y_raise = behavioral_prob(ty, y, p2_checked, 1);
            let y_fold = behavioral_prob(ty, y, p2_bet, 0);
            let y_call = behavioral_prob(ty, y, p2_bet, 1);

            let after_check = y_check * sd + y_raise * (x_fold * -1.0 + x_call * sd * 2.0);
            let after_bet = y_fold * 1.0 + y_call * sd * 2.0;
            total += (1.0 / 6.0) * (x_check * after_check + x_bet * after_bet);
        }
    }
    total
}

/// Expected payoffs (to player 1, to player 2) in Leduc by recursive play of
/// the betting rules; the two must negate each other.
pub fn leduc_game_values(
    game: &GameInstance,
    ranks: usize,
    x: &BehavioralStrategy,
    y: &BehavioralStrategy,
) -> (f64, f64) {
    // actions available at a betting prefix, in index order
    fn acts(prefix: &str) -> &'static [char] {
        match prefix {
            "" | "k" => &['k', 'b'],
            "b" | "kb" => &['f', 'c', 'b'],
            "bb" | "kbb" => &['f', 'c'],
            _ => unreachable!(),
        }
    }
    fn to_act(prefix: &str) -> usize {
        match prefix {
            "" | "kb" | "bb" => 0,
            _ => 1,
        }
    }
    fn round_complete(prefix: &str) -> bool {
        prefix == "kk" || prefix.ends_with('c')
    }

    struct Ctx<'c> {
        game: &'c GameInstance,
        map_x: alloc::collections::BTreeMap<&'c str, usize>,
        map_y: alloc::collections::BTreeMap<&'c str, usize>,
        x: &'c BehavioralStrategy,
        y: &'c BehavioralStrategy,
        ranks: usize,
    }

    struct Deal {
        c1: usize,
        c2: usize,
        public: Option<usize>,
    }

    fn settle(out: &mut [f64; 2], prob: f64, winner: usize, amount: f64) {
        out[winner] += prob * amount;
        out[1 - winner] -= prob * amount;
    }

    // Walks one betting round. `carried` holds each player's total committed
    // chips from antes and earlier rounds; `round_chips` the current round.
    #[allow(clippy::too_many_arguments)]
    fn walk(
        ctx: &Ctx,
        deal: &Deal,
        round1_line: &str,
        prefix: &str,
        carried: [f64; 2],
        round_chips: [f64; 2],
        bets: u64,
        prob: f64,
        out: &mut [f64; 2],
    ) {
        if let Some(stripped) = prefix.strip_suffix('f') {
            let folder = to_act(stripped);
            let lost = carried[folder] + round_chips[folder];
            settle(out, prob, 1 - folder, lost);
            return;
        }
        if round_complete(prefix) {
            let carried = [carried[0] + round_chips[0], carried[1] + round_chips[1]];
            match deal.public {
                None => {
                    // deal the public card: two copies per rank, minus those held
                    for p in 0..ctx.ranks {
                        let copies =
                            2 - usize::from(p == deal.c1) - usize::from(p == deal.c2);
                        if copies == 0 {
                            continue;
                        }
                        let p_chance = copies as f64 / (2 * ctx.ranks - 2) as f64;
                        let next = Deal { c1: deal.c1, c2: deal.c2, public: Some(p) };
                        walk(
                            ctx,
                            &next,
                            prefix,
                            "",
                            carried,
                            [0.0, 0.0],
                            0,
                            prob * p_chance,
                            out,
                        );
                    }
                }
                Some(p) => {
                    let sign = if deal.c1 == p {
                        1
                    } else if deal.c2 == p {
                        -1
                    } else if deal.c1 > deal.c2 {
                        1
                    } else if deal.c1 < deal.c2 {
                        -1
                    } else {
                        0
                    };
                    match sign {
                        1 => settle(out, prob, 0, carried[1]),
                        -1 => settle(out, prob, 1, carried[0]),
                        _ => {}
                    }
                }
            }
            return;
        }

        let player = to_act(prefix);
        let round = usize::from(deal.public.is_some());
        let size = if round == 0 { 1.0 } else { 2.0 };
        let own_card = if player == 0 { deal.c1 } else { deal.c2 };
        let key = match deal.public {
            None => alloc::format!("{own_card}|{prefix}"),
            Some(p) => alloc::format!("{own_card}|{round1_line}|{p}|{prefix}"),
        };
        let (tp, strategy, point) = if player == 0 {
            (&ctx.game.treeplex_x, ctx.x, ctx.map_x[key.as_str()])
        } else {
            (&ctx.game.treeplex_y, ctx.y, ctx.map_y[key.as_str()])
        };
        for (ai, &ch) in acts(prefix).iter().enumerate() {
            let p_action = behavioral_prob(tp, strategy, point, ai);
            if p_action == 0.0 {
                continue;
            }
            let mut next_round_chips = round_chips;
            let mut next_bets = bets;
            match ch {
                'b' => {
                    next_bets += 1;
                    next_round_chips[player] = next_bets as f64 * size;
                }
                'c' => {
                    next_round_chips[player] = bets as f64 * size;
                }
                _ => {}
            }
            let next_prefix = alloc::format!("{prefix}{ch}");
            walk(
                ctx,
                deal,
                round1_line,
                &next_prefix,
                carried,
                next_round_chips,
                next_bets,
                prob * p_action,
                out,
            );
        }
    }

    let ctx = Ctx { game, map_x: game.key_map_x(), map_y: game.key_map_y(), x, y, ranks };
    let deck = 2 * ranks;
    let mut out = [0.0, 0.0];
    for c1 in 0..ranks {
        for c2 in 0..ranks {
            let copies2 = 2 - usize::from(c1 == c2);
            let p_deal = (2.0 / deck as f64) * (copies2 as f64 / (deck - 1) as f64);
            if copies2 == 0 {
                continue;
            }
            let deal = Deal { c1, c2, public: None };
            walk(&ctx, &deal, "", "", [1.0, 1.0], [0.0, 0.0], 0, p_deal, &mut out);
        }
    }
    (out[0], out[1])
}

/// Expected payoff to player 1 in Goofspiel by enumerating prize orders and
/// walking both players' bid distributions.
pub fn goofspiel_game_value(
    game: &GameInstance,
    n: usize,
    x: &BehavioralStrategy,
    y: &BehavioralStrategy,
) -> f64 {
    let map_x = game.key_map_x();
    let map_y = game.key_map_y();

    fn key(prizes: &[u8], own: &[u8], opp: &[u8]) -> String {
        let part = |v: &[u8]| {
            v.iter().map(|c| alloc::format!("{c}")).collect::<Vec<_>>().join("")
        };
        alloc::format!("{}|{}|{}", part(prizes), part(own), part(opp))
    }

    fn remaining(n: usize, used: &[u8]) -> Vec<u8> {
        (0..n as u8).filter(|c| !used.contains(c)).collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        game: &GameInstance,
        map_x: &alloc::collections::BTreeMap<&str, usize>,
        map_y: &alloc::collections::BTreeMap<&str, usize>,
        x: &BehavioralStrategy,
        y: &BehavioralStrategy,
        n: usize,
        order: &[u8],
        k: usize,
        bids_x: &mut Vec<u8>,
        bids_y: &mut Vec<u8>,
        prob: f64,
        diff_so_far: f64,
    ) -> f64 {
        if k == n {
            return prob * diff_so_far;
        }
        let hand_x = remaining(n, bids_x);
        let hand_y = remaining(n, bids_y);
        let prize = (order[k] + 1) as f64;
        let mut total = 0.0;
        if k == n - 1 {
            // forced last cards
            let (bx, by) = (hand_x[0], hand_y[0]);
            let d = if bx > by {
                prize
            } else if bx < by {
                -prize
            } else {
                0.0
            };
            return prob * (diff_so_far + d);
        }
        let prizes_seen = &order[..=k];
        let key_x = key(prizes_seen, bids_x, bids_y);
        let key_y = key(prizes_seen, bids_y, bids_x);
        let px = map_x[key_x.as_str()];
        let py = map_y[key_y.as_str()];
        for (ai, &bx) in hand_x.iter().enumerate() {
            let prob_x = behavioral_prob(&game.treeplex_x, x, px, ai);
            if prob_x == 0.0 {
                continue;
            }
            for (bi, &by) in hand_y.iter().enumerate() {
                let prob_y = behavioral_prob(&game.treeplex_y, y, py, bi);
                if prob_y == 0.0 {
                    continue;
                }
                let d = if bx > by {
                    prize
                } else if bx < by {
                    -prize
                } else {
                    0.0
                };
                bids_x.push(bx);
                bids_y.push(by);
                total += rec(
                    game,
                    map_x,
                    map_y,
                    x,
                    y,
                    n,
                    order,
                    k + 1,
                    bids_x,
                    bids_y,
                    prob * prob_x * prob_y,
                    diff_so_far + d,
                );
                bids_x.pop();
                bids_y.pop();
            }
        }
        total
    }

    let orders = permutations(n);
    let chance = 1.0 / orders.len() as f64;
    let mut total = 0.0;
    for order in &orders {
        total += rec(
            game,
            &map_x,
            &map_y,
            x,
            y,
            n,
            order,
            0,
            &mut Vec::new(),
            &mut Vec::new(),
            chance,
            0.0,
        );
    }
    total
}

/// An analytic Kuhn equilibrium, parameterized by the jack bluffing
/// probability `bluff` in `[0, 1/3]`. Player 1 bets the jack with
/// probability `bluff` and the king with `3 * bluff`, never the queen, and
/// calls a raise with the queen with probability `bluff + 1/3`; player 2's
/// response is the unique equilibrium reply. The game value to player 1 is
/// -1/18 for every member of the family.
pub fn kuhn_equilibrium(
    game: &GameInstance,
    bluff: f64,
) -> (BehavioralStrategy, BehavioralStrategy) {
    let tx = &game.treeplex_x;
    let ty = &game.treeplex_y;
    let mut x = tx.uniform_strategy();
    let mut y = ty.uniform_strategy();
    let map_x = game.key_map_x();
    let map_y = game.key_map_y();

    let mut set_x = |key: &str, probs: [f64; 2]| {
        let p = tx.point(map_x[key]);
        x.values[p.sequence(0)] = probs[0];
        x.values[p.sequence(1)] = probs[1];
    };
    set_x("J", [1.0 - bluff, bluff]);
    set_x("Q", [1.0, 0.0]);
    set_x("K", [1.0 - 3.0 * bluff, 3.0 * bluff]);
    set_x("J/kb", [1.0, 0.0]);
    set_x("Q/kb", [1.0 - (bluff + 1.0 / 3.0), bluff + 1.0 / 3.0]);
    set_x("K/kb", [0.0, 1.0]);

    let mut set_y = |key: &str, probs: [f64; 2]| {
        let p = ty.point(map_y[key]);
        y.values[p.sequence(0)] = probs[0];
        y.values[p.sequence(1)] = probs[1];
    };
    set_y("J/k", [2.0 / 3.0, 1.0 / 3.0]);
    set_y("Q/k", [1.0, 0.0]);
    set_y("K/k", [0.0, 1.0]);
    set_y("J/b", [1.0, 0.0]);
    set_y("Q/b", [2.0 / 3.0, 1.0 / 3.0]);
    set_y("K/b", [0.0, 1.0]);

    (x, y)
}
