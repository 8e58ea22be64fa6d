//! Leduc hold'em with a configurable number of ranks.
//!
//! Deck of `2 * ranks` cards (two copies per rank). Both players ante 1 and
//! receive a private card. Round one of betting (bet size 1, at most two
//! bets, player 1 first), then a public card, then round two (bet size 2,
//! same cap). A player pairing the public card wins the showdown; otherwise
//! the higher rank wins and equal ranks split the pot. Chance weights come
//! from dealing the three cards sequentially without replacement.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{GameError, GameInstance, SparsePayoffBuilder};
use crate::treeplex::{build_treeplex, DomainKind, PointDesc, Treeplex};

/// Betting-round histories: `k` check, `b` bet or raise, `c` call, `f` fold.
/// Every round plays out as one of these nine lines.
pub const LINES: [&str; 9] =
    ["kk", "kbf", "kbc", "kbbf", "kbbc", "bf", "bc", "bbf", "bbc"];

/// Lines that do not end in a fold (the round completes).
pub const CONTINUING: [&str; 5] = ["kk", "kbc", "kbbc", "bc", "bbc"];

/// Decision states (history prefixes) where each player acts.
pub const P1_STATES: [&str; 3] = ["", "kb", "bb"];
pub const P2_STATES: [&str; 3] = ["k", "b", "kbb"];

/// Which player acts at a history prefix: 0 for player 1, 1 for player 2.
pub fn actor(prefix: &str) -> usize {
    match prefix {
        "" | "kb" | "bb" => 0,
        "k" | "b" | "kbb" => 1,
        _ => unreachable!("not a decision prefix"),
    }
}

/// Legal action characters at a history prefix, in action-index order.
pub fn actions(prefix: &str) -> &'static [char] {
    match prefix {
        "" | "k" => &['k', 'b'],
        "b" | "kb" => &['f', 'c', 'b'],
        "bb" | "kbb" => &['f', 'c'],
        _ => unreachable!("not a decision prefix"),
    }
}

pub fn action_index(prefix: &str, ch: char) -> usize {
    actions(prefix).iter().position(|&a| a == ch).expect("legal action")
}

/// Chips a line adds for each player, in units of the round's bet size.
pub fn line_units(line: &str) -> (u64, u64) {
    match line {
        "kk" => (0, 0),
        "kbf" => (0, 1),
        "kbc" => (1, 1),
        "kbbf" => (2, 1),
        "kbbc" => (2, 2),
        "bf" => (1, 0),
        "bc" => (1, 1),
        "bbf" => (1, 2),
        "bbc" => (2, 2),
        _ => unreachable!("unknown line"),
    }
}

/// The player who folds on a line, if any.
pub fn line_folder(line: &str) -> Option<usize> {
    if !line.ends_with('f') {
        return None;
    }
    Some(actor(&line[..line.len() - 1]))
}

/// `(prefix, action char)` of each player's last move on a line.
pub fn last_moves(line: &str) -> [Option<(&str, char)>; 2] {
    let mut last = [None, None];
    for (i, ch) in line.char_indices() {
        let prefix = &line[..i];
        last[actor(prefix)] = Some((prefix, ch));
    }
    last
}

fn r1_key(rank: usize, state: &str) -> String {
    format!("{rank}|{state}")
}

fn r2_key(rank: usize, line: &str, public: usize, state: &str) -> String {
    format!("{rank}|{line}|{public}|{state}")
}

struct PlayerPlan {
    keys: Vec<String>,
    index: alloc::collections::BTreeMap<String, usize>,
}

impl PlayerPlan {
    fn new(ranks: usize, states: &[&str; 3]) -> Self {
        let mut keys = vec![String::new()]; // dummy root
        for rank in 0..ranks {
            for state in states {
                keys.push(r1_key(rank, state));
            }
        }
        for rank in 0..ranks {
            for line in CONTINUING {
                for public in 0..ranks {
                    for state in states {
                        keys.push(r2_key(rank, line, public, state));
                    }
                }
            }
        }
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        PlayerPlan { keys, index }
    }

    fn id(&self, key: &str) -> usize {
        self.index[key]
    }
}

fn build_p1_treeplex(ranks: usize) -> (Treeplex, Vec<String>) {
    let plan = PlayerPlan::new(ranks, &P1_STATES);
    let mut descs: Vec<PointDesc> = Vec::with_capacity(plan.keys.len());
    // index 0 after build: root with one action leading to every start point
    descs.push(PointDesc {
        action_count: 1,
        domain: DomainKind::FullSimplex,
        children: vec![(0..ranks).map(|rank| plan.id(&r1_key(rank, ""))).collect()],
    });
    for rank in 0..ranks {
        for state in P1_STATES {
            let acts = actions(state);
            let mut children: Vec<Vec<usize>> = vec![Vec::new(); acts.len()];
            for (ai, &ch) in acts.iter().enumerate() {
                match (state, ch) {
                    ("", 'k') => {
                        children[ai].push(plan.id(&r1_key(rank, "kb")));
                        for p in 0..ranks {
                            children[ai].push(plan.id(&r2_key(rank, "kk", p, "")));
                        }
                    }
                    ("", 'b') => {
                        children[ai].push(plan.id(&r1_key(rank, "bb")));
                        for p in 0..ranks {
                            children[ai].push(plan.id(&r2_key(rank, "bc", p, "")));
                        }
                    }
                    ("kb", 'c') => {
                        for p in 0..ranks {
                            children[ai].push(plan.id(&r2_key(rank, "kbc", p, "")));
                        }
                    }
                    ("kb", 'b') => {
                        for p in 0..ranks {
                            children[ai].push(plan.id(&r2_key(rank, "kbbc", p, "")));
                        }
                    }
                    ("bb", 'c') => {
                        for p in 0..ranks {
                            children[ai].push(plan.id(&r2_key(rank, "bbc", p, "")));
                        }
                    }
                    _ => {} // folds end the hand
                }
            }
            descs.push(PointDesc {
                action_count: acts.len(),
                domain: DomainKind::FullSimplex,
                children,
            });
        }
    }
    for rank in 0..ranks {
        for line in CONTINUING {
            for public in 0..ranks {
                for state in P1_STATES {
                    let acts = actions(state);
                    let mut children: Vec<Vec<usize>> = vec![Vec::new(); acts.len()];
                    for (ai, &ch) in acts.iter().enumerate() {
                        match (state, ch) {
                            ("", 'k') => {
                                children[ai].push(plan.id(&r2_key(rank, line, public, "kb")))
                            }
                            ("", 'b') => {
                                children[ai].push(plan.id(&r2_key(rank, line, public, "bb")))
                            }
                            _ => {} // round-two responses all end the hand
                        }
                    }
                    descs.push(PointDesc {
                        action_count: acts.len(),
                        domain: DomainKind::FullSimplex,
                        children,
                    });
                }
            }
        }
    }
    let tp = build_treeplex(&descs).expect("leduc p1 description is a tree");
    (tp, plan.keys)
}

fn build_p2_treeplex(ranks: usize) -> (Treeplex, Vec<String>) {
    let plan = PlayerPlan::new(ranks, &P2_STATES);
    let mut descs: Vec<PointDesc> = Vec::with_capacity(plan.keys.len());
    let mut root_children = Vec::new();
    for rank in 0..ranks {
        root_children.push(plan.id(&r1_key(rank, "k")));
        root_children.push(plan.id(&r1_key(rank, "b")));
    }
    descs.push(PointDesc {
        action_count: 1,
        domain: DomainKind::FullSimplex,
        children: vec![root_children],
    });
    // Player 2's next decision after a completed round is at round-two state
    // "k" or "b" depending on player 1's first round-two action.
    let r2_entries = |plan: &PlayerPlan, rank: usize, line: &str| -> Vec<usize> {
        let mut v = Vec::new();
        for p in 0..ranks {
            v.push(plan.id(&r2_key(rank, line, p, "k")));
            v.push(plan.id(&r2_key(rank, line, p, "b")));
        }
        v
    };
    for rank in 0..ranks {
        for state in P2_STATES {
            let acts = actions(state);
            let mut children: Vec<Vec<usize>> = vec![Vec::new(); acts.len()];
            for (ai, &ch) in acts.iter().enumerate() {
                match (state, ch) {
                    ("k", 'k') => children[ai] = r2_entries(&plan, rank, "kk"),
                    ("k", 'b') => {
                        children[ai].push(plan.id(&r1_key(rank, "kbb")));
                        children[ai].extend(r2_entries(&plan, rank, "kbc"));
                    }
                    ("b", 'c') => children[ai] = r2_entries(&plan, rank, "bc"),
                    ("b", 'b') => children[ai] = r2_entries(&plan, rank, "bbc"),
                    ("kbb", 'c') => children[ai] = r2_entries(&plan, rank, "kbbc"),
                    _ => {}
                }
            }
            descs.push(PointDesc {
                action_count: acts.len(),
                domain: DomainKind::FullSimplex,
                children,
            });
        }
    }
    for rank in 0..ranks {
        for line in CONTINUING {
            for public in 0..ranks {
                for state in P2_STATES {
                    let acts = actions(state);
                    let mut children: Vec<Vec<usize>> = vec![Vec::new(); acts.len()];
                    for (ai, &ch) in acts.iter().enumerate() {
                        if state == "k" && ch == 'b' {
                            children[ai].push(plan.id(&r2_key(rank, line, public, "kbb")));
                        }
                    }
                    descs.push(PointDesc {
                        action_count: acts.len(),
                        domain: DomainKind::FullSimplex,
                        children,
                    });
                }
            }
        }
    }
    let tp = build_treeplex(&descs).expect("leduc p2 description is a tree");
    (tp, plan.keys)
}

/// Number of distinguishable orderings of dealing `(c1, c2, public)` from a
/// two-copies-per-rank deck; zero when impossible.
pub fn deal_ways(c1: usize, c2: usize, public: usize) -> u64 {
    let mut remaining = [2i64; 16];
    let mut ways = 1i64;
    for &card in &[c1, c2, public] {
        ways *= remaining[card];
        remaining[card] -= 1;
        if ways <= 0 {
            return 0;
        }
    }
    ways as u64
}

/// Showdown result from player 1's perspective: +1 win, -1 loss, 0 split.
pub fn showdown_sign(c1: usize, c2: usize, public: usize) -> i64 {
    match (c1 == public, c2 == public) {
        (true, false) => 1,
        (false, true) => -1,
        (true, true) => 0, // impossible with two copies, kept total
        (false, false) => {
            if c1 > c2 {
                1
            } else if c1 < c2 {
                -1
            } else {
                0
            }
        }
    }
}

/// Builds a Leduc instance with `ranks >= 2` ranks (5 reproduces Leduc 5).
pub fn build_leduc(ranks: usize) -> Result<GameInstance, GameError> {
    if !(2..=9).contains(&ranks) {
        return Err(GameError::InvalidParameter);
    }
    let (tx, keys_x) = build_p1_treeplex(ranks);
    let (ty, keys_y) = build_p2_treeplex(ranks);
    let plan_x = PlayerPlan::new(ranks, &P1_STATES);
    let plan_y = PlayerPlan::new(ranks, &P2_STATES);

    let deck = 2 * ranks as u64;
    let total_orderings = (deck * (deck - 1) * (deck - 2)) as f64;

    let mut a = SparsePayoffBuilder::new();
    let mut add_terminal = |p1_seq: usize, p2_seq: usize, weight: f64, payoff_to_p1: f64| {
        a.add(p1_seq, p2_seq, weight * -payoff_to_p1);
    };

    let seq_of = |tp: &Treeplex, plan: &PlayerPlan, key: &str, state: &str, ch: char| -> usize {
        tp.point(plan.id(key)).sequence(action_index(state, ch))
    };

    for c1 in 0..ranks {
        for c2 in 0..ranks {
            for public in 0..ranks {
                let ways = deal_ways(c1, c2, public);
                if ways == 0 {
                    continue;
                }
                let weight = ways as f64 / total_orderings;
                for l1 in LINES {
                    let (u1, u2) = line_units(l1);
                    let (contrib1, contrib2) = (1 + u1, 1 + u2); // antes plus round 1
                    let last1 = last_moves(l1);
                    if let Some(folder) = line_folder(l1) {
                        let payoff = if folder == 0 { -(contrib1 as f64) } else { contrib2 as f64 };
                        let (s1, ch1) = last1[0].expect("p1 acts in round one");
                        let (s2, ch2) = last1[1].expect("p2 acts in round one");
                        let p1_seq = seq_of(&tx, &plan_x, &r1_key(c1, s1), s1, ch1);
                        let p2_seq = seq_of(&ty, &plan_y, &r1_key(c2, s2), s2, ch2);
                        add_terminal(p1_seq, p2_seq, weight, payoff);
                        continue;
                    }
                    for l2 in LINES {
                        let (v1, v2) = line_units(l2);
                        let (t1, t2) = (contrib1 + 2 * v1, contrib2 + 2 * v2);
                        let payoff = match line_folder(l2) {
                            Some(0) => -(t1 as f64),
                            Some(_) => t2 as f64,
                            None => {
                                let sign = showdown_sign(c1, c2, public);
                                // winner takes the loser's contribution
                                match sign {
                                    1 => t2 as f64,
                                    -1 => -(t1 as f64),
                                    _ => 0.0,
                                }
                            }
                        };
                        let last2 = last_moves(l2);
                        let (s1, ch1) = last2[0].expect("p1 acts in round two");
                        let (s2, ch2) = last2[1].expect("p2 acts in round two");
                        let p1_seq =
                            seq_of(&tx, &plan_x, &r2_key(c1, l1, public, s1), s1, ch1);
                        let p2_seq =
                            seq_of(&ty, &plan_y, &r2_key(c2, l1, public, s2), s2, ch2);
                        add_terminal(p1_seq, p2_seq, weight, payoff);
                    }
                }
            }
        }
    }

    let payoff = a.build(tx.num_sequences(), ty.num_sequences());
    Ok(GameInstance {
        name: format!("leduc{ranks}"),
        treeplex_x: tx,
        treeplex_y: ty,
        payoff,
        regularizer_x: None,
        regularizer_y: None,
        keys_x,
        keys_y,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_rank_count() {
        assert_eq!(build_leduc(1).unwrap_err(), GameError::InvalidParameter);
    }

    #[test]
    fn leduc5_dimensions() {
        let g = build_leduc(5).unwrap();
        // 1 root + 5 ranks * 3 round-one states + 5 * 5 lines * 5 publics * 3
        assert_eq!(g.treeplex_x.num_points(), 1 + 15 + 375);
        assert_eq!(g.treeplex_y.num_points(), 1 + 15 + 375);
        // root + per-rank (2+3+2) + per (rank,line,public) (2+3+2)
        assert_eq!(g.treeplex_x.num_sequences(), 1 + 5 * 7 + 125 * 7);
    }

    #[test]
    fn deal_ways_counts_card_instances() {
        // ranks = 2: total ordered deals = 4 * 3 * 2 = 24
        let mut total = 0;
        for c1 in 0..2 {
            for c2 in 0..2 {
                for p in 0..2 {
                    total += deal_ways(c1, c2, p);
                }
            }
        }
        assert_eq!(total, 24);
        assert_eq!(deal_ways(0, 0, 0), 0); // only two copies exist
        assert_eq!(deal_ways(0, 0, 1), 2 * 1 * 2);
    }

    #[test]
    fn aggressive_p1_vs_folding_p2_wins_ante() {
        let g = build_leduc(2).unwrap();
        // P1: bet at every opportunity; P2: fold facing any bet. Only round
        // one is ever reached: P1 bets, P2 folds, P1 nets the ante.
        let bet_all: Vec<usize> = g
            .treeplex_x
            .points()
            .map(|p| if p.action_count == 1 { 0 } else { p.action_count - 1 })
            .collect();
        let fold_all: Vec<usize> = g.treeplex_y.points().map(|_| 0).collect();
        let x = g.treeplex_x.pure_strategy(&bet_all);
        let y = g.treeplex_y.pure_strategy(&fold_all);
        let mux = g.treeplex_x.to_sequence_form(&x);
        let muy = g.treeplex_y.to_sequence_form(&y);
        assert!((g.payoff_to_x(&mux.values, &muy.values) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn passive_p1_vs_raising_p2_loses_ante() {
        let g = build_leduc(2).unwrap();
        // P1: check then fold facing a bet; P2: bet whenever checked to.
        let check_fold: Vec<usize> = g.treeplex_x.points().map(|_| 0).collect();
        let raise_when_checked: Vec<usize> = g
            .treeplex_y
            .points()
            .enumerate()
            .map(|(j, p)| {
                let key = &g.keys_y[j];
                let state = key.rsplit('|').next().unwrap_or("");
                if state == "k" && p.action_count == 2 {
                    1 // bet after a check
                } else {
                    0
                }
            })
            .collect();
        let x = g.treeplex_x.pure_strategy(&check_fold);
        let y = g.treeplex_y.pure_strategy(&raise_when_checked);
        let mux = g.treeplex_x.to_sequence_form(&x);
        let muy = g.treeplex_y.to_sequence_form(&y);
        assert!((g.payoff_to_x(&mux.values, &muy.values) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_checkdown_is_fair() {
        // Both players check everything: value 0 by symmetry of the deal.
        let g = build_leduc(3).unwrap();
        let check_x: Vec<usize> = g
            .treeplex_x
            .points()
            .map(|p| if p.action_count == 3 { 1 } else { 0 }) // call when facing a bet
            .collect();
        let check_y: Vec<usize> = g
            .treeplex_y
            .points()
            .map(|p| if p.action_count == 3 { 1 } else { 0 })
            .collect();
        let x = g.treeplex_x.pure_strategy(&check_x);
        let y = g.treeplex_y.pure_strategy(&check_y);
        let mux = g.treeplex_x.to_sequence_form(&x);
        let muy = g.treeplex_y.to_sequence_form(&y);
        assert!(g.payoff_to_x(&mux.values, &muy.values).abs() < 1e-12);
    }
}
