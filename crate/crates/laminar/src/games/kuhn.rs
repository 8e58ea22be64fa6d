//! Kuhn poker: three-card deck (jack, queen, king), one ante each, a single
//! betting round with one bet size.
//!
//! Player 1 checks or bets 1. After a check, player 2 checks (showdown) or
//! raises 1, and player 1 then folds or calls. After a bet, player 2 folds
//! or calls. Showdowns go to the higher card. The six deals are equally
//! likely and their 1/6 weights are folded into the payoff entries.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{GameInstance, SparsePayoffBuilder};
use crate::treeplex::{build_treeplex, DomainKind, PointDesc};

const CARDS: [&str; 3] = ["J", "Q", "K"];

/// Player 1's treeplex: a start point, one check/bet point per card, and one
/// fold/call point per card for the check-raise continuation.
fn treeplex_p1() -> (crate::treeplex::Treeplex, Vec<String>) {
    // 0: start; 1..=3: first action per card; 4..=6: facing a raise.
    let mut descs = Vec::new();
    descs.push(PointDesc {
        action_count: 1,
        domain: DomainKind::FullSimplex,
        children: vec![vec![1, 2, 3]],
    });
    for card in 0..3 {
        // action 0 = check (leads to the facing-raise point), action 1 = bet.
        descs.push(PointDesc::with_children(2, vec![vec![4 + card], vec![]]));
    }
    for _ in 0..3 {
        // action 0 = fold, action 1 = call.
        descs.push(PointDesc::leaf(2));
    }
    let tp = build_treeplex(&descs).expect("static Kuhn description");
    let mut keys = vec![String::new()];
    for c in CARDS {
        keys.push(String::from(c));
    }
    for c in CARDS {
        keys.push(format!("{c}/kb"));
    }
    (tp, keys)
}

/// Player 2's treeplex: one check/raise point per card after a check, one
/// fold/call point per card after a bet, under a dummy root.
fn treeplex_p2() -> (crate::treeplex::Treeplex, Vec<String>) {
    let mut descs = Vec::new();
    descs.push(PointDesc {
        action_count: 1,
        domain: DomainKind::FullSimplex,
        children: vec![(1..=6).collect()],
    });
    for _ in 0..3 {
        // after P1 checks: action 0 = check, action 1 = raise.
        descs.push(PointDesc::leaf(2));
    }
    for _ in 0..3 {
        // after P1 bets: action 0 = fold, action 1 = call.
        descs.push(PointDesc::leaf(2));
    }
    let tp = build_treeplex(&descs).expect("static Kuhn description");
    let mut keys = vec![String::new()];
    for c in CARDS {
        keys.push(format!("{c}/k"));
    }
    for c in CARDS {
        keys.push(format!("{c}/b"));
    }
    (tp, keys)
}

/// Builds the Kuhn poker instance (no regularizers).
pub fn build_kuhn() -> GameInstance {
    let (tx, keys_x) = treeplex_p1();
    let (ty, keys_y) = treeplex_p2();

    let mut a = SparsePayoffBuilder::new();
    let w = 1.0 / 6.0;
    for c1 in 0..3usize {
        for c2 in 0..3usize {
            if c1 == c2 {
                continue;
            }
            let sign = if c1 > c2 { 1.0 } else { -1.0 };
            // sequence ids (layout pinned by the constructors above)
            let p1_check = tx.point(1 + c1).sequence(0);
            let p1_bet = tx.point(1 + c1).sequence(1);
            let p1_fold = tx.point(4 + c1).sequence(0);
            let p1_call = tx.point(4 + c1).sequence(1);
            let p2_check = ty.point(1 + c2).sequence(0);
            let p2_raise = ty.point(1 + c2).sequence(1);
            let p2_fold = ty.point(4 + c2).sequence(0);
            let p2_call = ty.point(4 + c2).sequence(1);

            // entries store the loss to player 1
            a.add(p1_check, p2_check, w * -(sign * 1.0));
            a.add(p1_fold, p2_raise, w * 1.0);
            a.add(p1_call, p2_raise, w * -(sign * 2.0));
            a.add(p1_bet, p2_fold, w * -1.0);
            a.add(p1_bet, p2_call, w * -(sign * 2.0));
        }
    }

    let payoff = a.build(tx.num_sequences(), ty.num_sequences());
    GameInstance {
        name: String::from("kuhn"),
        treeplex_x: tx,
        treeplex_y: ty,
        payoff,
        regularizer_x: None,
        regularizer_y: None,
        keys_x,
        keys_y,
    }
}
