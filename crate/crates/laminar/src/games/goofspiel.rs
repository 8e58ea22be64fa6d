//! Goofspiel with `n` cards: each player holds cards `1..=n`, a shuffled
//! prize stack reveals one card per turn, both players bid a private card
//! simultaneously, the higher bid takes the prize and ties split it evenly.
//! Bids are revealed after each turn, so a decision point is identified by
//! the prize prefix plus both players' past bids. The final turn is forced
//! (one card left) and is not a decision point.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{permutations, GameError, GameInstance, SparsePayoffBuilder};
use crate::treeplex::{build_treeplex, DomainKind, PointDesc, Treeplex};

/// Decision-point identity: prizes seen so far, own past bids, opponent past
/// bids (cards as 0-based values; prize k is worth `k + 1`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct State {
    prizes: Vec<u8>,
    own: Vec<u8>,
    opp: Vec<u8>,
}

impl State {
    fn key(&self) -> String {
        let part = |v: &[u8]| {
            v.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join("")
        };
        format!("{}|{}|{}", part(&self.prizes), part(&self.own), part(&self.opp))
    }

    /// Own remaining cards in ascending order; the action list.
    fn remaining_own(&self, n: usize) -> Vec<u8> {
        (0..n as u8).filter(|c| !self.own.contains(c)).collect()
    }

    fn remaining_opp(&self, n: usize) -> Vec<u8> {
        (0..n as u8).filter(|c| !self.opp.contains(c)).collect()
    }

    fn remaining_prizes(&self, n: usize) -> Vec<u8> {
        (0..n as u8).filter(|c| !self.prizes.contains(c)).collect()
    }
}

/// Position of `card` among the remaining hand, i.e. its action index.
fn action_index(state: &State, n: usize, card: u8) -> usize {
    state
        .remaining_own(n)
        .iter()
        .position(|&c| c == card)
        .expect("card still in hand")
}

/// Both players share the same decision structure.
fn build_player_treeplex(n: usize) -> (Treeplex, Vec<String>, BTreeMap<String, usize>) {
    // Enumerate decision states turn by turn (turns 1..n-1 are decisions).
    let mut by_turn: Vec<Vec<State>> = Vec::new();
    let mut first: Vec<State> = Vec::new();
    for prize in 0..n as u8 {
        first.push(State { prizes: vec![prize], own: vec![], opp: vec![] });
    }
    by_turn.push(first);
    for turn in 1..n - 1 {
        let mut next = Vec::new();
        for s in &by_turn[turn - 1] {
            for &bid in &s.remaining_own(n) {
                for &opp_bid in &s.remaining_opp(n) {
                    for &prize in &s.remaining_prizes(n) {
                        let mut t = s.clone();
                        t.prizes.push(prize);
                        t.own.push(bid);
                        t.opp.push(opp_bid);
                        next.push(t);
                    }
                }
            }
        }
        by_turn.push(next);
    }

    let mut keys = vec![String::new()]; // dummy root
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut states_flat: Vec<State> = Vec::new();
    for turn_states in &by_turn {
        for s in turn_states {
            let id = keys.len();
            index.insert(s.key(), id);
            keys.push(s.key());
            states_flat.push(s.clone());
        }
    }

    let mut descs: Vec<PointDesc> = Vec::with_capacity(keys.len());
    descs.push(PointDesc {
        action_count: 1,
        domain: DomainKind::FullSimplex,
        children: vec![by_turn[0].iter().map(|s| index[&s.key()]).collect()],
    });
    for s in &states_flat {
        let hand = s.remaining_own(n);
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); hand.len()];
        if s.prizes.len() < n - 1 {
            for (ai, &bid) in hand.iter().enumerate() {
                for &opp_bid in &s.remaining_opp(n) {
                    for &prize in &s.remaining_prizes(n) {
                        let mut t = s.clone();
                        t.prizes.push(prize);
                        t.own.push(bid);
                        t.opp.push(opp_bid);
                        children[ai].push(index[&t.key()]);
                    }
                }
            }
        }
        descs.push(PointDesc {
            action_count: hand.len(),
            domain: DomainKind::FullSimplex,
            children,
        });
    }
    let tp = build_treeplex(&descs).expect("goofspiel description is a tree");
    (tp, keys, index)
}

/// Builds Goofspiel with hands `1..=n`; `n` is kept small because the payoff
/// enumeration walks all `n!^3` order/bid combinations.
pub fn build_goofspiel(n: usize) -> Result<GameInstance, GameError> {
    if !(2..=5).contains(&n) {
        return Err(GameError::InvalidParameter);
    }
    let (tx, keys_x, index_x) = build_player_treeplex(n);
    let (ty, keys_y, index_y) = build_player_treeplex(n);

    let orders = permutations(n);
    let bid_seqs = permutations(n);
    let chance = 1.0 / orders.len() as f64;

    let mut a = SparsePayoffBuilder::new();
    for order in &orders {
        for bids_x in &bid_seqs {
            for bids_y in &bid_seqs {
                let mut diff = 0.0;
                for k in 0..n {
                    let value = (order[k] + 1) as f64;
                    if bids_x[k] > bids_y[k] {
                        diff += value;
                    } else if bids_x[k] < bids_y[k] {
                        diff -= value;
                    }
                }
                // last decision is at turn n-1 (0-based index n-2)
                let last = n - 2;
                let sx = State {
                    prizes: order[..=last].to_vec(),
                    own: bids_x[..last].to_vec(),
                    opp: bids_y[..last].to_vec(),
                };
                let sy = State {
                    prizes: order[..=last].to_vec(),
                    own: bids_y[..last].to_vec(),
                    opp: bids_x[..last].to_vec(),
                };
                let px = tx.point(index_x[&sx.key()]);
                let py = ty.point(index_y[&sy.key()]);
                let seq_x = px.sequence(action_index(&sx, n, bids_x[last]));
                let seq_y = py.sequence(action_index(&sy, n, bids_y[last]));
                a.add(seq_x, seq_y, chance * -diff);
            }
        }
    }

    let payoff = a.build(tx.num_sequences(), ty.num_sequences());
    Ok(GameInstance {
        name: format!("goofspiel{n}"),
        treeplex_x: tx,
        treeplex_y: ty,
        payoff,
        regularizer_x: None,
        regularizer_y: None,
        keys_x,
        keys_y,
    })
}
