//! Shuffle-based peer sampling: each round the node exchanges a random
//! subset of its cache with a partner drawn from that subset.
//!
//! Draw order per round: `min(l, cache_len)` Fisher-Yates draws to pick the
//! subset positions, one draw for the partner, then the partner's own
//! `min(l, cache_len)` selection draws. A non-responding partner aborts the
//! round with the selection draws already consumed and no state change.

use rand::Rng;

use crate::net::{NodeId, OverlayNetwork};
use crate::protocols::ProtocolState;
use crate::rng::partial_shuffle;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ProofsState {
    pub cache: Vec<NodeId>,
}

fn pr_mut(states: &mut [ProtocolState], id: NodeId) -> &mut ProofsState {
    match &mut states[id.idx()] {
        ProtocolState::Proofs(s) => s,
        other => panic!("node {id} is not a proofs node: {other:?}"),
    }
}

/// Picks `min(l, len)` distinct cache positions, ascending.
fn select_positions<R: Rng + ?Sized>(len: usize, l: usize, rng: &mut R) -> Vec<usize> {
    let k = l.min(len);
    let mut positions: Vec<usize> = (0..len).collect();
    partial_shuffle(&mut positions, k, rng);
    positions.truncate(k);
    positions.sort_unstable();
    positions
}

/// Installs received entries: own address and entries already present are
/// dropped, the rest fill empty cache slots first and then overwrite the
/// entries just sent (ascending position). Entries left over once every slot
/// is used are discarded.
pub(crate) fn install(
    state: &mut ProofsState,
    own: NodeId,
    capacity: usize,
    sent_positions: &[usize],
    received: &[NodeId],
) {
    let remainder: Vec<NodeId> = received
        .iter()
        .copied()
        .filter(|&x| x != own && !state.cache.contains(&x))
        .collect();
    let mut incoming = remainder.into_iter();
    while state.cache.len() < capacity {
        match incoming.next() {
            Some(x) => state.cache.push(x),
            None => return,
        }
    }
    for &pos in sent_positions {
        match incoming.next() {
            Some(x) => state.cache[pos] = x,
            None => return,
        }
    }
}

/// Partner-side exchange: replies with its own random subset, then installs
/// the received one.
pub fn handle(
    net: &mut OverlayNetwork,
    node: NodeId,
    _from: NodeId,
    received: &[NodeId],
) -> Vec<NodeId> {
    let l = net.params.l;
    let c = net.params.c;
    let st = pr_mut(&mut net.states, node);
    let positions = select_positions(st.cache.len(), l, &mut net.protocol_rng);
    let reply: Vec<NodeId> = positions.iter().map(|&i| st.cache[i]).collect();
    install(st, node, c, &positions, received);
    reply
}

/// One active round: shuffle with a partner drawn from the selected subset.
pub fn round(net: &mut OverlayNetwork, node: NodeId) {
    let l = net.params.l;
    let c = net.params.c;
    if l == 0 {
        return;
    }
    let (positions, subset) = {
        let st = pr_mut(&mut net.states, node);
        if st.cache.is_empty() {
            return;
        }
        let positions = select_positions(st.cache.len(), l, &mut net.protocol_rng);
        let subset: Vec<NodeId> = positions.iter().map(|&i| st.cache[i]).collect();
        (positions, subset)
    };
    let partner = subset[net.protocol_rng.gen_range(0..subset.len())];
    if !net.alive.get(partner.idx()).copied().unwrap_or(false) {
        return;
    }
    let mut sent: Vec<NodeId> = subset.iter().copied().filter(|&x| x != partner).collect();
    sent.push(node);
    let reply = handle(net, partner, node, &sent);
    install(pr_mut(&mut net.states, node), node, c, &positions, &reply);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u64]) -> Vec<NodeId> {
        v.iter().copied().map(NodeId).collect()
    }

    #[test]
    fn exchange_matches_the_worked_example() {
        // Initiator (node 1, cache {2,3,4,7}) selects {2,3,4}, partner 4,
        // sends {2,3,1}; partner (cache {5,6,8,3}) replies {5,6,8}.
        let c = 4;
        let mut initiator = ProofsState { cache: ids(&[2, 3, 4, 7]) };
        let mut partner = ProofsState { cache: ids(&[5, 6, 8, 3]) };

        // Partner drops 3 (already present), installs 2 and 1 over the
        // entries it sent, and keeps 8.
        install(&mut partner, NodeId(4), c, &[0, 1, 2], &ids(&[2, 3, 1]));
        assert_eq!(partner.cache, ids(&[2, 1, 8, 3]));

        // Initiator replaces the whole selected subset, keeping 7.
        install(&mut initiator, NodeId(1), c, &[0, 1, 2], &ids(&[5, 6, 8]));
        assert_eq!(initiator.cache, ids(&[5, 6, 8, 7]));
    }

    #[test]
    fn install_fills_empty_slots_first() {
        let mut st = ProofsState { cache: ids(&[9, 5]) };
        install(&mut st, NodeId(1), 4, &[1], &ids(&[7, 8, 6]));
        // 7 and 8 land in the empty slots, 6 overwrites position 1.
        assert_eq!(st.cache, ids(&[9, 6, 7, 8]));
    }

    #[test]
    fn install_drops_overflow() {
        let mut st = ProofsState { cache: ids(&[9, 5]) };
        install(&mut st, NodeId(1), 2, &[0], &ids(&[7, 8]));
        assert_eq!(st.cache, ids(&[7, 5]));
    }

    #[test]
    fn own_address_and_known_entries_are_not_installed() {
        let mut st = ProofsState { cache: ids(&[9, 5]) };
        install(&mut st, NodeId(1), 4, &[0, 1], &ids(&[1, 5, 9]));
        assert_eq!(st.cache, ids(&[9, 5]));
    }
}
