//! Hub-sampling rounds: preferential attachment toward the most frequent
//! 2-distance neighbors plus random attachment from backward lists.
//!
//! Draw order per round, all from the network protocol stream:
//! 1. prune backward list, then cache (no draws);
//! 2. one cache request per cache peer, in cache order (no draws) — each
//!    queried peer records the caller in its backward list;
//! 3. candidates ranked by descending frequency, ties by ascending id;
//! 4. one backward request per responding preferred peer, in rank order:
//!    `min(len, max_backward)` Fisher-Yates draws on the peer's backward
//!    list, its shuffled prefix is the response (non-responders are dropped
//!    from the preferred list);
//! 5. backward picks: incremental Fisher-Yates over the pooled responses,
//!    one draw per examined element, until `c - h` entries are accepted;
//! 6. top-up: one draw per examined candidate from the leftover frequency
//!    candidates until the cache is full or candidates run out.
//!
//! Self entries and duplicates are rejected at every insertion; rejected
//! candidates still consume their draw.

use rand::Rng;

use crate::net::{NodeId, OverlayNetwork};
use crate::protocols::{BackwardList, ProtocolState};
use crate::rng::partial_shuffle;

/// Per-node hub-sampling state. The first `hub_slots` cache positions hold
/// the preferential picks of the latest round; `get_hub` samples them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ElevatorState {
    pub cache: Vec<NodeId>,
    pub hub_slots: usize,
    pub backward: BackwardList,
}

impl ElevatorState {
    pub fn with_cache(cache: Vec<NodeId>) -> Self {
        ElevatorState {
            cache,
            hub_slots: 0,
            backward: BackwardList::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Request {
    Cache,
    Backward,
}

fn el_mut(states: &mut [ProtocolState], id: NodeId) -> &mut ElevatorState {
    match &mut states[id.idx()] {
        ProtocolState::Elevator(s) => s,
        other => panic!("node {id} is not an elevator node: {other:?}"),
    }
}

/// Background-thread handler: answers a request addressed to `node`.
pub fn handle(
    net: &mut OverlayNetwork,
    node: NodeId,
    request: Request,
    from: NodeId,
) -> Vec<NodeId> {
    match request {
        Request::Cache => {
            let st = el_mut(&mut net.states, node);
            let response = st.cache.clone();
            st.backward.insert(from);
            response
        }
        Request::Backward => {
            let mut out = Vec::new();
            backward_response_into(net, node, &mut out);
            out
        }
    }
}

/// Shuffles the target's backward list and appends a prefix of at most
/// `max_backward` entries to `out`. The requester is not recorded.
pub(crate) fn backward_response_into(net: &mut OverlayNetwork, node: NodeId, out: &mut Vec<NodeId>) {
    let cap = net.params.max_backward;
    let st = el_mut(&mut net.states, node);
    let k = st.backward.len().min(cap);
    partial_shuffle(st.backward.order_mut(), k, &mut net.protocol_rng);
    out.extend_from_slice(&st.backward.as_slice()[..k]);
}

/// One active round of the hub-sampling protocol for `node`.
pub fn round(net: &mut OverlayNetwork, node: NodeId) {
    let c = net.params.c;
    let h = net.params.h;

    // Prune non-responding peers from both lists.
    {
        let alive = &net.alive;
        let st = el_mut(&mut net.states, node);
        st.backward
            .retain(|id| alive.get(id.idx()).copied().unwrap_or(false));
        st.cache
            .retain(|id| alive.get(id.idx()).copied().unwrap_or(false));
    }

    // Query every cache peer for its cache and build the frequency map over
    // 2-distance neighbors. Each queried peer records us as a backward peer.
    let my_cache = el_mut(&mut net.states, node).cache.clone();
    {
        let (states, scratch) = (&mut net.states, &mut net.scratch);
        for &peer in &my_cache {
            let peer_st = el_mut(states, peer);
            peer_st.backward.insert(node);
            for &id in &peer_st.cache {
                if id != node {
                    scratch.bump(id);
                }
            }
        }
    }
    let ranked = net.scratch.drain_sorted();
    let take = ranked.len().min(c);
    let mut pool: Vec<NodeId> = ranked[take..].iter().map(|&(id, _)| id).collect();

    // Ask each preferred peer for its backward list. Peers that do not
    // respond lose their preferred slot.
    let mut preferred = Vec::with_capacity(take);
    let mut backward_pool: Vec<NodeId> = Vec::new();
    for &(peer, _) in &ranked[..take] {
        if !net.alive.get(peer.idx()).copied().unwrap_or(false) {
            continue;
        }
        backward_response_into(net, peer, &mut backward_pool);
        preferred.push(peer);
    }

    // New cache: h preferential slots, c-h random backward entries, then top
    // up from the leftover frequency candidates.
    let hub_slots = preferred.len().min(h);
    let mut cache = Vec::with_capacity(c);
    cache.extend_from_slice(&preferred[..hub_slots]);

    let want_backward = c - h;
    let mut accepted = 0;
    let pool_len = backward_pool.len();
    for i in 0..pool_len {
        if accepted == want_backward {
            break;
        }
        let j = net.protocol_rng.gen_range(i..pool_len);
        backward_pool.swap(i, j);
        let cand = backward_pool[i];
        if cand != node && !cache.contains(&cand) {
            cache.push(cand);
            accepted += 1;
        }
    }

    while cache.len() < c && !pool.is_empty() {
        let j = net.protocol_rng.gen_range(0..pool.len());
        let cand = pool.swap_remove(j);
        if cand != node && !cache.contains(&cand) {
            cache.push(cand);
        }
    }

    let st = el_mut(&mut net.states, node);
    st.cache = cache;
    st.hub_slots = hub_slots;
}
