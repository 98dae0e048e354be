//! Join-time preferential attachment for growing networks.
//!
//! A node executes the active procedure once, when it enters the network:
//! it keeps direct links to half its bootstrap cache, asks the other half
//! for their neighbor lists, and connects to the `s` most frequent
//! 2-distance neighbors. Contacted peers answer a connection request with a
//! backward edge once per `gamma` requests. The per-cycle round only expires
//! old gamma-list entries; joins draw no protocol randomness.

use crate::net::{NodeId, OverlayNetwork};
use crate::protocols::{BackwardList, ProtocolState};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhenixState {
    /// Outgoing connections: random part first, preferred part appended at
    /// join time.
    pub cache: Vec<NodeId>,
    pub backward: BackwardList,
    /// Recently seen pingers with their insertion cycle; entries expire
    /// after `tau` cycles.
    pub gamma_list: Vec<(NodeId, u64)>,
    /// Connection-request counter; reset by `gamma` whenever a backward edge
    /// is created.
    pub c_m: u32,
}

impl PhenixState {
    pub fn with_cache(cache: Vec<NodeId>) -> Self {
        PhenixState {
            cache,
            ..PhenixState::default()
        }
    }
}

fn px_mut(states: &mut [ProtocolState], id: NodeId) -> &mut PhenixState {
    match &mut states[id.idx()] {
        ProtocolState::Phenix(s) => s,
        other => panic!("node {id} is not a phenix node: {other:?}"),
    }
}

/// Cache request: the queried node returns its cache and pings every
/// neighbor in it, which stamp the pinger into their gamma lists.
pub fn handle_cache_request(net: &mut OverlayNetwork, node: NodeId, _from: NodeId) -> Vec<NodeId> {
    let response = px_mut(&mut net.states, node).cache.clone();
    for &member in &response {
        if net.alive.get(member.idx()).copied().unwrap_or(false) {
            handle_ping(net, member, node);
        }
    }
    response
}

pub fn handle_ping(net: &mut OverlayNetwork, node: NodeId, from: NodeId) {
    let cycle = net.cycle;
    px_mut(&mut net.states, node).gamma_list.push((from, cycle));
}

/// Connection request: increments the counter and creates one backward edge
/// per `gamma` requests.
pub fn handle_connexion_request(net: &mut OverlayNetwork, node: NodeId, from: NodeId) {
    let gamma = net.params.gamma;
    let st = px_mut(&mut net.states, node);
    st.c_m += 1;
    if st.c_m >= gamma {
        st.backward.insert(from);
        st.c_m -= gamma;
    }
}

/// Join procedure, executed once when `joiner` enters with a bootstrap cache
/// of random existing peers.
pub fn join(net: &mut OverlayNetwork, joiner: NodeId) {
    let c = net.params.c;
    let s = net.params.s;

    let bootstrap = px_mut(&mut net.states, joiner).cache.clone();
    let split = bootstrap.len().min(c.div_ceil(2));
    let (random_part, friends) = bootstrap.split_at(split);
    px_mut(&mut net.states, joiner).cache = random_part.to_vec();

    for &friend in friends {
        if !net.alive.get(friend.idx()).copied().unwrap_or(false) {
            continue;
        }
        let neighbor_list = handle_cache_request(net, friend, joiner);
        for id in neighbor_list {
            if id != joiner {
                net.scratch.bump(id);
            }
        }
    }
    let ranked = net.scratch.drain_sorted();
    let preferred: Vec<NodeId> = ranked
        .iter()
        .take(s)
        .map(|&(id, _)| id)
        .collect();

    for &peer in &preferred {
        if net.alive.get(peer.idx()).copied().unwrap_or(false) {
            handle_connexion_request(net, peer, joiner);
        }
    }

    let st = px_mut(&mut net.states, joiner);
    for id in preferred {
        if id != joiner && !st.cache.contains(&id) {
            st.cache.push(id);
        }
    }
}

/// Per-cycle background maintenance: expire gamma-list entries older than
/// `tau` cycles. Phenix has no per-cycle active exchange.
pub fn round(net: &mut OverlayNetwork, node: NodeId) {
    let now = net.cycle;
    let tau = net.params.tau;
    px_mut(&mut net.states, node)
        .gamma_list
        .retain(|&(_, stamped)| now.saturating_sub(stamped) < tau);
}
