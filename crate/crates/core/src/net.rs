//! Network state, node lifecycle, the cycle scheduler, and the sampling
//! service calls (`get_peer` / `get_hub`).

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ConfigError, ServiceError};
use crate::params::SimParams;
use crate::protocols::{self, FreqScratch, ProtocolKind, ProtocolState};
use crate::rng::{derive_stream, partial_shuffle, shuffle, StreamPurpose};

/// Opaque unique address of a peer. Ids are allocated consecutively and never
/// reused, so a stale cache entry always stays distinguishable from any node
/// created later.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u64);

impl NodeId {
    #[inline]
    pub(crate) fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The simulated overlay: per-node protocol state plus alive flags, indexed
/// by `NodeId`. Dead nodes keep their state so stale references behave like
/// they would in a real network.
#[derive(Debug, Clone)]
pub struct OverlayNetwork {
    pub(crate) params: SimParams,
    pub(crate) protocol: ProtocolKind,
    pub(crate) states: Vec<ProtocolState>,
    pub(crate) alive: Vec<bool>,
    pub(crate) alive_count: usize,
    pub(crate) cycle: u64,
    pub(crate) protocol_rng: ChaCha8Rng,
    pub(crate) scratch: FreqScratch,
}

impl OverlayNetwork {
    /// Builds the initial k-out random graph with `k = c`: every node's cache
    /// holds `c` distinct ids drawn uniformly from the other `n - 1` nodes.
    pub fn init_k_out(
        params: &SimParams,
        protocol: ProtocolKind,
        replication: u64,
    ) -> Result<Self, ConfigError> {
        params.validate()?;
        if params.n <= params.c {
            return Err(ConfigError::KOutSize {
                n: params.n,
                c: params.c,
            });
        }
        Ok(Self::bootstrap(params, protocol, replication, params.n))
    }

    /// Builds a k-out graph over `size` nodes with `k = min(c, size - 1)`.
    /// Used directly by growth scenarios that start below `c + 1` nodes.
    pub fn bootstrap(
        params: &SimParams,
        protocol: ProtocolKind,
        replication: u64,
        size: usize,
    ) -> Self {
        let mut init_rng = derive_stream(params.seed, replication, StreamPurpose::Init);
        let k = params.c.min(size.saturating_sub(1));
        let mut states = Vec::with_capacity(size);
        for i in 0..size {
            let mut candidates: Vec<NodeId> = (0..size as u64)
                .filter(|&j| j != i as u64)
                .map(NodeId)
                .collect();
            partial_shuffle(&mut candidates, k, &mut init_rng);
            candidates.truncate(k);
            states.push(ProtocolState::fresh(protocol, candidates));
        }
        OverlayNetwork {
            params: params.clone(),
            protocol,
            alive: vec![true; size],
            alive_count: size,
            cycle: 0,
            protocol_rng: derive_stream(params.seed, replication, StreamPurpose::Protocol),
            scratch: FreqScratch::default(),
            states,
        }
    }

    /// Builds a network from explicit per-node states (all alive). Mostly
    /// useful to set up hand-crafted instances.
    pub fn from_states(
        params: &SimParams,
        protocol: ProtocolKind,
        states: Vec<ProtocolState>,
    ) -> Self {
        let size = states.len();
        OverlayNetwork {
            params: params.clone(),
            protocol,
            alive: vec![true; size],
            alive_count: size,
            cycle: 0,
            protocol_rng: derive_stream(params.seed, 0, StreamPurpose::Protocol),
            scratch: FreqScratch::default(),
            states,
        }
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn protocol(&self) -> ProtocolKind {
        self.protocol
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn node_count(&self) -> usize {
        self.states.len()
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn is_alive(&self, id: NodeId) -> bool {
        self.alive.get(id.idx()).copied().unwrap_or(false)
    }

    /// Liveness probe: true iff the peer is currently alive. Ids that were
    /// never allocated are simply not responding.
    pub fn is_responding(&self, peer: NodeId) -> bool {
        self.is_alive(peer)
    }

    /// Alive node ids in ascending order.
    pub fn alive_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(i, _)| NodeId(i as u64))
    }

    pub fn state(&self, id: NodeId) -> &ProtocolState {
        &self.states[id.idx()]
    }

    pub fn state_mut(&mut self, id: NodeId) -> &mut ProtocolState {
        &mut self.states[id.idx()]
    }

    /// Allocates the next id for a fresh node. Ids strictly increase over the
    /// lifetime of a run.
    pub fn add_node(&mut self, state: ProtocolState) -> NodeId {
        let id = NodeId(self.states.len() as u64);
        self.states.push(state);
        self.alive.push(true);
        self.alive_count += 1;
        id
    }

    /// Removes a node from the alive set. Its state is retained so stale
    /// cache entries pointing at it remain distinguishable.
    pub fn kill(&mut self, id: NodeId) {
        let i = id.idx();
        if i < self.alive.len() && self.alive[i] {
            self.alive[i] = false;
            self.alive_count -= 1;
        }
    }

    /// Runs one cycle: every alive node executes one active round of the
    /// network's protocol, in a fresh uniformly random activation order.
    /// State updates are visible immediately to nodes activated later in the
    /// same cycle.
    pub fn step_cycle(&mut self) {
        let mut order: Vec<NodeId> = self.alive_ids().collect();
        shuffle(&mut order, &mut self.protocol_rng);
        for id in order {
            match self.protocol {
                ProtocolKind::Elevator => protocols::elevator::round(self, id),
                ProtocolKind::Proofs => protocols::proofs::round(self, id),
                ProtocolKind::Newscast => protocols::newscast::round(self, id),
                ProtocolKind::Phenix => protocols::phenix::round(self, id),
            }
        }
        self.cycle += 1;
    }

    /// Returns a uniformly random peer from the node's cache.
    pub fn get_peer<R: Rng + ?Sized>(
        &self,
        node: NodeId,
        rng: &mut R,
    ) -> Result<NodeId, ServiceError> {
        let st = self.service_state(node)?;
        let ids: Vec<NodeId> = st.cache_ids().collect();
        if ids.is_empty() {
            return Err(ServiceError::NoPeers(node));
        }
        Ok(ids[rng.gen_range(0..ids.len())])
    }

    /// Returns a uniformly random hub from the node's preferred cache slots.
    /// Only meaningful for the hub-sampling protocol; before the first round
    /// no hub is known.
    pub fn get_hub<R: Rng + ?Sized>(
        &self,
        node: NodeId,
        rng: &mut R,
    ) -> Result<NodeId, ServiceError> {
        let st = self.service_state(node)?;
        let ProtocolState::Elevator(el) = st else {
            return Err(ServiceError::NotHubSampling(node));
        };
        if el.hub_slots == 0 {
            return Err(ServiceError::NoHubsKnown(node));
        }
        let slots = &el.cache[..el.hub_slots.min(el.cache.len())];
        Ok(slots[rng.gen_range(0..slots.len())])
    }

    fn service_state(&self, node: NodeId) -> Result<&ProtocolState, ServiceError> {
        if node.idx() >= self.states.len() {
            return Err(ServiceError::UnknownNode(node));
        }
        if !self.alive[node.idx()] {
            return Err(ServiceError::DeadNode(node));
        }
        Ok(&self.states[node.idx()])
    }

    /// Snapshot of the protocol RNG, for lockstep reference executors in
    /// tests and for replay checks.
    pub fn protocol_rng_clone(&self) -> ChaCha8Rng {
        self.protocol_rng.clone()
    }

    /// Checks the cache invariants of every alive node: no self entry, no
    /// duplicates, length at most `c`. Returns the first violation.
    pub fn check_cache_invariants(&self) -> Result<(), String> {
        for id in self.alive_ids() {
            let ids: Vec<NodeId> = self.states[id.idx()].cache_ids().collect();
            if ids.len() > self.params.c {
                return Err(format!("node {id}: cache len {} > c", ids.len()));
            }
            let mut sorted = ids.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != ids.len() {
                return Err(format!("node {id}: duplicate cache entries"));
            }
            if ids.contains(&id) {
                return Err(format!("node {id}: cache contains self"));
            }
        }
        Ok(())
    }
}
