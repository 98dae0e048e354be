//! The four protocol round functions and their request handlers.
//!
//! All randomness is drawn from the network's single protocol stream, in the
//! order the round functions document. The reference interpreters in the test
//! suite replay the same draws against a cloned stream, so any change to draw
//! order is a behavioral change.

use std::collections::HashSet;
use std::str::FromStr;

use crate::net::NodeId;

pub mod elevator;
pub mod newscast;
pub mod phenix;
pub mod proofs;

pub use elevator::ElevatorState;
pub use newscast::{CacheEntry, NewscastState};
pub use phenix::PhenixState;
pub use proofs::ProofsState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    Elevator,
    Proofs,
    Newscast,
    Phenix,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Elevator => "elevator",
            ProtocolKind::Proofs => "proofs",
            ProtocolKind::Newscast => "newscast",
            ProtocolKind::Phenix => "phenix",
        }
    }

    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::Elevator,
        ProtocolKind::Proofs,
        ProtocolKind::Newscast,
        ProtocolKind::Phenix,
    ];
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "elevator" => Ok(ProtocolKind::Elevator),
            "proofs" => Ok(ProtocolKind::Proofs),
            "newscast" => Ok(ProtocolKind::Newscast),
            "phenix" => Ok(ProtocolKind::Phenix),
            other => Err(format!("unknown protocol '{other}'")),
        }
    }
}

/// Per-node protocol state. A network is homogeneous: every node carries the
/// variant matching the network's protocol.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolState {
    Elevator(ElevatorState),
    Proofs(ProofsState),
    Newscast(NewscastState),
    Phenix(PhenixState),
}

impl ProtocolState {
    /// Fresh state for a node whose cache starts as `cache` (ages zeroed,
    /// backward lists empty, counters zeroed).
    pub fn fresh(kind: ProtocolKind, cache: Vec<NodeId>) -> Self {
        match kind {
            ProtocolKind::Elevator => ProtocolState::Elevator(ElevatorState::with_cache(cache)),
            ProtocolKind::Proofs => ProtocolState::Proofs(ProofsState { cache }),
            ProtocolKind::Newscast => ProtocolState::Newscast(NewscastState::with_ids(cache)),
            ProtocolKind::Phenix => ProtocolState::Phenix(PhenixState::with_cache(cache)),
        }
    }

    /// The node's outgoing connections (cache entries).
    pub fn cache_ids(&self) -> Box<dyn Iterator<Item = NodeId> + '_> {
        match self {
            ProtocolState::Elevator(s) => Box::new(s.cache.iter().copied()),
            ProtocolState::Proofs(s) => Box::new(s.cache.iter().copied()),
            ProtocolState::Newscast(s) => Box::new(s.cache.iter().map(|e| e.id)),
            ProtocolState::Phenix(s) => Box::new(s.cache.iter().copied()),
        }
    }

    pub fn cache_len(&self) -> usize {
        match self {
            ProtocolState::Elevator(s) => s.cache.len(),
            ProtocolState::Proofs(s) => s.cache.len(),
            ProtocolState::Newscast(s) => s.cache.len(),
            ProtocolState::Phenix(s) => s.cache.len(),
        }
    }

    pub fn as_elevator(&self) -> &ElevatorState {
        match self {
            ProtocolState::Elevator(s) => s,
            other => panic!("expected elevator state, got {other:?}"),
        }
    }

    pub fn as_proofs(&self) -> &ProofsState {
        match self {
            ProtocolState::Proofs(s) => s,
            other => panic!("expected proofs state, got {other:?}"),
        }
    }

    pub fn as_newscast(&self) -> &NewscastState {
        match self {
            ProtocolState::Newscast(s) => s,
            other => panic!("expected newscast state, got {other:?}"),
        }
    }

    pub fn as_phenix(&self) -> &PhenixState {
        match self {
            ProtocolState::Phenix(s) => s,
            other => panic!("expected phenix state, got {other:?}"),
        }
    }
}

/// Unbounded, duplicate-free list of peers that contacted a node, in first
/// contact order. Membership is backed by a set; only insertion order and
/// shuffles touch the vector, so lookups stay cheap when hubs accumulate
/// thousands of entries.
#[derive(Debug, Clone, Default)]
pub struct BackwardList {
    order: Vec<NodeId>,
    members: HashSet<NodeId>,
}

impl BackwardList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ids(ids: Vec<NodeId>) -> Self {
        let mut list = Self::new();
        for id in ids {
            list.insert(id);
        }
        list
    }

    /// Adds `id` if absent; returns whether it was inserted.
    pub fn insert(&mut self, id: NodeId) -> bool {
        if self.members.insert(id) {
            self.order.push(id);
            true
        } else {
            false
        }
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.members.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.order
    }

    /// Drops entries for which `keep` is false.
    pub fn retain(&mut self, mut keep: impl FnMut(NodeId) -> bool) {
        let members = &mut self.members;
        self.order.retain(|&id| {
            if keep(id) {
                true
            } else {
                members.remove(&id);
                false
            }
        });
    }

    pub(crate) fn order_mut(&mut self) -> &mut [NodeId] {
        &mut self.order
    }
}

impl PartialEq for BackwardList {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
    }
}

/// Reusable frequency counter over node ids. Counts are stored in a dense
/// vector indexed by id and only touched entries are reset, which keeps the
/// per-round cost proportional to the number of distinct ids seen.
#[derive(Debug, Clone, Default)]
pub struct FreqScratch {
    counts: Vec<u32>,
    touched: Vec<NodeId>,
}

impl FreqScratch {
    pub fn bump(&mut self, id: NodeId) {
        let i = id.idx();
        if i >= self.counts.len() {
            self.counts.resize(i + 1, 0);
        }
        if self.counts[i] == 0 {
            self.touched.push(id);
        }
        self.counts[i] += 1;
    }

    /// Distinct ids seen since the last drain, ordered by descending count
    /// and ascending id. Resets the scratch.
    pub fn drain_sorted(&mut self) -> Vec<(NodeId, u32)> {
        let mut out: Vec<(NodeId, u32)> = self
            .touched
            .drain(..)
            .map(|id| (id, self.counts[id.idx()]))
            .collect();
        for &(id, _) in &out {
            self.counts[id.idx()] = 0;
        }
        out.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backward_list_deduplicates() {
        let mut list = BackwardList::new();
        assert!(list.insert(NodeId(4)));
        assert!(!list.insert(NodeId(4)));
        assert!(list.insert(NodeId(2)));
        assert_eq!(list.as_slice(), &[NodeId(4), NodeId(2)]);
        list.retain(|id| id != NodeId(4));
        assert_eq!(list.as_slice(), &[NodeId(2)]);
        assert!(!list.contains(NodeId(4)));
    }

    #[test]
    fn freq_scratch_sorts_by_count_desc_then_id_asc() {
        let mut scratch = FreqScratch::default();
        for id in [5u64, 3, 5, 9, 3, 5, 11] {
            scratch.bump(NodeId(id));
        }
        assert_eq!(
            scratch.drain_sorted(),
            vec![
                (NodeId(5), 3),
                (NodeId(3), 2),
                (NodeId(9), 1),
                (NodeId(11), 1),
            ]
        );
        // Drained clean: a second use starts from zero.
        scratch.bump(NodeId(5));
        assert_eq!(scratch.drain_sorted(), vec![(NodeId(5), 1)]);
    }
}
