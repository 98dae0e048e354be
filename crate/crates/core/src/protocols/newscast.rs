//! Age-annotated push-pull membership exchange.
//!
//! Draw order per round: one draw for the partner, then the initiator's
//! buffer sample (`min(c/2 - 1, len)` Fisher-Yates draws), the partner's
//! buffer sample, the partner's merge, and finally the initiator's merge.
//! A merge only draws when the equal-age group at the capacity boundary
//! overflows; it then consumes one draw per kept group entry. A
//! non-responding partner skips the round after the partner draw.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::net::{NodeId, OverlayNetwork};
use crate::protocols::ProtocolState;
use crate::rng::partial_shuffle;

/// Node descriptor with the age of the freshest copy seen, in cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheEntry {
    pub id: NodeId,
    pub age: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NewscastState {
    pub cache: Vec<CacheEntry>,
}

impl NewscastState {
    pub fn with_ids(ids: Vec<NodeId>) -> Self {
        NewscastState {
            cache: ids.into_iter().map(|id| CacheEntry { id, age: 0 }).collect(),
        }
    }
}

fn nc_mut(states: &mut [ProtocolState], id: NodeId) -> &mut NewscastState {
    match &mut states[id.idx()] {
        ProtocolState::Newscast(s) => s,
        other => panic!("node {id} is not a newscast node: {other:?}"),
    }
}

/// Own fresh descriptor plus up to `c/2 - 1` random cache entries. Permutes
/// the owner's cache in place, like the exchange it models.
fn build_buffer(net: &mut OverlayNetwork, node: NodeId) -> Vec<CacheEntry> {
    let half = (net.params.c / 2).saturating_sub(1);
    let st = nc_mut(&mut net.states, node);
    let k = half.min(st.cache.len());
    partial_shuffle(&mut st.cache, k, &mut net.protocol_rng);
    let mut buffer = Vec::with_capacity(k + 1);
    buffer.push(CacheEntry { id: node, age: 0 });
    buffer.extend_from_slice(&st.cache[..k]);
    buffer
}

/// Merges a received buffer into `own`: drops self descriptors, keeps the
/// freshest copy of duplicate ids, evicts the oldest entries down to `c`
/// (random choice inside the equal-age group at the boundary), and finally
/// ages every surviving entry by one.
pub(crate) fn merge_entries(
    own: &[CacheEntry],
    received: &[CacheEntry],
    self_id: NodeId,
    c: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<CacheEntry> {
    let mut result: Vec<CacheEntry> = Vec::with_capacity(own.len() + received.len());
    for e in own.iter().chain(received.iter()) {
        if e.id == self_id {
            continue;
        }
        match result.iter_mut().find(|x| x.id == e.id) {
            Some(existing) => {
                if e.age < existing.age {
                    existing.age = e.age;
                }
            }
            None => result.push(*e),
        }
    }
    if result.len() > c {
        result.sort_by_key(|e| e.age);
        let boundary = result[c - 1].age;
        let below = result.iter().take_while(|e| e.age < boundary).count();
        let group_end = result
            .iter()
            .position(|e| e.age > boundary)
            .unwrap_or(result.len());
        let keep = c - below;
        let group = &mut result[below..group_end];
        if group.len() > keep {
            partial_shuffle(group, keep, rng);
        }
        result.truncate(c);
    }
    for e in &mut result {
        e.age += 1;
    }
    result
}

fn merge_into(net: &mut OverlayNetwork, node: NodeId, received: &[CacheEntry]) {
    let c = net.params.c;
    let st = nc_mut(&mut net.states, node);
    let merged = merge_entries(&st.cache, received, node, c, &mut net.protocol_rng);
    nc_mut(&mut net.states, node).cache = merged;
}

/// One active round: push-pull exchange with a random cache partner.
pub fn round(net: &mut OverlayNetwork, node: NodeId) {
    let partner = {
        let st = nc_mut(&mut net.states, node);
        if st.cache.is_empty() {
            return;
        }
        st.cache[net.protocol_rng.gen_range(0..st.cache.len())].id
    };
    if !net.alive.get(partner.idx()).copied().unwrap_or(false) {
        return;
    }
    let buffer_out = build_buffer(net, node);
    let buffer_back = build_buffer(net, partner);
    merge_into(net, partner, &buffer_out);
    merge_into(net, node, &buffer_back);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SimParams;
    use crate::protocols::ProtocolKind;
    use crate::rng::{derive_stream, StreamPurpose};

    fn entry(id: u64, age: u64) -> CacheEntry {
        CacheEntry { id: NodeId(id), age }
    }

    #[test]
    fn two_nodes_swap_fresh_descriptors() {
        let params = SimParams {
            n: 10,
            c: 2,
            h: 1,
            l: 1,
            s: 1,
            ..SimParams::default()
        };
        let states = vec![
            ProtocolState::Newscast(NewscastState::with_ids(vec![NodeId(1)])),
            ProtocolState::Newscast(NewscastState::with_ids(vec![NodeId(0)])),
        ];
        let mut net = OverlayNetwork::from_states(&params, ProtocolKind::Newscast, states);
        round(&mut net, NodeId(0));
        assert_eq!(net.state(NodeId(0)).as_newscast().cache, vec![entry(1, 1)]);
        assert_eq!(net.state(NodeId(1)).as_newscast().cache, vec![entry(0, 1)]);
    }

    #[test]
    fn freshest_duplicate_wins() {
        let mut rng = derive_stream(0, 0, StreamPurpose::Protocol);
        let merged = merge_entries(
            &[entry(7, 5), entry(3, 2)],
            &[entry(7, 0)],
            NodeId(9),
            4,
            &mut rng,
        );
        // Post-merge ages include the end-of-round increment.
        assert_eq!(merged, vec![entry(7, 1), entry(3, 3)]);
    }

    #[test]
    fn merge_drops_self_and_caps_at_capacity() {
        let mut rng = derive_stream(1, 0, StreamPurpose::Protocol);
        let own = [entry(1, 0), entry(2, 3), entry(3, 3), entry(4, 3)];
        let received = [entry(9, 0), entry(5, 3), entry(6, 7)];
        let merged = merge_entries(&own, &received, NodeId(9), 4, &mut rng);
        assert_eq!(merged.len(), 4);
        // Fresh entries survive; the age-7 entry must be evicted first.
        assert!(merged.contains(&entry(1, 1)));
        assert!(!merged.iter().any(|e| e.id == NodeId(6)));
        assert!(!merged.iter().any(|e| e.id == NodeId(9)));
        // Exactly three of the four age-3 entries survive, aged to 4.
        let aged: Vec<_> = merged.iter().filter(|e| e.age == 4).collect();
        assert_eq!(aged.len(), 3);
    }
}
