use thiserror::Error;

use crate::net::NodeId;

/// Rejected configuration, naming the violated constraint.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("invalid parameters: require 0 < h <= c < n, got n={n} c={c} h={h}")]
    HubCount { n: usize, c: usize, h: usize },
    #[error("invalid parameters: require 0 < l <= c, got c={c} l={l}")]
    ShuffleLength { c: usize, l: usize },
    #[error("invalid parameters: require 0 < s <= c, got c={c} s={s}")]
    PreferentialCount { c: usize, s: usize },
    #[error("invalid parameters: require metric_period >= 1")]
    MetricPeriod,
    #[error("invalid parameters: require n > c for k-out initialization, got n={n} c={c}")]
    KOutSize { n: usize, c: usize },
    #[error("{0}")]
    Other(String),
}

/// Failures of the sampling service calls (`get_peer` / `get_hub`).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServiceError {
    #[error("node {0} was never allocated")]
    UnknownNode(NodeId),
    #[error("node {0} is not responding")]
    DeadNode(NodeId),
    #[error("node {0} has no peers in its cache")]
    NoPeers(NodeId),
    #[error("node {0} knows no hubs yet")]
    NoHubsKnown(NodeId),
    #[error("node {0} does not run the hub-sampling protocol")]
    NotHubSampling(NodeId),
}

/// Domain violations in the closed-form probability helpers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("require n > c >= 2 and t >= 1, got n={n} c={c} t={t}")]
    LinkDomain { n: u64, c: u64, t: u64 },
    #[error("require n > c > h >= 1, got n={n} c={c} h={h}")]
    HubDomain { n: u64, c: u64, h: u64 },
    #[error("invalid reference distribution: {0}")]
    Reference(String),
}
