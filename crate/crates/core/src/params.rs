use crate::error::ConfigError;

/// Global simulation parameters, shared by every node of a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimParams {
    /// Node count.
    pub n: usize,
    /// Cache capacity (maximum outgoing connections per node).
    pub c: usize,
    /// Hub count: number of preferential-attachment cache slots.
    pub h: usize,
    /// Shuffle length for cache exchanges.
    pub l: usize,
    /// Number of preferential connections established at join time.
    pub s: usize,
    /// Backward-connection constant: one backward edge per `gamma` requests.
    pub gamma: u32,
    /// Lifetime, in cycles, of gamma-list entries.
    pub tau: u64,
    /// Cap on the number of backward addresses returned per request.
    pub max_backward: usize,
    /// Total cycles to simulate.
    pub cycles: u64,
    /// Master RNG seed; all substreams derive from it.
    pub seed: u64,
    /// Cycles between metric snapshots.
    pub metric_period: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            n: 1000,
            c: 20,
            h: 10,
            l: 10,
            s: 10,
            gamma: 20,
            tau: 10,
            max_backward: 100,
            cycles: 1000,
            seed: 42,
            metric_period: 10,
        }
    }
}

impl SimParams {
    /// Checks the parameter invariants, naming the first violated constraint.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0 < self.h && self.h <= self.c && self.c < self.n) {
            return Err(ConfigError::HubCount {
                n: self.n,
                c: self.c,
                h: self.h,
            });
        }
        if !(0 < self.l && self.l <= self.c) {
            return Err(ConfigError::ShuffleLength {
                c: self.c,
                l: self.l,
            });
        }
        if !(0 < self.s && self.s <= self.c) {
            return Err(ConfigError::PreferentialCount {
                c: self.c,
                s: self.s,
            });
        }
        if self.metric_period < 1 {
            return Err(ConfigError::MetricPeriod);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        assert_eq!(SimParams::default().validate(), Ok(()));
    }

    #[test]
    fn rejects_h_above_c() {
        let p = SimParams {
            h: 21,
            ..SimParams::default()
        };
        assert!(matches!(p.validate(), Err(ConfigError::HubCount { .. })));
    }

    #[test]
    fn rejects_c_at_or_above_n() {
        let p = SimParams {
            n: 20,
            ..SimParams::default()
        };
        assert!(matches!(p.validate(), Err(ConfigError::HubCount { .. })));
    }

    #[test]
    fn rejects_zero_shuffle_length() {
        let p = SimParams {
            l: 0,
            ..SimParams::default()
        };
        assert!(matches!(
            p.validate(),
            Err(ConfigError::ShuffleLength { .. })
        ));
    }

    #[test]
    fn rejects_zero_metric_period() {
        let p = SimParams {
            metric_period: 0,
            ..SimParams::default()
        };
        assert_eq!(p.validate(), Err(ConfigError::MetricPeriod));
    }
}
