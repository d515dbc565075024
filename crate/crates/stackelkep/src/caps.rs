use crate::error::{Error, Result};

/// Resource guards for the exponential searches.
///
/// Every brute-force oracle and enumeration checks its input against one of
/// these limits and fails loudly instead of hanging. All limits can be
/// overridden, e.g. via the `STACKELKEP_CAPS` environment variable in the
/// CLI (`enum-nodes=..,oracle-nodes=..,leader=..,sat-vars=..,adv-vars=..`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Max node-set size accepted by cycle enumeration (and the packing
    /// branch-and-bound built on top of it).
    pub enum_nodes: usize,
    /// Max node-set size for `all_optimal_packings`.
    pub oracle_nodes: usize,
    /// Max |L| for full strategy enumeration.
    pub leader_nodes: usize,
    /// Max variable count for the brute-force SAT oracle.
    pub sat_vars: usize,
    /// Max |X| + |Y| for the brute-force adversarial SAT oracle.
    pub adv_vars: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enum_nodes: 64,
            oracle_nodes: 30,
            leader_nodes: 24,
            sat_vars: 24,
            adv_vars: 20,
        }
    }
}

impl Caps {
    /// A configuration with all guards effectively disabled.
    pub fn unlimited() -> Self {
        Caps {
            enum_nodes: 128,
            oracle_nodes: 128,
            leader_nodes: 62,
            sat_vars: 62,
            adv_vars: 62,
        }
    }

    /// Parse comma-separated `key=value` overrides on top of the defaults.
    pub fn parse_overrides(overrides: &str) -> Result<Self> {
        let mut caps = Caps::default();
        for item in overrides.split(',').filter(|s| !s.trim().is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad caps item `{item}`, want key=value")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad caps value in `{item}`")))?;
            match key.trim() {
                "enum-nodes" => caps.enum_nodes = value,
                "oracle-nodes" => caps.oracle_nodes = value,
                "leader" => caps.leader_nodes = value,
                "sat-vars" => caps.sat_vars = value,
                "adv-vars" => caps.adv_vars = value,
                other => {
                    return Err(Error::Parse(format!("unknown caps key `{other}`")));
                }
            }
        }
        Ok(caps)
    }

    pub(crate) fn check(what: &'static str, actual: usize, limit: usize) -> Result<()> {
        if actual > limit {
            Err(Error::CapExceeded {
                what,
                limit,
                actual,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_overrides_round_trip() {
        let caps = Caps::parse_overrides("leader=10, sat-vars=8").unwrap();
        assert_eq!(caps.leader_nodes, 10);
        assert_eq!(caps.sat_vars, 8);
        assert_eq!(caps.enum_nodes, Caps::default().enum_nodes);
    }

    #[test]
    fn parse_overrides_rejects_unknown_key() {
        assert!(Caps::parse_overrides("bogus=1").is_err());
    }
}
