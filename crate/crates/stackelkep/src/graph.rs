//! Directed compatibility-graph instances: ownership, role labels, induced
//! subgraphs, bounded cycle enumeration and the on-disk JSON format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};

/// Dense node identifier within one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which side of the game a node belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Leader,
    Follower,
}

/// Polarity marker used inside `beta` labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    True,
    False,
}

impl Polarity {
    fn as_str(self) -> &'static str {
        match self {
            Polarity::True => "t",
            Polarity::False => "f",
        }
    }
}

/// Structured role label used on reduced instances.
///
/// Rendered as `t[<var>,<i>]`, `f[<var>,<i>]`, `tau[<var>,<i>]`,
/// `phi[<var>,<i>]`, `alpha[<var>,<i>]`, `beta[<var>,<t|f>,<i>]`,
/// `delta[<clause-index>]` or `d`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RoleLabel {
    T { var: String, copy: u8 },
    F { var: String, copy: u8 },
    Tau { var: String, copy: u8 },
    Phi { var: String, copy: u8 },
    Alpha { var: String, copy: u8 },
    Beta { var: String, pol: Polarity, copy: u8 },
    Delta { clause: usize },
    D,
}

impl RoleLabel {
    /// The gadget variable this label belongs to, if any.
    pub fn var(&self) -> Option<&str> {
        match self {
            RoleLabel::T { var, .. }
            | RoleLabel::F { var, .. }
            | RoleLabel::Tau { var, .. }
            | RoleLabel::Phi { var, .. }
            | RoleLabel::Alpha { var, .. }
            | RoleLabel::Beta { var, .. } => Some(var),
            _ => None,
        }
    }
}

impl fmt::Display for RoleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoleLabel::T { var, copy } => write!(f, "t[{var},{copy}]"),
            RoleLabel::F { var, copy } => write!(f, "f[{var},{copy}]"),
            RoleLabel::Tau { var, copy } => write!(f, "tau[{var},{copy}]"),
            RoleLabel::Phi { var, copy } => write!(f, "phi[{var},{copy}]"),
            RoleLabel::Alpha { var, copy } => write!(f, "alpha[{var},{copy}]"),
            RoleLabel::Beta { var, pol, copy } => {
                write!(f, "beta[{var},{},{copy}]", pol.as_str())
            }
            RoleLabel::Delta { clause } => write!(f, "delta[{clause}]"),
            RoleLabel::D => write!(f, "d"),
        }
    }
}

impl FromStr for RoleLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad role label `{s}`"));
        if s == "d" {
            return Ok(RoleLabel::D);
        }
        let open = s.find('[').ok_or_else(bad)?;
        if !s.ends_with(']') {
            return Err(bad());
        }
        let kind = &s[..open];
        let args: Vec<&str> = s[open + 1..s.len() - 1].split(',').collect();
        let copy_of = |a: &str| -> Result<u8> {
            let c: u8 = a.parse().map_err(|_| bad())?;
            if c == 1 || c == 2 {
                Ok(c)
            } else {
                Err(bad())
            }
        };
        match (kind, args.as_slice()) {
            ("t", [var, i]) => Ok(RoleLabel::T {
                var: var.to_string(),
                copy: copy_of(i)?,
            }),
            ("f", [var, i]) => Ok(RoleLabel::F {
                var: var.to_string(),
                copy: copy_of(i)?,
            }),
            ("tau", [var, i]) => Ok(RoleLabel::Tau {
                var: var.to_string(),
                copy: copy_of(i)?,
            }),
            ("phi", [var, i]) => Ok(RoleLabel::Phi {
                var: var.to_string(),
                copy: copy_of(i)?,
            }),
            ("alpha", [var, i]) => Ok(RoleLabel::Alpha {
                var: var.to_string(),
                copy: copy_of(i)?,
            }),
            ("beta", [var, pol, i]) => {
                let pol = match *pol {
                    "t" => Polarity::True,
                    "f" => Polarity::False,
                    _ => return Err(bad()),
                };
                Ok(RoleLabel::Beta {
                    var: var.to_string(),
                    pol,
                    copy: copy_of(i)?,
                })
            }
            ("delta", [clause]) => Ok(RoleLabel::Delta {
                clause: clause.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// One patient-donor pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub owner: Owner,
    pub label: Option<RoleLabel>,
}

/// A directed compatibility graph with node ownership, the cycle-length cap
/// `K` and the optional decision threshold `k`.
///
/// Immutable after construction; all operations on it are pure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KepInstance {
    nodes: Vec<Node>,
    arcs: BTreeSet<(NodeId, NodeId)>,
    max_cycle_len: u32,
    threshold: Option<u64>,
}

impl KepInstance {
    /// Validates and builds an instance. Node ids must be unique; arcs must
    /// be loop-free, unique and reference existing nodes; `K >= 2`.
    pub fn new(
        mut nodes: Vec<Node>,
        arcs: impl IntoIterator<Item = (NodeId, NodeId)>,
        max_cycle_len: u32,
        threshold: Option<u64>,
    ) -> Result<Self> {
        if max_cycle_len < 2 {
            return Err(Error::Validation(format!(
                "K must be at least 2, got {max_cycle_len}"
            )));
        }
        nodes.sort_by_key(|n| n.id);
        let mut ids = BTreeSet::new();
        let mut labels = BTreeSet::new();
        for node in &nodes {
            if !ids.insert(node.id) {
                return Err(Error::Validation(format!("duplicate node id {}", node.id)));
            }
            if let Some(label) = &node.label {
                if !labels.insert(label.clone()) {
                    return Err(Error::Validation(format!(
                        "duplicate label `{label}` on node {}",
                        node.id
                    )));
                }
            }
        }
        let mut arc_set = BTreeSet::new();
        for (u, v) in arcs {
            if u == v {
                return Err(Error::Validation(format!("self-loop arc ({u},{u})")));
            }
            if !ids.contains(&u) || !ids.contains(&v) {
                return Err(Error::Validation(format!(
                    "arc ({u},{v}) references an unknown node"
                )));
            }
            if !arc_set.insert((u, v)) {
                return Err(Error::Validation(format!("duplicate arc ({u},{v})")));
            }
        }
        Ok(KepInstance {
            nodes,
            arcs: arc_set,
            max_cycle_len,
            threshold,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.id)
    }

    pub fn node_set(&self) -> BTreeSet<NodeId> {
        self.node_ids().collect()
    }

    pub fn arcs(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.arcs
    }

    pub fn has_arc(&self, u: NodeId, v: NodeId) -> bool {
        self.arcs.contains(&(u, v))
    }

    pub fn max_cycle_len(&self) -> u32 {
        self.max_cycle_len
    }

    pub fn threshold(&self) -> Option<u64> {
        self.threshold
    }

    /// Replace the decision threshold `k`.
    pub fn with_threshold(mut self, threshold: Option<u64>) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.binary_search_by_key(&id, |n| n.id).is_ok()
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes
            .binary_search_by_key(&id, |n| n.id)
            .ok()
            .map(|i| &self.nodes[i])
    }

    pub fn owner(&self, id: NodeId) -> Option<Owner> {
        self.node(id).map(|n| n.owner)
    }

    /// All leader nodes, ascending.
    pub fn leader_nodes(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| n.owner == Owner::Leader)
            .map(|n| n.id)
            .collect()
    }

    /// Node id of the node carrying `label`, if present.
    pub fn node_by_label(&self, label: &RoleLabel) -> Option<NodeId> {
        self.nodes
            .iter()
            .find(|n| n.label.as_ref() == Some(label))
            .map(|n| n.id)
    }

    /// Successors of `u` restricted to `within`.
    pub fn out_neighbors<'a>(
        &'a self,
        u: NodeId,
        within: &'a BTreeSet<NodeId>,
    ) -> impl Iterator<Item = NodeId> + 'a {
        self.arcs
            .range((u, NodeId(0))..=(u, NodeId(u32::MAX)))
            .map(|&(_, v)| v)
            .filter(move |v| within.contains(v))
    }

    /// The subgraph induced by `W`: nodes of `W` with their owners and
    /// labels, and exactly the arcs with both endpoints in `W`. Node ids
    /// are preserved.
    pub fn induced_subgraph(&self, w: &BTreeSet<NodeId>) -> Result<KepInstance> {
        for &id in w {
            if !self.contains(id) {
                return Err(Error::Validation(format!("unknown node {id} in W")));
            }
        }
        let nodes = self
            .nodes
            .iter()
            .filter(|n| w.contains(&n.id))
            .cloned()
            .collect();
        let arcs = self
            .arcs
            .iter()
            .filter(|(u, v)| w.contains(u) && w.contains(v))
            .copied();
        KepInstance::new(nodes, arcs, self.max_cycle_len, self.threshold)
    }

    /// Enumerate every directed cycle of length `2..=K` in the subgraph
    /// induced by `W`, once each, in canonical rotation (minimum node id
    /// first), in deterministic order.
    pub fn enumerate_cycles(&self, w: &BTreeSet<NodeId>, caps: &Caps) -> Result<Vec<Cycle>> {
        for &id in w {
            if !self.contains(id) {
                return Err(Error::Validation(format!("unknown node {id} in W")));
            }
        }
        Caps::check("cycle-enumeration node set", w.len(), caps.enum_nodes)?;
        let mut cycles = Vec::new();
        let mut path = Vec::new();
        for &start in w {
            path.push(start);
            self.cycle_dfs(start, start, w, &mut path, &mut cycles);
            path.pop();
        }
        Ok(cycles)
    }

    fn cycle_dfs(
        &self,
        start: NodeId,
        current: NodeId,
        w: &BTreeSet<NodeId>,
        path: &mut Vec<NodeId>,
        out: &mut Vec<Cycle>,
    ) {
        if path.len() >= 2 && self.has_arc(current, start) {
            out.push(Cycle(path.clone()));
        }
        if path.len() as u32 == self.max_cycle_len {
            return;
        }
        let next: Vec<NodeId> = self
            .out_neighbors(current, w)
            .filter(|&v| v > start && !path.contains(&v))
            .collect();
        for v in next {
            path.push(v);
            self.cycle_dfs(start, v, w, path, out);
            path.pop();
        }
    }

    /// Parse an instance from its JSON file format.
    pub fn load(path: &Path) -> Result<KepInstance> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<KepInstance> {
        let raw: InstanceJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance JSON: {e}")))?;
        raw.try_into()
    }

    /// Serialize to the canonical JSON form: nodes sorted by id, arcs sorted
    /// lexicographically, newline-terminated.
    pub fn to_json(&self) -> String {
        let raw = InstanceJson::from(self);
        let mut s = serde_json::to_string(&raw).expect("instance serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// A directed cycle stored in canonical rotation (minimum node id first).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle(Vec<NodeId>);

impl Cycle {
    /// Validates the node sequence against `inst` and stores it in canonical
    /// rotation.
    pub fn new(mut nodes: Vec<NodeId>, inst: &KepInstance) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Validation("cycle shorter than 2 nodes".into()));
        }
        if nodes.len() as u32 > inst.max_cycle_len() {
            return Err(Error::Validation(format!(
                "cycle of length {} exceeds K={}",
                nodes.len(),
                inst.max_cycle_len()
            )));
        }
        let distinct: BTreeSet<_> = nodes.iter().collect();
        if distinct.len() != nodes.len() {
            return Err(Error::Validation("cycle repeats a node".into()));
        }
        for i in 0..nodes.len() {
            let u = nodes[i];
            let v = nodes[(i + 1) % nodes.len()];
            if !inst.has_arc(u, v) {
                return Err(Error::Validation(format!("missing arc ({u},{v}) in cycle")));
            }
        }
        let min_pos = nodes
            .iter()
            .enumerate()
            .min_by_key(|(_, id)| **id)
            .map(|(i, _)| i)
            .unwrap();
        nodes.rotate_left(min_pos);
        Ok(Cycle(nodes))
    }

    /// Canonicalizes the rotation without checking arcs against an instance;
    /// callers guarantee the sequence is a real cycle.
    pub(crate) fn from_canonical_unchecked(mut nodes: Vec<NodeId>) -> Self {
        debug_assert!(nodes.len() >= 2);
        let min_pos = nodes
            .iter()
            .enumerate()
            .min_by_key(|(_, id)| **id)
            .map(|(i, _)| i)
            .unwrap();
        nodes.rotate_left(min_pos);
        Cycle(nodes)
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.0.contains(&id)
    }

    pub fn node_set(&self) -> BTreeSet<NodeId> {
        self.0.iter().copied().collect()
    }
}

/// Node-disjoint set of cycles, kept sorted for deterministic output.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct CyclePacking(Vec<Cycle>);

impl CyclePacking {
    pub fn new(mut cycles: Vec<Cycle>) -> Result<Self> {
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        for cycle in &cycles {
            for &id in cycle.nodes() {
                if !seen.insert(id) {
                    return Err(Error::Validation(format!(
                        "cycles are not node-disjoint at node {id}"
                    )));
                }
            }
        }
        cycles.sort();
        Ok(CyclePacking(cycles))
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.0
    }

    /// Total number of covered nodes.
    pub fn size(&self) -> usize {
        self.0.iter().map(Cycle::len).sum()
    }

    pub fn covered(&self) -> BTreeSet<NodeId> {
        self.0.iter().flat_map(|c| c.nodes().iter().copied()).collect()
    }

    pub fn covers(&self, id: NodeId) -> bool {
        self.0.iter().any(|c| c.contains(id))
    }
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    id: u32,
    owner: Owner,
    label: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    #[serde(rename = "K")]
    max_cycle_len: u32,
    #[serde(rename = "k")]
    threshold: Option<u64>,
    nodes: Vec<NodeJson>,
    arcs: Vec<(u32, u32)>,
}

impl TryFrom<InstanceJson> for KepInstance {
    type Error = Error;

    fn try_from(raw: InstanceJson) -> Result<KepInstance> {
        let nodes = raw
            .nodes
            .into_iter()
            .map(|n| {
                let label = n.label.as_deref().map(RoleLabel::from_str).transpose()?;
                Ok(Node {
                    id: NodeId(n.id),
                    owner: n.owner,
                    label,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let arcs = raw.arcs.into_iter().map(|(u, v)| (NodeId(u), NodeId(v)));
        KepInstance::new(nodes, arcs, raw.max_cycle_len, raw.threshold)
    }
}

impl From<&KepInstance> for InstanceJson {
    fn from(inst: &KepInstance) -> InstanceJson {
        InstanceJson {
            max_cycle_len: inst.max_cycle_len,
            threshold: inst.threshold,
            nodes: inst
                .nodes
                .iter()
                .map(|n| NodeJson {
                    id: n.id.0,
                    owner: n.owner,
                    label: n.label.as_ref().map(|l| l.to_string()),
                })
                .collect(),
            arcs: inst.arcs.iter().map(|&(u, v)| (u.0, v.0)).collect(),
        }
    }
}

/// Convenience constructor used throughout the tests: unlabeled nodes
/// `0..n`, the first `leaders` of them owned by the leader.
pub fn simple_instance(
    n: u32,
    leaders: u32,
    arcs: &[(u32, u32)],
    max_cycle_len: u32,
) -> Result<KepInstance> {
    let nodes = (0..n)
        .map(|i| Node {
            id: NodeId(i),
            owner: if i < leaders {
                Owner::Leader
            } else {
                Owner::Follower
            },
            label: None,
        })
        .collect();
    KepInstance::new(
        nodes,
        arcs.iter().map(|&(u, v)| (NodeId(u), NodeId(v))),
        max_cycle_len,
        None,
    )
}

/// Labels-to-id lookup shared by the reduction and the classifiers.
pub fn label_index(inst: &KepInstance) -> BTreeMap<RoleLabel, NodeId> {
    inst.nodes()
        .iter()
        .filter_map(|n| n.label.clone().map(|l| (l, n.id)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[u32]) -> BTreeSet<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    #[test]
    fn empty_instance_is_valid() {
        let inst = simple_instance(0, 0, &[], 3).unwrap();
        assert_eq!(inst.num_nodes(), 0);
    }

    #[test]
    fn smallest_cycle_bearing_graph() {
        let inst = simple_instance(2, 0, &[(0, 1), (1, 0)], 2).unwrap();
        assert_eq!(inst.arcs().len(), 2);
    }

    #[test]
    fn self_loop_rejected_with_location() {
        let err = simple_instance(1, 0, &[(0, 0)], 3).unwrap_err();
        assert!(err.to_string().contains("(0,0)"), "{err}");
    }

    #[test]
    fn duplicate_arc_rejected() {
        let nodes = vec![
            Node {
                id: NodeId(0),
                owner: Owner::Follower,
                label: None,
            },
            Node {
                id: NodeId(1),
                owner: Owner::Follower,
                label: None,
            },
        ];
        let arcs = vec![(NodeId(0), NodeId(1)), (NodeId(0), NodeId(1))];
        assert!(KepInstance::new(nodes, arcs, 3, None).is_err());
    }

    #[test]
    fn k_below_two_rejected() {
        assert!(simple_instance(0, 0, &[], 1).is_err());
    }

    #[test]
    fn induced_subgraph_identity_and_empty() {
        let inst = simple_instance(3, 1, &[(0, 1), (1, 0), (1, 2)], 3).unwrap();
        assert_eq!(inst.induced_subgraph(&inst.node_set()).unwrap(), inst);
        let empty = inst.induced_subgraph(&BTreeSet::new()).unwrap();
        assert_eq!(empty.num_nodes(), 0);
        assert!(empty.arcs().is_empty());
    }

    #[test]
    fn induced_subgraph_keeps_internal_arcs_only() {
        // Pool with a leader 2-cycle r1<->r2 plus follower arcs.
        let inst = simple_instance(
            4,
            2,
            &[(0, 1), (1, 0), (0, 2), (2, 3), (3, 0), (1, 2), (3, 1)],
            3,
        )
        .unwrap();
        let sub = inst.induced_subgraph(&ids(&[0, 1])).unwrap();
        let arcs: Vec<_> = sub.arcs().iter().copied().collect();
        assert_eq!(arcs, vec![(NodeId(0), NodeId(1)), (NodeId(1), NodeId(0))]);
    }

    #[test]
    fn induced_subgraph_unknown_node() {
        let inst = simple_instance(2, 0, &[], 3).unwrap();
        assert!(inst.induced_subgraph(&ids(&[5])).is_err());
    }

    #[test]
    fn two_cycle_enumerated_once() {
        let inst = simple_instance(2, 0, &[(0, 1), (1, 0)], 2).unwrap();
        let cycles = inst
            .enumerate_cycles(&inst.node_set(), &Caps::default())
            .unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].nodes(), &[NodeId(0), NodeId(1)]);
    }

    #[test]
    fn length_cap_excludes_triangle() {
        let inst = simple_instance(3, 0, &[(0, 1), (1, 2), (2, 0)], 2).unwrap();
        let cycles = inst
            .enumerate_cycles(&inst.node_set(), &Caps::default())
            .unwrap();
        assert!(cycles.is_empty());
    }

    #[test]
    fn enumeration_cap_enforced() {
        let inst = simple_instance(4, 0, &[], 3).unwrap();
        let caps = Caps {
            enum_nodes: 3,
            ..Caps::default()
        };
        assert!(matches!(
            inst.enumerate_cycles(&inst.node_set(), &caps),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn cycle_canonical_rotation() {
        let inst = simple_instance(3, 0, &[(0, 1), (1, 2), (2, 0)], 3).unwrap();
        let c = Cycle::new(vec![NodeId(2), NodeId(0), NodeId(1)], &inst).unwrap();
        assert_eq!(c.nodes(), &[NodeId(0), NodeId(1), NodeId(2)]);
    }

    #[test]
    fn role_label_round_trip() {
        for text in [
            "t[1,1]",
            "f[2,2]",
            "tau[1,1]",
            "phi[3,2]",
            "alpha[1,2]",
            "beta[1,t,1]",
            "beta[4,f,2]",
            "delta[7]",
            "d",
        ] {
            let label: RoleLabel = text.parse().unwrap();
            assert_eq!(label.to_string(), text);
        }
        assert!("t[1,3]".parse::<RoleLabel>().is_err());
        assert!("gamma[1,1]".parse::<RoleLabel>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let inst = simple_instance(4, 2, &[(0, 1), (1, 0), (2, 3)], 3).unwrap();
        let text = inst.to_json();
        assert!(text.ends_with('\n'));
        let back = KepInstance::from_json(&text).unwrap();
        assert_eq!(back, inst);
    }
}
