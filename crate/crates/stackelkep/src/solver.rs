//! The leader's problem: choose S ⊆ L to maximize
//! `w(G[S]) + w^L(G[V∖S])`, i.e. the internally matched leader nodes plus
//! the leader nodes the worst-case follower still covers.
//!
//! `solve_exact` enumerates all 2^|L| strategies against the exact packing
//! oracles. `solve_k2` does the same on the undirected projection but, by
//! weak dominance, only over strategies with a perfect internal matching.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{KepInstance, NodeId, Owner};
use crate::matching::{k2_adversarial_matching, undirected_projection, MatchingGraph};
use crate::packing::{adversarial_packing, max_packing, PackingResult};

/// A leader strategy: the withheld node set S ⊆ L.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Strategy(BTreeSet<NodeId>);

impl Strategy {
    /// Validates S ⊆ L against the instance.
    pub fn new(inst: &KepInstance, ids: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let set: BTreeSet<NodeId> = ids.into_iter().collect();
        for &id in &set {
            match inst.node(id) {
                Some(n) if n.owner == Owner::Leader => {}
                Some(_) => {
                    return Err(Error::Validation(format!(
                        "strategy contains follower node {id}"
                    )))
                }
                None => {
                    return Err(Error::Validation(format!(
                        "strategy contains unknown node {id}"
                    )))
                }
            }
        }
        Ok(Strategy(set))
    }

    pub fn empty() -> Self {
        Strategy::default()
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
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
}

impl FromIterator<NodeId> for Strategy {
    /// Unvalidated construction; used where S ⊆ L holds by context.
    fn from_iter<T: IntoIterator<Item = NodeId>>(iter: T) -> Self {
        Strategy(iter.into_iter().collect())
    }
}

/// Solver output: the best strategy and its two packing halves.
#[derive(Debug, Clone)]
pub struct LeaderReport {
    pub best_value: u64,
    pub best_strategy: Strategy,
    /// Maximum packing on G[S].
    pub internal: PackingResult,
    /// Adversarial packing on G[V∖S] with U = L.
    pub external: PackingResult,
    /// `best_value >= k`, when the instance carries a threshold.
    pub decision: Option<bool>,
    /// Full (strategy, value) table when requested.
    pub table: Option<Vec<(Strategy, u64)>>,
}

/// Value of one fixed strategy: internally matched leaders plus the leader
/// nodes covered by the adversarial follower packing on the rest.
pub fn leader_value(inst: &KepInstance, s: &Strategy, caps: &Caps) -> Result<u64> {
    let (value, _, _) = evaluate(inst, s.nodes(), caps)?;
    Ok(value)
}

fn evaluate(
    inst: &KepInstance,
    s: &BTreeSet<NodeId>,
    caps: &Caps,
) -> Result<(u64, PackingResult, PackingResult)> {
    let leaders: BTreeSet<NodeId> = inst.leader_nodes().into_iter().collect();
    let rest: BTreeSet<NodeId> = inst.node_ids().filter(|id| !s.contains(id)).collect();
    let internal = max_packing(inst, s, caps)?;
    let external = adversarial_packing(inst, &rest, &leaders, caps)?;
    let value = internal.size as u64 + external.u_covered as u64;
    Ok((value, internal, external))
}

/// Exhaustive leader optimization; ties broken toward the lexicographically
/// smallest strategy set.
pub fn solve_exact(inst: &KepInstance, caps: &Caps) -> Result<LeaderReport> {
    solve_exact_opts(inst, caps, &SolveOptions::default())
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub threads: usize,
    /// Also return the full strategy table in the report.
    pub with_table: bool,
    /// Threshold override; falls back to the instance's own k.
    pub decision_k: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            threads: 1,
            with_table: false,
            decision_k: None,
        }
    }
}

pub fn solve_exact_opts(
    inst: &KepInstance,
    caps: &Caps,
    opts: &SolveOptions,
) -> Result<LeaderReport> {
    let leaders = inst.leader_nodes();
    Caps::check("leader nodes", leaders.len(), caps.leader_nodes)?;
    let eval = |s: &BTreeSet<NodeId>| evaluate(inst, s, caps);
    assemble_report(inst, &leaders, eval, caps, opts)
}

/// K=2 solver on the undirected projection, restricted to strategies whose
/// internal subgraph has a perfect matching; values agree with `solve_exact`
/// on every K=2 instance.
pub fn solve_k2(inst: &KepInstance, caps: &Caps) -> Result<LeaderReport> {
    solve_k2_opts(inst, caps, &SolveOptions::default())
}

pub fn solve_k2_opts(
    inst: &KepInstance,
    caps: &Caps,
    opts: &SolveOptions,
) -> Result<LeaderReport> {
    if inst.max_cycle_len() != 2 {
        return Err(Error::Validation("K must be 2".into()));
    }
    let leaders = inst.leader_nodes();
    Caps::check("leader nodes", leaders.len(), caps.leader_nodes)?;
    let proj = undirected_projection(inst);
    let leader_set: BTreeSet<NodeId> = leaders.iter().copied().collect();
    let all: BTreeSet<NodeId> = inst.node_ids().collect();
    let eval = move |s: &BTreeSet<NodeId>| k2_evaluate(&proj, &leader_set, &all, s);
    assemble_report(inst, &leaders, eval, caps, opts)
}

fn k2_evaluate(
    proj: &MatchingGraph,
    leaders: &BTreeSet<NodeId>,
    all: &BTreeSet<NodeId>,
    s: &BTreeSet<NodeId>,
) -> Result<(u64, PackingResult, PackingResult)> {
    let internal = k2_adversarial_matching(&proj.induced(s), &BTreeSet::new());
    if internal.size < s.len() {
        // No perfect internal matching: skipped per weak dominance.
        return Err(Error::Validation("imperfect internal matching".into()));
    }
    let rest: BTreeSet<NodeId> = all.difference(s).copied().collect();
    let external = k2_adversarial_matching(&proj.induced(&rest), leaders);
    let value = internal.size as u64 + external.u_covered as u64;
    Ok((value, internal, external))
}

/// Shared strategy-enumeration core. `eval` may reject a strategy (the K=2
/// path skips imperfectly matched ones); at least S = ∅ must succeed.
fn assemble_report<F>(
    inst: &KepInstance,
    leaders: &[NodeId],
    eval: F,
    _caps: &Caps,
    opts: &SolveOptions,
) -> Result<LeaderReport>
where
    F: Fn(&BTreeSet<NodeId>) -> Result<(u64, PackingResult, PackingResult)> + Sync,
{
    let n_masks: u64 = 1u64 << leaders.len();
    let strategy_at = |mask: u64| -> BTreeSet<NodeId> {
        leaders
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &id)| id)
            .collect()
    };

    // One contiguous mask chunk per worker; each returns its rows and local
    // best, merged deterministically below.
    type Row = (BTreeSet<NodeId>, u64);
    let run_chunk = |lo: u64, hi: u64| -> Result<Vec<Row>> {
        let mut rows = Vec::new();
        for mask in lo..hi {
            let s = strategy_at(mask);
            match eval(&s) {
                Ok((value, _, _)) => rows.push((s, value)),
                Err(Error::Validation(_)) if mask != 0 => {}
                Err(e) => return Err(e),
            }
        }
        Ok(rows)
    };

    let threads = opts.threads.max(1).min(n_masks as usize);
    let mut rows: Vec<Row> = Vec::new();
    if threads <= 1 {
        rows = run_chunk(0, n_masks)?;
    } else {
        let chunk = n_masks.div_ceil(threads as u64);
        let results = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads as u64)
                .map(|t| {
                    let lo = t * chunk;
                    let hi = ((t + 1) * chunk).min(n_masks);
                    scope.spawn(move || run_chunk(lo, hi.max(lo)))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("solver worker panicked"))
                .collect::<Vec<_>>()
        });
        for r in results {
            rows.extend(r?);
        }
    }

    let (best_set, best_value) = rows
        .iter()
        .max_by(|(sa, va), (sb, vb)| va.cmp(vb).then_with(|| sb.cmp(sa)))
        .cloned()
        .ok_or_else(|| Error::Validation("no admissible strategy".into()))?;
    let (_, internal, external) = eval(&best_set)?;

    let k = opts.decision_k.or(inst.threshold());
    let table = opts
        .with_table
        .then(|| rows.into_iter().map(|(s, v)| (Strategy(s), v)).collect());
    Ok(LeaderReport {
        best_value,
        best_strategy: Strategy(best_set),
        internal,
        external,
        decision: k.map(|k| best_value >= k),
        table,
    })
}

/// Value of every S ⊆ L, in ascending subset-mask order over the sorted
/// leader list (so S = ∅ comes first).
pub fn enumerate_strategy_table(
    inst: &KepInstance,
    caps: &Caps,
) -> Result<Vec<(Strategy, u64)>> {
    let leaders = inst.leader_nodes();
    Caps::check("leader nodes", leaders.len(), caps.leader_nodes)?;
    let mut table = Vec::with_capacity(1 << leaders.len());
    for mask in 0u64..(1 << leaders.len()) {
        let s: BTreeSet<NodeId> = leaders
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &id)| id)
            .collect();
        let (value, _, _) = evaluate(inst, &s, caps)?;
        table.push((Strategy(s), value));
    }
    Ok(table)
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    best_value: u64,
    best_strategy: Vec<u32>,
    decision: Option<bool>,
    table: Option<Vec<TableRowJson>>,
}

#[derive(Serialize, Deserialize)]
struct TableRowJson {
    strategy: Vec<u32>,
    value: u64,
}

pub fn report_to_json(report: &LeaderReport, pretty: bool) -> String {
    let raw = ReportJson {
        best_value: report.best_value,
        best_strategy: report.best_strategy.nodes().iter().map(|id| id.0).collect(),
        decision: report.decision,
        table: report.table.as_ref().map(|rows| {
            rows.iter()
                .map(|(s, v)| TableRowJson {
                    strategy: s.nodes().iter().map(|id| id.0).collect(),
                    value: *v,
                })
                .collect()
        }),
    };
    let mut text = if pretty {
        serde_json::to_string_pretty(&raw).expect("report serializes")
    } else {
        serde_json::to_string(&raw).expect("report serializes")
    };
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::simple_instance;

    // Leaders 0,1 can trade internally or feed two 3-cycles
    // that each return one leader transplant.
    fn internal_trade_pool() -> KepInstance {
        simple_instance(4, 2, &[(0, 1), (1, 0), (0, 2), (2, 3), (3, 0), (1, 2), (3, 1)], 3)
            .unwrap()
    }

    // Leader 2 is internally unmatched but withholding
    // it still pays.
    fn unmatched_leader_pool() -> KepInstance {
        simple_instance(5, 3, &[(0, 1), (1, 3), (3, 0), (2, 3), (3, 4), (4, 2)], 3).unwrap()
    }

    fn ids(v: &[u32]) -> BTreeSet<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    #[test]
    fn no_leaders_value_zero() {
        let inst = simple_instance(2, 0, &[(0, 1), (1, 0)], 2).unwrap();
        let v = leader_value(&inst, &Strategy::empty(), &Caps::default()).unwrap();
        assert_eq!(v, 0);
    }

    #[test]
    fn full_withholding_scores_two() {
        let inst = internal_trade_pool();
        let s = Strategy::new(&inst, ids(&[0, 1])).unwrap();
        assert_eq!(leader_value(&inst, &s, &Caps::default()).unwrap(), 2);
    }

    #[test]
    fn empty_strategy_scores_one() {
        let inst = internal_trade_pool();
        assert_eq!(
            leader_value(&inst, &Strategy::empty(), &Caps::default()).unwrap(),
            1
        );
    }

    #[test]
    fn strategy_rejects_follower_node() {
        let inst = internal_trade_pool();
        assert!(Strategy::new(&inst, ids(&[2])).is_err());
        assert!(Strategy::new(&inst, ids(&[9])).is_err());
    }

    #[test]
    fn exact_internal_trade_pool() {
        let report = solve_exact(&internal_trade_pool(), &Caps::default()).unwrap();
        assert_eq!(report.best_value, 2);
        assert_eq!(report.best_strategy.nodes(), &ids(&[0, 1]));
        assert_eq!(report.decision, None);
    }

    #[test]
    fn exact_withholds_unmatched_node() {
        let inst = unmatched_leader_pool();
        let report = solve_exact(&inst, &Caps::default()).unwrap();
        assert_eq!(report.best_value, 2);
        assert_eq!(report.best_strategy.nodes(), &ids(&[2]));
        // Withheld node 2 is internally unmatched.
        assert_eq!(report.internal.size, 0);
        assert_eq!(
            leader_value(&inst, &Strategy::empty(), &Caps::default()).unwrap(),
            1
        );
    }

    #[test]
    fn decision_respects_threshold() {
        let inst = internal_trade_pool().with_threshold(Some(2));
        assert_eq!(solve_exact(&inst, &Caps::default()).unwrap().decision, Some(true));
        let inst = internal_trade_pool().with_threshold(Some(3));
        assert_eq!(solve_exact(&inst, &Caps::default()).unwrap().decision, Some(false));
    }

    #[test]
    fn internal_trade_table() {
        let table = enumerate_strategy_table(&internal_trade_pool(), &Caps::default()).unwrap();
        let got: Vec<(Vec<u32>, u64)> = table
            .iter()
            .map(|(s, v)| (s.nodes().iter().map(|id| id.0).collect(), *v))
            .collect();
        assert_eq!(
            got,
            vec![
                (vec![], 1),
                (vec![0], 1),
                (vec![1], 1),
                (vec![0, 1], 2),
            ]
        );
    }

    #[test]
    fn unmatched_leader_table_max_at_m() {
        let table = enumerate_strategy_table(&unmatched_leader_pool(), &Caps::default()).unwrap();
        assert_eq!(table.len(), 8);
        let best = table.iter().max_by_key(|(_, v)| *v).unwrap();
        assert_eq!(best.0.nodes(), &ids(&[2]));
        assert_eq!(best.1, 2);
    }

    #[test]
    fn single_leader_table_two_rows() {
        let inst = simple_instance(2, 1, &[(0, 1), (1, 0)], 2).unwrap();
        assert_eq!(enumerate_strategy_table(&inst, &Caps::default()).unwrap().len(), 2);
    }

    #[test]
    fn k2_rejects_other_k() {
        let err = solve_k2(&internal_trade_pool(), &Caps::default()).unwrap_err();
        assert!(err.to_string().contains("K must be 2"));
    }

    #[test]
    fn k2_no_paired_arcs() {
        let inst = simple_instance(3, 2, &[(0, 1), (1, 2), (2, 0)], 2).unwrap();
        let report = solve_k2(&inst, &Caps::default()).unwrap();
        assert_eq!(report.best_value, 0);
        assert!(report.best_strategy.is_empty());
    }

    #[test]
    fn k2_internal_pair_wins() {
        // l1=0, l2=1, f1=2; edges {l1,l2}, {l2,f1}.
        let inst = simple_instance(3, 2, &[(0, 1), (1, 0), (1, 2), (2, 1)], 2).unwrap();
        let report = solve_k2(&inst, &Caps::default()).unwrap();
        assert_eq!(report.best_value, 2);
        assert_eq!(report.best_strategy.nodes(), &ids(&[0, 1]));
    }

    #[test]
    fn k2_path_leader_never_covered() {
        // l1=0, f1=1, f2=2; the adversarial follower matches {f1,f2}.
        let inst = simple_instance(3, 1, &[(0, 1), (1, 0), (1, 2), (2, 1)], 2).unwrap();
        let report = solve_k2(&inst, &Caps::default()).unwrap();
        assert_eq!(report.best_value, 0);
    }

    #[test]
    fn k2_matches_exact_on_fixture() {
        let inst = simple_instance(4, 2, &[(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2)], 2)
            .unwrap();
        let exact = solve_exact(&inst, &Caps::default()).unwrap();
        let fast = solve_k2(&inst, &Caps::default()).unwrap();
        assert_eq!(exact.best_value, fast.best_value);
    }

    #[test]
    fn threaded_solve_matches_single() {
        let inst = unmatched_leader_pool();
        let single = solve_exact(&inst, &Caps::default()).unwrap();
        let opts = SolveOptions {
            threads: 4,
            ..SolveOptions::default()
        };
        let multi = solve_exact_opts(&inst, &Caps::default(), &opts).unwrap();
        assert_eq!(single.best_value, multi.best_value);
        assert_eq!(single.best_strategy, multi.best_strategy);
    }

    #[test]
    fn report_json_shape() {
        let inst = internal_trade_pool().with_threshold(Some(2));
        let report = solve_exact(&inst, &Caps::default()).unwrap();
        let text = report_to_json(&report, false);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["best_value"], 2);
        assert_eq!(v["best_strategy"], serde_json::json!([0, 1]));
        assert_eq!(v["decision"], serde_json::json!(true));
        assert_eq!(v["table"], serde_json::Value::Null);
    }
}
