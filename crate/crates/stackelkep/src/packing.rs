//! Maximum-size K-cycle packings and the adversarial quantity: maximize the
//! number of covered nodes, then minimize the number of covered U-nodes.
//!
//! The search is an exact branch-and-bound over the canonically ordered
//! cycle list. The bi-level objective is scalarized as
//! `size * (|V|+1) - u_covered`, which preserves the lexicographic order
//! because `u_covered <= |V| < |V|+1`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{Cycle, CyclePacking, KepInstance, NodeId};

/// Outcome of a packing computation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingResult {
    /// Total covered nodes (the packing size).
    pub size: usize,
    pub covered: BTreeSet<NodeId>,
    /// Number of covered nodes that lie in U.
    pub u_covered: usize,
    pub packing: CyclePacking,
}

impl PackingResult {
    pub fn from_packing(packing: CyclePacking, u: &BTreeSet<NodeId>) -> Self {
        let covered = packing.covered();
        PackingResult {
            size: packing.size(),
            u_covered: covered.intersection(u).count(),
            covered,
            packing,
        }
    }
}

#[derive(Clone, Copy)]
struct MaskedCycle {
    mask: u128,
    len: usize,
    u_count: usize,
}

struct SearchSpace {
    cycles: Vec<Cycle>,
    masked: Vec<MaskedCycle>,
    /// Union of the masks of `masked[i..]`.
    suffix_union: Vec<u128>,
    scale: i64,
}

impl SearchSpace {
    fn build(
        inst: &KepInstance,
        w: &BTreeSet<NodeId>,
        u: &BTreeSet<NodeId>,
        caps: &Caps,
    ) -> Result<Self> {
        if let Some(id) = w.iter().chain(u.iter()).find(|id| id.index() >= 128) {
            return Err(Error::CapExceeded {
                what: "node id range for packing search",
                limit: 127,
                actual: id.index(),
            });
        }
        let cycles = inst.enumerate_cycles(w, caps)?;
        let u_mask = mask_of(u);
        let masked = cycles
            .iter()
            .map(|c| {
                let mask = mask_of(&c.node_set());
                MaskedCycle {
                    mask,
                    len: c.len(),
                    u_count: (mask & u_mask).count_ones() as usize,
                }
            })
            .collect::<Vec<_>>();
        let mut suffix_union = vec![0u128; masked.len() + 1];
        for i in (0..masked.len()).rev() {
            suffix_union[i] = suffix_union[i + 1] | masked[i].mask;
        }
        // Scalarization factor: strictly larger than any achievable U-count.
        let scale = inst.num_nodes() as i64 + 1;
        Ok(SearchSpace {
            cycles,
            masked,
            suffix_union,
            scale,
        })
    }

    fn objective(&self, size: usize, u_covered: usize) -> i64 {
        size as i64 * self.scale - u_covered as i64
    }
}

fn mask_of(ids: &BTreeSet<NodeId>) -> u128 {
    ids.iter().fold(0u128, |m, id| m | (1u128 << id.index()))
}

/// A maximum-size K-cycle packing of `G[W]` (U plays no role; `u_covered`
/// is reported as zero).
pub fn max_packing(inst: &KepInstance, w: &BTreeSet<NodeId>, caps: &Caps) -> Result<PackingResult> {
    adversarial_packing(inst, w, &BTreeSet::new(), caps)
}

/// Among all maximum-size K-cycle packings of `G[W]`, one minimizing the
/// number of covered U-nodes. Witness selection is deterministic: the
/// lexicographically smallest cycle set among the optima.
pub fn adversarial_packing(
    inst: &KepInstance,
    w: &BTreeSet<NodeId>,
    u: &BTreeSet<NodeId>,
    caps: &Caps,
) -> Result<PackingResult> {
    let space = SearchSpace::build(inst, w, u, caps)?;

    struct State<'a> {
        space: &'a SearchSpace,
        chosen: Vec<usize>,
        best: i64,
        best_set: Vec<usize>,
    }

    // Include-first depth-first search with strict-improvement replacement:
    // the first optimum found is the lexicographically smallest cycle set.
    fn go(s: &mut State, idx: usize, used: u128, size: usize, u_cov: usize) {
        let avail = (s.space.suffix_union[idx] & !used).count_ones() as usize;
        if s.space.objective(size + avail, u_cov) <= s.best {
            return;
        }
        if idx == s.space.masked.len() {
            let obj = s.space.objective(size, u_cov);
            if obj > s.best {
                s.best = obj;
                s.best_set = s.chosen.clone();
            }
            return;
        }
        let c = s.space.masked[idx];
        if c.mask & used == 0 {
            s.chosen.push(idx);
            go(s, idx + 1, used | c.mask, size + c.len, u_cov + c.u_count);
            s.chosen.pop();
        }
        go(s, idx + 1, used, size, u_cov);
    }

    let mut state = State {
        space: &space,
        chosen: Vec::new(),
        best: i64::MIN,
        best_set: Vec::new(),
    };
    go(&mut state, 0, 0, 0, 0);

    let cycles = state
        .best_set
        .iter()
        .map(|&i| space.cycles[i].clone())
        .collect();
    let packing = CyclePacking::new(cycles).expect("search yields disjoint cycles");
    Ok(PackingResult::from_packing(packing, u))
}

/// Every maximum-size K-cycle packing of `G[W]`, in deterministic order.
/// This is the exhaustive oracle the adversarial search is verified against.
pub fn all_optimal_packings(
    inst: &KepInstance,
    w: &BTreeSet<NodeId>,
    caps: &Caps,
) -> Result<Vec<CyclePacking>> {
    Caps::check("optimal-packing oracle node set", w.len(), caps.oracle_nodes)?;
    let space = SearchSpace::build(inst, w, &BTreeSet::new(), caps)?;
    let target = adversarial_packing(inst, w, &BTreeSet::new(), caps)?.size;

    struct State<'a> {
        space: &'a SearchSpace,
        target: usize,
        chosen: Vec<usize>,
        out: Vec<Vec<usize>>,
    }

    fn go(s: &mut State, idx: usize, used: u128, size: usize) {
        let avail = (s.space.suffix_union[idx] & !used).count_ones() as usize;
        if size + avail < s.target {
            return;
        }
        if idx == s.space.masked.len() {
            if size == s.target {
                s.out.push(s.chosen.clone());
            }
            return;
        }
        let c = s.space.masked[idx];
        if c.mask & used == 0 {
            s.chosen.push(idx);
            go(s, idx + 1, used | c.mask, size + c.len);
            s.chosen.pop();
        }
        go(s, idx + 1, used, size);
    }

    let mut state = State {
        space: &space,
        target,
        chosen: Vec::new(),
        out: Vec::new(),
    };
    go(&mut state, 0, 0, 0);

    state
        .out
        .into_iter()
        .map(|set| CyclePacking::new(set.into_iter().map(|i| space.cycles[i].clone()).collect()))
        .collect()
}

#[derive(Serialize, Deserialize)]
struct PackingJson {
    cycles: Vec<Vec<u32>>,
    size: usize,
    u_covered: usize,
}

/// Serialize a packing result: cycles in canonical rotation, sorted.
pub fn packing_to_json(result: &PackingResult) -> String {
    let raw = PackingJson {
        cycles: result
            .packing
            .cycles()
            .iter()
            .map(|c| c.nodes().iter().map(|id| id.0).collect())
            .collect(),
        size: result.size,
        u_covered: result.u_covered,
    };
    let mut s = serde_json::to_string(&raw).expect("packing serialization cannot fail");
    s.push('\n');
    s
}

/// Parse a packing file and validate it against `inst`.
pub fn packing_from_json(text: &str, inst: &KepInstance) -> Result<CyclePacking> {
    let raw: PackingJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("packing JSON: {e}")))?;
    let cycles = raw
        .cycles
        .into_iter()
        .map(|c| Cycle::new(c.into_iter().map(NodeId).collect(), inst))
        .collect::<Result<Vec<_>>>()?;
    CyclePacking::new(cycles)
}
