//! Undirected projection of a directed instance, exact maximum-weight
//! matching on general graphs, and the K=2 adversarial follower oracle.
//!
//! The matcher is a port of the Galil/Edmonds blossom primal-dual algorithm
//! (after Joris van Rantwijk's reference implementation), specialized to
//! integer weights. Witness selection is made deterministic on top of it by
//! greedily forcing the smallest edges that still attain the optimum.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Cycle, CyclePacking, KepInstance, NodeId};
use crate::packing::PackingResult;

/// Undirected weighted graph used on the K=2 path.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatchingGraph {
    nodes: BTreeSet<NodeId>,
    edges: BTreeMap<(NodeId, NodeId), i64>,
}

impl MatchingGraph {
    pub fn new() -> Self {
        MatchingGraph::default()
    }

    pub fn add_node(&mut self, id: NodeId) {
        self.nodes.insert(id);
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, weight: i64) -> Result<()> {
        if u == v {
            return Err(Error::Validation(format!("self-edge on node {u}")));
        }
        self.nodes.insert(u);
        self.nodes.insert(v);
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.insert(key, weight);
        Ok(())
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, i64)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Subgraph on `keep`, preserving weights.
    pub fn induced(&self, keep: &BTreeSet<NodeId>) -> MatchingGraph {
        let mut g = MatchingGraph::new();
        for &id in self.nodes.intersection(keep) {
            g.add_node(id);
        }
        for (&(u, v), &w) in &self.edges {
            if keep.contains(&u) && keep.contains(&v) {
                g.edges.insert((u, v), w);
            }
        }
        g
    }

    /// Same graph with every weight replaced by `f(u, v)`.
    pub fn reweighted(&self, mut f: impl FnMut(NodeId, NodeId) -> i64) -> MatchingGraph {
        let mut g = self.clone();
        for (&(u, v), w) in g.edges.iter_mut() {
            *w = f(u, v);
        }
        g
    }
}

/// Project a directed instance onto the undirected graph whose edges are
/// the mutual arc pairs; weights start at 1.
pub fn undirected_projection(inst: &KepInstance) -> MatchingGraph {
    let mut g = MatchingGraph::new();
    for id in inst.node_ids() {
        g.add_node(id);
    }
    for &(u, v) in inst.arcs() {
        if u < v && inst.has_arc(v, u) {
            g.add_edge(u, v, 1).expect("arc endpoints are distinct");
        }
    }
    g
}

/// Exact maximum total-weight matching; among all optima, the
/// lexicographically smallest edge set. Edges of non-positive weight never
/// help the objective and are ignored.
pub fn max_weight_matching(g: &MatchingGraph) -> BTreeSet<(NodeId, NodeId)> {
    let nodes: Vec<NodeId> = g.nodes.iter().copied().collect();
    let index: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let edges: Vec<(usize, usize, i64)> = g
        .edges
        .iter()
        .filter(|(_, &w)| w > 0)
        .map(|(&(u, v), &w)| (index[&u], index[&v], w))
        .collect();

    let mut target = matching_value(nodes.len(), &edges);
    let mut removed = vec![false; nodes.len()];
    let mut chosen = BTreeSet::new();
    let mut from = 0;
    while target > 0 {
        let mut found = None;
        for (k, &(u, v, w)) in edges.iter().enumerate().skip(from) {
            if removed[u] || removed[v] {
                continue;
            }
            let rest: Vec<(usize, usize, i64)> = edges
                .iter()
                .filter(|&&(a, b, _)| !removed[a] && !removed[b] && a != u && a != v && b != u && b != v)
                .copied()
                .collect();
            if w + matching_value(nodes.len(), &rest) == target {
                found = Some((k, u, v, w));
                break;
            }
        }
        let (k, u, v, w) = found.expect("residual optimum always contains a forceable edge");
        removed[u] = true;
        removed[v] = true;
        chosen.insert((nodes[u], nodes[v]));
        target -= w;
        from = k + 1;
    }
    chosen
}

/// Follower oracle for K=2: maximum-cardinality matching minimizing the
/// matched U-nodes, realized by the scalarized weights `C - |e ∩ U|` with
/// `C = 2(|V|+1)`, which makes cardinality dominate U-coverage.
pub fn k2_adversarial_matching(g: &MatchingGraph, u: &BTreeSet<NodeId>) -> PackingResult {
    let c = 2 * (g.num_nodes() as i64 + 1);
    let weighted = g.reweighted(|a, b| {
        c - u.contains(&a) as i64 - u.contains(&b) as i64
    });
    let matching = max_weight_matching(&weighted);
    let cycles = matching
        .into_iter()
        .map(|(a, b)| Cycle::from_canonical_unchecked(vec![a, b]))
        .collect();
    let packing = CyclePacking::new(cycles).expect("matching edges are disjoint");
    PackingResult::from_packing(packing, u)
}

/// Weight of an optimal matching.
fn matching_value(n: usize, edges: &[(usize, usize, i64)]) -> i64 {
    let mate = blossom::max_weight_matching_mates(n, edges);
    edges
        .iter()
        .filter(|&&(u, v, _)| mate[u] == v)
        .map(|&(_, _, w)| w)
        .sum()
}

/// Blossom-algorithm maximum weight matching.
///
/// Direct port of the van Rantwijk reference implementation (O(n^3));
/// vertices are `0..n`, non-trivial blossoms `n..2n`. Duals and slacks are
/// pre-multiplied by two so everything stays integral.
mod blossom {
    const SENTINEL: usize = usize::MAX;

    pub fn max_weight_matching_mates(n: usize, edges: &[(usize, usize, i64)]) -> Vec<usize> {
        if edges.is_empty() {
            return vec![SENTINEL; n];
        }
        Solver::new(n, edges).solve()
    }

    struct Solver<'a> {
        nvertex: usize,
        nedge: usize,
        edges: &'a [(usize, usize, i64)],
        endpoint: Vec<usize>,
        neighbend: Vec<Vec<usize>>,
        mate: Vec<usize>,
        label: Vec<usize>,
        labelend: Vec<usize>,
        inblossom: Vec<usize>,
        blossomparent: Vec<usize>,
        blossomchilds: Vec<Vec<usize>>,
        blossombase: Vec<usize>,
        blossomendps: Vec<Vec<usize>>,
        bestedge: Vec<usize>,
        blossombestedges: Vec<Vec<usize>>,
        unusedblossoms: Vec<usize>,
        dualvar: Vec<i64>,
        allowedge: Vec<bool>,
        queue: Vec<usize>,
    }

    impl<'a> Solver<'a> {
        fn new(n: usize, edges: &'a [(usize, usize, i64)]) -> Self {
            let nvertex = n;
            let nedge = edges.len();
            let maxweight = edges.iter().map(|e| e.2).max().unwrap().max(0);
            let endpoint = (0..2 * nedge)
                .map(|p| if p % 2 == 0 { edges[p / 2].0 } else { edges[p / 2].1 })
                .collect();
            let mut neighbend = vec![vec![]; nvertex];
            for (k, &(i, j, _)) in edges.iter().enumerate() {
                assert!(i != j && i < nvertex && j < nvertex);
                neighbend[i].push(2 * k + 1);
                neighbend[j].push(2 * k);
            }
            let mut blossombase: Vec<usize> = (0..nvertex).collect();
            blossombase.extend(vec![SENTINEL; nvertex]);
            let mut dualvar = vec![maxweight; nvertex];
            dualvar.extend(vec![0; nvertex]);
            Solver {
                nvertex,
                nedge,
                edges,
                endpoint,
                neighbend,
                mate: vec![SENTINEL; nvertex],
                label: vec![0; 2 * nvertex],
                labelend: vec![SENTINEL; 2 * nvertex],
                inblossom: (0..nvertex).collect(),
                blossomparent: vec![SENTINEL; 2 * nvertex],
                blossomchilds: vec![vec![]; 2 * nvertex],
                blossombase,
                blossomendps: vec![vec![]; 2 * nvertex],
                bestedge: vec![SENTINEL; 2 * nvertex],
                blossombestedges: vec![vec![]; 2 * nvertex],
                unusedblossoms: (nvertex..2 * nvertex).collect(),
                dualvar,
                allowedge: vec![false; nedge],
                queue: vec![],
            }
        }

        fn slack(&self, k: usize) -> i64 {
            let (i, j, wt) = self.edges[k];
            self.dualvar[i] + self.dualvar[j] - 2 * wt
        }

        fn blossom_leaves(&self, b: usize) -> Vec<usize> {
            let mut leaves = vec![];
            if b < self.nvertex {
                leaves.push(b);
            } else {
                for &t in &self.blossomchilds[b] {
                    if t < self.nvertex {
                        leaves.push(t);
                    } else {
                        leaves.extend(self.blossom_leaves(t));
                    }
                }
            }
            leaves
        }

        fn assign_label(&mut self, w: usize, t: usize, p: usize) {
            let b = self.inblossom[w];
            assert!(self.label[w] == 0 && self.label[b] == 0);
            self.label[w] = t;
            self.label[b] = t;
            self.labelend[w] = p;
            self.labelend[b] = p;
            self.bestedge[w] = SENTINEL;
            self.bestedge[b] = SENTINEL;
            if t == 1 {
                let leaves = self.blossom_leaves(b);
                self.queue.extend(leaves);
            } else if t == 2 {
                let base = self.blossombase[b];
                assert!(self.mate[base] != SENTINEL);
                let mbase = self.mate[base];
                let ep = self.endpoint[mbase];
                self.assign_label(ep, 1, mbase ^ 1);
            }
        }

        fn scan_blossom(&mut self, v: usize, w: usize) -> usize {
            let mut path = vec![];
            let mut base = SENTINEL;
            let mut v = v;
            let mut w = w;
            while v != SENTINEL || w != SENTINEL {
                let mut b = self.inblossom[v];
                if self.label[b] & 4 != 0 {
                    base = self.blossombase[b];
                    break;
                }
                assert!(self.label[b] == 1);
                path.push(b);
                self.label[b] = 5;
                assert!(self.labelend[b] == self.mate[self.blossombase[b]]);
                if self.labelend[b] == SENTINEL {
                    v = SENTINEL;
                } else {
                    v = self.endpoint[self.labelend[b]];
                    b = self.inblossom[v];
                    assert!(self.label[b] == 2);
                    assert!(self.labelend[b] != SENTINEL);
                    v = self.endpoint[self.labelend[b]];
                }
                if w != SENTINEL {
                    std::mem::swap(&mut v, &mut w);
                }
            }
            for b in path {
                self.label[b] = 1;
            }
            base
        }

        fn add_blossom(&mut self, base: usize, k: usize) {
            let (mut v, mut w, _) = self.edges[k];
            let bb = self.inblossom[base];
            let mut bv = self.inblossom[v];
            let mut bw = self.inblossom[w];

            let b = self.unusedblossoms.pop().unwrap();
            self.blossombase[b] = base;
            self.blossomparent[b] = SENTINEL;
            self.blossomparent[bb] = b;

            self.blossomchilds[b] = vec![];
            self.blossomendps[b] = vec![];

            while bv != bb {
                self.blossomparent[bv] = b;
                self.blossomchilds[b].push(bv);
                self.blossomendps[b].push(self.labelend[bv]);
                assert!(
                    self.label[bv] == 2
                        || (self.label[bv] == 1
                            && self.labelend[bv] == self.mate[self.blossombase[bv]])
                );
                assert!(self.labelend[bv] != SENTINEL);
                v = self.endpoint[self.labelend[bv]];
                bv = self.inblossom[v];
            }
            self.blossomchilds[b].push(bb);
            self.blossomchilds[b].reverse();
            self.blossomendps[b].reverse();
            self.blossomendps[b].push(2 * k);

            while bw != bb {
                self.blossomparent[bw] = b;
                self.blossomchilds[b].push(bw);
                self.blossomendps[b].push(self.labelend[bw] ^ 1);
                assert!(
                    self.label[bw] == 2
                        || (self.label[bw] == 1
                            && self.labelend[bw] == self.mate[self.blossombase[bw]])
                );
                assert!(self.labelend[bw] != SENTINEL);
                w = self.endpoint[self.labelend[bw]];
                bw = self.inblossom[w];
            }

            assert!(self.label[bb] == 1);
            self.label[b] = 1;
            self.labelend[b] = self.labelend[bb];
            self.dualvar[b] = 0;

            for v in self.blossom_leaves(b) {
                if self.label[self.inblossom[v]] == 2 {
                    self.queue.push(v);
                }
                self.inblossom[v] = b;
            }

            // Compute the least-slack edges to neighbouring S-blossoms.
            let mut bestedgeto = vec![SENTINEL; 2 * self.nvertex];
            for bv in self.blossomchilds[b].clone() {
                let nblists: Vec<Vec<usize>> = if self.blossombestedges[bv].is_empty() {
                    self.blossom_leaves(bv)
                        .into_iter()
                        .map(|v| self.neighbend[v].iter().map(|p| p / 2).collect())
                        .collect()
                } else {
                    vec![self.blossombestedges[bv].clone()]
                };
                for nblist in nblists {
                    for k in nblist {
                        let (mut i, mut j, _) = self.edges[k];
                        if self.inblossom[j] == b {
                            std::mem::swap(&mut i, &mut j);
                        }
                        let bj = self.inblossom[j];
                        let bestto = bestedgeto[bj];
                        if bj != b
                            && self.label[bj] == 1
                            && (bestto == SENTINEL || self.slack(k) < self.slack(bestto))
                        {
                            bestedgeto[bj] = k;
                        }
                        let _ = i;
                    }
                }
                self.blossombestedges[bv] = vec![];
                self.bestedge[bv] = SENTINEL;
            }
            self.blossombestedges[b] = bestedgeto
                .into_iter()
                .filter(|&k| k != SENTINEL)
                .collect();

            self.bestedge[b] = SENTINEL;
            for &k in &self.blossombestedges[b] {
                let be = self.bestedge[b];
                if be == SENTINEL || self.slack(k) < self.slack(be) {
                    self.bestedge[b] = k;
                }
            }
        }

        fn expand_blossom(&mut self, b: usize, endstage: bool) {
            for s in self.blossomchilds[b].clone() {
                self.blossomparent[s] = SENTINEL;
                if s < self.nvertex {
                    self.inblossom[s] = s;
                } else if endstage && self.dualvar[s] == 0 {
                    self.expand_blossom(s, endstage);
                } else {
                    for v in self.blossom_leaves(s) {
                        self.inblossom[v] = s;
                    }
                }
            }

            if !endstage && self.label[b] == 2 {
                assert!(self.labelend[b] != SENTINEL);
                let entrychild = self.inblossom[self.endpoint[self.labelend[b] ^ 1]];
                let mut j = self.blossomchilds[b]
                    .iter()
                    .position(|&r| r == entrychild)
                    .unwrap() as i32;
                let jstep: i32;
                let endptrick: usize;
                if j & 1 != 0 {
                    j -= self.blossomchilds[b].len() as i32;
                    jstep = 1;
                    endptrick = 0;
                } else {
                    jstep = -1;
                    endptrick = 1;
                }

                let mut p = self.labelend[b];
                while j != 0 {
                    self.label[self.endpoint[p ^ 1]] = 0;
                    let q = wrap_index(&self.blossomendps[b], j - endptrick as i32) ^ endptrick;
                    self.label[self.endpoint[q ^ 1]] = 0;
                    let ep = self.endpoint[p ^ 1];
                    self.assign_label(ep, 2, p);

                    self.allowedge[q / 2] = true;
                    j += jstep;
                    p = wrap_index(&self.blossomendps[b], j - endptrick as i32) ^ endptrick;
                    self.allowedge[p / 2] = true;
                    j += jstep;
                }

                let bv = wrap_index(&self.blossomchilds[b], j);
                self.label[self.endpoint[p ^ 1]] = 2;
                self.label[bv] = 2;
                self.labelend[self.endpoint[p ^ 1]] = p;
                self.labelend[bv] = p;
                self.bestedge[bv] = SENTINEL;

                j += jstep;
                while wrap_index(&self.blossomchilds[b], j) != entrychild {
                    let bv = wrap_index(&self.blossomchilds[b], j);
                    if self.label[bv] == 1 {
                        j += jstep;
                        continue;
                    }
                    let mut v = SENTINEL;
                    for t in self.blossom_leaves(bv) {
                        v = t;
                        if self.label[v] != 0 {
                            break;
                        }
                    }
                    if v != SENTINEL && self.label[v] != 0 {
                        assert!(self.label[v] == 2);
                        assert!(self.inblossom[v] == bv);
                        self.label[v] = 0;
                        self.label[self.endpoint[self.mate[self.blossombase[bv]]]] = 0;
                        let lblend = self.labelend[v];
                        self.assign_label(v, 2, lblend);
                    }
                    j += jstep;
                }
            }

            self.label[b] = SENTINEL;
            self.labelend[b] = SENTINEL;
            self.blossombase[b] = SENTINEL;
            self.bestedge[b] = SENTINEL;
            self.blossomchilds[b] = vec![];
            self.blossomendps[b] = vec![];
            self.blossombestedges[b] = vec![];
            self.unusedblossoms.push(b);
        }

        fn augment_blossom(&mut self, b: usize, v: usize) {
            let mut t = v;
            while self.blossomparent[t] != b {
                t = self.blossomparent[t];
            }
            if t >= self.nvertex {
                self.augment_blossom(t, v);
            }

            let i = self.blossomchilds[b].iter().position(|&r| r == t).unwrap();
            let mut j = i as i32;
            let jstep: i32;
            let endptrick: usize;
            if i & 1 != 0 {
                j -= self.blossomchilds[b].len() as i32;
                jstep = 1;
                endptrick = 0;
            } else {
                jstep = -1;
                endptrick = 1;
            }

            while j != 0 {
                j += jstep;
                let mut t = wrap_index(&self.blossomchilds[b], j);
                let p = wrap_index(&self.blossomendps[b], j - endptrick as i32) ^ endptrick;
                if t >= self.nvertex {
                    let endp = self.endpoint[p];
                    self.augment_blossom(t, endp);
                }
                j += jstep;
                t = wrap_index(&self.blossomchilds[b], j);
                if t >= self.nvertex {
                    let endp = self.endpoint[p ^ 1];
                    self.augment_blossom(t, endp);
                }
                self.mate[self.endpoint[p]] = p ^ 1;
                self.mate[self.endpoint[p ^ 1]] = p;
            }

            self.blossomchilds[b].rotate_left(i);
            self.blossomendps[b].rotate_left(i);
            self.blossombase[b] = self.blossombase[self.blossomchilds[b][0]];
            assert!(self.blossombase[b] == v);
        }

        fn augment_matching(&mut self, k: usize) {
            let (v, w, _) = self.edges[k];
            for &(sv, pv) in &[(v, 2 * k + 1), (w, 2 * k)] {
                let mut s = sv;
                let mut p = pv;
                loop {
                    let bs = self.inblossom[s];
                    assert!(self.label[bs] == 1);
                    assert!(self.labelend[bs] == self.mate[self.blossombase[bs]]);
                    if bs >= self.nvertex {
                        self.augment_blossom(bs, s);
                    }
                    self.mate[s] = p;
                    if self.labelend[bs] == SENTINEL {
                        break;
                    }
                    let t = self.endpoint[self.labelend[bs]];
                    let bt = self.inblossom[t];
                    assert!(self.label[bt] == 2);
                    assert!(self.labelend[bt] != SENTINEL);
                    s = self.endpoint[self.labelend[bt]];
                    let j = self.endpoint[self.labelend[bt] ^ 1];
                    assert!(self.blossombase[bt] == t);
                    if bt >= self.nvertex {
                        self.augment_blossom(bt, j);
                    }
                    self.mate[j] = self.labelend[bt];
                    p = self.labelend[bt] ^ 1;
                }
            }
        }

        /// Dual-certificate check of the final matching.
        fn verify_optimum(&self) {
            for k in 0..self.nedge {
                let (i, j, wt) = self.edges[k];
                let mut s = self.dualvar[i] + self.dualvar[j] - 2 * wt;
                let mut iblossoms = vec![i];
                let mut jblossoms = vec![j];
                while self.blossomparent[*iblossoms.last().unwrap()] != SENTINEL {
                    let ix = *iblossoms.last().unwrap();
                    iblossoms.push(self.blossomparent[ix]);
                }
                while self.blossomparent[*jblossoms.last().unwrap()] != SENTINEL {
                    let jx = *jblossoms.last().unwrap();
                    jblossoms.push(self.blossomparent[jx]);
                }
                iblossoms.reverse();
                jblossoms.reverse();
                for (&bi, &bj) in iblossoms.iter().zip(jblossoms.iter()) {
                    if bi != bj {
                        break;
                    }
                    s += 2 * self.dualvar[bi];
                }
                assert!(s >= 0);
                if self.mate[i] / 2 == k || self.mate[j] / 2 == k {
                    assert!(self.mate[i] / 2 == k && self.mate[j] / 2 == k);
                    assert!(s == 0);
                }
            }
            for v in 0..self.nvertex {
                assert!(self.mate[v] != SENTINEL || self.dualvar[v] == 0);
            }
        }

        fn solve(mut self) -> Vec<usize> {
            for _ in 0..self.nvertex {
                self.label = vec![0; 2 * self.nvertex];
                self.bestedge = vec![SENTINEL; 2 * self.nvertex];
                for ll in self.nvertex..2 * self.nvertex {
                    self.blossombestedges[ll] = vec![];
                }
                self.allowedge = vec![false; self.nedge];
                self.queue = vec![];

                for v in 0..self.nvertex {
                    if self.mate[v] == SENTINEL && self.label[self.inblossom[v]] == 0 {
                        self.assign_label(v, 1, SENTINEL);
                    }
                }

                let mut augmented = false;
                loop {
                    while !self.queue.is_empty() && !augmented {
                        let v = self.queue.pop().unwrap();
                        assert!(self.label[self.inblossom[v]] == 1);
                        let mut kslack = 0;
                        for p in self.neighbend[v].clone() {
                            let k = p / 2;
                            let w = self.endpoint[p];
                            if self.inblossom[v] == self.inblossom[w] {
                                continue;
                            }
                            if !self.allowedge[k] {
                                kslack = self.slack(k);
                                if kslack <= 0 {
                                    self.allowedge[k] = true;
                                }
                            }
                            if self.allowedge[k] {
                                if self.label[self.inblossom[w]] == 0 {
                                    self.assign_label(w, 2, p ^ 1);
                                } else if self.label[self.inblossom[w]] == 1 {
                                    let base = self.scan_blossom(v, w);
                                    if base != SENTINEL {
                                        self.add_blossom(base, k);
                                    } else {
                                        self.augment_matching(k);
                                        augmented = true;
                                        break;
                                    }
                                } else if self.label[w] == 0 {
                                    assert!(self.label[self.inblossom[w]] == 2);
                                    self.label[w] = 2;
                                    self.labelend[w] = p ^ 1;
                                }
                            } else if self.label[self.inblossom[w]] == 1 {
                                let b = self.inblossom[v];
                                if self.bestedge[b] == SENTINEL
                                    || kslack < self.slack(self.bestedge[b])
                                {
                                    self.bestedge[b] = k;
                                }
                            } else if self.label[w] == 0
                                && (self.bestedge[w] == SENTINEL
                                    || kslack < self.slack(self.bestedge[w]))
                            {
                                self.bestedge[w] = k;
                            }
                        }
                    }

                    if augmented {
                        break;
                    }

                    // No augmenting path under the current duals; pump slack.
                    let mut deltatype = 1;
                    let mut delta = *self.dualvar[..self.nvertex].iter().min().unwrap();
                    let mut deltaedge = 0;
                    let mut deltablossom = 0;

                    for v in 0..self.nvertex {
                        if self.label[self.inblossom[v]] == 0 && self.bestedge[v] != SENTINEL {
                            let d = self.slack(self.bestedge[v]);
                            if d < delta {
                                delta = d;
                                deltatype = 2;
                                deltaedge = self.bestedge[v];
                            }
                        }
                    }
                    for b in 0..2 * self.nvertex {
                        if self.blossomparent[b] == SENTINEL
                            && self.label[b] == 1
                            && self.bestedge[b] != SENTINEL
                        {
                            let d = self.slack(self.bestedge[b]) / 2;
                            if d < delta {
                                delta = d;
                                deltatype = 3;
                                deltaedge = self.bestedge[b];
                            }
                        }
                    }
                    for b in self.nvertex..2 * self.nvertex {
                        if self.blossombase[b] != SENTINEL
                            && self.blossomparent[b] == SENTINEL
                            && self.label[b] == 2
                            && self.dualvar[b] < delta
                        {
                            delta = self.dualvar[b];
                            deltatype = 4;
                            deltablossom = b;
                        }
                    }

                    for v in 0..self.nvertex {
                        match self.label[self.inblossom[v]] {
                            0 => {}
                            1 => self.dualvar[v] -= delta,
                            2 => self.dualvar[v] += delta,
                            _ => unreachable!("unexpected vertex label"),
                        }
                    }
                    for b in self.nvertex..2 * self.nvertex {
                        if self.blossombase[b] != SENTINEL && self.blossomparent[b] == SENTINEL {
                            match self.label[b] {
                                0 => {}
                                1 => self.dualvar[b] += delta,
                                2 => self.dualvar[b] -= delta,
                                _ => unreachable!("unexpected blossom label"),
                            }
                        }
                    }

                    match deltatype {
                        1 => break,
                        2 => {
                            let (mut i, j, _) = self.edges[deltaedge];
                            self.allowedge[deltaedge] = true;
                            if self.label[self.inblossom[i]] == 0 {
                                i = j;
                            }
                            assert!(self.label[self.inblossom[i]] == 1);
                            self.queue.push(i);
                        }
                        3 => {
                            self.allowedge[deltaedge] = true;
                            let (i, _, _) = self.edges[deltaedge];
                            assert!(self.label[self.inblossom[i]] == 1);
                            self.queue.push(i);
                        }
                        4 => self.expand_blossom(deltablossom, false),
                        _ => unreachable!("unexpected delta type"),
                    }
                }

                if !augmented {
                    break;
                }

                for b in self.nvertex..2 * self.nvertex {
                    if self.blossomparent[b] == SENTINEL
                        && self.blossombase[b] != SENTINEL
                        && self.label[b] == 1
                        && self.dualvar[b] == 0
                    {
                        self.expand_blossom(b, true);
                    }
                }
            }

            self.verify_optimum();

            let mut mate = self.mate;
            for v in 0..self.nvertex {
                if mate[v] != SENTINEL {
                    mate[v] = self.endpoint[mate[v]];
                }
            }
            for v in 0..self.nvertex {
                assert!(mate[v] == SENTINEL || mate[mate[v]] == v);
            }
            mate
        }
    }

    /// Python-style indexing: negative indices count from the back.
    fn wrap_index(v: &[usize], index: i32) -> usize {
        if index >= 0 {
            v[index as usize]
        } else {
            v[v.len() - (-index) as usize]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::simple_instance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(edges: &[(u32, u32, i64)]) -> MatchingGraph {
        let mut graph = MatchingGraph::new();
        for &(u, v, w) in edges {
            graph.add_edge(NodeId(u), NodeId(v), w).unwrap();
        }
        graph
    }

    fn edge_set(edges: &[(u32, u32)]) -> BTreeSet<(NodeId, NodeId)> {
        edges.iter().map(|&(u, v)| (NodeId(u), NodeId(v))).collect()
    }

    /// Exhaustive maximum-weight matching, the independent oracle.
    fn brute_value(edges: &[(u32, u32, i64)]) -> i64 {
        fn go(edges: &[(u32, u32, i64)], used: u64) -> i64 {
            match edges.split_first() {
                None => 0,
                Some((&(u, v, w), rest)) => {
                    let skip = go(rest, used);
                    if used & (1 << u) == 0 && used & (1 << v) == 0 {
                        skip.max(w + go(rest, used | (1 << u) | (1 << v)))
                    } else {
                        skip
                    }
                }
            }
        }
        go(edges, 0).max(0)
    }

    #[test]
    fn empty_graph_empty_matching() {
        assert!(max_weight_matching(&MatchingGraph::new()).is_empty());
    }

    #[test]
    fn triangle_lex_smallest_edge() {
        let m = max_weight_matching(&g(&[(0, 1, 1), (0, 2, 1), (1, 2, 1)]));
        assert_eq!(m, edge_set(&[(0, 1)]));
    }

    #[test]
    fn path_prefers_heavier_edge() {
        let m = max_weight_matching(&g(&[(0, 1, 1), (1, 2, 3)]));
        assert_eq!(m, edge_set(&[(1, 2)]));
    }

    // Classic blossom stress cases from the reference implementation's
    // test suite (values checked against the exhaustive oracle).
    #[test]
    fn blossom_reference_cases() {
        let cases: Vec<Vec<(u32, u32, i64)>> = vec![
            vec![(1, 2, 8), (1, 3, 9), (2, 3, 10), (3, 4, 7)],
            vec![(1, 2, 9), (1, 3, 8), (2, 3, 10), (1, 4, 5), (4, 5, 4), (1, 6, 3)],
            vec![(1, 2, 9), (1, 3, 9), (2, 3, 10), (2, 4, 8), (3, 5, 8), (4, 5, 10), (5, 6, 6)],
            vec![
                (1, 2, 10),
                (1, 7, 10),
                (2, 3, 12),
                (3, 4, 20),
                (3, 5, 20),
                (4, 5, 25),
                (5, 6, 10),
                (6, 7, 10),
                (7, 8, 8),
            ],
            vec![
                (1, 2, 8),
                (1, 3, 8),
                (2, 3, 10),
                (2, 4, 12),
                (3, 5, 12),
                (4, 5, 14),
                (4, 6, 12),
                (5, 7, 12),
                (6, 7, 14),
                (7, 8, 12),
            ],
            vec![
                (1, 2, 23),
                (1, 5, 22),
                (1, 6, 15),
                (2, 3, 25),
                (3, 4, 22),
                (4, 5, 25),
                (4, 8, 14),
                (5, 7, 13),
            ],
            vec![
                (1, 2, 45),
                (1, 5, 45),
                (2, 3, 50),
                (3, 4, 45),
                (4, 5, 50),
                (1, 6, 30),
                (3, 9, 35),
                (4, 8, 35),
                (5, 7, 26),
                (9, 10, 5),
            ],
            vec![
                (1, 2, 40),
                (1, 3, 40),
                (2, 3, 60),
                (2, 4, 55),
                (3, 5, 55),
                (4, 5, 50),
                (1, 8, 15),
                (5, 7, 30),
                (7, 6, 10),
                (8, 10, 10),
                (4, 9, 30),
            ],
        ];
        for edges in cases {
            let graph = g(&edges);
            let matching = max_weight_matching(&graph);
            let total: i64 = matching
                .iter()
                .map(|&(u, v)| graph.edges().find(|&(a, b, _)| (a, b) == (u, v)).unwrap().2)
                .sum();
            assert_eq!(total, brute_value(&edges));
        }
    }

    #[test]
    fn randomized_against_exhaustive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(2..=10u32);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v, rng.gen_range(1..=12i64)));
                    }
                }
            }
            let graph = g(&edges);
            let matching = max_weight_matching(&graph);
            let total: i64 = matching
                .iter()
                .map(|&(u, v)| graph.edges().find(|&(a, b, _)| (a, b) == (u, v)).unwrap().2)
                .sum();
            assert_eq!(total, brute_value(&edges), "edges: {edges:?}");
        }
    }

    #[test]
    fn projection_drops_one_directional_arcs() {
        let inst = simple_instance(2, 0, &[(0, 1)], 2).unwrap();
        assert_eq!(undirected_projection(&inst).num_edges(), 0);
        let inst = simple_instance(2, 0, &[(0, 1), (1, 0)], 2).unwrap();
        let proj = undirected_projection(&inst);
        assert_eq!(proj.num_edges(), 1);
        assert_eq!(proj.edges().next(), Some((NodeId(0), NodeId(1), 1)));
    }

    #[test]
    fn k2_adversarial_no_u() {
        let r = k2_adversarial_matching(&g(&[(0, 1, 1), (1, 2, 1)]), &BTreeSet::new());
        assert_eq!(r.size, 2);
        assert_eq!(r.u_covered, 0);
    }

    #[test]
    fn k2_adversarial_star_avoids_leader() {
        // Center 0, leaves 1 (in U) and 2.
        let u = BTreeSet::from([NodeId(1)]);
        let r = k2_adversarial_matching(&g(&[(0, 1, 1), (0, 2, 1)]), &u);
        assert_eq!(r.size, 2);
        assert_eq!(r.u_covered, 0);
        assert!(r.covered.contains(&NodeId(2)));
    }

    #[test]
    fn k2_adversarial_unavoidable_u_coverage() {
        // Complete bipartite 2x2 between U-nodes {0,1} and {2,3}.
        let u = BTreeSet::from([NodeId(0), NodeId(1)]);
        let graph = g(&[(0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1)]);
        let r = k2_adversarial_matching(&graph, &u);
        assert_eq!(r.size, 4);
        assert_eq!(r.u_covered, 2);
    }
}
