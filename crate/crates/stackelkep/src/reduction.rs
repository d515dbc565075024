//! The reduction from Adversarial (2,2)-SAT to Stackelberg KEP: 10-node
//! variable gadgets, clause nodes wired to β nodes by occurrence index, the
//! single extra leader node d, K = 3 and k = 4|X|+1. Also the assignment ↔
//! strategy maps, gadget-packing classification and the brute-force
//! cross-check of the whole equivalence.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{
    CyclePacking, KepInstance, Node, NodeId, Owner, Polarity, RoleLabel,
};
use crate::sat::{brute_adversarial, validate_22, AdversarialSatInstance};
use crate::solver::{leader_value, solve_exact, Strategy};

/// Bidirectional node ↔ role index for a reduced instance.
#[derive(Debug, Clone)]
pub struct RoleMap {
    by_label: BTreeMap<RoleLabel, NodeId>,
    by_node: BTreeMap<NodeId, RoleLabel>,
    x_vars: BTreeSet<u32>,
    y_vars: BTreeSet<u32>,
    deltas: BTreeMap<usize, NodeId>,
    d: NodeId,
    betas: BTreeSet<NodeId>,
}

impl RoleMap {
    /// Rebuild the map from a labeled instance; every node must carry a
    /// role label, with exactly one `d`.
    pub fn from_instance(inst: &KepInstance) -> Result<RoleMap> {
        let mut by_label = BTreeMap::new();
        let mut by_node = BTreeMap::new();
        let mut x_vars = BTreeSet::new();
        let mut y_vars = BTreeSet::new();
        let mut deltas = BTreeMap::new();
        let mut betas = BTreeSet::new();
        let mut d = None;
        for id in inst.node_ids() {
            let node = inst.node(id).unwrap();
            let label = node
                .label
                .clone()
                .ok_or_else(|| Error::Validation(format!("node {id} has no role label")))?;
            by_node.insert(id, label.clone());
            if by_label.insert(label.clone(), id).is_some() {
                return Err(Error::Validation(format!("duplicate role label `{label}`")));
            }
            let var_of = |var: &str| -> Result<u32> {
                var.parse()
                    .map_err(|_| Error::Validation(format!("non-numeric gadget variable `{var}`")))
            };
            match &label {
                RoleLabel::T { var, .. } => {
                    x_vars.insert(var_of(var)?);
                }
                RoleLabel::Tau { var, .. } => {
                    y_vars.insert(var_of(var)?);
                }
                RoleLabel::Beta { .. } => {
                    betas.insert(id);
                }
                RoleLabel::Delta { clause } => {
                    deltas.insert(*clause, id);
                }
                RoleLabel::D => {
                    if d.replace(id).is_some() {
                        return Err(Error::Validation("more than one `d` node".into()));
                    }
                }
                _ => {}
            }
        }
        let d = d.ok_or_else(|| Error::Validation("no `d` node in instance".into()))?;
        Ok(RoleMap {
            by_label,
            by_node,
            x_vars,
            y_vars,
            deltas,
            d,
            betas,
        })
    }

    pub fn node(&self, label: &RoleLabel) -> Result<NodeId> {
        self.by_label
            .get(label)
            .copied()
            .ok_or_else(|| Error::Validation(format!("no node labeled `{label}`")))
    }

    pub fn label(&self, id: NodeId) -> Option<&RoleLabel> {
        self.by_node.get(&id)
    }

    pub fn d_node(&self) -> NodeId {
        self.d
    }

    pub fn delta(&self, clause: usize) -> Option<NodeId> {
        self.deltas.get(&clause).copied()
    }

    pub fn x_vars(&self) -> &BTreeSet<u32> {
        &self.x_vars
    }

    pub fn y_vars(&self) -> &BTreeSet<u32> {
        &self.y_vars
    }

    pub fn betas(&self) -> &BTreeSet<NodeId> {
        &self.betas
    }
}

/// Packing pattern of one variable gadget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetClass {
    ConsistentTrue,
    ConsistentFalse,
    Cheating,
    Zigzag,
    Other,
}

/// Position of a cycle in a reduced-instance packing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CycleType {
    /// All nodes inside one variable gadget.
    Type1,
    /// β–δ 2-cycle.
    Type2,
    /// δ–d 2-cycle.
    Type3,
}

fn var_label(v: u32) -> String {
    v.to_string()
}

/// Build the Stackelberg KEP instance for an Adversarial (2,2)-SAT seed.
pub fn reduce_to_kep(a: &AdversarialSatInstance) -> Result<(KepInstance, RoleMap)> {
    let (ok, profile) = validate_22(&a.formula);
    if !ok {
        let offender = profile
            .iter()
            .find(|(_, &(p, n))| p != 2 || n != 2)
            .map(|(&v, &(p, n))| format!("variable {v} occurs ({p} pos, {n} neg)"))
            .unwrap_or_else(|| "occurrence profile incomplete".into());
        return Err(Error::Validation(format!("formula is not (2,2): {offender}")));
    }
    for v in 1..=a.formula.num_vars {
        let in_x = a.x_vars.contains(&v);
        let in_y = a.y_vars.contains(&v);
        if in_x == in_y {
            return Err(Error::Validation(format!(
                "variable {v} must lie in exactly one of X, Y"
            )));
        }
    }

    let mut nodes: Vec<Node> = Vec::new();
    let add = |nodes: &mut Vec<Node>, owner: Owner, label: RoleLabel| -> NodeId {
        let id = NodeId(nodes.len() as u32);
        nodes.push(Node {
            id,
            owner,
            label: Some(label),
        });
        id
    };

    // Per-variable gadget nodes, variables in ascending order. The positive
    // anchors are the t (leader) or τ (follower) nodes, negative anchors f/φ.
    let mut pos_anchor: BTreeMap<u32, [NodeId; 2]> = BTreeMap::new();
    let mut neg_anchor: BTreeMap<u32, [NodeId; 2]> = BTreeMap::new();
    let mut alpha: BTreeMap<u32, [NodeId; 2]> = BTreeMap::new();
    let mut beta: BTreeMap<(u32, Polarity), [NodeId; 2]> = BTreeMap::new();
    for v in 1..=a.formula.num_vars {
        let var = var_label(v);
        let is_x = a.x_vars.contains(&v);
        let pair = |f: &dyn Fn(u8) -> RoleLabel, owner: Owner, nodes: &mut Vec<Node>| {
            [add(nodes, owner, f(1)), add(nodes, owner, f(2))]
        };
        let anchors_owner = if is_x { Owner::Leader } else { Owner::Follower };
        let pos = pair(
            &|copy| {
                if is_x {
                    RoleLabel::T { var: var.clone(), copy }
                } else {
                    RoleLabel::Tau { var: var.clone(), copy }
                }
            },
            anchors_owner,
            &mut nodes,
        );
        let neg = pair(
            &|copy| {
                if is_x {
                    RoleLabel::F { var: var.clone(), copy }
                } else {
                    RoleLabel::Phi { var: var.clone(), copy }
                }
            },
            anchors_owner,
            &mut nodes,
        );
        let al = pair(
            &|copy| RoleLabel::Alpha { var: var.clone(), copy },
            Owner::Follower,
            &mut nodes,
        );
        let bt = pair(
            &|copy| RoleLabel::Beta {
                var: var.clone(),
                pol: Polarity::True,
                copy,
            },
            Owner::Follower,
            &mut nodes,
        );
        let bf = pair(
            &|copy| RoleLabel::Beta {
                var: var.clone(),
                pol: Polarity::False,
                copy,
            },
            Owner::Follower,
            &mut nodes,
        );
        pos_anchor.insert(v, pos);
        neg_anchor.insert(v, neg);
        alpha.insert(v, al);
        beta.insert((v, Polarity::True), bt);
        beta.insert((v, Polarity::False), bf);
    }
    let deltas: Vec<NodeId> = (0..a.formula.clauses.len())
        .map(|c| add(&mut nodes, Owner::Follower, RoleLabel::Delta { clause: c }))
        .collect();
    let d = add(&mut nodes, Owner::Leader, RoleLabel::D);

    let mut arcs: Vec<(NodeId, NodeId)> = Vec::new();
    for v in 1..=a.formula.num_vars {
        let pos = pos_anchor[&v];
        let neg = neg_anchor[&v];
        let al = alpha[&v];
        // The two internal 2-cycles.
        arcs.push((pos[0], pos[1]));
        arcs.push((pos[1], pos[0]));
        arcs.push((neg[0], neg[1]));
        arcs.push((neg[1], neg[0]));
        // The four internal 3-cycles α → β → anchor → α.
        for i in 0..2 {
            let bt = beta[&(v, Polarity::True)][i];
            let bf = beta[&(v, Polarity::False)][i];
            arcs.push((al[i], bt));
            arcs.push((bt, pos[i]));
            arcs.push((pos[i], al[i]));
            arcs.push((al[i], bf));
            arcs.push((bf, neg[i]));
            arcs.push((neg[i], al[i]));
        }
    }
    // β ↔ δ 2-cycles: the i-th positive (negative) occurrence of a variable,
    // scanning clauses in input order and literals left to right, is wired
    // to β_{·,t,i} (β_{·,f,i}).
    let mut seen: BTreeMap<(u32, Polarity), usize> = BTreeMap::new();
    for (c, clause) in a.formula.clauses.iter().enumerate() {
        for lit in clause {
            let pol = if lit.positive { Polarity::True } else { Polarity::False };
            let i = seen.entry((lit.var, pol)).or_insert(0);
            let b = beta[&(lit.var, pol)][*i];
            *i += 1;
            arcs.push((b, deltas[c]));
            arcs.push((deltas[c], b));
        }
    }
    for &dc in &deltas {
        arcs.push((dc, d));
        arcs.push((d, dc));
    }

    let k = 4 * a.x_vars.len() as u64 + 1;
    let inst = KepInstance::new(nodes, arcs, 3, Some(k))?;
    let rm = RoleMap::from_instance(&inst)?;
    Ok((inst, rm))
}

fn pair_nodes(rm: &RoleMap, var: u32, positive: bool) -> Result<[NodeId; 2]> {
    let var = var_label(var);
    let mk = |copy| {
        if positive {
            RoleLabel::T { var: var.clone(), copy }
        } else {
            RoleLabel::F { var: var.clone(), copy }
        }
    };
    Ok([rm.node(&mk(1))?, rm.node(&mk(2))?])
}

/// The canonical strategy of an X-assignment: withhold the t-pair of TRUE
/// variables and the f-pair of FALSE ones.
pub fn strategy_from_assignment(
    rm: &RoleMap,
    x_assign: &BTreeMap<u32, bool>,
) -> Result<Strategy> {
    let mut s = BTreeSet::new();
    for &x in rm.x_vars() {
        let value = *x_assign
            .get(&x)
            .ok_or_else(|| Error::Validation(format!("assignment misses variable {x}")))?;
        s.extend(pair_nodes(rm, x, value)?);
    }
    Ok(s.into_iter().collect())
}

/// Inverse map for nice strategies: TRUE where the t-pair is withheld,
/// FALSE where the f-pair is.
pub fn assignment_from_strategy(rm: &RoleMap, s: &Strategy) -> Result<BTreeMap<u32, bool>> {
    let mut assign = BTreeMap::new();
    for &x in rm.x_vars() {
        let t = pair_nodes(rm, x, true)?;
        let f = pair_nodes(rm, x, false)?;
        let t_in = t.iter().filter(|&&n| s.contains(n)).count();
        let f_in = f.iter().filter(|&&n| s.contains(n)).count();
        match (t_in, f_in) {
            (2, 0) => {
                assign.insert(x, true);
            }
            (0, 2) => {
                assign.insert(x, false);
            }
            _ => {
                return Err(Error::Validation(format!(
                    "strategy is not nice at variable {x}"
                )))
            }
        }
    }
    Ok(assign)
}

/// Tag every cycle of a packing as Type 1/2/3; anything else is rejected.
pub fn classify_cycles(rm: &RoleMap, packing: &CyclePacking) -> Result<Vec<CycleType>> {
    packing
        .cycles()
        .iter()
        .map(|cycle| {
            let labels: Vec<&RoleLabel> = cycle
                .nodes()
                .iter()
                .map(|&id| {
                    rm.label(id)
                        .ok_or_else(|| Error::Validation(format!("node {id} not in role map")))
                })
                .collect::<Result<_>>()?;
            let vars: BTreeSet<Option<&str>> = labels.iter().map(|l| l.var()).collect();
            if vars.len() == 1 && !vars.contains(&None) {
                return Ok(CycleType::Type1);
            }
            if labels.len() == 2 {
                let beta = labels.iter().any(|l| matches!(l, RoleLabel::Beta { .. }));
                let delta = labels.iter().any(|l| matches!(l, RoleLabel::Delta { .. }));
                let dnode = labels.iter().any(|l| matches!(l, RoleLabel::D));
                if beta && delta {
                    return Ok(CycleType::Type2);
                }
                if delta && dnode {
                    return Ok(CycleType::Type3);
                }
            }
            Err(Error::Validation(format!(
                "cycle {:?} fits no reduced-instance type",
                cycle.nodes()
            )))
        })
        .collect()
}

/// Classify a variable gadget's packing pattern into the
/// consistent/cheating/zigzag case list.
pub fn classify_gadget(rm: &RoleMap, packing: &CyclePacking, var: u32) -> Result<GadgetClass> {
    let is_x = rm.x_vars().contains(&var);
    if !is_x && !rm.y_vars().contains(&var) {
        return Err(Error::Validation(format!("unknown gadget variable {var}")));
    }
    let vs = var_label(var);
    let lbl = |text: &str| -> Result<NodeId> { rm.node(&text.parse()?) };
    let has = |labels: &[NodeId]| {
        let set: BTreeSet<NodeId> = labels.iter().copied().collect();
        packing.cycles().iter().any(|c| c.node_set() == set)
    };
    let (pos, neg) = if is_x { ("t", "f") } else { ("tau", "phi") };
    let anchor = |kind: &str, i: u8| lbl(&format!("{kind}[{vs},{i}]"));
    let tri = |pol: char, i: u8| -> Result<[NodeId; 3]> {
        Ok([
            lbl(&format!("alpha[{vs},{i}]"))?,
            lbl(&format!("beta[{vs},{pol},{i}]"))?,
            anchor(if pol == 't' { pos } else { neg }, i)?,
        ])
    };
    let pos_pair = [anchor(pos, 1)?, anchor(pos, 2)?];
    let neg_pair = [anchor(neg, 1)?, anchor(neg, 2)?];

    let both_f = has(&tri('f', 1)?) && has(&tri('f', 2)?);
    let both_t = has(&tri('t', 1)?) && has(&tri('t', 2)?);
    if is_x {
        if both_f {
            return Ok(GadgetClass::ConsistentTrue);
        }
        if both_t {
            return Ok(GadgetClass::ConsistentFalse);
        }
        if has(&pos_pair) || has(&neg_pair) {
            return Ok(GadgetClass::Cheating);
        }
        return Ok(GadgetClass::Other);
    }
    // Y gadgets: the consistent patterns additionally pack the unused
    // anchor pair, since both pairs stay in the pool.
    if both_f && has(&pos_pair) {
        return Ok(GadgetClass::ConsistentTrue);
    }
    if both_t && has(&neg_pair) {
        return Ok(GadgetClass::ConsistentFalse);
    }
    if has(&pos_pair) && has(&neg_pair) {
        return Ok(GadgetClass::Cheating);
    }
    if has(&tri('t', 1)?) && has(&tri('f', 2)?) {
        return Ok(GadgetClass::Zigzag);
    }
    Ok(GadgetClass::Other)
}

/// Cross-check record for one seed instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub sat_answer: bool,
    pub kep_decision: bool,
    pub equal: bool,
    pub witness_strategy: Option<Vec<String>>,
}

pub fn verdict_to_json(verdict: &Verdict, pretty: bool) -> String {
    let mut text = if pretty {
        serde_json::to_string_pretty(verdict).expect("verdict serializes")
    } else {
        serde_json::to_string(verdict).expect("verdict serializes")
    };
    text.push('\n');
    text
}

/// Run both brute-force oracles on one seed and compare answers; on YES,
/// also check that the canonical witness strategy attains exactly k = 4|X|+1.
pub fn verify_reduction(a: &AdversarialSatInstance, caps: &Caps) -> Result<Verdict> {
    let sat_witness = brute_adversarial(a, caps)?;
    let (inst, rm) = reduce_to_kep(a)?;
    let report = solve_exact(&inst, caps)?;
    let kep_decision = report.decision.expect("reduced instance carries k");
    let sat_answer = sat_witness.is_some();

    let witness_strategy = match sat_witness {
        None => None,
        Some(assign) => {
            let s = strategy_from_assignment(&rm, &assign)?;
            let value = leader_value(&inst, &s, caps)?;
            let k = inst.threshold().unwrap();
            if value != k {
                return Err(Error::Validation(format!(
                    "witness strategy scores {value}, expected {k} — reduction bug"
                )));
            }
            Some(
                s.nodes()
                    .iter()
                    .map(|&id| rm.label(id).unwrap().to_string())
                    .collect(),
            )
        }
    };

    Ok(Verdict {
        sat_answer,
        kep_decision,
        equal: sat_answer == kep_decision,
        witness_strategy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Cycle;
    use crate::sat::{CnfFormula, Literal};

    fn yes_seed() -> AdversarialSatInstance {
        let f = CnfFormula::new(
            2,
            vec![
                vec![Literal::pos(1), Literal::pos(2)],
                vec![Literal::pos(1), Literal::neg(2)],
                vec![Literal::neg(1), Literal::pos(2)],
                vec![Literal::neg(1), Literal::neg(2)],
            ],
        )
        .unwrap();
        AdversarialSatInstance::new(f, BTreeSet::from([1]), BTreeSet::from([2])).unwrap()
    }

    fn no_seed() -> AdversarialSatInstance {
        let clause = vec![
            Literal::pos(1),
            Literal::neg(1),
            Literal::pos(2),
            Literal::neg(2),
        ];
        let f = CnfFormula::new(2, vec![clause.clone(), clause]).unwrap();
        AdversarialSatInstance::new(f, BTreeSet::from([1]), BTreeSet::from([2])).unwrap()
    }

    fn labeled_cycle(inst: &KepInstance, rm: &RoleMap, labels: &[&str]) -> Cycle {
        let ids: Vec<NodeId> = labels
            .iter()
            .map(|l| rm.node(&l.parse().unwrap()).unwrap())
            .collect();
        Cycle::new(ids, inst).unwrap()
    }

    #[test]
    fn yes_seed_counts() {
        let (inst, rm) = reduce_to_kep(&yes_seed()).unwrap();
        assert_eq!(inst.num_nodes(), 25);
        assert_eq!(inst.leader_nodes().len(), 5);
        assert_eq!(inst.arcs().len(), 56);
        assert_eq!(inst.max_cycle_len(), 3);
        assert_eq!(inst.threshold(), Some(5));
        assert_eq!(rm.x_vars(), &BTreeSet::from([1]));
        assert_eq!(rm.y_vars(), &BTreeSet::from([2]));
        assert_eq!(rm.betas().len(), 8);
    }

    #[test]
    fn count_formulas_general() {
        for a in [yes_seed(), no_seed()] {
            let (inst, _) = reduce_to_kep(&a).unwrap();
            let nx = a.x_vars.len();
            let ny = a.y_vars.len();
            let nc = a.formula.clauses.len();
            assert_eq!(inst.leader_nodes().len(), 4 * nx + 1);
            assert_eq!(inst.num_nodes() - inst.leader_nodes().len(), 6 * nx + 10 * ny + nc);
            assert_eq!(inst.arcs().len(), 24 * (nx + ny) + 2 * nc);
        }
    }

    #[test]
    fn beta_delta_wiring_degrees() {
        let a = yes_seed();
        let (inst, rm) = reduce_to_kep(&a).unwrap();
        // Every β has exactly one δ neighbour.
        for &b in rm.betas() {
            let deltas: Vec<_> = inst
                .arcs()
                .iter()
                .filter(|&&(u, v)| u == b && matches!(rm.label(v), Some(RoleLabel::Delta { .. })))
                .collect();
            assert_eq!(deltas.len(), 1, "beta {b}");
        }
        // δ_c's β-degree equals the clause width.
        for (c, clause) in a.formula.clauses.iter().enumerate() {
            let dc = rm.delta(c).unwrap();
            let degree = inst
                .arcs()
                .iter()
                .filter(|&&(u, v)| u == dc && rm.betas().contains(&v))
                .count();
            assert_eq!(degree, clause.len());
        }
    }

    #[test]
    fn empty_seed_is_lone_d() {
        let a = AdversarialSatInstance::new(
            CnfFormula::new(0, vec![]).unwrap(),
            BTreeSet::new(),
            BTreeSet::new(),
        )
        .unwrap();
        let (inst, rm) = reduce_to_kep(&a).unwrap();
        assert_eq!(inst.num_nodes(), 1);
        assert_eq!(inst.arcs().len(), 0);
        assert_eq!(inst.threshold(), Some(1));
        assert_eq!(rm.d_node(), NodeId(0));
        let verdict = verify_reduction(&a, &Caps::default()).unwrap();
        assert!(!verdict.sat_answer && !verdict.kep_decision && verdict.equal);
    }

    #[test]
    fn rejects_non_22_formula() {
        let f = CnfFormula::new(1, vec![vec![Literal::pos(1)]]).unwrap();
        let a = AdversarialSatInstance::new(f, BTreeSet::from([1]), BTreeSet::new()).unwrap();
        let err = reduce_to_kep(&a).unwrap_err();
        assert!(err.to_string().contains("variable 1"));
    }

    #[test]
    fn canonical_strategy_and_inverse() {
        let (inst, rm) = reduce_to_kep(&yes_seed()).unwrap();
        let s = strategy_from_assignment(&rm, &BTreeMap::from([(1, true)])).unwrap();
        let labels: Vec<String> = s
            .nodes()
            .iter()
            .map(|&id| rm.label(id).unwrap().to_string())
            .collect();
        assert_eq!(labels, vec!["t[1,1]", "t[1,2]"]);
        assert_eq!(s.len(), 2 * rm.x_vars().len());
        assert!(!s.contains(rm.d_node()));
        assert_eq!(
            assignment_from_strategy(&rm, &s).unwrap(),
            BTreeMap::from([(1, true)])
        );

        let s = strategy_from_assignment(&rm, &BTreeMap::from([(1, false)])).unwrap();
        assert_eq!(
            assignment_from_strategy(&rm, &s).unwrap(),
            BTreeMap::from([(1, false)])
        );

        // Split pair: not nice.
        let split: Strategy = [rm.node(&"t[1,1]".parse().unwrap()).unwrap()]
            .into_iter()
            .collect();
        let err = assignment_from_strategy(&rm, &split).unwrap_err();
        assert!(err.to_string().contains("not nice"));

        // Partial assignment rejected.
        assert!(strategy_from_assignment(&rm, &BTreeMap::new()).is_err());
        let _ = inst;
    }

    #[test]
    fn cycle_types() {
        let (inst, rm) = reduce_to_kep(&yes_seed()).unwrap();
        let packing = CyclePacking::new(vec![
            labeled_cycle(&inst, &rm, &["alpha[1,1]", "beta[1,t,1]", "t[1,1]"]),
            labeled_cycle(&inst, &rm, &["beta[1,t,2]", "delta[1]"]),
            labeled_cycle(&inst, &rm, &["delta[0]", "d"]),
        ])
        .unwrap();
        assert_eq!(
            classify_cycles(&rm, &packing).unwrap(),
            vec![CycleType::Type1, CycleType::Type2, CycleType::Type3]
        );
    }

    #[test]
    fn gadget_classes_x() {
        let (inst, rm) = reduce_to_kep(&yes_seed()).unwrap();
        let consistent_true = CyclePacking::new(vec![
            labeled_cycle(&inst, &rm, &["alpha[1,1]", "beta[1,f,1]", "f[1,1]"]),
            labeled_cycle(&inst, &rm, &["alpha[1,2]", "beta[1,f,2]", "f[1,2]"]),
        ])
        .unwrap();
        assert_eq!(
            classify_gadget(&rm, &consistent_true, 1).unwrap(),
            GadgetClass::ConsistentTrue
        );
        let cheating =
            CyclePacking::new(vec![labeled_cycle(&inst, &rm, &["t[1,1]", "t[1,2]"])]).unwrap();
        assert_eq!(classify_gadget(&rm, &cheating, 1).unwrap(), GadgetClass::Cheating);
        assert_eq!(
            classify_gadget(&rm, &CyclePacking::new(vec![]).unwrap(), 1).unwrap(),
            GadgetClass::Other
        );
        assert!(classify_gadget(&rm, &cheating, 9).is_err());
    }

    #[test]
    fn gadget_classes_y() {
        let (inst, rm) = reduce_to_kep(&yes_seed()).unwrap();
        let zigzag = CyclePacking::new(vec![
            labeled_cycle(&inst, &rm, &["alpha[2,1]", "beta[2,t,1]", "tau[2,1]"]),
            labeled_cycle(&inst, &rm, &["alpha[2,2]", "beta[2,f,2]", "phi[2,2]"]),
        ])
        .unwrap();
        assert_eq!(classify_gadget(&rm, &zigzag, 2).unwrap(), GadgetClass::Zigzag);

        let cheating = CyclePacking::new(vec![
            labeled_cycle(&inst, &rm, &["tau[2,1]", "tau[2,2]"]),
            labeled_cycle(&inst, &rm, &["phi[2,1]", "phi[2,2]"]),
        ])
        .unwrap();
        assert_eq!(classify_gadget(&rm, &cheating, 2).unwrap(), GadgetClass::Cheating);

        let consistent_false = CyclePacking::new(vec![
            labeled_cycle(&inst, &rm, &["alpha[2,1]", "beta[2,t,1]", "tau[2,1]"]),
            labeled_cycle(&inst, &rm, &["alpha[2,2]", "beta[2,t,2]", "tau[2,2]"]),
            labeled_cycle(&inst, &rm, &["phi[2,1]", "phi[2,2]"]),
        ])
        .unwrap();
        assert_eq!(
            classify_gadget(&rm, &consistent_false, 2).unwrap(),
            GadgetClass::ConsistentFalse
        );
    }

    #[test]
    fn verify_yes_seed() {
        let verdict = verify_reduction(&yes_seed(), &Caps::default()).unwrap();
        assert!(verdict.sat_answer);
        assert!(verdict.kep_decision);
        assert!(verdict.equal);
        assert_eq!(
            verdict.witness_strategy,
            Some(vec!["t[1,1]".into(), "t[1,2]".into()])
        );
    }

    #[test]
    fn verify_no_seed() {
        let verdict = verify_reduction(&no_seed(), &Caps::default()).unwrap();
        assert!(!verdict.sat_answer);
        assert!(!verdict.kep_decision);
        assert!(verdict.equal);
        assert_eq!(verdict.witness_strategy, None);
    }

    #[test]
    fn threshold_above_leader_count_is_no() {
        let (inst, _) = reduce_to_kep(&yes_seed()).unwrap();
        let inst = inst.with_threshold(Some(6));
        let report = solve_exact(&inst, &Caps::default()).unwrap();
        assert_eq!(report.decision, Some(false));
        assert!(report.best_value <= 5);
    }
}
