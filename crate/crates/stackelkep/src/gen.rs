//! Seeded random instance generators for the test corpus: plain KEP graphs,
//! small 3-CNF seeds, and (2,2)-valid adversarial formulas. Everything is
//! deterministic per seed (ChaCha8).

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{KepInstance, Node, NodeId, Owner};
use crate::sat::{adversarialize, AdversarialSatInstance, CnfFormula, Literal};

/// Random KEP instance: first `leaders` ids belong to the leader, each
/// ordered pair becomes an arc with probability `density`.
pub fn random_kep(
    nodes: u32,
    leaders: u32,
    density: f64,
    max_cycle_len: u32,
    seed: u64,
) -> Result<KepInstance> {
    if leaders > nodes {
        return Err(Error::Validation(format!(
            "leaders ({leaders}) exceeds nodes ({nodes})"
        )));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Validation(format!("density {density} outside [0,1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let node_list: Vec<Node> = (0..nodes)
        .map(|i| Node {
            id: NodeId(i),
            owner: if i < leaders { Owner::Leader } else { Owner::Follower },
            label: None,
        })
        .collect();
    let mut arcs = Vec::new();
    for u in 0..nodes {
        for v in 0..nodes {
            if u != v && rng.gen_bool(density) {
                arcs.push((NodeId(u), NodeId(v)));
            }
        }
    }
    KepInstance::new(node_list, arcs, max_cycle_len, None)
}

/// Random 3-CNF over `num_vars` variables satisfying the variable-splitting
/// transform's preconditions (every variable occurs, some variable occurs
/// in both polarities). Resamples until valid.
pub fn random_3cnf(num_vars: u32, num_clauses: usize, seed: u64) -> Result<CnfFormula> {
    if num_vars == 0 || num_clauses == 0 {
        return Err(Error::Validation(
            "need at least one variable and one clause".into(),
        ));
    }
    // Every variable must occur, plus one extra occurrence for the variable
    // appearing in both polarities.
    if (num_clauses * 3) < num_vars as usize + 1 {
        return Err(Error::Validation(format!(
            "{num_clauses} clauses of width <= 3 cannot mention all {num_vars} variables \
             with one in both polarities"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..10_000 {
        let clauses: Vec<Vec<Literal>> = (0..num_clauses)
            .map(|_| {
                let width = rng.gen_range(1..=3usize);
                (0..width)
                    .map(|_| Literal {
                        var: rng.gen_range(1..=num_vars),
                        positive: rng.gen_bool(0.5),
                    })
                    .collect()
            })
            .collect();
        let f = CnfFormula::new(num_vars, clauses)?;
        let profile = f.occurrence_profile();
        let all_occur = (1..=num_vars).all(|v| {
            profile.get(&v).map(|&(p, n)| p + n > 0).unwrap_or(false)
        });
        let mixed = profile.values().any(|&(p, n)| p >= 1 && n >= 1);
        if all_occur && mixed {
            return Ok(f);
        }
    }
    Err(Error::Validation(
        "could not sample an admissible 3-CNF (parameters too tight)".into(),
    ))
}

/// Random adversarial (2,2) instance, built by sampling an adversarial
/// 3-CNF seed with `vars_x` + `vars_y` variables and adversarializing it.
pub fn random_adversarial_22(
    vars_x: u32,
    vars_y: u32,
    num_clauses: usize,
    seed: u64,
) -> Result<AdversarialSatInstance> {
    let num_vars = vars_x + vars_y;
    let formula = random_3cnf(num_vars, num_clauses, seed)?;
    let x: BTreeSet<u32> = (1..=vars_x).collect();
    let y: BTreeSet<u32> = (vars_x + 1..=num_vars).collect();
    let seed_instance = AdversarialSatInstance::new(formula, x, y)?;
    let (out, _) = adversarialize(&seed_instance)?;
    Ok(out)
}

/// Direct tiny (2,2) adversarial instance: each variable's four occurrence
/// tokens are shuffled and cut into at most `max_clauses` nonempty clauses.
/// Useful for seeds with very few variables, where the variable-splitting
/// transform would inflate the variable count.
pub fn random_direct_22(
    vars_x: u32,
    vars_y: u32,
    max_clauses: usize,
    seed: u64,
) -> Result<AdversarialSatInstance> {
    let num_vars = vars_x + vars_y;
    if num_vars == 0 {
        return Err(Error::Validation("need at least one variable".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tokens: Vec<Literal> = (1..=num_vars)
        .flat_map(|v| {
            vec![
                Literal::pos(v),
                Literal::pos(v),
                Literal::neg(v),
                Literal::neg(v),
            ]
        })
        .collect();
    tokens.shuffle(&mut rng);
    let n_clauses = rng.gen_range(1..=max_clauses.clamp(1, tokens.len()));
    // Random contiguous cuts, every part nonempty.
    let mut cuts: Vec<usize> = (1..tokens.len()).collect();
    cuts.shuffle(&mut rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(n_clauses - 1).collect();
    cuts.push(0);
    cuts.push(tokens.len());
    cuts.sort_unstable();
    let clauses: Vec<Vec<Literal>> = cuts
        .windows(2)
        .map(|w| tokens[w[0]..w[1]].to_vec())
        .collect();
    let formula = CnfFormula::new(num_vars, clauses)?;
    let x: BTreeSet<u32> = (1..=vars_x).collect();
    let y: BTreeSet<u32> = (vars_x + 1..=num_vars).collect();
    AdversarialSatInstance::new(formula, x, y)
}
