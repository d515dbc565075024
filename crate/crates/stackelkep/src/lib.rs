//! Solver and reduction toolkit for the Stackelberg kidney exchange game:
//! exact cycle-packing oracles, the leader's withholding problem, a K=2
//! matching-based fast path, (2,2)-SAT machinery, and the gadget reduction
//! from adversarial SAT with its brute-force cross-checks.

pub mod caps;
pub mod error;
pub mod gen;
pub mod graph;
pub mod matching;
pub mod packing;
pub mod reduction;
pub mod sat;
pub mod solver;

pub use caps::Caps;
pub use error::{Error, Result};
pub use graph::{Cycle, CyclePacking, KepInstance, Node, NodeId, Owner, Polarity, RoleLabel};
pub use packing::{adversarial_packing, all_optimal_packings, max_packing, PackingResult};
pub use reduction::{
    assignment_from_strategy, classify_cycles, classify_gadget, reduce_to_kep,
    strategy_from_assignment, verify_reduction, CycleType, GadgetClass, RoleMap, Verdict,
};
pub use sat::{
    adversarialize, brute_adversarial, brute_sat, parse_formula, to_sat22, validate_22,
    write_formula, AdversarialSatInstance, CnfFormula, FormulaFile, Literal, VarMapping,
};
pub use solver::{
    enumerate_strategy_table, leader_value, solve_exact, solve_k2, LeaderReport, SolveOptions,
    Strategy,
};
