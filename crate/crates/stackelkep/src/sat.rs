//! CNF machinery: (2,2) occurrence validation, brute-force SAT and
//! adversarial (exists-forall) oracles, the 3-SAT to (2,2)-SAT transform
//! with variable copies, and the DIMACS-flavored file format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::caps::Caps;
use crate::error::{Error, Result};

/// A signed variable occurrence. Variable ids are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: u32,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: u32) -> Self {
        Literal { var, positive: true }
    }

    pub fn neg(var: u32) -> Self {
        Literal {
            var,
            positive: false,
        }
    }

    fn satisfied_by(&self, assignment: u64) -> bool {
        let bit = (assignment >> (self.var - 1)) & 1 == 1;
        bit == self.positive
    }
}

pub type Clause = Vec<Literal>;

/// CNF formula over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> Result<Self> {
        for (ci, clause) in clauses.iter().enumerate() {
            for lit in clause {
                if lit.var == 0 || lit.var > num_vars {
                    return Err(Error::Validation(format!(
                        "literal {} in clause {} out of range 1..={}",
                        lit.var, ci, num_vars
                    )));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Evaluate under a bit-packed assignment (bit i-1 = variable i).
    fn satisfied_by(&self, assignment: u64) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.satisfied_by(assignment)))
    }

    /// (pos, neg) occurrence counts per variable, counting every literal
    /// position.
    pub fn occurrence_profile(&self) -> BTreeMap<u32, (usize, usize)> {
        let mut profile: BTreeMap<u32, (usize, usize)> =
            (1..=self.num_vars).map(|v| (v, (0, 0))).collect();
        for clause in &self.clauses {
            for lit in clause {
                let entry = profile.get_mut(&lit.var).expect("validated literal");
                if lit.positive {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        profile
    }
}

/// The exists-forall question: is there an X-assignment under which no
/// Y-assignment satisfies the formula?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversarialSatInstance {
    pub formula: CnfFormula,
    pub x_vars: BTreeSet<u32>,
    pub y_vars: BTreeSet<u32>,
}

impl AdversarialSatInstance {
    pub fn new(formula: CnfFormula, x_vars: BTreeSet<u32>, y_vars: BTreeSet<u32>) -> Result<Self> {
        if let Some(v) = x_vars.intersection(&y_vars).next() {
            return Err(Error::Validation(format!("variable {v} is in both X and Y")));
        }
        for clause in &formula.clauses {
            for lit in clause {
                if !x_vars.contains(&lit.var) && !y_vars.contains(&lit.var) {
                    return Err(Error::Validation(format!(
                        "variable {} occurs in the formula but is neither in X nor Y",
                        lit.var
                    )));
                }
            }
        }
        Ok(AdversarialSatInstance {
            formula,
            x_vars,
            y_vars,
        })
    }
}

/// Copy bookkeeping for the variable-splitting transform: the ordered copy
/// list per original variable, and the designated first-copy set Z'.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMapping {
    copies: BTreeMap<u32, Vec<u32>>,
}

impl VarMapping {
    pub fn copies_of(&self, var: u32) -> &[u32] {
        &self.copies[&var]
    }

    /// The first copy of each original variable (the image of the bijection
    /// onto Z').
    pub fn first_copies(&self) -> BTreeSet<u32> {
        self.copies.values().map(|c| c[0]).collect()
    }

    pub fn first_copy(&self, var: u32) -> u32 {
        self.copies[&var][0]
    }

    pub fn originals(&self) -> impl Iterator<Item = u32> + '_ {
        self.copies.keys().copied()
    }
}

/// True iff every variable occurs exactly twice positive and twice negative;
/// the profile is returned either way.
pub fn validate_22(formula: &CnfFormula) -> (bool, BTreeMap<u32, (usize, usize)>) {
    let profile = formula.occurrence_profile();
    let ok = profile.values().all(|&(p, n)| p == 2 && n == 2);
    (ok, profile)
}

/// Exhaustive satisfiability check. On success returns the lexicographically
/// first witness (variables in ascending order, FALSE before TRUE).
pub fn brute_sat(formula: &CnfFormula, caps: &Caps) -> Result<Option<Vec<bool>>> {
    Caps::check("SAT oracle variables", formula.num_vars as usize, caps.sat_vars)?;
    let n = formula.num_vars;
    for m in 0u64..(1u64 << n) {
        // Map counter bits so that variable 1 is the most significant digit:
        // this yields lexicographic witness order with FALSE < TRUE.
        let assignment = lex_counter_to_assignment(m, n, false);
        if formula.satisfied_by(assignment) {
            let witness = (1..=n).map(|v| (assignment >> (v - 1)) & 1 == 1).collect();
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// Exhaustive exists-forall check: YES iff some X-assignment makes the
/// formula unsatisfiable over all Y-assignments. Returns the first
/// witnessing X-assignment, with TRUE tried before FALSE.
pub fn brute_adversarial(
    instance: &AdversarialSatInstance,
    caps: &Caps,
) -> Result<Option<BTreeMap<u32, bool>>> {
    let nx = instance.x_vars.len();
    let ny = instance.y_vars.len();
    Caps::check("adversarial oracle variables", nx + ny, caps.adv_vars)?;
    let x_vars: Vec<u32> = instance.x_vars.iter().copied().collect();
    let y_vars: Vec<u32> = instance.y_vars.iter().copied().collect();

    for mx in 0u64..(1u64 << nx) {
        let x_bits = lex_counter_to_assignment(mx, nx as u32, true);
        let mut base = 0u64;
        for (i, &v) in x_vars.iter().enumerate() {
            if (x_bits >> i) & 1 == 1 {
                base |= 1 << (v - 1);
            }
        }
        let mut satisfiable = false;
        for my in 0u64..(1u64 << ny) {
            let mut assignment = base;
            for (i, &v) in y_vars.iter().enumerate() {
                if (my >> i) & 1 == 1 {
                    assignment |= 1 << (v - 1);
                }
            }
            if instance.formula.satisfied_by(assignment) {
                satisfiable = true;
                break;
            }
        }
        if !satisfiable {
            let witness = x_vars
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, (x_bits >> i) & 1 == 1))
                .collect();
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

/// Order the enumeration counter so variable 1 is the major digit. With
/// `true_first` the digit order per variable is TRUE then FALSE.
fn lex_counter_to_assignment(m: u64, n: u32, true_first: bool) -> u64 {
    let mut assignment = 0u64;
    for v in 1..=n {
        let digit = (m >> (n - v)) & 1 == 1;
        let value = if true_first { !digit } else { digit };
        if value {
            assignment |= 1 << (v - 1);
        }
    }
    assignment
}

/// Split every variable into one copy per occurrence and emit consistency
/// clauses, per-clause copies and the occurrence-balancing rest clause, so
/// that the output is a (2,2) formula equisatisfiable with the input.
///
/// Returns the transformed formula, the copy mapping, and the list of
/// variables with a single occurrence (their consistency clause degenerates
/// to a tautology; callers may warn).
pub fn to_sat22(formula: &CnfFormula) -> Result<(CnfFormula, VarMapping, Vec<u32>)> {
    let profile = formula.occurrence_profile();
    for (&v, &(p, n)) in &profile {
        if p + n == 0 {
            return Err(Error::Validation(format!(
                "variable {v} never occurs; the transform requires at least one occurrence"
            )));
        }
    }
    if !profile.values().any(|&(p, n)| p >= 1 && n >= 1) {
        return Err(Error::Validation(
            "no variable occurs both negated and unnegated; the rest clause would not be \
             automatically satisfiable"
                .into(),
        ));
    }

    // Assign copy ids in ascending original order, occurrences numbered by
    // clause index then literal position.
    let mut copies: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut next = 1u32;
    for (&v, &(p, n)) in &profile {
        let k = p + n;
        copies.insert(v, (next..next + k as u32).collect());
        next += k as u32;
    }
    let num_copies = next - 1;

    // Clause copies: the j-th occurrence of v becomes its j-th copy with the
    // original polarity.
    let mut occurrence_seen: BTreeMap<u32, usize> = BTreeMap::new();
    let mut clause_polarity: BTreeMap<u32, bool> = BTreeMap::new();
    let mut out_clauses: Vec<Clause> = Vec::new();
    for clause in &formula.clauses {
        let mut copy_clause = Vec::with_capacity(clause.len());
        for lit in clause {
            let counter = occurrence_seen.entry(lit.var).or_insert(0);
            let copy = copies[&lit.var][*counter];
            *counter += 1;
            clause_polarity.insert(copy, lit.positive);
            copy_clause.push(Literal {
                var: copy,
                positive: lit.positive,
            });
        }
        out_clauses.push(copy_clause);
    }

    // Cyclic consistency clauses force all copies of a variable to agree.
    let mut singletons = Vec::new();
    for (&v, copy_list) in &copies {
        if copy_list.len() == 1 {
            singletons.push(v);
        }
        for j in 0..copy_list.len() {
            let a = copy_list[j];
            let b = copy_list[(j + 1) % copy_list.len()];
            out_clauses.push(vec![Literal::pos(a), Literal::neg(b)]);
        }
    }

    // The rest clause holds the complement-polarity occurrence of each copy,
    // sorted by copy id, bringing every copy to exactly (2,2).
    let rest: Clause = (1..=num_copies)
        .map(|copy| Literal {
            var: copy,
            positive: !clause_polarity[&copy],
        })
        .collect();
    out_clauses.push(rest);

    let out = CnfFormula::new(num_copies, out_clauses)?;
    debug_assert!(validate_22(&out).0);
    Ok((out, VarMapping { copies }, singletons))
}

/// Lift the transform to adversarial instances: the new X is the set of
/// first copies of the old X variables; every other copy belongs to the
/// adversary.
pub fn adversarialize(
    instance: &AdversarialSatInstance,
) -> Result<(AdversarialSatInstance, VarMapping)> {
    let (formula, mapping, _singletons) = to_sat22(&instance.formula)?;
    let x_new: BTreeSet<u32> = instance
        .x_vars
        .iter()
        .map(|&v| mapping.first_copy(v))
        .collect();
    let y_new: BTreeSet<u32> = (1..=formula.num_vars)
        .filter(|v| !x_new.contains(v))
        .collect();
    let out = AdversarialSatInstance::new(formula, x_new, y_new)?;
    Ok((out, mapping))
}

/// Parsed formula file: plain CNF, or adversarial CNF with X/Y sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaFile {
    Plain(CnfFormula),
    Adversarial(AdversarialSatInstance),
}

/// Parse the DIMACS-flavored format: `p cnf <vars> <clauses>` or
/// `p acnf <vars> <clauses>` header, optional `x ... 0` / `y ... 0`
/// quantifier lines, and 0-terminated clause lines.
pub fn parse_formula(text: &str) -> Result<FormulaFile> {
    let mut header: Option<(bool, u32, usize)> = None;
    let mut x_vars: BTreeSet<u32> = BTreeSet::new();
    let mut y_vars: BTreeSet<u32> = BTreeSet::new();
    let mut clauses: Vec<Clause> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let loc = |msg: String| Error::Parse(format!("line {}: {msg}", lineno + 1));
        if let Some(rest) = line.strip_prefix("p ") {
            if header.is_some() {
                return Err(loc("duplicate header".into()));
            }
            let parts: Vec<&str> = rest.split_whitespace().collect();
            let (adversarial, tail) = match parts.as_slice() {
                ["acnf", rest @ ..] => (true, rest),
                ["cnf", rest @ ..] => (false, rest),
                _ => return Err(loc(format!("bad header `{line}`"))),
            };
            let [vars, nclauses] = tail else {
                return Err(loc(format!("bad header `{line}`")));
            };
            let vars: u32 = vars.parse().map_err(|_| loc("bad variable count".into()))?;
            let nclauses: usize = nclauses.parse().map_err(|_| loc("bad clause count".into()))?;
            header = Some((adversarial, vars, nclauses));
            continue;
        }
        let (adversarial, num_vars, _) =
            header.ok_or_else(|| loc("clause before `p` header".into()))?;
        let quantifier = line.starts_with("x ") || line.starts_with("y ");
        let body = if quantifier { &line[2..] } else { line };
        let mut items: Vec<i64> = Vec::new();
        for tok in body.split_whitespace() {
            items.push(tok.parse().map_err(|_| loc(format!("bad token `{tok}`")))?);
        }
        if items.last() != Some(&0) {
            return Err(loc("line not terminated by 0".into()));
        }
        items.pop();
        if quantifier {
            if !adversarial {
                return Err(loc("quantifier line in a plain cnf file".into()));
            }
            let target = if line.starts_with('x') {
                &mut x_vars
            } else {
                &mut y_vars
            };
            for v in items {
                if v <= 0 || v as u32 > num_vars {
                    return Err(loc(format!("quantified variable {v} out of range")));
                }
                target.insert(v as u32);
            }
        } else {
            let clause = items
                .into_iter()
                .map(|v| {
                    if v == 0 || v.unsigned_abs() > num_vars as u64 {
                        Err(loc(format!("literal {v} out of range")))
                    } else {
                        Ok(Literal {
                            var: v.unsigned_abs() as u32,
                            positive: v > 0,
                        })
                    }
                })
                .collect::<Result<Clause>>()?;
            clauses.push(clause);
        }
    }

    let (adversarial, num_vars, nclauses) =
        header.ok_or_else(|| Error::Parse("missing `p` header".into()))?;
    if clauses.len() != nclauses {
        return Err(Error::Parse(format!(
            "header declares {nclauses} clauses, found {}",
            clauses.len()
        )));
    }
    let formula = CnfFormula::new(num_vars, clauses)?;
    if adversarial {
        if let Some(v) = x_vars.intersection(&y_vars).next() {
            return Err(Error::Parse(format!("variable {v} quantified twice")));
        }
        Ok(FormulaFile::Adversarial(AdversarialSatInstance::new(
            formula, x_vars, y_vars,
        )?))
    } else {
        Ok(FormulaFile::Plain(formula))
    }
}

pub fn write_formula(file: &FormulaFile) -> String {
    let mut out = String::new();
    let (formula, xy) = match file {
        FormulaFile::Plain(f) => (f, None),
        FormulaFile::Adversarial(a) => (&a.formula, Some((&a.x_vars, &a.y_vars))),
    };
    let kind = if xy.is_some() { "acnf" } else { "cnf" };
    writeln!(out, "p {kind} {} {}", formula.num_vars, formula.clauses.len()).unwrap();
    if let Some((x, y)) = xy {
        for (tag, vars) in [("x", x), ("y", y)] {
            write!(out, "{tag}").unwrap();
            for v in vars {
                write!(out, " {v}").unwrap();
            }
            writeln!(out, " 0").unwrap();
        }
    }
    for clause in &formula.clauses {
        for lit in clause {
            let sign = if lit.positive { "" } else { "-" };
            write!(out, "{sign}{} ", lit.var).unwrap();
        }
        writeln!(out, "0").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: i64) -> Literal {
        Literal {
            var: v.unsigned_abs() as u32,
            positive: v > 0,
        }
    }

    fn clause(lits: &[i64]) -> Clause {
        lits.iter().map(|&v| lit(v)).collect()
    }

    /// Adversarially satisfiable: every X-assignment kills two of the four clauses.
    fn adv_yes() -> AdversarialSatInstance {
        let f = CnfFormula::new(
            2,
            vec![
                clause(&[1, 2]),
                clause(&[1, -2]),
                clause(&[-1, 2]),
                clause(&[-1, -2]),
            ],
        )
        .unwrap();
        AdversarialSatInstance::new(f, BTreeSet::from([1]), BTreeSet::from([2])).unwrap()
    }

    /// phi_ex from the transform examples.
    fn phi_ex() -> CnfFormula {
        CnfFormula::new(3, vec![clause(&[1, 2, -3]), clause(&[-1, -2, 3])]).unwrap()
    }

    #[test]
    fn validate_22_accepts_the_complete_two_var_formula() {
        let (ok, _) = validate_22(&adv_yes().formula);
        assert!(ok);
    }

    #[test]
    fn validate_22_reports_undercount() {
        let f = CnfFormula::new(2, vec![clause(&[1, 2])]).unwrap();
        let (ok, profile) = validate_22(&f);
        assert!(!ok);
        assert_eq!(profile[&1], (1, 0));
    }

    #[test]
    fn brute_sat_empty_formula() {
        let f = CnfFormula::new(2, vec![]).unwrap();
        let witness = brute_sat(&f, &Caps::default()).unwrap().unwrap();
        assert_eq!(witness, vec![false, false]);
    }

    #[test]
    fn brute_sat_contradiction() {
        let f = CnfFormula::new(1, vec![clause(&[1]), clause(&[-1])]).unwrap();
        assert!(brute_sat(&f, &Caps::default()).unwrap().is_none());
    }

    #[test]
    fn brute_sat_phi_ex() {
        assert!(brute_sat(&phi_ex(), &Caps::default()).unwrap().is_some());
    }

    #[test]
    fn brute_sat_cap() {
        let f = CnfFormula::new(30, vec![]).unwrap();
        assert!(brute_sat(&f, &Caps::default()).is_err());
    }

    #[test]
    fn adversarial_yes_with_true_witness() {
        let witness = brute_adversarial(&adv_yes(), &Caps::default())
            .unwrap()
            .unwrap();
        assert_eq!(witness[&1], true);
    }

    #[test]
    fn adversarial_no_on_tautology() {
        let f = CnfFormula::new(
            2,
            vec![clause(&[1, -1, 2, -2]), clause(&[1, -1, 2, -2])],
        )
        .unwrap();
        let inst =
            AdversarialSatInstance::new(f, BTreeSet::from([1]), BTreeSet::from([2])).unwrap();
        assert!(brute_adversarial(&inst, &Caps::default()).unwrap().is_none());
    }

    #[test]
    fn adversarial_empty_y_means_unsatisfiability() {
        let f = CnfFormula::new(1, vec![clause(&[1])]).unwrap();
        let inst = AdversarialSatInstance::new(f, BTreeSet::from([1]), BTreeSet::new()).unwrap();
        let witness = brute_adversarial(&inst, &Caps::default())
            .unwrap()
            .unwrap();
        assert_eq!(witness[&1], false);
    }

    #[test]
    fn to_sat22_phi_ex_layout() {
        let (out, mapping, singletons) = to_sat22(&phi_ex()).unwrap();
        assert!(singletons.is_empty());
        assert_eq!(out.num_vars, 6);
        assert_eq!(out.clauses.len(), 9);
        assert!(validate_22(&out).0);
        assert_eq!(mapping.copies_of(1), &[1, 2]);
        assert_eq!(mapping.copies_of(3), &[5, 6]);
        // Rest clause: complement polarity of each copy's clause occurrence.
        let rest = out.clauses.last().unwrap();
        assert_eq!(
            rest,
            &vec![lit(-1), lit(2), lit(-3), lit(4), lit(5), lit(-6)]
        );
        assert!(brute_sat(&out, &Caps::default()).unwrap().is_some());
    }

    #[test]
    fn to_sat22_singleton_variable_tautology() {
        // Variable 2 occurs once; its consistency clause is (z, -z).
        let f = CnfFormula::new(2, vec![clause(&[1, 2]), clause(&[-1])]).unwrap();
        let (out, _mapping, singletons) = to_sat22(&f).unwrap();
        assert_eq!(singletons, vec![2]);
        assert!(validate_22(&out).0);
    }

    #[test]
    fn to_sat22_rejects_missing_occurrence() {
        let f = CnfFormula::new(2, vec![clause(&[1, -1])]).unwrap();
        let err = to_sat22(&f).unwrap_err();
        assert!(err.to_string().contains("variable 2"), "{err}");
    }

    #[test]
    fn to_sat22_rejects_monotone_formula() {
        let f = CnfFormula::new(1, vec![clause(&[1])]).unwrap();
        assert!(to_sat22(&f).is_err());
    }

    #[test]
    fn to_sat22_preserves_unsatisfiability() {
        // All eight clauses over three variables.
        let mut clauses = Vec::new();
        for m in 0..8u32 {
            clauses.push(
                (1..=3)
                    .map(|v| Literal {
                        var: v,
                        positive: (m >> (v - 1)) & 1 == 1,
                    })
                    .collect(),
            );
        }
        let f = CnfFormula::new(3, clauses).unwrap();
        assert!(brute_sat(&f, &Caps::default()).unwrap().is_none());
        let (out, _, _) = to_sat22(&f).unwrap();
        assert!(brute_sat(&out, &Caps::default()).unwrap().is_none());
    }

    #[test]
    fn adversarialize_maps_x_to_first_copies() {
        let f = phi_ex();
        let inst =
            AdversarialSatInstance::new(f, BTreeSet::from([1]), BTreeSet::from([2, 3])).unwrap();
        let (out, mapping) = adversarialize(&inst).unwrap();
        assert_eq!(out.x_vars, BTreeSet::from([mapping.first_copy(1)]));
        assert_eq!(out.y_vars.len(), 5);
    }

    #[test]
    fn adversarialize_empty_y() {
        let f = CnfFormula::new(1, vec![clause(&[1]), clause(&[-1])]).unwrap();
        let inst = AdversarialSatInstance::new(f, BTreeSet::from([1]), BTreeSet::new()).unwrap();
        let (out, mapping) = adversarialize(&inst).unwrap();
        // The non-first copy of the lone X variable is adversary-controlled.
        assert_eq!(out.x_vars, BTreeSet::from([mapping.first_copy(1)]));
        assert_eq!(out.y_vars.len(), 1);
    }

    #[test]
    fn formula_file_round_trip() {
        let inst = adv_yes();
        let text = write_formula(&FormulaFile::Adversarial(inst.clone()));
        match parse_formula(&text).unwrap() {
            FormulaFile::Adversarial(back) => assert_eq!(back, inst),
            _ => panic!("expected adversarial file"),
        }
        let plain = FormulaFile::Plain(phi_ex());
        assert_eq!(parse_formula(&write_formula(&plain)).unwrap(), plain);
    }

    #[test]
    fn parse_rejects_unterminated_clause() {
        assert!(parse_formula("p cnf 1 1\n1\n").is_err());
    }
}
