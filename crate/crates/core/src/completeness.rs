//! Desk-scale deciders for structural completeness and its variants, and a
//! bounded admissibility checker for quasi-equations.
//!
//! Admissibility quantifies over the countably generated free algebra, so
//! the search is run in `F(0), F(1), ..., F(max_rank)` and every positive
//! answer carries the rank it was checked to.

use serde::Serialize;

use crate::algebra::{FiniteAlgebra, Kind};
use crate::congruence::is_simple;
use crate::constructions::{embeddings, is_iso, retraction_witness, DEFAULT_HOM_BUDGET};
use crate::corpus::corpus;
use crate::enumerate::{enum_algebras, EnumerationTask};
use crate::free::{free_over, free_zero, DEFAULT_FREE_BUDGET};
use crate::syntax::{
    holds_eq, holds_quasi, parse_equation, pos_exist_witness, Assignment, Equation, Holds,
    PosExistSentence, QuasiEquation, Term,
};
use crate::varieties::{
    endo_equations, equals, splitting_equation_d3, variety_named, variety_of, VarietyHandle,
};
use crate::{Error, Result};

/// Largest number of assignments tried in a single free algebra.
pub const ASSIGNMENT_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Yes,
    No,
    UnknownUpToBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Label of the algebra the certificate lives in.
    pub algebra: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Assignment>,
}

impl Witness {
    fn new(algebra: impl Into<String>, detail: impl Into<String>) -> Self {
        Witness {
            algebra: algebra.into(),
            detail: detail.into(),
            assignment: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub bound: Option<usize>,
    pub witness: Option<Witness>,
    /// Supporting evidence gathered along the way.
    pub evidence: Vec<String>,
}

impl Verdict {
    fn yes(witness: Option<Witness>) -> Self {
        Verdict {
            status: Status::Yes,
            bound: None,
            witness,
            evidence: vec![],
        }
    }

    fn no(witness: Option<Witness>) -> Self {
        Verdict {
            status: Status::No,
            ..Verdict::yes(witness)
        }
    }

    pub fn is_yes(&self) -> bool {
        self.status == Status::Yes
    }

    pub fn summary(&self) -> String {
        let mut s = match self.status {
            Status::Yes => "yes".to_string(),
            Status::No => "no".to_string(),
            Status::UnknownUpToBound => format!("unknown up to {}", self.bound.unwrap_or(0)),
        };
        if let Some(w) = &self.witness {
            s.push_str(&format!(" ({}: {})", w.algebra, w.detail));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum QuasiVerdict {
    /// Valid in the variety, with no premises to unify.
    Valid,
    /// Valid, and the premises have a unifier: an assignment in `F(rank)`.
    ActiveWitness { rank: usize, assignment: Assignment },
    /// No assignment in `F(0..=bound)` satisfies the premises.
    PassiveUpTo { bound: usize },
    /// Not valid, active, and valid in `F(0..=bound)`.
    AdmissibleUpTo {
        bound: usize,
        rank: usize,
        assignment: Assignment,
    },
    /// Fails in `F(rank)` under `assignment`; never admissible.
    RefutedAdmissibilityAt { rank: usize, assignment: Assignment },
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiReport {
    /// Every generator validates the quasi-equation.
    pub valid: bool,
    pub verdict: QuasiVerdict,
}

fn check_assignments(f: &FiniteAlgebra, vars: usize) -> Result<()> {
    let count = (f.size() as f64).powi(vars as i32);
    if count > ASSIGNMENT_BUDGET as f64 {
        return Err(Error::budget(
            "assignments",
            ASSIGNMENT_BUDGET,
            count.min(usize::MAX as f64) as usize,
        ));
    }
    Ok(())
}

fn unifier(f: &FiniteAlgebra, q: &QuasiEquation) -> Result<Option<Assignment>> {
    let vars: Vec<String> = q.vars().into_iter().collect();
    let s = PosExistSentence::new(vars, q.premises.iter().map(|e| vec![e.clone()]).collect())?;
    Ok(pos_exist_witness(f, &s))
}

/// Validity, activity and bounded admissibility of `q` over `v`.
pub fn classify_quasi(
    v: &VarietyHandle,
    q: &QuasiEquation,
    max_free_rank: usize,
) -> Result<QuasiReport> {
    let valid = v.generators.iter().all(|g| holds_quasi(g, q).holds());
    let nvars = q.vars().len();
    let mut unified: Option<(usize, Assignment)> = None;
    for m in 0..=max_free_rank {
        if valid && unified.is_some() {
            break;
        }
        let f = free_over(&v.generators, m, DEFAULT_FREE_BUDGET)?.algebra;
        check_assignments(&f, nvars)?;
        if !valid {
            if let Holds::No(assignment) = holds_quasi(&f, q) {
                return Ok(QuasiReport {
                    valid,
                    verdict: QuasiVerdict::RefutedAdmissibilityAt {
                        rank: m,
                        assignment,
                    },
                });
            }
        }
        if unified.is_none() {
            unified = unifier(&f, q)?.map(|a| (m, a));
        }
    }
    let verdict = match unified {
        None => QuasiVerdict::PassiveUpTo {
            bound: max_free_rank,
        },
        Some(_) if valid && q.premises.is_empty() => QuasiVerdict::Valid,
        Some((rank, assignment)) if valid => QuasiVerdict::ActiveWitness { rank, assignment },
        Some((rank, assignment)) => QuasiVerdict::AdmissibleUpTo {
            bound: max_free_rank,
            rank,
            assignment,
        },
    };
    Ok(QuasiReport { valid, verdict })
}

/// Replays a refutation: in `F(rank)` the premises hold under `assignment`
/// and the conclusion fails.
pub fn replay_refutation(
    v: &VarietyHandle,
    q: &QuasiEquation,
    rank: usize,
    assignment: &Assignment,
) -> Result<bool> {
    let f = free_over(&v.generators, rank, DEFAULT_FREE_BUDGET)?.algebra;
    let ev = |t: &Term| crate::syntax::eval(&f, t, assignment);
    for e in &q.premises {
        if ev(&e.lhs)? != ev(&e.rhs)? {
            return Ok(false);
        }
    }
    Ok(ev(&q.conclusion.lhs)? != ev(&q.conclusion.rhs)?)
}

fn require(v: &VarietyHandle, kind: Kind) -> Result<()> {
    if let Some(g) = v.generators.iter().find(|g| !g.satisfies(kind)) {
        return Err(Error::Precondition(format!("{} is not {kind}", g.label())));
    }
    if v.is_trivial() {
        return Err(Error::Precondition("the variety is trivial".into()));
    }
    Ok(())
}

fn named(n: &str) -> FiniteAlgebra {
    corpus(n, None).expect("corpus name")
}

fn eq(s: &str) -> Equation {
    parse_equation(s).expect("built-in equation parses")
}

/// Passive structural completeness for a variety of positive K4-algebras,
/// decided twice: through the free 0-generated algebra and D3, and through
/// the equational characterization. The routes must agree.
pub fn is_psc(v: &VarietyHandle) -> Result<Verdict> {
    require(v, Kind::Pk4)?;
    let b2 = variety_named(&["B2"])?;
    if equals(v, &b2) {
        return Ok(Verdict::yes(Some(Witness::new(&v.name, "equals V(B2)"))));
    }
    let f0 = free_zero(&v.generators)?;
    let f0_is_c2 = is_iso(&f0, &named("C2"));
    let has_d3 = v.contains_si(&named("D3"));
    let by_free = f0_is_c2 && !has_d3;

    let eqs = [eq("dia 1 ~ 1"), eq("box 0 ~ 0"), splitting_equation_d3()];
    let failure = eqs.iter().find_map(|e| {
        v.generators.iter().find_map(|g| {
            holds_eq(g, e)
                .witness()
                .map(|w| (g.label(), e.to_string(), w.clone()))
        })
    });
    let by_equations = failure.is_none();
    if by_free != by_equations {
        return Err(Error::Inconsistency(format!(
            "PSC routes disagree on {}: free/D3 route {by_free}, equational route {by_equations}",
            v.name
        )));
    }
    let evidence = vec![
        format!(
            "free 0-generated algebra has {} elements (C2: {f0_is_c2})",
            f0.size()
        ),
        format!("D3 in the variety: {has_d3}"),
        format!("equational route: {by_equations}"),
    ];
    let mut verdict = if by_free {
        Verdict::yes(Some(Witness::new(
            &v.name,
            "free 0-generated algebra is C2 and D3 is excluded",
        )))
    } else if has_d3 {
        Verdict::no(Some(Witness::new(
            "D3",
            "D3 is a subdirectly irreducible member",
        )))
    } else {
        let (alg, e, w) = failure.expect("routes agree");
        Verdict::no(Some(Witness {
            algebra: alg,
            detail: format!("fails {e}"),
            assignment: Some(w),
        }))
    };
    verdict.evidence = evidence;
    Ok(verdict)
}

fn sc_decision(v: &VarietyHandle, hereditary: bool) -> Result<Verdict> {
    require(v, Kind::Pk4)?;
    let targets = ["B2", "C2", "D4"];
    let hit = targets
        .iter()
        .find(|t| variety_named(&[t]).map(|h| equals(v, &h)).unwrap_or(false));
    let Some(&t) = hit else {
        let mut verdict = Verdict::no(Some(Witness::new(&v.name, "not V(B2), V(C2) or V(D4)")));
        if v.generators.iter().all(FiniteAlgebra::is_ps4) {
            let asc = asc_necessary(v)?;
            if let Some(w) = asc.witness {
                verdict
                    .evidence
                    .push(format!("ASC refuted: {}: {}", w.algebra, w.detail));
            }
        } else if !v.generators.iter().all(FiniteAlgebra::is_ps4) {
            verdict.evidence.push(
                "neither V(B2) nor contained in PS4, so not SC by the reduction to PS4".into(),
            );
        }
        return Ok(verdict);
    };
    let mut evidence = Vec::new();
    let free1 = free_over(&v.generators, 1, DEFAULT_FREE_BUDGET)?.algebra;
    for s in &v.si_closure {
        let embeds = !embeddings(s, &free1, DEFAULT_HOM_BUDGET)?.is_empty();
        if !embeds {
            return Err(Error::Inconsistency(format!(
                "{} does not embed in the 1-generated free algebra of {}",
                s.label(),
                v.name
            )));
        }
        evidence.push(format!(
            "{} embeds in F(1) ({} elements)",
            s.label(),
            free1.size()
        ));
    }
    if t == "D4" {
        let d4 = named("D4");
        if retraction_witness(&d4, &free1, DEFAULT_HOM_BUDGET)?.is_none() {
            return Err(Error::Inconsistency("D4 is not a retract of F(1)".into()));
        }
        evidence.push("D4 is a retract of F(1), hence projective".into());
    }
    if hereditary && t == "B2" {
        evidence.push("B2 embeds in every non-trivial member".into());
    }
    let mut verdict = Verdict::yes(Some(Witness::new(&v.name, format!("equals V({t})"))));
    verdict.evidence = evidence;
    Ok(verdict)
}

/// Structural completeness for a non-trivial variety of positive
/// K4-algebras.
pub fn is_sc_pk4(v: &VarietyHandle) -> Result<Verdict> {
    sc_decision(v, false)
}

/// Hereditary structural completeness; coincides with SC here.
pub fn is_hsc_pk4(v: &VarietyHandle) -> Result<Verdict> {
    sc_decision(v, true)
}

/// Active structural completeness for a non-trivial variety of positive
/// S4-algebras: refuted by C3a, C3b or D3, otherwise settled by the
/// endomorphism equations.
pub fn asc_necessary(v: &VarietyHandle) -> Result<Verdict> {
    require(v, Kind::Ps4)?;
    for n in ["C3a", "C3b", "D3"] {
        if v.contains_si(&named(n)) {
            return Ok(Verdict::no(Some(Witness::new(
                n,
                "excluded from every ASC variety",
            ))));
        }
    }
    for e in endo_equations() {
        if let Some(g) = v.generators.iter().find(|g| !holds_eq(g, &e).holds()) {
            return Ok(Verdict::no(Some(Witness::new(
                g.label(),
                format!("fails {e}"),
            ))));
        }
    }
    Ok(Verdict::yes(Some(Witness::new(
        &v.name,
        "satisfies box dia x ~ box x and dia box x ~ dia x",
    ))))
}

fn box_meets(n: usize) -> Term {
    Term::meet_all((1..=n).map(|k| Term::box_pow(Term::var("x"), k)))
}

fn dia_joins(m: usize) -> Term {
    Term::join_all((1..=m).map(|k| Term::dia_pow(Term::var("x"), k)))
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem93Report {
    pub verdict: Verdict,
    pub b2_branch: bool,
    pub n: Option<usize>,
    pub m: Option<usize>,
}

/// Least `n`, `m` with `box x /\ ... /\ box^n x <= x` and
/// `x <= dia x \/ ... \/ dia^m x`, or the B2 branch.
pub fn theorem93_battery(v: &VarietyHandle, bound: usize) -> Result<Theorem93Report> {
    let b2 = variety_named(&["B2"])?;
    if equals(v, &b2) {
        return Ok(Theorem93Report {
            verdict: Verdict::yes(Some(Witness::new(&v.name, "equals V(B2)"))),
            b2_branch: true,
            n: None,
            m: None,
        });
    }
    let valid = |e: &Equation| v.generators.iter().all(|g| holds_eq(g, e).holds());
    let x = Term::var("x");
    let n = (1..=bound).find(|&n| valid(&Equation::le(box_meets(n), x.clone())));
    let m = (1..=bound).find(|&m| valid(&Equation::le(x.clone(), dia_joins(m))));
    // in a finite algebra both sequences stabilize within its size
    let decisive = bound
        >= v.generators
            .iter()
            .map(FiniteAlgebra::size)
            .max()
            .unwrap_or(0);
    let status = match (n, m) {
        (Some(_), Some(_)) => Status::Yes,
        _ if decisive => Status::No,
        _ => Status::UnknownUpToBound,
    };
    let detail = match (n, m) {
        (Some(n), Some(m)) => format!("n = {n}, m = {m}"),
        _ => format!("n = {n:?}, m = {m:?}"),
    };
    let verdict = Verdict {
        status,
        bound: Some(bound),
        witness: Some(Witness::new(&v.name, detail)),
        evidence: vec![],
    };
    if verdict.status != Status::Yes
        && v.generators.iter().all(FiniteAlgebra::is_pk4)
        && !v.is_trivial()
        && is_sc_pk4(v)?.is_yes()
    {
        return Err(Error::Inconsistency(format!(
            "{} is SC but neither disjunct holds",
            v.name
        )));
    }
    Ok(Theorem93Report {
        verdict,
        b2_branch: false,
        n,
        m,
    })
}

/// If the variety is PSC then its free 0-generated algebra is simple or
/// trivial. Vacuously true outside positive K4-algebras.
pub fn lemma22_check(v: &VarietyHandle) -> Result<bool> {
    let f0 = free_zero(&v.generators)?;
    if v.is_trivial() {
        return Ok(f0.is_trivial());
    }
    if !v.generators.iter().all(FiniteAlgebra::is_pk4) || !is_psc(v)?.is_yes() {
        return Ok(true);
    }
    Ok(f0.is_trivial() || is_simple(&f0))
}

/// Handles `V(A)` for si PK4 algebras `A` up to `bound` that are not SC,
/// are not inside PS4, and avoid the known ASC obstructions C3a, C3b and
/// D3. These are the open candidates for ASC without SC.
pub fn asc_open_problem_scan(bound: usize) -> Result<Vec<FiniteAlgebra>> {
    let found = enum_algebras(&EnumerationTask::new(bound, Kind::Pk4).si())?;
    let b2 = variety_named(&["B2"])?;
    let obstructions: Vec<FiniteAlgebra> = ["C3a", "C3b", "D3"].iter().map(|n| named(n)).collect();
    let mut out = Vec::new();
    for a in found {
        if a.is_ps4() {
            continue;
        }
        let v = variety_of(std::slice::from_ref(&a))?;
        if equals(&v, &b2) || obstructions.iter().any(|o| v.contains_si(o)) {
            continue;
        }
        out.push(a);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_quasi;

    fn v(names: &[&str]) -> VarietyHandle {
        variety_named(names).unwrap()
    }

    #[test]
    fn quasi_examples() {
        let q = parse_quasi("x ~ dia x => x ~ 0").unwrap();
        let r = classify_quasi(&v(&["B2"]), &q, 2).unwrap();
        assert!(matches!(
            r.verdict,
            QuasiVerdict::ActiveWitness { rank: 0, .. }
        ));

        let q = parse_quasi("box x ~ 0 & dia x ~ 1 => x ~ y").unwrap();
        let r = classify_quasi(&v(&["C2"]), &q, 2).unwrap();
        assert_eq!(r.verdict, QuasiVerdict::PassiveUpTo { bound: 2 });

        let q = QuasiEquation::new(vec![], eq("box dia x ~ box x"));
        let r = classify_quasi(&v(&["D4"]), &q, 1).unwrap();
        assert!(r.valid);
        assert_eq!(r.verdict, QuasiVerdict::Valid);
    }

    #[test]
    fn refutations_replay() {
        let d3 = v(&["D3"]);
        let q = QuasiEquation::new(vec![], eq("box x ~ x"));
        let r = classify_quasi(&d3, &q, 2).unwrap();
        assert!(matches!(
            r.verdict,
            QuasiVerdict::RefutedAdmissibilityAt { rank: 1, .. }
        ));
        let QuasiVerdict::RefutedAdmissibilityAt { rank, assignment } = r.verdict else {
            panic!("expected a refutation, got {:?}", r.verdict);
        };
        assert!(replay_refutation(&d3, &q, rank, &assignment).unwrap());
        // passive in V(D3) but not valid there
        let q = parse_quasi("box x ~ 0 & dia x ~ 1 => 0 ~ 1").unwrap();
        let r = classify_quasi(&d3, &q, 2).unwrap();
        assert!(!r.valid);
        assert_eq!(r.verdict, QuasiVerdict::PassiveUpTo { bound: 2 });
    }

    #[test]
    fn psc_examples() {
        let an = |n| variety_of(&[corpus("AN_MINUS", Some(n)).unwrap()]).unwrap();
        assert!(is_psc(&an(2)).unwrap().is_yes());
        let simple = variety_of(&[corpus("AN_SIMPLE", Some(2)).unwrap()]).unwrap();
        let r = is_psc(&simple).unwrap();
        assert_eq!(r.status, Status::No);
        assert_eq!(r.witness.unwrap().algebra, "D3");
        assert!(is_psc(&v(&["B2"])).unwrap().is_yes());
    }

    #[test]
    fn sc_examples() {
        let r = is_sc_pk4(&v(&["D4"])).unwrap();
        assert!(r.is_yes());
        assert!(r.evidence.iter().any(|e| e.contains("retract")));
        assert_eq!(is_sc_pk4(&v(&["D3"])).unwrap().status, Status::No);
        assert!(is_hsc_pk4(&v(&["B2"])).unwrap().is_yes());
        assert!(is_sc_pk4(&variety_of(&[crate::corpus::trivial()]).unwrap()).is_err());
    }

    #[test]
    fn asc_examples() {
        assert_eq!(asc_necessary(&v(&["C3b"])).unwrap().status, Status::No);
        assert!(asc_necessary(&v(&["D4"])).unwrap().is_yes());
        assert!(asc_necessary(&v(&["C2"])).unwrap().is_yes());
    }

    #[test]
    fn theorem93_examples() {
        let r = theorem93_battery(&v(&["D4"]), 4).unwrap();
        assert_eq!((r.n, r.m), (Some(1), Some(1)));
        assert!(theorem93_battery(&v(&["B2"]), 4).unwrap().b2_branch);
        let r = theorem93_battery(&v(&["C2"]), 4).unwrap();
        assert_eq!((r.n, r.m), (Some(1), Some(1)));
    }

    #[test]
    fn lemma22_examples() {
        let an2 = variety_of(&[corpus("AN_MINUS", Some(2)).unwrap()]).unwrap();
        assert!(lemma22_check(&an2).unwrap());
        assert!(is_iso(&free_zero(&an2.generators).unwrap(), &named("C2")));
        assert!(lemma22_check(&v(&["B2"])).unwrap());
        assert!(lemma22_check(&variety_of(&[crate::corpus::trivial()]).unwrap()).unwrap());
    }
}
