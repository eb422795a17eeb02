//! Finitely generated varieties, compared through their subdirectly
//! irreducible members, and the batteries that reconstruct the bottom of
//! the subvariety lattice of positive S4-algebras.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Elem, FiniteAlgebra, Kind};
use crate::congruence::{
    cg_sig, is_congruence, is_si, monolith, principal, Partition, Signature, DEFAULT_CON_BUDGET,
};
use crate::constructions::{
    boolean_envelope, canonical_form, embeddings, extend_hom, hs_si, CanonicalForm,
    DEFAULT_HOM_BUDGET,
};
use crate::corpus::corpus;
use crate::enumerate::{enum_algebras, EnumerationTask};
use crate::free::{free_over, DEFAULT_FREE_BUDGET};
use crate::syntax::{holds_eq, parse_equation, Compiled, Equation, Term};
use crate::{Error, Result};

/// A variety given by finitely many finite generators, with the
/// subdirectly irreducible members of `HS` of the generators.
#[derive(Debug, Clone)]
pub struct VarietyHandle {
    pub name: String,
    pub generators: Vec<FiniteAlgebra>,
    pub si_closure: Vec<FiniteAlgebra>,
    forms: BTreeSet<CanonicalForm>,
}

impl VarietyHandle {
    pub fn si_names(&self) -> Vec<String> {
        self.si_closure.iter().map(FiniteAlgebra::label).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.si_closure.is_empty()
    }

    /// Contains an isomorphic copy of `a` among its si members.
    pub fn contains_si(&self, a: &FiniteAlgebra) -> bool {
        self.forms.contains(&canonical_form(a))
    }

    /// Stable identifier from the canonical forms of the si members.
    pub fn fingerprint(&self) -> u64 {
        let words: Vec<u32> = self
            .forms
            .iter()
            .flat_map(|f| f.0.iter().copied())
            .collect();
        CanonicalForm(words).fingerprint()
    }
}

pub fn variety_of(gens: &[FiniteAlgebra]) -> Result<VarietyHandle> {
    let name = format!(
        "V({})",
        gens.iter()
            .map(FiniteAlgebra::label)
            .collect::<Vec<_>>()
            .join(",")
    );
    let parts: Vec<Vec<FiniteAlgebra>> = gens
        .par_iter()
        .map(|g| hs_si(g, DEFAULT_CON_BUDGET))
        .collect::<Result<_>>()?;
    let mut by_form: BTreeMap<CanonicalForm, FiniteAlgebra> = BTreeMap::new();
    for a in parts.into_iter().flatten() {
        by_form.entry(canonical_form(&a)).or_insert(a);
    }
    let forms = by_form.keys().cloned().collect();
    Ok(VarietyHandle {
        name,
        generators: gens.to_vec(),
        si_closure: by_form.into_values().collect(),
        forms,
    })
}

/// Generators given as corpus names.
pub fn variety_named(names: &[&str]) -> Result<VarietyHandle> {
    let gens: Vec<FiniteAlgebra> = names
        .iter()
        .map(|n| crate::corpus::corpus_spec(n))
        .collect::<Result<_>>()?;
    variety_of(&gens)
}

/// `w` is a subvariety of `v`.
pub fn includes(v: &VarietyHandle, w: &VarietyHandle) -> bool {
    w.forms.is_subset(&v.forms)
}

pub fn equals(v: &VarietyHandle, w: &VarietyHandle) -> bool {
    v.forms == w.forms
}

/// Hasse edges `(lower, upper)` of strict inclusion among `handles`.
pub fn covers_poset(handles: &[VarietyHandle]) -> Vec<(usize, usize)> {
    let n = handles.len();
    let below = |i: usize, j: usize| {
        i != j && includes(&handles[j], &handles[i]) && !equals(&handles[i], &handles[j])
    };
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if below(i, j) && !(0..n).any(|k| below(i, k) && below(k, j)) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Generator lists of the varieties of height at most four, bottom up.
pub const FIGURE4_NODES: [&[&str]; 16] = [
    &["Trivial"],
    &["C2"],
    &["D3"],
    &["C3a"],
    &["C3b"],
    &["D4"],
    &["D3", "D4"],
    &["C3a", "D4"],
    &["C3b", "D4"],
    &["C3a", "D3"],
    &["C3b", "D3"],
    &["A4"],
    &["B4"],
    &["C3a", "C3b"],
    &["C4a"],
    &["C4b"],
];

/// Expected covers, as indices into [`FIGURE4_NODES`].
pub const FIGURE4_EDGES: [(usize, usize); 21] = [
    (0, 1),
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (5, 6),
    (5, 7),
    (5, 8),
    (2, 6),
    (2, 9),
    (2, 10),
    (2, 11),
    (2, 12),
    (3, 13),
    (3, 9),
    (3, 7),
    (3, 14),
    (4, 13),
    (4, 10),
    (4, 8),
    (4, 15),
];

pub fn figure4_handles() -> Result<Vec<VarietyHandle>> {
    FIGURE4_NODES
        .par_iter()
        .map(|names| {
            if names == &["Trivial"] {
                let mut h = variety_of(&[crate::corpus::trivial()])?;
                h.name = "Trivial".into();
                Ok(h)
            } else {
                variety_named(names)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct VarietyNode {
    pub name: String,
    pub id: String,
    pub si: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PosetReport {
    pub nodes: Vec<VarietyNode>,
    pub edges: Vec<(usize, usize)>,
    pub batteries: BTreeMap<String, bool>,
}

pub fn poset_report(handles: &[VarietyHandle]) -> PosetReport {
    let edges = covers_poset(handles);
    let mut sorted_expected: Vec<(usize, usize)> = FIGURE4_EDGES.to_vec();
    sorted_expected.sort();
    let mut batteries = BTreeMap::new();
    if handles.len() == FIGURE4_NODES.len() {
        batteries.insert("figure4_edges".to_string(), edges == sorted_expected);
    }
    PosetReport {
        nodes: handles
            .iter()
            .map(|h| VarietyNode {
                name: h.name.clone(),
                id: format!("V{:016x}", h.fingerprint()),
                si: h.si_names(),
            })
            .collect(),
        edges,
        batteries,
    }
}

/// DOT graph of the inclusion order, bottom up.
pub fn variety_dot(handles: &[VarietyHandle]) -> String {
    let mut out = String::from("digraph varieties {\n  rankdir=BT;\n");
    let id = |h: &VarietyHandle| format!("V{:016x}", h.fingerprint());
    for h in handles {
        writeln!(out, "  {} [label=\"{}\"];", id(h), h.name).unwrap();
    }
    for (i, j) in covers_poset(handles) {
        writeln!(
            out,
            "  {} -> {} [arrowhead=none];",
            id(&handles[i]),
            id(&handles[j])
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

fn eq(s: &str) -> Equation {
    parse_equation(s).expect("built-in equation parses")
}

/// `dia box dia x ~ dia x`.
pub fn splitting_equation_c3a() -> Equation {
    eq("dia box dia x ~ dia x")
}

/// `box dia box x ~ box x`.
pub fn splitting_equation_c3b() -> Equation {
    eq("box dia box x ~ box x")
}

/// `dia x /\ box dia x <= x \/ box x \/ dia box x`.
pub fn splitting_equation_d3() -> Equation {
    eq("dia x /\\ box dia x <= x \\/ box x \\/ dia box x")
}

/// `box dia x ~ box x` and `dia box x ~ dia x`.
pub fn endo_equations() -> Vec<Equation> {
    vec![eq("box dia x ~ box x"), eq("dia box x ~ dia x")]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SplitVerdict {
    pub satisfies_equation: bool,
    pub excludes_algebra: bool,
}

impl SplitVerdict {
    pub fn consistent(&self) -> bool {
        self.satisfies_equation == self.excludes_algebra
    }
}

fn split(a: &FiniteAlgebra, kind: Kind, e: &Equation, splitter: &str) -> Result<SplitVerdict> {
    if !a.satisfies(kind) {
        return Err(Error::Precondition(format!("algebra is not {kind}")));
    }
    let s = corpus(splitter, None)?;
    let cf = canonical_form(&s);
    let excluded = !hs_si(a, DEFAULT_CON_BUDGET)?
        .iter()
        .any(|b| canonical_form(b) == cf);
    Ok(SplitVerdict {
        satisfies_equation: holds_eq(a, e).holds(),
        excludes_algebra: excluded,
    })
}

pub fn splitting_c3a(a: &FiniteAlgebra) -> Result<SplitVerdict> {
    split(a, Kind::Ps4, &splitting_equation_c3a(), "C3a")
}

pub fn splitting_c3b(a: &FiniteAlgebra) -> Result<SplitVerdict> {
    split(a, Kind::Ps4, &splitting_equation_c3b(), "C3b")
}

pub fn splitting_d3(a: &FiniteAlgebra) -> Result<SplitVerdict> {
    split(a, Kind::Pk4, &splitting_equation_d3(), "D3")
}

/// Outcome of a check over every enumerated algebra within a bound.
#[derive(Debug, Clone, Serialize)]
pub struct BatteryReport {
    pub name: String,
    pub bound: usize,
    pub checked: usize,
    pub passed: bool,
    /// Names of the algebras the battery found (for classification batteries).
    pub witnesses: Vec<String>,
    pub counterexample: Option<String>,
}

impl BatteryReport {
    pub fn summary(&self) -> String {
        let status = if self.passed { "pass" } else { "FAIL" };
        let mut s = format!(
            "{}: {status} (bound {}, {} checked)",
            self.name, self.bound, self.checked
        );
        if !self.witnesses.is_empty() {
            write!(s, ": {{{}}}", self.witnesses.join(", ")).unwrap();
        }
        if let Some(c) = &self.counterexample {
            write!(s, "; counterexample {c}").unwrap();
        }
        s
    }
}

fn classification(
    name: &str,
    bound: usize,
    task: EnumerationTask,
    allowed: &[&str],
) -> Result<BatteryReport> {
    let found = enum_algebras(&task)?;
    let allowed: Vec<(CanonicalForm, &str)> = allowed
        .iter()
        .map(|n| Ok((canonical_form(&corpus(n, None)?), *n)))
        .collect::<Result<_>>()?;
    let mut witnesses = BTreeSet::new();
    let mut counterexample = None;
    for a in &found {
        let cf = canonical_form(a);
        match allowed.iter().find(|(f, _)| *f == cf) {
            Some((_, n)) => {
                witnesses.insert(n.to_string());
            }
            None => {
                counterexample.get_or_insert_with(|| a.to_json());
            }
        }
    }
    Ok(BatteryReport {
        name: name.into(),
        bound,
        checked: found.len(),
        passed: counterexample.is_none(),
        witnesses: witnesses.into_iter().collect(),
        counterexample,
    })
}

/// Every si PS4 algebra up to `bound` satisfying the endomorphism equations
/// is C2 or D4.
pub fn theorem610_battery(bound: usize) -> Result<BatteryReport> {
    let task = EnumerationTask::new(bound, Kind::Ps4)
        .si()
        .satisfying(endo_equations());
    classification("thm610", bound, task, &["C2", "D4"])
}

/// Every si PMA up to `bound` with `box x ~ 1` and `dia x ~ 0` is B2.
pub fn lemma92_battery(bound: usize) -> Result<BatteryReport> {
    let task = EnumerationTask::new(bound, Kind::Pma)
        .si()
        .satisfying(vec![eq("box x ~ 1"), eq("dia x ~ 0")]);
    classification("lemma92", bound, task, &["B2"])
}

fn per_algebra(
    name: &str,
    bound: usize,
    task: EnumerationTask,
    check: &(dyn Fn(&FiniteAlgebra) -> Result<bool> + Sync),
) -> Result<BatteryReport> {
    let found = enum_algebras(&task)?;
    let results: Vec<bool> = found.par_iter().map(check).collect::<Result<_>>()?;
    let counterexample = found
        .iter()
        .zip(&results)
        .find(|(_, ok)| !**ok)
        .map(|(a, _)| a.to_json());
    Ok(BatteryReport {
        name: name.into(),
        bound,
        checked: found.len(),
        passed: counterexample.is_none(),
        witnesses: vec![],
        counterexample,
    })
}

/// Envelopes of fsi PS4 algebras up to `bound` are fsi.
pub fn theorem42_battery(bound: usize) -> Result<BatteryReport> {
    per_algebra(
        "thm42",
        bound,
        EnumerationTask::new(bound, Kind::Ps4).fsi(),
        &|a| Ok(crate::congruence::is_fsi(&boolean_envelope(a)?.algebra)),
    )
}

/// The seven-term diagram holds at every element of every PS4 algebra up to
/// `bound`.
pub fn fact52_battery(bound: usize) -> Result<BatteryReport> {
    per_algebra(
        "fact52",
        bound,
        EnumerationTask::new(bound, Kind::Ps4),
        &|a| Ok(a.elements().all(|b| crate::free::fact52_check(a, b))),
    )
}

/// For every PMA up to `bound`: the representation map is an isomorphism
/// onto the up-set algebra of the dual space, and the dual relation is
/// reflexive (transitive) exactly when the T (4) laws hold.
pub fn duality_battery(bound: usize) -> Result<BatteryReport> {
    per_algebra(
        "duality",
        bound,
        EnumerationTask::new(bound, Kind::Pma),
        &|a| {
            let x = crate::constructions::dual_space(a)?;
            let up = crate::constructions::upset_algebra(&x)?;
            let k = crate::constructions::kappa(a)?;
            let iso = up.size() == a.size()
                && k.is_injective()
                && crate::constructions::is_hom(a, &up, &k);
            let t_laws = a
                .elements()
                .all(|e| a.leq(a.box_of(e), e) && a.leq(e, a.diamond_of(e)));
            let four_laws = a.elements().all(|e| {
                a.leq(a.box_of(e), a.box_of(a.box_of(e)))
                    && a.leq(a.diamond_of(a.diamond_of(e)), a.diamond_of(e))
            });
            Ok(iso && x.is_reflexive() == t_laws && x.is_transitive() == four_laws)
        },
    )
}

/// Both splitting directions for C3a and C3b over si PS4 algebras, and the
/// D3 splitting over si PK4 algebras.
pub fn splitting_battery(ps4_bound: usize, pk4_bound: usize) -> Result<BatteryReport> {
    let ps4 = enum_algebras(&EnumerationTask::new(ps4_bound, Kind::Ps4).si())?;
    let pk4 = enum_algebras(&EnumerationTask::new(pk4_bound, Kind::Pk4).si())?;
    let bad_ps4 = ps4
        .par_iter()
        .map(|a| Ok(splitting_c3a(a)?.consistent() && splitting_c3b(a)?.consistent()))
        .collect::<Result<Vec<bool>>>()?;
    let bad_pk4 = pk4
        .par_iter()
        .map(|a| Ok(splitting_d3(a)?.consistent()))
        .collect::<Result<Vec<bool>>>()?;
    let counterexample = ps4
        .iter()
        .zip(&bad_ps4)
        .chain(pk4.iter().zip(&bad_pk4))
        .find(|(_, ok)| !**ok)
        .map(|(a, _)| a.to_json());
    Ok(BatteryReport {
        name: "splitting".into(),
        bound: ps4_bound.max(pk4_bound),
        checked: ps4.len() + pk4.len(),
        passed: counterexample.is_none(),
        witnesses: vec![],
        counterexample,
    })
}

/// `a` validates every one-variable equation of `b`: each element of `a`
/// is the image of the generator of `b`'s one-generated free algebra.
pub fn satisfies_one_var_theory(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<bool> {
    let f = free_over(std::slice::from_ref(b), 1, DEFAULT_FREE_BUDGET)?;
    Ok(a.elements().all(|x| {
        extend_hom(&f.algebra, a, &f.generators, &[x])
            .is_some_and(|m| m.iter().all(Option::is_some))
    }))
}

/// si PS4 algebras other than C2 and D3 that validate D3's one-variable
/// theory contain A4 or B4.
pub fn same_theory_d3_battery(bound: usize) -> Result<BatteryReport> {
    let d3 = corpus("D3", None)?;
    let small: Vec<FiniteAlgebra> = ["C2", "D3"]
        .iter()
        .map(|n| corpus(n, None))
        .collect::<Result<_>>()?;
    let targets: Vec<FiniteAlgebra> = ["A4", "B4"]
        .iter()
        .map(|n| corpus(n, None))
        .collect::<Result<_>>()?;
    per_algebra(
        "same-theory-d3",
        bound,
        EnumerationTask::new(bound, Kind::Ps4).si(),
        &|a| {
            if small.iter().any(|s| crate::constructions::is_iso(a, s))
                || !satisfies_one_var_theory(a, &d3)?
            {
                return Ok(true);
            }
            for t in &targets {
                if !embeddings(t, a, DEFAULT_HOM_BUDGET)?.is_empty() {
                    return Ok(true);
                }
            }
            Ok(false)
        },
    )
}

/// si PS4 algebras validating C3a's one-variable theory are C2 or C3a.
pub fn same_theory_c3a_battery(bound: usize) -> Result<BatteryReport> {
    let c3a = corpus("C3a", None)?;
    let task = EnumerationTask::new(bound, Kind::Ps4).si();
    let found = enum_algebras(&task)?;
    let mut keep = Vec::new();
    for a in found {
        if satisfies_one_var_theory(&a, &c3a)? {
            keep.push(a);
        }
    }
    let allowed: Vec<CanonicalForm> = ["C2", "C3a"]
        .iter()
        .map(|n| Ok(canonical_form(&corpus(n, None)?)))
        .collect::<Result<_>>()?;
    let counterexample = keep
        .iter()
        .find(|a| !allowed.contains(&canonical_form(a)))
        .map(|a| a.to_json());
    Ok(BatteryReport {
        name: "same-theory-c3a".into(),
        bound,
        checked: keep.len(),
        passed: counterexample.is_none(),
        witnesses: keep.iter().map(FiniteAlgebra::label).collect(),
        counterexample,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EndoReport {
    pub endomorphisms: bool,
    pub kernels_coincide: bool,
    pub kernel_is_congruence: bool,
    pub lattice_generated: bool,
    /// Checked only for si algebras.
    pub fixed_points: Option<bool>,
    pub monoliths: Option<bool>,
}

impl EndoReport {
    pub fn passed(&self) -> bool {
        self.endomorphisms
            && self.kernels_coincide
            && self.kernel_is_congruence
            && self.lattice_generated
            && self.fixed_points.unwrap_or(true)
            && self.monoliths.unwrap_or(true)
    }
}

/// Consequences of the endomorphism equations on a PS4 algebra: the
/// operators are lattice endomorphisms with a common kernel that is a
/// congruence; principal congruences inside the kernel are lattice
/// congruences; and, when si, the fixed-point and monolith claims.
pub fn lemma64_66_properties(a: &FiniteAlgebra) -> Result<EndoReport> {
    if !a.is_ps4() || !endo_equations().iter().all(|e| holds_eq(a, e).holds()) {
        return Err(Error::Precondition(
            "needs a PS4 algebra satisfying box dia x ~ box x and dia box x ~ dia x".into(),
        ));
    }
    let all2 = || a.elements().flat_map(|x| a.elements().map(move |y| (x, y)));
    let endo = |f: &dyn Fn(Elem) -> Elem| {
        f(a.bottom()) == a.bottom()
            && f(a.top()) == a.top()
            && all2().all(|(x, y)| {
                f(a.meet(x, y)) == a.meet(f(x), f(y)) && f(a.join(x, y)) == a.join(f(x), f(y))
            })
    };
    let endomorphisms = endo(&|x| a.box_of(x)) && endo(&|x| a.diamond_of(x));
    let kb = Partition::kernel(&a.box_table());
    let kd = Partition::kernel(&a.diamond_table());
    let lattice_generated = all2()
        .filter(|&(x, y)| a.box_of(x) == a.box_of(y))
        .all(|(x, y)| principal(a, x, y) == cg_sig(a, &[(x, y)], Signature::LatticeOnly));
    let (fixed_points, monoliths) = if is_si(a) && !a.is_trivial() {
        let mono = monolith(a)?;
        let gens: Vec<(Elem, Elem)> = all2()
            .filter(|&(x, y)| a.lt(x, y) && principal(a, x, y) == mono)
            .collect();
        let fixed = gens.iter().all(|&(p, q)| {
            a.elements().all(|c| {
                (!(a.leq(q, c) && c != a.top()) || a.diamond_of(c) == c)
                    && (!(a.leq(c, p) && c != a.bottom()) || a.box_of(c) == c)
            })
        });
        let monos = a.elements().all(|x| {
            let bx = a.box_of(x);
            let dx = a.diamond_of(x);
            (!a.lt(bx, x) || principal(a, bx, x) == mono)
                && (!a.lt(x, dx) || principal(a, x, dx) == mono)
        });
        (Some(fixed), Some(monos))
    } else {
        (None, None)
    };
    Ok(EndoReport {
        endomorphisms,
        kernels_coincide: kb == kd,
        kernel_is_congruence: is_congruence(a, &kb),
        lattice_generated,
        fixed_points,
        monoliths,
    })
}

/// An equation in `vars` variables of depth at most `depth` valid in `b`
/// and failing in `a`, found by exploring term functions semantically.
/// Fails once more than `limit` distinct term functions appear.
pub fn separating_equation(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    vars: usize,
    depth: usize,
    limit: usize,
) -> Result<Option<Equation>> {
    let names: Vec<String> = (0..vars)
        .map(|i| {
            ["x", "y", "z", "u", "v", "w"]
                .get(i)
                .map_or(format!("x{i}"), |s| s.to_string())
        })
        .collect();
    let asg_a: Vec<Vec<Elem>> = crate::syntax::assignments(a.size(), vars).collect();
    let asg_b: Vec<Vec<Elem>> = crate::syntax::assignments(b.size(), vars).collect();
    let nb = asg_b.len();
    let eval = |t: &Term| -> Vec<Elem> {
        let c = Compiled::new(t, &names).expect("variables in range");
        let mut st = Vec::new();
        let mut out: Vec<Elem> = asg_b.iter().map(|v| c.eval(b, v, &mut st)).collect();
        out.extend(asg_a.iter().map(|v| c.eval(a, v, &mut st)));
        out
    };
    let mut tables: Vec<Term> = Vec::new();
    let mut seen: HashMap<Vec<Elem>, usize> = HashMap::new();
    let mut by_b: HashMap<Vec<Elem>, usize> = HashMap::new();
    // returns a separating equation if the new table shares its b-part
    let mut add =
        |t: Term, values: Vec<Elem>, tables: &mut Vec<Term>| -> Result<Option<Equation>> {
            if seen.contains_key(&values) {
                return Ok(None);
            }
            if tables.len() >= limit {
                return Err(Error::budget("term functions", limit, tables.len() + 1));
            }
            if let Some(&j) = by_b.get(&values[..nb]) {
                return Ok(Some(Equation::new(tables[j].clone(), t)));
            }
            by_b.insert(values[..nb].to_vec(), tables.len());
            seen.insert(values, tables.len());
            tables.push(t);
            Ok(None)
        };
    let mut leaves: Vec<Term> = vec![Term::Zero, Term::One];
    leaves.extend(names.iter().map(|n| Term::var(n)));
    for t in leaves {
        let v = eval(&t);
        if let Some(e) = add(t, v, &mut tables)? {
            return Ok(Some(e));
        }
    }
    let mut start = 0;
    for _ in 0..depth {
        let end = tables.len();
        for i in 0..end {
            for unary in [Term::bx as fn(Term) -> Term, Term::dia] {
                if i < start {
                    continue;
                }
                let t = unary(tables[i].clone());
                let v = eval(&t);
                if let Some(e) = add(t, v, &mut tables)? {
                    return Ok(Some(e));
                }
            }
            for j in 0..=i {
                if i < start && j < start {
                    continue;
                }
                for binary in [Term::meet as fn(Term, Term) -> Term, Term::join] {
                    let t = binary(tables[i].clone(), tables[j].clone());
                    let v = eval(&t);
                    if let Some(e) = add(t, v, &mut tables)? {
                        return Ok(Some(e));
                    }
                }
            }
        }
        start = end;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn named(n: &str) -> FiniteAlgebra {
        corpus(n, None).unwrap()
    }

    #[test]
    fn inclusion_examples() {
        let d3 = variety_named(&["D3"]).unwrap();
        let c2 = variety_named(&["C2"]).unwrap();
        assert!(includes(&d3, &c2));
        assert!(!includes(&c2, &d3));
        assert!(includes(&d3, &d3));
        let a = variety_named(&["C3a"]).unwrap();
        let b = variety_named(&["C3b"]).unwrap();
        assert!(!equals(&a, &b));
    }

    #[test]
    fn covers_of_the_two_chain() {
        let hs = figure4_handles().unwrap();
        let edges = covers_poset(&hs);
        let up_from = |i: usize| -> Vec<&str> {
            edges
                .iter()
                .filter(|e| e.0 == i)
                .map(|e| hs[e.1].name.as_str())
                .collect()
        };
        assert_eq!(up_from(1), vec!["V(D3)", "V(C3a)", "V(C3b)", "V(D4)"]);
        let mut expected = FIGURE4_EDGES.to_vec();
        expected.sort();
        assert_eq!(edges, expected);
        assert!(variety_dot(&hs).contains("->"));
    }

    #[test]
    fn splitting_examples() {
        let v = splitting_c3a(&named("C4a")).unwrap();
        assert!(v.consistent() && !v.satisfies_equation);
        let v = splitting_d3(&named("D4")).unwrap();
        assert!(v.consistent() && v.satisfies_equation);
        let v = splitting_c3a(&named("C2")).unwrap();
        assert!(v.consistent() && v.satisfies_equation);
        assert!(splitting_c3a(&named("B2")).is_err());
    }

    #[test]
    fn small_batteries() {
        let r = theorem610_battery(2).unwrap();
        assert!(r.passed);
        assert_eq!(r.witnesses, vec!["C2"]);
        let r = theorem610_battery(6).unwrap();
        assert!(r.passed);
        assert_eq!(r.witnesses, vec!["C2", "D4"]);
        let r = lemma92_battery(4).unwrap();
        assert!(r.passed, "{}", r.summary());
        assert_eq!(r.witnesses, vec!["B2"]);
        assert!(duality_battery(4).unwrap().passed);
        assert!(theorem42_battery(4).unwrap().passed);
        assert!(fact52_battery(5).unwrap().passed);
        assert!(splitting_battery(5, 4).unwrap().passed);
    }

    #[test]
    fn endomorphism_properties() {
        for a in [
            named("D4"),
            named("C2"),
            free_over(&[named("D4")], 1, 100).unwrap().algebra,
        ] {
            assert!(lemma64_66_properties(&a).unwrap().passed());
        }
        assert!(lemma64_66_properties(&named("D3")).is_err());
    }

    #[test]
    fn separation_agrees_with_hs() {
        let names = ["C2", "D3", "C3a", "C3b", "D4"];
        for x in names {
            for y in names {
                let (a, b) = (named(x), named(y));
                let inside = variety_of(std::slice::from_ref(&b))
                    .unwrap()
                    .contains_si(&a);
                let sep = separating_equation(&a, &b, 1, 4, 100_000).unwrap();
                assert_eq!(inside, sep.is_none(), "{x} in V({y})");
                if let Some(e) = sep {
                    assert!(holds_eq(&b, &e).holds() && !holds_eq(&a, &e).holds());
                }
            }
        }
    }
}
