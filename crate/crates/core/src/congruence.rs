//! Congruences: closure, lattices, irreducibility predicates and the
//! equationally definable principal congruence formulas.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{Elem, FiniteAlgebra, Kind};
use crate::{Error, Result};

/// A partition of `0..n`, stored as block labels numbered in order of each
/// block's least element. Two partitions are equal iff their labels are.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<u32>,
}

impl std::fmt::Debug for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.blocks())
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", self.blocks())
    }
}

impl Partition {
    /// Canonicalizes arbitrary labels.
    pub fn from_labels<T: Copy + Eq + std::hash::Hash>(raw: &[T]) -> Self {
        let mut seen = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                let next = seen.len() as u32;
                *seen.entry(*l).or_insert(next)
            })
            .collect();
        Partition { labels }
    }

    /// Fails unless the blocks are disjoint and cover `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<Elem>]) -> Result<Self> {
        let mut raw = vec![usize::MAX; n];
        for (i, block) in blocks.iter().enumerate() {
            for &e in block {
                if e >= n {
                    return Err(Error::ElementOutOfRange { index: e, size: n });
                }
                if raw[e] != usize::MAX {
                    return Err(Error::Precondition(format!("element {e} in two blocks")));
                }
                raw[e] = i;
            }
        }
        if let Some(e) = raw.iter().position(|&l| l == usize::MAX) {
            return Err(Error::Precondition(format!("element {e} in no block")));
        }
        Ok(Self::from_labels(&raw))
    }

    pub fn identity(n: usize) -> Self {
        Partition {
            labels: (0..n as u32).collect(),
        }
    }

    pub fn total(n: usize) -> Self {
        Partition { labels: vec![0; n] }
    }

    /// Kernel of a map.
    pub fn kernel(map: &[Elem]) -> Self {
        Self::from_labels(map)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.labels.iter().max().map_or(0, |&m| m as usize + 1)
    }

    #[inline]
    pub fn label(&self, a: Elem) -> usize {
        self.labels[a] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn same(&self, a: Elem, b: Elem) -> bool {
        self.labels[a] == self.labels[b]
    }

    pub fn blocks(&self) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (e, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(e);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.num_blocks() == self.size()
    }

    pub fn is_total(&self) -> bool {
        self.num_blocks() <= 1
    }

    /// Refinement order: `self` is contained in `other` as a relation.
    pub fn refines(&self, other: &Partition) -> bool {
        // each block of self maps into a single block of other
        let mut image = vec![u32::MAX; self.num_blocks()];
        for (e, &l) in self.labels.iter().enumerate() {
            let slot = &mut image[l as usize];
            if *slot == u32::MAX {
                *slot = other.labels[e];
            } else if *slot != other.labels[e] {
                return false;
            }
        }
        true
    }

    pub fn meet(&self, other: &Partition) -> Partition {
        let pairs: Vec<(u32, u32)> = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| (a, b))
            .collect();
        Self::from_labels(&pairs)
    }

    /// Equivalence join (transitive closure of the union).
    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf = UnionFind::new(self.size());
        for p in [self, other] {
            let mut first = vec![usize::MAX; p.num_blocks()];
            for (e, &l) in p.labels.iter().enumerate() {
                let f = &mut first[l as usize];
                if *f == usize::MAX {
                    *f = e;
                } else {
                    uf.union(*f, e);
                }
            }
        }
        uf.partition()
    }

    /// A spanning set of pairs: each element with its block's least element.
    pub fn generating_pairs(&self) -> Vec<(Elem, Elem)> {
        self.blocks()
            .iter()
            .flat_map(|b| b[1..].iter().map(move |&e| (b[0], e)))
            .collect()
    }

    /// Restriction to a subset of the universe, relabelled `0..sub.len()`.
    pub fn restrict(&self, sub: &[Elem]) -> Partition {
        let raw: Vec<u32> = sub.iter().map(|&e| self.labels[e]).collect();
        Self::from_labels(&raw)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let blocks: Vec<Vec<Elem>> = Vec::deserialize(d)?;
        let n = blocks.iter().map(Vec::len).sum();
        Partition::from_blocks(n, &blocks).map_err(serde::de::Error::custom)
    }
}

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Returns whether two classes were merged.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn partition(&mut self) -> Partition {
        let roots: Vec<usize> = (0..self.parent.len()).map(|a| self.find(a)).collect();
        Partition::from_labels(&roots)
    }
}

/// Which operations a congruence must respect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signature {
    /// Meet, join and both modal operators.
    Full,
    /// Meet and join only.
    LatticeOnly,
}

/// Least congruence containing `pairs`.
pub fn cg(a: &FiniteAlgebra, pairs: &[(Elem, Elem)]) -> Partition {
    cg_sig(a, pairs, Signature::Full)
}

/// Least congruence of the given signature containing `pairs`.
///
/// Each newly merged pair is queued once; processing it merges the images
/// under the unary operators and one meet row and join row. Compatibility of
/// the generated equivalence follows by transitivity.
pub fn cg_sig(a: &FiniteAlgebra, pairs: &[(Elem, Elem)], sig: Signature) -> Partition {
    let n = a.size();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(Elem, Elem)> = Vec::new();
    for &(x, y) in pairs {
        if uf.union(x, y) {
            work.push((x, y));
        }
    }
    let (meet, join) = (a.raw_meet(), a.raw_join());
    while let Some((x, y)) = work.pop() {
        if sig == Signature::Full {
            for (u, v) in [
                (a.box_of(x), a.box_of(y)),
                (a.diamond_of(x), a.diamond_of(y)),
            ] {
                if uf.union(u, v) {
                    work.push((u, v));
                }
            }
        }
        let (rx, ry) = (x * n, y * n);
        for c in 0..n {
            for table in [meet, join] {
                let (u, v) = (table[rx + c] as Elem, table[ry + c] as Elem);
                if uf.union(u, v) {
                    work.push((u, v));
                }
            }
        }
    }
    uf.partition()
}

pub fn principal(a: &FiniteAlgebra, x: Elem, y: Elem) -> Partition {
    cg(a, &[(x, y)])
}

/// Whether a partition respects every operation.
pub fn is_congruence(a: &FiniteAlgebra, p: &Partition) -> bool {
    congruence_violation(a, p).is_none()
}

/// The first related pair whose images under some operation are unrelated.
pub fn congruence_violation(a: &FiniteAlgebra, p: &Partition) -> Option<String> {
    if p.size() != a.size() {
        return Some(format!(
            "partition of {} elements for an algebra of size {}",
            p.size(),
            a.size()
        ));
    }
    for (x, y) in p.generating_pairs() {
        if !p.same(a.box_of(x), a.box_of(y)) {
            return Some(format!("box separates {x} ~ {y}"));
        }
        if !p.same(a.diamond_of(x), a.diamond_of(y)) {
            return Some(format!("diamond separates {x} ~ {y}"));
        }
        for c in a.elements() {
            if !p.same(a.meet(x, c), a.meet(y, c)) {
                return Some(format!("meet with {c} separates {x} ~ {y}"));
            }
            if !p.same(a.join(x, c), a.join(y, c)) {
                return Some(format!("join with {c} separates {x} ~ {y}"));
            }
        }
    }
    None
}

pub const DEFAULT_CON_BUDGET: usize = 200_000;

/// Distinct principal congruences `Cg(x, y)`, `x < y` by index, in canonical
/// order.
pub fn principal_congruences(a: &FiniteAlgebra) -> Vec<Partition> {
    let n = a.size();
    let pairs: Vec<(Elem, Elem)> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .collect();
    let mut out: Vec<Partition> = pairs.par_iter().map(|&(x, y)| principal(a, x, y)).collect();
    out.sort();
    out.dedup();
    out
}

/// All congruences, sorted canonically. Every congruence is a join of
/// principal ones, so the join-closure of the principals plus the identity
/// is the whole lattice.
pub fn con_lattice(a: &FiniteAlgebra, budget: usize) -> Result<Vec<Partition>> {
    let principals = principal_congruences(a);
    let mut seen: HashSet<Partition> = HashSet::new();
    seen.insert(Partition::identity(a.size()));
    let mut frontier: Vec<Partition> = Vec::new();
    for p in &principals {
        if seen.insert(p.clone()) {
            frontier.push(p.clone());
        }
    }
    while let Some(theta) = frontier.pop() {
        for p in &principals {
            if p.refines(&theta) {
                continue;
            }
            let j = theta.join(p);
            if !seen.contains(&j) {
                if seen.len() >= budget {
                    return Err(Error::budget("congruences", budget, seen.len() + 1));
                }
                seen.insert(j.clone());
                frontier.push(j);
            }
        }
    }
    let mut out: Vec<Partition> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Intersection of all non-identity congruences (the identity when none or
/// when that intersection is trivial).
fn least_nontrivial(a: &FiniteAlgebra) -> Partition {
    let n = a.size();
    principal_congruences(a)
        .into_iter()
        .filter(|p| !p.is_identity())
        .fold(Partition::total(n), |acc, p| acc.meet(&p))
}

/// Exactly two congruences. The trivial algebra is not simple.
pub fn is_simple(a: &FiniteAlgebra) -> bool {
    if a.is_trivial() {
        return false;
    }
    let n = a.size();
    (0..n).all(|x| (x + 1..n).all(|y| principal(a, x, y).is_total()))
}

/// The identity is completely meet-irreducible in the congruence lattice.
pub fn is_si(a: &FiniteAlgebra) -> bool {
    !a.is_trivial() && !least_nontrivial(a).is_identity()
}

/// The identity is meet-irreducible; enough to test principal pairs.
pub fn is_fsi(a: &FiniteAlgebra) -> bool {
    if a.is_trivial() {
        return false;
    }
    let ps: Vec<Partition> = principal_congruences(a)
        .into_iter()
        .filter(|p| !p.is_identity())
        .collect();
    ps.iter()
        .enumerate()
        .all(|(i, p)| ps[i..].iter().all(|q| !p.meet(q).is_identity()))
}

/// Least non-identity congruence of a subdirectly irreducible algebra.
pub fn monolith(a: &FiniteAlgebra) -> Result<Partition> {
    if a.is_trivial() {
        return Err(Error::NotSubdirectlyIrreducible);
    }
    let m = least_nontrivial(a);
    if m.is_identity() {
        Err(Error::NotSubdirectlyIrreducible)
    } else {
        Ok(m)
    }
}

/// Congruences whose quotient is subdirectly irreducible: those with a
/// unique upper cover in the congruence lattice.
pub fn si_congruences(a: &FiniteAlgebra, budget: usize) -> Result<Vec<Partition>> {
    let all = con_lattice(a, budget)?;
    Ok(all
        .par_iter()
        .filter(|theta| {
            let above: Vec<&Partition> = all
                .iter()
                .filter(|p| *p != *theta && theta.refines(p))
                .collect();
            let covers = above
                .iter()
                .filter(|p| !above.iter().any(|q| q != *p && q.refines(p)))
                .count();
            covers == 1
        })
        .cloned()
        .collect())
}

/// Box joins to 1 only from 1, diamond meets to 0 only from 0.
pub fn is_well_connected(a: &FiniteAlgebra) -> Result<bool> {
    if !a.is_ps4() {
        return Err(Error::Precondition(
            "well-connectedness is defined for positive S4-algebras".into(),
        ));
    }
    let (bot, top) = (a.bottom(), a.top());
    for x in a.elements() {
        for y in a.elements() {
            if a.join(a.box_of(x), a.box_of(y)) == top && x != top && y != top {
                return Ok(false);
            }
            if a.meet(a.diamond_of(x), a.diamond_of(y)) == bot && x != bot && y != bot {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The simplicity criterion for non-trivial positive K4-algebras, evaluated
/// literally: either the two-element algebra with `box 0 = 1, dia 1 = 0`,
/// or collapsing operators plus the separation condition on chains
/// `0 < x < y < 1`.
pub fn is_simple_lemma45(a: &FiniteAlgebra) -> Result<bool> {
    if a.is_trivial() || !a.satisfies(Kind::Pk4) {
        return Err(Error::Precondition(
            "the criterion applies to non-trivial positive K4-algebras".into(),
        ));
    }
    let (bot, top) = (a.bottom(), a.top());
    if a.size() == 2 && a.box_of(bot) == top && a.diamond_of(top) == bot {
        return Ok(true);
    }
    let collapse = a.elements().all(|x| {
        a.box_of(x) == if x == top { top } else { bot }
            && a.diamond_of(x) == if x == bot { bot } else { top }
    });
    if !collapse {
        return Ok(false);
    }
    let inner: Vec<Elem> = a.elements().filter(|&x| x != bot && x != top).collect();
    let separated = inner.iter().all(|&x| {
        inner.iter().filter(|&&y| a.lt(x, y)).all(|&y| {
            inner.iter().any(|&c| {
                (a.leq(x, c) && a.join(y, c) == top) || (a.leq(c, y) && a.meet(x, c) == bot)
            })
        })
    });
    Ok(separated)
}

/// Lattice congruence generated by `(x, y)`, pointwise:
/// `c ~ d` iff `c /\ x /\ y = d /\ x /\ y` and `c \/ x \/ y = d \/ x \/ y`.
pub fn cg_dl(a: &FiniteAlgebra, x: Elem, y: Elem) -> Partition {
    let lo = a.meet(x, y);
    let hi = a.join(x, y);
    let keys: Vec<(Elem, Elem)> = a
        .elements()
        .map(|c| (a.meet(c, lo), a.join(c, hi)))
        .collect();
    Partition::from_labels(&keys)
}

fn complements(m: &FiniteAlgebra) -> Result<Vec<Elem>> {
    m.elements()
        .map(|x| {
            m.complement(x).ok_or_else(|| {
                Error::Precondition(format!(
                    "element {x} has no complement; carrier is not Boolean"
                ))
            })
        })
        .collect()
}

/// Principal congruence in a K4-algebra, pointwise:
/// `c ~ d` iff `(x <-> y) /\ box (x <-> y) <= c <-> d`.
pub fn cg_k4(m: &FiniteAlgebra, x: Elem, y: Elem) -> Result<Partition> {
    let neg = complements(m)?;
    if !m.satisfies(Kind::Pk4) {
        return Err(Error::Precondition("cg_k4 needs K4 operators".into()));
    }
    let iff = |u: Elem, v: Elem| m.meet(m.join(neg[u], v), m.join(neg[v], u));
    let e = iff(x, y);
    let guard = m.meet(e, m.box_of(e));
    // c ~ d iff guard <= c <-> d iff guard /\ c = guard /\ d
    let keys: Vec<Elem> = m.elements().map(|c| m.meet(guard, c)).collect();
    let p = Partition::from_labels(&keys);
    debug_assert!(m.elements().all(|c| m
        .elements()
        .all(|d| p.same(c, d) == m.leq(guard, iff(c, d)))));
    Ok(p)
}

/// Outcome of a congruence-extension check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CepReport {
    pub holds: bool,
    /// A subuniverse and a congruence of it that is not the trace of any
    /// congruence of the whole algebra.
    pub witness: Option<(Vec<Elem>, Partition)>,
    pub subalgebras_checked: usize,
}

/// Every congruence of every subalgebra extends. Only non-trivial
/// subalgebras can fail, so each subuniverse's congruence lattice is compared
/// with the traces of the whole lattice.
pub fn has_cep(a: &FiniteAlgebra, budget: usize) -> Result<CepReport> {
    let whole = con_lattice(a, budget)?;
    let subs = crate::constructions::subuniverses(a, budget)?;
    for sub in &subs {
        let (b, _) = crate::constructions::subalgebra_on(a, sub);
        let traces: HashSet<Partition> = whole.iter().map(|t| t.restrict(sub)).collect();
        for theta in con_lattice(&b, budget)? {
            if !traces.contains(&theta) {
                return Ok(CepReport {
                    holds: false,
                    witness: Some((sub.clone(), theta)),
                    subalgebras_checked: subs.len(),
                });
            }
        }
    }
    Ok(CepReport {
        holds: true,
        witness: None,
        subalgebras_checked: subs.len(),
    })
}
