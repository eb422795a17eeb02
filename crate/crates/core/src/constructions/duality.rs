//! Finite duality: prime filters, dual spaces, up-set algebras, the Boolean
//! envelope and complex algebras of frames.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Hom;
use crate::algebra::{Elem, FiniteAlgebra};
use crate::congruence::{con_lattice, is_congruence, Partition, DEFAULT_CON_BUDGET};
use crate::{Error, Result};

/// Envelopes and complex algebras larger than this many elements are refused.
pub const DEFAULT_ENVELOPE_LIMIT: usize = 1024;

/// Finite ordered relational space. Points are prime filters when the space
/// comes from an algebra; `leq` is inclusion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualSpace {
    pub points: Vec<Vec<Elem>>,
    pub leq: Vec<Vec<bool>>,
    #[serde(rename = "R")]
    pub r: Vec<Vec<bool>>,
}

impl DualSpace {
    pub fn len(&self) -> usize {
        self.leq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leq.is_empty()
    }

    /// `R = (R o <=) n (R o >=)`: every point squeezed between two successors
    /// of `x` is itself a successor.
    pub fn is_order_convex(&self) -> bool {
        let n = self.len();
        (0..n).all(|x| {
            (0..n).all(|y| {
                let below = (0..n).any(|z| self.r[x][z] && self.leq[z][y]);
                let above = (0..n).any(|w| self.r[x][w] && self.leq[y][w]);
                self.r[x][y] == (below && above)
            })
        })
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.len()).all(|x| self.r[x][x])
    }

    pub fn is_transitive(&self) -> bool {
        let n = self.len();
        (0..n)
            .all(|x| (0..n).all(|y| !self.r[x][y] || (0..n).all(|z| !self.r[y][z] || self.r[x][z])))
    }

    fn succ_mask(&self, x: usize) -> u128 {
        mask_of((0..self.len()).filter(|&y| self.r[x][y]))
    }

    fn up_mask(&self, x: usize) -> u128 {
        mask_of((0..self.len()).filter(|&y| self.leq[x][y]))
    }
}

fn mask_of(it: impl IntoIterator<Item = usize>) -> u128 {
    it.into_iter().fold(0, |m, i| m | 1 << i)
}

fn require_pma(a: &FiniteAlgebra) -> Result<()> {
    if a.is_pma() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "algebra is not a positive modal algebra".into(),
        ))
    }
}

/// Prime filters, one per join-irreducible `j` (the filter `up j`), in the
/// order of the join-irreducibles.
pub fn prime_filters(a: &FiniteAlgebra) -> Vec<Vec<Elem>> {
    a.join_irreducibles()
        .into_iter()
        .map(|j| a.elements().filter(|&x| a.leq(j, x)).collect())
        .collect()
}

fn relation(a: &FiniteAlgebra, filters: &[Vec<bool>]) -> Vec<Vec<bool>> {
    filters
        .iter()
        .map(|f| {
            filters
                .iter()
                .map(|g| {
                    a.elements()
                        .all(|x| (!f[a.box_of(x)] || g[x]) && (!g[x] || f[a.diamond_of(x)]))
                })
                .collect()
        })
        .collect()
}

pub fn dual_space(a: &FiniteAlgebra) -> Result<DualSpace> {
    require_pma(a)?;
    let points = prime_filters(a);
    let member: Vec<Vec<bool>> = points
        .iter()
        .map(|p| {
            let mut v = vec![false; a.size()];
            p.iter().for_each(|&x| v[x] = true);
            v
        })
        .collect();
    let leq = member
        .iter()
        .map(|f| {
            member
                .iter()
                .map(|g| f.iter().zip(g).all(|(x, y)| !x || *y))
                .collect()
        })
        .collect();
    let r = relation(a, &member);
    Ok(DualSpace { points, leq, r })
}

/// Up-sets as masks, sorted by size then value, with the operator images.
fn upsets(x: &DualSpace, limit: usize) -> Result<Vec<u128>> {
    let n = x.len();
    if n > 128 {
        return Err(Error::budget("dual space points", 128, n));
    }
    let principal: Vec<u128> = (0..n).map(|p| x.up_mask(p)).collect();
    let mut found: Vec<u128> = vec![0];
    let mut seen: std::collections::HashSet<u128> = found.iter().copied().collect();
    let mut i = 0;
    while i < found.len() {
        let cur = found[i];
        i += 1;
        for &p in &principal {
            let next = cur | p;
            if seen.insert(next) {
                if found.len() >= limit {
                    return Err(Error::budget("up-sets", limit, found.len() + 1));
                }
                found.push(next);
            }
        }
    }
    found.sort_by_key(|m| (m.count_ones(), *m));
    Ok(found)
}

fn is_up(x: &DualSpace, m: u128) -> bool {
    (0..x.len()).all(|p| m >> p & 1 == 0 || x.up_mask(p) & !m == 0)
}

fn box_r(succ: &[u128], m: u128) -> u128 {
    mask_of((0..succ.len()).filter(|&p| succ[p] & !m == 0))
}

fn dia_r(succ: &[u128], m: u128) -> u128 {
    mask_of((0..succ.len()).filter(|&p| succ[p] & m != 0))
}

/// Algebra over a family of masks closed under the set operations.
fn mask_algebra(masks: &[u128], succ: &[u128]) -> FiniteAlgebra {
    let n = masks.len();
    let index: HashMap<u128, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let mut leq = vec![false; n * n];
    let mut meet = vec![0u32; n * n];
    let mut join = vec![0u32; n * n];
    for (i, &x) in masks.iter().enumerate() {
        for (j, &y) in masks.iter().enumerate() {
            leq[i * n + j] = x & !y == 0;
            meet[i * n + j] = index[&(x & y)] as u32;
            join[i * n + j] = index[&(x | y)] as u32;
        }
    }
    let boxes = masks
        .iter()
        .map(|&m| index[&box_r(succ, m)] as u32)
        .collect();
    let diamonds = masks
        .iter()
        .map(|&m| index[&dia_r(succ, m)] as u32)
        .collect();
    FiniteAlgebra::from_tables_unchecked(n, leq, meet, join, boxes, diamonds)
}

fn checked_upsets(x: &DualSpace) -> Result<(Vec<u128>, Vec<u128>)> {
    let n = x.len();
    if x.r.len() != n || x.leq.iter().chain(&x.r).any(|row| row.len() != n) {
        return Err(Error::Precondition("space matrices are not square".into()));
    }
    let order_ok = (0..n).all(|p| x.leq[p][p])
        && (0..n).all(|p| (0..n).all(|q| p == q || !(x.leq[p][q] && x.leq[q][p])))
        && (0..n)
            .all(|p| (0..n).all(|q| !x.leq[p][q] || (0..n).all(|s| !x.leq[q][s] || x.leq[p][s])));
    if !order_ok {
        return Err(Error::Precondition(
            "space order is not a partial order".into(),
        ));
    }
    if !x.is_order_convex() {
        return Err(Error::Precondition(
            "not a K+ space: R differs from (R o <=) n (R o >=)".into(),
        ));
    }
    let masks = upsets(x, DEFAULT_ENVELOPE_LIMIT * 64)?;
    let succ: Vec<u128> = (0..n).map(|p| x.succ_mask(p)).collect();
    for &m in &masks {
        if !is_up(x, box_r(&succ, m)) || !is_up(x, dia_r(&succ, m)) {
            return Err(Error::Precondition(
                "not a K+ space: up-sets are not closed under the operators".into(),
            ));
        }
    }
    Ok((masks, succ))
}

/// Up-set algebra of a space, elements ordered by size.
pub fn upset_algebra(x: &DualSpace) -> Result<FiniteAlgebra> {
    let (masks, succ) = checked_upsets(x)?;
    Ok(mask_algebra(&masks, &succ))
}

/// `a` maps to the set of prime filters containing it, as an element of
/// `upset_algebra(dual_space(a))`.
pub fn kappa(a: &FiniteAlgebra) -> Result<Hom> {
    let x = dual_space(a)?;
    let (masks, _) = checked_upsets(&x)?;
    let index: HashMap<u128, usize> = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let map = a
        .elements()
        .map(|e| index[&mask_of((0..x.len()).filter(|&p| x.points[p].contains(&e)))])
        .collect();
    Ok(Hom::new(map))
}

/// Boolean modal algebra with an explicit complement table and the
/// embedding of the original algebra.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub algebra: FiniteAlgebra,
    pub complement: Vec<Elem>,
    pub kappa: Hom,
}

/// Powerset of `succ.len()` points; element `i` is the set with bitmask `i`.
fn powerset(succ: &[u128], limit: usize) -> Result<FiniteAlgebra> {
    let k = succ.len();
    if k >= 64 || 1usize << k > limit {
        return Err(Error::budget(
            "powerset elements",
            limit,
            1usize.checked_shl(k as u32).unwrap_or(usize::MAX),
        ));
    }
    let n = 1usize << k;
    let mut leq = vec![false; n * n];
    let mut meet = vec![0u32; n * n];
    let mut join = vec![0u32; n * n];
    for x in 0..n {
        for y in 0..n {
            leq[x * n + y] = x & !y == 0;
            meet[x * n + y] = (x & y) as u32;
            join[x * n + y] = (x | y) as u32;
        }
    }
    let boxes = (0..n).map(|m| box_r(succ, m as u128) as u32).collect();
    let diamonds = (0..n).map(|m| dia_r(succ, m as u128) as u32).collect();
    Ok(FiniteAlgebra::from_tables_unchecked(
        n, leq, meet, join, boxes, diamonds,
    ))
}

/// The powerset algebra of the dual space, within [`DEFAULT_ENVELOPE_LIMIT`].
pub fn boolean_envelope(a: &FiniteAlgebra) -> Result<Envelope> {
    boolean_envelope_within(a, DEFAULT_ENVELOPE_LIMIT)
}

pub fn boolean_envelope_within(a: &FiniteAlgebra, limit: usize) -> Result<Envelope> {
    let x = dual_space(a)?;
    let succ: Vec<u128> = (0..x.len()).map(|p| x.succ_mask(p)).collect();
    let algebra = powerset(&succ, limit)?;
    let full = algebra.top();
    let complement = algebra.elements().map(|m| full & !m).collect();
    let map = a
        .elements()
        .map(|e| mask_of((0..x.len()).filter(|&p| x.points[p].contains(&e))) as usize)
        .collect();
    Ok(Envelope {
        algebra,
        complement,
        kappa: Hom::new(map),
    })
}

/// The powerset of a relation's carrier with `box_R`, `dia_R`; element `i`
/// is the subset with bitmask `i`.
pub fn complex_algebra(r: &[Vec<bool>]) -> Result<FiniteAlgebra> {
    if r.iter().any(|row| row.len() != r.len()) {
        return Err(Error::Precondition("relation matrix is not square".into()));
    }
    let succ: Vec<u128> = r
        .iter()
        .map(|row| mask_of(row.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)))
        .collect();
    powerset(&succ, DEFAULT_ENVELOPE_LIMIT)
}

/// [`complex_algebra`] under another name, for callers holding successor
/// lists.
pub fn powerset_algebra(succ: &[Vec<usize>]) -> Result<FiniteAlgebra> {
    let n = succ.len();
    let r: Vec<Vec<bool>> = succ
        .iter()
        .map(|s| {
            let mut row = vec![false; n];
            s.iter().for_each(|&j| row[j] = true);
            row
        })
        .collect();
    complex_algebra(&r)
}

fn require_boolean_modal(m: &FiniteAlgebra) -> Result<Vec<Elem>> {
    let comp: Option<Vec<Elem>> = m.elements().map(|x| m.complement(x)).collect();
    let comp = comp.ok_or_else(|| Error::Precondition("lattice is not Boolean".into()))?;
    let dual = m
        .elements()
        .all(|x| m.diamond_of(x) == comp[m.box_of(comp[x])]);
    if !dual || !m.is_pma() {
        return Err(Error::Precondition(
            "operators are not a normal box with its dual diamond".into(),
        ));
    }
    Ok(comp)
}

/// Generators `f` of the open filters `up f` (those with `f <= box f`),
/// from the top down by index.
pub fn open_filters(m: &FiniteAlgebra) -> Result<Vec<Elem>> {
    require_boolean_modal(m)?;
    Ok(m.elements().filter(|&f| m.leq(f, m.box_of(f))).collect())
}

/// `a ~ b` iff `-a v b` and `-b v a` lie in the filter generated by `f`.
pub fn theta_of_filter(m: &FiniteAlgebra, f: Elem) -> Result<Partition> {
    let comp = require_boolean_modal(m)?;
    m.check_element(f)?;
    let mut labels = vec![usize::MAX; m.size()];
    let mut next = 0;
    for a in m.elements() {
        if labels[a] != usize::MAX {
            continue;
        }
        for b in m.elements() {
            if m.leq(f, m.join(comp[a], b)) && m.leq(f, m.join(comp[b], a)) {
                labels[b] = next;
            }
        }
        next += 1;
    }
    Ok(Partition::from_labels(&labels))
}

/// Checks that `F -> theta_F` is an order isomorphism from the open filters
/// onto the congruence lattice.
pub fn open_filter_congruence_iso_check(m: &FiniteAlgebra) -> Result<bool> {
    let filters = open_filters(m)?;
    let thetas: Vec<Partition> = filters
        .iter()
        .map(|&f| theta_of_filter(m, f))
        .collect::<Result<_>>()?;
    if !thetas.iter().all(|t| is_congruence(m, t)) {
        return Ok(false);
    }
    // up f is contained in up g iff g <= f
    let order_ok = filters.iter().zip(&thetas).all(|(&f, tf)| {
        filters
            .iter()
            .zip(&thetas)
            .all(|(&g, tg)| m.leq(g, f) == tf.refines(tg))
    });
    if !order_ok {
        return Ok(false);
    }
    let mut con = con_lattice(m, DEFAULT_CON_BUDGET)?;
    let mut thetas = thetas;
    con.sort();
    thetas.sort();
    thetas.dedup();
    Ok(con == thetas)
}

/// Preserves order and `R`, and whenever `f(x) R y` there are `R`-successors
/// `z`, `v` of `x` with `f(z) <= y <= f(v)`.
pub fn is_p_morphism(x: &DualSpace, y: &DualSpace, f: &[usize]) -> bool {
    let (n, m) = (x.len(), y.len());
    if f.len() != n || f.iter().any(|&p| p >= m) {
        return false;
    }
    (0..n).all(|p| {
        (0..n).all(|q| (!x.leq[p][q] || y.leq[f[p]][f[q]]) && (!x.r[p][q] || y.r[f[p]][f[q]]))
            && (0..m).all(|t| {
                !y.r[f[p]][t]
                    || ((0..n).any(|z| x.r[p][z] && y.leq[f[z]][t])
                        && (0..n).any(|v| x.r[p][v] && y.leq[t][f[v]]))
            })
    })
}

/// Inverse image of prime filters along a homomorphism `h: a -> b`, as a
/// map from the points of `dual_space(b)` to those of `dual_space(a)`.
pub fn dual_map(a: &FiniteAlgebra, b: &FiniteAlgebra, h: &Hom) -> Result<Vec<usize>> {
    let pa = prime_filters(a);
    prime_filters(b)
        .iter()
        .map(|g| {
            let pre: Vec<Elem> = a.elements().filter(|&x| g.contains(&h.apply(x))).collect();
            pa.iter().position(|f| *f == pre).ok_or_else(|| {
                Error::Inconsistency("preimage of a prime filter is not prime".into())
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::{is_simple, is_well_connected};
    use crate::constructions::{is_hom, is_iso};
    use crate::corpus::corpus;

    fn named(n: &str) -> FiniteAlgebra {
        corpus(n, None).unwrap()
    }

    #[test]
    fn two_chain_has_one_prime_filter() {
        assert_eq!(prime_filters(&named("C2")), vec![vec![1]]);
    }

    #[test]
    fn kappa_is_an_isomorphism_on_the_corpus() {
        for n in crate::corpus::FIGURE2
            .iter()
            .chain(crate::corpus::FIGURE3.iter())
        {
            let a = named(n);
            let x = dual_space(&a).unwrap();
            assert!(x.is_order_convex(), "{n}");
            let u = upset_algebra(&x).unwrap();
            let k = kappa(&a).unwrap();
            assert!(k.is_injective() && u.size() == a.size(), "{n}");
            assert!(is_hom(&a, &u, &k), "{n}");
        }
    }

    #[test]
    fn example_44_iii_envelope() {
        let a = named("EX44III");
        let x = dual_space(&a).unwrap();
        assert_eq!(x.r, vec![vec![true, false], vec![false, true]]);
        let m = boolean_envelope(&a).unwrap();
        assert_eq!(m.algebra.size(), 4);
        assert_eq!(m.algebra.box_table(), vec![0, 1, 2, 3]);
        assert!(!is_well_connected(&m.algebra).unwrap());
        assert!(is_hom(&a, &m.algebra, &m.kappa));
    }

    #[test]
    fn example_44_iv_envelope_is_simple() {
        let m = boolean_envelope(&named("EX44IV")).unwrap();
        assert!(m.algebra.is_ps4());
        assert!(is_simple(&m.algebra));
        assert_eq!(open_filters(&m.algebra).unwrap().len(), 2);
        assert!(open_filter_congruence_iso_check(&m.algebra).unwrap());
    }

    #[test]
    fn open_filters_match_congruences() {
        for n in ["C2", "D3", "C4a", "D5a", "B2"] {
            let m = boolean_envelope(&named(n)).unwrap();
            assert!(open_filter_congruence_iso_check(&m.algebra).unwrap(), "{n}");
            let top = m.algebra.top();
            assert!(theta_of_filter(&m.algebra, top).unwrap().is_identity());
        }
        assert!(open_filters(&named("D3")).is_err());
    }

    #[test]
    fn complex_algebras() {
        let ge: Vec<Vec<bool>> = (0..4).map(|i| (0..4).map(|j| i >= j).collect()).collect();
        assert!(complex_algebra(&ge).unwrap().is_ps4());
        let one = complex_algebra(&[vec![true]]).unwrap();
        assert_eq!(one, named("C2"));
        // a1 sees only itself, every other point sees everything
        let r: Vec<Vec<bool>> = (0..3)
            .map(|i| (0..3).map(|j| i > 0 || j == 0).collect())
            .collect();
        let c = complex_algebra(&r).unwrap();
        let an = corpus("AN_MINUS", Some(3)).unwrap();
        assert_eq!(c.box_table(), an.box_table());
        assert_eq!(c.diamond_table(), an.diamond_table());
        let irreflexive = complex_algebra(&[vec![false, true], vec![false, false]]).unwrap();
        assert!(!irreflexive.is_ps4());
    }

    #[test]
    fn upset_algebra_rejects_bad_spaces() {
        let x = DualSpace {
            points: vec![vec![], vec![], vec![]],
            leq: vec![
                vec![true, true, true],
                vec![false, true, true],
                vec![false, false, true],
            ],
            r: vec![
                vec![true, false, true],
                vec![false, false, false],
                vec![false, false, false],
            ],
        };
        assert!(matches!(upset_algebra(&x), Err(Error::Precondition(_))));
    }

    #[test]
    fn dual_of_a_hom_is_a_p_morphism() {
        let c2 = named("C2");
        for n in ["D3", "D4", "C4b", "A4"] {
            let b = named(n);
            for h in crate::constructions::homs(&c2, &b, 1000).unwrap() {
                let f = dual_map(&c2, &b, &h).unwrap();
                assert!(is_p_morphism(
                    &dual_space(&b).unwrap(),
                    &dual_space(&c2).unwrap(),
                    &f
                ));
            }
        }
        assert!(is_iso(
            &upset_algebra(&dual_space(&named("D5a")).unwrap()).unwrap(),
            &named("D5a")
        ));
    }
}
