//! Products, subalgebras, quotients, homomorphisms, canonical forms and the
//! finite duality.

mod canon;
mod dot;
mod duality;
mod hom;
mod hs;

use std::collections::{HashSet, VecDeque};

pub use canon::{canonical_algebra, canonical_form, canonical_labeling, identify, CanonicalForm};
pub use dot::{dual_space_dot, hasse_dot};
pub use duality::{
    boolean_envelope, boolean_envelope_within, complex_algebra, dual_map, dual_space,
    is_p_morphism, kappa, open_filter_congruence_iso_check, open_filters, powerset_algebra,
    prime_filters, theta_of_filter, upset_algebra, DualSpace, Envelope, DEFAULT_ENVELOPE_LIMIT,
};
pub use hom::{
    embeddings, extend_hom, generating_set, homs, is_hom, is_iso, is_retract, retraction_witness,
    Hom, DEFAULT_HOM_BUDGET,
};
pub use hs::{hs_si, si_quotients, subalgebras_up_to_iso};

use crate::algebra::{Elem, FiniteAlgebra};
use crate::congruence::{congruence_violation, Partition};
use crate::{Error, Result};

/// Componentwise product; `(a, b)` is element `a * |B| + b`.
pub fn product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> FiniteAlgebra {
    let (na, nb) = (a.size(), b.size());
    let n = na * nb;
    let split = |x: Elem| (x / nb, x % nb);
    let mut leq = vec![false; n * n];
    let mut meet = vec![0u32; n * n];
    let mut join = vec![0u32; n * n];
    for x in 0..n {
        let (x1, x2) = split(x);
        for y in 0..n {
            let (y1, y2) = split(y);
            leq[x * n + y] = a.leq(x1, y1) && b.leq(x2, y2);
            meet[x * n + y] = (a.meet(x1, y1) * nb + b.meet(x2, y2)) as u32;
            join[x * n + y] = (a.join(x1, y1) * nb + b.join(x2, y2)) as u32;
        }
    }
    let boxes = (0..n)
        .map(|x| {
            let (x1, x2) = split(x);
            (a.box_of(x1) * nb + b.box_of(x2)) as u32
        })
        .collect();
    let diamonds = (0..n)
        .map(|x| {
            let (x1, x2) = split(x);
            (a.diamond_of(x1) * nb + b.diamond_of(x2)) as u32
        })
        .collect();
    FiniteAlgebra::from_tables_unchecked(n, leq, meet, join, boxes, diamonds)
}

/// Product of a non-empty list.
pub fn product_all(algebras: &[FiniteAlgebra]) -> Result<FiniteAlgebra> {
    let (first, rest) = algebras
        .split_first()
        .ok_or_else(|| Error::Precondition("product of an empty family".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, b| product(&acc, b)))
}

/// Least subuniverse containing `seed` and the constants, sorted by index.
pub fn closure(a: &FiniteAlgebra, seed: &[Elem]) -> Vec<Elem> {
    let n = a.size();
    let mut inside = vec![false; n];
    let mut members: Vec<Elem> = Vec::new();
    let mut queue: VecDeque<Elem> = VecDeque::new();
    let push = |x: Elem, inside: &mut Vec<bool>, queue: &mut VecDeque<Elem>| {
        if !inside[x] {
            inside[x] = true;
            queue.push_back(x);
        }
    };
    for &x in seed.iter().chain([a.bottom(), a.top()].iter()) {
        push(x, &mut inside, &mut queue);
    }
    while let Some(x) = queue.pop_front() {
        members.push(x);
        push(a.box_of(x), &mut inside, &mut queue);
        push(a.diamond_of(x), &mut inside, &mut queue);
        for i in 0..members.len() {
            let y = members[i];
            push(a.meet(x, y), &mut inside, &mut queue);
            push(a.join(x, y), &mut inside, &mut queue);
        }
    }
    members.sort_unstable();
    members
}

/// The subalgebra on a closed, sorted set of elements, with its inclusion.
pub fn subalgebra_on(a: &FiniteAlgebra, sub: &[Elem]) -> (FiniteAlgebra, Hom) {
    let m = sub.len();
    let mut pos = vec![usize::MAX; a.size()];
    for (i, &x) in sub.iter().enumerate() {
        pos[x] = i;
    }
    let mut leq = vec![false; m * m];
    let mut meet = vec![0u32; m * m];
    let mut join = vec![0u32; m * m];
    for (i, &x) in sub.iter().enumerate() {
        for (j, &y) in sub.iter().enumerate() {
            leq[i * m + j] = a.leq(x, y);
            meet[i * m + j] = pos[a.meet(x, y)] as u32;
            join[i * m + j] = pos[a.join(x, y)] as u32;
        }
    }
    let boxes = sub.iter().map(|&x| pos[a.box_of(x)] as u32).collect();
    let diamonds = sub.iter().map(|&x| pos[a.diamond_of(x)] as u32).collect();
    debug_assert!(sub.iter().all(|&x| pos[a.box_of(x)] != usize::MAX));
    let b = FiniteAlgebra::from_tables_unchecked(m, leq, meet, join, boxes, diamonds);
    (b, Hom::new(sub.to_vec()))
}

/// Subalgebra generated by `seed`, with its embedding.
pub fn subalgebra_generated(a: &FiniteAlgebra, seed: &[Elem]) -> Result<(FiniteAlgebra, Hom)> {
    for &x in seed {
        a.check_element(x)?;
    }
    Ok(subalgebra_on(a, &closure(a, seed)))
}

/// Quotient by a congruence; block `i` is the block with the `i`-th least
/// minimum element.
pub fn quotient(a: &FiniteAlgebra, p: &Partition) -> Result<(FiniteAlgebra, Hom)> {
    if let Some(why) = congruence_violation(a, p) {
        return Err(Error::NotACongruence(why));
    }
    Ok(quotient_unchecked(a, p))
}

pub(crate) fn quotient_unchecked(a: &FiniteAlgebra, p: &Partition) -> (FiniteAlgebra, Hom) {
    let reps: Vec<Elem> = p.blocks().iter().map(|b| b[0]).collect();
    let m = reps.len();
    let cls = |x: Elem| p.label(x);
    let mut leq = vec![false; m * m];
    let mut meet = vec![0u32; m * m];
    let mut join = vec![0u32; m * m];
    for (i, &x) in reps.iter().enumerate() {
        for (j, &y) in reps.iter().enumerate() {
            let jn = cls(a.join(x, y));
            join[i * m + j] = jn as u32;
            meet[i * m + j] = cls(a.meet(x, y)) as u32;
            leq[i * m + j] = jn == j;
        }
    }
    let boxes = reps.iter().map(|&x| cls(a.box_of(x)) as u32).collect();
    let diamonds = reps.iter().map(|&x| cls(a.diamond_of(x)) as u32).collect();
    let q = FiniteAlgebra::from_tables_unchecked(m, leq, meet, join, boxes, diamonds);
    (q, Hom::new(a.elements().map(cls).collect()))
}

/// Bitset key for a subuniverse.
fn key(n: usize, members: &[Elem]) -> Vec<u64> {
    let mut k = vec![0u64; n.div_ceil(64)];
    for &x in members {
        k[x / 64] |= 1 << (x % 64);
    }
    k
}

/// Every subuniverse (including the one generated by the constants), in
/// order of discovery from the smallest. Fails past `budget` subuniverses.
pub fn subuniverses(a: &FiniteAlgebra, budget: usize) -> Result<Vec<Vec<Elem>>> {
    let n = a.size();
    let start = closure(a, &[]);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    seen.insert(key(n, &start));
    let mut out = vec![start];
    let mut i = 0;
    while i < out.len() {
        let cur = out[i].clone();
        i += 1;
        let mut inside = vec![false; n];
        for &x in &cur {
            inside[x] = true;
        }
        for x in a.elements().filter(|&x| !inside[x]) {
            let mut seed = cur.clone();
            seed.push(x);
            let next = closure(a, &seed);
            if seen.insert(key(n, &next)) {
                if out.len() >= budget {
                    return Err(Error::budget("subuniverses", budget, out.len() + 1));
                }
                out.push(next);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus;

    fn named(n: &str) -> FiniteAlgebra {
        corpus(n, None).unwrap()
    }

    #[test]
    fn product_of_two_chains_is_the_square() {
        let c2 = named("C2");
        let p = product(&c2, &c2);
        assert_eq!(p.size(), 4);
        assert!(!p.is_chain());
        assert_eq!(p.box_table(), vec![0, 1, 2, 3]);
        assert!(p.is_ps4());
        assert!(is_iso(
            &p,
            &crate::algebra::shapes::boolean(2, (0..4).collect(), (0..4).collect())
        ));
    }

    #[test]
    fn four_chain_inside_example_46() {
        let a = corpus("EX46", Some(3)).unwrap();
        // {0} < {0} u {1} < {0,1} chain: bitmasks 0 < 1 < 3 < 7
        let (b, emb) = subalgebra_generated(&a, &[1, 3]).unwrap();
        assert_eq!(emb.map, vec![0, 1, 3, 7]);
        assert!(b.is_chain());
        assert!(!crate::congruence::is_simple(&b));
        assert!(crate::congruence::is_simple(&a));
    }

    #[test]
    fn quotient_rejects_non_congruences() {
        let d3 = named("D3");
        let p = Partition::from_labels(&[0, 1, 1]);
        assert!(matches!(quotient(&d3, &p), Err(Error::NotACongruence(_))));
        let (q, h) = quotient(&d3, &Partition::total(3)).unwrap();
        assert!(q.is_trivial());
        assert_eq!(h.map, vec![0, 0, 0]);
    }

    #[test]
    fn subuniverses_of_a_chain() {
        // every subset containing the bounds is a subuniverse of C2 x ... ; for
        // the identity-operator 3-chain there are two
        let a = named("EX44III");
        assert_eq!(subuniverses(&a, 100).unwrap().len(), 2);
        let d3 = named("D3");
        assert_eq!(subuniverses(&d3, 100).unwrap().len(), 2);
    }
}
