use serde::{Deserialize, Serialize};

use super::closure;
use crate::algebra::{Elem, FiniteAlgebra};
use crate::{Error, Result};

pub const DEFAULT_HOM_BUDGET: usize = 5_000_000;

/// A map between universes; whether it is a homomorphism is a property of
/// the pair of algebras, checked by [`is_hom`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hom {
    pub map: Vec<Elem>,
}

impl Hom {
    pub fn new(map: Vec<Elem>) -> Self {
        Hom { map }
    }

    pub fn identity(n: usize) -> Self {
        Hom {
            map: (0..n).collect(),
        }
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x]
    }

    /// `other` after `self`.
    pub fn then(&self, other: &Hom) -> Hom {
        Hom::new(self.map.iter().map(|&x| other.map[x]).collect())
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.map.iter().all(|x| seen.insert(*x))
    }
}

/// Preserves constants, meet, join, box and diamond.
pub fn is_hom(a: &FiniteAlgebra, b: &FiniteAlgebra, h: &Hom) -> bool {
    let f = |x| h.map[x];
    h.map.len() == a.size()
        && h.map.iter().all(|&y| y < b.size())
        && f(a.bottom()) == b.bottom()
        && f(a.top()) == b.top()
        && a.elements().all(|x| {
            f(a.box_of(x)) == b.box_of(f(x))
                && f(a.diamond_of(x)) == b.diamond_of(f(x))
                && a.elements().all(|y| {
                    f(a.meet(x, y)) == b.meet(f(x), f(y)) && f(a.join(x, y)) == b.join(f(x), f(y))
                })
        })
}

/// A small generating set, chosen greedily: each step adds the element
/// whose addition generates the most (ties to the lowest index).
pub fn generating_set(a: &FiniteAlgebra) -> Vec<Elem> {
    let mut gens = Vec::new();
    let mut current = closure(a, &[]);
    while current.len() < a.size() {
        let mut inside = vec![false; a.size()];
        for &x in &current {
            inside[x] = true;
        }
        let (best, next) = a
            .elements()
            .filter(|&x| !inside[x])
            .map(|x| {
                let mut seed = gens.clone();
                seed.push(x);
                (x, closure(a, &seed))
            })
            .max_by_key(|(x, c)| (c.len(), std::cmp::Reverse(*x)))
            .expect("some element is missing");
        gens.push(best);
        current = next;
    }
    gens
}

/// The unique homomorphism from the subalgebra generated by `gens` that
/// sends `gens[i]` to `images[i]`, if one exists. Entries outside the
/// generated subalgebra stay `None`.
pub fn extend_hom(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    gens: &[Elem],
    images: &[Elem],
) -> Option<Vec<Option<Elem>>> {
    let mut map: Vec<Option<Elem>> = vec![None; a.size()];
    let mut order: Vec<Elem> = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    let assign = |x: Elem,
                  y: Elem,
                  map: &mut Vec<Option<Elem>>,
                  queue: &mut std::collections::VecDeque<Elem>| match map[x] {
        Some(z) => z == y,
        None => {
            map[x] = Some(y);
            queue.push_back(x);
            true
        }
    };
    if !assign(a.bottom(), b.bottom(), &mut map, &mut queue)
        || !assign(a.top(), b.top(), &mut map, &mut queue)
    {
        return None;
    }
    for (&g, &v) in gens.iter().zip(images) {
        if !assign(g, v, &mut map, &mut queue) {
            return None;
        }
    }
    while let Some(x) = queue.pop_front() {
        let fx = map[x].unwrap();
        order.push(x);
        if !assign(a.box_of(x), b.box_of(fx), &mut map, &mut queue)
            || !assign(a.diamond_of(x), b.diamond_of(fx), &mut map, &mut queue)
        {
            return None;
        }
        for i in 0..order.len() {
            let y = order[i];
            let fy = map[y].unwrap();
            if !assign(a.meet(x, y), b.meet(fx, fy), &mut map, &mut queue)
                || !assign(a.join(x, y), b.join(fx, fy), &mut map, &mut queue)
            {
                return None;
            }
        }
    }
    Some(map)
}

/// Every homomorphism, in lexicographic order of the image tuple of a fixed
/// generating set. Fails once more than `budget` candidate tuples would be
/// tried.
pub fn homs(a: &FiniteAlgebra, b: &FiniteAlgebra, budget: usize) -> Result<Vec<Hom>> {
    let gens = generating_set(a);
    let tries = (b.size() as u128).saturating_pow(gens.len() as u32);
    if tries > budget as u128 {
        return Err(Error::budget(
            "homomorphism candidates",
            budget,
            tries.min(usize::MAX as u128) as usize,
        ));
    }
    let mut out = Vec::new();
    for images in crate::syntax::assignments(b.size(), gens.len()) {
        if let Some(map) = extend_hom(a, b, &gens, &images) {
            let map: Vec<Elem> = map.into_iter().map(|m| m.expect("generators")).collect();
            out.push(Hom::new(map));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

pub fn embeddings(a: &FiniteAlgebra, b: &FiniteAlgebra, budget: usize) -> Result<Vec<Hom>> {
    if a.size() > b.size() {
        return Ok(vec![]);
    }
    Ok(homs(a, b, budget)?
        .into_iter()
        .filter(Hom::is_injective)
        .collect())
}

pub fn is_iso(a: &FiniteAlgebra, b: &FiniteAlgebra) -> bool {
    a.size() == b.size() && super::canonical_form(a) == super::canonical_form(b)
}

/// An embedding `f: a -> b` and a homomorphism `g: b -> a` with `g . f = id`.
pub fn retraction_witness(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    budget: usize,
) -> Result<Option<(Hom, Hom)>> {
    if a.size() > b.size() {
        return Ok(None);
    }
    let fs = embeddings(a, b, budget)?;
    if fs.is_empty() {
        return Ok(None);
    }
    let gs = homs(b, a, budget)?;
    for f in &fs {
        if let Some(g) = gs.iter().find(|g| f.then(g) == Hom::identity(a.size())) {
            return Ok(Some((f.clone(), g.clone())));
        }
    }
    Ok(None)
}

/// `a` is a retract of `b`.
pub fn is_retract(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<bool> {
    Ok(retraction_witness(a, b, DEFAULT_HOM_BUDGET)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus;

    fn named(n: &str) -> FiniteAlgebra {
        corpus(n, None).unwrap()
    }

    #[test]
    fn identity_is_a_hom() {
        for n in ["D4", "C6a", "B2"] {
            let a = named(n);
            let hs = homs(&a, &a, DEFAULT_HOM_BUDGET).unwrap();
            assert!(hs.contains(&Hom::identity(a.size())));
            assert!(hs.iter().all(|h| is_hom(&a, &a, h)));
        }
    }

    #[test]
    fn two_chain_embeds_in_d3() {
        let e = embeddings(&named("C2"), &named("D3"), 100).unwrap();
        assert_eq!(e, vec![Hom::new(vec![0, 2])]);
    }

    #[test]
    fn c3a_and_c3b_differ() {
        assert!(!is_iso(&named("C3a"), &named("C3b")));
        assert!(is_iso(&named("C3a"), &named("C3a")));
    }

    #[test]
    fn retract_cases() {
        assert!(is_retract(&named("D4"), &named("D4")).unwrap());
        assert!(!is_retract(&named("D3"), &named("C2")).unwrap());
    }

    #[test]
    fn generating_set_generates() {
        let f = crate::corpus::figure1();
        let gens = generating_set(&f.algebra);
        assert_eq!(gens.len(), 1);
        assert_eq!(closure(&f.algebra, &gens).len(), 37);
    }
}
