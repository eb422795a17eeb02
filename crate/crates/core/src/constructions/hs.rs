use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{
    canonical_form, identify, quotient_unchecked, subalgebra_on, subuniverses, CanonicalForm,
};
use crate::algebra::FiniteAlgebra;
use crate::congruence::si_congruences;
use crate::Result;

fn named(a: FiniteAlgebra) -> FiniteAlgebra {
    match identify(&a) {
        Some(n) if a.name().is_none() => a.with_name(n),
        _ => a,
    }
}

/// Keyed by canonical form, so the output is sorted by size and then by
/// encoding.
fn dedup(algebras: impl IntoIterator<Item = FiniteAlgebra>) -> Vec<FiniteAlgebra> {
    let mut by_form: BTreeMap<CanonicalForm, FiniteAlgebra> = BTreeMap::new();
    for a in algebras {
        by_form.entry(canonical_form(&a)).or_insert(a);
    }
    by_form.into_values().map(named).collect()
}

/// One representative of each isomorphism type of subalgebra.
pub fn subalgebras_up_to_iso(a: &FiniteAlgebra, budget: usize) -> Result<Vec<FiniteAlgebra>> {
    let subs = subuniverses(a, budget)?;
    Ok(dedup(
        subs.par_iter()
            .map(|s| subalgebra_on(a, s).0)
            .collect::<Vec<_>>(),
    ))
}

/// Subdirectly irreducible quotients, up to isomorphism.
pub fn si_quotients(a: &FiniteAlgebra, budget: usize) -> Result<Vec<FiniteAlgebra>> {
    let thetas = si_congruences(a, budget)?;
    Ok(dedup(thetas.iter().map(|t| quotient_unchecked(a, t).0)))
}

/// Subdirectly irreducible members of `HS(a)`, up to isomorphism.
pub fn hs_si(a: &FiniteAlgebra, budget: usize) -> Result<Vec<FiniteAlgebra>> {
    let subs = subalgebras_up_to_iso(a, budget)?;
    let parts: Vec<Vec<FiniteAlgebra>> = subs
        .par_iter()
        .map(|b| si_quotients(b, budget))
        .collect::<Result<_>>()?;
    Ok(dedup(parts.into_iter().flatten()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::product;
    use crate::corpus::corpus;

    const B: usize = 100_000;

    fn names(v: &[FiniteAlgebra]) -> Vec<String> {
        let mut n: Vec<String> = v.iter().map(|a| a.label()).collect();
        n.sort();
        n
    }

    #[test]
    fn hs_si_examples() {
        let d4 = corpus("D4", None).unwrap();
        assert_eq!(names(&hs_si(&d4, B).unwrap()), vec!["C2", "D4"]);
        let c2 = corpus("C2", None).unwrap();
        assert_eq!(names(&hs_si(&c2, B).unwrap()), vec!["C2"]);
        let c4a = corpus("C4a", None).unwrap();
        assert!(names(&hs_si(&c4a, B).unwrap()).contains(&"C3a".to_string()));
    }

    #[test]
    fn hs_si_of_a_product_comes_from_the_factors() {
        for (x, y) in [("D3", "C3a"), ("D4", "C3b"), ("C2", "D5a")] {
            let a = corpus(x, None).unwrap();
            let b = corpus(y, None).unwrap();
            let mut parts = hs_si(&a, B).unwrap();
            parts.extend(hs_si(&b, B).unwrap());
            let known: Vec<_> = parts.iter().map(canonical_form).collect();
            for s in hs_si(&product(&a, &b), B).unwrap() {
                assert!(known.contains(&canonical_form(&s)), "{x} x {y}");
            }
        }
    }
}
