//! Named algebras.
//!
//! Chains are indexed bottom-up. Positive S4-algebras are given by their
//! lattice and the fixed points of the two operators; the operators are then
//! forced (greatest box-fixed point below, least diamond-fixed point above).

use std::collections::BTreeSet;

use crate::algebra::shapes::{boolean, chain, from_fixed_points, identity_ops};
use crate::algebra::{Elem, FiniteAlgebra};
use crate::{Error, Result};

/// The one-generated subdirectly irreducible positive S4-algebras.
pub const FIGURE2: [&str; 11] = [
    "C2", "D3", "C3a", "C3b", "D4", "C4a", "C4b", "C5a", "C5b", "C6a", "C6b",
];

/// Four further s.i. positive S4-algebras with only trivial fixed points.
pub const FIGURE3: [&str; 4] = ["A4", "D5a", "D5b", "B4"];

/// Every parameterless name.
pub const PLAIN_NAMES: [&str; 19] = [
    "C2", "B2", "D3", "C3a", "C3b", "D4", "C4a", "C4b", "C5a", "C5b", "C6a", "C6b", "A4", "D5a",
    "D5b", "B4", "EX44III", "EX44IV", "F1_PS4",
];

/// Parameterized names and their supported ranges.
pub const PARAM_NAMES: [(&str, i64, i64); 3] =
    [("EX46", 3, 6), ("AN_MINUS", 1, 6), ("AN_SIMPLE", 2, 6)];

pub fn trivial() -> FiniteAlgebra {
    chain(1, vec![0], vec![0]).with_name("Trivial")
}

fn chain_ps4(n: usize, box_fixed: &[Elem], diamond_fixed: &[Elem]) -> FiniteAlgebra {
    from_fixed_points(&identity_ops(n, |a, b| a <= b), box_fixed, diamond_fixed)
}

/// `0 < d < l, r < t < 1` with `d = l /\ r`, `t = l \/ r`.
fn six_element(box_fixed: &[Elem], diamond_fixed: &[Elem]) -> FiniteAlgebra {
    const UP: [&[Elem]; 6] = [
        &[0, 1, 2, 3, 4, 5],
        &[1, 2, 3, 4, 5],
        &[2, 4, 5],
        &[3, 4, 5],
        &[4, 5],
        &[5],
    ];
    let lat = identity_ops(6, |a, b| UP[a].contains(&b));
    from_fixed_points(&lat, box_fixed, diamond_fixed)
}

/// Box is 0 below the top and diamond is 1 above the bottom.
pub fn collapse_operators(lattice: &FiniteAlgebra) -> FiniteAlgebra {
    from_fixed_points(lattice, &[], &[])
}

fn lattice_from_up(up: &[&[Elem]]) -> FiniteAlgebra {
    identity_ops(up.len(), |a, b| up[a].contains(&b))
}

fn plain(name: &str) -> Option<FiniteAlgebra> {
    let a = match name {
        "C2" => chain_ps4(2, &[], &[]),
        "B2" => chain(2, vec![1, 1], vec![0, 0]),
        "D3" => chain_ps4(3, &[], &[]),
        "C3a" => chain_ps4(3, &[], &[1]),
        "C3b" => chain_ps4(3, &[1], &[]),
        "D4" => chain_ps4(4, &[1], &[2]),
        "C4a" => chain_ps4(4, &[], &[2]),
        "C4b" => chain_ps4(4, &[1], &[]),
        "C5a" => chain_ps4(5, &[2], &[3]),
        "C5b" => chain_ps4(5, &[1], &[2]),
        // d = 1, l = 2, r = 3, t = 4
        "C6a" => six_element(&[3], &[4]),
        "C6b" => six_element(&[1], &[3]),
        "A4" => collapse_operators(&boolean(2, (0..4).collect(), (0..4).collect())),
        // 0 < m < l, r < 1
        "D5a" => collapse_operators(&lattice_from_up(&[
            &[0, 1, 2, 3, 4],
            &[1, 2, 3, 4],
            &[2, 4],
            &[3, 4],
            &[4],
        ])),
        // 0 < l, r < j < 1
        "D5b" => collapse_operators(&lattice_from_up(&[
            &[0, 1, 2, 3, 4],
            &[1, 3, 4],
            &[2, 3, 4],
            &[3, 4],
            &[4],
        ])),
        "B4" => chain_ps4(4, &[], &[]),
        "EX44III" => chain_ps4(3, &[1], &[1]),
        "EX44IV" => chain_ps4(5, &[], &[]),
        "F1_PS4" => figure1().algebra,
        _ => return None,
    };
    Some(a)
}

/// Boolean lattice over `{a1..an}` (bit `i` is `a_{i+1}`) with the
/// preorder-style box: identity on the top, `{a1}` on sets containing `a1`,
/// empty otherwise. Diamond is the De Morgan dual.
pub fn an_minus(n: u32) -> FiniteAlgebra {
    let full = (1usize << n) - 1;
    let boxes: Vec<Elem> = (0..=full)
        .map(|x| {
            if x == full {
                full
            } else if x & 1 == 0 {
                0
            } else {
                1
            }
        })
        .collect();
    let diamonds: Vec<Elem> = (0..=full).map(|x| full & !boxes[full & !x]).collect();
    boolean(n, boxes, diamonds)
}

/// `2^k`-element Boolean lattice with collapsing operators.
pub fn boolean_simple(k: u32) -> FiniteAlgebra {
    let n = 1usize << k;
    collapse_operators(&boolean(k, (0..n).collect(), (0..n).collect()))
}

fn canonical_plain(name: &str) -> Option<&'static str> {
    PLAIN_NAMES
        .iter()
        .copied()
        .find(|n| n.eq_ignore_ascii_case(name))
}

/// Looks up a corpus algebra by (case-insensitive) name.
pub fn corpus(name: &str, parameter: Option<i64>) -> Result<FiniteAlgebra> {
    if let Some(canon) = canonical_plain(name) {
        if parameter.is_some() {
            return Err(Error::Precondition(format!("`{canon}` takes no parameter")));
        }
        return Ok(plain(canon).expect("listed name").with_name(canon));
    }
    let Some(&(canon, lo, hi)) = PARAM_NAMES
        .iter()
        .find(|(n, _, _)| n.eq_ignore_ascii_case(name))
    else {
        return Err(Error::UnknownCorpus(name.to_string()));
    };
    let value =
        parameter.ok_or_else(|| Error::Precondition(format!("`{canon}` needs a parameter")))?;
    if value < lo || value > hi {
        let range = match canon {
            "EX46" => "3..=6",
            "AN_MINUS" => "1..=6",
            _ => "2..=6",
        };
        return Err(Error::ParameterOutOfRange {
            name: canon.to_string(),
            value,
            range,
        });
    }
    let k = value as u32;
    let a = match canon {
        "AN_MINUS" => an_minus(k),
        _ => boolean_simple(k),
    };
    Ok(a.with_name(format!("{canon}({value})")))
}

/// Parses `NAME`, `NAME:n` or `NAME(n)` and looks the algebra up.
pub fn corpus_spec(spec: &str) -> Result<FiniteAlgebra> {
    let spec = spec.trim();
    let (name, param) = if let Some((n, p)) = spec.split_once(':') {
        (n, Some(p))
    } else if let Some(stripped) = spec.strip_suffix(')') {
        match stripped.split_once('(') {
            Some((n, p)) => (n, Some(p)),
            None => (spec, None),
        }
    } else {
        (spec, None)
    };
    let param = param
        .map(|p| {
            p.trim()
                .parse::<i64>()
                .map_err(|_| Error::Precondition(format!("bad corpus parameter `{p}`")))
        })
        .transpose()?;
    corpus(name.trim(), param)
}

/// Every corpus member with parameters at the low end of their ranges
/// (`EX46(3)`, `AN_MINUS(1..=3)`, `AN_SIMPLE(2..=3)`).
pub fn small_corpus() -> Vec<FiniteAlgebra> {
    let mut out: Vec<FiniteAlgebra> = PLAIN_NAMES
        .iter()
        .map(|n| corpus(n, None).expect("listed"))
        .collect();
    out.push(corpus("EX46", Some(3)).unwrap());
    for n in 1..=3 {
        out.push(corpus("AN_MINUS", Some(n)).unwrap());
    }
    for n in 2..=3 {
        out.push(corpus("AN_SIMPLE", Some(n)).unwrap());
    }
    out
}

/// The one-generated free positive S4-algebra, with its generator and the
/// values of the seven generating terms.
#[derive(Debug, Clone)]
pub struct Figure1 {
    pub algebra: FiniteAlgebra,
    pub generator: Elem,
    /// Values of `x, box x, dia box x, box dia box x, dia x, box dia x,
    /// dia box dia x` at the generator.
    pub sigma: [Elem; 7],
}

/// Strict order on the seven generating terms, indexed as in
/// [`Figure1::sigma`]: pairs `(i, j)` with `sigma_i <= sigma_j`.
pub const SIGMA_ORDER: [(usize, usize); 9] = [
    // box x <= box dia box x <= box dia x <= dia box dia x <= dia x
    (1, 3),
    (3, 5),
    (5, 6),
    (6, 4),
    // box dia box x <= dia box x <= dia box dia x
    (3, 2),
    (2, 6),
    // box x <= x <= dia x
    (1, 0),
    (0, 4),
    // redundant but listed in the diagram
    (1, 4),
];

pub(crate) fn sigma_leq() -> [[bool; 7]; 7] {
    let mut le = [[false; 7]; 7];
    for (i, row) in le.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(i, j) in &SIGMA_ORDER {
        le[i][j] = true;
    }
    // transitive closure
    for k in 0..7 {
        for i in 0..7 {
            for j in 0..7 {
                if le[i][k] && le[k][j] {
                    le[i][j] = true;
                }
            }
        }
    }
    le
}

/// Builds the algebra as the free bounded distributive lattice over the
/// seven-element poset of generating terms, with the box-fixed points
/// `box x, box dia box x, box dia x` and diamond-fixed points
/// `dia box x, dia box dia x, dia x`.
///
/// The free lattice is realized inside the powerset of the up-sets of the
/// poset, each generator `p` mapped to the up-sets containing it.
pub fn figure1() -> Figure1 {
    let le = sigma_leq();
    let upsets: Vec<u8> = (0u8..128)
        .filter(|&u| {
            (0..7).all(|i| u >> i & 1 == 0 || (0..7).all(|j| !le[i][j] || u >> j & 1 == 1))
        })
        .collect();
    assert!(upsets.len() <= 128);
    let gen_mask = |p: usize| -> u128 {
        upsets
            .iter()
            .enumerate()
            .filter(|(_, &u)| u >> p & 1 == 1)
            .fold(0u128, |m, (i, _)| m | 1 << i)
    };
    let full: u128 = if upsets.len() == 128 {
        u128::MAX
    } else {
        (1u128 << upsets.len()) - 1
    };
    let mut elems: BTreeSet<u128> = (0..7).map(gen_mask).collect();
    elems.insert(0);
    elems.insert(full);
    loop {
        let cur: Vec<u128> = elems.iter().copied().collect();
        let before = elems.len();
        for &a in &cur {
            for &b in &cur {
                elems.insert(a & b);
                elems.insert(a | b);
            }
        }
        if elems.len() == before {
            break;
        }
    }
    let mut sorted: Vec<u128> = elems.into_iter().collect();
    sorted.sort_by_key(|&m| (m.count_ones(), m));
    let index = |m: u128| sorted.iter().position(|&x| x == m).expect("closed set");
    let n = sorted.len();
    let lattice = identity_ops(n, |a, b| sorted[a] & !sorted[b] == 0);
    let sigma: [Elem; 7] = std::array::from_fn(|p| index(gen_mask(p)));
    let algebra = from_fixed_points(
        &lattice,
        &[sigma[1], sigma[3], sigma[5]],
        &[sigma[2], sigma[6], sigma[4]],
    );
    Figure1 {
        algebra,
        generator: sigma[0],
        sigma,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_member_validates_at_its_level() {
        for a in small_corpus() {
            let r = a.validate();
            if a.name() == Some("B2") {
                assert!(r.is_pk4 && !r.is_ps4);
            } else {
                assert!(r.is_ps4, "{} is not PS4: {:?}", a.label(), r.violations);
            }
        }
    }

    #[test]
    fn d4_has_the_forced_shape() {
        let d4 = corpus("D4", None).unwrap();
        assert_eq!(d4.box_table(), vec![0, 1, 1, 3]);
        assert_eq!(d4.diamond_table(), vec![0, 2, 2, 3]);
    }

    #[test]
    fn example_44_iv_tables() {
        let a = corpus("EX44IV", None).unwrap();
        assert_eq!(a.box_table(), vec![0, 0, 0, 0, 4]);
        assert_eq!(a.diamond_table(), vec![0, 4, 4, 4, 4]);
    }

    #[test]
    fn an_minus_two() {
        let a = corpus("AN_MINUS", Some(2)).unwrap();
        // {} , {a1}, {a2}, {a1,a2}
        assert_eq!(a.box_table(), vec![0, 1, 0, 3]);
        assert_eq!(a.diamond_table(), vec![0, 3, 2, 3]);
        assert!(a.is_ps4());
    }

    #[test]
    fn lookup_is_case_insensitive_and_checked() {
        assert_eq!(corpus_spec("c3A").unwrap().name(), Some("C3a"));
        assert_eq!(corpus_spec("an_minus:3").unwrap().size(), 8);
        assert_eq!(corpus_spec("EX46(3)").unwrap().size(), 8);
        assert!(matches!(corpus("nope", None), Err(Error::UnknownCorpus(_))));
        assert!(matches!(
            corpus("EX46", Some(2)),
            Err(Error::ParameterOutOfRange { .. })
        ));
    }

    #[test]
    fn figure1_shape() {
        let f = figure1();
        assert_eq!(f.algebra.size(), 37);
        let a = &f.algebra;
        // rank profile from the bottom
        let mut rank = vec![0usize; a.size()];
        let mut order: Vec<Elem> = a.elements().collect();
        order.sort_by_key(|&x| a.elements().filter(|&y| a.leq(y, x)).count());
        for &x in &order {
            rank[x] = a
                .elements()
                .filter(|&y| a.lt(y, x))
                .map(|y| rank[y] + 1)
                .max()
                .unwrap_or(0);
        }
        let height = *rank.iter().max().unwrap();
        let profile: Vec<usize> = (0..=height)
            .map(|r| rank.iter().filter(|&&x| x == r).count())
            .collect();
        assert_eq!(profile, vec![1, 1, 1, 2, 3, 4, 4, 5, 4, 4, 3, 2, 1, 1, 1]);
        assert!(a.is_ps4());
        let distinct: BTreeSet<Elem> = f.sigma.iter().copied().collect();
        assert_eq!(distinct.len(), 7);
    }
}
