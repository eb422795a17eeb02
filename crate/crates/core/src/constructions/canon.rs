//! Canonical labelling by colour refinement plus individualization.
//!
//! Colours are ranks of label-free signatures, so two isomorphic algebras
//! refine identically; the search then takes the lexicographically least
//! encoding over every leaf of the individualization tree.

use std::sync::OnceLock;

use serde::Serialize;

use crate::algebra::{Elem, FiniteAlgebra};

/// Isomorphism-invariant encoding: size, then the operator tables, then the
/// order matrix packed into words, all under the canonical relabelling.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CanonicalForm(pub Vec<u32>);

impl CanonicalForm {
    /// FNV-1a over the words; stable across runs and platforms.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for w in &self.0 {
            for b in w.to_le_bytes() {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }

    pub fn size(&self) -> usize {
        self.0.first().copied().unwrap_or(0) as usize
    }
}

struct Shape {
    lower: Vec<Vec<Elem>>,
    upper: Vec<Vec<Elem>>,
    box_pre: Vec<Vec<Elem>>,
    dia_pre: Vec<Vec<Elem>>,
}

impl Shape {
    fn new(a: &FiniteAlgebra) -> Self {
        let n = a.size();
        let mut lower = vec![Vec::new(); n];
        let mut upper = vec![Vec::new(); n];
        for (x, y) in a.covers() {
            lower[y].push(x);
            upper[x].push(y);
        }
        let mut box_pre = vec![Vec::new(); n];
        let mut dia_pre = vec![Vec::new(); n];
        for x in a.elements() {
            box_pre[a.box_of(x)].push(x);
            dia_pre[a.diamond_of(x)].push(x);
        }
        Shape {
            lower,
            upper,
            box_pre,
            dia_pre,
        }
    }
}

fn ranks<T: Ord + Clone>(sigs: &[T]) -> Vec<u32> {
    let mut distinct: Vec<T> = sigs.to_vec();
    distinct.sort();
    distinct.dedup();
    sigs.iter()
        .map(|s| distinct.binary_search(s).unwrap() as u32)
        .collect()
}

fn count_colors(colors: &[u32]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

fn refine(a: &FiniteAlgebra, shape: &Shape, mut colors: Vec<u32>) -> Vec<u32> {
    let sorted = |xs: &[Elem], colors: &[u32]| {
        let mut v: Vec<u32> = xs.iter().map(|&y| colors[y]).collect();
        v.sort_unstable();
        v
    };
    let mut classes = count_colors(&colors);
    loop {
        let sigs: Vec<(u32, Vec<u32>, Vec<u32>, u32, u32, Vec<u32>, Vec<u32>)> = a
            .elements()
            .map(|x| {
                (
                    colors[x],
                    sorted(&shape.lower[x], &colors),
                    sorted(&shape.upper[x], &colors),
                    colors[a.box_of(x)],
                    colors[a.diamond_of(x)],
                    sorted(&shape.box_pre[x], &colors),
                    sorted(&shape.dia_pre[x], &colors),
                )
            })
            .collect();
        colors = ranks(&sigs);
        let now = count_colors(&colors);
        if now == classes {
            return colors;
        }
        classes = now;
    }
}

fn encode(a: &FiniteAlgebra, order: &[Elem]) -> Vec<u32> {
    let n = a.size();
    let mut pos = vec![0u32; n];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i as u32;
    }
    let mut out = Vec::with_capacity(1 + 2 * n + (n * n).div_ceil(32));
    out.push(n as u32);
    out.extend(order.iter().map(|&x| pos[a.box_of(x)]));
    out.extend(order.iter().map(|&x| pos[a.diamond_of(x)]));
    let mut word = 0u32;
    let mut bits = 0;
    for &x in order {
        for &y in order {
            word = word << 1 | u32::from(a.leq(x, y));
            bits += 1;
            if bits == 32 {
                out.push(word);
                word = 0;
                bits = 0;
            }
        }
    }
    if bits > 0 {
        out.push(word << (32 - bits));
    }
    out
}

fn search(
    a: &FiniteAlgebra,
    shape: &Shape,
    colors: Vec<u32>,
    best: &mut Option<(Vec<u32>, Vec<Elem>)>,
) {
    let colors = refine(a, shape, colors);
    let n = a.size();
    if count_colors(&colors) == n {
        let mut order: Vec<Elem> = a.elements().collect();
        order.sort_by_key(|&x| colors[x]);
        let enc = encode(a, &order);
        if best.as_ref().is_none_or(|(b, _)| enc < *b) {
            *best = Some((enc, order));
        }
        return;
    }
    // first non-singleton cell in colour order
    let mut counts = vec![0usize; n];
    for &c in &colors {
        counts[c as usize] += 1;
    }
    let target = (0..n).find(|&c| counts[c] > 1).unwrap() as u32;
    for x in a.elements().filter(|&x| colors[x] == target) {
        let next: Vec<u32> = a
            .elements()
            .map(|y| 2 * colors[y] + u32::from(colors[y] == target && y != x))
            .collect();
        search(a, shape, next, best);
    }
}

/// Elements listed in canonical order: `order[i]` is the element placed at
/// position `i`.
pub fn canonical_labeling(a: &FiniteAlgebra) -> Vec<Elem> {
    let shape = Shape::new(a);
    let init: Vec<(usize, usize)> = a
        .elements()
        .map(|x| {
            let down = a.elements().filter(|&y| a.leq(y, x)).count();
            let up = a.elements().filter(|&y| a.leq(x, y)).count();
            (down, up)
        })
        .collect();
    let mut best = None;
    search(a, &shape, ranks(&init), &mut best);
    best.expect("at least one leaf").1
}

pub fn canonical_form(a: &FiniteAlgebra) -> CanonicalForm {
    CanonicalForm(encode(a, &canonical_labeling(a)))
}

/// The algebra relabelled into canonical order, keeping its name.
pub fn canonical_algebra(a: &FiniteAlgebra) -> FiniteAlgebra {
    let order = canonical_labeling(a);
    let n = a.size();
    let mut pos = vec![0usize; n];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i;
    }
    let leq: Vec<bool> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a.leq(order[i], order[j]))
        .collect();
    let meet = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| pos[a.meet(order[i], order[j])] as u32)
        .collect();
    let join = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| pos[a.join(order[i], order[j])] as u32)
        .collect();
    let boxes = order.iter().map(|&x| pos[a.box_of(x)] as u32).collect();
    let dias = order.iter().map(|&x| pos[a.diamond_of(x)] as u32).collect();
    let out = FiniteAlgebra::from_tables_unchecked(n, leq, meet, join, boxes, dias);
    match a.name() {
        Some(name) => out.with_name(name),
        None => out,
    }
}

fn known() -> &'static Vec<(CanonicalForm, &'static str)> {
    static TABLE: OnceLock<Vec<(CanonicalForm, &'static str)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut names: Vec<&'static str> = vec!["Trivial", "B2", "EX44III", "EX44IV"];
        names.extend(crate::corpus::FIGURE2);
        names.extend(crate::corpus::FIGURE3);
        let mut out: Vec<(CanonicalForm, &'static str)> = names
            .into_iter()
            .map(|n| {
                let a = if n == "Trivial" {
                    crate::corpus::trivial()
                } else {
                    crate::corpus::corpus(n, None).expect("corpus name")
                };
                (canonical_form(&a), n)
            })
            .collect();
        out.push((canonical_form(&crate::corpus::an_minus(2)), "AN_MINUS(2)"));
        out.push((canonical_form(&crate::corpus::boolean_simple(3)), "EX46(3)"));
        out
    })
}

/// The catalog name of an algebra isomorphic to `a`, if any.
pub fn identify(a: &FiniteAlgebra) -> Option<&'static str> {
    if a.size() > 8 {
        return None;
    }
    let cf = canonical_form(a);
    known().iter().find(|(c, _)| *c == cf).map(|(_, n)| *n)
}
