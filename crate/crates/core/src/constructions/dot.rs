use std::fmt::Write;

use super::{canonical_form, DualSpace};
use crate::algebra::FiniteAlgebra;

fn graph_id(a: &FiniteAlgebra) -> String {
    format!("A{:016x}", canonical_form(a).fingerprint())
}

/// Hasse diagram, bottom up, with box and diamond images as dashed and
/// dotted edges (identity images are omitted).
pub fn hasse_dot(a: &FiniteAlgebra) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", graph_id(a)).unwrap();
    writeln!(out, "  label=\"{}\";", a.label()).unwrap();
    writeln!(out, "  rankdir=BT;").unwrap();
    for x in a.elements() {
        let tag = if x == a.bottom() {
            "0".to_string()
        } else if x == a.top() {
            "1".to_string()
        } else {
            x.to_string()
        };
        writeln!(out, "  e{x} [label=\"{tag}\"];").unwrap();
    }
    for (x, y) in a.covers() {
        writeln!(out, "  e{x} -> e{y} [arrowhead=none];").unwrap();
    }
    for x in a.elements() {
        let (b, d) = (a.box_of(x), a.diamond_of(x));
        if b != x {
            writeln!(
                out,
                "  e{x} -> e{b} [style=dashed, color=blue, constraint=false];"
            )
            .unwrap();
        }
        if d != x {
            writeln!(
                out,
                "  e{x} -> e{d} [style=dotted, color=red, constraint=false];"
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Points with inclusion covers as plain edges and `R` as dashed arrows.
pub fn dual_space_dot(x: &DualSpace) -> String {
    let n = x.len();
    let mut out = String::from("digraph space {\n  rankdir=BT;\n");
    for (p, members) in x.points.iter().enumerate() {
        let list: Vec<String> = members.iter().map(|e| e.to_string()).collect();
        writeln!(out, "  p{p} [label=\"{{{}}}\"];", list.join(",")).unwrap();
    }
    for p in 0..n {
        for q in 0..n {
            let cover = p != q
                && x.leq[p][q]
                && !(0..n).any(|s| s != p && s != q && x.leq[p][s] && x.leq[s][q]);
            if cover {
                writeln!(out, "  p{p} -> p{q} [arrowhead=none];").unwrap();
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            if x.r[p][q] {
                writeln!(out, "  p{p} -> p{q} [style=dashed, constraint=false];").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus;

    #[test]
    fn dot_is_stable_and_names_the_graph() {
        let d4 = corpus("D4", None).unwrap();
        let s = hasse_dot(&d4);
        assert_eq!(s, hasse_dot(&d4));
        assert!(s.starts_with("digraph A"));
        assert_eq!(s.matches("arrowhead=none").count(), 3);
        let x = super::super::dual_space(&d4).unwrap();
        assert!(dual_space_dot(&x).contains("p0"));
    }
}
