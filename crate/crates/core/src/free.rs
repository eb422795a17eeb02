//! Free algebras of finitely generated varieties, the one-generated free
//! positive S4-algebra and its checks, and the growth witness for the
//! two-variable term sequence.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{AlgebraData, Elem, FiniteAlgebra, Kind};
use crate::constructions::{canonical_labeling, extend_hom, si_quotients};
use crate::corpus::{figure1, sigma_leq};
use crate::syntax::{assignments, Compiled, Term};
use crate::{Error, Result};

/// Largest free algebra built by default.
pub const DEFAULT_FREE_BUDGET: usize = 2048;

#[derive(Debug, Clone)]
pub struct FreeAlgebraResult {
    pub algebra: FiniteAlgebra,
    /// Images of the free generators, in order.
    pub generators: Vec<Elem>,
    /// Labels of the algebras generating the variety.
    pub basis: Vec<String>,
}

#[derive(Serialize)]
struct FreeJson<'a> {
    #[serde(flatten)]
    data: AlgebraData,
    generators: &'a [Elem],
    basis: &'a [String],
}

impl FreeAlgebraResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&FreeJson {
            data: self.algebra.to_data(),
            generators: &self.generators,
            basis: &self.basis,
        })
        .expect("plain data serializes")
    }

    /// Every assignment of the generators into each basis algebra extends to
    /// a homomorphism.
    pub fn is_free_for(&self, basis: &[FiniteAlgebra]) -> bool {
        basis.iter().all(|b| {
            assignments(b.size(), self.generators.len()).all(|images| {
                extend_hom(&self.algebra, b, &self.generators, &images)
                    .is_some_and(|m| m.iter().all(Option::is_some))
            })
        })
    }
}

/// Relabels into canonical order, carrying the generators along.
fn canonicalize(a: &FiniteAlgebra, gens: &[Elem]) -> (FiniteAlgebra, Vec<Elem>) {
    let order = canonical_labeling(a);
    let mut pos = vec![0; a.size()];
    for (i, &x) in order.iter().enumerate() {
        pos[x] = i;
    }
    let n = a.size();
    let le: Vec<bool> = (0..n * n)
        .map(|k| a.leq(order[k / n], order[k % n]))
        .collect();
    let tab = |f: &dyn Fn(Elem, Elem) -> Elem| -> Vec<u32> {
        (0..n * n)
            .map(|k| pos[f(order[k / n], order[k % n])] as u32)
            .collect()
    };
    let meet = tab(&|x, y| a.meet(x, y));
    let join = tab(&|x, y| a.join(x, y));
    let boxes = order.iter().map(|&x| pos[a.box_of(x)] as u32).collect();
    let dias = order.iter().map(|&x| pos[a.diamond_of(x)] as u32).collect();
    let out = FiniteAlgebra::from_tables_unchecked(n, le, meet, join, boxes, dias);
    (out, gens.iter().map(|&g| pos[g]).collect())
}

/// The free `n`-generated algebra of `V(basis)`: the subalgebra of
/// `prod_A A^(A^n)` generated by the projection tuples. Fails once more
/// than `budget` elements have been found.
pub fn free_over(basis: &[FiniteAlgebra], n: usize, budget: usize) -> Result<FreeAlgebraResult> {
    if basis.is_empty() {
        return Err(Error::Precondition("empty generating class".into()));
    }
    // one coordinate per (algebra, assignment)
    let mut coord_alg: Vec<&FiniteAlgebra> = Vec::new();
    let mut gens: Vec<Vec<u32>> = vec![Vec::new(); n];
    for a in basis {
        let count = a.size().checked_pow(n as u32).unwrap_or(usize::MAX);
        if count.saturating_mul(basis.len()) > 1 << 22 {
            return Err(Error::budget("free algebra coordinates", 1 << 22, count));
        }
        for asg in assignments(a.size(), n) {
            coord_alg.push(a);
            for (g, &v) in gens.iter_mut().zip(&asg) {
                g.push(v as u32);
            }
        }
    }
    let d = coord_alg.len();
    let constant = |f: &dyn Fn(&FiniteAlgebra) -> Elem| -> Vec<u32> {
        coord_alg.iter().map(|a| f(a) as u32).collect()
    };
    let bottom = constant(&|a| a.bottom());
    let top = constant(&|a| a.top());
    let binary = |x: &[u32], y: &[u32], meet: bool| -> Vec<u32> {
        (0..d)
            .map(|i| {
                let a = coord_alg[i];
                let (p, q) = (x[i] as usize, y[i] as usize);
                (if meet { a.meet(p, q) } else { a.join(p, q) }) as u32
            })
            .collect()
    };
    let unary = |x: &[u32], bx: bool| -> Vec<u32> {
        (0..d)
            .map(|i| {
                let a = coord_alg[i];
                (if bx {
                    a.box_of(x[i] as usize)
                } else {
                    a.diamond_of(x[i] as usize)
                }) as u32
            })
            .collect()
    };

    let mut elems: Vec<Vec<u32>> = Vec::new();
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut push = |t: Vec<u32>, elems: &mut Vec<Vec<u32>>| -> Result<usize> {
        if let Some(&i) = index.get(&t) {
            return Ok(i);
        }
        if elems.len() >= budget {
            return Err(Error::budget(
                "free algebra elements",
                budget,
                elems.len() + 1,
            ));
        }
        index.insert(t.clone(), elems.len());
        elems.push(t);
        Ok(elems.len() - 1)
    };
    push(bottom, &mut elems)?;
    push(top, &mut elems)?;
    let gen_idx: Vec<usize> = gens
        .into_iter()
        .map(|g| push(g, &mut elems))
        .collect::<Result<_>>()?;
    let mut i = 0;
    while i < elems.len() {
        let x = elems[i].clone();
        push(unary(&x, true), &mut elems)?;
        push(unary(&x, false), &mut elems)?;
        for j in 0..=i {
            let y = elems[j].clone();
            push(binary(&x, &y, true), &mut elems)?;
            push(binary(&x, &y, false), &mut elems)?;
        }
        i += 1;
    }

    let m = elems.len();
    let mut meet = vec![0u32; m * m];
    let mut join = vec![0u32; m * m];
    let mut leq = vec![false; m * m];
    for x in 0..m {
        for y in 0..m {
            let mt = index[&binary(&elems[x], &elems[y], true)];
            meet[x * m + y] = mt as u32;
            join[x * m + y] = index[&binary(&elems[x], &elems[y], false)] as u32;
            leq[x * m + y] = mt == x;
        }
    }
    let boxes = elems
        .iter()
        .map(|x| index[&unary(x, true)] as u32)
        .collect();
    let dias = elems
        .iter()
        .map(|x| index[&unary(x, false)] as u32)
        .collect();
    let raw = FiniteAlgebra::from_tables_unchecked(m, leq, meet, join, boxes, dias);
    let (algebra, generators) = canonicalize(&raw, &gen_idx);
    Ok(FreeAlgebraResult {
        algebra,
        generators,
        basis: basis.iter().map(FiniteAlgebra::label).collect(),
    })
}

/// The subalgebra generated by the constants in the product of `basis`.
pub fn free_zero(basis: &[FiniteAlgebra]) -> Result<FiniteAlgebra> {
    Ok(free_over(basis, 0, DEFAULT_FREE_BUDGET)?.algebra)
}

/// The one-generated free positive S4-algebra.
pub fn figure1_algebra() -> FreeAlgebraResult {
    let f = figure1();
    FreeAlgebraResult {
        algebra: f.algebra.with_name("F1_PS4"),
        generators: vec![f.generator],
        basis: vec![Kind::Ps4.to_string()],
    }
}

/// `x, box x, dia box x, box dia box x, dia x, box dia x, dia box dia x`.
pub fn sigma_terms() -> Vec<Term> {
    let x = Term::var("x");
    let bx = Term::bx;
    let dia = Term::dia;
    vec![
        x.clone(),
        bx(x.clone()),
        dia(bx(x.clone())),
        bx(dia(bx(x.clone()))),
        dia(x.clone()),
        bx(dia(x.clone())),
        dia(bx(dia(x))),
    ]
}

/// Values of the seven terms at `b`.
pub fn sigma_values(a: &FiniteAlgebra, b: Elem) -> [Elem; 7] {
    let vars = ["x".to_string()];
    let terms = sigma_terms();
    std::array::from_fn(|i| {
        Compiled::new(&terms[i], &vars)
            .expect("one variable")
            .eval(a, &[b], &mut Vec::new())
    })
}

/// Every order relation of the seven-term diagram holds at `b`.
pub fn fact52_check(a: &FiniteAlgebra, b: Elem) -> bool {
    let v = sigma_values(a, b);
    let le = sigma_leq();
    (0..7).all(|i| (0..7).all(|j| !le[i][j] || a.leq(v[i], v[j])))
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub stage: char,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Figure1Report {
    pub size: usize,
    pub enumeration_bound: usize,
    pub stages: Vec<Stage>,
}

impl Figure1Report {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.passed)
    }
}

/// Runs the five checks on the one-generated free algebra, the fourth
/// against every enumerated PS4 algebra with at most `bound` elements.
pub fn verify_figure1(bound: usize) -> Result<Figure1Report> {
    let f = figure1_algebra();
    let a = &f.algebra;
    let g = f.generators[0];
    let mut stages = Vec::new();

    let report = a.validate();
    stages.push(Stage {
        stage: 'a',
        name: "positive S4 axioms",
        passed: report.is_ps4,
        detail: match report.violations.first() {
            Some(v) => format!("{} fails at {:?}", v.axiom, v.witness),
            None => format!("{} elements", a.size()),
        },
    });

    let generated = crate::constructions::closure(a, &[g]).len();
    stages.push(Stage {
        stage: 'b',
        name: "generated by the generator",
        passed: generated == a.size(),
        detail: format!("generator {g} generates {generated} of {}", a.size()),
    });

    let quotients = si_quotients(a, crate::congruence::DEFAULT_CON_BUDGET)?;
    let catalog: Vec<FiniteAlgebra> = crate::corpus::FIGURE2
        .iter()
        .map(|n| crate::corpus::corpus(n, None))
        .collect::<Result<_>>()?;
    let matched = quotients
        .iter()
        .filter(|q| catalog.iter().any(|c| crate::constructions::is_iso(q, c)))
        .count();
    let names: Vec<String> = quotients.iter().map(FiniteAlgebra::label).collect();
    stages.push(Stage {
        stage: 'c',
        name: "subdirectly irreducible quotients",
        passed: quotients.len() == catalog.len() && matched == catalog.len(),
        detail: format!("{} quotients: {}", quotients.len(), names.join(", ")),
    });

    let task = crate::enumerate::EnumerationTask::new(bound, Kind::Ps4);
    let targets = crate::enumerate::enum_algebras(&task)?;
    let mut failure = None;
    let mut checked = 0usize;
    'outer: for b in &targets {
        for e in b.elements() {
            checked += 1;
            let ok = extend_hom(a, b, &[g], &[e]).is_some_and(|m| m.iter().all(Option::is_some));
            if !ok {
                failure = Some(format!("{} element {e}", b.to_json()));
                break 'outer;
            }
        }
    }
    stages.push(Stage {
        stage: 'd',
        name: "universal property",
        passed: failure.is_none(),
        detail: failure.unwrap_or_else(|| {
            format!(
                "{} algebras, {checked} targets, each with one extension",
                targets.len()
            )
        }),
    });

    let v = sigma_values(a, g);
    let mut distinct = v.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let realized = (0..7).all(|i| (0..7).all(|j| a.leq(v[i], v[j]) == sigma_leq()[i][j]));
    stages.push(Stage {
        stage: 'e',
        name: "seven-term diagram",
        passed: fact52_check(a, g) && distinct.len() == 7 && realized,
        detail: format!("values {v:?}"),
    });

    Ok(Figure1Report {
        size: a.size(),
        enumeration_bound: bound,
        stages,
    })
}

/// `phi_0 = box x`, `phi_{m+1} = box(x v phi_m)` for odd `m` and
/// `box(y v phi_m)` for even `m`.
pub fn build_phi(n: usize) -> Term {
    let mut phi = Term::bx(Term::var("x"));
    for m in 0..n {
        let v = if m % 2 == 1 { "x" } else { "y" };
        phi = Term::bx(Term::join(Term::var(v), phi));
    }
    phi
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    pub worlds: usize,
    /// `phi_k(c, d)` as world bitmasks, for `k < worlds`.
    pub values: Vec<u64>,
    pub distinct: usize,
    /// Every `phi_k` equals `{0, ..., k}` for `k < worlds`.
    pub initial_segments: bool,
    /// Least `k` with `phi_k` the whole frame; all later terms repeat it.
    pub saturates_at: usize,
}

/// Evaluates `phi_0 .. phi_{N-1}` in the complex algebra of `({0..N-1}, >=)`
/// at `x = evens`, `y = odds`.
pub fn lemma53_growth(worlds: usize) -> Result<GrowthReport> {
    if worlds == 0 || worlds > 64 {
        return Err(Error::ParameterOutOfRange {
            name: "worlds".into(),
            value: worlds as i64,
            range: "1..=64",
        });
    }
    let full: u64 = if worlds == 64 {
        u64::MAX
    } else {
        (1 << worlds) - 1
    };
    // world w sees every v <= w
    let down = |w: usize| -> u64 {
        if w == 63 {
            u64::MAX
        } else {
            (1u64 << (w + 1)) - 1
        }
    };
    let bx = |m: &u64| -> u64 {
        (0..worlds)
            .filter(|&w| down(w) & !m == 0)
            .fold(0, |s, w| s | 1 << w)
    };
    let dia = |m: &u64| -> u64 {
        (0..worlds)
            .filter(|&w| down(w) & m != 0)
            .fold(0, |s, w| s | 1 << w)
    };
    let evens = (0..worlds)
        .filter(|w| w % 2 == 0)
        .fold(0u64, |s, w| s | 1 << w);
    let odds = full & !evens;
    let vars = ["x".to_string(), "y".to_string()];
    let values: Vec<u64> = (0..worlds)
        .map(|k| {
            Compiled::new(&build_phi(k), &vars).map(|c| {
                c.eval_with(
                    &[evens, odds],
                    &0,
                    &full,
                    &|a, b| a & b,
                    &|a, b| a | b,
                    &bx,
                    &dia,
                )
            })
        })
        .collect::<Result<_>>()?;
    let mut distinct = values.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let initial_segments = values.iter().enumerate().all(|(k, &v)| v == down(k) & full);
    let saturates_at = values.iter().position(|&v| v == full).unwrap_or(worlds);
    Ok(GrowthReport {
        worlds,
        distinct: distinct.len(),
        values,
        initial_segments,
        saturates_at,
    })
}

/// The one-generated free algebras of `V(a)` and `V(b)` are isomorphic by a
/// map fixing the generator.
pub fn same_one_var_theory(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<bool> {
    let fa = free_over(std::slice::from_ref(a), 1, DEFAULT_FREE_BUDGET)?;
    let fb = free_over(std::slice::from_ref(b), 1, DEFAULT_FREE_BUDGET)?;
    if fa.algebra.size() != fb.algebra.size() {
        return Ok(false);
    }
    Ok(
        extend_hom(&fa.algebra, &fb.algebra, &fa.generators, &fb.generators).is_some_and(|m| {
            let m: Option<Vec<Elem>> = m.into_iter().collect();
            m.is_some_and(|m| crate::constructions::Hom::new(m).is_injective())
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{is_iso, is_retract};
    use crate::corpus::corpus;

    fn named(n: &str) -> FiniteAlgebra {
        corpus(n, None).unwrap()
    }

    #[test]
    fn free_over_d4_is_the_five_chain() {
        let f = free_over(&[named("D4")], 1, 100).unwrap();
        let a = &f.algebra;
        assert_eq!(a.size(), 5);
        assert!(a.is_chain());
        // chain elements bottom to top
        let mut c: Vec<Elem> = a.elements().collect();
        c.sort_by_key(|&x| a.elements().filter(|&y| a.leq(y, x)).count());
        let (x1, x2, x3) = (c[1], c[2], c[3]);
        assert_eq!((a.box_of(x2), a.box_of(x3)), (x1, x1));
        assert_eq!((a.diamond_of(x1), a.diamond_of(x2)), (x3, x3));
        assert!(is_retract(&named("D4"), a).unwrap());
        assert!(f.is_free_for(&[named("D4")]));
    }

    #[test]
    fn small_free_algebras() {
        let f = free_over(&[named("C2")], 1, 100).unwrap();
        assert_eq!(f.algebra.size(), 3);
        let x = f.generators[0];
        assert_eq!((f.algebra.box_of(x), f.algebra.diamond_of(x)), (x, x));
        assert!(is_iso(
            &free_over(&[named("C2")], 0, 10).unwrap().algebra,
            &named("C2")
        ));
        assert!(is_iso(&free_zero(&[named("D3")]).unwrap(), &named("C2")));
        assert!(is_iso(&free_zero(&[named("B2")]).unwrap(), &named("B2")));
        assert!(free_zero(&[crate::corpus::trivial()]).unwrap().is_trivial());
        assert!(matches!(
            free_over(&[named("D4")], 3, 10),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn figure1_generator_and_terms() {
        let f = figure1_algebra();
        assert!(f.is_free_for(&[named("D4"), named("C4a"), named("A4")]));
        let v = sigma_values(&f.algebra, f.generators[0]);
        assert_eq!(v, figure1().sigma);
        assert!(fact52_check(&named("C2"), 1));
        let d4 = named("D4");
        assert!(d4.elements().all(|b| fact52_check(&d4, b)));
    }

    #[test]
    fn phi_growth() {
        let r = lemma53_growth(4).unwrap();
        assert_eq!(r.values[0], 1);
        assert_eq!(r.distinct, 4);
        assert!(r.initial_segments);
        assert_eq!(lemma53_growth(1).unwrap().distinct, 1);
        assert_eq!(build_phi(1).to_string(), "box (y \\/ box x)");
    }

    #[test]
    fn one_variable_theories() {
        assert!(same_one_var_theory(&named("C2"), &named("C2")).unwrap());
        assert!(!same_one_var_theory(&named("C3a"), &named("C3b")).unwrap());
        assert!(!same_one_var_theory(&named("D3"), &named("C2")).unwrap());
    }
}
