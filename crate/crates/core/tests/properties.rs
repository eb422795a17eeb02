use std::sync::OnceLock;

use proptest::prelude::*;

use poma_core::congruence::{cg, is_congruence, is_si, si_congruences, DEFAULT_CON_BUDGET};
use poma_core::constructions::{canonical_form, identify, is_hom, is_iso, quotient, Hom};
use poma_core::corpus::small_corpus;
use poma_core::enumerate::{enum_algebras, EnumerationTask};
use poma_core::syntax::{eval, parse_equation, parse_term, rho, tau, Assignment, Equation, Term};
use poma_core::{AlgebraData, FiniteAlgebra, Kind};

fn pool() -> &'static [FiniteAlgebra] {
    static POOL: OnceLock<Vec<FiniteAlgebra>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut v: Vec<FiniteAlgebra> = small_corpus()
            .into_iter()
            .filter(|a| a.size() <= 16)
            .collect();
        v.extend(enum_algebras(&EnumerationTask::new(4, Kind::Pma)).unwrap());
        v
    })
}

fn relabel(a: &FiniteAlgebra, perm: &[usize]) -> FiniteAlgebra {
    let d = a.to_data();
    let n = d.size;
    let mut leq = vec![vec![0u8; n]; n];
    let mut bx = vec![0; n];
    let mut dia = vec![0; n];
    for i in 0..n {
        for j in 0..n {
            leq[perm[i]][perm[j]] = d.leq[i][j];
        }
        bx[perm[i]] = perm[d.box_table[i]];
        dia[perm[i]] = perm[d.diamond[i]];
    }
    FiniteAlgebra::from_data(&AlgebraData {
        size: n,
        leq,
        box_table: bx,
        diamond: dia,
        name: None,
    })
    .unwrap()
}

fn algebra_and_perm() -> impl Strategy<Value = (FiniteAlgebra, Vec<usize>)> {
    (0..pool().len()).prop_flat_map(|i| {
        let a = pool()[i].clone();
        let n = a.size();
        (Just(a), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::Zero),
        Just(Term::One),
        Just(Term::var("x")),
        Just(Term::var("y")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::bx),
            inner.clone().prop_map(Term::dia),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::meet(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Term::join(a, b)),
        ]
    })
}

fn holds_at(a: &FiniteAlgebra, e: &Equation, asg: &Assignment) -> bool {
    eval(a, &e.lhs, asg).unwrap() == eval(a, &e.rhs, asg).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_ignores_labels((a, perm) in algebra_and_perm()) {
        let b = relabel(&a, &perm);
        prop_assert_eq!(canonical_form(&a), canonical_form(&b));
        prop_assert_eq!(identify(&a), identify(&b));
        prop_assert!(is_hom(&a, &b, &Hom::new(perm.clone())));
    }

    #[test]
    fn relabeling_preserves_validation((a, perm) in algebra_and_perm()) {
        let b = relabel(&a, &perm);
        let (ra, rb) = (a.validate(), b.validate());
        prop_assert_eq!(ra.level(), rb.level());
        prop_assert_eq!(is_si(&a), is_si(&b));
    }

    #[test]
    fn generated_congruence_is_least((a, perm) in algebra_and_perm(), i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let (x, y) = (perm[i.index(a.size())], perm[j.index(a.size())]);
        let p = cg(&a, &[(x, y)]);
        prop_assert!(is_congruence(&a, &p));
        prop_assert!(p.same(x, y));
        // any congruence containing the pair contains the generated one
        for q in si_congruences(&a, DEFAULT_CON_BUDGET).unwrap() {
            if q.same(x, y) {
                prop_assert!(p.refines(&q));
            }
        }
    }

    #[test]
    fn si_quotients_are_si(idx in 0..pool().len()) {
        let a = &pool()[idx];
        for theta in si_congruences(a, DEFAULT_CON_BUDGET).unwrap() {
            let (q, h) = quotient(a, &theta).unwrap();
            prop_assert!(is_si(&q));
            prop_assert!(is_hom(a, &q, &h));
        }
    }

    #[test]
    fn tau_rho_is_semantic_identity(l in term(), r in term(), idx in 0..pool().len()) {
        let a = &pool()[idx];
        let e = Equation::new(l, r);
        let (s, t) = rho(&e);
        let (el, er) = (tau(&s), tau(&t));
        for x in a.elements() {
            for y in a.elements() {
                let asg = Assignment::from([("x".to_string(), x), ("y".to_string(), y)]);
                prop_assert_eq!(holds_at(a, &e, &asg), holds_at(a, &el, &asg) && holds_at(a, &er, &asg));
            }
        }
    }

    #[test]
    fn printed_terms_parse_back(t in term(), u in term()) {
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t.clone());
        let e = Equation::new(t, u);
        prop_assert_eq!(parse_equation(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn json_round_trip((a, perm) in algebra_and_perm()) {
        let b = relabel(&a, &perm);
        let c = FiniteAlgebra::from_json(&b.to_json()).unwrap();
        prop_assert!(is_iso(&a, &c));
        prop_assert_eq!(b.to_data(), c.to_data());
    }
}
