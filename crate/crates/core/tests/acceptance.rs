//! End-to-end acceptance run. Prints one line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use poma_core::completeness::{is_hsc_pk4, is_psc, is_sc_pk4, Status};
use poma_core::congruence::{
    cg, cg_dl, cg_k4, has_cep, is_fsi, is_simple, is_well_connected, DEFAULT_CON_BUDGET,
};
use poma_core::constructions::{
    boolean_envelope, canonical_form, is_iso, is_retract, si_quotients, subalgebra_on,
    subuniverses, CanonicalForm,
};
use poma_core::corpus::{corpus, figure1, small_corpus, FIGURE2, FIGURE3};
use poma_core::enumerate::enum_bdl;
use poma_core::free::{free_over, free_zero, lemma53_growth, verify_figure1};
use poma_core::syntax::{eval, rho, tau, Assignment, Equation, Term};
use poma_core::varieties::{
    covers_poset, duality_battery, figure4_handles, splitting_battery, theorem42_battery,
    theorem610_battery, variety_of, FIGURE4_EDGES,
};
use poma_core::{FiniteAlgebra, Result};

fn named(n: &str) -> FiniteAlgebra {
    corpus(n, None).expect("corpus")
}

fn forms(list: &[FiniteAlgebra]) -> BTreeSet<CanonicalForm> {
    list.iter().map(canonical_form).collect()
}

type Check = fn() -> Result<(bool, String)>;

fn figure2_catalog() -> Result<(bool, String)> {
    let q = si_quotients(&figure1().algebra, DEFAULT_CON_BUDGET)?;
    let expected: Vec<FiniteAlgebra> = FIGURE2.iter().map(|n| named(n)).collect();
    let ok = q.len() == 11 && forms(&q) == forms(&expected);
    Ok((ok, format!("{} si quotients", q.len())))
}

fn figure1_stages() -> Result<(bool, String)> {
    let r = verify_figure1(6)?;
    let failed: Vec<char> = r
        .stages
        .iter()
        .filter(|s| !s.passed)
        .map(|s| s.stage)
        .collect();
    Ok((
        r.passed() && r.stages.len() == 5,
        format!("{} stages, failed {failed:?}", r.stages.len()),
    ))
}

fn figure4() -> Result<(bool, String)> {
    let hs = figure4_handles()?;
    let edges = covers_poset(&hs);
    let mut expected = FIGURE4_EDGES.to_vec();
    expected.sort();
    let covers_of = |n: &str| {
        let i = hs.iter().position(|h| h.name == n).expect("handle");
        edges.iter().filter(|e| e.0 == i).count()
    };
    let counts = [
        covers_of("V(C2)"),
        covers_of("V(D4)"),
        covers_of("V(D3)"),
        covers_of("V(C3a)"),
        covers_of("V(C3b)"),
    ];
    let ok = edges == expected && counts == [4, 3, 5, 4, 4];
    Ok((
        ok,
        format!(
            "{} covers, upper covers of C2/D4/D3/C3a/C3b = {counts:?}",
            edges.len()
        ),
    ))
}

fn theorem610() -> Result<(bool, String)> {
    let r = theorem610_battery(8)?;
    Ok((r.passed && r.witnesses == ["C2", "D4"], r.summary()))
}

fn splitting() -> Result<(bool, String)> {
    let r = splitting_battery(7, 6)?;
    Ok((r.passed, r.summary()))
}

fn duality() -> Result<(bool, String)> {
    let d = duality_battery(6)?;
    let e = theorem42_battery(6)?;
    Ok((
        d.passed && e.passed,
        format!("{}; {}", d.summary(), e.summary()),
    ))
}

fn examples() -> Result<(bool, String)> {
    let iii = named("EX44III");
    let m = boolean_envelope(&iii)?.algebra;
    let identity_ops = m.size() == 4
        && m.elements()
            .all(|x| m.box_of(x) == x && m.diamond_of(x) == x);
    let iii_ok = identity_ops && !is_well_connected(&m)?;

    let iv = named("EX44IV");
    let iv_ok = !is_fsi(&iv) && is_simple(&boolean_envelope(&iv)?.algebra);

    let ex46 = corpus("EX46", Some(3))?;
    let chain4 = subuniverses(&ex46, DEFAULT_CON_BUDGET)?
        .into_iter()
        .any(|s| {
            let (b, _) = subalgebra_on(&ex46, &s);
            b.size() == 4 && b.is_chain() && !is_simple(&b)
        });
    let cep = has_cep(&ex46, DEFAULT_CON_BUDGET)?;
    let ex46_ok = is_simple(&ex46) && chain4 && !cep.holds;
    Ok((
        iii_ok && iv_ok && ex46_ok,
        format!("EX44III {iii_ok}, EX44IV {iv_ok}, EX46(3) {ex46_ok}"),
    ))
}

fn free_algebras() -> Result<(bool, String)> {
    let d4 = named("D4");
    let f = free_over(std::slice::from_ref(&d4), 1, 1000)?.algebra;
    // chain 0 < a < b < c < 1 is indexed 0..5 once sorted by the order
    let mut chain: Vec<usize> = f.elements().collect();
    chain.sort_by_key(|&x| f.elements().filter(|&y| f.leq(y, x)).count());
    let shape = f.size() == 5 && f.is_chain() && {
        let (a, b, c) = (chain[1], chain[2], chain[3]);
        a == f.box_of(b) && a == f.box_of(c) && c == f.diamond_of(a) && c == f.diamond_of(b)
    };
    let retract = is_retract(&d4, &f)?;

    let c2 = named("C2");
    let mut zero_ok = true;
    for n in FIGURE2.iter().chain(FIGURE3.iter()) {
        zero_ok &= is_iso(&free_zero(&[named(n)])?, &c2);
    }

    let mut growth_ok = true;
    for n in 1..=12 {
        growth_ok &= lemma53_growth(n)?.distinct == n;
    }
    let ok = shape && retract && zero_ok && growth_ok;
    Ok((
        ok,
        format!("5-chain {shape}, retract {retract}, free_zero {zero_ok}, growth {growth_ok}"),
    ))
}

fn completeness() -> Result<(bool, String)> {
    let mut names: Vec<&str> = FIGURE2.iter().chain(FIGURE3.iter()).copied().collect();
    names.push("B2");
    let mut sc = BTreeSet::new();
    let mut consistent = true;
    for n in &names {
        let v = variety_of(&[named(n)])?;
        let (a, b) = (is_sc_pk4(&v)?.status, is_hsc_pk4(&v)?.status);
        consistent &= a == b;
        if a == Status::Yes {
            sc.insert(*n);
        }
    }
    let sc_ok = sc == BTreeSet::from(["B2", "C2", "D4"]) && consistent;

    let mut psc_ok = true;
    for n in 1..=3 {
        // routes disagreeing surface as errors
        psc_ok &= is_psc(&variety_of(&[corpus("AN_MINUS", Some(n))?])?)?.is_yes();
    }
    for n in 2..=3 {
        psc_ok &= is_psc(&variety_of(&[corpus("AN_SIMPLE", Some(n))?])?)?.status == Status::No;
    }

    let handles: Vec<_> = (1..=4)
        .map(|n| variety_of(&[corpus("AN_MINUS", Some(n))?]))
        .collect::<Result<_>>()?;
    let distinct =
        (0..4).all(|i| (i + 1..4).all(|j| !poma_core::varieties::equals(&handles[i], &handles[j])));
    Ok((
        sc_ok && psc_ok && distinct,
        format!("SC/HSC yes on {sc:?}, PSC {psc_ok}, AN_MINUS distinct {distinct}"),
    ))
}

fn random_term(rng: &mut StdRng, depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Term::Zero,
            1 => Term::One,
            2 => Term::var("x"),
            _ => Term::var("y"),
        };
    }
    match rng.gen_range(0..4) {
        0 => Term::bx(random_term(rng, depth - 1)),
        1 => Term::dia(random_term(rng, depth - 1)),
        2 => Term::meet(random_term(rng, depth - 1), random_term(rng, depth - 1)),
        _ => Term::join(random_term(rng, depth - 1), random_term(rng, depth - 1)),
    }
}

fn holds_at(a: &FiniteAlgebra, e: &Equation, asg: &Assignment) -> Result<bool> {
    Ok(eval(a, &e.lhs, asg)? == eval(a, &e.rhs, asg)?)
}

fn oracles() -> Result<(bool, String)> {
    let lattices = enum_bdl(7)?;
    let dl_ok = lattices.iter().all(|l| {
        l.elements()
            .all(|x| l.elements().all(|y| cg_dl(l, x, y) == cg(l, &[(x, y)])))
    });

    let mut k4_ok = true;
    let mut envelopes = 0;
    for a in small_corpus()
        .iter()
        .filter(|a| a.is_pk4() && a.size() <= 16)
    {
        let m = boolean_envelope(a)?.algebra;
        envelopes += 1;
        for x in m.elements() {
            for y in m.elements() {
                k4_ok &= cg_k4(&m, x, y)? == cg(&m, &[(x, y)]);
            }
        }
    }

    let pool: Vec<FiniteAlgebra> = small_corpus()
        .into_iter()
        .filter(|a| a.size() <= 16)
        .collect();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut tr_ok = true;
    for _ in 0..1000 {
        let e = Equation::new(random_term(&mut rng, 4), random_term(&mut rng, 4));
        let a = &pool[rng.gen_range(0..pool.len())];
        let (s, t) = rho(&e);
        let (l, r) = (tau(&s), tau(&t));
        for x in a.elements() {
            for y in a.elements() {
                let asg = Assignment::from([("x".to_string(), x), ("y".to_string(), y)]);
                tr_ok &=
                    holds_at(a, &e, &asg)? == (holds_at(a, &l, &asg)? && holds_at(a, &r, &asg)?);
            }
        }
    }
    let detail = format!(
        "cg_dl on {} lattices {dl_ok}, cg_k4 on {envelopes} envelopes {k4_ok}, tau-rho x1000 {tr_ok}",
        lattices.len()
    );
    Ok((dl_ok && k4_ok && tr_ok, detail))
}

fn main() {
    let criteria: [(&str, Check, Duration); 10] = [
        ("si catalog", figure2_catalog, Duration::from_secs(60)),
        ("one-generated free algebra", figure1_stages, Duration::from_secs(600)),
        ("variety lattice reconstruction", figure4, Duration::from_secs(120)),
        ("endomorphism battery", theorem610, Duration::from_secs(600)),
        ("splitting consistency", splitting, Duration::from_secs(600)),
        ("duality round-trip", duality, Duration::from_secs(300)),
        ("worked examples", examples, Duration::from_secs(60)),
        ("free algebras", free_algebras, Duration::from_secs(120)),
        (
            "completeness classification",
            completeness,
            Duration::from_secs(600),
        ),
        ("oracle equivalences", oracles, Duration::from_secs(300)),
    ];
    let mut failures = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let elapsed = start.elapsed();
        let ok = ok && elapsed <= *limit;
        if !ok {
            failures += 1;
        }
        let mark = if ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {mark} {name} [{:.2?}]: {detail}",
            i + 1,
            elapsed
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
