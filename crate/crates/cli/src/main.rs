use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use poma_core::completeness::{
    asc_necessary, classify_quasi, is_hsc_pk4, is_psc, is_sc_pk4, theorem93_battery, QuasiVerdict,
    Status, Verdict,
};
use poma_core::congruence::{
    cg, con_lattice, is_si, is_simple, is_well_connected, monolith, DEFAULT_CON_BUDGET,
};
use poma_core::constructions::{
    boolean_envelope, dual_space, dual_space_dot, hasse_dot, hs_si, identify, powerset_algebra,
};
use poma_core::corpus::{corpus_spec, trivial};
use poma_core::enumerate::{enum_algebras_cached, EnumerationTask};
use poma_core::free::{free_over, free_zero, verify_figure1, DEFAULT_FREE_BUDGET};
use poma_core::syntax::{
    eval, holds_eq, parse_equation, parse_quasi, parse_sequent, parse_term, rho, tau, Assignment,
    QuasiEquation,
};
use poma_core::varieties::{
    covers_poset, equals, fact52_battery, figure4_handles, includes, lemma92_battery, poset_report,
    splitting_c3a, splitting_c3b, splitting_d3, theorem42_battery, theorem610_battery, variety_dot,
    variety_of, BatteryReport, VarietyHandle,
};
use poma_core::{Error, FiniteAlgebra, Kind};

/// Workbench for finite positive modal algebras.
#[derive(Parser)]
#[command(name = "poma", version)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Graphviz output where a graph makes sense.
    #[arg(long, global = true)]
    dot: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Input {
    /// Corpus name (case-insensitive, `NAME:n` for parameters).
    #[arg(long)]
    name: Option<String>,
    /// Algebra in the JSON interchange format.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Generators {
    /// Generators, as corpus names; repeat or separate with commas.
    #[arg(long = "name", value_delimiter = ',', required_unless_present = "file")]
    names: Vec<String>,
    /// Generators from JSON files.
    #[arg(long)]
    file: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the lattice and modal axioms.
    Validate(Input),
    /// Print an algebra.
    Show(Input),
    /// Principal (or finitely generated) congruence of element pairs `a,b`.
    Cg {
        #[command(flatten)]
        input: Input,
        #[arg(required = true)]
        pairs: Vec<String>,
    },
    /// Congruence lattice.
    Conlat(Input),
    /// Subdirect irreducibility and the monolith.
    Si(Input),
    Simple(Input),
    /// Well-connectedness of a positive S4-algebra.
    Wc(Input),
    /// Subdirectly irreducible members of HS(A), up to isomorphism.
    Hs(Input),
    /// Dual space of prime filters.
    Dual(Input),
    /// Boolean modal envelope.
    Envelope(Input),
    /// Complex algebra of a finite frame given as successor lists in JSON.
    Complex {
        #[arg(long)]
        file: PathBuf,
    },
    /// Free algebra of a finitely generated variety.
    Free {
        #[command(flatten)]
        gens: Generators,
        #[arg(long, default_value_t = 1)]
        free_rank: usize,
    },
    /// Free 0-generated algebra.
    Freezero {
        #[command(flatten)]
        gens: Generators,
    },
    /// Checks on the one-generated free positive S4-algebra.
    #[command(name = "figure1-verify")]
    Figure1Verify {
        #[arg(long, default_value_t = 6)]
        max_size: usize,
    },
    /// Enumerate algebras up to isomorphism.
    Enumerate {
        #[arg(long, default_value = "PS4")]
        kind: Kind,
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        si: bool,
        #[arg(long)]
        fsi: bool,
        /// Keep only algebras satisfying these equations.
        #[arg(long = "equation")]
        equations: Vec<String>,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        resume: bool,
    },
    #[command(subcommand)]
    Variety(VarietyCommand),
    /// Splitting equations against HS membership.
    Split(Input),
    #[command(subcommand)]
    Battery(BatteryCommand),
    #[command(subcommand)]
    Complete(CompleteCommand),
    #[command(subcommand)]
    Quasi(QuasiCommand),
    /// Evaluate a term, or check an equation, in an algebra.
    Eval {
        #[command(flatten)]
        input: Input,
        expr: String,
        /// Assignments `var=element`.
        assign: Vec<String>,
    },
    #[command(subcommand)]
    Translate(TranslateCommand),
}

#[derive(Subcommand)]
enum VarietyCommand {
    /// Is V(inner) contained in V(outer)?
    Include {
        #[arg(long, value_delimiter = ',', required = true)]
        outer: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        inner: Vec<String>,
    },
    /// Hasse diagram of the inclusion order among handles (comma-separated generators).
    Covers {
        #[arg(required = true)]
        handles: Vec<String>,
    },
    /// The varieties at the bottom of the lattice.
    Figure4,
}

#[derive(Args)]
struct Bound {
    #[arg(long, default_value_t = 6)]
    max_size: usize,
}

#[derive(Subcommand)]
enum BatteryCommand {
    Thm610(Bound),
    Lemma92(Bound),
    Thm42(Bound),
    Fact52(Bound),
}

#[derive(Subcommand)]
enum CompleteCommand {
    Sc(Generators),
    Hsc(Generators),
    Psc(Generators),
    Asc(Generators),
    Thm93 {
        #[command(flatten)]
        gens: Generators,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum QuasiCommand {
    /// Validity, activity and bounded admissibility.
    Classify {
        #[command(flatten)]
        gens: Generators,
        quasi: String,
        #[arg(long, default_value_t = 2)]
        free_rank: usize,
    },
    /// Bounded admissibility only.
    Admissible {
        #[command(flatten)]
        gens: Generators,
        quasi: String,
        #[arg(long, default_value_t = 2)]
        free_rank: usize,
    },
}

#[derive(Subcommand)]
enum TranslateCommand {
    /// Sequent to equation.
    Tau { sequent: String },
    /// Equation to sequents.
    Rho { equation: String },
}

/// Outcome of a command: exit status and what to print.
struct Outcome {
    pass: bool,
    text: String,
    json: serde_json::Value,
}

impl Outcome {
    fn new(pass: bool, text: impl Into<String>, json: serde_json::Value) -> Self {
        Outcome {
            pass,
            text: text.into(),
            json,
        }
    }
}

fn load_named(name: &str) -> poma_core::Result<FiniteAlgebra> {
    if name.eq_ignore_ascii_case("trivial") {
        Ok(trivial())
    } else {
        corpus_spec(name)
    }
}

fn load_file(path: &PathBuf) -> poma_core::Result<FiniteAlgebra> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    FiniteAlgebra::from_json(&text)
}

fn load(input: &Input) -> poma_core::Result<FiniteAlgebra> {
    match (&input.name, &input.file) {
        (Some(n), None) => load_named(n),
        (None, Some(f)) => load_file(f),
        _ => Err(Error::Precondition(
            "give exactly one of --name and --file".into(),
        )),
    }
}

fn load_gens(g: &Generators) -> poma_core::Result<Vec<FiniteAlgebra>> {
    let mut out: Vec<FiniteAlgebra> = g
        .names
        .iter()
        .map(|n| load_named(n))
        .collect::<poma_core::Result<_>>()?;
    for f in &g.file {
        out.push(load_file(f)?);
    }
    Ok(out)
}

fn handle(gens: &Generators) -> poma_core::Result<VarietyHandle> {
    variety_of(&load_gens(gens)?)
}

fn handle_of(names: &[String]) -> poma_core::Result<VarietyHandle> {
    let gens: Vec<FiniteAlgebra> = names
        .iter()
        .map(|n| load_named(n.trim()))
        .collect::<poma_core::Result<_>>()?;
    variety_of(&gens)
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn algebra_json(a: &FiniteAlgebra) -> serde_json::Value {
    serde_json::from_str(&a.to_json()).expect("algebra JSON")
}

fn names_of(list: &[FiniteAlgebra]) -> Vec<String> {
    list.iter().map(FiniteAlgebra::label).collect()
}

fn table(a: &FiniteAlgebra) -> String {
    let mut s = format!("{} ({} elements)\n", a.label(), a.size());
    if let Some(n) = identify(a).filter(|n| Some(*n) != a.name()) {
        s.push_str(&format!("isomorphic to {n}\n"));
    }
    s.push_str("covers:");
    for (x, y) in a.covers() {
        s.push_str(&format!(" {x}<{y}"));
    }
    s.push_str("\nbox:");
    for x in a.elements() {
        s.push_str(&format!(" {}", a.box_of(x)));
    }
    s.push_str("\ndia:");
    for x in a.elements() {
        s.push_str(&format!(" {}", a.diamond_of(x)));
    }
    s
}

fn battery(r: BatteryReport) -> Outcome {
    Outcome::new(r.passed, r.summary(), to_json(&r))
}

fn verdict(v: Verdict) -> Outcome {
    let mut text = v.summary();
    for e in &v.evidence {
        text.push_str(&format!("\n  {e}"));
    }
    Outcome::new(v.status == Status::Yes, text, to_json(&v))
}

fn parse_pair(s: &str) -> poma_core::Result<(usize, usize)> {
    let bad = || Error::Precondition(format!("expected a pair `a,b`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// A quasi-equation, or an equation (optionally written `=> e`) with no premises.
fn quasi_or_equation(text: &str) -> poma_core::Result<QuasiEquation> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("=>") {
        return Ok(QuasiEquation::new(vec![], parse_equation(rest)?));
    }
    if !t.contains("=>") {
        return Ok(QuasiEquation::new(vec![], parse_equation(t)?));
    }
    Ok(parse_quasi(t)?)
}

fn run(cli: &Cli) -> poma_core::Result<Outcome> {
    Ok(match &cli.command {
        Command::Validate(input) => {
            let a = load(input)?;
            let r = a.validate();
            let mut text = format!(
                "lattice: {}\ndistributive: {}\nPMA: {}\nPK4: {}\nPS4: {}",
                r.is_bounded_lattice, r.is_distributive, r.is_pma, r.is_pk4, r.is_ps4
            );
            for v in &r.violations {
                text.push_str(&format!("\nviolated {} at {:?}", v.axiom, v.witness));
            }
            Outcome::new(r.is_pma, text, to_json(&r))
        }
        Command::Show(input) => {
            let a = load(input)?;
            let text = if cli.dot { hasse_dot(&a) } else { table(&a) };
            Outcome::new(true, text, algebra_json(&a))
        }
        Command::Cg { input, pairs } => {
            let a = load(input)?;
            let pairs: Vec<(usize, usize)> = pairs
                .iter()
                .map(|p| parse_pair(p))
                .collect::<poma_core::Result<_>>()?;
            for &(x, y) in &pairs {
                a.check_element(x)?;
                a.check_element(y)?;
            }
            let p = cg(&a, &pairs);
            Outcome::new(true, p.to_string(), to_json(&p))
        }
        Command::Conlat(input) => {
            let a = load(input)?;
            let con = con_lattice(&a, DEFAULT_CON_BUDGET)?;
            let text = con
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            Outcome::new(
                true,
                format!("{} congruences\n{text}", con.len()),
                to_json(&con),
            )
        }
        Command::Si(input) => {
            let a = load(input)?;
            let si = is_si(&a);
            let mono = if si { Some(monolith(&a)?) } else { None };
            let text = match &mono {
                Some(m) => format!("si: true\nmonolith: {m}"),
                None => "si: false".into(),
            };
            Outcome::new(si, text, json!({"si": si, "monolith": mono}))
        }
        Command::Simple(input) => {
            let s = is_simple(&load(input)?);
            Outcome::new(s, format!("simple: {s}"), json!({ "simple": s }))
        }
        Command::Wc(input) => {
            let w = is_well_connected(&load(input)?)?;
            Outcome::new(
                w,
                format!("well-connected: {w}"),
                json!({ "well_connected": w }),
            )
        }
        Command::Hs(input) => {
            let list = hs_si(&load(input)?, DEFAULT_CON_BUDGET)?;
            let names = names_of(&list);
            Outcome::new(
                true,
                format!("{{{}}}", names.join(", ")),
                json!({ "si": names }),
            )
        }
        Command::Dual(input) => {
            let x = dual_space(&load(input)?)?;
            let text = if cli.dot {
                dual_space_dot(&x)
            } else {
                format!("{} points\nR: {:?}", x.len(), x.r)
            };
            Outcome::new(true, text, to_json(&x))
        }
        Command::Envelope(input) => {
            let e = boolean_envelope(&load(input)?)?;
            let text = if cli.dot {
                hasse_dot(&e.algebra)
            } else {
                table(&e.algebra)
            };
            let j = json!({
                "algebra": algebra_json(&e.algebra),
                "complement": e.complement,
                "kappa": e.kappa.map,
            });
            Outcome::new(true, text, j)
        }
        Command::Complex { file } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
            let succ: Vec<Vec<usize>> = serde_json::from_str(&text)
                .map_err(|e| Error::Precondition(format!("successor lists: {e}")))?;
            let a = powerset_algebra(&succ)?;
            let out = if cli.dot { hasse_dot(&a) } else { table(&a) };
            Outcome::new(true, out, algebra_json(&a))
        }
        Command::Free { gens, free_rank } => {
            let f = free_over(&load_gens(gens)?, *free_rank, DEFAULT_FREE_BUDGET)?;
            let text = if cli.dot {
                hasse_dot(&f.algebra)
            } else {
                format!("{}\ngenerators: {:?}", table(&f.algebra), f.generators)
            };
            let j: serde_json::Value =
                serde_json::from_str(&f.to_json()).expect("free algebra JSON");
            Outcome::new(true, text, j)
        }
        Command::Freezero { gens } => {
            let a = free_zero(&load_gens(gens)?)?;
            let text = if cli.dot { hasse_dot(&a) } else { table(&a) };
            Outcome::new(true, text, algebra_json(&a))
        }
        Command::Figure1Verify { max_size } => {
            let r = verify_figure1(*max_size)?;
            let mut text = format!("bound {}\n", r.enumeration_bound);
            for s in &r.stages {
                let mark = if s.passed { "pass" } else { "FAIL" };
                text.push_str(&format!("({}) {}: {mark}: {}\n", s.stage, s.name, s.detail));
            }
            Outcome::new(r.passed(), text.trim_end(), to_json(&r))
        }
        Command::Enumerate {
            kind,
            max_size,
            si,
            fsi,
            equations,
            cache,
            resume,
        } => {
            let mut task = EnumerationTask::new(*max_size, *kind);
            if *si {
                task = task.si();
            }
            if *fsi {
                task = task.fsi();
            }
            let eqs = equations
                .iter()
                .map(|e| parse_equation(e))
                .collect::<Result<Vec<_>, _>>()?;
            task = task.satisfying(eqs);
            let cache = cache
                .clone()
                .or_else(|| std::env::var_os("POMA_CACHE").map(PathBuf::from));
            let found = enum_algebras_cached(&task, cache.as_deref(), *resume)?;
            let mut counts = vec![0usize; max_size + 1];
            for a in &found {
                counts[a.size()] += 1;
            }
            let mut text = format!("{kind} up to {max_size}: {} algebras\n", found.len());
            for (n, c) in counts.iter().enumerate().skip(1) {
                text.push_str(&format!("size {n}: {c}\n"));
            }
            let j = json!({
                "kind": kind.to_string(),
                "bound": max_size,
                "counts": &counts[1..],
                "algebras": found.iter().map(algebra_json).collect::<Vec<_>>(),
            });
            Outcome::new(true, text.trim_end(), j)
        }
        Command::Variety(cmd) => match cmd {
            VarietyCommand::Include { outer, inner } => {
                let (v, w) = (handle_of(outer)?, handle_of(inner)?);
                let inc = includes(&v, &w);
                let text = format!("{} <= {}: {inc}", w.name, v.name);
                Outcome::new(inc, text, json!({"included": inc, "equal": equals(&v, &w)}))
            }
            VarietyCommand::Covers { handles } => {
                let hs: Vec<VarietyHandle> = handles
                    .iter()
                    .map(|h| handle_of(&h.split(',').map(str::to_string).collect::<Vec<_>>()))
                    .collect::<poma_core::Result<_>>()?;
                let text = if cli.dot {
                    variety_dot(&hs)
                } else {
                    covers_poset(&hs)
                        .iter()
                        .map(|&(i, j)| format!("{} < {}", hs[i].name, hs[j].name))
                        .collect::<Vec<_>>()
                        .join("\n")
                };
                Outcome::new(true, text, to_json(&poset_report(&hs)))
            }
            VarietyCommand::Figure4 => {
                let hs = figure4_handles()?;
                let report = poset_report(&hs);
                let pass = report.batteries.values().all(|&b| b);
                let text = if cli.dot {
                    variety_dot(&hs)
                } else {
                    let mut t: Vec<String> = report
                        .edges
                        .iter()
                        .map(|&(i, j)| format!("{} < {}", hs[i].name, hs[j].name))
                        .collect();
                    t.push(format!(
                        "{} covers, matches expected: {pass}",
                        report.edges.len()
                    ));
                    t.join("\n")
                };
                Outcome::new(pass, text, to_json(&report))
            }
        },
        Command::Split(input) => {
            let a = load(input)?;
            let mut rows = serde_json::Map::new();
            let mut lines = Vec::new();
            let mut ok = true;
            let checks: [(&str, fn(&FiniteAlgebra) -> poma_core::Result<_>); 3] = [
                ("C3a", splitting_c3a),
                ("C3b", splitting_c3b),
                ("D3", splitting_d3),
            ];
            for (n, f) in checks {
                if let Ok(v) = f(&a) {
                    ok &= v.consistent();
                    lines.push(format!(
                        "{n}: equation {} / excluded {} / consistent {}",
                        v.satisfies_equation,
                        v.excludes_algebra,
                        v.consistent()
                    ));
                    rows.insert(n.into(), to_json(&v));
                }
            }
            if lines.is_empty() {
                return Err(Error::Precondition(
                    "splitting checks need a PK4 algebra".into(),
                ));
            }
            Outcome::new(ok, lines.join("\n"), serde_json::Value::Object(rows))
        }
        Command::Battery(cmd) => battery(match cmd {
            BatteryCommand::Thm610(b) => theorem610_battery(b.max_size)?,
            BatteryCommand::Lemma92(b) => lemma92_battery(b.max_size)?,
            BatteryCommand::Thm42(b) => theorem42_battery(b.max_size)?,
            BatteryCommand::Fact52(b) => fact52_battery(b.max_size)?,
        }),
        Command::Complete(cmd) => match cmd {
            CompleteCommand::Sc(g) => verdict(is_sc_pk4(&handle(g)?)?),
            CompleteCommand::Hsc(g) => verdict(is_hsc_pk4(&handle(g)?)?),
            CompleteCommand::Psc(g) => verdict(is_psc(&handle(g)?)?),
            CompleteCommand::Asc(g) => verdict(asc_necessary(&handle(g)?)?),
            CompleteCommand::Thm93 { gens, depth } => {
                let r = theorem93_battery(&handle(gens)?, *depth)?;
                let text = if r.b2_branch {
                    "V(B2) branch".to_string()
                } else {
                    format!("bound {depth}: {}", r.verdict.summary())
                };
                Outcome::new(r.verdict.status == Status::Yes, text, to_json(&r))
            }
        },
        Command::Quasi(cmd) => {
            let (gens, quasi, rank, admissible_only) = match cmd {
                QuasiCommand::Classify {
                    gens,
                    quasi,
                    free_rank,
                } => (gens, quasi, *free_rank, false),
                QuasiCommand::Admissible {
                    gens,
                    quasi,
                    free_rank,
                } => (gens, quasi, *free_rank, true),
            };
            let q = quasi_or_equation(quasi)?;
            let r = classify_quasi(&handle(gens)?, &q, rank)?;
            let refuted = matches!(r.verdict, QuasiVerdict::RefutedAdmissibilityAt { .. });
            let text = match &r.verdict {
                QuasiVerdict::Valid => "valid".to_string(),
                QuasiVerdict::ActiveWitness { rank, assignment } => {
                    format!("valid; active, unifier in F({rank}): {assignment:?}")
                }
                QuasiVerdict::PassiveUpTo { bound } => {
                    format!("passive up to rank {bound} (valid: {})", r.valid)
                }
                QuasiVerdict::AdmissibleUpTo { bound, .. } => {
                    format!("not valid; admissible up to rank {bound}")
                }
                QuasiVerdict::RefutedAdmissibilityAt { rank, assignment } => {
                    format!("not admissible: fails in F({rank}) at {assignment:?}")
                }
            };
            let pass = if admissible_only { !refuted } else { r.valid };
            Outcome::new(pass, text, to_json(&r))
        }
        Command::Eval {
            input,
            expr,
            assign,
        } => {
            let a = load(input)?;
            let mut asg = Assignment::new();
            for s in assign {
                let (k, v) = s.split_once('=').ok_or_else(|| {
                    Error::Precondition(format!("expected `var=element`, got `{s}`"))
                })?;
                let v: usize = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Precondition(format!("bad element `{v}`")))?;
                a.check_element(v)?;
                asg.insert(k.trim().to_string(), v);
            }
            if expr.contains('~') || expr.contains("<=") {
                let e = parse_equation(expr)?;
                let h = holds_eq(&a, &e);
                let text = match h.witness() {
                    None => "holds".to_string(),
                    Some(w) => format!("fails at {w:?}"),
                };
                Outcome::new(
                    h.holds(),
                    text,
                    json!({"holds": h.holds(), "witness": h.witness()}),
                )
            } else {
                let v = eval(&a, &parse_term(expr)?, &asg)?;
                Outcome::new(true, v.to_string(), json!({ "value": v }))
            }
        }
        Command::Translate(cmd) => match cmd {
            TranslateCommand::Tau { sequent } => {
                let e = tau(&parse_sequent(sequent)?);
                Outcome::new(true, e.to_string(), json!({ "equation": e.to_string() }))
            }
            TranslateCommand::Rho { equation } => {
                let (s, t) = rho(&parse_equation(equation)?);
                Outcome::new(
                    true,
                    format!("{s}\n{t}"),
                    json!({ "sequents": [s.to_string(), t.to_string()] }),
                )
            }
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("JSON value")
                );
            } else {
                println!("{}", out.text);
            }
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_budget() { 3 } else { 2 })
        }
    }
}
