//! Terms, equations, quasi-equations, positive existential sentences and
//! sequents of the positive modal language.
//!
//! Printing always produces the canonical ASCII form accepted by the parser,
//! with the minimum number of parentheses.

mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eval::{
    assignments, eval, eval_with, holds_eq, holds_pos_exist, holds_quasi, pos_exist_witness,
    Assignment, Compiled, Holds,
};
pub use parse::{parse_equation, parse_pos_exist, parse_quasi, parse_sequent, parse_term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at offset {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(String),
    Zero,
    One,
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Box(Box<Term>),
    Diamond(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    pub fn bx(a: Term) -> Term {
        Term::Box(Box::new(a))
    }

    pub fn dia(a: Term) -> Term {
        Term::Diamond(Box::new(a))
    }

    /// `box^n t`.
    pub fn box_pow(t: Term, n: usize) -> Term {
        (0..n).fold(t, |acc, _| Term::bx(acc))
    }

    /// `dia^n t`.
    pub fn dia_pow(t: Term, n: usize) -> Term {
        (0..n).fold(t, |acc, _| Term::dia(acc))
    }

    /// Left-associated meet; the empty meet is `1`.
    pub fn meet_all<I: IntoIterator<Item = Term>>(terms: I) -> Term {
        let mut it = terms.into_iter();
        match it.next() {
            None => Term::One,
            Some(first) => it.fold(first, Term::meet),
        }
    }

    /// Left-associated join; the empty join is `0`.
    pub fn join_all<I: IntoIterator<Item = Term>>(terms: I) -> Term {
        let mut it = terms.into_iter();
        match it.next() {
            None => Term::Zero,
            Some(first) => it.fold(first, Term::join),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Zero | Term::One => {}
            Term::Meet(a, b) | Term::Join(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::Box(a) | Term::Diamond(a) => a.collect_vars(out),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero | Term::One => 0,
            Term::Meet(a, b) | Term::Join(a, b) => 1 + a.depth().max(b.depth()),
            Term::Box(a) | Term::Diamond(a) => 1 + a.depth(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero | Term::One => 1,
            Term::Meet(a, b) | Term::Join(a, b) => 1 + a.size() + b.size(),
            Term::Box(a) | Term::Diamond(a) => 1 + a.size(),
        }
    }

    /// Replaces every variable by the image under `f`.
    pub fn substitute(&self, f: &dyn Fn(&str) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::Zero => Term::Zero,
            Term::One => Term::One,
            Term::Meet(a, b) => Term::meet(a.substitute(f), b.substitute(f)),
            Term::Join(a, b) => Term::join(a.substitute(f), b.substitute(f)),
            Term::Box(a) => Term::bx(a.substitute(f)),
            Term::Diamond(a) => Term::dia(a.substitute(f)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::Join(..) => 0,
            Term::Meet(..) => 1,
            Term::Box(_) | Term::Diamond(_) => 2,
            _ => 3,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Term::Var(v) => f.write_str(v)?,
            Term::Zero => f.write_str("0")?,
            Term::One => f.write_str("1")?,
            // Left associative: the right operand must bind strictly tighter.
            Term::Join(a, b) => {
                a.fmt_prec(f, 0)?;
                f.write_str(" \\/ ")?;
                b.fmt_prec(f, 1)?;
            }
            Term::Meet(a, b) => {
                a.fmt_prec(f, 1)?;
                f.write_str(" /\\ ")?;
                b.fmt_prec(f, 2)?;
            }
            Term::Box(a) => {
                f.write_str("box ")?;
                a.fmt_prec(f, 2)?;
            }
            Term::Diamond(a) => {
                f.write_str("dia ")?;
                a.fmt_prec(f, 2)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// `lhs ~ rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    /// `a <= b`, stored as `a ~ a /\ b`.
    pub fn le(a: Term, b: Term) -> Self {
        Equation {
            lhs: a.clone(),
            rhs: Term::meet(a, b),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }

    /// The two-sided swap, used to compare equations modulo symmetry.
    pub fn flipped(&self) -> Self {
        Equation::new(self.rhs.clone(), self.lhs.clone())
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ~ {}", self.lhs, self.rhs)
    }
}

/// `e1 & ... & en => e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuasiEquation {
    pub premises: Vec<Equation>,
    pub conclusion: Equation,
}

impl QuasiEquation {
    pub fn new(premises: Vec<Equation>, conclusion: Equation) -> Self {
        QuasiEquation {
            premises,
            conclusion,
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.conclusion.vars();
        for p in &self.premises {
            v.extend(p.vars());
        }
        v
    }
}

impl fmt::Display for QuasiEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{p}")?;
        }
        if !self.premises.is_empty() {
            f.write_str(" => ")?;
        }
        write!(f, "{}", self.conclusion)
    }
}

/// `E x, y . clause & clause`, each clause a disjunction `e | e`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PosExistSentence {
    pub variables: Vec<String>,
    pub matrix: Vec<Vec<Equation>>,
}

impl PosExistSentence {
    /// Fails when a matrix variable is not bound.
    pub fn new(variables: Vec<String>, matrix: Vec<Vec<Equation>>) -> crate::Result<Self> {
        let bound: BTreeSet<&String> = variables.iter().collect();
        for clause in &matrix {
            for e in clause {
                if let Some(free) = e.vars().iter().find(|v| !bound.contains(v)) {
                    return Err(crate::Error::UnassignedVariable(free.clone()));
                }
            }
        }
        Ok(PosExistSentence { variables, matrix })
    }
}

impl fmt::Display for PosExistSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E {} . ", self.variables.join(", "))?;
        for (i, clause) in self.matrix.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            for (j, e) in clause.iter().enumerate() {
                if j > 0 {
                    f.write_str(" | ")?;
                }
                write!(f, "{e}")?;
            }
        }
        Ok(())
    }
}

/// `{g1, ..., gn} |> phi`. The antecedent is a set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Sequent {
    pub antecedent: BTreeSet<Term>,
    pub succedent: Term,
}

impl Sequent {
    pub fn new<I: IntoIterator<Item = Term>>(antecedent: I, succedent: Term) -> Self {
        Sequent {
            antecedent: antecedent.into_iter().collect(),
            succedent,
        }
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.antecedent.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}} |> {}", self.succedent)
    }
}

/// Sequent to equation: the meet of the antecedent is below the succedent.
pub fn tau(s: &Sequent) -> Equation {
    Equation::le(
        Term::meet_all(s.antecedent.iter().cloned()),
        s.succedent.clone(),
    )
}

/// Equation to the pair of sequents `lhs |> rhs`, `rhs |> lhs`.
pub fn rho(e: &Equation) -> (Sequent, Sequent) {
    (
        Sequent::new([e.lhs.clone()], e.rhs.clone()),
        Sequent::new([e.rhs.clone()], e.lhs.clone()),
    )
}
