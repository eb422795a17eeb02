use std::collections::BTreeMap;

use super::{Equation, PosExistSentence, QuasiEquation, Term};
use crate::algebra::{Elem, FiniteAlgebra};
use crate::{Error, Result};

/// A variable assignment, ordered by variable name.
pub type Assignment = BTreeMap<String, Elem>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Var(usize),
    Zero,
    One,
    Meet,
    Join,
    Box,
    Dia,
}

/// A term flattened to postfix over a fixed variable order, for evaluating
/// the same term under many assignments.
#[derive(Debug, Clone)]
pub struct Compiled {
    ops: Vec<Op>,
}

impl Compiled {
    /// Variables not in `vars` are reported as unassigned.
    pub fn new(t: &Term, vars: &[String]) -> Result<Self> {
        let mut ops = Vec::with_capacity(t.size());
        Self::emit(t, vars, &mut ops)?;
        Ok(Compiled { ops })
    }

    fn emit(t: &Term, vars: &[String], ops: &mut Vec<Op>) -> Result<()> {
        match t {
            Term::Var(v) => {
                let i = vars
                    .iter()
                    .position(|w| w == v)
                    .ok_or_else(|| Error::UnassignedVariable(v.clone()))?;
                ops.push(Op::Var(i));
            }
            Term::Zero => ops.push(Op::Zero),
            Term::One => ops.push(Op::One),
            Term::Meet(a, b) => {
                Self::emit(a, vars, ops)?;
                Self::emit(b, vars, ops)?;
                ops.push(Op::Meet);
            }
            Term::Join(a, b) => {
                Self::emit(a, vars, ops)?;
                Self::emit(b, vars, ops)?;
                ops.push(Op::Join);
            }
            Term::Box(a) => {
                Self::emit(a, vars, ops)?;
                ops.push(Op::Box);
            }
            Term::Diamond(a) => {
                Self::emit(a, vars, ops)?;
                ops.push(Op::Dia);
            }
        }
        Ok(())
    }

    pub fn eval(&self, a: &FiniteAlgebra, values: &[Elem], stack: &mut Vec<Elem>) -> Elem {
        stack.clear();
        for op in &self.ops {
            match *op {
                Op::Var(i) => stack.push(values[i]),
                Op::Zero => stack.push(a.bottom()),
                Op::One => stack.push(a.top()),
                Op::Meet => {
                    let y = stack.pop().unwrap();
                    let x = stack.pop().unwrap();
                    stack.push(a.meet(x, y));
                }
                Op::Join => {
                    let y = stack.pop().unwrap();
                    let x = stack.pop().unwrap();
                    stack.push(a.join(x, y));
                }
                Op::Box => {
                    let x = stack.pop().unwrap();
                    stack.push(a.box_of(x));
                }
                Op::Dia => {
                    let x = stack.pop().unwrap();
                    stack.push(a.diamond_of(x));
                }
            }
        }
        stack.pop().expect("well-formed postfix")
    }

    /// Evaluation in an arbitrary structure given by closures; used for
    /// term functions and frames that are not materialized as tables.
    pub fn eval_with<T: Clone>(
        &self,
        values: &[T],
        zero: &T,
        one: &T,
        meet: &dyn Fn(&T, &T) -> T,
        join: &dyn Fn(&T, &T) -> T,
        bx: &dyn Fn(&T) -> T,
        dia: &dyn Fn(&T) -> T,
    ) -> T {
        let mut stack: Vec<T> = Vec::new();
        for op in &self.ops {
            match *op {
                Op::Var(i) => stack.push(values[i].clone()),
                Op::Zero => stack.push(zero.clone()),
                Op::One => stack.push(one.clone()),
                Op::Meet => {
                    let y = stack.pop().unwrap();
                    let x = stack.pop().unwrap();
                    stack.push(meet(&x, &y));
                }
                Op::Join => {
                    let y = stack.pop().unwrap();
                    let x = stack.pop().unwrap();
                    stack.push(join(&x, &y));
                }
                Op::Box => {
                    let x = stack.pop().unwrap();
                    stack.push(bx(&x));
                }
                Op::Dia => {
                    let x = stack.pop().unwrap();
                    stack.push(dia(&x));
                }
            }
        }
        stack.pop().expect("well-formed postfix")
    }
}

/// Evaluates `t` under `asg`.
pub fn eval(a: &FiniteAlgebra, t: &Term, asg: &Assignment) -> Result<Elem> {
    let vars: Vec<String> = t.vars().into_iter().collect();
    let c = Compiled::new(t, &vars)?;
    let mut values = Vec::with_capacity(vars.len());
    for v in &vars {
        let e = *asg
            .get(v)
            .ok_or_else(|| Error::UnassignedVariable(v.clone()))?;
        a.check_element(e)?;
        values.push(e);
    }
    Ok(c.eval(a, &values, &mut Vec::new()))
}

/// Generic structural evaluation; see [`Compiled::eval_with`].
#[allow(clippy::too_many_arguments)]
pub fn eval_with<T: Clone>(
    t: &Term,
    vars: &[String],
    values: &[T],
    zero: &T,
    one: &T,
    meet: &dyn Fn(&T, &T) -> T,
    join: &dyn Fn(&T, &T) -> T,
    bx: &dyn Fn(&T) -> T,
    dia: &dyn Fn(&T) -> T,
) -> Result<T> {
    Ok(Compiled::new(t, vars)?.eval_with(values, zero, one, meet, join, bx, dia))
}

/// All assignments of `k` variables into `0..size`, lexicographic with the
/// last variable varying fastest.
pub fn assignments(size: usize, k: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = size.checked_pow(k as u32).unwrap_or(usize::MAX);
    let mut cur = vec![0; k];
    let mut emitted = 0usize;
    std::iter::from_fn(move || {
        if emitted >= total || size == 0 {
            return None;
        }
        let out = cur.clone();
        emitted += 1;
        for i in (0..k).rev() {
            cur[i] += 1;
            if cur[i] < size {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    })
}

/// Outcome of an exhaustive check: either it holds, or the first
/// counterexample in search order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Holds {
    Yes,
    No(Assignment),
}

impl Holds {
    pub fn holds(&self) -> bool {
        matches!(self, Holds::Yes)
    }

    pub fn witness(&self) -> Option<&Assignment> {
        match self {
            Holds::Yes => None,
            Holds::No(w) => Some(w),
        }
    }
}

fn to_assignment(vars: &[String], values: &[Elem]) -> Assignment {
    vars.iter().cloned().zip(values.iter().copied()).collect()
}

pub fn holds_eq(a: &FiniteAlgebra, e: &Equation) -> Holds {
    holds_quasi(a, &QuasiEquation::new(vec![], e.clone()))
}

/// Exhaustive over all assignments: a counterexample satisfies every premise
/// and falsifies the conclusion.
pub fn holds_quasi(a: &FiniteAlgebra, q: &QuasiEquation) -> Holds {
    let vars: Vec<String> = q.vars().into_iter().collect();
    let compile = |t: &Term| Compiled::new(t, &vars).expect("variables collected above");
    let premises: Vec<(Compiled, Compiled)> = q
        .premises
        .iter()
        .map(|e| (compile(&e.lhs), compile(&e.rhs)))
        .collect();
    let (cl, cr) = (compile(&q.conclusion.lhs), compile(&q.conclusion.rhs));
    let mut stack = Vec::new();
    for values in assignments(a.size(), vars.len()) {
        let premises_hold = premises
            .iter()
            .all(|(l, r)| l.eval(a, &values, &mut stack) == r.eval(a, &values, &mut stack));
        if premises_hold && cl.eval(a, &values, &mut stack) != cr.eval(a, &values, &mut stack) {
            return Holds::No(to_assignment(&vars, &values));
        }
    }
    Holds::Yes
}

/// The first satisfying assignment of a positive existential sentence.
pub fn pos_exist_witness(a: &FiniteAlgebra, s: &PosExistSentence) -> Option<Assignment> {
    let vars = &s.variables;
    let matrix: Vec<Vec<(Compiled, Compiled)>> = s
        .matrix
        .iter()
        .map(|clause| {
            clause
                .iter()
                .map(|e| {
                    (
                        Compiled::new(&e.lhs, vars).expect("bound variables"),
                        Compiled::new(&e.rhs, vars).expect("bound variables"),
                    )
                })
                .collect()
        })
        .collect();
    let mut stack = Vec::new();
    assignments(a.size(), vars.len())
        .find(|values| {
            matrix.iter().all(|clause| {
                clause
                    .iter()
                    .any(|(l, r)| l.eval(a, values, &mut stack) == r.eval(a, values, &mut stack))
            })
        })
        .map(|values| to_assignment(vars, &values))
}

pub fn holds_pos_exist(a: &FiniteAlgebra, s: &PosExistSentence) -> bool {
    pos_exist_witness(a, s).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::shapes::chain;
    use crate::syntax::{parse_equation, parse_pos_exist, parse_term};

    fn d3() -> FiniteAlgebra {
        chain(3, vec![0, 0, 2], vec![0, 2, 2])
    }

    fn asg(pairs: &[(&str, Elem)]) -> Assignment {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn evaluates_modal_terms() {
        let a = d3();
        assert_eq!(
            eval(&a, &parse_term("dia x").unwrap(), &asg(&[("x", 1)])).unwrap(),
            2
        );
        assert_eq!(
            eval(&a, &parse_term("box x").unwrap(), &asg(&[("x", 1)])).unwrap(),
            0
        );
        for e in a.elements() {
            assert_eq!(
                eval(&a, &parse_term("x /\\ 1").unwrap(), &asg(&[("x", e)])).unwrap(),
                e
            );
        }
    }

    #[test]
    fn unassigned_variable_is_an_error() {
        let err = eval(&d3(), &parse_term("x /\\ y").unwrap(), &asg(&[("x", 0)])).unwrap_err();
        assert_eq!(err, Error::UnassignedVariable("y".into()));
    }

    #[test]
    fn assignment_order_is_lexicographic() {
        let all: Vec<Vec<Elem>> = assignments(2, 2).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(assignments(3, 0).count(), 1);
    }

    #[test]
    fn witness_is_first_counterexample() {
        let e = parse_equation("box x ~ x").unwrap();
        assert_eq!(holds_eq(&d3(), &e), Holds::No(asg(&[("x", 1)])));
    }

    #[test]
    fn pos_exist_in_d3_and_c2() {
        let s = parse_pos_exist("E x . box x ~ 0 & dia x ~ 1").unwrap();
        assert!(holds_pos_exist(&d3(), &s));
        let c2 = chain(2, vec![0, 1], vec![0, 1]);
        assert!(!holds_pos_exist(&c2, &s));
    }
}
