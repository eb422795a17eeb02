use super::{Equation, ParseError, PosExistSentence, QuasiEquation, Sequent, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Zero,
    One,
    Ident(String),
    Box,
    Dia,
    Meet,
    Join,
    LParen,
    RParen,
    Approx,
    Le,
    Amp,
    Implies,
    LBrace,
    RBrace,
    Comma,
    Turnstile,
    Pipe,
    Dot,
    Exists,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            other => format!("{other:?}"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let rest = &text[pos..];
        let two = |s: &str| rest.starts_with(s);
        let (tok, len) = if two("/\\") {
            (Tok::Meet, 2)
        } else if two("\\/") {
            (Tok::Join, 2)
        } else if two("<=") {
            (Tok::Le, 2)
        } else if two("=>") {
            (Tok::Implies, 2)
        } else if two("|>") {
            (Tok::Turnstile, 2)
        } else {
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                ',' => (Tok::Comma, 1),
                '~' | '≈' => (Tok::Approx, c.len_utf8()),
                '≤' => (Tok::Le, c.len_utf8()),
                '&' => (Tok::Amp, 1),
                '|' => (Tok::Pipe, 1),
                '.' => (Tok::Dot, 1),
                '∧' => (Tok::Meet, c.len_utf8()),
                '∨' => (Tok::Join, c.len_utf8()),
                '□' => (Tok::Box, c.len_utf8()),
                '◇' => (Tok::Dia, c.len_utf8()),
                '⇒' | '→' => (Tok::Implies, c.len_utf8()),
                '▷' => (Tok::Turnstile, c.len_utf8()),
                '∃' => (Tok::Exists, c.len_utf8()),
                c if c.is_ascii_digit() => {
                    let len = rest.chars().take_while(|d| d.is_ascii_digit()).count();
                    match &rest[..len] {
                        "0" => (Tok::Zero, 1),
                        "1" => (Tok::One, 1),
                        other => {
                            return Err(ParseError {
                                position: pos,
                                message: format!("unexpected numeral `{other}`"),
                            })
                        }
                    }
                }
                c if c.is_alphabetic() || c == '_' => {
                    let len: usize = rest
                        .chars()
                        .take_while(|d| d.is_alphanumeric() || *d == '_')
                        .map(char::len_utf8)
                        .sum();
                    let word = &rest[..len];
                    let tok = match word {
                        "box" => Tok::Box,
                        "dia" => Tok::Dia,
                        "E" => Tok::Exists,
                        _ => Tok::Ident(word.to_string()),
                    };
                    (tok, len)
                }
                other => {
                    return Err(ParseError {
                        position: pos,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        out.push((pos, tok));
        for _ in 0..rest[..len].chars().count() {
            it.next();
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text)?,
            at: 0,
            end: text.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, wanted: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.unexpected(wanted)
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at == self.toks.len() {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.meet_term()?;
        while self.eat(&Tok::Join) {
            acc = Term::join(acc, self.meet_term()?);
        }
        Ok(acc)
    }

    fn meet_term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::Meet) {
            acc = Term::meet(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Box) => {
                self.at += 1;
                Ok(Term::bx(self.unary()?))
            }
            Some(Tok::Dia) => {
                self.at += 1;
                Ok(Term::dia(self.unary()?))
            }
            Some(Tok::Zero) => {
                self.at += 1;
                Ok(Term::Zero)
            }
            Some(Tok::One) => {
                self.at += 1;
                Ok(Term::One)
            }
            Some(Tok::Ident(name)) => {
                let t = Term::Var(name.clone());
                self.at += 1;
                Ok(t)
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => self.unexpected("a term"),
        }
    }

    fn equation(&mut self) -> Result<Equation, ParseError> {
        let lhs = self.term()?;
        if self.eat(&Tok::Approx) {
            Ok(Equation::new(lhs, self.term()?))
        } else if self.eat(&Tok::Le) {
            Ok(Equation::le(lhs, self.term()?))
        } else {
            self.unexpected("`~` or `<=`")
        }
    }

    fn quasi(&mut self) -> Result<QuasiEquation, ParseError> {
        let mut eqs = vec![self.equation()?];
        while self.eat(&Tok::Amp) {
            eqs.push(self.equation()?);
        }
        if self.eat(&Tok::Implies) {
            let conclusion = self.equation()?;
            Ok(QuasiEquation::new(eqs, conclusion))
        } else if eqs.len() == 1 {
            Ok(QuasiEquation::new(vec![], eqs.pop().unwrap()))
        } else {
            self.unexpected("`=>`")
        }
    }

    fn sequent(&mut self) -> Result<Sequent, ParseError> {
        self.expect(&Tok::LBrace, "`{`")?;
        let mut ante = Vec::new();
        if !self.eat(&Tok::RBrace) {
            ante.push(self.term()?);
            while self.eat(&Tok::Comma) {
                ante.push(self.term()?);
            }
            self.expect(&Tok::RBrace, "`}`")?;
        }
        self.expect(&Tok::Turnstile, "`|>`")?;
        Ok(Sequent::new(ante, self.term()?))
    }

    fn pos_exist(&mut self) -> Result<PosExistSentence, ParseError> {
        self.expect(&Tok::Exists, "`E`")?;
        let mut vars = Vec::new();
        while let Some(Tok::Ident(name)) = self.peek() {
            vars.push(name.clone());
            self.at += 1;
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::Dot, "`.`")?;
        let start = self.pos();
        let mut matrix = Vec::new();
        loop {
            let mut clause = vec![self.equation()?];
            while self.eat(&Tok::Pipe) {
                clause.push(self.equation()?);
            }
            matrix.push(clause);
            if !self.eat(&Tok::Amp) {
                break;
            }
        }
        PosExistSentence::new(vars, matrix).map_err(|e| ParseError {
            position: start,
            message: e.to_string(),
        })
    }
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// `t ~ s` or `t <= s` (sugar for `t ~ t /\ s`).
pub fn parse_equation(text: &str) -> Result<Equation, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.equation()?;
    p.finish()?;
    Ok(e)
}

/// `e & ... & e => e`, or a bare equation (no premises).
pub fn parse_quasi(text: &str) -> Result<QuasiEquation, ParseError> {
    let mut p = Parser::new(text)?;
    let q = p.quasi()?;
    p.finish()?;
    Ok(q)
}

/// `{t, ..., t} |> t`.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(text)?;
    let s = p.sequent()?;
    p.finish()?;
    Ok(s)
}

/// `E x, y . e | e & e`: `&` separates clauses, `|` separates disjuncts.
pub fn parse_pos_exist(text: &str) -> Result<PosExistSentence, ParseError> {
    let mut p = Parser::new(text)?;
    let s = p.pos_exist()?;
    p.finish()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_cases() {
        assert_eq!(
            parse_term("box(x /\\ dia y)").unwrap(),
            Term::bx(Term::meet(Term::var("x"), Term::dia(Term::var("y"))))
        );
        assert_eq!(parse_term("0").unwrap(), Term::Zero);
        assert_eq!(
            parse_term("a \\/ b /\\ c").unwrap(),
            Term::join(Term::var("a"), Term::meet(Term::var("b"), Term::var("c")))
        );
        assert_eq!(
            parse_term("box x /\\ y").unwrap(),
            Term::meet(Term::bx(Term::var("x")), Term::var("y"))
        );
    }

    #[test]
    fn inequality_sugar() {
        let e = parse_equation("box x /\\ box box x <= x").unwrap();
        let lhs = Term::meet(Term::bx(Term::var("x")), Term::box_pow(Term::var("x"), 2));
        assert_eq!(e.lhs, lhs);
        assert_eq!(e.rhs, Term::meet(lhs, Term::var("x")));
    }

    #[test]
    fn unicode_aliases() {
        assert_eq!(
            parse_equation("□◇x ≈ □x").unwrap(),
            parse_equation("box dia x ~ box x").unwrap()
        );
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_term("x /\\ ").unwrap_err();
        assert_eq!(err.position, 5);
        let err = parse_term("x )").unwrap_err();
        assert_eq!(err.position, 2);
        assert!(parse_term("2").is_err());
        assert!(parse_term("").is_err());
    }

    #[test]
    fn quasi_and_sequents() {
        let q = parse_quasi("x ~ dia x => x ~ 0").unwrap();
        assert_eq!(q.premises.len(), 1);
        assert_eq!(q.to_string(), "x ~ dia x => x ~ 0");
        let q = parse_quasi("x ~ 1").unwrap();
        assert!(q.premises.is_empty());
        let s = parse_sequent("{} |> x").unwrap();
        assert!(s.antecedent.is_empty());
        let s = parse_sequent("{x, box y} |> y").unwrap();
        assert_eq!(parse_sequent(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn pos_exist_round_trip() {
        let s = parse_pos_exist("E x . box x ~ 0 & dia x ~ 1").unwrap();
        assert_eq!(s.variables, vec!["x"]);
        assert_eq!(s.matrix.len(), 2);
        assert_eq!(parse_pos_exist(&s.to_string()).unwrap(), s);
        assert!(parse_pos_exist("E x . y ~ 0").is_err());
    }
}
