use thiserror::Error;

use super::{is_lower_ident, Atom, Formula, Literal, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("FOF syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Bang,
    LBracket,
    RBracket,
    Colon,
    LParen,
    RParen,
    Implies,
    Tilde,
    Amp,
    Equals,
    Lower(String),
    Upper(String),
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = input.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'!' => Tok::Bang,
            b'[' => Tok::LBracket,
            b']' => Tok::RBracket,
            b':' => Tok::Colon,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'~' => Tok::Tilde,
            b'&' => Tok::Amp,
            b'=' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((i, Tok::Implies));
                i += 2;
                continue;
            }
            b'=' => Tok::Equals,
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = input[start..i].to_string();
                let tok = if c.is_ascii_uppercase() {
                    Tok::Upper(word)
                } else {
                    Tok::Lower(word)
                };
                out.push((start, tok));
                continue;
            }
            _ => {
                let ch = input[i..].chars().next().unwrap_or('?');
                return Err(ParseError::new(i, format!("unexpected character `{ch}`")));
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

/// Propositional structure before it is checked against the fragment.
#[derive(Debug)]
enum Expr {
    Lit(usize, Literal),
    Not(usize, Box<Expr>),
    And(usize, Vec<Expr>),
    Implies(usize, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn offset(&self) -> usize {
        match self {
            Expr::Lit(o, _) | Expr::Not(o, _) | Expr::And(o, _) | Expr::Implies(o, _, _) => *o,
        }
    }

    fn into_literal(self) -> Result<Literal, ParseError> {
        match self {
            Expr::Lit(_, l) => Ok(l),
            Expr::Not(_, inner) => inner.into_literal().map(|l| l.negated()),
            other => Err(ParseError::new(other.offset(), "expected a literal")),
        }
    }

    fn into_conjuncts(self, out: &mut Vec<Literal>) -> Result<(), ParseError> {
        match self {
            Expr::And(_, parts) => {
                for p in parts {
                    p.into_conjuncts(out)?;
                }
                Ok(())
            }
            other => {
                out.push(other.into_literal()?);
                Ok(())
            }
        }
    }
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(ParseError::new(at, format!("expected {what}, found {t:?}"))),
            None => Err(ParseError::new(
                at,
                format!("expected {what}, found end of input"),
            )),
        }
    }

    fn implication(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        let lhs = self.conjunction()?;
        if self.peek() == Some(&Tok::Implies) {
            self.bump();
            let rhs = self.conjunction()?;
            return Ok(Expr::Implies(at, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        let first = self.unary()?;
        if self.peek() != Some(&Tok::Amp) {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Expr::And(at, parts))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(Expr::Not(at, Box::new(self.unary()?)))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.implication()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Bang) => Err(ParseError::new(at, "nested quantifiers are not supported")),
            Some(Tok::Lower(_))
                if self.toks.get(self.pos + 1).map(|(_, t)| t) == Some(&Tok::LParen) =>
            {
                let Some(Tok::Lower(pred)) = self.bump() else {
                    unreachable!()
                };
                self.bump();
                let arg = self.term()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(ParseError::new(
                        self.offset(),
                        "only unary predicates are supported",
                    ));
                }
                self.bump();
                Ok(Expr::Lit(at, Literal::pos(Atom::pred(pred, arg))))
            }
            Some(Tok::Lower(_)) | Some(Tok::Upper(_)) => {
                let left = self.term()?;
                self.expect(Tok::Equals, "`=` or `(`")?;
                let right = self.term()?;
                Ok(Expr::Lit(at, Literal::pos(Atom::eq(left, right))))
            }
            Some(t) => Err(ParseError::new(at, format!("unexpected {t:?}"))),
            None => Err(ParseError::new(at, "unexpected end of input")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Lower(n)) => Ok(Term::Const(n)),
            Some(Tok::Upper(n)) => Ok(Term::Var(n)),
            Some(t) => Err(ParseError::new(at, format!("expected a term, found {t:?}"))),
            None => Err(ParseError::new(at, "expected a term, found end of input")),
        }
    }
}

/// Scope and shape checks that need source offsets.
fn check_literal(lit: &Literal, bound: Option<&str>, at: usize) -> Result<(), ParseError> {
    for t in lit.atom.terms() {
        if let Term::Var(v) = t {
            match bound {
                None => return Err(ParseError::new(at, format!("unbound variable `{v}`"))),
                Some(b) if b != v => {
                    return Err(ParseError::new(
                        at,
                        format!("variable `{v}` is not bound (bound variable is `{b}`)"),
                    ))
                }
                _ => {}
            }
        }
    }
    if let Atom::Eq { left, right } = &lit.atom {
        if !left.is_var() || right.is_var() {
            return Err(ParseError::new(
                at,
                format!(
                    "equality `{}` must relate the bound variable to a constant",
                    lit.atom
                ),
            ));
        }
    }
    if let Some(p) = lit.predicate() {
        if !is_lower_ident(p) {
            return Err(ParseError::new(at, format!("bad predicate name `{p}`")));
        }
    }
    Ok(())
}

/// Parse one formula of the supported TPTP FOF subset.
///
/// Accepts the printed form plus harmless variations: missing spaces,
/// missing outer parentheses around the quantified body, and `tom = X`
/// orientation of equalities.
pub fn parse_fof_text(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let quantified = if p.peek() == Some(&Tok::Bang) {
        p.bump();
        p.expect(Tok::LBracket, "`[`")?;
        let at = p.offset();
        let var = match p.bump() {
            Some(Tok::Upper(v)) => v,
            _ => return Err(ParseError::new(at, "expected a variable")),
        };
        if p.peek() != Some(&Tok::RBracket) {
            return Err(ParseError::new(
                p.offset(),
                "only one bound variable is supported",
            ));
        }
        p.bump();
        p.expect(Tok::Colon, "`:`")?;
        Some(var)
    } else {
        None
    };
    let body = p.implication()?;
    if p.pos < toks.len() {
        return Err(ParseError::new(p.offset(), "trailing input"));
    }

    let formula = match (quantified, body) {
        (Some(var), Expr::Implies(_, lhs, rhs)) => {
            let ante_at = lhs.offset();
            let cons_at = rhs.offset();
            let mut antecedent = Vec::new();
            lhs.into_conjuncts(&mut antecedent)?;
            let consequent = rhs.into_literal()?;
            for l in &antecedent {
                check_literal(l, Some(&var), ante_at)?;
                if l.is_equality() && !l.positive {
                    return Err(ParseError::new(
                        ante_at,
                        "negated equality is not supported",
                    ));
                }
            }
            check_literal(&consequent, Some(&var), cons_at)?;
            if consequent.is_equality() {
                return Err(ParseError::new(
                    cons_at,
                    "equality is only allowed in antecedents",
                ));
            }
            Formula::implication(var, antecedent, consequent)
        }
        (Some(var), body) => {
            let at = body.offset();
            let literal = body.into_literal()?;
            check_literal(&literal, Some(&var), at)?;
            if literal.is_equality() {
                return Err(ParseError::new(
                    at,
                    "equality is only allowed in antecedents",
                ));
            }
            Formula::fact(var, literal)
        }
        (None, Expr::Implies(at, ..)) => {
            return Err(ParseError::new(
                at,
                "implication must be universally quantified",
            ))
        }
        (None, body) => {
            let at = body.offset();
            let literal = body.into_literal()?;
            check_literal(&literal, None, at)?;
            if literal.is_equality() {
                return Err(ParseError::new(
                    at,
                    "equality is only allowed in antecedents",
                ));
            }
            Formula::ground(literal)
        }
    };
    Ok(formula)
}
