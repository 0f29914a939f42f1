use crate::fol::Term;

use super::{
    strip_comment, LPStatement, LpAtom, LpLiteral, StatementKind, SyntaxErrorKind, SyntaxRepairLog,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Var(String),
    Number(String),
    Neck,
    QueryMark,
    NotProvable,
    LParen,
    RParen,
    Comma,
    Dot,
    Equals,
    /// Arithmetic or comparison operator.
    Op(String),
    Other(char),
}

const OPERATORS: [&str; 14] = [
    "=:=", "=\\=", "\\==", "==", ">=", "=<", "\\=", "**", "<", ">", "+", "-", "*", "/",
];

/// Total tokenizer: unknown characters become `Tok::Other`.
pub(crate) fn tokenize(line: &str) -> Vec<Tok> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let starts = |i: usize, s: &str| {
        let pat: Vec<char> = s.chars().collect();
        chars.len() >= i + pat.len() && chars[i..i + pat.len()] == pat[..]
    };
    'outer: while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if starts(i, ":-") {
            out.push(Tok::Neck);
            i += 2;
            continue;
        }
        if starts(i, "?-") {
            out.push(Tok::QueryMark);
            i += 2;
            continue;
        }
        if starts(i, "\\+") {
            out.push(Tok::NotProvable);
            i += 2;
            continue;
        }
        for op in OPERATORS {
            if starts(i, op) {
                out.push(Tok::Op(op.to_string()));
                i += op.chars().count();
                continue 'outer;
            }
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            out.push(Tok::Number(chars[start..i].iter().collect()));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if c.is_ascii_lowercase() {
                out.push(Tok::Ident(word));
            } else {
                out.push(Tok::Var(word));
            }
            continue;
        }
        out.push(match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '=' => Tok::Equals,
            other => Tok::Other(other),
        });
        i += 1;
    }
    out
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn term(&mut self) -> Option<Term> {
        match self.bump()? {
            Tok::Ident(n) => Some(Term::Const(n)),
            Tok::Var(v) if v.starts_with(|c: char| c.is_ascii_uppercase()) => Some(Term::Var(v)),
            _ => None,
        }
    }

    fn atom(&mut self) -> Option<LpAtom> {
        match (self.peek()?, self.peek_at(1)) {
            (Tok::Ident(_), Some(Tok::LParen)) => {
                let Some(Tok::Ident(name)) = self.bump() else {
                    return None;
                };
                self.bump();
                let mut args = vec![self.term()?];
                while self.eat(&Tok::Comma) {
                    args.push(self.term()?);
                }
                if !self.eat(&Tok::RParen) {
                    return None;
                }
                Some(LpAtom::Pred { name, args })
            }
            (_, Some(Tok::Equals)) => {
                let l = self.term()?;
                self.bump();
                let r = self.term()?;
                Some(LpAtom::Eq(l, r))
            }
            (Tok::Ident(_), _) => {
                let Some(Tok::Ident(name)) = self.bump() else {
                    return None;
                };
                Some(LpAtom::Pred { name, args: vec![] })
            }
            _ => None,
        }
    }

    fn literal(&mut self) -> Option<LpLiteral> {
        let negated = if self.eat(&Tok::NotProvable) {
            true
        } else if self.peek() == Some(&Tok::Ident("not".into()))
            && self.peek_at(1) == Some(&Tok::LParen)
        {
            self.bump();
            self.bump();
            let atom = self.atom()?;
            if !self.eat(&Tok::RParen) {
                return None;
            }
            return Some(LpLiteral {
                positive: false,
                atom,
            });
        } else {
            false
        };
        let atom = if negated && self.eat(&Tok::LParen) {
            let a = self.atom()?;
            if !self.eat(&Tok::RParen) {
                return None;
            }
            a
        } else {
            self.atom()?
        };
        Some(LpLiteral {
            positive: !negated,
            atom,
        })
    }

    fn body(&mut self) -> Option<Vec<LpLiteral>> {
        let mut out = vec![self.literal()?];
        while self.eat(&Tok::Comma) {
            out.push(self.literal()?);
        }
        Some(out)
    }

    fn statement(&mut self) -> Option<(StatementKind, LpLiteral, Vec<LpLiteral>)> {
        let result = if self.eat(&Tok::QueryMark) {
            let mut goals = self.body()?;
            if goals.len() != 1 {
                return None;
            }
            (StatementKind::Query, goals.pop()?, Vec::new())
        } else {
            let head = self.literal()?;
            if self.eat(&Tok::Neck) {
                (StatementKind::Rule, head, self.body()?)
            } else {
                (StatementKind::Fact, head, Vec::new())
            }
        };
        if !self.eat(&Tok::Dot) || self.pos != self.toks.len() {
            return None;
        }
        Some(result)
    }
}

/// Parse a single clause. `None` if the line is not a well-formed statement.
pub fn parse_statement(text: &str, line: usize) -> Option<LPStatement> {
    let mut p = Parser {
        toks: tokenize(text),
        pos: 0,
    };
    let (kind, head, body) = p.statement()?;
    Some(LPStatement {
        kind,
        head,
        body,
        raw_text: text.trim().to_string(),
        line,
    })
}

/// Parse a program line by line. Lines that do not parse are logged as
/// `OtherSyntaxError` and skipped.
pub fn parse_lp(cleaned: &str) -> (Vec<LPStatement>, SyntaxRepairLog) {
    let mut statements = Vec::new();
    let mut log = SyntaxRepairLog::default();
    for (i, raw) in cleaned.lines().enumerate() {
        let text = strip_comment(raw).trim();
        if text.is_empty() {
            continue;
        }
        match parse_statement(text, i + 1) {
            Some(st) => statements.push(st),
            None => log.push_dropped(i + 1, SyntaxErrorKind::OtherSyntaxError, text),
        }
    }
    (statements, log)
}
