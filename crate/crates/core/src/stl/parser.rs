//! Concrete syntax for STL formulas.
//!
//! ```text
//! phi   ::= "true" | "false" | pred | "{" set "}" | "!" phi | "X" phi
//!         | phi "&&" phi | phi "||" phi | phi "->" phi
//!         | "[]" intv? phi | "<>" intv? phi
//!         | phi "U" intv? phi | phi "R" intv? phi | "(" phi ")"
//! intv  ::= "_" ("[" | "(") num "," (num | "inf") ("]" | ")")
//! pred  ::= linexpr rel num | IDENT
//! set   ::= conj ("||" conj)*        conj ::= ("true" | pred) ("&&" ...)*
//! ```
//!
//! Precedence from tightest: unary operators, `U`/`R`, `&&`, `||`, `->`.
//! `->` is right-associative, the others left-associative. An omitted
//! interval means `[0, inf)`.

use crate::stl::{Formula, FormulaError, Interval, Predicate, PredicateSet, Relation};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    True,
    False,
    Inf,
    Not,
    And,
    Or,
    Implies,
    Next,
    Until,
    Release,
    Always,
    Eventually,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Underscore,
    Comma,
    Plus,
    Minus,
    Star,
    Rel(Relation),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(v) => format!("number `{v}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("{other:?}"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            *i += len;
            *col += len;
        };
        let next = chars.get(i + 1).copied();
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '!' => push(Tok::Not, 1, &mut i, &mut col),
            '&' if next == Some('&') => push(Tok::And, 2, &mut i, &mut col),
            '|' if next == Some('|') => push(Tok::Or, 2, &mut i, &mut col),
            '-' if next == Some('>') => push(Tok::Implies, 2, &mut i, &mut col),
            '[' if next == Some(']') => push(Tok::Always, 2, &mut i, &mut col),
            '<' if next == Some('>') => push(Tok::Eventually, 2, &mut i, &mut col),
            '<' if next == Some('=') => push(Tok::Rel(Relation::Le), 2, &mut i, &mut col),
            '>' if next == Some('=') => push(Tok::Rel(Relation::Ge), 2, &mut i, &mut col),
            '<' => push(Tok::Rel(Relation::Lt), 1, &mut i, &mut col),
            '>' => push(Tok::Rel(Relation::Gt), 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '[' => push(Tok::LBracket, 1, &mut i, &mut col),
            ']' => push(Tok::RBracket, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '-' => push(Tok::Minus, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            '_' if !next.is_some_and(|n| n.is_alphanumeric() || n == '_') => {
                push(Tok::Underscore, 1, &mut i, &mut col)
            }
            c if c.is_ascii_digit() || (c == '.' && next.is_some_and(|n| n.is_ascii_digit())) => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let lexeme: String = chars[i..j].iter().collect();
                let value: f64 = lexeme
                    .parse()
                    .map_err(|_| syntax(line, col, format!("invalid number `{lexeme}`")))?;
                push(Tok::Num(value), j - i, &mut i, &mut col);
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                // `U_[0,1]`: an underscore opening an interval ends the word.
                while j < chars.len()
                    && (chars[j].is_alphanumeric()
                        || (chars[j] == '_' && !matches!(chars.get(j + 1), Some('[' | '('))))
                {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "inf" => Tok::Inf,
                    "X" => Tok::Next,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    _ => Tok::Ident(word),
                };
                push(tok, j - i, &mut i, &mut col);
            }
            other => return Err(syntax(line, col, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> FormulaError {
        let (line, column) = self.here();
        syntax(line, column, message)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {}", self.peek().describe())))
        }
    }

    fn implies(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.until()?;
        while *self.peek() == Tok::And {
            self.bump();
            lhs = Formula::and(lhs, self.until()?);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Until => {
                    self.bump();
                    let i = self.interval()?;
                    lhs = Formula::until(i, lhs, self.unary()?);
                }
                Tok::Release => {
                    self.bump();
                    let i = self.interval()?;
                    lhs = Formula::release(i, lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Next => {
                self.bump();
                Ok(Formula::next(self.unary()?))
            }
            Tok::Always => {
                self.bump();
                let i = self.interval()?;
                Ok(Formula::always(i, self.unary()?))
            }
            Tok::Eventually => {
                self.bump();
                let i = self.interval()?;
                Ok(Formula::eventually(i, self.unary()?))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::not(Formula::True))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.implies()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::LBrace => {
                self.bump();
                let set = self.predicate_set()?;
                self.expect(Tok::RBrace, "`}`")?;
                Ok(Formula::Pred(set))
            }
            Tok::Ident(_) | Tok::Num(_) | Tok::Minus => Ok(Formula::pred(self.predicate()?)),
            other => Err(self.error(format!("expected a formula, found {}", other.describe()))),
        }
    }

    fn predicate_set(&mut self) -> Result<PredicateSet, FormulaError> {
        let mut clauses = Vec::new();
        if *self.peek() == Tok::RBrace {
            return Ok(PredicateSet::new(clauses));
        }
        loop {
            let mut clause = Vec::new();
            loop {
                if *self.peek() == Tok::True {
                    self.bump();
                } else {
                    clause.push(self.predicate()?);
                }
                if *self.peek() != Tok::And {
                    break;
                }
                self.bump();
            }
            clauses.push(clause);
            if *self.peek() != Tok::Or {
                break;
            }
            self.bump();
        }
        Ok(PredicateSet::new(clauses))
    }

    fn predicate(&mut self) -> Result<Predicate, FormulaError> {
        // A lone identifier not followed by arithmetic or a relation is a
        // Boolean channel.
        if let Tok::Ident(name) = self.peek().clone() {
            if !matches!(
                self.peek_at(1),
                Tok::Rel(_) | Tok::Plus | Tok::Minus | Tok::Star
            ) {
                self.bump();
                return Ok(Predicate::channel(name));
            }
        }
        let mut terms = Vec::new();
        let mut constant = 0.0;
        let mut sign = 1.0;
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = -1.0;
        }
        loop {
            match self.peek().clone() {
                Tok::Ident(name) => {
                    self.bump();
                    terms.push((name, sign));
                }
                Tok::Num(v) => {
                    self.bump();
                    if *self.peek() == Tok::Star {
                        self.bump();
                        match self.peek().clone() {
                            Tok::Ident(name) => {
                                self.bump();
                                terms.push((name, sign * v));
                            }
                            other => {
                                return Err(self.error(format!(
                                    "expected a channel name after `*`, found {}",
                                    other.describe()
                                )));
                            }
                        }
                    } else {
                        constant += sign * v;
                    }
                }
                other => {
                    return Err(self.error(format!(
                        "expected a channel or number, found {}",
                        other.describe()
                    )));
                }
            }
            match self.peek() {
                Tok::Plus => sign = 1.0,
                Tok::Minus => sign = -1.0,
                _ => break,
            }
            self.bump();
        }
        let relation = match self.peek() {
            Tok::Rel(r) => *r,
            other => {
                return Err(self.error(format!(
                    "expected a relation (>=, >, <=, <), found {}",
                    other.describe()
                )))
            }
        };
        self.bump();
        let bound = self.signed_number()?;
        Ok(Predicate::linear(terms, relation, bound - constant))
    }

    fn signed_number(&mut self) -> Result<f64, FormulaError> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(if negative { -v } else { v })
            }
            other => Err(self.error(format!("expected a number, found {}", other.describe()))),
        }
    }

    fn interval(&mut self) -> Result<Interval, FormulaError> {
        if *self.peek() != Tok::Underscore {
            return Ok(Interval::unbounded());
        }
        self.bump();
        let lower_closed = match self.peek().clone() {
            Tok::LBracket => true,
            Tok::LParen => false,
            other => {
                return Err(self.error(format!(
                    "expected `[` or `(` to open an interval, found {}",
                    other.describe()
                )));
            }
        };
        self.bump();
        let lower = self.signed_number()?;
        self.expect(Tok::Comma, "`,`")?;
        let upper = if *self.peek() == Tok::Inf {
            self.bump();
            f64::INFINITY
        } else {
            self.signed_number()?
        };
        let upper_closed = match self.peek().clone() {
            Tok::RBracket => true,
            Tok::RParen => false,
            other => {
                return Err(self.error(format!(
                    "expected `]` or `)` to close an interval, found {}",
                    other.describe()
                )));
            }
        };
        self.bump();
        Interval::new(lower, upper, lower_closed, upper_closed)
    }
}

/// Parses formula text without checking channel names.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.implies()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("unexpected {}", p.peek().describe())));
    }
    Ok(f)
}

/// Parses formula text and checks that every referenced name is known.
pub fn parse_formula<S: AsRef<str>>(
    text: &str,
    known: impl IntoIterator<Item = S>,
) -> Result<Formula, FormulaError> {
    let f = parse(text)?;
    let known: std::collections::BTreeSet<String> =
        known.into_iter().map(|s| s.as_ref().to_owned()).collect();
    if let Some(name) = f.free_channels().into_iter().find(|c| !known.contains(c)) {
        let (line, column) = locate(text, &name);
        return Err(FormulaError::UnknownChannel { name, line, column });
    }
    Ok(f)
}

fn locate(text: &str, name: &str) -> (usize, usize) {
    let Ok(toks) = tokenize(text) else {
        return (1, 1);
    };
    toks.iter()
        .find(|t| matches!(&t.tok, Tok::Ident(n) if n == name))
        .map(|t| (t.line, t.column))
        .unwrap_or((1, 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y_gt_0() -> Formula {
        Formula::pred(Predicate::cmp("y", Relation::Gt, 0.0))
    }

    #[test]
    fn always_without_interval() {
        let f = parse_formula("[](y > 0)", ["y"]).unwrap();
        assert_eq!(f, Formula::always(Interval::unbounded(), y_gt_0()));
    }

    #[test]
    fn eventually_half_open() {
        let f = parse("<>_[1.2,5) (y <= -10)").unwrap();
        let i = Interval::new(1.2, 5.0, true, false).unwrap();
        assert_eq!(
            f,
            Formula::eventually(i, Formula::pred(Predicate::cmp("y", Relation::Le, -10.0)))
        );
    }

    #[test]
    fn unbalanced_paren_reports_end_of_input() {
        match parse("(y > 0") {
            Err(FormulaError::Syntax {
                line,
                column,
                message,
            }) => {
                assert_eq!((line, column), (1, 7));
                assert!(message.contains("end of input"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_channel_is_located() {
        match parse_formula("[](y > 0)\n && z < 1", ["y"]) {
            Err(FormulaError::UnknownChannel { name, line, column }) => {
                assert_eq!(name, "z");
                assert_eq!((line, column), (2, 5));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reversed_interval_is_malformed() {
        assert!(matches!(
            parse("<>_[5,1.2] y > 0"),
            Err(FormulaError::MalformedInterval { .. })
        ));
    }

    #[test]
    fn precedence() {
        // unary > U > && > || > ->
        let f = parse("a || b && c -> d").unwrap();
        let a = Formula::pred(Predicate::channel("a"));
        let b = Formula::pred(Predicate::channel("b"));
        let c = Formula::pred(Predicate::channel("c"));
        let d = Formula::pred(Predicate::channel("d"));
        assert_eq!(
            f,
            Formula::implies(
                Formula::or(a.clone(), Formula::and(b.clone(), c.clone())),
                d.clone()
            )
        );
        let g = parse("!a U_[0,2] b && c").unwrap();
        assert_eq!(
            g,
            Formula::and(
                Formula::until(Interval::closed(0.0, 2.0).unwrap(), Formula::not(a), b),
                c
            )
        );
    }

    #[test]
    fn linear_expressions() {
        let f = parse("y1 + y2 >= 10").unwrap();
        assert_eq!(
            f,
            Formula::pred(Predicate::linear(
                vec![("y1".into(), 1.0), ("y2".into(), 1.0)],
                Relation::Ge,
                10.0
            ))
        );
        let g = parse("-2*a + 3 - b < 1e1").unwrap();
        assert_eq!(
            g,
            Formula::pred(Predicate::linear(
                vec![("a".into(), -2.0), ("b".into(), -1.0)],
                Relation::Lt,
                7.0
            ))
        );
    }

    #[test]
    fn predicate_sets() {
        let f = parse("{ y1 <= -10 || y1 + y2 >= 10 }").unwrap();
        match f {
            Formula::Pred(set) => assert_eq!(set.clauses.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(parse("{ }").unwrap(), Formula::Pred(PredicateSet::empty()));
        assert_eq!(
            parse("{ true }").unwrap(),
            Formula::Pred(PredicateSet::full())
        );
    }

    #[test]
    fn next_and_keywords() {
        let f = parse("B && X !B").unwrap();
        let b = Formula::pred(Predicate::channel("B"));
        assert_eq!(f, Formula::and(b.clone(), Formula::next(Formula::not(b))));
        assert_eq!(parse("false").unwrap(), Formula::not(Formula::True));
        assert_eq!(
            parse("[]_[5,inf) y > 0").unwrap(),
            Formula::always(
                Interval::new(5.0, f64::INFINITY, true, false).unwrap(),
                y_gt_0()
            )
        );
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        assert!(matches!(parse("y > 0 )"), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse("y > "), Err(FormulaError::Syntax { .. })));
        assert!(matches!(parse("y # 0"), Err(FormulaError::Syntax { .. })));
    }
}
