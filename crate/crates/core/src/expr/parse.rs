//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := ('+' | '-') factor | power
//! power  := atom ('^' INTEGER)?
//! atom   := NUMBER | NUMBER 'i' | 'i' | 'z' | 'pi'
//!         | 'exp' '(' expr ')' | '(' expr ')' | '(' expr ',' expr ')'
//! ```
//!
//! `(re,im)` pairs require real constants on both sides. The argument of
//! `exp` must not itself contain `exp`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{EntireExpr, ExprError, Term};
use crate::kernel::Poly;

const MAX_POWER: u32 = 1024;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num { value: f64, integer: bool },
    Imag(f64),
    I,
    Z,
    Pi,
    Exp,
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Caret,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num { value, .. } => format!("number {value}"),
            Tok::Imag(v) => format!("imaginary literal {v}i"),
            Tok::I => "`i`".into(),
            Tok::Z => "`z`".into(),
            Tok::Pi => "`pi`".into(),
            Tok::Exp => "`exp`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn syntax(pos: usize, expected: &str, found: String) -> ExprError {
    ExprError::Syntax {
        pos,
        expected: expected.to_string(),
        found,
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match b {
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(t) = single {
            out.push((start, t));
            i += 1;
            continue;
        }
        if b.is_ascii_digit() || b == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit
                .parse()
                .map_err(|_| syntax(start, "a number", format!("`{lit}`")))?;
            let integer = lit.bytes().all(|c| c.is_ascii_digit());
            let imaginary = i < bytes.len()
                && bytes[i] == b'i'
                && !bytes
                    .get(i + 1)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_');
            if imaginary {
                i += 1;
                out.push((start, Tok::Imag(value)));
            } else {
                out.push((start, Tok::Num { value, integer }));
            }
            continue;
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let tok = match &text[start..i] {
                "z" => Tok::Z,
                "i" => Tok::I,
                "pi" => Tok::Pi,
                "exp" => Tok::Exp,
                other => {
                    return Err(syntax(
                        start,
                        "`z`, `i`, `pi` or `exp`",
                        format!("identifier `{other}`"),
                    ))
                }
            };
            out.push((start, tok));
            continue;
        }
        let ch = text[start..].chars().next().unwrap_or('?');
        return Err(syntax(start, "an operand or operator", format!("`{ch}`")));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

/// Parsed subexpression plus whether it syntactically contains `exp`.
struct Node {
    expr: EntireExpr,
    has_exp: bool,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<(), ExprError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.pos(), expected, self.peek().describe()))
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut acc = self.term()?;
        loop {
            let negate = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(acc),
            };
            self.bump();
            let rhs = self.term()?;
            acc = Node {
                expr: if negate {
                    acc.expr.sub(&rhs.expr)
                } else {
                    acc.expr.add(&rhs.expr)
                },
                has_exp: acc.has_exp || rhs.has_exp,
            };
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut acc = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.factor()?;
            acc = Node {
                expr: acc.expr.mul(&rhs.expr),
                has_exp: acc.has_exp || rhs.has_exp,
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                let inner = self.factor()?;
                Ok(Node {
                    expr: inner.expr.neg(),
                    has_exp: inner.has_exp,
                })
            }
            Tok::Plus => {
                self.bump();
                self.factor()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump().1 {
            Tok::Num {
                value,
                integer: true,
            } if value <= MAX_POWER as f64 => Ok(Node {
                expr: base.expr.pow(value as u32),
                has_exp: base.has_exp,
            }),
            other => Err(syntax(
                pos,
                &format!("a nonnegative integer exponent at most {MAX_POWER}"),
                other.describe(),
            )),
        }
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let pos = self.pos();
        let (_, tok) = self.bump();
        let constant = |c: Complex64| Node {
            expr: EntireExpr::constant(c),
            has_exp: false,
        };
        match tok {
            Tok::Num { value, .. } => Ok(constant(Complex64::new(value, 0.0))),
            Tok::Imag(v) => Ok(constant(Complex64::new(0.0, v))),
            Tok::I => Ok(constant(Complex64::new(0.0, 1.0))),
            Tok::Pi => Ok(constant(Complex64::new(PI, 0.0))),
            Tok::Z => Ok(Node {
                expr: EntireExpr::monomial(Complex64::new(1.0, 0.0), 1),
                has_exp: false,
            }),
            Tok::Exp => {
                self.expect(Tok::LParen, "`(` after exp")?;
                let arg_pos = self.pos();
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)` closing exp")?;
                if arg.has_exp {
                    return Err(ExprError::NonPolynomialExponent { pos: arg_pos });
                }
                let poly = arg.expr.as_poly().unwrap_or_else(Poly::zero);
                let c0 = poly.coeff(0).exp();
                if !c0.is_finite() {
                    return Err(ExprError::NonFiniteCoefficient { pos });
                }
                let expr = EntireExpr::from_terms(vec![Term {
                    coeff: Complex64::new(1.0, 0.0),
                    power: 0,
                    exponent: poly,
                }]);
                Ok(Node {
                    expr,
                    has_exp: true,
                })
            }
            Tok::LParen => {
                let first = self.expr()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    let second_pos = self.pos();
                    let second = self.expr()?;
                    self.expect(Tok::RParen, "`)` closing the complex pair")?;
                    let re = real_constant(&first.expr).ok_or_else(|| {
                        syntax(
                            pos + 1,
                            "a real constant in a (re,im) pair",
                            "a non-real expression".into(),
                        )
                    })?;
                    let im = real_constant(&second.expr).ok_or_else(|| {
                        syntax(
                            second_pos,
                            "a real constant in a (re,im) pair",
                            "a non-real expression".into(),
                        )
                    })?;
                    return Ok(constant(Complex64::new(re, im)));
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(first)
            }
            other => Err(syntax(pos, "an operand", other.describe())),
        }
    }
}

fn real_constant(e: &EntireExpr) -> Option<f64> {
    if !e.is_constant() {
        return None;
    }
    let c = e
        .terms()
        .first()
        .map_or(Complex64::new(0.0, 0.0), |t| t.coeff);
    (c.im == 0.0).then_some(c.re)
}

/// Parses text into a canonical [`EntireExpr`].
pub fn parse_expr(text: &str) -> Result<EntireExpr, ExprError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let node = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            p.pos(),
            "an operator or end of input",
            p.peek().describe(),
        ));
    }
    if node
        .expr
        .terms()
        .iter()
        .any(|t| !t.coeff.is_finite() || !t.exponent.coeffs().iter().all(|c| c.is_finite()))
    {
        return Err(ExprError::NonFiniteCoefficient { pos: 0 });
    }
    Ok(node.expr)
}
