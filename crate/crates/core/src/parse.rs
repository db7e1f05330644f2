//! Polynomial expression parser.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := ("+" | "-") unary | power
//! power  := atom ("^" INTEGER)?
//! atom   := INTEGER | IDENT | "(" expr ")"
//! ```
//!
//! Division is only allowed by variable-free subexpressions. Variables are
//! bound in first-appearance order unless a list is declared; if every
//! identifier has the form `x<k>`, `x<k>` is bound to coordinate `k`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::series::Jet;

pub const MAX_EXPONENT: u32 = 10_000;
pub const MAX_DEPTH: usize = 256;
const MAX_COEFF_BITS: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { position, message: message.into() })
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i].1 == '.' {
                return err(chars[i].0, "decimal literals are not supported; write a fraction");
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((Tok::Int(s.parse().expect("digits")), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().map(|(_, c)| c).collect()), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), pos));
            i += 1;
        } else {
            return err(pos, format!("unexpected character {c:?}"));
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

#[derive(Debug)]
enum Ast {
    Num(BigInt),
    Var(String, usize),
    Neg(Box<Ast>),
    /// First operand followed by (operator, position, operand) pairs, all of
    /// one precedence level. Kept flat so long chains do not deepen the tree.
    Chain(Box<Ast>, Vec<(char, usize, Ast)>),
    Pow(Box<Ast>, u32, usize),
}

impl Ast {
    fn has_vars(&self) -> bool {
        match self {
            Ast::Num(_) => false,
            Ast::Var(..) => true,
            Ast::Neg(a) | Ast::Pow(a, ..) => a.has_vars(),
            Ast::Chain(a, rest) => a.has_vars() || rest.iter().any(|(_, _, b)| b.has_vars()),
        }
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Ast::Num(_) => {}
            Ast::Var(v, _) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Ast::Neg(a) | Ast::Pow(a, ..) => a.collect_vars(out),
            Ast::Chain(a, rest) => {
                a.collect_vars(out);
                for (_, _, b) in rest {
                    b.collect_vars(out);
                }
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return err(self.pos(), "expression nested too deeply");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        self.enter()?;
        let first = self.term()?;
        let mut rest = Vec::new();
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            let (_, pos) = self.bump();
            rest.push((c, pos, self.term()?));
        }
        self.depth -= 1;
        Ok(if rest.is_empty() { first } else { Ast::Chain(Box::new(first), rest) })
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let first = self.unary()?;
        let mut rest = Vec::new();
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            let (_, pos) = self.bump();
            rest.push((c, pos, self.unary()?));
        }
        Ok(if rest.is_empty() { first } else { Ast::Chain(Box::new(first), rest) })
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        match *self.peek() {
            Tok::Op('-') => {
                self.enter()?;
                self.bump();
                let a = self.unary()?;
                self.depth -= 1;
                Ok(Ast::Neg(Box::new(a)))
            }
            Tok::Op('+') => {
                self.enter()?;
                self.bump();
                let a = self.unary();
                self.depth -= 1;
                a
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            let caret = self.bump().1;
            let pos = self.pos();
            match self.bump().0 {
                Tok::Int(k) => {
                    let k: u32 = match u32::try_from(&k) {
                        Ok(k) if k <= MAX_EXPONENT => k,
                        _ => return err(pos, format!("exponent exceeds {MAX_EXPONENT}")),
                    };
                    if *self.peek() == Tok::Op('^') {
                        return err(self.pos(), "chained exponents need parentheses");
                    }
                    Ok(Ast::Pow(Box::new(base), k, caret))
                }
                _ => err(pos, "exponent must be a nonnegative integer literal"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Int(k) => Ok(Ast::Num(k)),
            Tok::Ident(s) => Ok(Ast::Var(s, pos)),
            Tok::Op('(') => {
                let e = self.expr()?;
                match self.bump() {
                    (Tok::Op(')'), _) => Ok(e),
                    (_, p) => err(p, "expected ')'"),
                }
            }
            Tok::End => err(pos, "unexpected end of input"),
            Tok::Op(c) => err(pos, format!("unexpected {c:?}")),
        }
    }
}

/// A parsed polynomial with its variable names in coordinate order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub jet: Jet,
    pub vars: Vec<String>,
}

fn parse_ast(text: &str) -> Result<Ast, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, depth: 0 };
    let ast = p.expr()?;
    if *p.peek() != Tok::End {
        return err(p.pos(), "unexpected trailing input");
    }
    Ok(ast)
}

/// Identifiers of the form `x<k>` with `k ≥ 1`.
fn indexed_name(v: &str) -> Option<usize> {
    let rest = v.strip_prefix('x')?;
    if rest.is_empty() || rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok().filter(|&k| (1..=64).contains(&k))
}

/// Variable binding for a set of expressions parsed together: `x1..xn` when
/// every name is indexed, otherwise the distinct names in sorted order.
pub fn infer_vars(texts: &[&str]) -> Result<Vec<String>, ParseError> {
    let asts = texts.iter().map(|t| parse_ast(t)).collect::<Result<Vec<_>, _>>()?;
    let mut names = Vec::new();
    for a in &asts {
        a.collect_vars(&mut names);
    }
    if !names.is_empty() && names.iter().all(|v| indexed_name(v).is_some()) {
        let n = names.iter().filter_map(|v| indexed_name(v)).max().unwrap_or(0);
        return Ok((1..=n).map(|k| format!("x{k}")).collect());
    }
    names.sort_unstable();
    Ok(names.into_iter().map(String::from).collect())
}

/// Parses with bindings inferred from the text itself.
pub fn parse_polynomial(text: &str, truncation: u32) -> Result<Parsed, ParseError> {
    let vars = infer_vars(&[text])?;
    let jet = parse_with_vars(text, &vars, truncation)?;
    Ok(Parsed { jet, vars })
}

/// Parses with a declared variable list; unknown identifiers are errors.
pub fn parse_with_vars(text: &str, vars: &[String], truncation: u32) -> Result<Jet, ParseError> {
    let ast = parse_ast(text)?;
    eval(&ast, vars, truncation)
}

fn eval(a: &Ast, vars: &[String], t: u32) -> Result<Jet, ParseError> {
    let n = vars.len();
    Ok(match a {
        Ast::Num(k) => Jet::constant(n, t, BigRational::from_integer(k.clone())),
        Ast::Var(v, pos) => match vars.iter().position(|x| x == v) {
            Some(i) => Jet::variable(n, t, i),
            None => return err(*pos, format!("unknown variable {v:?}")),
        },
        Ast::Neg(x) => -&eval(x, vars, t)?,
        Ast::Pow(x, k, pos) => {
            let base = eval(x, vars, t)?;
            let bits: u64 = base.terms().map(|(_, c)| c.numer().bits() + c.denom().bits()).max().unwrap_or(0);
            if bits.saturating_mul(u64::from(*k)) > MAX_COEFF_BITS {
                return err(*pos, "coefficient growth exceeds the supported size");
            }
            base.pow(*k)
        }
        Ast::Chain(x, rest) => {
            let mut acc = eval(x, vars, t)?;
            for (op, pos, y) in rest {
                acc = match op {
                    '+' => &acc + &eval(y, vars, t)?,
                    '-' => &acc - &eval(y, vars, t)?,
                    '*' => &acc * &eval(y, vars, t)?,
                    _ => {
                        if y.has_vars() {
                            return err(*pos, "division is only allowed by constants");
                        }
                        let rhs = eval(y, vars, t)?.constant_term();
                        if rhs.is_zero() {
                            return err(*pos, "division by zero");
                        }
                        acc.scale(&(BigRational::one() / rhs))
                    }
                };
            }
            acc
        }
    })
}
