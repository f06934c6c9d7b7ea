//! A small arithmetic language for generator functions and interpretation
//! basis terms.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'pi' | var | func '(' expr ')' | '(' expr ')'
//! var     := 'x' [1-9][0-9]*
//! func    := 'sin' | 'cos' | 'exp' | 'abs' | 'sqrt'
//! ```
//!
//! `^` binds tighter than unary minus (`-x^2` is `-(x^2)`) and associates to
//! the right. Variables are stored by their 1-based index.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    /// 1-based variable index: `x3` is `Var(3)`.
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::Syntax { offset: 0, message: "empty expression".into() });
    }
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.len() };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(Error::Syntax { offset: t.offset, message: format!("unexpected {}", t.kind.describe()) }),
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        parse_expr(s)
    }
}

impl Expr {
    /// Evaluates with `vars[i]` bound to `x{i+1}`.
    pub fn eval(&self, vars: &[f64]) -> Result<f64> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Var(i) => *vars.get(i - 1).ok_or_else(|| Error::MissingVariable(format!("x{i}")))?,
            Expr::Neg(e) => -e.eval(vars)?,
            Expr::Bin(op, l, r) => {
                let a = l.eval(vars)?;
                let b = r.eval(vars)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(Error::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => pow(a, b)?,
                }
            }
            Expr::Call(f, e) => {
                let a = e.eval(vars)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(Error::Domain(format!("sqrt of negative value {a}")));
                        }
                        a.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("non-finite result in `{self}`")))
        }
    }

    /// Evaluates against named bindings such as `{"x1": 0.5}`.
    pub fn eval_map(&self, assignment: &HashMap<String, f64>) -> Result<f64> {
        let n = self.max_var_index();
        let mut vars = vec![f64::NAN; n];
        for idx in self.var_indices() {
            let name = format!("x{idx}");
            vars[idx - 1] = *assignment.get(&name).ok_or(Error::MissingVariable(name))?;
        }
        self.eval(&vars)
    }

    /// Free variables ordered by index.
    pub fn free_vars(&self) -> Vec<String> {
        self.var_indices().into_iter().map(|i| format!("x{i}")).collect()
    }

    pub fn var_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Highest variable index referenced, 0 for a closed expression.
    pub fn max_var_index(&self) -> usize {
        self.var_indices().last().copied().unwrap_or(0)
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Var(i) => out.push(*i),
            Expr::Neg(e) | Expr::Call(_, e) => e.collect_vars(out),
            Expr::Bin(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Expr::Num(_) | Expr::Pi => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

fn pow(base: f64, exp: f64) -> Result<f64> {
    if base < 0.0 && exp.fract() != 0.0 {
        return Err(Error::Domain(format!("negative base {base} with non-integer exponent {exp}")));
    }
    if base == 0.0 && exp < 0.0 {
        return Err(Error::DivisionByZero);
    }
    Ok(base.powf(exp))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                child(f, e, e.precedence() < 3)
            }
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Bin(op, l, r) => {
                let p = self.precedence();
                let (sym, lp, rp) = match op {
                    BinOp::Pow => ("^", l.precedence() <= 4, r.precedence() < 3),
                    _ => {
                        let sym = match op {
                            BinOp::Add => " + ",
                            BinOp::Sub => " - ",
                            BinOp::Mul => "*",
                            _ => "/",
                        };
                        (sym, l.precedence() < p, r.precedence() <= p)
                    }
                };
                child(f, l, lp)?;
                f.write_str(sym)?;
                child(f, r, rp)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Num(v) => format!("number {v}"),
            TokKind::Ident(s) => format!("identifier `{s}`"),
            TokKind::Op(c) => format!("`{c}`"),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token { kind: TokKind::Op(c as char), offset: start });
                i += 1;
            }
            b'(' => {
                out.push(Token { kind: TokKind::LParen, offset: start });
                i += 1;
            }
            b')' => {
                out.push(Token { kind: TokKind::RParen, offset: start });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
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
                let v: f64 = lit
                    .parse()
                    .map_err(|_| Error::Syntax { offset: start, message: format!("malformed number `{lit}`") })?;
                out.push(Token { kind: TokKind::Num(v), offset: start });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token { kind: TokKind::Ident(text[start..i].to_string()), offset: start });
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax { offset: start, message: format!("unexpected character `{ch}`") });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: TokKind::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let end = self.end;
        let tok = self.next().ok_or(Error::Syntax { offset: end, message: "unexpected end of input".into() })?;
        match tok.kind {
            TokKind::Num(v) => Ok(Expr::Num(v)),
            TokKind::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            TokKind::Ident(name) => {
                if matches!(self.peek(), Some(Token { kind: TokKind::LParen, .. })) {
                    let func = Func::from_name(&name).ok_or(Error::UnknownFunction { name, offset: tok.offset })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                match variable_index(&name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(Error::UnknownIdentifier { name, offset: tok.offset }),
                }
            }
            other => Err(Error::Syntax { offset: tok.offset, message: format!("unexpected {}", other.describe()) }),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let end = self.end;
        match self.next() {
            Some(Token { kind: TokKind::RParen, .. }) => Ok(()),
            Some(t) => {
                Err(Error::Syntax { offset: t.offset, message: format!("expected `)`, found {}", t.kind.describe()) })
            }
            None => Err(Error::Syntax { offset: end, message: "expected `)` before end of input".into() }),
        }
    }
}

fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FRIEDMAN: &str = "10*sin(pi*x1*x2) + 20*(x3-0.5)^2 + 10*x4 + 5*x5";
    const GABOR: &str = "pi*exp(-2*(x1^2+x2^2))*cos(2*pi*(x1+x2))/2";
    const MULTI: &str = "0.79 + 1.27*x1*x2 + 1.56*x1*x4 + 3.42*x2*x5 + 2.06*x3*x4*x5";

    #[test]
    fn free_vars_of_generators() {
        assert_eq!(parse_expr("0.6*x1 + 0.3*x2").unwrap().free_vars(), ["x1", "x2"]);
        assert_eq!(parse_expr(FRIEDMAN).unwrap().free_vars(), ["x1", "x2", "x3", "x4", "x5"]);
        assert!(parse_expr("3.0").unwrap().free_vars().is_empty());
        assert_eq!(parse_expr("x10 + x2").unwrap().free_vars(), ["x2", "x10"]);
    }

    #[test]
    fn double_caret_is_a_syntax_error_at_offset_3() {
        match parse_expr("x1^^2") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(
            parse_expr("tan(x1)"),
            Err(Error::UnknownFunction { ref name, offset: 0 }) if name == "tan"
        ));
        assert!(matches!(
            parse_expr("2*y"),
            Err(Error::UnknownIdentifier { ref name, offset: 2 }) if name == "y"
        ));
        assert!(matches!(parse_expr("x0"), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse_expr(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expr("(x1"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(parse_expr("x1 x2"), Err(Error::Syntax { offset: 3, .. })));
    }

    #[test]
    fn evaluates_generators() {
        let plane = parse_expr("0.6*x1 + 0.3*x2").unwrap();
        assert!((plane.eval(&[1.0, 1.0]).unwrap() - 0.9).abs() < 1e-15);
        let gabor = parse_expr(GABOR).unwrap();
        assert!((gabor.eval(&[0.0, 0.0]).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let multi = parse_expr(MULTI).unwrap();
        assert_eq!(multi.eval(&[0.0; 5]).unwrap(), 0.79);
    }

    #[test]
    fn precedence_and_associativity() {
        let e = |s: &str| parse_expr(s).unwrap().eval(&[3.0]).unwrap();
        assert_eq!(e("-x1^2"), -9.0);
        assert_eq!(e("2^3^2"), 512.0);
        assert_eq!(e("8/4/2"), 1.0);
        assert_eq!(e("8-4-2"), 2.0);
        assert_eq!(e("2*x1^-1"), 2.0 / 3.0);
        assert_eq!(e("1.5e1 + .5"), 15.5);
    }

    #[test]
    fn evaluation_errors() {
        let e = |s: &str, v: &[f64]| parse_expr(s).unwrap().eval(v);
        assert_eq!(e("1/x1", &[0.0]), Err(Error::DivisionByZero));
        assert!(matches!(e("sqrt(x1)", &[-1.0]), Err(Error::Domain(_))));
        assert!(matches!(e("x1^0.5", &[-4.0]), Err(Error::Domain(_))));
        assert_eq!(e("x1^2", &[-4.0]), Ok(16.0));
        assert_eq!(e("x2", &[1.0]), Err(Error::MissingVariable("x2".into())));
        assert!(matches!(e("exp(x1)", &[1e5]), Err(Error::Domain(_))));
    }

    #[test]
    fn named_assignment() {
        let plane = parse_expr("0.6*x1 + 0.3*x2").unwrap();
        let mut m = HashMap::new();
        m.insert("x1".to_string(), 1.0);
        assert_eq!(plane.eval_map(&m), Err(Error::MissingVariable("x2".into())));
        m.insert("x2".to_string(), 1.0);
        assert!((plane.eval_map(&m).unwrap() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn display_is_readable_and_reparses() {
        for s in [FRIEDMAN, GABOR, MULTI, "-x1^2", "(-x1)^2", "(x1^2)^3", "x1-(x2-x3)", "x1/(x2*x3)", "--x1"] {
            let a = parse_expr(s).unwrap();
            let b = parse_expr(&a.to_string()).unwrap();
            assert_eq!(a, b, "{s} -> {a}");
        }
        assert_eq!(parse_expr("0.6*x1+0.3*x2").unwrap().to_string(), "0.6*x1 + 0.3*x2");
    }
}
