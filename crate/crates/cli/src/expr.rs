//! Expressions in one variable `t`.
//!
//! ```text
//! expr   := term {("+"|"-") term}
//! term   := factor {("*"|"/") factor}
//! factor := ["-"] power
//! power  := atom ["^" factor]
//! atom   := number | "t" | "pi" | ident "(" expr {"," expr} ")" | "(" expr ")"
//! ```
//!
//! A minus sign directly in front of a bare number literal is folded into
//! the literal, so `-2` is `Num(-2)` while `-t` is `Neg(t)`.

use sonin_core::special::gamma;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Pow,
    Gamma,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "pow" => Func::Pow,
            "gamma" => Func::Gamma,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Pow => "pow",
            Func::Gamma => "gamma",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    T,
    Pi,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("cannot differentiate: {0}")]
    UnsupportedDerivative(String),
}

impl ExprError {
    pub fn code(&self) -> &'static str {
        match self {
            ExprError::Syntax { .. } => "E_SYNTAX",
            ExprError::UnknownIdentifier { .. } => "E_UNKNOWN_IDENT",
            ExprError::UnsupportedDerivative(_) => "E_DERIVATIVE",
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            Ok(match self.power()? {
                Expr::Num(x) => Expr::Num(-x),
                e => Expr::Neg(Box::new(e)),
            })
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Expr::Pow(Box::new(base), Box::new(self.factor()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.error("expected `)`");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.ident(),
            Some(c) => self.error(format!("expected a number, `t`, a call or `(`, found `{c}`")),
            None => self.error("unexpected end of input"),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let digits = |p: &mut usize| {
            let s = *p;
            while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                *p += 1;
            }
            *p > s
        };
        let mut p = self.pos;
        let mut any = digits(&mut p);
        if p < bytes.len() && bytes[p] == b'.' {
            p += 1;
            any |= digits(&mut p);
        }
        if !any {
            return self.error("malformed number");
        }
        if p < bytes.len() && (bytes[p] == b'e' || bytes[p] == b'E') {
            let mut q = p + 1;
            if q < bytes.len() && (bytes[q] == b'+' || bytes[q] == b'-') {
                q += 1;
            }
            if digits(&mut q) {
                p = q;
            }
        }
        self.pos = p;
        match self.src[start..p].parse::<f64>() {
            Ok(x) => Ok(Expr::Num(x)),
            Err(_) => Err(ExprError::Syntax {
                offset: start,
                message: "malformed number".into(),
            }),
        }
    }

    fn ident(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let name: String = self.src[start..]
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
            .collect();
        self.pos += name.len();
        match name.as_str() {
            "t" => return Ok(Expr::T),
            "pi" => return Ok(Expr::Pi),
            _ => {}
        }
        let Some(func) = Func::from_name(&name) else {
            return Err(ExprError::UnknownIdentifier {
                offset: start,
                name,
            });
        };
        if !self.eat('(') {
            return self.error(format!("expected `(` after `{name}`"));
        }
        let mut args = vec![self.expr()?];
        while self.eat(',') {
            args.push(self.expr()?);
        }
        if !self.eat(')') {
            return self.error("expected `)` or `,`");
        }
        if args.len() != func.arity() {
            return Err(ExprError::Syntax {
                offset: start,
                message: format!("{name} takes {} argument(s), got {}", func.arity(), args.len()),
            });
        }
        Ok(Expr::Call(func, args))
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src, pos: 0 };
    if p.peek().is_none() {
        return p.error("empty expression");
    }
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

impl Expr {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::T => t,
            Expr::Pi => std::f64::consts::PI,
            Expr::Neg(a) => -a.eval(t),
            Expr::Add(a, b) => a.eval(t) + b.eval(t),
            Expr::Sub(a, b) => a.eval(t) - b.eval(t),
            Expr::Mul(a, b) => a.eval(t) * b.eval(t),
            Expr::Div(a, b) => a.eval(t) / b.eval(t),
            Expr::Pow(a, b) => a.eval(t).powf(b.eval(t)),
            Expr::Call(f, args) => {
                let x = args[0].eval(t);
                match f {
                    Func::Exp => x.exp(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => x.sqrt(),
                    Func::Pow => x.powf(args[1].eval(t)),
                    Func::Gamma => gamma(x).unwrap_or(f64::NAN),
                }
            }
        }
    }

    pub fn depends_on_t(&self) -> bool {
        match self {
            Expr::T => true,
            Expr::Num(_) | Expr::Pi => false,
            Expr::Neg(a) => a.depends_on_t(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.depends_on_t() || b.depends_on_t()
            }
            Expr::Call(_, args) => args.iter().any(Expr::depends_on_t),
        }
    }

    /// Symbolic derivative in t with light constant folding.
    pub fn derivative(&self) -> Result<Expr, ExprError> {
        if !self.depends_on_t() {
            return Ok(Expr::Num(0.0));
        }
        Ok(match self {
            Expr::T => Expr::Num(1.0),
            Expr::Num(_) | Expr::Pi => Expr::Num(0.0),
            Expr::Neg(a) => neg(a.derivative()?),
            Expr::Add(a, b) => add(a.derivative()?, b.derivative()?),
            Expr::Sub(a, b) => sub(a.derivative()?, b.derivative()?),
            Expr::Mul(a, b) => add(
                mul(a.derivative()?, (**b).clone()),
                mul((**a).clone(), b.derivative()?),
            ),
            Expr::Div(a, b) => {
                if !b.depends_on_t() {
                    div(a.derivative()?, (**b).clone())
                } else {
                    div(
                        sub(
                            mul(a.derivative()?, (**b).clone()),
                            mul((**a).clone(), b.derivative()?),
                        ),
                        Expr::Pow(b.clone(), Box::new(Expr::Num(2.0))),
                    )
                }
            }
            Expr::Pow(a, b) => power_derivative(a, b)?,
            Expr::Call(f, args) => {
                let u = &args[0];
                let outer = match f {
                    Func::Exp => self.clone(),
                    Func::Sin => Expr::Call(Func::Cos, vec![u.clone()]),
                    Func::Cos => neg(Expr::Call(Func::Sin, vec![u.clone()])),
                    Func::Sqrt => div(Expr::Num(1.0), mul(Expr::Num(2.0), self.clone())),
                    Func::Pow => return power_derivative(&args[0], &args[1]),
                    Func::Gamma => {
                        return Err(ExprError::UnsupportedDerivative(
                            "gamma of a t-dependent argument".into(),
                        ))
                    }
                };
                mul(outer, u.derivative()?)
            }
        })
    }
}

fn power_derivative(a: &Expr, b: &Expr) -> Result<Expr, ExprError> {
    if b.depends_on_t() {
        if a.depends_on_t() {
            return Err(ExprError::UnsupportedDerivative(
                "power with t in both base and exponent".into(),
            ));
        }
        // c^v with constant c > 0: c^v · ln c · v′
        let ln_c = a.eval(0.0).ln();
        return Ok(mul(
            mul(Expr::Pow(Box::new(a.clone()), Box::new(b.clone())), Expr::Num(ln_c)),
            b.derivative()?,
        ));
    }
    let lowered = match b {
        Expr::Num(c) => Expr::Num(c - 1.0),
        _ => sub(b.clone(), Expr::Num(1.0)),
    };
    Ok(mul(
        mul(b.clone(), Expr::Pow(Box::new(a.clone()), Box::new(lowered))),
        a.derivative()?,
    ))
}

fn is_num(e: &Expr, x: f64) -> bool {
    matches!(e, Expr::Num(v) if *v == x)
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(x) => Expr::Num(-x),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
        (a, b) if is_num(&a, 0.0) => b,
        (a, b) if is_num(&b, 0.0) => a,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x - y),
        (a, b) if is_num(&b, 0.0) => a,
        (a, b) if is_num(&a, 0.0) => neg(b),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
        (a, b) if is_num(&a, 0.0) || is_num(&b, 0.0) => Expr::Num(0.0),
        (a, b) if is_num(&a, 1.0) => b,
        (a, b) if is_num(&b, 1.0) => a,
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if is_num(&a, 0.0) {
        Expr::Num(0.0)
    } else if is_num(&b, 1.0) {
        a
    } else {
        Expr::Div(Box::new(a), Box::new(b))
    }
}

/// Fully parenthesized, so that parsing the output gives back the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) if x.is_sign_negative() => write!(f, "(-{})", -x),
            Expr::Num(x) => write!(f, "{x}"),
            Expr::T => write!(f, "t"),
            Expr::Pi => write!(f, "pi"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Pow(a, b) => write!(f, "({a}^{b})"),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(x: f64) -> Box<Expr> {
        Box::new(Expr::Num(x))
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(
            parse("t^2 + 1").unwrap(),
            Expr::Add(Box::new(Expr::Pow(Box::new(Expr::T), n(2.0))), n(1.0))
        );
        assert_eq!(
            parse("2^3^2").unwrap(),
            Expr::Pow(n(2.0), Box::new(Expr::Pow(n(3.0), n(2.0))))
        );
        assert_eq!(parse("-t^2").unwrap().eval(3.0), -9.0);
        assert_eq!(parse("2^-1").unwrap().eval(0.0), 0.5);
        assert_eq!(parse("1-2-3").unwrap().eval(0.0), -4.0);
        assert_eq!(parse("8/4/2").unwrap().eval(0.0), 1.0);
    }

    #[test]
    fn evaluates_calls_and_constants() {
        let e = parse("exp(-1*t)*t^(-0.5)").unwrap();
        assert!((e.eval(1.0) - (-1f64).exp()).abs() < 1e-15);
        let e = parse("pow(t, 2) + sqrt(4) + gamma(5) + cos(pi)").unwrap();
        assert_eq!(e.eval(3.0), 9.0 + 2.0 + 24.0 - 1.0);
        assert_eq!(parse("1.5e1").unwrap(), Expr::Num(15.0));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(
            parse("2*^t"),
            Err(ExprError::Syntax {
                offset: 2,
                message: "expected a number, `t`, a call or `(`, found `^`".into()
            })
        );
        assert!(matches!(parse("x+1"), Err(ExprError::UnknownIdentifier { offset: 0, .. })));
        assert!(matches!(parse("1 + log(t)"), Err(ExprError::UnknownIdentifier { offset: 4, .. })));
        assert!(matches!(parse("(t"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("t t"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse(""), Err(ExprError::Syntax { offset: 0, .. })));
        assert!(matches!(parse("pow(t)"), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn derivative_shapes() {
        assert_eq!(
            parse("t^2").unwrap().derivative().unwrap(),
            Expr::Mul(n(2.0), Box::new(Expr::Pow(Box::new(Expr::T), n(1.0))))
        );
        assert_eq!(parse("exp(t)").unwrap().derivative().unwrap(), parse("exp(t)").unwrap());
        assert_eq!(
            parse("sin(2*t)").unwrap().derivative().unwrap(),
            Expr::Mul(Box::new(parse("cos(2*t)").unwrap()), n(2.0))
        );
        assert!(matches!(
            parse("gamma(t)").unwrap().derivative(),
            Err(ExprError::UnsupportedDerivative(_))
        ));
        assert_eq!(parse("gamma(3)*t").unwrap().derivative().unwrap().eval(1.0), 2.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for src in ["t^2*sin(t)", "exp(-t)/(1+t)", "sqrt(t)", "pow(t,1.5)", "2^t", "cos(t^2)-t"] {
            let e = parse(src).unwrap();
            let d = e.derivative().unwrap();
            let t = 0.7;
            let h = 1e-6;
            let fd = (e.eval(t + h) - e.eval(t - h)) / (2.0 * h);
            assert!((d.eval(t) - fd).abs() < 1e-7, "{src}: {} vs {fd}", d.eval(t));
        }
    }

    #[test]
    fn printing_round_trips() {
        for src in ["t^2 + 1", "-t^2", "-(2)", "2^-1", "exp(-1*t)*t^(-0.5)", "pow(t, pi)/3 - -t"] {
            let e = parse(src).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{src} -> {e}");
        }
        let d = parse("t^0.5").unwrap().derivative().unwrap();
        assert_eq!(parse(&d.to_string()).unwrap(), d);
    }
}
