//! Small real-arithmetic expression language used by scenario files.
//!
//! Grammar: numbers, variables, the constants `pi` and `e`, the binary
//! operators `+ - * / ^` (with `^` right-associative), unary minus and the
//! functions `exp ln cosh sinh tanh sin cos sqrt abs step`. `step(x)` is the
//! Heaviside function with `step(0) = 1`.
//!
//! Expressions are evaluated either on plain floats or on second-order jets,
//! which carry the gradient and Hessian with respect to every variable. Kinks
//! (`abs`, `step`) are differentiated one-sidedly: their second derivative is
//! taken as zero.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Cosh,
    Sinh,
    Tanh,
    Sin,
    Cos,
    Sqrt,
    Abs,
    Step,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "cosh" => Func::Cosh,
            "sinh" => Func::Sinh,
            "tanh" => Func::Tanh,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "step" => Func::Step,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Cosh => "cosh",
            Func::Sinh => "sinh",
            Func::Tanh => "tanh",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Step => "step",
        }
    }

    /// Value with first and second derivative.
    fn eval3(self, a: f64) -> (f64, f64, f64) {
        match self {
            Func::Exp => {
                let e = a.exp();
                (e, e, e)
            }
            Func::Ln => (a.ln(), 1.0 / a, -1.0 / (a * a)),
            Func::Cosh => (a.cosh(), a.sinh(), a.cosh()),
            Func::Sinh => (a.sinh(), a.cosh(), a.sinh()),
            Func::Tanh => {
                let th = a.tanh();
                let s = 1.0 - th * th;
                (th, s, -2.0 * th * s)
            }
            Func::Sin => (a.sin(), a.cos(), -a.sin()),
            Func::Cos => (a.cos(), -a.sin(), -a.cos()),
            Func::Sqrt => {
                let r = a.sqrt();
                (r, 0.5 / r, -0.25 / (r * a))
            }
            Func::Abs => (a.abs(), if a >= 0.0 { 1.0 } else { -1.0 }, 0.0),
            Func::Step => (if a >= 0.0 { 1.0 } else { 0.0 }, 0.0, 0.0),
        }
    }

    fn eval(self, a: f64) -> f64 {
        match self {
            Func::Exp => a.exp(),
            Func::Ln => a.ln(),
            Func::Cosh => a.cosh(),
            Func::Sinh => a.sinh(),
            Func::Tanh => a.tanh(),
            Func::Sin => a.sin(),
            Func::Cos => a.cos(),
            Func::Sqrt => a.sqrt(),
            Func::Abs => a.abs(),
            Func::Step => {
                if a >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression bound to an ordered list of variable names.
#[derive(Clone)]
pub struct Expr {
    source: String,
    vars: Vec<String>,
    root: Node,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Expr")
            .field("source", &self.source)
            .field("vars", &self.vars)
            .finish()
    }
}

impl Expr {
    pub fn parse(source: &str, vars: &[&str]) -> Result<Self> {
        let tokens = tokenize(source)?;
        let mut parser = Parser {
            tokens: &tokens,
            pos: 0,
            vars,
        };
        let root = parser.expr()?;
        if parser.pos != tokens.len() {
            return Err(Error::Expression(format!(
                "unexpected trailing input in `{source}`"
            )));
        }
        Ok(Self {
            source: source.to_string(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn eval(&self, args: &[f64]) -> f64 {
        debug_assert_eq!(args.len(), self.vars.len());
        eval_f64(&self.root, args)
    }

    /// Value, gradient and Hessian with respect to all variables.
    pub fn eval_jet(&self, args: &[f64]) -> Jet {
        eval_jet(&self.root, args)
    }

    /// True when the expression does not mention variable `idx`.
    pub fn is_independent_of(&self, idx: usize) -> bool {
        !mentions(&self.root, idx)
    }
}

fn mentions(node: &Node, idx: usize) -> bool {
    match node {
        Node::Const(_) => false,
        Node::Var(i) => *i == idx,
        Node::Neg(a) | Node::Call(_, a) => mentions(a, idx),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
            mentions(a, idx) || mentions(b, idx)
        }
    }
}

fn eval_f64(node: &Node, args: &[f64]) -> f64 {
    match node {
        Node::Const(c) => *c,
        Node::Var(i) => args[*i],
        Node::Neg(a) => -eval_f64(a, args),
        Node::Add(a, b) => eval_f64(a, args) + eval_f64(b, args),
        Node::Sub(a, b) => eval_f64(a, args) - eval_f64(b, args),
        Node::Mul(a, b) => eval_f64(a, args) * eval_f64(b, args),
        Node::Div(a, b) => eval_f64(a, args) / eval_f64(b, args),
        Node::Pow(a, b) => {
            let base = eval_f64(a, args);
            match **b {
                Node::Const(c) if c.fract() == 0.0 && c.abs() < 64.0 => base.powi(c as i32),
                _ => base.powf(eval_f64(b, args)),
            }
        }
        Node::Call(f, a) => f.eval(eval_f64(a, args)),
    }
}

/// Second-order forward-mode jet: value, gradient and dense Hessian.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Row-major `n x n`.
    pub hess: Vec<f64>,
}

impl Jet {
    fn constant(value: f64, n: usize) -> Self {
        Self {
            value,
            grad: vec![0.0; n],
            hess: vec![0.0; n * n],
        }
    }

    fn variable(value: f64, idx: usize, n: usize) -> Self {
        let mut j = Self::constant(value, n);
        j.grad[idx] = 1.0;
        j
    }

    fn n(&self) -> usize {
        self.grad.len()
    }

    /// Composition with a scalar function given its value and first two derivatives.
    fn compose(&self, (f0, f1, f2): (f64, f64, f64)) -> Self {
        let n = self.n();
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = f1 * self.hess[i * n + j] + f2 * self.grad[i] * self.grad[j];
            }
        }
        Self {
            value: f0,
            grad: self.grad.iter().map(|g| f1 * g).collect(),
            hess,
        }
    }

    fn add(&self, other: &Self, sign: f64) -> Self {
        Self {
            value: self.value + sign * other.value,
            grad: self
                .grad
                .iter()
                .zip(&other.grad)
                .map(|(a, b)| a + sign * b)
                .collect(),
            hess: self
                .hess
                .iter()
                .zip(&other.hess)
                .map(|(a, b)| a + sign * b)
                .collect(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        let n = self.n();
        let (a, b) = (self.value, other.value);
        let mut hess = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                hess[i * n + j] = self.hess[i * n + j] * b
                    + other.hess[i * n + j] * a
                    + self.grad[i] * other.grad[j]
                    + other.grad[i] * self.grad[j];
            }
        }
        Self {
            value: a * b,
            grad: self
                .grad
                .iter()
                .zip(&other.grad)
                .map(|(ga, gb)| ga * b + gb * a)
                .collect(),
            hess,
        }
    }

    fn recip(&self) -> Self {
        let a = self.value;
        self.compose((1.0 / a, -1.0 / (a * a), 2.0 / (a * a * a)))
    }

    fn powf(&self, c: f64) -> Self {
        let a = self.value;
        if c == 0.0 {
            return Self::constant(1.0, self.n());
        }
        let (f0, f1, f2) = if c.fract() == 0.0 && c.abs() < 64.0 {
            let k = c as i32;
            (a.powi(k), c * a.powi(k - 1), c * (c - 1.0) * a.powi(k - 2))
        } else {
            (
                a.powf(c),
                c * a.powf(c - 1.0),
                c * (c - 1.0) * a.powf(c - 2.0),
            )
        };
        // a^1 and a^2 have well-defined derivatives at a = 0
        let f2 = if c == 1.0 { 0.0 } else { f2 };
        let f1 = if c == 1.0 { 1.0 } else { f1 };
        self.compose((f0, f1, f2))
    }
}

fn eval_jet(node: &Node, args: &[f64]) -> Jet {
    let n = args.len();
    match node {
        Node::Const(c) => Jet::constant(*c, n),
        Node::Var(i) => Jet::variable(args[*i], *i, n),
        Node::Neg(a) => {
            let z = Jet::constant(0.0, n);
            z.add(&eval_jet(a, args), -1.0)
        }
        Node::Add(a, b) => eval_jet(a, args).add(&eval_jet(b, args), 1.0),
        Node::Sub(a, b) => eval_jet(a, args).add(&eval_jet(b, args), -1.0),
        Node::Mul(a, b) => eval_jet(a, args).mul(&eval_jet(b, args)),
        Node::Div(a, b) => eval_jet(a, args).mul(&eval_jet(b, args).recip()),
        Node::Pow(a, b) => {
            let base = eval_jet(a, args);
            match **b {
                Node::Const(c) => base.powf(c),
                _ => {
                    let expo = eval_jet(b, args);
                    let ln = base.compose(Func::Ln.eval3(base.value));
                    let prod = ln.mul(&expo);
                    prod.compose(Func::Exp.eval3(prod.value))
                }
            }
        }
        Node::Call(f, a) => {
            let inner = eval_jet(a, args);
            inner.compose(f.eval3(inner.value))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text
                .parse::<f64>()
                .map_err(|_| Error::Expression(format!("bad number `{text}`")))?;
            out.push(Token::Num(value));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else if c == '(' {
            out.push(Token::LParen);
            i += 1;
        } else if c == ')' {
            out.push(Token::RParen);
            i += 1;
        } else {
            return Err(Error::Expression(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            // right-associative, binds tighter than unary minus on the left
            let expo = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(expo)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.next() {
            Some(Token::Num(v)) => Ok(Node::Const(v)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.next() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(Error::Expression("missing `)`".into())),
                }
            }
            Some(Token::Ident(name)) => {
                if let Some(f) = Func::from_name(&name) {
                    match self.next() {
                        Some(Token::LParen) => {}
                        _ => {
                            return Err(Error::Expression(format!(
                                "`{}` must be followed by `(`",
                                f.name()
                            )))
                        }
                    }
                    let arg = self.expr()?;
                    match self.next() {
                        Some(Token::RParen) => Ok(Node::Call(f, Box::new(arg))),
                        _ => Err(Error::Expression("missing `)`".into())),
                    }
                } else if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                    Ok(Node::Var(idx))
                } else if name == "pi" {
                    Ok(Node::Const(std::f64::consts::PI))
                } else if name == "e" {
                    Ok(Node::Const(std::f64::consts::E))
                } else {
                    Err(Error::Expression(format!("unknown identifier `{name}`")))
                }
            }
            Some(tok) => Err(Error::Expression(format!("unexpected token {tok:?}"))),
            None => Err(Error::Expression("unexpected end of expression".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad(e: &Expr, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[i] += h;
                m[i] -= h;
                (e.eval(&p) - e.eval(&m)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn precedence_and_associativity() {
        let e = Expr::parse("2^3^2", &[]).unwrap();
        assert_eq!(e.eval(&[]), 512.0);
        let e = Expr::parse("-x^2 + 3*x - 1/2", &["x"]).unwrap();
        assert_eq!(e.eval(&[2.0]), -4.0 + 6.0 - 0.5);
        let e = Expr::parse("1e-3 * 2.5E2", &[]).unwrap();
        assert!((e.eval(&[]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn heaviside_is_right_continuous() {
        let e = Expr::parse("step(x)", &["x"]).unwrap();
        assert_eq!(e.eval(&[0.0]), 1.0);
        assert_eq!(e.eval(&[-1e-300]), 0.0);
    }

    #[test]
    fn jets_match_finite_differences() {
        let e = Expr::parse(
            "exp(-x^2)*cosh(y)/sqrt(pi) - ln(cosh(x*y)) + tanh(x)*sin(y)^2 + x^y",
            &["x", "y"],
        )
        .unwrap();
        let at = [0.7, 1.3];
        let jet = e.eval_jet(&at);
        assert!((jet.value - e.eval(&at)).abs() < 1e-14);
        let fd = fd_grad(&e, &at, 1e-6);
        for i in 0..2 {
            assert!(
                (jet.grad[i] - fd[i]).abs() < 1e-8,
                "{i}: {} vs {}",
                jet.grad[i],
                fd[i]
            );
        }
        // Hessian via differences of the jet gradient
        let h = 1e-6;
        for j in 0..2 {
            let mut p = at.to_vec();
            let mut m = at.to_vec();
            p[j] += h;
            m[j] -= h;
            let gp = e.eval_jet(&p).grad;
            let gm = e.eval_jet(&m).grad;
            for i in 0..2 {
                let fd = (gp[i] - gm[i]) / (2.0 * h);
                assert!((jet.hess[i * 2 + j] - fd).abs() < 1e-7);
            }
        }
        assert!((jet.hess[1] - jet.hess[2]).abs() < 1e-12);
    }

    #[test]
    fn rejects_unknown_names_and_garbage() {
        assert!(Expr::parse("foo(x)", &["x"]).is_err());
        assert!(Expr::parse("x +", &["x"]).is_err());
        assert!(Expr::parse("(x", &["x"]).is_err());
        assert!(Expr::parse("x $ 2", &["x"]).is_err());
        assert!(Expr::parse("y", &["x"]).is_err());
    }

    #[test]
    fn independence_query() {
        let e = Expr::parse("xi^2/2 + 0*1", &["x", "xi"]).unwrap();
        assert!(e.is_independent_of(0));
        assert!(!e.is_independent_of(1));
    }
}
