//! A small closed-form expression language in one variable.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?            right associative
//! atom   := number | 'r' | 't' | 'pi' | func '(' expr ')' | 'indicator' '(' expr ',' expr ')' | '(' expr ')'
//! func   := exp | log | ln | sqrt | abs
//! ```
//!
//! `r` and `t` both name the single free variable. `indicator(a, b)` is 1 on
//! `a <= x < b` and 0 elsewhere; its endpoints must be constant.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Exp(Box<Node>),
    Log(Box<Node>),
    Sqrt(Box<Node>),
    Abs(Box<Node>),
    Indicator(f64, f64),
}

/// A parsed expression. Cheap to clone.
#[derive(Clone)]
pub struct Expr {
    source: Arc<str>,
    root: Arc<Node>,
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({:?})", self.source)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let node = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(Expr { source: Arc::from(src.trim()), root: Arc::new(node) })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: f64) -> f64 {
        eval(&self.root, x)
    }

    /// Symbolic derivative with respect to the free variable.
    pub fn derivative(&self) -> Derivative {
        Derivative { root: Arc::new(simplify(diff(&self.root))) }
    }

    /// True when the expression does not mention the variable.
    pub fn is_constant(&self) -> bool {
        !mentions_var(&self.root)
    }

    /// Sorted, de-duplicated jump locations of every indicator.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        collect_breaks(&self.root, &mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Right edge of the support when the expression is a product whose
    /// factors include an indicator.
    pub fn support_bound(&self) -> Option<f64> {
        support(&self.root)
    }
}

/// Derivative of an [`Expr`]; evaluation only.
#[derive(Debug, Clone)]
pub struct Derivative {
    root: Arc<Node>,
}

impl Derivative {
    pub fn eval(&self, x: f64) -> f64 {
        eval(&self.root, x)
    }
}

fn eval(n: &Node, x: f64) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::Var => x,
        Node::Neg(a) => -eval(a, x),
        Node::Add(a, b) => eval(a, x) + eval(b, x),
        Node::Sub(a, b) => eval(a, x) - eval(b, x),
        Node::Mul(a, b) => eval(a, x) * eval(b, x),
        Node::Div(a, b) => eval(a, x) / eval(b, x),
        Node::Pow(a, b) => {
            let base = eval(a, x);
            match **b {
                Node::Num(e) if e == e.trunc() && e.abs() <= 64.0 => base.powi(e as i32),
                _ => base.powf(eval(b, x)),
            }
        }
        Node::Exp(a) => eval(a, x).exp(),
        Node::Log(a) => eval(a, x).ln(),
        Node::Sqrt(a) => eval(a, x).sqrt(),
        Node::Abs(a) => eval(a, x).abs(),
        Node::Indicator(lo, hi) => {
            if x >= *lo && x < *hi {
                1.0
            } else {
                0.0
            }
        }
    }
}

fn mentions_var(n: &Node) -> bool {
    match n {
        Node::Num(_) => false,
        Node::Var | Node::Indicator(..) => true,
        Node::Neg(a) | Node::Exp(a) | Node::Log(a) | Node::Sqrt(a) | Node::Abs(a) => mentions_var(a),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
            mentions_var(a) || mentions_var(b)
        }
    }
}

fn collect_breaks(n: &Node, out: &mut Vec<f64>) {
    match n {
        Node::Num(_) | Node::Var => {}
        Node::Indicator(lo, hi) => {
            out.push(*lo);
            out.push(*hi);
        }
        Node::Neg(a) | Node::Exp(a) | Node::Log(a) | Node::Sqrt(a) | Node::Abs(a) => collect_breaks(a, out),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
            collect_breaks(a, out);
            collect_breaks(b, out);
        }
    }
}

fn support(n: &Node) -> Option<f64> {
    match n {
        Node::Indicator(_, hi) => Some(*hi),
        Node::Num(v) if *v == 0.0 => Some(0.0),
        Node::Mul(a, b) => match (support(a), support(b)) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (s, None) | (None, s) => s,
        },
        Node::Div(a, _) => support(a),
        Node::Neg(a) => support(a),
        Node::Pow(a, b) => match **b {
            Node::Num(e) if e > 0.0 => support(a),
            _ => None,
        },
        Node::Add(a, b) | Node::Sub(a, b) => match (support(a), support(b)) {
            (Some(x), Some(y)) => Some(x.max(y)),
            _ => None,
        },
        _ => None,
    }
}

fn num(v: f64) -> Box<Node> {
    Box::new(Node::Num(v))
}

fn diff(n: &Node) -> Node {
    use Node::*;
    match n {
        Num(_) | Indicator(..) => Num(0.0),
        Var => Num(1.0),
        Neg(a) => Neg(Box::new(diff(a))),
        Add(a, b) => Add(Box::new(diff(a)), Box::new(diff(b))),
        Sub(a, b) => Sub(Box::new(diff(a)), Box::new(diff(b))),
        Mul(a, b) => Add(Box::new(Mul(Box::new(diff(a)), b.clone())), Box::new(Mul(a.clone(), Box::new(diff(b))))),
        Div(a, b) => Div(
            Box::new(Sub(Box::new(Mul(Box::new(diff(a)), b.clone())), Box::new(Mul(a.clone(), Box::new(diff(b)))))),
            Box::new(Pow(b.clone(), num(2.0))),
        ),
        Pow(a, b) => {
            if !mentions_var(b) {
                // c * a^(c-1) * a'
                Mul(
                    Box::new(Mul(b.clone(), Box::new(Pow(a.clone(), Box::new(Sub(b.clone(), num(1.0))))))),
                    Box::new(diff(a)),
                )
            } else {
                // a^b * (b' ln a + b a'/a)
                Mul(
                    Box::new(n.clone()),
                    Box::new(Add(
                        Box::new(Mul(Box::new(diff(b)), Box::new(Log(a.clone())))),
                        Box::new(Div(Box::new(Mul(b.clone(), Box::new(diff(a)))), a.clone())),
                    )),
                )
            }
        }
        Exp(a) => Mul(Box::new(n.clone()), Box::new(diff(a))),
        Log(a) => Div(Box::new(diff(a)), a.clone()),
        Sqrt(a) => Div(Box::new(diff(a)), Box::new(Mul(num(2.0), Box::new(n.clone())))),
        Abs(a) => Mul(Box::new(Div(a.clone(), Box::new(n.clone()))), Box::new(diff(a))),
    }
}

fn is_num(n: &Node, v: f64) -> bool {
    matches!(n, Node::Num(x) if *x == v)
}

fn simplify(n: Node) -> Node {
    use Node::*;
    match n {
        Neg(a) => match simplify(*a) {
            Num(v) => Num(-v),
            a => Neg(Box::new(a)),
        },
        Add(a, b) => match (simplify(*a), simplify(*b)) {
            (Num(x), Num(y)) => Num(x + y),
            (a, b) if is_num(&b, 0.0) => a,
            (a, b) if is_num(&a, 0.0) => b,
            (a, b) => Add(Box::new(a), Box::new(b)),
        },
        Sub(a, b) => match (simplify(*a), simplify(*b)) {
            (Num(x), Num(y)) => Num(x - y),
            (a, b) if is_num(&b, 0.0) => a,
            (a, b) if is_num(&a, 0.0) => Neg(Box::new(b)),
            (a, b) => Sub(Box::new(a), Box::new(b)),
        },
        Mul(a, b) => match (simplify(*a), simplify(*b)) {
            (Num(x), Num(y)) => Num(x * y),
            (a, b) if is_num(&a, 0.0) || is_num(&b, 0.0) => Num(0.0),
            (a, b) if is_num(&a, 1.0) => b,
            (a, b) if is_num(&b, 1.0) => a,
            (a, b) => Mul(Box::new(a), Box::new(b)),
        },
        Div(a, b) => match (simplify(*a), simplify(*b)) {
            (a, _) if is_num(&a, 0.0) => Num(0.0),
            (a, b) if is_num(&b, 1.0) => a,
            (a, b) => Div(Box::new(a), Box::new(b)),
        },
        Pow(a, b) => match (simplify(*a), simplify(*b)) {
            (_, b) if is_num(&b, 0.0) => Num(1.0),
            (a, b) if is_num(&b, 1.0) => a,
            (a, b) => Pow(Box::new(a), Box::new(b)),
        },
        Exp(a) => Exp(Box::new(simplify(*a))),
        Log(a) => Log(Box::new(simplify(*a))),
        Sqrt(a) => Sqrt(Box::new(simplify(*a))),
        Abs(a) => Abs(Box::new(simplify(*a))),
        other => other,
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(self.err(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let s = self.src;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mut look = self.pos + 1;
            if look < s.len() && (s[look] == b'+' || s[look] == b'-') {
                look += 1;
            }
            if look < s.len() && s[look].is_ascii_digit() {
                self.pos = look;
                while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Node::Num)
            .map_err(|_| Error::Parse { pos: start, msg: format!("invalid number '{text}'") })
    }

    fn ident(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match name {
            "r" | "t" | "x" | "s" => Ok(Node::Var),
            "pi" => Ok(Node::Num(std::f64::consts::PI)),
            "exp" | "log" | "ln" | "sqrt" | "abs" => {
                self.expect(b'(')?;
                let a = Box::new(self.expr()?);
                self.expect(b')')?;
                Ok(match name {
                    "exp" => Node::Exp(a),
                    "sqrt" => Node::Sqrt(a),
                    "abs" => Node::Abs(a),
                    _ => Node::Log(a),
                })
            }
            "indicator" => {
                self.expect(b'(')?;
                let at = self.pos;
                let lo = self.expr()?;
                self.expect(b',')?;
                let hi = self.expr()?;
                self.expect(b')')?;
                if mentions_var(&lo) || mentions_var(&hi) {
                    return Err(Error::Parse { pos: at, msg: "indicator endpoints must be constant".into() });
                }
                Ok(Node::Indicator(eval(&lo, 0.0), eval(&hi, 0.0)))
            }
            _ => Err(Error::Parse { pos: start, msg: format!("unknown identifier '{name}'") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64) -> f64 {
        Expr::parse(s).unwrap().eval(x)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1+2*3", 0.0), 7.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("-2^2", 0.0), -4.0);
        assert_eq!(ev("(1+r)^-2", 1.0), 0.25);
        assert_eq!(ev("8/2/2", 0.0), 2.0);
        assert_eq!(ev("1e-3*1E3", 0.0), 1.0);
    }

    #[test]
    fn functions_and_constants() {
        assert!((ev("exp(-r^2)", 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((ev("log(1+r)", 1.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(ev("sqrt(t)", 4.0), 2.0);
        assert_eq!(ev("pi", 0.0), std::f64::consts::PI);
        assert_eq!(ev("abs(r-3)", 1.0), 2.0);
    }

    #[test]
    fn indicator_is_half_open() {
        assert_eq!(ev("indicator(0,1)", 0.0), 1.0);
        assert_eq!(ev("indicator(0,1)", 0.999), 1.0);
        assert_eq!(ev("indicator(0,1)", 1.0), 0.0);
        let e = Expr::parse("indicator(0.5, 2) + indicator(1, 3)").unwrap();
        assert_eq!(e.breakpoints(), vec![0.5, 1.0, 2.0, 3.0]);
        assert_eq!(Expr::parse("r^2*indicator(0,2)").unwrap().support_bound(), Some(2.0));
        assert_eq!(Expr::parse("exp(-r)").unwrap().support_bound(), None);
    }

    #[test]
    fn parse_errors_carry_position() {
        for bad in ["", "1+", "(1", "foo(2)", "1 2", "indicator(r,1)", "2**3"] {
            assert!(matches!(Expr::parse(bad), Err(Error::Parse { .. })), "{bad}");
        }
        match Expr::parse("1 + $") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn derivative_matches_hand_forms() {
        type Case = (&'static str, fn(f64) -> f64);
        let cases: [Case; 5] = [
            ("(1+r)^-2", |x| -2.0 * (1.0 + x).powi(-3)),
            ("exp(-r^2)", |x| -2.0 * x * (-x * x).exp()),
            ("1/sqrt(1+t^2)", |x| -x * (1.0 + x * x).powf(-1.5)),
            ("r^r", |x| x.powf(x) * (x.ln() + 1.0)),
            ("log(2+r)*r", |x| (2.0 + x).ln() + x / (2.0 + x)),
        ];
        for (src, d) in cases {
            let e = Expr::parse(src).unwrap().derivative();
            for x in [0.3, 1.0, 2.7] {
                assert!((e.eval(x) - d(x)).abs() < 1e-13 * (1.0 + d(x).abs()), "{src} at {x}");
            }
        }
    }

    #[test]
    fn constant_detection() {
        assert!(Expr::parse("2*pi").unwrap().is_constant());
        assert!(!Expr::parse("indicator(0,1)").unwrap().is_constant());
    }
}
