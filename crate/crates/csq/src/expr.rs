//! Observable expressions: a small strict language over {u, theta, z, zbar, r}
//! with +, -, *, /, ^ (right-associative), parentheses, unary minus, and the
//! functions sin, cos, cot, exp.  No implicit multiplication, no constants.

use num_complex::Complex64;

use crate::error::{CsqError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    U,
    Theta,
    Z,
    Zbar,
    R,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::U => "u",
            Var::Theta => "theta",
            Var::Z => "z",
            Var::Zbar => "zbar",
            Var::R => "r",
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Func {
    Sin,
    Cos,
    Cot,
    Exp,
}

#[derive(Debug, Clone, Copy)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// Which variables an evaluation context supplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprContext {
    /// Radial profiles h(u); r is available as √u.
    Isotropic,
    /// Angular profiles g(θ).
    Angular,
    /// Full-plane observables f(z, z̄); u = |z|², r = |z|, theta = arg z.
    General,
}

impl ExprContext {
    fn allows(self, v: Var) -> bool {
        match self {
            ExprContext::Isotropic => matches!(v, Var::U | Var::R),
            ExprContext::Angular => matches!(v, Var::Theta),
            ExprContext::General => true,
        }
    }

    fn allowed_list(self) -> &'static str {
        match self {
            ExprContext::Isotropic => "u, r",
            ExprContext::Angular => "theta",
            ExprContext::General => "u, theta, z, zbar, r",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Expression {
    root: Node,
}

impl Expression {
    /// Parse `text` and reject variables the context cannot supply.
    pub fn parse(text: &str, context: ExprContext) -> Result<Self> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let root = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(CsqError::Parse(format!(
                "unexpected `{}` after a complete expression",
                p.tokens[p.pos].text()
            )));
        }
        let e = Self { root };
        for v in [Var::U, Var::Theta, Var::Z, Var::Zbar, Var::R] {
            if e.uses(v) && !context.allows(v) {
                return Err(CsqError::Parse(format!(
                    "variable `{}` is not available here (allowed: {})",
                    v.name(),
                    context.allowed_list()
                )));
            }
        }
        Ok(e)
    }

    pub fn uses(&self, v: Var) -> bool {
        fn walk(n: &Node, v: Var) -> bool {
            match n {
                Node::Num(_) => false,
                Node::Var(w) => *w == v,
                Node::Neg(a) | Node::Call(_, a) => walk(a, v),
                Node::Bin(_, a, b) => walk(a, v) || walk(b, v),
            }
        }
        walk(&self.root, v)
    }

    /// Evaluate a radial profile at u ≥ 0.
    pub fn eval_radial(&self, u: f64) -> f64 {
        eval_real(&self.root, u, u.max(0.0).sqrt(), 0.0)
    }

    /// Evaluate an angular profile at θ.
    pub fn eval_angular(&self, theta: f64) -> f64 {
        eval_real(&self.root, 0.0, 0.0, theta)
    }

    /// Evaluate a full-plane observable at z.
    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let r = z.norm();
        let mut theta = z.arg();
        if theta < 0.0 {
            theta += 2.0 * std::f64::consts::PI;
        }
        eval_c(&self.root, z, r, theta)
    }
}

fn eval_real(n: &Node, u: f64, r: f64, theta: f64) -> f64 {
    match n {
        Node::Num(x) => *x,
        Node::Var(Var::U) => u,
        Node::Var(Var::R) => r,
        Node::Var(Var::Theta) => theta,
        // parse-time validation keeps z/zbar out of real contexts
        Node::Var(_) => f64::NAN,
        Node::Neg(a) => -eval_real(a, u, r, theta),
        Node::Bin(op, a, b) => {
            let x = eval_real(a, u, r, theta);
            let y = eval_real(b, u, r, theta);
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x / y,
                BinOp::Pow => {
                    if y.fract() == 0.0 && y.abs() <= i32::MAX as f64 {
                        x.powi(y as i32)
                    } else {
                        x.powf(y)
                    }
                }
            }
        }
        Node::Call(f, a) => {
            let x = eval_real(a, u, r, theta);
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Cot => x.cos() / x.sin(),
                Func::Exp => x.exp(),
            }
        }
    }
}

fn eval_c(n: &Node, z: Complex64, r: f64, theta: f64) -> Complex64 {
    match n {
        Node::Num(x) => Complex64::new(*x, 0.0),
        Node::Var(Var::U) => Complex64::new(r * r, 0.0),
        Node::Var(Var::R) => Complex64::new(r, 0.0),
        Node::Var(Var::Theta) => Complex64::new(theta, 0.0),
        Node::Var(Var::Z) => z,
        Node::Var(Var::Zbar) => z.conj(),
        Node::Neg(a) => -eval_c(a, z, r, theta),
        Node::Bin(op, a, b) => {
            let x = eval_c(a, z, r, theta);
            let y = eval_c(b, z, r, theta);
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x / y,
                BinOp::Pow => {
                    if y.im == 0.0 && y.re.fract() == 0.0 && y.re.abs() <= i32::MAX as f64 {
                        x.powi(y.re as i32)
                    } else {
                        x.powc(y)
                    }
                }
            }
        }
        Node::Call(f, a) => {
            let x = eval_c(a, z, r, theta);
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Cot => x.cos() / x.sin(),
                Func::Exp => x.exp(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl Token {
    fn text(&self) -> String {
        match self {
            Token::Num(x) => format!("{x}"),
            Token::Ident(s) => s.clone(),
            Token::Plus => "+".into(),
            Token::Minus => "-".into(),
            Token::Star => "*".into(),
            Token::Slash => "/".into(),
            Token::Caret => "^".into(),
            Token::LParen => "(".into(),
            Token::RParen => ")".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s = &text[start..i];
                let x: f64 = s
                    .parse()
                    .map_err(|_| CsqError::Parse(format!("bad number `{s}`")))?;
                out.push(Token::Num(x));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push(Token::Ident(text[start..i].to_string()));
            }
            _ => {
                return Err(CsqError::Parse(format!(
                    "unexpected character `{c}` at byte {i}"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token) -> Result<()> {
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(CsqError::Parse(format!(
                "expected `{}`, found `{}`",
                want.text(),
                t.text()
            ))),
            None => Err(CsqError::Parse(format!(
                "expected `{}` at end of input",
                want.text()
            ))),
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    node = Node::Bin(BinOp::Add, Box::new(node), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    node = Node::Bin(BinOp::Sub, Box::new(node), Box::new(self.term()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut node = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    node = Node::Bin(BinOp::Mul, Box::new(node), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    node = Node::Bin(BinOp::Div, Box::new(node), Box::new(self.unary()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    // Right-associative: the exponent re-enters unary, so 2^3^2 = 2^(3^2)
    // and 2^-3 parses.
    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.bump() {
            Some(Token::Num(x)) => Ok(Node::Num(x)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                if matches!(self.peek(), Some(Token::LParen)) {
                    let f = match name.as_str() {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "cot" => Func::Cot,
                        "exp" => Func::Exp,
                        _ => {
                            return Err(CsqError::Parse(format!(
                                "unknown function `{name}` (have: sin, cos, cot, exp)"
                            )))
                        }
                    };
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(Token::RParen)?;
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                let v = match name.as_str() {
                    "u" => Var::U,
                    "theta" => Var::Theta,
                    "z" => Var::Z,
                    "zbar" => Var::Zbar,
                    "r" => Var::R,
                    _ => {
                        return Err(CsqError::Parse(format!(
                            "unknown variable `{name}` (have: u, theta, z, zbar, r)"
                        )))
                    }
                };
                Ok(Node::Var(v))
            }
            Some(t) => Err(CsqError::Parse(format!(
                "expected a value, found `{}`",
                t.text()
            ))),
            None if self.tokens.is_empty() => Err(CsqError::Parse("empty expression".into())),
            None => Err(CsqError::Parse("expected a value at end of input".into())),
        }
    }
}
