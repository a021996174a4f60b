//! Predicates over lattice indices used to pick fixed nodes and removed
//! cells, e.g. `a == 0 && (b == 0 || b == B)`.
//!
//! Lower-case `a, b, c` are the indices of the node (or of a cell's lowest
//! corner); upper-case `A, B, C` are the largest node index on each axis.

use std::fmt;

/// Expression tree of a selector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    /// Index variable along an axis.
    Index(usize),
    /// Largest node index along an axis.
    Max(usize),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul)
    }

    fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Type {
    Int,
    Bool,
}

/// A parsed, type-checked boolean predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    expr: Expr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Token {
    Int(i64),
    Index(usize),
    Max(usize),
    Op(BinOp),
    Not,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let next = chars.get(i + 1).copied();
        let two = |op| (Token::Op(op), 2);
        let (tok, len) = match ch {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token::Int(s.parse().map_err(|_| format!("integer '{s}' out of range"))?));
                continue;
            }
            'a' | 'b' | 'c' => (Token::Index(ch as usize - 'a' as usize), 1),
            'A' | 'B' | 'C' => (Token::Max(ch as usize - 'A' as usize), 1),
            '(' => (Token::LParen, 1),
            ')' => (Token::RParen, 1),
            '+' => (Token::Op(BinOp::Add), 1),
            '-' => (Token::Op(BinOp::Sub), 1),
            '*' => (Token::Op(BinOp::Mul), 1),
            '=' if next == Some('=') => two(BinOp::Eq),
            '!' if next == Some('=') => two(BinOp::Ne),
            '!' => (Token::Not, 1),
            '<' if next == Some('=') => two(BinOp::Le),
            '<' => (Token::Op(BinOp::Lt), 1),
            '>' if next == Some('=') => two(BinOp::Ge),
            '>' => (Token::Op(BinOp::Gt), 1),
            '&' if next == Some('&') => two(BinOp::And),
            '|' if next == Some('|') => two(BinOp::Or),
            other => return Err(format!("unexpected character '{other}' in selector")),
        };
        if let (Token::Index(_) | Token::Max(_), Some(c)) = (tok, next) {
            if c.is_ascii_alphanumeric() || c == '_' {
                return Err(format!("unknown name starting with '{ch}{c}'"));
            }
        }
        out.push(tok);
        i += len;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).copied()
    }

    fn eat_op(&mut self, ops: &[BinOp]) -> Option<BinOp> {
        match self.peek() {
            Some(Token::Op(op)) if ops.contains(&op) => {
                self.pos += 1;
                Some(op)
            }
            _ => None,
        }
    }

    fn left_assoc(&mut self, ops: &[BinOp], next: fn(&mut Self) -> Result<Expr, String>) -> Result<Expr, String> {
        let mut lhs = next(self)?;
        while let Some(op) = self.eat_op(ops) {
            let rhs = next(self)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, String> {
        self.left_assoc(&[BinOp::Or], Self::and)
    }

    fn and(&mut self) -> Result<Expr, String> {
        self.left_assoc(&[BinOp::And], Self::not)
    }

    fn not(&mut self) -> Result<Expr, String> {
        if self.peek() == Some(Token::Not) {
            self.pos += 1;
            return Ok(Expr::Not(Box::new(self.not()?)));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, String> {
        let lhs = self.sum()?;
        let cmp = [BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge];
        match self.eat_op(&cmp) {
            Some(op) => Ok(Expr::Binary(op, Box::new(lhs), Box::new(self.sum()?))),
            None => Ok(lhs),
        }
    }

    fn sum(&mut self) -> Result<Expr, String> {
        self.left_assoc(&[BinOp::Add, BinOp::Sub], Self::product)
    }

    fn product(&mut self) -> Result<Expr, String> {
        self.left_assoc(&[BinOp::Mul], Self::unary)
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.eat_op(&[BinOp::Sub]).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let tok = self.peek().ok_or("unexpected end of selector")?;
        self.pos += 1;
        match tok {
            Token::Int(v) => Ok(Expr::Int(v)),
            Token::Index(k) => Ok(Expr::Index(k)),
            Token::Max(k) => Ok(Expr::Max(k)),
            Token::LParen => {
                let e = self.or()?;
                if self.peek() != Some(Token::RParen) {
                    return Err("missing ')'".into());
                }
                self.pos += 1;
                Ok(e)
            }
            _ => Err("expected a number, an index or '('".into()),
        }
    }
}

fn type_of(e: &Expr) -> Result<Type, String> {
    let want = |e: &Expr, t: Type| -> Result<(), String> {
        if type_of(e)? == t {
            Ok(())
        } else {
            Err(format!("'{}' has the wrong type", Display(e, 0)))
        }
    };
    match e {
        Expr::Int(_) | Expr::Index(_) | Expr::Max(_) => Ok(Type::Int),
        Expr::Neg(x) => want(x, Type::Int).map(|_| Type::Int),
        Expr::Not(x) => want(x, Type::Bool).map(|_| Type::Bool),
        Expr::Binary(op, l, r) => {
            let operand = if op.is_logical() { Type::Bool } else { Type::Int };
            want(l, operand)?;
            want(r, operand)?;
            Ok(if op.is_arithmetic() { Type::Int } else { Type::Bool })
        }
    }
}

fn max_axis(e: &Expr) -> Option<usize> {
    match e {
        Expr::Int(_) => None,
        Expr::Index(k) | Expr::Max(k) => Some(*k),
        Expr::Neg(x) | Expr::Not(x) => max_axis(x),
        Expr::Binary(_, l, r) => max_axis(l).max(max_axis(r)),
    }
}

fn eval(e: &Expr, idx: &[usize], max: &[usize]) -> i64 {
    match e {
        Expr::Int(v) => *v,
        Expr::Index(k) => idx[*k] as i64,
        Expr::Max(k) => max[*k] as i64,
        Expr::Neg(x) => eval(x, idx, max).wrapping_neg(),
        Expr::Not(x) => (eval(x, idx, max) == 0) as i64,
        Expr::Binary(op, l, r) => {
            let a = eval(l, idx, max);
            if op.is_logical() {
                let short = match op {
                    BinOp::And => a == 0,
                    _ => a != 0,
                };
                return if short { (a != 0) as i64 } else { (eval(r, idx, max) != 0) as i64 };
            }
            let b = eval(r, idx, max);
            match op {
                BinOp::Add => a.wrapping_add(b),
                BinOp::Sub => a.wrapping_sub(b),
                BinOp::Mul => a.wrapping_mul(b),
                BinOp::Eq => (a == b) as i64,
                BinOp::Ne => (a != b) as i64,
                BinOp::Lt => (a < b) as i64,
                BinOp::Le => (a <= b) as i64,
                BinOp::Gt => (a > b) as i64,
                BinOp::Ge => (a >= b) as i64,
                BinOp::And | BinOp::Or => unreachable!(),
            }
        }
    }
}

impl Selector {
    pub fn parse(text: &str) -> Result<Self, String> {
        let tokens = tokenize(text)?;
        if tokens.is_empty() {
            return Err("empty selector".into());
        }
        let mut p = Parser { tokens, pos: 0 };
        let expr = p.or()?;
        if p.pos != p.tokens.len() {
            return Err("unexpected trailing input in selector".into());
        }
        if type_of(&expr)? != Type::Bool {
            return Err("selector must be a condition, e.g. `a == 0`".into());
        }
        Ok(Selector { expr })
    }

    /// Largest axis referred to, so `c` or `C` needs a 3D lattice.
    pub fn dimension_needed(&self) -> usize {
        max_axis(&self.expr).map_or(0, |k| k + 1)
    }

    pub fn matches(&self, idx: &[usize], max: &[usize]) -> bool {
        eval(&self.expr, idx, max) != 0
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

/// Precedence levels, loosest first.
fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Or, ..) => 1,
        Expr::Binary(BinOp::And, ..) => 2,
        Expr::Not(_) => 3,
        Expr::Binary(op, ..) if !op.is_arithmetic() => 4,
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 5,
        Expr::Binary(..) => 6,
        Expr::Neg(_) => 7,
        _ => 8,
    }
}

/// Prints with parentheses wherever re-parsing would otherwise build a
/// different tree.
struct Display<'a>(&'a Expr, u8);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Display(e, min) = *self;
        let own = precedence(e);
        let wrap = own < min;
        if wrap {
            f.write_str("(")?;
        }
        match e {
            Expr::Int(v) => write!(f, "{v}")?,
            Expr::Index(k) => write!(f, "{}", (b'a' + *k as u8) as char)?,
            Expr::Max(k) => write!(f, "{}", (b'A' + *k as u8) as char)?,
            Expr::Neg(x) => write!(f, "-{}", Display(x, own))?,
            Expr::Not(x) => write!(f, "!{}", Display(x, own))?,
            Expr::Binary(op, l, r) => {
                // Comparisons do not chain, so both sides bind tighter.
                let left_min = if own == 4 { own + 1 } else { own };
                write!(f, "{} {} {}", Display(l, left_min), op.symbol(), Display(r, own + 1))?
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display(&self.expr, 0).fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sel(s: &str) -> Selector {
        Selector::parse(s).unwrap()
    }

    #[test]
    fn simple_predicates() {
        let s = sel("a == 0");
        assert!(s.matches(&[0, 3], &[4, 4]));
        assert!(!s.matches(&[1, 3], &[4, 4]));
        let top = sel("b == B && (a == 0 || a == A)");
        assert!(top.matches(&[4, 4], &[4, 4]));
        assert!(!top.matches(&[2, 4], &[4, 4]));
        assert!(sel("!(a < 2) && a <= A - 2").matches(&[2, 0], &[4, 4]));
        assert!(sel("a * 2 >= A").matches(&[2, 0], &[4, 4]));
        assert!(sel("-a + 1 > -1").matches(&[1, 0], &[4, 4]));
    }

    #[test]
    fn precedence_of_and_over_or() {
        let s = sel("a == 0 || a == 1 && b == 1");
        assert!(s.matches(&[0, 0], &[2, 2]));
        assert!(!s.matches(&[1, 0], &[2, 2]));
    }

    #[test]
    fn dimension_needed() {
        assert_eq!(sel("a == 0").dimension_needed(), 1);
        assert_eq!(sel("c == C").dimension_needed(), 3);
        assert_eq!(sel("1 == 1").dimension_needed(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        for bad in [
            "",
            "a",
            "a +",
            "a == ",
            "(a == 0",
            "a == 0)",
            "x == 1",
            "ab == 1",
            "a & b",
            "a == 0 + (b < 1)",
            "!a",
            "a == b == c",
        ] {
            assert!(Selector::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "a == 0",
            "(a == 0 || b == 0) && c == C",
            "!(a < 2 && b > 1)",
            "a - (b - 1) == 0",
            "a == 0 || a == 1 && b == 1",
            "-(a + 1) * 2 < B",
            "!!(a != 0)",
        ] {
            let s = sel(text);
            let again = sel(&s.to_string());
            assert_eq!(s, again, "{text} -> {s}");
        }
    }
}
