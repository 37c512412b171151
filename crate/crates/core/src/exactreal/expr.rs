use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact symbolic real constant built from integers, rationals, square roots
/// and field operations. Subtrees are shared, so cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ConstExpr(Arc<Node>);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Int(BigInt),
    Rat(BigRational),
    Sqrt(ConstExpr),
    Neg(ConstExpr),
    Add(ConstExpr, ConstExpr),
    Sub(ConstExpr, ConstExpr),
    Mul(ConstExpr, ConstExpr),
    Div(ConstExpr, ConstExpr),
}

impl ConstExpr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn wrap(node: Node) -> Self {
        ConstExpr(Arc::new(node))
    }

    pub fn int(n: impl Into<BigInt>) -> Self {
        Self::wrap(Node::Int(n.into()))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// Rational literal, stored gcd-reduced; integers collapse to `Int`.
    pub fn rational(q: BigRational) -> Self {
        if q.denom().is_one() {
            Self::int(q.numer().clone())
        } else {
            Self::wrap(Node::Rat(q))
        }
    }

    /// `p/q`; `None` when `q == 0`.
    pub fn ratio(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Option<Self> {
        let q = q.into();
        if q.is_zero() {
            return None;
        }
        Some(Self::rational(BigRational::new(p.into(), q)))
    }

    pub fn sqrt(arg: ConstExpr) -> Self {
        Self::wrap(Node::Sqrt(arg))
    }

    pub fn sqrt_int(n: impl Into<BigInt>) -> Self {
        Self::sqrt(Self::int(n))
    }

    /// The literal value when this node is an integer or rational literal.
    pub fn as_literal(&self) -> Option<BigRational> {
        match self.node() {
            Node::Int(n) => Some(BigRational::from_integer(n.clone())),
            Node::Rat(q) => Some(q.clone()),
            _ => None,
        }
    }

    pub fn depth(&self) -> usize {
        match self.node() {
            Node::Int(_) | Node::Rat(_) => 1,
            Node::Sqrt(a) | Node::Neg(a) => 1 + a.depth(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) | Node::Rat(_) => 2,
            Node::Neg(_) => 3,
            Node::Int(n) if n.is_negative() => 3,
            Node::Int(_) | Node::Sqrt(_) => 4,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &ConstExpr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for ConstExpr {
    /// Renders in the parseable constant grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &ConstExpr, op: &str, b: &ConstExpr, level: u8| {
            write_operand(f, a, a.precedence() < level)?;
            write!(f, "{op}")?;
            write_operand(f, b, b.precedence() <= level)
        };
        match self.node() {
            Node::Int(n) => write!(f, "{n}"),
            Node::Rat(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Node::Sqrt(a) => write!(f, "sqrt({a})"),
            Node::Neg(a) => {
                write!(f, "-")?;
                write_operand(f, a, a.precedence() < 3)
            }
            Node::Add(a, b) => binary(f, a, "+", b, 1),
            Node::Sub(a, b) => binary(f, a, "-", b, 1),
            Node::Mul(a, b) => binary(f, a, "*", b, 2),
            Node::Div(a, b) => binary(f, a, "/", b, 2),
        }
    }
}

impl fmt::Debug for ConstExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConstExpr({self})")
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl $trait<&ConstExpr> for &ConstExpr {
            type Output = ConstExpr;
            fn $method(self, rhs: &ConstExpr) -> ConstExpr {
                ConstExpr::wrap(Node::$variant(self.clone(), rhs.clone()))
            }
        }
        impl $trait<ConstExpr> for ConstExpr {
            type Output = ConstExpr;
            fn $method(self, rhs: ConstExpr) -> ConstExpr {
                ConstExpr::wrap(Node::$variant(self, rhs))
            }
        }
        impl $trait<&ConstExpr> for ConstExpr {
            type Output = ConstExpr;
            fn $method(self, rhs: &ConstExpr) -> ConstExpr {
                ConstExpr::wrap(Node::$variant(self, rhs.clone()))
            }
        }
        impl $trait<ConstExpr> for &ConstExpr {
            type Output = ConstExpr;
            fn $method(self, rhs: ConstExpr) -> ConstExpr {
                ConstExpr::wrap(Node::$variant(self.clone(), rhs))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl Neg for ConstExpr {
    type Output = ConstExpr;
    fn neg(self) -> ConstExpr {
        ConstExpr::wrap(Node::Neg(self))
    }
}

impl Neg for &ConstExpr {
    type Output = ConstExpr;
    fn neg(self) -> ConstExpr {
        ConstExpr::wrap(Node::Neg(self.clone()))
    }
}

impl From<i64> for ConstExpr {
    fn from(n: i64) -> Self {
        ConstExpr::int(n)
    }
}

impl From<BigInt> for ConstExpr {
    fn from(n: BigInt) -> Self {
        ConstExpr::int(n)
    }
}

impl From<BigRational> for ConstExpr {
    fn from(q: BigRational) -> Self {
        ConstExpr::rational(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_respects_precedence() {
        let two = ConstExpr::int(2);
        let s = ConstExpr::sqrt(two.clone());
        let third = ConstExpr::ratio(1, 3).unwrap();
        assert_eq!((&s / &third).to_string(), "sqrt(2)/(1/3)");
        assert_eq!((&s - &(&two + &s)).to_string(), "sqrt(2)-(2+sqrt(2))");
        assert_eq!((-(&two + &s)).to_string(), "-(2+sqrt(2))");
        assert_eq!((&(&two + &s) * &s).to_string(), "(2+sqrt(2))*sqrt(2)");
        assert_eq!(ConstExpr::ratio(6, 4).unwrap().to_string(), "3/2");
    }
}
