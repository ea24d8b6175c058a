//! Exact coefficient ring: sparse polynomials and rational functions over Q.

mod gcd;
mod poly;
mod ratfunc;

pub use poly::{Monomial, Poly, Vars};
pub use ratfunc::RatFunc;

use crate::error::Result;

/// Arbitrary-precision rational number.
pub type Scalar = num_rational::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(a: &Poly, b: &Poly, op: ArithOp) -> Result<Poly> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
    }
}

pub fn partial_derivative(p: &RatFunc, var: usize) -> Result<RatFunc> {
    p.derivative(var)
}

pub fn ratfunc_normalize(num: Poly, den: Poly) -> Result<RatFunc> {
    RatFunc::new(num, den)
}

pub fn rational(n: i64, d: i64) -> Scalar {
    Scalar::new(n.into(), d.into())
}
