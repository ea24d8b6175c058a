use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::{Poly, Vars};
use super::Scalar;
use crate::error::{Error, Result};

/// Quotient of two polynomials in canonical form.
///
/// Invariants: the denominator is nonzero and monic in grlex order, and
/// numerator and denominator are coprime. Equal rational functions therefore
/// have identical representations, so `==` is semantic equality.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero(vars: &Vars) -> Self {
        RatFunc {
            num: Poly::zero(vars),
            den: Poly::one(vars),
        }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::from_poly(Poly::one(vars))
    }

    pub fn constant(vars: &Vars, c: Scalar) -> Self {
        Self::from_poly(Poly::constant(vars, c))
    }

    pub fn integer(vars: &Vars, c: i64) -> Self {
        Self::from_poly(Poly::integer(vars, c))
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        Self::from_poly(Poly::var(vars, i))
    }

    pub fn from_poly(p: Poly) -> Self {
        let den = Poly::one(p.vars());
        RatFunc { num: p, den }
    }

    /// Build `num / den` and bring it to canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if num.vars() != den.vars() {
            return Err(Error::ChartMismatch {
                left: format!("{:?}", num.vars()),
                right: format!("{:?}", den.vars()),
            });
        }
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero(num.vars());
        }
        if let Some(c) = den.constant_value() {
            let vars = num.vars().clone();
            return RatFunc {
                num: num.scale(&c.recip()),
                den: Poly::one(&vars),
            };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coefficient().expect("nonzero").clone();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    /// Re-normalize an arbitrary representation. Idempotent on canonical input.
    pub fn normalize(&self) -> Self {
        Self::normalized(self.num.clone(), self.den.clone())
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn is_free_of(&self, var: usize) -> bool {
        self.num.is_free_of(var) && self.den.is_free_of(var)
    }

    pub fn checked_add(&self, other: &RatFunc) -> Result<RatFunc> {
        self.num.check_same(&other.num)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.den == other.den {
            let num = &self.num + &other.num;
            if self.den.is_one() {
                return Ok(RatFunc::from_poly(num));
            }
            return Ok(Self::normalized(num, self.den.clone()));
        }
        // a/b + c/d with g = gcd(b, d): only g can share factors with the new numerator
        let g = gcd(&self.den, &other.den);
        let b = quotient(&self.den, &g);
        let d = quotient(&other.den, &g);
        let t = &(&self.num * &d) + &(&other.num * &b);
        if g.is_one() {
            return Ok(Self::coprime(t, &self.den * &other.den));
        }
        let h = gcd(&t, &g);
        Ok(Self::coprime(
            quotient(&t, &h),
            &b * &quotient(&other.den, &h),
        ))
    }

    pub fn checked_sub(&self, other: &RatFunc) -> Result<RatFunc> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &RatFunc) -> Result<RatFunc> {
        self.num.check_same(&other.num)?;
        if self.den.is_one() && other.den.is_one() {
            return Ok(RatFunc::from_poly(&self.num * &other.num));
        }
        Ok(Self::cross(&self.num, &self.den, &other.num, &other.den))
    }

    pub fn checked_div(&self, other: &RatFunc) -> Result<RatFunc> {
        self.num.check_same(&other.num)?;
        if other.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::cross(&self.num, &self.den, &other.den, &other.num))
    }

    /// `(a/b)(c/d)` for coprime pairs: only `a, d` and `c, b` can share factors.
    fn cross(a: &Poly, b: &Poly, c: &Poly, d: &Poly) -> Self {
        if a.is_zero() || c.is_zero() {
            return RatFunc::zero(a.vars());
        }
        let g1 = gcd(a, d);
        let g2 = gcd(c, b);
        Self::coprime(
            &quotient(a, &g1) * &quotient(c, &g2),
            &quotient(b, &g2) * &quotient(d, &g1),
        )
    }

    /// Canonical form of a fraction already known to be in lowest terms.
    fn coprime(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero(num.vars());
        }
        let lc = den
            .leading_coefficient()
            .expect("nonzero denominator")
            .clone();
        if lc.is_one() {
            RatFunc { num, den }
        } else {
            let inv = lc.recip();
            RatFunc {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn recip(&self) -> Result<RatFunc> {
        RatFunc::one(self.vars()).checked_div(self)
    }

    pub fn scale(&self, c: &Scalar) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero(self.vars());
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn scale_int(&self, c: i64) -> RatFunc {
        self.scale(&Scalar::from_integer(c.into()))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i32) -> Result<RatFunc> {
        if e >= 0 {
            Ok(RatFunc {
                num: self.num.pow(e as u32),
                den: self.den.pow(e as u32),
            }
            .normalize())
        } else {
            self.recip()?.pow(-e)
        }
    }

    /// Quotient-rule partial derivative in slot `var`.
    pub fn derivative(&self, var: usize) -> Result<RatFunc> {
        let dn = self.num.derivative(var)?;
        if self.den.is_one() {
            return Ok(RatFunc::from_poly(dn));
        }
        let dd = self.den.derivative(var)?;
        if dd.is_zero() {
            return Ok(Self::normalized(dn, self.den.clone()));
        }
        // (a/b)' = (a' b/g - a b'/g) / (b b/g) with g = gcd(b, b')
        let g = gcd(&self.den, &dd);
        let bg = quotient(&self.den, &g);
        let num = &(&dn * &bg) - &(&self.num * &quotient(&dd, &g));
        Ok(Self::normalized(num, &self.den * &bg))
    }

    /// Derivative by variable name.
    pub fn derivative_by(&self, name: &str) -> Result<RatFunc> {
        let i = self
            .vars()
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        self.derivative(i)
    }

    pub fn extend_to(&self, target: &Vars) -> Result<RatFunc> {
        Ok(RatFunc {
            num: self.num.extend_to(target)?,
            den: self.den.extend_to(target)?,
        })
    }

    pub fn restrict_to(&self, target: &Vars) -> Result<RatFunc> {
        Ok(RatFunc {
            num: self.num.restrict_to(target)?,
            den: self.den.restrict_to(target)?,
        })
    }

    pub fn compose(&self, images: &[RatFunc]) -> Result<RatFunc> {
        // substitute into numerator and denominator separately over a common denominator
        let target = images
            .first()
            .map(|r| r.vars().clone())
            .unwrap_or_else(|| self.vars().clone());
        let mut num = RatFunc::zero(&target);
        for (m, c) in self.num.terms() {
            num = &num + &monomial_image(m.exponents(), c, images, &target)?;
        }
        let mut den = RatFunc::zero(&target);
        for (m, c) in self.den.terms() {
            den = &den + &monomial_image(m.exponents(), c, images, &target)?;
        }
        num.checked_div(&den)
    }
}

fn quotient(a: &Poly, g: &Poly) -> Poly {
    if g.is_one() {
        a.clone()
    } else {
        a.div_exact(g).expect("exact division by a common factor")
    }
}

fn monomial_image(exps: &[u32], c: &Scalar, images: &[RatFunc], target: &Vars) -> Result<RatFunc> {
    if images.len() != exps.len() {
        return Err(Error::Structural("compose: wrong number of images".into()));
    }
    let mut t = RatFunc::constant(target, c.clone());
    for (i, &e) in exps.iter().enumerate() {
        if e > 0 {
            t = t.checked_mul(&images[i].pow(e as i32)?)?;
        }
    }
    Ok(t)
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        self.checked_add(rhs)
            .expect("rational function chart mismatch")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self.checked_sub(rhs)
            .expect("rational function chart mismatch")
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        self.checked_mul(rhs)
            .expect("rational function chart mismatch")
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self.checked_div(rhs)
            .expect("invalid rational function division")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = if self.num.num_terms() > 1 {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        // a bare variable power parses unambiguously after `/`
        let bare = self.den.num_terms() == 1
            && self.den.leading_coefficient().is_some_and(|c| c.is_one())
            && self
                .den
                .leading_term()
                .is_some_and(|(m, _)| m.exponents().iter().filter(|&&e| e > 0).count() == 1);
        if bare {
            write!(f, "{}/{}", num, self.den)
        } else {
            write!(f, "{}/({})", num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc[{}]", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v() -> Vars {
        Vars::new(["x1", "x2", "y1"])
    }

    fn x(i: usize) -> RatFunc {
        RatFunc::var(&v(), i)
    }

    #[test]
    fn power_rule() {
        let p = &(&x(0) * &x(0)) * &x(2);
        assert_eq!(p.derivative(0).unwrap(), (&x(0) * &x(2)).scale_int(2));
    }

    #[test]
    fn quotient_rule() {
        let one = RatFunc::one(&v());
        let q = &one + &(&x(0) * &x(0));
        let r = one.checked_div(&q).unwrap();
        let expected = x(0).scale_int(-2).checked_div(&(&q * &q)).unwrap();
        assert_eq!(r.derivative(0).unwrap(), expected);
        assert_eq!(r.derivative(1).unwrap(), RatFunc::zero(&v()));
    }

    #[test]
    fn normalize_common_factor_and_sign() {
        let vars = v();
        let x1 = Poly::var(&vars, 0);
        let two_x1_sq = (&x1 * &x1).scale(&Scalar::from_integer(2.into()));
        let r = RatFunc::new(two_x1_sq, x1.scale(&Scalar::from_integer(2.into()))).unwrap();
        assert_eq!(r, x(0));
        assert!(r.is_polynomial());
        let r = RatFunc::new(-&x1, Poly::integer(&vars, -1)).unwrap();
        assert_eq!(r.numerator(), &x1);
    }

    #[test]
    fn normalize_difference_of_squares() {
        let vars = v();
        let a = Poly::var(&vars, 0);
        let b = Poly::var(&vars, 1);
        let num = &(&a * &a) - &(&b * &b);
        let den = &a - &b;
        let r = RatFunc::new(num, den.clone()).unwrap();
        assert_eq!(r.numerator(), &(&a + &b));
        assert!(r.denominator().is_one());
        // re-multiplying recovers the input
        assert_eq!(
            &r * &RatFunc::from_poly(den),
            RatFunc::from_poly(&(&a * &a) - &(&b * &b))
        );
    }

    #[test]
    fn zero_denominator_is_rejected() {
        let vars = v();
        assert_eq!(
            RatFunc::new(Poly::one(&vars), Poly::zero(&vars)),
            Err(Error::ZeroDenominator)
        );
        assert!(x(0).checked_div(&RatFunc::zero(&vars)).is_err());
    }

    #[test]
    fn derivative_in_unknown_slot_errors() {
        assert!(x(0).derivative(7).is_err());
        assert!(x(0).derivative_by("z").is_err());
    }

    #[test]
    fn display_is_canonical() {
        let vars = Vars::new(["x1", "x2", "y1"]);
        let p = Poly::from_terms(
            &vars,
            [
                (vec![1, 0, 1], Scalar::from_integer(2.into())),
                (vec![0, 2, 0], Scalar::new(1.into(), 3.into())),
            ],
        )
        .unwrap();
        assert_eq!(p.to_string(), "2*x1*y1 + 1/3*x2^2");
        let one = RatFunc::one(&vars);
        let r = one.checked_div(&(&one + &(&x(0) * &x(0)))).unwrap();
        assert_eq!(r.to_string(), "1/(x1^2 + 1)");
    }
}
