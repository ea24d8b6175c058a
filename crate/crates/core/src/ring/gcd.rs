//! Multivariate gcd over Q by recursive primitive remainder sequences.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use super::Scalar;

/// Monic gcd of `a` and `b`. `gcd(0, 0) = 0`.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.vars());
    }
    let arity = a.vars().len();
    let in_a: Vec<bool> = (0..arity).map(|v| !a.is_free_of(v)).collect();
    let in_b: Vec<bool> = (0..arity).map(|v| !b.is_free_of(v)).collect();

    // A variable present in only one operand divides out through the content.
    if let Some(v) = (0..arity).find(|&v| in_a[v] != in_b[v]) {
        return if in_a[v] {
            gcd(&content_in(a, v), b)
        } else {
            gcd(a, &content_in(b, v))
        };
    }
    let shared: Vec<usize> = (0..arity).filter(|&v| in_a[v]).collect();
    if shared.len() > 1 {
        let free: Vec<usize> = shared
            .iter()
            .copied()
            .filter(|&v| gcd_free_of(a, b, v))
            .collect();
        if free.len() == shared.len() {
            return Poly::one(a.vars());
        }
        if !free.is_empty() {
            return gcd(&content_wrt(a, &free), &content_wrt(b, &free));
        }
    }
    let v = (0..arity)
        .filter(|&v| in_a[v])
        .min_by_key(|&v| a.degree_in(v).unwrap_or(0).max(b.degree_in(v).unwrap_or(0)))
        .expect("non-constant polynomial has a variable");

    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let c = gcd(&ca, &cb);
    let mut p = integer_primitive(&a.div_exact(&ca).expect("content divides"));
    let mut q = integer_primitive(&b.div_exact(&cb).expect("content divides"));
    if p.degree_in(v) < q.degree_in(v) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        if q.degree_in(v) == Some(0) {
            // q is a nonzero polynomial free of v; primitive parts share no such factor
            return c.monic();
        }
        let r = pseudo_rem(&p, &q, v);
        p = q;
        q = if r.is_zero() { r } else { primitive_in(&r, v) };
    }
    (&primitive_in(&p, v) * &c).monic()
}

/// Certifies that `gcd(a, b)` does not involve `v`: specialize every other
/// variable to an integer keeping both leading coefficients in `v` nonzero; if
/// the univariate images are coprime, so is every factor involving `v`.
fn gcd_free_of(a: &Poly, b: &Poly, v: usize) -> bool {
    let vars = a.vars();
    let lead = |p: &Poly| p.coeffs_in(v).pop().expect("nonzero");
    let (la, lb) = (lead(a), lead(b));
    for attempt in 0..3i64 {
        let images: Vec<Poly> = (0..vars.len())
            .map(|i| {
                if i == v {
                    Poly::var(vars, v)
                } else {
                    Poly::integer(vars, 2 + (7 * i as i64 + 11 * attempt) % 23)
                }
            })
            .collect();
        let at = |p: &Poly| p.compose(&images).expect("same variables");
        if at(&la).is_zero() || at(&lb).is_zero() {
            continue;
        }
        return gcd(&at(a), &at(b)).is_one();
    }
    false
}

/// Gcd of the coefficients of `p` viewed as a polynomial in the variables `vs`.
fn content_wrt(p: &Poly, vs: &[usize]) -> Poly {
    let mut groups: std::collections::BTreeMap<Vec<u32>, Vec<(Vec<u32>, Scalar)>> =
        Default::default();
    for (m, c) in p.terms() {
        let key = vs.iter().map(|&v| m.exponents()[v]).collect();
        let mut rest = m.exponents().to_vec();
        for &v in vs {
            rest[v] = 0;
        }
        groups.entry(key).or_default().push((rest, c.clone()));
    }
    let mut g = Poly::zero(p.vars());
    for terms in groups.into_values() {
        g = gcd(&g, &Poly::from_terms(p.vars(), terms).expect("same arity"));
        if g.is_one() {
            break;
        }
    }
    g
}

fn content_in(p: &Poly, v: usize) -> Poly {
    let mut g = Poly::zero(p.vars());
    for c in p.coeffs_in(v) {
        if c.is_zero() {
            continue;
        }
        g = gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_in(p: &Poly, v: usize) -> Poly {
    let c = content_in(p, v);
    integer_primitive(&p.div_exact(&c).expect("content divides"))
}

/// Rescales to coprime integer coefficients, which keeps remainder
/// sequences from swelling.
fn integer_primitive(p: &Poly) -> Poly {
    let mut den = num_bigint::BigInt::one();
    let mut num = num_bigint::BigInt::zero();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
        num = num.gcd(c.numer());
    }
    if num.is_zero() {
        return p.clone();
    }
    p.scale(&Scalar::new(den, num.abs()))
}

/// A nonzero multiple of the remainder of `a` by `b` in the variable `v`.
fn pseudo_rem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let db = b.degree_in(v).unwrap_or(0);
    let lb = b.coeffs_in(v).pop().expect("nonzero");
    let mut r = a.clone();
    while !r.is_zero() {
        let dr = r.degree_in(v).unwrap_or(0);
        if dr < db {
            break;
        }
        let lr = r.coeffs_in(v).pop().expect("nonzero");
        r = &(&lb * &r) - &(&lr * &b.shift_in(v, dr - db));
    }
    r
}
