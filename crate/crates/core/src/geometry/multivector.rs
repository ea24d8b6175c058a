use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::{Chart, OneForm};
use crate::error::{Error, Result};
use crate::ring::RatFunc;

/// Sort an index tuple, returning the permutation sign; `None` on a repeated index.
pub(crate) fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// Sign and sorted union of two disjoint increasing tuples; `None` if they overlap.
fn merge(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut cat = a.to_vec();
    cat.extend_from_slice(b);
    sort_with_sign(&cat)
}

/// A skew contravariant tensor field `P = sum_{i1<...<ik} P^{i1...ik} d_i1 ^ ... ^ d_ik`.
///
/// One component is stored per strictly increasing index tuple (0-based
/// slots), so the bivector `w = 1/2 w^{ij} d_i ^ d_j` stores `w^{ij}` for `i < j`.
/// Degree 0 holds a single function under the empty key.
#[derive(Clone, PartialEq, Eq)]
pub struct Multivector {
    chart: Chart,
    degree: usize,
    comps: BTreeMap<Vec<usize>, RatFunc>,
}

impl Multivector {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        Multivector {
            chart: chart.clone(),
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn function(chart: &Chart, f: RatFunc) -> Result<Self> {
        chart.check_fn(&f)?;
        let mut m = Self::zero(chart, 0);
        if !f.is_zero() {
            m.comps.insert(Vec::new(), f);
        }
        Ok(m)
    }

    pub fn vector(chart: &Chart, comps: Vec<RatFunc>) -> Result<Self> {
        if comps.len() != chart.arity() {
            return Err(Error::Structural(format!(
                "vector field needs {} components, got {}",
                chart.arity(),
                comps.len()
            )));
        }
        Self::from_entries(
            chart,
            1,
            comps.into_iter().enumerate().map(|(i, f)| (vec![i], f)),
        )
    }

    /// `d_{i1} ^ ... ^ d_{ik}` for the given slots (any order).
    pub fn basis(chart: &Chart, idx: &[usize]) -> Result<Self> {
        Self::from_entries(chart, idx.len(), [(idx.to_vec(), chart.one())])
    }

    /// Sum of `value * d_I` over the entries; tuples may be unsorted.
    pub fn from_entries(
        chart: &Chart,
        degree: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, RatFunc)>,
    ) -> Result<Self> {
        let mut m = Self::zero(chart, degree);
        for (idx, f) in entries {
            if idx.len() != degree {
                return Err(Error::Structural(format!(
                    "index tuple {idx:?} does not have length {degree}"
                )));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= chart.arity()) {
                return Err(Error::Structural(format!("index {bad} out of range")));
            }
            chart.check_fn(&f)?;
            let (sorted, sign) = sort_with_sign(&idx)
                .ok_or_else(|| Error::Structural(format!("repeated index in {idx:?}")))?;
            m.add_to(sorted, if sign < 0 { -&f } else { f });
        }
        Ok(m)
    }

    fn add_to(&mut self, key: Vec<usize>, f: RatFunc) {
        if f.is_zero() {
            return;
        }
        match self.comps.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(f);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &f;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Stored components keyed by increasing slot tuples.
    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &RatFunc)> {
        self.comps.iter()
    }

    /// Component for any ordering of distinct slots (sign-adjusted); zero otherwise.
    pub fn component(&self, idx: &[usize]) -> RatFunc {
        match sort_with_sign(idx) {
            Some((key, sign)) => match self.comps.get(&key) {
                Some(f) if sign < 0 => -f,
                Some(f) => f.clone(),
                None => self.chart.zero(),
            },
            None => self.chart.zero(),
        }
    }

    pub fn as_function(&self) -> Option<RatFunc> {
        (self.degree == 0).then(|| self.component(&[]))
    }

    pub fn vector_components(&self) -> Result<Vec<RatFunc>> {
        if self.degree != 1 {
            return Err(Error::Structural(format!(
                "expected a vector field, got degree {}",
                self.degree
            )));
        }
        Ok((0..self.chart.arity())
            .map(|i| self.component(&[i]))
            .collect())
    }

    /// Directional derivative `X f` of a function along a vector field.
    pub fn apply(&self, f: &RatFunc) -> Result<RatFunc> {
        if self.degree != 1 {
            return Err(Error::Structural(
                "only vector fields act on functions".into(),
            ));
        }
        self.chart.check_fn(f)?;
        let mut out = self.chart.zero();
        for (k, x) in &self.comps {
            out = &out + &(x * &f.derivative(k[0])?);
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &Multivector) -> Result<()> {
        self.chart.check_same(&other.chart)?;
        if self.degree != other.degree {
            return Err(Error::Structural(format!(
                "degree mismatch: {} vs {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Multivector) -> Result<Multivector> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, f) in &other.comps {
            out.add_to(k.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Multivector) -> Result<Multivector> {
        self.checked_add(&-other)
    }

    /// Multiply every component by a function.
    pub fn scale(&self, f: &RatFunc) -> Multivector {
        let mut out = Multivector::zero(&self.chart, self.degree);
        for (k, c) in &self.comps {
            out.add_to(k.clone(), c * f);
        }
        out
    }

    pub fn scale_int(&self, c: i64) -> Multivector {
        self.map(|f| Ok(f.scale_int(c))).expect("infallible")
    }

    /// Apply `op` to each stored component.
    pub fn map(&self, op: impl Fn(&RatFunc) -> Result<RatFunc>) -> Result<Multivector> {
        let mut out = Multivector::zero(&self.chart, self.degree);
        for (k, c) in &self.comps {
            out.add_to(k.clone(), op(c)?);
        }
        Ok(out)
    }

    /// Componentwise partial derivative.
    pub fn derivative(&self, slot: usize) -> Result<Multivector> {
        self.map(|f| f.derivative(slot))
    }

    /// Exterior product with shuffle signs; zero when the degree exceeds the arity.
    pub fn wedge(&self, other: &Multivector) -> Result<Multivector> {
        self.chart.check_same(&other.chart)?;
        let mut out = Multivector::zero(&self.chart, self.degree + other.degree);
        if self.degree + other.degree > self.chart.arity() {
            return Ok(out);
        }
        for (a, f) in &self.comps {
            for (b, g) in &other.comps {
                if let Some((key, sign)) = merge(a, b) {
                    out.add_to(key, (f * g).scale_int(sign));
                }
            }
        }
        Ok(out)
    }

    /// Left interior product `i_alpha P` (contracts the first slot).
    pub fn contract(&self, alpha: &OneForm) -> Result<Multivector> {
        self.chart.check_same(alpha.chart())?;
        if self.degree == 0 {
            return Err(Error::Structural("cannot contract a function".into()));
        }
        let mut out = Multivector::zero(&self.chart, self.degree - 1);
        for (key, f) in &self.comps {
            for (pos, &a) in key.iter().enumerate() {
                let coef = alpha.component(a);
                if coef.is_zero() {
                    continue;
                }
                let mut rest = key.clone();
                rest.remove(pos);
                let term = &coef * f;
                out.add_to(rest, if pos % 2 == 1 { -&term } else { term });
            }
        }
        Ok(out)
    }

    /// `P(alpha_1, ..., alpha_k)` with `(d_a ^ d_b)(alpha, beta) = alpha_a beta_b - alpha_b beta_a`.
    pub fn evaluate(&self, forms: &[OneForm]) -> Result<RatFunc> {
        if forms.len() != self.degree {
            return Err(Error::Structural(format!(
                "a degree-{} multivector takes {} arguments",
                self.degree, self.degree
            )));
        }
        let mut cur = self.clone();
        for a in forms {
            cur = cur.contract(a)?;
        }
        Ok(cur.component(&[]))
    }

    /// Reinterpret on a chart whose leading slots are ours (base -> tangent).
    pub fn extend_to(&self, chart: &Chart) -> Result<Multivector> {
        let mut out = Multivector::zero(chart, self.degree);
        for (k, f) in &self.comps {
            out.add_to(k.clone(), f.extend_to(chart.vars())?);
        }
        Ok(out)
    }

    /// Push down to a chart made of our leading slots; fails if another slot is used.
    pub fn restrict_to(&self, chart: &Chart) -> Result<Multivector> {
        let mut out = Multivector::zero(chart, self.degree);
        for (k, f) in &self.comps {
            if k.iter().any(|&i| i >= chart.arity()) {
                return Err(Error::Structural(
                    "multivector has components outside the target chart".into(),
                ));
            }
            out.add_to(k.clone(), f.restrict_to(chart.vars())?);
        }
        Ok(out)
    }

    /// First stored component, used as a failure witness.
    pub fn first_component(&self) -> Option<(&Vec<usize>, &RatFunc)> {
        self.comps.iter().next()
    }
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        self.checked_add(rhs).expect("multivector mismatch")
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        self.checked_sub(rhs).expect("multivector mismatch")
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scale_int(-1)
    }
}

impl fmt::Debug for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multivector<{}>{{", self.degree)?;
        for (k, c) in &self.comps {
            let idx: Vec<String> = k.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, " [{}] = {};", idx.join(","), c)?;
        }
        write!(f, " }}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m3() -> Chart {
        Chart::euclidean("M", 3)
    }

    #[test]
    fn basis_wedge_and_nilpotency() {
        let c = m3();
        let d1 = Multivector::basis(&c, &[0]).unwrap();
        let d2 = Multivector::basis(&c, &[1]).unwrap();
        let w = d1.wedge(&d2).unwrap();
        assert_eq!(w.component(&[0, 1]), c.one());
        assert_eq!(w.component(&[1, 0]), c.constant(-1));
        assert!(d1.wedge(&d1).unwrap().is_zero());
    }

    #[test]
    fn odd_degree_anticommutes() {
        let c = m3();
        let x3d1 = Multivector::basis(&c, &[0])
            .unwrap()
            .scale(&c.coordinate(2));
        let d2 = Multivector::basis(&c, &[1]).unwrap();
        let s = &x3d1.wedge(&d2).unwrap() + &d2.wedge(&x3d1).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn contraction_by_basis_forms() {
        let c = m3();
        let w = Multivector::basis(&c, &[0, 1]).unwrap();
        let dx1 = OneForm::basis(&c, 0);
        let dx3 = OneForm::basis(&c, 2);
        assert_eq!(
            w.contract(&dx1).unwrap(),
            Multivector::basis(&c, &[1]).unwrap()
        );
        assert!(w.contract(&dx3).unwrap().is_zero());
        assert!(Multivector::function(&c, c.one())
            .unwrap()
            .contract(&dx1)
            .is_err());
    }

    #[test]
    fn evaluation_is_alternating() {
        let c = m3();
        let w = Multivector::basis(&c, &[0, 1]).unwrap();
        let a = OneForm::basis(&c, 0);
        let b = OneForm::basis(&c, 1);
        assert_eq!(w.evaluate(&[a.clone(), b.clone()]).unwrap(), c.one());
        assert_eq!(w.evaluate(&[b, a]).unwrap(), c.constant(-1));
    }

    #[test]
    fn degree_overflow_gives_zero() {
        let c = Chart::euclidean("N", 2);
        let w = Multivector::basis(&c, &[0, 1]).unwrap();
        let d1 = Multivector::basis(&c, &[0]).unwrap();
        let r = w.wedge(&d1).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.degree(), 3);
    }
}
