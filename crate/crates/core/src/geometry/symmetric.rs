use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use super::{Chart, Multivector, OneForm};
use crate::error::{Error, Result};
use crate::ring::{Poly, RatFunc, Scalar, Vars};

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn binomial(n: usize, k: usize) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn multiplicities(idx: &[usize], arity: usize) -> Vec<usize> {
    let mut m = vec![0; arity];
    for &i in idx {
        m[i] += 1;
    }
    m
}

/// Number of distinct orderings of a sorted tuple, `k! / prod m_a!`.
pub(crate) fn multinomial(idx: &[usize]) -> BigInt {
    let arity = idx.iter().max().map_or(0, |&m| m + 1);
    multiplicities(idx, arity)
        .iter()
        .fold(factorial(idx.len()), |acc, &m| acc / factorial(m))
}

fn sorted(idx: &[usize]) -> Vec<usize> {
    let mut v = idx.to_vec();
    v.sort_unstable();
    v
}

/// A symmetric covariant tensor field of degree k.
///
/// Components `G_{i1...ik}` of the fully symmetric tensor are stored once per
/// non-decreasing tuple. The associated fiber polynomial on TM is
/// `iota(G) = sum over all tuples G_I y^I`, so e.g. `dx1 (.) dx2` stores `1/2`
/// at `(1,2)` and maps to `y1*y2`.
#[derive(Clone, PartialEq, Eq)]
pub struct SymCovariant {
    chart: Chart,
    degree: usize,
    comps: BTreeMap<Vec<usize>, RatFunc>,
}

impl SymCovariant {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        SymCovariant {
            chart: chart.clone(),
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn function(chart: &Chart, f: RatFunc) -> Result<Self> {
        Self::from_entries(chart, 0, [(Vec::new(), f)])
    }

    pub fn from_one_form(alpha: &OneForm) -> Self {
        let entries = alpha
            .components()
            .iter()
            .enumerate()
            .map(|(i, f)| (vec![i], f.clone()));
        Self::from_entries(alpha.chart(), 1, entries).expect("one-form components fit")
    }

    /// Tensor with the given symmetric components; entries with the same sorted key add up.
    pub fn from_entries(
        chart: &Chart,
        degree: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, RatFunc)>,
    ) -> Result<Self> {
        let mut g = Self::zero(chart, degree);
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
            g.add_to(sorted(&idx), f);
        }
        Ok(g)
    }

    fn add_to(&mut self, key: Vec<usize>, f: RatFunc) {
        map_add(&mut self.comps, key, f);
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

    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &RatFunc)> {
        self.comps.iter()
    }

    /// Component for any ordering of the indices.
    pub fn component(&self, idx: &[usize]) -> RatFunc {
        self.comps
            .get(&sorted(idx))
            .cloned()
            .unwrap_or_else(|| self.chart.zero())
    }

    fn check_compatible(&self, other: &SymCovariant) -> Result<()> {
        self.chart.check_same(&other.chart)?;
        if self.degree != other.degree {
            return Err(Error::Structural(format!(
                "degree mismatch: {} vs {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &SymCovariant) -> Result<SymCovariant> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (k, f) in &other.comps {
            out.add_to(k.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &SymCovariant) -> Result<SymCovariant> {
        self.checked_add(&other.scale_int(-1))
    }

    pub fn map(&self, op: impl Fn(&RatFunc) -> Result<RatFunc>) -> Result<SymCovariant> {
        let mut out = Self::zero(&self.chart, self.degree);
        for (k, f) in &self.comps {
            out.add_to(k.clone(), op(f)?);
        }
        Ok(out)
    }

    pub fn scale(&self, f: &RatFunc) -> SymCovariant {
        self.map(|c| Ok(c * f)).expect("infallible")
    }

    pub fn scale_int(&self, c: i64) -> SymCovariant {
        self.map(|f| Ok(f.scale_int(c))).expect("infallible")
    }

    /// Symmetric product, normalized so that `iota(G (.) H) = iota(G) * iota(H)`.
    pub fn sym_product(&self, other: &SymCovariant) -> Result<SymCovariant> {
        self.chart.check_same(&other.chart)?;
        Ok(SymCovariant {
            chart: self.chart.clone(),
            degree: self.degree + other.degree,
            comps: map_product(
                &self.comps,
                &other.comps,
                self.degree,
                other.degree,
                self.chart.arity(),
            ),
        })
    }

    /// `G(X, ., ..., .)`: plain contraction of the first slot.
    fn contract_raw(&self, x: &[RatFunc]) -> SymCovariant {
        let mut out = Self::zero(&self.chart, self.degree - 1);
        // every full tuple (a, rest) with rest sorted appears once per sorted key containing a
        for (key, f) in &self.comps {
            let mut seen: Option<usize> = None;
            for (pos, &a) in key.iter().enumerate() {
                if seen == Some(a) || x[a].is_zero() {
                    seen = Some(a);
                    continue;
                }
                seen = Some(a);
                let mut rest = key.clone();
                rest.remove(pos);
                // G(X, .) has components sum_a X^a G_{a,rest}; each sorted `rest`
                // receives X^a G_{a rest} from exactly this key
                out.add_to(rest, &x[a] * f);
            }
        }
        out
    }

    /// Interior product `i_X G = k G(X, ...)`, the derivation `X^j d/dy^j` on `iota(G)`.
    pub fn contract(&self, x: &Multivector) -> Result<SymCovariant> {
        self.chart.check_same(x.chart())?;
        if self.degree == 0 {
            return Err(Error::Structural("cannot contract a function".into()));
        }
        let xs = x.vector_components()?;
        Ok(self.contract_raw(&xs).scale_int(self.degree as i64))
    }

    /// `G(X_1, ..., X_k)`.
    pub fn evaluate(&self, vectors: &[Multivector]) -> Result<RatFunc> {
        if vectors.len() != self.degree {
            return Err(Error::Structural(format!(
                "a degree-{} tensor takes {} arguments",
                self.degree, self.degree
            )));
        }
        let mut cur = self.clone();
        for v in vectors {
            self.chart.check_same(v.chart())?;
            cur = cur.contract_raw(&v.vector_components()?);
        }
        Ok(cur.component(&[]))
    }

    /// The fiber polynomial `iota(G)` on the tangent chart.
    pub fn to_fiber_poly(&self, tm: &Chart) -> Result<RatFunc> {
        let base = tm.require_tangent()?;
        self.chart.check_same(base)?;
        map_to_poly(&self.comps, tm.vars(), tm.dim())
    }

    /// Inverse of [`to_fiber_poly`](Self::to_fiber_poly): the tensor whose fiber
    /// polynomial is `f`, which must be homogeneous of `degree` in the fiber.
    pub fn from_fiber_poly(tm: &Chart, degree: usize, f: &RatFunc) -> Result<SymCovariant> {
        let base = tm.require_tangent()?;
        tm.check_fn(f)?;
        Ok(SymCovariant {
            chart: base.clone(),
            degree,
            comps: map_from_poly(f, base.vars(), tm.dim(), degree)?,
        })
    }
}

/// Sparse symmetric components keyed by sorted index tuples.
pub(crate) type SymMap = BTreeMap<Vec<usize>, RatFunc>;

pub(crate) fn map_add(map: &mut SymMap, key: Vec<usize>, f: RatFunc) {
    if f.is_zero() {
        return;
    }
    let s = match map.get(&key) {
        Some(old) => old + &f,
        None => f,
    };
    if s.is_zero() {
        map.remove(&key);
    } else {
        map.insert(key, s);
    }
}

/// Components of `Sym(G (x) H)` for degrees `p`, `q` over `rank` indices.
pub(crate) fn map_product(g: &SymMap, h: &SymMap, p: usize, q: usize, rank: usize) -> SymMap {
    let total = binomial(p + q, p);
    let mut out = SymMap::new();
    for (i, gi) in g {
        let mi = multiplicities(i, rank);
        for (k, hk) in h {
            let mut j = i.clone();
            j.extend_from_slice(k);
            j.sort_unstable();
            let mj = multiplicities(&j, rank);
            let num = (0..rank).fold(BigInt::one(), |acc, a| acc * binomial(mj[a], mi[a]));
            map_add(
                &mut out,
                j,
                (gi * hk).scale(&Scalar::new(num, total.clone())),
            );
        }
    }
    out
}

/// `sum_I G_I mult(I) e^I` where fiber slot `a` lives at `offset + a` of `target`.
pub(crate) fn map_to_poly(g: &SymMap, target: &Vars, offset: usize) -> Result<RatFunc> {
    let mut out = RatFunc::zero(target);
    for (key, f) in g {
        let mut exps = vec![0u32; target.len()];
        for &i in key {
            exps[offset + i] += 1;
        }
        let mono = Poly::monomial(target, exps, Scalar::from_integer(multinomial(key)))?;
        out = &out + &(&f.extend_to(target)? * &RatFunc::from_poly(mono));
    }
    Ok(out)
}

/// Inverse of [`map_to_poly`]; `f` must be homogeneous of `degree` in the fiber
/// slots, with a denominator free of them.
pub(crate) fn map_from_poly(
    f: &RatFunc,
    base: &Vars,
    offset: usize,
    degree: usize,
) -> Result<SymMap> {
    let Some(mut parts) = map_split_by_degree(f, base, offset)? else {
        return Err(Error::Structural(
            "fiber polynomial has fiber variables in its denominator".into(),
        ));
    };
    if parts.keys().any(|&d| d != degree) {
        return Err(Error::Structural(format!(
            "fiber polynomial is not homogeneous of degree {degree}"
        )));
    }
    Ok(parts.remove(&degree).unwrap_or_default())
}

/// Splits a fiber polynomial into its homogeneous parts, each given by symmetric
/// components. `None` when the denominator involves fiber slots.
pub(crate) fn map_split_by_degree(
    f: &RatFunc,
    base: &Vars,
    offset: usize,
) -> Result<Option<BTreeMap<usize, SymMap>>> {
    let rank = f.vars().len() - offset;
    let den = f.denominator();
    if (0..rank).any(|i| !den.is_free_of(offset + i)) {
        return Ok(None);
    }
    let den = RatFunc::from_poly(den.restrict_to(base)?);
    let mut buckets: BTreeMap<Vec<usize>, Poly> = BTreeMap::new();
    for (mono, c) in f.numerator().terms() {
        let exps = mono.exponents();
        let mut key = Vec::new();
        for i in 0..rank {
            key.extend(std::iter::repeat_n(i, exps[offset + i] as usize));
        }
        let base_part = Poly::monomial(base, exps[..offset].to_vec(), c.clone())?;
        let slot = buckets.entry(key).or_insert_with(|| Poly::zero(base));
        *slot = &*slot + &base_part;
    }
    let mut parts: BTreeMap<usize, SymMap> = BTreeMap::new();
    for (key, p) in buckets {
        let c = Scalar::new(BigInt::one(), multinomial(&key));
        let val = RatFunc::from_poly(p).checked_div(&den)?.scale(&c);
        map_add(parts.entry(key.len()).or_default(), key, val);
    }
    Ok(Some(parts))
}

impl fmt::Debug for SymCovariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymCovariant<{}>{{", self.degree)?;
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
    use crate::ring::rational;

    fn dx(c: &Chart, i: usize) -> SymCovariant {
        SymCovariant::from_one_form(&OneForm::basis(c, i))
    }

    #[test]
    fn sym_product_normalization() {
        let c = Chart::euclidean("M", 2);
        let tm = c.tangent().unwrap();
        let sq = dx(&c, 0).sym_product(&dx(&c, 0)).unwrap();
        assert_eq!(sq.component(&[0, 0]), c.one());
        let mixed = dx(&c, 0).sym_product(&dx(&c, 1)).unwrap();
        assert_eq!(
            mixed.component(&[1, 0]),
            RatFunc::constant(c.vars(), rational(1, 2))
        );
        assert_eq!(
            mixed.to_fiber_poly(&tm).unwrap(),
            &tm.coordinate(2) * &tm.coordinate(3)
        );
        let one = SymCovariant::function(&c, c.one()).unwrap();
        assert_eq!(mixed.sym_product(&one).unwrap(), mixed);
    }

    #[test]
    fn fiber_poly_round_trip() {
        let c = Chart::euclidean("M", 2);
        let tm = c.tangent().unwrap();
        let g = SymCovariant::from_entries(
            &c,
            3,
            [
                (vec![0, 0, 1], c.coordinate(1)),
                (vec![1, 1, 1], c.one()),
                (
                    vec![0, 1, 1],
                    c.one().checked_div(&c.coordinate(0)).unwrap(),
                ),
            ],
        )
        .unwrap();
        let f = g.to_fiber_poly(&tm).unwrap();
        assert_eq!(SymCovariant::from_fiber_poly(&tm, 3, &f).unwrap(), g);
        assert!(SymCovariant::from_fiber_poly(&tm, 2, &f).is_err());
    }

    #[test]
    fn interior_product_is_fiber_derivation() {
        let c = Chart::euclidean("M", 2);
        let tm = c.tangent().unwrap();
        let g = dx(&c, 0).sym_product(&dx(&c, 1)).unwrap();
        let d2 = Multivector::basis(&c, &[1]).unwrap();
        // d/dy2 (y1 y2) = y1
        assert_eq!(g.contract(&d2).unwrap(), dx(&c, 0));
        let f = g.to_fiber_poly(&tm).unwrap();
        assert_eq!(
            g.contract(&d2).unwrap().to_fiber_poly(&tm).unwrap(),
            f.derivative(tm.y(1)).unwrap()
        );
    }

    #[test]
    fn evaluation_on_basis_vectors() {
        let c = Chart::euclidean("M", 2);
        let g = dx(&c, 0).sym_product(&dx(&c, 1)).unwrap();
        let d1 = Multivector::basis(&c, &[0]).unwrap();
        let d2 = Multivector::basis(&c, &[1]).unwrap();
        let half = RatFunc::constant(c.vars(), rational(1, 2));
        assert_eq!(g.evaluate(&[d1.clone(), d2.clone()]).unwrap(), half);
        assert_eq!(g.evaluate(&[d2, d1]).unwrap(), half);
    }
}
