//! Charts, tensor containers, connections and pointwise multilinear algebra.

mod chart;
mod connection;
mod forms;
mod multivector;
mod symmetric;

pub use chart::Chart;
pub use connection::{
    Components, ContravariantConnection, LinearConnection, Metric, NonlinearConnection,
};
pub use forms::{OneForm, VolumeForm};
pub use multivector::Multivector;
pub use symmetric::SymCovariant;

pub(crate) use connection::determinant;
pub(crate) use symmetric::{
    map_add, map_from_poly, map_product, map_split_by_degree, map_to_poly, multinomial, SymMap,
};

use crate::error::{Error, Result};
use crate::ring::RatFunc;

/// All non-decreasing `k`-tuples over `0..n`, in lexicographic order.
pub fn sorted_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, k, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// All strictly increasing `k`-tuples over `0..n`.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    sorted_tuples(n, k)
        .into_iter()
        .filter(|t| t.windows(2).all(|w| w[0] < w[1]))
        .collect()
}

fn sum(chart: &Chart, terms: impl IntoIterator<Item = RatFunc>) -> RatFunc {
    terms
        .into_iter()
        .filter(|t| !t.is_zero())
        .fold(chart.zero(), |acc, t| &acc + &t)
}

/// Curvature `R^k_{hij} = d_i G^k_{hj} - d_j G^k_{hi} + G^k_{il} G^l_{hj} - G^k_{jl} G^l_{hi}`,
/// indexed `[k, h, i, j]`.
pub fn linear_curvature(c: &LinearConnection) -> Result<Components> {
    let n = c.dim();
    let chart = c.chart();
    Components::from_fn(chart, &[n, n, n, n], |idx| {
        let (k, h, i, j) = (idx[0], idx[1], idx[2], idx[3]);
        let mut r = &c.gamma(k, h, j).derivative(i)? - &c.gamma(k, h, i).derivative(j)?;
        for l in 0..n {
            r = &r + &(c.gamma(k, i, l) * c.gamma(l, h, j));
            r = &r - &(c.gamma(k, j, l) * c.gamma(l, h, i));
        }
        Ok(r)
    })
}

/// Full covariant derivative components `(nabla H)_{a; I}` with `a` the derivative slot.
pub(crate) fn nabla_component(
    c: &LinearConnection,
    h: &SymCovariant,
    a: usize,
    idx: &[usize],
) -> Result<RatFunc> {
    let n = c.dim();
    let mut r = h.component(idx).derivative(a)?;
    let mut tuple = idx.to_vec();
    for s in 0..idx.len() {
        for l in 0..n {
            let g = c.gamma(l, a, idx[s]);
            if g.is_zero() {
                continue;
            }
            tuple[s] = l;
            r = &r - &(g * &h.component(&tuple));
        }
        tuple[s] = idx[s];
    }
    Ok(r)
}

/// `nabla_X H` for a symmetric covariant tensor.
pub fn nabla_covariant(
    c: &LinearConnection,
    h: &SymCovariant,
    x: &Multivector,
) -> Result<SymCovariant> {
    let chart = c.chart();
    chart.check_same(h.chart())?;
    chart.check_same(x.chart())?;
    let xs = x.vector_components()?;
    let n = c.dim();
    let mut entries = Vec::new();
    for idx in sorted_tuples(n, h.degree()) {
        let mut terms = Vec::new();
        for a in 0..n {
            if !xs[a].is_zero() {
                terms.push(&xs[a] * &nabla_component(c, h, a, &idx)?);
            }
        }
        entries.push((idx, sum(chart, terms)));
    }
    SymCovariant::from_entries(chart, h.degree(), entries)
}

/// Second covariant derivative of a bivector, indexed `[i, j, b, a]` so that
/// `(nabla^2 w)(X, Y)^{ij} = X^b Y^a (nabla^2 w)^{ij}_{ba}`.
pub fn nabla_squared_w(c: &LinearConnection, w: &Multivector) -> Result<Components> {
    let chart = c.chart();
    chart.check_same(w.chart())?;
    if w.degree() != 2 {
        return Err(Error::Structural("expected a bivector".into()));
    }
    if !c.is_torsion_free() {
        return Err(Error::Structural("connection has torsion".into()));
    }
    let n = c.dim();
    // first derivative T^{ij}_a
    let t = Components::from_fn(chart, &[n, n, n], |idx| {
        let (i, j, a) = (idx[0], idx[1], idx[2]);
        let mut r = w.component(&[i, j]).derivative(a)?;
        for l in 0..n {
            r = &r + &(c.gamma(i, a, l) * &w.component(&[l, j]));
            r = &r + &(c.gamma(j, a, l) * &w.component(&[i, l]));
        }
        Ok(r)
    })?;
    Components::from_fn(chart, &[n, n, n, n], |idx| {
        let (i, j, b, a) = (idx[0], idx[1], idx[2], idx[3]);
        let mut r = t.get(&[i, j, a]).derivative(b)?;
        for l in 0..n {
            r = &r + &(c.gamma(i, b, l) * t.get(&[l, j, a]));
            r = &r + &(c.gamma(j, b, l) * t.get(&[i, l, a]));
            r = &r - &(c.gamma(l, b, a) * t.get(&[i, j, l]));
        }
        Ok(r)
    })
}

/// `(sharp alpha)^j = w^{ij} alpha_i`, so that `beta(sharp alpha) = w(alpha, beta)`.
pub fn sharp(w: &Multivector, alpha: &OneForm) -> Result<Multivector> {
    w.chart().check_same(alpha.chart())?;
    if w.degree() != 2 {
        return Err(Error::Structural("sharp needs a bivector".into()));
    }
    let m = w.chart().arity();
    let comps = (0..m)
        .map(|j| {
            sum(
                w.chart(),
                (0..m).map(|i| &w.component(&[i, j]) * &alpha.component(i)),
            )
        })
        .collect();
    Multivector::vector(w.chart(), comps)
}
