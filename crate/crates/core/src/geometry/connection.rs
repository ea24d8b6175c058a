use std::fmt;

use super::{Chart, Multivector, OneForm};
use crate::error::{Error, Result};
use crate::ring::RatFunc;

/// A dense indexed family of functions, e.g. curvature components `R^k_{hij}`.
#[derive(Clone, PartialEq, Eq)]
pub struct Components {
    chart: Chart,
    shape: Vec<usize>,
    data: Vec<RatFunc>,
}

impl Components {
    pub fn zeros(chart: &Chart, shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Components {
            chart: chart.clone(),
            shape: shape.to_vec(),
            data: vec![chart.zero(); len],
        }
    }

    /// Fill every index tuple from `f`.
    pub fn from_fn(
        chart: &Chart,
        shape: &[usize],
        mut f: impl FnMut(&[usize]) -> Result<RatFunc>,
    ) -> Result<Self> {
        let mut c = Self::zeros(chart, shape);
        let mut idx = vec![0; shape.len()];
        for pos in 0..c.data.len() {
            let mut rem = pos;
            for d in (0..shape.len()).rev() {
                idx[d] = rem % shape[d];
                rem /= shape[d];
            }
            c.data[pos] = f(&idx)?;
        }
        Ok(c)
    }

    fn offset(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.shape.len(), "index rank mismatch");
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &s)| {
            assert!(i < s, "index out of range");
            acc * s + i
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn get(&self, idx: &[usize]) -> &RatFunc {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], f: RatFunc) {
        let o = self.offset(idx);
        self.data[o] = f;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RatFunc::is_zero)
    }

    /// Nonzero entries with their index tuples, in lexicographic order.
    pub fn nonzero(&self) -> Vec<(Vec<usize>, RatFunc)> {
        let mut out = Vec::new();
        let _ = Self::from_fn(&self.chart, &self.shape, |idx| {
            let f = self.get(idx);
            if !f.is_zero() {
                out.push((idx.to_vec(), f.clone()));
            }
            Ok(self.chart.zero())
        });
        out
    }
}

impl fmt::Debug for Components {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Components{:?}{{", self.shape)?;
        for (idx, c) in self.nonzero() {
            let idx: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, " [{}] = {};", idx.join(","), c)?;
        }
        write!(f, " }}")
    }
}

fn check_base_fn(chart: &Chart, f: &RatFunc) -> Result<()> {
    chart.require_base()?;
    chart.check_fn(f)
}

/// A Riemannian (or pseudo-Riemannian) metric, used only through its determinant.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Metric {
    chart: Chart,
    g: Vec<Vec<RatFunc>>,
    det: RatFunc,
}

impl Metric {
    pub fn new(chart: &Chart, g: Vec<Vec<RatFunc>>) -> Result<Self> {
        let n = chart.dim();
        if g.len() != n || g.iter().any(|row| row.len() != n) {
            return Err(Error::Structural(format!("metric must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                check_base_fn(chart, &g[i][j])?;
                if g[i][j] != g[j][i] {
                    return Err(Error::Structural(format!(
                        "metric is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let det = determinant(chart, &g)?;
        if det.is_zero() {
            return Err(Error::Structural("metric is degenerate".into()));
        }
        Ok(Metric {
            chart: chart.clone(),
            g,
            det,
        })
    }

    pub fn diagonal(chart: &Chart, diag: Vec<RatFunc>) -> Result<Self> {
        let n = diag.len();
        let g = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            diag[i].clone()
                        } else {
                            chart.zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(chart, g)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn component(&self, i: usize, j: usize) -> &RatFunc {
        &self.g[i][j]
    }

    pub fn det(&self) -> &RatFunc {
        &self.det
    }
}

/// Determinant by fraction-field Gaussian elimination.
pub(crate) fn determinant(chart: &Chart, m: &[Vec<RatFunc>]) -> Result<RatFunc> {
    let mut a: Vec<Vec<RatFunc>> = m.to_vec();
    let n = a.len();
    let mut det = chart.one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(chart.zero());
        };
        if p != col {
            a.swap(p, col);
            det = -&det;
        }
        let pivot = a[col][col].clone();
        det = &det * &pivot;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].checked_div(&pivot)?;
            for c in col..n {
                let t = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
        }
    }
    Ok(det)
}

/// A linear connection `nabla_{d_i} d_j = Gamma^k_{ij} d_k` on a base chart.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearConnection {
    chart: Chart,
    gamma: Vec<Vec<Vec<RatFunc>>>,
    torsion_free: bool,
}

impl LinearConnection {
    /// Build from `gamma[k][i][j] = Gamma^k_{ij}`.
    pub fn new(chart: &Chart, gamma: Vec<Vec<Vec<RatFunc>>>) -> Result<Self> {
        chart.require_base()?;
        let n = chart.dim();
        if gamma.len() != n
            || gamma
                .iter()
                .any(|g| g.len() != n || g.iter().any(|r| r.len() != n))
        {
            return Err(Error::Structural(format!(
                "connection symbols must be {n}x{n}x{n}"
            )));
        }
        for f in gamma.iter().flatten().flatten() {
            check_base_fn(chart, f)?;
        }
        let torsion_free =
            (0..n).all(|k| (0..n).all(|i| (0..n).all(|j| gamma[k][i][j] == gamma[k][j][i])));
        Ok(LinearConnection {
            chart: chart.clone(),
            gamma,
            torsion_free,
        })
    }

    pub fn flat(chart: &Chart) -> Self {
        let n = chart.dim();
        Self::new(chart, vec![vec![vec![chart.zero(); n]; n]; n]).expect("flat connection")
    }

    /// Sum of `value` at `(k, i, j)`; unspecified symbols are zero.
    pub fn from_entries(
        chart: &Chart,
        entries: impl IntoIterator<Item = ((usize, usize, usize), RatFunc)>,
    ) -> Result<Self> {
        let n = chart.dim();
        let mut gamma = vec![vec![vec![chart.zero(); n]; n]; n];
        for ((k, i, j), f) in entries {
            if k >= n || i >= n || j >= n {
                return Err(Error::Structural("connection index out of range".into()));
            }
            gamma[k][i][j] = &gamma[k][i][j] + &f;
        }
        Self::new(chart, gamma)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `Gamma^k_{ij}`.
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &RatFunc {
        &self.gamma[k][i][j]
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion_free
    }

    pub fn is_flat_symbols(&self) -> bool {
        self.gamma.iter().flatten().flatten().all(RatFunc::is_zero)
    }

    /// `nabla_X Y` for vector fields.
    pub fn covariant_derivative(&self, x: &Multivector, y: &Multivector) -> Result<Multivector> {
        self.chart.check_same(x.chart())?;
        self.chart.check_same(y.chart())?;
        let xs = x.vector_components()?;
        let ys = y.vector_components()?;
        let n = self.dim();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut s = x.apply(&ys[k])?;
            for i in 0..n {
                for j in 0..n {
                    let g = &self.gamma[k][i][j];
                    if !g.is_zero() && !xs[i].is_zero() && !ys[j].is_zero() {
                        s = &s + &(&(g * &xs[i]) * &ys[j]);
                    }
                }
            }
            out.push(s);
        }
        Multivector::vector(&self.chart, out)
    }
}

/// A nonlinear connection on TM: horizontal frame `delta_i = d/dx^i - Gamma^j_i d/dy^j`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NonlinearConnection {
    chart: Chart,
    gamma: Vec<Vec<RatFunc>>,
}

impl NonlinearConnection {
    /// Build from `gamma[j][i] = Gamma^j_i` on a tangent chart.
    pub fn new(tm: &Chart, gamma: Vec<Vec<RatFunc>>) -> Result<Self> {
        tm.require_tangent()?;
        let n = tm.dim();
        if gamma.len() != n || gamma.iter().any(|r| r.len() != n) {
            return Err(Error::Structural(format!(
                "nonlinear connection must be {n}x{n}"
            )));
        }
        for f in gamma.iter().flatten() {
            tm.check_fn(f)?;
        }
        Ok(NonlinearConnection {
            chart: tm.clone(),
            gamma,
        })
    }

    /// `Gamma^j_i = Gamma^j_{ik} y^k`.
    pub fn from_linear(c: &LinearConnection) -> Result<Self> {
        let tm = c.chart().tangent()?;
        let n = c.dim();
        let mut gamma = vec![vec![tm.zero(); n]; n];
        for (j, row) in gamma.iter_mut().enumerate() {
            for (i, slot) in row.iter_mut().enumerate() {
                for k in 0..n {
                    let g = c.gamma(j, i, k);
                    if !g.is_zero() {
                        *slot = &*slot + &(&tm.pullback(g)? * &tm.coordinate(tm.y(k)));
                    }
                }
            }
        }
        Self::new(&tm, gamma)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `Gamma^j_i`.
    pub fn gamma(&self, j: usize, i: usize) -> &RatFunc {
        &self.gamma[j][i]
    }

    /// The horizontal vector field `delta_i`.
    pub fn delta(&self, i: usize) -> Result<Multivector> {
        let tm = &self.chart;
        let n = self.dim();
        let mut comps = vec![tm.zero(); 2 * n];
        comps[i] = tm.one();
        for j in 0..n {
            comps[tm.y(j)] = -&self.gamma[j][i];
        }
        Multivector::vector(tm, comps)
    }
}

/// A contravariant connection `D_{dx^i} dx^j = Gamma^{ij}_k dx^k` relative to a bivector `w`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ContravariantConnection {
    chart: Chart,
    w: Multivector,
    gamma: Vec<Vec<Vec<RatFunc>>>,
}

impl ContravariantConnection {
    /// Build from `gamma[i][j][k] = Gamma^{ij}_k`.
    pub fn new(w: &Multivector, gamma: Vec<Vec<Vec<RatFunc>>>) -> Result<Self> {
        let chart = w.chart().clone();
        chart.require_base()?;
        if w.degree() != 2 {
            return Err(Error::Structural(
                "reference tensor must be a bivector".into(),
            ));
        }
        let n = chart.dim();
        if gamma.len() != n
            || gamma
                .iter()
                .any(|g| g.len() != n || g.iter().any(|r| r.len() != n))
        {
            return Err(Error::Structural(format!(
                "contravariant symbols must be {n}x{n}x{n}"
            )));
        }
        for f in gamma.iter().flatten().flatten() {
            chart.check_fn(f)?;
        }
        Ok(ContravariantConnection {
            chart,
            w: w.clone(),
            gamma,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn bivector(&self) -> &Multivector {
        &self.w
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// `Gamma^{ij}_k`.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &RatFunc {
        &self.gamma[i][j][k]
    }

    /// `D_{dx^i} alpha = alpha_j Gamma^{ij}_k dx^k + X_{x^i}(alpha_j) dx^j`.
    pub fn derivative_basis(&self, i: usize, alpha: &OneForm) -> Result<OneForm> {
        self.chart.check_same(alpha.chart())?;
        let n = self.dim();
        let xi = super::sharp(&self.w, &OneForm::basis(&self.chart, i))?;
        let mut comps = Vec::with_capacity(n);
        for k in 0..n {
            let mut s = xi.apply(&alpha.component(k))?;
            for j in 0..n {
                let a = alpha.component(j);
                let g = &self.gamma[i][j][k];
                if !a.is_zero() && !g.is_zero() {
                    s = &s + &(&a * g);
                }
            }
            comps.push(s);
        }
        OneForm::new(&self.chart, comps)
    }

    /// `D_theta alpha = theta_i D_{dx^i} alpha`.
    pub fn derivative(&self, theta: &OneForm, alpha: &OneForm) -> Result<OneForm> {
        self.chart.check_same(theta.chart())?;
        let mut out = OneForm::zero(&self.chart);
        for i in 0..self.dim() {
            let t = theta.component(i);
            if !t.is_zero() {
                out = out.checked_add(&self.derivative_basis(i, alpha)?.scale(&t))?;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_diagonal_metric() {
        let c = Chart::euclidean("M", 2);
        let x1 = c.coordinate(0);
        let g = Metric::diagonal(&c, vec![c.one(), &c.one() + &(&x1 * &x1)]).unwrap();
        assert_eq!(g.det(), &(&c.one() + &(&x1 * &x1)));
        assert!(Metric::diagonal(&c, vec![c.one(), c.zero()]).is_err());
    }

    #[test]
    fn determinant_with_pivoting() {
        let c = Chart::euclidean("M", 2);
        let g = Metric::new(
            &c,
            vec![
                vec![c.zero(), c.coordinate(0)],
                vec![c.coordinate(0), c.one()],
            ],
        )
        .unwrap();
        assert_eq!(g.det(), &-&(&c.coordinate(0) * &c.coordinate(0)));
    }

    #[test]
    fn torsion_flag_and_induced_frame() {
        let c = Chart::euclidean("M", 2);
        let sym = LinearConnection::from_entries(&c, [((0, 1, 1), c.coordinate(0))]).unwrap();
        assert!(sym.is_torsion_free());
        let skew = LinearConnection::from_entries(&c, [((0, 0, 1), c.one())]).unwrap();
        assert!(!skew.is_torsion_free());
        let nl = NonlinearConnection::from_linear(&sym).unwrap();
        let tm = nl.chart().clone();
        // Gamma^1_2 = x1 y2
        assert_eq!(nl.gamma(0, 1), &(&tm.coordinate(0) * &tm.coordinate(3)));
        let d2 = nl.delta(1).unwrap();
        assert_eq!(d2.component(&[tm.y(0)]), -nl.gamma(0, 1));
    }

    #[test]
    fn components_indexing() {
        let c = Chart::euclidean("M", 2);
        let comp = Components::from_fn(&c, &[2, 3], |idx| {
            Ok(c.constant((idx[0] * 3 + idx[1]) as i64))
        })
        .unwrap();
        assert_eq!(comp.get(&[1, 2]), &c.constant(5));
        assert_eq!(comp.nonzero().len(), 5);
    }
}
