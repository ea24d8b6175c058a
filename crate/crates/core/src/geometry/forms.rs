use std::fmt;

use super::{Chart, Multivector};
use crate::error::{Error, Result};
use crate::ring::{RatFunc, Scalar};

/// A differential one-form `alpha = alpha_i dx^i`.
#[derive(Clone, PartialEq, Eq)]
pub struct OneForm {
    chart: Chart,
    comps: Vec<RatFunc>,
}

impl OneForm {
    pub fn new(chart: &Chart, comps: Vec<RatFunc>) -> Result<Self> {
        if comps.len() != chart.arity() {
            return Err(Error::Structural(format!(
                "one-form needs {} components, got {}",
                chart.arity(),
                comps.len()
            )));
        }
        for c in &comps {
            chart.check_fn(c)?;
        }
        Ok(OneForm {
            chart: chart.clone(),
            comps,
        })
    }

    pub fn zero(chart: &Chart) -> Self {
        OneForm {
            chart: chart.clone(),
            comps: vec![chart.zero(); chart.arity()],
        }
    }

    /// `dx^i` for slot `i`.
    pub fn basis(chart: &Chart, i: usize) -> Self {
        let mut a = Self::zero(chart);
        a.comps[i] = chart.one();
        a
    }

    /// Exterior differential of a function.
    pub fn differential(chart: &Chart, f: &RatFunc) -> Result<Self> {
        chart.check_fn(f)?;
        let comps = (0..chart.arity())
            .map(|i| f.derivative(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(OneForm {
            chart: chart.clone(),
            comps,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn component(&self, i: usize) -> RatFunc {
        self.comps[i].clone()
    }

    pub fn components(&self) -> &[RatFunc] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RatFunc::is_zero)
    }

    pub fn checked_add(&self, other: &OneForm) -> Result<OneForm> {
        self.chart.check_same(&other.chart)?;
        Ok(OneForm {
            chart: self.chart.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn checked_sub(&self, other: &OneForm) -> Result<OneForm> {
        self.checked_add(&other.scale_int(-1))
    }

    pub fn scale(&self, f: &RatFunc) -> OneForm {
        OneForm {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(|a| a * f).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> OneForm {
        OneForm {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(|a| a.scale_int(c)).collect(),
        }
    }

    /// Pairing `alpha(X)` with a vector field.
    pub fn apply(&self, x: &Multivector) -> Result<RatFunc> {
        self.chart.check_same(x.chart())?;
        let xs = x.vector_components()?;
        let mut out = self.chart.zero();
        for (a, v) in self.comps.iter().zip(&xs) {
            if !a.is_zero() && !v.is_zero() {
                out = &out + &(a * v);
            }
        }
        Ok(out)
    }

    /// The fiberwise linear function `l(alpha) = alpha_i y^i` on TM.
    pub fn fiber_linear(&self, tm: &Chart) -> Result<RatFunc> {
        let base = tm.require_tangent()?;
        self.chart.check_same(base)?;
        let mut out = tm.zero();
        for (i, a) in self.comps.iter().enumerate() {
            if !a.is_zero() {
                out = &out + &(&a.extend_to(tm.vars())? * &tm.coordinate(tm.y(i)));
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneForm{{")?;
        for (i, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " [{}] = {};", i + 1, c)?;
            }
        }
        write!(f, " }}")
    }
}

/// A volume form `rho^p dx^1 ^ ... ^ dx^m` with `p` either 1 or 1/2.
///
/// Square roots of densities (Riemannian volumes) are carried symbolically;
/// only the logarithmic derivative, which is rational, is ever evaluated.
#[derive(Clone)]
pub struct VolumeForm {
    chart: Chart,
    density: RatFunc,
    sqrt: bool,
}

impl VolumeForm {
    pub fn new(chart: &Chart, density: RatFunc) -> Result<Self> {
        Self::build(chart, density, false)
    }

    /// `sqrt(density) dx^1 ^ ... ^ dx^m`.
    pub fn sqrt_of(chart: &Chart, density: RatFunc) -> Result<Self> {
        Self::build(chart, density, true)
    }

    /// The standard coordinate volume `dx^1 ^ ... ^ dx^m`.
    pub fn standard(chart: &Chart) -> Self {
        Self::build(chart, chart.one(), false).expect("unit density")
    }

    fn build(chart: &Chart, density: RatFunc, sqrt: bool) -> Result<Self> {
        chart.check_fn(&density)?;
        if density.is_zero() {
            return Err(Error::Structural("volume density must be nonzero".into()));
        }
        Ok(VolumeForm {
            chart: chart.clone(),
            density,
            sqrt,
        })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn density(&self) -> &RatFunc {
        &self.density
    }

    pub fn is_sqrt(&self) -> bool {
        self.sqrt
    }

    /// `d_k log(rho^p)`, a rational function.
    pub fn log_derivative(&self, k: usize) -> Result<RatFunc> {
        let d = self.density.derivative(k)?.checked_div(&self.density)?;
        Ok(if self.sqrt {
            d.scale(&Scalar::new(1.into(), 2.into()))
        } else {
            d
        })
    }

    /// Density squared-up to a common power, so forms can be compared exactly.
    fn squared_density(&self) -> RatFunc {
        if self.sqrt {
            self.density.clone()
        } else {
            &self.density * &self.density
        }
    }
}

impl PartialEq for VolumeForm {
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart && self.squared_density() == other.squared_density()
    }
}

impl fmt::Debug for VolumeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sqrt {
            write!(f, "VolumeForm(sqrt({}))", self.density)
        } else {
            write!(f, "VolumeForm({})", self.density)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differential_and_pairing() {
        let c = Chart::euclidean("M", 2);
        let f = &c.coordinate(0) * &c.coordinate(1);
        let df = OneForm::differential(&c, &f).unwrap();
        let d2 = Multivector::basis(&c, &[1]).unwrap();
        assert_eq!(df.apply(&d2).unwrap(), c.coordinate(0));
    }

    #[test]
    fn fiber_linear_function() {
        let c = Chart::euclidean("M", 2);
        let tm = c.tangent().unwrap();
        let a = OneForm::new(&c, vec![c.coordinate(1), c.zero()]).unwrap();
        let l = a.fiber_linear(&tm).unwrap();
        assert_eq!(l, &tm.coordinate(1) * &tm.coordinate(2));
    }

    #[test]
    fn sqrt_volume_compares_with_plain() {
        let c = Chart::euclidean("M", 1);
        let x = c.coordinate(0);
        let plain = VolumeForm::new(&c, x.clone()).unwrap();
        let root = VolumeForm::sqrt_of(&c, &x * &x).unwrap();
        assert_eq!(plain, root);
        assert_eq!(
            root.log_derivative(0).unwrap(),
            c.one().checked_div(&x).unwrap()
        );
        assert!(VolumeForm::new(&c, c.zero()).is_err());
    }
}
