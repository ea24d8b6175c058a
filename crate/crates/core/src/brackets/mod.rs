//! Lie, Schouten–Nijenhuis and Koszul brackets, Lie derivatives and algebroids.

mod algebroid;

pub use algebroid::{
    algebroid_lie_derivative, cotangent_algebroid, frame_monomials, sym_bracket,
    sym_bracket_decomposed, sym_bracket_via_lie_derivatives, tangent_algebroid, AlgebroidSymTensor,
    LieAlgebroid,
};

use crate::error::{Error, Result};
use crate::geometry::{sharp, Multivector, OneForm, SymCovariant, VolumeForm};
use crate::ring::RatFunc;

/// `[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i`.
pub fn lie_bracket(x: &Multivector, y: &Multivector) -> Result<Multivector> {
    x.chart().check_same(y.chart())?;
    let xs = x.vector_components()?;
    let ys = y.vector_components()?;
    let comps = xs
        .iter()
        .zip(&ys)
        .map(|(xi, yi)| Ok(&x.apply(yi)? - &y.apply(xi)?))
        .collect::<Result<Vec<_>>>()?;
    Multivector::vector(x.chart(), comps)
}

/// Schouten–Nijenhuis bracket.
///
/// Writing multivectors as functions of odd coordinates `theta_i` (with
/// `d_i ^ d_j <-> theta_i theta_j`),
/// `[P, Q] = sum_i dP/dtheta_i * dQ/dx^i + (-1)^{pq} dQ/dtheta_i * dP/dx^i`
/// with left `theta` derivatives. The bracket is graded by `[P, Q] = (-1)^{pq} [Q, P]`;
/// it gives `[X, P] = L_X P`, `[P, f] = i_{df} P` and
/// `[w, w](df, dg, dh) = 2 sum_cyclic {{f, g}, h}`.
pub fn schouten_bracket(p: &Multivector, q: &Multivector) -> Result<Multivector> {
    let chart = p.chart();
    chart.check_same(q.chart())?;
    let (dp, dq) = (p.degree(), q.degree());
    if dp + dq == 0 {
        return Err(Error::Structural(
            "the bracket of two functions has degree -1".into(),
        ));
    }
    let sign = if dp * dq % 2 == 0 { -1 } else { 1 }; // -(-1)^{pq}
    let mut out = Multivector::zero(chart, dp + dq - 1);
    for i in 0..chart.arity() {
        let dxi = OneForm::basis(chart, i);
        if dp > 0 {
            let a = p.contract(&dxi)?;
            if !a.is_zero() {
                let b = q.derivative(i)?;
                if !b.is_zero() {
                    out = out.checked_add(&a.wedge(&b)?)?;
                }
            }
        }
        if dq > 0 {
            let a = q.contract(&dxi)?;
            if !a.is_zero() {
                let b = p.derivative(i)?;
                if !b.is_zero() {
                    out = out.checked_sub(&a.wedge(&b)?.scale_int(sign))?;
                }
            }
        }
    }
    Ok(out)
}

/// `{f, g}_P = P(df, dg) = P^{ij} d_i f d_j g` for a bivector `P`.
pub fn poisson_bracket(p: &Multivector, f: &RatFunc, g: &RatFunc) -> Result<RatFunc> {
    if p.degree() != 2 {
        return Err(Error::Structural(
            "a Poisson bracket needs a bivector".into(),
        ));
    }
    let df = OneForm::differential(p.chart(), f)?;
    let dg = OneForm::differential(p.chart(), g)?;
    p.evaluate(&[df, dg])
}

/// Lie derivative of a one-form: `(L_X a)_k = X^j d_j a_k + a_j d_k X^j`.
pub fn lie_derivative_form(x: &Multivector, alpha: &OneForm) -> Result<OneForm> {
    x.chart().check_same(alpha.chart())?;
    let xs = x.vector_components()?;
    let m = x.chart().arity();
    let comps = (0..m)
        .map(|k| {
            let mut r = x.apply(&alpha.component(k))?;
            for (j, xj) in xs.iter().enumerate() {
                let a = alpha.component(j);
                if !a.is_zero() {
                    r = &r + &(&a * &xj.derivative(k)?);
                }
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    OneForm::new(x.chart(), comps)
}

/// Koszul bracket `{a, b} = L_{#a} b - L_{#b} a - d(w(a, b))`.
pub fn koszul_bracket(w: &Multivector, alpha: &OneForm, beta: &OneForm) -> Result<OneForm> {
    let sa = sharp(w, alpha)?;
    let sb = sharp(w, beta)?;
    let wab = w.evaluate(&[alpha.clone(), beta.clone()])?;
    lie_derivative_form(&sa, beta)?
        .checked_sub(&lie_derivative_form(&sb, alpha)?)?
        .checked_sub(&OneForm::differential(w.chart(), &wab)?)
}

/// Lichnerowicz–Poisson coboundary `sigma Q = -[w, Q]`.
pub fn lichnerowicz_coboundary(w: &Multivector, q: &Multivector) -> Result<Multivector> {
    Ok(-&schouten_bracket(w, q)?)
}

/// A volume form multiplied by a function, the value of `L_X mu = (div_mu X) mu`.
#[derive(Clone, PartialEq, Debug)]
pub struct ScaledVolume {
    pub factor: RatFunc,
    pub form: VolumeForm,
}

/// Objects on which a vector field acts by Lie derivative.
pub trait LieDerivable {
    type Output;
    fn lie_derivative_along(&self, x: &Multivector) -> Result<Self::Output>;
}

/// Standard Lie derivative `L_X T`.
pub fn lie_derivative<T: LieDerivable>(x: &Multivector, t: &T) -> Result<T::Output> {
    t.lie_derivative_along(x)
}

impl LieDerivable for RatFunc {
    type Output = RatFunc;
    fn lie_derivative_along(&self, x: &Multivector) -> Result<RatFunc> {
        x.apply(self)
    }
}

impl LieDerivable for Multivector {
    type Output = Multivector;
    /// `(L_X P)^I = X^j d_j P^I - sum_s P^{i1..j..ik} d_j X^{i_s}`.
    fn lie_derivative_along(&self, x: &Multivector) -> Result<Multivector> {
        let chart = self.chart();
        chart.check_same(x.chart())?;
        let xs = x.vector_components()?;
        let m = chart.arity();
        let dx: Vec<Vec<RatFunc>> = xs
            .iter()
            .map(|xi| (0..m).map(|j| xi.derivative(j)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let mut entries = Vec::new();
        for idx in crate::geometry::increasing_tuples(m, self.degree()) {
            let mut r = x.apply(&self.component(&idx))?;
            let mut t = idx.clone();
            for s in 0..idx.len() {
                for (j, slot) in dx[idx[s]].iter().enumerate() {
                    if slot.is_zero() {
                        continue;
                    }
                    t[s] = j;
                    let c = self.component(&t);
                    if !c.is_zero() {
                        r = &r - &(&c * slot);
                    }
                }
                t[s] = idx[s];
            }
            entries.push((idx, r));
        }
        Multivector::from_entries(chart, self.degree(), entries)
    }
}

impl LieDerivable for SymCovariant {
    type Output = SymCovariant;
    /// `(L_X G)_I = X^j d_j G_I + sum_s G_{i1..j..ik} d_{i_s} X^j`.
    fn lie_derivative_along(&self, x: &Multivector) -> Result<SymCovariant> {
        let chart = self.chart();
        chart.check_same(x.chart())?;
        let xs = x.vector_components()?;
        let m = chart.arity();
        let mut entries = Vec::new();
        for idx in crate::geometry::sorted_tuples(m, self.degree()) {
            let mut r = x.apply(&self.component(&idx))?;
            let mut t = idx.clone();
            for s in 0..idx.len() {
                for (j, xj) in xs.iter().enumerate() {
                    let d = xj.derivative(idx[s])?;
                    if d.is_zero() {
                        continue;
                    }
                    t[s] = j;
                    r = &r + &(&self.component(&t) * &d);
                }
                t[s] = idx[s];
            }
            entries.push((idx, r));
        }
        SymCovariant::from_entries(chart, self.degree(), entries)
    }
}

impl LieDerivable for VolumeForm {
    type Output = ScaledVolume;
    /// `div_mu X = d_i X^i + X^i d_i log rho`.
    fn lie_derivative_along(&self, x: &Multivector) -> Result<ScaledVolume> {
        self.chart().check_same(x.chart())?;
        let xs = x.vector_components()?;
        let mut div = self.chart().zero();
        for (i, xi) in xs.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            div = &div + &xi.derivative(i)?;
            div = &div + &(xi * &self.log_derivative(i)?);
        }
        Ok(ScaledVolume {
            factor: div,
            form: self.clone(),
        })
    }
}

/// Divergence of `X` with respect to `mu`.
pub fn divergence(mu: &VolumeForm, x: &Multivector) -> Result<RatFunc> {
    Ok(mu.lie_derivative_along(x)?.factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Chart;

    fn so3(c: &Chart) -> Multivector {
        Multivector::from_entries(
            c,
            2,
            [
                (vec![0, 1], c.coordinate(2)),
                (vec![1, 2], c.coordinate(0)),
                (vec![2, 0], c.coordinate(1)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn lie_bracket_basics() {
        let c = Chart::euclidean("M", 2);
        let d1 = Multivector::basis(&c, &[0]).unwrap();
        let x1d2 = Multivector::basis(&c, &[1])
            .unwrap()
            .scale(&c.coordinate(0));
        assert_eq!(
            lie_bracket(&d1, &x1d2).unwrap(),
            Multivector::basis(&c, &[1]).unwrap()
        );
        assert!(lie_bracket(&x1d2, &x1d2).unwrap().is_zero());
        assert_eq!(
            schouten_bracket(&d1, &x1d2).unwrap(),
            lie_bracket(&d1, &x1d2).unwrap()
        );
    }

    #[test]
    fn schouten_of_so3_vanishes() {
        let c = Chart::euclidean("M", 3);
        let w = so3(&c);
        assert!(schouten_bracket(&w, &w).unwrap().is_zero());
    }

    #[test]
    fn bracket_with_function_is_contraction() {
        let c = Chart::euclidean("M", 2);
        let p = Multivector::basis(&c, &[0, 1]).unwrap();
        let f = Multivector::function(&c, c.coordinate(0)).unwrap();
        let df = OneForm::differential(&c, &c.coordinate(0)).unwrap();
        assert_eq!(schouten_bracket(&p, &f).unwrap(), p.contract(&df).unwrap());
    }

    #[test]
    fn koszul_on_coframe() {
        let c = Chart::euclidean("M", 3);
        let w = so3(&c);
        let k = koszul_bracket(&w, &OneForm::basis(&c, 0), &OneForm::basis(&c, 1)).unwrap();
        assert_eq!(k, OneForm::basis(&c, 2));
        let a = OneForm::new(&c, vec![c.coordinate(1), c.one(), c.zero()]).unwrap();
        assert!(koszul_bracket(&w, &a, &a).unwrap().is_zero());
    }

    #[test]
    fn coboundary_of_coordinate() {
        let c = Chart::euclidean("M", 2);
        let w = Multivector::basis(&c, &[0, 1]).unwrap();
        let f = Multivector::function(&c, c.coordinate(0)).unwrap();
        // sigma(x1) = -X_{x1} = -d2
        assert_eq!(
            lichnerowicz_coboundary(&w, &f).unwrap(),
            -&Multivector::basis(&c, &[1]).unwrap()
        );
        assert!(lichnerowicz_coboundary(&w, &Multivector::zero(&c, 1))
            .unwrap()
            .is_zero());
    }
}
