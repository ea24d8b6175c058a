//! Lifts of functions, fields and tensors from M to its tangent bundle.

use crate::brackets::lie_derivative;
use crate::error::{Error, Result};
use crate::geometry::{
    nabla_component, sorted_tuples, Chart, Components, LinearConnection, Multivector,
    NonlinearConnection, SymCovariant,
};
use crate::ring::{RatFunc, Scalar};

/// The fiber polynomial `iota(G) = G_{i1...ik} y^{i1} ... y^{ik}` on TM.
pub fn iota(g: &SymCovariant) -> Result<RatFunc> {
    g.to_fiber_poly(&g.chart().tangent()?)
}

/// Recover `G` from a fiberwise homogeneous polynomial; the degree is read off
/// the polynomial (zero maps to the zero function).
pub fn iota_inverse(tm: &Chart, f: &RatFunc) -> Result<SymCovariant> {
    let base = tm.require_tangent()?;
    tm.check_fn(f)?;
    let degree = match f.numerator().terms().next() {
        Some((m, _)) => (0..tm.dim()).map(|i| m.exponents()[tm.y(i)] as usize).sum(),
        None => return Ok(SymCovariant::zero(base, 0)),
    };
    SymCovariant::from_fiber_poly(tm, degree, f)
}

/// `f^C = y^k d_k f`.
pub fn complete_lift_function(f: &RatFunc, tm: &Chart) -> Result<RatFunc> {
    let base = tm.require_tangent()?;
    base.check_fn(f)?;
    let mut out = tm.zero();
    for k in 0..tm.dim() {
        let d = f.derivative(k)?;
        if !d.is_zero() {
            out = &out + &(&tm.pullback(&d)? * &tm.coordinate(tm.y(k)));
        }
    }
    Ok(out)
}

/// `P^V = P^I(x) d/dy^{i1} ^ ... ^ d/dy^{ik}`; on functions, the pullback.
pub fn vertical_lift(p: &Multivector) -> Result<Multivector> {
    let base = p.chart();
    base.require_base()?;
    let tm = base.tangent()?;
    let entries = p
        .components()
        .map(|(k, f)| {
            Ok((
                k.iter().map(|&i| tm.y(i)).collect::<Vec<_>>(),
                tm.pullback(f)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Multivector::from_entries(&tm, p.degree(), entries)
}

/// Complete lift, fixed by `f^C = y^k d_k f`, `(d_i)^C = d/dx^i` and
/// `(P ^ Q)^C = P^C ^ Q^V + P^V ^ Q^C`. On a term `f d_I` this gives
/// `f^C d/dy^I + f sum_s d/dy^{i1} ^ .. d/dx^{is} .. ^ d/dy^{ik}`.
pub fn complete_lift(p: &Multivector) -> Result<Multivector> {
    let base = p.chart();
    base.require_base()?;
    let tm = base.tangent()?;
    let mut entries = Vec::new();
    for (k, f) in p.components() {
        let vertical: Vec<usize> = k.iter().map(|&i| tm.y(i)).collect();
        entries.push((vertical.clone(), complete_lift_function(f, &tm)?));
        let fv = tm.pullback(f)?;
        for s in 0..k.len() {
            let mut slots = vertical.clone();
            slots[s] = k[s];
            entries.push((slots, fv.clone()));
        }
    }
    Multivector::from_entries(&tm, p.degree(), entries)
}

/// Closed form `w^C = w^{ij} d/dx^i ^ d/dy^j + 1/2 y^k d_k w^{ij} d/dy^i ^ d/dy^j`
/// (sums over all i, j) for a bivector.
pub fn complete_lift_bivector(w: &Multivector) -> Result<Multivector> {
    if w.degree() != 2 {
        return Err(Error::Structural("expected a bivector".into()));
    }
    let base = w.chart();
    base.require_base()?;
    let tm = base.tangent()?;
    let n = base.dim();
    let half = Scalar::new(1.into(), 2.into());
    let mut entries = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let wij = w.component(&[i, j]);
            if wij.is_zero() {
                continue;
            }
            entries.push((vec![i, tm.y(j)], tm.pullback(&wij)?));
            entries.push((
                vec![tm.y(i), tm.y(j)],
                complete_lift_function(&wij, &tm)?.scale(&half),
            ));
        }
    }
    Multivector::from_entries(&tm, 2, entries)
}

/// The Euler field `E = y^i d/dy^i`.
pub fn euler_field(tm: &Chart) -> Result<Multivector> {
    tm.require_tangent()?;
    let n = tm.dim();
    let mut comps = vec![tm.zero(); 2 * n];
    for i in 0..n {
        comps[tm.y(i)] = tm.coordinate(tm.y(i));
    }
    Multivector::vector(tm, comps)
}

/// The vertical endomorphism `J = d/dy^i (x) dx^i` applied to a vector field on TM.
pub fn vertical_endomorphism(x: &Multivector) -> Result<Multivector> {
    let tm = x.chart();
    tm.require_tangent()?;
    let xs = x.vector_components()?;
    let n = tm.dim();
    let mut comps = vec![tm.zero(); 2 * n];
    for i in 0..n {
        comps[tm.y(i)] = xs[i].clone();
    }
    Multivector::vector(tm, comps)
}

/// A second-order vector field `S = y^i d/dx^i + s^i(x, y) d/dy^i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Semispray(Multivector);

impl Semispray {
    pub fn new(field: Multivector) -> Result<Self> {
        let tm = field.chart().clone();
        tm.require_tangent()?;
        let xs = field.vector_components()?;
        for i in 0..tm.dim() {
            if xs[i] != tm.coordinate(tm.y(i)) {
                return Err(Error::Structural(format!(
                    "component {} of a semispray must be {}",
                    i + 1,
                    tm.vars().name(tm.y(i))
                )));
            }
        }
        Ok(Semispray(field))
    }

    pub fn field(&self) -> &Multivector {
        &self.0
    }

    pub fn chart(&self) -> &Chart {
        self.0.chart()
    }
}

/// `S = y^i d/dx^i - y^i y^k Gamma^j_{ik} d/dy^j`.
pub fn geodesic_spray(c: &LinearConnection) -> Result<Semispray> {
    let tm = c.chart().tangent()?;
    let n = c.dim();
    let mut comps = vec![tm.zero(); 2 * n];
    for i in 0..n {
        comps[i] = tm.coordinate(tm.y(i));
    }
    for j in 0..n {
        let mut s = tm.zero();
        for i in 0..n {
            for k in 0..n {
                let g = c.gamma(j, i, k);
                if !g.is_zero() {
                    let yy = &tm.coordinate(tm.y(i)) * &tm.coordinate(tm.y(k));
                    s = &s - &(&tm.pullback(g)? * &yy);
                }
            }
        }
        comps[tm.y(j)] = s;
    }
    Semispray::new(Multivector::vector(&tm, comps)?)
}

/// `w^H = 1/2 w^{ij} delta_i ^ delta_j`.
pub fn horizontal_lift_bivector(w: &Multivector, nl: &NonlinearConnection) -> Result<Multivector> {
    let tm = nl.chart();
    w.chart().check_same(tm.require_tangent()?)?;
    if w.degree() != 2 {
        return Err(Error::Structural("expected a bivector".into()));
    }
    let mut out = Multivector::zero(tm, 2);
    for (k, f) in w.components() {
        let di = nl.delta(k[0])?;
        let dj = nl.delta(k[1])?;
        out = out.checked_add(&di.wedge(&dj)?.scale(&tm.pullback(f)?))?;
    }
    Ok(out)
}

/// `R^k_{ij} = delta_i Gamma^k_j - delta_j Gamma^k_i`, indexed `[k, i, j]`.
pub fn nonlinear_curvature(nl: &NonlinearConnection) -> Result<Components> {
    let n = nl.dim();
    let deltas = (0..n).map(|i| nl.delta(i)).collect::<Result<Vec<_>>>()?;
    Components::from_fn(nl.chart(), &[n, n, n], |idx| {
        let (k, i, j) = (idx[0], idx[1], idx[2]);
        Ok(&deltas[i].apply(nl.gamma(k, j))? - &deltas[j].apply(nl.gamma(k, i))?)
    })
}

/// The graded nabla-lift `W = -1/2 L_S w^C`, computed through the geodesic
/// spray and cross-checked against the coordinate closed form.
pub fn graded_nabla_lift(w: &Multivector, c: &LinearConnection) -> Result<Multivector> {
    let w_op = graded_nabla_lift_operator(w, c)?;
    let w_closed = graded_nabla_lift_closed_form(w, c)?;
    if w_op != w_closed {
        return Err(Error::Convention {
            context: "graded nabla-lift".into(),
            detail: format!("operator form {w_op:?} differs from closed form {w_closed:?}"),
        });
    }
    Ok(w_op)
}

/// `-1/2 L_S w^C` without the cross-check.
pub fn graded_nabla_lift_operator(w: &Multivector, c: &LinearConnection) -> Result<Multivector> {
    if !c.is_torsion_free() {
        return Err(Error::Structural(
            "the graded lift needs a torsion-free connection".into(),
        ));
    }
    c.chart().check_same(w.chart())?;
    let s = geodesic_spray(c)?;
    let lw = lie_derivative(s.field(), &complete_lift(w)?)?;
    lw.map(|f| Ok(f.scale(&Scalar::new((-1).into(), 2.into()))))
}

/// Coordinate expression of the graded nabla-lift:
/// `w^{ij}` on `dx^i ^ dx^j`, `-y^a w^{ik} Gamma^j_{ka}` on `dx^i ^ dy^j`, and on
/// `dy^i ^ dy^j` (i < j) `-1/2 y^a y^b B^{ij}_{ab}` with
/// `B = d_a d_b w^{ij} - d_k w^{ij} G^k_{ab} + w^{kj} d_k G^i_{ab} - w^{ki} d_k G^j_{ab}
///      + 2 d_b w^{kj} G^i_{ka} - 2 d_b w^{ki} G^j_{ka}`.
pub fn graded_nabla_lift_closed_form(w: &Multivector, c: &LinearConnection) -> Result<Multivector> {
    if !c.is_torsion_free() {
        return Err(Error::Structural(
            "the graded lift needs a torsion-free connection".into(),
        ));
    }
    let base = c.chart();
    base.check_same(w.chart())?;
    if w.degree() != 2 {
        return Err(Error::Structural("expected a bivector".into()));
    }
    let tm = base.tangent()?;
    let n = base.dim();
    let y = |a: usize| tm.coordinate(tm.y(a));
    let wc = |i: usize, j: usize| w.component(&[i, j]);
    let mut entries = Vec::new();
    for (k, f) in w.components() {
        entries.push((k.clone(), tm.pullback(f)?));
    }
    for i in 0..n {
        for j in 0..n {
            let mut terms = Vec::new();
            for a in 0..n {
                for k in 0..n {
                    let g = c.gamma(j, k, a);
                    if !g.is_zero() && !wc(i, k).is_zero() {
                        terms.push((a, &wc(i, k) * g));
                    }
                }
            }
            let mut lifted = tm.zero();
            for (a, t) in terms {
                lifted = &lifted - &(&tm.pullback(&t)? * &y(a));
            }
            entries.push((vec![i, tm.y(j)], lifted));
        }
    }
    let half = Scalar::new((-1).into(), 2.into());
    for i in 0..n {
        for j in i + 1..n {
            let mut yy = tm.zero();
            for a in 0..n {
                for b in 0..n {
                    let mut bb = wc(i, j).derivative(a)?.derivative(b)?;
                    for k in 0..n {
                        bb = &bb - &(&wc(i, j).derivative(k)? * c.gamma(k, a, b));
                        bb = &bb + &(&wc(k, j) * &c.gamma(i, a, b).derivative(k)?);
                        bb = &bb - &(&wc(k, i) * &c.gamma(j, a, b).derivative(k)?);
                        bb = &bb + &(&wc(k, j).derivative(b)? * c.gamma(i, k, a)).scale_int(2);
                        bb = &bb - &(&wc(k, i).derivative(b)? * c.gamma(j, k, a)).scale_int(2);
                    }
                    if !bb.is_zero() {
                        yy = &yy + &(&tm.pullback(&bb)? * &(&y(a) * &y(b)));
                    }
                }
            }
            entries.push((vec![tm.y(i), tm.y(j)], yy.scale(&half)));
        }
    }
    Multivector::from_entries(&tm, 2, entries)
}

/// Symmetrized covariant derivative
/// `(^s nabla H)_J = 1/(k+1) sum_p (nabla_{j_p} H)(J without j_p)`.
pub fn sym_nabla(c: &LinearConnection, h: &SymCovariant) -> Result<SymCovariant> {
    let chart = c.chart();
    chart.check_same(h.chart())?;
    let k = h.degree();
    let n = c.dim();
    let factor = Scalar::new(1.into(), ((k + 1) as i64).into());
    let mut entries = Vec::new();
    for j in sorted_tuples(n, k + 1) {
        let mut s = chart.zero();
        for p in 0..=k {
            let mut rest = j.clone();
            let a = rest.remove(p);
            s = &s + &nabla_component(c, h, a, &rest)?;
        }
        entries.push((j, s.scale(&factor)));
    }
    SymCovariant::from_entries(chart, k + 1, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::OneForm;

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
    fn iota_basics() {
        let c = Chart::euclidean("M", 2);
        let tm = c.tangent().unwrap();
        let dx1 = SymCovariant::from_one_form(&OneForm::basis(&c, 0));
        assert_eq!(iota(&dx1).unwrap(), tm.coordinate(2));
        let yy = &tm.coordinate(2) * &tm.coordinate(3);
        assert_eq!(iota(&iota_inverse(&tm, &yy).unwrap()).unwrap(), yy);
        assert!(iota_inverse(&tm, &(&yy + &tm.coordinate(2))).is_err());
    }

    #[test]
    fn vertical_and_complete_lifts_of_basis() {
        let c = Chart::euclidean("M", 2);
        let tm = c.tangent().unwrap();
        let w = Multivector::basis(&c, &[0, 1]).unwrap();
        assert_eq!(
            vertical_lift(&w).unwrap(),
            Multivector::basis(&tm, &[2, 3]).unwrap()
        );
        let expect =
            &Multivector::basis(&tm, &[0, 3]).unwrap() - &Multivector::basis(&tm, &[1, 2]).unwrap();
        assert_eq!(complete_lift(&w).unwrap(), expect);
    }

    #[test]
    fn complete_lift_matches_closed_form_for_so3() {
        let c = Chart::euclidean("M", 3);
        let w = so3(&c);
        assert_eq!(
            complete_lift(&w).unwrap(),
            complete_lift_bivector(&w).unwrap()
        );
    }

    #[test]
    fn flat_spray_and_euler_field() {
        let c = Chart::euclidean("M", 2);
        let tm = c.tangent().unwrap();
        let s = geodesic_spray(&LinearConnection::flat(&c)).unwrap();
        assert_eq!(
            vertical_endomorphism(s.field()).unwrap(),
            euler_field(&tm).unwrap()
        );
        let curved = LinearConnection::from_entries(&c, [((0, 1, 1), c.coordinate(0))]).unwrap();
        let s = geodesic_spray(&curved).unwrap();
        let y2 = tm.coordinate(3);
        assert_eq!(
            s.field().component(&[tm.y(0)]),
            -&(&tm.coordinate(0) * &(&y2 * &y2))
        );
    }

    #[test]
    fn flat_graded_lift_of_constant_w() {
        let c = Chart::euclidean("M", 2);
        let tm = c.tangent().unwrap();
        let w = Multivector::basis(&c, &[0, 1]).unwrap();
        let lift = graded_nabla_lift(&w, &LinearConnection::flat(&c)).unwrap();
        assert_eq!(lift, Multivector::basis(&tm, &[0, 1]).unwrap());
    }

    #[test]
    fn sym_nabla_flat_example() {
        let c = Chart::euclidean("M", 2);
        let tm = c.tangent().unwrap();
        let alpha = SymCovariant::from_one_form(
            &OneForm::new(&c, vec![c.coordinate(1), c.zero()]).unwrap(),
        );
        let r = sym_nabla(&LinearConnection::flat(&c), &alpha).unwrap();
        assert_eq!(iota(&r).unwrap(), &tm.coordinate(2) * &tm.coordinate(3));
    }
}
