//! Decision procedures of Poisson calculus: Jacobi checks, Hamiltonian and
//! modular fields, transversal structures, graded bivectors on TM and the
//! horizontal-lift conditions.

mod graded;
mod horizontal;
mod report;

pub use graded::{
    assemble_graded, check_graded_poisson, contravariant_connection_of, contravariant_curvature,
    d_psi, d_symmetric, psi_operator, shape_analysis, xi_operator, GradedParts, PolyGradedParts,
    Shape,
};
pub use horizontal::{horizontal_poisson_condition, nabla_compatibility_condition};
pub use report::{Check, Report, Witness};

use crate::brackets::{lichnerowicz_coboundary, schouten_bracket};
use crate::error::{Error, Result};
use crate::geometry::{
    determinant, increasing_tuples, sharp, Chart, Metric, Multivector, OneForm, VolumeForm,
};
use crate::lifts::{complete_lift, vertical_lift};
use crate::ring::RatFunc;

fn require_bivector(p: &Multivector) -> Result<()> {
    if p.degree() != 2 {
        return Err(Error::Structural(format!(
            "expected a bivector, got degree {}",
            p.degree()
        )));
    }
    Ok(())
}

/// `[P, P] = 0`, with the first nonzero component of `[P, P]` as witness.
pub fn is_poisson(p: &Multivector) -> Result<Check> {
    require_bivector(p)?;
    Ok(Check::zero_multivector("poisson", &schouten_bracket(p, p)?))
}

/// `X_f = {f, .}_P = d_i f P^{ij} d_j`.
pub fn hamiltonian_field(p: &Multivector, f: &RatFunc) -> Result<Multivector> {
    require_bivector(p)?;
    sharp(p, &OneForm::differential(p.chart(), f)?)
}

/// `Delta^i = d_k P^{ik} + P^{ik} d_k log rho`; satisfies `Delta f = div_mu X_f`.
pub fn modular_field(p: &Multivector, mu: &VolumeForm) -> Result<Multivector> {
    require_bivector(p)?;
    let chart = p.chart();
    chart.check_same(mu.chart())?;
    let m = chart.arity();
    let logs = (0..m)
        .map(|k| mu.log_derivative(k))
        .collect::<Result<Vec<_>>>()?;
    let comps = (0..m)
        .map(|i| {
            let mut r = chart.zero();
            for (k, lk) in logs.iter().enumerate() {
                let pik = p.component(&[i, k]);
                if pik.is_zero() {
                    continue;
                }
                r = &r + &pik.derivative(k)?;
                r = &r + &(&pik * lk);
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Multivector::vector(chart, comps)
}

/// Volume of the Sasaki metric on TM: density `det g` pulled back.
pub fn sasaki_volume(g: &Metric) -> Result<VolumeForm> {
    let tm = g.chart().tangent()?;
    VolumeForm::new(&tm, tm.pullback(g.det())?)
}

/// Riemannian volume `sqrt(det g) dx`, kept symbolic as a square root.
pub fn riemannian_volume(g: &Metric) -> Result<VolumeForm> {
    VolumeForm::sqrt_of(g.chart(), g.det().clone())
}

/// Slots of the vertical foliation of a tangent chart.
pub fn vertical_foliation(tm: &Chart) -> Result<Vec<usize>> {
    tm.require_tangent()?;
    Ok((0..tm.dim()).map(|i| tm.y(i)).collect())
}

/// Transversal Poisson test for the foliation spanned by the coordinate fields
/// in `leaves`: `d_v P^{ab} = 0` and `[P, P]^{abc} = 0` for transversal `a, b, c`.
pub fn is_transversal_poisson(p: &Multivector, leaves: &[usize]) -> Result<Report> {
    require_bivector(p)?;
    let m = p.chart().arity();
    if let Some(&bad) = leaves.iter().find(|&&v| v >= m) {
        return Err(Error::Structural(format!(
            "foliation slot {} out of range 1..={m}",
            bad + 1
        )));
    }
    let transversal: Vec<usize> = (0..m).filter(|s| !leaves.contains(s)).collect();
    let pick = |t: &[usize]| t.iter().map(|&i| transversal[i]).collect::<Vec<_>>();
    let mut invariance = Vec::new();
    for &v in leaves {
        for pair in increasing_tuples(transversal.len(), 2) {
            let idx = pick(&pair);
            let mut label = vec![v];
            label.extend(&idx);
            invariance.push((label, p.component(&idx).derivative(v)?));
        }
    }
    let pp = schouten_bracket(p, p)?;
    let jacobi: Vec<_> = increasing_tuples(transversal.len(), 3)
        .into_iter()
        .map(|t| {
            let idx = pick(&t);
            let f = pp.component(&idx);
            (idx, f)
        })
        .collect();
    Ok(Report::all(vec![
        Check::vanishing("leaf_invariant", invariance),
        Check::vanishing("transversal_jacobi", jacobi),
    ]))
}

/// Whether `det(w^{ij})` is a nonzero rational function. Odd dimension is
/// always singular.
pub fn hamiltonian_semispray_exists(w: &Multivector) -> Result<bool> {
    require_bivector(w)?;
    let chart = w.chart();
    chart.require_base()?;
    let n = chart.dim();
    if n % 2 == 1 {
        return Ok(false);
    }
    let m: Vec<Vec<RatFunc>> = (0..n)
        .map(|i| (0..n).map(|j| w.component(&[i, j])).collect())
        .collect();
    Ok(!determinant(chart, &m)?.is_zero())
}

/// `(sigma_w Q)^C = sigma_{w^C} Q^C`, and for a function `f` also
/// `(sigma_w f)^V = sigma_{w^C}(f o pi)`.
pub fn lift_coboundary_identity(w: &Multivector, q: &Multivector) -> Result<bool> {
    require_bivector(w)?;
    w.chart().check_same(q.chart())?;
    let wc = complete_lift(w)?;
    let lhs = complete_lift(&lichnerowicz_coboundary(w, q)?)?;
    let rhs = lichnerowicz_coboundary(&wc, &complete_lift(q)?)?;
    if lhs != rhs {
        return Ok(false);
    }
    if q.degree() == 0 {
        let lhs = vertical_lift(&lichnerowicz_coboundary(w, q)?)?;
        let rhs = lichnerowicz_coboundary(&wc, &vertical_lift(q)?)?;
        return Ok(lhs == rhs);
    }
    Ok(true)
}

/// `[P, Q] = 0`, i.e. `P + Q` is Poisson whenever `P` and `Q` are.
pub fn compatibility_check(p: &Multivector, q: &Multivector) -> Result<Check> {
    require_bivector(p)?;
    require_bivector(q)?;
    Ok(Check::zero_multivector(
        "compatible",
        &schouten_bracket(p, q)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brackets::divergence;

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
    fn poisson_checks_with_witness() {
        let c = Chart::euclidean("M", 3);
        assert!(is_poisson(&so3(&c)).unwrap().passed);
        assert!(is_poisson(&Multivector::zero(&c, 2)).unwrap().passed);
        let bad = Multivector::from_entries(
            &c,
            2,
            [(vec![0, 1], c.coordinate(1)), (vec![1, 2], c.coordinate(0))],
        )
        .unwrap();
        let check = is_poisson(&bad).unwrap();
        assert!(!check.passed);
        let w = check.witness.unwrap();
        assert_eq!(w.indices, vec![0, 1, 2]);
        assert!(!w.value.is_zero());
    }

    #[test]
    fn hamiltonian_field_of_coordinate() {
        let c = Chart::euclidean("M", 2);
        let w = Multivector::basis(&c, &[0, 1]).unwrap();
        let x = hamiltonian_field(&w, &c.coordinate(0)).unwrap();
        assert_eq!(x, Multivector::basis(&c, &[1]).unwrap());
    }

    #[test]
    fn modular_field_matches_divergence() {
        let c = Chart::euclidean("M", 3);
        let w = so3(&c);
        let x1 = c.coordinate(0);
        let mu = VolumeForm::new(&c, &c.one() + &(&x1 * &x1)).unwrap();
        let delta = modular_field(&w, &mu).unwrap();
        for i in 0..3 {
            let f = c.coordinate(i);
            let lhs = delta.apply(&f).unwrap();
            let rhs = divergence(&mu, &hamiltonian_field(&w, &f).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
        assert!(modular_field(&w, &VolumeForm::standard(&c))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn semispray_existence() {
        let c3 = Chart::euclidean("M", 3);
        assert!(!hamiltonian_semispray_exists(&so3(&c3)).unwrap());
        let c2 = Chart::euclidean("M", 2);
        let w = Multivector::basis(&c2, &[0, 1])
            .unwrap()
            .scale(&c2.coordinate(0));
        assert!(hamiltonian_semispray_exists(&w).unwrap());
        assert!(!hamiltonian_semispray_exists(&Multivector::zero(&c2, 2)).unwrap());
    }

    #[test]
    fn transversal_check_detects_leaf_dependence() {
        let c = Chart::euclidean("M", 2);
        let tm = c.tangent().unwrap();
        let y1 = tm.coordinate(tm.y(0));
        let p = Multivector::basis(&tm, &[0, 1])
            .unwrap()
            .scale(&(&y1 * &y1));
        let leaves = vertical_foliation(&tm).unwrap();
        let r = is_transversal_poisson(&p, &leaves).unwrap();
        assert!(!r.verdict);
        assert_eq!(
            r.get("leaf_invariant")
                .unwrap()
                .witness
                .as_ref()
                .unwrap()
                .indices,
            vec![2, 0, 1]
        );
        let wc = complete_lift(&so3(&Chart::euclidean("M", 3))).unwrap();
        let leaves = vertical_foliation(wc.chart()).unwrap();
        assert!(is_transversal_poisson(&wc, &leaves).unwrap().verdict);
        assert!(is_transversal_poisson(&wc, &[9]).is_err());
    }

    #[test]
    fn report_text_format() {
        let c = Chart::euclidean("M", 1);
        let ok = Check::pass("a");
        let bad = Check::vanishing("b", [(vec![0, 2], c.coordinate(0))]);
        assert_eq!(ok.to_string(), "a: PASS");
        assert_eq!(bad.to_string(), "b: FAIL [witness: [1,3] = x1]");
        let r = Report::all(vec![ok, bad]);
        assert!(!r.verdict);
        assert!(r.to_string().ends_with("verdict: FAIL"));
        assert_eq!(r.to_json()["checks"][1]["witness"]["indices"][1], 3);
    }
}
