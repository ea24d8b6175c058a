//! Poisson and compatibility conditions for horizontal lifts.

use super::{is_poisson, Check, Report};
use crate::brackets::schouten_bracket;
use crate::error::{Error, Result};
use crate::geometry::{
    increasing_tuples, nabla_squared_w, LinearConnection, Multivector, NonlinearConnection,
};
use crate::lifts::{horizontal_lift_bivector, nonlinear_curvature};

/// Re-expresses a multivector on TM in the adapted frame `(delta_i, d/dy^j)`,
/// reusing slot `i` for `delta_i`: substitutes `d/dx^i = delta_i + Gamma^j_i d/dy^j`.
fn to_adapted_frame(t: &Multivector, nl: &NonlinearConnection) -> Result<Multivector> {
    let tm = nl.chart();
    let n = nl.dim();
    let image = |slot: usize| -> Result<Multivector> {
        let mut comps = vec![tm.zero(); 2 * n];
        comps[slot] = tm.one();
        if slot < n {
            for j in 0..n {
                comps[tm.y(j)] = nl.gamma(j, slot).clone();
            }
        }
        Multivector::vector(tm, comps)
    };
    let images = (0..2 * n).map(image).collect::<Result<Vec<_>>>()?;
    let mut out = Multivector::zero(tm, t.degree());
    for (idx, f) in t.components() {
        let mut term = Multivector::function(tm, f.clone())?;
        for &s in idx {
            term = term.wedge(&images[s])?;
        }
        out = out.checked_add(&term)?;
    }
    Ok(out)
}

/// Poisson test for `w^H`: `[w, w] = 0` and `w^{ih} w^{jl} R^k_{hl} = 0`.
///
/// The report also lists the two blocks of `[w^H, w^H]` in the adapted frame
/// (`delta ^ delta ^ delta` and `delta ^ delta ^ d/dy`); the verdict is the
/// conjunction of the first two conditions only.
pub fn horizontal_poisson_condition(w: &Multivector, nl: &NonlinearConnection) -> Result<Report> {
    let tm = nl.chart();
    w.chart().check_same(tm.require_tangent()?)?;
    let n = nl.dim();
    let base_poisson = Check {
        name: "base_poisson".into(),
        ..is_poisson(w)?
    };

    let r = nonlinear_curvature(nl)?;
    let wl = |i: usize, j: usize| tm.pullback(&w.component(&[i, j]));
    let mut contraction = Vec::new();
    for ij in increasing_tuples(n, 2) {
        let (i, j) = (ij[0], ij[1]);
        for k in 0..n {
            let mut s = tm.zero();
            for h in 0..n {
                let wih = wl(i, h)?;
                if wih.is_zero() {
                    continue;
                }
                for l in 0..n {
                    let rk = r.get(&[k, h, l]);
                    if rk.is_zero() {
                        continue;
                    }
                    s = &s + &(&(&wih * &wl(j, l)?) * rk);
                }
            }
            contraction.push((vec![i, j, k], s));
        }
    }
    let curvature = Check::vanishing("curvature_condition", contraction);

    let wh = horizontal_lift_bivector(w, nl)?;
    let adapted = to_adapted_frame(&schouten_bracket(&wh, &wh)?, nl)?;
    let vertical_slots = |idx: &[usize]| idx.iter().filter(|&&s| s >= n).count();
    let block = |name: &str, v: usize| {
        Check::vanishing(
            name,
            adapted
                .components()
                .filter(|(idx, _)| vertical_slots(idx) == v)
                .map(|(idx, f)| (idx.clone(), f.clone())),
        )
    };
    let horizontal_block = block("horizontal_block", 0);
    let mixed_block = block("mixed_block", 1);
    let verdict = base_poisson.passed && curvature.passed;
    Ok(Report {
        checks: vec![base_poisson, curvature, horizontal_block, mixed_block],
        verdict,
    })
}

/// `i_{X_f}(nabla^2 w) = 0` on the coordinate functions `f = x^i`:
/// `w^{ih} (nabla^2 w)^{jk}_{hb} = 0`. Witness index `[i, j, k, b]`.
pub fn nabla_compatibility_condition(w: &Multivector, c: &LinearConnection) -> Result<Check> {
    if w.degree() != 2 {
        return Err(Error::Structural("expected a bivector".into()));
    }
    let chart = c.chart();
    let n = c.dim();
    let hess = nabla_squared_w(c, w)?;
    let mut out = Vec::new();
    for i in 0..n {
        for jk in increasing_tuples(n, 2) {
            for b in 0..n {
                let mut s = chart.zero();
                for h in 0..n {
                    let wih = w.component(&[i, h]);
                    let t = hess.get(&[jk[0], jk[1], h, b]);
                    if !wih.is_zero() && !t.is_zero() {
                        s = &s + &(&wih * t);
                    }
                }
                out.push((vec![i, jk[0], jk[1], b], s));
            }
        }
    }
    Ok(Check::vanishing("nabla_squared", out))
}
