use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{
    map_from_poly, map_product, map_to_poly, sorted_tuples, Chart, Multivector, SymCovariant,
    SymMap,
};
use crate::ring::{RatFunc, Scalar, Vars};

/// A Lie algebroid of rank p over a base chart, given in a local frame `e_u`
/// by its anchor `sigma(e_u) = sigma^i_u d_i` and structure functions
/// `[e_u, e_v] = c^w_{uv} e_w`.
#[derive(Clone)]
pub struct LieAlgebroid(Arc<Inner>);

struct Inner {
    chart: Chart,
    rank: usize,
    anchor: Vec<Vec<RatFunc>>,
    structure: Vec<Vec<Vec<RatFunc>>>,
    /// Base coordinates followed by one formal fiber variable per frame section.
    formal: Vars,
}

impl LieAlgebroid {
    /// `anchor[u][i] = sigma^i_u`, `structure[w][u][v] = c^w_{uv}`.
    pub fn new(
        chart: &Chart,
        anchor: Vec<Vec<RatFunc>>,
        structure: Vec<Vec<Vec<RatFunc>>>,
    ) -> Result<Self> {
        chart.require_base()?;
        let rank = anchor.len();
        let n = chart.arity();
        if anchor.iter().any(|r| r.len() != n) {
            return Err(Error::Structural(format!("anchor rows need {n} entries")));
        }
        if structure.len() != rank
            || structure
                .iter()
                .any(|s| s.len() != rank || s.iter().any(|r| r.len() != rank))
        {
            return Err(Error::Structural(format!(
                "structure functions must be {rank}x{rank}x{rank}"
            )));
        }
        for f in anchor
            .iter()
            .flatten()
            .chain(structure.iter().flatten().flatten())
        {
            chart.check_fn(f)?;
        }
        for (w, s) in structure.iter().enumerate() {
            for u in 0..rank {
                for v in 0..rank {
                    if s[u][v] != -&s[v][u] {
                        return Err(Error::Structural(format!(
                            "structure function c^{}_({},{}) is not antisymmetric",
                            w + 1,
                            u + 1,
                            v + 1
                        )));
                    }
                }
            }
        }
        let mut names = chart.vars().names().to_vec();
        for u in 0..rank {
            let mut name = format!("\u{3be}{}", u + 1);
            while names.contains(&name) {
                name.push('\'');
            }
            names.push(name);
        }
        Ok(LieAlgebroid(Arc::new(Inner {
            chart: chart.clone(),
            rank,
            anchor,
            structure,
            formal: Vars::new(names),
        })))
    }

    pub fn chart(&self) -> &Chart {
        &self.0.chart
    }

    pub fn rank(&self) -> usize {
        self.0.rank
    }

    /// `sigma^i_u`.
    pub fn anchor(&self, u: usize, i: usize) -> &RatFunc {
        &self.0.anchor[u][i]
    }

    /// `c^w_{uv}`.
    pub fn structure(&self, w: usize, u: usize, v: usize) -> &RatFunc {
        &self.0.structure[w][u][v]
    }

    fn formal(&self) -> &Vars {
        &self.0.formal
    }

    fn xi(&self, u: usize) -> usize {
        self.chart().arity() + u
    }

    fn check_same(&self, other: &LieAlgebroid) -> Result<()> {
        if self != other {
            return Err(Error::Structural("sections of different algebroids".into()));
        }
        Ok(())
    }

    /// `sigma(s)` for a section `s`.
    pub fn anchor_of(&self, s: &AlgebroidSymTensor) -> Result<Multivector> {
        self.check_same(&s.algebroid)?;
        let coeffs = s.section_coefficients()?;
        let n = self.chart().arity();
        let comps = (0..n)
            .map(|i| {
                coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .fold(self.chart().zero(), |acc, (u, c)| {
                        &acc + &(c * self.anchor(u, i))
                    })
            })
            .collect();
        Multivector::vector(self.chart(), comps)
    }

    /// `[s, t]_A = s^u t^v c^w_{uv} e_w + sigma(s)(t^w) e_w - sigma(t)(s^u) e_u`.
    pub fn bracket(
        &self,
        s: &AlgebroidSymTensor,
        t: &AlgebroidSymTensor,
    ) -> Result<AlgebroidSymTensor> {
        sym_bracket(self, s, t)
    }

    /// `sigma([e_u, e_v]) = [sigma e_u, sigma e_v]` for all frame pairs.
    pub fn is_anchor_compatible(&self) -> Result<bool> {
        for u in 0..self.rank() {
            for v in u + 1..self.rank() {
                let eu = AlgebroidSymTensor::basis(self, u);
                let ev = AlgebroidSymTensor::basis(self, v);
                let lhs = self.anchor_of(&self.bracket(&eu, &ev)?)?;
                let rhs = super::lie_bracket(&self.anchor_of(&eu)?, &self.anchor_of(&ev)?)?;
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Jacobi identity of the bracket on all frame triples.
    pub fn satisfies_jacobi(&self) -> Result<bool> {
        let p = self.rank();
        for u in 0..p {
            for v in u + 1..p {
                for w in v + 1..p {
                    let e = |i| AlgebroidSymTensor::basis(self, i);
                    let a = self.bracket(&self.bracket(&e(u), &e(v))?, &e(w))?;
                    let b = self.bracket(&self.bracket(&e(v), &e(w))?, &e(u))?;
                    let c = self.bracket(&self.bracket(&e(w), &e(u))?, &e(v))?;
                    if !a.checked_add(&b)?.checked_add(&c)?.is_zero() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

impl PartialEq for LieAlgebroid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.chart == other.0.chart
                && self.0.anchor == other.0.anchor
                && self.0.structure == other.0.structure)
    }
}

impl Eq for LieAlgebroid {}

impl fmt::Debug for LieAlgebroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LieAlgebroid(rank {} over {:?})",
            self.rank(),
            self.chart()
        )
    }
}

/// `TM` with the identity anchor and the coordinate frame (zero structure functions).
pub fn tangent_algebroid(chart: &Chart) -> Result<LieAlgebroid> {
    let n = chart.arity();
    let anchor = (0..n)
        .map(|u| {
            (0..n)
                .map(|i| if u == i { chart.one() } else { chart.zero() })
                .collect()
        })
        .collect();
    LieAlgebroid::new(chart, anchor, vec![vec![vec![chart.zero(); n]; n]; n])
}

/// `T*M` of a bivector: anchor `sigma(dx^i) = #dx^i`, structure `c^k_{ij} = d_k w^{ij}`.
pub fn cotangent_algebroid(w: &Multivector) -> Result<LieAlgebroid> {
    if w.degree() != 2 {
        return Err(Error::Structural(
            "the cotangent algebroid needs a bivector".into(),
        ));
    }
    let chart = w.chart();
    let n = chart.arity();
    let anchor = (0..n)
        .map(|i| (0..n).map(|j| w.component(&[i, j])).collect())
        .collect();
    let structure = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| w.component(&[i, j]).derivative(k))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    LieAlgebroid::new(chart, anchor, structure)
}

/// A symmetric tensor `G in S_k(A)`, stored like [`SymCovariant`]: fully
/// symmetric components over sorted tuples of frame indices.
#[derive(Clone, PartialEq, Eq)]
pub struct AlgebroidSymTensor {
    algebroid: LieAlgebroid,
    degree: usize,
    comps: SymMap,
}

impl AlgebroidSymTensor {
    pub fn zero(a: &LieAlgebroid, degree: usize) -> Self {
        AlgebroidSymTensor {
            algebroid: a.clone(),
            degree,
            comps: SymMap::new(),
        }
    }

    pub fn function(a: &LieAlgebroid, f: RatFunc) -> Result<Self> {
        Self::from_entries(a, 0, [(Vec::new(), f)])
    }

    /// The frame section `e_u`.
    pub fn basis(a: &LieAlgebroid, u: usize) -> Self {
        Self::from_entries(a, 1, [(vec![u], a.chart().one())]).expect("frame index in range")
    }

    /// The section `s^u e_u`.
    pub fn section(a: &LieAlgebroid, coeffs: Vec<RatFunc>) -> Result<Self> {
        if coeffs.len() != a.rank() {
            return Err(Error::Structural(format!(
                "a section needs {} coefficients",
                a.rank()
            )));
        }
        Self::from_entries(
            a,
            1,
            coeffs.into_iter().enumerate().map(|(u, f)| (vec![u], f)),
        )
    }

    /// Entries with the same sorted key add up.
    pub fn from_entries(
        a: &LieAlgebroid,
        degree: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, RatFunc)>,
    ) -> Result<Self> {
        let mut g = Self::zero(a, degree);
        for (mut idx, f) in entries {
            if idx.len() != degree || idx.iter().any(|&u| u >= a.rank()) {
                return Err(Error::Structural(format!("bad frame index tuple {idx:?}")));
            }
            a.chart().check_fn(&f)?;
            idx.sort_unstable();
            crate::geometry::map_add(&mut g.comps, idx, f);
        }
        Ok(g)
    }

    /// Identify a symmetric covariant tensor with an element of `S_k(T*M)`.
    pub fn from_sym_covariant(a: &LieAlgebroid, g: &SymCovariant) -> Result<Self> {
        a.chart().check_same(g.chart())?;
        if a.rank() != a.chart().arity() {
            return Err(Error::Structural(
                "algebroid rank differs from dimension".into(),
            ));
        }
        Self::from_entries(
            a,
            g.degree(),
            g.components().map(|(k, f)| (k.clone(), f.clone())),
        )
    }

    pub fn to_sym_covariant(&self) -> Result<SymCovariant> {
        SymCovariant::from_entries(
            self.algebroid.chart(),
            self.degree,
            self.comps.iter().map(|(k, f)| (k.clone(), f.clone())),
        )
    }

    pub fn algebroid(&self) -> &LieAlgebroid {
        &self.algebroid
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

    pub fn component(&self, idx: &[usize]) -> RatFunc {
        let mut k = idx.to_vec();
        k.sort_unstable();
        self.comps
            .get(&k)
            .cloned()
            .unwrap_or_else(|| self.algebroid.chart().zero())
    }

    fn section_coefficients(&self) -> Result<Vec<RatFunc>> {
        if self.degree != 1 {
            return Err(Error::Structural("expected a section (degree 1)".into()));
        }
        Ok((0..self.algebroid.rank())
            .map(|u| self.component(&[u]))
            .collect())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.algebroid.check_same(&other.algebroid)?;
        if self.degree != other.degree {
            return Err(Error::Structural("degree mismatch".into()));
        }
        let mut out = self.clone();
        for (k, f) in &other.comps {
            crate::geometry::map_add(&mut out.comps, k.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(&self.algebroid.chart().constant(-1)))
    }

    pub fn scale(&self, f: &RatFunc) -> Self {
        let mut out = Self::zero(&self.algebroid, self.degree);
        for (k, c) in &self.comps {
            crate::geometry::map_add(&mut out.comps, k.clone(), c * f);
        }
        out
    }

    pub fn sym_product(&self, other: &Self) -> Result<Self> {
        self.algebroid.check_same(&other.algebroid)?;
        Ok(AlgebroidSymTensor {
            algebroid: self.algebroid.clone(),
            degree: self.degree + other.degree,
            comps: map_product(
                &self.comps,
                &other.comps,
                self.degree,
                other.degree,
                self.algebroid.rank(),
            ),
        })
    }

    /// The polynomial in formal frame variables `xi_u` with coefficients on the base.
    fn to_formal(&self) -> Result<RatFunc> {
        map_to_poly(
            &self.comps,
            self.algebroid.formal(),
            self.algebroid.chart().arity(),
        )
    }

    fn from_formal(a: &LieAlgebroid, degree: usize, f: &RatFunc) -> Result<Self> {
        Ok(AlgebroidSymTensor {
            algebroid: a.clone(),
            degree,
            comps: map_from_poly(f, a.chart().vars(), a.chart().arity(), degree)?,
        })
    }
}

impl fmt::Debug for AlgebroidSymTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebroidSymTensor<{}>{{", self.degree)?;
        for (k, c) in &self.comps {
            let idx: Vec<String> = k.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, " [{}] = {};", idx.join(","), c)?;
        }
        write!(f, " }}")
    }
}

/// `L_s T`: `sigma(s)` on coefficients and `[s, .]_A` on frame sections,
/// extended to symmetric products as a derivation.
pub fn algebroid_lie_derivative(
    a: &LieAlgebroid,
    s: &AlgebroidSymTensor,
    t: &AlgebroidSymTensor,
) -> Result<AlgebroidSymTensor> {
    a.check_same(&s.algebroid)?;
    a.check_same(&t.algebroid)?;
    let vars = a.formal().clone();
    let ft = t.to_formal()?;
    let anchor = a.anchor_of(s)?.vector_components()?;
    let mut out = RatFunc::zero(&vars);
    for (i, x) in anchor.iter().enumerate() {
        if !x.is_zero() {
            out = &out + &(&x.extend_to(&vars)? * &ft.derivative(i)?);
        }
    }
    for v in 0..a.rank() {
        let dv = ft.derivative(a.xi(v))?;
        if dv.is_zero() {
            continue;
        }
        let image = sym_bracket(a, s, &AlgebroidSymTensor::basis(a, v))?.to_formal()?;
        out = &out + &(&image * &dv);
    }
    AlgebroidSymTensor::from_formal(a, t.degree, &out)
}

/// Symmetric Schouten bracket on `S(A)`, computed as the fiberwise-linear
/// Poisson bracket of the associated formal polynomials:
/// `<G, H> = c^w_{uv} xi_w dG/dxi_u dH/dxi_v + sigma^i_u (dG/dxi_u dH/dx^i - dG/dx^i dH/dxi_u)`.
pub fn sym_bracket(
    a: &LieAlgebroid,
    g: &AlgebroidSymTensor,
    h: &AlgebroidSymTensor,
) -> Result<AlgebroidSymTensor> {
    a.check_same(&g.algebroid)?;
    a.check_same(&h.algebroid)?;
    let degree = (g.degree + h.degree).saturating_sub(1);
    if g.degree + h.degree == 0 {
        return Ok(AlgebroidSymTensor::zero(a, 0));
    }
    let vars = a.formal().clone();
    let n = a.chart().arity();
    let fg = g.to_formal()?;
    let fh = h.to_formal()?;
    let dg: Vec<RatFunc> = (0..a.rank())
        .map(|u| fg.derivative(a.xi(u)))
        .collect::<Result<_>>()?;
    let dh: Vec<RatFunc> = (0..a.rank())
        .map(|u| fh.derivative(a.xi(u)))
        .collect::<Result<_>>()?;
    let xg: Vec<RatFunc> = (0..n).map(|i| fg.derivative(i)).collect::<Result<_>>()?;
    let xh: Vec<RatFunc> = (0..n).map(|i| fh.derivative(i)).collect::<Result<_>>()?;
    let mut out = RatFunc::zero(&vars);
    for u in 0..a.rank() {
        for v in 0..a.rank() {
            if dg[u].is_zero() || dh[v].is_zero() {
                continue;
            }
            let mut c = RatFunc::zero(&vars);
            for w in 0..a.rank() {
                let cw = a.structure(w, u, v);
                if !cw.is_zero() {
                    c = &c + &(&cw.extend_to(&vars)? * &RatFunc::var(&vars, a.xi(w)));
                }
            }
            out = &out + &(&c * &(&dg[u] * &dh[v]));
        }
        for i in 0..n {
            let sig = a.anchor(u, i);
            if sig.is_zero() {
                continue;
            }
            let t = &(&dg[u] * &xh[i]) - &(&xg[i] * &dh[u]);
            out = &out + &(&sig.extend_to(&vars)? * &t);
        }
    }
    AlgebroidSymTensor::from_formal(a, degree, &out)
}

/// `<s_1 (.) ... (.) s_p, H> = sum_i (L_{s_i} H) (.) s_1 ... s^_i ... s_p` for a
/// given decomposition of the first argument into sections.
pub fn sym_bracket_decomposed(
    a: &LieAlgebroid,
    factors: &[AlgebroidSymTensor],
    h: &AlgebroidSymTensor,
) -> Result<AlgebroidSymTensor> {
    if factors.is_empty() {
        return Err(Error::Structural(
            "a decomposition needs at least one section".into(),
        ));
    }
    let mut out: Option<AlgebroidSymTensor> = None;
    for i in 0..factors.len() {
        let mut term = algebroid_lie_derivative(a, &factors[i], h)?;
        for (j, f) in factors.iter().enumerate() {
            if j != i {
                term = term.sym_product(f)?;
            }
        }
        out = Some(match out {
            Some(acc) => acc.checked_add(&term)?,
            None => term,
        });
    }
    Ok(out.expect("nonempty"))
}

/// The symmetric bracket through Lie derivatives, expanding `G` over frame
/// monomials `G_I mult(I) e_{i1} (.) ... (.) e_{ik}` (coefficient on the first factor);
/// degree-0 arguments use antisymmetry.
pub fn sym_bracket_via_lie_derivatives(
    a: &LieAlgebroid,
    g: &AlgebroidSymTensor,
    h: &AlgebroidSymTensor,
) -> Result<AlgebroidSymTensor> {
    a.check_same(&g.algebroid)?;
    a.check_same(&h.algebroid)?;
    if g.degree == 0 && h.degree == 0 {
        return Ok(AlgebroidSymTensor::zero(a, 0));
    }
    if g.degree == 0 {
        let r = sym_bracket_via_lie_derivatives(a, h, g)?;
        return Ok(r.scale(&a.chart().constant(-1)));
    }
    let mut out = AlgebroidSymTensor::zero(a, g.degree + h.degree - 1);
    for (key, c) in &g.comps {
        let coef = c.scale(&Scalar::from_integer(crate::geometry::multinomial(key)));
        let mut factors: Vec<AlgebroidSymTensor> = key
            .iter()
            .map(|&u| AlgebroidSymTensor::basis(a, u))
            .collect();
        factors[0] = factors[0].scale(&coef);
        out = out.checked_add(&sym_bracket_decomposed(a, &factors, h)?)?;
    }
    Ok(out)
}

/// All frame monomials of a given degree, as tensors.
pub fn frame_monomials(a: &LieAlgebroid, degree: usize) -> Vec<AlgebroidSymTensor> {
    sorted_tuples(a.rank(), degree)
        .into_iter()
        .map(|k| {
            AlgebroidSymTensor::from_entries(a, degree, [(k, a.chart().one())])
                .expect("valid tuple")
        })
        .collect()
}
