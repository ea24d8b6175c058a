//! Fixtures and seeded generators shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tangent_lift::brackets::{AlgebroidSymTensor, LieAlgebroid};
use tangent_lift::geometry::{
    increasing_tuples, sorted_tuples, Chart, LinearConnection, Multivector, OneForm, SymCovariant,
};
use tangent_lift::ring::RatFunc;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bivector(c: &Chart, entries: &[(usize, usize, RatFunc)]) -> Multivector {
    Multivector::from_entries(
        c,
        2,
        entries.iter().map(|(i, j, f)| (vec![*i, *j], f.clone())),
    )
    .unwrap()
}

/// Lie–Poisson structure of so(3): `x3 d1^d2 + x1 d2^d3 + x2 d3^d1`.
pub fn so3(c: &Chart) -> Multivector {
    let x = |i| c.coordinate(i);
    bivector(c, &[(0, 1, x(2)), (1, 2, x(0)), (2, 0, x(1))])
}

pub fn symplectic2(c: &Chart) -> Multivector {
    bivector(c, &[(0, 1, c.one())])
}

/// `x2 d1^d2 + x1 d2^d3`, whose Schouten square is `2 x1 d1^d2^d3`.
pub fn non_poisson(c: &Chart) -> Multivector {
    let x = |i| c.coordinate(i);
    bivector(c, &[(0, 1, x(1)), (1, 2, x(0))])
}

/// A torsion-free connection on R^3 with nonzero curvature.
pub fn curved3(c: &Chart) -> LinearConnection {
    let x = |i| c.coordinate(i);
    LinearConnection::from_entries(
        c,
        [
            ((0, 1, 1), x(0)),
            ((1, 0, 2), &x(1) * &x(2)),
            ((1, 2, 0), &x(1) * &x(2)),
            ((2, 2, 2), &x(0) * &x(0)),
        ],
    )
    .unwrap()
}

/// `Gamma^1_{22} = x1` on R^2: torsion-free and curved.
pub fn curved2(c: &Chart) -> LinearConnection {
    LinearConnection::from_entries(c, [((0, 1, 1), c.coordinate(0))]).unwrap()
}

/// Flat, torsion-free, with nonconstant symbols on `x1 != 0`, and parallel
/// for `d1^d2`: `Gamma^1_{11} = -1/(2 x1)`, `Gamma^2_{12} = Gamma^2_{21} = 1/(2 x1)`.
pub fn flat_nonconstant2(c: &Chart) -> LinearConnection {
    let inv = c.coordinate(0).scale_int(2).recip().unwrap();
    LinearConnection::from_entries(
        c,
        [
            ((0, 0, 0), -&inv),
            ((1, 0, 1), inv.clone()),
            ((1, 1, 0), inv),
        ],
    )
    .unwrap()
}

/// Random polynomial of total degree at most `deg` with small integer coefficients;
/// roughly half of the monomials are dropped.
pub fn poly(rng: &mut ChaCha8Rng, c: &Chart, deg: usize) -> RatFunc {
    let mut f = c.zero();
    for d in 0..=deg {
        for m in sorted_tuples(c.arity(), d) {
            if rng.gen_bool(0.5) {
                continue;
            }
            let coeff = rng.gen_range(-3..=3);
            let mono = m.iter().fold(c.one(), |p, &i| &p * &c.coordinate(i));
            f = &f + &mono.scale_int(coeff);
        }
    }
    f
}

pub fn vector_field(rng: &mut ChaCha8Rng, c: &Chart, deg: usize) -> Multivector {
    Multivector::vector(c, (0..c.arity()).map(|_| poly(rng, c, deg)).collect()).unwrap()
}

pub fn multivector(rng: &mut ChaCha8Rng, c: &Chart, k: usize, deg: usize) -> Multivector {
    let entries: Vec<_> = increasing_tuples(c.arity(), k)
        .into_iter()
        .map(|t| (t, poly(rng, c, deg)))
        .collect();
    Multivector::from_entries(c, k, entries).unwrap()
}

pub fn one_form(rng: &mut ChaCha8Rng, c: &Chart, deg: usize) -> OneForm {
    OneForm::new(c, (0..c.arity()).map(|_| poly(rng, c, deg)).collect()).unwrap()
}

pub fn sym_tensor(rng: &mut ChaCha8Rng, c: &Chart, k: usize, deg: usize) -> SymCovariant {
    let entries: Vec<_> = sorted_tuples(c.arity(), k)
        .into_iter()
        .map(|t| (t, poly(rng, c, deg)))
        .collect();
    SymCovariant::from_entries(c, k, entries).unwrap()
}

pub fn algebroid_tensor(
    rng: &mut ChaCha8Rng,
    a: &LieAlgebroid,
    k: usize,
    deg: usize,
) -> AlgebroidSymTensor {
    let c = a.chart();
    let entries: Vec<_> = sorted_tuples(a.rank(), k)
        .into_iter()
        .map(|t| (t, poly(rng, c, deg)))
        .collect();
    AlgebroidSymTensor::from_entries(a, k, entries).unwrap()
}

/// Random symmetric Christoffel symbols with polynomial entries of degree `deg`.
pub fn torsion_free_connection(rng: &mut ChaCha8Rng, c: &Chart, deg: usize) -> LinearConnection {
    let n = c.dim();
    let mut entries = Vec::new();
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                if rng.gen_bool(0.6) {
                    continue;
                }
                let f = poly(rng, c, deg);
                entries.push(((k, i, j), f.clone()));
                if i != j {
                    entries.push(((k, j, i), f));
                }
            }
        }
    }
    LinearConnection::from_entries(c, entries).unwrap()
}

/// Flat torsion-free connection obtained by pulling back the trivial one along
/// the triangular polynomial diffeomorphism `u1 = x1`, `u2 = x2 + p(x1)`,
/// `u3 = x3 + q(x1, x2)`: `Gamma^k_{ij} = (du/dx)^{-1}{}^k_l d_i d_j u^l`.
pub fn pulled_back_flat3(rng: &mut ChaCha8Rng, c: &Chart) -> LinearConnection {
    let x = |i| c.coordinate(i);
    let p = &x(0) * &x(0).scale_int(rng.gen_range(-2..=2));
    let q = &(&x(0) * &x(1)).scale_int(rng.gen_range(-2..=2))
        + &(&x(1) * &x(1)).scale_int(rng.gen_range(-1..=1));
    let u = [x(0), &x(1) + &p, &x(2) + &q];
    // the Jacobian is unipotent lower triangular; invert it explicitly
    let j = |l: usize, i: usize| u[l].derivative(i).unwrap();
    let (a, b, cc) = (j(1, 0), j(2, 0), j(2, 1));
    let inv = [
        [c.one(), c.zero(), c.zero()],
        [-&a, c.one(), c.zero()],
        [&(&a * &cc) - &b, -&cc, c.one()],
    ];
    let mut entries = Vec::new();
    for k in 0..3 {
        for i in 0..3 {
            for jj in 0..3 {
                let g = (0..3).fold(c.zero(), |acc, l| {
                    &acc + &(&inv[k][l] * &u[l].derivative(i).unwrap().derivative(jj).unwrap())
                });
                if !g.is_zero() {
                    entries.push(((k, i, jj), g));
                }
            }
        }
    }
    LinearConnection::from_entries(c, entries).unwrap()
}

/// Random Poisson structure on R^3: `{x^i, x^j} = f eps^{ijk} d_k C`, Poisson for
/// every `f` and `C`.
pub fn jacobian_poisson3(
    rng: &mut ChaCha8Rng,
    c: &Chart,
    deg_f: usize,
    deg_c: usize,
) -> Multivector {
    let f = poly(rng, c, deg_f);
    let cas = poly(rng, c, deg_c);
    let d = |k| &f * &cas.derivative(k).unwrap();
    bivector(c, &[(0, 1, d(2)), (1, 2, d(0)), (2, 0, d(1))])
}
