//! Built-in example models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{Model, Object};
use crate::error::{Error, Result};
use crate::geometry::{increasing_tuples, Chart, LinearConnection, Metric, Multivector};
use crate::ring::RatFunc;

pub const SCENARIOS: &[&str] = &[
    "so3",
    "symplectic2",
    "symplectic4",
    "heisenberg",
    "zero3",
    "random-linear(SEED)",
    "random-quadratic(SEED)",
];

fn with_bivector(chart: Chart, w: Multivector) -> Result<Model> {
    let mut m = Model::new();
    m.add_chart(chart)?;
    m.insert("w", Object::Multivector(w))?;
    Ok(m)
}

fn bivector(c: &Chart, entries: &[((usize, usize), RatFunc)]) -> Result<Multivector> {
    Multivector::from_entries(
        c,
        2,
        entries.iter().map(|((i, j), f)| (vec![*i, *j], f.clone())),
    )
}

fn so3() -> Result<Model> {
    let c = Chart::euclidean("M", 3);
    let x = |i| c.coordinate(i);
    let w = bivector(&c, &[((0, 1), x(2)), ((1, 2), x(0)), ((2, 0), x(1))])?;
    let mut m = with_bivector(c.clone(), w)?;
    m.insert("g", Object::Metric(Metric::diagonal(&c, vec![c.one(); 3])?))?;
    Ok(m)
}

fn symplectic2() -> Result<Model> {
    let c = Chart::euclidean("M", 2);
    let x1 = c.coordinate(0);
    let w = bivector(&c, &[((0, 1), c.one())])?;
    let mut m = with_bivector(c.clone(), w)?;
    let g = Metric::diagonal(&c, vec![c.one(), &c.one() + &(&x1 * &x1)])?;
    m.insert("g", Object::Metric(g))?;
    let nabla = LinearConnection::from_entries(&c, [((0, 1, 1), x1)])?;
    m.insert("nabla", Object::LinearConnection(nabla))?;
    Ok(m)
}

fn symplectic4() -> Result<Model> {
    let c = Chart::euclidean("M", 4);
    let w = bivector(&c, &[((0, 1), c.one()), ((2, 3), c.one())])?;
    with_bivector(c, w)
}

fn heisenberg() -> Result<Model> {
    let c = Chart::euclidean("M", 3);
    let w = bivector(&c, &[((0, 1), c.coordinate(2))])?;
    with_bivector(c, w)
}

fn zero3() -> Result<Model> {
    let c = Chart::euclidean("M", 3);
    with_bivector(c.clone(), Multivector::zero(&c, 2))
}

/// Structure constants `c^{ij}_k` of some three-dimensional Lie algebras.
const LIE_ALGEBRAS: &[&[(usize, usize, usize, i64)]] = &[
    // so(3)
    &[(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)],
    // sl(2): [h,e] = 2e, [h,f] = -2f, [e,f] = h
    &[(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)],
    // Heisenberg
    &[(0, 1, 2, 1)],
    // [e1,e2] = e2, [e1,e3] = e3
    &[(0, 1, 1, 1), (0, 2, 2, 1)],
];

/// Lie–Poisson structure of a randomly chosen Lie algebra in randomly
/// transformed linear coordinates `x' = P x`.
fn random_linear(seed: u64) -> Result<Model> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = Chart::euclidean("M", 3);
    let algebra = LIE_ALGEBRAS[rng.gen_range(0..LIE_ALGEBRAS.len())];
    let p = loop {
        let p: Vec<Vec<i64>> = (0..3)
            .map(|_| (0..3).map(|_| rng.gen_range(-2..=2)).collect())
            .collect();
        let det = p[0][0] * (p[1][1] * p[2][2] - p[1][2] * p[2][1])
            - p[0][1] * (p[1][0] * p[2][2] - p[1][2] * p[2][0])
            + p[0][2] * (p[1][0] * p[2][1] - p[1][1] * p[2][0]);
        if det != 0 {
            break p;
        }
    };
    // old coordinates as functions of the new ones: x = P^{-1} x'
    let rows: Vec<Vec<RatFunc>> = p
        .iter()
        .map(|r| r.iter().map(|&v| c.constant(v)).collect())
        .collect();
    let inverse = invert(&c, &rows)?;
    let old: Vec<RatFunc> = inverse
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .fold(c.zero(), |acc, (k, v)| &acc + &(v * &c.coordinate(k)))
        })
        .collect();
    let mut entries = Vec::new();
    for ab in increasing_tuples(3, 2) {
        let mut f = c.zero();
        for &(i, j, k, coeff) in algebra {
            // w^{ij} = c^{ij}_k x^k and w^{ji} = -w^{ij}
            let term = old[k].scale_int(coeff);
            let pij = p[ab[0]][i] * p[ab[1]][j] - p[ab[0]][j] * p[ab[1]][i];
            f = &f + &term.scale_int(pij);
        }
        entries.push(((ab[0], ab[1]), f));
    }
    with_bivector(c.clone(), bivector(&c, &entries)?)
}

fn invert(c: &Chart, m: &[Vec<RatFunc>]) -> Result<Vec<Vec<RatFunc>>> {
    let n = m.len();
    let mut a: Vec<Vec<RatFunc>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { c.one() } else { c.zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Structural("singular matrix".into()))?;
        a.swap(p, col);
        let pivot = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = v.checked_div(&pivot)?;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..2 * n {
                    let t = &f * &a[col][k];
                    a[r][k] = &a[r][k] - &t;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Even seeds: the Jacobian structure `w^{ij} = eps^{ijk} d_k C` of a random
/// cubic `C`, which is Poisson. Odd seeds: random quadratic coefficients, used as
/// non-Poisson controls.
fn random_quadratic(seed: u64) -> Result<Model> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = Chart::euclidean("M", 3);
    let x = |i| c.coordinate(i);
    let monomials = |deg: usize| crate::geometry::sorted_tuples(3, deg);
    let random_poly = |rng: &mut ChaCha8Rng, deg: usize| {
        monomials(deg).into_iter().fold(c.zero(), |acc, m| {
            let coeff = rng.gen_range(-3..=3);
            let mono = m.iter().fold(c.one(), |p, &i| &p * &x(i));
            &acc + &mono.scale_int(coeff)
        })
    };
    let entries = if seed.is_multiple_of(2) {
        let casimir = random_poly(&mut rng, 3);
        let d = |k| casimir.derivative(k);
        vec![((0, 1), d(2)?), ((1, 2), d(0)?), ((2, 0), d(1)?)]
    } else {
        (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|ij| (ij, random_poly(&mut rng, 2)))
            .collect()
    };
    with_bivector(c.clone(), bivector(&c, &entries)?)
}

fn seeded(name: &str, prefix: &str) -> Option<Result<u64>> {
    let rest = name.strip_prefix(prefix)?;
    let digits = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| rest.strip_prefix(':'))?;
    Some(
        digits
            .parse()
            .map_err(|_| Error::Usage(format!("bad seed in scenario `{name}`"))),
    )
}

/// Builds a named scenario; `random-*` take a seed as `(N)` or `:N`.
pub fn scenario(name: &str) -> Result<Model> {
    match name {
        "so3" => so3(),
        "symplectic2" => symplectic2(),
        "symplectic4" => symplectic4(),
        "heisenberg" => heisenberg(),
        "zero3" => zero3(),
        _ => {
            if let Some(seed) = seeded(name, "random-linear") {
                return random_linear(seed?);
            }
            if let Some(seed) = seeded(name, "random-quadratic") {
                return random_quadratic(seed?);
            }
            Err(Error::Usage(format!(
                "unknown scenario `{name}`; available: {}",
                SCENARIOS.join(", ")
            )))
        }
    }
}
