mod common;

use proptest::prelude::*;
use tangent_lift::brackets::{
    cotangent_algebroid, koszul_bracket, lie_bracket, lie_derivative, lie_derivative_form,
    poisson_bracket, schouten_bracket, sym_bracket, sym_bracket_via_lie_derivatives,
    tangent_algebroid, AlgebroidSymTensor,
};
use tangent_lift::geometry::{sharp, Chart, Multivector, OneForm};
use tangent_lift::ring::RatFunc;

fn chart3() -> Chart {
    Chart::euclidean("M", 3)
}

fn sign(e: usize) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sum that tolerates zero multivectors whose degree differs.
fn sum(terms: &[Multivector]) -> Multivector {
    terms
        .iter()
        .filter(|t| !t.is_zero())
        .fold(None, |acc: Option<Multivector>, t| {
            Some(acc.map_or_else(|| t.clone(), |a| &a + t))
        })
        .unwrap_or_else(|| Multivector::zero(&chart3(), 0))
}

fn same(a: &Multivector, b: &Multivector) -> bool {
    a == b || (a.is_zero() && b.is_zero())
}

fn df(f: &RatFunc) -> OneForm {
    OneForm::differential(&chart3(), f).unwrap()
}

fn poisson_bivectors() -> Vec<Multivector> {
    let c = chart3();
    let x = |i| c.coordinate(i);
    vec![
        common::so3(&c),
        common::bivector(&c, &[(0, 1, c.one())]),
        // x1 d1^d2 + x1 d1^d3: the linear structure of a solvable algebra
        common::bivector(&c, &[(0, 1, x(0)), (0, 2, x(0))]),
        // f d1^d2 is Poisson for every f
        common::bivector(&c, &[(0, 1, &x(0) * &x(1))]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn schouten_graded_antisymmetry(seed in any::<u64>(), p in 1usize..=2, q in 1usize..=2) {
        let mut rng = common::rng(seed);
        let c = chart3();
        let a = common::multivector(&mut rng, &c, p, 1);
        let b = common::multivector(&mut rng, &c, q, 1);
        let ab = schouten_bracket(&a, &b).unwrap();
        let ba = schouten_bracket(&b, &a).unwrap();
        prop_assert!(same(&ba, &ab.scale_int(sign(p * q))));
    }

    #[test]
    fn schouten_graded_leibniz(seed in any::<u64>(), p in 1usize..=2) {
        let mut rng = common::rng(seed);
        let c = chart3();
        let a = common::multivector(&mut rng, &c, p, 1);
        let q = common::multivector(&mut rng, &c, 1, 1);
        let r = common::multivector(&mut rng, &c, 1, 1);
        let lhs = schouten_bracket(&a, &q.wedge(&r).unwrap()).unwrap();
        let t1 = schouten_bracket(&a, &q).unwrap().wedge(&r).unwrap();
        // q has degree 1, so the sign is (-1)^{(p-1) q}
        let t2 = q.wedge(&schouten_bracket(&a, &r).unwrap()).unwrap().scale_int(sign(p - 1));
        prop_assert!(same(&lhs, &sum(&[t1, t2])));
    }

    #[test]
    fn schouten_graded_jacobi(seed in any::<u64>(), p in 1usize..=2, q in 1usize..=2, r in 1usize..=2) {
        let mut rng = common::rng(seed);
        let c = chart3();
        let a = common::multivector(&mut rng, &c, p, 1);
        let b = common::multivector(&mut rng, &c, q, 1);
        let d = common::multivector(&mut rng, &c, r, 1);
        let s = |x: &Multivector, y: &Multivector| schouten_bracket(x, y).unwrap();
        let terms = [
            s(&a, &s(&b, &d)).scale_int(sign(p * r + p)),
            s(&b, &s(&d, &a)).scale_int(sign(q * p + q)),
            s(&d, &s(&a, &b)).scale_int(sign(r * q + r)),
        ];
        prop_assert!(sum(&terms).is_zero());
    }

    #[test]
    fn schouten_square_measures_the_jacobiator(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let c = chart3();
        let w = common::multivector(&mut rng, &c, 2, 1);
        let [f, g, h] = std::array::from_fn(|_| common::poly(&mut rng, &c, 2));
        let br = |a: &RatFunc, b: &RatFunc| poisson_bracket(&w, a, b).unwrap();
        let cyclic = &(&br(&br(&f, &g), &h) + &br(&br(&g, &h), &f)) + &br(&br(&h, &f), &g);
        let ww = schouten_bracket(&w, &w).unwrap();
        let value = if ww.is_zero() { c.zero() } else { ww.evaluate(&[df(&f), df(&g), df(&h)]).unwrap() };
        prop_assert_eq!(value, cyclic.scale_int(2));
    }

    #[test]
    fn lie_derivative_of_multivectors_is_the_schouten_bracket(seed in any::<u64>(), k in 1usize..=2) {
        let mut rng = common::rng(seed);
        let c = chart3();
        let x = common::vector_field(&mut rng, &c, 1);
        let p = common::multivector(&mut rng, &c, k, 2);
        prop_assert!(same(&lie_derivative(&x, &p).unwrap(), &schouten_bracket(&x, &p).unwrap()));
        let y = common::vector_field(&mut rng, &c, 2);
        prop_assert_eq!(schouten_bracket(&x, &y).unwrap(), lie_bracket(&x, &y).unwrap());
        let f = common::poly(&mut rng, &c, 2);
        prop_assert_eq!(lie_derivative_form(&x, &df(&f)).unwrap(), df(&x.apply(&f).unwrap()));
    }

    #[test]
    fn koszul_bracket_is_a_lie_bracket_intertwined_by_sharp(seed in any::<u64>(), pick in 0usize..4) {
        let mut rng = common::rng(seed);
        let c = chart3();
        let w = poisson_bivectors().swap_remove(pick);
        let [a, b, g] = std::array::from_fn(|_| common::one_form(&mut rng, &c, 1));
        let k = |x: &OneForm, y: &OneForm| koszul_bracket(&w, x, y).unwrap();
        let jacobi = k(&k(&a, &b), &g).checked_add(&k(&k(&b, &g), &a)).unwrap().checked_add(&k(&k(&g, &a), &b)).unwrap();
        prop_assert!(jacobi.is_zero());
        let lhs = sharp(&w, &k(&a, &b)).unwrap();
        let rhs = lie_bracket(&sharp(&w, &a).unwrap(), &sharp(&w, &b).unwrap()).unwrap();
        prop_assert!(same(&lhs, &rhs));
        let [f, h] = std::array::from_fn(|_| common::poly(&mut rng, &c, 2));
        prop_assert_eq!(k(&df(&f), &df(&h)), df(&poisson_bracket(&w, &f, &h).unwrap()));
    }

    #[test]
    fn symmetric_bracket_agrees_with_its_lie_derivative_expansion(
        seed in any::<u64>(), p in 0usize..=2, q in 0usize..=2, tangent in any::<bool>()
    ) {
        let mut rng = common::rng(seed);
        let c = chart3();
        let a = if tangent { tangent_algebroid(&c).unwrap() } else { cotangent_algebroid(&common::so3(&c)).unwrap() };
        let g = common::algebroid_tensor(&mut rng, &a, p, 1);
        let h = common::algebroid_tensor(&mut rng, &a, q, 1);
        let direct = sym_bracket(&a, &g, &h).unwrap();
        let expanded = sym_bracket_via_lie_derivatives(&a, &g, &h).unwrap();
        prop_assert!(direct == expanded || (direct.is_zero() && expanded.is_zero()));
    }

    #[test]
    fn symmetric_bracket_with_functions_is_the_anchor(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let c = chart3();
        let w = common::so3(&c);
        let a = cotangent_algebroid(&w).unwrap();
        let alpha = common::one_form(&mut rng, &c, 1);
        let f = common::poly(&mut rng, &c, 2);
        let s = AlgebroidSymTensor::section(&a, alpha.components().to_vec()).unwrap();
        let fs = AlgebroidSymTensor::function(&a, f.clone()).unwrap();
        let lhs = sym_bracket(&a, &s, &fs).unwrap();
        let expect = sharp(&w, &alpha).unwrap().apply(&f).unwrap();
        prop_assert_eq!(lhs.component(&[]), expect);
    }
}

#[test]
fn algebroid_axioms_detect_non_poisson_structures() {
    let c = chart3();
    for a in [
        tangent_algebroid(&c).unwrap(),
        cotangent_algebroid(&common::so3(&c)).unwrap(),
    ] {
        assert!(a.is_anchor_compatible().unwrap());
        assert!(a.satisfies_jacobi().unwrap());
    }
    for w in poisson_bivectors() {
        assert!(cotangent_algebroid(&w).unwrap().satisfies_jacobi().unwrap());
    }
    let bad = cotangent_algebroid(&common::non_poisson(&c)).unwrap();
    assert!(!bad.satisfies_jacobi().unwrap() || !bad.is_anchor_compatible().unwrap());
}
