mod common;

use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use tangent_lift::brackets::poisson_bracket;
use tangent_lift::geometry::{
    linear_curvature, nabla_covariant, sharp, Chart, LinearConnection, Multivector,
    NonlinearConnection, OneForm, SymCovariant,
};
use tangent_lift::lifts::{graded_nabla_lift_operator, horizontal_lift_bivector, iota};
use tangent_lift::poisson::{
    check_graded_poisson, contravariant_connection_of, contravariant_curvature, d_psi, d_symmetric,
    is_poisson, is_transversal_poisson, psi_operator, shape_analysis, vertical_foliation,
    xi_operator, GradedParts, Shape,
};
use tangent_lift::ring::RatFunc;

fn chart3() -> Chart {
    Chart::euclidean("M", 3)
}

fn parts_of(p: &Multivector) -> GradedParts {
    match shape_analysis(p).unwrap() {
        Shape::Graded(parts) => *parts,
        other => panic!("expected a graded bivector, got {other:?}"),
    }
}

fn l(alpha: &OneForm) -> RatFunc {
    iota(&SymCovariant::from_one_form(alpha)).unwrap()
}

fn jacobiator(p: &Multivector, a: &RatFunc, b: &RatFunc, c: &RatFunc) -> RatFunc {
    let br = |x: &RatFunc, y: &RatFunc| poisson_bracket(p, x, y).unwrap();
    &(&br(&br(a, b), c) + &br(&br(b, c), a)) + &br(&br(c, a), b)
}

struct Setup {
    w: Multivector,
    conn: LinearConnection,
    big_w: Multivector,
    parts: GradedParts,
    tm: Chart,
}

/// Graded lift of a random Poisson structure along a random (usually curved) connection.
fn setup(rng: &mut ChaCha8Rng) -> Setup {
    let c = chart3();
    let w = common::jacobian_poisson3(rng, &c, 0, 2);
    let conn = common::torsion_free_connection(rng, &c, 1);
    let big_w = graded_nabla_lift_operator(&w, &conn).unwrap();
    let parts = parts_of(&big_w);
    let tm = big_w.chart().clone();
    Setup {
        w,
        conn,
        big_w,
        parts,
        tm,
    }
}

/// `nabla_{#theta} alpha` as a one-form.
fn nabla_sharp(s: &Setup, theta: &OneForm, alpha: &OneForm) -> SymCovariant {
    let x = sharp(&s.w, theta).unwrap();
    nabla_covariant(&s.conn, &SymCovariant::from_one_form(alpha), &x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn contravariant_connection_is_nabla_along_sharp(seed in any::<u64>(), horizontal in any::<bool>()) {
        let mut rng = common::rng(seed);
        let mut s = setup(&mut rng);
        if horizontal {
            let nl = NonlinearConnection::from_linear(&s.conn).unwrap();
            s.parts = parts_of(&horizontal_lift_bivector(&s.w, &nl).unwrap());
        }
        let d = contravariant_connection_of(&s.parts).unwrap();
        let c = chart3();
        let [theta, alpha] = std::array::from_fn(|_| common::one_form(&mut rng, &c, 1));
        let lhs = SymCovariant::from_one_form(&d.derivative(&theta, &alpha).unwrap());
        prop_assert_eq!(iota(&lhs).unwrap(), iota(&nabla_sharp(&s, &theta, &alpha)).unwrap());
    }

    #[test]
    fn contravariant_curvature_is_curvature_along_sharp(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let s = setup(&mut rng);
        let c = chart3();
        let cd = contravariant_curvature(&contravariant_connection_of(&s.parts).unwrap()).unwrap();
        let r = linear_curvature(&s.conn).unwrap();
        for [a, b, cc, k] in (0..81).map(|t| [t / 27, t / 9 % 3, t / 3 % 3, t % 3]) {
            // C_D(dx^a, dx^b) dx^c = -w^{ah} w^{bl} R^c_{khl} dx^k
            let mut expect = c.zero();
            for h in 0..3 {
                for m in 0..3 {
                    let wa = s.w.component(&[a, h]);
                    let wb = s.w.component(&[b, m]);
                    expect = &expect - &(&(&wa * &wb) * r.get(&[cc, k, h, m]));
                }
            }
            prop_assert_eq!(cd.get(&[a, b, cc, k]), &expect);
        }
    }

    #[test]
    fn brackets_with_base_functions_are_contravariant_derivatives(seed in any::<u64>(), k in 1usize..=2) {
        let mut rng = common::rng(seed);
        let s = setup(&mut rng);
        let c = chart3();
        let d = contravariant_connection_of(&s.parts).unwrap();
        let g = common::sym_tensor(&mut rng, &c, k, 1);
        let f = common::poly(&mut rng, &c, 2);
        let lhs = poisson_bracket(&s.big_w, &iota(&g).unwrap(), &s.tm.pullback(&f).unwrap()).unwrap();
        let df = OneForm::differential(&c, &f).unwrap();
        prop_assert_eq!(lhs, -&iota(&d_symmetric(&d, &df, &g).unwrap()).unwrap());
    }

    #[test]
    fn jacobiators_are_measured_by_curvature_and_d_psi(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let s = setup(&mut rng);
        let c = chart3();
        let cd = contravariant_curvature(&contravariant_connection_of(&s.parts).unwrap()).unwrap();
        let [alpha, beta] = std::array::from_fn(|_| common::one_form(&mut rng, &c, 1));
        let [f, g] = std::array::from_fn(|_| common::poly(&mut rng, &c, 2));
        let (fl, gl) = (s.tm.pullback(&f).unwrap(), s.tm.pullback(&g).unwrap());

        // Jac(l(a), f, g) = -l(C_D(df, dg) a)
        let (df, dg) = (OneForm::differential(&c, &f).unwrap(), OneForm::differential(&c, &g).unwrap());
        let mut curv = vec![c.zero(); 3];
        for [a, b, cc, k] in (0..81).map(|t| [t / 27, t / 9 % 3, t / 3 % 3, t % 3]) {
            let coeff = &(&df.component(a) * &dg.component(b)) * &alpha.component(cc);
            curv[k] = &curv[k] + &(&coeff * cd.get(&[a, b, cc, k]));
        }
        let curv = OneForm::new(&c, curv).unwrap();
        prop_assert_eq!(jacobiator(&s.big_w, &l(&alpha), &fl, &gl), -&l(&curv));

        // Jac(l(a), l(b), f) = -iota((D_df Psi)(a, b))
        let dpsi = d_psi(&s.parts, &f, &alpha, &beta).unwrap();
        prop_assert_eq!(jacobiator(&s.big_w, &l(&alpha), &l(&beta), &fl), -&iota(&dpsi).unwrap());
    }

    #[test]
    fn psi_and_xi_are_the_fiber_brackets_with_their_rescaling_laws(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let s = setup(&mut rng);
        let c = chart3();
        let d = contravariant_connection_of(&s.parts).unwrap();
        let [alpha, beta, gamma] = std::array::from_fn(|_| common::one_form(&mut rng, &c, 1));
        let g = common::sym_tensor(&mut rng, &c, 2, 1);
        let f = common::poly(&mut rng, &c, 1);
        let fl = s.tm.pullback(&f).unwrap();
        let df = OneForm::differential(&c, &f).unwrap();
        let ipsi = |a: &OneForm, b: &OneForm| iota(&psi_operator(&s.parts, a, b).unwrap()).unwrap();
        let ixi = |h: &SymCovariant, a: &OneForm| iota(&xi_operator(&s.parts, h, a).unwrap()).unwrap();
        let d_df = |h: &SymCovariant| iota(&d_symmetric(&d, &df, h).unwrap()).unwrap();

        prop_assert_eq!(poisson_bracket(&s.big_w, &l(&alpha), &l(&beta)).unwrap(), ipsi(&alpha, &beta));
        prop_assert_eq!(poisson_bracket(&s.big_w, &iota(&g).unwrap(), &l(&gamma)).unwrap(), ixi(&g, &gamma));

        // Psi(a, f b) = f Psi(a, b) - l(b) l(D_df a)
        let alpha_s = SymCovariant::from_one_form(&alpha);
        let lhs = ipsi(&alpha, &beta.scale(&f));
        prop_assert_eq!(lhs, &(&fl * &ipsi(&alpha, &beta)) - &(&l(&beta) * &d_df(&alpha_s)));

        // Xi(G, f g) = f Xi(G, g) - l(g) iota(D_df G)
        let lhs = ixi(&g, &gamma.scale(&f));
        prop_assert_eq!(lhs, &(&fl * &ixi(&g, &gamma)) - &(&l(&gamma) * &d_df(&g)));

        // Xi(f G, g) = f Xi(G, g) + iota(G) l(D_df g)
        let lhs = ixi(&g.scale(&f), &gamma);
        let gamma_s = SymCovariant::from_one_form(&gamma);
        prop_assert_eq!(lhs, &(&fl * &ixi(&g, &gamma)) + &(&iota(&g).unwrap() * &d_df(&gamma_s)));
    }

    #[test]
    fn graded_criterion_agrees_with_the_direct_check(seed in any::<u64>(), flat in any::<bool>()) {
        let mut rng = common::rng(seed);
        let c = chart3();
        let w = common::jacobian_poisson3(&mut rng, &c, 0, 2);
        let conn = if flat { common::pulled_back_flat3(&mut rng, &c) } else { common::torsion_free_connection(&mut rng, &c, 1) };
        let big_w = graded_nabla_lift_operator(&w, &conn).unwrap();
        let report = check_graded_poisson(&parts_of(&big_w)).unwrap();
        // flatness alone does not decide it: Psi must also be D-parallel
        prop_assert_eq!(report.verdict, is_poisson(&big_w).unwrap().passed);
        let transversal = is_transversal_poisson(&big_w, &vertical_foliation(big_w.chart()).unwrap()).unwrap();
        prop_assert!(transversal.verdict);
    }
}
