use proptest::prelude::*;
use rvd_cascade::qcalc::{LogParam, C64};
use rvd_cascade::qheun::{polynomial_spectrum, QHeunParams};
use rvd_cascade::shiftops::{LaurentPoly, LaurentRational};

fn cplx() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn poly() -> impl Strategy<Value = LaurentPoly> {
    (-3..3i32, prop::collection::vec(cplx(), 1..6))
        .prop_map(|(lo, c)| LaurentPoly::from_coeffs(lo, c))
}

proptest! {
    #[test]
    fn product_evaluates_pointwise(a in poly(), b in poly(), x in cplx()) {
        prop_assume!(x.norm() > 0.3);
        let lhs = (&a * &b).eval(x);
        let rhs = a.eval(x) * b.eval(x);
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + a.eval_abs(x) * b.eval_abs(x)));
    }

    #[test]
    fn deflate_reconstructs(c in prop::collection::vec(cplx(), 1..6), r in cplx()) {
        let a = LaurentPoly::from_coeffs(0, c);
        let (quot, rem) = a.deflate(r);
        let back = &(&quot * &LaurentPoly::linear(r)) + &LaurentPoly::monomial(0, rem);
        let x = C64::new(0.7, -0.4);
        prop_assert!((back.eval(x) - a.eval(x)).norm() <= 1e-9 * (1.0 + a.eval_abs(x)));
    }

    #[test]
    fn deflate_remainder_is_value(a in poly(), r in cplx()) {
        prop_assume!(r.norm() > 0.2);
        let (_, rem) = a.deflate(r);
        prop_assert!((rem - a.eval(r)).norm() <= 1e-10 * (1.0 + a.eval_abs(r)));
    }

    #[test]
    fn rational_sum_is_pointwise(a in poly(), b in poly(), r in cplx(), x in cplx()) {
        prop_assume!((x - r).norm() > 0.2 && x.norm() > 0.3);
        let ra = LaurentRational::new(a.clone(), LaurentPoly::linear(r)).unwrap();
        let rb = LaurentRational::poly(b.clone());
        let s = (&ra + &rb).eval(x).unwrap();
        let want = a.eval(x) / (x - r) + b.eval(x);
        prop_assert!((s - want).norm() <= 1e-9 * (1.0 + want.norm() + a.eval_abs(x) / (x - r).norm()));
    }

    #[test]
    fn log_params_round_trip(a in cplx(), b in cplx()) {
        prop_assume!(a.norm() > 1e-3 && b.norm() > 1e-3);
        let (la, lb) = (LogParam::from_value(a).unwrap(), LogParam::from_value(b).unwrap());
        prop_assert!((la.mul(&lb).div(&lb).value() - a).norm() < 1e-12 * a.norm().max(1.0));
        let s = la.sqrt();
        prop_assert!((s * s - a).norm() < 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn degree_one_spectrum_independent_of_h_l_order(q in 0.2..0.8f64, h1 in 0.5..2.0f64, h2 in 0.5..2.0f64, l1 in 0.5..2.0f64, l2 in 0.5..2.0f64, l4 in 0.5..2.0f64) {
        let l3 = 1.0 / q;
        let prod = l1 * l2 * l3 * l4;
        let sum = (h1 * h2 * q + prod / q) / (prod * h1 * h2).sqrt();
        let r = (sum + (sum * sum - 4.0).sqrt()) / 2.0;
        let c = |v: f64| C64::new(v, 0.0);
        let p = QHeunParams::from_values(q, [c(h1), c(h2), c(r * r)], [c(l1), c(l2), c(l3), c(l4)], c(0.0)).unwrap();
        let sw = QHeunParams::from_values(q, [c(h2), c(h1), c(r * r)], [c(l2), c(l1), c(l3), c(l4)], c(0.0)).unwrap();
        let (a, b) = (polynomial_spectrum(&p, 1).unwrap(), polynomial_spectrum(&sw, 1).unwrap());
        for (x, y) in a.energies.iter().zip(&b.energies) {
            prop_assert!((x - y).norm() < 1e-9 * x.norm().max(1.0));
        }
    }
}
