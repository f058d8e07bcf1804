use std::f64::consts::PI;

use rvd_cascade::cascade::{
    counterterm, estimate_additive_constant, verify_limit, DegenParams, HarnessConfig,
};
use rvd_cascade::cli::default_scales;
use rvd_cascade::qcalc::C64;
use rvd_cascade::Error;

fn params(stage: u8, n: usize) -> DegenParams {
    DegenParams::sample(stage).with_n(n, C64::new(0.3, 0.1))
}

fn check(stage: u8, n: usize) {
    let r = verify_limit(
        stage,
        &params(stage, n),
        &default_scales(stage, n),
        &HarnessConfig::default(),
    )
    .unwrap();
    assert!(r.pass, "{r:?}");
    if stage == 1 {
        assert!(r.fitted_exponent >= 0.9, "{}", r.fitted_exponent);
    } else {
        let rate = r.fitted_exponent / PI;
        assert!(
            (rate + 4.0).abs() < 0.4,
            "stage {stage}, N = {n}: {rate} pi"
        );
    }
}

#[test]
fn one_variable_stages() {
    for stage in 1..=4 {
        check(stage, 1);
    }
}

#[test]
fn two_variable_stages() {
    for stage in 1..=4 {
        check(stage, 2);
    }
}

#[test]
fn estimated_constant_approaches_closed_form_in_one_variable() {
    // the estimate carries the O(q_+^2) remainder of the limit
    let p = params(1, 1);
    let gap = |qp: f64| {
        let est = estimate_additive_constant(1, &p, qp).unwrap();
        (est.value - counterterm(&p, qp).unwrap()).norm()
    };
    let (a, b) = (gap(1e-2), gap(1e-3));
    assert!(b < 1e-4, "{b}");
    assert!((a / b).log10() > 1.7 && (a / b).log10() < 2.3, "{a} {b}");
}

#[test]
fn bad_scales_rejected() {
    let p = params(2, 1);
    let cfg = HarnessConfig::default();
    assert!(matches!(
        verify_limit(2, &p, &[1.0], &cfg),
        Err(Error::InvalidScales(_))
    ));
    assert!(matches!(
        verify_limit(2, &p, &[2.0, 1.0], &cfg),
        Err(Error::InvalidScales(_))
    ));
    let p1 = params(1, 1);
    assert!(matches!(
        verify_limit(1, &p1, &[1e-3, 1e-2], &cfg),
        Err(Error::InvalidScales(_))
    ));
}

#[test]
fn counterterm_pole_at_zero_a_minus() {
    let mut p = params(1, 1);
    p.a_minus = 0.0;
    assert!(verify_limit(1, &p, &[1e-2, 1e-3], &HarnessConfig::default()).is_err());
}
