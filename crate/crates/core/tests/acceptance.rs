//! Acceptance suite. Prints one PASS/FAIL line per criterion; exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rvd_cascade::cascade::{build_stage_1d, verify_limit, DegenParams, Form, HarnessConfig};
use rvd_cascade::cli::{continuum_draw, default_scales};
use rvd_cascade::laxlink::{match_d5, match_e6, match_e7, sample_js, sample_yamada};
use rvd_cascade::qcalc::{ModulusPair, TruncationPolicy, C64, I};
use rvd_cascade::qheun::{
    apply_to_poly, heun_normal_form, polynomial_spectrum, sample_continuum, QHeunParams,
};
use rvd_cascade::rvd::{build_rvd_1d, RvDParams};
use rvd_cascade::shiftops::{
    coefficient_discrepancy, distance, rational_discrepancy, standard_basis, standard_samples,
    Gauge, LaurentPoly, LaurentRational, ShiftOperator1D,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn mu0() -> C64 {
    C64::new(0.3, 0.1)
}

fn need(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn sci(v: &[f64]) -> Vec<String> {
    v.iter().map(|d| format!("{d:.3e}")).collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// 1
fn mu_independence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let h: [C64; 8] =
        std::array::from_fn(|_| C64::new(rng.gen_range(0.05..0.9), rng.gen_range(-0.1..0.1)));
    let modulus = ModulusPair::new(1.0, 0.5).map_err(err)?;
    let mut mus = [
        C64::new(rng.gen_range(-0.4..0.4), rng.gen_range(0.05..0.3)),
        c(0.0),
    ];
    mus[1] = C64::new(rng.gen_range(-0.4..0.4), rng.gen_range(0.05..0.3));
    let ops: Vec<ShiftOperator1D> = mus
        .iter()
        .map(|mu| {
            build_rvd_1d(&RvDParams {
                modulus,
                h,
                mu: *mu,
                n: 1,
            })
        })
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let mut worst = 0.0f64;
    for z in standard_samples(20) {
        for f in standard_basis() {
            let a = ops[0].apply(f.as_ref(), z).map_err(err)?;
            let b = ops[1].apply(f.as_ref(), z).map_err(err)?;
            worst = worst.max((a - b).norm() / a.norm().max(b.norm()));
        }
    }
    need(
        worst < 1e-9,
        format!(
            "mu = {:.3}, {:.3}: max relative difference {worst:.2e}",
            mus[0], mus[1]
        ),
    )
}

// 2
fn stage1_limit() -> Check {
    let p = DegenParams::sample(1).with_n(1, mu0());
    let r = verify_limit(1, &p, &[1e-2, 1e-3, 1e-4], &HarnessConfig::default()).map_err(err)?;
    need(
        r.pass && r.fitted_exponent >= 0.9,
        format!(
            "distances {:?}, exponent {:.4}",
            sci(&r.distances),
            r.fitted_exponent
        ),
    )
}

// 3
fn later_limits() -> Check {
    let cfg = HarnessConfig {
        expected_rate: Some(-2.0 * PI),
        ..HarnessConfig::default()
    };
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [1usize, 2] {
        let stages: Vec<u8> = if n == 1 {
            vec![2, 3, 4]
        } else {
            vec![1, 2, 3, 4]
        };
        for stage in stages {
            let p = DegenParams::sample(stage).with_n(n, mu0());
            let scales = if stage == 1 {
                default_scales(1, n)
            } else if n == 1 {
                vec![1.0, 1.5, 2.0]
            } else {
                default_scales(stage, n)
            };
            match verify_limit(stage, &p, &scales, &cfg) {
                Ok(r) => {
                    ok &= r.pass;
                    let unit = if stage == 1 {
                        String::new()
                    } else {
                        format!(" = {:.3} pi", r.fitted_exponent / PI)
                    };
                    lines.push(format!(
                        "N={n} stage {stage}: {:.4}{unit} vs {:.4}",
                        r.fitted_exponent, r.expected
                    ));
                }
                Err(e) => {
                    ok = false;
                    lines.push(format!("N={n} stage {stage}: {e}"));
                }
            }
        }
    }
    need(ok, lines.join("; "))
}

// 4
fn gauge_identities() -> Check {
    let p = DegenParams::sample(2);
    let mut p4 = p.clone();
    p4.h[3] = c(0.0);
    let p1 = DegenParams::sample(1).with_n(1, mu0());
    let s = (-PI * p.a_minus).exp();
    let q = s * s;
    let ex = |a: C64, k: f64| (k * PI * I * a).exp();
    let hv: Vec<C64> = p.h.iter().map(|h| ex(*h, 2.0)).collect();
    let lv: Vec<C64> = p.l.iter().map(|l| ex(*l, 2.0)).collect();
    let hh: Vec<C64> = p.h.iter().map(|h| ex(*h, 1.0)).collect();
    let lh: Vec<C64> = p.l.iter().map(|l| ex(*l, 1.0)).collect();
    let om = |a: &[C64], k: i32| {
        a.iter().fold(LaurentPoly::one(), |acc, a| {
            &acc * &LaurentPoly::one_minus(*a, k)
        })
    };
    let build = |st: u8, f: Form, pp: &DegenParams| build_stage_1d(st, f, pp).map_err(err);
    let parts = |op: &ShiftOperator1D| {
        let (v, w, u) = op.exact_parts().expect("exact");
        (v.clone(), w.clone(), u.clone())
    };
    let poly = LaurentRational::poly;
    let mut worst_sym = 0.0f64;
    let mut track = |a: &LaurentRational, b: &LaurentRational| {
        worst_sym = worst_sym.max(rational_discrepancy(a, b))
    };

    // stage 1
    let (v, w, u) = parts(&build(1, Form::Gauged, &p1)?);
    let hv1: Vec<C64> = p1.h.iter().map(|h| ex(*h, 2.0) * s).collect();
    let hv1i: Vec<C64> = hv1.clone();
    let den = |k: i32| {
        &(&LaurentPoly::monomial(k, c(q)) * &LaurentPoly::one_minus(c(1.0), k))
            * &LaurentPoly::one_minus(c(q), k)
    };
    track(
        &v,
        &LaurentRational::new(om(&hv1, -1), den(-2)).map_err(err)?,
    );
    track(
        &w,
        &LaurentRational::new(om(&hv1i, 1), den(2)).map_err(err)?,
    );
    track(&u, &parts(&build(1, Form::Plain, &p1)?).2);

    // stage 2
    let (v, w, u) = parts(&build(2, Form::Gauged, &p)?);
    let hs: Vec<C64> = hv.iter().map(|h| h * s).collect();
    let ls: Vec<C64> = lv.iter().map(|l| l / s).collect();
    let sum: C64 = hv.iter().chain(&lv).sum();
    let isum: C64 = hv.iter().chain(&lv).map(|a| a.inv()).sum();
    let half: C64 = hh.iter().chain(&lh).product();
    let qs = s + 1.0 / s;
    track(&v, &poly(om(&hs, -1).shift(2)));
    track(&w, &poly(om(&ls, -1).shift(2)));
    track(
        &u,
        &poly(LaurentPoly::from_coeffs(
            -2,
            vec![-half * qs, half * isum, c(0.0), sum, c(-qs)],
        )),
    );

    // stage 3
    let (v, w, _) = parts(&build(3, Form::Gauged, &p)?);
    track(&v, &poly(om(&hs[..2], -1).scale(c(q))));
    track(&w, &poly(om(&ls, -1).shift(4).scale(c(q))));

    // stage 4 at h4 = 0
    let (v, w, u) = parts(&build(4, Form::Gauged, &p4)?);
    let hv4: Vec<C64> = p4.h.iter().map(|h| ex(*h, 2.0)).collect();
    let hh4: Vec<C64> = p4.h.iter().map(|h| ex(*h, 1.0)).collect();
    let k4 = hh4[0] * hh4[1] * lh.iter().product::<C64>() * (hh4[2] + hh4[2].inv());
    track(&v, &poly(om(&[hv4[0] * s, hv4[1] * s], -1).shift(1)));
    track(&w, &poly(om(&ls[..2], -1).shift(1).scale(lv[2] * lv[3])));
    track(
        &u,
        &poly(LaurentPoly::from_coeffs(
            -1,
            vec![-k4, c(0.0), -(lv[2] + lv[3])],
        )),
    );

    // barred stage 3 at (h3, h4, l4) -> (h~, 0, h3')
    let pb = DegenParams::later(
        p.a_minus,
        [p.h[0], p.h[1], C64::new(0.21, -0.04), c(0.0)],
        [p.l[0], p.l[1], p.l[2], C64::new(-0.17, 0.06)],
    );
    let (v, w, u) = parts(&build(3, Form::Barred, &pb)?);
    let hb: Vec<C64> = pb.h.iter().map(|h| ex(*h, 2.0)).collect();
    let lb: Vec<C64> = pb.l.iter().map(|l| ex(*l, 2.0)).collect();
    let hbh: Vec<C64> = pb.h.iter().map(|h| ex(*h, 1.0)).collect();
    let lbh: Vec<C64> = pb.l.iter().map(|l| ex(*l, 1.0)).collect();
    let three_h = [hb[0], hb[1], lb[3]];
    let three_l = [lb[0], lb[1], lb[2]];
    let kb = lbh.iter().product::<C64>() * hbh[0] * hbh[1] * (hbh[2] + hbh[2].inv());
    let lin: C64 = three_h.iter().chain(&three_l).sum();
    let xm = LaurentRational::monomial(1, c(1.0));
    track(
        &(&v * &xm),
        &poly(LaurentPoly::from_roots(&three_h.map(|h| h * s))),
    );
    track(
        &(&w * &xm),
        &poly(LaurentPoly::from_roots(&three_l.map(|l| l / s))),
    );
    track(
        &(&u * &xm),
        &poly(LaurentPoly::from_coeffs(0, vec![kb, c(0.0), lin, c(-qs)])),
    );

    // numeric conjugation by truncated products
    let pol = TruncationPolicy::default();
    let basis = standard_basis();
    let samples = standard_samples(10);
    let mut worst_num = 0.0f64;
    let lprod: C64 = lv.iter().product();
    let cases: Vec<(u8, &DegenParams, Gauge, C64)> = vec![
        (1, &p1, Gauge::r_minus(2), c(1.0)),
        (2, &p, Gauge::QuasiPeriodic { m: 0, n: -1 }, lprod / s),
        (3, &p, Gauge::r_minus(-2), c(1.0)),
        (4, &p4, Gauge::QuasiPeriodic { m: 1, n: 1 }, c(-1.0)),
    ];
    for (st, pp, g, k) in cases {
        let plain = build(st, Form::Plain, pp)?;
        let num = plain.conjugate_by_products(&g, pol).scale(k);
        let sym = build(st, Form::Gauged, pp)?;
        worst_num = worst_num.max(distance(&sym, &num, &basis, &samples).map_err(err)?);
        worst_sym = worst_sym.max(
            coefficient_discrepancy(&sym, &plain.conjugate_monomial(&g).map_err(err)?.scale(k))
                .map_err(err)?,
        );
    }
    let third = build(3, Form::XForm, &pb)?;
    let a = lb[3] * s;
    let num = third.conjugate_by_products(&Gauge::Pochhammer { a }, pol);
    worst_num = worst_num
        .max(distance(&build(3, Form::Barred, &pb)?, &num, &basis, &samples).map_err(err)?);
    need(
        worst_sym < 1e-12 && worst_num < 1e-9,
        format!("symbolic vs hand-coded {worst_sym:.2e}, symbolic vs truncated products {worst_num:.2e}"),
    )
}

// 5
fn continuum_limit() -> Check {
    let eps = [1e-2, 3e-3, 1e-3];
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (mut min_slope, mut ind, mut fuchs) = (f64::INFINITY, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let cp = sample_continuum(&mut rng, eps[0]);
        let d = continuum_draw(&cp, &eps).map_err(err)?;
        min_slope = d.slopes.iter().copied().fold(min_slope, f64::min);
        ind = ind.max(d.riemann.indicial_residual);
        let hp = heun_normal_form(&cp).map_err(err)?;
        fuchs = fuchs.max((hp.gamma + hp.delta + hp.epsilon - hp.alpha - hp.beta - 1.0).norm());
    }
    need(
        min_slope >= 0.9 && ind < 1e-10 && fuchs < 1e-12,
        format!("20 draws: min slope {min_slope:.4}, indicial mismatch {ind:.2e}, Fuchs relation {fuchs:.2e}"),
    )
}

// 6
fn lax_dictionaries() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = [0.0f64; 3];
    for _ in 0..50 {
        let js = sample_js(&mut rng).map_err(err)?;
        worst[0] = worst[0].max(match_d5(&js).map_err(err)?.max_discrepancy);
        let y = sample_yamada(&mut rng).map_err(err)?;
        let c1 = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        worst[1] = worst[1].max(match_e6(&y, c1).map_err(err)?.max_discrepancy);
        let y = sample_yamada(&mut rng).map_err(err)?;
        worst[2] = worst[2].max(match_e7(&y).map_err(err)?.max_discrepancy);
    }
    need(
        worst.iter().all(|w| *w < 1e-12),
        format!(
            "50 draws each: D5 {:.2e}, E6 {:.2e}, E7 {:.2e}",
            worst[0], worst[1], worst[2]
        ),
    )
}

// 7
fn polynomial_spectrum_oracles() -> Check {
    let p0 = QHeunParams::from_values(
        0.25,
        [c(2.0), c(3.0), c(0.375)],
        [c(1.0), c(2.0), c(0.5), c(1.0)],
        c(0.0),
    )
    .map_err(err)?;
    let e0 = polynomial_spectrum(&p0, 0).map_err(err)?.energies;
    let d0 = (e0[0] - c(-5.5)).norm();

    // degree 1: l3 = 1/q, h3 from h1 h2 q + l1 l2 l3 l4 / q = (l1 l2 l3 l4 h1 h2)^{1/2}(h3^{1/2} + h3^{-1/2})
    let q = 0.5;
    let (h1, h2, l1, l2, l3, l4) = (1.3, 0.7, 0.9, 1.6, 1.0 / q, 0.8);
    let k: f64 = h1 * h2 * q + l1 * l2 * l3 * l4 / q;
    let sum = k / (l1 * l2 * l3 * l4 * h1 * h2).sqrt();
    let r = (sum + (sum * sum - 4.0).sqrt()) / 2.0;
    let p1 = QHeunParams::from_values(
        q,
        [c(h1), c(h2), c(r * r)],
        [c(l1), c(l2), c(l3), c(l4)],
        c(0.0),
    )
    .map_err(err)?;
    let rec = polynomial_spectrum(&p1, 1).map_err(err)?.energies;

    // determinant oracle: columns L_E(1), L_E(x) are affine in E
    let column = |e: f64, k: i32| {
        apply_to_poly(
            &QHeunParams { e: c(e), ..p1 },
            &LaurentPoly::monomial(k, c(1.0)),
        )
    };
    let m0 = [column(0.0, 0).map_err(err)?, column(0.0, 1).map_err(err)?];
    let m1 = [column(1.0, 0).map_err(err)?, column(1.0, 1).map_err(err)?];
    let lo = m0.iter().chain(&m1).map(|p| p.low()).min().unwrap_or(0);
    let hi = m0.iter().chain(&m1).map(|p| p.high()).max().unwrap_or(0);
    let scale = m0
        .iter()
        .chain(&m1)
        .map(|p| p.max_abs())
        .fold(0.0, f64::max);
    let rows: Vec<i32> = (lo..=hi)
        .filter(|&j| {
            m0.iter()
                .chain(&m1)
                .any(|p| p.coeff(j).norm() > 1e-12 * scale)
        })
        .collect();
    if rows.len() != 2 {
        return Err(format!(
            "expected two live rows in the degree-1 system, found {rows:?}"
        ));
    }
    let det = |e: f64| {
        let at = |col: usize, row: i32| {
            m0[col].coeff(row) + (m1[col].coeff(row) - m0[col].coeff(row)) * e
        };
        at(0, rows[0]) * at(1, rows[1]) - at(1, rows[0]) * at(0, rows[1])
    };
    // quadratic through E = -1, 0, 1
    let (dm, d0v, dp) = (det(-1.0), det(0.0), det(1.0));
    let a2 = (dp + dm) / 2.0 - d0v;
    let a1 = (dp - dm) / 2.0;
    let disc = (a1 * a1 - 4.0 * a2 * d0v).sqrt();
    let mut oracle = [(-a1 + disc) / (2.0 * a2), (-a1 - disc) / (2.0 * a2)];
    oracle.sort_by(|a, b| a.re.total_cmp(&b.re));
    let d1 = rec
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).norm() / b.norm().max(1.0))
        .fold(0.0, f64::max);
    need(
        d0 < 1e-10 && d1 < 1e-10 && rec.len() == 2,
        format!(
            "d=0: E = {:.12} (|E + 5.5| = {d0:.1e}); d=1: recurrence {:.10?} vs determinant {:.10?}, mismatch {d1:.1e}",
            e0[0].re,
            rec.iter().map(|e| e.re).collect::<Vec<_>>(),
            oracle.iter().map(|e| e.re).collect::<Vec<_>>()
        ),
    )
}

// 8
fn determinism() -> Check {
    let exe = env!("CARGO_BIN_EXE_rvd-cascade");
    let dir = std::env::temp_dir().join(format!("rvd-cascade-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(err)?;
    let cfg = dir.join("limits.json");
    std::fs::write(&cfg, r#"{"stage": 3}"#).map_err(err)?;
    let cfg = cfg.to_string_lossy().to_string();
    let runs: Vec<Vec<&str>> = vec![
        vec!["lax-match", "e6", "--seed", "17"],
        vec!["qheun", "continuum", "--seed", "9"],
        vec!["verify-limits", "--config", &cfg, "--seed", "3"],
    ];
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, args) in runs.iter().enumerate() {
        let mut outs = Vec::new();
        for rep in 0..2 {
            let out = dir.join(format!("r{i}_{rep}.json"));
            let st = Command::new(exe)
                .args(args)
                .arg("--out")
                .arg(&out)
                .status()
                .map_err(err)?;
            outs.push((st.code(), std::fs::read(&out).map_err(err)?));
        }
        let same = outs[0] == outs[1];
        let versioned = String::from_utf8_lossy(&outs[0].1)
            .contains(&format!("\"version\": \"{}\"", env!("CARGO_PKG_VERSION")));
        ok &= same && versioned && outs[0].0 == Some(0);
        lines.push(format!(
            "{}: {} bytes {}",
            args[..2].join(" "),
            outs[0].1.len(),
            if same { "identical" } else { "DIFFER" }
        ));
    }
    let _ = std::fs::remove_dir_all(&dir);
    need(ok, lines.join("; "))
}

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "mu-independence of the one-variable operator",
            mu_independence,
        ),
        ("stage-1 limit in q_plus", stage1_limit),
        (
            "stages 2-4 limits at rate -2 pi per unit R, N = 1 and 2",
            later_limits,
        ),
        ("gauge identities", gauge_identities),
        ("q-Heun continuum limit", continuum_limit),
        ("Lax dictionaries", lax_dictionaries),
        ("q-Heun polynomial spectrum", polynomial_spectrum_oracles),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let r = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match r {
            Ok(d) => println!("PASS {} {name}: {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {} {name}: {d}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
