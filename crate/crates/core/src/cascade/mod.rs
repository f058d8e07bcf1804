//! The four degeneration stages of the Ruijsenaars-van Diejen operator.
//!
//! Stage 1 keeps eight additive parameters h~; stages 2-4 use h (4) and l (4).
//! One-variable operators are exact in x = e^{2 pi i z}; N-variable ones are sampled.

mod harness;
mod many;
pub mod xform;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcalc::{LogParam, C64, I};
use crate::rvd::Operator;
use crate::shiftops::{Gauge, LaurentPoly, LaurentRational, ShiftOperator1D};

pub use harness::{
    basis_names, estimate_additive_constant, estimate_additive_constant_with, fit_slope,
    verify_limit, AdditiveConstant, ConvergenceReport, HarnessConfig,
};
pub use many::{build_stage_nd, stage1_constant_nd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    Plain,
    Gauged,
    XForm,
    /// Third stage conjugated by (l4 q^{1/2}/x; q)_inf.
    Barred,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenParams {
    pub a_minus: f64,
    /// Additive parameters: eight h~ at stage 1, four h at stages 2-4.
    pub h: Vec<C64>,
    /// Four additive l at stages 2-4, empty at stage 1.
    #[serde(default)]
    pub l: Vec<C64>,
    #[serde(default)]
    pub mu: C64,
    #[serde(default = "one")]
    pub n: usize,
}

fn one() -> usize {
    1
}

impl DegenParams {
    pub fn stage1(a_minus: f64, h: [C64; 8]) -> Self {
        Self {
            a_minus,
            h: h.to_vec(),
            l: Vec::new(),
            mu: C64::new(0.0, 0.0),
            n: 1,
        }
    }

    pub fn later(a_minus: f64, h: [C64; 4], l: [C64; 4]) -> Self {
        Self {
            a_minus,
            h: h.to_vec(),
            l: l.to_vec(),
            mu: C64::new(0.0, 0.0),
            n: 1,
        }
    }

    pub fn with_n(mut self, n: usize, mu: C64) -> Self {
        self.n = n;
        self.mu = mu;
        self
    }

    /// Generic parameters used by the examples and the CLI defaults.
    pub fn sample(stage: u8) -> Self {
        let h0: [C64; 8] = std::array::from_fn(|k| {
            C64::new(0.11 * (k + 1) as f64 + 0.05, 0.02 * (k + 1) as f64 - 0.03)
        });
        if stage == 1 {
            Self::stage1(0.5, h0)
        } else {
            Self::later(
                0.5,
                std::array::from_fn(|k| h0[k]),
                std::array::from_fn(|k| -h0[k + 4]),
            )
        }
    }

    pub fn check(&self, stage: u8) -> Result<()> {
        let (eh, el) = match stage {
            1 => (8, 0),
            2..=4 => (4, 4),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "stage must be 1..4, got {stage}"
                )))
            }
        };
        if self.h.len() != eh || self.l.len() != el {
            return Err(Error::StageArityMismatch {
                stage,
                expected: format!("h:{eh} l:{el}"),
                got: format!("h:{} l:{}", self.h.len(), self.l.len()),
            });
        }
        if !(self.a_minus > 0.0) || !self.a_minus.is_finite() {
            return Err(Error::InvalidModulus(self.a_minus));
        }
        if self.n == 0 {
            return Err(Error::InvalidInput("N must be at least 1".into()));
        }
        Ok(())
    }

    /// q = e^{-2 pi a_-}
    pub fn q(&self) -> f64 {
        (-2.0 * PI * self.a_minus).exp()
    }

    pub fn h_log(&self) -> Vec<LogParam> {
        self.h.iter().map(|h| LogParam::additive(*h)).collect()
    }

    pub fn l_log(&self) -> Vec<LogParam> {
        self.l.iter().map(|l| LogParam::additive(*l)).collect()
    }

    /// Pre-limit parameters of stage `stage` (2..4) at shift R, in the arity of stage - 1.
    pub fn shifted(&self, stage: u8, r: f64) -> Result<DegenParams> {
        self.check(stage)?;
        let ir = I * r;
        let mut p = self.clone();
        match stage {
            2 => {
                p.h = self
                    .h
                    .iter()
                    .map(|h| h + ir)
                    .chain(self.l.iter().map(|l| -l - ir))
                    .collect();
                p.l = Vec::new();
            }
            3 => {
                p.h = vec![
                    self.h[0] - ir,
                    self.h[1] - ir,
                    self.h[2] + ir,
                    self.h[3] + ir,
                ];
                p.l = self.l.iter().map(|l| l - ir).collect();
            }
            4 => {
                p.h = self.h.iter().map(|h| h + ir).collect();
                p.l = vec![
                    self.l[0] + ir,
                    self.l[1] + ir,
                    self.l[2] - ir,
                    self.l[3] - ir,
                ];
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "no shifted form for stage {stage}"
                )))
            }
        }
        Ok(p)
    }
}

/// z-shift and prefactor taking the stage-(k-1) gauged operator to the stage-k limit.
pub fn stage_shift(stage: u8, r: f64) -> (f64, f64) {
    match stage {
        2 => (r, (-4.0 * PI * r).exp()),
        3 => (-r, (-4.0 * PI * r).exp()),
        _ => (r, 1.0),
    }
}

/// Overall-sign and normalization choices fixed by the limit harness.
#[derive(Debug, Clone, Serialize)]
pub struct Convention {
    pub item: &'static str,
    pub choice: &'static str,
}

pub fn conventions() -> Vec<Convention> {
    vec![
        Convention {
            item: "stage-2 U linear terms",
            choice: "+(sum H + sum L) q^1/2 x (sign fixed by the limit check)",
        },
        Convention {
            item: "stage-3 U linear terms",
            choice: "+(H1 + H2 + sum L) x (sign fixed by the limit check)",
        },
        Convention {
            item: "stage-4 prefactor",
            choice: "1 (the shifted stage-3 operator already has an R-free limit)",
        },
        Convention {
            item: "stage-4 gauged form",
            choice: "-R_-^-1 e^{-pi i z} A R_- e^{pi i z}, carrying -U",
        },
        Convention {
            item: "stage-4 x-form",
            choice: "h4 = 0 (multiplicative h4 = 1)",
        },
        Convention {
            item: "stage-1 counterterm",
            choice: "(A8 + B8)/2 term not multiplied by prod e^{pi i h~}",
        },
    ]
}

/// Build one stage. N = 1 gives an exact operator, N >= 2 a sampled one.
pub fn build_stage(stage: u8, form: Form, params: &DegenParams) -> Result<Operator> {
    params.check(stage)?;
    if params.n >= 2 {
        return Ok(Operator::Many(build_stage_nd(stage, form, params)?));
    }
    Ok(Operator::One(build_stage_1d(stage, form, params)?))
}

pub fn build_stage_1d(stage: u8, form: Form, params: &DegenParams) -> Result<ShiftOperator1D> {
    params.check(stage)?;
    let m = Mults::new(params);
    match (stage, form) {
        (_, Form::Plain) => plain_1d(stage, &m),
        (1, Form::Gauged) => plain_1d(1, &m)?.conjugate_monomial(&Gauge::r_minus(2)),
        (2, Form::Gauged) => {
            let c = m.lprod() / m.s;
            Ok(plain_1d(2, &m)?
                .conjugate_monomial(&Gauge::QuasiPeriodic { m: 0, n: -1 })?
                .scale(c))
        }
        (3, Form::Gauged) => plain_1d(3, &m)?.conjugate_monomial(&Gauge::r_minus(-2)),
        (4, Form::Gauged) => Ok(plain_1d(4, &m)?
            .conjugate_monomial(&Gauge::QuasiPeriodic { m: 1, n: 1 })?
            .scale(C64::new(-1.0, 0.0))),
        (1, Form::XForm) => Err(Error::InvalidInput(
            "stage 1 has no separate multiplicative form".into(),
        )),
        (2, Form::XForm) => {
            let (h, l) = logs4(params);
            Ok(xform::second(params.q(), &h, &l))
        }
        (3, Form::XForm) => {
            let (h, l) = logs4(params);
            Ok(xform::third(params.q(), &h, &l))
        }
        (4, Form::XForm) => {
            if params.h[3].norm() > 1e-14 {
                return Err(Error::ConstraintViolated(
                    "stage-4 x-form is normalized to h4 = 0".into(),
                ));
            }
            let (h, l) = logs4(params);
            Ok(xform::fourth(params.q(), &[h[0], h[1], h[2]], &l))
        }
        (3, Form::Barred) => {
            let (h, l) = logs4(params);
            let a = l[3].value() * m.s;
            xform::third(params.q(), &h, &l).conjugate_pochhammer(a)
        }
        (_, Form::Barred) => Err(Error::InvalidInput(
            "the barred form exists for stage 3 only".into(),
        )),
        _ => unreachable!("stage checked"),
    }
}

fn logs4(p: &DegenParams) -> ([LogParam; 4], [LogParam; 4]) {
    let h = p.h_log();
    let l = p.l_log();
    (std::array::from_fn(|k| h[k]), std::array::from_fn(|k| l[k]))
}

/// Multiplicative parameters: H = e^{2 pi i h}, Hh = e^{pi i h}, likewise L, m.
#[derive(Debug, Clone)]
pub(crate) struct Mults {
    pub s: f64,
    pub q: f64,
    pub hv: Vec<C64>,
    pub hh: Vec<C64>,
    pub lv: Vec<C64>,
    pub lh: Vec<C64>,
    pub m: C64,
    pub mh: C64,
}

impl Mults {
    pub fn new(p: &DegenParams) -> Self {
        let e = |a: C64, k: f64| (k * PI * I * a).exp();
        Self {
            s: (-PI * p.a_minus).exp(),
            q: p.q(),
            hv: p.h.iter().map(|h| e(*h, 2.0)).collect(),
            hh: p.h.iter().map(|h| e(*h, 1.0)).collect(),
            lv: p.l.iter().map(|l| e(*l, 2.0)).collect(),
            lh: p.l.iter().map(|l| e(*l, 1.0)).collect(),
            m: e(p.mu, 2.0),
            mh: e(p.mu, 1.0),
        }
    }

    pub fn lprod(&self) -> C64 {
        self.lv.iter().product()
    }

    /// prod (H - 1), prod (H + 1) over the eight stage-1 parameters.
    pub fn a8_b8(&self) -> (C64, C64) {
        (
            self.hv.iter().map(|h| h - 1.0).product(),
            self.hv.iter().map(|h| h + 1.0).product(),
        )
    }

    /// prod e^{pi i h~}
    pub fn p8(&self) -> C64 {
        self.hh.iter().product()
    }

    /// sum (H + 1/H)
    pub fn s8(&self) -> C64 {
        self.hv.iter().map(|h| h + h.inv()).sum()
    }

    /// Hh1 Hh2 (Hh3/Hh4 + Hh4/Hh3) prod Lh
    pub fn k3(&self) -> C64 {
        let r = self.hh[2] / self.hh[3];
        self.hh[0] * self.hh[1] * (r + r.inv()) * self.lh.iter().product::<C64>()
    }

    pub fn qsum(&self) -> f64 {
        self.s + 1.0 / self.s
    }
}

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn prod_one_minus(a: impl Iterator<Item = C64>, k: i32) -> LaurentPoly {
    a.fold(LaurentPoly::one(), |acc, a| {
        &acc * &LaurentPoly::one_minus(a, k)
    })
}

fn plain_1d(stage: u8, m: &Mults) -> Result<ShiftOperator1D> {
    let s = m.s;
    let q = m.q;
    let poly = LaurentRational::poly;
    let (v, w, u) = match stage {
        1 => {
            let num = prod_one_minus(m.hv.iter().map(|h| h * s), -1);
            let den = &LaurentPoly::one_minus(c(1.0), -2) * &LaurentPoly::one_minus(c(q), -2);
            let v = LaurentRational::new(num, den)?;
            let w = v.reflect();
            let (a8, b8) = m.a8_b8();
            let ua = LaurentRational::new(
                LaurentPoly::constant(a8 / 2.0),
                &LaurentPoly::one_minus(c(1.0 / s), 1) * &LaurentPoly::one_minus(c(1.0 / s), -1),
            )?;
            let ub = LaurentRational::new(
                LaurentPoly::constant(b8 / 2.0),
                &LaurentPoly::one_minus(c(-1.0 / s), 1) * &LaurentPoly::one_minus(c(-1.0 / s), -1),
            )?;
            let (sp, st) = (m.p8() * s, m.s8());
            let uc = LaurentPoly::from_coeffs(
                -2,
                vec![-sp * m.qsum(), sp * st, c(0.0), sp * st, -sp * m.qsum()],
            );
            (v, w, &(&ua + &ub) + &poly(uc))
        }
        2 => {
            let linv = m.lprod().inv();
            let v = prod_one_minus(m.hv.iter().map(|h| h * s), -1)
                .shift(2)
                .scale(linv);
            let w = prod_one_minus(m.lv.iter().map(|l| s / l), 1)
                .shift(-2)
                .scale(c(1.0 / q));
            let sum: C64 = m.hv.iter().chain(&m.lv).sum();
            let isum: C64 = m.hv.iter().chain(&m.lv).map(|a| a.inv()).sum();
            let half = m.hh.iter().product::<C64>() / m.lh.iter().product::<C64>();
            let u = LaurentPoly::from_coeffs(
                -2,
                vec![
                    -half * (1.0 + q),
                    half * isum * s,
                    c(0.0),
                    linv * sum * s,
                    -linv * (1.0 + q),
                ],
            );
            (poly(v), poly(w), poly(u))
        }
        3 => {
            let v = prod_one_minus(m.hv[..2].iter().map(|h| h * s), -1).shift(2);
            let w = prod_one_minus(m.lv.iter().map(|l| l / s), -1).shift(2);
            let lin = m.hv[0] + m.hv[1] + m.lv.iter().sum::<C64>();
            let u = LaurentPoly::from_coeffs(-1, vec![m.k3(), c(0.0), lin, c(-m.qsum())]);
            (poly(v), poly(w), poly(u))
        }
        4 => {
            let v = prod_one_minus(m.hv[..2].iter().map(|h| h * s), -1).scale(c(q));
            let w = prod_one_minus(m.lv[..2].iter().map(|l| l / s), -1)
                .shift(2)
                .scale(m.lv[2] * m.lv[3]);
            let u = LaurentPoly::from_coeffs(-1, vec![m.k3(), c(0.0), m.lv[2] + m.lv[3]]);
            (poly(v), poly(w), poly(u))
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "stage must be 1..4, got {stage}"
            )))
        }
    };
    Ok(ShiftOperator1D::exact(v, w, u, -q.ln() / (2.0 * PI)))
}

/// Closed-form stage-1 counterterm prod e^{pi i h~} q_+^-2 / (1 - e^{pi a_-})^2 + C.
pub fn counterterm(params: &DegenParams, q_plus: f64) -> Result<C64> {
    if params.a_minus == 0.0 {
        return Err(Error::CounterTermPole);
    }
    params.check(1)?;
    let m = Mults::new(params);
    let e = 1.0 / m.s;
    let d = (1.0 - e).powi(2);
    let p = m.p8();
    let cs: Vec<C64> = m.hv.iter().map(|h| h + h.inv()).collect();
    let mut s2 = c(0.0);
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            s2 += cs[i] * cs[j];
        }
    }
    let (a8, b8) = m.a8_b8();
    let cc = p * (m.s * (e + m.s) + (12.0 + s2) / d) + 0.5 * (a8 + b8) / d;
    Ok(p / (q_plus * q_plus * d) + cc)
}
