//! The Ruijsenaars-van Diejen operator in one and N variables.
//!
//! A = sum_j V(z_j) e^{-i a_- d_j} + V(-z_j) e^{i a_- d_j} + U, built from R_+ products.
//! U subtracts E_t(mu; omega_t), so the N = 1 operator does not depend on mu.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcalc::{r_pm, ModulusPair, Sign, TruncationPolicy, C64, I};
use crate::shiftops::{Coefficient, NdFn, ShiftOperator1D, ShiftOperatorND};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RvDParams {
    pub modulus: ModulusPair,
    pub h: [C64; 8],
    pub mu: C64,
    pub n: usize,
}

/// One-variable or N-variable operator.
#[derive(Debug, Clone)]
pub enum Operator {
    One(ShiftOperator1D),
    Many(ShiftOperatorND),
}

impl Operator {
    pub fn one(&self) -> Option<&ShiftOperator1D> {
        match self {
            Operator::One(o) => Some(o),
            Operator::Many(_) => None,
        }
    }

    pub fn many(&self) -> Option<&ShiftOperatorND> {
        match self {
            Operator::Many(o) => Some(o),
            Operator::One(_) => None,
        }
    }

    /// N-variable view of either kind.
    pub fn to_nd(&self) -> ShiftOperatorND {
        match self {
            Operator::One(o) => ShiftOperatorND::from_1d(o),
            Operator::Many(o) => o.clone(),
        }
    }
}

#[derive(Clone)]
struct Consts {
    md: ModulusPair,
    policy: TruncationPolicy,
    h: [C64; 8],
    mu: C64,
    omega: [C64; 4],
    p: [C64; 4],
    e_omega: C64,
    den: C64,
}

impl Consts {
    fn r(&self, z: C64) -> Result<C64> {
        r_pm(z, &self.md, Sign::Plus, &self.policy)
    }

    fn s(&self) -> C64 {
        I * 0.5 * (self.md.a_plus + self.md.a_minus)
    }

    fn e_t(&self, t: usize, z: C64) -> Result<C64> {
        let (s, w, mu) = (self.s(), self.omega[t], self.mu);
        let num = self.r(z + mu - s - w)? * self.r(z - mu + s - w)?;
        let den = self.r(z - s - w)? * self.r(z + s - w)?;
        if den.norm() == 0.0 {
            return Err(Error::pole_at(z));
        }
        Ok(num / den)
    }

    /// prod_n R(z - h_n - i a_-/2) / (R(2z + i a_+/2) R(2z - i a_- + i a_+/2))
    fn v_single(&self, z: C64) -> Result<C64> {
        let (ap, am) = (self.md.a_plus, self.md.a_minus);
        let mut num = C64::new(1.0, 0.0);
        for hn in &self.h {
            num *= self.r(z - hn - I * am / 2.0)?;
        }
        let den = self.r(2.0 * z + I * ap / 2.0)? * self.r(2.0 * z - I * am + I * ap / 2.0)?;
        if den.norm() == 0.0 {
            return Err(Error::pole_at(z));
        }
        Ok(num / den)
    }

    fn cross(&self, zj: C64, zk: C64) -> Result<C64> {
        let ap2 = I * self.md.a_plus / 2.0;
        let mu = self.mu;
        let num = self.r(zj - zk - mu + ap2)? * self.r(zj + zk - mu + ap2)?;
        let den = self.r(zj - zk + ap2)? * self.r(zj + zk + ap2)?;
        if den.norm() == 0.0 {
            return Err(Error::pole_at(zj));
        }
        Ok(num / den)
    }

    fn v_nd(&self, j: usize, z: &[C64]) -> Result<C64> {
        let mut v = self.v_single(z[j])?;
        for (k, zk) in z.iter().enumerate() {
            if k != j {
                v *= self.cross(z[j], *zk)?;
            }
        }
        Ok(v)
    }

    fn u_nd(&self, z: &[C64]) -> Result<C64> {
        let n = z.len() as i32;
        let mut acc = C64::new(0.0, 0.0);
        for t in 0..4 {
            let mut prod = C64::new(1.0, 0.0);
            for zj in z {
                prod *= self.e_t(t, *zj)?;
            }
            acc += self.p[t] * (prod - self.e_omega.powi(n));
        }
        Ok(acc / self.den)
    }
}

fn consts(params: &RvDParams) -> Result<Consts> {
    let md = ModulusPair::new(params.modulus.a_plus, params.modulus.a_minus)?;
    if params.n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let policy = TruncationPolicy::default();
    let ap = md.a_plus;
    let r = |z: C64| r_pm(z, &md, Sign::Plus, &policy);
    let h = params.h;
    let half = C64::new(0.5, 0.0);
    let mut p = [C64::new(1.0, 0.0); 4];
    let damp = (-2.0 * PI * ap).exp();
    p[2] = C64::new(damp, 0.0);
    p[3] = C64::new(damp, 0.0);
    for hn in &h {
        p[0] *= r(*hn)?;
        p[1] *= r(hn - half)?;
        p[2] *= (-PI * I * hn).exp() * r(hn - I * ap / 2.0)?;
        p[3] *= (PI * I * hn).exp() * r(hn + half + I * ap / 2.0)?;
    }
    let mu = params.mu;
    let den = 2.0 * r(mu - I * ap / 2.0)? * r(mu - I * md.a_minus - I * ap / 2.0)?;
    if den.norm() < 1e-13 {
        return Err(Error::MuDenominatorZero);
    }
    let mut c = Consts {
        md,
        policy,
        h,
        mu,
        omega: [C64::new(0.0, 0.0), half, I * ap / 2.0, -half - I * ap / 2.0],
        p,
        e_omega: C64::new(0.0, 0.0),
        den,
    };
    // E_t(mu; omega_t) is the same for every t: R(mu - s) R(s - mu) / (R(-s) R(s)).
    c.e_omega = match c.e_t(0, C64::new(0.0, 0.0)) {
        Ok(v) if v.is_finite() => v,
        _ => {
            // near-degenerate input: symmetric mu perturbation, O(delta^2) accurate
            let d = 1e-6;
            let mut up = Consts {
                mu: mu + d,
                ..c.clone()
            };
            let e1 = up.e_t(0, C64::new(0.0, 0.0))?;
            up.mu = mu - d;
            let e2 = up.e_t(0, C64::new(0.0, 0.0))?;
            0.5 * (e1 + e2)
        }
    };
    Ok(c)
}

pub fn build_rvd_1d(params: &RvDParams) -> Result<ShiftOperator1D> {
    let c = Arc::new(consts(params)?);
    let (c1, c2, c3) = (c.clone(), c.clone(), c.clone());
    Ok(ShiftOperator1D::new(
        Coefficient::sampled(move |z| c1.v_single(z)),
        Coefficient::sampled(move |z| c2.v_single(-z)),
        Coefficient::sampled(move |z| c3.u_nd(&[z])),
        c.md.a_minus,
    ))
}

pub fn build_rvd_nd(params: &RvDParams) -> Result<ShiftOperatorND> {
    let c = Arc::new(consts(params)?);
    let n = params.n;
    let v: Vec<NdFn> = (0..n)
        .map(|j| -> NdFn {
            let c = c.clone();
            Arc::new(move |z: &[C64]| c.v_nd(j, z))
        })
        .collect();
    let w: Vec<NdFn> = (0..n)
        .map(|j| -> NdFn {
            let c = c.clone();
            Arc::new(move |z: &[C64]| {
                let m: Vec<C64> = z.iter().map(|v| -v).collect();
                c.v_nd(j, &m)
            })
        })
        .collect();
    let cu = c.clone();
    let u: NdFn = Arc::new(move |z: &[C64]| cu.u_nd(z));
    ShiftOperatorND::new(v, w, u, c.md.a_minus)
}

pub fn build_rvd(params: &RvDParams) -> Result<Operator> {
    if params.n == 1 {
        Ok(Operator::One(build_rvd_1d(params)?))
    } else {
        Ok(Operator::Many(build_rvd_nd(params)?))
    }
}
