//! N-variable stage operators, sampled in z.

use std::sync::Arc;

use super::{DegenParams, Form, Mults};
use crate::error::{Error, Result};
use crate::qcalc::{xvar, C64};
use crate::shiftops::{NdFn, ShiftOperatorND};

struct Nd {
    stage: u8,
    m: Mults,
}

fn pairs(x: &[C64], f: impl Fn(C64, C64) -> C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..x.len() {
        for k in j + 1..x.len() {
            acc += f(x[j], x[k]);
        }
    }
    acc
}

impl Nd {
    /// prod_{k != j} (1 - m x_k/x_j) / (1 - x_k/x_j)
    fn cross(&self, m: C64, j: usize, x: &[C64]) -> C64 {
        let mut acc = C64::new(1.0, 0.0);
        for (k, xk) in x.iter().enumerate() {
            if k != j {
                let r = xk / x[j];
                acc *= (1.0 - m * r) / (1.0 - r);
            }
        }
        acc
    }

    fn v(&self, j: usize, x: &[C64]) -> C64 {
        let m = &self.m;
        let (s, q) = (m.s, m.q);
        let xj = x[j];
        let onem = |a: C64| 1.0 - a;
        match self.stage {
            1 => {
                let single: C64 = m.hv.iter().map(|h| onem(s * h / xj)).product::<C64>()
                    / ((1.0 - xj.powi(-2)) * (1.0 - q * xj.powi(-2)));
                let mut acc = single;
                for (k, xk) in x.iter().enumerate() {
                    if k != j {
                        acc *= (1.0 - m.m * xk / xj) * (1.0 - m.m / (xk * xj))
                            / ((1.0 - xk / xj) * (1.0 - 1.0 / (xk * xj)));
                    }
                }
                acc
            }
            2 => {
                let nm1 = x.len() as i32 - 1;
                xj * xj * m.m.powi(nm1) * m.hv.iter().map(|h| onem(s * h / xj)).product::<C64>()
                    / m.lprod()
                    * self.cross(m.m, j, x)
            }
            3 => {
                xj * xj
                    * m.hv[..2].iter().map(|h| onem(s * h / xj)).product::<C64>()
                    * self.cross(m.m, j, x)
            }
            _ => {
                q * m.hv[..2].iter().map(|h| onem(s * h / xj)).product::<C64>()
                    * self.cross(m.m, j, x)
            }
        }
    }

    fn w(&self, j: usize, x: &[C64]) -> C64 {
        let m = &self.m;
        let (s, q) = (m.s, m.q);
        let xj = x[j];
        match self.stage {
            1 => {
                let inv: Vec<C64> = x.iter().map(|v| v.inv()).collect();
                self.v(j, &inv)
            }
            2 => {
                let mut acc =
                    m.lv.iter().map(|l| 1.0 - s * xj / l).product::<C64>() / (q * xj * xj);
                for (k, xk) in x.iter().enumerate() {
                    if k != j {
                        let r = xj / xk;
                        acc *= (1.0 - m.m * r) / (1.0 - r);
                    }
                }
                acc
            }
            3 => {
                xj * xj
                    * m.lv.iter().map(|l| 1.0 - l / (s * xj)).product::<C64>()
                    * self.cross(m.m.inv(), j, x)
            }
            _ => {
                xj * xj
                    * m.lv[2]
                    * m.lv[3]
                    * m.lv[..2]
                        .iter()
                        .map(|l| 1.0 - l / (s * xj))
                        .product::<C64>()
                    * self.cross(m.m.inv(), j, x)
            }
        }
    }

    fn u(&self, x: &[C64]) -> C64 {
        let m = &self.m;
        let (s, q) = (m.s, m.q);
        let n = x.len() as i32;
        let cc = (m.m - 1.0) * (m.m / q - 1.0);
        let sx: C64 = x.iter().sum();
        let sxi: C64 = x.iter().map(|v| v.inv()).sum();
        let sx2: C64 = x.iter().map(|v| v * v).sum();
        let sxi2: C64 = x.iter().map(|v| v.powi(-2)).sum();
        match self.stage {
            1 => {
                let (a8, b8) = m.a8_b8();
                let mut pa = C64::new(1.0, 0.0);
                let mut pb = C64::new(1.0, 0.0);
                for xj in x {
                    pa *= m.m + cc / ((1.0 - xj / s) * (1.0 - 1.0 / (s * xj)));
                    pb *= m.m + cc / ((1.0 + xj / s) * (1.0 + 1.0 / (s * xj)));
                }
                let sym: C64 = x.iter().map(|v| v + v.inv()).sum();
                let sym2 = sx2 + sxi2;
                let cross = pairs(x, |a, b| (a + a.inv()) * (b + b.inv()));
                let mh = m.mh;
                let cm = (mh - mh.inv()) * (mh / s - s / mh);
                a8 / (2.0 * cc) * pa
                    + b8 / (2.0 * cc) * pb
                    + s * m.m.powi(n - 1) * m.p8() * (m.s8() * sym - m.qsum() * sym2 + cm * cross)
            }
            2 => {
                let sum: C64 = m.hv.iter().chain(&m.lv).sum();
                let isum: C64 = m.hv.iter().chain(&m.lv).map(|a| a.inv()).sum();
                let half = m.hh.iter().product::<C64>() / m.lh.iter().product::<C64>();
                let k = q * cc / m.m;
                let mn = m.m.powi(n - 1);
                mn / m.lprod() * (sum * s * sx - (1.0 + q) * sx2 + k * pairs(x, |a, b| a * b))
                    + mn * half
                        * (isum * s * sxi - (1.0 + q) * sxi2 + k * pairs(x, |a, b| (a * b).inv()))
            }
            3 => {
                let lin = m.hv[0] + m.hv[1] + m.lv.iter().sum::<C64>();
                lin * sx - m.qsum() * sx2 + s * cc / m.m * pairs(x, |a, b| a * b) + m.k3() * sxi
            }
            _ => (m.lv[2] + m.lv[3]) * sx + m.k3() * sxi,
        }
    }
}

fn finite(v: C64, z: &[C64]) -> Result<C64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::pole_at(z[0]))
    }
}

fn xs(z: &[C64]) -> Vec<C64> {
    z.iter().map(|v| xvar(*v)).collect()
}

fn plain_nd(stage: u8, params: &DegenParams) -> Result<ShiftOperatorND> {
    let nd = Arc::new(Nd {
        stage,
        m: Mults::new(params),
    });
    let n = params.n;
    let v: Vec<NdFn> = (0..n)
        .map(|j| -> NdFn {
            let nd = nd.clone();
            Arc::new(move |z: &[C64]| finite(nd.v(j, &xs(z)), z))
        })
        .collect();
    let w: Vec<NdFn> = (0..n)
        .map(|j| -> NdFn {
            let nd = nd.clone();
            Arc::new(move |z: &[C64]| finite(nd.w(j, &xs(z)), z))
        })
        .collect();
    let u: NdFn = Arc::new(move |z: &[C64]| finite(nd.u(&xs(z)), z));
    ShiftOperatorND::new(v, w, u, params.a_minus)
}

/// N-variable stage operator. The first-stage U carries the z-independent
/// term (A8 + B8) m^N / (2 (m - 1)(m/q - 1)) of the N-variable formula.
pub fn build_stage_nd(stage: u8, form: Form, params: &DegenParams) -> Result<ShiftOperatorND> {
    params.check(stage)?;
    let plain = plain_nd(stage, params)?;
    let m = Mults::new(params);
    match form {
        Form::Plain => Ok(plain),
        Form::Gauged => Ok(match stage {
            1 => plain.conjugate_monomial(2, 0),
            2 => {
                let k = m.lprod() / m.s * m.m.powi(-(params.n as i32 - 1));
                plain.conjugate_monomial(0, -1).scale(k)
            }
            3 => plain.conjugate_monomial(-2, 0),
            _ => plain.conjugate_monomial(1, 1).scale(C64::new(-1.0, 0.0)),
        }),
        Form::XForm | Form::Barred => {
            Err(Error::InvalidInput("x-forms are one-variable only".into()))
        }
    }
}

/// (A8 + B8) m^N / (2 (m - 1)(m/q - 1)) for stage-1 parameters.
pub fn stage1_constant_nd(params: &DegenParams) -> Result<C64> {
    params.check(1)?;
    let m = Mults::new(params);
    let cc = (m.m - 1.0) * (m.m / m.q - 1.0);
    if cc.norm() < 1e-300 {
        return Err(Error::MuDenominatorZero);
    }
    let (a8, b8) = m.a8_b8();
    Ok((a8 + b8) * m.m.powi(params.n as i32) / (2.0 * cc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::build_stage_1d;
    use crate::shiftops::{distance_nd, fourier_mode, NdTestFn};

    fn basis1() -> Vec<NdTestFn> {
        (-2..=2)
            .map(|k| -> NdTestFn {
                let f = fourier_mode(k);
                Arc::new(move |z: &[C64]| f(z[0]))
            })
            .collect()
    }

    fn samples1() -> Vec<Vec<C64>> {
        (0..5)
            .map(|j| vec![C64::new(-0.4 + 0.17 * j as f64, 0.1)])
            .collect()
    }

    #[test]
    fn one_variable_reduction() {
        let mu = C64::new(0.21, 0.03);
        for stage in 1..=4u8 {
            let p = DegenParams::sample(stage).with_n(1, mu);
            for form in [Form::Plain, Form::Gauged] {
                let a = plain_or(stage, form, &p);
                let mut b = ShiftOperatorND::from_1d(&build_stage_1d(stage, form, &p).unwrap());
                if stage == 1 {
                    b = b.add_constant(stage1_constant_nd(&p).unwrap());
                }
                let d = distance_nd(&a, &b, &basis1(), &samples1()).unwrap();
                assert!(d < 1e-12, "stage {stage} {form:?}: {d:e}");
            }
        }
    }

    fn plain_or(stage: u8, form: Form, p: &DegenParams) -> ShiftOperatorND {
        build_stage_nd(stage, form, p).unwrap()
    }

    #[test]
    fn symmetric_under_swap() {
        let mu = C64::new(0.21, 0.03);
        let z = [C64::new(0.13, 0.1), C64::new(-0.29, 0.12)];
        let zs = [z[1], z[0]];
        for stage in 1..=4u8 {
            let p = DegenParams::sample(stage).with_n(2, mu);
            let op = build_stage_nd(stage, Form::Plain, &p).unwrap();
            let a = (op.u)(&z).unwrap();
            let b = (op.u)(&zs).unwrap();
            assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
            let v0 = (op.v[0])(&z).unwrap();
            let v1 = (op.v[1])(&zs).unwrap();
            assert!((v0 - v1).norm() < 1e-12 * v0.norm().max(1.0));
        }
    }
}
