use std::sync::Arc;

use super::{monomial_factors, LaurentRational, ShiftOperator1D};
use crate::error::{Error, Result};
use crate::qcalc::{xvar, C64, I};

pub type NdFn = Arc<dyn Fn(&[C64]) -> Result<C64> + Send + Sync>;
pub type NdTestFn = Arc<dyn Fn(&[C64]) -> C64 + Send + Sync>;

/// sum_j (v_j e^{-i a_- d_j} + w_j e^{i a_- d_j}) + u
#[derive(Clone)]
pub struct ShiftOperatorND {
    pub n: usize,
    pub v: Vec<NdFn>,
    pub w: Vec<NdFn>,
    pub u: NdFn,
    pub a_minus: f64,
}

impl std::fmt::Debug for ShiftOperatorND {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ShiftOperatorND {{ n: {}, a_minus: {} }}",
            self.n, self.a_minus
        )
    }
}

fn check(n: usize, z: &[C64]) -> Result<()> {
    if z.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: z.len(),
        });
    }
    Ok(())
}

impl ShiftOperatorND {
    pub fn new(v: Vec<NdFn>, w: Vec<NdFn>, u: NdFn, a_minus: f64) -> Result<Self> {
        if v.len() != w.len() || v.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: v.len(),
                got: w.len(),
            });
        }
        Ok(Self {
            n: v.len(),
            v,
            w,
            u,
            a_minus,
        })
    }

    pub fn from_1d(op: &ShiftOperator1D) -> Self {
        let s = op.to_sampled();
        let wrap = |c: super::Coefficient| -> NdFn { Arc::new(move |z: &[C64]| c.eval(z[0])) };
        Self {
            n: 1,
            v: vec![wrap(s.v)],
            w: vec![wrap(s.w)],
            u: wrap(s.u),
            a_minus: op.a_minus,
        }
    }

    pub fn apply_nd(&self, f: &dyn Fn(&[C64]) -> C64, z: &[C64]) -> Result<C64> {
        check(self.n, z)?;
        let s = I * self.a_minus;
        let mut acc = (self.u)(z)? * f(z);
        let mut y = z.to_vec();
        for j in 0..self.n {
            y[j] = z[j] - s;
            acc += (self.v[j])(z)? * f(&y);
            y[j] = z[j] + s;
            acc += (self.w[j])(z)? * f(&y);
            y[j] = z[j];
        }
        Ok(acc)
    }

    pub fn scale(&self, a: C64) -> Self {
        let sc = |f: &NdFn| -> NdFn {
            let f = f.clone();
            Arc::new(move |z: &[C64]| Ok(f(z)? * a))
        };
        Self {
            n: self.n,
            v: self.v.iter().map(sc).collect(),
            w: self.w.iter().map(sc).collect(),
            u: sc(&self.u),
            a_minus: self.a_minus,
        }
    }

    pub fn add_constant(&self, a: C64) -> Self {
        let u = self.u.clone();
        Self {
            u: Arc::new(move |z: &[C64]| Ok(u(z)? + a)),
            ..self.clone()
        }
    }

    /// Coefficients read at z + i delta (1, ..., 1), times `factor`.
    pub fn shift_and_scale(&self, delta: f64, factor: C64) -> Self {
        let sh = |f: &NdFn| -> NdFn {
            let f = f.clone();
            Arc::new(move |z: &[C64]| {
                let y: Vec<C64> = z.iter().map(|v| v + I * delta).collect();
                Ok(f(&y)? * factor)
            })
        };
        Self {
            n: self.n,
            v: self.v.iter().map(sh).collect(),
            w: self.w.iter().map(sh).collect(),
            u: sh(&self.u),
            a_minus: self.a_minus,
        }
    }

    /// Conjugation by prod_j R_-(z_j)^m e^{pi i n z_j}.
    pub fn conjugate_monomial(&self, m: i32, n: i32) -> Self {
        let s = (-std::f64::consts::PI * self.a_minus).exp();
        let (fv, fw) = monomial_factors(m, n, s);
        let mul = |f: &NdFn, j: usize, r: &LaurentRational| -> NdFn {
            let f = f.clone();
            let r = r.clone();
            Arc::new(move |z: &[C64]| {
                let x = xvar(z[j]);
                Ok(f(z)? * r.eval(x)?)
            })
        };
        Self {
            n: self.n,
            v: (0..self.n).map(|j| mul(&self.v[j], j, &fv)).collect(),
            w: (0..self.n).map(|j| mul(&self.w[j], j, &fw)).collect(),
            u: self.u.clone(),
            a_minus: self.a_minus,
        }
    }
}

pub fn distance_nd(
    a: &ShiftOperatorND,
    b: &ShiftOperatorND,
    basis: &[NdTestFn],
    samples: &[Vec<C64>],
) -> Result<f64> {
    if basis.is_empty() || samples.is_empty() {
        return Err(Error::InvalidInput("empty basis or sample list".into()));
    }
    let mut worst = 0.0f64;
    for z in samples {
        for f in basis {
            let fa = a.apply_nd(f.as_ref(), z)?;
            let fb = b.apply_nd(f.as_ref(), z)?;
            worst = worst.max((fa - fb).norm() / (1.0 + fb.norm()));
        }
    }
    Ok(worst)
}

/// {1, e^{2 pi i z1} + e^{2 pi i z2}, e^{2 pi i (z1 + z2)}}
pub fn symmetric_basis_2() -> Vec<NdTestFn> {
    vec![
        Arc::new(|_: &[C64]| C64::new(1.0, 0.0)),
        Arc::new(|z: &[C64]| xvar(z[0]) + xvar(z[1])),
        Arc::new(|z: &[C64]| xvar(z[0] + z[1])),
    ]
}

/// Pairs on Im z = 0.1 with distinct real parts, clear of the diagonal poles z1 = +-z2.
pub fn symmetric_samples_2(n: usize) -> Vec<Vec<C64>> {
    (0..n)
        .map(|j| {
            let t = (j as f64 + 0.37) / n as f64;
            vec![
                C64::new(-0.5 + t, 0.1),
                C64::new(-0.5 + (t + 0.31).fract(), 0.1),
            ]
        })
        .collect()
}
