//! Truncated theta-type products and q-Pochhammer symbols.
//!
//! R(z) = prod_{k>=1} (1 - q^{2k-1} e^{2 pi i z}) (1 - q^{2k-1} e^{-2 pi i z}) with
//! q = e^{-pi a}. Both signs share one implementation; the sign only selects a.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusPair {
    pub a_plus: f64,
    pub a_minus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl ModulusPair {
    pub fn new(a_plus: f64, a_minus: f64) -> Result<Self> {
        for a in [a_plus, a_minus] {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::InvalidModulus(a));
            }
        }
        Ok(Self { a_plus, a_minus })
    }

    pub fn a(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.a_plus,
            Sign::Minus => self.a_minus,
        }
    }

    pub fn q_plus(&self) -> f64 {
        (-PI * self.a_plus).exp()
    }

    pub fn q_minus(&self) -> f64 {
        (-PI * self.a_minus).exp()
    }

    /// The shift modulus e^{-2 pi a_-}.
    pub fn q(&self) -> f64 {
        (-2.0 * PI * self.a_minus).exp()
    }

    pub fn strip_bound(&self) -> f64 {
        2.0 * self.a_plus.max(self.a_minus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tol: 1e-17,
            max_terms: 400,
        }
    }
}

/// x = e^{2 pi i z}
pub fn xvar(z: C64) -> C64 {
    (2.0 * PI * I * z).exp()
}

/// e^{pi i n z}
pub fn exp_half(z: C64, n: i32) -> C64 {
    (PI * I * z * n as f64).exp()
}

pub fn r_pm(z: C64, modulus: &ModulusPair, sign: Sign, policy: &TruncationPolicy) -> Result<C64> {
    let a = modulus.a(sign);
    if !(a > 0.0) {
        return Err(Error::InvalidModulus(a));
    }
    let bound = modulus.strip_bound();
    if z.im.abs() > bound {
        return Err(Error::OutsideStrip {
            im: z.im.abs(),
            bound,
        });
    }
    r_product(z, (-PI * a).exp(), policy)
}

/// The product with an explicit nome |qs| < 1, no strip check.
pub(crate) fn r_product(z: C64, qs: f64, policy: &TruncationPolicy) -> Result<C64> {
    let x = xvar(z);
    let xi = x.inv();
    let growth = (2.0 * PI * z.im.abs()).exp();
    let q2 = qs * qs;
    let mut qk = qs;
    let mut acc = C64::new(1.0, 0.0);
    for _ in 0..policy.max_terms {
        acc *= (1.0 - qk * x) * (1.0 - qk * xi);
        qk *= q2;
        // remaining tail: sum_{j>K} 2 |q|^{2j-1} e^{2 pi |Im z|}
        let tail = 2.0 * growth * qk / (1.0 - q2);
        if tail < policy.tol {
            return Ok(acc);
        }
    }
    Err(Error::TruncationExceeded {
        max_terms: policy.max_terms,
    })
}

pub fn q_pochhammer(a: C64, q: C64, policy: &TruncationPolicy) -> Result<C64> {
    let qn = q.norm();
    if !(qn < 1.0) {
        return Err(Error::InvalidModulus(qn));
    }
    let mut acc = C64::new(1.0, 0.0);
    let mut term = a;
    for _ in 0..policy.max_terms {
        if term.norm() * 1.0 / (1.0 - qn) < policy.tol {
            return Ok(acc);
        }
        acc *= 1.0 - term;
        term *= q;
    }
    Err(Error::TruncationExceeded {
        max_terms: policy.max_terms,
    })
}

/// A nonzero complex number kept through its logarithm, so that half powers and
/// products of half powers have a fixed branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogParam {
    pub log: C64,
}

impl LogParam {
    pub fn from_log(log: C64) -> Self {
        Self { log }
    }

    pub fn from_value(v: C64) -> Result<Self> {
        if v.norm() == 0.0 || !v.is_finite() {
            return Err(Error::InvalidInput(format!("cannot take log of {v}")));
        }
        Ok(Self { log: v.ln() })
    }

    pub fn real(v: f64) -> Result<Self> {
        Self::from_value(C64::new(v, 0.0))
    }

    /// e^{2 pi i h} for an additive parameter h.
    pub fn additive(h: C64) -> Self {
        Self {
            log: 2.0 * PI * I * h,
        }
    }

    pub fn one() -> Self {
        Self {
            log: C64::new(0.0, 0.0),
        }
    }

    pub fn value(&self) -> C64 {
        self.log.exp()
    }

    pub fn sqrt(&self) -> C64 {
        (0.5 * self.log).exp()
    }

    pub fn pow(&self, p: f64) -> C64 {
        (p * self.log).exp()
    }

    pub fn inv(&self) -> Self {
        Self { log: -self.log }
    }

    pub fn mul(&self, other: &LogParam) -> Self {
        Self {
            log: self.log + other.log,
        }
    }

    pub fn div(&self, other: &LogParam) -> Self {
        Self {
            log: self.log - other.log,
        }
    }

    pub fn powi_half(&self, half_units: i32) -> Self {
        Self {
            log: self.log * (half_units as f64 * 0.5),
        }
    }
}

/// Product of several parameters in log space.
pub fn log_product<'a>(ps: impl IntoIterator<Item = &'a LogParam>) -> LogParam {
    LogParam {
        log: ps.into_iter().map(|p| p.log).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> ModulusPair {
        ModulusPair::new(1.3, 0.5).unwrap()
    }

    #[test]
    fn tiny_nome_gives_one() {
        let md = ModulusPair::new(20.0, 0.5).unwrap();
        let r = r_pm(C64::new(0.3, 0.0), &md, Sign::Plus, &Default::default()).unwrap();
        assert!((r - 1.0).norm() < 1e-12);
    }

    #[test]
    fn quasi_period_ratio() {
        let md = m();
        let z = C64::new(0.25, 0.0);
        let p = TruncationPolicy::default();
        let a = r_pm(z - I * 0.5, &md, Sign::Minus, &p).unwrap();
        let b = r_pm(z, &md, Sign::Minus, &p).unwrap();
        let want = C64::new(0.0, -(PI / 2.0).exp());
        assert!((a / b - want).norm() < 1e-12, "{}", a / b);
    }

    #[test]
    fn unit_period() {
        let md = m();
        let p = TruncationPolicy::default();
        let z = C64::new(0.17, 0.3);
        let a = r_pm(z, &md, Sign::Plus, &p).unwrap();
        let b = r_pm(z + 1.0, &md, Sign::Plus, &p).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_modulus_and_strip() {
        assert_eq!(ModulusPair::new(0.0, 1.0), Err(Error::InvalidModulus(0.0)));
        let md = m();
        let r = r_pm(C64::new(0.0, 3.0), &md, Sign::Plus, &Default::default());
        assert!(matches!(r, Err(Error::OutsideStrip { .. })));
    }

    #[test]
    fn truncation_exceeded() {
        let md = ModulusPair::new(1e-4, 1e-4).unwrap();
        let p = TruncationPolicy {
            tol: 1e-16,
            max_terms: 5,
        };
        let r = r_pm(C64::new(0.1, 0.0), &md, Sign::Plus, &p);
        assert_eq!(r, Err(Error::TruncationExceeded { max_terms: 5 }));
    }

    #[test]
    fn pochhammer_basics() {
        let p = TruncationPolicy::default();
        let q = C64::new(0.25, 0.1);
        assert_eq!(
            q_pochhammer(C64::new(0.0, 0.0), q, &p).unwrap(),
            C64::new(1.0, 0.0)
        );
        let r = q_pochhammer(q, q, &p).unwrap() / q_pochhammer(q * q, q, &p).unwrap();
        assert!((r - (1.0 - q)).norm() < 1e-14);
        assert!(q_pochhammer(q, C64::new(1.0, 0.0), &p).is_err());
    }

    #[test]
    fn pochhammer_against_long_product() {
        let v = q_pochhammer(C64::new(0.5, 0.0), C64::new(0.25, 0.0), &Default::default()).unwrap();
        let mut direct = 1.0;
        let mut t = 0.5;
        for _ in 0..60 {
            direct *= 1.0 - t;
            t *= 0.25;
        }
        assert!((v.re - direct).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn log_param_half_powers() {
        let a = LogParam::from_value(C64::new(-4.0, 0.0)).unwrap();
        assert!((a.sqrt() - C64::new(0.0, 2.0)).norm() < 1e-15);
        let h = LogParam::additive(C64::new(0.25, 0.0));
        assert!((h.value() - I).norm() < 1e-15);
        assert!((a.mul(&a.inv()).value() - 1.0).norm() < 1e-15);
    }
}
