//! Laurent polynomials and rational functions in x = e^{2 pi i z}.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::qcalc::{C64, I};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// sum_k c[k] x^{low + k}
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaurentPoly {
    low: i32,
    c: Vec<C64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(a: C64) -> Self {
        Self::monomial(0, a)
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn monomial(k: i32, a: C64) -> Self {
        Self { low: k, c: vec![a] }.trimmed()
    }

    pub fn from_coeffs(low: i32, c: Vec<C64>) -> Self {
        Self { low, c }.trimmed()
    }

    /// x - r
    pub fn linear(r: C64) -> Self {
        Self::from_coeffs(0, vec![-r, C64::new(1.0, 0.0)])
    }

    /// prod (x - r_i)
    pub fn from_roots(roots: &[C64]) -> Self {
        roots
            .iter()
            .fold(Self::one(), |acc, r| &acc * &Self::linear(*r))
    }

    /// 1 - a x^k
    pub fn one_minus(a: C64, k: i32) -> Self {
        &Self::one() - &Self::monomial(k, a)
    }

    fn trimmed(mut self) -> Self {
        while self.c.last() == Some(&ZERO) {
            self.c.pop();
        }
        let lead = self.c.iter().take_while(|v| **v == ZERO).count();
        if lead == self.c.len() {
            return Self::default();
        }
        self.c.drain(..lead);
        self.low += lead as i32;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn low(&self) -> i32 {
        self.low
    }

    pub fn high(&self) -> i32 {
        self.low + self.c.len() as i32 - 1
    }

    pub fn coeff(&self, k: i32) -> C64 {
        let i = k - self.low;
        if i < 0 || i as usize >= self.c.len() {
            ZERO
        } else {
            self.c[i as usize]
        }
    }

    /// (power, coefficient) pairs, lowest first.
    pub fn terms(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.c
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.low + i as i32, *v))
    }

    pub fn leading(&self) -> C64 {
        self.c.last().copied().unwrap_or(ZERO)
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            low: self.low,
            c: self.c.iter().map(|v| v * a).collect(),
        }
        .trimmed()
    }

    /// Multiply by x^k.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            low: self.low + k,
            c: self.c.clone(),
        }
    }

    pub fn eval(&self, x: C64) -> C64 {
        if self.c.is_empty() {
            return ZERO;
        }
        let h = self.c.iter().rev().fold(ZERO, |acc, v| acc * x + v);
        h * x.powi(self.low)
    }

    /// sum |c_k| |x|^k, the scale of the terms that cancel inside eval.
    pub fn eval_abs(&self, x: C64) -> f64 {
        let r = x.norm();
        self.terms().map(|(k, v)| v.norm() * r.powi(k)).sum()
    }

    /// p(s x)
    pub fn subs_scale(&self, s: C64) -> Self {
        Self {
            low: self.low,
            c: self.terms().map(|(k, v)| v * s.powi(k)).collect(),
        }
        .trimmed()
    }

    /// d/dx
    pub fn derivative(&self) -> Self {
        Self {
            low: self.low - 1,
            c: self.terms().map(|(k, v)| v * k as f64).collect(),
        }
        .trimmed()
    }

    /// p(1/x)
    pub fn reflect(&self) -> Self {
        let mut c = self.c.clone();
        c.reverse();
        Self {
            low: -self.high(),
            c,
        }
    }

    /// Synthetic division by (x - r); returns quotient and remainder value p(r).
    pub fn deflate(&self, r: C64) -> (Self, C64) {
        if self.c.is_empty() {
            return (Self::zero(), ZERO);
        }
        // work on the polynomial part x^{-low} p
        let n = self.c.len();
        let mut q = vec![ZERO; n.saturating_sub(1)];
        let mut acc = ZERO;
        for i in (0..n).rev() {
            acc = acc * r + self.c[i];
            if i > 0 {
                q[i - 1] = acc;
            }
        }
        (Self::from_coeffs(self.low, q), acc * r.powi(self.low))
    }

    /// Division with remainder, self = q d + rem, treating both as x-power-shifted polynomials.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::InvalidInput("division by zero polynomial".into()));
        }
        let mut r = self.c.clone();
        let dn = d.c.len();
        if r.len() < dn {
            return Ok((Self::zero(), self.clone()));
        }
        let lead = d.leading();
        let mut q = vec![ZERO; r.len() - dn + 1];
        for i in (0..q.len()).rev() {
            let f = r[i + dn - 1] / lead;
            q[i] = f;
            for j in 0..dn {
                r[i + j] -= f * d.c[j];
            }
        }
        r.truncate(dn - 1);
        Ok((
            Self::from_coeffs(self.low - d.low, q),
            Self::from_coeffs(self.low, r),
        ))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.high().max(o.high());
        let c = (low..=high).map(|k| self.coeff(k) + o.coeff(k)).collect();
        LaurentPoly::from_coeffs(low, c)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: &LaurentPoly) -> LaurentPoly {
        self + &(-o)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            low: self.low,
            c: self.c.iter().map(|v| -v).collect(),
        }
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || o.is_zero() {
            return LaurentPoly::zero();
        }
        let mut c = vec![ZERO; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        LaurentPoly::from_coeffs(self.low + o.low, c)
    }
}

/// num / den, both Laurent polynomials in x.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentRational {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl LaurentRational {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    pub fn poly(p: LaurentPoly) -> Self {
        Self {
            num: p,
            den: LaurentPoly::one(),
        }
    }

    pub fn constant(a: C64) -> Self {
        Self::poly(LaurentPoly::constant(a))
    }

    pub fn zero() -> Self {
        Self::poly(LaurentPoly::zero())
    }

    pub fn one() -> Self {
        Self::poly(LaurentPoly::one())
    }

    pub fn monomial(k: i32, a: C64) -> Self {
        Self::poly(LaurentPoly::monomial(k, a))
    }

    pub fn num(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn den(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// 1 / p
    pub fn recip_poly(p: LaurentPoly) -> Result<Self> {
        Self::new(LaurentPoly::one(), p)
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            num: self.num.scale(a),
            den: self.den.clone(),
        }
    }

    pub fn mul_poly(&self, p: &LaurentPoly) -> Self {
        Self {
            num: &self.num * p,
            den: self.den.clone(),
        }
    }

    pub fn div_poly(&self, p: &LaurentPoly) -> Result<Self> {
        Self::new(self.num.clone(), &self.den * p)
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }

    pub fn subs_scale(&self, s: C64) -> Self {
        Self {
            num: self.num.subs_scale(s),
            den: self.den.subs_scale(s),
        }
    }

    pub fn reflect(&self) -> Self {
        Self {
            num: self.num.reflect(),
            den: self.den.reflect(),
        }
    }

    /// Shift the denominator to start at x^0 and make its top coefficient 1.
    pub fn canonical(&self) -> Self {
        let k = -self.den.low();
        let lead = self.den.leading();
        Self {
            num: self.num.shift(k).scale(lead.inv()),
            den: self.den.shift(k).scale(lead.inv()),
        }
    }

    pub fn eval(&self, x: C64) -> Result<C64> {
        let d = self.den.eval(x);
        if d.norm() <= 1e-8 * self.den.eval_abs(x) {
            let z = x.ln() / (2.0 * PI * I);
            return Err(Error::pole_at(z));
        }
        Ok(self.num.eval(x) / d)
    }

    /// Scale of the numerator terms over |den|, used for cancellation estimates.
    pub fn eval_abs_bound(&self, x: C64) -> f64 {
        self.num.eval_abs(x) / self.den.eval(x).norm()
    }

    /// Remove a common linear factor (x - r) from numerator and denominator.
    pub fn cancel_root(&self, r: C64, tol: f64) -> Result<Self> {
        let (nq, nr) = self.num.deflate(r);
        let (dq, dr) = self.den.deflate(r);
        let scale_n = self.num.eval_abs(r).max(f64::MIN_POSITIVE);
        let scale_d = self.den.eval_abs(r).max(f64::MIN_POSITIVE);
        if nr.norm() > tol * scale_n || dr.norm() > tol * scale_d {
            return Err(Error::InvalidInput(format!(
                "x - ({r}) is not a common factor (remainders {:.3e}, {:.3e})",
                nr.norm() / scale_n,
                dr.norm() / scale_d
            )));
        }
        Ok(Self { num: nq, den: dq })
    }

    /// Exact quotient when the denominator divides the numerator.
    pub fn to_poly(&self, tol: f64) -> Result<LaurentPoly> {
        let (q, r) = self.num.div_rem(&self.den)?;
        let scale = self.num.max_abs().max(f64::MIN_POSITIVE);
        if r.max_abs() > tol * scale {
            return Err(Error::InvalidInput(format!(
                "denominator does not divide numerator (relative remainder {:.3e})",
                r.max_abs() / scale
            )));
        }
        Ok(q)
    }
}

impl Add for &LaurentRational {
    type Output = LaurentRational;
    fn add(self, o: &LaurentRational) -> LaurentRational {
        if self.den == o.den {
            return LaurentRational {
                num: &self.num + &o.num,
                den: self.den.clone(),
            };
        }
        if o.den == LaurentPoly::one() {
            return LaurentRational {
                num: &self.num + &(&o.num * &self.den),
                den: self.den.clone(),
            };
        }
        if self.den == LaurentPoly::one() {
            return o + self;
        }
        LaurentRational {
            num: &(&self.num * &o.den) + &(&o.num * &self.den),
            den: &self.den * &o.den,
        }
    }
}

impl Sub for &LaurentRational {
    type Output = LaurentRational;
    fn sub(self, o: &LaurentRational) -> LaurentRational {
        self + &(-o)
    }
}

impl Neg for &LaurentRational {
    type Output = LaurentRational;
    fn neg(self) -> LaurentRational {
        LaurentRational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &LaurentRational {
    type Output = LaurentRational;
    fn mul(self, o: &LaurentRational) -> LaurentRational {
        LaurentRational {
            num: &self.num * &o.num,
            den: &self.den * &o.den,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> LaurentPoly {
        LaurentPoly::from_coeffs(
            -2,
            vec![c(1.0, 0.5), c(0.0, 0.0), c(-2.0, 1.0), c(0.3, 0.0)],
        )
    }

    #[test]
    fn trim_and_degrees() {
        let p = LaurentPoly::from_coeffs(-1, vec![c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!((p.low(), p.high()), (0, 0));
        assert!(LaurentPoly::from_coeffs(3, vec![c(0.0, 0.0)]).is_zero());
    }

    #[test]
    fn eval_is_multiplicative() {
        let p = sample();
        let q = LaurentPoly::from_coeffs(-1, vec![c(0.2, -1.0), c(1.0, 0.0)]);
        let x = c(0.7, 0.4);
        let lhs = (&p * &q).eval(x);
        assert!((lhs - p.eval(x) * q.eval(x)).norm() < 1e-13);
        assert!(((&p + &q).eval(x) - p.eval(x) - q.eval(x)).norm() < 1e-13);
    }

    #[test]
    fn substitutions() {
        let p = sample();
        let x = c(0.9, -0.3);
        let s = c(0.5, 0.2);
        assert!((p.subs_scale(s).eval(x) - p.eval(s * x)).norm() < 1e-13);
        assert!((p.reflect().eval(x) - p.eval(x.inv())).norm() < 1e-13);
    }

    #[test]
    fn deflate_and_divide() {
        let roots = [c(1.0, 1.0), c(-0.5, 0.2), c(2.0, 0.0)];
        let p = LaurentPoly::from_roots(&roots).shift(-1);
        let (q, r) = p.deflate(roots[1]);
        assert!(r.norm() < 1e-14);
        let x = c(0.3, 0.8);
        assert!((q.eval(x) * (x - roots[1]) - p.eval(x)).norm() < 1e-13);
        let d = LaurentPoly::from_roots(&roots[..2]);
        let (qq, rr) = p.div_rem(&d).unwrap();
        assert!(rr.max_abs() < 1e-14);
        assert!((qq.eval(x) * d.eval(x) - p.eval(x)).norm() < 1e-13);
    }

    #[test]
    fn rational_cancel_and_canonical() {
        let a = c(0.4, -0.7);
        let num = LaurentPoly::from_roots(&[a, c(1.0, 0.0)]);
        let den = &LaurentPoly::from_roots(&[a]) * &LaurentPoly::monomial(-1, c(3.0, 0.0));
        let r = LaurentRational::new(num, den).unwrap();
        let s = r.cancel_root(a, 1e-12).unwrap();
        let x = c(0.2, 0.1);
        assert!((s.eval(x).unwrap() - r.eval(x).unwrap()).norm() < 1e-13);
        let p = s.to_poly(1e-12).unwrap();
        assert!((p.eval(x) - r.eval(x).unwrap()).norm() < 1e-13);
        let k = r.canonical();
        assert_eq!(k.den().low(), 0);
        assert!((k.den().leading() - 1.0).norm() < 1e-15);
        assert!(r.cancel_root(c(5.0, 0.0), 1e-12).is_err());
    }

    #[test]
    fn pole_detection() {
        let r = LaurentRational::recip_poly(LaurentPoly::linear(c(1.0, 0.0))).unwrap();
        assert!(matches!(
            r.eval(c(1.0, 0.0)),
            Err(Error::CoefficientPole { .. })
        ));
    }
}
