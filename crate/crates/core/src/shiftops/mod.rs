//! Second-order shift operators
//!
//!   (A f)(z) = v(z) f(z - i a_-) + w(z) f(z + i a_-) + u(z) f(z)
//!
//! In x = e^{2 pi i z} the two shifts are x -> x/q and x -> q x with q = e^{-2 pi a_-}, so
//! one object serves both the z-form and the x-form of every operator.

mod laurent;
mod nd;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub use laurent::{LaurentPoly, LaurentRational};
pub use nd::{
    distance_nd, symmetric_basis_2, symmetric_samples_2, NdFn, NdTestFn, ShiftOperatorND,
};

use crate::error::{Error, Result};
use crate::qcalc::{exp_half, q_pochhammer, r_product, xvar, TruncationPolicy, C64, I};

pub type ZFn = Arc<dyn Fn(C64) -> Result<C64> + Send + Sync>;
pub type TestFn = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

#[derive(Clone)]
pub enum Coefficient {
    Exact(LaurentRational),
    Sampled(ZFn),
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Exact(r) => f.debug_tuple("Exact").field(r).finish(),
            Coefficient::Sampled(_) => f.write_str("Sampled(..)"),
        }
    }
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::Exact(LaurentRational::zero())
    }

    pub fn constant(a: C64) -> Self {
        Coefficient::Exact(LaurentRational::constant(a))
    }

    pub fn sampled(f: impl Fn(C64) -> Result<C64> + Send + Sync + 'static) -> Self {
        Coefficient::Sampled(Arc::new(f))
    }

    pub fn eval(&self, z: C64) -> Result<C64> {
        match self {
            Coefficient::Exact(r) => r.eval(xvar(z)).map_err(|_| Error::pole_at(z)),
            Coefficient::Sampled(f) => f(z),
        }
    }

    pub fn exact(&self) -> Option<&LaurentRational> {
        match self {
            Coefficient::Exact(r) => Some(r),
            Coefficient::Sampled(_) => None,
        }
    }

    pub fn to_sampled(&self) -> Self {
        match self {
            Coefficient::Exact(r) => {
                let r = r.clone();
                Coefficient::sampled(move |z| r.eval(xvar(z)).map_err(|_| Error::pole_at(z)))
            }
            s => s.clone(),
        }
    }

    /// Multiply by a rational function of x.
    pub fn mul_rational(&self, r: &LaurentRational) -> Self {
        match self {
            Coefficient::Exact(a) => Coefficient::Exact(a * r),
            Coefficient::Sampled(f) => {
                let f = f.clone();
                let r = r.clone();
                Coefficient::sampled(move |z| {
                    let m = r.eval(xvar(z)).map_err(|_| Error::pole_at(z))?;
                    Ok(f(z)? * m)
                })
            }
        }
    }

    /// Multiply by an arbitrary function of z; always sampled.
    pub fn mul_fn(&self, g: ZFn) -> Self {
        let f = self.to_sampled();
        let Coefficient::Sampled(f) = f else {
            unreachable!()
        };
        Coefficient::sampled(move |z| Ok(f(z)? * g(z)?))
    }

    pub fn scale(&self, a: C64) -> Self {
        self.mul_rational(&LaurentRational::constant(a))
    }

    pub fn add(&self, o: &Coefficient) -> Self {
        match (self, o) {
            (Coefficient::Exact(a), Coefficient::Exact(b)) => Coefficient::Exact(a + b),
            _ => {
                let (Coefficient::Sampled(f), Coefficient::Sampled(g)) =
                    (self.to_sampled(), o.to_sampled())
                else {
                    unreachable!()
                };
                Coefficient::sampled(move |z| Ok(f(z)? + g(z)?))
            }
        }
    }

    /// c(z + i delta)
    pub fn shift_z(&self, delta: f64) -> Self {
        match self {
            Coefficient::Exact(r) => {
                Coefficient::Exact(r.subs_scale(C64::new((-2.0 * PI * delta).exp(), 0.0)))
            }
            Coefficient::Sampled(f) => {
                let f = f.clone();
                Coefficient::sampled(move |z| f(z + I * delta))
            }
        }
    }
}

/// Gauge factors R_-(z)^m e^{pi i n z}, or the x-form Pochhammer factor (a/x; q)_inf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gauge {
    QuasiPeriodic { m: i32, n: i32 },
    Pochhammer { a: C64 },
}

impl Gauge {
    pub fn r_minus(m: i32) -> Self {
        Gauge::QuasiPeriodic { m, n: 0 }
    }

    pub fn exp(n: i32) -> Self {
        Gauge::QuasiPeriodic { m: 0, n }
    }

    pub fn compose(&self, o: &Gauge) -> Result<Gauge> {
        match (self, o) {
            (Gauge::QuasiPeriodic { m, n }, Gauge::QuasiPeriodic { m: m2, n: n2 }) => {
                Ok(Gauge::QuasiPeriodic {
                    m: m + m2,
                    n: n + n2,
                })
            }
            _ => Err(Error::UnsupportedGauge(
                "only quasi-periodic gauges compose symbolically".into(),
            )),
        }
    }

    /// Value of the gauge function at z, from truncated products.
    pub fn eval(&self, z: C64, a_minus: f64, policy: &TruncationPolicy) -> Result<C64> {
        match *self {
            Gauge::QuasiPeriodic { m, n } => {
                let r = r_product(z, (-PI * a_minus).exp(), policy)?;
                Ok(r.powi(m) * exp_half(z, n))
            }
            Gauge::Pochhammer { a } => {
                let q = (-2.0 * PI * a_minus).exp();
                q_pochhammer(a / xvar(z), C64::new(q, 0.0), policy)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ShiftOperator1D {
    pub v: Coefficient,
    pub w: Coefficient,
    pub u: Coefficient,
    /// Shift size; q = e^{-2 pi a_minus}. Negative values describe x-form equations with |q| > 1.
    pub a_minus: f64,
}

impl ShiftOperator1D {
    pub fn new(v: Coefficient, w: Coefficient, u: Coefficient, a_minus: f64) -> Self {
        Self { v, w, u, a_minus }
    }

    pub fn exact(v: LaurentRational, w: LaurentRational, u: LaurentRational, a_minus: f64) -> Self {
        Self::new(
            Coefficient::Exact(v),
            Coefficient::Exact(w),
            Coefficient::Exact(u),
            a_minus,
        )
    }

    /// Build from a shift modulus q instead of a_minus (q real positive).
    pub fn exact_q(v: LaurentRational, w: LaurentRational, u: LaurentRational, q: f64) -> Self {
        Self::exact(v, w, u, -q.ln() / (2.0 * PI))
    }

    pub fn identity(a_minus: f64) -> Self {
        Self::new(
            Coefficient::zero(),
            Coefficient::zero(),
            Coefficient::constant(C64::new(1.0, 0.0)),
            a_minus,
        )
    }

    pub fn q(&self) -> f64 {
        (-2.0 * PI * self.a_minus).exp()
    }

    /// q^{1/2} = e^{-pi a_-}
    pub fn q_half(&self) -> f64 {
        (-PI * self.a_minus).exp()
    }

    pub fn is_exact(&self) -> bool {
        self.v.exact().is_some() && self.w.exact().is_some() && self.u.exact().is_some()
    }

    /// (v, w, u) when all three are exact.
    pub fn exact_parts(&self) -> Option<(&LaurentRational, &LaurentRational, &LaurentRational)> {
        Some((self.v.exact()?, self.w.exact()?, self.u.exact()?))
    }

    pub fn coefficients_at(&self, z: C64) -> Result<(C64, C64, C64)> {
        Ok((self.v.eval(z)?, self.w.eval(z)?, self.u.eval(z)?))
    }

    pub fn apply(&self, f: &dyn Fn(C64) -> C64, z: C64) -> Result<C64> {
        let (v, w, u) = self.coefficients_at(z)?;
        let s = I * self.a_minus;
        Ok(v * f(z - s) + w * f(z + s) + u * f(z))
    }

    /// Apply to a function of x: v g(x/q) + w g(q x) + u g(x).
    pub fn apply_x(&self, g: &dyn Fn(C64) -> C64, x: C64) -> Result<C64> {
        let (Some(v), Some(w), Some(u)) = (self.v.exact(), self.w.exact(), self.u.exact()) else {
            return Err(Error::InvalidInput(
                "apply_x needs exact coefficients".into(),
            ));
        };
        let q = self.q();
        Ok(v.eval(x)? * g(x / q) + w.eval(x)? * g(x * q) + u.eval(x)? * g(x))
    }

    pub fn to_sampled(&self) -> Self {
        Self::new(
            self.v.to_sampled(),
            self.w.to_sampled(),
            self.u.to_sampled(),
            self.a_minus,
        )
    }

    pub fn scale(&self, a: C64) -> Self {
        Self::new(
            self.v.scale(a),
            self.w.scale(a),
            self.u.scale(a),
            self.a_minus,
        )
    }

    pub fn add_constant(&self, a: C64) -> Self {
        Self::new(
            self.v.clone(),
            self.w.clone(),
            self.u.add(&Coefficient::constant(a)),
            self.a_minus,
        )
    }

    /// Multiply every coefficient by r(x).
    pub fn mul_rational(&self, r: &LaurentRational) -> Self {
        Self::new(
            self.v.mul_rational(r),
            self.w.mul_rational(r),
            self.u.mul_rational(r),
            self.a_minus,
        )
    }

    /// Coefficients read at z + i delta, times `factor`.
    pub fn shift_and_scale(&self, delta: f64, factor: C64) -> Self {
        Self::new(
            self.v.shift_z(delta).scale(factor),
            self.w.shift_z(delta).scale(factor),
            self.u.shift_z(delta).scale(factor),
            self.a_minus,
        )
    }

    /// g^{-1} o A o g for g = R_-(z)^m e^{pi i n z}, using
    /// R_-(z -+ i a_-) = -e^{pi a_-} e^{+-2 pi i z} R_-(z).
    pub fn conjugate_monomial(&self, gauge: &Gauge) -> Result<Self> {
        let Gauge::QuasiPeriodic { m, n } = *gauge else {
            return Err(Error::UnsupportedGauge(
                "monomial conjugation needs R_-^m e^(pi i n z)".into(),
            ));
        };
        let s = self.q_half();
        let (fv, fw) = monomial_factors(m, n, s);
        Ok(Self::new(
            self.v.mul_rational(&fv),
            self.w.mul_rational(&fw),
            self.u.clone(),
            self.a_minus,
        ))
    }

    /// v o A o v^{-1} with v(x) = (a/x; q)_inf, through
    /// v(x)/v(x/q) = 1 - a/x and v(x)/v(qx) = 1/(1 - a/(q x)).
    pub fn conjugate_pochhammer(&self, a: C64) -> Result<Self> {
        let q = self.q();
        if !(q < 1.0) {
            return Err(Error::InvalidModulus(q));
        }
        if a == C64::new(0.0, 0.0) {
            return Ok(self.clone());
        }
        let fv = LaurentRational::poly(LaurentPoly::one_minus(a, -1));
        let fw = LaurentRational::recip_poly(LaurentPoly::one_minus(a / q, -1))?;
        Ok(Self::new(
            self.v.mul_rational(&fv),
            self.w.mul_rational(&fw),
            self.u.clone(),
            self.a_minus,
        ))
    }

    /// g^{-1} o A o g for an arbitrary nonvanishing g(z); result is sampled.
    pub fn conjugate_numeric(&self, g: ZFn) -> Self {
        let s = I * self.a_minus;
        let (g1, g2) = (g.clone(), g.clone());
        let fv: ZFn = Arc::new(move |z| ratio(&g1, z - s, z));
        let fw: ZFn = Arc::new(move |z| ratio(&g2, z + s, z));
        Self::new(
            self.v.mul_fn(fv),
            self.w.mul_fn(fw),
            self.u.to_sampled(),
            self.a_minus,
        )
    }

    /// Conjugation through truncated products of the gauge function itself.
    pub fn conjugate_by_products(&self, gauge: &Gauge, policy: TruncationPolicy) -> Self {
        let a_minus = self.a_minus;
        let gauge = *gauge;
        let g: ZFn = match gauge {
            // v o A o v^{-1} is conjugation by 1/v in the g^{-1} o A o g convention
            Gauge::Pochhammer { .. } => {
                Arc::new(move |z| Ok(gauge.eval(z, a_minus, &policy)?.inv()))
            }
            Gauge::QuasiPeriodic { .. } => Arc::new(move |z| gauge.eval(z, a_minus, &policy)),
        };
        self.conjugate_numeric(g)
    }

    /// Three-term gauge y = u F with u(qx)/u(x) = rho(x): forward times rho(x), backward over rho(x/q).
    pub fn gauge_x(&self, rho: &LaurentRational) -> Result<Self> {
        let back = rho.subs_scale(C64::new(1.0 / self.q(), 0.0)).inv()?;
        Ok(Self::new(
            self.v.mul_rational(&back),
            self.w.mul_rational(rho),
            self.u.clone(),
            self.a_minus,
        ))
    }
}

fn ratio(g: &ZFn, a: C64, b: C64) -> Result<C64> {
    let d = g(b)?;
    if d.norm() == 0.0 {
        return Err(Error::PoleAtShift);
    }
    Ok(g(a)? / d)
}

/// Multipliers of v and w under conjugation by R_-^m e^{pi i n z}, s = e^{-pi a_-}.
pub(crate) fn monomial_factors(m: i32, n: i32, s: f64) -> (LaurentRational, LaurentRational) {
    let base = C64::new(-1.0 / s, 0.0);
    let cv = base.powi(m) * s.powi(-n);
    let cw = base.powi(m) * s.powi(n);
    (
        LaurentRational::monomial(m, cv),
        LaurentRational::monomial(-m, cw),
    )
}

pub fn fourier_mode(k: i32) -> TestFn {
    Arc::new(move |z| xvar(z).powi(k))
}

/// e^{2 pi i k z}, k = -3..3
pub fn standard_basis() -> Vec<TestFn> {
    (-3..=3).map(fourier_mode).collect()
}

/// n points on Im z = 0.1, staggered off the real-axis zeros of 1 - e^{+-4 pi i z}.
pub fn standard_samples(n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| C64::new(-0.5 + (j as f64 + 0.37) / n as f64, 0.1))
        .collect()
}

pub fn distance(
    a: &ShiftOperator1D,
    b: &ShiftOperator1D,
    basis: &[TestFn],
    samples: &[C64],
) -> Result<f64> {
    if basis.is_empty() || samples.is_empty() {
        return Err(Error::InvalidInput("empty basis or sample list".into()));
    }
    let mut worst = 0.0f64;
    for z in samples {
        for f in basis {
            let fa = a.apply(f.as_ref(), *z)?;
            let fb = b.apply(f.as_ref(), *z)?;
            worst = worst.max((fa - fb).norm() / (1.0 + fb.norm()));
        }
    }
    Ok(worst)
}

/// Largest coefficient-wise difference between two exact operators, relative to
/// max(1, |coefficient|). Operators must share a_minus.
pub fn coefficient_discrepancy(a: &ShiftOperator1D, b: &ShiftOperator1D) -> Result<f64> {
    let (Some(pa), Some(pb)) = (a.exact_parts(), b.exact_parts()) else {
        return Err(Error::InvalidInput(
            "coefficient comparison needs exact operators".into(),
        ));
    };
    let pairs = [(pa.0, pb.0), (pa.1, pb.1), (pa.2, pb.2)];
    let mut worst = 0.0f64;
    for (x, y) in pairs {
        worst = worst.max(rational_discrepancy(x, y));
    }
    Ok(worst)
}

/// max_k |[x^k](a.num b.den - b.num a.den)| / max(1, max coefficient).
pub fn rational_discrepancy(a: &LaurentRational, b: &LaurentRational) -> f64 {
    let (a, b) = (a.canonical(), b.canonical());
    let l = a.num() * b.den();
    let r = b.num() * a.den();
    let diff = &l - &r;
    let scale = l.max_abs().max(r.max_abs()).max(1.0);
    diff.max_abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_exact(a_minus: f64) -> ShiftOperator1D {
        let v = LaurentRational::new(
            LaurentPoly::from_coeffs(-1, vec![c(0.3, 0.1), c(1.0, -0.2), c(0.5, 0.0)]),
            LaurentPoly::from_coeffs(0, vec![c(2.0, 0.0), c(0.1, 0.3)]),
        )
        .unwrap();
        let w = LaurentRational::poly(LaurentPoly::from_coeffs(-2, vec![c(0.7, 0.0), c(0.0, 1.1)]));
        let u = LaurentRational::poly(LaurentPoly::from_coeffs(
            -1,
            vec![c(1.0, 0.0), c(-0.4, 0.2), c(0.3, 0.3)],
        ));
        ShiftOperator1D::exact(v, w, u, a_minus)
    }

    #[test]
    fn identity_and_single_shift() {
        let id = ShiftOperator1D::identity(0.5);
        let f = |z: C64| (z * 3.0).sin();
        let z = c(0.2, 0.1);
        assert_eq!(id.apply(&f, z).unwrap(), f(z));
        let back = ShiftOperator1D::new(
            Coefficient::constant(c(1.0, 0.0)),
            Coefficient::zero(),
            Coefficient::zero(),
            0.5,
        );
        let e = fourier_mode(1);
        let want = xvar(z) / back.q();
        assert!((back.apply(e.as_ref(), z).unwrap() - want).norm() < 1e-12);
    }

    #[test]
    fn exact_and_sampled_agree() {
        let op = random_exact(0.5);
        let s = op.to_sampled();
        let d = distance(&op, &s, &standard_basis(), &standard_samples(10)).unwrap();
        assert!(d < 1e-12, "{d}");
        let e2 = fourier_mode(2);
        let z = c(0.31, 0.1);
        assert!(
            (op.apply(e2.as_ref(), z).unwrap() - s.apply(e2.as_ref(), z).unwrap()).norm() < 1e-12
        );
    }

    #[test]
    fn distance_of_perturbation() {
        let op = random_exact(0.5);
        let z = standard_samples(5);
        assert_eq!(distance(&op, &op, &standard_basis(), &z).unwrap(), 0.0);
        let d = distance(&op.add_constant(c(1e-3, 0.0)), &op, &standard_basis(), &z).unwrap();
        assert!(d > 0.0 && d < 1e-2);
        assert!(distance(&op, &op, &[], &z).is_err());
    }

    #[test]
    fn trivial_gauge_is_identity() {
        let op = random_exact(0.5);
        let g = op
            .conjugate_monomial(&Gauge::QuasiPeriodic { m: 0, n: 0 })
            .unwrap();
        assert_eq!(coefficient_discrepancy(&op, &g).unwrap(), 0.0);
        let p = op.conjugate_pochhammer(c(0.0, 0.0)).unwrap();
        assert_eq!(coefficient_discrepancy(&op, &p).unwrap(), 0.0);
        assert!(matches!(
            op.conjugate_monomial(&Gauge::Pochhammer { a: c(1.0, 0.0) }),
            Err(Error::UnsupportedGauge(_))
        ));
    }

    #[test]
    fn gauge_associativity() {
        let op = random_exact(0.45);
        let g1 = Gauge::QuasiPeriodic { m: 2, n: -1 };
        let g2 = Gauge::QuasiPeriodic { m: -1, n: 3 };
        let two = op
            .conjugate_monomial(&g1)
            .unwrap()
            .conjugate_monomial(&g2)
            .unwrap();
        let one = op.conjugate_monomial(&g1.compose(&g2).unwrap()).unwrap();
        assert!(coefficient_discrepancy(&two, &one).unwrap() < 1e-14);
    }

    #[test]
    fn monomial_matches_products() {
        let op = random_exact(0.5);
        let p = TruncationPolicy::default();
        for g in [
            Gauge::QuasiPeriodic { m: 2, n: 0 },
            Gauge::QuasiPeriodic { m: -1, n: 1 },
        ] {
            let sym = op.conjugate_monomial(&g).unwrap();
            let num = op.conjugate_by_products(&g, p);
            let d = distance(&sym, &num, &standard_basis(), &standard_samples(10)).unwrap();
            assert!(d < 1e-9, "{g:?}: {d}");
        }
    }

    #[test]
    fn pochhammer_matches_products() {
        let op = random_exact(0.3);
        let g = Gauge::Pochhammer { a: c(0.4, 0.2) };
        let sym = op.conjugate_pochhammer(c(0.4, 0.2)).unwrap();
        let num = op.conjugate_by_products(&g, TruncationPolicy::default());
        let d = distance(&sym, &num, &standard_basis(), &standard_samples(10)).unwrap();
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn linear_in_f() {
        let op = random_exact(0.5);
        let f = fourier_mode(1);
        let g = fourier_mode(-2);
        let (al, be) = (c(0.3, -1.0), c(2.0, 0.5));
        let z = c(0.12, 0.1);
        let h = |z: C64| al * f(z) + be * g(z);
        let lhs = op.apply(&h, z).unwrap();
        let rhs = al * op.apply(f.as_ref(), z).unwrap() + be * op.apply(g.as_ref(), z).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn shift_and_scale_reads_shifted_point() {
        let op = random_exact(0.5);
        let s = op.shift_and_scale(0.7, c(2.0, 0.0));
        let z = c(0.2, 0.1);
        let (v0, _, u0) = op.coefficients_at(z + I * 0.7).unwrap();
        let (v1, _, u1) = s.coefficients_at(z).unwrap();
        assert!((v1 - 2.0 * v0).norm() < 1e-12 * v0.norm().max(1.0));
        assert!((u1 - 2.0 * u0).norm() < 1e-12 * u0.norm().max(1.0));
    }

    #[test]
    fn x_gauge_solution_map() {
        // y = x^2 F: rho = q^2
        let op = random_exact(0.4);
        let q = op.q();
        let g = op
            .gauge_x(&LaurentRational::constant(c(q * q, 0.0)))
            .unwrap();
        let fx = |x: C64| x.powi(3) + 0.5;
        let y = |x: C64| x * x * fx(x);
        let x = c(0.8, 0.3);
        let lhs = op.apply_x(&y, x).unwrap();
        let rhs = g.apply_x(&fx, x).unwrap() * x * x;
        assert!(
            (lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0),
            "{lhs} {rhs}"
        );
    }
}
