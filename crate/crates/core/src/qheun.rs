//! The q-Heun equation
//!
//!   (x - h1 q^1/2)(x - h2 q^1/2) g(x/q) + l3 l4 (x - l1 q^-1/2)(x - l2 q^-1/2) g(qx)
//!     - {(l3 + l4) x^2 + E x + K} g(x) = 0,   K = (l1 l2 l3 l4 h1 h2)^1/2 (h3^1/2 + h3^-1/2),
//!
//! its polynomial solutions, and its q -> 1 limit to a Fuchsian equation of Heun type.

use serde::{Deserialize, Serialize};

use crate::cascade::xform;
use crate::error::{Error, Result};
use crate::qcalc::{LogParam, C64};
use crate::shiftops::{LaurentPoly, LaurentRational, ShiftOperator1D};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QHeunParams {
    /// Real, positive, not 1.
    pub q: f64,
    pub h: [LogParam; 3],
    pub l: [LogParam; 4],
    #[serde(default)]
    pub e: C64,
}

impl QHeunParams {
    pub fn from_values(q: f64, h: [C64; 3], l: [C64; 4], e: C64) -> Result<Self> {
        let lg = |v: C64| LogParam::from_value(v);
        Ok(Self {
            q,
            h: [lg(h[0])?, lg(h[1])?, lg(h[2])?],
            l: [lg(l[0])?, lg(l[1])?, lg(l[2])?, lg(l[3])?],
            e,
        })
    }

    fn check(&self) -> Result<()> {
        if !(self.q > 0.0) || self.q == 1.0 || !self.q.is_finite() {
            return Err(Error::InvalidModulus(self.q));
        }
        Ok(())
    }

    pub fn hv(&self, i: usize) -> C64 {
        self.h[i].value()
    }

    pub fn lv(&self, i: usize) -> C64 {
        self.l[i].value()
    }

    /// Constant term K, built from half-sums of logarithms.
    pub fn k(&self) -> C64 {
        xform::fourth_k(&self.h, &self.l)
    }
}

/// x times the fourth-stage x-form, with E folded into the center coefficient.
pub fn build_qheun(p: &QHeunParams) -> Result<ShiftOperator1D> {
    p.check()?;
    let x = LaurentRational::monomial(1, c(1.0));
    Ok(xform::fourth(p.q, &p.h, &p.l)
        .add_constant(-p.e)
        .mul_rational(&x))
}

/// Terms of the three-term recurrence for g = sum c_k x^k:
/// A_{k-1} c_{k-1} + (B_k - E) c_k + C_{k+1} c_{k+1} = 0 at x^{k+1}.
#[derive(Debug, Clone, Copy)]
struct Recurrence<'a>(&'a QHeunParams);

impl Recurrence<'_> {
    fn a(&self, k: i32) -> C64 {
        let p = self.0;
        let qk = p.q.powi(k);
        (1.0 - p.lv(2) * qk) * (1.0 - p.lv(3) * qk) / qk
    }

    fn b(&self, k: i32) -> C64 {
        let p = self.0;
        let (s, qk) = (p.q.sqrt(), p.q.powi(k));
        -(p.hv(0) + p.hv(1)) * s / qk - p.lv(2) * p.lv(3) * (p.lv(0) + p.lv(1)) / s * qk
    }

    fn c(&self, k: i32) -> C64 {
        let p = self.0;
        let qk = p.q.powi(k);
        p.hv(0) * p.hv(1) * p.q / qk + p.lv(0) * p.lv(1) * p.lv(2) * p.lv(3) / p.q * qk - p.k()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalExponents {
    /// q-exponents lambda = q^rho with g ~ x^rho at x = 0.
    pub zero: [C64; 2],
    /// lambda with g ~ x^rho, lambda = q^rho, at x = infinity.
    pub infinity: [C64; 2],
    pub resonant_zero: bool,
    pub resonant_infinity: bool,
}

fn quadratic(a: C64, b: C64, c0: C64) -> [C64; 2] {
    let d = (b * b - 4.0 * a * c0).sqrt();
    let (r1, r2) = ((-b + d) / (2.0 * a), (-b - d) / (2.0 * a));
    // avoid cancellation in the smaller root
    if r1.norm() >= r2.norm() && r1.norm() > 0.0 {
        [r1, c0 / (a * r1)]
    } else if r2.norm() > 0.0 {
        [c0 / (a * r2), r2]
    } else {
        [r1, r2]
    }
}

fn resonant(l1: C64, l2: C64, q: f64) -> bool {
    let r = l1 / l2;
    let n = (r.norm().ln() / q.ln()).round();
    (r - c(q.powf(n))).norm() < 1e-9 * r.norm().max(1.0)
}

/// Dominant balances at 0 and infinity for trial solutions x^rho.
pub fn local_exponents(p: &QHeunParams) -> Result<LocalExponents> {
    p.check()?;
    let q = p.q;
    let l4p = p.lv(0) * p.lv(1) * p.lv(2) * p.lv(3);
    // l1 l2 l3 l4 q^-1 lambda^2 - K lambda + h1 h2 q = 0
    let zero = quadratic(l4p / q, -p.k(), p.hv(0) * p.hv(1) * q);
    // l3 l4 lambda^2 - (l3 + l4) lambda + 1 = 0
    let infinity = [p.lv(2).inv(), p.lv(3).inv()];
    Ok(LocalExponents {
        zero,
        infinity,
        resonant_zero: resonant(zero[0], zero[1], q),
        resonant_infinity: resonant(infinity[0], infinity[1], q),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub degree: usize,
    /// Lowest power j of the polynomial solutions sum_{k=j}^d c_k x^k.
    pub lowest_power: usize,
    /// q^-d (1 - l3 q^d)(1 - l4 q^d), must vanish.
    pub top_constraint: C64,
    /// h1 h2 q^{1-j} + l1 l2 l3 l4 q^{j-1} - K, must vanish.
    pub bottom_constraint: C64,
    pub energies: Vec<C64>,
}

/// Values of E admitting a polynomial solution of degree d.
pub fn polynomial_spectrum(p: &QHeunParams, d: usize) -> Result<Spectrum> {
    p.check()?;
    let rec = Recurrence(p);
    let di = d as i32;
    let top = rec.a(di);
    let tol = 1e-10;
    let scale_a = 1.0 + p.lv(2).norm() + p.lv(3).norm() + p.q.powi(-di);
    if top.norm() > tol * scale_a {
        return Err(Error::NoPolynomialSector(format!(
            "q^-{d}(1 - l3 q^{d})(1 - l4 q^{d}) = {top}, needs l3 or l4 = q^-{d}"
        )));
    }
    let bottom_scale = |j: i32| {
        1.0 + (p.hv(0) * p.hv(1)).norm() * p.q.powi(1 - j)
            + (p.lv(0) * p.lv(1) * p.lv(2) * p.lv(3)).norm() * p.q.powi(j - 1)
            + p.k().norm()
    };
    let j = (0..=di)
        .find(|&j| rec.c(j).norm() <= tol * bottom_scale(j))
        .ok_or_else(|| {
            Error::NoPolynomialSector(format!(
                "no j in 0..={d} with h1 h2 q^(1-j) + l1 l2 l3 l4 q^(j-1) = K (C_0 = {})",
                rec.c(0)
            ))
        })?;
    // characteristic polynomial of the tridiagonal block k = j..d, as a polynomial in E
    let mut prev: Vec<C64> = vec![c(1.0)];
    let mut cur: Vec<C64> = vec![rec.b(j), c(-1.0)];
    for k in j + 1..=di {
        let off = rec.a(k - 1) * rec.c(k);
        let mut next = vec![ZERO; cur.len() + 1];
        for (i, v) in cur.iter().enumerate() {
            next[i] += v * rec.b(k);
            next[i + 1] -= v;
        }
        for (i, v) in prev.iter().enumerate() {
            next[i] -= v * off;
        }
        prev = cur;
        cur = next;
    }
    let mut energies = poly_roots(&cur)?;
    energies.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(Spectrum {
        degree: d,
        lowest_power: j as usize,
        top_constraint: top,
        bottom_constraint: rec.c(j),
        energies,
    })
}

/// Coefficients c_j..c_d (c_d = 1) of the polynomial solution for an eigenvalue E,
/// by back substitution through the recurrence.
pub fn polynomial_solution(p: &QHeunParams, spec: &Spectrum, e: C64) -> Result<LaurentPoly> {
    let rec = Recurrence(p);
    let (j, d) = (spec.lowest_power as i32, spec.degree as i32);
    let n = (d - j + 1) as usize;
    let mut cs = vec![ZERO; n + 1];
    cs[n - 1] = c(1.0);
    for k in (j + 1..=d).rev() {
        let i = (k - j) as usize;
        let a = rec.a(k - 1);
        if a.norm() == 0.0 {
            return Err(Error::InvalidInput(format!("recurrence breaks at k = {k}")));
        }
        let above = if i + 1 < n {
            rec.c(k + 1) * cs[i + 1]
        } else {
            ZERO
        };
        cs[i - 1] = -((rec.b(k) - e) * cs[i] + above) / a;
    }
    cs.truncate(n);
    Ok(LaurentPoly::from_coeffs(j, cs))
}

/// The q-Heun operator applied to a polynomial, as a Laurent polynomial.
pub fn apply_to_poly(p: &QHeunParams, g: &LaurentPoly) -> Result<LaurentPoly> {
    let op = build_qheun(p)?;
    let (v, w, u) = op.exact_parts().expect("q-Heun operator is exact");
    let poly = |r: &LaurentRational| r.to_poly(1e-14);
    let q = c(p.q);
    Ok(
        &(&(&poly(v)? * &g.subs_scale(q.inv())) + &(&poly(w)? * &g.subs_scale(q)))
            + &(&poly(u)? * g),
    )
}

/// Roots of sum c[k] E^k (Aberth iteration with Newton polish).
pub fn poly_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    let mut c: Vec<C64> = coeffs.to_vec();
    while c.last().is_some_and(|v| v.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let c: Vec<C64> = c.iter().map(|v| v / lead).collect();
    let eval = |x: C64| -> (C64, C64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for v in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + v;
        }
        (p, dp)
    };
    let radius = 1.0 + c[..n].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            C64::from_polar(
                radius * 0.5,
                2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4,
            )
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let rep: C64 = (0..n)
                .filter(|&k| k != i)
                .map(|k| (z[i] - z[k]).inv())
                .sum();
            let step = ratio / (1.0 - ratio * rep);
            z[i] -= step;
            moved = moved.max(step.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() == 0.0 || p.norm() == 0.0 {
                break;
            }
            *zi -= p / dp;
        }
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalOverflow("root iteration diverged".into()));
    }
    Ok(z)
}

/// Random continuum parameters with |t1|, |t2| in [0.8, 1.6], |t1 - t2| > 0.5,
/// exponent parameters in [-0.5, 0.5] + i[-0.25, 0.25].
pub fn sample_continuum<R: rand::Rng + ?Sized>(rng: &mut R, eps: f64) -> ContinuumParams {
    let mut t = || C64::from_polar(rng.gen_range(0.8..1.6), rng.gen_range(-3.0..3.0));
    let (t1, mut t2) = (t(), t());
    while (t1 - t2).norm() < 0.5 {
        t2 = t();
    }
    let mut x = || C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.25..0.25));
    let h = [x(), x(), x()];
    let l = [x(), x(), x(), x()];
    ContinuumParams::new(t1, t2, h, l, x(), eps)
}

/// A point at distance at least 0.3 from 0, t1 and t2.
pub fn probe_point(cp: &ContinuumParams) -> C64 {
    let cands = [
        C64::new(0.4, 0.7),
        C64::new(-0.6, 0.5),
        C64::new(0.5, -0.6),
        C64::new(-0.5, -0.45),
    ];
    let gap = |x: &C64| {
        [ZERO, cp.t1, cp.t2]
            .iter()
            .map(|s| (x - s).norm())
            .fold(f64::INFINITY, f64::min)
    };
    *cands
        .iter()
        .max_by(|a, b| gap(a).total_cmp(&gap(b)))
        .expect("nonempty")
}

/// Parameters of the q = 1 + eps rewriting: multiplicative h1 -> t1 q^{h1}, l1 -> t1 q^{l1},
/// h2 -> t2 q^{h2}, l2 -> t2 q^{l2}, l3 -> q^{l3}, l4 -> q^{l4}, h3 -> q^{h3}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumParams {
    pub t1: C64,
    pub t2: C64,
    pub h: [C64; 3],
    pub l: [C64; 4],
    pub e1: C64,
    pub e_tilde: C64,
    pub eps: f64,
}

impl ContinuumParams {
    pub fn new(t1: C64, t2: C64, h: [C64; 3], l: [C64; 4], e_tilde: C64, eps: f64) -> Self {
        let e1 = (l[2] + l[3]) * (t1 + t2) + (l[0] + h[0]) * t1 + (l[1] + h[1]) * t2;
        Self {
            t1,
            t2,
            h,
            l,
            e1,
            e_tilde,
            eps,
        }
    }

    pub fn with_eps(&self, eps: f64) -> Self {
        Self { eps, ..*self }
    }

    /// l~ = l1 + l2 + l3 + l4 - h1 - h2
    pub fn l_tilde(&self) -> C64 {
        self.l.iter().sum::<C64>() - self.h[0] - self.h[1]
    }

    pub fn b_tilde(&self) -> C64 {
        let (h, l) = (self.h, self.l);
        let bracket = |hn: C64, ln: C64| hn * hn + (l[2] + l[3] + ln - 1.0).powi(2) - 0.5;
        self.e_tilde - self.t1 / 2.0 * bracket(h[0], l[0]) - self.t2 / 2.0 * bracket(h[1], l[1])
    }

    /// The q-Heun parameters at q = 1 + eps.
    pub fn to_qheun(&self) -> Result<QHeunParams> {
        let lq = (1.0 + self.eps).ln();
        let (t1, t2) = (
            LogParam::from_value(self.t1)?,
            LogParam::from_value(self.t2)?,
        );
        let at =
            |t: Option<&LogParam>, e: C64| LogParam::from_log(t.map_or(ZERO, |t| t.log) + e * lq);
        let eps = self.eps;
        Ok(QHeunParams {
            q: 1.0 + eps,
            h: [
                at(Some(&t1), self.h[0]),
                at(Some(&t2), self.h[1]),
                at(None, self.h[2]),
            ],
            l: [
                at(Some(&t1), self.l[0]),
                at(Some(&t2), self.l[1]),
                at(None, self.l[2]),
                at(None, self.l[3]),
            ],
            e: -(2.0 * (self.t1 + self.t2) + eps * self.e1 + eps * eps * self.e_tilde),
        })
    }

    /// x^2 (x - t1)(x - t2), the g'' coefficient.
    pub fn p2(&self) -> LaurentPoly {
        LaurentPoly::from_roots(&[ZERO, ZERO, self.t1, self.t2])
    }

    pub fn p1(&self) -> LaurentPoly {
        let (h, l, t1, t2) = (self.h, self.l, self.t1, self.t2);
        let x = LaurentPoly::monomial(1, c(1.0));
        let a = &(&x * &LaurentPoly::linear(t1)).scale(1.0 + h[1] - l[1])
            + &(&x * &LaurentPoly::linear(t2)).scale(1.0 + h[0] - l[0]);
        let b = (&LaurentPoly::linear(t1) * &LaurentPoly::linear(t2)).scale(self.l_tilde() - 1.0);
        &(&a + &b) * &x
    }

    pub fn p0(&self) -> LaurentPoly {
        let lt = self.l_tilde();
        let h3 = self.h[2];
        let c0 = self.t1 * self.t2 * (lt / 2.0 - 1.0 + h3 / 2.0) * (lt / 2.0 - 1.0 - h3 / 2.0);
        LaurentPoly::from_coeffs(0, vec![c0, self.b_tilde(), self.l[2] * self.l[3]])
    }

    fn check(&self) -> Result<()> {
        if self.t1.norm() == 0.0 || self.t2.norm() == 0.0 {
            return Err(Error::InvalidInput("t1 and t2 must be nonzero".into()));
        }
        if (self.t1 - self.t2).norm() < 1e-12 * self.t1.norm() {
            return Err(Error::ConfluentSingularities);
        }
        Ok(())
    }
}

/// Fuchsian operator P2 f'' + P1 f' + P0 f at x.
pub fn fuchs_apply(cp: &ContinuumParams, f: &LaurentPoly, x: C64) -> C64 {
    let f1 = f.derivative();
    let f2 = f1.derivative();
    cp.p2().eval(x) * f2.eval(x) + cp.p1().eval(x) * f1.eval(x) + cp.p0().eval(x) * f.eval(x)
}

/// eps^-2 (q-Heun operator at q = 1 + eps applied to f) minus the Fuchsian operator applied to f.
pub fn continuum_residual(cp: &ContinuumParams, f: &LaurentPoly, x: C64) -> Result<C64> {
    cp.check()?;
    for s in [ZERO, cp.t1, cp.t2] {
        if (x - s).norm() < 1e-12 * (1.0 + s.norm()) {
            return Err(Error::SingularPoint { re: s.re, im: s.im });
        }
    }
    if !(cp.eps.abs() > 0.0) {
        return Err(Error::InvalidInput("eps must be nonzero".into()));
    }
    let op = build_qheun(&cp.to_qheun()?)?;
    let lhs = op.apply_x(&|y| f.eval(y), x)?;
    Ok(lhs / (cp.eps * cp.eps) - fuchs_apply(cp, f, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannScheme {
    pub zero: [C64; 2],
    pub t1: [C64; 2],
    pub t2: [C64; 2],
    pub infinity: [C64; 2],
    /// Largest mismatch between these exponents and the indicial roots of the Fuchsian operator.
    pub indicial_residual: f64,
}

impl RiemannScheme {
    pub fn all(&self) -> [C64; 8] {
        [
            self.zero[0],
            self.zero[1],
            self.t1[0],
            self.t1[1],
            self.t2[0],
            self.t2[1],
            self.infinity[0],
            self.infinity[1],
        ]
    }
}

/// Indicial roots at a finite point s where P2 vanishes to order `m` (1 or 2).
pub fn indicial_roots(cp: &ContinuumParams, s: C64, m: usize) -> [C64; 2] {
    let mut p2 = cp.p2();
    for _ in 0..m {
        p2 = p2.deflate(s).0;
    }
    let mut p1 = cp.p1();
    for _ in 1..m {
        p1 = p1.deflate(s).0;
    }
    let den = p2.eval(s);
    let pp = p1.eval(s) / den;
    let rr = if m == 2 { cp.p0().eval(s) / den } else { ZERO };
    quadratic(c(1.0), pp - 1.0, rr)
}

/// Indicial roots at infinity for g ~ x^-rho.
pub fn indicial_roots_infinity(cp: &ContinuumParams) -> [C64; 2] {
    let (p2, p1, p0) = (cp.p2(), cp.p1(), cp.p0());
    let lead = p2.coeff(4);
    let pinf = p1.coeff(3) / lead;
    let rinf = p0.coeff(2) / lead;
    // rho (rho + 1) - pinf rho + rinf = 0
    quadratic(c(1.0), 1.0 - pinf, rinf)
}

fn pair_mismatch(a: [C64; 2], b: [C64; 2]) -> f64 {
    let straight = (a[0] - b[0]).norm().max((a[1] - b[1]).norm());
    let crossed = (a[0] - b[1]).norm().max((a[1] - b[0]).norm());
    straight.min(crossed)
}

pub fn riemann_scheme(cp: &ContinuumParams) -> Result<RiemannScheme> {
    cp.check()?;
    let (h, l) = (cp.h, cp.l);
    let lt = cp.l_tilde();
    let mut rs = RiemannScheme {
        zero: [1.0 - lt / 2.0 + h[2] / 2.0, 1.0 - lt / 2.0 - h[2] / 2.0],
        t1: [ZERO, l[0] - h[0]],
        t2: [ZERO, l[1] - h[1]],
        infinity: [l[2], l[3]],
        indicial_residual: 0.0,
    };
    let checks = [
        (rs.zero, indicial_roots(cp, ZERO, 2)),
        (rs.t1, indicial_roots(cp, cp.t1, 1)),
        (rs.t2, indicial_roots(cp, cp.t2, 1)),
        (rs.infinity, indicial_roots_infinity(cp)),
    ];
    rs.indicial_residual = checks
        .iter()
        .map(|(a, b)| pair_mismatch(*a, *b))
        .fold(0.0, f64::max);
    if rs.indicial_residual > 1e-10 {
        return Err(Error::ConstraintViolated(format!(
            "closed-form exponents differ from indicial roots by {:.3e}",
            rs.indicial_residual
        )));
    }
    Ok(rs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeunParams {
    pub t: C64,
    pub gamma: C64,
    pub delta: C64,
    pub epsilon: C64,
    pub alpha: C64,
    pub beta: C64,
    pub accessory: C64,
}

impl HeunParams {
    /// y'' + (gamma/z + delta/(z-1) + epsilon/(z-t)) y' + (alpha beta z - accessory)/(z(z-1)(z-t)) y
    pub fn apply(&self, y: &LaurentPoly, z: C64) -> C64 {
        let y1 = y.derivative();
        let y2 = y1.derivative();
        let first = self.gamma / z + self.delta / (z - 1.0) + self.epsilon / (z - self.t);
        let pot = (self.alpha * self.beta * z - self.accessory) / (z * (z - 1.0) * (z - self.t));
        y2.eval(z) + first * y1.eval(z) + pot * y.eval(z)
    }
}

/// Heun form after x = t1 z and g = x^sigma y, sigma = 1 - l~/2 - h3/2.
pub fn heun_normal_form(cp: &ContinuumParams) -> Result<HeunParams> {
    riemann_scheme(cp)?;
    let (h, l) = (cp.h, cp.l);
    let lt = cp.l_tilde();
    let sigma = 1.0 - lt / 2.0 - h[2] / 2.0;
    // x^-sigma L x^sigma: the g-coefficient becomes sigma(sigma-1) P2/x^2 + sigma P1/x + P0
    let n = &(&cp.p2().shift(-2).scale(sigma * (sigma - 1.0)) + &cp.p1().shift(-1).scale(sigma))
        + &cp.p0();
    let scale = 1.0 + n.max_abs();
    if n.coeff(0).norm() > 1e-10 * scale || n.high() > 2 || n.low() < 0 {
        return Err(Error::ConstraintViolated(format!(
            "transported g-coefficient is not n2 x^2 + n1 x: {n:?}"
        )));
    }
    let hp = HeunParams {
        t: cp.t2 / cp.t1,
        gamma: 1.0 - h[2],
        delta: 1.0 + h[0] - l[0],
        epsilon: 1.0 + h[1] - l[1],
        alpha: l[2] + sigma,
        beta: l[3] + sigma,
        accessory: -n.coeff(1) / cp.t1,
    };
    if (hp.alpha * hp.beta - n.coeff(2)).norm() > 1e-10 * scale {
        return Err(Error::ConstraintViolated(
            "alpha beta differs from the transported x^2 term".into(),
        ));
    }
    let fuchs = hp.gamma + hp.delta + hp.epsilon - hp.alpha - hp.beta;
    if (fuchs - 1.0).norm() > 1e-10 {
        return Err(Error::ConstraintViolated(format!(
            "gamma + delta + epsilon - alpha - beta = {fuchs}"
        )));
    }
    Ok(hp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_d0() -> QHeunParams {
        QHeunParams::from_values(
            0.25,
            [c(2.0), c(3.0), c(0.375)],
            [c(1.0), c(2.0), c(0.5), c(1.0)],
            ZERO,
        )
        .unwrap()
    }

    #[test]
    fn degree_zero_example() {
        let s = polynomial_spectrum(&example_d0(), 0).unwrap();
        assert_eq!(s.energies.len(), 1);
        assert!((s.energies[0] - c(-5.5)).norm() < 1e-12);
        let mut p = example_d0();
        p.e = s.energies[0];
        let r = apply_to_poly(&p, &LaurentPoly::one()).unwrap();
        assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn no_sector_without_top_constraint() {
        let mut p = example_d0();
        p.l[3] = LogParam::real(0.7).unwrap();
        assert!(matches!(
            polynomial_spectrum(&p, 0),
            Err(Error::NoPolynomialSector(_))
        ));
    }

    #[test]
    fn u_term_top_coefficient() {
        let p = example_d0();
        let op = build_qheun(&p).unwrap();
        let u = op.exact_parts().unwrap().2.to_poly(1e-14).unwrap();
        assert!((u.coeff(2) + (p.lv(2) + p.lv(3))).norm() < 1e-15);
    }

    #[test]
    fn roots_of_known_cubic() {
        // (E - 1)(E + 2)(E - 3i)
        let p = LaurentPoly::from_roots(&[c(1.0), c(-2.0), C64::new(0.0, 3.0)]);
        let cs: Vec<C64> = (0..=3).map(|k| p.coeff(k)).collect();
        let mut r = poly_roots(&cs).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - c(-2.0)).norm() < 1e-13);
        assert!((r[1] - C64::new(0.0, 3.0)).norm() < 1e-13);
        assert!((r[2] - c(1.0)).norm() < 1e-13);
    }

    #[test]
    fn confluent_rejected() {
        let cp = ContinuumParams::new(c(1.0), c(1.0), [ZERO; 3], [ZERO; 4], ZERO, 1e-3);
        assert!(matches!(
            riemann_scheme(&cp),
            Err(Error::ConfluentSingularities)
        ));
    }
}
