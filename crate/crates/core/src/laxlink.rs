//! Specialized linear q-difference equations of the D5 (Jimbo-Sakai), E6 and E7 Lax pairs,
//! matched against the fourth, third and second degenerations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cascade::xform;
use crate::error::{Error, Result};
use crate::qcalc::{log_product, LogParam, C64};
use crate::qheun::{build_qheun, QHeunParams};
use crate::shiftops::{LaurentPoly, LaurentRational, ShiftOperator1D};

const DIVISION_TOL: f64 = 1e-9;

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn lp(v: C64) -> Result<LogParam> {
    LogParam::from_value(v)
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0) || q == 1.0 || !q.is_finite() {
        return Err(Error::InvalidModulus(q));
    }
    Ok(())
}

fn constraint(lhs: &LogParam, rhs: &LogParam, what: &str) -> Result<()> {
    let (a, b) = (lhs.value(), rhs.value());
    if (a - b).norm() > 1e-12 * a.norm().max(b.norm()).max(1.0) {
        return Err(Error::ConstraintViolated(format!("{what}: {a} != {b}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    D5,
    E6,
    E7,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictEntry {
    pub name: String,
    pub value: C64,
}

fn entry(name: &str, value: C64) -> DictEntry {
    DictEntry {
        name: name.into(),
        value,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub family: Family,
    pub dictionary: Vec<DictEntry>,
    /// Largest coefficient difference after normalizing both forward coefficients to be monic.
    pub max_discrepancy: f64,
    /// Coefficient slot and x-power where the largest difference sits.
    pub worst: String,
    /// Slots matched as free parameters rather than compared.
    pub excluded: Vec<String>,
    pub pass: bool,
}

/// Coefficient-wise comparison of two polynomial-coefficient operators with the same shift.
fn compare(
    a: &ShiftOperator1D,
    b: &ShiftOperator1D,
    exclude: &[(&str, i32)],
) -> Result<(f64, String)> {
    let qa = a.q();
    let qb = b.q();
    let mut worst = ((qa - qb).abs() / qa.max(qb), "q".to_string());
    let polys = |op: &ShiftOperator1D| -> Result<[LaurentPoly; 3]> {
        let (v, w, u) = op
            .exact_parts()
            .ok_or_else(|| Error::InvalidInput("comparison needs exact operators".into()))?;
        Ok([
            v.to_poly(DIVISION_TOL)?,
            w.to_poly(DIVISION_TOL)?,
            u.to_poly(DIVISION_TOL)?,
        ])
    };
    let (pa, pb) = (polys(a)?, polys(b)?);
    let (na, nb) = (pa[1].leading().inv(), pb[1].leading().inv());
    for (slot, (x, y)) in ["v", "w", "u"].iter().zip(pa.iter().zip(pb.iter())) {
        let (x, y) = (x.scale(na), y.scale(nb));
        let lo = x.low().min(y.low());
        let hi = x.high().max(y.high());
        for k in lo..=hi {
            if exclude.contains(&(*slot, k)) {
                continue;
            }
            let (cx, cy) = (x.coeff(k), y.coeff(k));
            let d = (cx - cy).norm() / cx.norm().max(cy.norm()).max(1.0);
            if d > worst.0 {
                worst = (d, format!("{slot} x^{k}"));
            }
        }
    }
    Ok(worst)
}

fn poly_op(v: LaurentPoly, w: LaurentPoly, u: LaurentPoly, q: f64) -> ShiftOperator1D {
    ShiftOperator1D::exact_q(
        LaurentRational::poly(v),
        LaurentRational::poly(w),
        LaurentRational::poly(u),
        q,
    )
}

fn to_polys(op: &ShiftOperator1D) -> Result<ShiftOperator1D> {
    let (v, w, u) = op
        .exact_parts()
        .ok_or_else(|| Error::InvalidInput("needs exact coefficients".into()))?;
    Ok(poly_op(
        v.to_poly(DIVISION_TOL)?,
        w.to_poly(DIVISION_TOL)?,
        u.to_poly(DIVISION_TOL)?,
        op.q(),
    ))
}

// ---------------------------------------------------------------- D5

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JSParams {
    pub q: f64,
    pub kappa: [LogParam; 2],
    pub theta: [LogParam; 2],
    pub a: [LogParam; 4],
    pub t: LogParam,
    pub lambda: C64,
    pub mu: C64,
}

impl JSParams {
    /// theta2 is fixed by kappa1 kappa2 a1 a2 a3 a4 = theta1 theta2 (in logarithms).
    pub fn new(
        q: f64,
        kappa: [C64; 2],
        theta1: C64,
        a: [C64; 4],
        t: C64,
        lambda: C64,
        mu: C64,
    ) -> Result<Self> {
        check_q(q)?;
        let kappa = [lp(kappa[0])?, lp(kappa[1])?];
        let a = [lp(a[0])?, lp(a[1])?, lp(a[2])?, lp(a[3])?];
        let th1 = lp(theta1)?;
        let th2 = log_product(kappa.iter().chain(&a)).div(&th1);
        Ok(Self {
            q,
            kappa,
            theta: [th1, th2],
            a,
            t: lp(t)?,
            lambda,
            mu,
        })
    }

    pub fn check(&self) -> Result<()> {
        check_q(self.q)?;
        let lhs = log_product(self.kappa.iter().chain(&self.a));
        constraint(
            &lhs,
            &self.theta[0].mul(&self.theta[1]),
            "kappa1 kappa2 a1 a2 a3 a4 = theta1 theta2",
        )
    }

    fn k(&self, i: usize) -> C64 {
        self.kappa[i].value()
    }

    fn av(&self, i: usize) -> C64 {
        self.a[i].value()
    }

    fn th_sum(&self) -> C64 {
        self.theta[0].value() + self.theta[1].value()
    }

    pub fn c2(&self) -> C64 {
        let (q, l, mu, t) = (self.q, self.lambda, self.mu, self.t.value());
        let kk = self.k(0) * self.k(1);
        let qk = q * self.k(0) + self.k(1);
        q * q * kk * (l - self.av(2)) * (l - self.av(3)) * mu / l
            - (q + 1.0) * qk * l
            - q * t * self.th_sum() / l
            + (l - self.av(0) * t) * (l - self.av(1) * t) / (l * mu)
    }

    pub fn c1(&self) -> C64 {
        let (q, l, mu, t) = (self.q, self.lambda, self.mu, self.t.value());
        let kk = self.k(0) * self.k(1);
        let qk = q * self.k(0) + self.k(1);
        -q * kk * (l - self.av(2)) * (l - self.av(3)) * mu
            + qk * l * l
            + (q + 1.0) * t * self.th_sum()
            - (l - self.av(0) * t) * (l - self.av(1) * t) / mu
    }

    /// Accessory coefficient after lambda = a3.
    pub fn d1(&self) -> C64 {
        let (q, t, a3, mu) = (self.q, self.t.value(), self.av(2), self.mu);
        (self.av(0) * t - a3) * (self.av(1) * t - a3) / (a3 * mu)
            - a3 * (q * self.k(0) + self.k(1))
            - q * t * self.th_sum() / a3
    }
}

/// Y(q^2 x) - M(x) Y(qx) + D(x) Y(x) = 0 for the first component.
#[derive(Debug, Clone)]
pub struct JsScalar {
    pub q: f64,
    /// M(x) = (q(q kappa1 + kappa2) x^3 + c2 x^2 + c1 x - lambda t (theta1 + theta2)) / (x - lambda)
    pub middle: LaurentRational,
    /// D(x) = (qx - lambda)/(x - lambda) kappa1 kappa2 (x - t a1)(x - t a2)(x - a3)(x - a4)
    pub last: LaurentRational,
}

impl JsScalar {
    /// Three-term operator after x -> x/q: Y(qx) - M(x/q) Y(x) + D(x/q) Y(x/q).
    pub fn operator(&self) -> ShiftOperator1D {
        let s = c(1.0 / self.q);
        ShiftOperator1D::exact_q(
            self.last.subs_scale(s),
            LaurentRational::one(),
            self.middle.subs_scale(s).scale(c(-1.0)),
            self.q,
        )
    }
}

pub fn js_scalar(p: &JSParams) -> Result<JsScalar> {
    p.check()?;
    if p.lambda.norm() == 0.0 || p.mu.norm() == 0.0 {
        return Err(Error::InvalidInput("lambda and mu must be nonzero".into()));
    }
    let (q, l, t) = (p.q, p.lambda, p.t.value());
    let num = LaurentPoly::from_coeffs(
        0,
        vec![
            -l * t * p.th_sum(),
            p.c1(),
            p.c2(),
            q * (q * p.k(0) + p.k(1)),
        ],
    );
    let den = LaurentPoly::linear(l);
    let middle = LaurentRational::new(num, den.clone())?;
    let roots = [t * p.av(0), t * p.av(1), p.av(2), p.av(3)];
    let lastn = &LaurentPoly::from_coeffs(0, vec![-l, c(q)])
        * &LaurentPoly::from_roots(&roots).scale(p.k(0) * p.k(1));
    let last = LaurentRational::new(lastn, den)?;
    Ok(JsScalar { q, middle, last })
}

/// lambda = a3, common factors cancelled, then the gauge u(qx) = (x - t a1)(x - t a2) u(x):
/// (x - t a1)(x - t a2) f(qx) - {..} f(x) + (kappa1 kappa2/q)(x - a3)(x - q a4) f(x/q).
pub fn js_specialize_and_gauge(p: &JSParams) -> Result<ShiftOperator1D> {
    let mut p = *p;
    p.lambda = p.a[2].value();
    let op = js_scalar(&p)?.operator();
    let t = p.t.value();
    let rho = LaurentRational::poly(LaurentPoly::from_roots(&[t * p.av(0), t * p.av(1)]));
    to_polys(&op.gauge_x(&rho)?)
}

/// D5 dictionary into the q-Heun equation.
pub fn d5_dictionary(p: &JSParams) -> Result<QHeunParams> {
    p.check()?;
    let sq = LogParam::real(p.q)?.powi_half(1);
    let base = log_product(p.a.iter().chain(&p.kappa));
    // h3^{1/2} = theta1 (a1 a2 a3 a4 kappa1 kappa2)^{-1/2}
    let h3 = LogParam::from_log(2.0 * p.theta[0].log - base.log);
    Ok(QHeunParams {
        q: p.q,
        h: [p.a[2].div(&sq), p.a[3].mul(&sq), h3],
        l: [
            p.a[0].mul(&p.t).mul(&sq),
            p.a[1].mul(&p.t).mul(&sq),
            p.kappa[0].inv(),
            LogParam::real(p.q)?.div(&p.kappa[1]),
        ],
        e: p.d1() / (p.k(0) * p.k(1)),
    })
}

pub fn match_d5(p: &JSParams) -> Result<MatchResult> {
    let js = js_specialize_and_gauge(p)?;
    let qh = d5_dictionary(p)?;
    let target = build_qheun(&qh)?;
    let (d, worst) = compare(&js, &target, &[])?;
    let names = ["h1", "h2", "h3"];
    let mut dictionary: Vec<DictEntry> = names
        .iter()
        .zip(&qh.h)
        .map(|(n, v)| entry(n, v.value()))
        .collect();
    for (n, v) in ["l1", "l2", "l3", "l4"].iter().zip(&qh.l) {
        dictionary.push(entry(n, v.value()));
    }
    dictionary.push(entry("E", qh.e));
    Ok(MatchResult {
        family: Family::D5,
        dictionary,
        max_discrepancy: d,
        worst,
        excluded: Vec::new(),
        pass: d < 1e-12,
    })
}

// ---------------------------------------------------------------- Yamada E6 / E7

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YamadaParams {
    pub q: f64,
    pub b: [LogParam; 8],
    pub t: LogParam,
    pub f: C64,
    pub g: C64,
}

impl YamadaParams {
    /// b8 is fixed by q b1 b2 b3 b4 = b5 b6 b7 b8 (in logarithms).
    pub fn new(q: f64, b: [C64; 7], t: C64, f: C64, g: C64) -> Result<Self> {
        check_q(q)?;
        let mut bl = [LogParam::one(); 8];
        for (i, v) in b.iter().enumerate() {
            bl[i] = lp(*v)?;
        }
        let lhs = LogParam::real(q)?.mul(&log_product(&bl[..4]));
        bl[7] = lhs.div(&log_product(&bl[4..7]));
        Ok(Self {
            q,
            b: bl,
            t: lp(t)?,
            f,
            g,
        })
    }

    pub fn check(&self) -> Result<()> {
        check_q(self.q)?;
        let lhs = LogParam::real(self.q)?.mul(&log_product(&self.b[..4]));
        constraint(
            &lhs,
            &log_product(&self.b[4..]),
            "q b1 b2 b3 b4 = b5 b6 b7 b8",
        )
    }

    pub fn bv(&self, i: usize) -> C64 {
        self.b[i].value()
    }

    pub fn specialized(&self) -> Self {
        Self {
            f: self.bv(0),
            ..*self
        }
    }
}

fn lin(r: C64) -> LaurentPoly {
    LaurentPoly::linear(r)
}

fn rat(num: LaurentPoly, den: LaurentPoly) -> Result<LaurentRational> {
    LaurentRational::new(num, den)
}

/// The E6 linear equation at general f, g: coefficients of y(z/q), y(qz), y(z).
pub fn e6_lin(p: &YamadaParams) -> Result<ShiftOperator1D> {
    p.check()?;
    let (q, t, f, g) = (c(p.q), p.t.value(), p.f, p.g);
    let b = |i: usize| p.bv(i);
    let t2 = t * t;
    // (b1 q - z)...(b4 q - z) t^2 / (q (f q - z) z^4)
    let y1 = rat(
        LaurentPoly::from_roots(&[b(0) * q, b(1) * q, b(2) * q, b(3) * q]).scale(t2),
        (&lin(f * q) * &LaurentPoly::monomial(4, -q)).clone(),
    )?;
    // (b5 t - z)(b6 t - z) / ((f - z) z^2 t^2)
    let y2 = rat(
        LaurentPoly::from_roots(&[b(4) * t, b(5) * t]),
        &lin(f) * &LaurentPoly::monomial(2, -t2),
    )?;
    let gz_q = LaurentPoly::from_coeffs(0, vec![-q, g]);
    let gz_1 = LaurentPoly::from_coeffs(0, vec![c(-1.0), g]);
    let r1 = rat(LaurentPoly::monomial(1, -g), gz_q.scale(t2))?;
    let r2 = rat(gz_1.scale(-t2), LaurentPoly::monomial(1, g))?;
    let pb: C64 = (0..4).map(|i| b(i) * g - 1.0).product();
    let e1 = rat(
        LaurentPoly::constant(pb * t2),
        &gz_q.shift(2) * &LaurentPoly::constant(g * (f * g - 1.0)),
    )?;
    let e2 = rat(
        LaurentPoly::constant(-b(4) * b(5) * (b(6) * g - t) * (b(7) * g - t)),
        LaurentPoly::monomial(3, f * g),
    )?;
    let u = &(&(&(&y1 * &r1) + &(&y2 * &r2)) + &e1) + &e2;
    Ok(ShiftOperator1D::exact_q(y1, y2, u, p.q))
}

/// The f = b1 specialization: coefficients of y(z/q), y(z), y(qz) before the gauge step.
pub fn e6_pre_gauge(p: &YamadaParams, c1: C64) -> Result<ShiftOperator1D> {
    p.check()?;
    let (q, t) = (p.q, p.t.value());
    let b = |i: usize| p.bv(i);
    let qc = c(q);
    let s = q.sqrt();
    let v = rat(
        LaurentPoly::from_roots(&[b(1) * qc, b(2) * qc, b(3) * qc]).scale(-t * t),
        LaurentPoly::monomial(4, qc),
    )?;
    let bz = &lin(b(0)) * &LaurentPoly::monomial(2, c(-s)); // z^2 q^1/2 (b1 - z)
    let u = rat(e6_c(p, c1), bz)?;
    let w = rat(
        LaurentPoly::from_roots(&[b(4) * t, b(5) * t]),
        &lin(b(0)) * &LaurentPoly::monomial(2, -t * t),
    )?;
    Ok(ShiftOperator1D::exact_q(v, w, u, q))
}

/// c(z) of the E6 specialization with the accessory slot c1.
pub fn e6_c(p: &YamadaParams, c1: C64) -> LaurentPoly {
    let (q, t) = (p.q, p.t.value());
    let s = q.sqrt();
    let b = |i: usize| p.bv(i);
    let lin1 = b(0) / s + (b(1) + b(2) + b(3)) * s + (b(4) + b(5)) * t * s;
    let km1 = s * t * b(4) * b(5) * (b(6) + b(7));
    LaurentPoly::from_coeffs(-1, vec![km1, c1, lin1, c(-(s + 1.0 / s))])
}

/// Gauge y = z^sigma y~ with q^sigma = q^{-1/2} t^2, then multiply by -q^{1/2} z^2 (z - b1):
/// (z - b1)(z - b2 q)(z - b3 q)(z - b4 q)/z^2 y~(z/q) + c(z) y~(z) + (z - b5 t)(z - b6 t) y~(qz).
pub fn e6_specialize(p: &YamadaParams, c1: C64) -> Result<ShiftOperator1D> {
    let pre = e6_pre_gauge(p, c1)?;
    let t = p.t.value();
    let q_sigma = t * t / p.q.sqrt();
    let (v, w, u) = pre.exact_parts().expect("exact");
    let m = LaurentRational::poly(&lin(p.bv(0)) * &LaurentPoly::monomial(2, c(-p.q.sqrt())));
    let op = ShiftOperator1D::exact_q(
        &v.scale(q_sigma.inv()) * &m,
        &w.scale(q_sigma) * &m,
        u * &m,
        p.q,
    );
    to_polys(&op)
}

/// E6 dictionary into the third degeneration at q3 = 1/q.
pub fn e6_dictionary(p: &YamadaParams) -> Result<([LogParam; 4], [LogParam; 4])> {
    let sq = LogParam::real(p.q)?.powi_half(1);
    let bt = |i: usize| p.b[i].mul(&p.t).mul(&sq);
    Ok((
        [bt(4), bt(5), bt(6), bt(7)],
        [
            p.b[0].div(&sq),
            p.b[1].mul(&sq),
            p.b[2].mul(&sq),
            p.b[3].mul(&sq),
        ],
    ))
}

/// Swap the two shift directions: the same operator written with q -> 1/q.
fn flip(op: &ShiftOperator1D) -> ShiftOperator1D {
    ShiftOperator1D::new(op.w.clone(), op.v.clone(), op.u.clone(), -op.a_minus)
}

pub fn match_e6(p: &YamadaParams, c1: C64) -> Result<MatchResult> {
    let ours = flip(&e6_specialize(p, c1)?);
    let (h, l) = e6_dictionary(p)?;
    let e = -c1;
    let target = xform::third(1.0 / p.q, &h, &l).add_constant(-e);
    let (d, worst) = compare(&ours, &target, &[])?;
    let mut dictionary = vec![entry("q", c(1.0 / p.q))];
    for (n, v) in ["h1", "h2", "h3", "h4"].iter().zip(&h) {
        dictionary.push(entry(n, v.value()));
    }
    for (n, v) in ["l1", "l2", "l3", "l4"].iter().zip(&l) {
        dictionary.push(entry(n, v.value()));
    }
    dictionary.push(entry("E", e));
    Ok(MatchResult {
        family: Family::E6,
        dictionary,
        max_discrepancy: d,
        worst,
        excluded: vec!["u x^0 (E = -c1)".into()],
        pass: d < 1e-12,
    })
}

/// B(z) = prod (1 - b_i z) evaluated at z -> k / z: prod (z - b_i k) / z^4.
fn b_at_over_z(bs: &[C64], k: C64) -> LaurentPoly {
    let r: Vec<C64> = bs.iter().map(|b| b * k).collect();
    LaurentPoly::from_roots(&r).shift(-4)
}

/// The E7 linear equation at general f, g: coefficients of y(z/q), y(qz), y(z).
pub fn e7_lin(p: &YamadaParams) -> Result<ShiftOperator1D> {
    p.check()?;
    let (q, t, f, g) = (c(p.q), p.t.value(), p.f, p.g);
    let b1: Vec<C64> = (0..4).map(|i| p.bv(i)).collect();
    let b2: Vec<C64> = (4..8).map(|i| p.bv(i)).collect();
    let t2 = t * t;
    let w = rat(b_at_over_z(&b2, t), lin(f).scale(-t2))?;
    let v = rat(b_at_over_z(&b1, q).scale(t2), lin(f * q).scale(-q))?;
    let rw = rat(
        LaurentPoly::from_coeffs(0, vec![t2, -t2 * g]),
        LaurentPoly::from_coeffs(0, vec![t2, -g]),
    )?;
    let rv = rat(
        LaurentPoly::from_coeffs(0, vec![q * t2, -g]),
        LaurentPoly::from_coeffs(0, vec![t2 * q, -t2 * g]),
    )?;
    let bg1: C64 = b1.iter().map(|b| 1.0 - b * g).product();
    let bg2: C64 = b2.iter().map(|b| 1.0 - b * g / t).product();
    let pre = (1.0 - t2) / g;
    let e1 = rat(
        LaurentPoly::constant(pre * q * bg1 / (f * g - 1.0)),
        LaurentPoly::from_coeffs(2, vec![-q, g]),
    )?;
    let e2 = rat(
        LaurentPoly::constant(-pre * t2 * t2 * bg2 / (f * g - t2)),
        LaurentPoly::from_coeffs(2, vec![-t2, g]),
    )?;
    let u = &(&(&e1 + &e2) - &(&w * &rw)) - &(&v * &rv);
    Ok(ShiftOperator1D::exact_q(v, w, u, p.q))
}

#[derive(Debug, Clone)]
pub struct E7Specialized {
    /// (z - b1)(z - b2 q)..(z - b4 q) y(z/q) + (z - b5 t)..(z - b8 t) y(qz) - c(z) y(z)
    pub op: ShiftOperator1D,
    /// q^{1/2} times the z^2 coefficient of c(z); carries the accessory parameter.
    pub c2: C64,
}

/// Coefficients lo..=hi of a Laurent polynomial known only through its values, from
/// equispaced samples on |z| = radius. Errors if the remaining modes do not vanish.
fn interpolate(
    f: impl Fn(C64) -> Result<C64>,
    lo: i32,
    hi: i32,
    radius: f64,
) -> Result<LaurentPoly> {
    let n = (8 * (hi - lo + 1) as usize).max(64);
    let pts: Vec<C64> = (0..n)
        .map(|j| {
            C64::from_polar(
                radius,
                2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64,
            )
        })
        .collect();
    let vals = pts
        .iter()
        .map(|z| Ok(f(*z)? * z.powi(-lo)))
        .collect::<Result<Vec<C64>>>()?;
    // g(z) = z^-lo f(z) is a polynomial of degree hi - lo
    let coeff = |k: usize| -> C64 {
        vals.iter()
            .zip(&pts)
            .map(|(v, z)| v * z.powi(-(k as i32)))
            .sum::<C64>()
            / n as f64
    };
    let cs: Vec<C64> = (0..n).map(coeff).collect();
    let keep = (hi - lo + 1) as usize;
    let scale = cs[..keep]
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * radius.powi(k as i32))
        .fold(1.0, f64::max);
    let rest = cs[keep..]
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm() * radius.powi((k + keep) as i32))
        .fold(0.0, f64::max);
    if rest > DIVISION_TOL * scale {
        return Err(Error::InvalidInput(format!(
            "no Laurent polynomial reduction: remainder {rest:.2e}"
        )));
    }
    Ok(LaurentPoly::from_coeffs(lo, cs[..keep].to_vec()))
}

/// Radius in [0.5, 2] farthest (in log scale) from every listed singular modulus.
fn safe_radius(sing: &[f64]) -> f64 {
    (0..=60)
        .map(|k| 0.5 * 4f64.powf(k as f64 / 60.0))
        .max_by(|a, b| {
            let gap = |r: &f64| {
                sing.iter()
                    .map(|s| (r / s).ln().abs())
                    .fold(f64::INFINITY, f64::min)
            };
            gap(a).total_cmp(&gap(b))
        })
        .expect("nonempty")
}

/// f = b1, cancel the common root b1 q, gauge by z^s with q^s = t^2 q^{-1/2},
/// multiply by -q^{1/2} z^4 (z - b1). The shift coefficients divide exactly; the center
/// coefficient is read off by interpolation away from its removable singularities.
pub fn e7_specialize(p: &YamadaParams) -> Result<E7Specialized> {
    let p = p.specialized();
    let op = e7_lin(&p)?;
    let (v, w, u) = op.exact_parts().expect("exact");
    let q = c(p.q);
    let t = p.t.value();
    let v = v.cancel_root(p.bv(0) * q, 1e-10)?;
    let q_s = t * t / q.sqrt();
    let m = LaurentRational::poly(&lin(p.bv(0)) * &LaurentPoly::monomial(4, -q.sqrt()));
    let v = (&v.scale(q_s.inv()) * &m).to_poly(DIVISION_TOL)?;
    let w = (&w.scale(q_s) * &m).to_poly(DIVISION_TOL)?;
    let um = u * &m;
    let g = p.g;
    let sing = [
        p.bv(0).norm(),
        (p.bv(0) * q).norm(),
        (q / g).norm(),
        (t * t / g).norm(),
    ];
    let centre = interpolate(|z| um.eval(z), 0, 4, safe_radius(&sing))?;
    let cz = centre.scale(c(-1.0));
    Ok(E7Specialized {
        c2: cz.coeff(2) * q.sqrt(),
        op: poly_op(v, w, centre, p.q),
    })
}

/// c(z) of the E7 specialization from its closed-form c3, c1 and constant, with c2 supplied.
pub fn e7_c(p: &YamadaParams, c2: C64) -> LaurentPoly {
    let (q, t) = (p.q, p.t.value());
    let b = |i: usize| p.bv(i);
    let c3 = -(b(0) + (b(1) + b(2) + b(3)) * q + (b(4) + b(5) + b(6) + b(7)) * t * q);
    let c1 = -q
        * (b(1) * b(2) * b(3) * t * t * q * q
            + (b(0) * b(1) * b(3) + b(0) * b(2) * b(3) + b(0) * b(1) * b(2)) * t * t * q
            + (b(5) * b(6) * b(7) + b(4) * b(6) * b(7) + b(4) * b(5) * b(7) + b(4) * b(5) * b(6))
                * t);
    let c0 = (b(4) * b(5) * b(6) * b(7) + q * q * b(0) * b(1) * b(2) * b(3)) * t * t * q;
    LaurentPoly::from_coeffs(0, vec![c0, c1, c2, c3, c(1.0 + q)]).scale(c(1.0 / q.sqrt()))
}

/// E7 dictionary into the second degeneration.
pub fn e7_dictionary(p: &YamadaParams) -> Result<([LogParam; 4], [LogParam; 4])> {
    let sq = LogParam::real(p.q)?.powi_half(1);
    let lt = |i: usize| p.b[i].mul(&sq).mul(&p.t);
    Ok((
        [
            p.b[0].div(&sq),
            p.b[1].mul(&sq),
            p.b[2].mul(&sq),
            p.b[3].mul(&sq),
        ],
        [lt(4), lt(5), lt(6), lt(7)],
    ))
}

pub fn match_e7(p: &YamadaParams) -> Result<MatchResult> {
    let sp = e7_specialize(p)?;
    let zm2 = LaurentRational::monomial(-2, c(1.0));
    let ours = sp.op.mul_rational(&zm2);
    let (h, l) = e7_dictionary(p)?;
    let e = sp.c2 / p.q.sqrt();
    let target = xform::second(p.q, &h, &l).add_constant(-e);
    let (d, worst) = compare(&ours, &target, &[])?;
    let mut dictionary = Vec::new();
    for (n, v) in ["h1", "h2", "h3", "h4"].iter().zip(&h) {
        dictionary.push(entry(n, v.value()));
    }
    for (n, v) in ["l1", "l2", "l3", "l4"].iter().zip(&l) {
        dictionary.push(entry(n, v.value()));
    }
    dictionary.push(entry("E", e));
    Ok(MatchResult {
        family: Family::E7,
        dictionary,
        max_discrepancy: d,
        worst,
        excluded: vec!["u x^0 (E = q^-1/2 c2)".into()],
        pass: d < 1e-12,
    })
}

/// Complex number with modulus in [0.6, 1.4] and argument in [-1, 1].
fn draw_unitish<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(rng.gen_range(0.6..1.4), rng.gen_range(-1.0..1.0))
}

/// Random Jimbo-Sakai parameters; theta2 follows from the constraint.
pub fn sample_js<R: Rng + ?Sized>(rng: &mut R) -> Result<JSParams> {
    let q = rng.gen_range(0.2..0.8);
    let mut d = || draw_unitish(rng);
    let kappa = [d(), d()];
    let theta1 = d();
    let a = [d(), d(), d(), d()];
    let (t, lambda, mu) = (d(), d(), d());
    JSParams::new(q, kappa, theta1, a, t, lambda, mu)
}

/// Random Yamada parameters; b8 follows from the constraint.
pub fn sample_yamada<R: Rng + ?Sized>(rng: &mut R) -> Result<YamadaParams> {
    let q = rng.gen_range(0.2..0.8);
    let mut d = || draw_unitish(rng);
    let b = [d(), d(), d(), d(), d(), d(), d()];
    let (t, f, g) = (d(), d(), d());
    YamadaParams::new(q, b, t, f, g)
}
