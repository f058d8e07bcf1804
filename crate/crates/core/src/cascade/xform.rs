//! Multiplicative (x-form) operators with parameters kept as logarithms.
//!
//! Shared by the cascade, the q-Heun module and the Lax pair dictionaries.

use crate::qcalc::{log_product, LogParam, C64};
use crate::shiftops::{LaurentPoly, LaurentRational, ShiftOperator1D};

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn roots_poly(roots: impl IntoIterator<Item = C64>) -> LaurentPoly {
    let r: Vec<C64> = roots.into_iter().collect();
    LaurentPoly::from_roots(&r)
}

fn q_sum(q: f64) -> C64 {
    c(q.sqrt() + 1.0 / q.sqrt())
}

/// Second degeneration:
/// x^-2 prod (x - h q^1/2) g(x/q) + x^-2 prod (x - l q^-1/2) g(qx) + U g
pub fn second(q: f64, h: &[LogParam; 4], l: &[LogParam; 4]) -> ShiftOperator1D {
    let s = q.sqrt();
    let v = roots_poly(h.iter().map(|p| p.value() * s)).shift(-2);
    let w = roots_poly(l.iter().map(|p| p.value() / s)).shift(-2);
    let sum: C64 = h.iter().chain(l).map(|p| p.value()).sum();
    let inv: C64 = h.iter().chain(l).map(|p| p.value().inv()).sum();
    let half = log_product(h.iter().chain(l)).sqrt();
    let u = LaurentPoly::from_coeffs(
        -2,
        vec![-half * q_sum(q), half * inv, c(0.0), sum, -q_sum(q)],
    );
    ShiftOperator1D::exact_q(
        LaurentRational::poly(v),
        LaurentRational::poly(w),
        LaurentRational::poly(u),
        q,
    )
}

/// Third degeneration:
/// prod_{1,2} (x - h q^1/2) g(x/q) + x^-2 prod (x - l q^-1/2) g(qx) + U g
pub fn third(q: f64, h: &[LogParam; 4], l: &[LogParam; 4]) -> ShiftOperator1D {
    let s = q.sqrt();
    let v = roots_poly(h[..2].iter().map(|p| p.value() * s));
    let w = roots_poly(l.iter().map(|p| p.value() / s)).shift(-2);
    let lin: C64 = h[..2].iter().chain(l).map(|p| p.value()).sum();
    let u = LaurentPoly::from_coeffs(-1, vec![third_k(h, l), c(0.0), lin, -q_sum(q)]);
    ShiftOperator1D::exact_q(
        LaurentRational::poly(v),
        LaurentRational::poly(w),
        LaurentRational::poly(u),
        q,
    )
}

/// (l1 l2 l3 l4 h1 h2)^1/2 ((h3/h4)^1/2 + (h4/h3)^1/2)
pub fn third_k(h: &[LogParam; 4], l: &[LogParam; 4]) -> C64 {
    let base = log_product(h[..2].iter().chain(l)).sqrt();
    let r = h[2].div(&h[3]);
    base * (r.sqrt() + r.inv().sqrt())
}

/// Fourth degeneration with h4 = 1:
/// x^-1 (x - h1 q^1/2)(x - h2 q^1/2) g(x/q) + x^-1 l3 l4 (x - l1 q^-1/2)(x - l2 q^-1/2) g(qx)
///   - {(l3 + l4) x + K x^-1} g
pub fn fourth(q: f64, h: &[LogParam; 3], l: &[LogParam; 4]) -> ShiftOperator1D {
    let s = q.sqrt();
    let v = roots_poly(h[..2].iter().map(|p| p.value() * s)).shift(-1);
    let w = roots_poly(l[..2].iter().map(|p| p.value() / s))
        .shift(-1)
        .scale(l[2].value() * l[3].value());
    let u = LaurentPoly::from_coeffs(
        -1,
        vec![-fourth_k(h, l), c(0.0), -(l[2].value() + l[3].value())],
    );
    ShiftOperator1D::exact_q(
        LaurentRational::poly(v),
        LaurentRational::poly(w),
        LaurentRational::poly(u),
        q,
    )
}

/// (l1 l2 l3 l4 h1 h2)^1/2 (h3^1/2 + h3^-1/2)
pub fn fourth_k(h: &[LogParam; 3], l: &[LogParam; 4]) -> C64 {
    let base = log_product(h[..2].iter().chain(l)).sqrt();
    base * (h[2].sqrt() + h[2].inv().sqrt())
}
