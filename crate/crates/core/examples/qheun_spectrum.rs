//! Polynomial sector of the q-Heun equation: the degree-0 example and a degree-2 sector.

use rvd_cascade::qcalc::C64;
use rvd_cascade::qheun::{apply_to_poly, polynomial_solution, polynomial_spectrum, QHeunParams};

fn r(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn main() -> rvd_cascade::Result<()> {
    let p = QHeunParams::from_values(
        0.25,
        [r(2.0), r(3.0), r(0.375)],
        [r(1.0), r(2.0), r(0.5), r(1.0)],
        r(0.0),
    )?;
    let s = polynomial_spectrum(&p, 0)?;
    println!("d = 0: E = {:?}", s.energies);

    // l3 = q^-2 opens the degree-2 sector; h3 is tuned so that C_0 = 0
    let q: f64 = 0.5;
    let (h1, h2, l1, l2, l4) = (r(1.5), r(0.8), r(0.6), r(1.2), r(0.9));
    let l3 = r(q.powi(-2));
    let a = (h1 * h2 * q).sqrt();
    let b = (l1 * l2 * l3 * l4 / q).sqrt();
    let k = h1 * h2 * q + l1 * l2 * l3 * l4 / q;
    // K = (l1 l2 l3 l4 h1 h2)^{1/2} (h3^{1/2} + h3^{-1/2})
    let sum = k / (a * b);
    let root = (sum + (sum * sum - 4.0).sqrt()) / 2.0;
    let p2 = QHeunParams::from_values(q, [h1, h2, root * root], [l1, l2, l3, l4], r(0.0))?;
    let s2 = polynomial_spectrum(&p2, 2)?;
    println!(
        "d = 2: constraints top {:.2e}, bottom {:.2e}",
        s2.top_constraint.norm(),
        s2.bottom_constraint.norm()
    );
    for e in &s2.energies {
        let g = polynomial_solution(&p2, &s2, *e)?;
        let res = apply_to_poly(&QHeunParams { e: *e, ..p2 }, &g)?;
        println!("  E = {e:.8}  residual {:.2e}", res.max_abs());
    }
    Ok(())
}
