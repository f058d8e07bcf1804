//! q = 1 + eps: the q-Heun operator over eps^2 approaches the Fuchsian operator.

use rvd_cascade::cascade::fit_slope;
use rvd_cascade::qcalc::C64;
use rvd_cascade::qheun::{continuum_residual, probe_point, riemann_scheme, ContinuumParams};
use rvd_cascade::shiftops::LaurentPoly;

fn c(a: f64, b: f64) -> C64 {
    C64::new(a, b)
}

fn main() -> rvd_cascade::Result<()> {
    let cp = ContinuumParams::new(
        c(1.3, 0.2),
        c(-0.7, 0.9),
        [c(0.3, 0.1), c(-0.2, 0.05), c(0.45, -0.1)],
        [c(0.15, 0.0), c(0.6, -0.2), c(0.35, 0.1), c(-0.4, 0.2)],
        c(0.8, -0.3),
        1e-2,
    );
    let x = probe_point(&cp);
    let eps = [1e-2, 3e-3, 1e-3];
    let f = LaurentPoly::from_coeffs(0, vec![c(1.0, 0.0), c(-0.5, 0.2), c(0.3, 0.0)]);
    let mut logs = Vec::new();
    for e in eps {
        let r = continuum_residual(&cp.with_eps(e), &f, x)?.norm();
        println!("eps = {e:e}: residual {r:.4e}");
        logs.push(r.ln());
    }
    let le: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    println!("slope {:.4}", fit_slope(&le, &logs));
    let rs = riemann_scheme(&cp)?;
    println!("Riemann scheme {rs:#?}");
    println!("exponent sum {:.3e}", rs.all().iter().sum::<C64>());
    Ok(())
}
