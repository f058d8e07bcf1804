//! Heun normal form of the continuum equation.

use rvd_cascade::qcalc::C64;
use rvd_cascade::qheun::{heun_normal_form, ContinuumParams};

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
        1e-3,
    );
    let hp = heun_normal_form(&cp)?;
    println!("{hp:#?}");
    let f = hp.gamma + hp.delta + hp.epsilon - hp.alpha - hp.beta - 1.0;
    println!("gamma + delta + epsilon - alpha - beta - 1 = {f:.2e}");
    Ok(())
}
