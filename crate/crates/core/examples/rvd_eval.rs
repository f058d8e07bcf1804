//! One-variable RvD operator on Fourier modes; two values of mu give the same action.

use rvd_cascade::qcalc::{ModulusPair, C64};
use rvd_cascade::rvd::{build_rvd_1d, RvDParams};
use rvd_cascade::shiftops::fourier_mode;

fn main() -> rvd_cascade::Result<()> {
    let h: [C64; 8] = std::array::from_fn(|k| {
        C64::new(0.11 * (k + 1) as f64 + 0.05, 0.02 * (k + 1) as f64 - 0.03)
    });
    let modulus = ModulusPair::new(1.0, 0.5)?;
    let z = C64::new(0.1, 0.05);
    for mu in [C64::new(0.3, 0.1), C64::new(-0.2, 0.25)] {
        let op = build_rvd_1d(&RvDParams {
            modulus,
            h,
            mu,
            n: 1,
        })?;
        let vals: Vec<C64> = (-2..=2)
            .map(|k| op.apply(&*fourier_mode(k), z))
            .collect::<Result<_, _>>()?;
        println!("mu = {mu}: {vals:.8?}");
    }
    Ok(())
}
