//! Builds each stage in its plain, gauged and multiplicative forms and prints the
//! gauged coefficients at a point.

use rvd_cascade::cascade::{build_stage_1d, DegenParams, Form};
use rvd_cascade::qcalc::C64;

fn main() -> rvd_cascade::Result<()> {
    let z = C64::new(0.13, 0.04);
    for stage in 1..=4u8 {
        let mut p = DegenParams::sample(stage);
        if stage == 4 {
            // the x-form of stage 4 fixes h4 = 0
            p.h[3] = C64::new(0.0, 0.0);
        }
        let g = build_stage_1d(stage, Form::Gauged, &p)?;
        let (v, w, u) = g.coefficients_at(z)?;
        println!("stage {stage} gauged at z = {z}: V = {v:.6}, W = {w:.6}, U = {u:.6}");
        if stage > 1 {
            let x = build_stage_1d(stage, Form::XForm, &p)?;
            let f = |y: C64| y * y - 0.5 * y;
            let xv = rvd_cascade::qcalc::xvar(z);
            println!(
                "    x-form on x^2 - x/2 at x = {xv:.4}: {:.6}",
                x.apply_x(&f, xv)?
            );
        }
    }
    let p = DegenParams::sample(3);
    let b = build_stage_1d(3, Form::Barred, &p)?;
    println!("stage 3 barred at z: {:.6?}", b.coefficients_at(z)?);
    Ok(())
}
