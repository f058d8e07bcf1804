//! Runs the limit harness for all four stages at the built-in sample points.

use rvd_cascade::cascade::{verify_limit, DegenParams, HarnessConfig};
use rvd_cascade::cli::default_scales;
use rvd_cascade::qcalc::C64;

fn main() -> rvd_cascade::Result<()> {
    let cfg = HarnessConfig::default();
    for stage in 1..=4u8 {
        let p = DegenParams::sample(stage).with_n(1, C64::new(0.3, 0.1));
        let r = verify_limit(stage, &p, &default_scales(stage, 1), &cfg)?;
        println!(
            "stage {stage}: {} {:?} -> distances {:?}, exponent {:.4} (expected {:.4}) {}",
            r.scale_kind,
            r.scales,
            r.distances
                .iter()
                .map(|d| format!("{d:.3e}"))
                .collect::<Vec<_>>(),
            r.fitted_exponent,
            r.expected,
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
