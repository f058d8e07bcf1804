//! E7 linear equation reduced at f = b1 and matched against the second degeneration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rvd_cascade::laxlink::{e7_c, e7_specialize, match_e7, sample_yamada};

fn main() -> rvd_cascade::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = sample_yamada(&mut rng)?;
    let sp = e7_specialize(&p)?;
    let got = sp
        .op
        .exact_parts()
        .expect("exact")
        .2
        .num()
        .scale((-1.0).into());
    let want = e7_c(&p.specialized(), sp.c2);
    println!("c2 = {:.6}", sp.c2);
    println!("c(z) vs closed form: {:.2e}", (&got - &want).max_abs());
    let m = match_e7(&p)?;
    println!(
        "max discrepancy {:.2e}, excluded {:?}",
        m.max_discrepancy, m.excluded
    );
    Ok(())
}
