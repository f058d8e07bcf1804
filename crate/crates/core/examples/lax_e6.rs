//! Specialized E6 equation against the third degeneration with q -> 1/q.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rvd_cascade::laxlink::{e6_specialize, match_e6, sample_yamada};
use rvd_cascade::qcalc::C64;

fn main() -> rvd_cascade::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = sample_yamada(&mut rng)?;
    let c1 = C64::new(0.4, -0.7);
    let op = e6_specialize(&p, c1)?;
    println!("c(z) = {:?}", op.exact_parts().expect("exact").2.num());
    let m = match_e6(&p, c1)?;
    for e in &m.dictionary {
        println!("{:>3} = {:.6}", e.name, e.value);
    }
    println!(
        "max discrepancy {:.2e}, excluded {:?}",
        m.max_discrepancy, m.excluded
    );
    Ok(())
}
