//! Jimbo-Sakai scalar equation at lambda = a3, gauged, against the q-Heun equation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rvd_cascade::laxlink::{js_specialize_and_gauge, match_d5, sample_js};

fn main() -> rvd_cascade::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = sample_js(&mut rng)?;
    let op = js_specialize_and_gauge(&p)?;
    let (v, w, u) = op.exact_parts().expect("exact");
    println!("f(qx):  {:?}", w.num());
    println!("f(x):   {:?}", u.num());
    println!("f(x/q): {:?}", v.num());
    let m = match_d5(&p)?;
    for e in &m.dictionary {
        println!("{:>3} = {:.6}", e.name, e.value);
    }
    println!("max discrepancy {:.2e} at {}", m.max_discrepancy, m.worst);
    Ok(())
}
