//! Checks on random ensembles that the minimum error equals the optimized
//! block binary test and the optimized information-spectrum objective.

use qht::mary::{verify_reformulations, Ensemble, VerifyOptions};
use qht::random::rng_from_seed;

fn main() -> qht::Result<()> {
    let options = VerifyOptions::default();
    println!(" d  M  error        |block - err|  |spectrum - err|  sampled excess  passed");
    for seed in 0..8u64 {
        let mut rng = rng_from_seed(seed);
        let (d, m) = (2 + seed as usize % 3, 2 + seed as usize % 4);
        let ensemble = Ensemble::random(&mut rng, d, m, None)?;
        let r = verify_reformulations(&ensemble, &VerifyOptions { seed, ..options })?;
        println!(
            " {d}  {m}  {:.9}  {:.2e}       {:.2e}          {:+.2e}       {}",
            r.epsilon,
            r.block_test_delta,
            r.spectrum_delta,
            r.sampled_max_excess,
            r.passed()
        );
    }
    Ok(())
}
