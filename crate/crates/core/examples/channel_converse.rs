//! Decoding error of random classical-quantum codes against the
//! meta-converse, the information-spectrum bound and the bound with the
//! output state as reference.

use qht::channel::{meta_converse, tightness_experiment, write_csv, CqCodebookInstance, ExperimentConfig};
use qht::mary::SolverOptions;
use qht::random::rng_from_seed;

fn main() -> qht::Result<()> {
    let code = CqCodebookInstance::random(&mut rng_from_seed(1), 3, 4, Some(2))?;
    let reference = code.average_output()?;
    let bound = meta_converse(&code, &reference)?;
    println!("meta-converse with the average output: {:.6}\n", bound.alpha);

    let config = ExperimentConfig {
        dim: 3,
        codewords: 4,
        rank: None,
        seed: 100,
        count: 10,
        solver: SolverOptions::default(),
    };
    let reports = tightness_experiment(&config)?;
    write_csv(&mut std::io::stdout().lock(), &reports)?;
    Ok(())
}
