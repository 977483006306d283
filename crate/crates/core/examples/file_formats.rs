//! Writes an ensemble and a code as JSON, reads them back and solves both.

use qht::channel::{converse_report, CqCodebookInstance};
use qht::io::{load_code, load_ensemble, save_json, CodeFile, EnsembleFile};
use qht::mary::{solve_min_error, Ensemble, SolverOptions};
use qht::random::rng_from_seed;

fn main() -> qht::Result<()> {
    let dir = std::env::temp_dir().join("qht-example");
    std::fs::create_dir_all(&dir)?;
    let mut rng = rng_from_seed(5);

    let ensemble = Ensemble::random(&mut rng, 2, 3, Some(1))?;
    let path = dir.join("ensemble.json");
    save_json(&path, &EnsembleFile::from_ensemble(&ensemble))?;
    let loaded = load_ensemble(&path)?;
    let r = solve_min_error(&loaded, &SolverOptions::default())?;
    println!("{}: error {:.9}, certified {}", path.display(), r.epsilon, r.certified);

    let code = CqCodebookInstance::random(&mut rng, 2, 3, None)?;
    let path = dir.join("code.json");
    save_json(&path, &CodeFile::from_code(&code))?;
    let report = converse_report(&load_code(&path)?, &SolverOptions::default())?;
    println!("{}: {}", path.display(), serde_json::to_string(&report)?);

    // Invalid input names the offending entry.
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"priors": [1.0], "states": [{"dim": 2, "re": [[0.5, 0], [0, 0.7]]}]}"#)?;
    if let Err(e) = load_ensemble(&bad) {
        println!("rejected: {e}");
    }
    Ok(())
}
