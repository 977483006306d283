//! Minimum-error discrimination of the three symmetric trine states, with the
//! optimal measurement and its duality certificate.

use num_complex::Complex64;
use qht::mary::{dual_certificate, solve_min_error, Ensemble, SolverOptions};
use qht::operator::{CVector, DensityOperator};

fn main() -> qht::Result<()> {
    let states = (0..3)
        .map(|k| {
            let a = std::f64::consts::PI * k as f64 / 3.0;
            DensityOperator::pure(&CVector::from_vec(vec![Complex64::new(a.cos(), 0.0), Complex64::new(a.sin(), 0.0)]))
        })
        .collect::<qht::Result<Vec<_>>>()?;
    let ensemble = Ensemble::uniform(states)?;

    let result = solve_min_error(&ensemble, &SolverOptions::default())?;
    println!("error       {:.15}", result.epsilon);
    println!("dual bound  {:.15}", result.dual_bound);
    println!("gap         {:.3e}  certified: {}", result.gap, result.certified);
    println!("residual    {:.3e}", result.holevo_residual);
    println!("stage       {:?} after {} iterations", result.stage, result.iterations);
    println!("c0*         {:.12}", result.c0_star);
    println!("mu0*        {:.6}", result.mu0_star.matrix());
    for (i, e) in result.povm.effects().iter().enumerate() {
        println!("effect {i}: {:.6}", e.matrix());
    }

    // The certificate can be rebuilt from any POVM.
    let cert = dual_certificate(&ensemble, &result.povm)?;
    println!("recomputed gap {:.3e}, shift {:.3e}", cert.gap, cert.shift);
    Ok(())
}
