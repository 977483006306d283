//! Helstrom error and the type-I/type-II tradeoff curve for a pair of qubit
//! states.

use num_complex::Complex64;
use qht::binary::{alpha_beta, error_pair, helstrom, threshold_lower_bound};
use qht::operator::{CVector, DensityOperator};

fn main() -> qht::Result<()> {
    let zero = DensityOperator::basis_state(2, 0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = DensityOperator::pure(&CVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]))?;

    let pe = helstrom(&zero, &plus, 0.5)?;
    println!("helstrom(|0>, |+>, 1/2) = {pe:.12}  (exact {:.12})", (2.0 - 2f64.sqrt()) / 4.0);

    println!("\n  beta     alpha     threshold  mix   best t' bound");
    for k in 0..=10 {
        let beta = k as f64 / 10.0;
        let point = alpha_beta(&zero, &plus, beta)?;
        let w = &point.witness;
        let errors = error_pair(&zero, &plus, &w.test)?;
        assert!(errors.eps_0_given_1 <= beta + 1e-12);
        let bound = (0..200)
            .map(|i| threshold_lower_bound(&zero, &plus, beta, 0.05 * i as f64))
            .collect::<qht::Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        println!(
            "  {beta:.1}  {:.6}  {:>9}  {:.3}  {bound:.6}",
            point.alpha,
            if w.limiting { "inf".to_string() } else { format!("{:.4}", w.threshold) },
            w.null_mix
        );
    }
    Ok(())
}
