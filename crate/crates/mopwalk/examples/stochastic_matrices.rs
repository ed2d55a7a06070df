//! Both stochastic matrices, the Toeplitz remainder, the κ candidate and the diagonal scaling.

use mopwalk::band::Scalar;
use mopwalk::jp::jacobi_band;
use mopwalk::markov::{
    duality_check, jp_stochastic_i, jp_stochastic_ii, left_eigen_residual, scale_to_stochastic, steady_candidate,
    toeplitz_split,
};
use mopwalk::params::JPParams;

fn main() -> mopwalk::Result<()> {
    let p = JPParams::recurrent_example();
    let pii = jp_stochastic_ii(9, &p)?;
    println!("P_II, first rows:");
    for i in 0..4 {
        let row: Vec<String> = pii.row_range(i).map(|j| pii.get(i, j).render()).collect();
        println!("  {}", row.join("  "));
    }
    let pi = jp_stochastic_i(9, &p, 128)?;
    let row0: Vec<String> = pi.row_range(0).map(|j| format!("{:.4}", pi.get(0, j).to_f64())).collect();
    println!("P_I row 0: {}", row0.join("  "));

    let (_, rem) = toeplitz_split(&pii);
    println!("Toeplitz remainder at row 6: {:.5}", rem.get(6, 6).to_f64());

    let kappa = steady_candidate(60, &p, 256)?;
    let pf = jp_stochastic_ii(60, &p)?.to_float(256);
    println!("κ_0..3 = {:?}", kappa.kappa[..4].iter().map(|k| k.to_f64()).collect::<Vec<_>>());
    println!("left eigen residual: {:e}", left_eigen_residual(&kappa.kappa, &pf).to_f64());
    let pi60 = jp_stochastic_i(60, &p, 256)?;
    println!("duality residual: {:e}", duality_check(&pf, &pi60, &kappa.kappa).to_f64());

    let (sigma, scaled) = scale_to_stochastic(&jacobi_band(30, &p)?, None)?;
    println!(
        "scaled band: row 5 sums to {}, σ non-increasing: {}",
        scaled.row_sum(5).render(),
        sigma.is_positive_nonincreasing()
    );
    Ok(())
}
