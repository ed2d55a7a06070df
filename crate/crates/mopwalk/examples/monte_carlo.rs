//! Simulated trajectories on the absorbing truncation: one-step frequencies against the exact
//! matrix and empirical first-return curves for a recurrent and a transient chain.

use mopwalk::markov::jp_stochastic_ii;
use mopwalk::params::JPParams;
use mopwalk::walk::{first_passage_empirical, simulate, truncate, within_sigma, Boundary, SimConfig};

fn main() -> mopwalk::Result<()> {
    for p in [JPParams::recurrent_example(), JPParams::transient_example()] {
        let chain = truncate(&jp_stochastic_ii(63, &p)?, 60, Boundary::Absorb)?;
        let cfg = SimConfig { truncation: 60, trials: 20_000, horizon: 2_000, seed: 11, ..Default::default() };
        let stats = simulate(&chain, &cfg)?;
        let (c, n) = stats.frequency(0, 0, 1);
        let exact = chain.get(0, 0).unwrap().to_f64();
        println!("{p}");
        println!("  P[0][0]: empirical {:.4} exact {exact:.4} within 4σ: {}", c as f64 / n as f64, within_sigma(c, n, exact, 4.0));
        let curve = first_passage_empirical(&stats, 0, 0)?;
        for t in [10, 100, 1000, 2000] {
            println!("  F_00 by step {t}: {:.4}", curve[t - 1]);
        }
        println!("  absorbed {} of {}", stats.absorbed, cfg.trials);
    }
    Ok(())
}
