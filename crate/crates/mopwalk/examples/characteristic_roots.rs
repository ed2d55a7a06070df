//! Characteristic roots at λ = 1, ratio limits, Christoffel–Darboux residuals and classification.

use mopwalk::arith::{int, rat};
use mopwalk::params::JPParams;
use mopwalk::spectral::{cd_checks, char_poly, classify, ratio_asymptotics, RatioKind};

fn main() -> mopwalk::Result<()> {
    let phi = char_poly(&int(1), 256)?;
    for r in &phi.roots {
        println!("root {:?} multiplicity {}", r.exact.as_ref().map(|x| x.to_string()), r.multiplicity);
    }
    let d = phi.depressed_dual(&rat(8, 27))?;
    println!("depressed dual coefficients {:?}, remainder {}", d.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(), d.remainder);

    let p = JPParams::recurrent_example();
    for kind in [RatioKind::B, RatioKind::Q, RatioKind::Kappa] {
        let e = ratio_asymptotics(kind, 300, &p, 128)?;
        println!("{} ratio -> {:.12} (distance to root {:e})", kind.as_str(), e.estimate.to_f64(), e.root_distance.to_f64());
    }

    let cd = cd_checks(4, &int(1), &rat(1, 2), &p, 256)?;
    println!("CD residuals: {:e} {:e} {:e}", cd.cd.to_f64(), cd.regularity.to_f64(), cd.confluent.to_f64());

    for params in [JPParams::recurrent_example(), JPParams::transient_example()] {
        let c = classify(&params, 128)?;
        let (k, v) = c.diagnostic.last().unwrap();
        println!("{params}: {} (K = {k}: {:.6}, stabilized {})", c.verdict.as_str(), v.to_f64(), c.stabilized);
    }
    Ok(())
}
