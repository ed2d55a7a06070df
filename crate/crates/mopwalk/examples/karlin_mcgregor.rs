//! r-step probabilities from the integral representation, checked against matrix powers,
//! and the first-passage generating function approaching 1 for a recurrent chain.

use mopwalk::band::dense_pow;
use mopwalk::markov::jp_stochastic_ii;
use mopwalk::params::JPParams;
use mopwalk::spectral::{first_passage_fn, ChainType, KmEngine};
use rug::Float;

fn main() -> mopwalk::Result<()> {
    let p = JPParams::recurrent_example();
    let engine = KmEngine::new(&p, 6, 5, 256)?;
    let pow = dense_pow(&jp_stochastic_ii(40, &p)?.to_float(256).to_dense(), 5);
    for (n, m) in [(0, 0), (0, 3), (2, 1), (5, 6)] {
        let km = engine.transition(ChainType::TypeII, n, m, 5);
        println!("(P^5)[{n}][{m}]: integral {:.12}  matrix {:.12}", km.to_f64(), pow[n][m].to_f64());
    }
    println!("type I (P^5)[0][0] = {:.12}", engine.transition(ChainType::TypeI, 0, 0, 5).to_f64());

    for s in [0.5, 0.9, 0.99] {
        let f = first_passage_fn(ChainType::TypeII, 0, 0, &Float::with_val(128, s), &p, 128)?;
        println!("F_00({s}) = {:.8}", f.to_f64());
    }
    Ok(())
}
