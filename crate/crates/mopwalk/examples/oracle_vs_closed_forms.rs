//! Gauss–Borel factorization of the moment matrix, compared entry by entry with the closed forms.

use mopwalk::jp::{jacobi_band, type_i_normalized, type_ii_seq};
use mopwalk::oracle::{build_moment_matrix, factorization_residual, gauss_borel, oracle_jacobi, oracle_type_i, oracle_type_ii};
use mopwalk::params::JPParams;

fn main() -> mopwalk::Result<()> {
    let p = JPParams::parse("1/3", "-1/5", "2/7")?;
    let size = 10;
    let g = build_moment_matrix(size, &p);
    let f = gauss_borel(&g)?;
    let nonzero = factorization_residual(&g, &f).iter().flatten().filter(|v| **v != 0).count();
    println!("{p}: factorization residual has {nonzero} nonzero entries");

    for l in 0..size {
        let b = type_ii_seq(l, &p)?;
        assert_eq!(b, oracle_type_ii(&f, l));
        assert_eq!(type_i_normalized(l, &p)?, oracle_type_i(&f, l));
        if l < 4 {
            println!("B^({l}) = {b}");
        }
    }
    let jo = oracle_jacobi(&f)?;
    let jc = jacobi_band(jo.size(), &p)?;
    for i in 0..jo.valid_rows() {
        for k in jo.row_range(i) {
            assert_eq!(jo.get(i, k), jc.get(i, k));
        }
    }
    println!("Jacobi rows 0..{} agree exactly", jo.valid_rows());
    Ok(())
}
