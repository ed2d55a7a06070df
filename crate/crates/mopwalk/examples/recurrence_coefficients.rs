//! Recurrence coefficient streams and their approach to the limits (4/9, 16/243, 64/19683).

use mopwalk::arith::fmt_rational;
use mopwalk::jp::{asymptotic_coeffs, recurrence_coeffs, type_i_closed, type_ii_seq};
use mopwalk::params::JPParams;

fn main() -> mopwalk::Result<()> {
    let p = JPParams::recurrent_example();
    println!("{p}");
    println!("B^(3) = {}", type_ii_seq(3, &p)?);
    let (a1, a2) = type_i_closed(2, &p, 128)?;
    println!("Q^(2) components: deg A_1 = {:?}, deg A_2 = {:?}", a1.degree(), a2.degree());

    for n in [0usize, 1, 2, 10, 100] {
        let r = recurrence_coeffs(n, &p)?;
        let s: Vec<String> = r.streams().iter().map(|x| format!("{:.6}", x.to_f64())).collect();
        println!("n = {n:3}: {}", s.join("  "));
    }
    let (b, c, d) = asymptotic_coeffs();
    println!("limits: {} {} {}", fmt_rational(&b), fmt_rational(&c), fmt_rational(&d));
    Ok(())
}
