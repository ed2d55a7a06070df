//! Jacobi–Piñeiro closed forms: type II polynomials, type I linear forms, normalizations
//! and the recurrence coefficients of the banded Jacobi matrix.
//!
//! Sequence indices follow the step line: `B^(2n) = B_(n,n)`, `B^(2n+1) = B_(n+1,n)`, and the
//! linear form `Q^(l)` paired with `B^(l)` carries the multi-index `ν(l+1)`, so `Q^(0) = Q_(1,0)`.

mod hypergeometric;
mod recurrence;
mod type_i;

pub use hypergeometric::eval_3f2_terminating;
pub use recurrence::{asymptotic_coeffs, jacobi_band, recurrence_coeffs, RecurrenceBand};
pub use type_i::{
    beta_masses, norm_h, norm_h_normalized, q_at, q_at_adaptive, q_at_one, q_one_sequence,
    type_i_closed, type_i_normalized, type_i_via_3f2, LinearFormEval,
};

use rug::{Integer, Rational};

use crate::arith::{fmt_rational, poch};
use crate::error::{Error, Result};
use crate::params::JPParams;
use crate::poly::RationalPoly;

pub(crate) fn ensure_nonresonant(p: &JPParams) -> Result<()> {
    let d = Rational::from(&p.alpha - &p.beta);
    if *d.denom() == 1 {
        Err(Error::ResonantParams(fmt_rational(&d)))
    } else {
        Ok(())
    }
}

/// Degrees `(n, m)` of `B^(l)`.
pub fn type_ii_multiindex(l: usize) -> (usize, usize) {
    (l - l / 2, l / 2)
}

/// Monic `B_(n,m)` from the double Pochhammer sum in powers of `(x-1)`.
pub fn type_ii_closed(n: usize, m: usize, params: &JPParams) -> Result<RationalPoly> {
    ensure_nonresonant(params)?;
    let (a, b, g) = (&params.alpha, &params.beta, &params.gamma);
    let d = n + m;
    let fact = |k: usize| Rational::from(Integer::factorial(k as u32));
    // weight of (x-1)^s x^(d-s)
    let mut w = vec![Rational::new(); d + 1];
    for k in 0..=n {
        for j in 0..=m {
            let t = poch(&Rational::from(g + (j + k + 1) as u32), m - j)
                * poch(&Rational::from(g + (k + m + 1) as u32), n - k)
                * poch(&(Rational::from(a + (n + 1) as u32) - k as u32), k)
                * poch(&(Rational::from(b + (m + n + 1) as u32) - (j + k) as u32), j)
                / (fact(j) * fact(k) * fact(m - j) * fact(n - k));
            w[j + k] += t;
        }
    }
    let norm = Rational::from(fact(n) * fact(m))
        / (poch(&(Rational::from(a + g) + (d + 1) as u32), n)
            * poch(&(Rational::from(b + g) + (d + 1) as u32), m));
    let mut c = vec![Rational::new(); d + 1];
    for (s, ws) in w.iter().enumerate() {
        if *ws == 0 {
            continue;
        }
        for i in 0..=s {
            let bin = Rational::from(Integer::binomial_u(s as u32, i as u32));
            let term = Rational::from(ws * &bin);
            if (s - i) % 2 == 0 {
                c[d - s + i] += term;
            } else {
                c[d - s + i] -= term;
            }
        }
    }
    Ok(RationalPoly::new(c).scale(&norm))
}

/// `B^(l)` on the step line.
pub fn type_ii_seq(l: usize, params: &JPParams) -> Result<RationalPoly> {
    let (n, m) = type_ii_multiindex(l);
    type_ii_closed(n, m, params)
}

/// `B_(n,m)(1) = (γ+1)_{n+m} / ((α+γ+n+m+1)_n (β+γ+n+m+1)_m)`.
pub fn type_ii_at_one(n: usize, m: usize, params: &JPParams) -> Rational {
    let d = (n + m + 1) as u32;
    poch(&Rational::from(&params.gamma + 1u32), n + m)
        / (poch(&(Rational::from(&params.alpha + &params.gamma) + d), n)
            * poch(&(Rational::from(&params.beta + &params.gamma) + d), m))
}

/// `B_(n,m)(0) = (-1)^{n+m} (α+1)_n (β+1)_m / ((α+γ+n+m+1)_n (β+γ+n+m+1)_m)`.
pub fn type_ii_at_zero(n: usize, m: usize, params: &JPParams) -> Rational {
    let d = (n + m + 1) as u32;
    let v = poch(&Rational::from(&params.alpha + 1u32), n)
        * poch(&Rational::from(&params.beta + 1u32), m)
        / (poch(&(Rational::from(&params.alpha + &params.gamma) + d), n)
            * poch(&(Rational::from(&params.beta + &params.gamma) + d), m));
    if (n + m) % 2 == 1 {
        -v
    } else {
        v
    }
}

/// `B^(l)(1)` for `l = 0..len`, built by consecutive ratios.
pub fn b_one_sequence(len: usize, params: &JPParams) -> Vec<Rational> {
    (0..len)
        .map(|l| {
            let (n, m) = type_ii_multiindex(l);
            type_ii_at_one(n, m, params)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::oracle::{build_moment_matrix, gauss_borel, oracle_type_ii};

    #[test]
    fn first_polynomials() {
        let p = JPParams::recurrent_example();
        assert_eq!(type_ii_closed(0, 0, &p).unwrap(), RationalPoly::constant(int(1)));
        assert_eq!(type_ii_closed(1, 0, &p).unwrap().to_string(), "x - 3/5");
        assert_eq!(type_ii_at_one(1, 0, &p), rat(2, 5));
        assert_eq!(type_ii_at_zero(1, 0, &p), rat(-3, 5));
        assert_eq!(type_ii_at_one(0, 0, &p), 1);
    }

    #[test]
    fn matches_oracle_and_endpoint_values() {
        for p in [JPParams::recurrent_example(), JPParams::transient_example()] {
            let f = gauss_borel(&build_moment_matrix(12, &p)).unwrap();
            for l in 0..12 {
                let b = type_ii_seq(l, &p).unwrap();
                assert_eq!(b, oracle_type_ii(&f, l), "l = {l}");
                let (n, m) = type_ii_multiindex(l);
                assert_eq!(b.eval(&int(1)), type_ii_at_one(n, m, &p));
                assert_eq!(b.eval(&int(0)), type_ii_at_zero(n, m, &p));
                assert!(b.is_monic());
            }
        }
    }

    #[test]
    fn rejects_resonance() {
        let p = JPParams { alpha: rat(1, 2), beta: rat(-1, 2), gamma: int(0) };
        assert!(matches!(type_ii_closed(1, 1, &p), Err(Error::ResonantParams(_))));
    }
}
