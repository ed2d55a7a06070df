use rayon::prelude::*;
use rug::Rational;
use serde_json::{json, Value};

use super::ensure_nonresonant;
use crate::arith::fmt_rational;
use crate::band::{BandedOperator, Profile};
use crate::error::Result;
use crate::params::JPParams;

/// The six coefficient streams at family index `n`.
///
/// In terms of the Jacobi matrix: `b_even = J[2n,2n]`, `b_odd = J[2n+1,2n+1]`,
/// `c_even = J[2n+2,2n+1]`, `c_odd = J[2n+1,2n]`, `d_even = J[2n+2,2n]`, `d_odd = J[2n+3,2n+1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceBand {
    pub n: usize,
    /// `b_{n,n}`
    pub b_even: Rational,
    /// `b_{n+1,n}`
    pub b_odd: Rational,
    /// `c_{n+1,n+1}`
    pub c_even: Rational,
    /// `c_{n+1,n}`
    pub c_odd: Rational,
    /// `d_{n+1,n+1}`
    pub d_even: Rational,
    /// `d_{n+2,n+1}`
    pub d_odd: Rational,
}

impl RecurrenceBand {
    pub fn streams(&self) -> [&Rational; 6] {
        [&self.b_even, &self.b_odd, &self.c_even, &self.c_odd, &self.d_even, &self.d_odd]
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "b_nn": fmt_rational(&self.b_even),
            "b_n1n": fmt_rational(&self.b_odd),
            "c_n1n1": fmt_rational(&self.c_even),
            "c_n1n": fmt_rational(&self.c_odd),
            "d_n1n1": fmt_rational(&self.d_even),
            "d_n2n1": fmt_rational(&self.d_odd),
        })
    }
}

fn q(x: &Rational, k: i64) -> Rational {
    Rational::from(x + k)
}

/// Recurrence coefficients for user parameters `(α, β, γ)`.
///
/// The printed formulas live at parameters shifted by one, so everything below works with
/// `a = α+1`, `b = β+1`, `g = γ+1`.
pub fn recurrence_coeffs(n: usize, params: &JPParams) -> Result<RecurrenceBand> {
    ensure_nonresonant(params)?;
    let a = Rational::from(&params.alpha + 1u32);
    let b = Rational::from(&params.beta + 1u32);
    let g = Rational::from(&params.gamma + 1u32);
    let ag = Rational::from(&a + &g);
    let bg = Rational::from(&b + &g);
    let amb = Rational::from(&a - &b);
    let ni = n as i64;
    let nr = Rational::from(ni);

    let (b_even, b_odd, c_odd, d_even) = if n == 0 {
        let b00 = Rational::from(&a / &ag);
        let b10 = (b.clone() * &a * &a + 2i64 * b.clone() * &g * &a + q(&b, 1) * &g * q(&g, 1))
            / (ag.clone() * q(&ag, 1) * q(&bg, 1));
        let c10 = a.clone() * &g / (ag.clone() * &ag * q(&ag, 1));
        let d11 = a.clone() * q(&amb, 1) * &g * q(&g, 1)
            / (ag.clone() * q(&ag, 1) * q(&ag, 1) * q(&ag, 2) * q(&bg, 1));
        (b00, b10, c10, d11)
    } else {
        let big_b = q(&a, ni) * q(&bg, 2 * ni - 1) * q(&ag, 2 * ni - 1)
            / (q(&ag, 3 * ni) * q(&bg, 3 * ni - 1))
            + nr.clone() * q(&g, 2 * ni - 1) * q(&ag, 2 * ni - 1)
                / (q(&bg, 3 * ni - 2) * q(&bg, 3 * ni - 1))
            + nr.clone() * q(&g, 2 * ni - 1) * q(&bg, 2 * ni - 2)
                / (q(&ag, 3 * ni - 2) * q(&bg, 3 * ni - 2));
        let b_nn = big_b / q(&ag, 3 * ni - 1);

        let quad = b.clone() * &b + q(&g, 3 * ni - 1) * &b + 2i64 * nr.clone() * q(&g, 2 * ni);
        let tail = Rational::from(18 * ni * ni * ni)
            + (14i64 * b.clone() + 15i64 * g.clone() + 5) * ni * ni
            + (2i64 * b.clone() + &g + 2) * (2i64 * b.clone() + 3i64 * g.clone() - 1) * ni
            + q(&b, 1) * q(&g, 1) * q(&bg, -1);
        let num = quad.clone() * &a * &a
            + (2i64 * g.clone() + 5 * ni) * quad * &a
            + q(&g, 2 * ni) * tail;
        let b_n1n = num
            / (q(&ag, 3 * ni) * q(&ag, 3 * ni + 1) * q(&bg, 3 * ni - 1) * q(&bg, 3 * ni + 1));

        let y = b.clone() * &b * &b * (ni + 1)
            + g.clone() * &g * &g * (ni + 1)
            + b.clone() * &b * (ni + 1) * (3i64 * g.clone() + 8 * ni - 3)
            + 3i64 * g.clone() * &g * (4 * ni * ni + ni - 1)
            + g.clone() * (2 + ni * (42 * ni * ni - 9 * ni - 13))
            + b.clone()
                * (g.clone() * &g * (3 + 6 * ni)
                    + g.clone() * (33 * ni * ni + 9 * ni - 6)
                    + (2 + ni * (44 * ni * ni + ni - 15)))
            + Rational::from(ni * (6 + ni * (-13 + ni * (-26 + 45 * ni))));
        let z = b.clone() * &b * &b * (ni + 1)
            + b.clone() * &b * (ni + 1) * (3i64 * g.clone() + 8 * ni - 3)
            + q(&g, 3 * ni - 1) * q(&g, 3 * ni) * (g.clone() * (1 + 3 * ni) + (6 * ni * ni - 2))
            + b.clone()
                * (g.clone() * &g * &g
                    + 3i64 * g.clone() * &g * (1 + 4 * ni)
                    + g.clone() * (42 * ni * ni + 9 * ni - 7)
                    + (2 + ni * (-17 + ni * (2 + 45 * ni))));
        let x = a.clone() * &a * &a * ni * q(&b, ni - 1)
            + a.clone() * &a * ni * q(&b, ni - 1) * (3i64 * g.clone() + 8 * ni - 1)
            + a.clone() * y
            + nr.clone() * z;
        let c_n1n = q(&g, 2 * ni) * q(&ag, 2 * ni - 1) * q(&bg, 2 * ni - 1) * x
            / (q(&ag, 3 * ni - 1)
                * q(&ag, 3 * ni)
                * q(&ag, 3 * ni)
                * q(&ag, 3 * ni + 1)
                * q(&bg, 3 * ni - 2)
                * q(&bg, 3 * ni - 1)
                * q(&bg, 3 * ni - 1)
                * q(&bg, 3 * ni));

        let d_nn = Rational::from(ni + 1)
            * q(&a, ni)
            * q(&amb, ni + 1)
            * q(&g, 2 * ni)
            * q(&g, 2 * ni + 1)
            * q(&ag, 2 * ni - 1)
            * q(&ag, 2 * ni)
            * q(&bg, 2 * ni - 1)
            * q(&bg, 2 * ni)
            / (q(&ag, 3 * ni - 1)
                * q(&ag, 3 * ni)
                * q(&ag, 3 * ni)
                * q(&ag, 3 * ni + 1)
                * q(&ag, 3 * ni + 1)
                * q(&ag, 3 * ni + 2)
                * q(&bg, 3 * ni - 1)
                * q(&bg, 3 * ni)
                * q(&bg, 3 * ni + 1));
        (b_nn, b_n1n, c_n1n, d_nn)
    };

    let c_even = Rational::from(ni + 1)
        * q(&g, 2 * ni + 1)
        * q(&ag, 2 * ni)
        * q(&bg, 2 * ni)
        * (q(&b, ni) * q(&bg, 2 * ni)
            + q(&amb, ni + 1) * q(&g, 2 * ni) * q(&bg, 3 * ni + 1) / q(&ag, 3 * ni)
            + q(&b, ni) * q(&ag, 2 * ni + 1) * q(&ag, 3 * ni + 1) / q(&bg, 3 * ni + 2))
        / (q(&ag, 3 * ni + 1)
            * q(&ag, 3 * ni + 1)
            * q(&ag, 3 * ni + 2)
            * q(&bg, 3 * ni)
            * q(&bg, 3 * ni + 1)
            * q(&bg, 3 * ni + 1));

    let d_odd = Rational::from(ni + 1)
        * q(&b, ni)
        * (Rational::from(ni + 1) - &amb)
        * q(&g, 2 * ni + 1)
        * q(&g, 2 * ni + 2)
        * q(&ag, 2 * ni)
        * q(&ag, 2 * ni + 1)
        * q(&bg, 2 * ni)
        * q(&bg, 2 * ni + 1)
        / (q(&ag, 3 * ni + 1)
            * q(&ag, 3 * ni + 2)
            * q(&ag, 3 * ni + 3)
            * q(&bg, 3 * ni)
            * q(&bg, 3 * ni + 1)
            * q(&bg, 3 * ni + 1)
            * q(&bg, 3 * ni + 2)
            * q(&bg, 3 * ni + 2)
            * q(&bg, 3 * ni + 3));

    Ok(RecurrenceBand { n, b_even, b_odd, c_even, c_odd, d_even, d_odd })
}

/// Large-`n` limits `(b, c, d) = (3κ, 3κ², κ³)` with `κ = 4/27`.
pub fn asymptotic_coeffs() -> (Rational, Rational, Rational) {
    let k = Rational::from((4, 27));
    let k2 = Rational::from(&k * &k);
    let k3 = Rational::from(&k2 * &k);
    (k * 3u32, k2 * 3u32, k3)
}

/// Leading `size × size` block of the Jacobi matrix from the closed-form streams.
pub fn jacobi_band(size: usize, params: &JPParams) -> Result<BandedOperator<Rational>> {
    let fams: Vec<RecurrenceBand> = (0..size / 2 + 1)
        .into_par_iter()
        .map(|n| recurrence_coeffs(n, params))
        .collect::<Result<_>>()?;
    let mut j = BandedOperator::new(size, 2, 1, Profile::TypeII, Rational::new());
    let mut put = |r: usize, c: usize, v: &Rational| {
        if r < size && c < size {
            j.set(r, c, v.clone());
        }
    };
    for f in &fams {
        let n = f.n;
        put(2 * n, 2 * n, &f.b_even);
        put(2 * n + 1, 2 * n + 1, &f.b_odd);
        put(2 * n + 1, 2 * n, &f.c_odd);
        put(2 * n + 2, 2 * n + 1, &f.c_even);
        put(2 * n + 2, 2 * n, &f.d_even);
        put(2 * n + 3, 2 * n + 1, &f.d_odd);
    }
    let one = Rational::from(1);
    for r in 0..size.saturating_sub(1) {
        put(r, r + 1, &one);
    }
    Ok(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::oracle::{build_moment_matrix, gauss_borel, oracle_jacobi};

    #[test]
    fn base_values() {
        let p = JPParams::recurrent_example();
        let r = recurrence_coeffs(0, &p).unwrap();
        assert_eq!(r.b_even, rat(3, 5));
        // c_{1,0} = (α+1)(γ+1)/((α+γ+2)²(α+γ+3))
        assert_eq!(r.c_odd, rat(3, 4) * rat(1, 2) / (rat(5, 4) * rat(5, 4) * rat(9, 4)));
        assert_eq!(asymptotic_coeffs(), (rat(4, 9), rat(16, 243), rat(64, 19683)));
    }

    #[test]
    fn band_equals_oracle() {
        for p in [
            JPParams::recurrent_example(),
            JPParams::transient_example(),
            JPParams::parse("1/3", "1/7", "2/5").unwrap(),
            JPParams::parse("-9/10", "-1/5", "3").unwrap(),
        ] {
            let o = oracle_jacobi(&gauss_borel(&build_moment_matrix(16, &p)).unwrap()).unwrap();
            let c = jacobi_band(15, &p).unwrap();
            for r in 0..14 {
                for k in o.row_range(r) {
                    assert_eq!(o.get(r, k), c.get(r, k), "({r}, {k}) at {p}");
                }
            }
        }
    }
}
