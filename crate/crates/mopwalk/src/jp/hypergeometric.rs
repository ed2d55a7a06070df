use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

fn nonpositive_integer(r: &Rational) -> Option<u64> {
    if *r.denom() == 1 && *r <= 0 {
        Integer::from(-r.numer()).to_u64()
    } else {
        None
    }
}

/// `₃F₂(u; l; z)` as a finite sum; some upper parameter must be a nonpositive integer.
pub fn eval_3f2_terminating(
    upper: &[Rational; 3],
    lower: &[Rational; 2],
    z: &Float,
    prec: u32,
) -> Result<Float> {
    let terms = upper
        .iter()
        .filter_map(nonpositive_integer)
        .min()
        .ok_or(Error::NonTerminating)?;
    let mut coef = Rational::from(1);
    let zr = Float::with_val(prec, z);
    let mut acc = Float::with_val(prec, 1);
    let mut zp = Float::with_val(prec, 1);
    for k in 0..terms {
        let mut num = Rational::from(1);
        for u in upper {
            num *= Rational::from(u + k);
        }
        let mut den = Rational::from(k + 1);
        for l in lower {
            den *= Rational::from(l + k);
        }
        if den == 0 {
            return Err(Error::InvalidParams(
                "lower parameter hits zero before the series terminates".into(),
            ));
        }
        coef *= num / den;
        zp *= &zr;
        acc += Float::with_val(prec, &zp * &coef);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{float, int, rat};

    #[test]
    fn short_series() {
        let z = float(128, 0.5);
        let one = eval_3f2_terminating(&[int(0), rat(1, 3), int(2)], &[int(1), int(5)], &z, 128).unwrap();
        assert_eq!(one, 1);
        let (a, b, c, d) = (rat(1, 3), rat(5, 2), rat(7, 4), rat(2, 3));
        let v = eval_3f2_terminating(&[int(-1), a.clone(), b.clone()], &[c.clone(), d.clone()], &z, 128).unwrap();
        let want = Float::with_val(128, 1) - Float::with_val(128, &z * Rational::from(a * b / (c * d)));
        assert!(Float::with_val(128, &v - &want).abs() < 1e-35);
    }

    #[test]
    fn rejects_infinite_series() {
        let z = float(64, 0.5);
        assert!(matches!(
            eval_3f2_terminating(&[rat(1, 2), int(1), int(2)], &[int(3), int(4)], &z, 64),
            Err(Error::NonTerminating)
        ));
    }
}
