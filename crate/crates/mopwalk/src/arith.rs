//! Small helpers over `rug` rationals and floats.

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 256;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from((num, den))
}

pub fn int(n: i64) -> Rational {
    Rational::from(n)
}

/// Rising factorial `(x)_n`.
pub fn poch(x: &Rational, n: usize) -> Rational {
    let mut acc = Rational::from(1);
    let mut t = x.clone();
    for _ in 0..n {
        acc *= &t;
        t += 1;
    }
    acc
}

pub fn factorial(n: usize) -> Integer {
    Integer::from(Integer::factorial(n as u32))
}

pub fn binomial(n: usize, k: usize) -> Integer {
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if ip.is_empty() { "0" } else { ip }, fp);
        let n: Integer = digits
            .parse()
            .map_err(|_| Error::InvalidParams(format!("cannot parse {s:?}")))?;
        let den = Integer::from(Integer::u_pow_u(10, fp.len() as u32));
        let r = Rational::from((n, den));
        return Ok(if neg { -r } else { r });
    }
    t.parse::<Rational>()
        .map_err(|_| Error::InvalidParams(format!("cannot parse {s:?} as a rational")))
}

/// Canonical `"num/den"` rendering used by every serializer.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_float(r: &Rational, prec: u32) -> Float {
    Float::with_val(prec, r)
}

pub fn float(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

/// `ln Γ(x)` for positive rational `x`.
pub fn ln_gamma(x: &Rational, prec: u32) -> Float {
    Float::with_val(prec + 32, x).ln_gamma()
}

/// `B(x + 1, γ + 1) = Γ(x+1)Γ(γ+1)/Γ(x+γ+2)`: the total mass of `t^x (1-t)^γ` on `[0, 1]`.
pub fn beta_mass(x: &Rational, gamma: &Rational, prec: u32) -> Float {
    let a = Rational::from(x + 1u32);
    let g = Rational::from(gamma + 1u32);
    let s = Rational::from(&a + &g);
    let l = ln_gamma(&a, prec) + ln_gamma(&g, prec) - ln_gamma(&s, prec);
    Float::with_val(prec, l.exp())
}

/// Number of bits by which `|parts|` dominate `|total|`; `u32::MAX` when the total is zero.
pub fn cancellation_bits(largest_part: &Float, total: &Float) -> u32 {
    if total.is_zero() {
        return if largest_part.is_zero() { 0 } else { u32::MAX };
    }
    let (Some(ep), Some(et)) = (largest_part.get_exp(), total.get_exp()) else {
        return 0;
    };
    (ep - et).max(0) as u32
}

pub fn max_abs<'a>(vals: impl IntoIterator<Item = &'a Float>, prec: u32) -> Float {
    let mut m = Float::with_val(prec, 0);
    for v in vals {
        if v.cmp_abs(&m) == Some(std::cmp::Ordering::Greater) {
            m = Float::with_val(prec, v.abs_ref());
        }
    }
    m
}

/// Rough `log2 |r|` for sizing guard bits.
pub fn log2_abs(r: &Rational) -> i64 {
    if *r == 0 {
        return i64::MIN / 4;
    }
    r.numer().significant_bits() as i64 - r.denom().significant_bits() as i64
}

/// Rational with the same value as a finite float.
pub fn float_to_rational(x: &Float) -> Rational {
    x.to_rational().unwrap_or_default()
}
