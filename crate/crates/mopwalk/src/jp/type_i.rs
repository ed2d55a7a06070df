use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::ensure_nonresonant;
use super::hypergeometric::eval_3f2_terminating;
use crate::arith::{beta_mass, cancellation_bits, poch};
use crate::error::{Error, Result};
use crate::params::JPParams;
use crate::poly::{HighPrecPoly, RationalPoly};

/// Working-precision ceiling for the adaptive evaluators.
const MAX_WORKING_PREC: u32 = 1 << 18;

fn fact(k: usize) -> Rational {
    Rational::from(Integer::factorial(k as u32))
}

fn shifted(x: &Rational, k: i64) -> Rational {
    Rational::from(x + k)
}

/// Coefficients of `Â_(n,n),1`, descending from `x^{n-1}`; `n ≥ 1`.
fn diag_first(n: usize, a: &Rational, b: &Rational, g: &Rational) -> Vec<Rational> {
    let ni = n as i64;
    let ag = Rational::from(a + g);
    let bg = Rational::from(b + g);
    let amb = Rational::from(a - b);
    let mut c = poch(&shifted(&ag, 2 * ni), n) * poch(&shifted(&bg, 2 * ni), n) / fact(n - 1)
        * poch(&shifted(&ag, 2), 3 * n - 3)
        / (poch(&shifted(a, 1), n - 1) * poch(&shifted(g, 1), 2 * n - 1) * poch(&amb, n));
    let mut out = Vec::with_capacity(n);
    for j in 0..n as i64 {
        out.push(c.clone());
        if j + 1 == ni {
            break;
        }
        c *= Rational::from((-(ni - 1 - j), j + 1));
        c *= shifted(a, ni - j - 1) / shifted(&ag, 3 * ni - j - 2);
        c *= shifted(&amb, ni - 1 - j) / shifted(&amb, -j - 1);
    }
    out
}

/// Coefficients of `Â_(n+1,n),1`, descending from `x^n`.
fn off_first(n: usize, a: &Rational, b: &Rational, g: &Rational) -> Vec<Rational> {
    let ni = n as i64;
    let ag = Rational::from(a + g);
    let bg = Rational::from(b + g);
    let amb = Rational::from(a - b);
    let mut c = poch(&shifted(&bg, 2 * ni + 1), n) / fact(n)
        * poch(&shifted(&ag, 2 * ni + 1), n)
        * poch(&shifted(&ag, 2), 3 * n)
        / (poch(&shifted(g, 1), 2 * n) * poch(&shifted(a, 1), n) * poch(&shifted(&amb, 1), n));
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=ni {
        out.push(c.clone());
        if j == ni {
            break;
        }
        c *= Rational::from((-(ni - j), j + 1));
        c *= shifted(a, ni - j) / shifted(&ag, 3 * ni - j);
        c *= shifted(&amb, ni - j) / shifted(&amb, -j);
    }
    out
}

/// Coefficients of `Â_(n+1,n),2`, descending from `x^{n-1}`; empty for `n = 0`.
fn off_second(n: usize, a: &Rational, b: &Rational, g: &Rational) -> Vec<Rational> {
    if n == 0 {
        return vec![];
    }
    let ni = n as i64;
    let ag = Rational::from(a + g);
    let bg = Rational::from(b + g);
    let amb = Rational::from(a - b);
    let mut c = poch(&shifted(&ag, 2 * ni + 1), n + 1) / fact(n - 1)
        * poch(&shifted(&bg, 2 * ni + 1), n - 1)
        * poch(&shifted(&bg, 2), 3 * n - 1)
        / (poch(&shifted(g, 1), 2 * n)
            * poch(&shifted(b, 1), n - 1)
            * poch(&shifted(&amb, 1 - ni), n + 1));
    if n % 2 == 0 {
        c = -c;
    }
    let mut out = Vec::with_capacity(n);
    for j in 0..ni {
        out.push(c.clone());
        if j + 1 == ni {
            break;
        }
        c *= Rational::from((-(ni - 1 - j), j + 1));
        c *= shifted(b, ni - j - 1) / shifted(&bg, 3 * ni - j - 1);
        c *= shifted(&amb, 1 - ni + j) / shifted(&amb, j + 2);
    }
    out
}

fn ascending(mut desc: Vec<Rational>) -> RationalPoly {
    desc.reverse();
    RationalPoly::new(desc)
}

/// Components `(Â_1, Â_2)` of `Q^(l)` for the unit-mass weights `x^α/M_1`, `x^β/M_2`.
///
/// `l = 2n` gives the `(n+1, n)` pair, `l = 2n+1` the `(n+1, n+1)` pair.
pub fn type_i_normalized(l: usize, params: &JPParams) -> Result<(RationalPoly, RationalPoly)> {
    ensure_nonresonant(params)?;
    let (a, b, g) = (&params.alpha, &params.beta, &params.gamma);
    Ok(if l % 2 == 0 {
        let n = l / 2;
        (ascending(off_first(n, a, b, g)), ascending(off_second(n, a, b, g)))
    } else {
        let n = (l + 1) / 2;
        (ascending(diag_first(n, a, b, g)), ascending(diag_first(n, b, a, g)))
    })
}

/// Total masses `(M_1, M_2) = (B(α+1, γ+1), B(β+1, γ+1))`.
pub fn beta_masses(params: &JPParams, prec: u32) -> (Float, Float) {
    (
        beta_mass(&params.alpha, &params.gamma, prec),
        beta_mass(&params.beta, &params.gamma, prec),
    )
}

/// `(A_1, A_2)` of `Q^(l) = A_1 x^α + A_2 x^β` for the weights against `(1-x)^γ dx`.
pub fn type_i_closed(l: usize, params: &JPParams, prec: u32) -> Result<(HighPrecPoly, HighPrecPoly)> {
    let (a1, a2) = type_i_normalized(l, params)?;
    let (m1, m2) = beta_masses(params, prec + 32);
    let s1 = Float::with_val(prec + 32, m1.recip_ref());
    let s2 = Float::with_val(prec + 32, m2.recip_ref());
    Ok((
        HighPrecPoly::from_rational(&a1, &s1, prec),
        HighPrecPoly::from_rational(&a2, &s2, prec),
    ))
}

/// `Ĥ_l`, the pivots for the unit-mass weights.
pub fn norm_h_normalized(l: usize, params: &JPParams) -> Rational {
    let (a, b, g) = (&params.alpha, &params.beta, &params.gamma);
    let ag = Rational::from(a + g);
    let bg = Rational::from(b + g);
    let n = l / 2;
    let ni = n as i64;
    if l % 2 == 0 {
        fact(n) * poch(&shifted(g, 1), 2 * n) * poch(&shifted(a, 1), n) / poch(&shifted(&ag, 2), 3 * n)
            * poch(&shifted(&Rational::from(a - b), 1), n)
            / (poch(&shifted(&ag, 2 * ni + 1), n) * poch(&shifted(&bg, 2 * ni + 1), n))
    } else {
        fact(n) * poch(&shifted(g, 1), 2 * n + 1) * poch(&shifted(b, 1), n)
            / poch(&shifted(&bg, 2), 3 * n)
            * poch(&Rational::from(b - a), n + 1)
            / (poch(&shifted(&bg, 2 * ni + 2), n + 1) * poch(&shifted(&ag, 2 * ni + 2), n + 1))
    }
}

/// `H_l` for the weights `x^α (1-x)^γ`, `x^β (1-x)^γ`: `Ĥ_l` times the mass of weight `a(l)`.
pub fn norm_h(l: usize, params: &JPParams, prec: u32) -> Float {
    let x = if l % 2 == 0 { &params.alpha } else { &params.beta };
    let m = beta_mass(x, &params.gamma, prec);
    Float::with_val(prec, m * norm_h_normalized(l, params))
}

/// `Â_(n,n),1(z)` through the terminating `₃F₂` representation; `n ≥ 1`, `z ≠ 0`.
pub fn type_i_via_3f2(n: usize, z: &Float, params: &JPParams, prec: u32) -> Result<Float> {
    ensure_nonresonant(params)?;
    let (a, b, g) = (&params.alpha, &params.beta, &params.gamma);
    let ni = n as i64;
    let ag = Rational::from(a + g);
    let bg = Rational::from(b + g);
    let amb = Rational::from(a - b);
    let pref = poch(&shifted(&ag, 2), 3 * n - 3)
        / (poch(&shifted(a, 1), n - 1) * poch(&shifted(g, 1), 2 * n - 1))
        * poch(&shifted(&ag, 2 * ni), n)
        * poch(&shifted(&bg, 2 * ni), n)
        / poch(&amb, n)
        / fact(n - 1);
    let upper = [
        Rational::from(1 - ni),
        Rational::from(1 - ni) - a,
        Rational::from(1 - ni) - &amb,
    ];
    let lower = [Rational::from(1) - &amb, Rational::from(2 - 3 * ni) - &ag];
    let w = prec + 64;
    let zi = Float::with_val(w, z.recip_ref());
    let f = eval_3f2_terminating(&upper, &lower, &zi, w)?;
    let zp = Float::with_val(w, z.pow(n as u32 - 1));
    Ok(Float::with_val(prec, f * zp * pref))
}

/// Value of `Q^(l)` at a point together with its two weighted components.
#[derive(Clone, Debug)]
pub struct LinearFormEval {
    pub point: Float,
    pub q_value: Float,
    /// `(A_1(x) x^α, A_2(x) x^β)`.
    pub components: (Float, Float),
    /// Bits cancelled between the largest partial term and the result.
    pub bits_lost: u32,
    pub working_prec: u32,
}

fn eval_at(
    forms: &(RationalPoly, RationalPoly),
    x: &Float,
    params: &JPParams,
    w: u32,
) -> (Float, Float, u32) {
    let (m1, m2) = beta_masses(params, w);
    let mut comps = [Float::new(w), Float::new(w)];
    let mut scale = Float::with_val(w, 0);
    for (i, (poly, m, e)) in [
        (&forms.0, &m1, &params.alpha),
        (&forms.1, &m2, &params.beta),
    ]
    .into_iter()
    .enumerate()
    {
        let xe = Float::with_val(w, x.pow(&Float::with_val(w, e)));
        let f = Float::with_val(w, &xe / m);
        comps[i] = Float::with_val(w, poly.eval_float(x, w) * &f);
        let s = Float::with_val(w, poly.eval_abs_float(x, w) * &f);
        if s > scale {
            scale = s;
        }
    }
    let [c1, c2] = comps;
    let q = Float::with_val(w, &c1 + &c2);
    let lost = cancellation_bits(&scale, &q);
    (c1, c2, lost)
}

fn to_eval(x: &Float, c1: Float, c2: Float, lost: u32, w: u32, prec: u32) -> LinearFormEval {
    let q = Float::with_val(prec, &c1 + &c2);
    LinearFormEval {
        point: Float::with_val(prec, x),
        q_value: q,
        components: (Float::with_val(prec, c1), Float::with_val(prec, c2)),
        bits_lost: lost,
        working_prec: w,
    }
}

/// `Q^(l)(x)` at working precision `prec`; fails if more than half the bits cancel.
pub fn q_at(l: usize, x: &Float, params: &JPParams, prec: u32) -> Result<LinearFormEval> {
    let forms = type_i_normalized(l, params)?;
    let (c1, c2, lost) = eval_at(&forms, x, params, prec);
    if lost > prec / 2 {
        return Err(Error::PrecisionLoss { bits_lost: lost, precision: prec });
    }
    Ok(to_eval(x, c1, c2, lost, prec, prec))
}

// Total cancellation reports `u32::MAX`; then the precision is doubled instead.
fn next_precision(prec: u32, lost: u32, w: u32) -> u32 {
    if lost == u32::MAX {
        w.saturating_mul(2)
    } else {
        prec.saturating_add(lost).saturating_add(64)
    }
}

/// `Q^(l)(x)` with the working precision raised until `prec` bits survive cancellation.
pub fn q_at_adaptive(l: usize, x: &Float, params: &JPParams, prec: u32) -> Result<LinearFormEval> {
    let forms = type_i_normalized(l, params)?;
    let mut w = prec + 32;
    loop {
        let (c1, c2, lost) = eval_at(&forms, x, params, w);
        if lost.saturating_add(prec) <= w {
            return Ok(to_eval(x, c1, c2, lost, w, prec));
        }
        let next = next_precision(prec, lost, w);
        if next > MAX_WORKING_PREC || next <= w {
            return Err(Error::PrecisionLoss { bits_lost: lost, precision: w });
        }
        w = next;
    }
}

/// `Q^(l)(1)`: exact component sums divided by the masses, with adaptive precision.
pub fn q_at_one(l: usize, params: &JPParams, prec: u32) -> Result<LinearFormEval> {
    let (a1, a2) = type_i_normalized(l, params)?;
    let one = Rational::from(1);
    let s1 = a1.eval(&one);
    let s2 = a2.eval(&one);
    let mut w = prec + 32;
    loop {
        let (m1, m2) = beta_masses(params, w);
        let c1 = Float::with_val(w, &s1 / &m1);
        let c2 = Float::with_val(w, &s2 / &m2);
        let q = Float::with_val(w, &c1 + &c2);
        let big = if c1.cmp_abs(&c2) == Some(std::cmp::Ordering::Less) { &c2 } else { &c1 };
        let lost = cancellation_bits(&Float::with_val(w, big.abs_ref()), &q);
        if lost.saturating_add(prec) <= w {
            return Ok(to_eval(&Float::with_val(prec, 1), c1, c2, lost, w, prec));
        }
        let next = next_precision(prec, lost, w);
        if next > MAX_WORKING_PREC || next <= w {
            return Err(Error::PrecisionLoss { bits_lost: lost, precision: w });
        }
        w = next;
    }
}

/// `Q^(l)(1)` for `l = 0..len`, evaluated in parallel.
pub fn q_one_sequence(len: usize, params: &JPParams, prec: u32) -> Result<Vec<Float>> {
    (0..len)
        .into_par_iter()
        .map(|l| q_at_one(l, params, prec).map(|e| e.q_value))
        .collect()
}
