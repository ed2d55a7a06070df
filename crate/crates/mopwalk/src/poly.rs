//! Dense univariate polynomials over exact rationals and over high-precision floats.

use std::fmt;

use rug::{Float, Rational};

use crate::arith::fmt_rational;

/// Coefficients in ascending degree; trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `x^k`
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Rational::new(); k + 1];
        c[k] = Rational::from(1);
        Self { coeffs: c }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == 1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Horner evaluation at working precision `prec`.
    pub fn eval_float(&self, x: &Float, prec: u32) -> Float {
        let mut acc = Float::with_val(prec, 0);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Sum of `|c_k x^k|`, the scale against which evaluation cancellation is measured.
    pub fn eval_abs_float(&self, x: &Float, prec: u32) -> Float {
        let ax = Float::with_val(prec, x.abs_ref());
        let mut acc = Float::with_val(prec, 0);
        for c in self.coeffs.iter().rev() {
            acc *= &ax;
            acc += Rational::from(c.abs_ref());
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| Rational::from(c * k as u32))
            .collect();
        Self::new(c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += Rational::from(a * b);
            }
        }
        Self::new(c)
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rational::new(); k];
        c.extend(self.coeffs.iter().cloned());
        Self::new(c)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::new(); self.coeffs.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let f = Rational::from(r.last().unwrap() / &lead);
            for (i, c) in d.coeffs.iter().enumerate() {
                r[k + i] -= Rational::from(&f * c);
            }
            q[k] = f;
            r.pop();
            while r.last().is_some_and(|c| *c == 0) {
                r.pop();
            }
        }
        (Self::new(q), Self::new(r))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        let l = a.leading();
        if l == 0 {
            a
        } else {
            a.scale(&Rational::from(l.recip_ref()))
        }
    }

    /// Sturm chain `p, p', -rem(p, p'), ...`.
    pub fn sturm_chain(&self) -> Vec<Self> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(&Rational::from(-1)));
        }
        chain
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_roots_in(&self, lo: &Rational, hi: &Rational) -> usize {
        let chain = self.sturm_chain();
        let variations = |x: &Rational| {
            let mut last = 0i32;
            let mut v = 0usize;
            for p in &chain {
                let s = p.eval(x).cmp0() as i32;
                if s != 0 {
                    if last != 0 && s != last {
                        v += 1;
                    }
                    last = s;
                }
            }
            v
        };
        variations(lo).saturating_sub(variations(hi))
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).degree().unwrap_or(0) == 0
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(fmt_rational).collect()
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " {} ", if *c < 0 { '-' } else { '+' })?;
            } else if *c < 0 {
                write!(f, "-")?;
            }
            first = false;
            let a = Rational::from(c.abs_ref());
            match (k, a == 1) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a} x")?,
                (_, true) => write!(f, "x^{k}")?,
                (_, false) => write!(f, "{a} x^{k}")?,
            }
        }
        Ok(())
    }
}

/// Float coefficients in ascending degree at a fixed precision.
#[derive(Clone, Debug)]
pub struct HighPrecPoly {
    pub coeffs: Vec<Float>,
    pub prec: u32,
}

impl HighPrecPoly {
    pub fn from_rational(p: &RationalPoly, scale: &Float, prec: u32) -> Self {
        let coeffs = p
            .coeffs()
            .iter()
            .map(|c| Float::with_val(prec, c * scale))
            .collect();
        Self { coeffs, prec }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Float> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Float) -> Float {
        let mut acc = Float::with_val(self.prec, 0);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }
}
