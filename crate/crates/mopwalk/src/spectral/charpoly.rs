use std::cmp::Ordering;

use rug::float::Constant;
use rug::{Float, Rational};
use serde_json::{json, Value};

use crate::arith::fmt_rational;
use crate::error::{Error, Result};
use crate::jp::asymptotic_coeffs;

/// A root with multiplicity; `exact` is set when the root is rational.
#[derive(Clone, Debug)]
pub struct Root {
    pub re: Float,
    pub im: Float,
    pub multiplicity: usize,
    pub exact: Option<Rational>,
}

impl Root {
    fn real(x: Float, multiplicity: usize) -> Self {
        let p = x.prec();
        Self { re: x, im: Float::with_val(p, 0), multiplicity, exact: None }
    }

    fn rational(r: Rational, multiplicity: usize, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, &r),
            im: Float::with_val(prec, 0),
            multiplicity,
            exact: Some(r),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "re": self.re.to_string_radix(10, Some(30)),
            "im": self.im.to_string_radix(10, Some(30)),
            "multiplicity": self.multiplicity,
            "exact": self.exact.as_ref().map(fmt_rational),
        })
    }
}

/// Cubic `Σ coeffs[k] r^k` with its roots.
#[derive(Clone, Debug)]
pub struct CharPoly {
    /// Ascending coefficients.
    pub coeffs: Vec<Rational>,
    pub roots: Vec<Root>,
    pub prec: u32,
}

/// Quotient by a linear factor.
#[derive(Clone, Debug)]
pub struct Depressed {
    /// Ascending coefficients.
    pub coeffs: Vec<Rational>,
    pub remainder: Rational,
}

pub const DIVISION_TOL: f64 = 1e-30;

/// `φ(r) = κ³ + 3κ² r + (3κ - λ) r² + r³` for the limiting Jacobi–Piñeiro band.
pub fn char_poly(lambda: &Rational, prec: u32) -> Result<CharPoly> {
    let (c0, c1, c2) = asymptotic_coeffs();
    let coeffs = vec![c2, c1, Rational::from(&c0 - lambda), Rational::from(1)];
    CharPoly::from_coeffs(coeffs, prec)
}

impl CharPoly {
    pub fn from_coeffs(coeffs: Vec<Rational>, prec: u32) -> Result<Self> {
        if coeffs.len() != 4 || coeffs[3] == 0 || coeffs[0] == 0 {
            return Err(Error::InvalidParams("expected a cubic with nonzero constant term".into()));
        }
        let lead = coeffs[3].clone();
        let monic: Vec<Rational> = coeffs.iter().map(|c| Rational::from(c / &lead)).collect();
        let roots = cubic_roots(&monic[0], &monic[1], &monic[2], prec);
        Ok(Self { coeffs, roots, prec })
    }

    pub fn eval_float(&self, x: &Float, y: &Float) -> (Float, Float) {
        let p = self.prec + 32;
        let (mut re, mut im) = (Float::with_val(p, 0), Float::with_val(p, 0));
        for c in self.coeffs.iter().rev() {
            let nre = Float::with_val(p, &re * x) - Float::with_val(p, &im * y) + c;
            let nim = Float::with_val(p, &re * y) + Float::with_val(p, &im * x);
            re = nre;
            im = nim;
        }
        (re, im)
    }

    /// Largest `|φ(root)|` over the stored roots.
    pub fn max_residual(&self) -> Float {
        let mut worst = Float::with_val(self.prec, 0);
        for r in &self.roots {
            let (a, b) = self.eval_float(&r.re, &r.im);
            let m = Float::with_val(self.prec, a.hypot_ref(&b));
            if m > worst {
                worst = m;
            }
        }
        worst
    }

    /// `r^{N+1} φ(1/r)`, whose roots are the reciprocals of those of `φ`.
    pub fn reciprocal(&self) -> Result<CharPoly> {
        let mut c = self.coeffs.clone();
        c.reverse();
        CharPoly::from_coeffs(c, self.prec)
    }

    /// `-φ(r)/(r - root)`.
    pub fn depressed(&self, root: &Rational) -> Result<Depressed> {
        let (q, rem) = divide_linear(&self.coeffs, &Rational::from(-root), &Rational::from(1));
        finish(q, rem)
    }

    /// `-φ*(r)/(1 - root·r)` with `φ*` the reciprocal polynomial.
    pub fn depressed_dual(&self, root: &Rational) -> Result<Depressed> {
        let mut c = self.coeffs.clone();
        c.reverse();
        let (q, rem) = divide_linear(&c, &Rational::from(1), &Rational::from(-root));
        finish(q, rem)
    }

    pub fn real_roots(&self) -> Vec<&Root> {
        self.roots.iter().filter(|r| r.is_real()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "coefficients": self.coeffs.iter().map(fmt_rational).collect::<Vec<_>>(),
            "roots": self.roots.iter().map(Root::to_json).collect::<Vec<_>>(),
            "max_residual": self.max_residual().to_f64(),
        })
    }
}

fn finish(q: Vec<Rational>, rem: Rational) -> Result<Depressed> {
    let scale = q.iter().map(|c| c.clone().abs()).max().unwrap_or_default().max(Rational::from(1));
    let rel = Rational::from(&rem / &scale).abs();
    if rel.to_f64() > DIVISION_TOL {
        return Err(Error::InexactDivision(rem.to_f64()));
    }
    Ok(Depressed { coeffs: q.into_iter().map(|c| -c).collect(), remainder: rem })
}

/// Divides `Σ c_k r^k` by `a0 + a1 r`; returns ascending quotient and remainder.
fn divide_linear(c: &[Rational], a0: &Rational, a1: &Rational) -> (Vec<Rational>, Rational) {
    let deg = c.len() - 1;
    let mut work: Vec<Rational> = c.to_vec();
    let mut q = vec![Rational::new(); deg];
    for k in (1..=deg).rev() {
        let t = Rational::from(&work[k] / a1);
        work[k - 1] -= Rational::from(&t * a0);
        q[k - 1] = t;
    }
    (q, work[0].clone())
}

fn newton_polish(x: Float, p: &[Rational; 3]) -> Float {
    let w = x.prec();
    let f = |x: &Float| {
        let mut v = Float::with_val(w, 1);
        let mut d = Float::with_val(w, 0);
        for c in p.iter().rev() {
            d = Float::with_val(w, &d * x) + &v;
            v = Float::with_val(w, &v * x) + c;
        }
        (v, d)
    };
    let (v, d) = f(&x);
    if d.is_zero() {
        return x;
    }
    x - v / d
}

/// Roots of the monic cubic `r³ + c2 r² + c1 r + c0`.
fn cubic_roots(c0: &Rational, c1: &Rational, c2: &Rational, prec: u32) -> Vec<Root> {
    let (b, c, d) = (c2, c1, c0);
    let b2 = Rational::from(b * b);
    let disc = 18u32 * Rational::from(b * c) * d - 4u32 * Rational::from(&b2 * b) * d + Rational::from(&b2 * c) * c
        - 4u32 * Rational::from(c * c) * c
        - 27u32 * Rational::from(d * d);
    let delta0 = Rational::from(&b2 - 3u32 * c.clone());
    if disc == 0 {
        if delta0 == 0 {
            return vec![Root::rational(Rational::from(-b) / 3u32, 3, prec)];
        }
        let double = (9u32 * d.clone() - Rational::from(b * c)) / (2u32 * delta0.clone());
        let simple = (4u32 * Rational::from(b * c) - 9u32 * d.clone() - Rational::from(&b2 * b)) / delta0;
        return vec![Root::rational(double, 2, prec), Root::rational(simple, 1, prec)];
    }
    let w = prec + 64;
    let poly = [d.clone(), c.clone(), b.clone()];
    // t = r + b/3: t³ + p t + q
    let p = Rational::from(c - Rational::from(&b2 / 3u32));
    let q = 2u32 * Rational::from(&b2 * b) / 27u32 - Rational::from(b * c) / 3u32 + d;
    let shift = Float::with_val(w, Rational::from(b / 3u32));
    let pf = Float::with_val(w, &p);
    let qf = Float::with_val(w, &q);
    if disc.cmp0() == Ordering::Greater {
        let m = Float::with_val(w, -pf.clone() / 3u32).sqrt();
        let neg3p = Float::with_val(w, -3i32) / &pf;
        let arg = Float::with_val(w, &qf * 3u32) / Float::with_val(w, &pf * 2u32) * neg3p.sqrt();
        let theta = arg.clamp(&-1i32, &1i32).acos() / 3u32;
        let two_pi_3 = Float::with_val(w, Constant::Pi) * 2u32 / 3u32;
        let mut roots: Vec<Root> = (0..3u32)
            .map(|k| {
                let t = Float::with_val(w, &theta - Float::with_val(w, &two_pi_3 * k)).cos() * Float::with_val(w, &m * 2u32);
                let r = newton_polish(t - &shift, &poly);
                Root::real(Float::with_val(prec, &r), 1)
            })
            .collect();
        roots.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap_or(Ordering::Equal));
        return roots;
    }
    let s = Float::with_val(w, Float::with_val(w, &qf * &qf) / 4u32 + Float::with_val(w, &pf * &pf) * &pf / 27u32).sqrt();
    let half_q = Float::with_val(w, &qf / 2u32);
    let cbrt = |v: Float| v.cbrt();
    let u = cbrt(Float::with_val(w, -half_q.clone() + &s));
    let v = cbrt(Float::with_val(w, -half_q - &s));
    let real = newton_polish(Float::with_val(w, &u + &v) - &shift, &poly);
    let re = Float::with_val(w, -(Float::with_val(w, &u + &v)) / 2u32) - &shift;
    let im = Float::with_val(w, &u - &v) * Float::with_val(w, 3u32).sqrt() / 2u32;
    vec![
        Root::real(Float::with_val(prec, &real), 1),
        Root { re: Float::with_val(prec, &re), im: Float::with_val(prec, &im), multiplicity: 1, exact: None },
        Root { re: Float::with_val(prec, &re), im: Float::with_val(prec, -im), multiplicity: 1, exact: None },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn double_root_at_unit_lambda() {
        let c = char_poly(&int(1), 256).unwrap();
        assert_eq!(c.roots.len(), 2);
        assert_eq!(c.roots[0].exact, Some(rat(8, 27)));
        assert_eq!(c.roots[0].multiplicity, 2);
        assert_eq!(c.roots[1].exact, Some(rat(-1, 27)));
        assert!(c.max_residual() < 1e-70);
        let r = c.reciprocal().unwrap();
        let exact: Vec<_> = r.roots.iter().map(|x| (x.exact.clone().unwrap(), x.multiplicity)).collect();
        assert_eq!(exact, vec![(rat(27, 8), 2), (int(-27), 1)]);
    }

    #[test]
    fn depressed_forms() {
        let c = char_poly(&int(1), 256).unwrap();
        let d = c.depressed_dual(&rat(8, 27)).unwrap();
        assert_eq!(d.remainder, 0);
        // -(1 - 8r/27)(1 + r/27)
        assert_eq!(d.coeffs, vec![int(-1), rat(7, 27), rat(8, 729)]);
        let e = c.depressed(&rat(-1, 27)).unwrap();
        assert_eq!(e.coeffs, vec![rat(-64, 729), rat(16, 27), int(-1)]);
        assert!(matches!(c.depressed(&int(1)), Err(Error::InexactDivision(_))));
    }

    #[test]
    fn three_real_and_complex_cases() {
        for lam in [rat(2, 1), rat(1, 2), rat(1, 100)] {
            let c = char_poly(&lam, 256).unwrap();
            assert_eq!(c.roots.len(), 3);
            assert!(c.max_residual() < 1e-60, "λ = {lam}: {}", c.max_residual());
        }
    }
}
