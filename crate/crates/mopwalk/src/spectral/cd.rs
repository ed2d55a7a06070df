use rug::ops::Pow;
use rug::{Float, Rational};
use serde_json::{json, Value};

use crate::arith::fmt_rational;
use crate::error::{Error, Result};
use crate::jp::{beta_masses, jacobi_band, type_i_normalized, type_ii_seq};
use crate::params::JPParams;
use crate::poly::RationalPoly;

/// Residuals of the Christoffel–Darboux identity, its regularity form and its confluent form.
#[derive(Clone, Debug)]
pub struct CdResiduals {
    pub n: usize,
    pub x: Rational,
    pub y: Rational,
    pub cd: Float,
    pub regularity: Float,
    pub confluent: Float,
    /// `K^(n)(x, x)`.
    pub kernel_diag: Float,
    /// Whether every weight component vanished in exact arithmetic.
    pub exact_zero: bool,
}

impl CdResiduals {
    pub fn max_residual(&self) -> Float {
        self.cd.clone().max(&self.regularity).max(&self.confluent)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "x": fmt_rational(&self.x),
            "y": fmt_rational(&self.y),
            "cd": self.cd.to_f64(),
            "regularity": self.regularity.to_f64(),
            "confluent": self.confluent.to_f64(),
            "kernel_diag": self.kernel_diag.to_string_radix(10, Some(25)),
            "exact_zero": self.exact_zero,
        })
    }
}

/// Checks, with `K^(n)(x,y) = Σ_{m<n} B^(m)(y) Q^(m)(x)`,
///
/// (y-x) K = Q^(n-1)(x) B^(n)(y) - Q^(n)(x) (J_{n,n-2} B^(n-2)(y) + J_{n,n-1} B^(n-1)(y))
///           - Q^(n+1)(x) J_{n+1,n-1} B^(n-1)(y),
///
/// its value at `y = x` (regularity) and its `y`-derivative at `y = x` (confluent form).
pub fn cd_checks(n: usize, x: &Rational, y: &Rational, params: &JPParams, prec: u32) -> Result<CdResiduals> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("Christoffel–Darboux checks need n ≥ 2, got {n}")));
    }
    if *x <= 0 {
        return Err(Error::InvalidParams("the linear forms are evaluated at x > 0".into()));
    }
    let b: Vec<RationalPoly> = (0..=n).map(|l| type_ii_seq(l, params)).collect::<Result<_>>()?;
    let db: Vec<RationalPoly> = b.iter().map(RationalPoly::derivative).collect();
    let q: Vec<(RationalPoly, RationalPoly)> =
        (0..=n + 1).map(|l| type_i_normalized(l, params)).collect::<Result<_>>()?;
    let j = jacobi_band(n + 3, params)?;
    let (j0, j1, j2) = (j.get(n, n - 2), j.get(n, n - 1), j.get(n + 1, n - 1));

    let w = prec + 64;
    let (m1, m2) = beta_masses(params, w);
    let mut totals = [Float::with_val(w, 0), Float::with_val(w, 0), Float::with_val(w, 0), Float::with_val(w, 0)];
    let mut exact_zero = true;
    for (a, (mass, e)) in [(&m1, &params.alpha), (&m2, &params.beta)].into_iter().enumerate() {
        let qa: Vec<Rational> = q
            .iter()
            .map(|pair| if a == 0 { pair.0.eval(x) } else { pair.1.eval(x) })
            .collect();
        let kernel = |yy: &Rational| -> Rational {
            (0..n).map(|m| b[m].eval(yy) * &qa[m]).sum()
        };
        let rhs = |p: &[RationalPoly], yy: &Rational| -> Rational {
            let lo = p[n - 1].eval(yy);
            Rational::from(&qa[n - 1] * p[n].eval(yy))
                - Rational::from(&qa[n] * (Rational::from(j0 * p[n - 2].eval(yy)) + Rational::from(j1 * &lo)))
                - Rational::from(&qa[n + 1] * Rational::from(j2 * &lo))
        };
        let kd = kernel(x);
        let parts = [
            Rational::from(y - x) * kernel(y) - rhs(&b, y),
            rhs(&b, x),
            Rational::from(&kd - rhs(&db, x)),
            kd,
        ];
        exact_zero &= parts[..3].iter().all(|v| *v == 0);
        let xe = Float::with_val(w, x).pow(&Float::with_val(w, e));
        let factor = xe / mass;
        for (t, v) in totals.iter_mut().zip(&parts) {
            *t += Float::with_val(w, &factor * v);
        }
    }
    let [cd, reg, conf, kd] = totals;
    Ok(CdResiduals {
        n,
        x: x.clone(),
        y: y.clone(),
        cd: Float::with_val(prec, cd.abs()),
        regularity: Float::with_val(prec, reg.abs()),
        confluent: Float::with_val(prec, conf.abs()),
        kernel_diag: Float::with_val(prec, kd),
        exact_zero,
    })
}
