use rug::{Float, Rational};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::km::MAX_NODES;
use super::quadrature::gauss_jacobi_rule;
use crate::arith::fmt_rational;
use crate::error::Result;
use crate::params::JPParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Recurrent,
    Transient,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Recurrent => "recurrent",
            Verdict::Transient => "transient",
        }
    }
}

/// Analytic verdict plus a node-refinement study of `∫ w_1/(1-x) dμ`.
#[derive(Clone, Debug)]
pub struct Classification {
    pub verdict: Verdict,
    /// `(K, value)` for `K = 8, 16, …, 512`.
    pub diagnostic: Vec<(usize, Float)>,
    /// Relative change between the last two refinements.
    pub last_change: Float,
    pub stabilized: bool,
    /// Rule weight used for the study, as `(exponent at 0, exponent at 1)`.
    pub rule_signature: (Rational, Rational),
}

pub const STABLE_TOL: f64 = 1e-8;

impl Classification {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.as_str(),
            "stabilized": self.stabilized,
            "last_change": self.last_change.to_f64(),
            "rule_signature": [fmt_rational(&self.rule_signature.0), fmt_rational(&self.rule_signature.1)],
            "diagnostic": self.diagnostic.iter()
                .map(|(k, v)| json!({"nodes": k, "value": v.to_string_radix(10, Some(20))}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Both chains at `λ = 1` are recurrent iff `∫ w_1/(1-x) dμ` diverges, i.e. iff `γ ≤ 0`.
///
/// When `γ > 0` the factor `(1-x)^{γ-1}` is integrable and goes into the rule weight; otherwise
/// the `(α, γ)` rule is applied to `1/(1-x)` and the values grow with `K`.
pub fn classify(params: &JPParams, prec: u32) -> Result<Classification> {
    let verdict = if params.gamma <= 0 { Verdict::Recurrent } else { Verdict::Transient };
    let absorbed = params.gamma > 0;
    let g_rule = if absorbed { Rational::from(&params.gamma - 1u32) } else { params.gamma.clone() };
    let mut diagnostic = Vec::new();
    let mut k = 8;
    while k <= MAX_NODES {
        let rule = gauss_jacobi_rule(k, &params.alpha, &g_rule, prec)?;
        let v = if absorbed {
            rule.integrate(|_| Float::with_val(prec, 1))
        } else {
            rule.integrate(|x| {
                let d = Float::with_val(prec, 1) - x;
                Float::with_val(prec, d.recip_ref())
            })
        };
        diagnostic.push((k, v * &rule.mass));
        k *= 2;
    }
    let n = diagnostic.len();
    let last = &diagnostic[n - 1].1;
    let diff = Float::with_val(prec, last - &diagnostic[n - 2].1).abs();
    let last_change = diff / Float::with_val(prec, last.abs_ref());
    let stabilized = last_change <= STABLE_TOL;
    Ok(Classification { verdict, diagnostic, last_change, stabilized, rule_signature: (params.alpha.clone(), g_rule) })
}
