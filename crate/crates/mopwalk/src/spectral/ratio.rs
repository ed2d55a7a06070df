use rug::{Float, Rational};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::charpoly::char_poly;
use crate::error::{Error, Result};
use crate::jp::{b_one_sequence, q_at_one};
use crate::params::JPParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RatioKind {
    /// `B^(l+1)(1)/B^(l)(1)`
    B,
    /// `Q^(l+1)(1)/Q^(l)(1)`
    Q,
    /// `κ_{l+1}/κ_l`
    Kappa,
}

impl RatioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RatioKind::B => "B(1)",
            RatioKind::Q => "Q(1)",
            RatioKind::Kappa => "kappa",
        }
    }
}

/// Nodes used per parity class; spaced geometrically towards the largest index.
pub const RICHARDSON_POINTS: usize = 6;
/// Largest accepted disagreement between the parity estimates and the last two extrapolation orders.
pub const RATIO_TOL: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct RatioEstimate {
    pub kind: RatioKind,
    /// `(l, v_{l+1}/v_l)` at the sampled indices.
    pub table: Vec<(usize, Float)>,
    /// Extrapolated limit of the even- and odd-indexed ratios.
    pub parity_estimates: [Float; 2],
    pub estimate: Float,
    pub spread: Float,
    /// Nearest characteristic root (or 1 for `κ`).
    pub reference: Float,
    pub root_distance: Float,
}

impl RatioEstimate {
    pub fn to_json(&self) -> Value {
        let s = |x: &Float| x.to_string_radix(10, Some(25));
        json!({
            "kind": self.kind.as_str(),
            "estimate": s(&self.estimate),
            "parity_estimates": [s(&self.parity_estimates[0]), s(&self.parity_estimates[1])],
            "spread": self.spread.to_f64(),
            "reference": s(&self.reference),
            "root_distance": self.root_distance.to_f64(),
            "table": self.table.iter().map(|(l, r)| json!({"l": l, "ratio": s(r)})).collect::<Vec<_>>(),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,ratio\n");
        for (l, r) in &self.table {
            out.push_str(&format!("{l},{}\n", r.to_string_radix(10, Some(20))));
        }
        out
    }
}

/// Neville extrapolation of `(h_j, y_j)` to `h = 0`.
pub fn neville_at_zero(h: &[Float], y: &[Float], prec: u32) -> Float {
    let mut p: Vec<Float> = y.to_vec();
    let n = h.len();
    for k in 1..n {
        for i in 0..n - k {
            // P_{i..i+k}(0) = (h_{i+k} P_i - h_i P_{i+1}) / (h_{i+k} - h_i)
            let num = Float::with_val(prec, &h[i + k] * &p[i]) - Float::with_val(prec, &h[i] * &p[i + 1]);
            p[i] = num / Float::with_val(prec, &h[i + k] - &h[i]);
        }
    }
    p.swap_remove(0)
}

fn sample_indices(size: usize, parity: usize) -> Vec<usize> {
    let top = if (size - 1) % 2 == parity { size - 1 } else { size - 2 };
    let half = (top - parity) / 2;
    let mut out: Vec<usize> = (0..RICHARDSON_POINTS)
        .map(|j| 2 * ((half as f64) * 0.8f64.powi(j as i32)).round() as usize + parity)
        .collect();
    out.dedup();
    out
}

fn value(kind: RatioKind, l: usize, b: &[Rational], params: &JPParams, prec: u32) -> Result<Float> {
    Ok(match kind {
        RatioKind::B => Float::with_val(prec, &b[l]),
        RatioKind::Q => q_at_one(l, params, prec)?.q_value,
        RatioKind::Kappa => q_at_one(l, params, prec)?.q_value * &b[l],
    })
}

/// Consecutive-ratio limit of `B(1)`, `Q(1)` or `κ` from indices below `size`, accelerated
/// separately on each parity class.
pub fn ratio_asymptotics(kind: RatioKind, size: usize, params: &JPParams, prec: u32) -> Result<RatioEstimate> {
    if size < 40 {
        return Err(Error::InvalidParams(format!("ratio asymptotics needs size ≥ 40, got {size}")));
    }
    let w = prec + 64;
    let b = b_one_sequence(size + 1, params);
    let mut table = Vec::new();
    let mut parity_estimates = Vec::new();
    let mut spread = Float::with_val(w, 0);
    for parity in 0..2 {
        let idx = sample_indices(size, parity);
        let mut h = Vec::new();
        let mut y = Vec::new();
        for &l in &idx {
            let r = value(kind, l + 1, &b, params, w)? / value(kind, l, &b, params, w)?;
            table.push((l, Float::with_val(prec, &r)));
            h.push(Float::with_val(w, Float::with_val(w, l).recip_ref()));
            y.push(r);
        }
        let full = neville_at_zero(&h, &y, w);
        let lower = neville_at_zero(&h[..h.len() - 1], &y[..y.len() - 1], w);
        let d = Float::with_val(w, &full - &lower).abs();
        spread = spread.max(&d);
        parity_estimates.push(full);
    }
    let pe: [Float; 2] = [parity_estimates[0].clone(), parity_estimates[1].clone()];
    let gap = Float::with_val(w, &pe[0] - &pe[1]).abs();
    spread = spread.max(&gap);
    let estimate = Float::with_val(w, &pe[0] + &pe[1]) / 2u32;
    if !(spread <= RATIO_TOL) {
        return Err(Error::NoConvergence(spread.to_f64()));
    }
    table.sort_by_key(|(l, _)| *l);
    let reference = match kind {
        RatioKind::Kappa => Float::with_val(prec, 1),
        RatioKind::B | RatioKind::Q => {
            let c = char_poly(&Rational::from(1), prec)?;
            let c = if kind == RatioKind::Q { c.reciprocal()? } else { c };
            c.real_roots()
                .into_iter()
                .map(|r| r.re.clone())
                .min_by(|a, b| {
                    let da = Float::with_val(w, a - &estimate).abs();
                    let db = Float::with_val(w, b - &estimate).abs();
                    da.partial_cmp(&db).unwrap()
                })
                .expect("cubic has a real root")
        }
    };
    let root_distance = Float::with_val(prec, &estimate - &reference).abs();
    Ok(RatioEstimate {
        kind,
        table,
        parity_estimates: pe.map(|x| Float::with_val(prec, x)),
        estimate: Float::with_val(prec, estimate),
        spread: Float::with_val(prec, spread),
        reference,
        root_distance,
    })
}
