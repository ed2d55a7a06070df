use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use rug::{Float, Rational};

use crate::arith::{beta_mass, fmt_rational};
use crate::error::{Error, Result};

/// `K`-point Gauss rule for `x^a (1-x)^γ` on `[0, 1]`, with weights scaled to sum to 1.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<Float>,
    /// Normalized weights; multiply by `mass` for the raw weight.
    pub weights: Vec<Float>,
    pub mass: Float,
    pub a_exp: Rational,
    pub gamma: Rational,
    pub prec: u32,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(x_i)` against the unit-mass weight.
    pub fn integrate(&self, f: impl Fn(&Float) -> Float) -> Float {
        let mut acc = Float::with_val(self.prec, 0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += Float::with_val(self.prec, w * f(x));
        }
        acc
    }
}

/// Monic recurrence `p_{k+1} = (x - α_k) p_k - β_k p_{k-1}` for `x^a (1-x)^γ` on `[0, 1]`.
pub fn jacobi_recurrence(k_max: usize, a_exp: &Rational, gamma: &Rational) -> (Vec<Rational>, Vec<Rational>) {
    // (1-t)^A (1+t)^B on [-1, 1] with x = (1+t)/2
    let (ca, cb) = (gamma.clone(), a_exp.clone());
    let s = Rational::from(&ca + &cb);
    let diff2 = Rational::from(&cb * &cb) - Rational::from(&ca * &ca);
    let mut alpha = Vec::with_capacity(k_max);
    let mut beta = Vec::with_capacity(k_max);
    for k in 0..k_max {
        let kk = Rational::from(2 * k as u32) + &s;
        let a_k = if k == 0 {
            Rational::from(&cb - &ca) / (Rational::from(&s + 2u32))
        } else {
            diff2.clone() / (kk.clone() * (kk.clone() + 2u32))
        };
        let b_k = match k {
            0 => Rational::new(),
            1 => {
                4u32 * (Rational::from(&ca + 1u32)) * (Rational::from(&cb + 1u32))
                    / (Rational::from(&s + 2u32) * Rational::from(&s + 2u32) * Rational::from(&s + 3u32))
            }
            _ => {
                let kr = Rational::from(k as u32);
                4u32 * kr.clone()
                    * (kr.clone() + &ca)
                    * (kr.clone() + &cb)
                    * (kr + &s)
                    / (kk.clone() * &kk * (kk.clone() + 1u32) * (kk.clone() - 1u32))
            }
        };
        alpha.push((a_k + 1u32) / 2u32);
        beta.push(b_k / 4u32);
    }
    (alpha, beta)
}

fn initial_nodes(alpha: &[Rational], beta: &[Rational]) -> Vec<f64> {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i].to_f64();
        if i + 1 < k {
            let off = beta[i + 1].to_f64().sqrt();
            t[(i, i + 1)] = off;
            t[(i + 1, i)] = off;
        }
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(t).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

fn polish(
    x0: f64,
    alpha: &[Float],
    beta: &[Float],
    w: u32,
) -> Result<Float> {
    let mut x = Float::with_val(w, x0);
    let tol = Float::with_val(w, Float::i_exp(1, -(w as i32) + 24));
    for _ in 0..100 {
        let (mut p0, mut p1) = (Float::with_val(w, 0), Float::with_val(w, 1));
        let (mut d0, mut d1) = (Float::with_val(w, 0), Float::with_val(w, 0));
        for k in 0..alpha.len() {
            let xa = Float::with_val(w, &x - &alpha[k]);
            let p2 = Float::with_val(w, &xa * &p1) - Float::with_val(w, &beta[k] * &p0);
            let d2 = Float::with_val(w, &p1 + &xa * &d1) - Float::with_val(w, &beta[k] * &d0);
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
        }
        let dx = Float::with_val(w, &p1 / &d1);
        x -= &dx;
        if !x.is_finite() {
            break;
        }
        let scale = Float::with_val(w, x.abs_ref());
        if Float::with_val(w, dx.abs_ref()) <= Float::with_val(w, &tol * &scale) {
            return Ok(x);
        }
    }
    Err(Error::ConvergenceFailure(format!("Newton stalled near {x0:e}")))
}

fn build_rule(k: usize, a_exp: &Rational, gamma: &Rational, prec: u32) -> Result<QuadratureRule> {
    if *a_exp <= -1 || *gamma <= -1 || k == 0 {
        return Err(Error::InvalidParams(format!(
            "quadrature needs K ≥ 1 and exponents above -1, got K = {k}, a = {}, γ = {}",
            fmt_rational(a_exp),
            fmt_rational(gamma)
        )));
    }
    let w = prec + 32;
    let (alpha, beta) = jacobi_recurrence(k, a_exp, gamma);
    let af: Vec<Float> = alpha.iter().map(|v| Float::with_val(w, v)).collect();
    let bf: Vec<Float> = beta.iter().map(|v| Float::with_val(w, v)).collect();
    let sq: Vec<Float> = bf.iter().map(|v| Float::with_val(w, v.sqrt_ref())).collect();
    let guesses = initial_nodes(&alpha, &beta);
    let nodes: Vec<Float> = guesses
        .par_iter()
        .map(|&g| polish(g, &af, &bf, w))
        .collect::<Result<_>>()?;
    for pair in nodes.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::ConvergenceFailure("two nodes converged to the same root".into()));
        }
    }
    let weights: Vec<Float> = nodes
        .par_iter()
        .map(|x| {
            // orthonormal values against the unit-mass weight
            let mut sum = Float::with_val(w, 1);
            let mut p0 = Float::with_val(w, 0);
            let mut p1 = Float::with_val(w, 1);
            for j in 0..k - 1 {
                let xa = Float::with_val(w, x - &af[j]);
                let mut p2 = Float::with_val(w, &xa * &p1);
                if j > 0 {
                    p2 -= Float::with_val(w, &sq[j] * &p0);
                }
                p2 /= &sq[j + 1];
                sum += Float::with_val(w, p2.square_ref());
                p0 = p1;
                p1 = p2;
            }
            Float::with_val(prec, sum.recip_ref())
        })
        .collect();
    Ok(QuadratureRule {
        nodes: nodes.into_iter().map(|x| Float::with_val(prec, x)).collect(),
        weights,
        mass: beta_mass(a_exp, gamma, prec),
        a_exp: a_exp.clone(),
        gamma: gamma.clone(),
        prec,
    })
}

type RuleKey = (usize, Rational, Rational, u32);

fn cache() -> &'static RwLock<HashMap<RuleKey, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Cached Gauss–Jacobi rule with `K` nodes.
pub fn gauss_jacobi_rule(k: usize, a_exp: &Rational, gamma: &Rational, prec: u32) -> Result<Arc<QuadratureRule>> {
    let key = (k, a_exp.clone(), gamma.clone(), prec);
    if let Some(r) = cache().read().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(r));
    }
    let rule = Arc::new(build_rule(k, a_exp, gamma, prec)?);
    let mut guard = cache().write().expect("rule cache poisoned");
    Ok(Arc::clone(guard.entry(key).or_insert(rule)))
}
