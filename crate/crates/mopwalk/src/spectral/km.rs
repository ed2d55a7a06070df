use std::sync::Arc;

use rayon::prelude::*;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_jacobi_rule, QuadratureRule};
use crate::arith::log2_abs;
use crate::error::{Error, Result};
use crate::jp::{b_one_sequence, q_at_one, type_i_normalized, type_ii_seq};
use crate::params::JPParams;
use crate::poly::RationalPoly;

/// Which of the two dual chains a probability refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChainType {
    TypeII,
    TypeI,
}

/// Exact polynomial data for indices `0..=max_index`.
struct Families {
    b: Vec<RationalPoly>,
    q: Vec<(RationalPoly, RationalPoly)>,
    guard: u32,
}

fn coeff_bits(p: &RationalPoly) -> i64 {
    let top = p.coeffs().iter().map(log2_abs).max().unwrap_or(0);
    top + (p.coeffs().len() as f64).log2().ceil() as i64 + 1
}

impl Families {
    fn new(max_index: usize, params: &JPParams) -> Result<Self> {
        let b: Vec<RationalPoly> = (0..=max_index)
            .into_par_iter()
            .map(|l| type_ii_seq(l, params))
            .collect::<Result<_>>()?;
        let q: Vec<(RationalPoly, RationalPoly)> = (0..=max_index)
            .into_par_iter()
            .map(|l| type_i_normalized(l, params))
            .collect::<Result<_>>()?;
        // Horner on [0, 1] loses at most log2 Σ|c_i| bits per factor
        let gb = b.iter().map(coeff_bits).max().unwrap_or(0).max(0);
        let gq = q
            .iter()
            .flat_map(|(a1, a2)| [coeff_bits(a1), coeff_bits(a2)])
            .max()
            .unwrap_or(0)
            .max(0);
        Ok(Self { b, q, guard: (gb + gq) as u32 + 32 })
    }

    fn max_degree(&self) -> usize {
        let db = self.b.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
        let dq = self
            .q
            .iter()
            .flat_map(|(a1, a2)| [a1.degree(), a2.degree()])
            .flatten()
            .max()
            .unwrap_or(0);
        db + dq
    }

    fn component(&self, m: usize, a: usize) -> &RationalPoly {
        if a == 0 {
            &self.q[m].0
        } else {
            &self.q[m].1
        }
    }
}

/// Values of every family member at the nodes of one rule.
struct NodeTable {
    rule: Arc<QuadratureRule>,
    b: Vec<Vec<Float>>,
    q: Vec<Vec<Float>>,
}

impl NodeTable {
    fn new(fam: &Families, a: usize, rule: Arc<QuadratureRule>, w: u32) -> Self {
        let b = fam
            .b
            .par_iter()
            .map(|p| rule.nodes.iter().map(|x| p.eval_float(x, w)).collect())
            .collect();
        let q = (0..fam.q.len())
            .into_par_iter()
            .map(|m| {
                let p = fam.component(m, a);
                rule.nodes.iter().map(|x| p.eval_float(x, w)).collect()
            })
            .collect();
        Self { rule, b, q }
    }

    /// `Σ_i w_i f(x_i) B^(n)(x_i) Â^(m)(x_i)`.
    fn pair(&self, n: usize, m: usize, f: impl Fn(usize) -> Float, w: u32) -> Float {
        let mut acc = Float::with_val(w, 0);
        for i in 0..self.rule.len() {
            let t = Float::with_val(w, &self.b[n][i] * &self.q[m][i]);
            let t = Float::with_val(w, &t * &self.rule.weights[i]);
            acc += t * f(i);
        }
        acc
    }
}

fn rules_for(params: &JPParams, k: usize, w: u32) -> Result<[Arc<QuadratureRule>; 2]> {
    Ok([
        gauss_jacobi_rule(k, &params.alpha, &params.gamma, w)?,
        gauss_jacobi_rule(k, &params.beta, &params.gamma, w)?,
    ])
}

/// `r`-step transition probabilities of both chains at `λ = 1` through the integral
/// representation, exact by Gauss–Jacobi quadrature on each weight component.
pub struct KmEngine {
    max_index: usize,
    max_power: usize,
    prec: u32,
    work: u32,
    b_one: Vec<Rational>,
    q_one: Vec<Float>,
    tables: [NodeTable; 2],
    powers: [Vec<Vec<Float>>; 2],
}

impl KmEngine {
    pub fn new(params: &JPParams, max_index: usize, max_power: usize, prec: u32) -> Result<Self> {
        let fam = Families::new(max_index, params)?;
        let work = prec + fam.guard;
        let k = (fam.max_degree() + max_power) / 2 + 1;
        let rules = rules_for(params, k, work)?;
        let q_one: Vec<Float> = (0..=max_index)
            .into_par_iter()
            .map(|l| q_at_one(l, params, work).map(|e| e.q_value))
            .collect::<Result<_>>()?;
        for (l, q) in q_one.iter().enumerate() {
            if *q <= 0 {
                return Err(Error::NonpositiveValue(l));
            }
        }
        let [r1, r2] = rules;
        let tables = [NodeTable::new(&fam, 0, r1, work), NodeTable::new(&fam, 1, r2, work)];
        let powers = [0, 1].map(|a| {
            let nodes = &tables[a].rule.nodes;
            let mut out = vec![vec![Float::with_val(work, 1); nodes.len()]];
            for r in 1..=max_power {
                let next = out[r - 1]
                    .iter()
                    .zip(nodes)
                    .map(|(p, x)| Float::with_val(work, p * x))
                    .collect();
                out.push(next);
            }
            out
        });
        Ok(Self {
            max_index,
            max_power,
            prec,
            work,
            b_one: b_one_sequence(max_index + 1, params),
            q_one,
            tables,
            powers,
        })
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn max_power(&self) -> usize {
        self.max_power
    }

    pub fn working_precision(&self) -> u32 {
        self.work
    }

    /// `∫ x^r B^(n) Q^(m) dμ`.
    pub fn moment(&self, n: usize, m: usize, r: usize) -> Float {
        self.check(n, m, r);
        let mut acc = Float::with_val(self.work, 0);
        for a in 0..2 {
            let pw = &self.powers[a][r];
            acc += self.tables[a].pair(n, m, |i| pw[i].clone(), self.work);
        }
        acc
    }

    /// `(P^r)_{nm}` of the chosen chain.
    pub fn transition(&self, chain: ChainType, n: usize, m: usize, r: usize) -> Float {
        let v = match chain {
            ChainType::TypeII => {
                let ratio = Rational::from(&self.b_one[m] / &self.b_one[n]);
                self.moment(n, m, r) * ratio
            }
            ChainType::TypeI => {
                let ratio = Float::with_val(self.work, &self.q_one[m] / &self.q_one[n]);
                self.moment(m, n, r) * ratio
            }
        };
        Float::with_val(self.prec, v)
    }

    fn check(&self, n: usize, m: usize, r: usize) {
        assert!(
            n <= self.max_index && m <= self.max_index && r <= self.max_power,
            "({n}, {m}, {r}) outside the engine range ({}, {})",
            self.max_index,
            self.max_power
        );
    }
}

/// `(P_II^r)_{nm}` at `λ = 1`.
pub fn km_transition(n: usize, m: usize, r: usize, params: &JPParams, prec: u32) -> Result<Float> {
    let e = KmEngine::new(params, n.max(m), r, prec)?;
    Ok(e.transition(ChainType::TypeII, n, m, r))
}

/// `(P_I^r)_{nm}` at `λ = 1`.
pub fn km_transition_type_i(n: usize, m: usize, r: usize, params: &JPParams, prec: u32) -> Result<Float> {
    let e = KmEngine::new(params, n.max(m), r, prec)?;
    Ok(e.transition(ChainType::TypeI, n, m, r))
}

/// A quadrature value obtained by node doubling.
#[derive(Clone, Debug)]
pub struct RefinedValue {
    pub value: Float,
    /// `|v_K - v_{K/2}|` at the final `K`.
    pub change: Float,
    pub nodes: usize,
}

pub const REFINE_TOL: f64 = 1e-10;
pub const MAX_NODES: usize = 512;

/// Doubles the node count until successive values agree to `tol`, starting from `k0`.
pub(crate) fn refine(
    k0: usize,
    tol: f64,
    prec: u32,
    eval: impl Fn(usize) -> Result<Float>,
) -> Result<RefinedValue> {
    let mut k = k0.max(4);
    let mut prev = eval(k)?;
    while k < MAX_NODES {
        k = (2 * k).min(MAX_NODES);
        let v = eval(k)?;
        let change = Float::with_val(prec, &v - &prev).abs();
        let scale = Float::with_val(prec, v.abs_ref()).max(&Float::with_val(prec, 1));
        if change <= Float::with_val(prec, &scale * tol) {
            return Ok(RefinedValue { value: v, change, nodes: k });
        }
        prev = v;
        if k == MAX_NODES {
            return Err(Error::SlowConvergence {
                value: prev.to_f64(),
                bound: change.to_f64(),
                nodes: k,
            });
        }
    }
    Err(Error::SlowConvergence { value: prev.to_f64(), bound: f64::INFINITY, nodes: k })
}

/// `P_{nm}(s) = Σ_r s^r (P^r)_{nm}` through the `1/(1 - s x)` kernel.
pub fn generating_fn(
    chain: ChainType,
    n: usize,
    m: usize,
    s: &Float,
    params: &JPParams,
    prec: u32,
) -> Result<RefinedValue> {
    if Float::with_val(prec, s.abs_ref()) >= 1 {
        return Err(Error::InvalidParams(format!("generating function needs |s| < 1, got {s}")));
    }
    let (row, col) = match chain {
        ChainType::TypeII => (n, m),
        ChainType::TypeI => (m, n),
    };
    let fam = Families::new(n.max(m), params)?;
    let work = prec + fam.guard;
    let prefactor = match chain {
        ChainType::TypeII => {
            let b = b_one_sequence(n.max(m) + 1, params);
            Float::with_val(work, Rational::from(&b[m] / &b[n]))
        }
        ChainType::TypeI => {
            let qm = q_at_one(m, params, work)?.q_value;
            let qn = q_at_one(n, params, work)?.q_value;
            Float::with_val(work, &qm / &qn)
        }
    };
    let k0 = fam.max_degree() / 2 + 1;
    let mut out = refine(k0, REFINE_TOL, work, |k| {
        let rules = rules_for(params, k, work)?;
        let mut acc = Float::with_val(work, 0);
        for (a, rule) in rules.into_iter().enumerate() {
            let kern: Vec<Float> = rule
                .nodes
                .iter()
                .map(|x| {
                    let d = Float::with_val(work, 1) - Float::with_val(work, s * x);
                    Float::with_val(work, d.recip_ref())
                })
                .collect();
            let bp = &fam.b[row];
            let qp = fam.component(col, a);
            for (i, x) in rule.nodes.iter().enumerate() {
                let t = Float::with_val(work, bp.eval_float(x, work) * qp.eval_float(x, work));
                let t = Float::with_val(work, &t * &rule.weights[i]);
                acc += t * &kern[i];
            }
        }
        Ok(acc * &prefactor)
    })?;
    out.value.set_prec(prec);
    Ok(out)
}

/// First-passage generating function: `F_nn = 1 - 1/P_nn`, `F_nm = P_nm / P_mm`.
pub fn first_passage_fn(
    chain: ChainType,
    n: usize,
    m: usize,
    s: &Float,
    params: &JPParams,
    prec: u32,
) -> Result<Float> {
    let pmm = generating_fn(chain, m, m, s, params, prec)?.value;
    if n == m {
        Ok(Float::with_val(prec, 1) - Float::with_val(prec, pmm.recip_ref()))
    } else {
        let pnm = generating_fn(chain, n, m, s, params, prec)?.value;
        Ok(Float::with_val(prec, &pnm / &pmm))
    }
}

/// `(s, F_00(s))` rows for plotting.
pub fn first_passage_curve_csv(chain: ChainType, points: &[f64], params: &JPParams, prec: u32) -> Result<String> {
    let mut out = String::from("s,F00\n");
    for &s in points {
        let f = first_passage_fn(chain, 0, 0, &Float::with_val(prec, s), params, prec)?;
        out.push_str(&format!("{s},{}\n", f.to_string_radix(10, Some(20))));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::band::{dense_mul, dense_pow};
    use crate::markov::{jp_stochastic_i, jp_stochastic_ii};

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        Float::with_val(a.prec(), a - b).abs() <= tol
    }

    #[test]
    fn zero_and_one_steps() {
        let p = JPParams::recurrent_example();
        let e = KmEngine::new(&p, 6, 1, 256).unwrap();
        let pii = jp_stochastic_ii(12, &p).unwrap();
        let pi = jp_stochastic_i(12, &p, 256).unwrap();
        for n in 0..=6 {
            for m in 0..=6 {
                let d = if n == m { 1.0 } else { 0.0 };
                for c in [ChainType::TypeII, ChainType::TypeI] {
                    assert!(close(&e.transition(c, n, m, 0), &Float::with_val(256, d), 1e-40));
                }
                let one = e.transition(ChainType::TypeII, n, m, 1);
                assert!(close(&one, &Float::with_val(256, pii.get(n, m)), 1e-40));
                assert!(close(&e.transition(ChainType::TypeI, n, m, 1), pi.get(n, m), 1e-40));
            }
        }
        assert!(close(&km_transition(0, 0, 1, &p, 128).unwrap(), &Float::with_val(128, rat(3, 5)), 1e-30));
    }

    #[test]
    fn four_steps_match_matrix_power() {
        let p = JPParams::transient_example();
        let pii = jp_stochastic_ii(30, &p).unwrap();
        let pow = dense_pow(&pii.to_dense(), 4);
        let e = KmEngine::new(&p, 6, 4, 256).unwrap();
        for n in 0..=6 {
            for m in 0..=6 {
                let want = Float::with_val(256, &pow[n][m]);
                assert!(close(&e.transition(ChainType::TypeII, n, m, 4), &want, 1e-40), "({n}, {m})");
            }
        }
        let _ = dense_mul(&pow, &pow);
    }

    #[test]
    fn generating_function_at_zero_and_identity() {
        let p = JPParams::recurrent_example();
        let zero = Float::with_val(128, 0);
        let v = generating_fn(ChainType::TypeII, 0, 0, &zero, &p, 128).unwrap().value;
        assert!(close(&v, &Float::with_val(128, 1), 1e-30));
        let f = first_passage_fn(ChainType::TypeII, 1, 0, &zero, &p, 128).unwrap();
        assert!(f.is_zero() || f.abs() < 1e-30);
        let s = Float::with_val(128, 0.6);
        let pjj = generating_fn(ChainType::TypeI, 2, 2, &s, &p, 128).unwrap().value;
        let fjj = first_passage_fn(ChainType::TypeI, 2, 2, &s, &p, 128).unwrap();
        let rhs = Float::with_val(128, &fjj * &pjj) + 1u32;
        assert!(close(&pjj, &rhs, 1e-25));
    }

    #[test]
    fn rejects_unit_s() {
        let p = JPParams::recurrent_example();
        let s = Float::with_val(64, 1);
        assert!(generating_fn(ChainType::TypeII, 0, 0, &s, &p, 64).is_err());
    }
}
