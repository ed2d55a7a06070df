//! Stochastic matrices built from Jacobi data: the dual pair `P_II`, `P_I`, the Toeplitz
//! split, the steady-state candidate and the generic diagonal-scaling recursion.

use std::cmp::Ordering;

use rug::{Float, Rational};
use serde_json::{json, Value};

use crate::arith::fmt_rational;
use crate::band::{BandedOperator, Profile, Scalar};
use crate::error::{Error, Result};
use crate::jp::{b_one_sequence, ensure_nonresonant, jacobi_band, q_one_sequence};
use crate::params::JPParams;

fn check_inputs<T: Scalar>(j: &BandedOperator<T>, vals: &[T]) -> Result<()> {
    if let Some((n, m)) = j.first_negative() {
        return Err(Error::NegativeEntry(n, m));
    }
    for (n, v) in vals.iter().take(j.size()).enumerate() {
        if v.sign() != Ordering::Greater {
            return Err(Error::NonpositiveValue(n));
        }
    }
    if vals.len() < j.size() {
        return Err(Error::Invariant(format!(
            "{} values supplied for a truncation of size {}",
            vals.len(),
            j.size()
        )));
    }
    Ok(())
}

/// `P_II[n][m] = (1/λ) (B^(m)(λ)/B^(n)(λ)) J[n][m]`.
pub fn stochasticize_type_ii<T: Scalar>(
    j: &BandedOperator<T>,
    bvals: &[T],
    lambda: &T,
) -> Result<BandedOperator<T>> {
    check_inputs(j, bvals)?;
    let zero = lambda.zero_like();
    let mut p = BandedOperator::new(j.size(), j.lower_bw(), j.upper_bw(), Profile::TypeII, zero);
    for n in 0..j.size() {
        let scale = lambda.mul(&bvals[n]);
        for m in j.row_range(n) {
            p.set(n, m, j.get(n, m).mul(&bvals[m]).div(&scale));
        }
    }
    Ok(p)
}

/// `P_I[n][m] = (1/λ) (Q^(m)(λ)/Q^(n)(λ)) J[m][n]`, the transposed profile.
pub fn stochasticize_type_i<T: Scalar>(
    j: &BandedOperator<T>,
    qvals: &[T],
    lambda: &T,
) -> Result<BandedOperator<T>> {
    check_inputs(j, qvals)?;
    let zero = lambda.zero_like();
    let mut p = BandedOperator::new(j.size(), j.upper_bw(), j.lower_bw(), Profile::TypeI, zero);
    for n in 0..j.size() {
        let scale = lambda.mul(&qvals[n]);
        for m in p.row_range(n) {
            p.set(n, m, j.get(m, n).mul(&qvals[m]).div(&scale));
        }
    }
    Ok(p)
}

/// Exact `P_II` for the Jacobi–Piñeiro walk at `λ = 1`.
pub fn jp_stochastic_ii(size: usize, params: &JPParams) -> Result<BandedOperator<Rational>> {
    let j = jacobi_band(size, params)?;
    stochasticize_type_ii(&j, &b_one_sequence(size, params), &Rational::from(1))
}

/// `P_I` for the Jacobi–Piñeiro walk at `λ = 1`, at `prec` bits.
pub fn jp_stochastic_i(size: usize, params: &JPParams, prec: u32) -> Result<BandedOperator<Float>> {
    let j = jacobi_band(size, params)?.to_float(prec);
    let q = q_one_sequence(size, params, prec)?;
    stochasticize_type_i(&j, &q, &Float::with_val(prec, 1))
}

/// The eight explicit entry streams of `P_II` in family `n`; entries reaching
/// below column 0 are `None` at `n = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiiFamily {
    pub n: usize,
    /// `(2n, 2n+1)`
    pub up_even: Rational,
    /// `(2n+1, 2n+2)`
    pub up_odd: Rational,
    /// `(2n, 2n)`
    pub diag_even: Rational,
    /// `(2n+1, 2n+1)`
    pub diag_odd: Rational,
    /// `(2n, 2n-1)`
    pub sub_even: Option<Rational>,
    /// `(2n+1, 2n)`
    pub sub_odd: Rational,
    /// `(2n, 2n-2)`
    pub subsub_even: Option<Rational>,
    /// `(2n+1, 2n-1)`
    pub subsub_odd: Option<Rational>,
}

impl PiiFamily {
    /// `((row, col), value)` for every entry present.
    pub fn entries(&self) -> Vec<((usize, usize), &Rational)> {
        let n2 = 2 * self.n;
        let mut v = vec![
            ((n2, n2 + 1), &self.up_even),
            ((n2 + 1, n2 + 2), &self.up_odd),
            ((n2, n2), &self.diag_even),
            ((n2 + 1, n2 + 1), &self.diag_odd),
            ((n2 + 1, n2), &self.sub_odd),
        ];
        if let Some(x) = &self.sub_even {
            v.push(((n2, n2 - 1), x));
        }
        if let Some(x) = &self.subsub_even {
            v.push(((n2, n2 - 2), x));
        }
        if let Some(x) = &self.subsub_odd {
            v.push(((n2 + 1, n2 - 1), x));
        }
        v
    }

    /// The eight streams in the order up, up, diag, diag, sub, sub, subsub, subsub.
    pub fn streams(&self) -> [Option<&Rational>; 8] {
        [
            Some(&self.up_even),
            Some(&self.up_odd),
            Some(&self.diag_even),
            Some(&self.diag_odd),
            self.sub_even.as_ref(),
            Some(&self.sub_odd),
            self.subsub_even.as_ref(),
            self.subsub_odd.as_ref(),
        ]
    }
}

fn q(x: &Rational, k: i64) -> Rational {
    Rational::from(x + k)
}

/// Explicit rational expressions for rows `2n` and `2n+1` of the Jacobi–Piñeiro `P_II`.
pub fn jp_pii_closed(n: usize, params: &JPParams) -> Result<PiiFamily> {
    ensure_nonresonant(params)?;
    let (a, b, g) = (&params.alpha, &params.beta, &params.gamma);
    let ag = Rational::from(a + g);
    let bg = Rational::from(b + g);
    let amb = Rational::from(a - b);
    let bma = Rational::from(b - a);
    let ni = n as i64;
    let nr = Rational::from(ni);

    if n == 0 {
        let p01 = q(g, 1) / q(&ag, 2);
        let p12 = q(g, 2) * q(&ag, 2) * q(&bg, 2) / (q(&ag, 3) * q(&bg, 2) * q(&bg, 3));
        let p00 = q(a, 1) / q(&ag, 2);
        let p11 = -(q(a, 1) * q(&amb, 1) * q(&bg, 2))
            / (bma.clone() * q(&amb, 1) * q(&ag, 2) * q(&ag, 3))
            + q(b, 1) * q(&bma, 1) / (bma.clone() * q(&bg, 3));
        let p10 = q(a, 1) / (q(&ag, 2) * q(&ag, 3));
        return Ok(PiiFamily {
            n,
            up_even: p01,
            up_odd: p12,
            diag_even: p00,
            diag_odd: p11,
            sub_even: None,
            sub_odd: p10,
            subsub_even: None,
            subsub_odd: None,
        });
    }

    let up_even = q(g, 2 * ni + 1) * q(&ag, 2 * ni + 1) * q(&bg, 2 * ni + 1)
        / (q(&ag, 3 * ni + 1) * q(&ag, 3 * ni + 2) * q(&bg, 3 * ni + 1));
    let up_odd = q(g, 2 * ni + 2) * q(&ag, 2 * ni + 2) * q(&bg, 2 * ni + 2)
        / (q(&ag, 3 * ni + 3) * q(&bg, 3 * ni + 2) * q(&bg, 3 * ni + 3));

    // printed at parameters shifted by one
    let (sa, sb, sg) = (q(a, 1), q(b, 1), q(g, 1));
    let sag = Rational::from(&sa + &sg);
    let sbg = Rational::from(&sb + &sg);
    let diag_even = q(&sa, ni) * q(&sag, 2 * ni - 1) * q(&sbg, 2 * ni - 1)
        / (q(&sag, 3 * ni - 1) * q(&sag, 3 * ni) * q(&sbg, 3 * ni - 1))
        + nr.clone() * q(&sg, 2 * ni - 1) * q(&sag, 2 * ni - 1)
            / (q(&sag, 3 * ni - 1) * q(&sbg, 3 * ni - 2) * q(&sbg, 3 * ni - 1))
        + nr.clone() * q(&sg, 2 * ni - 1) * q(&sbg, 2 * ni - 2)
            / (q(&sag, 3 * ni - 2) * q(&sag, 3 * ni - 1) * q(&sbg, 3 * ni - 2));

    let diag_odd = -(nr.clone() * q(b, ni) * q(&bma, ni)) / (bma.clone() * q(&bg, 3 * ni))
        + nr.clone() * q(b, ni) * q(&bma, ni) * q(&ag, 3 * ni + 1)
            / (bma.clone() * q(&amb, 1) * q(&bg, 3 * ni) * q(&bg, 3 * ni + 1))
        - Rational::from(ni + 1) * q(a, ni + 1) * q(&amb, ni + 1) * q(&bg, 3 * ni + 2)
            / (bma.clone() * q(&amb, 1) * q(&ag, 3 * ni + 2) * q(&ag, 3 * ni + 3))
        + Rational::from(ni + 1) * q(b, ni + 1) * q(&bma, ni + 1)
            / (bma.clone() * q(&bg, 3 * ni + 3));

    let sub_even = nr.clone() * q(&amb, ni) * q(g, 2 * ni - 1)
        / (q(&ag, 3 * ni - 1) * q(&ag, 3 * ni) * q(&ag, 3 * ni + 1))
        + nr.clone() * q(b, ni) * q(&bg, 2 * ni)
            / (q(&ag, 3 * ni) * q(&ag, 3 * ni + 1) * q(&bg, 3 * ni))
        + nr.clone() * q(b, ni) * q(&ag, 2 * ni + 1)
            / (q(&ag, 3 * ni + 1) * q(&bg, 3 * ni) * q(&bg, 3 * ni + 1));

    let sub_odd = nr.clone() * q(&amb, -ni) * q(b, ni) * q(&ag, 3 * ni + 1)
        / (q(&amb, 1) * q(&bg, 3 * ni) * q(&bg, 3 * ni + 1) * q(&bg, 3 * ni + 2))
        + Rational::from(ni + 1) * q(&amb, ni + 1) * q(a, ni + 1)
            / (q(&amb, 1) * q(&ag, 3 * ni + 2) * q(&ag, 3 * ni + 3));

    let subsub_even = nr.clone() * q(&amb, ni) * q(a, ni)
        / (q(&ag, 3 * ni - 1) * q(&ag, 3 * ni) * q(&ag, 3 * ni + 1));
    let subsub_odd = nr.clone() * q(&bma, ni) * q(b, ni)
        / (q(&bg, 3 * ni) * q(&bg, 3 * ni + 1) * q(&bg, 3 * ni + 2));

    Ok(PiiFamily {
        n,
        up_even,
        up_odd,
        diag_even,
        diag_odd,
        sub_even: Some(sub_even),
        sub_odd,
        subsub_even: Some(subsub_even),
        subsub_odd: Some(subsub_odd),
    })
}

/// `P_II` assembled from [`jp_pii_closed`] alone, without going through `J`.
pub fn jp_pii_closed_matrix(size: usize, params: &JPParams) -> Result<BandedOperator<Rational>> {
    let mut p = BandedOperator::new(size, 2, 1, Profile::TypeII, Rational::new());
    for n in 0..size.div_ceil(2) {
        for ((r, c), v) in jp_pii_closed(n, params)?.entries() {
            if r < size && c < size {
                p.set(r, c, v.clone());
            }
        }
    }
    Ok(p)
}

/// Large-`n` limit of `P_II` as `(sub-sub, sub, diag, super)` = `(1/27, 6/27, 12/27, 8/27)`.
pub fn toeplitz_symbol_ii() -> [Rational; 4] {
    [1, 6, 12, 8].map(|k| Rational::from((k, 27)))
}

/// Splits `P` into its constant-diagonal limit and the compact remainder `P - T`.
pub fn toeplitz_split<T: Scalar>(p: &BandedOperator<T>) -> (BandedOperator<T>, BandedOperator<T>) {
    let zero = p.get(0, 0).zero_like();
    let sym = toeplitz_symbol_ii();
    let mut t = BandedOperator::new(p.size(), p.lower_bw(), p.upper_bw(), p.profile(), zero.clone());
    let mut r = t.clone();
    for n in 0..p.size() {
        for m in p.row_range(n) {
            // offset m - n in -2..=1 for type II, -1..=2 for type I
            let idx = match p.profile() {
                Profile::TypeII => (m as i64 - n as i64 + 2) as usize,
                Profile::TypeI => (n as i64 - m as i64 + 2) as usize,
            };
            let tv = zero.from_rational(&sym[idx]);
            r.set(n, m, p.get(n, m).sub(&tv));
            t.set(n, m, tv);
        }
    }
    (t, r)
}

/// `κ_n = B^(n)(1) Q^(n)(1)` with running sums.
#[derive(Clone, Debug)]
pub struct SteadyCandidate {
    pub kappa: Vec<Float>,
    pub partial_sums: Vec<Float>,
}

impl SteadyCandidate {
    pub fn to_json(&self) -> Value {
        let digits = |x: &Float| x.to_string_radix(10, Some(30));
        json!({
            "kappa": self.kappa.iter().map(digits).collect::<Vec<_>>(),
            "partial_sums": self.partial_sums.iter().map(digits).collect::<Vec<_>>(),
        })
    }
}

pub fn steady_candidate(size: usize, params: &JPParams, prec: u32) -> Result<SteadyCandidate> {
    let b = b_one_sequence(size, params);
    let qv = q_one_sequence(size, params, prec)?;
    let kappa: Vec<Float> = b
        .iter()
        .zip(&qv)
        .map(|(b, q)| Float::with_val(prec, q * b))
        .collect();
    let mut acc = Float::with_val(prec, 0);
    let partial_sums = kappa
        .iter()
        .map(|k| {
            acc += k;
            acc.clone()
        })
        .collect();
    Ok(SteadyCandidate { kappa, partial_sums })
}

/// `max_m |Σ_n κ_n P[n][m] - κ_m|` over columns whose every contributing row is present.
pub fn left_eigen_residual<T: Scalar>(kappa: &[T], p: &BandedOperator<T>) -> T {
    let size = p.size().min(kappa.len());
    // column m collects rows m - upper_bw ..= m + lower_bw
    let reach = p.lower_bw();
    let zero = kappa[0].zero_like();
    let mut worst = zero.clone();
    for m in 0..size.saturating_sub(reach + p.upper_bw().max(p.lower_bw())) {
        let lo = m.saturating_sub(p.upper_bw());
        let mut s = zero.clone();
        for n in lo..=(m + reach) {
            s = s.add(&kappa[n].mul(p.get(n, m)));
        }
        let d = s.sub(&kappa[m]).abs_val();
        if d.sign() == Ordering::Greater && d.sub(&worst).sign() == Ordering::Greater {
            worst = d;
        }
    }
    worst
}

/// Largest `|P_I[n][n-k] - (κ_{n-k}/κ_n) P_II[n-k][n]|` over the shared valid window.
pub fn duality_check<T: Scalar>(
    pii: &BandedOperator<T>,
    pi: &BandedOperator<T>,
    kappa: &[T],
) -> T {
    let rows = pii.valid_rows().min(pi.valid_rows()).min(kappa.len());
    let mut worst = kappa[0].zero_like();
    for n in 0..rows {
        for m in pi.row_range(n) {
            if m >= rows {
                continue;
            }
            let want = kappa[m].mul(pii.get(m, n)).div(&kappa[n]);
            let d = pi.get(n, m).sub(&want).abs_val();
            if d.sub(&worst).sign() == Ordering::Greater {
                worst = d;
            }
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaKind {
    /// `σ_n = 1/B^(n)(λ)`
    TypeII,
    /// `σ_n = 1/Q^(n)(λ)`
    TypeI,
    /// Continued-fraction recursion on the band.
    Algorithmic,
}

/// Diagonal scaling `σ` stored through consecutive ratios `σ_{n+1}/σ_n`, with `σ_0 = 1`.
#[derive(Clone, Debug)]
pub struct SigmaScaling {
    pub ratios: Vec<Rational>,
    pub kind: SigmaKind,
}

impl SigmaScaling {
    pub fn from_values(vals: &[Rational], kind: SigmaKind) -> Self {
        let ratios = vals.windows(2).map(|w| Rational::from(&w[1] / &w[0])).collect();
        Self { ratios, kind }
    }

    /// `σ_n` normalized to `σ_0 = 1`.
    pub fn values(&self) -> Vec<Rational> {
        let mut v = vec![Rational::from(1)];
        for r in &self.ratios {
            let next = Rational::from(v.last().unwrap() * r);
            v.push(next);
        }
        v
    }

    pub fn values_float(&self, prec: u32) -> Vec<Float> {
        let mut v = vec![Float::with_val(prec, 1)];
        for r in &self.ratios {
            let next = Float::with_val(prec, v.last().unwrap() * r);
            v.push(next);
        }
        v
    }

    pub fn is_positive_nonincreasing(&self) -> bool {
        self.ratios.iter().all(|r| *r > 0 && *r <= 1)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": format!("{:?}", self.kind),
            "ratios": self.ratios.iter().map(fmt_rational).collect::<Vec<_>>(),
        })
    }
}

/// `‖J‖_∞` over the truncation, counting the unit superdiagonal of the last row.
pub fn sup_norm(j: &BandedOperator<Rational>) -> Rational {
    (0..j.size())
        .map(|n| {
            let s = j.row_sum(n).abs();
            if n + 1 == j.size() {
                s + 1u32
            } else {
                s
            }
        })
        .max()
        .unwrap_or_default()
}

/// Diagonal scaling that makes `J/λ` row-stochastic for any `λ ≥ ‖J‖_∞`.
///
/// With `Ĵ = J/λ`, `ρ_n = Ĵ[n][n+1] / (1 - Σ_{k≤n} (σ_n/σ_k) Ĵ[n][k])` and
/// `P[n][k] = (σ_n/σ_k) Ĵ[n][k]`. The superdiagonal of `J` is taken to be 1 throughout,
/// so every row of the truncation closes exactly.
pub fn scale_to_stochastic(
    j: &BandedOperator<Rational>,
    lambda: Option<&Rational>,
) -> Result<(SigmaScaling, BandedOperator<Rational>)> {
    if let Some((n, m)) = j.first_negative() {
        return Err(Error::NegativeEntry(n, m));
    }
    let lam = lambda.cloned().unwrap_or_else(|| sup_norm(j));
    if lam <= 0 {
        return Err(Error::InvalidParams("lambda must be positive".into()));
    }
    let size = j.size();
    let mut p = BandedOperator::new(size, j.lower_bw(), 1, Profile::TypeII, Rational::new());
    let mut ratios: Vec<Rational> = Vec::with_capacity(size);
    for n in 0..size {
        let mut s = Rational::new();
        // σ_n / σ_k for k = n, n-1, ...
        let mut frac = Rational::from(1);
        for k in (n.saturating_sub(j.lower_bw())..=n).rev() {
            if k < n {
                frac *= &ratios[k];
            }
            let v = Rational::from(&frac * j.get(n, k)) / &lam;
            s += &v;
            p.set(n, k, v);
        }
        let rest = Rational::from(1) - &s;
        if rest == 0 {
            return Err(Error::ZeroDenominator(n));
        }
        let sup = if n + 1 < size { j.get(n, n + 1).clone() } else { Rational::from(1) };
        let up = sup / &lam;
        let rho = Rational::from(&up / &rest);
        if n + 1 < size {
            p.set(n, n + 1, rest);
        }
        ratios.push(rho);
    }
    ratios.truncate(size.saturating_sub(1));
    Ok((SigmaScaling { ratios, kind: SigmaKind::Algorithmic }, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn closed_entries_match_construction() {
        for p in [
            JPParams::recurrent_example(),
            JPParams::transient_example(),
            JPParams::parse("1/3", "1/7", "2/5").unwrap(),
            JPParams::parse("-9/10", "-1/5", "3").unwrap(),
        ] {
            let a = jp_stochastic_ii(24, &p).unwrap();
            let b = jp_pii_closed_matrix(24, &p).unwrap();
            for n in 0..23 {
                for m in a.row_range(n) {
                    assert_eq!(a.get(n, m), b.get(n, m), "({n}, {m}) at {p}");
                }
                assert_eq!(a.row_sum(n), 1);
            }
        }
    }

    #[test]
    fn recurrent_block() {
        let p = jp_stochastic_ii(8, &JPParams::recurrent_example()).unwrap();
        assert_eq!(*p.get(0, 0), rat(3, 5));
        assert_eq!(*p.get(2, 3), rat(60, 221));
        assert_eq!(*p.get(3, 1), rat(1, 64));
        let (t, r) = toeplitz_split(&p);
        assert_eq!(*t.get(4, 3), rat(6, 27));
        assert_eq!(*r.get(0, 0), rat(3, 5) - rat(12, 27));
    }

    #[test]
    fn identity_rows_when_diagonal_is_lambda() {
        let mut j = BandedOperator::new(4, 2, 1, Profile::TypeII, Rational::new());
        for n in 0..4 {
            j.set(n, n, rat(2, 1));
        }
        let p = stochasticize_type_ii(&j, &vec![rat(1, 1); 4], &rat(2, 1)).unwrap();
        assert!((0..4).all(|n| p.row_sum(n) == 1 && *p.get(n, n) == 1));
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut j = BandedOperator::new(3, 2, 1, Profile::TypeII, Rational::new());
        j.set(1, 0, rat(-1, 2));
        assert!(matches!(
            stochasticize_type_ii(&j, &vec![rat(1, 1); 3], &rat(1, 1)),
            Err(Error::NegativeEntry(1, 0))
        ));
        let j = BandedOperator::new(3, 2, 1, Profile::TypeII, Rational::new());
        assert!(matches!(
            stochasticize_type_ii(&j, &[rat(1, 1), rat(0, 1), rat(1, 1)], &rat(1, 1)),
            Err(Error::NonpositiveValue(1))
        ));
    }

    #[test]
    fn algorithmic_scaling() {
        let j = jacobi_band(40, &JPParams::recurrent_example()).unwrap();
        let (sigma, p) = scale_to_stochastic(&j, None).unwrap();
        assert!(sigma.is_positive_nonincreasing());
        for n in 0..39 {
            assert_eq!(p.row_sum(n), 1, "row {n}");
        }
        // already stochastic up to λ: constant σ
        let mut k = BandedOperator::new(5, 2, 1, Profile::TypeII, Rational::new());
        for n in 0..5 {
            k.set(n, n, rat(1, 1));
            if n + 1 < 5 {
                k.set(n, n + 1, rat(1, 1));
            }
        }
        let (s, _) = scale_to_stochastic(&k, Some(&rat(2, 1))).unwrap();
        assert!(s.ratios.iter().all(|r| *r == 1));
    }

    #[test]
    fn duality_vanishes_in_exact_mode() {
        let p = JPParams::recurrent_example();
        let j = jacobi_band(12, &p).unwrap();
        let b = b_one_sequence(12, &p);
        // any positive q sequence gives a valid dual when κ = b·q
        let qv: Vec<Rational> = (0..12).map(|n| rat(n as i64 + 2, 3)).collect();
        let pii = stochasticize_type_ii(&j, &b, &rat(1, 1)).unwrap();
        let pi = stochasticize_type_i(&j, &qv, &rat(1, 1)).unwrap();
        let kappa: Vec<Rational> = b.iter().zip(&qv).map(|(x, y)| Rational::from(x * y)).collect();
        assert_eq!(duality_check(&pii, &pi, &kappa), 0);
    }
}
