//! Exact moment matrix for the normalized two-weight system and its Gauss–Borel
//! factorization. Everything here is rational; nothing rounds.

use rug::Rational;
use serde_json::{json, Value};

use crate::arith::{fmt_rational, poch};
use crate::band::{BandedOperator, Profile};
use crate::error::{Error, Result};
use crate::params::JPParams;
use crate::poly::RationalPoly;
use crate::stepline::weight_and_degree;

/// `m̂_a(p) = (α_a+1)_p / (α_a+γ+2)_p`, the `p`-th moment of weight `a` scaled to unit mass.
pub fn normalized_moment(p: usize, a: usize, params: &JPParams) -> Rational {
    let x = params.exponent(a);
    let num = poch(&Rational::from(x + 1u32), p);
    let den = poch(&(Rational::from(x + &params.gamma) + 2u32), p);
    num / den
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentMatrix {
    pub size: usize,
    pub entries: Vec<Vec<Rational>>,
}

impl MomentMatrix {
    pub fn to_json(&self) -> Value {
        rational_matrix_json(&self.entries)
    }
}

/// `g_{i,j} = m̂_{a(j)}(i + k(j))` on the `(1, 1)` step line.
pub fn build_moment_matrix(size: usize, params: &JPParams) -> MomentMatrix {
    build_scaled_moment_matrix(size, params, &Rational::from(1), &Rational::from(1))
}

/// Same as [`build_moment_matrix`] with the columns of weight 1 and 2 multiplied by `c1`, `c2`.
pub fn build_scaled_moment_matrix(
    size: usize,
    params: &JPParams,
    c1: &Rational,
    c2: &Rational,
) -> MomentMatrix {
    let mom: [Vec<Rational>; 2] = [1, 2].map(|a| {
        let top = 2 * size;
        (0..top).map(|p| normalized_moment(p, a, params)).collect()
    });
    let entries = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    let (a, k) = weight_and_degree(j);
                    let c = if a == 1 { c1 } else { c2 };
                    Rational::from(&mom[a - 1][i + k] * c)
                })
                .collect()
        })
        .collect();
    MomentMatrix { size, entries }
}

/// `S g S̃ᵀ = H` with `S`, `S̃` unit lower triangular and `H` diagonal.
#[derive(Clone, Debug)]
pub struct GaussBorelFactors {
    pub s: Vec<Vec<Rational>>,
    pub stilde: Vec<Vec<Rational>>,
    pub h: Vec<Rational>,
}

impl GaussBorelFactors {
    pub fn size(&self) -> usize {
        self.h.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "S": rational_matrix_json(&self.s),
            "Stilde": rational_matrix_json(&self.stilde),
            "H": self.h.iter().map(fmt_rational).collect::<Vec<_>>(),
        })
    }
}

/// Forward elimination without pivoting; returns the unit lower factor `E` with `E·m` upper
/// triangular, together with the pivots.
fn eliminate(m: &[Vec<Rational>]) -> Result<(Vec<Vec<Rational>>, Vec<Rational>)> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut e: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| Rational::from(u32::from(i == j))).collect())
        .collect();
    let mut piv = Vec::with_capacity(n);
    for k in 0..n {
        if a[k][k] == 0 {
            return Err(Error::SingularMinor(k + 1));
        }
        let pk = a[k][k].clone();
        for i in k + 1..n {
            if a[i][k] == 0 {
                continue;
            }
            let f = Rational::from(&a[i][k] / &pk);
            let (top, bot) = a.split_at_mut(i);
            for j in k..n {
                bot[0][j] -= Rational::from(&f * &top[k][j]);
            }
            let (etop, ebot) = e.split_at_mut(i);
            for j in 0..=k {
                ebot[0][j] -= Rational::from(&f * &etop[k][j]);
            }
        }
        piv.push(pk);
    }
    Ok((e, piv))
}

pub fn gauss_borel(g: &MomentMatrix) -> Result<GaussBorelFactors> {
    let (s, h) = eliminate(&g.entries)?;
    let gt: Vec<Vec<Rational>> = (0..g.size)
        .map(|i| (0..g.size).map(|j| g.entries[j][i].clone()).collect())
        .collect();
    let (stilde, _) = eliminate(&gt)?;
    Ok(GaussBorelFactors { s, stilde, h })
}

/// `S g S̃ᵀ - H`, which must vanish identically.
pub fn factorization_residual(g: &MomentMatrix, f: &GaussBorelFactors) -> Vec<Vec<Rational>> {
    let n = g.size;
    let sg: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..=i).map(|k| Rational::from(&f.s[i][k] * &g.entries[k][j])).sum())
                .collect()
        })
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v: Rational = (0..=j).map(|k| Rational::from(&sg[i][k] * &f.stilde[j][k])).sum();
                    if i == j {
                        v - &f.h[i]
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

/// Monic `B^(l)`: row `l` of `S` read as ascending coefficients.
pub fn oracle_type_ii(f: &GaussBorelFactors, l: usize) -> RationalPoly {
    RationalPoly::new(f.s[l][..=l].to_vec())
}

/// Components `(Â_1, Â_2)` of the normalized-weight linear form `Q̂^(l)`.
pub fn oracle_type_i(f: &GaussBorelFactors, l: usize) -> (RationalPoly, RationalPoly) {
    let mut c = [vec![Rational::new(); l / 2 + 1], vec![Rational::new(); l / 2 + 1]];
    for i in 0..=l {
        let (a, k) = weight_and_degree(i);
        c[a - 1][k] += Rational::from(&f.stilde[l][i] / &f.h[l]);
    }
    let [c1, c2] = c;
    (RationalPoly::new(c1), RationalPoly::new(c2))
}

/// `∫ b · (Â_1 w_1 + Â_2 w_2) dμ` against the unit-mass weights, as a finite moment sum.
pub fn normalized_pairing(
    b: &RationalPoly,
    forms: (&RationalPoly, &RationalPoly),
    params: &JPParams,
) -> Rational {
    let mut acc = Rational::new();
    for (a, form) in [(1, forms.0), (2, forms.1)] {
        for (i, bi) in b.coeffs().iter().enumerate() {
            for (j, aj) in form.coeffs().iter().enumerate() {
                acc += Rational::from(bi * aj) * normalized_moment(i + j, a, params);
            }
        }
    }
    acc
}

/// Jacobi band from `x B^(l) = B^(l+1) + Σ_k J_{l,k} B^(k)`, rows `0..L-1`.
///
/// Returns `Invariant` if a coefficient outside the two subdiagonals is nonzero.
pub fn oracle_jacobi(f: &GaussBorelFactors) -> Result<BandedOperator<Rational>> {
    let size = f.size() - 1;
    let b: Vec<RationalPoly> = (0..=size).map(|l| oracle_type_ii(f, l)).collect();
    let mut j = BandedOperator::new(size, 2, 1, Profile::TypeII, Rational::new());
    for l in 0..size {
        let mut r = b[l].shift(1).sub(&b[l + 1]);
        for k in (0..=l).rev() {
            let c = r.coeff(k);
            if c == 0 {
                continue;
            }
            if k + 2 < l {
                return Err(Error::Invariant(format!(
                    "Jacobi entry ({l}, {k}) lies outside the band"
                )));
            }
            r = r.sub(&b[k].scale(&c));
            j.set(l, k, c);
        }
        if !r.is_zero() {
            return Err(Error::Invariant(format!("row {l} of x·B does not close")));
        }
        if l + 1 < size {
            j.set(l, l + 1, Rational::from(1));
        }
    }
    Ok(j)
}

fn rational_matrix_json(m: &[Vec<Rational>]) -> Value {
    Value::Array(
        m.iter()
            .map(|r| Value::Array(r.iter().map(|v| Value::String(fmt_rational(v))).collect()))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    fn rec() -> JPParams {
        JPParams::recurrent_example()
    }

    #[test]
    fn moments() {
        assert_eq!(normalized_moment(0, 2, &rec()), 1);
        assert_eq!(normalized_moment(1, 1, &rec()), rat(3, 5));
        assert_eq!(normalized_moment(2, 2, &rec()), rat(3, 8));
        let g = build_moment_matrix(3, &rec());
        assert_eq!(g.entries[2][0], rat(7, 15));
        assert_eq!(g.entries[0][1], 1);
        assert_eq!(build_moment_matrix(1, &rec()).entries, vec![vec![int(1)]]);
    }

    #[test]
    fn identity_factors_trivially() {
        let g = MomentMatrix {
            size: 3,
            entries: (0..3)
                .map(|i| (0..3).map(|j| Rational::from(u32::from(i == j))).collect())
                .collect(),
        };
        let f = gauss_borel(&g).unwrap();
        assert_eq!(f.s, g.entries);
        assert_eq!(f.stilde, g.entries);
        assert!(f.h.iter().all(|h| *h == 1));
    }

    #[test]
    fn factorization_is_exact() {
        let g = build_moment_matrix(8, &rec());
        let f = gauss_borel(&g).unwrap();
        assert!(factorization_residual(&g, &f).iter().flatten().all(|v| *v == 0));
        assert_eq!(oracle_type_ii(&f, 1).to_string(), "x - 3/5");
    }

    #[test]
    fn resonant_weights_give_singular_minor() {
        let p = JPParams {
            alpha: rat(1, 2),
            beta: rat(-1, 2),
            gamma: int(0),
        };
        assert!(matches!(
            gauss_borel(&build_moment_matrix(6, &p)),
            Err(Error::SingularMinor(_))
        ));
    }

    #[test]
    fn biorthogonal_in_normalized_moments() {
        let p = rec();
        let f = gauss_borel(&build_moment_matrix(9, &p)).unwrap();
        for l in 0..9 {
            let b = oracle_type_ii(&f, l);
            for k in 0..9 {
                let (a1, a2) = oracle_type_i(&f, k);
                let v = normalized_pairing(&b, (&a1, &a2), &p);
                assert_eq!(v, u32::from(l == k), "({l}, {k})");
            }
        }
        let (a1, a2) = oracle_type_i(&f, 0);
        assert_eq!(a1.coeff(0), Rational::from(f.h[0].recip_ref()));
        assert!(a2.is_zero());
    }

    #[test]
    fn jacobi_band() {
        let f = gauss_borel(&build_moment_matrix(10, &rec())).unwrap();
        let j = oracle_jacobi(&f).unwrap();
        assert_eq!(*j.get(0, 1), 1);
        assert_eq!(*j.get(0, 0), rat(3, 5));
        assert_eq!(*j.get(5, 1), 0);
    }
}
