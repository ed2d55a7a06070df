use std::fmt;

use rug::Rational;

use crate::arith::{fmt_rational, parse_rational};
use crate::error::{Error, Result};

/// Jacobi–Piñeiro parameters: weights `x^α (1-x)^γ` and `x^β (1-x)^γ` on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JPParams {
    pub alpha: Rational,
    pub beta: Rational,
    pub gamma: Rational,
}

impl JPParams {
    /// Validates `α, β, γ > -1` and `α - β ∉ ℤ`.
    pub fn new(alpha: Rational, beta: Rational, gamma: Rational) -> Result<Self> {
        for (name, v) in [("alpha", &alpha), ("beta", &beta), ("gamma", &gamma)] {
            if *v <= -1 {
                return Err(Error::InvalidParams(format!(
                    "{name} = {} must exceed -1",
                    fmt_rational(v)
                )));
            }
        }
        let diff = Rational::from(&alpha - &beta);
        if *diff.denom() == 1 {
            return Err(Error::ResonantParams(diff.to_string()));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub fn parse(alpha: &str, beta: &str, gamma: &str) -> Result<Self> {
        Self::new(
            parse_rational(alpha)?,
            parse_rational(beta)?,
            parse_rational(gamma)?,
        )
    }

    /// Exponent at the origin of weight `a` (1 or 2).
    pub fn exponent(&self, a: usize) -> &Rational {
        if a == 1 {
            &self.alpha
        } else {
            &self.beta
        }
    }

    /// Same parameters with the two weights exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
            gamma: self.gamma.clone(),
        }
    }

    /// The recurrent example `(-1/4, -1/2, -1/2)`.
    pub fn recurrent_example() -> Self {
        Self::parse("-1/4", "-1/2", "-1/2").unwrap()
    }

    /// The transient example `(-1/4, -1/2, 1/2)`.
    pub fn transient_example() -> Self {
        Self::parse("-1/4", "-1/2", "1/2").unwrap()
    }

    /// Inside the region `|α - β| < 1` where the Jacobi matrix is nonnegative.
    pub fn in_positivity_region(&self) -> bool {
        positivity_region(&self.alpha, &self.beta, &self.gamma).0
    }
}

impl fmt::Display for JPParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(α, β, γ) = ({}, {}, {})",
            fmt_rational(&self.alpha),
            fmt_rational(&self.beta),
            fmt_rational(&self.gamma)
        )
    }
}

/// Nonnegativity region of the Jacobi–Piñeiro Jacobi matrix, with a reason when outside.
///
/// Takes raw rationals so it can also classify triples that [`JPParams::new`] rejects.
pub fn positivity_region(alpha: &Rational, beta: &Rational, gamma: &Rational) -> (bool, String) {
    if *alpha <= -1 || *beta <= -1 || *gamma <= -1 {
        return (false, "every parameter must exceed -1".into());
    }
    let diff = Rational::from(alpha - beta);
    if diff == 0 {
        return (false, "resonance: alpha equals beta".into());
    }
    if diff.clone().abs() >= 1 {
        return (false, format!("|alpha - beta| = {} is not below 1", fmt_rational(&diff.abs())));
    }
    (true, "alpha, beta, gamma > -1 and 0 < |alpha - beta| < 1".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};

    #[test]
    fn rejects_resonance_and_range() {
        assert!(matches!(
            JPParams::parse("1/2", "-1/2", "0"),
            Err(Error::ResonantParams(_))
        ));
        assert!(matches!(
            JPParams::parse("0", "0", "0"),
            Err(Error::ResonantParams(_))
        ));
        assert!(matches!(
            JPParams::parse("-1", "1/2", "0"),
            Err(Error::InvalidParams(_))
        ));
        assert!(JPParams::parse("-1/4", "-1/2", "-1/2").is_ok());
    }

    #[test]
    fn region() {
        assert!(positivity_region(&rat(-1, 4), &rat(-1, 2), &rat(-1, 2)).0);
        assert!(!positivity_region(&rat(1, 2), &int(2), &int(0)).0);
        assert!(!positivity_region(&int(0), &int(0), &int(0)).0);
    }
}
