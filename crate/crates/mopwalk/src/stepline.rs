//! Step-line index ladder: generalized Euclidean division of a sequence position by a
//! composition, and the multi-index reached at that position.

use crate::error::{Error, Result};

/// A composition `(n_1, …, n_p)` with positive parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composition {
    parts: Vec<u64>,
    total: u64,
}

impl Composition {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidParams(format!(
                "composition parts must be positive: {parts:?}"
            )));
        }
        let total = parts.iter().sum();
        Ok(Self { parts, total })
    }

    /// The two-weight step line `(1, 1)`.
    pub fn step_line() -> Self {
        Self { parts: vec![1, 1], total: 2 }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteplineIndex {
    pub i: u64,
    pub q: u64,
    /// Weight label, 1-based.
    pub a: usize,
    pub r: u64,
    pub k: u64,
    pub nu: Vec<u64>,
}

/// `i = q|n| + n_1 + … + n_{a-1} + r` with `0 ≤ r < n_a`.
pub fn decompose(i: u64, comp: &Composition) -> SteplineIndex {
    let q = i / comp.total;
    let mut rem = i % comp.total;
    let mut a = 0;
    while rem >= comp.parts[a] {
        rem -= comp.parts[a];
        a += 1;
    }
    let r = rem;
    let k = q * comp.parts[a] + r;
    let nu = comp
        .parts
        .iter()
        .enumerate()
        .map(|(b, &nb)| match b.cmp(&a) {
            std::cmp::Ordering::Less => (q + 1) * nb,
            std::cmp::Ordering::Equal => k,
            std::cmp::Ordering::Greater => q * nb,
        })
        .collect();
    SteplineIndex { i, q, a: a + 1, r, k, nu }
}

/// Inverse of [`decompose`]: the position carrying local degree `k` for weight `a` (1-based).
pub fn index_of(k: u64, a: usize, comp: &Composition) -> u64 {
    assert!(a >= 1 && a <= comp.len(), "weight label {a} out of range");
    let na = comp.parts[a - 1];
    let offset: u64 = comp.parts[..a - 1].iter().sum();
    (k / na) * (comp.total - na) + offset + k
}

/// Multi-index `ν(l) = (⌈l/2⌉, ⌊l/2⌋)` on the `(1, 1)` step line, so `|ν(l)| = l`.
pub fn stepline_multiindex(l: u64) -> (u64, u64) {
    (l - l / 2, l / 2)
}

/// Multi-index labelling the `l`-th biorthogonal pair in the two-weight closed forms:
/// `ν(l + 1)`, i.e. `(n+1, n)` for `l = 2n` and `(n+1, n+1)` for `l = 2n+1`.
/// Type I linear forms are indexed this way.
pub fn jp_multiindex(l: u64) -> (u64, u64) {
    stepline_multiindex(l + 1)
}

/// Weight label (1 or 2) and local degree of position `l` on the `(1, 1)` step line.
pub fn weight_and_degree(l: usize) -> (usize, usize) {
    (1 + l % 2, l / 2)
}
