//! Truncated band matrices holding either exact rationals or high-precision floats.

use std::cmp::Ordering;
use std::fmt::Debug;

use rug::{Float, Rational};
use serde_json::{json, Value};

use crate::arith::fmt_rational;

/// Field operations shared by the exact and floating modes.
pub trait Scalar: Clone + Debug + Send + Sync {
    const MODE: &'static str;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn sign(&self) -> Ordering;
    fn to_f64(&self) -> f64;
    fn render(&self) -> String;
    /// `r` in the same mode (and precision) as `self`.
    fn from_rational(&self, r: &Rational) -> Self;
    fn abs_val(&self) -> Self {
        if self.sign() == Ordering::Less {
            self.zero_like().sub(self)
        } else {
            self.clone()
        }
    }
}

impl Scalar for Rational {
    const MODE: &'static str = "rational";
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn add(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Rational::from(self / o)
    }
    fn sign(&self) -> Ordering {
        self.cmp0()
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
    fn render(&self) -> String {
        fmt_rational(self)
    }
    fn from_rational(&self, r: &Rational) -> Self {
        r.clone()
    }
}

impl Scalar for Float {
    const MODE: &'static str = "float";
    fn zero_like(&self) -> Self {
        Float::with_val(self.prec(), 0)
    }
    fn one_like(&self) -> Self {
        Float::with_val(self.prec(), 1)
    }
    fn add(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Float::with_val(self.prec(), self / o)
    }
    fn sign(&self) -> Ordering {
        self.cmp0().unwrap_or(Ordering::Equal)
    }
    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }
    fn render(&self) -> String {
        let digits = (self.prec() as f64 * std::f64::consts::LOG10_2).floor() as usize;
        self.to_string_radix(10, Some(digits.max(17)))
    }
    fn from_rational(&self, r: &Rational) -> Self {
        Float::with_val(self.prec(), r)
    }
}

/// Which side carries the wide band.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// `N` subdiagonals, one superdiagonal.
    TypeII,
    /// One subdiagonal, `N` superdiagonals.
    TypeI,
}

/// Square `size × size` truncation; entries outside the band are structurally zero.
#[derive(Clone, Debug)]
pub struct BandedOperator<T> {
    size: usize,
    lower_bw: usize,
    upper_bw: usize,
    profile: Profile,
    zero: T,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> BandedOperator<T> {
    pub fn new(size: usize, lower_bw: usize, upper_bw: usize, profile: Profile, zero: T) -> Self {
        let w = lower_bw + upper_bw + 1;
        let rows = vec![vec![zero.clone(); w]; size];
        Self { size, lower_bw, upper_bw, profile, zero, rows }
    }

    pub fn size(&self) -> usize {
        self.size
    }
    pub fn lower_bw(&self) -> usize {
        self.lower_bw
    }
    pub fn upper_bw(&self) -> usize {
        self.upper_bw
    }
    pub fn profile(&self) -> Profile {
        self.profile
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.size || j >= self.size || j + self.lower_bw < i || j > i + self.upper_bw {
            None
        } else {
            Some(j + self.lower_bw - i)
        }
    }

    pub fn in_band(&self, i: usize, j: usize) -> bool {
        self.slot(i, j).is_some()
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> &T {
        match self.slot(i, j) {
            Some(s) => &self.rows[i][s],
            None => &self.zero,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) lies outside the band"));
        self.rows[i][s] = v;
    }

    /// Column range of row `i` inside the truncation.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.lower_bw)..(i + self.upper_bw + 1).min(self.size)
    }

    pub fn row_sum(&self, i: usize) -> T {
        self.row_range(i)
            .fold(self.zero.clone(), |acc, j| acc.add(self.get(i, j)))
    }

    /// Rows whose band lies fully inside the truncation and that sit at least `N`
    /// rows above the cut, `N` being the wide bandwidth.
    pub fn valid_rows(&self) -> usize {
        self.size.saturating_sub(self.lower_bw.max(self.upper_bw))
    }

    pub fn first_negative(&self) -> Option<(usize, usize)> {
        (0..self.size).find_map(|i| {
            self.row_range(i)
                .find(|&j| self.get(i, j).sign() == Ordering::Less)
                .map(|j| (i, j))
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> BandedOperator<U> {
        BandedOperator {
            size: self.size,
            lower_bw: self.lower_bw,
            upper_bw: self.upper_bw,
            profile: self.profile,
            zero: f(&self.zero),
            rows: self.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }

    /// Leading `n × n` block.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.size);
        let mut out = Self::new(n, self.lower_bw, self.upper_bw, self.profile, self.zero.clone());
        for i in 0..n {
            for j in out.row_range(i) {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.size)
            .map(|i| (0..self.size).map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.size)
            .map(|i| {
                Value::Array(
                    self.row_range(i)
                        .map(|j| json!({"j": j, "v": self.get(i, j).render()}))
                        .collect(),
                )
            })
            .collect();
        json!({
            "size": self.size,
            "lower_bw": self.lower_bw,
            "upper_bw": self.upper_bw,
            "mode": T::MODE,
            "rows": rows,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(vec![]);
        for i in 0..self.size {
            let rec: Vec<String> = (0..self.size).map(|j| self.get(i, j).render()).collect();
            w.write_record(&rec).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf8")
    }
}

impl BandedOperator<Rational> {
    pub fn to_float(&self, prec: u32) -> BandedOperator<Float> {
        self.map(|r| Float::with_val(prec, r))
    }
}

/// Dense square product.
pub fn dense_mul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = a.len();
    let zero = a[0][0].zero_like();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(zero.clone(), |acc, k| {
                        if a[i][k].sign() == Ordering::Equal || b[k][j].sign() == Ordering::Equal {
                            acc
                        } else {
                            acc.add(&a[i][k].mul(&b[k][j]))
                        }
                    })
                })
                .collect()
        })
        .collect()
}

/// `P^r` for a dense square matrix, `r ≥ 0`.
pub fn dense_pow<T: Scalar>(p: &[Vec<T>], r: usize) -> Vec<Vec<T>> {
    let n = p.len();
    let zero = p[0][0].zero_like();
    let mut acc: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { zero.one_like() } else { zero.clone() })
                .collect()
        })
        .collect();
    for _ in 0..r {
        acc = dense_mul(&acc, p);
    }
    acc
}
