//! Two-sided polynomials in the delay operator `z^-1`.
//!
//! A [`LaurentPoly`] stores `Σ_l c_l z^-l` for `l` in
//! `[min_degree, min_degree + len - 1]`, so the coefficient index is the lag.
//! Correlations, Taylor coefficients, and ambiguity slices all live here.
//!
//! Integer polynomials (`LaurentPoly<i64>`) carry every exact identity. Complex
//! polynomials only appear once Doppler phases enter, and the promotion is
//! explicit through [`LaurentPoly::to_complex`].

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_argument, Error, Result};
use crate::sequences::UnimodularSequence;

/// Scalar types a [`LaurentPoly`] can hold.
pub trait Coefficient:
    Copy
    + PartialEq
    + Debug
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
{
    fn conj(self) -> Self;
    fn magnitude(self) -> f64;
}

impl Coefficient for i64 {
    fn conj(self) -> Self {
        self
    }

    fn magnitude(self) -> f64 {
        self.unsigned_abs() as f64
    }
}

impl Coefficient for Complex64 {
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }

    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Normalized two-sided polynomial. Zero fringes are trimmed so equality is
/// structural; the zero polynomial is the single coefficient `0` at lag 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "RawPoly<T>",
    bound(serialize = "T: Serialize", deserialize = "T: Coefficient + Deserialize<'de>")
)]
pub struct LaurentPoly<T> {
    min_degree: i64,
    coefficients: Vec<T>,
}

#[derive(Deserialize)]
struct RawPoly<T> {
    min_degree: i64,
    coefficients: Vec<T>,
}

impl<T: Coefficient> TryFrom<RawPoly<T>> for LaurentPoly<T> {
    type Error = Error;

    fn try_from(raw: RawPoly<T>) -> Result<Self> {
        if raw.coefficients.is_empty() {
            return Err(invalid_argument("polynomial needs at least one coefficient"));
        }
        Ok(Self::new(raw.min_degree, raw.coefficients))
    }
}

impl<T: Coefficient> LaurentPoly<T> {
    /// Builds `Σ_i coefficients[i]·z^-(min_degree + i)` and normalizes it.
    pub fn new(min_degree: i64, coefficients: Vec<T>) -> Self {
        let mut p = Self {
            min_degree,
            coefficients,
        };
        p.normalize();
        p
    }

    pub fn zero() -> Self {
        Self {
            min_degree: 0,
            coefficients: vec![T::zero()],
        }
    }

    /// `c·z^-lag`
    pub fn monomial(lag: i64, c: T) -> Self {
        Self::new(lag, vec![c])
    }

    pub fn constant(c: T) -> Self {
        Self::monomial(0, c)
    }

    fn normalize(&mut self) {
        let Some(first) = self.coefficients.iter().position(|c| !c.is_zero()) else {
            *self = Self::zero();
            return;
        };
        let last = self
            .coefficients
            .iter()
            .rposition(|c| !c.is_zero())
            .expect("a nonzero coefficient exists");
        self.coefficients.truncate(last + 1);
        self.coefficients.drain(..first);
        self.min_degree += first as i64;
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.coefficients.len() as i64 - 1
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    /// Coefficient of `z^-lag`, zero outside the stored span.
    pub fn coefficient(&self, lag: i64) -> T {
        let idx = lag - self.min_degree;
        if idx < 0 {
            return T::zero();
        }
        self.coefficients.get(idx as usize).copied().unwrap_or_else(T::zero)
    }

    /// Coefficients over `lo..=hi`, zero-padded.
    pub fn dense(&self, lo: i64, hi: i64) -> Vec<T> {
        (lo..=hi).map(|l| self.coefficient(l)).collect()
    }

    /// `(lag, coefficient)` over the stored span.
    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.min_degree + i as i64, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.len() == 1 && self.coefficients[0].is_zero()
    }

    /// True iff every coefficient away from lag 0 vanishes.
    pub fn is_monomial_at_zero(&self) -> bool {
        self.is_zero() || (self.min_degree == 0 && self.coefficients.len() == 1)
    }

    /// `P~(z) = P*(1/z*)`: reverse about lag 0 and conjugate.
    pub fn tilde(&self) -> Self {
        Self {
            min_degree: -self.max_degree(),
            coefficients: self.coefficients.iter().rev().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.min_degree, self.coefficients.iter().map(|c| *c * s).collect())
    }

    /// `Σ_l c_l z^-l` with `c_l` shifted by `d`, i.e. multiplication by `z^-d`.
    pub fn delay(&self, d: i64) -> Self {
        Self {
            min_degree: self.min_degree + d,
            coefficients: self.coefficients.clone(),
        }
    }

    /// Largest coefficient magnitude, optionally skipping lag 0.
    pub fn peak_magnitude(&self, exclude_zero_lag: bool) -> f64 {
        self.iter()
            .filter(|(l, _)| !(exclude_zero_lag && *l == 0))
            .map(|(_, c)| c.magnitude())
            .fold(0.0, f64::max)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let lo = self.min_degree.min(other.min_degree);
        let hi = self.max_degree().max(other.max_degree());
        Self::new(
            lo,
            (lo..=hi)
                .map(|l| f(self.coefficient(l), other.coefficient(l)))
                .collect(),
        )
    }
}

impl LaurentPoly<i64> {
    /// `X(z) = Σ_l x[l] z^-l` for a causal chip sequence.
    pub fn from_sequence(s: &UnimodularSequence) -> Self {
        Self::new(0, s.values().iter().map(|v| i64::from(*v)).collect())
    }

    pub fn to_complex(&self) -> LaurentPoly<Complex64> {
        LaurentPoly {
            min_degree: self.min_degree,
            coefficients: self
                .coefficients
                .iter()
                .map(|c| Complex64::new(*c as f64, 0.0))
                .collect(),
        }
    }
}

impl<T: Coefficient> Add for &LaurentPoly<T> {
    type Output = LaurentPoly<T>;

    fn add(self, rhs: Self) -> LaurentPoly<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Coefficient> Sub for &LaurentPoly<T> {
    type Output = LaurentPoly<T>;

    fn sub(self, rhs: Self) -> LaurentPoly<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Coefficient> Mul for &LaurentPoly<T> {
    type Output = LaurentPoly<T>;

    fn mul(self, rhs: Self) -> LaurentPoly<T> {
        let mut out = vec![T::zero(); self.coefficients.len() + rhs.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in rhs.coefficients.iter().enumerate() {
                out[i + j] += *a * *b;
            }
        }
        LaurentPoly::new(self.min_degree + rhs.min_degree, out)
    }
}

impl<T: Coefficient> Neg for &LaurentPoly<T> {
    type Output = LaurentPoly<T>;

    fn neg(self) -> LaurentPoly<T> {
        LaurentPoly {
            min_degree: self.min_degree,
            coefficients: self.coefficients.iter().map(|c| -*c).collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl<T: Coefficient> $tr for LaurentPoly<T> {
            type Output = LaurentPoly<T>;

            fn $method(self, rhs: Self) -> LaurentPoly<T> {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl<T: Coefficient> Neg for LaurentPoly<T> {
    type Output = LaurentPoly<T>;

    fn neg(self) -> LaurentPoly<T> {
        -&self
    }
}

impl<T: Coefficient> AddAssign<&LaurentPoly<T>> for LaurentPoly<T> {
    fn add_assign(&mut self, rhs: &LaurentPoly<T>) {
        *self = &*self + rhs;
    }
}

impl<T: Coefficient> Default for LaurentPoly<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Coefficient> std::iter::Sum for LaurentPoly<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, p| &acc + &p)
    }
}

/// Cross-correlation as a polynomial: the coefficient of `z^-k` is
/// `Σ_l a[l+k]·b*[l]`, which equals `A(z)·B~(z)`.
pub fn xcorr(a: &UnimodularSequence, b: &UnimodularSequence) -> Result<LaurentPoly<i64>> {
    if a.len() != b.len() {
        return Err(invalid_argument(format!(
            "xcorr needs equal lengths ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    Ok(xcorr_unchecked(a.values(), b.values()))
}

fn xcorr_unchecked(a: &[i8], b: &[i8]) -> LaurentPoly<i64> {
    let l = a.len() as i64;
    let coefficients = (-(l - 1)..l)
        .map(|k| {
            let lo = 0.max(-k);
            let hi = l.min(l - k);
            (lo..hi).map(|i| i64::from(a[(i + k) as usize] * b[i as usize])).sum()
        })
        .collect();
    LaurentPoly::new(-(l - 1), coefficients)
}

/// Autocorrelation `corr_k(a)`, even-symmetric for binary sequences.
pub fn autocorr(a: &UnimodularSequence) -> LaurentPoly<i64> {
    xcorr_unchecked(a.values(), a.values())
}
