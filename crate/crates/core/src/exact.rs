//! Exact arithmetic: big integers, reduced rationals, dense polynomials and
//! truncated power series.
//!
//! Integers and rationals come from `num-bigint` / `num-rational`; a
//! `BigRational` is always stored reduced with a positive denominator, which
//! is the invariant every exact pipeline in this crate leans on.
//!
//! Two convolution hooks are exposed so the multiplication strategy can be
//! benchmarked without touching callers: [`MulStrategy`] for rational
//! polynomials and [`IntConvolution`] for the nonnegative integer rows of the
//! genus table.

use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Arbitrary precision signed integer.
pub type BigIntValue = BigInt;
/// Reduced fraction of two [`BigIntValue`]s with positive denominator.
pub type Rational = BigRational;

pub fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_from_uint(value: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(value.clone()))
}

/// Decimal-string decoding of a nonnegative integer.
pub fn parse_uint(text: &str) -> Result<BigUint> {
    BigUint::from_str(text.trim()).map_err(|_| Error::Parse(text.to_string()))
}

pub fn parse_int(text: &str) -> Result<BigInt> {
    BigInt::from_str(text.trim()).map_err(|_| Error::Parse(text.to_string()))
}

/// Encodes as `p/q`, including `q = 1`.
pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Accepts `p/q` or a bare integer `p`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let err = || Error::Parse(text.to_string());
    match text.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(text).map_err(|_| err())?)),
    }
}

/// Rational to the nearest `f64`, staying finite for huge numerators and
/// denominators as long as the quotient itself fits.
pub fn rational_to_f64(value: &Rational) -> f64 {
    if let Some(x) = value.to_f64() {
        if x.is_finite() && (x != 0.0 || value.is_zero()) {
            return x;
        }
    }
    let sign = if value.is_negative() { -1.0 } else { 1.0 };
    let ln =
        crate::numeric::ln_biguint(value.numer().magnitude()) - crate::numeric::ln_biguint(value.denom().magnitude());
    sign * ln.exp()
}

/// Polynomial multiplication strategy for [`DensePolynomial`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MulStrategy {
    Schoolbook,
    /// Karatsuba splitting, falling back to schoolbook below a small size.
    #[default]
    Karatsuba,
}

/// Convolution strategy for nonnegative integer coefficient rows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IntConvolution {
    Schoolbook,
    Karatsuba,
    /// Pack each row into one big integer (Kronecker substitution) and let the
    /// big-integer multiplier do the work.
    #[default]
    Kronecker,
}

const KARATSUBA_CUTOFF: usize = 16;

fn schoolbook<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Zero + Clone,
    for<'x> &'x T: Add<&'x T, Output = T> + Mul<&'x T, Output = T>,
{
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

fn add_slices<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Zero + Clone,
    for<'x> &'x T: Add<&'x T, Output = T>,
{
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o = &*o + s;
    }
    out
}

/// Karatsuba convolution. Works for any commutative ring and also for
/// `BigUint`, since every subtraction removes a term known to be contained in
/// the minuend coefficient-wise.
fn karatsuba<T>(a: &[T], b: &[T]) -> Vec<T>
where
    T: Zero + Clone,
    for<'x> &'x T: Add<&'x T, Output = T> + Sub<&'x T, Output = T> + Mul<&'x T, Output = T>,
{
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len().min(b.len()) <= KARATSUBA_CUTOFF {
        return schoolbook(a, b);
    }
    let half = a.len().max(b.len()) / 2;
    let (a0, a1) = a.split_at(half.min(a.len()));
    let (b0, b1) = b.split_at(half.min(b.len()));
    if a1.is_empty() || b1.is_empty() {
        // Unbalanced: split only the longer operand.
        let (long_lo, long_hi, short) = if a1.is_empty() { (b0, b1, a) } else { (a0, a1, b) };
        let lo = karatsuba(long_lo, short);
        let hi = karatsuba(long_hi, short);
        let mut out = vec![T::zero(); a.len() + b.len() - 1];
        for (i, v) in lo.into_iter().enumerate() {
            out[i] = &out[i] + &v;
        }
        for (i, v) in hi.into_iter().enumerate() {
            out[i + half] = &out[i + half] + &v;
        }
        return out;
    }
    let low = karatsuba(a0, b0);
    let high = karatsuba(a1, b1);
    let mut mid = karatsuba(&add_slices(a0, a1), &add_slices(b0, b1));
    for (m, v) in mid.iter_mut().zip(&low) {
        *m = &*m - v;
    }
    for (m, v) in mid.iter_mut().zip(&high) {
        *m = &*m - v;
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, v) in low.into_iter().enumerate() {
        out[i] = &out[i] + &v;
    }
    for (i, v) in mid.into_iter().enumerate() {
        if i + half < out.len() {
            out[i + half] = &out[i + half] + &v;
        }
    }
    for (i, v) in high.into_iter().enumerate() {
        out[i + 2 * half] = &out[i + 2 * half] + &v;
    }
    out
}

fn max_bits(row: &[BigUint]) -> u64 {
    row.iter().map(BigUint::bits).max().unwrap_or(0)
}

fn pack(row: &[BigUint], slot_digits: usize) -> BigUint {
    let mut digits = vec![0u32; row.len() * slot_digits];
    for (i, c) in row.iter().enumerate() {
        let d = c.to_u32_digits();
        digits[i * slot_digits..i * slot_digits + d.len()].copy_from_slice(&d);
    }
    BigUint::new(digits)
}

fn unpack(value: &BigUint, slot_digits: usize, len: usize) -> Vec<BigUint> {
    let digits = value.to_u32_digits();
    (0..len)
        .map(|i| {
            let lo = (i * slot_digits).min(digits.len());
            let hi = ((i + 1) * slot_digits).min(digits.len());
            BigUint::new(digits[lo..hi].to_vec())
        })
        .collect()
}

/// `sum_i a_i * b_i` for pairs of nonnegative integer polynomials, as a
/// coefficient vector long enough for the longest product.
///
/// The result is exact, so it does not depend on how rayon schedules the
/// pairs.
pub fn convolution_sum(pairs: &[(&[BigUint], &[BigUint])], strategy: IntConvolution) -> Vec<BigUint> {
    let len = pairs
        .iter()
        .filter(|(a, b)| !a.is_empty() && !b.is_empty())
        .map(|(a, b)| a.len() + b.len() - 1)
        .max()
        .unwrap_or(0);
    if len == 0 {
        return Vec::new();
    }
    match strategy {
        IntConvolution::Schoolbook | IntConvolution::Karatsuba => {
            let mul = |a: &[BigUint], b: &[BigUint]| match strategy {
                IntConvolution::Schoolbook => schoolbook(a, b),
                _ => karatsuba(a, b),
            };
            pairs
                .par_iter()
                .map(|(a, b)| mul(a, b))
                .reduce(Vec::new, |x, y| add_slices(&x, &y))
                .into_iter()
                .chain(std::iter::repeat(BigUint::zero()))
                .take(len)
                .collect()
        }
        IntConvolution::Kronecker => {
            let bits = pairs.iter().map(|(a, b)| max_bits(a) + max_bits(b)).max().unwrap_or(0);
            let terms: u64 = pairs.iter().map(|(a, b)| a.len().min(b.len()) as u64).sum();
            let slot_bits = bits + 64 - terms.leading_zeros() as u64 + 1;
            let slot_digits = slot_bits.div_ceil(32) as usize;
            let packed = pairs
                .par_iter()
                .filter(|(a, b)| !a.is_empty() && !b.is_empty())
                .map(|(a, b)| pack(a, slot_digits) * pack(b, slot_digits))
                .reduce(BigUint::zero, |x, y| x + y);
            unpack(&packed, slot_digits, len)
        }
    }
}

/// Convolution of two nonnegative integer polynomials.
pub fn convolve(a: &[BigUint], b: &[BigUint], strategy: IntConvolution) -> Vec<BigUint> {
    convolution_sum(&[(a, b)], strategy)
}

/// Polynomial with rational coefficients, index = exponent, no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DensePolynomial {
    coeffs: Vec<Rational>,
}

impl DensePolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        DensePolynomial { coeffs }
    }

    pub fn zero() -> Self {
        DensePolynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: Rational, exponent: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); exponent + 1];
        coeffs[exponent] = c;
        Self::new(coeffs)
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, exponent: usize) -> Rational {
        self.coeffs.get(exponent).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rational_to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs)
    }

    /// True if only even powers carry nonzero coefficients.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(Zero::is_zero)
    }

    /// True if only odd powers carry nonzero coefficients.
    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(Zero::is_zero)
    }

    pub fn mul_with(&self, other: &Self, strategy: MulStrategy) -> Self {
        let product = match strategy {
            MulStrategy::Schoolbook => schoolbook(&self.coeffs, &other.coeffs),
            MulStrategy::Karatsuba => karatsuba(&self.coeffs, &other.coeffs),
        };
        Self::new(product)
    }
}

/// Exact polynomial product using the default strategy.
pub fn poly_mul(a: &DensePolynomial, b: &DensePolynomial) -> DensePolynomial {
    a.mul_with(b, MulStrategy::default())
}

impl Add for &DensePolynomial {
    type Output = DensePolynomial;

    fn add(self, rhs: &DensePolynomial) -> DensePolynomial {
        DensePolynomial::new(add_slices(&self.coeffs, &rhs.coeffs))
    }
}

impl Mul for &DensePolynomial {
    type Output = DensePolynomial;

    fn mul(self, rhs: &DensePolynomial) -> DensePolynomial {
        poly_mul(self, rhs)
    }
}

/// Power series `sum_{k <= order} c_k z^k` with everything above `order`
/// discarded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coeffs: Vec<Rational>,
    order: usize,
}

impl TruncatedSeries {
    /// Pads with zeros or drops terms so exactly `order + 1` coefficients are kept.
    pub fn new(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.resize(order + 1, Rational::zero());
        TruncatedSeries { coeffs, order }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Rational) -> Self {
        TruncatedSeries {
            coeffs: (0..=order).map(f).collect(),
            order,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `z^k`; `None` above the truncation order.
    pub fn coeff(&self, k: usize) -> Option<&Rational> {
        self.coeffs.get(k)
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    /// Product truncated to the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        Self::from_fn(order, |n| {
            (0..=n).fold(Rational::zero(), |acc, k| acc + &self.coeffs[k] * &other.coeffs[n - k])
        })
    }
}

/// Formal logarithm of a series with constant term 1.
///
/// Solves `s * L' = s'` term by term:
/// `L_n = s_n - (1/n) sum_{k=1}^{n-1} k L_k s_{n-k}`.
pub fn series_log(s: &TruncatedSeries) -> Result<TruncatedSeries> {
    if !s.constant_term().is_one() {
        return Err(Error::NonUnitConstant(format_rational(s.constant_term())));
    }
    let c = &s.coeffs;
    let mut log = vec![Rational::zero(); s.order + 1];
    for n in 1..=s.order {
        let mut acc = Rational::zero();
        for k in 1..n {
            if log[k].is_zero() || c[n - k].is_zero() {
                continue;
            }
            acc += &log[k] * &c[n - k] * BigInt::from(k);
        }
        log[n] = &c[n] - acc / BigInt::from(n);
    }
    Ok(TruncatedSeries::new(log, s.order))
}
