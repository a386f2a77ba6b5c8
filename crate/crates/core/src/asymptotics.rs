//! Floating-point asymptotics of the normalised face polynomials
//! `h_n(y) = n^(-y) J_n(y)`, the limit `K(y) = lim h_n(y)`, and the
//! asymptotic count formulas that use it.
//!
//! `h_1..h_6` come from the exact polynomials `J_1..J_6`. From `n = 7` on,
//! `h_n` follows the five-term recursion obtained by splitting the
//! `k in {0, 1, 2, n-4, n-3, n-2}` terms out of the `H_n(x)` convolution:
//!
//! ```text
//! h_n = 2(3n+2)y/(3n(n+1)) ((n-1)/n)^y h_{n-1}
//!     + [(9n^2-4)/(9(n^2-1)) + 4(3n+2)y^2/(9n(n^2-1))] ((n-2)/n)^y h_{n-2}
//!     + 2(3n+2)/(9n(n^2-1)(n-2)) ((n-3)/n)^y J_1(y) h_{n-3}
//!     + 4(3n+2)/(9n(n^2-1)(n-2)(n-3)) ((n-4)/n)^y J_2(y) h_{n-4}
//!     + (3n+2)/(9n(n^2-1)) sum_{k=3}^{n-5} (k(n-2-k)/n)^y h_k h_{n-2-k} / C(n-2, k)
//! ```
//!
//! Only real `y` in `[0, 2]` is supported.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::cubic::{build_h_table, j_polynomial};
use crate::error::{Error, Result};
use crate::exact::{DensePolynomial, Rational};
use crate::numeric::{ln_biguint, ln_factorial, CompensatedSum};

/// Default sequence length for [`estimate_k`].
pub const DEFAULT_K_LENGTH: usize = 100_000;
/// Default error-indicator threshold above which a K estimate is flagged.
pub const DEFAULT_K_THRESHOLD: f64 = 1e-3;
/// Default half-width margin of the `(n - 2g)/ln n` window.
pub const DEFAULT_EPSILON: f64 = 0.2;

/// Relative size below which the remaining convolution tail is dropped.
const TAIL_TOLERANCE: f64 = 1e-18;

/// Exact `J_1, ..., J_6`.
pub fn seed_polynomials() -> &'static [DensePolynomial] {
    static SEEDS: OnceLock<Vec<DensePolynomial>> = OnceLock::new();
    SEEDS.get_or_init(|| {
        let table = build_h_table(6, None).expect("small table");
        (1..=6).map(|n| j_polynomial(&table, n).expect("in range")).collect()
    })
}

fn check_closed_domain(y: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&y) {
        return Err(Error::Domain { y, domain: "[0, 2]" });
    }
    Ok(())
}

/// `h_1(y), ..., h_N(y)` at a fixed real `y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HSequence {
    pub y: f64,
    values: Vec<f64>,
}

impl HSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `h_n(y)` for `1 <= n <= N`.
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }

    /// Values indexed from `n = 1`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(h_n + h_{n-1}) / 2`, the averaged pair that converges to `K(y)`.
    pub fn averaged(&self, n: usize) -> Option<f64> {
        Some((self.get(n)? + self.get(n.checked_sub(1)?)?) / 2.0)
    }
}

/// `(a/n)^y` computed as `exp(y ln(a/n))`.
fn ratio_pow(a: f64, n: f64, y: f64) -> f64 {
    if y == 0.0 {
        1.0
    } else {
        (y * (a / n).ln()).exp()
    }
}

/// Computes `h_1(y), ..., h_N(y)` for `0 <= y <= 2`.
pub fn h_sequence(y: f64, len: usize) -> Result<HSequence> {
    check_closed_domain(y)?;
    let seeds = seed_polynomials();
    let j1 = seeds[0].eval_f64(y);
    let j2 = seeds[1].eval_f64(y);
    let mut h: Vec<f64> = Vec::with_capacity(len);
    for (i, j) in seeds.iter().enumerate().take(len) {
        let n = (i + 1) as f64;
        h.push(j.eval_f64(y) * ratio_pow(1.0, n, y));
    }
    let mut h_max = h.iter().copied().fold(0.0, f64::max);

    for n in 7..=len {
        let nf = n as f64;
        let n2m1 = nf * nf - 1.0;
        let base = 9.0 * nf * n2m1;
        let at = |k: usize| h[k - 1];

        let mut acc = CompensatedSum::new();
        acc.add(2.0 * (3.0 * nf + 2.0) * y / (3.0 * nf * (nf + 1.0)) * ratio_pow(nf - 1.0, nf, y) * at(n - 1));
        acc.add(
            ((9.0 * nf * nf - 4.0) / (9.0 * n2m1) + 4.0 * (3.0 * nf + 2.0) * y * y / base)
                * ratio_pow(nf - 2.0, nf, y)
                * at(n - 2),
        );
        acc.add(2.0 * (3.0 * nf + 2.0) / (base * (nf - 2.0)) * ratio_pow(nf - 3.0, nf, y) * j1 * at(n - 3));
        acc.add(
            4.0 * (3.0 * nf + 2.0) / (base * (nf - 2.0) * (nf - 3.0)) * ratio_pow(nf - 4.0, nf, y) * j2 * at(n - 4),
        );

        let conv = convolution_tail(&h, n, y, h_max);
        acc.add((3.0 * nf + 2.0) / base * conv);

        let value = acc.value();
        h_max = h_max.max(value);
        h.push(value);
    }
    Ok(HSequence { y, values: h })
}

/// `sum_{k=3}^{n-5} (k(n-2-k)/n)^y h_k h_{n-2-k} / C(n-2, k)`.
///
/// Terms pair up under `k <-> n-2-k`. The reciprocal binomial is updated by
/// the ratio `(k+1)/(n-2-k)`, and summation stops once the remaining terms
/// (bounded by the current weight, the largest power factor and `h_max^2`)
/// cannot change the sum.
fn convolution_tail(h: &[f64], n: usize, y: f64, h_max: f64) -> f64 {
    if n < 8 {
        return 0.0;
    }
    let m = n - 2;
    let nf = n as f64;
    let mf = m as f64;
    let mut weight = 6.0 / (mf * (mf - 1.0) * (mf - 2.0));
    let power_cap = ratio_pow(mf * mf / 4.0, nf, y).max(1.0);
    let mut sum = CompensatedSum::new();
    let mut k = 3;
    while k <= m - k {
        let other = m - k;
        let term = weight * ratio_pow((k * other) as f64, nf, y) * h[k - 1] * h[other - 1];
        sum.add(if k == other { term } else { 2.0 * term });
        let remaining = (m / 2 - k) as f64;
        if 2.0 * remaining * weight * power_cap * h_max * h_max <= TAIL_TOLERANCE * sum.value().abs() {
            break;
        }
        weight *= (k + 1) as f64 / (m - k) as f64;
        k += 1;
    }
    sum.value()
}

/// Estimate of `K(y)` from the tail of `h_n(y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KEstimate {
    pub y: f64,
    pub len: usize,
    /// `(h_N + h_{N-1}) / 2`.
    pub raw: f64,
    /// Richardson extrapolation `2 raw(N) - raw(N/2)` under a `c/N` error model.
    pub value: f64,
    /// `|raw(N) - raw(N/2)|`.
    pub error_indicator: f64,
    /// False when the error indicator exceeds the configured threshold.
    pub converged: bool,
}

/// Estimates `K(y)` for `0 < y < 2` from a sequence of length `len`.
pub fn estimate_k(y: f64, len: usize) -> Result<KEstimate> {
    estimate_k_with(y, len, DEFAULT_K_THRESHOLD)
}

pub fn estimate_k_with(y: f64, len: usize, threshold: f64) -> Result<KEstimate> {
    if !(y > 0.0 && y < 2.0) {
        return Err(Error::Domain { y, domain: "(0, 2)" });
    }
    if len < 14 {
        return Err(Error::InvalidArgument(format!(
            "sequence length {len} is too short, need at least 14"
        )));
    }
    let seq = h_sequence(y, len)?;
    Ok(k_from_sequence(&seq, threshold))
}

pub fn k_from_sequence(seq: &HSequence, threshold: f64) -> KEstimate {
    let len = seq.len();
    let raw = seq.averaged(len).expect("len >= 2");
    let half = seq.averaged(len / 2).expect("len >= 4");
    let error_indicator = (raw - half).abs();
    KEstimate {
        y: seq.y,
        len,
        raw,
        value: 2.0 * raw - half,
        error_indicator,
        converged: error_indicator <= threshold,
    }
}

/// Estimates for a grid of `y`, computed in parallel.
pub fn estimate_k_grid(ys: &[f64], len: usize, threshold: f64) -> Result<Vec<KEstimate>> {
    ys.par_iter().map(|&y| estimate_k_with(y, len, threshold)).collect()
}

/// CSV with header `y,N,raw,extrapolated,error_indicator`.
pub fn write_k_csv<W: Write>(estimates: &[KEstimate], mut out: W) -> Result<()> {
    writeln!(out, "y,N,raw,extrapolated,error_indicator")?;
    for e in estimates {
        writeln!(out, "{},{},{},{},{:e}", e.y, e.len, e.raw, e.value, e.error_indicator)?;
    }
    Ok(())
}

/// Source of `K(y)` values for [`high_genus_asym`].
pub trait KProvider {
    fn k(&self, y: f64) -> Result<f64>;
}

impl<F> KProvider for F
where
    F: Fn(f64) -> Result<f64>,
{
    fn k(&self, y: f64) -> Result<f64> {
        self(y)
    }
}

/// Extrapolated [`estimate_k`] values, memoised by `y`.
#[derive(Debug)]
pub struct SequenceK {
    len: usize,
    cache: Mutex<HashMap<u64, f64>>,
}

impl SequenceK {
    pub fn new(len: usize) -> Self {
        SequenceK {
            len,
            cache: Mutex::new(HashMap::new()),
        }
    }
}

impl KProvider for SequenceK {
    fn k(&self, y: f64) -> Result<f64> {
        if let Some(v) = self.cache.lock().expect("poisoned").get(&y.to_bits()) {
            return Ok(*v);
        }
        let v = estimate_k(y, self.len)?.value;
        self.cache.lock().expect("poisoned").insert(y.to_bits(), v);
        Ok(v)
    }
}

/// `ln((3/pi) n! 6^n)`.
pub fn total_cubic_asym_ln(n: usize) -> f64 {
    (3.0 / std::f64::consts::PI).ln() + ln_factorial(n as u64) + n as f64 * 6f64.ln()
}

/// `(3/pi) n! 6^n`; infinite once it exceeds `f64` range (use the `_ln` form).
pub fn total_cubic_asym(n: usize) -> f64 {
    total_cubic_asym_ln(n).exp()
}

/// `ln((6/sqrt(2 pi)) (6/e)^n n^(n + 1/2))`, the Stirling form.
pub fn total_cubic_asym_stirling_ln(n: usize) -> f64 {
    let nf = n as f64;
    (6.0 / (2.0 * std::f64::consts::PI).sqrt()).ln() + nf * (6f64.ln() - 1.0) + (nf + 0.5) * nf.ln()
}

pub fn total_cubic_asym_stirling(n: usize) -> f64 {
    total_cubic_asym_stirling_ln(n).exp()
}

/// `(n - 2g) / ln n`, the argument of `K` in the high-genus formula.
pub fn high_genus_ratio(n: usize, g: usize) -> f64 {
    (n as f64 - 2.0 * g as f64) / (n as f64).ln()
}

/// `ln` of `(sqrt2/3) K(u) (ln n/(n-2g))^2 6^n (n-1)!/(n-2g)! (ln n)^(n-2g)`
/// with `u = (n-2g)/ln n`, which must lie in `[epsilon, 2 - epsilon]`.
pub fn high_genus_asym_ln(n: usize, g: usize, k: &dyn KProvider, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must lie in (0, 1)")));
    }
    let (lo, hi) = (epsilon, 2.0 - epsilon);
    if n < 2 || 2 * g >= n {
        return Err(Error::OutsideWindow {
            n,
            g,
            ratio: if n < 2 { f64::NAN } else { high_genus_ratio(n, g) },
            lo,
            hi,
        });
    }
    let u = high_genus_ratio(n, g);
    if !(lo..=hi).contains(&u) {
        return Err(Error::OutsideWindow { n, g, ratio: u, lo, hi });
    }
    let ln_n = (n as f64).ln();
    let d = (n - 2 * g) as u64;
    let k_value = k.k(u)?;
    Ok((2f64.sqrt() / 3.0).ln()
        + k_value.ln()
        + 2.0 * (ln_n / d as f64).ln()
        + n as f64 * 6f64.ln()
        + ln_factorial(n as u64 - 1)
        - ln_factorial(d)
        + d as f64 * ln_n.ln())
}

pub fn high_genus_asym(n: usize, g: usize, k: &dyn KProvider, epsilon: f64) -> Result<f64> {
    high_genus_asym_ln(n, g, k, epsilon).map(f64::exp)
}

/// Exact-over-asymptotic comparison at one `(n, g)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HighGenusRatio {
    pub n: usize,
    pub g: usize,
    pub u: f64,
    #[serde(serialize_with = "crate::serialize_decimal")]
    pub exact: BigUint,
    pub ln_asym: f64,
    pub ratio: f64,
}

/// Ratios `C[n][g] / high_genus_asym(n, g)` for every `g` with
/// `(n-2g)/ln n` in `[lo, hi]`.
pub fn high_genus_ratios(
    counts: &[BigUint],
    n: usize,
    lo: f64,
    hi: f64,
    k: &dyn KProvider,
    epsilon: f64,
) -> Result<Vec<HighGenusRatio>> {
    let mut out = Vec::new();
    for (g, c) in counts.iter().enumerate() {
        if 2 * g >= n {
            continue;
        }
        let u = high_genus_ratio(n, g);
        if u < lo || u > hi {
            continue;
        }
        let ln_asym = high_genus_asym_ln(n, g, k, epsilon)?;
        out.push(HighGenusRatio {
            n,
            g,
            u,
            exact: c.clone(),
            ln_asym,
            ratio: (ln_biguint(c) - ln_asym).exp(),
        });
    }
    Ok(out)
}

/// `max - min` of the ratios.
pub fn band_width(ratios: &[HighGenusRatio]) -> f64 {
    let max = ratios.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    max - min
}

/// Which bound a violation concerns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Bound {
    /// `h_n(y) <= 9n`
    Linear,
    /// `h_n(y) <= exp(10 - 10/n)`
    Exponential,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundViolation {
    pub n: usize,
    pub y: f64,
    pub h: f64,
    pub bound: Bound,
}

/// Outcome of [`lemma1_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub max_n: usize,
    pub grid: Vec<f64>,
    /// `(n, y)` pairs examined.
    pub checked: usize,
    /// Pairs decided by exact rational arithmetic (`n <= 20`).
    pub exact_checked: usize,
    pub max_h: f64,
    pub argmax: (usize, f64),
    /// Largest `h_n(y) / (9n)` seen.
    pub max_linear_ratio: f64,
    /// Largest `h_n(y) / exp(10 - 10/n)` seen.
    pub max_exponential_ratio: f64,
    pub violations: Vec<BoundViolation>,
}

impl Lemma1Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Largest `n` checked exactly.
pub const EXACT_BOUND_LIMIT: usize = 20;

/// Snaps `y` to the nearest multiple of 1/1000, as `(p, q)` in lowest terms.
fn snap_rational(y: f64) -> (u64, u64) {
    let p = (y * 1000.0).round() as u64;
    let g = num_integer::gcd(p, 1000);
    if p == 0 {
        (0, 1)
    } else {
        (p / g, 1000 / g)
    }
}

/// Exact test of `J_n(p/q) <= 9n * n^(p/q)`, i.e. `J^q <= (9n)^q n^p`.
fn linear_bound_holds_exactly(j: &Rational, n: u64, p: u64, q: u64) -> bool {
    let q32 = q as u32;
    let lhs = j.numer().magnitude().pow(q32);
    let rhs = j.denom().magnitude().pow(q32) * BigUint::from(9 * n).pow(q32) * BigUint::from(n).pow(p as u32);
    lhs <= rhs
}

/// Verifies `h_n(y) <= 9n` and `h_n(y) <= exp(10 - 10/n)` for
/// `2 <= n <= max_n` and every `y` on the grid.
///
/// For `n <= 20` the polynomial `J_n` is evaluated exactly at `y` snapped to
/// a multiple of 1/1000; the linear bound is then decided in integer
/// arithmetic and the exponential bound from the exact value's logarithm.
/// Larger `n` use the floating recursion.
pub fn lemma1_check(max_n: usize, grid: &[f64]) -> Result<Lemma1Report> {
    if max_n < 2 {
        return Err(Error::InvalidArgument("need max_n >= 2".into()));
    }
    for &y in grid {
        check_closed_domain(y)?;
    }
    let exact_limit = EXACT_BOUND_LIMIT.min(max_n);
    let table = build_h_table(exact_limit, None)?;
    let exact_polys: Vec<DensePolynomial> = (1..=exact_limit)
        .map(|n| j_polynomial(&table, n))
        .collect::<Result<_>>()?;

    struct Partial {
        checked: usize,
        exact_checked: usize,
        max_h: f64,
        argmax: (usize, f64),
        max_linear: f64,
        max_exp: f64,
        violations: Vec<BoundViolation>,
    }

    let partials: Vec<Partial> = grid
        .par_iter()
        .map(|&y| -> Result<Partial> {
            let seq = h_sequence(y, max_n)?;
            let (p, q) = snap_rational(y);
            let y_exact = Rational::new(p.into(), q.into());
            let mut part = Partial {
                checked: 0,
                exact_checked: 0,
                max_h: f64::NEG_INFINITY,
                argmax: (0, y),
                max_linear: 0.0,
                max_exp: 0.0,
                violations: Vec::new(),
            };
            for n in 2..=max_n {
                let exp_bound = 10.0 - 10.0 / n as f64;
                let (h, linear_ok, exp_ok) = if n <= exact_limit {
                    let j = exact_polys[n - 1].eval(&y_exact);
                    let ln_h = if j.is_zero() {
                        f64::NEG_INFINITY
                    } else {
                        ln_biguint(j.numer().magnitude())
                            - ln_biguint(j.denom().magnitude())
                            - (p as f64 / q as f64) * (n as f64).ln()
                    };
                    part.exact_checked += 1;
                    (
                        ln_h.exp(),
                        linear_bound_holds_exactly(&j, n as u64, p, q),
                        ln_h <= exp_bound,
                    )
                } else {
                    let h = seq.get(n).expect("in range");
                    (h, h <= 9.0 * n as f64, h <= exp_bound.exp())
                };
                part.checked += 1;
                if h > part.max_h {
                    part.max_h = h;
                    part.argmax = (n, y);
                }
                part.max_linear = part.max_linear.max(h / (9.0 * n as f64));
                part.max_exp = part.max_exp.max(h / exp_bound.exp());
                if !linear_ok {
                    part.violations.push(BoundViolation {
                        n,
                        y,
                        h,
                        bound: Bound::Linear,
                    });
                }
                if !exp_ok {
                    part.violations.push(BoundViolation {
                        n,
                        y,
                        h,
                        bound: Bound::Exponential,
                    });
                }
            }
            Ok(part)
        })
        .collect::<Result<_>>()?;

    let mut report = Lemma1Report {
        max_n,
        grid: grid.to_vec(),
        checked: 0,
        exact_checked: 0,
        max_h: f64::NEG_INFINITY,
        argmax: (0, 0.0),
        max_linear_ratio: 0.0,
        max_exponential_ratio: 0.0,
        violations: Vec::new(),
    };
    for part in partials {
        report.checked += part.checked;
        report.exact_checked += part.exact_checked;
        if part.max_h > report.max_h {
            report.max_h = part.max_h;
            report.argmax = part.argmax;
        }
        report.max_linear_ratio = report.max_linear_ratio.max(part.max_linear);
        report.max_exponential_ratio = report.max_exponential_ratio.max(part.max_exp);
        report.violations.extend(part.violations);
    }
    Ok(report)
}

/// `0, step, 2 step, ..., 2`.
pub fn uniform_grid(step: f64) -> Vec<f64> {
    let count = (2.0 / step).round() as usize;
    (0..=count).map(|i| (i as f64 * step).min(2.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rational, rational_to_f64};

    #[test]
    fn seeds_match_small_values() {
        let s = h_sequence(1.0, 6).unwrap();
        assert!((s.get(1).unwrap() - 25.0 / 6.0).abs() < 1e-14);
        assert!((s.get(2).unwrap() - 10.0 / 3.0).abs() < 1e-14);
        let s0 = h_sequence(0.0, 6).unwrap();
        assert_eq!(s0.get(2).unwrap(), 0.0);
    }

    #[test]
    fn recursion_matches_exact_polynomials() {
        let table = build_h_table(40, None).unwrap();
        for &y in &[0.05, 0.3, 0.5, 1.0, 1.37, 1.5, 2.0] {
            let seq = h_sequence(y, 40).unwrap();
            for n in 1..=40 {
                let j = j_polynomial(&table, n).unwrap();
                let exact = rational_to_f64(&j.eval(&Rational::from_float(y).unwrap())) * (n as f64).powf(-y);
                let got = seq.get(n).unwrap();
                assert!(
                    (got - exact).abs() <= 1e-12 * exact.abs(),
                    "y = {y}, n = {n}: {got} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(h_sequence(2.5, 10), Err(Error::Domain { .. })));
        assert!(matches!(h_sequence(-0.1, 10), Err(Error::Domain { .. })));
        assert!(matches!(estimate_k(0.0, 1000), Err(Error::Domain { .. })));
        assert!(matches!(estimate_k(2.0, 1000), Err(Error::Domain { .. })));
    }

    #[test]
    fn truncated_tail_matches_full_sum() {
        // Full O(n^2) reference with no early exit.
        let y = 1.3;
        let seq = h_sequence(y, 600).unwrap();
        let h = seq.values();
        let n = 600;
        let m = n - 2;
        let mut full = 0.0;
        let mut w = 6.0 / ((m * (m - 1) * (m - 2)) as f64);
        for k in 3..=m - 3 {
            full += w * (((k * (m - k)) as f64) / n as f64).powf(y) * h[k - 1] * h[m - k - 1];
            w *= (k + 1) as f64 / (m - k) as f64;
        }
        let h_max = h.iter().copied().fold(0.0, f64::max);
        let fast = convolution_tail(h, n, y, h_max);
        assert!((fast - full).abs() <= 1e-14 * full);
    }

    #[test]
    fn k_at_one_short_run() {
        let est = estimate_k(1.0, 20_000).unwrap();
        assert!((est.value - 9.0 / std::f64::consts::PI).abs() < 1e-3, "{est:?}");
        assert!(est.converged);
    }

    #[test]
    fn asymptotic_totals() {
        let n1 = total_cubic_asym(1);
        assert!((n1 - 18.0 / std::f64::consts::PI).abs() < 1e-12);
        // Both closed forms differ by Stirling's correction exp(1/(12n) - 1/(360n^3) + ...).
        let n: f64 = 50.0;
        let diff = total_cubic_asym_ln(50) - total_cubic_asym_stirling_ln(50);
        let correction = 1.0 / (12.0 * n) - 1.0 / (360.0 * n * n * n) + 1.0 / (1260.0 * n.powi(5));
        assert!((diff - correction).abs() < 1e-10);
        assert!(total_cubic_asym_ln(10_000).is_finite());
    }

    #[test]
    fn window_rejections() {
        let k = |_y: f64| -> Result<f64> { Ok(1.0) };
        let err = high_genus_asym(300, 0, &k, DEFAULT_EPSILON).unwrap_err();
        assert!(matches!(err, Error::OutsideWindow { ratio, .. } if (ratio - 52.596).abs() < 0.01));
        assert!(high_genus_asym(300, 150, &k, DEFAULT_EPSILON).is_err());
        assert!(high_genus_asym(300, 147, &k, DEFAULT_EPSILON).is_ok());
        assert!(high_genus_asym(300, 147, &k, 1.5).is_err());
        assert!(high_genus_asym_ln(10_000, 4_996, &k, DEFAULT_EPSILON)
            .unwrap()
            .is_finite());
    }

    #[test]
    fn bound_example_at_two() {
        // h_2(2) = J_2(2)/4 = 156/9
        let j2 = &seed_polynomials()[1];
        let v = j2.eval(&rational(2, 1)) / rational(4, 1);
        assert_eq!(v, rational(156, 9));
        assert!(linear_bound_holds_exactly(&j2.eval(&rational(2, 1)), 2, 2, 1));
        assert!(!linear_bound_holds_exactly(&rational(19 * 4, 1), 2, 2, 1));
    }

    #[test]
    fn bound_small_sweep() {
        let report = lemma1_check(60, &uniform_grid(0.25)).unwrap();
        assert!(report.passed(), "{:?}", report.violations);
        assert_eq!(report.checked, 59 * 9);
        assert_eq!(report.exact_checked, 19 * 9);
        assert!(report.max_h > 0.0);
    }

    #[test]
    fn grid_helper() {
        let g = uniform_grid(0.05);
        assert_eq!(g.len(), 41);
        assert_eq!(*g.last().unwrap(), 2.0);
        assert_eq!(snap_rational(0.05), (1, 20));
        assert_eq!(snap_rational(0.0), (0, 1));
        assert_eq!(snap_rational(2.0), (2, 1));
    }

    #[test]
    fn k_csv() {
        let e = estimate_k(1.0, 200).unwrap();
        let mut buf = Vec::new();
        write_k_csv(&[e], &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("y,N,raw,extrapolated,error_indicator\n1,200,"));
    }
}
