//! Genus distributions of rooted cubic maps.
//!
//! `C[n][g]` counts rooted cubic maps with `2n` vertices on the orientable
//! surface of genus `g`. The table stores the scaled values
//! `H[n][g] = (3n + 2) C[n][g]` produced by the Goulden–Jackson recursion
//!
//! ```text
//! H[n][g] = 4n(3n+2)(3n-2)/(n+1) * H[n-2][g-1]
//!         + 4(3n+2)/(n+1) * sum_{k=-1}^{n-1} sum_{h=0}^{g} H[k][h] H[n-2-k][g-h]
//! ```
//!
//! with `H[-1][g] = [g = 0]/2` and `H[0][g] = 2[g = 0]`.
//!
//! Everything here is exact. The polynomial views `H_n(x)` and `J_n(y)` carry
//! the normalisation `1/(n! 6^n)`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::checkpoint;
use crate::error::{Error, Result};
use crate::exact::{binomial, convolution_sum, factorial, rational, DensePolynomial, IntConvolution, Rational};

/// Default number of rows between checkpoint writes.
pub const DEFAULT_STRIDE: usize = 25;

/// Number of genus slots in row `n`: `g = 0..=(n+1)/2`.
pub fn row_len(n: usize) -> usize {
    n.div_ceil(2) + 1
}

/// Exact `H[n][g]` table for `0 <= n <= max_n`.
///
/// The `n = -1` row is the rational constant `1/2` at `g = 0` and is not
/// stored; see [`HTable::entry`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HTable {
    rows: Vec<Vec<BigUint>>,
}

impl HTable {
    /// Table holding only the initial row `H[0] = [2]`.
    pub fn initial() -> Self {
        HTable {
            rows: vec![vec![BigUint::from(2u32)]],
        }
    }

    pub(crate) fn from_rows(rows: Vec<Vec<BigUint>>) -> Self {
        HTable { rows }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// Row `n >= 0`, indexed by genus.
    pub fn row(&self, n: usize) -> Option<&[BigUint]> {
        self.rows.get(n).map(Vec::as_slice)
    }

    /// `H[n][g]` as a rational, including the `n = -1` row and zeros outside
    /// the support.
    pub fn entry(&self, n: i64, g: i64) -> Rational {
        if g < 0 || n < -1 {
            return Rational::zero();
        }
        if n == -1 {
            return if g == 0 { rational(1, 2) } else { Rational::zero() };
        }
        self.rows
            .get(n as usize)
            .and_then(|row| row.get(g as usize))
            .map(|v| Rational::from_integer(BigInt::from(v.clone())))
            .unwrap_or_else(Rational::zero)
    }

    /// Drops rows above `max_n`.
    pub fn truncate(&mut self, max_n: usize) {
        self.rows.truncate(max_n + 1);
    }

    /// Appends row `max_n + 1`.
    pub fn push_next_row(&mut self, strategy: IntConvolution) -> Result<()> {
        let row = next_row(&self.rows, strategy)?;
        self.rows.push(row);
        Ok(())
    }

    fn check_n(&self, n: usize, min: usize) -> Result<()> {
        if n < min || n > self.max_n() {
            return Err(Error::OutOfRange {
                n: n as i64,
                min: min as i64,
                max: self.max_n() as i64,
            });
        }
        Ok(())
    }
}

/// Computes row `n = rows.len()` from rows `0..n`.
fn next_row(rows: &[Vec<BigUint>], strategy: IntConvolution) -> Result<Vec<BigUint>> {
    let n = rows.len();
    assert!(n >= 1, "row 0 is an initial condition");
    let len = row_len(n);
    let nb = n as u64;

    // All terms are kept doubled so that H[-1] = 1/2 becomes the integer 1:
    //   shifted[g] = 2 H[n-2][g-1]
    //   sum[g]     = 4 sum_{k=-1}^{n-1} sum_h H[k][h] H[n-2-k][g-h]
    // and then H[n][g] = (2n(3n+2)(3n-2) shifted[g] + (3n+2) sum[g]) / (n+1).
    let mut shifted = vec![BigUint::zero(); len];
    if n == 1 {
        shifted[1] = BigUint::one();
    } else {
        for (g, v) in rows[n - 2].iter().enumerate() {
            shifted[g + 1] = v << 1u32;
        }
    }

    let mut sum = vec![BigUint::zero(); len];
    // k = -1 and k = n-1: each contributes 4 * (1/2) * H[n-1][g].
    for (g, v) in rows[n - 1].iter().enumerate() {
        sum[g] += v << 2u32;
    }
    // 0 <= k <= n-2, pairing k with n-2-k.
    if n >= 2 {
        let m = n - 2;
        let outer: Vec<(&[BigUint], &[BigUint])> = (0..=m)
            .filter(|&k| k < m - k)
            .map(|k| (rows[k].as_slice(), rows[m - k].as_slice()))
            .collect();
        let middle: Vec<(&[BigUint], &[BigUint])> = if m.is_multiple_of(2) {
            vec![(rows[m / 2].as_slice(), rows[m / 2].as_slice())]
        } else {
            Vec::new()
        };
        let outer = convolution_sum(&outer, strategy);
        let middle = convolution_sum(&middle, strategy);
        for (g, v) in outer.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if g >= len {
                return Err(support_violation(n, g));
            }
            sum[g] += v << 3u32;
        }
        for (g, v) in middle.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if g >= len {
                return Err(support_violation(n, g));
            }
            sum[g] += v << 2u32;
        }
    }

    let a = BigUint::from(2 * nb * (3 * nb + 2) * (3 * nb - 2));
    let b = BigUint::from(3 * nb + 2);
    let den = BigUint::from(nb + 1);
    let mut row = Vec::with_capacity(len);
    for g in 0..len {
        let numerator = &a * &shifted[g] + &b * &sum[g];
        let (value, rem) = numerator.div_rem(&den);
        if !rem.is_zero() {
            return Err(Error::Integrality {
                n,
                g,
                detail: format!("numerator not divisible by n + 1 = {den}"),
            });
        }
        if !(&value % &b).is_zero() {
            return Err(Error::Integrality {
                n,
                g,
                detail: format!("H not divisible by 3n + 2 = {b}"),
            });
        }
        row.push(value);
    }
    Ok(row)
}

fn support_violation(n: usize, g: usize) -> Error {
    Error::Integrality {
        n,
        g,
        detail: "nonzero entry above the genus bound (n+1)/2".into(),
    }
}

/// Progress of a table build, one report per completed row.
#[derive(Clone, Copy, Debug)]
pub struct RowProgress {
    pub n: usize,
    pub max_n: usize,
    pub elapsed: Duration,
    pub eta: Option<Duration>,
    pub checkpointed: bool,
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub checkpoint: Option<PathBuf>,
    /// Rows between checkpoint writes; the last row is always written.
    pub stride: usize,
    pub convolution: IntConvolution,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            checkpoint: None,
            stride: DEFAULT_STRIDE,
            convolution: IntConvolution::default(),
        }
    }
}

/// Builds the table up to `max_n`, resuming from `checkpoint` if it exists.
pub fn build_h_table(max_n: usize, checkpoint: Option<&Path>) -> Result<HTable> {
    let options = BuildOptions {
        checkpoint: checkpoint.map(Path::to_path_buf),
        ..BuildOptions::default()
    };
    build_h_table_with(max_n, &options, |_| {})
}

pub fn build_h_table_with(
    max_n: usize,
    options: &BuildOptions,
    mut progress: impl FnMut(RowProgress),
) -> Result<HTable> {
    if max_n < 1 {
        return Err(Error::InvalidArgument("max_n must be at least 1".into()));
    }
    if options.stride == 0 {
        return Err(Error::InvalidArgument("checkpoint stride must be positive".into()));
    }
    let mut table = match &options.checkpoint {
        Some(path) if path.exists() => checkpoint::load(path)?,
        _ => HTable::initial(),
    };
    if table.max_n() >= max_n {
        table.truncate(max_n);
        return Ok(table);
    }

    let start = Instant::now();
    let first = table.max_n() + 1;
    // Row cost grows roughly like n^4; used only for the ETA.
    let weight = |n: usize| (n as f64).powi(4);
    let total: f64 = (first..=max_n).map(weight).sum();
    let mut done = 0.0;
    for n in first..=max_n {
        table.push_next_row(options.convolution)?;
        done += weight(n);
        let mut checkpointed = false;
        if let Some(path) = &options.checkpoint {
            if n % options.stride == 0 || n == max_n {
                checkpoint::save(path, &table)?;
                checkpointed = true;
            }
        }
        let elapsed = start.elapsed();
        let eta = (done > 0.0).then(|| elapsed.mul_f64((total - done) / done));
        progress(RowProgress {
            n,
            max_n,
            elapsed,
            eta,
            checkpointed,
        });
    }
    Ok(table)
}

/// `C[n][g]` for fixed `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenusDistribution {
    pub n: usize,
    #[serde(serialize_with = "crate::serialize_decimal_vec")]
    pub counts: Vec<BigUint>,
}

impl GenusDistribution {
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// `J[n][f]`, the number of rooted cubic maps with `2n` vertices and `f`
/// faces. `counts[f]` for `0 <= f <= n + 2`; `counts[0]` is always zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceDistribution {
    pub n: usize,
    #[serde(serialize_with = "crate::serialize_decimal_vec")]
    pub counts: Vec<BigUint>,
}

impl FaceDistribution {
    pub fn count(&self, f: usize) -> BigUint {
        self.counts.get(f).cloned().unwrap_or_default()
    }

    /// `(f, J[n][f])` for every `f` with the parity of `n`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigUint)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(f, _)| f % 2 == self.n % 2 && *f >= 1)
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }
}

/// `C[n][g] = H[n][g] / (3n + 2)`.
pub fn genus_distribution(table: &HTable, n: usize) -> Result<GenusDistribution> {
    table.check_n(n, 1)?;
    let scale = BigUint::from(3 * n as u64 + 2);
    let counts = table.rows[n]
        .iter()
        .enumerate()
        .map(|(g, h)| {
            let (q, r) = h.div_rem(&scale);
            if r.is_zero() {
                Ok(q)
            } else {
                Err(Error::Integrality {
                    n,
                    g,
                    detail: format!("H not divisible by {scale}"),
                })
            }
        })
        .collect::<Result<_>>()?;
    Ok(GenusDistribution { n, counts })
}

/// Reindexes genus to faces by Euler's formula `f = n + 2 - 2g`.
pub fn face_distribution(table: &HTable, n: usize) -> Result<FaceDistribution> {
    Ok(faces_from_genus(&genus_distribution(table, n)?))
}

pub fn faces_from_genus(dist: &GenusDistribution) -> FaceDistribution {
    let n = dist.n;
    let mut counts = vec![BigUint::zero(); n + 3];
    for (g, c) in dist.counts.iter().enumerate() {
        counts[n + 2 - 2 * g] = c.clone();
    }
    FaceDistribution { n, counts }
}

/// `n! 6^n`, the normaliser of `H_n` and `J_n`.
pub fn normaliser(n: usize) -> BigUint {
    factorial(n as u64) * BigUint::from(6u32).pow(n as u32)
}

/// `H_n(x) = (1/(n! 6^n)) sum_g H[n][g] x^g`.
pub fn genus_polynomial(table: &HTable, n: usize) -> Result<DensePolynomial> {
    table.check_n(n, 0)?;
    let den = BigInt::from(normaliser(n));
    Ok(DensePolynomial::new(
        table.rows[n]
            .iter()
            .map(|h| Rational::new(BigInt::from(h.clone()), den.clone()))
            .collect(),
    ))
}

/// `J_n(y) = H_n(1/y^2) y^(n+2)`.
pub fn j_polynomial(table: &HTable, n: usize) -> Result<DensePolynomial> {
    table.check_n(n, 1)?;
    let h = genus_polynomial(table, n)?;
    let mut coeffs = vec![Rational::zero(); n + 3];
    for (g, c) in h.coeffs().iter().enumerate() {
        coeffs[n + 2 - 2 * g] = c.clone();
    }
    Ok(DensePolynomial::new(coeffs))
}

/// `H_0(x), ..., H_max_n(x)` from the polynomial recursion
///
/// ```text
/// H_n = 2(3n+2)/(3n(n+1)) H_{n-1} + (9n^2-4)/(9(n^2-1)) x H_{n-2}
///     + (3n+2)/(9n(n^2-1)) sum_{k=0}^{n-2} H_k H_{n-2-k} / C(n-2, k)
/// ```
///
/// seeded with `H_0 = 2` and `H_1 = (20 + 5x)/6`. Independent of the scalar
/// table recursion.
pub fn genus_polynomials_recursive(max_n: usize) -> Vec<DensePolynomial> {
    let mut polys = vec![DensePolynomial::constant(rational(2, 1))];
    if max_n >= 1 {
        polys.push(DensePolynomial::new(vec![rational(20, 6), rational(5, 6)]));
    }
    for n in 2..=max_n as i64 {
        let c1 = rational(2 * (3 * n + 2), 3 * n * (n + 1));
        let c2 = rational(9 * n * n - 4, 9 * (n * n - 1));
        let c3 = rational(3 * n + 2, 9 * n * (n * n - 1));
        let nu = n as usize;
        let mut conv = DensePolynomial::zero();
        for k in 0..=nu - 2 {
            let w = Rational::new(BigInt::one(), BigInt::from(binomial(n as u64 - 2, k as i64)));
            conv = &conv + &(&polys[k] * &polys[nu - 2 - k]).scale(&w);
        }
        let next = &(&polys[nu - 1].scale(&c1) + &polys[nu - 2].shift(1).scale(&c2)) + &conv.scale(&c3);
        polys.push(next);
    }
    polys.truncate(max_n + 1);
    polys
}

/// `H_n(x)` via [`genus_polynomials_recursive`].
pub fn genus_polynomial_recursive(n: usize) -> DensePolynomial {
    genus_polynomials_recursive(n).pop().expect("at least H_0")
}

/// CSV export with header `n,g,C`, counts as decimal strings.
pub fn write_genus_csv<W: Write>(table: &HTable, mut out: W) -> Result<()> {
    writeln!(out, "n,g,C")?;
    for n in 1..=table.max_n() {
        for (g, c) in genus_distribution(table, n)?.counts.iter().enumerate() {
            writeln!(out, "{n},{g},{c}")?;
        }
    }
    Ok(())
}

/// JSON export: `{"max_n": N, "counts": [[C[1][0], C[1][1]], ...]}` with
/// decimal-string counts; `counts[i]` is row `n = i + 1`.
pub fn genus_json(table: &HTable) -> Result<serde_json::Value> {
    let counts = (1..=table.max_n())
        .map(|n| {
            genus_distribution(table, n).map(|d| {
                d.counts
                    .iter()
                    .map(|c| serde_json::Value::String(c.to_string()))
                    .collect()
            })
        })
        .collect::<Result<Vec<serde_json::Value>>>()?;
    Ok(serde_json::json!({ "max_n": table.max_n(), "counts": counts }))
}
