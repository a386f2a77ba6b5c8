//! Rooted maps counted without regard to genus, through rotation systems.
//!
//! A rooted map with `n` edges corresponds to exactly `2^(n-1) (n-1)!`
//! rotation systems on `n` labelled, oriented edges. Connected (transitive)
//! rotation systems are counted by the formal logarithm of the exponential
//! generating function of all rotation systems, so every count here is
//!
//! ```text
//! E * 2^(1-E) * [w^s] ln( sum_s a_s w^s )
//! ```
//!
//! with `E` the number of edges at size `s` and `a_s` the number of vertex
//! permutations divided by `E!`.

use std::io::Write;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{factorial, series_log, Rational, TruncatedSeries};
use crate::numeric::{ln_biguint, ln_factorial};

/// Largest edge count the brute-force census accepts.
pub const CENSUS_LIMIT: usize = 5;

/// All vertices of degree `degree`.
///
/// Sizes follow the usual conventions: for even degree `2d` the size is the
/// number of vertices `m` (so `m d` edges); for odd degree `r` the size is
/// `k` with `2k` vertices (so `k r` edges), since odd-regular graphs have an
/// even number of vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegularFamily {
    degree: u32,
}

impl RegularFamily {
    pub fn new(degree: u32) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidFamily(format!("degree {degree} is below 2")));
        }
        Ok(RegularFamily { degree })
    }

    pub fn cubic() -> Self {
        RegularFamily { degree: 3 }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }

    pub fn vertices(&self, size: usize) -> usize {
        if self.is_odd() {
            2 * size
        } else {
            size
        }
    }

    pub fn edges(&self, size: usize) -> usize {
        self.vertices(size) * self.degree as usize / 2
    }

    /// Size parameter for a given vertex count; odd degrees need an even count.
    pub fn size_for_vertices(&self, vertices: usize) -> Result<usize> {
        if self.is_odd() {
            if vertices % 2 == 1 {
                return Err(Error::InvalidFamily(format!(
                    "degree {} needs an even number of vertices, got {vertices}",
                    self.degree
                )));
            }
            Ok(vertices / 2)
        } else {
            Ok(vertices)
        }
    }

    pub fn label(&self) -> String {
        format!("regular-{}", self.degree)
    }
}

/// Rooted bouquets (one vertex, all edges loops): `(2n-1)! / ((n-1)! 2^(n-1))`.
pub fn bouquet_count(n: usize) -> BigUint {
    assert!(n >= 1, "a bouquet has at least one edge");
    let n = n as u64;
    factorial(2 * n - 1) / (factorial(n - 1) << (n - 1))
}

/// `E * 2^(1-E) * c`, which must be a positive integer.
fn rooted_from_connected(edges: usize, c: &Rational) -> Result<BigUint> {
    let scaled = c * BigInt::from(edges) / (BigInt::one() << (edges - 1));
    if !scaled.is_integer() || !scaled.is_positive() {
        return Err(Error::Divisibility(format!(
            "rooted count for {edges} edges came out as {scaled}"
        )));
    }
    Ok(scaled.to_integer().magnitude().clone())
}

/// `ln(sum_k (2k)!/k! z^k)` to order `n`.
pub fn all_maps_log_series(n: usize) -> TruncatedSeries {
    let s = TruncatedSeries::from_fn(n, |k| {
        let k = k as u64;
        Rational::from_integer(BigInt::from(factorial(2 * k) / factorial(k)))
    });
    series_log(&s).expect("constant term is 1")
}

/// Rooted maps with `n` edges, any genus, any degrees.
pub fn total_maps_exact(n: usize) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one edge".into()));
    }
    let log = all_maps_log_series(n);
    rooted_from_connected(n, log.coeff(n).expect("within order"))
}

/// `a_s = (2E)! / (deg^V V! E!)`: vertex-rotation permutations of `2E` darts
/// with `V` cycles of length `deg`, over `E!`.
pub fn regular_series_coeff(family: RegularFamily, size: usize) -> Rational {
    let v = family.vertices(size) as u64;
    let e = family.edges(size) as u64;
    let num = factorial(2 * e);
    let den = BigUint::from(family.degree).pow(v as u32) * factorial(v) * factorial(e);
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn regular_log_series(family: RegularFamily, order: usize) -> TruncatedSeries {
    let s = TruncatedSeries::from_fn(order, |m| regular_series_coeff(family, m));
    series_log(&s).expect("constant term is 1")
}

/// Rooted `deg`-regular maps of the given size, any genus.
pub fn regular_maps_exact(family: RegularFamily, size: usize) -> Result<BigUint> {
    if size == 0 {
        return Err(Error::InvalidArgument("size must be at least 1".into()));
    }
    let log = regular_log_series(family, size);
    rooted_from_connected(family.edges(size), log.coeff(size).expect("within order"))
}

/// Same as [`regular_maps_exact`] for every size `1..=max_size`, sharing one
/// series logarithm.
pub fn regular_maps_exact_upto(family: RegularFamily, max_size: usize) -> Result<Vec<BigUint>> {
    let log = regular_log_series(family, max_size);
    (1..=max_size)
        .map(|s| rooted_from_connected(family.edges(s), &log.coeffs()[s]))
        .collect()
}

/// Rooted cubic maps with `2n` vertices, any genus.
pub fn cubic_maps_exact(n: usize) -> Result<BigUint> {
    regular_maps_exact(RegularFamily::cubic(), n)
}

/// `ln` of `(2E)! / (V! (E-1)!) deg^(-V) 2^(1-E)`.
pub fn regular_maps_asym_ln(family: RegularFamily, size: usize) -> f64 {
    let v = family.vertices(size) as u64;
    let e = family.edges(size) as u64;
    ln_factorial(2 * e) - ln_factorial(v) - ln_factorial(e - 1) - v as f64 * (family.degree as f64).ln()
        + (1.0 - e as f64) * std::f64::consts::LN_2
}

/// Leading-order asymptotic count of rooted regular maps.
pub fn regular_maps_asym(family: RegularFamily, size: usize) -> f64 {
    regular_maps_asym_ln(family, size).exp()
}

/// `ln` of `(2n)! / (n-1)! 2^(1-n)`.
pub fn total_maps_asym_ln(n: usize) -> f64 {
    let n = n as u64;
    ln_factorial(2 * n) - ln_factorial(n - 1) + (1.0 - n as f64) * std::f64::consts::LN_2
}

/// Leading-order asymptotic count of all rooted maps with `n` edges.
pub fn total_maps_asym(n: usize) -> f64 {
    total_maps_asym_ln(n).exp()
}

/// `exact / exp(ln_asym)` without leaving log space.
pub fn ratio_to_asym(exact: &BigUint, ln_asym: f64) -> f64 {
    (ln_biguint(exact) - ln_asym).exp()
}

/// Successive ratios `a_s / a_{s-1}` of a family's series coefficients.
pub fn growth_ratios(family: RegularFamily, max_size: usize) -> Vec<Rational> {
    let coeffs: Vec<Rational> = (0..=max_size).map(|s| regular_series_coeff(family, s)).collect();
    coeffs.windows(2).map(|w| &w[1] / &w[0]).collect()
}

/// Result of exhaustively enumerating rotation systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSystemCensus {
    pub edge_count: usize,
    pub degree_filter: Option<u32>,
    /// Dart permutations that passed the degree filter.
    pub rotation_systems: u64,
    /// Those whose monodromy group (with the edge involution) is transitive.
    pub transitive: u64,
    /// `2^(n-1) (n-1)!`.
    pub divisor: BigUint,
    pub rooted_maps: BigUint,
}

/// Enumerates every vertex rotation on `2n` darts (dart `2i` paired with
/// `2i + 1`), keeps those whose cycles all have length `degree_filter` when
/// given, and counts the transitive ones.
pub fn rotation_census(n_edges: usize, degree_filter: Option<u32>) -> Result<RotationSystemCensus> {
    if n_edges > CENSUS_LIMIT {
        return Err(Error::CensusTooLarge {
            n_edges,
            limit: CENSUS_LIMIT,
        });
    }
    if n_edges == 0 {
        return Err(Error::InvalidArgument("need at least one edge".into()));
    }
    let darts = 2 * n_edges;
    // Split on the image of dart 0; each branch is independent.
    let (rotation_systems, transitive) = (0..darts)
        .into_par_iter()
        .map(|first| {
            let mut perm = vec![usize::MAX; darts];
            perm[0] = first;
            let mut used = 1u32 << first;
            let mut counts = (0u64, 0u64);
            enumerate(&mut perm, 1, &mut used, degree_filter, &mut counts);
            counts
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let divisor = factorial(n_edges as u64 - 1) << (n_edges - 1);
    let (rooted, rem) = BigUint::from(transitive).div_rem(&divisor);
    if !rem.is_zero() {
        return Err(Error::Divisibility(format!(
            "{transitive} transitive rotation systems on {n_edges} edges not divisible by {divisor}"
        )));
    }
    Ok(RotationSystemCensus {
        edge_count: n_edges,
        degree_filter,
        rotation_systems,
        transitive,
        divisor,
        rooted_maps: rooted,
    })
}

/// Rooted maps with `n_edges` edges by exhaustive enumeration.
pub fn brute_force_census(n_edges: usize, degree_filter: Option<u32>) -> Result<BigUint> {
    Ok(rotation_census(n_edges, degree_filter)?.rooted_maps)
}

fn enumerate(perm: &mut [usize], pos: usize, used: &mut u32, filter: Option<u32>, counts: &mut (u64, u64)) {
    let darts = perm.len();
    if pos == darts {
        if let Some(deg) = filter {
            if !all_cycles_have_length(perm, deg as usize) {
                return;
            }
        }
        counts.0 += 1;
        if is_transitive(perm) {
            counts.1 += 1;
        }
        return;
    }
    for image in 0..darts {
        if *used & (1 << image) != 0 {
            continue;
        }
        perm[pos] = image;
        *used |= 1 << image;
        enumerate(perm, pos + 1, used, filter, counts);
        *used &= !(1 << image);
    }
}

fn all_cycles_have_length(perm: &[usize], len: usize) -> bool {
    let mut seen = 0u32;
    for start in 0..perm.len() {
        if seen & (1 << start) != 0 {
            continue;
        }
        let mut d = start;
        let mut cycle = 0;
        loop {
            seen |= 1 << d;
            cycle += 1;
            d = perm[d];
            if d == start {
                break;
            }
        }
        if cycle != len {
            return false;
        }
    }
    true
}

/// Union-find over darts joined by the rotation and by the edge pairing.
fn is_transitive(perm: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..perm.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = perm.len();
    let mut union = |a: usize, b: usize, parent: &mut Vec<usize>| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    };
    for (d, &image) in perm.iter().enumerate() {
        union(d, image, &mut parent);
        union(d, d ^ 1, &mut parent);
    }
    components == 1
}

/// One row of the `count` export.
#[derive(Clone, Debug)]
pub struct CountRow {
    pub family: String,
    pub size: usize,
    pub exact: BigUint,
    pub asym: f64,
    pub ratio: f64,
}

/// Exact and asymptotic counts for sizes `1..=max_size`; `family = None`
/// means all maps, sized by edges.
pub fn count_table(family: Option<RegularFamily>, max_size: usize) -> Result<Vec<CountRow>> {
    let (label, exact, ln_asym): (String, Vec<BigUint>, Vec<f64>) = match family {
        Some(f) => (
            f.label(),
            regular_maps_exact_upto(f, max_size)?,
            (1..=max_size).map(|s| regular_maps_asym_ln(f, s)).collect(),
        ),
        None => {
            let log = all_maps_log_series(max_size);
            (
                "all".to_string(),
                (1..=max_size)
                    .map(|n| rooted_from_connected(n, &log.coeffs()[n]))
                    .collect::<Result<_>>()?,
                (1..=max_size).map(total_maps_asym_ln).collect(),
            )
        }
    };
    Ok(exact
        .into_iter()
        .zip(ln_asym)
        .enumerate()
        .map(|(i, (exact, ln_asym))| CountRow {
            family: label.clone(),
            size: i + 1,
            ratio: ratio_to_asym(&exact, ln_asym),
            asym: ln_asym.exp(),
            exact,
        })
        .collect())
}

/// CSV with header `family,size,exact,asym,ratio`.
pub fn write_count_csv<W: Write>(rows: &[CountRow], mut out: W) -> Result<()> {
    writeln!(out, "family,size,exact,asym,ratio")?;
    for r in rows {
        writeln!(out, "{},{},{},{:e},{}", r.family, r.size, r.exact, r.asym, r.ratio)?;
    }
    Ok(())
}

pub fn count_json(rows: &[CountRow]) -> serde_json::Value {
    serde_json::Value::Array(
        rows.iter()
            .map(|r| {
                serde_json::json!({
                    "family": r.family,
                    "size": r.size,
                    "exact": r.exact.to_string(),
                    "asym": r.asym,
                    "ratio": r.ratio,
                })
            })
            .collect(),
    )
}

/// `a_s / a_{s-1}` as floats, for growth diagnostics.
pub fn growth_ratios_f64(family: RegularFamily, max_size: usize) -> Vec<f64> {
    growth_ratios(family, max_size)
        .iter()
        .map(|q| q.to_f64().unwrap_or(f64::INFINITY))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn bouquets() {
        assert_eq!(bouquet_count(1), big(1));
        assert_eq!(bouquet_count(2), big(3));
        assert_eq!(bouquet_count(3), big(15));
        // single-vertex census: all rotations are one 2n-cycle
        assert_eq!(brute_force_census(2, Some(4)).unwrap(), big(3));
        assert_eq!(brute_force_census(3, Some(6)).unwrap(), big(15));
        // bouquets are the 2d-regular maps with one vertex
        for d in 1..=4 {
            let f = RegularFamily::new(2 * d).unwrap();
            assert_eq!(regular_maps_exact(f, 1).unwrap(), bouquet_count(d as usize));
        }
    }

    #[test]
    fn total_maps_small() {
        assert_eq!(total_maps_exact(1).unwrap(), big(2));
        assert_eq!(total_maps_exact(2).unwrap(), big(10));
        assert_eq!(brute_force_census(1, None).unwrap(), big(2));
        assert_eq!(brute_force_census(2, None).unwrap(), big(10));
        assert_eq!(brute_force_census(3, None).unwrap(), total_maps_exact(3).unwrap());
    }

    #[test]
    fn cubic_small() {
        assert_eq!(cubic_maps_exact(1).unwrap(), big(5));
        assert_eq!(cubic_maps_exact(2).unwrap(), big(60));
        assert_eq!(brute_force_census(3, Some(3)).unwrap(), big(5));
    }

    #[test]
    fn quartic_against_census() {
        let f = RegularFamily::new(4).unwrap();
        assert_eq!(
            regular_maps_exact(f, 1).unwrap(),
            brute_force_census(2, Some(4)).unwrap()
        );
        assert_eq!(
            regular_maps_exact(f, 2).unwrap(),
            brute_force_census(4, Some(4)).unwrap()
        );
    }

    #[test]
    fn census_limits() {
        assert!(matches!(rotation_census(6, None), Err(Error::CensusTooLarge { .. })));
        assert!(rotation_census(0, None).is_err());
    }

    #[test]
    fn family_validation() {
        assert!(RegularFamily::new(1).is_err());
        let cubic = RegularFamily::cubic();
        assert!(cubic.size_for_vertices(3).is_err());
        assert_eq!(cubic.size_for_vertices(4).unwrap(), 2);
        assert_eq!(cubic.edges(2), 6);
        let quartic = RegularFamily::new(4).unwrap();
        assert_eq!(quartic.size_for_vertices(3).unwrap(), 3);
        assert_eq!(quartic.edges(3), 6);
    }

    #[test]
    fn asymptotic_formulas_at_small_sizes() {
        assert!((regular_maps_asym(RegularFamily::cubic(), 1) - 5.0).abs() < 1e-9);
        assert!((total_maps_asym(2) - 12.0).abs() < 1e-9);
    }

    #[test]
    fn upto_matches_single_queries() {
        let f = RegularFamily::cubic();
        let all = regular_maps_exact_upto(f, 8).unwrap();
        for (i, v) in all.iter().enumerate() {
            assert_eq!(*v, cubic_maps_exact(i + 1).unwrap());
        }
    }

    #[test]
    fn super_exponential_growth() {
        for degree in [3, 4, 5, 6] {
            let f = RegularFamily::new(degree).unwrap();
            let ratios = growth_ratios(f, 25);
            assert!(ratios.windows(2).all(|w| w[1] > w[0]), "degree {degree}");
        }
        // all maps: a_n / a_{n-1} = 2(2n-1)
        let a = |k: u64| Rational::from_integer(BigInt::from(factorial(2 * k) / factorial(k)));
        for n in 1..20u64 {
            assert_eq!(a(n) / a(n - 1), Rational::from_integer(BigInt::from(2 * (2 * n - 1))));
        }
    }

    #[test]
    fn count_rows_and_csv() {
        let rows = count_table(Some(RegularFamily::cubic()), 3).unwrap();
        assert_eq!(rows[0].exact, big(5));
        assert!((rows[0].ratio - 1.0).abs() < 1e-12);
        let mut buf = Vec::new();
        write_count_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("family,size,exact,asym,ratio\nregular-3,1,5,"));
        let all = count_table(None, 2).unwrap();
        assert_eq!(all[1].exact, big(10));
        assert_eq!(count_json(&all)[1]["exact"], "10");
    }
}
