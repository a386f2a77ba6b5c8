//! Moments of the genus and face distributions of rooted cubic maps, and
//! normality diagnostics for the genus distribution.
//!
//! Exact moments come from the count table. Face moments for large `n` come
//! from order-2 jets of `J_n(y)` at `y = 1`, since `J_n'(1)/J_n(1)` is the
//! mean number of faces.

use std::io::Write;
use std::ops::Mul;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::asymptotics::seed_polynomials;
use crate::cubic::{FaceDistribution, GenusDistribution};
use crate::error::{Error, Result};
use crate::exact::{format_rational, rational, rational_to_f64, Rational};
use crate::numeric::{ln_biguint, normal_cdf, CompensatedSum};

fn serialize_rational<S: Serializer>(value: &Rational, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_str(&format_rational(value))
}

/// Mean and variance of a count-weighted distribution over `0, 1, 2, ...`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionStats {
    pub n: usize,
    #[serde(serialize_with = "crate::serialize_decimal")]
    pub total: BigUint,
    #[serde(serialize_with = "serialize_rational")]
    pub mean: Rational,
    pub mean_f64: f64,
    #[serde(serialize_with = "serialize_rational")]
    pub variance: Rational,
    pub variance_f64: f64,
    /// Smallest and largest index with a nonzero count.
    pub support: (usize, usize),
}

fn moments<'a>(n: usize, weighted: impl Iterator<Item = (usize, &'a BigUint)>) -> Result<DistributionStats> {
    let mut total = BigUint::zero();
    let mut s1 = BigUint::zero();
    let mut s2 = BigUint::zero();
    let mut support: Option<(usize, usize)> = None;
    for (i, c) in weighted {
        if c.is_zero() {
            continue;
        }
        total += c;
        s1 += c * BigUint::from(i);
        s2 += c * BigUint::from(i * i);
        support = Some(match support {
            None => (i, i),
            Some((lo, _)) => (lo, i),
        });
    }
    let support = support.ok_or(Error::EmptyDistribution)?;
    let t = BigInt::from(total.clone());
    let s1 = BigInt::from(s1);
    let mean = Rational::new(s1.clone(), t.clone());
    let variance = Rational::new(BigInt::from(s2) * &t - &s1 * &s1, &t * &t);
    Ok(DistributionStats {
        n,
        mean_f64: rational_to_f64(&mean),
        variance_f64: rational_to_f64(&variance),
        total,
        mean,
        variance,
        support,
    })
}

/// Exact moments of `g` under `C[n][g]`.
pub fn genus_stats(dist: &GenusDistribution) -> Result<DistributionStats> {
    moments(dist.n, dist.counts.iter().enumerate())
}

/// Exact moments of `f` under `J[n][f]`.
pub fn region_stats(dist: &FaceDistribution) -> Result<DistributionStats> {
    moments(dist.n, dist.counts.iter().enumerate())
}

/// Checks `mean_f = n + 2 - 2 mean_g` and `var_f = 4 var_g` exactly.
pub fn linear_transform_holds(genus: &DistributionStats, faces: &DistributionStats) -> bool {
    let n = genus.n as i64;
    faces.mean == rational(n + 2, 1) - genus.mean.clone() * rational(2, 1)
        && faces.variance == genus.variance.clone() * rational(4, 1)
}

/// Value, first and second derivative of `J_n` at `y = 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MomentJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl MomentJet {
    pub fn new(value: f64, d1: f64, d2: f64) -> Self {
        MomentJet { value, d1, d2 }
    }

    pub fn constant(value: f64) -> Self {
        MomentJet::new(value, 0.0, 0.0)
    }

    pub fn scale(self, c: f64) -> Self {
        MomentJet::new(c * self.value, c * self.d1, c * self.d2)
    }

    fn max_component(self) -> f64 {
        self.value.abs().max(self.d1.abs()).max(self.d2.abs())
    }

    /// Mean number of faces, `J'/J`.
    pub fn face_mean(&self) -> f64 {
        self.d1 / self.value
    }

    /// Face variance, `J''/J + J'/J - (J'/J)^2`.
    pub fn face_variance(&self) -> f64 {
        let m = self.face_mean();
        self.d2 / self.value + m - m * m
    }
}

/// Product rule truncated at order 2.
impl Mul for MomentJet {
    type Output = MomentJet;

    fn mul(self, other: Self) -> Self {
        MomentJet {
            value: self.value * other.value,
            d1: self.value * other.d1 + self.d1 * other.value,
            d2: self.value * other.d2 + 2.0 * self.d1 * other.d1 + self.d2 * other.value,
        }
    }
}

#[derive(Default)]
struct JetSum([CompensatedSum; 3]);

impl JetSum {
    fn add(&mut self, j: MomentJet) {
        self.0[0].add(j.value);
        self.0[1].add(j.d1);
        self.0[2].add(j.d2);
    }

    fn value(&self) -> MomentJet {
        MomentJet::new(self.0[0].value(), self.0[1].value(), self.0[2].value())
    }
}

/// Jets of `J_1, ..., J_N` at `y = 1`.
///
/// The first six come from the exact polynomials; beyond that the split
/// recursion for `J_n(y)` is carried out on jets.
pub fn moment_jets(len: usize) -> Vec<MomentJet> {
    let mut jets: Vec<MomentJet> = seed_polynomials()
        .iter()
        .take(len)
        .map(|p| {
            let one = rational(1, 1);
            let d1 = p.derivative();
            let d2 = d1.derivative();
            MomentJet::new(
                rational_to_f64(&p.eval(&one)),
                rational_to_f64(&d1.eval(&one)),
                rational_to_f64(&d2.eval(&one)),
            )
        })
        .collect();
    let y = MomentJet::new(1.0, 1.0, 0.0);
    let y2 = MomentJet::new(1.0, 2.0, 2.0);
    let mut max_component = jets.iter().map(|j| j.max_component()).fold(0.0, f64::max);
    for n in 7..=len {
        let nf = n as f64;
        let base = 9.0 * nf * (nf * nf - 1.0);
        let at = |k: usize| jets[k - 1];
        let mut acc = JetSum::default();
        acc.add((y * at(n - 1)).scale(2.0 * (3.0 * nf + 2.0) / (3.0 * nf * (nf + 1.0))));
        let a = (9.0 * nf * nf - 4.0) / (9.0 * (nf * nf - 1.0));
        let b = 4.0 * (3.0 * nf + 2.0) / base;
        let c2 = MomentJet::new(a + b * y2.value, b * y2.d1, b * y2.d2);
        acc.add(c2 * at(n - 2));
        acc.add((at(1) * at(n - 3)).scale(2.0 * (3.0 * nf + 2.0) / (base * (nf - 2.0))));
        acc.add((at(2) * at(n - 4)).scale(4.0 * (3.0 * nf + 2.0) / (base * (nf - 2.0) * (nf - 3.0))));

        if n >= 8 {
            let m = n - 2;
            let mf = m as f64;
            let mut weight = 6.0 / (mf * (mf - 1.0) * (mf - 2.0));
            let mut conv = JetSum::default();
            let mut k = 3;
            while k <= m - k {
                let term = (at(k) * at(m - k)).scale(weight);
                conv.add(if k == m - k { term } else { term.scale(2.0) });
                let remaining = (m / 2 - k) as f64;
                let smallest = conv.value().value.min(conv.value().d1).min(conv.value().d2);
                if 8.0 * remaining * weight * max_component * max_component <= 1e-18 * smallest {
                    break;
                }
                weight *= (k + 1) as f64 / (m - k) as f64;
                k += 1;
            }
            acc.add(conv.value().scale((3.0 * nf + 2.0) / base));
        }
        let next = acc.value();
        max_component = max_component.max(next.max_component());
        jets.push(next);
    }
    jets
}

/// Empirical genus CDF under two standardisations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalityReport {
    pub n: usize,
    pub t: Vec<f64>,
    /// `Phi(t)`.
    pub normal: Vec<f64>,
    /// `P(g <= (n - ln n)/2 + t sqrt(ln n)/2)`.
    pub centred_cdf: Vec<f64>,
    /// `P(g <= mean + t sd)` with the exact mean and standard deviation.
    pub exact_cdf: Vec<f64>,
    /// `max |centred_cdf - Phi|` over the grid.
    pub centred_sup: f64,
    /// `max |exact_cdf - Phi|` over the grid.
    pub exact_sup: f64,
    /// Kolmogorov-Smirnov distance between the exactly standardised genus
    /// distribution and the standard normal, over all thresholds.
    pub ks: f64,
}

/// Cumulative probabilities `P(g <= i)` for every `i`.
fn cumulative(dist: &GenusDistribution) -> Result<Vec<f64>> {
    let total = dist.total();
    if total.is_zero() {
        return Err(Error::EmptyDistribution);
    }
    let ln_total = ln_biguint(&total);
    let mut running = BigUint::zero();
    Ok(dist
        .counts
        .iter()
        .map(|c| {
            running += c;
            (ln_biguint(&running) - ln_total).exp().min(1.0)
        })
        .collect())
}

fn cdf_at(cum: &[f64], x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let i = x.floor() as usize;
    cum[i.min(cum.len() - 1)]
}

pub fn normality_report(dist: &GenusDistribution, t_grid: &[f64]) -> Result<NormalityReport> {
    if dist.n < 2 {
        return Err(Error::InvalidArgument(format!(
            "normality needs n >= 2, got {}",
            dist.n
        )));
    }
    let stats = genus_stats(dist)?;
    let cum = cumulative(dist)?;
    let nf = dist.n as f64;
    let ln_n = nf.ln();
    let (mu, sd) = (stats.mean_f64, stats.variance_f64.sqrt());

    let normal: Vec<f64> = t_grid.iter().map(|&t| normal_cdf(t)).collect();
    let centred_cdf: Vec<f64> = t_grid
        .iter()
        .map(|&t| cdf_at(&cum, (nf - ln_n) / 2.0 + t * ln_n.sqrt() / 2.0))
        .collect();
    let exact_cdf: Vec<f64> = t_grid.iter().map(|&t| cdf_at(&cum, mu + t * sd)).collect();
    let sup = |cdf: &[f64]| cdf.iter().zip(&normal).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let mut ks: f64 = 0.0;
    let mut below = 0.0;
    for (g, &at) in cum.iter().enumerate() {
        let phi = if sd > 0.0 {
            normal_cdf((g as f64 - mu) / sd)
        } else if (g as f64) < mu {
            0.0
        } else {
            1.0
        };
        ks = ks.max((below - phi).abs()).max((at - phi).abs());
        below = at;
    }

    Ok(NormalityReport {
        n: dist.n,
        t: t_grid.to_vec(),
        centred_sup: sup(&centred_cdf),
        exact_sup: sup(&exact_cdf),
        normal,
        centred_cdf,
        exact_cdf,
        ks,
    })
}

/// One line of the moment sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsRow {
    pub n: usize,
    pub genus: DistributionStats,
    pub faces: DistributionStats,
    /// `(n - ln n)/2`.
    pub predicted_mean: f64,
    /// `ln n / 4`.
    pub predicted_variance: f64,
    pub mean_ratio: f64,
    pub variance_ratio: f64,
    pub ks: f64,
}

pub fn stats_row(dist: &GenusDistribution) -> Result<StatsRow> {
    let genus = genus_stats(dist)?;
    let faces = region_stats(&crate::cubic::faces_from_genus(dist))?;
    let nf = dist.n as f64;
    let predicted_mean = (nf - nf.ln()) / 2.0;
    let predicted_variance = nf.ln() / 4.0;
    let ks = if dist.n >= 2 {
        normality_report(dist, &[])?.ks
    } else {
        f64::NAN
    };
    Ok(StatsRow {
        n: dist.n,
        mean_ratio: genus.mean_f64 / predicted_mean,
        variance_ratio: genus.variance_f64 / predicted_variance,
        genus,
        faces,
        predicted_mean,
        predicted_variance,
        ks,
    })
}

pub fn write_stats_csv<W: Write>(rows: &[StatsRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "n,mean,mean_f64,variance,variance_f64,predicted_mean,predicted_variance,mean_ratio,variance_ratio,face_mean,face_variance,ks"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            format_rational(&r.genus.mean),
            r.genus.mean_f64,
            format_rational(&r.genus.variance),
            r.genus.variance_f64,
            r.predicted_mean,
            r.predicted_variance,
            r.mean_ratio,
            r.variance_ratio,
            r.faces.mean_f64,
            r.faces.variance_f64,
            r.ks
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::{build_h_table, face_distribution, genus_distribution, j_polynomial};
    use proptest::prelude::*;

    fn dist(n: usize, counts: &[u64]) -> GenusDistribution {
        GenusDistribution {
            n,
            counts: counts.iter().map(|&c| BigUint::from(c)).collect(),
        }
    }

    #[test]
    fn small_rows() {
        let s1 = genus_stats(&dist(1, &[4, 1])).unwrap();
        assert_eq!(
            (s1.mean.clone(), s1.variance.clone()),
            (rational(1, 5), rational(4, 25))
        );
        assert_eq!(s1.support, (0, 1));
        let s2 = genus_stats(&dist(2, &[32, 28])).unwrap();
        assert_eq!((s2.mean, s2.variance), (rational(7, 15), rational(56, 225)));

        let f1 = region_stats(&crate::cubic::faces_from_genus(&dist(1, &[4, 1]))).unwrap();
        assert_eq!(
            (f1.mean.clone(), f1.variance.clone()),
            (rational(13, 5), rational(16, 25))
        );
        assert_eq!(f1.support, (1, 3));
        let f2 = region_stats(&crate::cubic::faces_from_genus(&dist(2, &[32, 28]))).unwrap();
        assert_eq!(f2.mean, rational(46, 15));
    }

    #[test]
    fn point_mass_and_empty() {
        let s = genus_stats(&dist(5, &[0, 0, 7, 0])).unwrap();
        assert_eq!(s.variance, rational(0, 1));
        assert_eq!(s.mean, rational(2, 1));
        assert!(matches!(genus_stats(&dist(5, &[0, 0])), Err(Error::EmptyDistribution)));
    }

    #[test]
    fn first_jet() {
        let j = moment_jets(1)[0];
        let close = |a: f64, b: f64| (a - b).abs() < 1e-14;
        assert!(close(j.value, 25.0 / 6.0) && close(j.d1, 65.0 / 6.0) && close(j.d2, 20.0));
        let c = MomentJet::constant(3.0) * MomentJet::constant(2.0);
        assert_eq!(c, MomentJet::constant(6.0));
    }

    #[test]
    fn jets_match_exact_moments() {
        let table = build_h_table(40, None).unwrap();
        let jets = moment_jets(40);
        for n in 1..=40 {
            let j = j_polynomial(&table, n).unwrap();
            let one = rational(1, 1);
            let value = rational_to_f64(&j.eval(&one));
            assert!((jets[n - 1].value - value).abs() <= 1e-12 * value);
            let faces = region_stats(&face_distribution(&table, n).unwrap()).unwrap();
            let rel = |a: f64, b: f64| ((a - b) / b).abs();
            assert!(rel(jets[n - 1].face_mean(), faces.mean_f64) < 1e-12, "n = {n}");
            assert!(rel(jets[n - 1].face_variance(), faces.variance_f64) < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn jets_reach_large_n() {
        let jets = moment_jets(5000);
        let last = jets[4999];
        // J_n(1)/n tends to 9/pi.
        assert!((last.value / 5000.0 - 9.0 / std::f64::consts::PI).abs() < 1e-2);
        assert!(last.face_mean() > jets[999].face_mean());
        assert!(last.face_variance() > 0.0);
    }

    #[test]
    fn normality_report_is_a_cdf() {
        let table = build_h_table(60, None).unwrap();
        let d = genus_distribution(&table, 60).unwrap();
        let grid: Vec<f64> = (-40..=40).map(|i| i as f64 / 4.0).collect();
        let rep = normality_report(&d, &grid).unwrap();
        for cdf in [&rep.centred_cdf, &rep.exact_cdf] {
            assert!(cdf.windows(2).all(|w| w[0] <= w[1]));
            assert!(cdf.iter().all(|&p| (0.0..=1.0).contains(&p)));
            assert_eq!(*cdf.last().unwrap(), 1.0);
            assert!(cdf[0] < 1e-9);
        }
        assert!(rep.ks >= rep.exact_sup);
        assert!(rep.ks < 0.5);
        assert!(normality_report(&genus_distribution(&table, 1).unwrap(), &grid).is_err());
    }

    #[test]
    fn stats_csv() {
        let rows = vec![stats_row(&dist(1, &[4, 1])).unwrap()];
        let mut buf = Vec::new();
        write_stats_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("1,1/5,0.2,4/25,0.16,"));
    }

    proptest! {
        #[test]
        fn transform_identities(counts in proptest::collection::vec(0u64..1_000_000, 1..12)) {
            prop_assume!(counts.iter().any(|&c| c > 0));
            let n = 2 * counts.len();
            let g = dist(n, &counts);
            let gs = genus_stats(&g).unwrap();
            let fs = region_stats(&crate::cubic::faces_from_genus(&g)).unwrap();
            prop_assert!(linear_transform_holds(&gs, &fs));
            prop_assert!(gs.variance >= rational(0, 1));
            prop_assert!(gs.mean >= rational(gs.support.0 as i64, 1));
            prop_assert!(gs.mean <= rational(gs.support.1 as i64, 1));
        }
    }
}
