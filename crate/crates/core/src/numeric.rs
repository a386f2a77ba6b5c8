//! Floating-point helpers shared by the asymptotic and statistics modules.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Natural log of a big integer, accurate to about one ulp of the mantissa.
/// Returns `-inf` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        if let Some(v) = x.to_f64() {
            return v.ln();
        }
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::MAX);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln Γ(x)`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Standard normal CDF.
pub fn normal_cdf(t: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-t / std::f64::consts::SQRT_2)
}

/// Scientific notation for `exp(ln_value)`, which may lie far outside the
/// `f64` range.
pub fn format_from_ln(ln_value: f64) -> String {
    if !ln_value.is_finite() {
        return if ln_value < 0.0 { "0".into() } else { "inf".into() };
    }
    let log10 = ln_value / std::f64::consts::LN_10;
    let mut exponent = log10.floor();
    let mut mantissa = 10f64.powf(log10 - exponent);
    if mantissa >= 9.999_999_999_5 {
        mantissa /= 10.0;
        exponent += 1.0;
    }
    format!("{mantissa:.10}e{exponent}")
}

/// Neumaier (improved Kahan) compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::factorial;

    #[test]
    fn ln_of_big_integers() {
        assert_eq!(ln_biguint(&BigUint::from(0u32)), f64::NEG_INFINITY);
        assert!((ln_biguint(&BigUint::from(1000u32)) - 1000f64.ln()).abs() < 1e-15);
        let f = factorial(1000);
        let direct: f64 = (1..=1000).map(|k| (k as f64).ln()).sum();
        assert!((ln_biguint(&f) - direct).abs() / direct < 1e-13);
        assert!((ln_factorial(1000) - direct).abs() / direct < 1e-13);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let terms = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = terms.iter().sum();
        assert_eq!(naive, 0.0);
        assert_eq!(terms.iter().copied().collect::<CompensatedSum>().value(), 2.0);
    }

    #[test]
    fn formats_huge_values() {
        assert_eq!(format_from_ln(1000f64.ln()), "1.0000000000e3");
        assert_eq!(
            format_from_ln(2000.0 * std::f64::consts::LN_10 + 2.5f64.ln()),
            "2.5000000000e2000"
        );
        assert_eq!(format_from_ln(f64::NEG_INFINITY), "0");
    }

    #[test]
    fn normal_cdf_values() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.96) - 0.975_002_104_851_780).abs() < 1e-11);
        assert!(normal_cdf(-40.0) >= 0.0);
    }
}
