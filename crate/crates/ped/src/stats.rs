//! Interval estimates and significance tests used by the experiments.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Two-sided normal quantile for confidence `level`, e.g. 1.96 for 0.95.
pub fn z_for(level: f64) -> f64 {
    std_normal().inverse_cdf(0.5 + level / 2.0)
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson(k: u64, n: u64, level: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = z_for(level);
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Pooled two-proportion z statistic for `p2 − p1` and the one-sided
/// p-value of "p2 < p1".
pub fn two_proportion(k1: u64, n1: u64, k2: u64, n2: u64) -> (f64, f64) {
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let (p1, p2) = (k1 as f64 / n1f, k2 as f64 / n2f);
    let pooled = (k1 + k2) as f64 / (n1f + n2f);
    let se = (pooled * (1.0 - pooled) * (1.0 / n1f + 1.0 / n2f)).sqrt();
    if se == 0.0 {
        return (0.0, if p2 < p1 { 0.0 } else { 1.0 });
    }
    let z = (p2 - p1) / se;
    (z, std_normal().cdf(z))
}

/// Pearson goodness-of-fit: statistic, degrees of freedom, upper-tail p-value.
pub fn chi_square(observed: &[u64], expected_prob: &[f64]) -> (f64, usize, f64) {
    assert_eq!(observed.len(), expected_prob.len());
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected_prob) {
        if p <= 0.0 {
            assert_eq!(o, 0, "observation in a zero-probability cell");
            continue;
        }
        let e = p * total as f64;
        stat += (o as f64 - e).powi(2) / e;
        cells += 1;
    }
    let df = cells.saturating_sub(1);
    if df == 0 {
        return (stat, 0, 1.0);
    }
    let p = 1.0 - ChiSquared::new(df as f64).expect("df > 0").cdf(stat);
    (stat, df, p)
}

/// Standard error of a proportion.
pub fn proportion_se(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_value() {
        // 84 of 100 at 95%: roughly (0.756, 0.899).
        let (lo, hi) = wilson(84, 100, 0.95);
        assert!((lo - 0.7564).abs() < 1e-3, "{lo}");
        assert!((hi - 0.8988).abs() < 1e-3, "{hi}");
        assert_eq!(wilson(0, 0, 0.95), (0.0, 1.0));
    }

    #[test]
    fn z_values() {
        assert!((z_for(0.95) - 1.959964).abs() < 1e-5);
    }

    #[test]
    fn two_proportion_direction() {
        let (z, p) = two_proportion(500, 1000, 600, 1000);
        assert!(z > 4.0);
        assert!(p > 0.999);
        let (_, p) = two_proportion(600, 1000, 500, 1000);
        assert!(p < 1e-3);
    }

    #[test]
    fn chi_square_uniform() {
        let (stat, df, p) = chi_square(&[100, 100, 100], &[1.0 / 3.0; 3]);
        assert_eq!((stat, df), (0.0, 2));
        assert!((p - 1.0).abs() < 1e-12);
        let (_, _, p) = chi_square(&[300, 0, 0], &[1.0 / 3.0; 3]);
        assert!(p < 1e-10);
    }
}
