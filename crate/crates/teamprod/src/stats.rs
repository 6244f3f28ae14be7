//! Resampling and test statistics used by the sweep harness and case study:
//! percentile bootstrap for the mean, paired t-test, Cohen's d, and
//! Pearson/Spearman correlation. The Student-t CDF is computed from the
//! regularized incomplete beta function, so nothing here depends on an
//! external statistics library.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("input sample is empty")]
    EmptyInput,
    #[error("samples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {required} observations, got {actual}")]
    TooFewObservations { required: usize, actual: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("non-finite value in input")]
    NonFinite,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

fn check_finite(samples: &[f64]) -> Result<(), StatsError> {
    if samples.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Unbiased sample variance (n - 1 denominator).
pub fn sample_variance(samples: &[f64]) -> f64 {
    let m = mean(samples);
    samples.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (samples.len() as f64 - 1.0)
}

// Lanczos approximation, g = 7, n = 9; published coefficients kept at
// full printed precision.
#[allow(clippy::excessive_precision)]
fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    if x < 0.5 {
        // reflection formula
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, &c) in COEFFS.iter().enumerate() {
        acc += c / (x + i as f64 + 1.0);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

// Continued-fraction evaluation of the incomplete beta (modified Lentz).
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

/// CDF of the Student-t distribution with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    let tail = 0.5 * regularized_incomplete_beta(x, 0.5 * df, 0.5);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Two-sided p-value for a t statistic.
pub fn two_sided_t_p_value(t: f64, df: f64) -> f64 {
    let x = df / (df + t * t);
    regularized_incomplete_beta(x, 0.5 * df, 0.5)
}

/// Percentile-method bootstrap interval for the mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub point_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub resamples: usize,
    pub confidence: f64,
}

// Linear interpolation between order statistics.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() as f64 - 1.0) * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Bootstrap CI for the mean of `samples`, from `resamples` with-replacement
/// resamples. Deterministic for a given seed.
pub fn bootstrap_mean_ci(
    samples: &[f64],
    resamples: usize,
    confidence: f64,
    seed: u64,
) -> Result<BootstrapResult, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    check_finite(samples)?;
    if resamples < 100 {
        return Err(StatsError::InvalidParameter("resamples must be >= 100"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(StatsError::InvalidParameter("confidence must be in (0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = samples.len();
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut total = 0.0;
        for _ in 0..n {
            total += samples[rng.random_range(0..n)];
        }
        means.push(total / n as f64);
    }
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let alpha = 1.0 - confidence;
    Ok(BootstrapResult {
        point_estimate: mean(samples),
        ci_low: percentile(&means, alpha / 2.0),
        ci_high: percentile(&means, 1.0 - alpha / 2.0),
        resamples,
        confidence,
    })
}

/// Paired t-test on the differences `x - y`. Returns `(t, two-sided p)`.
pub fn paired_t_test(x: &[f64], y: &[f64]) -> Result<(f64, f64), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewObservations {
            required: 2,
            actual: x.len(),
        });
    }
    check_finite(x)?;
    check_finite(y)?;
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let n = diffs.len() as f64;
    let m = mean(&diffs);
    let var = sample_variance(&diffs);
    if var <= 0.0 {
        if m == 0.0 {
            // identical samples: no effect, maximal p
            return Ok((0.0, 1.0));
        }
        return Err(StatsError::DegenerateInput("zero variance of differences"));
    }
    let t = m / (var.sqrt() / n.sqrt());
    Ok((t, two_sided_t_p_value(t, n - 1.0)))
}

/// Cohen's d with the pooled standard deviation (`n - 1` weights).
pub fn cohens_d(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    for s in [x, y] {
        if s.len() < 2 {
            return Err(StatsError::TooFewObservations {
                required: 2,
                actual: s.len(),
            });
        }
        check_finite(s)?;
    }
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let pooled_var =
        ((nx - 1.0) * sample_variance(x) + (ny - 1.0) * sample_variance(y)) / (nx + ny - 2.0);
    if pooled_var <= 0.0 {
        if mean(x) == mean(y) {
            return Ok(0.0);
        }
        return Err(StatsError::DegenerateInput("zero pooled variance"));
    }
    Ok((mean(x) - mean(y)) / pooled_var.sqrt())
}

/// Pearson correlation. Returns `(r, two-sided p)` with the p-value from
/// `t = r * sqrt((n-2) / (1-r^2))`.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<(f64, f64), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(StatsError::TooFewObservations {
            required: 3,
            actual: x.len(),
        });
    }
    check_finite(x)?;
    check_finite(y)?;
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(StatsError::DegenerateInput("zero variance"));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let n = x.len() as f64;
    let p = if (1.0 - r * r) <= f64::EPSILON {
        0.0
    } else {
        let t = r * ((n - 2.0) / (1.0 - r * r)).sqrt();
        two_sided_t_p_value(t, n - 2.0)
    };
    Ok((r, p))
}

// Average ranks, ties sharing the mean of their rank range.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson on average ranks).
pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewObservations {
            required: 2,
            actual: x.len(),
        });
    }
    check_finite(x)?;
    check_finite(y)?;
    let rx = ranks(x);
    let ry = ranks(y);
    let (mx, my) = (mean(&rx), mean(&ry));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(StatsError::DegenerateInput("constant ranks"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Two-sided critical values of the t distribution; CDF at the critical
    // value must equal 1 - alpha/2.
    const T_TABLE: [(f64, f64, f64); 12] = [
        (12.7062, 1.0, 0.975),
        (4.3027, 2.0, 0.975),
        (2.7764, 4.0, 0.975),
        (2.5706, 5.0, 0.975),
        (2.2281, 10.0, 0.975),
        (2.0860, 20.0, 0.975),
        (2.0423, 30.0, 0.975),
        (1.9799, 120.0, 0.975),
        (63.6567, 1.0, 0.995),
        (4.0321, 5.0, 0.995),
        (3.1693, 10.0, 0.995),
        (2.7500, 30.0, 0.995),
    ];

    #[test]
    fn t_cdf_matches_reference_table() {
        for &(t, df, expected) in &T_TABLE {
            let got = student_t_cdf(t, df);
            assert!(
                (got - expected).abs() < 1e-4,
                "cdf({t}, {df}) = {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn t_cdf_symmetry() {
        for &(t, df, _) in &T_TABLE {
            let up = student_t_cdf(t, df);
            let down = student_t_cdf(-t, df);
            assert!((up + down - 1.0).abs() < 1e-12);
        }
        assert!((student_t_cdf(0.0, 7.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn paired_t_identical_samples() {
        let x = [1.0, 2.0, 3.0];
        let (t, p) = paired_t_test(&x, &x).unwrap();
        assert_eq!(t, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn paired_t_hand_computation() {
        // d = (1,2,3,4,5): t = 3 / (1.5811/sqrt(5)) = 4.2426, p ~ 0.0132
        let x = [2.0, 4.0, 6.0, 8.0, 10.0];
        let y = [1.0, 2.0, 3.0, 4.0, 5.0];
        let (t, p) = paired_t_test(&x, &y).unwrap();
        assert!((t - 4.242640687119285).abs() < 1e-12);
        assert!((p - 0.013235599563682695).abs() < 1e-8);
    }

    #[test]
    fn paired_t_large_n_known_effect() {
        // Deterministic synthetic sample with a one-unit shift and
        // zero-mean, non-degenerate noise on the differences.
        let x: Vec<f64> = (0..200).map(|i| (i as f64 * 0.7).sin() + 1.0).collect();
        let y: Vec<f64> = (0..200).map(|i| (i as f64 * 0.9).cos() * 0.5).collect();
        let (t, p) = paired_t_test(&x, &y).unwrap();
        assert!(t > 3.3, "t = {t}");
        assert!(p < 0.001, "p = {p}");
    }

    #[test]
    fn paired_t_error_paths() {
        assert!(matches!(
            paired_t_test(&[1.0, 2.0], &[1.0]),
            Err(StatsError::LengthMismatch(2, 1))
        ));
        // constant non-zero differences: zero variance
        assert!(paired_t_test(&[2.0, 3.0, 4.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(paired_t_test(&[f64::NAN, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn cohens_d_cases() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(cohens_d(&x, &x).unwrap(), 0.0);
        // means one apart, both sd = 1
        let a = [0.0, 1.0, 2.0];
        let b = [1.0, 2.0, 3.0];
        assert!((cohens_d(&b, &a).unwrap() - 1.0).abs() < 1e-12);
        // direct-formula oracle on asymmetric groups
        let g1 = [2.0, 4.0, 4.0, 6.0, 9.0];
        let g2 = [1.0, 2.0, 3.0];
        let pooled = ((4.0 * sample_variance(&g1)) + (2.0 * sample_variance(&g2))) / 6.0;
        let expected = (mean(&g1) - mean(&g2)) / pooled.sqrt();
        assert!((cohens_d(&g1, &g2).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn pearson_affine_data() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 3.0).collect();
        let (r, p) = pearson_r(&x, &y).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
        assert!(p < 1e-9);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let (r, _) = pearson_r(&x, &neg).unwrap();
        assert!((r + 1.0).abs() < 1e-9);
    }

    #[test]
    fn pearson_on_phase_style_data() {
        // Four points against ranks; cross-checked against an independent
        // implementation of the textbook formulas.
        let preds = [50.0, 35.9, 14.5, 11.5];
        let ranks = [4.0, 3.0, 2.0, 1.0];
        let (r, p) = pearson_r(&preds, &ranks).unwrap();
        assert!((r - 0.9675902389364179).abs() < 1e-10);
        assert!((p - 0.032409761063582065).abs() < 1e-8);
    }

    #[test]
    fn pearson_invariant_under_affine_transforms() {
        let x = [0.4, 1.9, 3.1, 2.2, 5.5, 4.0];
        let y = [2.0, 1.0, 4.0, 3.5, 5.0, 4.5];
        let (r0, _) = pearson_r(&x, &y).unwrap();
        let xs: Vec<f64> = x.iter().map(|v| 3.7 * v + 11.0).collect();
        let ys: Vec<f64> = y.iter().map(|v| 0.2 * v - 4.0).collect();
        let (r1, _) = pearson_r(&xs, &ys).unwrap();
        assert!((r0 - r1).abs() < 1e-9);
    }

    #[test]
    fn pearson_degenerate_variance() {
        assert!(pearson_r(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn spearman_handles_ties() {
        let x = [0.0, 0.0, 0.0, 0.76, 10.0];
        let y = [0.1, 0.3, 0.5, 0.7, 0.9];
        let rho = spearman_rho(&x, &y).unwrap();
        assert!(rho > 0.8 && rho < 1.0, "rho = {rho}");
        // strictly monotone data gives exactly 1
        let a = [1.0, 2.0, 5.0, 9.0];
        let b = [0.1, 0.2, 0.3, 0.4];
        assert!((spearman_rho(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bootstrap_constant_samples() {
        let s = [4.2; 25];
        let r = bootstrap_mean_ci(&s, 500, 0.95, 7).unwrap();
        // degenerate interval at the constant (up to summation rounding)
        assert!((r.ci_low - 4.2).abs() < 1e-12);
        assert_eq!(r.ci_low, r.ci_high);
        assert_eq!(r.point_estimate, r.ci_low);
    }

    #[test]
    fn bootstrap_brackets_mean_of_1_to_100() {
        let s: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let r = bootstrap_mean_ci(&s, 10_000, 0.95, 42).unwrap();
        assert!(r.ci_low < 50.5 && 50.5 < r.ci_high);
        // normal approximation: half-width ~ 1.96 * sigma / sqrt(n) = 5.658
        let half = (r.ci_high - r.ci_low) / 2.0;
        assert!((half - 5.6576).abs() / 5.6576 < 0.15, "half-width {half}");
    }

    #[test]
    fn bootstrap_deterministic_per_seed() {
        let s: Vec<f64> = (0..50).map(|i| (i as f64).sqrt()).collect();
        let a = bootstrap_mean_ci(&s, 1000, 0.9, 123).unwrap();
        let b = bootstrap_mean_ci(&s, 1000, 0.9, 123).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_mean_ci(&s, 1000, 0.9, 124).unwrap();
        assert!(a.ci_low != c.ci_low || a.ci_high != c.ci_high);
    }

    #[test]
    fn bootstrap_rejects_bad_input() {
        assert!(matches!(
            bootstrap_mean_ci(&[], 1000, 0.95, 1),
            Err(StatsError::EmptyInput)
        ));
        assert!(bootstrap_mean_ci(&[1.0], 50, 0.95, 1).is_err());
        assert!(bootstrap_mean_ci(&[1.0, f64::INFINITY], 1000, 0.95, 1).is_err());
    }

    #[test]
    fn bootstrap_ci_width_shrinks_with_sample_size() {
        // width should fall roughly like 1/sqrt(n) on i.i.d. synthetic data
        let mut widths = Vec::new();
        for n in [50usize, 200, 800] {
            let s: Vec<f64> = (0..n)
                .map(|i| ((i * 37 + 11) % 100) as f64 / 10.0)
                .collect();
            let r = bootstrap_mean_ci(&s, 2000, 0.95, 9).unwrap();
            widths.push(r.ci_high - r.ci_low);
        }
        assert!(widths[0] > widths[1] && widths[1] > widths[2], "{widths:?}");
    }
}
