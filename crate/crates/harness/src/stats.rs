use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Two-sided 99% standard normal quantile.
pub const WILSON_Z_99: f64 = 2.575_829_303_548_900_4;

/// Point estimate of a proportion with its Wilson 99% score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
}

pub fn estimate_probability(successes: u64, trials: u64) -> ProbabilityEstimate {
    assert!(trials >= 1, "no trials");
    assert!(successes <= trials, "more successes than trials");
    let t = trials as f64;
    let p = successes as f64 / t;
    let z2 = WILSON_Z_99 * WILSON_Z_99;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = WILSON_Z_99 * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    let lower = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let upper = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    ProbabilityEstimate { point: p, lower, upper }
}

/// Shape `f(n)` a metric is fitted against, as `a + b f(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScalingModel {
    /// `lg n`
    Log,
    /// `lg^2 n`
    LogSquared,
    /// `n`
    Linear,
    /// `n lg n`
    NLog,
    /// `n lg^2 n`
    NLogSquared,
}

impl ScalingModel {
    pub fn shape(self, n: f64) -> f64 {
        let lg = n.log2();
        match self {
            ScalingModel::Log => lg,
            ScalingModel::LogSquared => lg * lg,
            ScalingModel::Linear => n,
            ScalingModel::NLog => n * lg,
            ScalingModel::NLogSquared => n * lg * lg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub model: ScalingModel,
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

impl Fit {
    pub fn predict(&self, n: f64) -> f64 {
        self.intercept + self.slope * self.model.shape(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("a fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("sizes must be strictly increasing")]
    NotIncreasing,
    #[error("all metric values are equal")]
    DegenerateFit,
}

/// Least-squares fit of `metric = a + b f(n)` over `(n, metric)` points.
pub fn fit_scaling(points: &[(f64, f64)], model: ScalingModel) -> Result<Fit, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints(points.len()));
    }
    if points.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(FitError::NotIncreasing);
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| model.shape(n)).collect();
    let mean_x = xs.iter().sum::<f64>() / k;
    let mean_y = points.iter().map(|&(_, y)| y).sum::<f64>() / k;
    let ss_tot: f64 = points.iter().map(|&(_, y)| (y - mean_y).powi(2)).sum();
    if ss_tot == 0.0 {
        return Err(FitError::DegenerateFit);
    }
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(points).map(|(x, &(_, y))| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(points)
        .map(|(x, &(_, y))| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(Fit {
        model,
        intercept,
        slope,
        r_squared: 1.0 - ss_res / ss_tot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wilson_degenerate_ends() {
        let e = estimate_probability(0, 100);
        assert_eq!((e.point, e.lower), (0.0, 0.0));
        assert!(e.upper > 0.0 && e.upper < 0.07);
        let e = estimate_probability(100, 100);
        assert_eq!((e.point, e.upper), (1.0, 1.0));
        // symmetric
        assert!((e.lower - (1.0 - estimate_probability(0, 100).upper)).abs() < 1e-12);
    }

    #[test]
    fn wilson_half() {
        let e = estimate_probability(50, 100);
        assert_eq!(e.point, 0.5);
        assert!(e.lower < 0.5 && 0.5 < e.upper);
        assert!(e.upper - e.lower < 0.3);
        assert!(((e.lower + e.upper) / 2.0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn wilson_large_sample_matches_closed_form() {
        // closed form at p = 1/2: center 1/2, half-width z sqrt(1/(4t) + z^2/(4t^2)) / (1 + z^2/t)
        let t: f64 = 10_000.0;
        let z = WILSON_Z_99;
        let half = z * (0.25 / t + z * z / (4.0 * t * t)).sqrt() / (1.0 + z * z / t);
        let e = estimate_probability(5_000, 10_000);
        assert!((e.lower - (0.5 - half)).abs() < 1e-12);
        assert!((e.upper - (0.5 + half)).abs() < 1e-12);
        assert!(e.lower > 0.47 && e.upper < 0.53);
    }

    #[test]
    fn wilson_zero_of_two_thousand() {
        // upper bound z^2 / (t + z^2) when nothing was observed
        let z2 = WILSON_Z_99 * WILSON_Z_99;
        let e = estimate_probability(0, 2000);
        assert!((e.upper - z2 / (2000.0 + z2)).abs() < 1e-12);
        assert!(e.upper < 0.01);
    }

    #[test]
    fn exact_fits() {
        let log: Vec<(f64, f64)> = (4..=12).map(|e| (f64::from(1 << e), 3.0 * f64::from(e))).collect();
        let fit = fit_scaling(&log, ScalingModel::Log).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-9 && fit.intercept.abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let lin: Vec<(f64, f64)> = [1.0, 2.0, 5.0, 9.0].iter().map(|&n| (n, 2.0 * n)).collect();
        let fit = fit_scaling(&lin, ScalingModel::Linear).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.predict(100.0) - 200.0).abs() < 1e-6);
    }

    #[test]
    fn fit_errors() {
        assert_eq!(fit_scaling(&[(1.0, 1.0), (2.0, 2.0)], ScalingModel::Log), Err(FitError::TooFewPoints(2)));
        let flat = [(2.0, 5.0), (4.0, 5.0), (8.0, 5.0)];
        assert_eq!(fit_scaling(&flat, ScalingModel::Log), Err(FitError::DegenerateFit));
        let unsorted = [(2.0, 1.0), (8.0, 2.0), (4.0, 3.0)];
        assert_eq!(fit_scaling(&unsorted, ScalingModel::Log), Err(FitError::NotIncreasing));
    }

    proptest! {
        #[test]
        fn interval_contains_point(trials in 1u64..5000, frac in 0.0f64..=1.0) {
            let successes = ((trials as f64) * frac).floor() as u64;
            let e = estimate_probability(successes, trials);
            prop_assert!(0.0 <= e.lower && e.lower <= e.point && e.point <= e.upper && e.upper <= 1.0);
        }

        #[test]
        fn r_squared_at_most_one(ys in proptest::collection::vec(0.0f64..1000.0, 3..12)) {
            let points: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| ((i + 2) as f64, y)).collect();
            if let Ok(fit) = fit_scaling(&points, ScalingModel::NLog) {
                prop_assert!(fit.r_squared <= 1.0 + 1e-9);
            }
        }
    }
}
