//! Closed-form linear-Gaussian updates and discretized normal likelihoods.
//!
//! The discrete engine cannot represent a density, so Gaussian noise enters
//! action theories as per-cell probabilities: the mass of N(0, sigma^2) over
//! `[k*step - step/2, k*step + step/2]`. The CDF is computed from `libm`'s
//! `erfc` (an fdlibm rational approximation, accurate to about 1 ulp), which
//! keeps tail cells accurate where `1 - erf` would cancel.

use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum GaussianError {
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("noise variance must be nonnegative, got {0}")]
    NegativeNoise(f64),
    #[error("sigma must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("grid step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("halfwidth {halfwidth} is smaller than the grid step {step}")]
    NarrowSupport { halfwidth: f64, step: f64 },
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

/// Mass of N(0, sigma^2) on the cell of width `step` centred on `center`.
pub fn normal_cell(center: f64, sigma: f64, step: f64) -> f64 {
    let lo = (center - step / 2.0) / sigma;
    let hi = (center + step / 2.0) / sigma;
    if lo > 0.0 {
        // upper tail: subtract survival functions to avoid cancellation
        normal_cdf(-lo) - normal_cdf(-hi)
    } else {
        normal_cdf(hi) - normal_cdf(lo)
    }
}

/// A one-dimensional normal belief N(mean, variance).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBelief {
    mean: f64,
    variance: f64,
}

impl GaussianBelief {
    pub fn new(mean: f64, variance: f64) -> Result<Self, GaussianError> {
        if variance > 0.0 && variance.is_finite() {
            Ok(GaussianBelief { mean, variance })
        } else {
            Err(GaussianError::NonPositiveVariance(variance))
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Effector update: the commanded change `x` is added with independent
    /// noise of variance `noise_var`.
    pub fn predict(&self, x: f64, noise_var: f64) -> Result<Self, GaussianError> {
        kalman_predict(*self, x, noise_var)
    }

    /// Sensor update with reading `z` and sensor noise variance `sensor_var`.
    pub fn correct(&self, z: f64, sensor_var: f64) -> Result<Self, GaussianError> {
        kalman_correct(*self, z, sensor_var)
    }
}

/// `(mean + x, variance + noise_var)`.
pub fn kalman_predict(
    b: GaussianBelief,
    x: f64,
    noise_var: f64,
) -> Result<GaussianBelief, GaussianError> {
    if !(noise_var >= 0.0) {
        return Err(GaussianError::NegativeNoise(noise_var));
    }
    GaussianBelief::new(b.mean + x, b.variance + noise_var)
}

/// Precision-weighted average of prior mean and reading.
pub fn kalman_correct(
    b: GaussianBelief,
    z: f64,
    sensor_var: f64,
) -> Result<GaussianBelief, GaussianError> {
    if !(sensor_var > 0.0) {
        return Err(GaussianError::NonPositiveVariance(sensor_var));
    }
    let total = sensor_var + b.variance;
    GaussianBelief::new(
        (z * b.variance + b.mean * sensor_var) / total,
        b.variance * sensor_var / total,
    )
}

/// A zero-centred probability mass function on a regular grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretePmf {
    step: f64,
    /// Grid offsets `k`; the cell centre is `k * step`.
    offsets: Vec<i64>,
    probs: Vec<f64>,
}

impl DiscretePmf {
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability of offset `k` (zero outside the support).
    pub fn prob(&self, k: i64) -> f64 {
        match self.offsets.first() {
            Some(first) if k >= *first => {
                self.probs.get((k - first) as usize).copied().unwrap_or(0.0)
            }
            _ => 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, p)| x * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter().map(|(x, p)| (x - m) * (x - m) * p).sum()
    }

    /// `(cell centre, probability)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.offsets
            .iter()
            .zip(&self.probs)
            .map(|(k, p)| (*k as f64 * self.step, *p))
    }
}

/// Per-cell masses of N(0, sigma^2) for `|k * step| <= halfwidth`,
/// renormalized so the truncated tails are folded back in.
pub fn discretize_normal(
    sigma: f64,
    step: f64,
    halfwidth: f64,
) -> Result<DiscretePmf, GaussianError> {
    if !(sigma > 0.0) {
        return Err(GaussianError::NonPositiveSigma(sigma));
    }
    if !(step > 0.0) {
        return Err(GaussianError::NonPositiveStep(step));
    }
    if !(halfwidth >= step) {
        return Err(GaussianError::NarrowSupport { halfwidth, step });
    }
    // tolerate halfwidth/step landing a hair below an integer
    let cells = libm::floor(halfwidth / step + 1e-9) as i64;
    let offsets: Vec<i64> = (-cells..=cells).collect();
    let mut probs: Vec<f64> = offsets
        .iter()
        .map(|k| normal_cell(*k as f64 * step, sigma, step))
        .collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(DiscretePmf {
        step,
        offsets,
        probs,
    })
}

/// Grid step `sigma / 20` and halfwidth `6 sigma`.
pub fn discretize_normal_default(sigma: f64) -> Result<DiscretePmf, GaussianError> {
    discretize_normal(sigma, sigma / 20.0, 6.0 * sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson integration of the standard normal density.
    fn simpson_mass(a: f64, b: f64) -> f64 {
        let n = 2000;
        let h = (b - a) / n as f64;
        let pdf = |x: f64| libm::exp(-x * x / 2.0) / libm::sqrt(2.0 * core::f64::consts::PI);
        let mut s = pdf(a) + pdf(b);
        for i in 1..n {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * pdf(x);
        }
        s * h / 3.0
    }

    #[test]
    fn cell_masses_match_quadrature() {
        // centre cell of N(0,1) with unit width: Phi(0.5) - Phi(-0.5)
        let centre = normal_cell(0.0, 1.0, 1.0);
        assert!((centre - simpson_mass(-0.5, 0.5)).abs() < 1e-10);
        assert!((centre - 0.382_924_922_548_026).abs() < 1e-7);
        for k in [1.0, 2.5, 4.0, 7.0] {
            let q = simpson_mass(k - 0.25, k + 0.25);
            assert!((normal_cell(k, 1.0, 0.5) - q).abs() < 1e-10 * q.max(1e-12) + 1e-15);
        }
    }

    #[test]
    fn discretized_normal_is_symmetric_and_normalized() {
        let pmf = discretize_normal(1.0, 1.0, 4.0).unwrap();
        assert_eq!(pmf.offsets().len(), 9);
        let total: f64 = pmf.probs().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for k in 1..=4 {
            assert_eq!(pmf.prob(k), pmf.prob(-k));
        }
        assert_eq!(pmf.prob(5), 0.0);
        let raw_centre = normal_cell(0.0, 1.0, 1.0);
        assert!(pmf.prob(0) > raw_centre);
    }

    #[test]
    fn default_grid_tracks_the_continuous_moments() {
        let pmf = discretize_normal_default(2.0).unwrap();
        assert!(pmf.mean().abs() < 1e-12);
        // grid variance is sigma^2 + step^2/12 minus a negligible tail loss
        let expected = 4.0 + (0.1f64 * 0.1) / 12.0;
        assert!((pmf.variance() - expected).abs() / expected < 1e-4);
    }

    #[test]
    fn invalid_grids_are_rejected() {
        assert!(discretize_normal(0.0, 1.0, 2.0).is_err());
        assert!(discretize_normal(1.0, -1.0, 2.0).is_err());
        assert!(discretize_normal(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn predict_and_correct_closed_forms() {
        let b = GaussianBelief::new(0.0, 1.0).unwrap();
        let p = b.predict(2.0, 1.0).unwrap();
        assert_eq!((p.mean(), p.variance()), (2.0, 2.0));
        assert_eq!(b.predict(0.0, 0.0).unwrap(), b);
        let back = p.predict(-2.0, 1.0).unwrap();
        assert_eq!(back.mean(), 0.0);
        assert_eq!(back.variance(), 3.0);

        let c = p.correct(3.0, 1.0).unwrap();
        assert!((c.mean() - 8.0 / 3.0).abs() < 1e-12);
        assert!((c.variance() - 2.0 / 3.0).abs() < 1e-12);

        let sym = p.correct(5.0, 2.0).unwrap();
        assert!((sym.mean() - 3.5).abs() < 1e-12);
        assert!((sym.variance() - 1.0).abs() < 1e-12);

        let agree = p.correct(2.0, 0.5).unwrap();
        assert_eq!(agree.mean(), 2.0);
        assert!(agree.variance() < p.variance());
    }

    #[test]
    fn preconditions_are_enforced() {
        let b = GaussianBelief::new(0.0, 1.0).unwrap();
        assert!(GaussianBelief::new(0.0, 0.0).is_err());
        assert!(b.predict(1.0, -0.1).is_err());
        assert!(b.correct(1.0, 0.0).is_err());
    }
}
