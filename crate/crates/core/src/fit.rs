//! Least-squares decay fits on log-log axes.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub radius: f64,
    pub value: f64,
}

/// `value ~ exp(intercept) radius^exponent`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub sample_range: (f64, f64),
    /// Every measured value was below the zero tolerance; the exponent is meaningless.
    pub degenerate_zero: bool,
    pub points: Vec<FitPoint>,
}

impl DecayFit {
    /// Fitted exponent at most `bound`, with the quality gate `r^2 >= min_r2`
    /// or the degenerate-zero flag.
    pub fn passes_upper(&self, bound: f64, min_r2: f64) -> bool {
        self.degenerate_zero || (self.exponent <= bound && self.r_squared >= min_r2)
    }
}

/// Ordinary least squares `y = a + b x`, returning `(a, b, r^2)`.
pub fn linear_regression(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let r2 = if syy > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (a, b, r2)
}

/// Fit `log value` against `log radius`. Points at or below `zero_tol` are
/// dropped; if all are, the fit is degenerate-zero.
pub fn fit_power_law(points: &[FitPoint], zero_tol: f64, min_points: usize) -> Result<DecayFit> {
    let range = (
        points
            .iter()
            .map(|p| p.radius)
            .fold(f64::INFINITY, f64::min),
        points.iter().map(|p| p.radius).fold(0.0, f64::max),
    );
    if points.iter().all(|p| p.value <= zero_tol) && !points.is_empty() {
        return Ok(DecayFit {
            exponent: f64::NEG_INFINITY,
            intercept: f64::NEG_INFINITY,
            r_squared: 1.0,
            sample_range: range,
            degenerate_zero: true,
            points: points.to_vec(),
        });
    }
    let usable: Vec<&FitPoint> = points
        .iter()
        .filter(|p| p.value > zero_tol && p.radius > 0.0 && p.value.is_finite())
        .collect();
    if usable.len() < min_points {
        return Err(Error::InsufficientRange {
            usable: usable.len(),
            required: min_points,
        });
    }
    let xs: Vec<f64> = usable.iter().map(|p| p.radius.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|p| p.value.ln()).collect();
    let (a, b, r2) = linear_regression(&xs, &ys);
    Ok(DecayFit {
        exponent: b,
        intercept: a,
        r_squared: r2,
        sample_range: range,
        degenerate_zero: false,
        points: points.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let pts: Vec<FitPoint> = [8.0, 16.0, 32.0, 64.0]
            .iter()
            .map(|&r: &f64| FitPoint {
                radius: r,
                value: 3.0 * r.powf(-1.5),
            })
            .collect();
        let fit = fit_power_law(&pts, 1e-12, 4).unwrap();
        assert!((fit.exponent + 1.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.passes_upper(-1.4, 0.9));
    }

    #[test]
    fn degenerate_and_insufficient() {
        let zeros = vec![
            FitPoint {
                radius: 1.0,
                value: 0.0
            };
            4
        ];
        assert!(fit_power_law(&zeros, 1e-9, 4).unwrap().degenerate_zero);
        let few = [
            FitPoint {
                radius: 1.0,
                value: 1.0,
            },
            FitPoint {
                radius: 2.0,
                value: 0.0,
            },
        ];
        assert!(matches!(
            fit_power_law(&few, 1e-9, 4),
            Err(Error::InsufficientRange {
                usable: 1,
                required: 4
            })
        ));
    }
}
