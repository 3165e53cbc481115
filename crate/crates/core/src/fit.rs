//! Least-squares fits used by decay and growth diagnostics.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub samples: usize,
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return Err(Error::Numeric(format!("linear fit needs ≥ 2 paired samples, got {n}")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Numeric("linear fit with degenerate abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(LinearFit { slope, intercept, rms_residual: (rss / n as f64).sqrt(), samples: n })
}

/// Fits `|y| ≈ c·x^k` and returns the fit of `ln|y|` against `ln x`.
/// Samples with `|y| < floor` are discarded.
pub fn power_law_fit(xs: &[f64], ys: &[f64], floor: f64) -> Result<LinearFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| y.abs() >= floor)
        .map(|(x, y)| (x.ln(), y.abs().ln()))
        .unzip();
    linear_fit(&lx, &ly)
}

/// Fits `|y| ≈ c·e^{−κx}`; the returned slope is `−κ`.
pub fn exponential_fit(xs: &[f64], ys: &[f64], floor: f64) -> Result<LinearFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(_, y)| y.abs() >= floor)
        .map(|(x, y)| (*x, y.abs().ln()))
        .unzip();
    linear_fit(&lx, &ly)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_and_exponential() {
        let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.5)).collect();
        let f = power_law_fit(&xs, &ys, 1e-13).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12);
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * (-0.7 * x).exp()).collect();
        let f = exponential_fit(&xs, &ys, 1e-13).unwrap();
        assert!((f.slope + 0.7).abs() < 1e-12);
    }

    #[test]
    fn floor_discards_and_errors_when_empty() {
        let xs = [1.0, 2.0];
        let ys = [1e-20, 1e-20];
        assert!(power_law_fit(&xs, &ys, 1e-13).is_err());
    }
}
