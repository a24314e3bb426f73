//! Small-sample summaries and weighted trend fits.

use serde::{Deserialize, Serialize};

/// Location and spread of one batch of replica values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (denominator `count - 1`).
    pub sd: f64,
    /// Standard error of the mean.
    pub se: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    /// `None` for an empty batch. A single value has zero spread.
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let sd = if count > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Summary {
            count,
            mean,
            sd,
            se: sd / (count as f64).sqrt(),
            median: median_sorted(&sorted),
            min: sorted[0],
            max: sorted[count - 1],
        })
    }
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Least-squares line `y = intercept + slope * x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
    pub r_squared: f64,
}

/// Weighted least squares with known per-point standard errors.
///
/// The slope SE is the textbook `1 / sqrt(sum w (x - xbar)^2)` with
/// `w = 1 / se^2`. Points with zero SE make the weights degenerate, so if any
/// SE is zero the fit falls back to equal weights and a residual-based SE.
pub fn weighted_line(xs: &[f64], ys: &[f64], ses: &[f64]) -> Option<LineFit> {
    if xs.len() != ys.len() || xs.len() != ses.len() || xs.len() < 2 {
        return None;
    }
    if ses.iter().any(|&s| !(s > 0.0)) {
        return ordinary_line(xs, ys);
    }
    let w: Vec<f64> = ses.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let xbar = w.iter().zip(xs).map(|(w, x)| w * x).sum::<f64>() / sw;
    let ybar = w.iter().zip(ys).map(|(w, y)| w * y).sum::<f64>() / sw;
    let sxx: f64 = w.iter().zip(xs).map(|(w, x)| w * (x - xbar).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = (0..xs.len())
        .map(|i| w[i] * (xs[i] - xbar) * (ys[i] - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let syy: f64 = w.iter().zip(ys).map(|(w, y)| w * (y - ybar).powi(2)).sum();
    let r_squared = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    Some(LineFit {
        slope,
        intercept,
        slope_se: 1.0 / sxx.sqrt(),
        r_squared,
    })
}

/// Ordinary least squares; the slope SE comes from the residuals.
pub fn ordinary_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n != ys.len() || n < 2 {
        return None;
    }
    let xbar = xs.iter().sum::<f64>() / n as f64;
    let ybar = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum();
    let syy: f64 = ys.iter().map(|y| (y - ybar).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let slope_se = if n > 2 {
        (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    let r_squared = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    Some(LineFit {
        slope,
        intercept,
        slope_se,
        r_squared,
    })
}

/// Three-SE verdict for a quantity whose sign is under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Estimate exceeds three standard errors.
    Positive,
    /// Estimate lies within three standard errors of zero.
    Zero,
    /// Estimate is below minus three standard errors.
    Inconclusive,
}

impl Verdict {
    pub fn classify(estimate: f64, se: f64) -> Verdict {
        if estimate > 3.0 * se {
            Verdict::Positive
        } else if estimate.abs() <= 3.0 * se {
            Verdict::Zero
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Positive => "positive",
            Verdict::Zero => "zero",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_small_batch() {
        let s = Summary::of(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(s.count, 4);
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.median, 2.5);
        assert_eq!((s.min, s.max), (1.0, 4.0));
        // sum of squares 5, divided by 3
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((s.se - s.sd / 2.0).abs() < 1e-12);
        assert!(Summary::of(&[]).is_none());
        assert_eq!(Summary::of(&[7.0]).unwrap().sd, 0.0);
    }

    #[test]
    fn exact_line_is_recovered() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 - 2.0 * x).collect();
        let fit = weighted_line(&xs, &ys, &[0.1, 0.2, 0.1, 0.3]).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 0.5).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let ols = ordinary_line(&xs, &ys).unwrap();
        assert!(ols.slope_se < 1e-12);
    }

    #[test]
    fn weighted_slope_se() {
        // equal weights 1/0.5^2 = 4, x deviations -1, 0, 1 -> sxx = 8
        let fit = weighted_line(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0], &[0.5; 3]).unwrap();
        assert_eq!(fit.slope, 0.0);
        assert!((fit.slope_se - 1.0 / 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn verdict_convention() {
        assert_eq!(Verdict::classify(1.6, 0.5), Verdict::Positive);
        assert_eq!(Verdict::classify(1.5, 0.5), Verdict::Zero);
        assert_eq!(Verdict::classify(-1.5, 0.5), Verdict::Zero);
        assert_eq!(Verdict::classify(-1.6, 0.5), Verdict::Inconclusive);
        assert_eq!(Verdict::classify(0.0, 0.0), Verdict::Zero);
    }
}
