//! Least-squares rates on log-log data.

use serde::{Deserialize, Serialize};

/// Slope of `log e` against `log h`, with the half-width of its 95%
/// confidence interval (`None` with only two points).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub spread95: Option<f64>,
    pub points: usize,
}

/// Two-sided 97.5% Student-t quantiles for 1..=10 degrees of freedom.
const T975: [f64; 10] = [12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228];

/// Student-t 97.5% quantile; past the table, the Cornish-Fisher expansion
/// about the normal quantile.
fn t975(df: usize) -> f64 {
    if let Some(&t) = T975.get(df - 1) {
        return t;
    }
    let z: f64 = 1.959964;
    let v = df as f64;
    z + (z.powi(3) + z) / (4.0 * v)
        + (5.0 * z.powi(5) + 16.0 * z.powi(3) + 3.0 * z) / (96.0 * v * v)
        + (3.0 * z.powi(7) + 19.0 * z.powi(5) + 17.0 * z.powi(3) - 15.0 * z) / (384.0 * v.powi(3))
}

/// Fits `log e = slope log h + intercept`. Returns `None` for fewer than two
/// points or any non-positive value.
pub fn fit_slope(h: &[f64], e: &[f64]) -> Option<SlopeFit> {
    let n = h.len();
    if n < 2 || e.len() != n || h.iter().chain(e).any(|&v| !(v > 0.0 && v.is_finite())) {
        return None;
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let spread95 = (n > 2).then(|| {
        let rss: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        let se = (rss / (nf - 2.0) / sxx).sqrt();
        t975(n - 2) * se
    });
    Some(SlopeFit {
        slope,
        intercept,
        spread95,
        points: n,
    })
}
