//! Power-law fits on log-log data.

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("need at least {need} samples, have {have}")]
    TooFew { have: usize, need: usize },
    #[error("sample {index} is not positive (t={t}, y={y})")]
    NonPositive { index: usize, t: f64, y: f64 },
}

/// Least-squares line `log y = a + p log x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub exponent: f64,
    pub stderr: f64,
    /// `a`, so the fitted curve is `e^a x^p`.
    pub log_constant: f64,
}

pub const MIN_SAMPLES: usize = 8;

pub fn fit_power(x: &[f64], y: &[f64]) -> Result<PowerFit, FitError> {
    let n = x.len().min(y.len());
    if n < MIN_SAMPLES {
        return Err(FitError::TooFew { have: n, need: MIN_SAMPLES });
    }
    for i in 0..n {
        if !(x[i] > 0.0 && y[i] > 0.0) || !x[i].is_finite() || !y[i].is_finite() {
            return Err(FitError::NonPositive { index: i, t: x[i], y: y[i] });
        }
    }
    let lx: Vec<f64> = x[..n].iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y[..n].iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n as f64;
    let my = ly.iter().sum::<f64>() / n as f64;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(FitError::TooFew { have: 1, need: 2 });
    }
    let p = sxy / sxx;
    let a = my - p * mx;
    let ssr: f64 = lx.iter().zip(&ly).map(|(u, v)| (v - a - p * u).powi(2)).sum();
    Ok(PowerFit {
        exponent: p,
        stderr: (ssr / (n - 2) as f64 / sxx).sqrt(),
        log_constant: a,
    })
}

/// Growth exponent of `values` against `times`: `(exponent, stderr)`.
pub fn fit_exponent(times: &[f64], values: &[f64]) -> Result<(f64, f64), FitError> {
    fit_power(times, values).map(|f| (f.exponent, f.stderr))
}
