//! Least-squares helpers used by the tail classifiers: a plain linear fit
//! and a peak-envelope log-slope estimate that is robust to oscillation.

/// Ordinary least-squares slope and intercept of `y` against `x`.
/// Returns `None` when fewer than two distinct abscissae are given.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Result of fitting `ln(peak envelope)` against time over block maxima.
#[derive(Debug, Clone, Copy)]
pub struct PeakFit {
    /// Slope of `ln |x|` at the envelope peaks; negative means decay.
    pub slope: f64,
    /// Number of blocks that contributed a usable peak.
    pub n_blocks: usize,
    /// Envelope value at the first contributing block.
    pub first_peak: f64,
    /// Envelope value at the last contributing block.
    pub last_peak: f64,
}

/// Fits the log-envelope slope of `|values|` over `[t_lo, horizon]` by
/// splitting that window into `n_blocks` equal blocks, taking each block's
/// max of `|value|` at its arg-max time, and least-squares fitting
/// `ln(peak)` against `t`. Blocks whose peak is below `1e-300` are skipped
/// (log would be meaningless); fewer than 3 usable peaks yields `None`.
pub fn peak_log_slope(h: f64, values: &[f64], t_lo: f64, n_blocks: usize) -> Option<PeakFit> {
    let n = values.len();
    if n == 0 || n_blocks == 0 {
        return None;
    }
    let horizon = (n - 1) as f64 * h;
    if t_lo >= horizon {
        return None;
    }
    let i_lo = ((t_lo / h).ceil().max(0.0) as usize).min(n - 1);
    let span = n - i_lo;
    if span < 2 * n_blocks {
        return None;
    }
    let block = span / n_blocks;

    let mut ts = Vec::with_capacity(n_blocks);
    let mut logs = Vec::with_capacity(n_blocks);
    let mut peaks = Vec::with_capacity(n_blocks);
    for b in 0..n_blocks {
        let lo = i_lo + b * block;
        let hi = if b + 1 == n_blocks { n } else { lo + block };
        let mut best = (lo, 0.0f64);
        for (i, &v) in values[lo..hi].iter().enumerate() {
            if v.abs() > best.1 {
                best = (lo + i, v.abs());
            }
        }
        if best.1 <= 1e-300 {
            continue;
        }
        ts.push(best.0 as f64 * h);
        logs.push(best.1.ln());
        peaks.push(best.1);
    }
    if peaks.len() < 3 {
        return None;
    }
    let (slope, _) = linear_fit(&ts, &logs)?;
    Some(PeakFit {
        slope,
        n_blocks: peaks.len(),
        first_peak: peaks[0],
        last_peak: *peaks.last().expect("non-empty"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_fit_recovers_exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t - 2.0).collect();
        let (m, b) = linear_fit(&x, &y).unwrap();
        assert!((m - 3.0).abs() < 1e-12);
        assert!((b + 2.0).abs() < 1e-12);
        assert!(linear_fit(&[1.0], &[2.0]).is_none());
        assert!(linear_fit(&[2.0, 2.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn peak_slope_sees_through_oscillation() {
        // e^{-0.5 t} sin(7t): block maxima decay like the envelope.
        let h = 0.01;
        let vals: Vec<f64> =
            (0..4001).map(|i| ((-0.5) * i as f64 * h).exp() * (7.0 * i as f64 * h).sin()).collect();
        let fit = peak_log_slope(h, &vals, 10.0, 12).unwrap();
        assert!((fit.slope + 0.5).abs() < 0.05, "slope {}", fit.slope);
        assert!(fit.last_peak < fit.first_peak);
    }

    #[test]
    fn peak_slope_flags_growth() {
        let h = 0.01;
        let vals: Vec<f64> =
            (0..4001).map(|i| (0.3 * i as f64 * h).exp() * (5.0 * i as f64 * h).cos()).collect();
        let fit = peak_log_slope(h, &vals, 10.0, 12).unwrap();
        assert!(fit.slope > 0.2);
    }

    #[test]
    fn peak_slope_needs_enough_signal() {
        assert!(peak_log_slope(0.1, &[0.0; 50], 1.0, 12).is_none());
        assert!(peak_log_slope(0.1, &[1.0; 5], 0.0, 12).is_none());
    }
}
