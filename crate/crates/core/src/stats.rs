//! Deterministic summary statistics for Monte-Carlo runs.

/// Pairwise (cascade) summation; the result depends only on the order of
/// `xs`, never on how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 32;
    if xs.len() <= BASE {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance (n − 1 denominator); 0 for fewer than two values.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    pairwise_sum(&sq) / (xs.len() - 1) as f64
}

/// Standard error of the mean.
pub fn std_error(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Standard error of the unbiased sample variance, from the fourth central
/// moment: Var(s²) ≈ (μ₄ − σ⁴ (n−3)/(n−1)) / n.
pub fn variance_std_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return f64::NAN;
    }
    let m = mean(xs);
    let q: Vec<f64> = xs.iter().map(|x| (x - m).powi(4)).collect();
    let mu4 = pairwise_sum(&q) / n as f64;
    let s2 = variance(xs);
    let nf = n as f64;
    ((mu4 - s2 * s2 * (nf - 3.0) / (nf - 1.0)) / nf).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    Summary {
        mean: mean(xs),
        variance: variance(xs),
        std_error: std_error(xs),
    }
}

/// Result of a (weighted) least-squares line y = intercept + slope·x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_std_error: f64,
    pub r_squared: f64,
}

impl LinearFit {
    /// Two-sided 95% normal confidence interval for the slope.
    pub fn slope_ci95(&self) -> (f64, f64) {
        let half = 1.96 * self.slope_std_error;
        (self.slope - half, self.slope + half)
    }
}

/// Ordinary least squares.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let w = vec![1.0; x.len()];
    let mut fit = weighted_linear_fit(x, y, &w)?;
    // Unweighted fits estimate the noise level from the residuals.
    let n = x.len();
    if n > 2 {
        let resid: Vec<f64> = x
            .iter()
            .zip(y)
            .map(|(xi, yi)| (yi - fit.intercept - fit.slope * xi).powi(2))
            .collect();
        let s2 = pairwise_sum(&resid) / (n - 2) as f64;
        fit.slope_std_error *= s2.sqrt();
    } else {
        fit.slope_std_error = f64::NAN;
    }
    Some(fit)
}

/// Weighted least squares with weights 1/σᵢ². The slope standard error
/// assumes the σᵢ are the true per-point standard deviations.
pub fn weighted_linear_fit(x: &[f64], y: &[f64], w: &[f64]) -> Option<LinearFit> {
    if x.len() != y.len() || x.len() != w.len() || x.len() < 2 {
        return None;
    }
    let sw = pairwise_sum(w);
    let wx: Vec<f64> = w.iter().zip(x).map(|(a, b)| a * b).collect();
    let wy: Vec<f64> = w.iter().zip(y).map(|(a, b)| a * b).collect();
    let xm = pairwise_sum(&wx) / sw;
    let ym = pairwise_sum(&wy) / sw;
    let sxx: Vec<f64> = w.iter().zip(x).map(|(a, b)| a * (b - xm) * (b - xm)).collect();
    let sxy: Vec<f64> = w
        .iter()
        .zip(x.iter().zip(y))
        .map(|(a, (b, c))| a * (b - xm) * (c - ym))
        .collect();
    let syy: Vec<f64> = w.iter().zip(y).map(|(a, c)| a * (c - ym) * (c - ym)).collect();
    let (sxx, sxy, syy) = (pairwise_sum(&sxx), pairwise_sum(&sxy), pairwise_sum(&syy));
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Some(LinearFit {
        slope,
        intercept,
        slope_std_error: sxx.recip().sqrt(),
        r_squared,
    })
}

/// Delete-a-group jackknife standard error of `estimator` over `groups`
/// contiguous groups of `items`.
pub fn jackknife_std_error<T>(items: &[T], groups: usize, estimator: impl Fn(&[&T]) -> f64) -> f64 {
    let g = groups.min(items.len());
    if g < 2 {
        return f64::NAN;
    }
    let bounds: Vec<usize> = (0..=g).map(|k| k * items.len() / g).collect();
    let leave_out: Vec<f64> = (0..g)
        .map(|k| {
            let kept: Vec<&T> = items[..bounds[k]].iter().chain(&items[bounds[k + 1]..]).collect();
            estimator(&kept)
        })
        .collect();
    let m = mean(&leave_out);
    let dev: Vec<f64> = leave_out.iter().map(|v| (v - m).powi(2)).collect();
    ((g - 1) as f64 / g as f64 * pairwise_sum(&dev)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_moments() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert!((variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pairwise_matches_naive_for_integers() {
        let xs: Vec<f64> = (0..1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let fit = linear_fit(&x, &y).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jackknife_of_mean_matches_std_error() {
        let xs: Vec<f64> = (0..40).map(|i| ((i * 37) % 11) as f64).collect();
        let jk = jackknife_std_error(&xs, xs.len(), |v| v.iter().map(|x| **x).sum::<f64>() / v.len() as f64);
        assert!((jk - std_error(&xs)).abs() < 1e-12);
    }
}
