//! Small statistics helpers shared by estimators and Monte Carlo checks.

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

/// Standard error of the mean.
pub fn std_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Median ignoring NaN. Infinite values take part in the ordering.
pub fn median(xs: &[f64]) -> f64 {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        let (a, b) = (v[k / 2 - 1], v[k / 2]);
        if a == b {
            a
        } else {
            0.5 * (a + b)
        }
    }
}

pub fn skewness(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

/// Ordinary least squares of y on x with intercept.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub residual_norm: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - intercept - slope * a;
            r * r
        })
        .sum();
    let slope_stderr = if n > 2 {
        (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Some(LineFit {
        slope,
        intercept,
        slope_stderr,
        residual_norm: rss.sqrt(),
    })
}

/// Least squares y ≈ k·a + l·b with both coefficients constrained to be
/// non-negative. Returns (k, l).
pub fn nonneg_two_term_fit(a: &[f64], b: &[f64], y: &[f64]) -> (f64, f64) {
    let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, z)| x * z).sum::<f64>();
    let (aa, bb, ab) = (dot(a, a), dot(b, b), dot(a, b));
    let (ay, by) = (dot(a, y), dot(b, y));
    let det = aa * bb - ab * ab;
    if det > 1e-14 * aa * bb && aa > 0.0 && bb > 0.0 {
        let k = (bb * ay - ab * by) / det;
        let l = (aa * by - ab * ay) / det;
        if k >= 0.0 && l >= 0.0 {
            return (k, l);
        }
    }
    let k_only = if aa > 0.0 { (ay / aa).max(0.0) } else { 0.0 };
    let l_only = if bb > 0.0 { (by / bb).max(0.0) } else { 0.0 };
    let rss = |k: f64, l: f64| {
        a.iter()
            .zip(b)
            .zip(y)
            .map(|((p, q), v)| (v - k * p - l * q).powi(2))
            .sum::<f64>()
    };
    if rss(k_only, 0.0) <= rss(0.0, l_only) {
        (k_only, 0.0)
    } else {
        (0.0, l_only)
    }
}
