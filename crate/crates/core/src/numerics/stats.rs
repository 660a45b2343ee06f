/// Kolmogorov-Smirnov distance between samples and a model CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs: Vec<f64> = samples.iter().copied().filter(|x| !x.is_nan()).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs())
    })
}

/// sup |F - G| over a grid.
pub fn ks_distance_cdfs<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(grid: &[f64], f: F, g: G) -> f64 {
    grid.iter().fold(0.0f64, |d, &x| d.max((f(x) - g(x)).abs()))
}

/// Pearson statistic divided by the number of bins whose expected count is
/// at least `min_expected`. Returns (statistic per bin, bins used).
pub fn chi_square_per_bin(observed: &[u64], expected: &[f64], min_expected: f64) -> (f64, usize) {
    let mut sum = 0.0;
    let mut used = 0;
    for (&o, &e) in observed.iter().zip(expected) {
        if e >= min_expected {
            sum += (o as f64 - e).powi(2) / e;
            used += 1;
        }
    }
    if used == 0 {
        (f64::NAN, 0)
    } else {
        (sum / used as f64, used)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_perfect_grid() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_distance(&xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
    }

    #[test]
    fn chi_square_skips_sparse_bins() {
        let (c, used) = chi_square_per_bin(&[10, 1, 0], &[10.0, 0.2, 20.0], 5.0);
        assert_eq!(used, 2);
        assert!((c - 10.0).abs() < 1e-12);
    }
}
