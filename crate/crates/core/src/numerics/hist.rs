use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Log-binned density estimate with Poisson 68% intervals.
#[derive(Clone, Debug)]
pub struct LogHistogram {
    pub edges: Vec<f64>,
    /// geometric bin centres
    pub centers: Vec<f64>,
    pub counts: Vec<u64>,
    /// counts / (n · linear bin width)
    pub densities: Vec<f64>,
    pub ci_lower: Vec<f64>,
    pub ci_upper: Vec<f64>,
    pub total: usize,
}

impl LogHistogram {
    pub fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| w[1] - w[0])
    }
}

/// Exact (Garwood) central 68% interval for a Poisson count.
fn poisson_interval(k: u64) -> (f64, f64) {
    let alpha = 1.0 - 0.6827;
    let lower = if k == 0 {
        0.0
    } else {
        ChiSquared::new(2.0 * k as f64).unwrap().inverse_cdf(alpha / 2.0) / 2.0
    };
    let upper = if k == 0 {
        // one-sided
        -(alpha.ln())
    } else {
        ChiSquared::new(2.0 * (k + 1) as f64).unwrap().inverse_cdf(1.0 - alpha / 2.0) / 2.0
    };
    (lower, upper)
}

pub fn histogram_log(samples: &[f64], bins: usize, range: (f64, f64)) -> Result<LogHistogram> {
    let (lo, hi) = range;
    if bins == 0 || !(lo > 0.0) || !(hi > lo) {
        return Err(Error::InvalidArgument(format!("bad log histogram range {lo}..{hi} with {bins} bins")));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| (llo + step * i as f64).exp()).collect();
    let mut counts = vec![0u64; bins];
    for &x in samples {
        if x < lo || x > hi || !x.is_finite() {
            continue;
        }
        let i = (((x.ln() - llo) / step) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let n = samples.len().max(1) as f64;
    let mut densities = Vec::with_capacity(bins);
    let mut ci_lower = Vec::with_capacity(bins);
    let mut ci_upper = Vec::with_capacity(bins);
    for (i, &k) in counts.iter().enumerate() {
        let norm = n * (edges[i + 1] - edges[i]);
        let (l, u) = poisson_interval(k);
        densities.push(k as f64 / norm);
        ci_lower.push(l / norm);
        ci_upper.push(u / norm);
    }
    let centers = edges.windows(2).map(|w| (w[0] * w[1]).sqrt()).collect();
    Ok(LogHistogram { edges, centers, counts, densities, ci_lower, ci_upper, total: samples.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn uniform_mass_is_one() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..1_000_000).map(|_| rng.random::<f64>().max(1e-300)).collect();
        let h = histogram_log(&xs, 60, (1e-12, 1.0)).unwrap();
        let mass: f64 = h.densities.iter().zip(h.widths()).map(|(d, w)| d * w).sum();
        assert!((mass - 1.0).abs() < 1e-12, "{mass}");
    }

    #[test]
    fn empty_bins_have_one_sided_intervals() {
        let h = histogram_log(&[1.0, 1.1], 4, (0.01, 100.0)).unwrap();
        assert_eq!(h.densities[0], 0.0);
        assert_eq!(h.ci_lower[0], 0.0);
        assert!(h.ci_upper[0] > 0.0);
        let (l, u) = poisson_interval(100);
        // chi-square quantiles evaluated independently
        assert!((l - 90.016_543).abs() < 1e-4 && (u - 111.033_593).abs() < 1e-4, "{l} {u}");
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(histogram_log(&[1.0], 10, (0.0, 1.0)).is_err());
        assert!(histogram_log(&[1.0], 0, (0.1, 1.0)).is_err());
    }
}
