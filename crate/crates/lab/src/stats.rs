//! Small statistics toolbox: moments, chain-level jackknife, windowed
//! autocorrelation time, Kolmogorov-Smirnov distance, histograms with
//! total-variation distance, weighted least squares, and a bootstrap for
//! the median. Everything is deterministic given its inputs (the
//! bootstrap takes an explicit seed).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{derive_rng, STREAM_BOOTSTRAP};

/// A point estimate with its one-sigma error and provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased (n-1 denominator) sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    assert!(n >= 2, "variance needs at least two samples");
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

pub fn pool(chains: &[Vec<f64>]) -> Vec<f64> {
    chains.iter().flatten().copied().collect()
}

/// Sample variance of all chains pooled together.
pub fn pooled_variance(chains: &[Vec<f64>]) -> f64 {
    sample_variance(&pool(chains))
}

/// Leave-one-chain-out jackknife standard error of `stat` evaluated on the
/// pooled samples. Chains are the independence unit, so this stays honest
/// in the presence of within-chain autocorrelation.
pub fn jackknife_chain_stderr<F: Fn(&[f64]) -> f64>(chains: &[Vec<f64>], stat: F) -> f64 {
    let m = chains.len();
    assert!(m >= 2, "jackknife needs at least two chains");
    let total: usize = chains.iter().map(Vec::len).sum();
    let mut thetas = Vec::with_capacity(m);
    let mut buf = Vec::with_capacity(total);
    for skip in 0..m {
        buf.clear();
        for (i, chain) in chains.iter().enumerate() {
            if i != skip {
                buf.extend_from_slice(chain);
            }
        }
        thetas.push(stat(&buf));
    }
    let tm = mean(&thetas);
    let ss: f64 = thetas.iter().map(|&t| (t - tm) * (t - tm)).sum();
    ((m - 1) as f64 / m as f64 * ss).sqrt()
}

/// Integrated autocorrelation time with the self-consistent window: the
/// sum stops at the first lag W >= 6 * tau(W), capped at n/4.
pub fn integrated_autocorr_time(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return 1.0;
    }
    let m = mean(xs);
    let g0 = xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / n as f64;
    if g0 <= 0.0 {
        return 1.0;
    }
    let cap = n / 4;
    let mut tau = 1.0;
    let mut t = 1;
    while t <= cap {
        let mut g = 0.0;
        for i in 0..n - t {
            g += (xs[i] - m) * (xs[i + t] - m);
        }
        tau += 2.0 * (g / n as f64) / g0;
        if t as f64 >= 6.0 * tau {
            break;
        }
        t += 1;
    }
    tau.max(1e-3)
}

/// n / tau, capped at n: a correlated stream never claims more information
/// than its length.
pub fn effective_sample_size(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    (n / integrated_autocorr_time(xs)).min(n)
}

/// Two-sided KS statistic of a sorted sample against a reference CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// Asymptotic KS critical value c(alpha)/sqrt(n) for the supported levels.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    let c = if alpha == 0.10 {
        1.224
    } else if alpha == 0.05 {
        1.358
    } else if alpha == 0.01 {
        1.628
    } else {
        panic!("unsupported KS level {alpha}");
    };
    c / (n as f64).sqrt()
}

/// Probability-mass histogram on [lo, hi); samples outside are clamped
/// into the edge bins so masses always sum to one.
pub fn histogram(xs: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<f64> {
    assert!(bins >= 1 && hi > lo);
    let mut counts = vec![0.0f64; bins];
    let scale = bins as f64 / (hi - lo);
    for &x in xs {
        let b = (((x - lo) * scale) as isize).clamp(0, bins as isize - 1) as usize;
        counts[b] += 1.0;
    }
    let n = xs.len() as f64;
    counts.iter_mut().for_each(|c| *c /= n);
    counts
}

/// Total-variation distance between the binned laws of two samples.
pub fn histogram_tv(xs: &[f64], ys: &[f64], bins: usize, lo: f64, hi: f64) -> f64 {
    let p = histogram(xs, bins, lo, hi);
    let q = histogram(ys, bins, lo, hi);
    0.5 * p.iter().zip(&q).map(|(&a, &b)| (a - b).abs()).sum::<f64>()
}

/// Weighted least squares fit of y = a + b x with weights 1/se^2; returns
/// (b, stderr(b)).
pub fn wls_slope(x: &[f64], y: &[f64], se: &[f64]) -> (f64, f64) {
    assert!(x.len() == y.len() && x.len() == se.len() && x.len() >= 2);
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..x.len() {
        let w = 1.0 / (se[i] * se[i]);
        sw += w;
        sx += w * x[i];
        sy += w * y[i];
        sxx += w * x[i] * x[i];
        sxy += w * x[i] * y[i];
    }
    let det = sw * sxx - sx * sx;
    let slope = (sw * sxy - sx * sy) / det;
    (slope, (sw / det).sqrt())
}

pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty());
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Bootstrap standard error of the median: `resamples` resamples with
/// replacement from a stream derived from `seed`.
pub fn bootstrap_median_stderr(xs: &[f64], seed: u64, resamples: usize) -> f64 {
    assert!(xs.len() >= 2 && resamples >= 2);
    let mut rng = derive_rng(seed, &[STREAM_BOOTSTRAP]);
    let n = xs.len();
    let mut meds = Vec::with_capacity(resamples);
    let mut buf = vec![0.0f64; n];
    for _ in 0..resamples {
        for slot in buf.iter_mut() {
            *slot = xs[rng.random_range(0..n)];
        }
        meds.push(median(&buf));
    }
    sample_variance(&meds).sqrt()
}
