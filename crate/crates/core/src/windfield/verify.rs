use std::fmt;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::synth::bin_variances;
use super::welch::{estimate_statistics, StatisticsReport, WelchConfig};
use super::{point_moments, target_coherence, target_psd, WindFieldSpec, WindSeries};
use crate::scalar::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindTolerances {
    pub mean_rel: f64,
    pub std_rel: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Largest band-power log ratio to the target, in dB.
    pub psd_db: f64,
    pub coherence_rms: f64,
    pub band_low_hz: f64,
    pub band_high_hz: f64,
    /// Allowed half-to-half difference in units of its standard error.
    pub stationarity_se: f64,
    pub trend_t: f64,
}

impl Default for WindTolerances {
    fn default() -> Self {
        WindTolerances {
            mean_rel: 0.02,
            std_rel: 0.05,
            skewness: 0.1,
            excess_kurtosis: 0.2,
            psd_db: 1.5,
            coherence_rms: 0.1,
            band_low_hz: 0.01,
            band_high_hz: 5.0,
            stationarity_se: 3.0,
            trend_t: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: String, value: f64, limit: f64) -> Self {
        Check {
            passed: value.is_finite() && value <= limit,
            name,
            value,
            limit,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<40} {:>12.6} (limit {})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.limit
        )
    }
}

/// Standard deviation of `sum_t w_t x_t` for the circulant process with the
/// given bin variances (bins `1 ..= n/2`).
fn linear_statistic_sd(weights: &[f64], bins: &[f64]) -> f64 {
    let n = weights.len();
    let mut buf: Vec<Complex<f64>> = weights.iter().map(|&w| Complex::new(w, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    bins.iter()
        .enumerate()
        .map(|(b, v)| v * buf[b + 1].norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Approximate standard error of a sample standard deviation over `m` samples.
fn std_estimate_sd(bins: &[f64], n: usize, m: usize) -> f64 {
    let var: f64 = bins.iter().sum();
    if var == 0.0 {
        return 0.0;
    }
    let last = bins.len() - 1;
    let gamma_sq: f64 = bins
        .iter()
        .enumerate()
        .map(|(b, v)| {
            if n.is_multiple_of(2) && b == last {
                v * v
            } else {
                0.5 * v * v
            }
        })
        .sum::<f64>()
        * n as f64;
    let var_of_var = 2.0 * gamma_sq / m as f64;
    (var_of_var / (4.0 * var)).sqrt()
}

fn half_moments(x: &[f64]) -> [(f64, f64); 2] {
    let h = x.len() / 2;
    [&x[..h], &x[h..2 * h]].map(|s| {
        let n = s.len() as f64;
        let m = s.iter().sum::<f64>() / n;
        (m, (s.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n).sqrt())
    })
}

fn third_octave_bands(lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let r = 2f64.powf(1.0 / 3.0);
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        out.push((a, (a * r).min(hi)));
        a *= r;
    }
    out
}

/// Compares a series against its specification: moments, band PSD, pairwise
/// coherence, and first-half versus second-half stationarity.
pub fn verify_series<T: Real>(
    series: &WindSeries<T>,
    spec: &WindFieldSpec<T>,
    tol: &WindTolerances,
    welch: &WelchConfig,
) -> Result<(StatisticsReport, Vec<Check>)> {
    spec.validate()?;
    if series.n_points() != spec.points.len() {
        return Err(Error::domain(format!(
            "series has {} points, spec has {}",
            series.n_points(),
            spec.points.len()
        )));
    }
    let report = estimate_statistics(series, welch)?;
    let n = series.n_steps();
    let hi = tol.band_high_hz.min(0.5 / series.dt.to_f64_lossless());
    let bands = third_octave_bands(tol.band_low_hz, hi);
    let spectra_match = n == spec.n_steps();
    let bins = if spectra_match {
        Some(bin_variances(spec)?)
    } else {
        None
    };
    let mut checks = Vec::new();

    for (p, point) in spec.points.iter().enumerate() {
        let stats = &report.points[p];
        let (mu, sigma) = point_moments(spec, point)?;
        let (mu, sigma) = (mu.to_f64_lossless(), sigma.to_f64_lossless());
        let tag = format!("p{}", point.id);
        checks.push(Check::at_most(
            format!("{tag} mean relative error"),
            (stats.mean - mu).abs() / mu.abs().max(f64::MIN_POSITIVE),
            tol.mean_rel,
        ));
        if sigma > 0.0 {
            checks.push(Check::at_most(
                format!("{tag} std relative error"),
                (stats.std - sigma).abs() / sigma,
                tol.std_rel,
            ));
            checks.push(Check::at_most(
                format!("{tag} |skewness|"),
                stats.skewness.abs(),
                tol.skewness,
            ));
            checks.push(Check::at_most(
                format!("{tag} |excess kurtosis|"),
                stats.excess_kurtosis.abs(),
                tol.excess_kurtosis,
            ));
            let mut worst: f64 = 0.0;
            for &(a, b) in &bands {
                let (mut est, mut target) = (0.0, 0.0);
                for (k, &f) in report.frequencies.iter().enumerate() {
                    if f >= a && f < b {
                        est += stats.psd[k];
                        target += target_psd(spec, point, T::lit(f))?.to_f64_lossless();
                    }
                }
                if target > 0.0 {
                    worst = worst.max((10.0 * (est / target).log10()).abs());
                }
            }
            checks.push(Check::at_most(
                format!("{tag} PSD band error [dB]"),
                worst,
                tol.psd_db,
            ));
        } else {
            checks.push(Check::at_most(
                format!("{tag} std (zero target)"),
                stats.std,
                1e-9,
            ));
        }

        if let Some(bins) = &bins {
            let row: Vec<f64> = series.samples[p].iter().map(|v| v.to_f64_lossless()).collect();
            let [(m1, s1), (m2, s2)] = half_moments(&row);
            let h = n / 2;
            let mut w = vec![0.0; n];
            w[..h].iter_mut().for_each(|x| *x = 1.0 / h as f64);
            w[h..2 * h].iter_mut().for_each(|x| *x = -1.0 / h as f64);
            let se_mean = linear_statistic_sd(&w, &bins[p]);
            let se_std = std::f64::consts::SQRT_2 * std_estimate_sd(&bins[p], n, h);
            let z = |d: f64, se: f64| {
                if se > 0.0 {
                    d.abs() / se
                } else if d.abs() < 1e-9 {
                    0.0
                } else {
                    f64::INFINITY
                }
            };
            checks.push(Check::at_most(
                format!("{tag} half-mean shift [SE]"),
                z(m1 - m2, se_mean),
                tol.stationarity_se,
            ));
            checks.push(Check::at_most(
                format!("{tag} half-std shift [SE]"),
                z(s1 - s2, se_std),
                tol.stationarity_se,
            ));
            let tbar = (n as f64 - 1.0) / 2.0;
            let sxx: f64 = (0..n).map(|t| (t as f64 - tbar).powi(2)).sum();
            let wt: Vec<f64> = (0..n).map(|t| (t as f64 - tbar) / sxx).collect();
            let slope: f64 = wt.iter().zip(&row).map(|(a, b)| a * b).sum();
            checks.push(Check::at_most(
                format!("{tag} trend |t|"),
                z(slope, linear_statistic_sd(&wt, &bins[p])),
                tol.trend_t,
            ));
        }
    }

    for pair in &report.pairs {
        let (a, b) = (&spec.points[pair.i], &spec.points[pair.j]);
        let (mut sum, mut count) = (0.0, 0usize);
        for (k, &f) in report.frequencies.iter().enumerate() {
            if f >= tol.band_low_hz && f <= hi {
                let target = target_coherence(spec, a, b, T::lit(f))?.to_f64_lossless();
                sum += (pair.coherence[k] - target).powi(2);
                count += 1;
            }
        }
        if count > 0 {
            checks.push(Check::at_most(
                format!("p{}-p{} coherence RMS error", a.id, b.id),
                (sum / count as f64).sqrt(),
                tol.coherence_rms,
            ));
        }
    }
    Ok((report, checks))
}

/// Plain-text rendering of a statistics report.
pub fn format_report(report: &StatisticsReport) -> String {
    let mut s = format!(
        "Welch: segment {} overlap {} segments {} (periodic Hann, one-sided density)\n",
        report.config.segment_len, report.config.overlap, report.n_segments
    );
    for p in &report.points {
        s.push_str(&format!(
            "point {:>4}: mean {:.6} std {:.6} skewness {:+.4} excess kurtosis {:+.4}\n",
            p.id, p.mean, p.std, p.skewness, p.excess_kurtosis
        ));
    }
    for pair in &report.pairs {
        let (ci, cj) = (report.points[pair.i].id, report.points[pair.j].id);
        let avg = pair.coherence.iter().skip(1).sum::<f64>() / (pair.coherence.len() - 1).max(1) as f64;
        s.push_str(&format!("pair {ci}-{cj}: mean coherence {avg:.4}\n"));
    }
    s
}
