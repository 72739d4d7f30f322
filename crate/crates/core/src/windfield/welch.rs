//! Welch averaged periodogram estimates of auto and cross spectra.
//!
//! Defaults: 512-sample segments, 256-sample overlap, periodic Hann window,
//! the global series mean removed before segmenting, one-sided density
//! scaling in units²/Hz.

use num_complex::Complex;
use rustfft::FftPlanner;

use super::WindSeries;
use crate::scalar::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WelchConfig {
    pub segment_len: usize,
    pub overlap: usize,
}

impl Default for WelchConfig {
    fn default() -> Self {
        WelchConfig {
            segment_len: 512,
            overlap: 256,
        }
    }
}

impl WelchConfig {
    /// Shortest series accepted by [`estimate_statistics`].
    pub fn min_steps(&self) -> usize {
        8 * self.segment_len
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointStats {
    pub id: i64,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub psd: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairStats {
    pub i: usize,
    pub j: usize,
    /// Magnitude-squared coherence per frequency.
    pub coherence: Vec<f64>,
    /// Cross-spectral phase of `i` relative to `j`.
    pub phase: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatisticsReport {
    pub config: WelchConfig,
    pub n_segments: usize,
    pub frequencies: Vec<f64>,
    pub points: Vec<PointStats>,
    pub pairs: Vec<PairStats>,
}

impl StatisticsReport {
    /// Coherence between points `a` and `b` (list indices). Both orders return
    /// the same vector.
    pub fn coherence(&self, a: usize, b: usize) -> Option<&[f64]> {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.pairs
            .iter()
            .find(|p| p.i == i && p.j == j)
            .map(|p| p.coherence.as_slice())
    }

    /// Phase of `a` relative to `b`.
    pub fn phase(&self, a: usize, b: usize) -> Option<Vec<f64>> {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        let p = self.pairs.iter().find(|p| p.i == i && p.j == j)?;
        Some(if a < b {
            p.phase.clone()
        } else {
            p.phase.iter().map(|x| -x).collect()
        })
    }
}

pub(crate) fn hann(len: usize) -> Vec<f64> {
    (0..len)
        .map(|m| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * m as f64 / len as f64).cos())
        .collect()
}

fn central_moments(x: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (mean, m2 / n, m3 / n, m4 / n)
}

/// Per-point moments and Welch PSD, plus coherence and phase for every pair.
pub fn estimate_statistics<T: Real>(
    series: &WindSeries<T>,
    config: &WelchConfig,
) -> Result<StatisticsReport> {
    let seg = config.segment_len;
    if seg < 2 || config.overlap >= seg {
        return Err(Error::domain(format!(
            "Welch segment length {seg} with overlap {} is not usable",
            config.overlap
        )));
    }
    let n = series.n_steps();
    if n < config.min_steps() {
        return Err(Error::domain(format!(
            "series has {n} samples, at least {} (8 segments of {seg}) required",
            config.min_steps()
        )));
    }
    let fs = 1.0 / series.dt.to_f64_lossless();
    let window = hann(seg);
    let wss: f64 = window.iter().map(|w| w * w).sum();
    let step = seg - config.overlap;
    let n_segments = (n - seg) / step + 1;
    let n_freq = seg / 2 + 1;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(seg);

    let data: Vec<Vec<f64>> = series
        .samples
        .iter()
        .map(|r| r.iter().map(|v| v.to_f64_lossless()).collect())
        .collect();
    let np = data.len();
    let mut points = Vec::with_capacity(np);
    let mut transforms: Vec<Vec<Vec<Complex<f64>>>> = Vec::with_capacity(np);
    for (p, row) in data.iter().enumerate() {
        let (mean, m2, m3, m4) = central_moments(row);
        let (skewness, excess_kurtosis) = if m2 > 0.0 {
            (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
        } else {
            (0.0, 0.0)
        };
        let mut segs = Vec::with_capacity(n_segments);
        for s in 0..n_segments {
            let mut buf: Vec<Complex<f64>> = row[s * step..s * step + seg]
                .iter()
                .zip(&window)
                .map(|(v, w)| Complex::new((v - mean) * w, 0.0))
                .collect();
            fft.process(&mut buf);
            buf.truncate(n_freq);
            segs.push(buf);
        }
        points.push(PointStats {
            id: series.point_ids.get(p).copied().unwrap_or(p as i64),
            mean,
            std: m2.sqrt(),
            skewness,
            excess_kurtosis,
            psd: Vec::new(),
        });
        transforms.push(segs);
    }

    let scale_for = |k: usize| {
        let one_sided = if k == 0 || (seg.is_multiple_of(2) && k == seg / 2) {
            1.0
        } else {
            2.0
        };
        one_sided / (fs * wss * n_segments as f64)
    };
    let cross = |a: usize, b: usize| -> Vec<Complex<f64>> {
        (0..n_freq)
            .map(|k| {
                let mut acc = Complex::new(0.0, 0.0);
                for s in 0..n_segments {
                    acc += transforms[a][s][k] * transforms[b][s][k].conj();
                }
                acc * scale_for(k)
            })
            .collect()
    };
    let autos: Vec<Vec<f64>> = (0..np)
        .map(|p| cross(p, p).iter().map(|c| c.re).collect())
        .collect();
    let mut pairs = Vec::new();
    for i in 0..np {
        for j in i + 1..np {
            let pij = cross(i, j);
            let coherence = pij
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let den = autos[i][k] * autos[j][k];
                    if den > 0.0 {
                        (c.norm_sqr() / den).min(1.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            let phase = pij.iter().map(|c| c.arg()).collect();
            pairs.push(PairStats {
                i,
                j,
                coherence,
                phase,
            });
        }
    }
    for (p, psd) in points.iter_mut().zip(autos) {
        p.psd = psd;
    }
    Ok(StatisticsReport {
        config: *config,
        n_segments,
        frequencies: (0..n_freq).map(|k| k as f64 * fs / seg as f64).collect(),
        points,
        pairs,
    })
}
