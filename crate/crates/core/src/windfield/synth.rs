use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use super::{point_moments, target_angle, target_coherence, target_psd, WindFieldSpec, WindSeries};
use crate::scalar::Real;
use crate::{Error, Result};

type C64 = Complex<f64>;

/// Minimum number of samples accepted by [`generate`].
pub const MIN_STEPS: usize = 64;

/// Frequencies of the synthesized bins `k = 1 ..= n/2`.
pub fn synthesis_frequencies<T: Real>(spec: &WindFieldSpec<T>) -> Vec<f64> {
    let n = spec.n_steps();
    let df = spec.sample_rate.to_f64_lossless() / n as f64;
    (1..=n / 2).map(|k| k as f64 * df).collect()
}

/// Variance carried by each synthesized bin, per point, summing to the point
/// variance. Row `p` is aligned with [`synthesis_frequencies`].
pub fn bin_variances<T: Real>(spec: &WindFieldSpec<T>) -> Result<Vec<Vec<f64>>> {
    let freqs = synthesis_frequencies(spec);
    let df = spec.sample_rate.to_f64_lossless() / spec.n_steps() as f64;
    let mut out = Vec::with_capacity(spec.points.len());
    for p in &spec.points {
        let (_, sigma) = point_moments(spec, p)?;
        let var = sigma.to_f64_lossless().powi(2);
        let mut row = freqs
            .iter()
            .map(|&f| Ok(target_psd(spec, p, T::lit(f))?.to_f64_lossless() * df))
            .collect::<Result<Vec<f64>>>()?;
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            let scale = var / total;
            row.iter_mut().for_each(|v| *v *= scale);
        } else if var > 0.0 {
            return Err(Error::domain(format!(
                "point {}: target spectrum carries no power in the synthesized band",
                p.id
            )));
        }
        out.push(row);
    }
    Ok(out)
}

/// Lower-triangular `L` with `L L^H = a` for Hermitian positive semi-definite
/// `a` with unit diagonal. Pivots at rounding level or below are set to zero
/// together with their column, so fully coherent points share one phasor.
pub(crate) fn semidefinite_cholesky(a: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let n = a.len();
    let tol = f64::max(1e-12, 16.0 * f64::EPSILON);
    let mut l = vec![vec![C64::new(0.0, 0.0); n]; n];
    for j in 0..n {
        let mut d = a[j][j].re;
        for k in 0..j {
            d -= l[j][k].norm_sqr();
        }
        if d <= tol * a[j][j].re.abs() || d <= 0.0 {
            continue;
        }
        let ljj = d.sqrt();
        l[j][j] = C64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            l[i][j] = s / ljj;
        }
    }
    l
}

fn coherency_matrix<T: Real>(spec: &WindFieldSpec<T>, f: f64, real_only: bool) -> Result<Vec<Vec<C64>>> {
    let n = spec.points.len();
    let ft = T::lit(f);
    let mut m = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        m[i][i] = C64::new(1.0, 0.0);
        for j in 0..i {
            let (pi, pj) = (&spec.points[i], &spec.points[j]);
            let coh = target_coherence(spec, pi, pj, ft)?.to_f64_lossless();
            let phi = target_angle(spec, pi, pj, ft).to_f64_lossless();
            let mut c = C64::from_polar(coh.clamp(0.0, 1.0).sqrt(), phi);
            if real_only {
                c.im = 0.0;
            }
            m[i][j] = c;
            m[j][i] = c.conj();
        }
    }
    Ok(m)
}

/// Synthesizes the wind field by the spectral method: per frequency bin the
/// coherency matrix is factored, independent complex Gaussian phasors drawn
/// from the seeded generator are correlated through the factor, scaled by the
/// bin amplitudes, and the spectrum is inverse transformed.
///
/// The DC bin carries the mean and the Nyquist bin is real, so the series is
/// periodic and statistically stationary from its first sample.
pub fn generate<T: Real>(spec: &WindFieldSpec<T>) -> Result<WindSeries<T>> {
    spec.validate()?;
    let n = spec.n_steps();
    if n < MIN_STEPS {
        return Err(Error::Validation(vec![format!(
            "wind: duration_s * sample_rate_hz gives {n} samples, at least {MIN_STEPS} required"
        )]));
    }
    let np = spec.points.len();
    let means = spec
        .points
        .iter()
        .map(|p| point_moments(spec, p).map(|(m, _)| m.to_f64_lossless()))
        .collect::<Result<Vec<_>>>()?;
    let amplitudes: Vec<Vec<f64>> = bin_variances(spec)?
        .into_iter()
        .map(|row| row.into_iter().map(f64::sqrt).collect())
        .collect();
    let freqs = synthesis_frequencies(spec);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut spectra = vec![vec![C64::new(0.0, 0.0); n]; np];
    let nf = n as f64;
    let half = n / 2;
    let mut xi = vec![C64::new(0.0, 0.0); np];
    for (b, &f) in freqs.iter().enumerate() {
        let k = b + 1;
        let nyquist = n.is_multiple_of(2) && k == half;
        let l = semidefinite_cholesky(&coherency_matrix(spec, f, nyquist)?);
        for x in xi.iter_mut() {
            *x = if nyquist {
                C64::new(normal(), 0.0)
            } else {
                C64::new(normal(), normal()) * std::f64::consts::FRAC_1_SQRT_2
            };
        }
        for p in 0..np {
            let mut a = C64::new(0.0, 0.0);
            for q in 0..=p {
                a += l[p][q] * xi[q];
            }
            a *= amplitudes[p][b];
            if nyquist {
                spectra[p][k] = C64::new(nf * a.re, 0.0);
            } else {
                let y = a * (nf * std::f64::consts::FRAC_1_SQRT_2);
                spectra[p][k] = y;
                spectra[p][n - k] = y.conj();
            }
        }
    }

    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let mut samples = Vec::with_capacity(np);
    for (p, mut spec_p) in spectra.into_iter().enumerate() {
        spec_p[0] = C64::new(nf * means[p], 0.0);
        fft.process(&mut spec_p);
        let row: Vec<T> = spec_p.iter().map(|y| T::lit(y.re / nf)).collect();
        if let Some(k) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "non-finite wind sample at point {} index {k}",
                spec.points[p].id
            )));
        }
        samples.push(row);
    }
    Ok(WindSeries {
        dt: T::one() / spec.sample_rate,
        point_ids: spec.points.iter().map(|p| p.id).collect(),
        samples,
    })
}
