//! Coherent grating patterns built from the single-bar amplitude, beam
//! spread convolution and peak extraction.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::amplitude::mol_bar_amplitude;
use crate::density::mean_abs_x2;
use crate::error::{Error, Result};
use crate::model::{ClusterModel, GratingGeometry, ReducedAmplitude};
use crate::quadrature::QuadratureSpec;

/// `|sin(K d / 2)|` below this switches to the principal-maximum limit.
const GRATING_LIMIT_THRESHOLD: f64 = 1e-12;

/// Sampled diffraction pattern.
///
/// `amplitude` holds the reduced coherent amplitude `A_mol(K2) G_N(K2)`;
/// `intensity` is `|amplitude|^2` divided by its forward value, so the
/// unbroadened intensity at `K2 = 0` is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffractionPattern {
    pub k2_grid: Vec<f64>,
    pub amplitude: Vec<ReducedAmplitude>,
    pub intensity: Vec<f64>,
    pub geometry: GratingGeometry,
    pub model: ClusterModel,
    /// Standard deviation of the Gaussian beam spread applied, nm^-1.
    pub beam_sigma_k2: f64,
}

impl DiffractionPattern {
    pub fn len(&self) -> usize {
        self.k2_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k2_grid.is_empty()
    }

    /// Uniform grid step, or a contract error if the grid is not uniform.
    pub fn uniform_step(&self) -> Result<f64> {
        uniform_step(&self.k2_grid)
    }

    /// Integrated intensity `sum I dK`.
    pub fn integrated_intensity(&self) -> Result<f64> {
        Ok(self.intensity.iter().sum::<f64>() * self.uniform_step()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakRecord {
    pub order: i64,
    pub k2_location: f64,
    /// Height relative to the zeroth-order peak.
    pub height: f64,
    /// Full width at half maximum, `None` if a half-height crossing falls
    /// outside the grid.
    pub fwhm: Option<f64>,
}

fn uniform_step(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::Contract("grid needs at least two points".into()));
    }
    let step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::Contract("grid must be increasing".into()));
    }
    let tol = 1e-6 * step;
    for (i, w) in grid.windows(2).enumerate() {
        if ((w[1] - w[0]) - step).abs() > tol {
            return Err(Error::Contract(format!(
                "grid is not uniform near index {i} (step {} vs {step})",
                w[1] - w[0]
            )));
        }
    }
    Ok(step)
}

/// Uniform grid of `n` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "need n >= 2 and finite lo < hi (got n = {n}, [{lo}, {hi}])"
        )));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

/// Splits the half phase `K d / 2` into `m pi + r` with `|r| <= pi / 2`.
fn reduced_half_phase(k2: f64, period: f64) -> (i64, f64) {
    let half_phase = 0.5 * k2 * period;
    let m = (half_phase / PI).round();
    (m as i64, half_phase - m * PI)
}

/// `sin(N K d / 2) / sin(K d / 2)`.
pub fn grating_function(k2: f64, geometry: &GratingGeometry) -> f64 {
    let n = geometry.num_bars() as f64;
    let (m, r) = reduced_half_phase(k2, geometry.period());
    // sin(N (m pi + r)) / sin(m pi + r) = (-1)^(m (N - 1)) sin(N r) / sin(r)
    let sign = if m.rem_euclid(2) * ((geometry.num_bars() as i64 - 1) % 2) == 0 {
        1.0
    } else {
        -1.0
    };
    let denom = r.sin();
    if denom.abs() < GRATING_LIMIT_THRESHOLD {
        sign * n
    } else {
        sign * (n * r).sin() / denom
    }
}

/// `sum_{n=0}^{N-1} exp(-i n K d)`, the bar-by-bar phase sum.
pub fn coherent_phase_sum(k2: f64, geometry: &GratingGeometry) -> Complex64 {
    let (_, r) = reduced_half_phase(k2, geometry.period());
    (0..geometry.num_bars())
        .map(|n| Complex64::from_polar(1.0, -2.0 * n as f64 * r))
        .sum()
}

/// Coherent grating intensity `|A_mol G_N|^2`, normalized to the forward
/// direction.
pub fn coherent_intensity(
    model: &ClusterModel,
    geometry: &GratingGeometry,
    k2_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<DiffractionPattern> {
    if k2_grid.is_empty() {
        return Err(Error::Domain("empty wavenumber grid".into()));
    }
    if k2_grid.iter().any(|k| !k.is_finite()) {
        return Err(Error::Domain("wavenumber grid must be finite".into()));
    }
    if k2_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("wavenumber grid must be sorted".into()));
    }
    model.validate()?;

    let size = 2.0 * mean_abs_x2(model)?;
    if size >= geometry.slit() || size >= geometry.bar_width() {
        log::warn!(
            "cluster size ~{size:.3} nm is not small against slit {} nm / bar {} nm; \
             the incoherent multi-bar term is no longer negligible",
            geometry.slit(),
            geometry.bar_width()
        );
    }

    let bar_a = geometry.bar_width();
    let amplitude = k2_grid
        .par_iter()
        .map(|&k| {
            let single = mol_bar_amplitude(model, k, bar_a, spec)?;
            Ok(single.amp_mol * grating_function(k, geometry))
        })
        .collect::<Result<Vec<ReducedAmplitude>>>()?;

    let forward = mol_bar_amplitude(model, 0.0, bar_a, spec)?.amp_mol.norm_sqr()
        * (geometry.num_bars() as f64).powi(2);
    let intensity = amplitude.iter().map(|a| a.norm_sqr() / forward).collect();

    Ok(DiffractionPattern {
        k2_grid: k2_grid.to_vec(),
        amplitude,
        intensity,
        geometry: *geometry,
        model: model.clone(),
        beam_sigma_k2: 0.0,
    })
}

/// Convolves the intensity with a normalized Gaussian of standard deviation
/// `sigma_k2`, truncated at five standard deviations. Points beyond the grid
/// contribute nothing. Amplitudes are left untouched.
pub fn convolve_beam_spread(pattern: &DiffractionPattern, sigma_k2: f64) -> Result<DiffractionPattern> {
    if !(sigma_k2.is_finite() && sigma_k2 >= 0.0) {
        return Err(Error::Domain(format!(
            "beam spread must be non-negative, got {sigma_k2}"
        )));
    }
    let step = pattern.uniform_step()?;
    if sigma_k2 == 0.0 {
        return Ok(pattern.clone());
    }

    let half = (5.0 * sigma_k2 / step).floor() as usize;
    let raw: Vec<f64> = (0..=2 * half)
        .map(|j| {
            let x = (j as f64 - half as f64) * step / sigma_k2;
            (-0.5 * x * x).exp()
        })
        .collect();
    let norm: f64 = raw.iter().sum();
    let kernel: Vec<f64> = raw.iter().map(|w| w / norm).collect();

    let n = pattern.len();
    let src = &pattern.intensity;
    let intensity = (0..n)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .filter_map(|(j, w)| {
                    let idx = i as isize + j as isize - half as isize;
                    (0..n as isize).contains(&idx).then(|| w * src[idx as usize])
                })
                .sum()
        })
        .collect();

    Ok(DiffractionPattern {
        intensity,
        beam_sigma_k2: (pattern.beam_sigma_k2.powi(2) + sigma_k2 * sigma_k2).sqrt(),
        ..pattern.clone()
    })
}

/// Extracts the principal diffraction peaks.
///
/// For every order `n` whose direction `2 pi n / d` lies on the grid, the
/// intensity maximum within `pi / (N d)` of that direction (the core of the
/// grating function's principal lobe) is a peak if it is a local maximum of
/// the sampled intensity and at least `1e-6` of the zeroth order. An order
/// whose core only rises toward its edges, such as a zero of the single-bar
/// amplitude flanked by split lobes, yields no peak. Plateaus resolve to
/// their leftmost point. A grid starting at `K2 = 0` is treated as
/// mirror-symmetric about it.
pub fn find_peaks(pattern: &DiffractionPattern) -> Result<Vec<PeakRecord>> {
    let step = pattern.uniform_step()?;
    let geometry = &pattern.geometry;
    let period = geometry.period();
    let n_bars = geometry.num_bars() as f64;
    let required = 2.0 * PI / (5.0 * n_bars * period);
    if step >= required {
        return Err(Error::Resolution { step, required });
    }

    let k = &pattern.k2_grid;
    let y = &pattern.intensity;
    let n = y.len();
    let mirror_at_zero = k[0] == 0.0;
    let is_local_max = |i: usize| -> bool {
        let left_ok = if i == 0 {
            mirror_at_zero && n > 1 && y[0] > y[1]
        } else {
            y[i] > y[i - 1]
        };
        let right_ok = i + 1 < n && y[i] >= y[i + 1];
        left_ok && (right_ok || (i == 0 && mirror_at_zero))
    };

    // Principal lobe of order n spans the first zeros of G at 2πn/d ± 2π/(Nd).
    let lobe = 2.0 * PI / (n_bars * period);
    let first_order = (k[0] * period / (2.0 * PI)).ceil() as i64;
    let last_order = (k[n - 1] * period / (2.0 * PI)).floor() as i64;
    let mut located: Vec<(i64, usize)> = Vec::new();
    for order in first_order..=last_order {
        let centre = geometry.order_k2(order);
        let lo = k.partition_point(|&v| v <= centre - lobe);
        let hi = k.partition_point(|&v| v < centre + lobe);
        if lo >= hi {
            continue;
        }
        let best = (lo..hi).fold(lo, |b, i| if y[i] > y[b] { i } else { b });
        let nearest = (lo..hi)
            .min_by(|&a, &b| (k[a] - centre).abs().total_cmp(&(k[b] - centre).abs()))
            .unwrap_or(best);
        // A split lobe has a zero of the envelope at the order direction.
        if is_local_max(best) && y[nearest] >= 0.5 * y[best] {
            located.push((order, best));
        }
    }

    let reference = located
        .iter()
        .find(|(order, _)| *order == 0)
        .map(|&(_, i)| y[i])
        .unwrap_or(1.0);
    if !(reference > 0.0) {
        return Ok(Vec::new());
    }

    Ok(located
        .into_iter()
        .filter(|&(_, i)| y[i] >= 1e-6 * reference)
        .map(|(order, i)| PeakRecord {
            order,
            k2_location: k[i],
            height: y[i] / reference,
            fwhm: half_max_width(k, y, i, mirror_at_zero),
        })
        .collect())
}

fn half_max_width(k: &[f64], y: &[f64], peak: usize, mirror_at_zero: bool) -> Option<f64> {
    let half = 0.5 * y[peak];
    let crossing = |a: usize, b: usize| -> f64 {
        let t = (y[a] - half) / (y[a] - y[b]);
        k[a] + t * (k[b] - k[a])
    };
    let right = (peak + 1..y.len()).find(|&j| y[j] <= half).map(|j| crossing(j - 1, j))?;
    let left = match (0..peak).rev().find(|&j| y[j] <= half) {
        Some(j) => crossing(j + 1, j),
        None if mirror_at_zero && peak == 0 => -right,
        None => return None,
    };
    Some(right - left)
}
