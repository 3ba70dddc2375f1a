//! Single-bar transition amplitudes in the reduced convention.
//!
//! For a bar of width `a` the molecular amplitude is
//!
//! ```text
//! A_mol(K) = (2 / K) [ sin(K a / 2) F(K) - Edge(K) ]
//! Edge(K)  = integral_0^a rho(x) sin(K (a - x) / 2) dx
//! ```
//!
//! with `F` the Fourier transform of the marginal density (see
//! [`crate::density`]). A point particle has `F = 1` and, with half of the
//! boundary delta inside the bar, `Edge = sin(K a / 2) / 2`, which collapses
//! `A_mol` onto `A_pt(K) = sin(K a / 2) / K`.

use num_complex::Complex64;

use crate::density::{fourier_density, mean_abs_x2, MarginalDensity};
use crate::error::{Error, Result};
use crate::model::{ClusterModel, ReducedAmplitude};
use crate::quadrature::QuadratureSpec;

/// Below this `|K2|` (nm^-1) amplitudes are taken from their series limits.
pub const SMALL_K2: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleBarResult {
    pub k2: f64,
    pub amp_point: ReducedAmplitude,
    pub amp_mol: ReducedAmplitude,
    pub fourier_term: Complex64,
    pub edge_term: f64,
}

fn check_bar(bar_a: f64) -> Result<()> {
    if !(bar_a.is_finite() && bar_a > 0.0) {
        return Err(Error::Domain(format!("bar width must be positive, got {bar_a}")));
    }
    Ok(())
}

/// `sin(K2 a / 2) / K2`; `a / 2` in the forward limit.
pub fn point_bar_amplitude(k2: f64, bar_a: f64) -> Result<ReducedAmplitude> {
    check_bar(bar_a)?;
    Ok(ReducedAmplitude::real(point_value(k2, bar_a)))
}

fn point_value(k2: f64, bar_a: f64) -> f64 {
    if k2.abs() < SMALL_K2 {
        0.5 * bar_a - k2 * k2 * bar_a.powi(3) / 48.0
    } else {
        (0.5 * k2 * bar_a).sin() / k2
    }
}

/// `integral_0^a rho(x2) sin(K2 (a - x2) / 2) dx2`.
pub fn edge_term(model: &ClusterModel, k2: f64, bar_a: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_bar(bar_a)?;
    if k2 == 0.0 {
        return Ok(0.0);
    }
    if model.is_point() {
        return Ok(0.5 * (0.5 * k2 * bar_a).sin());
    }
    let density = MarginalDensity::new(model)?;
    let q = 0.5 * k2;
    density.integrate_weighted(|x| (q * (bar_a - x)).sin(), 0.0, bar_a, q, spec)
}

/// Forward-direction limit `a - (a I0 - I1)`, with `I0`, `I1` the zeroth and
/// first moments of `rho` over `[0, a]`.
fn forward_limit(model: &ClusterModel, bar_a: f64, spec: &QuadratureSpec) -> Result<f64> {
    if model.is_point() {
        return Ok(0.5 * bar_a);
    }
    let density = MarginalDensity::new(model)?;
    let inner = density.integrate_weighted(|x| bar_a - x, 0.0, bar_a, 0.0, spec)?;
    Ok(bar_a - inner)
}

/// Molecular single-bar amplitude together with its ingredients.
pub fn mol_bar_amplitude(
    model: &ClusterModel,
    k2: f64,
    bar_a: f64,
    spec: &QuadratureSpec,
) -> Result<SingleBarResult> {
    check_bar(bar_a)?;
    model.validate()?;
    let amp_point = ReducedAmplitude::real(point_value(k2, bar_a));
    let fourier_term = fourier_density(model, k2)?;
    let edge = edge_term(model, k2, bar_a, spec)?;

    let amp_mol = if k2.abs() < SMALL_K2 {
        if model.is_point() {
            amp_point
        } else {
            ReducedAmplitude::real(forward_limit(model, bar_a, spec)?)
        }
    } else {
        let s = (0.5 * k2 * bar_a).sin();
        ReducedAmplitude(2.0 * (fourier_term * s - edge) / k2)
    };

    Ok(SingleBarResult {
        k2,
        amp_point,
        amp_mol,
        fourier_term,
        edge_term: edge,
    })
}

/// Point-particle bar width that mimics the cluster at small `K2`:
/// `a + <|x2|>`.
pub fn effective_bar_width(model: &ClusterModel, bar_a: f64) -> Result<f64> {
    check_bar(bar_a)?;
    Ok(bar_a + mean_abs_x2(model)?)
}

const FIT_MIN_SAMPLES: usize = 5;
const FIT_SCAN_POINTS: usize = 256;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Least-squares bar width `a*` for which `|A_pt(K2; a*)|` best reproduces
/// the sampled `|A|` values.
///
/// The bracket `[a_init / 2, 2 a_init]` is scanned on a uniform grid and the
/// best cell refined by golden-section search. A minimum on the bracket edge
/// is reported as an error.
pub fn fit_effective_width(samples: &[(f64, f64)], bar_a_init: f64) -> Result<f64> {
    check_bar(bar_a_init)?;
    if samples.len() < FIT_MIN_SAMPLES {
        return Err(Error::Fit(format!(
            "need at least {FIT_MIN_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|(k, v)| !(k.is_finite() && v.is_finite())) {
        return Err(Error::Fit("samples must be finite".into()));
    }
    let mut ks: Vec<f64> = samples.iter().map(|s| s.0).collect();
    ks.sort_by(f64::total_cmp);
    if ks.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Fit("sample wavenumbers must be distinct".into()));
    }

    let cost = |width: f64| -> f64 {
        samples
            .iter()
            .map(|&(k, target)| {
                let r = point_value(k, width).abs() - target;
                r * r
            })
            .sum()
    };

    let lo = 0.5 * bar_a_init;
    let hi = 2.0 * bar_a_init;
    let step = (hi - lo) / (FIT_SCAN_POINTS - 1) as f64;
    let best = (0..FIT_SCAN_POINTS)
        .map(|i| (i, cost(lo + step * i as f64)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .expect("scan grid is non-empty");
    if best == 0 || best == FIT_SCAN_POINTS - 1 {
        return Err(Error::Fit(format!(
            "no minimum bracketed in [{lo}, {hi}] nm"
        )));
    }

    let mut a = lo + step * (best - 1) as f64;
    let mut b = lo + step * (best + 1) as f64;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = cost(c);
    let mut fd = cost(d);
    while (b - a).abs() > 1e-12 * bar_a_init {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = cost(d);
        }
    }
    Ok(0.5 * (a + b))
}
