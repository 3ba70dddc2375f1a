//! One-dimensional quadrature.
//!
//! [`integrate_adaptive`] is a globally adaptive 15-point Gauss-Kronrod
//! scheme: the interval with the largest error estimate is bisected until
//! the summed error meets the tolerance. Integrable logarithmic endpoint
//! singularities are handled by repeated bisection toward the endpoint; the
//! Kronrod nodes never touch the interval ends.
//!
//! [`integrate_fixed`] is composite Simpson on a uniform grid and exists as
//! an independent cross-check.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadError {
    #[error(
        "adaptive quadrature did not converge within {subdivisions} subdivisions \
         (estimate {estimate:e}, error bound {error_bound:e})"
    )]
    NoConvergence {
        estimate: f64,
        error_bound: f64,
        subdivisions: usize,
    },
    #[error("invalid quadrature input: {0}")]
    InvalidInput(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections performed on top of the initial panels.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 60,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(QuadError::InvalidInput("tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadError::InvalidInput("max_subdivisions must be at least 1"));
        }
        Ok(())
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

/// 15-point Kronrod estimate with the QUADPACK error heuristic.
fn gauss_kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);

    let mut kronrod = WGK[7] * f_center;
    let mut gauss = WG[3] * f_center;
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half.abs();
    let value = kronrod * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let roundoff = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(roundoff);
    }

    Panel {
        lo,
        hi,
        value,
        error,
    }
}

/// Integrates `f` over `[lo, hi]` to `max(abs_tol, rel_tol |I|)`.
pub fn integrate_adaptive<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    integrate_adaptive_points(f, &[lo, hi], spec)
}

/// Like [`integrate_adaptive`], but starts from the partition given by the
/// sorted `points` (endpoints included). Put known singularities, kinks and
/// oscillation periods here.
pub fn integrate_adaptive_points<F>(f: F, points: &[f64], spec: &QuadratureSpec) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if points.len() < 2 {
        return Err(QuadError::InvalidInput("need at least two break points"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(QuadError::InvalidInput("integration limits must be finite"));
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(QuadError::InvalidInput("break points must be sorted"));
    }

    let mut panels: Vec<Panel> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gauss_kronrod15(&f, w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return Ok(0.0);
    }

    let mut bisections = 0;
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !total.is_finite() {
            return Err(QuadError::InvalidInput("integrand is not finite on the interval"));
        }
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if error <= target {
            return Ok(total);
        }
        if bisections >= spec.max_subdivisions {
            return Err(QuadError::NoConvergence {
                estimate: total,
                error_bound: error,
                subdivisions: bisections,
            });
        }

        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("panel list is non-empty");
        let Panel { lo, hi, .. } = panels[worst];
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine precision; accept what we have
            return if error <= 1e3 * target {
                Ok(total)
            } else {
                Err(QuadError::NoConvergence {
                    estimate: total,
                    error_bound: error,
                    subdivisions: bisections,
                })
            };
        }
        panels[worst] = gauss_kronrod15(&f, lo, mid);
        panels.push(gauss_kronrod15(&f, mid, hi));
        bisections += 1;
    }
}

/// Composite Simpson rule with `n_panels` double-width panels
/// (`2 n_panels + 1` evaluations).
pub fn integrate_fixed<F>(f: F, lo: f64, hi: f64, n_panels: usize) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    if n_panels < 2 {
        return Err(QuadError::InvalidInput("n_panels must be at least 2"));
    }
    let intervals = 2 * n_panels;
    let h = (hi - lo) / intervals as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..intervals {
        let x = lo + h * i as f64;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    Ok(h / 3.0 * (f(lo) + f(hi) + 4.0 * odd + 2.0 * even))
}
