//! Marginal density `rho(x2)` of the bound pair along the grating's
//! periodic direction: pointwise values, moments and the Fourier transform
//! `F(K2) = integral exp(i K2 x2 / 2) rho(x2) dx2`.
//!
//! Every model is even in `x2`, so full-line integrals are evaluated as twice
//! the half-line integral. The exponential model has a logarithmic
//! singularity at the origin; quadrature splits there at `1e-3 / kappa` and
//! lets bisection resolve the remaining piece.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ClusterModel;
use crate::quadrature::{integrate_adaptive_points, QuadratureSpec};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E1(x) = integral_x^inf exp(-t) / t dt` for `x > 0`.
///
/// Power series up to `x = 1`, modified-Lentz continued fraction beyond.
pub fn exp1(x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x <= 1.0 {
        // -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..100 {
            term *= -x / k as f64;
            let contrib = term / k as f64;
            sum += contrib;
            if contrib.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..200 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Offset from the origin where the exponential model's log singularity is
/// split off, in units of `1 / kappa`.
const SINGULAR_SPLIT: f64 = 1e-3;

/// Pointwise view of a model's marginal density.
#[derive(Debug, Clone, Copy)]
pub struct MarginalDensity<'a> {
    model: &'a ClusterModel,
}

impl<'a> MarginalDensity<'a> {
    /// Fails for the point particle, whose density is a delta.
    pub fn new(model: &'a ClusterModel) -> Result<Self> {
        model.validate()?;
        if model.is_point() {
            return Err(Error::Domain(
                "the point-particle density is a delta and has no pointwise values".into(),
            ));
        }
        Ok(Self { model })
    }

    pub fn model(&self) -> &ClusterModel {
        self.model
    }

    /// `rho(x2)` in nm^-1.
    pub fn eval(&self, x2: f64) -> Result<f64> {
        match self.model {
            ClusterModel::PointParticle => unreachable!("rejected in MarginalDensity::new"),
            ClusterModel::IsotropicExponential { kappa } => {
                if x2 == 0.0 {
                    return Err(Error::Domain(
                        "exponential marginal density diverges at x2 = 0".into(),
                    ));
                }
                Ok(kappa * exp1(2.0 * kappa * x2.abs()))
            }
            ClusterModel::Gaussian { width } => Ok(gaussian_pdf(x2, *width)),
            ClusterModel::Tabulated(table) => Ok(table.interpolate(x2)),
        }
    }

    /// Evaluation for quadrature nodes, which never sit on the singularity.
    fn eval_unchecked(&self, x2: f64) -> f64 {
        match self.model {
            ClusterModel::IsotropicExponential { kappa } => kappa * exp1(2.0 * kappa * x2.abs()),
            ClusterModel::Gaussian { width } => gaussian_pdf(x2, *width),
            ClusterModel::Tabulated(table) => table.interpolate(x2),
            ClusterModel::PointParticle => 0.0,
        }
    }

    /// Half-line radius beyond which the density is negligible (or zero).
    pub fn support_radius(&self) -> f64 {
        match self.model {
            ClusterModel::IsotropicExponential { kappa } => 40.0 / (2.0 * kappa),
            ClusterModel::Gaussian { width } => 20.0 * width,
            ClusterModel::Tabulated(table) => {
                let x = table.positions();
                x[x.len() - 1].abs().max(x[0].abs())
            }
            ClusterModel::PointParticle => 0.0,
        }
    }

    /// Initial partition of `[lo, hi]` (with `0 <= lo <= hi`) for a density
    /// integral whose weight oscillates with angular frequency `omega`.
    fn break_points(&self, lo: f64, hi: f64, omega: f64) -> Vec<f64> {
        let mut pts = vec![lo, hi];
        match self.model {
            ClusterModel::IsotropicExponential { kappa } => {
                pts.push(SINGULAR_SPLIT / kappa);
                pts.push(1.0 / kappa);
                pts.push(5.0 / kappa);
            }
            ClusterModel::Gaussian { width } => {
                pts.extend((1..=8).map(|j| j as f64 * width));
            }
            ClusterModel::Tabulated(table) => pts.extend_from_slice(table.positions()),
            ClusterModel::PointParticle => {}
        }
        if omega.abs() > 0.0 {
            let period = 2.0 * PI / omega.abs();
            let count = ((hi - lo) / period).ceil().min(4096.0) as usize;
            let step = (hi - lo) / count.max(1) as f64;
            pts.extend((1..count).map(|j| lo + j as f64 * step));
        }
        pts.retain(|p| *p >= lo && *p <= hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `integral_lo^hi rho(x) weight(x) dx` for `0 <= lo <= hi`; `omega` is the
    /// angular frequency of any oscillation in `weight`.
    pub(crate) fn integrate_weighted<W>(
        &self,
        weight: W,
        lo: f64,
        hi: f64,
        omega: f64,
        spec: &QuadratureSpec,
    ) -> Result<f64>
    where
        W: Fn(f64) -> f64,
    {
        debug_assert!(0.0 <= lo && lo <= hi);
        let hi = hi.min(self.support_radius());
        if hi <= lo {
            return Ok(0.0);
        }
        let pts = self.break_points(lo, hi, omega);
        let value = integrate_adaptive_points(|x| self.eval_unchecked(x) * weight(x), &pts, spec)?;
        Ok(value)
    }
}

fn gaussian_pdf(x: f64, width: f64) -> f64 {
    let z = x / width;
    (-0.5 * z * z).exp() / (width * (2.0 * PI).sqrt())
}

/// `rho(x2)` in nm^-1. The point particle has no pointwise density and the
/// exponential model diverges at the origin; both are domain errors.
pub fn marginal_density(model: &ClusterModel, x2: f64) -> Result<f64> {
    MarginalDensity::new(model)?.eval(x2)
}

/// `integral rho dx2` by quadrature (exactly 1 for the point particle).
pub fn normalization(model: &ClusterModel, spec: &QuadratureSpec) -> Result<f64> {
    central_mass(model, f64::INFINITY, spec)
}

/// Probability mass within `|x2| < eps`.
pub fn central_mass(model: &ClusterModel, eps: f64, spec: &QuadratureSpec) -> Result<f64> {
    if model.is_point() {
        return Ok(1.0);
    }
    let density = MarginalDensity::new(model)?;
    Ok(2.0 * density.integrate_weighted(|_| 1.0, 0.0, eps, 0.0, spec)?)
}

/// `<|x2|>` in nm, closed form where one exists.
pub fn mean_abs_x2(model: &ClusterModel) -> Result<f64> {
    model.validate()?;
    Ok(match model {
        ClusterModel::PointParticle => 0.0,
        ClusterModel::IsotropicExponential { kappa } => 1.0 / (4.0 * kappa),
        ClusterModel::Gaussian { width } => width * FRAC_2_PI.sqrt(),
        ClusterModel::Tabulated(table) => table.trapezoid(|x, r| x.abs() * r),
    })
}

/// `<|x2|>` by adaptive quadrature of `2 integral_0^inf x rho(x) dx`.
pub fn mean_abs_x2_quadrature(model: &ClusterModel, spec: &QuadratureSpec) -> Result<f64> {
    if model.is_point() {
        return Ok(0.0);
    }
    let density = MarginalDensity::new(model)?;
    Ok(2.0 * density.integrate_weighted(|x| x, 0.0, f64::INFINITY, 0.0, spec)?)
}

/// `F(K2) = integral exp(i K2 x2 / 2) rho(x2) dx2`, dimensionless.
///
/// Closed forms for the analytic models; trapezoid rule on the sample grid
/// for tabulated densities.
pub fn fourier_density(model: &ClusterModel, k2: f64) -> Result<Complex64> {
    model.validate()?;
    if k2 == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let value = match model {
        ClusterModel::PointParticle => Complex64::new(1.0, 0.0),
        ClusterModel::IsotropicExponential { kappa } => {
            let x = k2 / (4.0 * kappa);
            let ratio = if x.abs() < 1e-8 { 1.0 - x * x / 3.0 } else { x.atan() / x };
            Complex64::new(ratio, 0.0)
        }
        ClusterModel::Gaussian { width } => {
            let q = 0.5 * k2 * width;
            Complex64::new((-0.5 * q * q).exp(), 0.0)
        }
        ClusterModel::Tabulated(table) => {
            table.trapezoid(|x, r| Complex64::from_polar(r, 0.5 * k2 * x))
        }
    };
    Ok(value)
}

/// `F(K2)` by adaptive quadrature, `2 integral_0^inf cos(K2 x / 2) rho(x) dx`.
pub fn fourier_density_quadrature(
    model: &ClusterModel,
    k2: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if model.is_point() {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let density = MarginalDensity::new(model)?;
    let q = 0.5 * k2;
    let re = 2.0 * density.integrate_weighted(|x| (q * x).cos(), 0.0, f64::INFINITY, q, spec)?;
    Ok(Complex64::new(re, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TabulatedDensity;
    use crate::quadrature::integrate_fixed;
    use proptest::prelude::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    /// E1 by Simpson quadrature of `integral_0^1 exp(-x/t) / t dt`
    /// (substitution `u = x / t`), independent of the series/fraction code.
    fn exp1_oracle(x: f64) -> f64 {
        integrate_fixed(
            |t| if t == 0.0 { 0.0 } else { (-x / t).exp() / t },
            0.0,
            1.0,
            1 << 16,
        )
        .unwrap()
    }

    #[test]
    fn exp1_reference_values() {
        // tabulated values (Abramowitz & Stegun 5.1)
        assert!((exp1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-15);
        assert!((exp1(0.5) - 0.559_773_594_776_160_8).abs() < 1e-14);
        assert!((exp1(2.0) - 0.048_900_510_708_061_12).abs() < 1e-15);
        assert!((exp1(10.0) - 4.156_968_929_685_324e-6).abs() < 1e-18);
        assert!(exp1(0.0).is_infinite());
        assert!(exp1(-1.0).is_nan());
    }

    #[test]
    fn exp1_matches_quadrature_oracle() {
        for &x in &[0.01, 0.3, 0.999, 1.0, 1.001, 2.5, 7.0, 20.0] {
            let oracle = exp1_oracle(x);
            let rel = (exp1(x) - oracle).abs() / oracle;
            assert!(rel < 1e-9, "x = {x}: {} vs {oracle}", exp1(x));
        }
    }

    #[test]
    fn exponential_density_example() {
        let model = ClusterModel::exponential(0.1).unwrap();
        let v = marginal_density(&model, 5.0).unwrap();
        assert!((v - 0.021_938_393_439_552).abs() < 1e-12);
        assert_eq!(v, marginal_density(&model, -5.0).unwrap());
    }

    #[test]
    fn singular_and_symbolic_points_are_domain_errors() {
        let model = ClusterModel::helium_dimer();
        assert!(matches!(marginal_density(&model, 0.0), Err(Error::Domain(_))));
        assert!(matches!(
            marginal_density(&ClusterModel::PointParticle, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn densities_are_normalized() {
        let models = [
            ClusterModel::helium_dimer(),
            ClusterModel::helium_dimer_from_binding(),
            ClusterModel::exponential(2.0).unwrap(),
            ClusterModel::gaussian(0.37).unwrap(),
            ClusterModel::PointParticle,
        ];
        for model in &models {
            let norm = normalization(model, &spec()).unwrap();
            assert!((norm - 1.0).abs() < 1e-8, "{model}: {norm}");
        }
    }

    #[test]
    fn mean_abs_x2_paths_agree() {
        let dimer = ClusterModel::helium_dimer();
        assert!((mean_abs_x2(&dimer).unwrap() - 2.8).abs() < 1e-12);
        let bound = ClusterModel::exponential(0.10263).unwrap();
        assert!((mean_abs_x2(&bound).unwrap() - 2.436).abs() < 5e-4);
        assert_eq!(mean_abs_x2(&ClusterModel::PointParticle).unwrap(), 0.0);
        for model in [dimer, bound, ClusterModel::gaussian(1.3).unwrap()] {
            let closed = mean_abs_x2(&model).unwrap();
            let numeric = mean_abs_x2_quadrature(&model, &spec()).unwrap();
            assert!((closed - numeric).abs() <= 1e-7 * closed, "{model}");
        }
    }

    #[test]
    fn fourier_examples() {
        let dimer = ClusterModel::helium_dimer();
        assert_eq!(fourier_density(&dimer, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        // (4 kappa / K) atan(K / (4 kappa)) with 4 kappa = 1/2.8
        let f = fourier_density(&dimer, 0.4).unwrap();
        let expected = (1.0 / 2.8 / 0.4) * (0.4f64 * 2.8).atan();
        assert!((f.re - expected).abs() < 1e-15);
        assert!((f.re - 0.7518).abs() < 1e-4);
        assert_eq!(f.im, 0.0);
        assert_eq!(
            fourier_density(&ClusterModel::PointParticle, 3.3).unwrap(),
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn fourier_closed_form_matches_quadrature() {
        for model in [
            ClusterModel::helium_dimer(),
            ClusterModel::helium_dimer_from_binding(),
            ClusterModel::gaussian(2.0).unwrap(),
        ] {
            for i in 0..=40 {
                let k2 = 0.05 * i as f64;
                let closed = fourier_density(&model, k2).unwrap();
                let quad = fourier_density_quadrature(&model, k2, &spec()).unwrap();
                assert!((closed - quad).norm() <= 1e-7, "{model} at {k2}: {closed} vs {quad}");
            }
        }
    }

    #[test]
    fn log_singularity_is_integrable() {
        let dimer = ClusterModel::helium_dimer();
        let masses: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .iter()
            .map(|&eps| central_mass(&dimer, eps, &spec()).unwrap())
            .collect();
        assert!(masses[0] > masses[1] && masses[1] > masses[2] && masses[2] > 0.0);
        // closed form: u E1(u) + 1 - exp(-u) with u = 2 kappa eps
        let kappa = 1.0 / (4.0 * 2.8);
        for (&eps, mass) in [1e-1, 1e-2, 1e-3].iter().zip(&masses) {
            let u: f64 = 2.0 * kappa * eps;
            let exact = u * exp1(u) + 1.0 - (-u).exp();
            assert!((mass - exact).abs() < 1e-9 * exact, "eps {eps}: {mass} vs {exact}");
        }
    }

    fn triangle(half_width: f64, n: usize) -> TabulatedDensity {
        let x: Vec<f64> = (0..=2 * n)
            .map(|i| half_width * (i as f64 / n as f64 - 1.0))
            .collect();
        let rho = x
            .iter()
            .map(|v| (1.0 - v.abs() / half_width).max(0.0) / half_width)
            .collect();
        TabulatedDensity::new(x, rho).unwrap()
    }

    #[test]
    fn tabulated_density_moments_and_transform() {
        let model = ClusterModel::Tabulated(triangle(4.0, 200));
        assert!((mean_abs_x2(&model).unwrap() - 4.0 / 3.0).abs() < 1e-4);
        assert!((normalization(&model, &spec()).unwrap() - 1.0).abs() < 1e-9);
        // triangle of half width h: F = sinc^2(K h / 4)
        let k2 = 0.9;
        let z: f64 = k2 * 4.0 / 4.0;
        let exact = (z.sin() / z).powi(2);
        let f = fourier_density(&model, k2).unwrap();
        assert!((f.re - exact).abs() < 1e-4);
        assert!(f.im.abs() < 1e-12);
        let q = fourier_density_quadrature(&model, k2, &spec()).unwrap();
        assert!((q.re - exact).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn exponential_transform_is_even_decreasing_bounded(
            kappa in 0.01f64..1.0, k in 1e-4f64..5.0, dk in 1e-4f64..1.0
        ) {
            let model = ClusterModel::exponential(kappa).unwrap();
            let f = fourier_density(&model, k).unwrap();
            let g = fourier_density(&model, k + dk).unwrap();
            prop_assert_eq!(f, fourier_density(&model, -k).unwrap());
            prop_assert_eq!(f.im, 0.0);
            prop_assert!(f.re > 0.0 && f.re <= 1.0);
            prop_assert!(g.re < f.re);
        }

        #[test]
        fn exponential_density_is_even(kappa in 0.01f64..1.0, x in 1e-6f64..100.0) {
            let model = ClusterModel::exponential(kappa).unwrap();
            let plus = marginal_density(&model, x).unwrap();
            prop_assert_eq!(plus, marginal_density(&model, -x).unwrap());
            prop_assert!(plus >= 0.0);
        }
    }
}
