//! Domain types and unit conversions shared by the rest of the crate.
//!
//! Units are fixed throughout: lengths in nm, lateral wavenumbers
//! `K2 = P2 / hbar` in nm^-1, energies in micro-eV and masses in u.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reduced Planck constant, J s.
pub const HBAR_J_S: f64 = 1.054_571_817e-34;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT_KG: f64 = 1.660_539_066_60e-27;
/// Elementary charge, J per eV.
pub const ELECTRON_VOLT_J: f64 = 1.602_176_634e-19;
/// Mass of a helium-4 atom, u.
pub const HELIUM4_MASS_U: f64 = 4.002_602;
/// Magnitude of the helium dimer binding energy, micro-eV.
pub const HELIUM_DIMER_BINDING_UEV: f64 = 0.11;
/// Mean lateral separation `<|x2|>` of the default dimer model, nm.
pub const HELIUM_DIMER_MEAN_ABS_X2_NM: f64 = 2.8;

/// Periodic transmission grating of `num_bars` bars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingGeometry {
    period_d: f64,
    slit_s: f64,
    num_bars: usize,
}

impl GratingGeometry {
    pub fn new(period_d: f64, slit_s: f64, num_bars: usize) -> Result<Self> {
        if !(period_d.is_finite() && slit_s.is_finite()) {
            return Err(Error::Domain(format!(
                "grating lengths must be finite (d = {period_d}, s = {slit_s})"
            )));
        }
        if !(slit_s > 0.0 && slit_s < period_d) {
            return Err(Error::Domain(format!(
                "slit width must satisfy 0 < s < d (d = {period_d}, s = {slit_s})"
            )));
        }
        if num_bars == 0 {
            return Err(Error::Domain("a grating needs at least one bar".into()));
        }
        Ok(Self {
            period_d,
            slit_s,
            num_bars,
        })
    }

    /// Symmetric grating: slit and bar both half a period wide.
    pub fn symmetric(period_d: f64, num_bars: usize) -> Result<Self> {
        Self::new(period_d, 0.5 * period_d, num_bars)
    }

    /// A lone bar of width `bar_a`, embedded in a nominal symmetric period.
    pub fn single_bar(bar_a: f64) -> Result<Self> {
        Self::new(2.0 * bar_a, bar_a, 1)
    }

    pub fn period(&self) -> f64 {
        self.period_d
    }

    pub fn slit(&self) -> f64 {
        self.slit_s
    }

    pub fn num_bars(&self) -> usize {
        self.num_bars
    }

    /// Bar width `a = d - s`.
    pub fn bar_width(&self) -> f64 {
        self.period_d - self.slit_s
    }

    /// Principal diffraction direction of order `n`, `2 pi n / d`.
    pub fn order_k2(&self, order: i64) -> f64 {
        2.0 * PI * order as f64 / self.period_d
    }

    pub fn with_num_bars(self, num_bars: usize) -> Result<Self> {
        Self::new(self.period_d, self.slit_s, num_bars)
    }
}

/// Marginal density given on a symmetric sample grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    x2: Vec<f64>,
    rho: Vec<f64>,
}

impl TabulatedDensity {
    const NORM_TOL: f64 = 1e-6;
    const SYMMETRY_TOL: f64 = 1e-9;

    pub fn new(x2: Vec<f64>, rho: Vec<f64>) -> Result<Self> {
        if x2.len() != rho.len() {
            return Err(Error::Domain(format!(
                "tabulated density has {} positions but {} values",
                x2.len(),
                rho.len()
            )));
        }
        if x2.len() < 3 {
            return Err(Error::Domain(
                "tabulated density needs at least three samples".into(),
            ));
        }
        if x2.iter().chain(&rho).any(|v| !v.is_finite()) {
            return Err(Error::Domain("tabulated density contains non-finite values".into()));
        }
        if x2.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(
                "tabulated positions must be strictly increasing".into(),
            ));
        }
        if let Some(v) = rho.iter().find(|v| **v < 0.0) {
            return Err(Error::Domain(format!("tabulated density is negative ({v})")));
        }
        let n = x2.len();
        let x_scale = x2[n - 1].abs().max(x2[0].abs());
        let rho_scale = rho.iter().cloned().fold(0.0, f64::max);
        for i in 0..n / 2 {
            let j = n - 1 - i;
            if (x2[i] + x2[j]).abs() > Self::SYMMETRY_TOL * x_scale
                || (rho[i] - rho[j]).abs() > Self::SYMMETRY_TOL * rho_scale
            {
                return Err(Error::Domain(format!(
                    "tabulated density is not symmetric under x2 -> -x2 (samples {i} and {j})"
                )));
            }
        }
        let table = Self { x2, rho };
        let norm = table.trapezoid(|_, r| r);
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::Domain(format!(
                "tabulated density integrates to {norm}, expected 1"
            )));
        }
        Ok(table)
    }

    /// Parses whitespace-separated `x2_nm rho_per_nm` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut x2 = Vec::new();
        let mut rho = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected two columns, found {}", fields.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    message: format!("invalid number {s:?}: {e}"),
                })
            };
            x2.push(parse(fields[0])?);
            rho.push(parse(fields[1])?);
        }
        Self::new(x2, rho)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn positions(&self) -> &[f64] {
        &self.x2
    }

    pub fn values(&self) -> &[f64] {
        &self.rho
    }

    /// Linear interpolation inside the sample range, zero outside.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.x2.len();
        if x < self.x2[0] || x > self.x2[n - 1] {
            return 0.0;
        }
        let hi = self.x2.partition_point(|&p| p < x).clamp(1, n - 1);
        let lo = hi - 1;
        let t = (x - self.x2[lo]) / (self.x2[hi] - self.x2[lo]);
        self.rho[lo] + t * (self.rho[hi] - self.rho[lo])
    }

    /// Trapezoid rule of `g(x2, rho)` on the sample grid.
    pub(crate) fn trapezoid<T, G>(&self, g: G) -> T
    where
        T: Copy + Default + std::ops::Add<Output = T> + Mul<f64, Output = T>,
        G: Fn(f64, f64) -> T,
    {
        let mut acc = T::default();
        for i in 1..self.x2.len() {
            let h = self.x2[i] - self.x2[i - 1];
            let left = g(self.x2[i - 1], self.rho[i - 1]);
            let right = g(self.x2[i], self.rho[i]);
            acc = acc + (left + right) * (0.5 * h);
        }
        acc
    }
}

/// Bound-state density model of the two-particle cluster, expressed through
/// its marginal density along the grating's periodic direction.
#[derive(Debug, Clone, PartialEq)]
pub enum ClusterModel {
    /// Structureless particle; the density is a delta at the origin.
    PointParticle,
    /// `|phi|^2 = (kappa / 2 pi) exp(-2 kappa r) / r^2`, the zero-range
    /// asymptotic form of a weakly bound s-wave state.
    IsotropicExponential { kappa: f64 },
    /// Normalized Gaussian marginal with standard deviation `width`.
    /// Used to contract a smooth density toward the point limit.
    Gaussian { width: f64 },
    Tabulated(TabulatedDensity),
}

impl ClusterModel {
    pub fn exponential(kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        Ok(Self::IsotropicExponential { kappa })
    }

    pub fn gaussian(width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::Domain(format!(
                "Gaussian width must be positive, got {width}"
            )));
        }
        Ok(Self::Gaussian { width })
    }

    /// Default dimer: exponential model with `<|x2|> = 2.8 nm`.
    pub fn helium_dimer() -> Self {
        Self::IsotropicExponential {
            kappa: 1.0 / (4.0 * HELIUM_DIMER_MEAN_ABS_X2_NM),
        }
    }

    /// Exponential model whose decay constant follows from the dimer
    /// binding energy.
    pub fn helium_dimer_from_binding() -> Self {
        let kappa = kappa_from_binding_energy(HELIUM_DIMER_BINDING_UEV, HELIUM4_MASS_U)
            .expect("binding-energy constants are positive");
        Self::IsotropicExponential { kappa }
    }

    pub fn is_point(&self) -> bool {
        matches!(self, Self::PointParticle)
    }

    /// Re-validates invariants; useful for models built by pattern matching.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::PointParticle | Self::Tabulated(_) => Ok(()),
            Self::IsotropicExponential { kappa } => Self::exponential(*kappa).map(|_| ()),
            Self::Gaussian { width } => Self::gaussian(*width).map(|_| ()),
        }
    }
}

impl fmt::Display for ClusterModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PointParticle => write!(f, "point particle"),
            Self::IsotropicExponential { kappa } => write!(f, "exponential (kappa = {kappa} nm^-1)"),
            Self::Gaussian { width } => write!(f, "Gaussian (width = {width} nm)"),
            Self::Tabulated(t) => write!(f, "tabulated ({} samples)", t.positions().len()),
        }
    }
}

/// Incident beam: de Broglie wavelength plus Gaussian spread of the lateral
/// wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamParams {
    wavelength: f64,
    sigma_k2: f64,
}

impl BeamParams {
    pub fn new(wavelength: f64, sigma_k2: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::Domain(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        if !(sigma_k2.is_finite() && sigma_k2 >= 0.0) {
            return Err(Error::Domain(format!(
                "momentum spread must be non-negative, got {sigma_k2}"
            )));
        }
        Ok(Self {
            wavelength,
            sigma_k2,
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn sigma_k2(&self) -> f64 {
        self.sigma_k2
    }

    /// Diffraction angle of a lateral wavenumber, `None` beyond grazing.
    pub fn angle_of(&self, k2: f64) -> Option<f64> {
        let s = k2 * self.wavelength / (2.0 * PI);
        (s.abs() <= 1.0).then(|| s.asin())
    }
}

/// Complex single-bar (or coherent grating) amplitude with the overall
/// prefactor `-2 i P / ((2 pi)^2 M hbar)` divided out. Units nm.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReducedAmplitude(pub Complex64);

impl ReducedAmplitude {
    pub fn real(value: f64) -> Self {
        Self(Complex64::new(value, 0.0))
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }
}

impl Mul<f64> for ReducedAmplitude {
    type Output = Self;

    fn mul(self, rhs: f64) -> Self {
        Self(self.0 * rhs)
    }
}

/// Asymptotic decay constant `kappa = sqrt(m |E|) / hbar` (reduced mass
/// `m / 2` of an equal-mass pair), in nm^-1.
pub fn kappa_from_binding_energy(binding_energy_abs_uev: f64, atom_mass_u: f64) -> Result<f64> {
    if !(binding_energy_abs_uev.is_finite() && binding_energy_abs_uev > 0.0) {
        return Err(Error::Domain(format!(
            "binding energy magnitude must be positive, got {binding_energy_abs_uev} ueV"
        )));
    }
    if !(atom_mass_u.is_finite() && atom_mass_u > 0.0) {
        return Err(Error::Domain(format!(
            "atom mass must be positive, got {atom_mass_u} u"
        )));
    }
    let mass_kg = atom_mass_u * ATOMIC_MASS_UNIT_KG;
    let energy_j = binding_energy_abs_uev * 1e-6 * ELECTRON_VOLT_J;
    let kappa_per_m = (mass_kg * energy_j).sqrt() / HBAR_J_S;
    Ok(kappa_per_m * 1e-9)
}

/// Lateral wavenumber `(2 pi / lambda) sin(phi)` in nm^-1.
pub fn angle_to_k2(wavelength: f64, angle_phi: f64) -> Result<f64> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::Domain(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    Ok(2.0 * PI / wavelength * angle_phi.sin())
}
