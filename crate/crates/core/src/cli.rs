//! Scenario configuration, presets for the reference figure setups, and
//! CSV/SVG emitters.
//!
//! Config files are flat `key = value` text grouped in `[sections]`:
//!
//! ```text
//! [scenario]
//! name = fig5
//! k2_min = -0.8
//! k2_max = 0.8
//! n_samples = 4001
//! sigma_k2 = 0
//! outputs = csv, svg, peaks
//! output_dir = out
//! log_scale = true
//!
//! [curve.dimer]
//! period_d = 50
//! slit_s = 25
//! num_bars = 10
//! model = exponential     # point | exponential | gaussian | tabulated
//! kappa = 0.0892857
//! ```
//!
//! Gaussian curves take `width`, tabulated ones `density_file`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{BeamParams, ClusterModel, GratingGeometry, TabulatedDensity};
use crate::pattern::{coherent_intensity, convolve_beam_spread, find_peaks, uniform_grid};
use crate::pattern::{DiffractionPattern, PeakRecord};
use crate::quadrature::QuadratureSpec;

pub const CSV_HEADER: &str = "k2_nm_inv,amp_re_nm,amp_im_nm,intensity";
pub const PEAKS_HEADER: &str = "curve,order,k2_nm_inv,height,fwhm_nm_inv,angle_rad";
pub const PRESETS: [&str; 4] = ["fig2", "fig3", "fig4", "fig5"];

/// Intensity floor of the logarithmic SVG axis.
const LOG_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutputKind {
    Csv,
    Svg,
    Peaks,
}

impl std::str::FromStr for OutputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Self::Csv),
            "svg" => Ok(Self::Svg),
            "peaks" => Ok(Self::Peaks),
            other => Err(Error::Config(format!(
                "unknown output {other:?} (expected csv, svg or peaks)"
            ))),
        }
    }
}

/// One curve of a scenario: a cluster model diffracted by a grating.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub label: String,
    pub geometry: GratingGeometry,
    pub model: ClusterModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario_name: String,
    pub curves: Vec<CurveSpec>,
    pub k2_min: f64,
    pub k2_max: f64,
    pub n_samples: usize,
    pub sigma_k2: f64,
    /// Optional de Broglie wavelength (nm) used to report peak angles.
    pub wavelength: Option<f64>,
    pub outputs: BTreeSet<OutputKind>,
    pub output_dir: PathBuf,
    pub log_scale: bool,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scenario_name.is_empty()
            || !self
                .scenario_name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(Error::Config(format!(
                "scenario name {:?} must be non-empty ASCII letters, digits, '-' or '_'",
                self.scenario_name
            )));
        }
        if self.curves.is_empty() {
            return Err(Error::Config("scenario defines no curves".into()));
        }
        let mut labels = BTreeSet::new();
        for curve in &self.curves {
            if !labels.insert(curve.label.as_str()) {
                return Err(Error::Config(format!("duplicate curve label {:?}", curve.label)));
            }
            curve.model.validate()?;
        }
        if !(self.k2_min.is_finite() && self.k2_max.is_finite() && self.k2_min < self.k2_max) {
            return Err(Error::Config(format!(
                "need finite k2_min < k2_max (got {} and {})",
                self.k2_min, self.k2_max
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::Config("n_samples must be at least 2".into()));
        }
        if !(self.sigma_k2.is_finite() && self.sigma_k2 >= 0.0) {
            return Err(Error::Config("sigma_k2 must be non-negative".into()));
        }
        if let Some(w) = self.wavelength {
            BeamParams::new(w, self.sigma_k2)?;
        }
        Ok(())
    }

    /// Built-in scenario reproducing one of the reference figure setups.
    /// `num_bars` overrides the bar count of the grating presets.
    pub fn preset(name: &str, num_bars: Option<usize>) -> Result<Self> {
        let dimer = ClusterModel::helium_dimer();
        let point = ClusterModel::PointParticle;
        let curve = |label: &str, geometry: GratingGeometry, model: &ClusterModel| CurveSpec {
            label: label.to_string(),
            geometry,
            model: model.clone(),
        };
        let bars = num_bars.unwrap_or(10);
        let (curves, k2_min, k2_max, log_scale) = match name {
            "fig2" => {
                let bar = GratingGeometry::single_bar(25.0)?;
                (vec![curve("dimer", bar, &dimer), curve("point", bar, &point)], 0.0, 1.0, true)
            }
            "fig3" => {
                let bar = GratingGeometry::single_bar(25.0)?;
                let wide = GratingGeometry::single_bar(25.0 + 2.8)?;
                (vec![curve("dimer", bar, &dimer), curve("point", wide, &point)], 0.0, 0.5, true)
            }
            "fig4" => {
                let g = GratingGeometry::symmetric(100.0, bars)?;
                (vec![curve("dimer", g, &dimer), curve("point", g, &point)], -0.4, 0.4, false)
            }
            "fig5" => {
                let g = GratingGeometry::symmetric(50.0, bars)?;
                (vec![curve("dimer", g, &dimer), curve("point", g, &point)], -0.8, 0.8, false)
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown preset {other:?} (available: {})",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(Self {
            scenario_name: name.to_string(),
            curves,
            k2_min,
            k2_max,
            n_samples: 4001,
            sigma_k2: 0.0,
            wavelength: None,
            outputs: [OutputKind::Csv, OutputKind::Svg, OutputKind::Peaks].into(),
            output_dir: PathBuf::from("out"),
            log_scale,
        })
    }

    /// Parses the sectioned `key = value` format. Relative `density_file`
    /// paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        struct RawCurve {
            label: String,
            line: usize,
            keys: Vec<(String, String, usize)>,
        }

        let mut scenario: Vec<(String, String, usize)> = Vec::new();
        let mut curves: Vec<RawCurve> = Vec::new();
        let mut in_scenario = false;

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(section) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let section = section.trim();
                if section == "scenario" {
                    in_scenario = true;
                } else if let Some(label) = section.strip_prefix("curve.") {
                    in_scenario = false;
                    curves.push(RawCurve {
                        label: label.trim().to_string(),
                        line: lineno,
                        keys: Vec::new(),
                    });
                } else {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("unknown section [{section}]"),
                    });
                }
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: lineno,
                message: "expected key = value".into(),
            })?;
            let entry = (key.trim().to_string(), value.trim().to_string(), lineno);
            if in_scenario {
                scenario.push(entry);
            } else if let Some(curve) = curves.last_mut() {
                curve.keys.push(entry);
            } else {
                return Err(Error::Parse {
                    line: lineno,
                    message: "key outside of any section".into(),
                });
            }
        }

        fn num<T: std::str::FromStr>(value: &str, key: &str, line: usize) -> Result<T>
        where
            T::Err: std::fmt::Display,
        {
            value.parse::<T>().map_err(|e| Error::Parse {
                line,
                message: format!("{key}: {e}"),
            })
        }

        let mut config = Self {
            scenario_name: String::new(),
            curves: Vec::new(),
            k2_min: f64::NAN,
            k2_max: f64::NAN,
            n_samples: 4001,
            sigma_k2: 0.0,
            wavelength: None,
            outputs: [OutputKind::Csv].into(),
            output_dir: PathBuf::from("out"),
            log_scale: false,
        };
        for (key, value, line) in &scenario {
            match key.as_str() {
                "name" | "scenario_name" => config.scenario_name = value.clone(),
                "k2_min" => config.k2_min = num(value, key, *line)?,
                "k2_max" => config.k2_max = num(value, key, *line)?,
                "n_samples" => config.n_samples = num(value, key, *line)?,
                "sigma_k2" => config.sigma_k2 = num(value, key, *line)?,
                "wavelength" => config.wavelength = Some(num(value, key, *line)?),
                "outputs" => {
                    config.outputs = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?
                }
                "output_dir" => config.output_dir = PathBuf::from(value),
                "log_scale" => config.log_scale = num(value, key, *line)?,
                _ => {
                    return Err(Error::Parse {
                        line: *line,
                        message: format!("unknown scenario key {key:?}"),
                    })
                }
            }
        }

        for raw in curves {
            let get = |name: &str| raw.keys.iter().find(|(k, _, _)| k == name);
            let require = |name: &str| {
                get(name).ok_or_else(|| Error::Parse {
                    line: raw.line,
                    message: format!("curve {:?} is missing {name}", raw.label),
                })
            };
            for (k, _, line) in &raw.keys {
                let known = [
                    "period_d", "slit_s", "num_bars", "model", "kappa", "width", "density_file",
                ];
                if !known.contains(&k.as_str()) {
                    return Err(Error::Parse {
                        line: *line,
                        message: format!("unknown curve key {k:?}"),
                    });
                }
            }
            let (_, d, dl) = require("period_d")?;
            let (_, s, sl) = require("slit_s")?;
            let num_bars = match get("num_bars") {
                Some((_, v, l)) => num(v, "num_bars", *l)?,
                None => 1,
            };
            let geometry =
                GratingGeometry::new(num(d, "period_d", *dl)?, num(s, "slit_s", *sl)?, num_bars)?;
            let (_, model_name, _) = require("model")?;
            let model = match model_name.as_str() {
                "point" => ClusterModel::PointParticle,
                "exponential" => match get("kappa") {
                    Some((_, v, l)) => ClusterModel::exponential(num(v, "kappa", *l)?)?,
                    None => ClusterModel::helium_dimer(),
                },
                "gaussian" => {
                    let (_, v, l) = require("width")?;
                    ClusterModel::gaussian(num(v, "width", *l)?)?
                }
                "tabulated" => {
                    let (_, v, _) = require("density_file")?;
                    let path = base_dir.join(v);
                    ClusterModel::Tabulated(TabulatedDensity::from_path(path)?)
                }
                other => {
                    return Err(Error::Config(format!(
                        "curve {:?}: unknown model {other:?}",
                        raw.label
                    )))
                }
            };
            config.curves.push(CurveSpec {
                label: raw.label,
                geometry,
                model,
            });
        }

        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }
}

#[derive(Debug, Clone)]
pub struct CurveReport {
    pub label: String,
    pub pattern: DiffractionPattern,
    /// Present when the grid resolves the grating function.
    pub peaks: Option<Vec<PeakRecord>>,
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub scenario_name: String,
    pub curves: Vec<CurveReport>,
    pub files: Vec<PathBuf>,
}

impl ScenarioReport {
    /// Peak table in the peaks CSV format.
    pub fn peak_table(&self, wavelength: Option<f64>) -> String {
        let mut out = String::from(PEAKS_HEADER);
        out.push('\n');
        for curve in &self.curves {
            for peak in curve.peaks.iter().flatten() {
                let fwhm = peak.fwhm.map(fmt_num).unwrap_or_default();
                let angle = wavelength
                    .and_then(|w| BeamParams::new(w, 0.0).ok())
                    .and_then(|beam| beam.angle_of(peak.k2_location))
                    .map(fmt_num)
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    curve.label,
                    peak.order,
                    fmt_num(peak.k2_location),
                    fmt_num(peak.height),
                    fwhm,
                    angle
                );
            }
        }
        out
    }
}

/// Evaluates every curve of the scenario and writes the requested artifacts.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioReport> {
    run_scenario_with(config, &QuadratureSpec::default())
}

pub fn run_scenario_with(config: &ScenarioConfig, spec: &QuadratureSpec) -> Result<ScenarioReport> {
    config.validate()?;
    let grid = uniform_grid(config.k2_min, config.k2_max, config.n_samples)?;

    let mut curves = Vec::with_capacity(config.curves.len());
    for curve in &config.curves {
        let raw = coherent_intensity(&curve.model, &curve.geometry, &grid, spec)?;
        let pattern = convolve_beam_spread(&raw, config.sigma_k2)?;
        let peaks = match find_peaks(&pattern) {
            Ok(peaks) => Some(peaks),
            Err(Error::Resolution { step, required }) => {
                if config.outputs.contains(&OutputKind::Peaks) {
                    log::warn!(
                        "curve {}: grid step {step} does not resolve the grating (< {required}); \
                         skipping peaks",
                        curve.label
                    );
                }
                None
            }
            Err(e) => return Err(e),
        };
        curves.push(CurveReport {
            label: curve.label.clone(),
            pattern,
            peaks,
        });
    }

    let mut report = ScenarioReport {
        scenario_name: config.scenario_name.clone(),
        curves,
        files: Vec::new(),
    };
    if config.outputs.is_empty() {
        return Ok(report);
    }

    fs::create_dir_all(&config.output_dir).map_err(|source| Error::Io {
        path: config.output_dir.display().to_string(),
        source,
    })?;
    let stem = config.output_dir.join(&config.scenario_name);
    if config.outputs.contains(&OutputKind::Csv) {
        for curve in &report.curves {
            let path = PathBuf::from(format!("{}_{}.csv", stem.display(), curve.label));
            write_csv(&curve.pattern, &path)?;
            report.files.push(path);
        }
    }
    if config.outputs.contains(&OutputKind::Svg) {
        let path = stem.with_extension("svg");
        let labelled: Vec<(String, DiffractionPattern)> = report
            .curves
            .iter()
            .map(|c| (c.label.clone(), c.pattern.clone()))
            .collect();
        write_svg(&labelled, &path, config.log_scale)?;
        report.files.push(path);
    }
    if config.outputs.contains(&OutputKind::Peaks) {
        let path = PathBuf::from(format!("{}_peaks.csv", stem.display()));
        write_text(&path, &report.peak_table(config.wavelength))?;
        report.files.push(path);
    }
    Ok(report)
}

fn fmt_num(v: f64) -> String {
    format!("{v:.11e}")
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes `k2, Re A, Im A, intensity` rows with 12 significant digits.
pub fn write_csv(pattern: &DiffractionPattern, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(64 * (pattern.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for ((k, a), i) in pattern.k2_grid.iter().zip(&pattern.amplitude).zip(&pattern.intensity) {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_num(*k),
            fmt_num(a.re()),
            fmt_num(a.im()),
            fmt_num(*i)
        );
    }
    write_text(path, &out)
}

/// One parsed row of a pattern CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub k2: f64,
    pub amp_re: f64,
    pub amp_im: f64,
    pub intensity: f64,
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header {CSV_HEADER:?}"),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(idx, line)| {
            let values = line
                .split(',')
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|e| Error::Parse {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            match values[..] {
                [k2, amp_re, amp_im, intensity] => Ok(CsvRow {
                    k2,
                    amp_re,
                    amp_im,
                    intensity,
                }),
                _ => Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected 4 columns, found {}", values.len()),
                }),
            }
        })
        .collect()
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Static SVG 1.1 plot of intensity versus `K2`, one polyline per pattern.
/// Axis ticks mark the diffraction directions `2 pi n / d` of the first
/// pattern's grating.
pub fn write_svg(patterns: &[(String, DiffractionPattern)], path: &Path, log_scale: bool) -> Result<()> {
    let svg = render_svg(patterns, log_scale)?;
    write_text(path, &svg)
}

pub fn render_svg(patterns: &[(String, DiffractionPattern)], log_scale: bool) -> Result<String> {
    let first = &patterns
        .first()
        .ok_or_else(|| Error::Domain("nothing to plot".into()))?
        .1;
    if first.is_empty() {
        return Err(Error::Domain("cannot plot an empty pattern".into()));
    }
    let k_min = first.k2_grid[0];
    let k_max = first.k2_grid[first.len() - 1];
    for (label, p) in patterns {
        if p.is_empty() || p.k2_grid[0] != k_min || p.k2_grid[p.len() - 1] != k_max {
            return Err(Error::Domain(format!(
                "pattern {label:?} does not share the K2 range [{k_min}, {k_max}]"
            )));
        }
    }
    let k_span = if k_max > k_min { k_max - k_min } else { 1.0 };

    let transform = |v: f64| -> f64 {
        if log_scale {
            v.max(LOG_FLOOR).log10()
        } else {
            v
        }
    };
    let (y_lo, y_hi) = if log_scale {
        let top = patterns
            .iter()
            .flat_map(|(_, p)| p.intensity.iter())
            .cloned()
            .fold(LOG_FLOOR, f64::max);
        (LOG_FLOOR.log10(), top.log10().ceil().max(LOG_FLOOR.log10() + 1.0))
    } else {
        let top = patterns
            .iter()
            .flat_map(|(_, p)| p.intensity.iter())
            .cloned()
            .fold(0.0, f64::max);
        (0.0, if top > 0.0 { top * 1.05 } else { 1.0 })
    };

    let (width, height) = (800.0, 500.0);
    let (left, right, top, bottom) = (70.0, 20.0, 20.0, 50.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;
    let x_of = |k: f64| left + (k - k_min) / k_span * plot_w;
    let y_of = |v: f64| top + (y_hi - transform(v)) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    let period = first.geometry.period();
    let n_lo = (k_min * period / (2.0 * PI)).ceil() as i64;
    let n_hi = (k_max * period / (2.0 * PI)).floor() as i64;
    if n_hi - n_lo <= 60 {
        for n in n_lo..=n_hi {
            let x = x_of(2.0 * PI * n as f64 / period);
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
                top + plot_h,
                top + plot_h + 6.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{n}</text>"#,
                top + plot_h + 18.0
            );
        }
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">K2 (nm^-1), ticks at 2 pi n / d, d = {period} nm; range [{k_min}, {k_max}]</text>"#,
        left + 0.5 * plot_w,
        height - 10.0
    );
    let y_label = if log_scale { "log10 intensity" } else { "intensity" };
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 15 {:.2})">{y_label}</text>"#,
        top + 0.5 * plot_h,
        top + 0.5 * plot_h
    );
    for (value, label) in [(y_lo, format!("{y_lo:.3}")), (y_hi, format!("{y_hi:.3}"))] {
        let y = top + (y_hi - value) / (y_hi - y_lo) * plot_h;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{label}</text>"#,
            left - 6.0,
            y + 4.0
        );
    }

    for (idx, (label, p)) in patterns.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let label = xml_escape(label);
        let mut points = String::with_capacity(16 * p.len());
        for (k, v) in p.k2_grid.iter().zip(&p.intensity) {
            let _ = write!(points, "{:.2},{:.2} ", x_of(*k), y_of(*v));
        }
        let _ = writeln!(
            svg,
            r#"<polyline id="curve-{idx}" fill="none" stroke="{color}" stroke-width="1" points="{}"><title>{label}</title></polyline>"#,
            points.trim_end()
        );
        let ly = top + 16.0 + 16.0 * idx as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{ly:.2}" font-size="12" fill="{color}" text-anchor="end">{label}</text>"#,
            left + plot_w - 8.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::coherent_intensity;

    fn small_pattern() -> DiffractionPattern {
        let g = GratingGeometry::symmetric(50.0, 3).unwrap();
        coherent_intensity(
            &ClusterModel::helium_dimer(),
            &g,
            &[0.0, 0.05, 0.1],
            &QuadratureSpec::default(),
        )
        .unwrap()
    }

    #[test]
    fn csv_has_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let p = small_pattern();
        write_csv(&p, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(text.chars().all(|c| c != ';'));

        let rows = read_csv(&path).unwrap();
        for (row, (k, i)) in rows.iter().zip(p.k2_grid.iter().zip(&p.intensity)) {
            assert!((row.k2 - k).abs() <= 1e-10 * k.abs().max(1e-300));
            assert!((row.intensity - i).abs() <= 1e-10 * i.abs());
        }
    }

    #[test]
    fn csv_write_to_missing_directory_fails() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("no/such/dir/p.csv");
        assert!(matches!(write_csv(&small_pattern(), &path), Err(Error::Io { .. })));
    }

    #[test]
    fn log_svg_clips_zero_intensity() {
        let mut p = small_pattern();
        p.intensity[1] = 0.0;
        let svg = render_svg(&[("zero".into(), p)], true).unwrap();
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }

    #[test]
    fn svg_requires_common_range() {
        let p = small_pattern();
        let mut q = p.clone();
        q.k2_grid[2] = 0.2;
        assert!(render_svg(&[("a".into(), p.clone()), ("b".into(), q)], false).is_err());
        assert!(render_svg(&[], false).is_err());
    }

    #[test]
    fn presets_exist() {
        for name in PRESETS {
            let c = ScenarioConfig::preset(name, None).unwrap();
            c.validate().unwrap();
            assert_eq!(c.curves.len(), 2);
        }
        assert!(ScenarioConfig::preset("fig9", None).is_err());
        let c = ScenarioConfig::preset("fig5", Some(20)).unwrap();
        assert_eq!(c.curves[0].geometry.num_bars(), 20);
    }

    #[test]
    fn config_parses() {
        let text = "\
[scenario]
name = demo
k2_min = -0.2   # lower
k2_max = 0.2
n_samples = 101
sigma_k2 = 0.001
wavelength = 0.1
outputs = csv, peaks
output_dir = results
log_scale = true

[curve.dimer]
period_d = 50
slit_s = 25
num_bars = 4
model = exponential
kappa = 0.1

[curve.narrow]
period_d = 50
slit_s = 25
model = gaussian
width = 0.5
";
        let c = ScenarioConfig::parse(text, Path::new(".")).unwrap();
        assert_eq!(c.scenario_name, "demo");
        assert_eq!(c.n_samples, 101);
        assert_eq!(c.wavelength, Some(0.1));
        assert_eq!(c.outputs, [OutputKind::Csv, OutputKind::Peaks].into());
        assert_eq!(c.curves[0].model, ClusterModel::IsotropicExponential { kappa: 0.1 });
        assert_eq!(c.curves[0].geometry.num_bars(), 4);
        assert_eq!(c.curves[1].geometry.num_bars(), 1);
        assert!(c.log_scale);
    }

    #[test]
    fn config_errors_are_reported() {
        let base = "[scenario]\nname = x\nk2_min = 0\nk2_max = 1\n[curve.a]\nperiod_d = 50\nslit_s = 25\nmodel = point\n";
        assert!(ScenarioConfig::parse(base, Path::new(".")).is_ok());
        let cases = [
            base.replace("k2_max = 1", "k2_max = -1"),
            base.replace("model = point", "model = blob"),
            base.replace("slit_s = 25", "slit_s = 55"),
            base.replace("name = x", "name = x\nbogus = 1"),
            base.replace("[curve.a]", "[curves]"),
            base.replace("k2_min = 0", "k2_min = zero"),
            base.replace("name = x", "name = ../x"),
            format!("{base}[curve.a]\nperiod_d = 50\nslit_s = 25\nmodel = point\n"),
            "[scenario]\nname = x\nk2_min = 0\nk2_max = 1\n".to_string(),
        ];
        for text in &cases {
            assert!(ScenarioConfig::parse(text, Path::new(".")).is_err(), "{text}");
        }
    }

    #[test]
    fn tabulated_curve_reads_density_file() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("rho.txt"), "# x rho\n-2 0\n0 0.5\n2 0\n").unwrap();
        let text = "[scenario]\nname = t\nk2_min = 0\nk2_max = 1\n\
                    [curve.tab]\nperiod_d = 50\nslit_s = 25\nmodel = tabulated\ndensity_file = rho.txt\n";
        let c = ScenarioConfig::parse(text, dir.path()).unwrap();
        assert!(matches!(c.curves[0].model, ClusterModel::Tabulated(_)));
    }
}
