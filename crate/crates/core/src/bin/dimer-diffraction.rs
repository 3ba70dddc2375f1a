use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dimer_diffraction::cli::{self, OutputKind, ScenarioConfig, PRESETS};
use dimer_diffraction::{
    fit_effective_width, mean_abs_x2, mol_bar_amplitude, ClusterModel, QuadratureSpec,
    TabulatedDensity,
};

#[derive(Parser)]
#[command(name = "dimer-diffraction", version, about = "Helium dimer grating diffraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a preset or config file and write the requested outputs.
    Run(ScenarioArgs),
    /// Print the peak table of a preset or config file.
    Peaks(ScenarioArgs),
    /// Fit the effective point-particle bar width to small-K2 amplitudes.
    FitWidth(FitArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Preset name (fig2, fig3, fig4, fig5) or path to a config file.
    scenario: String,
    #[arg(long)]
    k2_min: Option<f64>,
    #[arg(long)]
    k2_max: Option<f64>,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    sigma_k2: Option<f64>,
    /// Bar count for grating presets.
    #[arg(long)]
    num_bars: Option<usize>,
    /// De Broglie wavelength in nm; adds diffraction angles to the peak table.
    #[arg(long)]
    wavelength: Option<f64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Comma-separated subset of csv, svg, peaks.
    #[arg(long)]
    outputs: Option<String>,
    #[arg(long)]
    log_scale: Option<bool>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Point,
    Exponential,
    Gaussian,
    Tabulated,
}

#[derive(Args)]
struct FitArgs {
    /// Two-column `k2 |A|` sample file; when absent, samples are generated
    /// from the chosen model.
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exponential")]
    model: ModelKind,
    /// Exponential decay constant in nm^-1 (default: <|x2|> = 2.8 nm).
    #[arg(long)]
    kappa: Option<f64>,
    /// Gaussian width in nm.
    #[arg(long)]
    width: Option<f64>,
    /// Tabulated density file.
    #[arg(long)]
    density_file: Option<PathBuf>,
    #[arg(long, default_value_t = 25.0)]
    bar_width: f64,
    #[arg(long, default_value_t = 0.01)]
    k2_min: f64,
    #[arg(long, default_value_t = 0.1)]
    k2_max: f64,
    #[arg(long, default_value_t = 19)]
    n_samples: usize,
}

fn load_scenario(args: &ScenarioArgs) -> Result<ScenarioConfig> {
    let mut config = if PRESETS.contains(&args.scenario.as_str()) {
        ScenarioConfig::preset(&args.scenario, args.num_bars)?
    } else {
        let path = Path::new(&args.scenario);
        if !path.exists() {
            bail!(
                "{:?} is neither a preset ({}) nor an existing config file",
                args.scenario,
                PRESETS.join(", ")
            );
        }
        let mut config = ScenarioConfig::from_path(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        if let Some(n) = args.num_bars {
            for curve in &mut config.curves {
                curve.geometry = curve.geometry.with_num_bars(n)?;
            }
        }
        config
    };
    if let Some(v) = args.k2_min {
        config.k2_min = v;
    }
    if let Some(v) = args.k2_max {
        config.k2_max = v;
    }
    if let Some(v) = args.n_samples {
        config.n_samples = v;
    }
    if let Some(v) = args.sigma_k2 {
        config.sigma_k2 = v;
    }
    if args.wavelength.is_some() {
        config.wavelength = args.wavelength;
    }
    if let Some(dir) = &args.output_dir {
        config.output_dir = dir.clone();
    }
    if let Some(list) = &args.outputs {
        config.outputs = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse::<OutputKind>)
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = args.log_scale {
        config.log_scale = v;
    }
    config.validate()?;
    Ok(config)
}

fn fit_model(args: &FitArgs) -> Result<ClusterModel> {
    Ok(match args.model {
        ModelKind::Point => ClusterModel::PointParticle,
        ModelKind::Exponential => match args.kappa {
            Some(k) => ClusterModel::exponential(k)?,
            None => ClusterModel::helium_dimer(),
        },
        ModelKind::Gaussian => {
            ClusterModel::gaussian(args.width.context("--width is required for a Gaussian model")?)?
        }
        ModelKind::Tabulated => {
            let path = args
                .density_file
                .as_ref()
                .context("--density-file is required for a tabulated model")?;
            ClusterModel::Tabulated(TabulatedDensity::from_path(path)?)
        }
    })
}

fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut samples = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if fields.len() != 2 {
            bail!("{}:{}: expected two columns", path.display(), i + 1);
        }
        let k: f64 = fields[0].parse().with_context(|| format!("{}:{}", path.display(), i + 1))?;
        let a: f64 = fields[1].parse().with_context(|| format!("{}:{}", path.display(), i + 1))?;
        samples.push((k, a));
    }
    Ok(samples)
}

fn fit_width(args: &FitArgs) -> Result<()> {
    let spec = QuadratureSpec::default();
    let samples = match &args.samples {
        Some(path) => read_samples(path)?,
        None => {
            if args.n_samples < 2 || !(args.k2_min < args.k2_max) {
                bail!("need --n-samples >= 2 and --k2-min < --k2-max");
            }
            let model = fit_model(args)?;
            let step = (args.k2_max - args.k2_min) / (args.n_samples - 1) as f64;
            (0..args.n_samples)
                .map(|i| {
                    let k = args.k2_min + step * i as f64;
                    let r = mol_bar_amplitude(&model, k, args.bar_width, &spec)?;
                    Ok((k, r.amp_mol.norm()))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let fitted = fit_effective_width(&samples, args.bar_width)?;
    println!("fitted_width_nm={fitted:.6}");
    if args.samples.is_none() {
        let model = fit_model(args)?;
        let expected = args.bar_width + mean_abs_x2(&model)?;
        println!("bar_plus_mean_abs_x2_nm={expected:.6}");
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let config = load_scenario(&args)?;
            let report = cli::run_scenario(&config)
                .with_context(|| format!("running scenario {}", config.scenario_name))?;
            for path in &report.files {
                println!("wrote {}", path.display());
            }
            print!("{}", report.peak_table(config.wavelength));
        }
        Command::Peaks(args) => {
            let mut config = load_scenario(&args)?;
            config.outputs.clear();
            let report = cli::run_scenario(&config)
                .with_context(|| format!("running scenario {}", config.scenario_name))?;
            if report.curves.iter().all(|c| c.peaks.is_none()) {
                bail!("the K2 grid does not resolve the grating function; increase --n-samples");
            }
            print!("{}", report.peak_table(config.wavelength));
        }
        Command::FitWidth(args) => fit_width(&args)?,
    }
    Ok(())
}
