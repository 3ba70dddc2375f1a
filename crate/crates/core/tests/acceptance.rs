//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test --test acceptance -- --nocapture --test-threads=1` to see them.

use std::f64::consts::PI;
use std::fs;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dimer_diffraction::cli::{run_scenario, OutputKind, ScenarioConfig, PRESETS};
use dimer_diffraction::density::{fourier_density_quadrature, mean_abs_x2_quadrature};
use dimer_diffraction::{
    coherent_intensity, coherent_phase_sum, edge_term, find_peaks, fit_effective_width,
    grating_function, integrate_fixed, marginal_density, mean_abs_x2, mol_bar_amplitude,
    ClusterModel, GratingGeometry, PeakRecord, QuadratureSpec,
};

fn verdict(id: &str, pass: bool, detail: String) {
    println!("[{}] {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{id} failed: {detail}");
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn k2_samples() -> Vec<f64> {
    (0..400).map(|i| 0.001 + i as f64 * (1.0 - 0.001) / 399.0).collect()
}

/// Grid commensurate with the diffraction orders: `per_order` steps per
/// order, spanning `+-max_order` orders.
fn order_grid(d: f64, per_order: usize, max_order: f64) -> Vec<f64> {
    let step = 2.0 * PI / (d * per_order as f64);
    let count = (max_order * per_order as f64).round() as i64;
    (-count..=count).map(|j| j as f64 * step).collect()
}

fn peaks_of(model: &ClusterModel, geometry: &GratingGeometry, grid: &[f64]) -> Vec<PeakRecord> {
    let pattern = coherent_intensity(model, geometry, grid, &spec()).unwrap();
    find_peaks(&pattern).unwrap()
}

fn height(peaks: &[PeakRecord], order: i64) -> Option<f64> {
    peaks.iter().find(|p| p.order == order).map(|p| p.height)
}

#[test]
fn c01a_point_reduction_analytic_path() {
    let a = 25.0;
    let worst = k2_samples()
        .into_iter()
        .map(|k| {
            let r = mol_bar_amplitude(&ClusterModel::PointParticle, k, a, &spec()).unwrap();
            (r.amp_mol.re() - (0.5 * k * a).sin() / k).abs() + r.amp_mol.im().abs()
        })
        .fold(0.0, f64::max);
    verdict(
        "C1a point reduction (analytic)",
        worst == 0.0,
        format!("max |A_mol(point) - sin(K a/2)/K| = {worst:e} over 400 samples (required: 0)"),
    );
}

#[test]
fn c01b_point_reduction_gaussian_quadrature_path() {
    let a = 25.0;
    let gaussian = ClusterModel::gaussian(1e-3).unwrap();
    let worst = k2_samples()
        .into_iter()
        .map(|k| {
            let r = mol_bar_amplitude(&gaussian, k, a, &spec()).unwrap();
            (r.amp_mol.0.re - (0.5 * k * a).sin() / k).abs() + r.amp_mol.im().abs()
        })
        .fold(0.0, f64::max);
    verdict(
        "C1b point reduction (Gaussian width 1e-3 nm, quadrature)",
        worst <= 1e-8,
        format!("max deviation = {worst:e} (required <= 1e-8)"),
    );
}

#[test]
fn c02_mean_abs_x2_anchor() {
    let dimer = ClusterModel::helium_dimer();
    let closed = mean_abs_x2(&dimer).unwrap();
    let numeric = mean_abs_x2_quadrature(&dimer, &spec()).unwrap();
    let rel = (numeric - closed).abs() / closed;
    verdict(
        "C2 <|x2|> anchor",
        (closed - 2.8).abs() <= 1e-6 && rel <= 1e-7,
        format!("closed form {closed:.9} nm, quadrature {numeric:.9} nm, relative gap {rel:e}"),
    );
}

#[test]
fn c03_effective_width_fit() {
    let dimer = ClusterModel::helium_dimer();
    let samples: Vec<(f64, f64)> = (0..19)
        .map(|i| {
            let k = 0.01 + 0.005 * i as f64;
            (k, mol_bar_amplitude(&dimer, k, 25.0, &spec()).unwrap().amp_mol.norm())
        })
        .collect();
    let fitted = fit_effective_width(&samples, 25.0).unwrap();
    verdict(
        "C3 effective width fit",
        (fitted - 27.8).abs() <= 0.3,
        format!("a* = {fitted:.4} nm (required 27.8 +- 0.3)"),
    );
}

#[test]
fn c04_even_order_peaks() {
    let g = GratingGeometry::new(50.0, 25.0, 10).unwrap();
    let grid = order_grid(50.0, 64, 4.5);
    let k_order2 = g.order_k2(2);
    let i2 = grid.iter().position(|k| (k - k_order2).abs() < 1e-12).unwrap();

    let point = coherent_intensity(&ClusterModel::PointParticle, &g, &grid, &spec()).unwrap();
    let point_peaks = find_peaks(&point).unwrap();
    let point_ref = height(&point_peaks, 0).map(|_| point.intensity[grid.len() / 2]).unwrap();
    let point_h2 = point.intensity[i2] / point_ref;
    let point_listed = height(&point_peaks, 2);

    let dimer_peaks = peaks_of(&ClusterModel::helium_dimer(), &g, &grid);
    let dimer_h2 = height(&dimer_peaks, 2).unwrap_or(0.0);

    verdict(
        "C4 even-order peaks",
        point_h2 < 1e-10 && point_listed.is_none() && dimer_h2 > 1e-4,
        format!(
            "point order-2 height {point_h2:e} (listed: {}), dimer order-2 height {dimer_h2:e}",
            point_listed.is_some()
        ),
    );
}

#[test]
fn c05_peak_locations() {
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut worst_case = String::new();
    for n_bars in [5usize, 20] {
        for d in [50.0, 100.0] {
            let g = GratingGeometry::symmetric(d, n_bars).unwrap();
            // coarsest admissible step, incommensurate with the orders
            let k_max = 4.5 * 2.0 * PI / d;
            let required = 2.0 * PI / (5.0 * n_bars as f64 * d);
            let n = (2.0 * k_max / (0.99 * required)).ceil() as usize | 1;
            let grid = dimer_diffraction::pattern::uniform_grid(-k_max, k_max, n).unwrap();
            let step = grid[1] - grid[0];
            for model in [ClusterModel::PointParticle, ClusterModel::helium_dimer()] {
                let peaks = peaks_of(&model, &g, &grid);
                assert!(peaks.len() >= 5, "too few peaks for N={n_bars} d={d} {model}");
                for p in &peaks {
                    let offset = (p.k2_location - g.order_k2(p.order)).abs() / step;
                    if offset > worst {
                        worst = offset;
                        worst_case = format!("N={n_bars} d={d} order {} {model}", p.order);
                    }
                    checked += 1;
                }
            }
        }
    }
    verdict(
        "C5 peak locations",
        worst <= 1.0,
        format!("{checked} peaks, worst offset {worst:.3} grid steps from 2 pi n / d ({worst_case})"),
    );
}

#[test]
fn c06_geometric_series_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let geometries = [
        GratingGeometry::symmetric(50.0, 5).unwrap(),
        GratingGeometry::symmetric(100.0, 20).unwrap(),
        GratingGeometry::new(100.0, 60.0, 50).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for i in 0..10_000 {
        let g = &geometries[i % geometries.len()];
        let k: f64 = rng.gen_range(-2.0..2.0);
        let gap = (coherent_phase_sum(k, g).norm() - grating_function(k, g).abs()).abs();
        worst = worst.max(gap);
    }
    verdict(
        "C6 geometric-series identity",
        worst <= 1e-12,
        format!("max ||phase sum| - |G_N|| = {worst:e} over 10^4 points"),
    );
}

fn relative_heights(d: f64, orders: &[i64]) -> (Vec<f64>, Vec<f64>) {
    let g = GratingGeometry::symmetric(d, 10).unwrap();
    let grid = order_grid(d, 64, 4.5);
    let dimer = peaks_of(&ClusterModel::helium_dimer(), &g, &grid);
    let point = peaks_of(&ClusterModel::PointParticle, &g, &grid);
    (
        orders.iter().map(|&n| height(&dimer, n).unwrap()).collect(),
        orders.iter().map(|&n| height(&point, n).unwrap()).collect(),
    )
}

#[test]
fn c07_third_order_suppression() {
    let (dimer, point) = relative_heights(50.0, &[3]);
    let reduction = 1.0 - dimer[0] / point[0];
    verdict(
        "C7 third-order suppression",
        dimer[0] < point[0] && (0.10..=0.60).contains(&reduction),
        format!(
            "order-3 heights: dimer {:.5}, point {:.5}, reduction {:.1}% (band 10-60%)",
            dimer[0],
            point[0],
            100.0 * reduction
        ),
    );
}

#[test]
fn c08_large_grating_insensitivity() {
    // heights are fractions of the zeroth order; the gap is taken in those units
    let (dimer, point) = relative_heights(100.0, &[1, 3]);
    let gaps: Vec<f64> = dimer.iter().zip(&point).map(|(a, b)| (a - b).abs()).collect();
    let ratios: Vec<f64> = dimer.iter().zip(&point).map(|(a, b)| 1.0 - a / b).collect();
    verdict(
        "C8 large-grating insensitivity",
        gaps.iter().all(|g| *g < 0.10),
        format!(
            "order 1: dimer {:.4} vs point {:.4} (gap {:.4}, ratio change {:.1}%); \
             order 3: dimer {:.4} vs point {:.4} (gap {:.4}, ratio change {:.1}%)",
            dimer[0],
            point[0],
            gaps[0],
            100.0 * ratios[0],
            dimer[1],
            point[1],
            gaps[1],
            100.0 * ratios[1]
        ),
    );
}

/// Simpson with `x = scale t^3`, which regularizes the logarithmic
/// singularity of the exponential density at the origin.
fn substituted_simpson<F: Fn(f64) -> f64>(f: F, scale: f64) -> f64 {
    integrate_fixed(
        |t| {
            if t == 0.0 {
                0.0
            } else {
                3.0 * scale * t * t * f(scale * t * t * t)
            }
        },
        0.0,
        1.0,
        1 << 16,
    )
    .unwrap()
}

#[test]
fn c09_quadrature_oracle() {
    let dimer = ClusterModel::helium_dimer();
    let kappa = 1.0 / (4.0 * 2.8);
    let rho = |x: f64| marginal_density(&dimer, x).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_edge: f64 = 0.0;
    let mut worst_fourier: f64 = 0.0;
    for _ in 0..20 {
        let k: f64 = rng.gen_range(0.01..1.0);
        let a: f64 = rng.gen_range(10.0..60.0);

        let adaptive = edge_term(&dimer, k, a, &spec()).unwrap();
        let fixed = substituted_simpson(|x| rho(x) * (0.5 * k * (a - x)).sin(), a);
        worst_edge = worst_edge.max((adaptive - fixed).abs() / fixed.abs());

        let adaptive = fourier_density_quadrature(&dimer, k, &spec()).unwrap().re;
        let fixed = 2.0 * substituted_simpson(|x| rho(x) * (0.5 * k * x).cos(), 20.0 / kappa);
        worst_fourier = worst_fourier.max((adaptive - fixed).abs() / fixed.abs());
    }
    verdict(
        "C9 quadrature oracle",
        worst_edge <= 1e-8 && worst_fourier <= 1e-8,
        format!(
            "adaptive vs 2^16-panel Simpson: edge {worst_edge:e}, Fourier {worst_fourier:e} (required <= 1e-8)"
        ),
    );
}

#[test]
fn c10_determinism() {
    let mut detail = Vec::new();
    let mut identical = true;
    for name in PRESETS {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let dir = tempfile::tempdir().unwrap();
            let mut config = ScenarioConfig::preset(name, None).unwrap();
            config.outputs = [OutputKind::Csv].into();
            config.output_dir = dir.path().to_path_buf();
            let start = Instant::now();
            let report = run_scenario(&config).unwrap();
            let elapsed = start.elapsed().as_secs_f64();
            assert!(elapsed < 60.0, "{name} took {elapsed:.1} s");
            let bytes: Vec<Vec<u8>> = report.files.iter().map(|p| fs::read(p).unwrap()).collect();
            outputs.push(bytes);
        }
        let same = outputs[0] == outputs[1];
        identical &= same;
        detail.push(format!("{name}: {}", if same { "identical" } else { "DIFFERENT" }));
    }
    verdict("C10 determinism", identical, detail.join(", "));
}
