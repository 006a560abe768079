//! The six experiment pipelines behind the `loctrig` binary.
//!
//! Each pipeline parses its own config struct from the JSON document,
//! resolves the seed (command-line override first, then the config's
//! `seed` key — one of the two is required), runs, and returns a
//! [`RunReport`] whose `metrics` keys are fixed per experiment.

use loctrig_core::masc::{
    f_score, masc_run, MascConfig, MascRun, MetricCloud, Oracle, SliceOracle,
};
use loctrig_core::sphere::{
    affine_sphere_embed, apply_sphere_embedding, percent_point_curve, EstimatorConfig,
    FnEstimator, SphericalDataset,
};
use loctrig_core::filter::eval_filter;
use loctrig_core::transfer::{JacobiDataSpace, JointJacobiSpace, SpectralFunction};
use loctrig_core::trig::{recover_point_sources, AtomicMeasure, TrigKernel};
use ndarray::{Array2, ArrayView1};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::Instant;

use crate::csvio;
use crate::error::{Error, Result};
use crate::gen;
use crate::report::RunReport;

/// Experiment selector; the names double as CLI values and report labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    /// Point-source recovery on the circle.
    #[value(name = "pointsource")]
    PointSource,
    /// Regression of a singular target on a planar ellipse.
    #[value(name = "ellipse")]
    Ellipse,
    /// Bi-exponential decay-rate regression.
    #[value(name = "biexp")]
    Biexp,
    /// Flow boundary-value parameter regression.
    #[value(name = "darcy")]
    Darcy,
    /// Multiscale active classification.
    #[value(name = "masc")]
    Masc,
    /// Cross-space function transfer.
    #[value(name = "transfer")]
    Transfer,
}

impl Experiment {
    /// The command-line / report name.
    pub fn name(self) -> &'static str {
        match self {
            Experiment::PointSource => "pointsource",
            Experiment::Ellipse => "ellipse",
            Experiment::Biexp => "biexp",
            Experiment::Darcy => "darcy",
            Experiment::Masc => "masc",
            Experiment::Transfer => "transfer",
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pointsource" => Ok(Experiment::PointSource),
            "ellipse" => Ok(Experiment::Ellipse),
            "biexp" => Ok(Experiment::Biexp),
            "darcy" => Ok(Experiment::Darcy),
            "masc" => Ok(Experiment::Masc),
            "transfer" => Ok(Experiment::Transfer),
            _ => Err(Error::Config(format!("unknown experiment {s:?}"))),
        }
    }
}

/// Parses the config document, applies the seed override, dispatches, and
/// stamps the wall clock.
pub fn run_experiment(
    experiment: Experiment,
    config: &Value,
    seed_override: Option<u64>,
) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = match experiment {
        Experiment::PointSource => {
            let cfg: PointSourceConfig = parse_config(config)?;
            let seed = resolve_seed(cfg.seed, seed_override)?;
            run_point_source(&cfg, seed)?
        }
        Experiment::Ellipse => {
            let cfg: EllipseConfig = parse_config(config)?;
            let seed = resolve_seed(cfg.seed, seed_override)?;
            run_ellipse(&cfg, seed)?
        }
        Experiment::Biexp => {
            let cfg: BiexpConfig = parse_config(config)?;
            let seed = resolve_seed(cfg.seed, seed_override)?;
            run_biexp(&cfg, seed)?
        }
        Experiment::Darcy => {
            let cfg: DarcyConfig = parse_config(config)?;
            let seed = resolve_seed(cfg.seed, seed_override)?;
            run_darcy(&cfg, seed)?
        }
        Experiment::Masc => {
            let cfg: MascExperimentConfig = parse_config(config)?;
            let seed = resolve_seed(cfg.seed, seed_override)?;
            run_masc(&cfg, seed)?
        }
        Experiment::Transfer => {
            let cfg: TransferConfig = parse_config(config)?;
            let seed = resolve_seed(cfg.seed, seed_override)?;
            run_transfer(&cfg, seed)?
        }
    };
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn parse_config<T: DeserializeOwned>(config: &Value) -> Result<T> {
    serde_json::from_value(config.clone())
        .map_err(|e| Error::Config(format!("invalid config: {e}")))
}

fn resolve_seed(from_config: Option<u64>, from_cli: Option<u64>) -> Result<u64> {
    from_cli.or(from_config).ok_or_else(|| {
        Error::Config("a seed is required: set \"seed\" in the config or pass --seed".into())
    })
}

/// The config echo for a report: the struct, with the resolved seed
/// written back in.
fn echo_config<T: Serialize>(cfg: &T, seed: u64) -> Result<Value> {
    let mut value = serde_json::to_value(cfg)?;
    value["seed"] = Value::from(seed);
    Ok(value)
}

/// Splits a `(percent, log10_error)` curve into the parallel arrays the
/// report stores, optionally also writing the CSV form.
fn insert_curve(
    report: &mut RunReport,
    errors: &[f64],
    csv_path: Option<&PathBuf>,
) -> Result<()> {
    let curve = percent_point_curve(errors)?;
    report.insert("percent", curve.iter().map(|c| c.0).collect::<Vec<_>>())?;
    report.insert("log10_error", curve.iter().map(|c| c.1).collect::<Vec<_>>())?;
    if let Some(path) = csv_path {
        csvio::write_curve(path, &curve)?;
    }
    Ok(())
}

fn median(sorted_or_not: &[f64]) -> f64 {
    let mut v = sorted_or_not.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

// ---------------------------------------------------------------------------
// Point sources
// ---------------------------------------------------------------------------

/// Config of the point-source recovery experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointSourceConfig {
    /// Run seed (the pipeline itself is deterministic; the seed is part of
    /// the report contract).
    pub seed: Option<u64>,
    /// Kernel degree.
    pub n: usize,
    /// Peak-acceptance threshold as a fraction of the maximum.
    pub threshold: f64,
    /// The atomic measure: `(location, amplitude)` pairs.
    pub atoms: Vec<(f64, f64)>,
}

impl Default for PointSourceConfig {
    fn default() -> Self {
        Self {
            seed: None,
            n: 256,
            threshold: 0.08,
            atoms: vec![(-1.0, 5.0), (2.0, 30.0), (2.05, 20.0)],
        }
    }
}

/// Convolves the atomic measure with the localized kernel and reports the
/// recovered peaks.
pub fn run_point_source(cfg: &PointSourceConfig, seed: u64) -> Result<RunReport> {
    let kernel = TrigKernel::new(cfg.n)?;
    let measure = AtomicMeasure::new(cfg.atoms.iter().cloned());
    let peaks = recover_point_sources(&measure, &kernel, cfg.threshold)?;
    let mut report = RunReport::new("pointsource", echo_config(cfg, seed)?);
    report.insert("n_peaks", peaks.len())?;
    report.insert(
        "peak_locations",
        peaks.iter().map(|p| p.location).collect::<Vec<_>>(),
    )?;
    report.insert(
        "peak_amplitudes",
        peaks.iter().map(|p| p.amplitude).collect::<Vec<_>>(),
    )?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Ellipse regression
// ---------------------------------------------------------------------------

/// How the ratio estimator normalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    /// Divide by the data-based density estimate (default).
    Estimate,
    /// Divide by the exact expected density, computed by dense quadrature
    /// along the curve.
    Exact,
}

/// Config of the ellipse regression experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EllipseConfig {
    /// Run seed.
    pub seed: Option<u64>,
    /// Kernel degree.
    pub n: usize,
    /// Training samples.
    pub m_train: usize,
    /// Test probes.
    pub m_test: usize,
    /// Target signal-to-noise ratio in dB; absent = noiseless.
    pub snr_db: Option<f64>,
    /// Density normalization mode.
    pub density: DensityMode,
    /// Optional CSV destination for the percent-point curve.
    pub curve_csv: Option<PathBuf>,
}

impl Default for EllipseConfig {
    fn default() -> Self {
        Self {
            seed: None,
            n: 32,
            m_train: 1 << 13,
            m_test: 1 << 11,
            snr_db: None,
            density: DensityMode::Estimate,
            curve_csv: None,
        }
    }
}

/// Expected density along the ellipse at probe `x`: the average of
/// `Phi_{n,1}(x . y(t))` over a dense uniform parameter grid, i.e. the
/// infinite-sample limit of the density estimate.
fn ellipse_expected_density(
    estimator: &FnEstimator<'_>,
    x: ArrayView1<'_, f64>,
    grid: usize,
) -> f64 {
    let mut acc = 0.0;
    for j in 0..grid {
        let t = -PI + 2.0 * PI * j as f64 / grid as f64;
        let y = gen::ellipse_embed(t);
        let dot: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        acc += estimator
            .kernel()
            .eval(dot.clamp(-1.0, 1.0))
            .expect("clamped dot product is valid");
    }
    acc / grid as f64
}

/// Absolute test errors of one ellipse run, in probe order.
fn ellipse_errors(cfg: &EllipseConfig, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let data = gen::gen_ellipse_regression(seed, cfg.m_train, cfg.m_test);
    let values = match cfg.snr_db {
        Some(snr) => gen::add_noise_global(
            &data.train_values,
            snr,
            &mut gen::rng_stream(seed, gen::STREAM_NOISE),
        ),
        None => data.train_values.clone(),
    };
    let targets =
        Array2::from_shape_vec((values.len(), 1), values).expect("target shape matches draw");
    let dataset = SphericalDataset::new(data.train_points, targets)?;
    let normalize = cfg.density == DensityMode::Estimate;
    let estimator = FnEstimator::new(&dataset, EstimatorConfig::new(cfg.n, 1, normalize)?)?;
    let mut errors = Vec::with_capacity(cfg.m_test);
    for (i, &truth) in data.test_values.iter().enumerate() {
        let probe = data.test_points.row(i);
        let est = match cfg.density {
            DensityMode::Estimate => estimator.estimate(probe)?[0],
            DensityMode::Exact => {
                let raw = estimator.estimate(probe)?[0];
                raw / ellipse_expected_density(&estimator, probe, 4096)
            }
        };
        errors.push((est - truth).abs());
    }
    Ok((errors, data.test_angles))
}

/// Runs the ellipse regression experiment and reports error statistics
/// split by distance to the target's singular angles.
pub fn run_ellipse(cfg: &EllipseConfig, seed: u64) -> Result<RunReport> {
    let (errors, angles) = ellipse_errors(cfg, seed)?;
    let mut report = RunReport::new("ellipse", echo_config(cfg, seed)?);

    // Distance of each probe angle to the nearer of the two kinks at
    // +-pi/2, where the target's derivative blows up.
    let kink_dist: Vec<f64> = angles.iter().map(|t| (t.abs() - PI / 2.0).abs()).collect();
    let split_mean = |keep: &dyn Fn(f64) -> bool| -> (f64, usize) {
        let picked: Vec<f64> = errors
            .iter()
            .zip(&kink_dist)
            .filter(|(_, &d)| keep(d))
            .map(|(&e, _)| e)
            .collect();
        let mean = picked.iter().sum::<f64>() / picked.len().max(1) as f64;
        (mean, picked.len())
    };
    let (far_mean, far_count) = split_mean(&|d| d > 0.3);
    let (near_mean, near_count) = split_mean(&|d| d < 0.05);

    report.insert("mean_abs_error", errors.iter().sum::<f64>() / errors.len() as f64)?;
    report.insert("median_abs_error", median(&errors))?;
    report.insert("far_mean_abs_error", far_mean)?;
    report.insert("near_mean_abs_error", near_mean)?;
    report.insert("far_count", far_count)?;
    report.insert("near_count", near_count)?;
    report.insert(
        "near_far_ratio",
        if far_mean > 0.0 { near_mean / far_mean } else { f64::MAX },
    )?;
    insert_curve(&mut report, &errors, cfg.curve_csv.as_ref())?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Parameter regressions on the sphere
// ---------------------------------------------------------------------------

/// Config of the bi-exponential experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BiexpConfig {
    /// Run seed.
    pub seed: Option<u64>,
    /// Kernel degree.
    pub n: usize,
    /// Kernel dimension parameter.
    pub q: usize,
    /// Training samples.
    pub m_train: usize,
    /// Test probes.
    pub m_test: usize,
    /// Target signal-to-noise ratio in dB; absent = noiseless.
    pub snr_db: Option<f64>,
    /// Optional CSV destination for the percent-point curve.
    pub curve_csv: Option<PathBuf>,
}

impl Default for BiexpConfig {
    fn default() -> Self {
        Self {
            seed: None,
            n: 16,
            q: 2,
            m_train: 2048,
            m_test: 512,
            snr_db: None,
            curve_csv: None,
        }
    }
}

/// Shared tail of the two parameter-regression pipelines: estimate both
/// parameters at every probe, report RMS per component and the
/// percent-point curve of per-probe combined relative errors.
fn param_regression_report(
    name: &str,
    config_echo: Value,
    train: &SphericalDataset,
    test_points: &Array2<f64>,
    test_params: &Array2<f64>,
    estimator_cfg: EstimatorConfig,
    param_names: (&str, &str),
    curve_csv: Option<&PathBuf>,
) -> Result<RunReport> {
    let estimator = FnEstimator::new(train, estimator_cfg)?;
    let m = test_points.nrows();
    let mut sq = [0.0; 2];
    let mut combined = Vec::with_capacity(m);
    for i in 0..m {
        let est = estimator.estimate(test_points.row(i))?;
        let truth = [test_params[(i, 0)], test_params[(i, 1)]];
        for c in 0..2 {
            sq[c] += (est[c] - truth[c]).powi(2);
        }
        combined.push(loctrig_core::sphere::combined_error(&truth, &est)?);
    }
    let mut report = RunReport::new(name, config_echo);
    report.insert(
        &format!("rms_{}", param_names.0),
        (sq[0] / m as f64).sqrt(),
    )?;
    report.insert(
        &format!("rms_{}", param_names.1),
        (sq[1] / m as f64).sqrt(),
    )?;
    report.insert("rms_overall", ((sq[0] + sq[1]) / (2.0 * m as f64)).sqrt())?;
    report.insert("median_combined_error", median(&combined))?;
    insert_curve(&mut report, &combined, curve_csv)?;
    Ok(report)
}

/// Runs the bi-exponential decay-rate regression.
pub fn run_biexp(cfg: &BiexpConfig, seed: u64) -> Result<RunReport> {
    let train = gen::gen_biexp(seed, cfg.m_train, cfg.snr_db)?;
    let test = gen::gen_biexp_test(seed, cfg.m_test, cfg.snr_db)?;
    param_regression_report(
        "biexp",
        echo_config(cfg, seed)?,
        &train,
        &test.points().to_owned(),
        &test.targets().to_owned(),
        EstimatorConfig::new(cfg.n, cfg.q, true)?,
        ("lambda1", "lambda2"),
        cfg.curve_csv.as_ref(),
    )
}

/// Config of the flow boundary-value experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DarcyConfig {
    /// Run seed.
    pub seed: Option<u64>,
    /// Kernel degree.
    pub n: usize,
    /// Kernel dimension parameter.
    pub q: usize,
    /// Training samples.
    pub m_train: usize,
    /// Test probes.
    pub m_test: usize,
    /// Target signal-to-noise ratio in dB; absent = noiseless.
    pub snr_db: Option<f64>,
    /// Optional CSV destination for the percent-point curve.
    pub curve_csv: Option<PathBuf>,
}

impl Default for DarcyConfig {
    fn default() -> Self {
        Self {
            seed: None,
            n: 16,
            q: 2,
            m_train: 2048,
            m_test: 512,
            snr_db: None,
            curve_csv: None,
        }
    }
}

/// Runs the flow parameter regression: solution curves are embedded on the
/// sphere by the affine embedding fitted to the training rows.
pub fn run_darcy(cfg: &DarcyConfig, seed: u64) -> Result<RunReport> {
    let train = gen::gen_darcy(seed, cfg.m_train, cfg.snr_db);
    let test = gen::gen_darcy_test(seed, cfg.m_test, cfg.snr_db);
    let (embedded_train, embedding) = affine_sphere_embed(train.rows.view())?;
    let embedded_test = apply_sphere_embedding(test.rows.view(), &embedding);
    let dataset = SphericalDataset::new(embedded_train, train.params)?;
    param_regression_report(
        "darcy",
        echo_config(cfg, seed)?,
        &dataset,
        &embedded_test,
        &test.params,
        EstimatorConfig::new(cfg.n, cfg.q, true)?,
        ("p", "s"),
        cfg.curve_csv.as_ref(),
    )
}

// ---------------------------------------------------------------------------
// Active classification
// ---------------------------------------------------------------------------

/// Which synthetic set the classification experiment runs on (ignored when
/// an input CSV is given).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MascDataset {
    /// Circle-plus-ellipse mixture.
    CircleEllipse,
    /// Two interleaved semicircular arcs.
    TwoMoons,
}

/// Config of the active-classification experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MascExperimentConfig {
    /// Run seed.
    pub seed: Option<u64>,
    /// Kernel degree for support scores.
    pub n: usize,
    /// Support-pruning threshold in (0, 1).
    pub theta: f64,
    /// First graph scale.
    pub eta_start: f64,
    /// Scale increment per level.
    pub eta_step: f64,
    /// Minimum component size per level.
    pub min_size: usize,
    /// Neighbor count for final completion.
    pub k_neighbors: usize,
    /// Synthetic dataset to generate.
    pub dataset: MascDataset,
    /// Points per class (or per arc).
    pub n_per_class: usize,
    /// Coordinate noise of the synthetic set.
    pub noise_sd: f64,
    /// Optional labeled CSV to classify instead of a synthetic set
    /// (features plus a final integer label column).
    pub input_csv: Option<PathBuf>,
}

impl Default for MascExperimentConfig {
    fn default() -> Self {
        Self {
            seed: None,
            n: 128,
            theta: 0.12,
            eta_start: 0.006,
            eta_step: 0.005,
            min_size: 15,
            k_neighbors: 5,
            dataset: MascDataset::CircleEllipse,
            n_per_class: 1000,
            noise_sd: 0.05,
            input_csv: None,
        }
    }
}

/// Groups point indices by label value, ascending.
fn label_partition(labels: &[usize]) -> Vec<Vec<usize>> {
    let mut by_label: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, &l) in labels.iter().enumerate() {
        by_label.entry(l).or_default().push(i);
    }
    by_label.into_values().collect()
}

/// Runs the classifier on the configured dataset and reports accuracy,
/// F-score, the query ledger, and the per-level history.
pub fn run_masc(cfg: &MascExperimentConfig, seed: u64) -> Result<RunReport> {
    let (points, truth) = match &cfg.input_csv {
        Some(path) => csvio::read_labeled(path)?,
        None => {
            let data = match cfg.dataset {
                MascDataset::CircleEllipse => {
                    gen::gen_circle_ellipse(seed, cfg.n_per_class, cfg.noise_sd)
                }
                MascDataset::TwoMoons => gen::gen_two_moons(seed, cfg.n_per_class, cfg.noise_sd),
            };
            (data.points, data.labels)
        }
    };
    let cloud = MetricCloud::from_euclidean(points.view())?;
    let core_cfg = MascConfig {
        n: cfg.n,
        theta: cfg.theta,
        eta_start: cfg.eta_start,
        eta_step: cfg.eta_step,
        min_size: cfg.min_size,
        k_neighbors: cfg.k_neighbors,
        seed,
    };
    let mut oracle = SliceOracle::new(truth.clone());
    let run: MascRun = masc_run(&cloud, &mut oracle, &core_cfg)?;

    let hits = run
        .labels
        .iter()
        .zip(&truth)
        .filter(|(a, b)| a == b)
        .count();
    let accuracy = hits as f64 / truth.len() as f64;
    let score = f_score(&label_partition(&run.labels), &label_partition(&truth))?;

    let mut report = RunReport::new("masc", echo_config(cfg, seed)?);
    report.insert("accuracy", accuracy)?;
    report.insert("f_score", score)?;
    report.insert("support_size", run.state.support().len())?;
    report.insert("n_queries", oracle.queries())?;
    report.insert(
        "queries",
        run.state
            .ledger()
            .iter()
            .map(|q| (q.eta, q.index, q.label))
            .collect::<Vec<_>>(),
    )?;
    report.insert(
        "per_eta",
        run.history
            .iter()
            .map(|s| {
                let snap_hits = s
                    .completed_labels
                    .iter()
                    .zip(&truth)
                    .filter(|(a, b)| a == b)
                    .count();
                (
                    s.eta,
                    s.components.len(),
                    s.query_total,
                    snap_hits as f64 / truth.len() as f64,
                )
            })
            .collect::<Vec<_>>(),
    )?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Cross-space transfer
// ---------------------------------------------------------------------------

/// Test function of the transfer experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferFunction {
    /// Smooth bump supported on the ball around `theta0`.
    Bump,
    /// Fixed low-degree expansion in the source basis.
    BandLimited,
}

/// Config of the transfer experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferConfig {
    /// Run seed (the pipeline is deterministic; part of the report
    /// contract).
    pub seed: Option<u64>,
    /// Target-space Jacobi parameters.
    pub alpha1: f64,
    /// Target-space Jacobi parameters.
    pub beta1: f64,
    /// Source-space Jacobi parameters.
    pub alpha2: f64,
    /// Source-space Jacobi parameters.
    pub beta2: f64,
    /// Matrix size (polynomial degrees 0..size).
    pub size: usize,
    /// Operator degrees to compare, ascending.
    pub degrees: Vec<usize>,
    /// Center of the bump and of the error ball.
    pub theta0: f64,
    /// Radius of the bump; errors are measured on the ball of radius
    /// `3 r0 / 4`.
    pub r0: f64,
    /// Which test function to lift.
    pub function: TransferFunction,
    /// Sample-grid size (power of two plus one).
    pub grid: usize,
    /// Degree bound for the polynomial-preservation constant; absent skips
    /// that metric.
    pub n0: Option<usize>,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self {
            seed: None,
            alpha1: 1.5,
            beta1: -0.5,
            alpha2: -0.5,
            beta2: -0.5,
            size: 40,
            degrees: vec![8, 16, 32],
            theta0: PI / 2.0,
            r0: 1.0,
            function: TransferFunction::Bump,
            grid: 4097,
            n0: Some(5),
        }
    }
}

/// Coefficients of the fixed band-limited test content.
const BAND_LIMITED_COEFFS: [f64; 4] = [0.5, -1.0, 0.25, 2.0];

/// Runs the transfer experiment: lifts the test function at each operator
/// degree and reports sup deviations from the finest lift on the error
/// ball, plus structural diagnostics of the connection matrix.
pub fn run_transfer(cfg: &TransferConfig, seed: u64) -> Result<RunReport> {
    if cfg.degrees.is_empty() {
        return Err(Error::Config("degrees must not be empty".into()));
    }
    let space1 = JacobiDataSpace::new(cfg.alpha1, cfg.beta1)?;
    let space2 = JacobiDataSpace::new(cfg.alpha2, cfg.beta2)?;
    let joint = JointJacobiSpace::new(space1, space2, cfg.size)?;

    let samples: Vec<f64> = (0..cfg.grid)
        .map(|j| {
            let theta = PI * j as f64 / (cfg.grid - 1) as f64;
            match cfg.function {
                TransferFunction::Bump => eval_filter((theta - cfg.theta0).abs() / cfg.r0),
                TransferFunction::BandLimited => BAND_LIMITED_COEFFS
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * space2.phi(k, theta))
                    .sum(),
            }
        })
        .collect();

    let lifts: Vec<SpectralFunction> = cfg
        .degrees
        .iter()
        .map(|&n| joint.lift(&samples, n))
        .collect::<loctrig_core::Result<_>>()?;
    let finest = lifts.last().expect("degrees checked nonempty");

    // Sup deviation from the finest lift over the error ball around theta0,
    // clipped to the domain.
    let lo = (cfg.theta0 - 0.75 * cfg.r0).max(0.0);
    let hi = (cfg.theta0 + 0.75 * cfg.r0).min(PI);
    let probes: Vec<f64> = (0..=512).map(|j| lo + (hi - lo) * j as f64 / 512.0).collect();
    let sup_errors: Vec<f64> = lifts
        .iter()
        .map(|lift| {
            probes
                .iter()
                .map(|&theta| (lift.eval(theta) - finest.eval(theta)).abs())
                .fold(0.0_f64, f64::max)
        })
        .collect();

    let (gap_a, gap_b) = joint.gaps();
    let matrix = joint.connection();
    let band = joint.band_width() as isize;
    let mut outside_band: f64 = 0.0;
    let mut identity_dev: f64 = 0.0;
    for m in 0..cfg.size {
        for k in 0..cfg.size {
            let entry = matrix[(m, k)];
            if (m as isize - k as isize).abs() > band {
                outside_band = outside_band.max(entry.abs());
            }
            let target = if m == k { 1.0 } else { 0.0 };
            identity_dev = identity_dev.max((entry - target).abs());
        }
    }

    let mut report = RunReport::new("transfer", echo_config(cfg, seed)?);
    report.insert("degrees", &cfg.degrees)?;
    report.insert("sup_error_vs_finest", sup_errors)?;
    report.insert("band_width", joint.band_width())?;
    report.insert("gap_a", gap_a)?;
    report.insert("gap_b", gap_b)?;
    report.insert("max_entry_outside_band", outside_band)?;
    if gap_a == 0 && gap_b == 0 {
        // Identical weights: the connection matrix should be the identity
        // and the lift should match plain single-space smoothing.
        report.insert("identity_deviation", identity_dev)?;
        let n = *cfg.degrees.last().expect("nonempty");
        let single = loctrig_core::transfer::single_space_smooth(&space1, &samples, n)?;
        let dev = probes
            .iter()
            .map(|&theta| (finest.eval(theta) - single.eval(theta)).abs())
            .fold(0.0_f64, f64::max);
        report.insert("lift_vs_single_space", dev)?;
    }
    if let Some(n0) = cfg.n0 {
        report.insert("preservation_constant", joint.preservation_constant(n0)?)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn seed_resolution_rules() {
        assert_eq!(resolve_seed(Some(3), None).unwrap(), 3);
        assert_eq!(resolve_seed(Some(3), Some(9)).unwrap(), 9);
        assert_eq!(resolve_seed(None, Some(9)).unwrap(), 9);
        assert!(resolve_seed(None, None).is_err());
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = run_experiment(
            Experiment::PointSource,
            &json!({"seed": 1, "threshol": 0.1}),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)), "got {err:?}");
    }

    #[test]
    fn point_source_default_recovers_three_atoms() {
        let report = run_experiment(Experiment::PointSource, &json!({"seed": 0}), None).unwrap();
        assert_eq!(report.metrics["n_peaks"], json!(3));
        assert_eq!(report.experiment, "pointsource");
        assert_eq!(report.config["seed"], json!(0));
    }

    #[test]
    fn seed_override_wins_over_config() {
        let report =
            run_experiment(Experiment::PointSource, &json!({"seed": 4}), Some(11)).unwrap();
        assert_eq!(report.config["seed"], json!(11));
    }

    #[test]
    fn masc_two_moons_report_shape() {
        let cfg = json!({
            "seed": 5,
            "dataset": "two_moons",
            "n": 32,
            "n_per_class": 60,
            "noise_sd": 0.0,
            "eta_start": 0.05,
            "eta_step": 0.05,
        });
        let report = run_experiment(Experiment::Masc, &cfg, None).unwrap();
        assert_eq!(report.metrics["accuracy"], json!(1.0));
        assert_eq!(report.metrics["f_score"], json!(1.0));
        let queries = report.metrics["queries"].as_array().unwrap();
        assert_eq!(queries.len(), 2);
        let per_eta = report.metrics["per_eta"].as_array().unwrap();
        assert!(!per_eta.is_empty());
        // Each history row is (eta, components, cumulative queries,
        // snapshot accuracy).
        assert_eq!(per_eta[0].as_array().unwrap().len(), 4);
    }

    #[test]
    fn transfer_identity_pair_reports_identity_metrics() {
        let cfg = json!({
            "seed": 0,
            "alpha1": 0.5, "beta1": -0.5,
            "alpha2": 0.5, "beta2": -0.5,
            "size": 24,
            "degrees": [6, 12],
            "grid": 2049,
            "function": "band_limited",
            "n0": 4,
        });
        let report = run_experiment(Experiment::Transfer, &cfg, None).unwrap();
        let dev = report.metrics["identity_deviation"].as_f64().unwrap();
        assert!(dev < 1e-8, "identity deviation {dev}");
        let lift_dev = report.metrics["lift_vs_single_space"].as_f64().unwrap();
        assert!(lift_dev < 1e-8, "lift deviation {lift_dev}");
        assert_eq!(report.metrics["band_width"], json!(0));
    }

    #[test]
    fn ellipse_exact_density_mode_runs() {
        let cfg = json!({
            "seed": 1,
            "n": 8,
            "m_train": 256,
            "m_test": 32,
            "density": "exact",
        });
        let report = run_experiment(Experiment::Ellipse, &cfg, None).unwrap();
        let median = report.metrics["median_abs_error"].as_f64().unwrap();
        assert!(median.is_finite() && median > 0.0);
    }

    #[test]
    fn biexp_and_darcy_smoke() {
        let report = run_experiment(
            Experiment::Biexp,
            &json!({"seed": 2, "m_train": 256, "m_test": 32, "n": 8}),
            None,
        )
        .unwrap();
        let rms = report.metrics["rms_overall"].as_f64().unwrap();
        assert!(rms.is_finite() && rms < 0.6, "rms {rms}");

        let report = run_experiment(
            Experiment::Darcy,
            &json!({"seed": 2, "m_train": 256, "m_test": 32, "n": 8, "snr_db": 60.0}),
            None,
        )
        .unwrap();
        let rms = report.metrics["rms_overall"].as_f64().unwrap();
        assert!(rms.is_finite() && rms < 0.6, "rms {rms}");
    }
}
