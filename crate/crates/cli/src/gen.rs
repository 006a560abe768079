//! Synthetic dataset generators behind the experiments.
//!
//! Every generator takes an explicit seed and reads from fixed ChaCha8
//! streams — [`STREAM_PARAMS`] for model parameters and curve positions,
//! [`STREAM_NOISE`] for training noise, [`STREAM_TEST`] for test-set draws —
//! so the deterministic parts of a dataset stay bit-identical when only the
//! noise setup changes. Gaussian variates come from `rand_distr`'s ziggurat
//! sampler; determinism is promised per implementation, not across
//! languages.

use loctrig_core::sphere::{inverse_stereographic, SphericalDataset};
use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

use crate::error::Result;

/// Stream for model parameters and curve positions.
pub const STREAM_PARAMS: u64 = 0;
/// Stream for training-noise draws.
pub const STREAM_NOISE: u64 = 1;
/// Stream for test-set draws (positions, parameters, and test noise).
pub const STREAM_TEST: u64 = 2;

/// One-line description of the randomness scheme, echoed into run reports.
pub const RNG_SCHEME: &str = "ChaCha8 seeded per run; stream 0 = parameters/positions, \
     stream 1 = training noise, stream 2 = test draws; Gaussians via the rand_distr ziggurat";

/// A ChaCha8 generator for `seed`, positioned on the given stream.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A vector of independent standard normal draws.
pub fn standard_normal_vec(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// `signal + eps * ||signal|| / (||eps|| 10^{snr_db/20})`: additive noise in
/// the given direction, rescaled so the whole vector meets the
/// signal-to-noise target exactly. A zero signal or zero direction is
/// returned unchanged (no finite scale exists).
pub fn scaled_noise(signal: &[f64], direction: &[f64], snr_db: f64) -> Vec<f64> {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (s, e) = (norm(signal), norm(direction));
    if s == 0.0 || e == 0.0 {
        return signal.to_vec();
    }
    let scale = s / (e * 10f64.powf(snr_db / 20.0));
    signal
        .iter()
        .zip(direction)
        .map(|(x, d)| x + scale * d)
        .collect()
}

/// Adds SNR-targeted Gaussian noise to one vector treated as a whole.
pub fn add_noise_global(signal: &[f64], snr_db: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let direction = standard_normal_vec(signal.len(), rng);
    scaled_noise(signal, &direction, snr_db)
}

/// Adds SNR-targeted Gaussian noise to each row separately (each row is its
/// own signal vector).
pub fn add_noise_rows(rows: &mut Array2<f64>, snr_db: f64, rng: &mut ChaCha8Rng) {
    for mut row in rows.rows_mut() {
        let signal: Vec<f64> = row.iter().cloned().collect();
        let noisy = add_noise_global(&signal, snr_db, rng);
        for (slot, v) in row.iter_mut().zip(noisy) {
            *slot = v;
        }
    }
}

// ---------------------------------------------------------------------------
// Planar classification sets
// ---------------------------------------------------------------------------

/// Radius of the circle class in the two-curve mixture.
pub const CIRCLE_RADIUS: f64 = 1.5;
/// Semi-major axis of the ellipse class in the two-curve mixture.
pub const ELLIPSE_SEMI_MAJOR: f64 = 1.8;
/// Eccentricity of the ellipse class.
pub const ELLIPSE_ECCENTRICITY: f64 = 0.79;
/// Arclength-table resolution for ellipse sampling (2^13 segments).
const ARCLENGTH_TABLE: usize = 8192;

/// A planar point cloud with one class label per row.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    /// Point coordinates, one row per point.
    pub points: Array2<f64>,
    /// Class label of each row.
    pub labels: Vec<usize>,
}

/// Arclength-uniform samples of the axis-aligned ellipse `(a cos t, b sin t)`:
/// inverts the cumulative chordlength of a dense parameter table.
fn ellipse_arclength_sample(rng: &mut ChaCha8Rng, m: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let table: Vec<f64> = (0..=ARCLENGTH_TABLE)
        .map(|j| 2.0 * PI * j as f64 / ARCLENGTH_TABLE as f64)
        .collect();
    let mut cum = Vec::with_capacity(table.len());
    cum.push(0.0);
    for w in table.windows(2) {
        let (x0, y0) = (a * w[0].cos(), b * w[0].sin());
        let (x1, y1) = (a * w[1].cos(), b * w[1].sin());
        cum.push(cum.last().unwrap() + (x1 - x0).hypot(y1 - y0));
    }
    let total = *cum.last().unwrap();
    (0..m)
        .map(|_| {
            let u = rng.random_range(0.0..total);
            // cum is strictly increasing; find the segment and interpolate.
            let k = match cum.binary_search_by(|c| c.total_cmp(&u)) {
                Ok(k) => k.max(1),
                Err(k) => k,
            };
            let frac = (u - cum[k - 1]) / (cum[k] - cum[k - 1]);
            let t = table[k - 1] + frac * (table[k] - table[k - 1]);
            (a * t.cos(), b * t.sin())
        })
        .collect()
}

/// Two-class mixture of a circle (label 0) and an ellipse of eccentricity
/// [`ELLIPSE_ECCENTRICITY`] (label 1), both sampled uniformly by arclength,
/// with independent `N(0, noise_sd^2)` jitter on every coordinate.
pub fn gen_circle_ellipse(seed: u64, n_per_class: usize, noise_sd: f64) -> LabeledDataset {
    let mut params = rng_stream(seed, STREAM_PARAMS);
    let mut rows = Vec::with_capacity(2 * n_per_class);
    for _ in 0..n_per_class {
        let t = params.random_range(0.0..2.0 * PI);
        rows.push((CIRCLE_RADIUS * t.cos(), CIRCLE_RADIUS * t.sin()));
    }
    let b = ELLIPSE_SEMI_MAJOR * (1.0 - ELLIPSE_ECCENTRICITY * ELLIPSE_ECCENTRICITY).sqrt();
    rows.extend(ellipse_arclength_sample(
        &mut params,
        n_per_class,
        ELLIPSE_SEMI_MAJOR,
        b,
    ));

    let mut noise = rng_stream(seed, STREAM_NOISE);
    let mut points = Array2::zeros((2 * n_per_class, 2));
    for (i, (x, y)) in rows.into_iter().enumerate() {
        let (gx, gy): (f64, f64) = (noise.sample(StandardNormal), noise.sample(StandardNormal));
        points[(i, 0)] = x + noise_sd * gx;
        points[(i, 1)] = y + noise_sd * gy;
    }
    let labels = (0..2 * n_per_class).map(|i| usize::from(i >= n_per_class)).collect();
    LabeledDataset { points, labels }
}

/// Two interleaved semicircular arcs ("two moons"), `n_per_arc` points each,
/// equispaced in angle (hence in arclength): arc 0 is the upper unit
/// semicircle, arc 1 the lower semicircle shifted to `(1, 0.5)`. With
/// `noise_sd = 0` the points are exact, making downstream runs
/// seed-independent.
pub fn gen_two_moons(seed: u64, n_per_arc: usize, noise_sd: f64) -> LabeledDataset {
    let mut noise = rng_stream(seed, STREAM_NOISE);
    let mut points = Array2::zeros((2 * n_per_arc, 2));
    let denom = n_per_arc.saturating_sub(1).max(1) as f64;
    for j in 0..n_per_arc {
        let t = PI * j as f64 / denom;
        points[(j, 0)] = t.cos();
        points[(j, 1)] = t.sin();
        points[(n_per_arc + j, 0)] = 1.0 - t.cos();
        points[(n_per_arc + j, 1)] = 0.5 - t.sin();
    }
    if noise_sd > 0.0 {
        for v in points.iter_mut() {
            let g: f64 = noise.sample(StandardNormal);
            *v += noise_sd * g;
        }
    }
    let labels = (0..2 * n_per_arc).map(|i| usize::from(i >= n_per_arc)).collect();
    LabeledDataset { points, labels }
}

/// Half-width of the uniform background box around the two quarter arcs.
pub const BACKGROUND_BOX: f64 = 1.3;

/// Two opposite quarter arcs of the unit circle (`n_per_arc` points each,
/// uniform in angle) plus `n_background` uniform points in the square
/// `[-1.3, 1.3]^2`. Rows `0 .. 2 n_per_arc` lie on the arcs; the rest is
/// background clutter for support-pruning checks.
pub fn gen_two_arcs_background(seed: u64, n_per_arc: usize, n_background: usize) -> Array2<f64> {
    let mut params = rng_stream(seed, STREAM_PARAMS);
    let mut points = Array2::zeros((2 * n_per_arc + n_background, 2));
    for j in 0..n_per_arc {
        let t = params.random_range(0.0..PI / 2.0);
        points[(j, 0)] = t.cos();
        points[(j, 1)] = t.sin();
    }
    for j in 0..n_per_arc {
        let t = params.random_range(PI..1.5 * PI);
        points[(n_per_arc + j, 0)] = t.cos();
        points[(n_per_arc + j, 1)] = t.sin();
    }
    for j in 0..n_background {
        points[(2 * n_per_arc + j, 0)] = params.random_range(-BACKGROUND_BOX..BACKGROUND_BOX);
        points[(2 * n_per_arc + j, 1)] = params.random_range(-BACKGROUND_BOX..BACKGROUND_BOX);
    }
    points
}

// ---------------------------------------------------------------------------
// Ellipse regression (singular target on a planar curve)
// ---------------------------------------------------------------------------

/// Regression target on the parametrized ellipse:
/// `f(t) = 1 + |cos t|^{1/2} sin(cos t + sin t) / 2`. The square root kinks
/// at `t = ±π/2`, which is where estimation error is expected to spike.
pub fn ellipse_target(t: f64) -> f64 {
    1.0 + t.cos().abs().sqrt() * (t.cos() + t.sin()).sin() / 2.0
}

/// Embeds the ellipse point `(3 cos t, 6 sin t)` on the unit sphere in R^3
/// by inverse stereographic projection.
pub fn ellipse_embed(t: f64) -> Vec<f64> {
    inverse_stereographic(&[3.0 * t.cos(), 6.0 * t.sin()])
}

/// Train/test split for the ellipse regression experiment. Targets are
/// noiseless here; SNR noise is the caller's move so one draw can be reused
/// across noise levels.
#[derive(Debug, Clone)]
pub struct EllipseRegressionData {
    /// Training points on the unit sphere, one row each.
    pub train_points: Array2<f64>,
    /// Noiseless target values at the training points.
    pub train_values: Vec<f64>,
    /// Test probes on the unit sphere.
    pub test_points: Array2<f64>,
    /// Ellipse parameter of each test probe.
    pub test_angles: Vec<f64>,
    /// True target values at the test probes.
    pub test_values: Vec<f64>,
}

/// Draws `m_train` training angles (stream 0) and `m_test` test angles
/// (stream 2) uniformly on `[-π, π)` and pushes them through
/// [`ellipse_embed`] / [`ellipse_target`].
pub fn gen_ellipse_regression(seed: u64, m_train: usize, m_test: usize) -> EllipseRegressionData {
    let draw = |rng: &mut ChaCha8Rng, m: usize| -> (Array2<f64>, Vec<f64>, Vec<f64>) {
        let mut points = Array2::zeros((m, 3));
        let mut angles = Vec::with_capacity(m);
        let mut values = Vec::with_capacity(m);
        for i in 0..m {
            let t = rng.random_range(-PI..PI);
            for (j, c) in ellipse_embed(t).into_iter().enumerate() {
                points[(i, j)] = c;
            }
            angles.push(t);
            values.push(ellipse_target(t));
        }
        (points, angles, values)
    };
    let (train_points, _, train_values) = draw(&mut rng_stream(seed, STREAM_PARAMS), m_train);
    let (test_points, test_angles, test_values) = draw(&mut rng_stream(seed, STREAM_TEST), m_test);
    EllipseRegressionData {
        train_points,
        train_values,
        test_points,
        test_angles,
        test_values,
    }
}

// ---------------------------------------------------------------------------
// Bi-exponential parameter regression
// ---------------------------------------------------------------------------

/// Decay-rate box for the first bi-exponential component.
pub const BIEXP_LAMBDA1_RANGE: (f64, f64) = (0.1, 0.7);
/// Decay-rate box for the second bi-exponential component.
pub const BIEXP_LAMBDA2_RANGE: (f64, f64) = (1.1, 1.7);
/// Number of time samples per decay curve.
pub const BIEXP_SAMPLES: usize = 100;

/// The decay curve `f(t) = 0.7 e^{-λ1 t} + 0.3 e^{-λ2 t}` at `t = 1..=100`.
pub fn biexp_curve(lambda1: f64, lambda2: f64) -> Vec<f64> {
    (1..=BIEXP_SAMPLES)
        .map(|t| {
            let t = t as f64;
            0.7 * (-lambda1 * t).exp() + 0.3 * (-lambda2 * t).exp()
        })
        .collect()
}

/// The fixed affine preprocessing: `v = 1000 y` with `(380, 189, 116)`
/// subtracted from the first three entries.
pub fn biexp_transform(y: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = y.iter().map(|x| 1000.0 * x).collect();
    v[0] -= 380.0;
    v[1] -= 189.0;
    v[2] -= 116.0;
    v
}

/// Appends the constant 100 and rescales to the unit sphere in R^101.
pub fn biexp_project(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.push(100.0);
    let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut out {
        *x /= norm;
    }
    out
}

/// Draws `(λ1, λ2)` pairs, runs each decay curve through the transform,
/// optional per-curve SNR noise, and the sphere projection; targets are the
/// parameter pairs themselves.
fn biexp_with(
    params: &mut ChaCha8Rng,
    noise: &mut ChaCha8Rng,
    m: usize,
    snr_db: Option<f64>,
) -> Result<SphericalDataset> {
    let mut points = Array2::zeros((m, BIEXP_SAMPLES + 1));
    let mut targets = Array2::zeros((m, 2));
    for i in 0..m {
        let l1 = params.random_range(BIEXP_LAMBDA1_RANGE.0..BIEXP_LAMBDA1_RANGE.1);
        let l2 = params.random_range(BIEXP_LAMBDA2_RANGE.0..BIEXP_LAMBDA2_RANGE.1);
        let mut v = biexp_transform(&biexp_curve(l1, l2));
        if let Some(snr) = snr_db {
            v = add_noise_global(&v, snr, noise);
        }
        for (j, c) in biexp_project(&v).into_iter().enumerate() {
            points[(i, j)] = c;
        }
        targets[(i, 0)] = l1;
        targets[(i, 1)] = l2;
    }
    Ok(SphericalDataset::new(points, targets)?)
}

/// Training split of the bi-exponential experiment: parameters from stream
/// 0, noise from stream 1.
pub fn gen_biexp(seed: u64, m: usize, snr_db: Option<f64>) -> Result<SphericalDataset> {
    biexp_with(
        &mut rng_stream(seed, STREAM_PARAMS),
        &mut rng_stream(seed, STREAM_NOISE),
        m,
        snr_db,
    )
}

/// Test split of the bi-exponential experiment: parameters and noise both
/// from stream 2.
pub fn gen_biexp_test(seed: u64, m: usize, snr_db: Option<f64>) -> Result<SphericalDataset> {
    let mut test = rng_stream(seed, STREAM_TEST);
    let mut test_noise = test.clone();
    // Separate the two roles within the stream by a fixed offset so the
    // parameter draws stay put when noise is toggled.
    test_noise.set_word_pos(1 << 40);
    biexp_with(&mut test, &mut test_noise, m, snr_db)
}

// ---------------------------------------------------------------------------
// Steady-state flow (two-point boundary problem) regression
// ---------------------------------------------------------------------------

/// Parameter box for the source strength `p`.
pub const DARCY_P_RANGE: (f64, f64) = (0.1, 0.25);
/// Parameter box for the conductivity exponent `s`.
pub const DARCY_S_RANGE: (f64, f64) = (1.5, 2.5);
/// Number of observation positions per solution curve.
pub const DARCY_SAMPLES: usize = 100;

/// Closed-form solution of `-(e^{-s t} y')' = p e^{-s t}` on `[0, 1]` with
/// `y(0) = 1`, `y(1) = 0`:
/// `y(t) = (C/s)(e^{s t} - 1) + (p/s) t + 1`, `C = -(p + s)/(e^s - 1)`.
pub fn darcy_solution(t: f64, p: f64, s: f64) -> f64 {
    let c = -(p + s) / s.exp_m1();
    (c / s) * (s * t).exp_m1() + (p / s) * t + 1.0
}

/// Raw observations of the flow experiment before any sphere embedding.
#[derive(Debug, Clone)]
pub struct DarcyData {
    /// The shared observation positions in `[0, 1]` (same for train and
    /// test, so one affine embedding applies to both).
    pub t_grid: Vec<f64>,
    /// One solution curve per row, sampled on `t_grid` (noisy when an SNR
    /// target was set).
    pub rows: Array2<f64>,
    /// True `(p, s)` per row.
    pub params: Array2<f64>,
}

/// The observation grid: [`DARCY_SAMPLES`] uniform draws from `[0, 1)` on
/// stream 0, fixed before any parameter draw.
fn darcy_grid(seed: u64) -> (Vec<f64>, ChaCha8Rng) {
    let mut params = rng_stream(seed, STREAM_PARAMS);
    let t_grid = (0..DARCY_SAMPLES)
        .map(|_| params.random_range(0.0..1.0))
        .collect();
    (t_grid, params)
}

fn darcy_with(
    t_grid: Vec<f64>,
    params: &mut ChaCha8Rng,
    noise: &mut ChaCha8Rng,
    m: usize,
    snr_db: Option<f64>,
) -> DarcyData {
    let mut rows = Array2::zeros((m, DARCY_SAMPLES));
    let mut out_params = Array2::zeros((m, 2));
    for i in 0..m {
        let p = params.random_range(DARCY_P_RANGE.0..DARCY_P_RANGE.1);
        let s = params.random_range(DARCY_S_RANGE.0..DARCY_S_RANGE.1);
        let mut v: Vec<f64> = t_grid.iter().map(|&t| darcy_solution(t, p, s)).collect();
        if let Some(snr) = snr_db {
            v = add_noise_global(&v, snr, noise);
        }
        for (j, c) in v.into_iter().enumerate() {
            rows[(i, j)] = c;
        }
        out_params[(i, 0)] = p;
        out_params[(i, 1)] = s;
    }
    DarcyData {
        t_grid,
        rows,
        params: out_params,
    }
}

/// Training split of the flow experiment: observation grid and parameters
/// from stream 0, noise from stream 1.
pub fn gen_darcy(seed: u64, m: usize, snr_db: Option<f64>) -> DarcyData {
    let (t_grid, mut params) = darcy_grid(seed);
    darcy_with(
        t_grid,
        &mut params,
        &mut rng_stream(seed, STREAM_NOISE),
        m,
        snr_db,
    )
}

/// Test split of the flow experiment: same observation grid as training,
/// parameters and noise from stream 2.
pub fn gen_darcy_test(seed: u64, m: usize, snr_db: Option<f64>) -> DarcyData {
    let (t_grid, _) = darcy_grid(seed);
    let mut test = rng_stream(seed, STREAM_TEST);
    let mut test_noise = test.clone();
    test_noise.set_word_pos(1 << 40);
    darcy_with(t_grid, &mut test, &mut test_noise, m, snr_db)
}
