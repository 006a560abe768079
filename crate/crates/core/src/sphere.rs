//! Training-free kernel regression and density estimation for data living on
//! an unknown low-dimensional subset of a high-dimensional unit sphere.
//!
//! The estimator is a plain weighted average: with training pairs (y_j, z_j)
//! and the localized zonal kernel `Phi_{n,q}` of [`crate::orthopoly`],
//!
//! ```text
//! F_n(x)   = (1/M) sum_j z_j Phi_{n,q}(x . y_j)        (raw)
//! f_n(x)   = F_n(x) / D_n(x)                           (normalized)
//! D_n(x)   = (1/M) sum_j Phi_{n,q}(x . y_j)            (density estimate)
//! ```
//!
//! No training phase, no linear solve: adding a sample is O(1) and the
//! estimate concentrates on the data manifold because the kernel does.
//! The manifold dimension q acts as a hyperparameter of the kernel rather
//! than something that must be estimated first.

use crate::error::{Error, Result};
use crate::orthopoly::SphericalKernel;

use ndarray::{Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;

/// Tolerance for the unit-norm invariant of stored points.
const UNIT_NORM_TOL: f64 = 1e-10;

/// Training data on a sphere: M unit vectors with one target vector each.
#[derive(Debug, Clone)]
pub struct SphericalDataset {
    points: Array2<f64>,
    targets: Array2<f64>,
}

impl SphericalDataset {
    /// Builds a dataset from an M x (Q+1) matrix of unit vectors and an
    /// M x T matrix of targets (T >= 1; scalar targets are T = 1).
    pub fn new(points: Array2<f64>, targets: Array2<f64>) -> Result<Self> {
        let m = points.nrows();
        if m == 0 {
            return Err(Error::InvalidArgument(
                "dataset needs at least one sample".into(),
            ));
        }
        if targets.nrows() != m {
            return Err(Error::InvalidArgument(format!(
                "point/target row mismatch: {m} vs {}",
                targets.nrows()
            )));
        }
        if targets.ncols() == 0 {
            return Err(Error::InvalidArgument(
                "targets need at least one component".into(),
            ));
        }
        for (j, row) in points.rows().into_iter().enumerate() {
            let norm = row.dot(&row).sqrt();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::InvalidArgument(format!(
                    "point {j} has norm {norm}, expected 1 within {UNIT_NORM_TOL:e}"
                )));
            }
        }
        Ok(Self { points, targets })
    }

    /// Number of samples M.
    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    /// Whether the dataset is empty (never true for a constructed value).
    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    /// Ambient sphere dimension Q (points live in R^{Q+1}).
    pub fn ambient_dim(&self) -> usize {
        self.points.ncols() - 1
    }

    /// Number of target components T.
    pub fn target_dim(&self) -> usize {
        self.targets.ncols()
    }

    /// The point matrix, M x (Q+1).
    pub fn points(&self) -> ArrayView2<'_, f64> {
        self.points.view()
    }

    /// The target matrix, M x T.
    pub fn targets(&self) -> ArrayView2<'_, f64> {
        self.targets.view()
    }
}

/// Hyperparameters of the kernel estimator.
#[derive(Debug, Clone, Copy)]
pub struct EstimatorConfig {
    /// Kernel degree n >= 1; larger n localizes harder.
    pub n: usize,
    /// Kernel dimension parameter q >= 1. The theory ties it to the
    /// intrinsic dimension of the data manifold, but in practice it is a
    /// free hyperparameter.
    pub q: usize,
    /// Divide by the density estimate (the ratio form); `false` returns the
    /// raw kernel average.
    pub normalize: bool,
}

impl EstimatorConfig {
    /// Validates `n >= 1` and `q >= 1`.
    pub fn new(n: usize, q: usize, normalize: bool) -> Result<Self> {
        if n == 0 || q == 0 {
            return Err(Error::InvalidArgument(
                "estimator needs kernel degree n >= 1 and dimension q >= 1".into(),
            ));
        }
        Ok(Self { n, q, normalize })
    }
}

/// A dataset bound to a kernel, ready to answer point and batch queries.
#[derive(Debug)]
pub struct FnEstimator<'a> {
    data: &'a SphericalDataset,
    config: EstimatorConfig,
    kernel: SphericalKernel,
}

impl<'a> FnEstimator<'a> {
    /// Binds `data` to the kernel described by `config`.
    pub fn new(data: &'a SphericalDataset, config: EstimatorConfig) -> Result<Self> {
        let kernel = SphericalKernel::new(config.n, config.q)?;
        Ok(Self {
            data,
            config,
            kernel,
        })
    }

    /// The kernel in use.
    pub fn kernel(&self) -> &SphericalKernel {
        &self.kernel
    }

    fn check_probe(&self, x: ArrayView1<'_, f64>) -> Result<()> {
        if x.len() != self.data.points.ncols() {
            return Err(Error::InvalidArgument(format!(
                "probe has {} components, points have {}",
                x.len(),
                self.data.points.ncols()
            )));
        }
        let norm = x.dot(&x).sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidArgument(format!(
                "probe has norm {norm}, expected 1 within {UNIT_NORM_TOL:e}"
            )));
        }
        Ok(())
    }

    /// Kernel weights `Phi_{n,q}(x . y_j)` for every training point.
    ///
    /// Dot products of two vectors that are unit only to 1e-10 can stray up
    /// to ~2e-10 outside [-1,1]; that roundoff is clamped here.
    fn weights(&self, x: ArrayView1<'_, f64>) -> Vec<f64> {
        self.data
            .points
            .rows()
            .into_iter()
            .map(|y| {
                let t = x.dot(&y).clamp(-1.0, 1.0);
                self.kernel.eval(t).expect("clamped dot product is valid")
            })
            .collect()
    }

    /// The density estimate `D_n(x) = (1/M) sum_j Phi_{n,q}(x . y_j)`.
    pub fn density(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        self.check_probe(x)?;
        let w = self.weights(x);
        Ok(w.iter().sum::<f64>() / self.data.len() as f64)
    }

    /// The estimate at one probe point, componentwise over targets.
    ///
    /// In normalized mode a nonpositive density estimate means the probe is
    /// effectively outside the data support; that is reported as an
    /// undefined-point error rather than a 0/0 value, so callers can decide
    /// their own fallback.
    pub fn estimate(&self, x: ArrayView1<'_, f64>) -> Result<Vec<f64>> {
        self.check_probe(x)?;
        let w = self.weights(x);
        let m = self.data.len() as f64;
        let mut out: Vec<f64> = (0..self.data.target_dim())
            .map(|c| {
                self.data
                    .targets
                    .column(c)
                    .iter()
                    .zip(&w)
                    .map(|(&z, &wi)| z * wi)
                    .sum::<f64>()
                    / m
            })
            .collect();
        if self.config.normalize {
            let den = w.iter().sum::<f64>() / m;
            if den <= 0.0 {
                return Err(Error::UndefinedPoint(format!(
                    "density estimate {den:e} is nonpositive: probe is outside the data support"
                )));
            }
            for v in &mut out {
                *v /= den;
            }
        }
        Ok(out)
    }

    /// Estimates at every row of `probes` in parallel.
    pub fn estimate_batch(&self, probes: ArrayView2<'_, f64>) -> Vec<Result<Vec<f64>>> {
        (0..probes.nrows())
            .into_par_iter()
            .map(|i| self.estimate(probes.row(i)))
            .collect()
    }
}

/// One-shot form of [`FnEstimator::estimate`].
pub fn f_n_estimate(
    data: &SphericalDataset,
    config: EstimatorConfig,
    x: ArrayView1<'_, f64>,
) -> Result<Vec<f64>> {
    FnEstimator::new(data, config)?.estimate(x)
}

/// One-shot form of [`FnEstimator::density`]; targets are ignored.
pub fn density_estimate(
    data: &SphericalDataset,
    config: EstimatorConfig,
    x: ArrayView1<'_, f64>,
) -> Result<f64> {
    FnEstimator::new(data, config)?.density(x)
}

/// Maps a point of R^Q onto the upper half of S^Q: `(x, 1) / ||(x, 1)||`.
pub fn inverse_stereographic(x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len() + 1);
    out.extend_from_slice(x);
    out.push(1.0);
    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in &mut out {
        *v /= norm;
    }
    out
}

/// Center and scale of the affine sphere embedding fitted on a data matrix.
#[derive(Debug, Clone)]
pub struct SphereEmbedding {
    /// Per-feature midrange (max+min)/2.
    pub center: Vec<f64>,
    /// Largest per-feature spread max-min.
    pub scale: f64,
}

/// Fits the affine embedding on `rows` (M x Q, M >= 2) and applies it:
/// each row maps to `(row - C, r) / ||(row - C, r)||`, a unit vector in
/// R^{Q+1}, where C is the per-feature midrange and r the maximum spread.
///
/// Identical rows leave no spread to normalize by and are a
/// degenerate-data error.
pub fn affine_sphere_embed(rows: ArrayView2<'_, f64>) -> Result<(Array2<f64>, SphereEmbedding)> {
    if rows.nrows() < 2 {
        return Err(Error::InvalidArgument(
            "affine sphere embedding needs at least 2 rows".into(),
        ));
    }
    let q = rows.ncols();
    let mut center = Vec::with_capacity(q);
    let mut scale = 0.0_f64;
    for c in 0..q {
        let col = rows.column(c);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in col {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        center.push(0.5 * (hi + lo));
        scale = scale.max(hi - lo);
    }
    if scale == 0.0 {
        return Err(Error::DegenerateData(
            "all rows identical: affine sphere embedding has zero spread".into(),
        ));
    }
    let embedding = SphereEmbedding { center, scale };
    let embedded = apply_sphere_embedding(rows, &embedding);
    Ok((embedded, embedding))
}

/// Applies an already-fitted embedding to new rows (e.g. a test set mapped
/// with the training set's center and scale).
pub fn apply_sphere_embedding(rows: ArrayView2<'_, f64>, embedding: &SphereEmbedding) -> Array2<f64> {
    let (m, q) = (rows.nrows(), rows.ncols());
    let mut out = Array2::zeros((m, q + 1));
    for (i, row) in rows.rows().into_iter().enumerate() {
        let mut norm_sq = embedding.scale * embedding.scale;
        for c in 0..q {
            let v = row[c] - embedding.center[c];
            out[(i, c)] = v;
            norm_sq += v * v;
        }
        out[(i, q)] = embedding.scale;
        let norm = norm_sq.sqrt();
        for c in 0..=q {
            out[(i, c)] /= norm;
        }
    }
    out
}

/// Signal-to-noise ratio in decibels: `20 log10(||signal|| / ||noise||)`.
///
/// Zero noise returns `+inf` (a noiseless channel, not an error).
pub fn snr_db(signal: &[f64], noise: &[f64]) -> Result<f64> {
    if signal.len() != noise.len() {
        return Err(Error::InvalidArgument(format!(
            "signal and noise lengths differ: {} vs {}",
            signal.len(),
            noise.len()
        )));
    }
    let ns = noise.iter().map(|v| v * v).sum::<f64>().sqrt();
    if ns == 0.0 {
        return Ok(f64::INFINITY);
    }
    let ss = signal.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(20.0 * (ss / ns).log10())
}

/// Percent-point curve of a positive error sample: point i (sorted
/// ascending) is `(100 (i+1) / N, log10(error_i))`, read as "x percent of
/// errors are at most 10^y".
pub fn percent_point_curve(errors: &[f64]) -> Result<Vec<(f64, f64)>> {
    if errors.is_empty() {
        return Err(Error::InvalidArgument(
            "percent-point curve needs at least one error value".into(),
        ));
    }
    if let Some(&bad) = errors.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "percent-point curve needs positive errors, got {bad}"
        )));
    }
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &e)| (100.0 * (i as f64 + 1.0) / n, e.log10()))
        .collect())
}

/// Sum of relative parameter errors `sum_i |true_i - est_i| / |true_i|`.
///
/// Component order matters; no matching or sorting is applied.
pub fn combined_error(true_params: &[f64], est_params: &[f64]) -> Result<f64> {
    if true_params.len() != est_params.len() {
        return Err(Error::InvalidArgument(format!(
            "parameter lengths differ: {} vs {}",
            true_params.len(),
            est_params.len()
        )));
    }
    if let Some(&bad) = true_params.iter().find(|&&t| t == 0.0) {
        return Err(Error::InvalidArgument(format!(
            "relative error undefined for zero true component {bad}"
        )));
    }
    Ok(true_params
        .iter()
        .zip(est_params)
        .map(|(&t, &e)| (t - e).abs() / t.abs())
        .sum())
}
