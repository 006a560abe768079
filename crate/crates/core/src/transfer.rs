//! Lifting functions between weighted Jacobi expansions on `[0, pi]`.
//!
//! A *data space* here is the orthonormal family
//! `phi_n(theta) = (1 - cos theta)^(alpha/2 + 1/4) (1 + cos theta)^(beta/2 + 1/4) p_n(cos theta)`
//! built from the orthonormal Jacobi polynomials of [`crate::orthopoly`];
//! these functions satisfy `integral phi_m phi_n dtheta = delta_{mn}` and
//! carry eigenvalues `lambda_n = n + (alpha + beta + 1)/2`.
//!
//! Two such spaces whose parameter gaps `a = |alpha1 - alpha2|/2` and
//! `b = |beta1 - beta2|/2` are integers connect through the matrix
//! `A_{m,n} = integral phi1_m phi2_n Omega dtheta` with
//! `Omega = (1 - cos theta)^a (1 + cos theta)^b`, which is banded:
//! `A_{m,n} = 0` when `|m - n| > 2a + 2b`. The matrix drives both the joint
//! localized kernel `sum h(l_{m,k}/n) A_{m,k} phi1_m(t1) phi2_k(t2)` with
//! joint eigenvalues `l_{m,k} = sqrt(lambda1_m^2 + lambda2_k^2)`, and the
//! lifting operator that maps coefficients measured against space 2 into a
//! smooth function expressed in space 1.
//!
//! All integrals use composite trapezoid sums on `[0, pi]` with node
//! doubling until entries stabilize; for half-integer parameters every
//! integrand is a trigonometric polynomial, so the doubling terminates
//! immediately at machine precision.

use crate::error::{Error, Result};
use crate::filter::eval_filter;
use crate::orthopoly::{jacobi_values, JacobiSystem};

use ndarray::Array2;
use rayon::prelude::*;

use std::f64::consts::PI;

/// Tolerance for the connection-matrix node-doubling loop.
const MATRIX_TOL: f64 = 1e-8;
/// Initial and maximal interval counts for that loop.
const MATRIX_INTERVALS_START: usize = 2048;
const MATRIX_INTERVALS_MAX: usize = 32768;
/// Tolerance for the coefficient-grid refinement check.
const COEFF_TOL: f64 = 1e-8;
/// Entries below this magnitude count as structural zeros of the band.
const BAND_EPS: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Data spaces
// ---------------------------------------------------------------------------

/// A weighted Jacobi family on `[0, pi]`, orthonormal under plain `dtheta`.
#[derive(Debug, Clone, Copy)]
pub struct JacobiDataSpace {
    alpha: f64,
    beta: f64,
    system: JacobiSystem,
}

impl JacobiDataSpace {
    /// Builds the space; parameters below -1/2 are rejected.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            alpha,
            beta,
            system: JacobiSystem::new(alpha, beta)?,
        })
    }

    /// First Jacobi parameter.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Second Jacobi parameter.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Eigenvalue `lambda_n = n + (alpha + beta + 1)/2`.
    pub fn lambda(&self, n: usize) -> f64 {
        self.system.lambda(n)
    }

    /// The boundary weight
    /// `(1 - cos theta)^(alpha/2 + 1/4) (1 + cos theta)^(beta/2 + 1/4)`.
    pub fn boundary_weight(&self, theta: f64) -> f64 {
        let c = theta.cos();
        (1.0 - c).powf(0.5 * self.alpha + 0.25) * (1.0 + c).powf(0.5 * self.beta + 0.25)
    }

    /// Evaluates `phi_0(theta) .. phi_{n_max}(theta)`.
    pub fn phi_values(&self, n_max: usize, theta: f64) -> Vec<f64> {
        let w = self.boundary_weight(theta);
        let mut vals = jacobi_values(&self.system, n_max, theta.cos());
        for v in &mut vals {
            *v *= w;
        }
        vals
    }

    /// Evaluates a single `phi_n(theta)`.
    pub fn phi(&self, n: usize, theta: f64) -> f64 {
        self.phi_values(n, theta)[n]
    }
}

/// Uniform sample grid `theta_j = j pi / (len - 1)`; `len` must be a power
/// of two plus one (so the grid can be halved for the refinement check).
fn validate_grid(len: usize) -> Result<()> {
    if len < 5 || !(len - 1).is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "sample grid must have 2^k + 1 >= 5 points, got {len}"
        )));
    }
    Ok(())
}

/// Coefficients `integral f phi_k dtheta` for `k = 0..=max_deg` by a
/// trapezoid sum over uniform samples of `f` (endpoints included).
fn project_with_step(
    space: &JacobiDataSpace,
    samples: &[f64],
    stride: usize,
    max_deg: usize,
) -> Vec<f64> {
    let n = (samples.len() - 1) / stride;
    let h = PI / n as f64;
    let mut coeffs = vec![0.0; max_deg + 1];
    for j in 0..=n {
        let theta = (j as f64 / n as f64) * PI;
        let weight = if j == 0 || j == n { 0.5 * h } else { h };
        let fv = samples[j * stride] * weight;
        let phis = space.phi_values(max_deg, theta);
        for (c, p) in coeffs.iter_mut().zip(&phis) {
            *c += fv * p;
        }
    }
    coeffs
}

/// Projects uniform samples of `f` onto `phi_0 .. phi_{max_deg}`, verifying
/// that halving the grid changes no coefficient by more than the tolerance.
pub fn project_onto(
    space: &JacobiDataSpace,
    samples: &[f64],
    max_deg: usize,
) -> Result<Vec<f64>> {
    validate_grid(samples.len())?;
    let fine = project_with_step(space, samples, 1, max_deg);
    let coarse = project_with_step(space, samples, 2, max_deg);
    let drift = fine
        .iter()
        .zip(&coarse)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    if drift > COEFF_TOL {
        return Err(Error::Numeric(format!(
            "sample grid too coarse: coefficients moved by {drift:.3e} under refinement"
        )));
    }
    Ok(fine)
}

/// A function given by coefficients against one data space.
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    space: JacobiDataSpace,
    coeffs: Vec<f64>,
}

impl SpectralFunction {
    /// Wraps explicit coefficients.
    pub fn new(space: JacobiDataSpace, coeffs: Vec<f64>) -> Self {
        Self { space, coeffs }
    }

    /// The expansion coefficients.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// The underlying data space.
    pub fn space(&self) -> &JacobiDataSpace {
        &self.space
    }

    /// Evaluates `sum_m c_m phi_m(theta)`.
    pub fn eval(&self, theta: f64) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let phis = self.space.phi_values(self.coeffs.len() - 1, theta);
        self.coeffs.iter().zip(&phis).map(|(c, p)| c * p).sum()
    }
}

/// Degree-`n` smoothing within a single space:
/// `sigma_n(f) = sum_m h(lambda_m / n) fhat_m phi_m`.
pub fn single_space_smooth(
    space: &JacobiDataSpace,
    samples: &[f64],
    n: usize,
) -> Result<SpectralFunction> {
    if n == 0 {
        return Err(Error::InvalidArgument("smoothing degree must be >= 1".into()));
    }
    // lambda_m >= m, so degrees above n never pass the filter.
    let mut coeffs = project_onto(space, samples, n)?;
    for (m, c) in coeffs.iter_mut().enumerate() {
        *c *= eval_filter(space.lambda(m) / n as f64);
    }
    Ok(SpectralFunction::new(*space, coeffs))
}

// ---------------------------------------------------------------------------
// Joint space
// ---------------------------------------------------------------------------

/// Two compatible data spaces with their connection matrix and joint
/// eigenvalues; immutable once constructed.
#[derive(Debug, Clone)]
pub struct JointJacobiSpace {
    space1: JacobiDataSpace,
    space2: JacobiDataSpace,
    gap_a: usize,
    gap_b: usize,
    matrix: Array2<f64>,
}

impl JointJacobiSpace {
    /// Builds the joint space with a `size x size` connection matrix
    /// (degrees `0..size` in both spaces).
    ///
    /// The parameter gaps `|alpha1 - alpha2|/2` and `|beta1 - beta2|/2`
    /// must be integers — otherwise the connection weight Omega is not a
    /// polynomial in cos theta and no banded expansion exists.
    pub fn new(space1: JacobiDataSpace, space2: JacobiDataSpace, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidArgument("matrix size must be >= 1".into()));
        }
        let gap_a = integer_gap("alpha", space1.alpha(), space2.alpha())?;
        let gap_b = integer_gap("beta", space1.beta(), space2.beta())?;
        let matrix = connection_matrix_refined(&space1, &space2, gap_a, gap_b, size)?;
        Ok(Self {
            space1,
            space2,
            gap_a,
            gap_b,
            matrix,
        })
    }

    /// The first (output-side) data space.
    pub fn space1(&self) -> &JacobiDataSpace {
        &self.space1
    }

    /// The second (coefficient-side) data space.
    pub fn space2(&self) -> &JacobiDataSpace {
        &self.space2
    }

    /// Parameter gaps `(a, b)`.
    pub fn gaps(&self) -> (usize, usize) {
        (self.gap_a, self.gap_b)
    }

    /// Band width `2a + 2b`: entries with `|m - n|` beyond it vanish.
    pub fn band_width(&self) -> usize {
        2 * self.gap_a + 2 * self.gap_b
    }

    /// Matrix dimension (largest degree + 1).
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    /// The connection matrix `A_{m,n} = integral phi1_m phi2_n Omega dtheta`.
    pub fn connection(&self) -> &Array2<f64> {
        &self.matrix
    }

    /// The connection weight `Omega(theta) = (1-cos)^a (1+cos)^b`.
    pub fn omega(&self, theta: f64) -> f64 {
        let c = theta.cos();
        (1.0 - c).powi(self.gap_a as i32) * (1.0 + c).powi(self.gap_b as i32)
    }

    /// Joint eigenvalue `l_{m,k} = sqrt(lambda1_m^2 + lambda2_k^2)`.
    pub fn joint_degree(&self, m: usize, k: usize) -> f64 {
        self.space1.lambda(m).hypot(self.space2.lambda(k))
    }

    /// The joint localized kernel
    /// `Phi_n(t1, t2) = sum_{m,k} h(l_{m,k}/n) A_{m,k} phi1_m(t1) phi2_k(t2)`,
    /// iterating only pairs inside the band with `l_{m,k} < n`.
    pub fn joint_kernel(&self, n: usize, theta1: f64, theta2: f64) -> Result<f64> {
        self.check_degree(n)?;
        check_angle(theta1)?;
        check_angle(theta2)?;
        let top = self.size() - 1;
        let v1 = self.space1.phi_values(top, theta1);
        let v2 = self.space2.phi_values(top, theta2);
        let bw = self.band_width() as isize;
        let mut sum = 0.0;
        for m in 0..=top {
            for k in 0..=top {
                if (m as isize - k as isize).abs() > bw {
                    continue;
                }
                let l = self.joint_degree(m, k);
                if l >= n as f64 {
                    continue;
                }
                sum += eval_filter(l / n as f64) * self.matrix[(m, k)] * v1[m] * v2[k];
            }
        }
        Ok(sum)
    }

    /// Lifts uniform samples of `f` (a function measured against space 2)
    /// to the degree-`n` smooth function
    /// `sigma_n(f) = sum_{m,k} h(l_{m,k}/n) A_{m,k} fhat_k phi1_m`
    /// living in space 1.
    pub fn lift(&self, samples: &[f64], n: usize) -> Result<SpectralFunction> {
        self.check_degree(n)?;
        let fhat = self.project(samples)?;
        let bw = self.band_width() as isize;
        let top = self.size() - 1;
        let mut coeffs = vec![0.0; top + 1];
        for (m, c) in coeffs.iter_mut().enumerate() {
            for (k, f) in fhat.iter().enumerate() {
                if (m as isize - k as isize).abs() > bw {
                    continue;
                }
                let l = self.joint_degree(m, k);
                if l >= n as f64 {
                    continue;
                }
                *c += eval_filter(l / n as f64) * self.matrix[(m, k)] * f;
            }
        }
        Ok(SpectralFunction::new(self.space1, coeffs))
    }

    /// Pointwise form of [`Self::lift`].
    pub fn lift_at(&self, samples: &[f64], n: usize, theta1: f64) -> Result<f64> {
        check_angle(theta1)?;
        Ok(self.lift(samples, n)?.eval(theta1))
    }

    /// Space-2 coefficients of sampled data, sized to the matrix.
    pub fn project(&self, samples: &[f64]) -> Result<Vec<f64>> {
        project_onto(&self.space2, samples, self.size() - 1)
    }

    /// The smallest factor `c*` such that lifting any space-2 polynomial of
    /// eigenvalue degree below `n0` is the same for every operator degree
    /// `>= c* n0`: with all relevant joint eigenvalues at most `c* n0 / 2`,
    /// the filter sits on its plateau and the lift reduces to the exact
    /// banded expansion.
    pub fn preservation_constant(&self, n0: usize) -> Result<f64> {
        if n0 == 0 || n0 > self.size() {
            return Err(Error::InvalidArgument(format!(
                "polynomial degree must lie in 1..={}, got {n0}",
                self.size()
            )));
        }
        let mut max_l: f64 = 0.0;
        let mut seen = false;
        for m in 0..self.size() {
            for k in 0..self.size() {
                if self.space2.lambda(k) < n0 as f64 && self.matrix[(m, k)].abs() > BAND_EPS {
                    max_l = max_l.max(self.joint_degree(m, k));
                    seen = true;
                }
            }
        }
        if !seen {
            return Err(Error::InvalidArgument(format!(
                "no space-2 degrees with eigenvalue below {n0}"
            )));
        }
        Ok(2.0 * max_l / n0 as f64)
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.size() {
            return Err(Error::InvalidArgument(format!(
                "kernel degree must lie in 1..={}, got {n}",
                self.size()
            )));
        }
        Ok(())
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if !(-1e-12..=PI + 1e-12).contains(&theta) {
        return Err(Error::InvalidArgument(format!(
            "angle {theta} outside [0, pi]"
        )));
    }
    Ok(())
}

fn integer_gap(name: &str, x1: f64, x2: f64) -> Result<usize> {
    let gap = (x1 - x2).abs() / 2.0;
    if (gap - gap.round()).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "{name} gap {} is not an even integer difference",
            x1 - x2
        )));
    }
    Ok(gap.round() as usize)
}

/// One composite-trapezoid assembly of the connection matrix.
fn connection_matrix_at(
    space1: &JacobiDataSpace,
    space2: &JacobiDataSpace,
    gap_a: usize,
    gap_b: usize,
    size: usize,
    intervals: usize,
) -> Array2<f64> {
    let top = size - 1;
    let h = PI / intervals as f64;
    (0..=intervals)
        .into_par_iter()
        .fold(
            || Array2::zeros((size, size)),
            |mut acc: Array2<f64>, j| {
                let theta = (j as f64 / intervals as f64) * PI;
                let c = theta.cos();
                let omega = (1.0 - c).powi(gap_a as i32) * (1.0 + c).powi(gap_b as i32);
                let weight = omega * if j == 0 || j == intervals { 0.5 * h } else { h };
                let v1 = space1.phi_values(top, theta);
                let v2 = space2.phi_values(top, theta);
                for (m, &p1) in v1.iter().enumerate() {
                    let wp = weight * p1;
                    for (k, &p2) in v2.iter().enumerate() {
                        acc[(m, k)] += wp * p2;
                    }
                }
                acc
            },
        )
        .reduce(|| Array2::zeros((size, size)), |a, b| a + b)
}

/// The connection matrix under node doubling until entrywise stable.
fn connection_matrix_refined(
    space1: &JacobiDataSpace,
    space2: &JacobiDataSpace,
    gap_a: usize,
    gap_b: usize,
    size: usize,
) -> Result<Array2<f64>> {
    let mut intervals = MATRIX_INTERVALS_START;
    let mut prev = connection_matrix_at(space1, space2, gap_a, gap_b, size, intervals);
    while intervals < MATRIX_INTERVALS_MAX {
        intervals *= 2;
        let cur = connection_matrix_at(space1, space2, gap_a, gap_b, size, intervals);
        let drift = (&cur - &prev)
            .iter()
            .map(|d| d.abs())
            .fold(0.0_f64, f64::max);
        if drift <= MATRIX_TOL {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Numeric(format!(
        "connection matrix did not stabilize at {MATRIX_INTERVALS_MAX} quadrature intervals"
    )))
}
