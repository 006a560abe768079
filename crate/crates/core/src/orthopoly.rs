//! Orthonormal ultraspherical and Jacobi polynomial systems, Clenshaw
//! evaluation, and the localized spherical kernel built from them.
//!
//! Both families are generated by numerically stable three-term recurrences
//! normalized so that the Gram matrix under the native weight is the
//! identity. The spherical kernel
//!
//! ```text
//! Phi_{n,q}(t) = (omega_q / omega_{q-1}) * sum_{l=0}^{n} h(l/n) p_{q,l}(1) p_{q,l}(t)
//! ```
//!
//! is a zonal function of the dot product t of two unit vectors in R^{q+1};
//! the filter h concentrates it near t = 1 while keeping near-perfect
//! reproduction of low-degree polynomials.

use crate::error::{Error, Result};
use crate::filter::eval_filter;

use statrs::function::gamma::{gamma, ln_gamma};

use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// Ultraspherical system
// ---------------------------------------------------------------------------

/// The orthonormal ultraspherical family attached to dimension `q >= 1`,
/// orthonormal on [-1, 1] with respect to the weight (1 - x^2)^(q/2 - 1).
#[derive(Debug, Clone, Copy)]
pub struct UltrasphericalSystem {
    q: usize,
}

impl UltrasphericalSystem {
    /// Builds the system for sphere dimension `q >= 1`.
    pub fn new(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("dimension q must be >= 1".into()));
        }
        Ok(Self { q })
    }

    /// The sphere dimension q.
    pub fn dimension(&self) -> usize {
        self.q
    }

    /// Forward recurrence coefficient
    /// `A_n = sqrt((n+1)(n+q-1) / ((2n+q-1)(2n+q+1)))`.
    ///
    /// The closed form is 0/0 at n = 0 for q = 1; orthonormality fixes the
    /// limit `A_0 = 1/sqrt(q+1)` for every q.
    pub fn coeff_a(&self, n: usize) -> f64 {
        let q = self.q as f64;
        if n == 0 {
            return 1.0 / (q + 1.0).sqrt();
        }
        let nf = n as f64;
        ((nf + 1.0) * (nf + q - 1.0) / ((2.0 * nf + q - 1.0) * (2.0 * nf + q + 1.0))).sqrt()
    }

    /// Forward recurrence coefficient
    /// `B_n = sqrt(n(n+q-2) / ((2n+q-1)(2n+q-3)))`.
    ///
    /// `B_0 = 0` (no p_{-1} term) and `B_1 = 1/sqrt(q+1)`, the latter again
    /// the orthonormality limit of a 0/0 in the closed form at q = 1.
    pub fn coeff_b(&self, n: usize) -> f64 {
        let q = self.q as f64;
        match n {
            0 => 0.0,
            1 => 1.0 / (q + 1.0).sqrt(),
            _ => {
                let nf = n as f64;
                (nf * (nf + q - 2.0) / ((2.0 * nf + q - 1.0) * (2.0 * nf + q - 3.0))).sqrt()
            }
        }
    }

    /// The constant polynomial `p_{q,0} = 2^{(1-q)/2} sqrt(Gamma(q)) / Gamma(q/2)`.
    pub fn p0(&self) -> f64 {
        let q = self.q as f64;
        2f64.powf(0.5 * (1.0 - q)) * gamma(q).sqrt() / gamma(0.5 * q)
    }

    /// `p_{q,n}(1)` in closed form, positive and increasing in n.
    ///
    /// Evaluated through log-gamma so that degrees in the hundreds do not
    /// overflow intermediate factorials.
    pub fn value_at_one(&self, n: usize) -> f64 {
        if n == 0 {
            return self.p0();
        }
        let q = self.q as f64;
        let nf = n as f64;
        let log_sq = ln_gamma(nf + q - 1.0) + (2.0 * nf + q - 1.0).ln() - ln_gamma(nf + 1.0);
        2f64.powf(0.5 * (1.0 - q)) / gamma(0.5 * q) * (0.5 * log_sq).exp()
    }

    /// Clenshaw-shaped recurrence coefficients `a_k = 1/A_{k-1}` and
    /// `b_k = -B_{k-1}/A_{k-1}` for k = 1..=n_terms, index 0 unused.
    ///
    /// These rewrite the orthonormal recurrence as
    /// `p_k = a_k x p_{k-1} + b_k p_{k-2}`, the shape [`clenshaw_eval`]
    /// expects; `b_1 = 0` holds automatically since `B_0 = 0`.
    pub fn clenshaw_coeffs(&self, n_terms: usize) -> (Vec<f64>, Vec<f64>) {
        let mut a = vec![0.0; n_terms + 1];
        let mut b = vec![0.0; n_terms + 1];
        for k in 1..=n_terms {
            let ak = self.coeff_a(k - 1);
            a[k] = 1.0 / ak;
            b[k] = -self.coeff_b(k - 1) / ak;
        }
        (a, b)
    }
}

/// Evaluates `p_{q,0}(x) .. p_{q,n_max}(x)` by the forward recurrence
/// `p_{n+1} = (x p_n - B_n p_{n-1}) / A_n`.
///
/// The recurrence is initialized from the orthonormality-consistent constants
/// `p_{q,0}` and `p_{q,1}(x) = sqrt(q+1) x p_{q,0}`. Intended for |x| <= 1;
/// the recurrence itself is defined for all real x.
pub fn ultraspherical_values(system: &UltrasphericalSystem, n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let p0 = system.p0();
    out.push(p0);
    if n_max == 0 {
        return out;
    }
    out.push((x * p0 - system.coeff_b(0) * 0.0) / system.coeff_a(0));
    for n in 1..n_max {
        let next = (x * out[n] - system.coeff_b(n) * out[n - 1]) / system.coeff_a(n);
        out.push(next);
    }
    out
}

// ---------------------------------------------------------------------------
// Jacobi system
// ---------------------------------------------------------------------------

/// The orthonormal Jacobi family with parameters `alpha, beta >= -1/2`,
/// orthonormal on [-1, 1] with respect to (1-x)^alpha (1+x)^beta.
#[derive(Debug, Clone, Copy)]
pub struct JacobiSystem {
    alpha: f64,
    beta: f64,
}

impl JacobiSystem {
    /// Builds the system; parameters below -1/2 are rejected.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= -0.5 && beta >= -0.5) {
            return Err(Error::InvalidArgument(format!(
                "Jacobi parameters must satisfy alpha, beta >= -1/2, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// The first parameter (exponent of 1-x).
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The second parameter (exponent of 1+x).
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Monic-recurrence shift `alpha_k` (mean of x under the degree-k
    /// Christoffel measure).
    fn monic_alpha(&self, k: usize) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        if k == 0 {
            return (b - a) / (a + b + 2.0);
        }
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        (b * b - a * a) / (s * (s + 2.0))
    }

    /// Monic-recurrence norm ratio `beta_k`; `beta_0` is the total weight
    /// mass. All are strictly positive for alpha, beta >= -1/2.
    fn monic_beta(&self, k: usize) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        match k {
            0 => 2f64.powf(a + b + 1.0) * gamma(a + 1.0) * gamma(b + 1.0) / gamma(a + b + 2.0),
            // k = 1 needs its own form: the general one divides by
            // 2k + alpha + beta - 1, which vanishes at alpha + beta = -1.
            1 => {
                let s = a + b + 2.0;
                4.0 * (a + 1.0) * (b + 1.0) / (s * s * (s + 1.0))
            }
            _ => {
                let kf = k as f64;
                let s = 2.0 * kf + a + b;
                4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
            }
        }
    }

    /// `p_ell(1)` in closed form through log-gamma.
    pub fn value_at_one(&self, ell: usize) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        if ell == 0 {
            // The general expression is an indeterminate 0 * inf at
            // alpha + beta = -1; the normalization constant is exact.
            return 1.0 / self.monic_beta(0).sqrt();
        }
        let lf = ell as f64;
        let log_norm_sq = (2.0 * lf + a + b + 1.0).ln() - (a + b + 1.0) * 2f64.ln()
            + ln_gamma(lf + 1.0)
            + ln_gamma(lf + a + b + 1.0)
            - ln_gamma(lf + a + 1.0)
            - ln_gamma(lf + b + 1.0);
        let log_classical = ln_gamma(lf + a + 1.0) - ln_gamma(a + 1.0) - ln_gamma(lf + 1.0);
        (0.5 * log_norm_sq + log_classical).exp()
    }

    /// The spectral parameter `lambda_ell = ell + (alpha + beta + 1)/2`,
    /// the square root of the Jacobi differential-operator eigenvalue shift.
    pub fn lambda(&self, ell: usize) -> f64 {
        ell as f64 + 0.5 * (self.alpha + self.beta + 1.0)
    }
}

/// Evaluates `p_0(x) .. p_{n_max}(x)` for the orthonormal Jacobi system.
///
/// Uses the orthonormal form of the monic three-term recurrence,
/// `p_{k+1} = ((x - alpha_k) p_k - sqrt(beta_k) p_{k-1}) / sqrt(beta_{k+1})`.
/// Intended for |x| <= 1; defined for all real x.
pub fn jacobi_values(system: &JacobiSystem, n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let p0 = 1.0 / system.monic_beta(0).sqrt();
    out.push(p0);
    if n_max == 0 {
        return out;
    }
    out.push((x - system.monic_alpha(0)) * p0 / system.monic_beta(1).sqrt());
    for k in 1..n_max {
        let next = ((x - system.monic_alpha(k)) * out[k]
            - system.monic_beta(k).sqrt() * out[k - 1])
            / system.monic_beta(k + 1).sqrt();
        out.push(next);
    }
    out
}

// ---------------------------------------------------------------------------
// Clenshaw evaluation
// ---------------------------------------------------------------------------

/// Clenshaw backward summation of `sum_{k=0}^{nn-1} coeffs[k] p_k(x)` for a
/// recurrence `p_k = a[k] x p_{k-1} + b[k] p_{k-2}` with `p_0 = p0` constant
/// and `b[1] = 0`.
///
/// `a` and `b` are 1-based views: index 0 is unused padding and both slices
/// must hold at least `coeffs.len() + 1` entries; anything shorter (or
/// unequal lengths) is an invalid-argument error. The backward pass avoids
/// storing the polynomial values and is a constant factor faster than the
/// forward recurrence followed by a dot product.
pub fn clenshaw_eval(coeffs: &[f64], a: &[f64], b: &[f64], p0: f64, x: f64) -> Result<f64> {
    let nn = coeffs.len();
    if a.len() != b.len() || a.len() < nn + 1 {
        return Err(Error::InvalidArgument(format!(
            "recurrence views need matching lengths >= {} (got a: {}, b: {})",
            nn + 1,
            a.len(),
            b.len()
        )));
    }
    if nn == 0 {
        return Ok(0.0);
    }
    let mut out1 = 0.0;
    let mut out2 = coeffs[nn - 1];
    for k in (1..=nn).rev() {
        let c = if k >= 2 { coeffs[k - 2] } else { 0.0 };
        let temp = a[k] * out1 * x + out2;
        out2 = b[k] * out1 + c;
        out1 = temp;
    }
    Ok(out1 * p0)
}

// ---------------------------------------------------------------------------
// Spherical kernel
// ---------------------------------------------------------------------------

/// Surface volume `omega_q = 2 pi^{(q+1)/2} / Gamma((q+1)/2)` of the unit
/// sphere S^q in R^{q+1}.
pub fn sphere_volume(q: usize) -> f64 {
    let qf = q as f64;
    2.0 * PI.powf(0.5 * (qf + 1.0)) / gamma(0.5 * (qf + 1.0))
}

/// The degree-n localized zonal kernel on S^q, evaluated as a function of
/// the dot product of two unit vectors.
#[derive(Debug, Clone)]
pub struct SphericalKernel {
    n: usize,
    q: usize,
    /// `C_l = (omega_q/omega_{q-1}) h(l/n) p_{q,l}(1)` for l = 0..=n; the
    /// last entry is 0 because the filter vanishes at 1.
    coeffs: Vec<f64>,
    /// Cached Clenshaw recurrence views for the ultraspherical family.
    rec_a: Vec<f64>,
    rec_b: Vec<f64>,
    p0: f64,
}

impl SphericalKernel {
    /// Builds the kernel of degree `n >= 1` on S^q, `q >= 1`.
    pub fn new(n: usize, q: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("kernel degree must be >= 1".into()));
        }
        let system = UltrasphericalSystem::new(q)?;
        let ratio = sphere_volume(q) / sphere_volume(q - 1);
        let coeffs: Vec<f64> = (0..=n)
            .map(|l| ratio * eval_filter(l as f64 / n as f64) * system.value_at_one(l))
            .collect();
        let (rec_a, rec_b) = system.clenshaw_coeffs(n + 1);
        Ok(Self {
            n,
            q,
            coeffs,
            rec_a,
            rec_b,
            p0: system.p0(),
        })
    }

    /// The kernel degree n.
    pub fn degree(&self) -> usize {
        self.n
    }

    /// The sphere dimension q.
    pub fn dimension(&self) -> usize {
        self.q
    }

    /// The Clenshaw coefficient sequence `C_0..C_n`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Evaluates `Phi_{n,q}(t)` for a dot product `t`.
    ///
    /// Values within 1e-12 outside [-1, 1] are clamped (roundoff from unit
    /// vectors); anything further out is an invalid-argument error.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t.abs() > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "dot-product argument {t} lies outside [-1, 1]"
            )));
        }
        let t = t.clamp(-1.0, 1.0);
        clenshaw_eval(&self.coeffs, &self.rec_a, &self.rec_b, self.p0, t)
    }

    /// `Phi_{n,q}(1)`, the peak value of the kernel.
    pub fn peak_value(&self) -> f64 {
        self.eval(1.0).expect("1.0 is a valid dot product")
    }
}

/// Free-function form of [`SphericalKernel::eval`].
pub fn spherical_kernel_eval(kernel: &SphericalKernel, t: f64) -> Result<f64> {
    kernel.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre_on;
    use crate::trig::TrigKernel;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Gram matrix of an orthonormal family under its theta-substituted
    /// weight, integrated on [0, pi] with Gauss-Legendre nodes.
    fn gram_deviation(
        values_at: impl Fn(f64) -> Vec<f64>,
        weight_theta: impl Fn(f64) -> f64,
        n_max: usize,
        nodes: usize,
    ) -> f64 {
        let (xs, ws) = gauss_legendre_on(nodes, 0.0, PI).unwrap();
        let mut gram = vec![vec![0.0; n_max + 1]; n_max + 1];
        for (&theta, &w) in xs.iter().zip(&ws) {
            let p = values_at(theta.cos());
            let wt = w * weight_theta(theta);
            for i in 0..=n_max {
                for j in i..=n_max {
                    gram[i][j] += wt * p[i] * p[j];
                }
            }
        }
        let mut dev = 0.0_f64;
        for i in 0..=n_max {
            for j in i..=n_max {
                let want = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((gram[i][j] - want).abs());
            }
        }
        dev
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(UltrasphericalSystem::new(0).is_err());
    }

    #[test]
    fn ultraspherical_normalization_constants() {
        let s2 = UltrasphericalSystem::new(2).unwrap();
        assert!((s2.p0() - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        let s3 = UltrasphericalSystem::new(3).unwrap();
        assert!((s3.p0() - (2.0 / PI).sqrt()).abs() < 1e-14);
        // Degree-1 value at x = 1 for q = 2.
        assert!((s2.value_at_one(1) - 1.5_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn ultraspherical_gram_is_identity() {
        // Weight (1-x^2)^{q/2-1} dx becomes (sin theta)^{q-1} d theta.
        for q in 1..=4 {
            let s = UltrasphericalSystem::new(q).unwrap();
            let dev = gram_deviation(
                |x| ultraspherical_values(&s, 20, x),
                |theta| theta.sin().powi(q as i32 - 1),
                20,
                80,
            );
            assert!(dev < 1e-8, "q = {q}: gram deviation {dev}");
        }
    }

    #[test]
    fn value_at_one_matches_recurrence() {
        for q in [1usize, 2, 3, 5] {
            let s = UltrasphericalSystem::new(q).unwrap();
            let p = ultraspherical_values(&s, 50, 1.0);
            for n in 0..=50 {
                let closed = s.value_at_one(n);
                assert!(
                    (p[n] - closed).abs() <= 1e-10 * closed.abs(),
                    "q={q} n={n}: {} vs {closed}",
                    p[n]
                );
            }
        }
    }

    #[test]
    fn value_at_one_positive_and_increasing() {
        // q = 1 is the flat case: the normalized endpoint value is
        // sqrt(2/pi) for every positive degree.
        let flat = UltrasphericalSystem::new(1).unwrap();
        let expect = (2.0 / PI).sqrt();
        for n in 1..=60 {
            assert!((flat.value_at_one(n) - expect).abs() < 1e-12 * expect, "n={n}");
        }
        for q in 2..=4 {
            let s = UltrasphericalSystem::new(q).unwrap();
            let mut prev = s.value_at_one(1);
            assert!(prev > 0.0);
            for n in 2..=60 {
                let v = s.value_at_one(n);
                assert!(v > prev, "q={q} n={n}");
                prev = v;
            }
        }
    }

    #[test]
    fn jacobi_parameter_domain() {
        assert!(JacobiSystem::new(-0.5, -0.5).is_ok());
        assert!(JacobiSystem::new(-0.6, 0.0).is_err());
        assert!(JacobiSystem::new(0.0, -0.51).is_err());
        assert!(JacobiSystem::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn jacobi_constant_matches_beta_integral() {
        // p_0 = (2^{alpha+beta+1} B(alpha+1, beta+1))^{-1/2}.
        for (a, b) in [(0.5, -0.5), (1.5, -0.5), (1.0, 1.0), (0.0, 0.0)] {
            let s = JacobiSystem::new(a, b).unwrap();
            let beta_fn = gamma(a + 1.0) * gamma(b + 1.0) / gamma(a + b + 2.0);
            let want = 1.0 / (2f64.powf(a + b + 1.0) * beta_fn).sqrt();
            let got = jacobi_values(&s, 0, 0.3)[0];
            assert!((got - want).abs() < 1e-13 * want.abs(), "({a},{b})");
        }
    }

    #[test]
    fn jacobi_gram_is_identity() {
        // Weight (1-x)^a (1+x)^b dx in theta variables is
        // 2^{a+b+1} sin(theta/2)^{2a+1} cos(theta/2)^{2b+1}, analytic for
        // the half-integer parameters used here.
        for (a, b) in [(0.0, 0.0), (0.5, -0.5), (-0.5, -0.5), (1.5, -0.5), (1.0, 1.0)] {
            let s = JacobiSystem::new(a, b).unwrap();
            let dev = gram_deviation(
                |x| jacobi_values(&s, 20, x),
                |theta| {
                    2f64.powf(a + b + 1.0)
                        * (0.5 * theta).sin().powf(2.0 * a + 1.0)
                        * (0.5 * theta).cos().powf(2.0 * b + 1.0)
                },
                20,
                80,
            );
            assert!(dev < 1e-8, "({a},{b}): gram deviation {dev}");
        }
    }

    #[test]
    fn legendre_case_matches_ultraspherical() {
        // alpha = beta = 0 is the q = 2 ultraspherical (unit-weight) family.
        let j = JacobiSystem::new(0.0, 0.0).unwrap();
        let u = UltrasphericalSystem::new(2).unwrap();
        for &x in &[-0.9, -0.3, 0.0, 0.5, 1.0] {
            let pj = jacobi_values(&j, 10, x);
            let pu = ultraspherical_values(&u, 10, x);
            for n in 0..=10 {
                assert!((pj[n] - pu[n]).abs() < 1e-10, "x={x} n={n}");
            }
        }
    }

    #[test]
    fn jacobi_value_at_one_matches_recurrence() {
        for (a, b) in [(0.5, -0.5), (1.5, -0.5), (-0.5, -0.5), (1.0, 1.0)] {
            let s = JacobiSystem::new(a, b).unwrap();
            let p = jacobi_values(&s, 10, 1.0);
            for ell in 0..=10 {
                let closed = s.value_at_one(ell);
                assert!(
                    (p[ell] - closed).abs() <= 1e-8 * closed.abs().max(1.0),
                    "({a},{b}) ell={ell}: {} vs {closed}",
                    p[ell]
                );
            }
        }
    }

    #[test]
    fn jacobi_lambda_shift() {
        let s = JacobiSystem::new(1.5, -0.5).unwrap();
        assert!((s.lambda(0) - 1.0).abs() < 1e-15);
        assert!((s.lambda(4) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn clenshaw_single_term() {
        let got = clenshaw_eval(&[2.5], &[0.0, 9.0], &[0.0, 9.0], 0.7, 0.3).unwrap();
        assert!((got - 2.5 * 0.7).abs() < 1e-15);
    }

    #[test]
    fn clenshaw_chebyshev_degree_one() {
        // T_1(x) = x with the adjusted first step a_1 = 1.
        let a = [0.0, 1.0, 2.0];
        let b = [0.0, 0.0, -1.0];
        let got = clenshaw_eval(&[0.0, 1.0], &a, &b, 1.0, 0.5).unwrap();
        assert!((got - 0.5).abs() < 1e-15);
    }

    #[test]
    fn clenshaw_matches_direct_summation() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for q in [1usize, 2, 3] {
            let s = UltrasphericalSystem::new(q).unwrap();
            let n_terms = 40;
            let (a, b) = s.clenshaw_coeffs(n_terms);
            for _ in 0..100 {
                let coeffs: Vec<f64> = (0..n_terms).map(|_| rng.random_range(-1.0..1.0)).collect();
                let x = 0.37;
                let p = ultraspherical_values(&s, n_terms - 1, x);
                let direct: f64 = coeffs.iter().zip(&p).map(|(c, v)| c * v).sum();
                let fast = clenshaw_eval(&coeffs, &a, &b, s.p0(), x).unwrap();
                assert!(
                    (fast - direct).abs() <= 1e-10 * direct.abs().max(1.0),
                    "q={q}: {fast} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn clenshaw_rejects_short_views() {
        let r = clenshaw_eval(&[1.0, 2.0, 3.0], &[0.0, 1.0, 1.0], &[0.0, 0.0, 0.0], 1.0, 0.5);
        assert!(r.is_err());
        let r = clenshaw_eval(&[1.0], &[0.0, 1.0, 1.0], &[0.0, 0.0], 1.0, 0.5);
        assert!(r.is_err());
    }

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(1) - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_volume(0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degree_one_kernel_is_constant_one() {
        for q in 1..=4 {
            let k = SphericalKernel::new(1, q).unwrap();
            for &t in &[-1.0, -0.4, 0.0, 0.8, 1.0] {
                let v = k.eval(t).unwrap();
                assert!((v - 1.0).abs() < 1e-12, "q={q} t={t}: {v}");
            }
        }
    }

    #[test]
    fn kernel_coefficient_layout() {
        let k = SphericalKernel::new(16, 2).unwrap();
        assert_eq!(k.coeffs().len(), 17);
        // The filter vanishes at l/n = 1, so the top coefficient is exactly 0.
        assert_eq!(k.coeffs()[16], 0.0);
        assert!(k.coeffs()[..16].iter().all(|&c| c > 0.0));
    }

    #[test]
    fn frozen_kernel_values_on_s2() {
        let k = SphericalKernel::new(16, 2).unwrap();
        let peak = k.eval(1.0).unwrap();
        assert!((peak - 156.9620471503311).abs() < 1e-9, "{peak}");
        let v = k.eval(0.2).unwrap();
        assert!((v - (-1.4550892831309379)).abs() < 1e-9, "{v}");
    }

    #[test]
    fn kernel_localizes_on_the_circle() {
        let k = SphericalKernel::new(50, 1).unwrap();
        let far = k.eval(1.0_f64.cos()).unwrap().abs();
        assert!(far <= 1e-2 * k.peak_value());
    }

    #[test]
    fn domain_clamp_and_rejection() {
        let k = SphericalKernel::new(8, 2).unwrap();
        // Just outside by less than the tolerance: clamped to the endpoint.
        let v = k.eval(1.0 + 1e-13).unwrap();
        assert_eq!(v, k.eval(1.0).unwrap());
        assert!(k.eval(1.0 + 1e-9).is_err());
        assert!(k.eval(-1.1).is_err());
    }

    #[test]
    fn circle_kernel_consistency() {
        // On S^1 the zonal kernel in the dot product equals the cosine-series
        // kernel in the angle.
        let trig = TrigKernel::new(24).unwrap();
        let zonal = SphericalKernel::new(24, 1).unwrap();
        let scale = trig.eval(0.0);
        for i in 0..=200 {
            let t = PI * i as f64 / 200.0;
            let a = trig.eval(t);
            let b = zonal.eval(t.cos()).unwrap();
            assert!((a - b).abs() <= 1e-10 * scale, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn circle_convolution_reproduces_low_frequencies() {
        // sigma_n f(x) = (1/(4n)) sum_j f(theta_j) Phi_{n,1}(cos(x - theta_j))
        // on 4n equispaced nodes leaves every frequency below n/2 fixed: the
        // filter plateau keeps those kernel coefficients at 1 and the
        // trapezoid rule on a full period is exact for the product.
        let n = 16usize;
        let m = 4 * n;
        let kernel = SphericalKernel::new(n, 1).unwrap();
        let nodes: Vec<f64> = (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect();
        let probes: Vec<f64> = (0..37).map(|i| -PI + 2.0 * PI * i as f64 / 37.0 + 0.05).collect();
        for k in 0..(n / 2) {
            for f in [
                Box::new(move |t: f64| (k as f64 * t).cos()) as Box<dyn Fn(f64) -> f64>,
                Box::new(move |t: f64| (k as f64 * t).sin()),
            ] {
                for &x in &probes {
                    let sigma: f64 = nodes
                        .iter()
                        .map(|&th| f(th) * kernel.eval((x - th).cos()).unwrap())
                        .sum::<f64>()
                        / m as f64;
                    assert!(
                        (sigma - f(x)).abs() < 1e-8,
                        "k={k} x={x}: {sigma} vs {}",
                        f(x)
                    );
                }
            }
        }
    }
}
