//! Numerical integration primitives: Gauss-Legendre rules and composite
//! trapezoid sums with doubling refinement.
//!
//! Gauss-Legendre quadrature integrates polynomials of degree 2n-1 exactly
//! with n nodes and is used to verify Gram identities of orthogonal systems.
//! The trapezoid rule converges spectrally for smooth periodic integrands and
//! for trigonometric polynomials on a full period, which makes it the right
//! tool for the theta-substituted inner products that arise here.

use crate::error::{Error, Result};

use std::f64::consts::PI;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
///
/// Every node is found by Newton iteration on the Legendre polynomial P_n,
/// seeded with the Chebyshev-like guess `cos(pi (i - 1/4) / (n + 1/2))`,
/// which is accurate enough that a handful of iterations converge to machine
/// precision for any practical n.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "Gauss-Legendre rule needs at least one node".into(),
        ));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // Nodes come in +/- pairs; solve for the nonnegative half.
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Nodes and weights of the n-point Gauss-Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (mut x, mut w) = gauss_legendre(n)?;
    let mid = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    for v in &mut x {
        *v = mid + hw * *v;
    }
    for v in &mut w {
        *v *= hw;
    }
    Ok((x, w))
}

/// Composite trapezoid sum over equispaced samples `f(a + i h)`, i = 0..=m,
/// where `h = (b - a) / m` and `values.len() == m + 1`.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, mid @ .., last] => h * (0.5 * (first + last) + mid.iter().sum::<f64>()),
    }
}

/// Integrates `f` over [a, b] by trapezoid sums with interval doubling.
///
/// Starts from `n0` subintervals and doubles until two successive sums agree
/// within `tol` (absolute) or the subinterval count would exceed `n_max`;
/// exceeding the cap is a numeric failure. Function values are reused across
/// refinement levels, so level k costs only the new midpoint evaluations.
pub fn trapezoid_refine(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    n0: usize,
    n_max: usize,
) -> Result<f64> {
    if n0 == 0 || n_max < n0 {
        return Err(Error::InvalidArgument(
            "trapezoid refinement needs 0 < n0 <= n_max subintervals".into(),
        ));
    }
    let mut n = n0;
    let mut h = (b - a) / n as f64;
    let mut sum = trapezoid(
        &(0..=n).map(|i| f(a + i as f64 * h)).collect::<Vec<_>>(),
        h,
    );
    loop {
        if 2 * n > n_max {
            return Err(Error::Numeric(format!(
                "trapezoid refinement did not converge within {n_max} subintervals"
            )));
        }
        // Midpoint values of the current mesh refine the sum in place.
        let mid: f64 = (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum();
        let next = 0.5 * sum + 0.5 * h * mid;
        n *= 2;
        h *= 0.5;
        let done = (next - sum).abs() <= tol;
        sum = next;
        if done {
            return Ok(sum);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_nodes_rejected() {
        assert!(gauss_legendre(0).is_err());
    }

    #[test]
    fn two_point_rule_is_exact() {
        let (x, w) = gauss_legendre(2).unwrap();
        let r = 1.0 / 3.0_f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15);
        assert!((x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        assert!((w[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 5, 20, 80] {
            let (_, w) = gauss_legendre(n).unwrap();
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn integrates_high_degree_monomials_exactly() {
        // n nodes are exact through degree 2n - 1.
        let n = 12;
        let (x, w) = gauss_legendre(n).unwrap();
        for d in [0usize, 7, 15, 22, 23] {
            let got: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.powi(d as i32)).sum();
            let want = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
            assert!((got - want).abs() < 1e-13, "degree {d}: {got} vs {want}");
        }
    }

    #[test]
    fn mapped_rule_integrates_on_shifted_interval() {
        let (x, w) = gauss_legendre_on(16, 0.0, PI).unwrap();
        let got: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * xi.sin()).sum();
        assert!((got - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_matches_linear_exactly() {
        let m = 7;
        let h = 0.5;
        let vals: Vec<f64> = (0..=m).map(|i| 3.0 * (i as f64 * h) + 1.0).collect();
        let b = m as f64 * h;
        assert!((trapezoid(&vals, h) - (1.5 * b * b + b)).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_degenerate_inputs() {
        assert_eq!(trapezoid(&[], 0.1), 0.0);
        assert_eq!(trapezoid(&[5.0], 0.1), 0.0);
    }

    #[test]
    fn refinement_converges_on_smooth_integrand() {
        let got = trapezoid_refine(|x: f64| x.exp(), 0.0, 1.0, 1e-12, 8, 1 << 22).unwrap();
        assert!((got - (1.0_f64.exp() - 1.0)).abs() < 1e-10);
    }

    #[test]
    fn refinement_is_spectral_on_periodic_integrand() {
        // A full period of a trigonometric polynomial is integrated exactly
        // once the mesh resolves the highest frequency.
        let got =
            trapezoid_refine(|t: f64| (3.0 * t).cos().powi(2), 0.0, 2.0 * PI, 1e-12, 8, 1 << 12)
                .unwrap();
        assert!((got - PI).abs() < 1e-12);
    }

    #[test]
    fn refinement_cap_is_a_numeric_error() {
        let r = trapezoid_refine(|x: f64| (1.0 / (1e-6 + x * x)).sqrt(), 0.0, 1.0, 1e-14, 4, 64);
        assert!(matches!(r, Err(Error::Numeric(_))));
    }
}
