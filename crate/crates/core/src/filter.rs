//! The smooth bandpass filter that shapes every kernel in this crate.
//!
//! The filter is an even C-infinity function equal to 1 on [-1/2, 1/2] and 0
//! outside (-1, 1), built from the classical partition-of-unity bump
//! g(s) = exp(-1/s):
//!
//! ```text
//! h(t) = g(1 - |t|) / (g(1 - |t|) + g(|t| - 1/2))
//! ```
//!
//! All one-sided derivatives vanish at the plateau edges, which is what makes
//! the kernels built from h localize faster than any inverse power of the
//! degree times the distance.

/// The transition bump: exp(-1/s) for s > 0, identically 0 otherwise.
///
/// Arguments in the subnormal fringe are treated as zero so the quotient in
/// [`eval_filter`] stays well-defined without ever producing a NaN.
fn bump(s: f64) -> f64 {
    if s <= f64::MIN_POSITIVE {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// Evaluates the bandpass filter h at `t`.
///
/// Total on finite inputs: returns exactly 1.0 for |t| <= 1/2, exactly 0.0
/// for |t| >= 1, and a strictly decreasing smooth transition in between.
/// The value lies in [0, 1] and depends only on |t|.
pub fn eval_filter(t: f64) -> f64 {
    let u = t.abs();
    if u <= 0.5 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        let rise = bump(1.0 - u);
        let fall = bump(u - 0.5);
        rise / (rise + fall)
    }
}
