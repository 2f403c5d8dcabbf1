//! Polynomial extrapolation of sequences with a 1/M expansion.

/// Neville's scheme evaluated at zero: given samples `(h_i, y_i)` of a
/// function with a polynomial expansion in `h`, returns the interpolating
/// polynomial's value at `h = 0`.
///
/// With nodes `h = 1/M` this is Richardson extrapolation of a sequence in
/// inverse powers of `M`.
pub fn neville_to_zero(points: &[(f64, f64)]) -> f64 {
    assert!(points.len() >= 2, "need at least two extrapolation nodes");
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let mut ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let n = points.len();
    for k in 1..n {
        for i in 0..n - k {
            ys[i] = ((0.0 - xs[i + k]) * ys[i] + xs[i] * ys[i + 1]) / (xs[i] - xs[i + k]);
        }
    }
    ys[0]
}
