//! Exact spectral data of the Laplace-Beltrami operator on S^4 and the
//! shell-sum route to the sphere lower bound.
//!
//! The eigenvalues on S^d are `n(n+d-1)` with multiplicities
//! `C(d+n, n) - C(d+n-2, n-2)`. Summing multiplicities and weighted
//! multiplicities over the shells `n = 1..M-1` gives exact integers
//! `P(M) = 6 * sum alpha_n` and `Q(M) = 6 * sum Lambda_n alpha_n`, and the
//! ratio `P^3 / (6 omega4 Q^2)` is a lower bound for `K4(S^4)^2` at every
//! admissible `M`.

use crate::error::Error;
use crate::extrapolate::neville_to_zero;
use crate::special::constants;
use crate::Result;

/// One eigenspace of `-Delta` on S^d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereShell {
    pub dim: u32,
    pub degree: u32,
    /// `n (n + d - 1)`, exact.
    pub eigenvalue: i128,
    /// `C(d+n, n) - C(d+n-2, n-2)`, exact.
    pub multiplicity: i128,
}

/// Exact shell sums `P = 6 sum_{n=1}^{M-1} alpha_n` and
/// `Q = 6 sum_{n=1}^{M-1} Lambda_n alpha_n` on S^4.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShellSums {
    pub m: u64,
    pub p: i128,
    pub q: i128,
}

fn binomial(n: u64, k: u64) -> Result<i128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as i128)
            .ok_or_else(|| Error::range(format!("binomial({n}, {k}) overflows i128")))?;
        acc /= (i + 1) as i128;
    }
    Ok(acc)
}

/// Eigenvalue and multiplicity of the degree-`n` shell on S^d.
pub fn shell(d: u32, n: u32) -> Result<SphereShell> {
    if d < 2 {
        return Err(Error::domain(format!("sphere dimension must be >= 2, got {d}")));
    }
    let eigenvalue = n as i128 * (n as i128 + d as i128 - 1);
    let lead = binomial((d + n) as u64, n as u64)?;
    let sub = if n >= 2 {
        binomial((d + n - 2) as u64, (n - 2) as u64)?
    } else {
        0
    };
    Ok(SphereShell {
        dim: d,
        degree: n,
        eigenvalue,
        multiplicity: lead - sub,
    })
}

/// Exact shell sums over degrees `1..M-1` on S^4.
///
/// Overflow-free for `M` up to at least 10^6 (i128 arithmetic; checked
/// beyond that).
pub fn shell_sums(m: u64) -> Result<ShellSums> {
    if m < 2 {
        return Err(Error::domain(format!("shell sums need M >= 2, got {m}")));
    }
    let mut p: i128 = 0;
    let mut q: i128 = 0;
    for n in 1..m as i128 {
        // 6 alpha_n = (2n+3)(n+2)(n+1) on S^4.
        let six_alpha = (2 * n + 3) * (n + 2) * (n + 1);
        p = p
            .checked_add(six_alpha)
            .ok_or_else(|| Error::range(format!("P({m}) overflows i128")))?;
        let lambda = n * (n + 3);
        q = q
            .checked_add(six_alpha.checked_mul(lambda).ok_or_else(|| {
                Error::range(format!("Q({m}) term overflows i128 at n = {n}"))
            })?)
            .ok_or_else(|| Error::range(format!("Q({m}) overflows i128")))?;
    }
    Ok(ShellSums { m, p, q })
}

/// The squared lower bound `r(M) = P(M)^3 / (6 omega4 Q(M)^2)`, computed from
/// exact integers and converted at the end. `sqrt(r(M)) <= K4(S^4)` for every
/// `M >= 2`.
pub fn lower_bound_ratio(m: u64) -> Result<f64> {
    let sums = shell_sums(m)?;
    let p = sums.p as f64;
    let q = sums.q as f64;
    Ok(p.powi(3) / (6.0 * constants().omega4 * q * q))
}

/// Closed form and extrapolated value of `lim sqrt(r(M))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundLimit {
    /// `3 / (8 sqrt(2) pi)`.
    pub closed_form: f64,
    /// Richardson extrapolation of `sqrt(r(M))` over `M in {1e3..1e6}`.
    pub extrapolated: f64,
    /// `|closed_form - extrapolated|`.
    pub disagreement: f64,
    /// False when the two routes disagree by more than 1e-4.
    pub audit_pass: bool,
}

/// Extrapolation nodes for [`lower_bound_limit`].
pub const LIMIT_NODES: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];

/// The asymptotic sphere lower bound, via the closed form `3/(8 sqrt 2 pi)`
/// and independently via Richardson extrapolation of the exact finite-`M`
/// ratios. Disagreement beyond 1e-4 is flagged, not raised.
pub fn lower_bound_limit() -> Result<LowerBoundLimit> {
    let closed_form = 3.0 / (8.0 * 2.0_f64.sqrt() * std::f64::consts::PI);
    let points: Vec<(f64, f64)> = LIMIT_NODES
        .iter()
        .map(|&m| Ok((1.0 / m as f64, lower_bound_ratio(m)?.sqrt())))
        .collect::<Result<_>>()?;
    let extrapolated = neville_to_zero(&points);
    let disagreement = (closed_form - extrapolated).abs();
    Ok(LowerBoundLimit {
        closed_form,
        extrapolated,
        disagreement,
        audit_pass: disagreement <= 1e-4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    #[test]
    fn low_degree_shells() {
        let s = shell(4, 0).unwrap();
        assert_eq!((s.eigenvalue, s.multiplicity), (0, 1));
        let s = shell(4, 1).unwrap();
        assert_eq!((s.eigenvalue, s.multiplicity), (4, 5));
        let s = shell(4, 2).unwrap();
        assert_eq!((s.eigenvalue, s.multiplicity), (10, 14));
        assert!(shell(1, 3).is_err());
    }

    #[test]
    fn multiplicity_closed_form_on_s4() {
        // alpha_n = (2n+3)(n+2)(n+1)/6 for d = 4.
        for n in 0..200_u32 {
            let s = shell(4, n).unwrap();
            let n = n as i128;
            assert_eq!(s.multiplicity, (2 * n + 3) * (n + 2) * (n + 1) / 6);
            assert_eq!(s.eigenvalue, n * (n + 3));
            if n >= 1 {
                assert!(s.multiplicity > 0);
            }
        }
    }

    #[test]
    fn first_shell_sums() {
        let s = shell_sums(2).unwrap();
        assert_eq!((s.p, s.q), (30, 120));
        let s = shell_sums(3).unwrap();
        assert_eq!((s.p, s.q), (114, 960));
        assert!(shell_sums(1).is_err());
    }

    #[test]
    fn shell_sum_increments_match_multiplicities() {
        for m in 2..1000_u64 {
            let a = shell_sums(m).unwrap();
            let b = shell_sums(m + 1).unwrap();
            let mult = shell(4, m as u32).unwrap().multiplicity;
            assert_eq!(b.p - a.p, 6 * mult, "P increment at M = {m}");
            let lambda = (m as i128) * (m as i128 + 3);
            assert_eq!(b.q - a.q, 6 * mult * lambda, "Q increment at M = {m}");
        }
    }

    /// Exact Lagrange interpolation of integer samples at integer nodes,
    /// in rational arithmetic. Used as the polynomial oracle for P and Q.
    fn interpolate_exact(nodes: &[(i128, i128)], at: i128) -> Ratio<i128> {
        let mut total = Ratio::new(0, 1);
        for (i, &(xi, yi)) in nodes.iter().enumerate() {
            let mut term = Ratio::new(yi, 1);
            for (j, &(xj, _)) in nodes.iter().enumerate() {
                if i != j {
                    term *= Ratio::new(at - xj, xi - xj);
                }
            }
            total += term;
        }
        total
    }

    #[test]
    fn shell_sums_match_interpolated_polynomials() {
        // P is a quartic and Q a sextic in M; fit them exactly from small M
        // and compare against direct summation at M = 10^4.
        let p_nodes: Vec<(i128, i128)> = (2..=6)
            .map(|m| (m as i128, shell_sums(m).unwrap().p))
            .collect();
        let q_nodes: Vec<(i128, i128)> = (2..=8)
            .map(|m| (m as i128, shell_sums(m).unwrap().q))
            .collect();
        let direct = shell_sums(10_000).unwrap();
        assert_eq!(interpolate_exact(&p_nodes, 10_000), Ratio::new(direct.p, 1));
        assert_eq!(interpolate_exact(&q_nodes, 10_000), Ratio::new(direct.q, 1));

        // The quartic itself: 2 P(M) = M^4 + 4 M^3 + 5 M^2 + 2 M - 12.
        for m in [2_i128, 3, 10, 100, 12345] {
            let p = shell_sums(m as u64).unwrap().p;
            assert_eq!(2 * p, m.pow(4) + 4 * m.pow(3) + 5 * m * m + 2 * m - 12);
        }
    }

    #[test]
    fn weyl_ratios() {
        for m in [100_u64, 1_000, 10_000, 1_000_000] {
            let s = shell_sums(m).unwrap();
            let m_f = m as f64;
            let p_ratio = s.p as f64 / m_f.powi(4);
            let q_ratio = s.q as f64 / m_f.powi(6);
            assert!(p_ratio >= 0.5 && p_ratio <= 0.5 + 4.0 / m_f, "P/M^4 = {p_ratio} at {m}");
            assert!(
                q_ratio >= 1.0 / 3.0 && q_ratio <= 1.0 / 3.0 + 4.0 / m_f,
                "Q/M^6 = {q_ratio} at {m}"
            );
        }
    }

    #[test]
    fn ratio_at_m2_from_exact_integers() {
        // P = 30, Q = 120: r(2) = 27000 / (6 omega4 14400).
        let expected = 27_000.0 / (6.0 * constants().omega4 * 14_400.0);
        let r = lower_bound_ratio(2).unwrap();
        assert!((r - expected).abs() / expected < 1e-15);
        assert!((r.sqrt() - 0.108_965_9).abs() < 1e-6);
    }

    #[test]
    fn ratio_strictly_decreasing() {
        let mut prev = lower_bound_ratio(2).unwrap();
        for m in 3..=1000 {
            let r = lower_bound_ratio(m).unwrap();
            assert!(r < prev, "r not decreasing at M = {m}");
            prev = r;
        }
    }

    #[test]
    fn limit_closed_form_and_extrapolation_agree() {
        let lim = lower_bound_limit().unwrap();
        assert!((lim.closed_form - 0.084_404_654_639_728_7).abs() < 1e-14);
        // The squared limit is 9/(128 pi^2).
        let sq = 9.0 / (128.0 * std::f64::consts::PI.powi(2));
        assert!((lim.closed_form * lim.closed_form - sq).abs() < 1e-16);
        assert!(lim.disagreement < 1e-6, "disagreement {}", lim.disagreement);
        assert!(lim.audit_pass);
    }

    #[test]
    fn finite_m_exceeds_limit() {
        // sqrt(r(2)) ~ 0.1090 is a stronger lower bound than the asymptotic
        // 0.08440; the sup over M sits at M = 2 by monotonicity.
        let lim = lower_bound_limit().unwrap();
        assert!(lower_bound_ratio(2).unwrap().sqrt() > lim.closed_form);
    }
}
