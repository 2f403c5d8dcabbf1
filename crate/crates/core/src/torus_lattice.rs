//! Lattice sums over Z^4 \ {0} for the torus upper bound: shell counts
//! r4(n), the sum of `phi(k/nu)` with `phi(x) = 1/(1+|x|^6)^2`, and the
//! Poisson-summation comparison against `nu^4 omega3 B(2/3,4/3)/6`.

use crate::error::Error;
use crate::kahan::KahanSum;
use crate::quadrature::integrate;
use crate::special::constants;
use crate::sphere_momentum::SeriesEstimate;
use crate::Result;
use std::f64::consts::PI;

/// Shell counts of the Z^4 lattice: `counts[n]` is r4(n), the number of
/// integer 4-vectors with squared norm n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeShellTable {
    pub max_norm_sq: u64,
    counts: Vec<u64>,
}

impl LatticeShellTable {
    /// r4(n); `n` must be within the table.
    pub fn r4(&self, n: u64) -> u64 {
        self.counts[n as usize]
    }

    /// Number of nonzero lattice points with squared norm at most `n`.
    pub fn cumulative(&self, n: u64) -> u64 {
        self.counts[1..=n as usize].iter().sum()
    }
}

/// r4 for all n <= max via Jacobi's theorem: `r4(n) = 8 sum_{d|n, 4 !| d} d`,
/// computed with a divisor sieve.
pub fn r4_jacobi(max_norm_sq: u64) -> Vec<u64> {
    let n = max_norm_sq as usize;
    let mut sums = vec![0_u64; n + 1];
    for d in 1..=n {
        if d % 4 == 0 {
            continue;
        }
        for m in (d..=n).step_by(d) {
            sums[m] += d as u64;
        }
    }
    let mut counts: Vec<u64> = sums.into_iter().map(|s| 8 * s).collect();
    counts[0] = 1;
    counts
}

/// r4 for all n <= max by exact enumeration: the one-dimensional square
/// counts are convolved twice, which tallies every vector of the bounding
/// box grouped by `(k1^2 + k2^2, k3^2 + k4^2)`.
pub fn r4_enumerated(max_norm_sq: u64) -> Vec<u64> {
    let n = max_norm_sq as usize;
    let mut c1 = vec![0_u64; n + 1];
    c1[0] = 1;
    let mut k = 1_usize;
    while k * k <= n {
        c1[k * k] = 2;
        k += 1;
    }
    let squares: Vec<usize> = (0..=n).filter(|&i| c1[i] != 0).collect();
    let mut r2 = vec![0_u64; n + 1];
    for &a in &squares {
        for &b in &squares {
            if a + b > n {
                break;
            }
            r2[a + b] += c1[a] * c1[b];
        }
    }
    let mut r4 = vec![0_u64; n + 1];
    for (a, &ra) in r2.iter().enumerate() {
        if ra == 0 {
            continue;
        }
        for (b, &rb) in r2.iter().take(n + 1 - a).enumerate() {
            r4[a + b] += ra * rb;
        }
    }
    r4
}

/// Largest prefix on which [`r4_table`] cross-checks the sieve against the
/// enumeration route.
pub const R4_CROSS_CHECK_LIMIT: u64 = 10_000;

/// Builds the shell table by divisor sieve, cross-checked against the
/// enumeration on the first [`R4_CROSS_CHECK_LIMIT`] shells.
pub fn r4_table(max_norm_sq: u64) -> Result<LatticeShellTable> {
    if max_norm_sq < 1 {
        return Err(Error::domain("shell table needs max_norm_sq >= 1".to_string()));
    }
    if max_norm_sq > 1 << 26 {
        return Err(Error::range(format!(
            "shell table of size {max_norm_sq} exceeds the memory budget"
        )));
    }
    let counts = r4_jacobi(max_norm_sq);
    let check_to = max_norm_sq.min(R4_CROSS_CHECK_LIMIT);
    let enumerated = r4_enumerated(check_to);
    for n in 0..=check_to as usize {
        if counts[n] != enumerated[n] {
            return Err(Error::AuditFailure(format!(
                "r4({n}): divisor formula gives {}, enumeration gives {}",
                counts[n], enumerated[n]
            )));
        }
    }
    Ok(LatticeShellTable { max_norm_sq, counts })
}

/// `phi` evaluated from the squared norm: `1/(1 + q^3)^2` with `q = |x|^2`,
/// so that `phi(|x|^2) = 1/(1+|x|^6)^2` without square roots.
pub fn phi(x_norm_sq: f64) -> f64 {
    debug_assert!(x_norm_sq >= 0.0);
    1.0 / (1.0 + x_norm_sq.powi(3)).powi(2)
}

/// Volume bound on the number of lattice points in the ball of squared
/// radius t: every unit cell around a counted point fits inside the ball of
/// radius sqrt(t) + 1.
fn ball_count_bound(t: f64) -> f64 {
    PI * PI * (t.sqrt() + 1.0).powi(4) / 2.0
}

/// Rigorous bound on the dropped tail `sum_{n > cut} r4(n) phi(n / nu^2)`,
/// by Abel summation against the ball-count bound:
/// `phi(cut/nu^2) (Cb(cut) - C(cut)) + int_cut^inf phi(t/nu^2) Cb'(t) dt`.
fn lattice_tail_bound(table: &LatticeShellTable, cut: u64, nu: f64) -> Result<f64> {
    let nu2 = nu * nu;
    let exact_count = table.cumulative(cut) as f64;
    let boundary = phi(cut as f64 / nu2) * (ball_count_bound(cut as f64) - exact_count).max(0.0);
    // Crude closed form used only to scale the quadrature tolerance.
    let crude = PI * PI * nu2.powi(6) * (1.0 + 1.0 / (cut as f64).sqrt()).powi(3)
        / (4.0 * (cut as f64).powi(4));
    let quad = integrate(
        |t| phi(t / nu2) * PI * PI * (t.sqrt() + 1.0).powi(3) / t.sqrt(),
        cut as f64,
        f64::INFINITY,
        (1e-6 * crude).max(1e-15),
    )?;
    Ok(boundary + quad.value + quad.error_estimate)
}

/// Sums `r4(n) phi(n/nu^2)` over every shell of the table (increasing n,
/// compensated) and attaches the tail bound at the table end.
pub fn lattice_sum_with_table(table: &LatticeShellTable, nu: f64) -> Result<SeriesEstimate> {
    if !(nu > 0.0) {
        return Err(Error::domain(format!("lattice sum needs nu > 0, got {nu}")));
    }
    let nu2 = nu * nu;
    let mut acc = KahanSum::new();
    for n in 1..=table.max_norm_sq {
        let r = table.r4(n);
        if r != 0 {
            acc.add(r as f64 * phi(n as f64 / nu2));
        }
    }
    Ok(SeriesEstimate {
        value: acc.value(),
        terms_used: table.max_norm_sq,
        tail_bound: lattice_tail_bound(table, table.max_norm_sq, nu)?,
        parameter: nu,
    })
}

const LATTICE_SHELL_BUDGET: u64 = 1 << 22;

/// `sum_{k in Z^4 \ 0} phi(k/nu)`, with the shell table grown until the
/// rigorous tail bound drops below `tol` (or the shell budget is reached, in
/// which case the returned `tail_bound` exceeds `tol`).
pub fn lattice_sum(nu: f64, tol: f64) -> Result<SeriesEstimate> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut size = ((16.0 * nu * nu) as u64).clamp(64, LATTICE_SHELL_BUDGET);
    loop {
        let table = r4_table(size)?;
        let estimate = lattice_sum_with_table(&table, nu)?;
        if estimate.tail_bound <= tol || size >= LATTICE_SHELL_BUDGET {
            return Ok(estimate);
        }
        size = (size * 2).min(LATTICE_SHELL_BUDGET);
    }
}

/// `int_{R^4} phi(x) dx = omega3 B(2/3,4/3) / 6`, validated against the
/// radial quadrature `omega3 int_0^inf r^3/(1+r^6)^2 dr` to 1e-10 relative.
pub fn continuum_integral() -> Result<f64> {
    let c = constants();
    let closed = c.omega3 * c.beta_2_3_4_3 / 6.0;
    let radial = integrate(
        |r| r.powi(3) / (1.0 + r.powi(6)).powi(2),
        0.0,
        f64::INFINITY,
        1e-13,
    )?;
    let quadrature = c.omega3 * radial.value;
    let agreement = (quadrature - closed).abs() / closed;
    if agreement > 1e-10 {
        return Err(Error::AuditFailure(format!(
            "continuum integral: closed form {closed} vs quadrature {quadrature}"
        )));
    }
    Ok(closed)
}

/// One Poisson-summation comparison: the lattice sum must stay below the
/// continuum value `nu^4 omega3 B/6` (their gap tends to -1 exponentially
/// fast as nu grows).
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonAudit {
    pub nu: f64,
    pub lattice_value: SeriesEstimate,
    pub continuum_value: f64,
    /// `lattice - continuum` (truncated lattice value).
    pub gap: f64,
    /// True iff `lattice + tail_bound <= continuum`.
    pub verdict: bool,
}

/// Audits the inequality at one `nu` using the given shell table.
pub fn poisson_audit_with_table(table: &LatticeShellTable, nu: f64) -> Result<PoissonAudit> {
    let continuum_factor = continuum_integral()?;
    let lattice_value = lattice_sum_with_table(table, nu)?;
    let continuum_value = nu.powi(4) * continuum_factor;
    Ok(PoissonAudit {
        nu,
        gap: lattice_value.value - continuum_value,
        verdict: lattice_value.value + lattice_value.tail_bound <= continuum_value,
        lattice_value,
        continuum_value,
    })
}

/// Audits the inequality at one `nu` with an automatically sized table.
pub fn poisson_audit(nu: f64) -> Result<PoissonAudit> {
    let continuum_factor = continuum_integral()?;
    let continuum_value = nu.powi(4) * continuum_factor;
    let tol = (0.05_f64).min(1e-6 * continuum_value).max(1e-13);
    let lattice_value = lattice_sum(nu, tol)?;
    Ok(PoissonAudit {
        nu,
        gap: lattice_value.value - continuum_value,
        verdict: lattice_value.value + lattice_value.tail_bound <= continuum_value,
        lattice_value,
        continuum_value,
    })
}

/// The torus upper bound `3 sqrt(Cbar) = sqrt(B(2/3,4/3))/9 = 0.1222...`.
pub fn torus_upper_bound() -> f64 {
    3.0 * constants().cbar.sqrt()
}
