//! Direct tests of the kinetic-energy inequality
//! `int (sum |u_j|^2)^{3/2} <= K4 * sum ||grad u_j||^2`
//! on explicit orthonormal families, plus the conversion between the
//! kinetic-energy constant K and the eigenvalue-moment constant L.

use crate::error::Error;
use crate::extrapolate::neville_to_zero;
use crate::kahan::KahanSum;
use crate::special::constants;
use crate::sphere_spectrum::shell_sums;
use crate::Result;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;

/// Which built-in (or custom) family produced a ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyId {
    /// Spherical-harmonic shells `n = 1..M-1` on S^4.
    SphereShells { m: u64 },
    /// Fourier box `0 <= m_k <= M` on T^4. With the zero mode the family
    /// violates the mean-zero hypothesis; the descriptor carries the flag.
    TorusBox { m: u64, include_zero_mode: bool },
    /// Custom trigonometric family on T^4.
    Trig { members: usize, frequencies: usize },
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyId::SphereShells { m } => write!(f, "sphere-shells M={m}"),
            FamilyId::TorusBox { m, include_zero_mode: true } => {
                write!(f, "torus-box M={m} (zero mode included: hypothesis violated)")
            }
            FamilyId::TorusBox { m, include_zero_mode: false } => {
                write!(f, "torus-box M={m} (zero mode excluded)")
            }
            FamilyId::Trig { members, frequencies } => {
                write!(f, "trig family (N={members}, F={frequencies})")
            }
        }
    }
}

/// The two sides of the inequality for one family, and their ratio; the
/// ratio is a certified lower bound for the constant whenever the family
/// satisfies the mean-zero hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRatio {
    pub id: FamilyId,
    /// `int (sum_j |u_j|^2)^{3/2}`.
    pub lhs: f64,
    /// `sum_j ||grad u_j||^2`.
    pub rhs: f64,
    pub ratio: f64,
}

/// The shell family on S^4: by the addition theorem its density is the
/// constant `P(M)/(6 omega4)`, so both sides come from the exact shell sums.
pub fn sphere_shell_family(m: u64) -> Result<FamilyRatio> {
    let sums = shell_sums(m)?;
    let omega4 = constants().omega4;
    let density = sums.p as f64 / (6.0 * omega4);
    let lhs = omega4 * density.powf(1.5);
    let rhs = sums.q as f64 / 6.0;
    Ok(FamilyRatio {
        id: FamilyId::SphereShells { m },
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// The Fourier box family `e^{i m.x}/(4 pi^2)`, `0 <= m_k <= M`, on T^4.
///
/// The gradient sum `(2/3) M (M+1)^4 (2M+1)` does not see the zero mode, so
/// `rhs` is the same for both variants; the inclusive variant is flagged in
/// its descriptor because the constant mode violates the mean-zero
/// hypothesis.
pub fn torus_box_family(m: u64, include_zero_mode: bool) -> Result<FamilyRatio> {
    if m < 1 {
        return Err(Error::domain(format!("box family needs M >= 1, got {m}")));
    }
    let m_i = m as i128;
    let mode_count = (m_i + 1).pow(4) - if include_zero_mode { 0 } else { 1 };
    let volume = 16.0 * PI.powi(4);
    let density = mode_count as f64 / volume;
    let lhs = volume * density.powf(1.5);
    let rhs_exact = 2 * m_i * (m_i + 1).pow(4) * (2 * m_i + 1) / 3;
    // 2 M (M+1)^4 (2M+1) is always divisible by 3.
    debug_assert_eq!(2 * m_i * (m_i + 1).pow(4) * (2 * m_i + 1) % 3, 0);
    let rhs = rhs_exact as f64;
    Ok(FamilyRatio {
        id: FamilyId::TorusBox { m, include_zero_mode },
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// Richardson extrapolation of the box-family ratio over the given `M`
/// values (zero mode included, matching the closed form
/// `3 (M+1)^2 / (8 pi^2 M (2M+1))`).
pub fn torus_box_ratio_limit(ms: &[u64]) -> Result<f64> {
    let points: Vec<(f64, f64)> = ms
        .iter()
        .map(|&m| Ok((1.0 / m as f64, torus_box_family(m, true)?.ratio)))
        .collect::<Result<_>>()?;
    Ok(neville_to_zero(&points))
}

/// A finite family of trigonometric polynomials on T^4, each
/// `u_j = (1/4 pi^2) sum_k c_{jk} e^{i k.x}` over a shared list of nonzero
/// integer frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigFamily {
    frequencies: Vec<[i64; 4]>,
    /// Row `j` holds the coefficients of `u_j`.
    coefficients: Vec<Vec<Complex64>>,
}

/// Orthonormality tolerance on the Gram matrix.
pub const GRAM_TOLERANCE: f64 = 1e-10;

impl TrigFamily {
    /// Validates frequencies (nonzero, distinct) and orthonormality
    /// (`C C* = I` within [`GRAM_TOLERANCE`]).
    pub fn new(frequencies: Vec<[i64; 4]>, coefficients: Vec<Vec<Complex64>>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::Validation("family needs at least one frequency".into()));
        }
        if coefficients.is_empty() {
            return Err(Error::Validation("family needs at least one member".into()));
        }
        for k in &frequencies {
            if k.iter().all(|&c| c == 0) {
                return Err(Error::Validation(
                    "zero frequency breaks the mean-zero constraint".into(),
                ));
            }
        }
        for (i, a) in frequencies.iter().enumerate() {
            for b in frequencies.iter().skip(i + 1) {
                if a == b {
                    return Err(Error::Validation(format!("duplicate frequency {a:?}")));
                }
            }
        }
        for row in &coefficients {
            if row.len() != frequencies.len() {
                return Err(Error::Validation(format!(
                    "coefficient row of length {} does not match {} frequencies",
                    row.len(),
                    frequencies.len()
                )));
            }
        }
        let family = TrigFamily { frequencies, coefficients };
        let dev = family.gram_deviation();
        if dev > GRAM_TOLERANCE {
            return Err(Error::Validation(format!(
                "family is not orthonormal: Gram deviation {dev:.3e} exceeds {GRAM_TOLERANCE:.0e}"
            )));
        }
        Ok(family)
    }

    /// Builds a family from arbitrary coefficient rows by modified
    /// Gram-Schmidt in coefficient space.
    pub fn orthonormalized(
        frequencies: Vec<[i64; 4]>,
        mut coefficients: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        for j in 0..coefficients.len() {
            for i in 0..j {
                let proj: Complex64 = coefficients[j]
                    .iter()
                    .zip(&coefficients[i])
                    .map(|(a, b)| a * b.conj())
                    .sum();
                for f in 0..coefficients[j].len() {
                    let prev = coefficients[i][f];
                    coefficients[j][f] -= proj * prev;
                }
            }
            let norm: f64 = coefficients[j].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return Err(Error::Validation(format!(
                    "member {j} is linearly dependent on the previous ones"
                )));
            }
            for c in &mut coefficients[j] {
                *c /= norm;
            }
        }
        Self::new(frequencies, coefficients)
    }

    /// One member per frequency, `u_f = e^{i k_f . x} / (4 pi^2)`.
    pub fn single_modes(frequencies: Vec<[i64; 4]>) -> Result<Self> {
        let n = frequencies.len();
        let coefficients = (0..n)
            .map(|j| {
                (0..n)
                    .map(|f| {
                        if f == j {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(frequencies, coefficients)
    }

    /// Real-valued helpers: for each listed `k`, two members proportional to
    /// `cos(k.x)` and `sin(k.x)`.
    pub fn cosine_sine_family(ks: &[[i64; 4]]) -> Result<Self> {
        let mut frequencies = Vec::with_capacity(2 * ks.len());
        for k in ks {
            frequencies.push(*k);
            frequencies.push([-k[0], -k[1], -k[2], -k[3]]);
        }
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let mut coefficients = Vec::with_capacity(2 * ks.len());
        for (i, _) in ks.iter().enumerate() {
            let mut cos_row = vec![Complex64::new(0.0, 0.0); frequencies.len()];
            cos_row[2 * i] = Complex64::new(inv_sqrt2, 0.0);
            cos_row[2 * i + 1] = Complex64::new(inv_sqrt2, 0.0);
            coefficients.push(cos_row);
            let mut sin_row = vec![Complex64::new(0.0, 0.0); frequencies.len()];
            sin_row[2 * i] = Complex64::new(0.0, -inv_sqrt2);
            sin_row[2 * i + 1] = Complex64::new(0.0, inv_sqrt2);
            coefficients.push(sin_row);
        }
        Self::new(frequencies, coefficients)
    }

    pub fn frequencies(&self) -> &[[i64; 4]] {
        &self.frequencies
    }

    pub fn members(&self) -> usize {
        self.coefficients.len()
    }

    /// Largest deviation of the Gram matrix `C C*` from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in self.coefficients.iter().enumerate() {
                let inner: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((inner - target).norm());
            }
        }
        worst
    }

    /// `sum_j sum_k |k|^2 |c_{jk}|^2`, exact in coefficient space.
    pub fn gradient_sum(&self) -> f64 {
        let mut acc = KahanSum::new();
        for row in &self.coefficients {
            for (k, c) in self.frequencies.iter().zip(row) {
                let norm_sq = k.iter().map(|&x| (x * x) as f64).sum::<f64>();
                acc.add(norm_sq * c.norm_sqr());
            }
        }
        acc.value()
    }

    /// Smallest admissible `quad_points_per_axis` for this family.
    pub fn min_quad_points(&self) -> usize {
        (2 * self.max_frequency_component() + 2) as usize
    }

    fn max_frequency_component(&self) -> i64 {
        self.frequencies
            .iter()
            .flat_map(|k| k.iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Mean of `(sum_j |u_j|^2)^{3/2}` over the uniform grid with `g` points
    /// per axis, times the volume `(2 pi)^4`.
    fn density_power_integral(&self, g: usize) -> f64 {
        let volume = (2.0 * PI).powi(4);
        let n_freq = self.frequencies.len();
        // Per-axis phase tables: phases[a][f * g + i] = exp(i k_f[a] x_i).
        let mut phases = vec![vec![Complex64::new(0.0, 0.0); n_freq * g]; 4];
        for (a, table) in phases.iter_mut().enumerate() {
            for (f, k) in self.frequencies.iter().enumerate() {
                for (i, slot) in table[f * g..(f + 1) * g].iter_mut().enumerate() {
                    let x = 2.0 * PI * i as f64 / g as f64;
                    *slot = Complex64::from_polar(1.0, k[a] as f64 * x);
                }
            }
        }
        let norm = 1.0 / (16.0 * PI.powi(4));
        // Parallel over the outermost axis; per-slice sums are combined in
        // index order so the reduction is deterministic.
        let slice_sums: Vec<f64> = (0..g)
            .into_par_iter()
            .map(|i1| {
                let mut acc = KahanSum::new();
                let mut mode = vec![Complex64::new(0.0, 0.0); n_freq];
                for i2 in 0..g {
                    for i3 in 0..g {
                        for i4 in 0..g {
                            for f in 0..n_freq {
                                mode[f] = phases[0][f * g + i1]
                                    * phases[1][f * g + i2]
                                    * phases[2][f * g + i3]
                                    * phases[3][f * g + i4];
                            }
                            let mut density = 0.0;
                            for row in &self.coefficients {
                                let mut u = Complex64::new(0.0, 0.0);
                                for (c, e) in row.iter().zip(&mode) {
                                    u += c * e;
                                }
                                density += u.norm_sqr();
                            }
                            acc.add((density * norm).powf(1.5));
                        }
                    }
                }
                acc.value()
            })
            .collect();
        let mean = KahanSum::sum_iter(slice_sums) / (g as f64).powi(4);
        volume * mean
    }
}

/// Grid cap for the quadrature refinement.
const MAX_GRID: usize = 128;

/// Evaluates the inequality on a trigonometric family: the gradient side is
/// exact in coefficient space; the density side uses tensor-product
/// trapezoid quadrature (spectrally accurate for periodic integrands),
/// refined by grid doubling until two grids agree to 1e-8 relative.
pub fn trig_family_ratio(family: &TrigFamily, quad_points_per_axis: usize) -> Result<FamilyRatio> {
    let dev = family.gram_deviation();
    if dev > GRAM_TOLERANCE {
        return Err(Error::Validation(format!(
            "Gram deviation {dev:.3e} exceeds {GRAM_TOLERANCE:.0e}"
        )));
    }
    let threshold = (2 * family.max_frequency_component() + 2) as usize;
    if quad_points_per_axis < threshold {
        return Err(Error::domain(format!(
            "need at least {threshold} quadrature points per axis, got {quad_points_per_axis}"
        )));
    }
    let rhs = family.gradient_sum();
    let mut g = quad_points_per_axis;
    let mut lhs = family.density_power_integral(g);
    loop {
        let g_next = g * 2;
        if g_next > MAX_GRID {
            return Err(Error::NonConvergent(format!(
                "density quadrature still moving at {g} points per axis"
            )));
        }
        let refined = family.density_power_integral(g_next);
        if (refined - lhs).abs() <= 1e-8 * refined.abs() {
            lhs = refined;
            break;
        }
        lhs = refined;
        g = g_next;
    }
    Ok(FamilyRatio {
        id: FamilyId::Trig {
            members: family.members(),
            frequencies: family.frequencies.len(),
        },
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}

/// Converts the kinetic-energy constant K into the eigenvalue-moment
/// constant L through
/// `((1 + d/2) L)^(1 + 2/d) ((1 + 2/d) K)^(1 + d/2) = 1`.
pub fn dual_constant(k: f64, d: u32) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::domain(format!("dual constant needs K > 0, got {k}")));
    }
    if d < 1 {
        return Err(Error::domain("dimension must be >= 1"));
    }
    let d = d as f64;
    let half = 1.0 + d / 2.0;
    let inv = 1.0 + 2.0 / d;
    Ok(((inv * k).powf(-half / inv)) / half)
}

/// Inverse of [`dual_constant`]: recovers K from L through the same
/// relation.
pub fn dual_constant_inverse(l: f64, d: u32) -> Result<f64> {
    if !(l > 0.0) {
        return Err(Error::domain(format!("dual constant needs L > 0, got {l}")));
    }
    if d < 1 {
        return Err(Error::domain("dimension must be >= 1"));
    }
    let d = d as f64;
    let half = 1.0 + d / 2.0;
    let inv = 1.0 + 2.0 / d;
    Ok(((half * l).powf(-inv / half)) / inv)
}

/// Parses the structured-text family format:
///
/// ```text
/// # optional comments
/// frequencies
/// 1 0 0 0
/// -1 0 0 0
/// coefficients
/// 0.70710678118654752 0.0   0.70710678118654752 0.0
/// ```
///
/// Each coefficient row holds `2F` decimals (re/im pairs, row-major).
pub fn parse_trig_family(text: &str) -> Result<TrigFamily> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Frequencies,
        Coefficients,
    }
    let mut section = Section::None;
    let mut frequencies: Vec<[i64; 4]> = Vec::new();
    let mut coefficients: Vec<Vec<Complex64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "frequencies" => {
                section = Section::Frequencies;
                continue;
            }
            "coefficients" => {
                section = Section::Coefficients;
                continue;
            }
            _ => {}
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match section {
            Section::None => {
                return Err(Error::Parse(format!(
                    "line {}: expected a 'frequencies' or 'coefficients' header",
                    lineno + 1
                )));
            }
            Section::Frequencies => {
                if fields.len() != 4 {
                    return Err(Error::Parse(format!(
                        "line {}: a frequency needs 4 integers",
                        lineno + 1
                    )));
                }
                let mut k = [0_i64; 4];
                for (slot, field) in k.iter_mut().zip(&fields) {
                    *slot = field.parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad integer '{field}'", lineno + 1))
                    })?;
                }
                frequencies.push(k);
            }
            Section::Coefficients => {
                if fields.len() != 2 * frequencies.len() {
                    return Err(Error::Parse(format!(
                        "line {}: expected {} re/im values, got {}",
                        lineno + 1,
                        2 * frequencies.len(),
                        fields.len()
                    )));
                }
                let mut row = Vec::with_capacity(frequencies.len());
                for pair in fields.chunks(2) {
                    let re: f64 = pair[0].parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad decimal '{}'", lineno + 1, pair[0]))
                    })?;
                    let im: f64 = pair[1].parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad decimal '{}'", lineno + 1, pair[1]))
                    })?;
                    row.push(Complex64::new(re, im));
                }
                coefficients.push(row);
            }
        }
    }
    TrigFamily::new(frequencies, coefficients)
}
