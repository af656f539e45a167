//! Information-theoretic discord: entropies, numerical minimisation over
//! projective measurements, and closed forms for special families.

use nalgebra::{Matrix3, Vector3};

use crate::collective::check_collective_structure;
use crate::qstate::{pauli_decompose, DensityMatrix, Matrix2c};
use crate::{Error, Result};

const NEG_CLAMP: f64 = 1e-12;

/// Closed form and numeric values further apart than this are flagged.
pub const DISCREPANCY_TOL: f64 = 1e-4;

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy in bits of a probability vector.
///
/// Entries in `[−1e-12, 0)` are treated as zero.
pub fn entropy(p: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &x in p {
        if x < -NEG_CLAMP || !x.is_finite() {
            return Err(Error::NotAProbabilityVector(format!("entry {x:e} in {p:?}")));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > 1e-10 {
        return Err(Error::NotAProbabilityVector(format!("entries sum to {sum}")));
    }
    Ok(-p.iter().map(|&x| xlog2x(x.max(0.0))).sum::<f64>())
}

/// Entropy of the distribution `((1+r)/2, (1−r)/2)`.
pub fn binary_entropy(r: f64) -> f64 {
    let r = r.abs().min(1.0);
    -xlog2x(0.5 * (1.0 + r)) - xlog2x(0.5 * (1.0 - r))
}

fn hermitian_eigenvalues_2(m: &Matrix2c) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mean = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean + rad, mean - rad]
}

/// `S(ρ) = −Tr ρ log₂ ρ` of a two-qubit state.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let ev = rho.eigenvalues();
    // validity already admits eigenvalues down to −1e-10
    entropy(&ev.map(|x| if x > -1e-10 { x.max(0.0) } else { x }))
}

fn entropy_2(m: &Matrix2c) -> Result<f64> {
    let ev = hermitian_eigenvalues_2(m);
    entropy(&ev.map(|x| if x > -1e-10 { x.max(0.0) } else { x }))
}

/// Which qubit the projective measurement acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasuredSubsystem {
    A,
    #[default]
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    /// Polar grid points on `θ ∈ [0, π/2]` (both ends included).
    pub theta_points: usize,
    /// Azimuthal grid points on `φ ∈ [0, 2π)`.
    pub phi_points: usize,
    /// Number of best grid points refined locally.
    pub starts: usize,
    /// Objective tolerance of the local refinement.
    pub tol: f64,
    pub measured: MeasuredSubsystem,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            theta_points: 64,
            phi_points: 128,
            starts: 3,
            tol: 1e-8,
            measured: MeasuredSubsystem::B,
        }
    }
}

/// Bloch data seen from the measured side: `(unmeasured, measured, T)` with
/// `T` indexed `[unmeasured, measured]`.
#[derive(Debug, Clone, Copy)]
struct MeasurementFrame {
    free: Vector3<f64>,
    measured: Vector3<f64>,
    t: Matrix3<f64>,
}

impl MeasurementFrame {
    fn new(rho: &DensityMatrix, side: MeasuredSubsystem) -> Self {
        let d = pauli_decompose(rho);
        match side {
            MeasuredSubsystem::B => MeasurementFrame {
                free: d.x,
                measured: d.y,
                t: d.t,
            },
            MeasuredSubsystem::A => MeasurementFrame {
                free: d.y,
                measured: d.x,
                t: d.t.transpose(),
            },
        }
    }

    /// `Σ_± p_± S(ρ_{free|±})` for the projectors `(1 ± n·σ)/2`.
    fn objective(&self, n: &Vector3<f64>) -> f64 {
        let yn = self.measured.dot(n);
        let tn = self.t * n;
        let mut total = 0.0;
        for s in [1.0, -1.0] {
            let w = 1.0 + s * yn;
            if w <= 1e-15 {
                continue;
            }
            let r = (self.free + tn * s).norm() / w;
            total += 0.5 * w * binary_entropy(r);
        }
        total
    }
}

fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

fn tangent_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if n.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = n.cross(&helper).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

/// Compass search on the sphere, steps taken in the local tangent plane.
fn compass_refine(f: &dyn Fn(&Vector3<f64>) -> f64, start: Vector3<f64>, step0: f64, tol: f64) -> (Vector3<f64>, f64) {
    let mut n = start;
    let mut best = f(&n);
    let mut step = step0;
    // objective error scales with step², so this floor meets `tol`
    let min_step = (tol * 1e-2).sqrt().min(1e-5);
    let mut iterations = 0;
    while step > min_step && iterations < 20_000 {
        iterations += 1;
        let (e1, e2) = tangent_basis(&n);
        let mut improved = None;
        for d in [e1, -e1, e2, -e2] {
            let cand = (n + d * step).normalize();
            let v = f(&cand);
            if v < best - 1e-16 && improved.is_none_or(|(_, bv)| v < bv) {
                improved = Some((cand, v));
            }
        }
        match improved {
            Some((cand, v)) => {
                n = cand;
                best = v;
            }
            None => step *= 0.5,
        }
    }
    (n, best)
}

/// Conditional entropy `Σ_k p_k S(ρ_{free|k})` for measurement along `n`.
pub fn conditional_entropy(rho: &DensityMatrix, n: &Vector3<f64>, side: MeasuredSubsystem) -> f64 {
    MeasurementFrame::new(rho, side).objective(&n.normalize())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoDiscord {
    pub value: f64,
    /// Optimal measurement axis (defined up to sign).
    pub direction: Vector3<f64>,
    pub min_conditional_entropy: f64,
    pub mutual_information: f64,
}

/// Discord `I(ρ) − max_Π J(ρ|Π)` with rank-one projective measurements on one
/// qubit, minimised by a deterministic grid followed by compass refinement.
pub fn info_discord_numeric(rho: &DensityMatrix, opts: &OptimizerOptions) -> Result<InfoDiscord> {
    let report = rho.validate();
    if !report.passed() {
        return Err(Error::NonPhysicalParams(report.to_string()));
    }
    if opts.theta_points < 2 || opts.phi_points < 1 {
        return Err(Error::InvalidArgument("optimizer grid too small".into()));
    }
    let frame = MeasurementFrame::new(rho, opts.measured);
    let objective = |n: &Vector3<f64>| frame.objective(n);

    let dtheta = std::f64::consts::FRAC_PI_2 / (opts.theta_points - 1) as f64;
    let dphi = 2.0 * std::f64::consts::PI / opts.phi_points as f64;
    let mut grid: Vec<(f64, usize, Vector3<f64>)> = Vec::with_capacity(opts.theta_points * opts.phi_points);
    for i in 0..opts.theta_points {
        let theta = i as f64 * dtheta;
        // the pole is a single direction
        let phis = if i == 0 { 1 } else { opts.phi_points };
        for j in 0..phis {
            let n = direction(theta, j as f64 * dphi);
            grid.push((objective(&n), grid.len(), n));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let step0 = dtheta.min(dphi);
    let mut best: Option<(Vector3<f64>, f64)> = None;
    for &(_, _, n) in grid.iter().take(opts.starts.max(1)) {
        let (m, v) = compass_refine(&objective, n, step0, opts.tol);
        if best.is_none_or(|(_, bv)| v < bv) {
            best = Some((m, v));
        }
    }
    let (dir, min_cond) = best.expect("grid is non-empty");

    let (s_free, s_measured) = match opts.measured {
        MeasuredSubsystem::B => (entropy_2(&rho.reduced_a())?, entropy_2(&rho.reduced_b())?),
        MeasuredSubsystem::A => (entropy_2(&rho.reduced_b())?, entropy_2(&rho.reduced_a())?),
    };
    let s_joint = von_neumann_entropy(rho)?;
    let mutual = s_free + s_measured - s_joint;
    let raw = s_measured - s_joint + min_cond;
    let upper = s_free.min(s_measured) + 1e-9;
    Ok(InfoDiscord {
        value: raw.clamp(0.0, upper),
        direction: dir,
        min_conditional_entropy: min_cond,
        mutual_information: mutual,
    })
}

/// Closed form for Bell-diagonal states:
/// `D = 1 − S(ρ) + h(c)` with `c = max|c_i|` and `h` the binary entropy.
pub fn bell_diagonal_info_discord(c: &crate::qstate::BellDiagonalParams) -> Result<f64> {
    let s = entropy(&c.spectrum())?;
    let cmax = c.as_array().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(1.0 - s + binary_entropy(cmax))
}

/// `H(x) = −(1−x)log₂(1−x) − (1+x)log₂(1+x)` exactly as used by the
/// collective closed form (no ½ weights). Arguments are clamped to `[−1, 1]`.
pub fn collective_h(x: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    -xlog2x(1.0 - x) - xlog2x(1.0 + x)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CollectiveDiscordTerms {
    pub c: f64,
    pub r: f64,
    pub u_plus: f64,
    pub u_minus: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub s_zero: f64,
    pub m_plus: f64,
    pub m_minus: f64,
    pub n_plus: f64,
    pub n_minus: f64,
}

impl CollectiveDiscordTerms {
    /// `(s₀, s₊, s₋)`
    pub fn s_branches(&self) -> [f64; 3] {
        [self.s_zero, self.s_plus, self.s_minus]
    }
}

/// `x log₂(x/y)` with the `x = 0` limit.
fn xlog2ratio(x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (x / y).log2()
    }
}

/// Closed-form discord of the collective family, evaluated term by term:
///
/// `D′ = 1 + H(R) + min{s₀, s₊, s₋} − Σ_± (u± log₂ u± + v± log₂ v±)`
///
/// with `u± = (1 − C ± 4ρ₂₃)/4`, `v± = (1 + C ± 2√(R² + |ρ₁₄|²))/4`,
/// `s± = 1 + H(√(R² + λ±))`, and
/// `s₀ = −Σ_± [m±/4 · log₂(m±/n±) + (1−C)/4 · log₂((1−C)/n±)]`,
/// `m± = (1 + C ± 2R)/4`, `n± = 2(1 ± R)`.
pub fn info_discord_collective(rho: &DensityMatrix) -> Result<(f64, CollectiveDiscordTerms)> {
    check_collective_structure(rho)?;
    let rho11 = rho.entry(0, 0).re;
    let rho22 = rho.entry(1, 1).re;
    let rho23 = rho.entry(1, 2).re;
    let abs14 = rho.entry(0, 3).norm();
    let c = 1.0 - 4.0 * rho22;
    let r = 2.0 * rho11 + 2.0 * rho22 - 1.0;
    let lambda_plus = 4.0 * (rho23 - abs14).powi(2);
    let lambda_minus = 4.0 * (rho23 + abs14).powi(2);

    let u_plus = 0.25 * (1.0 - c + 4.0 * rho23);
    let u_minus = 0.25 * (1.0 - c - 4.0 * rho23);
    let root = (r * r + abs14 * abs14).sqrt();
    let v_plus = 0.25 * (1.0 + c + 2.0 * root);
    let v_minus = 0.25 * (1.0 + c - 2.0 * root);

    let s_plus = 1.0 + collective_h((r * r + lambda_plus).sqrt());
    let s_minus = 1.0 + collective_h((r * r + lambda_minus).sqrt());

    let m_plus = 0.25 * (1.0 + c + 2.0 * r);
    let m_minus = 0.25 * (1.0 + c - 2.0 * r);
    let n_plus = 2.0 * (1.0 + r);
    let n_minus = 2.0 * (1.0 - r);
    let s_zero = -[(m_plus, n_plus), (m_minus, n_minus)]
        .iter()
        .map(|&(m, n)| 0.25 * xlog2ratio(m, n) + 0.25 * xlog2ratio(1.0 - c, n))
        .sum::<f64>();

    let s_min = s_zero.min(s_plus).min(s_minus);
    let d = 1.0 + collective_h(r) + s_min - (xlog2x(u_plus) + xlog2x(u_minus) + xlog2x(v_plus) + xlog2x(v_minus));
    Ok((
        d,
        CollectiveDiscordTerms {
            c,
            r,
            u_plus,
            u_minus,
            v_plus,
            v_minus,
            lambda_plus,
            lambda_minus,
            s_plus,
            s_minus,
            s_zero,
            m_plus,
            m_minus,
            n_plus,
            n_minus,
        },
    ))
}

/// Per-term comparison of the collective closed form with exact quantities
/// of the same state.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct CollectiveTermDefects {
    /// Largest gap between the sorted `(u±, v±)` and the spectrum of `ρ`.
    pub eigenvalues: f64,
    /// `|1 + H(R) − S(ρ_B)|`
    pub marginal_entropy: f64,
    /// `|−Σ(u log₂ u + v log₂ v) + S(ρ)|`, the term that should equal `−S(ρ)`.
    pub joint_entropy: f64,
    /// `|min s − min_n E(n)|` against the numerical minimum.
    pub conditional_entropy: f64,
}

impl CollectiveTermDefects {
    pub fn max(&self) -> f64 {
        self.eigenvalues
            .max(self.marginal_entropy)
            .max(self.joint_entropy)
            .max(self.conditional_entropy)
    }

    /// Elementwise maximum.
    pub fn merge(self, o: Self) -> Self {
        CollectiveTermDefects {
            eigenvalues: self.eigenvalues.max(o.eigenvalues),
            marginal_entropy: self.marginal_entropy.max(o.marginal_entropy),
            joint_entropy: self.joint_entropy.max(o.joint_entropy),
            conditional_entropy: self.conditional_entropy.max(o.conditional_entropy),
        }
    }
}

/// Audits each closed-form sub-term; `min_conditional_entropy` comes from
/// [`info_discord_numeric`] with B measured.
pub fn collective_term_defects(
    rho: &DensityMatrix,
    terms: &CollectiveDiscordTerms,
    min_conditional_entropy: f64,
) -> Result<CollectiveTermDefects> {
    let mut uv = [terms.u_plus, terms.u_minus, terms.v_plus, terms.v_minus];
    uv.sort_by(|a, b| a.total_cmp(b));
    let spectrum = rho.eigenvalues();
    let eigenvalues = uv
        .iter()
        .zip(spectrum.iter())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let s_b = entropy_2(&rho.reduced_b())?;
    let s_joint = von_neumann_entropy(rho)?;
    let uv_term = -uv.iter().map(|&x| xlog2x(x.max(0.0))).sum::<f64>();
    let s_min = terms.s_zero.min(terms.s_plus).min(terms.s_minus);
    Ok(CollectiveTermDefects {
        eigenvalues,
        marginal_entropy: (1.0 + collective_h(terms.r) - s_b).abs(),
        joint_entropy: (uv_term + s_joint).abs(),
        conditional_entropy: (s_min - min_conditional_entropy).abs(),
    })
}

/// Closed form next to the numeric minimisation for the same state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveDiscordAudit {
    pub closed_form: f64,
    pub numeric: f64,
    pub terms: CollectiveDiscordTerms,
    pub term_defects: CollectiveTermDefects,
    /// `|closed_form − numeric| > DISCREPANCY_TOL`
    pub discrepant: bool,
}

pub fn compare_collective_discord(rho: &DensityMatrix, opts: &OptimizerOptions) -> Result<CollectiveDiscordAudit> {
    let (closed_form, terms) = info_discord_collective(rho)?;
    let opts = OptimizerOptions {
        measured: MeasuredSubsystem::B,
        ..*opts
    };
    let n = info_discord_numeric(rho, &opts)?;
    let numeric = n.value;
    Ok(CollectiveDiscordAudit {
        closed_form,
        numeric,
        terms,
        term_defects: collective_term_defects(rho, &terms, n.min_conditional_entropy)?,
        discrepant: (closed_form - numeric).abs() > DISCREPANCY_TOL || !closed_form.is_finite(),
    })
}
