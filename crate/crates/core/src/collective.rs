//! Two identical two-level atoms coupled to a common vacuum field.
//!
//! The analytic solution for the initial state `α|ee⟩ + √(1−α²)|gg⟩` is the
//! authoritative path. [`integrate_master_equation`] integrates the master
//! equation directly and is used to cross-check it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qstate::{identity2, kron, pauli, DensityMatrix, Matrix2c, Matrix4c, Vector4c};
use crate::{Error, Result};

const DEGENERATE_COUPLING: f64 = 1e-14;
const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollectiveParams {
    /// Amplitude of `|ee⟩` in the initial state.
    pub alpha: f64,
    /// Single-atom spontaneous emission rate γ (s⁻¹).
    pub gamma: f64,
    /// Interatomic distance in units of the transition wavelength.
    pub r12: f64,
    /// Transition frequency ϖ (s⁻¹). Only the phase of ρ₁₄ depends on it.
    #[serde(default)]
    pub omega: f64,
}

impl CollectiveParams {
    pub fn new(alpha: f64, gamma: f64, r12: f64, omega: f64) -> Result<Self> {
        let p = CollectiveParams {
            alpha,
            gamma,
            r12,
            omega,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: self.alpha,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidArgument(format!("gamma = {} must be > 0", self.gamma)));
        }
        if !(self.r12 > 0.0) {
            return Err(Error::InvalidArgument(format!("r12 = {} must be > 0", self.r12)));
        }
        Ok(())
    }

    /// `k r₁₂ = 2π r₁₂/λ`.
    pub fn kr(&self) -> f64 {
        2.0 * PI * self.r12
    }
}

fn check_kr(kr: f64) -> Result<()> {
    if !(kr > 0.0) || !kr.is_finite() {
        return Err(Error::DomainError(format!("kr = {kr} must be positive and finite")));
    }
    Ok(())
}

/// Collective damping `γ₁₂ = (3γ/2)[sin(kr)/kr + cos(kr)/(kr)² − sin(kr)/(kr)³]`.
pub fn gamma_12(gamma: f64, kr: f64) -> Result<f64> {
    check_kr(kr)?;
    let (s, c) = kr.sin_cos();
    Ok(1.5 * gamma * (s / kr + c / (kr * kr) - s / (kr * kr * kr)))
}

/// Dipole-dipole potential `Ω₁₂ = (3γ/4)[sin(kr)/(kr)² + cos(kr)/(kr)³ − cos(kr)/kr]`.
pub fn omega_12(gamma: f64, kr: f64) -> Result<f64> {
    check_kr(kr)?;
    let (s, c) = kr.sin_cos();
    Ok(0.75 * gamma * (s / (kr * kr) + c / (kr * kr * kr) - c / kr))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollectiveCoefficients {
    pub gamma12: f64,
    pub omega12: f64,
    pub gamma12_plus: f64,
    pub gamma12_minus: f64,
    pub a1: f64,
    pub a2: f64,
}

impl CollectiveCoefficients {
    pub fn new(p: &CollectiveParams) -> Result<Self> {
        p.check()?;
        let kr = p.kr();
        Self::from_couplings(p.alpha, p.gamma, gamma_12(p.gamma, kr)?, omega_12(p.gamma, kr)?)
    }

    pub fn from_couplings(alpha: f64, gamma: f64, gamma12: f64, omega12: f64) -> Result<Self> {
        let plus = gamma + gamma12;
        let minus = gamma - gamma12;
        if plus.abs() < DEGENERATE_COUPLING || minus.abs() < DEGENERATE_COUPLING {
            return Err(Error::DegenerateCoupling { plus, minus });
        }
        let a2sq = alpha * alpha;
        Ok(CollectiveCoefficients {
            gamma12,
            omega12,
            gamma12_plus: plus,
            gamma12_minus: minus,
            a1: a2sq * plus / (2.0 * minus),
            a2: a2sq * minus / (2.0 * plus),
        })
    }
}

/// Analytic ρ(t) of the collective decay.
///
/// `ρ₂₂ = ρ₃₃ = a₁[e^{−γ⁺t} − e^{−2γt}] + a₂[e^{−γ⁻t} − e^{−2γt}]` and
/// `ρ₂₃` with the relative minus sign: the single-excitation symmetric and
/// antisymmetric states are fed by the `2γ` decay of `|ee⟩`.
pub fn collective_state(p: &CollectiveParams, t: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("t = {t} must be >= 0")));
    }
    let k = CollectiveCoefficients::new(p)?;
    Ok(collective_state_with(p, &k, t))
}

pub(crate) fn collective_state_with(p: &CollectiveParams, k: &CollectiveCoefficients, t: f64) -> DensityMatrix {
    let g = p.gamma;
    let alpha = p.alpha;
    let ee = (-2.0 * g * t).exp();
    let sym = k.a1 * ((-k.gamma12_plus * t).exp() - ee);
    let anti = k.a2 * ((-k.gamma12_minus * t).exp() - ee);
    let rho11 = alpha * alpha * ee;
    let rho22 = sym + anti;
    let rho23 = sym - anti;
    let rho44 = 1.0 - rho11 - 2.0 * rho22;
    let rho14 = Complex64::from_polar(
        alpha * (1.0 - alpha * alpha).sqrt() * (-g * t).exp(),
        -2.0 * p.omega * t,
    );

    let r = |x: f64| Complex64::new(x, 0.0);
    let mut m = Matrix4c::zeros();
    m[(0, 0)] = r(rho11);
    m[(1, 1)] = r(rho22);
    m[(2, 2)] = r(rho22);
    m[(3, 3)] = r(rho44);
    m[(1, 2)] = r(rho23);
    m[(2, 1)] = r(rho23);
    m[(0, 3)] = rho14;
    m[(3, 0)] = rho14.conj();
    DensityMatrix::new_unchecked(m)
}

/// Eigenvalues of `A` for the collective family, `λ± = 4(ρ₂₃ ∓ |ρ₁₄|)²`,
/// `λ₀ = C² + R²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollectiveSpectrum {
    pub plus: f64,
    pub minus: f64,
    pub zero: f64,
    /// `C = 1 − 4ρ₂₂`
    pub c: f64,
    /// `R = 2ρ₁₁ + 2ρ₂₂ − 1`
    pub r: f64,
}

impl CollectiveSpectrum {
    pub fn as_array(&self) -> [f64; 3] {
        [self.plus, self.minus, self.zero]
    }
}

/// Checks the X structure with `ρ₂₂ = ρ₃₃` and real `ρ₂₃`.
pub(crate) fn check_collective_structure(rho: &DensityMatrix) -> Result<()> {
    for (r, c) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
        let v = rho.entry(r, c).norm().max(rho.entry(c, r).norm());
        if v > STRUCTURE_TOL {
            return Err(Error::StructureMismatch(format!("entry ({r},{c}) = {v:e} is not zero")));
        }
    }
    let d = (rho.entry(1, 1) - rho.entry(2, 2)).norm();
    if d > STRUCTURE_TOL {
        return Err(Error::StructureMismatch(format!("rho22 - rho33 = {d:e}")));
    }
    let im = rho.entry(1, 2).im.abs();
    if im > STRUCTURE_TOL {
        return Err(Error::StructureMismatch(format!("rho23 has imaginary part {im:e}")));
    }
    Ok(())
}

pub fn collective_eigs_a(rho: &DensityMatrix) -> Result<CollectiveSpectrum> {
    check_collective_structure(rho)?;
    let rho11 = rho.entry(0, 0).re;
    let rho22 = rho.entry(1, 1).re;
    let rho23 = rho.entry(1, 2).re;
    let abs14 = rho.entry(0, 3).norm();
    let c = 1.0 - 4.0 * rho22;
    let r = 2.0 * rho11 + 2.0 * rho22 - 1.0;
    Ok(CollectiveSpectrum {
        plus: 4.0 * (rho23 - abs14).powi(2),
        minus: 4.0 * (rho23 + abs14).powi(2),
        zero: c * c + r * r,
        c,
        r,
    })
}

/// Factor multiplying `ϖ Σ[σᶻ_i, ρ]` in the coherent part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ZeemanConvention {
    /// `−iϖ Σ[σᶻ, ρ]` as commonly printed.
    #[default]
    Full,
    /// `−i(ϖ/2) Σ[σᶻ, ρ]`.
    Half,
}

/// Sign of the dipole-dipole Hamiltonian `±Σ_{i≠j} Ω_ij σ⁺_i σ⁻_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DipoleSign {
    #[default]
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MasterEquationOptions {
    pub zeeman: ZeemanConvention,
    pub dipole_sign: DipoleSign,
}

/// Couplings for the direct integration. `gamma12 = omega12 = 0` gives
/// independent decay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub gamma: f64,
    pub gamma12: f64,
    pub omega12: f64,
    pub varpi: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

struct Lindbladian {
    hamiltonian: Matrix4c,
    lowering: [Matrix4c; 2],
    rates: [[f64; 2]; 2],
}

impl Lindbladian {
    fn new(c: &Couplings, opts: &MasterEquationOptions) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        // σ⁻ = |g⟩⟨e| with |e⟩ first
        let sm = Matrix2c::new(zero, zero, one, zero);
        let id = identity2();
        let lowering = [kron(&sm, &id), kron(&id, &sm)];
        let sz = pauli(2);
        let zeeman = match opts.zeeman {
            ZeemanConvention::Full => c.varpi,
            ZeemanConvention::Half => 0.5 * c.varpi,
        };
        let dipole = match opts.dipole_sign {
            DipoleSign::Plus => c.omega12,
            DipoleSign::Minus => -c.omega12,
        };
        let r = |x: f64| Complex64::new(x, 0.0);
        let mut h = (kron(&sz, &id) + kron(&id, &sz)) * r(zeeman);
        h += (lowering[0].adjoint() * lowering[1] + lowering[1].adjoint() * lowering[0]) * r(dipole);
        Lindbladian {
            hamiltonian: h,
            lowering,
            rates: [[c.gamma, c.gamma12], [c.gamma12, c.gamma]],
        }
    }

    fn apply(&self, rho: &Matrix4c) -> Matrix4c {
        let i = Complex64::new(0.0, 1.0);
        let mut out = (self.hamiltonian * rho - rho * self.hamiltonian) * (-i);
        for a in 0..2 {
            for b in 0..2 {
                let g = self.rates[a][b];
                if g == 0.0 {
                    continue;
                }
                let sp_a = self.lowering[a].adjoint();
                let sm_b = &self.lowering[b];
                let n = sp_a * sm_b;
                let term = sm_b * rho * sp_a * Complex64::new(2.0, 0.0) - n * rho - rho * n;
                out += term * Complex64::new(0.5 * g, 0.0);
            }
        }
        out
    }
}

/// Fixed-step RK4 integration of the two-atom master equation from `initial`.
pub fn integrate_with_couplings(
    initial: &DensityMatrix,
    couplings: &Couplings,
    t_end: f64,
    steps: usize,
    opts: &MasterEquationOptions,
) -> Result<Trajectory> {
    if steps < 100 {
        return Err(Error::InvalidArgument(format!("steps = {steps} must be >= 100")));
    }
    if !(t_end >= 0.0) {
        return Err(Error::InvalidArgument(format!("t_end = {t_end} must be >= 0")));
    }
    let l = Lindbladian::new(couplings, opts);
    let dt = t_end / steps as f64;
    let half = Complex64::new(0.5 * dt, 0.0);
    let full = Complex64::new(dt, 0.0);
    let sixth = Complex64::new(dt / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);

    let mut rho = *initial.matrix();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(0.0);
    states.push(*initial);
    for n in 1..=steps {
        let k1 = l.apply(&rho);
        let k2 = l.apply(&(rho + k1 * half));
        let k3 = l.apply(&(rho + k2 * half));
        let k4 = l.apply(&(rho + k3 * full));
        rho += (k1 + k2 * two + k3 * two + k4) * sixth;
        let state = DensityMatrix::new_unchecked(rho);
        let drift = (rho.trace() - Complex64::new(1.0, 0.0)).norm();
        let t = n as f64 * dt;
        if drift > 1e-8 || !drift.is_finite() {
            return Err(Error::StepSizeTooLarge(format!("trace drift {drift:e} at t = {t}")));
        }
        let min_eig = state.eigenvalues()[0];
        if min_eig < -1e-8 || !min_eig.is_finite() {
            return Err(Error::StepSizeTooLarge(format!(
                "min eigenvalue {min_eig:e} at t = {t}"
            )));
        }
        times.push(t);
        states.push(state);
    }
    Ok(Trajectory { times, states })
}

/// Initial state `α|ee⟩ + √(1−α²)|gg⟩`.
pub fn collective_initial_state(alpha: f64) -> Result<DensityMatrix> {
    let r = |x: f64| Complex64::new(x, 0.0);
    DensityMatrix::from_pure(&Vector4c::new(
        r(alpha),
        r(0.0),
        r(0.0),
        r((1.0 - alpha * alpha).max(0.0).sqrt()),
    ))
}

/// Integrates the collective master equation from the pure initial state.
pub fn integrate_master_equation(
    p: &CollectiveParams,
    t_end: f64,
    steps: usize,
    opts: &MasterEquationOptions,
) -> Result<Trajectory> {
    let k = CollectiveCoefficients::new(p)?;
    let couplings = Couplings {
        gamma: p.gamma,
        gamma12: k.gamma12,
        omega12: k.omega12,
        varpi: p.omega,
    };
    integrate_with_couplings(&collective_initial_state(p.alpha)?, &couplings, t_end, steps, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fig5() -> CollectiveParams {
        CollectiveParams::new(0.9f64.sqrt(), 1.0, 0.6737, 0.0).unwrap()
    }

    #[test]
    fn coupling_values_at_fig5_distance() {
        let kr = fig5().kr();
        assert_abs_diff_eq!(kr, 4.232_981_941_446_887, epsilon = 1e-14);
        // 40-digit mpmath evaluation
        assert_abs_diff_eq!(gamma_12(1.0, kr).unwrap(), -0.335_478_808_027_043_93, epsilon = 1e-14);
        assert_abs_diff_eq!(omega_12(1.0, kr).unwrap(), 0.040_025_416_685_712_874, epsilon = 1e-14);
        assert_abs_diff_eq!(
            gamma_12(2.0, kr).unwrap(),
            2.0 * -0.335_478_808_027_043_93,
            epsilon = 1e-14
        );
    }

    #[test]
    fn coupling_limits() {
        // small-argument bracket tends to 2/3
        assert_abs_diff_eq!(gamma_12(1.0, 1e-3).unwrap(), 1.0, epsilon = 1e-6);
        assert!(gamma_12(1.0, 1e6).unwrap().abs() < 1e-5);
        assert!(omega_12(1.0, 1e6).unwrap().abs() < 1e-5);
        let kr = PI / 2.0;
        assert_abs_diff_eq!(omega_12(1.0, kr).unwrap(), 0.75 * 4.0 / (PI * PI), epsilon = 1e-15);
        assert!(matches!(gamma_12(1.0, 0.0), Err(Error::DomainError(_))));
        assert!(matches!(omega_12(1.0, 0.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn coefficient_identities() {
        let k = CollectiveCoefficients::new(&fig5()).unwrap();
        assert_abs_diff_eq!(k.gamma12_plus + k.gamma12_minus, 2.0, epsilon = 1e-15);
        assert!(k.gamma12.abs() < 1.0);
    }

    #[test]
    fn initial_state_is_pure() {
        let rho = collective_state(&fig5(), 0.0).unwrap();
        assert_abs_diff_eq!(rho.entry(0, 0).re, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(0, 3).re, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(1, 1).re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(3, 3).re, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.purity(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn long_time_limit_is_ground_state() {
        let rho = collective_state(&fig5(), 60.0).unwrap();
        assert_abs_diff_eq!(rho.entry(3, 3).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn state_at_one_lifetime_is_physical() {
        let rho = collective_state(&fig5(), 1.0).unwrap();
        assert!(rho.validate().passed(), "{}", rho.validate());
        assert!(rho.entry(1, 1).re > 0.0);
    }

    #[test]
    fn degenerate_coupling_is_rejected() {
        // γ₁₂ → γ as r → 0 makes γ⁻ vanish
        assert!(matches!(
            CollectiveCoefficients::from_couplings(0.5, 1.0, 1.0, 0.0),
            Err(Error::DegenerateCoupling { .. })
        ));
        assert!(CollectiveCoefficients::from_couplings(0.5, 1.0, 0.999, 0.0).is_ok());
    }

    #[test]
    fn spectrum_at_t0() {
        let s = collective_eigs_a(&collective_state(&fig5(), 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(s.plus, 0.36, epsilon = 1e-14);
        assert_abs_diff_eq!(s.minus, 0.36, epsilon = 1e-14);
        assert_abs_diff_eq!(s.zero, 1.64, epsilon = 1e-14);
    }

    #[test]
    fn spectrum_of_maximally_mixed() {
        let s = collective_eigs_a(&DensityMatrix::maximally_mixed()).unwrap();
        assert_eq!(s.as_array(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn spectrum_rejects_unequal_populations() {
        let mut m = *DensityMatrix::maximally_mixed().matrix();
        m[(1, 1)] = Complex64::new(0.3, 0.0);
        m[(2, 2)] = Complex64::new(0.2, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        assert!(matches!(collective_eigs_a(&rho), Err(Error::StructureMismatch(_))));
    }

    #[test]
    fn integrator_rejects_too_few_steps() {
        assert!(matches!(
            integrate_master_equation(&fig5(), 1.0, 50, &Default::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn integrator_zero_time_returns_initial() {
        let tr = integrate_master_equation(&fig5(), 0.0, 100, &Default::default()).unwrap();
        let rho = tr.states.last().unwrap();
        assert_abs_diff_eq!(rho.entry(0, 0).re, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(0, 3).re, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn integrator_independent_decay() {
        let c = Couplings {
            gamma: 0.7,
            gamma12: 0.0,
            omega12: 0.0,
            varpi: 0.0,
        };
        let init = collective_initial_state(0.9f64.sqrt()).unwrap();
        let tr = integrate_with_couplings(&init, &c, 2.0, 400, &Default::default()).unwrap();
        for (t, rho) in tr.times.iter().zip(&tr.states).step_by(40) {
            assert_abs_diff_eq!(rho.entry(0, 0).re, 0.9 * (-1.4 * t).exp(), epsilon = 1e-10);
        }
    }

    #[test]
    fn integrator_matches_analytic_solution() {
        let p = fig5();
        let steps = 3000;
        for opts in [
            MasterEquationOptions::default(),
            MasterEquationOptions {
                zeeman: ZeemanConvention::Half,
                dipole_sign: DipoleSign::Minus,
            },
        ] {
            let tr = integrate_master_equation(&p, 3.0, steps, &opts).unwrap();
            for (t, rho) in tr.times.iter().zip(&tr.states).step_by(150) {
                let exact = collective_state(&p, *t).unwrap();
                for (r, c) in [(0, 0), (1, 1), (2, 2), (3, 3), (1, 2)] {
                    assert_abs_diff_eq!(rho.entry(r, c).re, exact.entry(r, c).re, epsilon = 1e-9);
                }
                assert_abs_diff_eq!(rho.entry(0, 3).norm(), exact.entry(0, 3).norm(), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn integrator_phase_of_coherence_follows_zeeman_convention() {
        let p = CollectiveParams::new(0.9f64.sqrt(), 1.0, 0.6737, 2.0).unwrap();
        let t_end = 0.5;
        let exact = collective_state(&p, t_end).unwrap();
        let half = integrate_master_equation(
            &p,
            t_end,
            2000,
            &MasterEquationOptions {
                zeeman: ZeemanConvention::Half,
                ..Default::default()
            },
        )
        .unwrap();
        let full = integrate_master_equation(&p, t_end, 2000, &Default::default()).unwrap();
        let half14 = half.states.last().unwrap().entry(0, 3);
        let full14 = full.states.last().unwrap().entry(0, 3);
        assert!((half14 - exact.entry(0, 3)).norm() < 1e-9);
        assert_abs_diff_eq!(
            full14.arg(),
            (-4.0 * 2.0 * t_end + PI).rem_euclid(2.0 * PI) - PI,
            epsilon = 1e-9
        );
    }

    #[test]
    fn printed_single_gamma_subtraction_is_unphysical() {
        // a₁[e^{−γ⁺t} − e^{−γt}] + a₂[e^{−γ⁻t} − e^{−γt}] is negative for these parameters
        let p = fig5();
        let k = CollectiveCoefficients::new(&p).unwrap();
        let t = 1.0;
        let e = (-p.gamma * t).exp();
        let rho22 = k.a1 * ((-k.gamma12_plus * t).exp() - e) + k.a2 * ((-k.gamma12_minus * t).exp() - e);
        assert!(rho22 < 0.0);
    }
}
