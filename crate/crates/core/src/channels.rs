//! Single-qubit Kraus channels, their product action on two-qubit states and
//! the closed-form evolution of Bell-diagonal coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qstate::{identity2, kron, pauli, BellDiagonalParams, DensityMatrix, Matrix2c, Matrix4c};
use crate::{Error, Result};

pub const COMPLETENESS_TOL: f64 = 1e-12;

/// A single-qubit channel `ρ ↦ Σ_k K_k ρ K_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<Matrix2c>,
}

impl KrausChannel {
    pub fn new(operators: Vec<Matrix2c>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidArgument(
                "a channel needs at least one Kraus operator".into(),
            ));
        }
        let ch = KrausChannel { operators };
        let defect = ch.completeness_defect();
        if defect > COMPLETENESS_TOL {
            return Err(Error::IncompleteChannel { defect });
        }
        Ok(ch)
    }

    pub fn identity() -> Self {
        KrausChannel {
            operators: vec![identity2()],
        }
    }

    pub fn operators(&self) -> &[Matrix2c] {
        &self.operators
    }

    /// `max |Σ K†K − 1|` over entries.
    pub fn completeness_defect(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(Matrix2c::zeros(), |acc, k| acc + k.adjoint() * k);
        (sum - identity2()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Action on a single-qubit density matrix.
    pub fn apply_single(&self, rho: &Matrix2c) -> Matrix2c {
        self.operators
            .iter()
            .fold(Matrix2c::zeros(), |acc, k| acc + k * rho * k.adjoint())
    }
}

fn check_probability(name: &'static str, p: f64, hi: f64) -> Result<()> {
    if !(0.0..=hi).contains(&p) {
        return Err(Error::OutOfRange {
            name,
            value: p,
            lo: 0.0,
            hi,
        });
    }
    Ok(())
}

fn pauli_mixture(p: f64, k: usize) -> KrausChannel {
    let a = Complex64::new((1.0 - p / 2.0).sqrt(), 0.0);
    let b = Complex64::new((p / 2.0).sqrt(), 0.0);
    KrausChannel {
        operators: vec![identity2() * a, pauli(k) * b],
    }
}

/// `A₁ = √(1−p/2)·1`, `A₂ = √(p/2)·σ₃`.
///
/// Contracts the transverse Bloch components by `1 − p`. Values up to `p = 2`
/// are accepted: the colored-noise law overshoots 1 and the operator pair is
/// still a convex mixture of unitaries there.
pub fn phase_damping(p: f64) -> Result<KrausChannel> {
    check_probability("p", p, 2.0)?;
    Ok(pauli_mixture(p, 2))
}

/// `B₁ = √(1−q/2)·1`, `B₂ = √(q/2)·σ₁`. Contracts `b₂, b₃` by `1 − q`.
pub fn bit_flip(q: f64) -> Result<KrausChannel> {
    check_probability("q", q, 2.0)?;
    Ok(pauli_mixture(q, 0))
}

/// Amplitude damping `|e⟩ → |g⟩` with probability `p`.
///
/// The textbook pair `diag(1, √(1−p))`, `√p |0⟩⟨1|` is written for ground-first
/// ordering; in this crate's excited-first basis it reads
/// `Ã₁ = diag(√(1−p), 1)` and `Ã₂ = √p |g⟩⟨e|`.
pub fn amplitude_damping(p: f64) -> Result<KrausChannel> {
    check_probability("p", p, 1.0)?;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let k1 = Matrix2c::new(Complex64::new((1.0 - p).sqrt(), 0.0), zero, zero, one);
    let k2 = Matrix2c::new(zero, zero, Complex64::new(p.sqrt(), 0.0), zero);
    Ok(KrausChannel {
        operators: vec![k1, k2],
    })
}

/// `p = 1 − e^{−γt}`, clamped to `[0, 1]`.
pub fn markov_probability(gamma: f64, t: f64) -> f64 {
    (-(-gamma * t).exp_m1()).clamp(0.0, 1.0)
}

/// Parameters of a colored-noise (random telegraph) Pauli channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColoredNoiseParams {
    /// Coin-flip amplitude `a`.
    pub a: f64,
    /// Memory time `τ` in seconds.
    pub tau: f64,
}

impl ColoredNoiseParams {
    pub fn new(a: f64, tau: f64) -> Result<Self> {
        if !(a >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "colored-noise amplitude a = {a} must be >= 0"
            )));
        }
        if !(tau > 0.0) {
            return Err(Error::InvalidArgument(format!("memory time tau = {tau} must be > 0")));
        }
        Ok(ColoredNoiseParams { a, tau })
    }

    /// Dimensionless time `υ = t / (2τ)`.
    pub fn upsilon(&self, t: f64) -> f64 {
        t / (2.0 * self.tau)
    }
}

/// `cos(μυ)` and `sin(μυ)/μ` as functions of `m2 = μ²`, continued analytically
/// to `m2 ≤ 0`.
fn oscillator_terms(m2: f64, u: f64) -> (f64, f64) {
    let z = m2 * u * u;
    if z.abs() < 1e-6 {
        // Taylor series in z: cos = 1 − z/2 + z²/24, sin/μ = υ(1 − z/6 + z²/120)
        let cos = 1.0 - z / 2.0 + z * z / 24.0;
        let sinc = u * (1.0 - z / 6.0 + z * z / 120.0);
        (cos, sinc)
    } else if m2 > 0.0 {
        let mu = m2.sqrt();
        ((mu * u).cos(), (mu * u).sin() / mu)
    } else {
        let kappa = (-m2).sqrt();
        ((kappa * u).cosh(), (kappa * u).sinh() / kappa)
    }
}

/// `x = 1 − e^{−υ}[cos(μυ) + sin(μυ)/μ]` with `μ = √((4aτ)² − 1)` and
/// `υ = t/(2τ)`. Oscillatory for `4aτ > 1`; result clamped to `[0, 2]`.
pub fn colored_noise_probability(params: ColoredNoiseParams, t: f64) -> f64 {
    let u = params.upsilon(t);
    let s = 4.0 * params.a * params.tau;
    let m2 = s * s - 1.0;
    let (cos, sinc) = oscillator_terms(m2, u);
    let x = 1.0 - (-u).exp() * (cos + sinc);
    x.clamp(0.0, 2.0)
}

/// `Σ_{i,j} (A_i ⊗ B_j) ρ (A_i ⊗ B_j)†`.
pub fn apply_product_channel(rho: &DensityMatrix, ch_a: &KrausChannel, ch_b: &KrausChannel) -> Result<DensityMatrix> {
    let m = rho.matrix();
    let mut out = Matrix4c::zeros();
    for a in ch_a.operators() {
        for b in ch_b.operators() {
            let k = kron(a, b);
            out += k * m * k.adjoint();
        }
    }
    DensityMatrix::new(out)
}

/// Phase damping on A, bit flip on B with Markovian probabilities:
/// `c₁ = c₁₀e^{−γ₁t}`, `c₂ = c₂₀e^{−(γ₁+γ₂)t}`, `c₃ = c₃₀e^{−γ₂t}`.
pub fn evolve_bd_phase_bitflip(c0: BellDiagonalParams, gamma1: f64, gamma2: f64, t: f64) -> BellDiagonalParams {
    BellDiagonalParams::new(
        c0.c1 * (-gamma1 * t).exp(),
        c0.c2 * (-(gamma1 + gamma2) * t).exp(),
        c0.c3 * (-gamma2 * t).exp(),
    )
}

/// Phase damping on both qubits: `c₁,c₂ ∝ e^{−(γ₁+γ₂)t}`, `c₃` constant.
pub fn evolve_bd_phase_phase(c0: BellDiagonalParams, gamma1: f64, gamma2: f64, t: f64) -> BellDiagonalParams {
    let k = (-(gamma1 + gamma2) * t).exp();
    BellDiagonalParams::new(c0.c1 * k, c0.c2 * k, c0.c3)
}

/// Colored-noise phase flip on A and colored-noise bit flip on B.
pub fn evolve_bd_colored(
    c0: BellDiagonalParams,
    pa: ColoredNoiseParams,
    pb: ColoredNoiseParams,
    t: f64,
) -> BellDiagonalParams {
    let ka = 1.0 - colored_noise_probability(pa, t);
    let kb = 1.0 - colored_noise_probability(pb, t);
    BellDiagonalParams::new(c0.c1 * ka, c0.c2 * ka * kb, c0.c3 * kb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::bell_diagonal;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Bloch vector of a single-qubit state.
    fn bloch(rho: &Matrix2c) -> [f64; 3] {
        [0, 1, 2].map(|k| (rho * pauli(k)).trace().re)
    }

    fn from_bloch(b: [f64; 3]) -> Matrix2c {
        let mut m = identity2();
        for (k, bk) in b.iter().enumerate() {
            m += pauli(k) * c(*bk);
        }
        m * c(0.5)
    }

    /// Contraction factors read off the six Pauli eigenstates.
    fn contraction(ch: &KrausChannel) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let mut b = [0.0; 3];
            b[k] = 1.0;
            let plus = bloch(&ch.apply_single(&from_bloch(b)))[k];
            b[k] = -1.0;
            let minus = bloch(&ch.apply_single(&from_bloch(b)))[k];
            *o = (plus - minus) / 2.0;
        }
        out
    }

    #[test]
    fn zero_probability_channels_are_identity() {
        let rho = from_bloch([0.3, -0.2, 0.5]);
        for ch in [phase_damping(0.0), bit_flip(0.0), amplitude_damping(0.0)] {
            let out = ch.unwrap().apply_single(&rho);
            assert!((out - rho).norm() < 1e-15);
        }
    }

    #[test]
    fn full_dephasing_kills_coherences() {
        let ch = phase_damping(1.0).unwrap();
        let out = ch.apply_single(&from_bloch([0.6, 0.3, 0.2]));
        assert!(out[(0, 1)].norm() < 1e-15 && out[(1, 0)].norm() < 1e-15);
        assert_abs_diff_eq!(bloch(&out)[2], 0.2, epsilon = 1e-15);
    }

    #[test]
    fn phase_damping_contraction_half() {
        let k = contraction(&phase_damping(0.5).unwrap());
        assert_abs_diff_eq!(k[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(k[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(k[2], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bit_flip_contractions() {
        let k = contraction(&bit_flip(0.3).unwrap());
        assert_abs_diff_eq!(k[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k[1], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(k[2], 0.7, epsilon = 1e-15);
        let k = contraction(&bit_flip(1.0).unwrap());
        assert_abs_diff_eq!(k[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn amplitude_damping_half_on_excited() {
        let ch = amplitude_damping(0.5).unwrap();
        let excited = Matrix2c::new(c(1.0), c(0.0), c(0.0), c(0.0));
        let out = ch.apply_single(&excited);
        assert_abs_diff_eq!(out[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(out[(1, 1)].re, 0.5, epsilon = 1e-15);
        let full = amplitude_damping(1.0)
            .unwrap()
            .apply_single(&from_bloch([0.2, 0.1, -0.4]));
        assert_abs_diff_eq!(full[(1, 1)].re, 1.0, epsilon = 1e-15);
        assert!(full[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn probabilities_out_of_range_are_rejected() {
        assert!(matches!(phase_damping(-0.1), Err(Error::OutOfRange { .. })));
        assert!(matches!(bit_flip(2.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(amplitude_damping(1.1), Err(Error::OutOfRange { .. })));
        assert!(phase_damping(1.7).is_ok());
    }

    #[test]
    fn incomplete_operators_are_rejected() {
        let err = KrausChannel::new(vec![identity2() * c(0.9)]).unwrap_err();
        assert!(matches!(err, Error::IncompleteChannel { .. }));
    }

    #[test]
    fn markov_probability_values() {
        assert_eq!(markov_probability(0.7, 0.0), 0.0);
        assert_abs_diff_eq!(markov_probability(0.035, 1e6), 1.0, epsilon = 1e-15);
        // mpmath: 1 − e^{−0.6·0.37191}
        assert_abs_diff_eq!(
            markov_probability(0.6, 0.37191),
            0.200_001_958_946_233_77,
            epsilon = 1e-15
        );
    }

    #[test]
    fn colored_noise_values() {
        let pa = ColoredNoiseParams::new(2.0 / 3.0, 5.0).unwrap();
        let pb = ColoredNoiseParams::new(1.0 / 3.0, 5.0).unwrap();
        assert_eq!(colored_noise_probability(pa, 0.0), 0.0);
        // 40-digit mpmath evaluation of the formula at υ = 0.5
        assert_abs_diff_eq!(
            colored_noise_probability(pa, 5.0),
            0.417_090_599_637_050_6,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            colored_noise_probability(pb, 5.0),
            1.613_467_807_937_540_5,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(colored_noise_probability(pa, 500.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn colored_noise_branches_are_continuous() {
        // the hyperbolic, series and trigonometric forms meet at 4aτ = 1
        let t = 3.0;
        let at = |s: f64| colored_noise_probability(ColoredNoiseParams { a: s / 4.0, tau: 1.0 }, t);
        let critical = at(1.0);
        let u: f64 = 1.5;
        assert_abs_diff_eq!(critical, 1.0 - (-u).exp() * (1.0 + u), epsilon = 1e-14);
        assert_abs_diff_eq!(at(1.0 + 1e-9), critical, epsilon = 1e-8);
        assert_abs_diff_eq!(at(1.0 - 1e-9), critical, epsilon = 1e-8);
        // overdamped: monotone rise, no oscillation
        let xs: Vec<f64> = (0..50)
            .map(|k| colored_noise_probability(ColoredNoiseParams { a: 0.05, tau: 1.0 }, k as f64 * 0.5))
            .collect();
        assert!(xs.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn identity_product_channel_leaves_state() {
        let rho = bell_diagonal(BellDiagonalParams::new(0.3, -0.2, 0.1)).unwrap();
        let out = apply_product_channel(&rho, &KrausChannel::identity(), &KrausChannel::identity()).unwrap();
        assert!((out.matrix() - rho.matrix()).norm() < 1e-15);
    }

    #[test]
    fn phase_bitflip_product_matches_contraction_algebra() {
        let c0 = BellDiagonalParams::new(0.12, 0.13, 0.08);
        let (p, q) = (0.3, 0.45);
        let rho = bell_diagonal(c0).unwrap();
        let out = apply_product_channel(&rho, &phase_damping(p).unwrap(), &bit_flip(q).unwrap()).unwrap();
        let expected = bell_diagonal(BellDiagonalParams::new(
            (1.0 - p) * c0.c1,
            (1.0 - p) * (1.0 - q) * c0.c2,
            (1.0 - q) * c0.c3,
        ))
        .unwrap();
        assert!((out.matrix() - expected.matrix()).norm() < 1e-15);
    }

    #[test]
    fn amplitude_damping_gives_x_state() {
        let rho = bell_diagonal(BellDiagonalParams::new(0.41, 0.53, -0.57)).unwrap();
        let ch = amplitude_damping(0.3).unwrap();
        let out = apply_product_channel(&rho, &ch, &amplitude_damping(0.6).unwrap()).unwrap();
        assert_abs_diff_eq!(out.trace().re, 1.0, epsilon = 1e-14);
        for (r, col) in [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)] {
            assert!(out.entry(r, col).norm() < 1e-15);
        }
    }

    #[test]
    fn analytic_laws_start_at_c0() {
        let c0 = BellDiagonalParams::new(0.5, 0.3, 0.4);
        assert_eq!(evolve_bd_phase_bitflip(c0, 0.1, 0.2, 0.0), c0);
        assert_eq!(evolve_bd_phase_phase(c0, 0.1, 0.2, 0.0), c0);
        let p = ColoredNoiseParams::new(2.0 / 3.0, 5.0).unwrap();
        assert_eq!(evolve_bd_colored(c0, p, p, 0.0), c0);
    }

    #[test]
    fn fig1_crossing_times() {
        let c0 = BellDiagonalParams::new(0.12, 0.13, 0.08);
        let c = evolve_bd_phase_bitflip(c0, 0.035, 0.015, 5.336_180_511_569_095);
        assert_abs_diff_eq!(c.c1.abs(), c.c2.abs(), epsilon = 1e-15);
        let c = evolve_bd_phase_bitflip(c0, 0.035, 0.015, 20.273_255_405_408_22);
        assert_abs_diff_eq!(c.c1.abs(), c.c3.abs(), epsilon = 1e-15);
    }

    #[test]
    fn fig2_crossing_time() {
        let c0 = BellDiagonalParams::new(0.5, 0.3, 0.4);
        let t = (1.25f64).ln() / 0.6;
        let c = evolve_bd_phase_phase(c0, 0.45, 0.15, t);
        assert_abs_diff_eq!(c.c1, 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(c.c3, 0.4, epsilon = 0.0);
        assert_eq!(evolve_bd_phase_phase(c0, 0.45, 0.15, 17.0).c3, 0.4);
    }
}
