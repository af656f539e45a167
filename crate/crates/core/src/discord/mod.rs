//! Geometric and information-theoretic quantum discord of two-qubit states.

mod cubic;
mod info;

use nalgebra::Matrix3;

pub use cubic::{cubic_eigenvalues, iterative_eigenvalues, CubicSolution};
pub use info::{
    bell_diagonal_info_discord, binary_entropy, collective_h, collective_term_defects, compare_collective_discord,
    conditional_entropy, entropy, info_discord_collective, info_discord_numeric, von_neumann_entropy,
    CollectiveDiscordAudit, CollectiveDiscordTerms, CollectiveTermDefects, InfoDiscord, MeasuredSubsystem,
    OptimizerOptions, DISCREPANCY_TOL,
};

use crate::qstate::{pauli_decompose, DensityMatrix, PauliDecomposition};

/// `A = x xᵀ + T Tᵀ`, real symmetric positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrixA(pub Matrix3<f64>);

impl CorrelationMatrixA {
    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn eigenvalues(&self) -> CubicSolution {
        cubic_eigenvalues(&self.0)
    }
}

pub fn correlation_matrix(d: &PauliDecomposition) -> CorrelationMatrixA {
    let a = d.x * d.x.transpose() + d.t * d.t.transpose();
    // exact symmetry; the two products round independently
    CorrelationMatrixA((a + a.transpose()) * 0.5)
}

/// The smooth part `‖x‖² + ‖T‖²_F = tr A`.
pub fn smooth_part(d: &PauliDecomposition) -> f64 {
    d.x.norm_squared() + d.t.norm_squared()
}

/// `‖x xᵀ‖²_F + ‖T Tᵀ‖²_F` read with Frobenius norms; diagnostic only.
pub fn smooth_part_literal(d: &PauliDecomposition) -> f64 {
    (d.x * d.x.transpose()).norm_squared() + (d.t * d.t.transpose()).norm_squared()
}

/// Which smooth part enters `D = ¼(f − λ_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeometricForm {
    /// `f = tr A`; the standard geometric discord.
    #[default]
    Standard,
    /// `f = ‖x xᵀ‖² + ‖T Tᵀ‖²` taken literally. Can go negative.
    Literal,
}

pub fn geometric_discord_from(d: &PauliDecomposition, form: GeometricForm) -> f64 {
    let a = correlation_matrix(d);
    let lambda_max = a.eigenvalues().roots[0];
    let f = match form {
        GeometricForm::Standard => smooth_part(d),
        GeometricForm::Literal => smooth_part_literal(d),
    };
    0.25 * (f - lambda_max)
}

/// Eigenvalues of `A` labelled by the coordinate axis their eigenvectors lie
/// closest to, in `x, y, z` order.
///
/// For the X states met here `A` is diagonal and the labels follow the
/// diagonal entries, which keeps each value a smooth function of time
/// through crossings.
pub fn axis_labeled_eigenvalues(a: &Matrix3<f64>) -> [f64; 3] {
    let scale = a.abs().max().max(1.0);
    let off = a[(0, 1)].abs().max(a[(0, 2)].abs()).max(a[(1, 2)].abs());
    if off <= 1e-14 * scale {
        return [a[(0, 0)], a[(1, 1)], a[(2, 2)]];
    }
    let eig = nalgebra::SymmetricEigen::new(*a);
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    // perm[axis] = eigenpair index
    let overlap = |perm: &[usize; 3]| -> f64 { (0..3).map(|ax| eig.eigenvectors[(ax, perm[ax])].powi(2)).sum() };
    let best = PERMS
        .iter()
        .max_by(|p, q| overlap(p).total_cmp(&overlap(q)))
        .expect("non-empty");
    [0, 1, 2].map(|ax| eig.eigenvalues[best[ax]])
}

/// `D = ¼(‖x‖² + ‖T‖²_F − λ_max(A))`.
pub fn geometric_discord(rho: &DensityMatrix) -> f64 {
    geometric_discord_from(&pauli_decompose(rho), GeometricForm::Standard)
}
