//! Two-qubit density matrices and their Pauli (Bloch) representation.
//!
//! Basis order is `|ee⟩, |eg⟩, |ge⟩, |gg⟩` with `σ₃|e⟩ = +|e⟩`, so index 0 of
//! each single-qubit factor is the excited state.

use nalgebra::{Matrix2, Matrix3, Matrix4, SymmetricEigen, Vector3, Vector4};
use num_complex::Complex64;

use crate::{Error, Result};

pub type Matrix2c = Matrix2<Complex64>;
pub type Matrix4c = Matrix4<Complex64>;
pub type Vector4c = Vector4<Complex64>;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity2() -> Matrix2c {
    Matrix2c::identity()
}

/// Pauli matrix `σ_{k+1}` for `k ∈ {0, 1, 2}`.
pub fn pauli(k: usize) -> Matrix2c {
    match k {
        0 => Matrix2c::new(ZERO, ONE, ONE, ZERO),
        1 => Matrix2c::new(ZERO, -I, I, ZERO),
        2 => Matrix2c::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {k} out of range"),
    }
}

pub fn kron(a: &Matrix2c, b: &Matrix2c) -> Matrix4c {
    Matrix4c::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

fn trace_with(rho: &Matrix4c, op: &Matrix4c) -> Complex64 {
    (rho * op).trace()
}

/// Result of checking the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.hermiticity_defect <= HERMITICITY_TOL && self.trace_defect <= TRACE_TOL && self.min_eigenvalue >= -PSD_TOL
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "hermiticity defect {:.3e}, trace defect {:.3e}, min eigenvalue {:.3e}",
            self.hermiticity_defect, self.trace_defect, self.min_eigenvalue
        )
    }
}

/// A 4×4 two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix4c);

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn new(m: Matrix4c) -> Result<Self> {
        let rho = DensityMatrix(m);
        let report = rho.validate();
        if report.passed() {
            Ok(rho)
        } else {
            Err(Error::NonPhysicalParams(report.to_string()))
        }
    }

    /// Wraps a matrix without checks. Use [`DensityMatrix::validate`] afterwards
    /// when the origin is not trusted.
    pub fn new_unchecked(m: Matrix4c) -> Self {
        DensityMatrix(m)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix(Matrix4c::identity() * Complex64::new(0.25, 0.0))
    }

    pub fn from_pure(psi: &Vector4c) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let psi = psi / Complex64::new(norm, 0.0);
        Ok(DensityMatrix(psi * psi.adjoint()))
    }

    pub fn product(rho_a: &Matrix2c, rho_b: &Matrix2c) -> Result<Self> {
        Self::new(kron(rho_a, rho_b))
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix4c {
        self.0
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.0[(r, c)]
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let herm = (self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = SymmetricEigen::new(herm);
        let mut ev = [0.0; 4];
        for (k, v) in eig.eigenvalues.iter().enumerate() {
            ev[k] = *v;
        }
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    /// Reduced state of qubit A.
    pub fn reduced_a(&self) -> Matrix2c {
        Matrix2c::from_fn(|r, c| self.0[(2 * r, 2 * c)] + self.0[(2 * r + 1, 2 * c + 1)])
    }

    /// Reduced state of qubit B.
    pub fn reduced_b(&self) -> Matrix2c {
        Matrix2c::from_fn(|r, c| self.0[(r, c)] + self.0[(r + 2, c + 2)])
    }

    /// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`.
    pub fn local_unitary(&self, ua: &Matrix2c, ub: &Matrix2c) -> Self {
        let u = kron(ua, ub);
        DensityMatrix(u * self.0 * u.adjoint())
    }
}

pub fn validate(rho: &DensityMatrix) -> ValidationReport {
    let m = rho.matrix();
    let mut herm = 0.0f64;
    for r in 0..4 {
        for c in 0..4 {
            herm = herm.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    let trace_defect = (m.trace() - ONE).norm();
    let min_eigenvalue = rho.eigenvalues()[0];
    ValidationReport {
        hermiticity_defect: herm,
        trace_defect,
        min_eigenvalue,
    }
}

/// Local Bloch vectors and correlation tensor of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliDecomposition {
    /// `x_i = Tr[ρ (σ_i ⊗ 1)]`
    pub x: Vector3<f64>,
    /// `y_j = Tr[ρ (1 ⊗ σ_j)]`
    pub y: Vector3<f64>,
    /// `T_ij = Tr[ρ (σ_i ⊗ σ_j)]`
    pub t: Matrix3<f64>,
}

impl PauliDecomposition {
    pub fn zero() -> Self {
        PauliDecomposition {
            x: Vector3::zeros(),
            y: Vector3::zeros(),
            t: Matrix3::zeros(),
        }
    }
}

pub fn pauli_decompose(rho: &DensityMatrix) -> PauliDecomposition {
    let m = rho.matrix();
    let id = identity2();
    let mut d = PauliDecomposition::zero();
    for i in 0..3 {
        d.x[i] = trace_with(m, &kron(&pauli(i), &id)).re;
        d.y[i] = trace_with(m, &kron(&id, &pauli(i))).re;
        for j in 0..3 {
            d.t[(i, j)] = trace_with(m, &kron(&pauli(i), &pauli(j))).re;
        }
    }
    d
}

/// `ρ = ¼[1⊗1 + Σ x_i σ_i⊗1 + Σ y_j 1⊗σ_j + Σ T_ij σ_i⊗σ_j]` without validation.
pub fn pauli_compose_unchecked(d: &PauliDecomposition) -> DensityMatrix {
    let id = identity2();
    let mut m = Matrix4c::identity();
    for i in 0..3 {
        m += kron(&pauli(i), &id) * Complex64::new(d.x[i], 0.0);
        m += kron(&id, &pauli(i)) * Complex64::new(d.y[i], 0.0);
        for j in 0..3 {
            let tij = d.t[(i, j)];
            if tij != 0.0 {
                m += kron(&pauli(i), &pauli(j)) * Complex64::new(tij, 0.0);
            }
        }
    }
    DensityMatrix(m * Complex64::new(0.25, 0.0))
}

pub fn pauli_compose(d: &PauliDecomposition) -> Result<DensityMatrix> {
    let rho = pauli_compose_unchecked(d);
    let report = rho.validate();
    if report.passed() {
        Ok(rho)
    } else {
        Err(Error::NonPhysicalParams(report.to_string()))
    }
}

/// Coefficients of `¼[1 + Σ c_i σ_i⊗σ_i]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BellDiagonalParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl BellDiagonalParams {
    pub const fn new(c1: f64, c2: f64, c3: f64) -> Self {
        BellDiagonalParams { c1, c2, c3 }
    }

    pub fn from_array(c: [f64; 3]) -> Self {
        BellDiagonalParams::new(c[0], c[1], c[2])
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    /// Eigenvalues on `Φ⁺, Φ⁻, Ψ⁺, Ψ⁻`.
    pub fn spectrum(&self) -> [f64; 4] {
        let BellDiagonalParams { c1, c2, c3 } = *self;
        [
            0.25 * (1.0 + c1 - c2 + c3),
            0.25 * (1.0 - c1 + c2 + c3),
            0.25 * (1.0 + c1 + c2 - c3),
            0.25 * (1.0 - c1 - c2 - c3),
        ]
    }

    pub fn is_physical(&self) -> bool {
        self.as_array().iter().all(|c| c.abs() <= 1.0 + 1e-12) && self.spectrum().iter().all(|&l| l >= -1e-12)
    }
}

pub fn bell_diagonal(c: BellDiagonalParams) -> Result<DensityMatrix> {
    if !c.is_physical() {
        return Err(Error::NonPhysicalParams(format!(
            "Bell-diagonal c = ({}, {}, {}) has spectrum {:?}",
            c.c1,
            c.c2,
            c.c3,
            c.spectrum()
        )));
    }
    let d = PauliDecomposition {
        x: Vector3::zeros(),
        y: Vector3::zeros(),
        t: Matrix3::from_diagonal(&Vector3::new(c.c1, c.c2, c.c3)),
    };
    Ok(pauli_compose_unchecked(&d))
}
