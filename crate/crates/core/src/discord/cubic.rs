//! Closed-form eigenvalues of a real symmetric 3×3 matrix.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Characteristic cubic `λ³ + a₂λ² + a₁λ + a₀ = 0`, its depressed form and roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicSolution {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    /// `p = a₁ − a₂²/3`
    pub p: f64,
    /// `q = a₀ − a₁a₂/3 + 2a₂³/27`
    pub q: f64,
    /// `Δ = q²/4 + p³/27`; non-positive for symmetric input up to round-off.
    pub delta: f64,
    /// `M± = −q/2 ± √Δ` (complex when `Δ < 0`).
    pub m_plus: Complex64,
    pub m_minus: Complex64,
    /// Roots in descending order.
    pub roots: [f64; 3],
}

impl CubicSolution {
    /// `λ³ + a₂λ² + a₁λ + a₀`
    pub fn residual(&self, lambda: f64) -> f64 {
        ((lambda + self.a2) * lambda + self.a1) * lambda + self.a0
    }
}

fn minor(a: &Matrix3<f64>, k: usize) -> f64 {
    let l = (k + 1) % 3;
    Matrix2::new(a[(k, k)], a[(k, l)], a[(l, k)], a[(l, l)]).determinant()
}

/// Eigenvalues of a symmetric matrix from its characteristic cubic.
///
/// Roots use the trigonometric branch of Cardano's formula, evaluated on the
/// traceless part `B = A − (tr A/3)·1` so the shift does not cancel digits:
/// `λ_k = tr A/3 + 2√p₂ cos(φ + 2πk/3)` with `p₂ = tr B²/6`,
/// `cos 3φ = det B / (2 p₂^{3/2})`. This is the `Δ ≤ 0` case of `M±^{1/3}`.
///
/// Near a double root `acos` is evaluated next to ±1 and the close pair loses
/// half its digits. The pair is then recomputed from the 2×2 block of `A` on
/// the complement of the isolated root's eigenvector.
pub fn cubic_eigenvalues(a: &Matrix3<f64>) -> CubicSolution {
    let a2 = -a.trace();
    let a1 = (0..3).map(|k| minor(a, k)).sum::<f64>();
    let a0 = -a.determinant();
    let p = a1 - a2 * a2 / 3.0;
    let q = a0 - a1 * a2 / 3.0 + 2.0 * a2 * a2 * a2 / 27.0;
    let delta = q * q / 4.0 + p * p * p / 27.0;
    let sqrt_delta = Complex64::new(delta, 0.0).sqrt();
    let m_plus = Complex64::new(-q / 2.0, 0.0) + sqrt_delta;
    let m_minus = Complex64::new(-q / 2.0, 0.0) - sqrt_delta;

    let shift = a.trace() / 3.0;
    let b = a - Matrix3::identity() * shift;
    let p2 = (b * b).trace() / 6.0;
    let roots = if p2 <= f64::MIN_POSITIVE {
        [shift; 3]
    } else {
        let r = (b.determinant() / (2.0 * p2 * p2.sqrt())).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let amp = 2.0 * p2.sqrt();
        let hi = shift + amp * phi.cos();
        let lo = shift + amp * (phi + 2.0 * PI / 3.0).cos();
        let mid = 3.0 * shift - hi - lo;
        let mut r = [hi, mid, lo];
        r.sort_by(|x, y| y.total_cmp(x));
        let close = 1e-3 * amp;
        if r[0] - r[1] < close && r[1] - r[2] >= close {
            let [x, y] = deflated_pair(a, r[2]);
            r = [x, y, r[2]];
        } else if r[1] - r[2] < close && r[0] - r[1] >= close {
            let [x, y] = deflated_pair(a, r[0]);
            r = [r[0], x, y];
        }
        r
    };
    CubicSolution {
        a0,
        a1,
        a2,
        p,
        q,
        delta,
        m_plus,
        m_minus,
        roots,
    }
}

/// Eigenvalues of `A` restricted to the plane orthogonal to the eigenvector
/// of the well-separated root `lambda`, descending.
fn deflated_pair(a: &Matrix3<f64>, lambda: f64) -> [f64; 2] {
    let m = a - Matrix3::identity() * lambda;
    let rows = [m.row(0).transpose(), m.row(1).transpose(), m.row(2).transpose()];
    let v = [
        rows[0].cross(&rows[1]),
        rows[0].cross(&rows[2]),
        rows[1].cross(&rows[2]),
    ]
    .into_iter()
    .max_by(|x, y| x.norm_squared().total_cmp(&y.norm_squared()))
    .expect("three candidates")
    .normalize();
    // any unit vector orthogonal to v
    let seed = if v.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let u = v.cross(&seed).normalize();
    let w = v.cross(&u);
    let (p, r, q) = (u.dot(&(a * u)), u.dot(&(a * w)), w.dot(&(a * w)));
    let mean = 0.5 * (p + q);
    let half = (0.5 * (p - q)).hypot(r);
    [mean + half, mean - half]
}

/// Eigenvalues from an iterative symmetric QR solver, descending.
pub fn iterative_eigenvalues(a: &Matrix3<f64>) -> [f64; 3] {
    let eig = SymmetricEigen::new(*a);
    let mut v = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(a: f64, b: f64, c: f64) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(a, b, c))
    }

    #[test]
    fn diagonal_roots_descending() {
        let s = cubic_eigenvalues(&diag(1.0, 2.0, 3.0));
        for (r, e) in s.roots.iter().zip([3.0, 2.0, 1.0]) {
            assert_abs_diff_eq!(*r, e, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(s.a2, -6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.a1, 11.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.a0, -6.0, epsilon = 1e-14);
    }

    #[test]
    fn triple_root() {
        let s = cubic_eigenvalues(&Matrix3::identity());
        assert_eq!(s.roots, [1.0, 1.0, 1.0]);
        assert_abs_diff_eq!(s.delta, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn fig1_initial_matrix() {
        let s = cubic_eigenvalues(&diag(0.0144, 0.0169, 0.0064));
        for (r, e) in s.roots.iter().zip([0.0169, 0.0144, 0.0064]) {
            assert_abs_diff_eq!(*r, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn discriminant_non_positive_and_residuals_small() {
        let a = Matrix3::new(1.2, 0.3, -0.4, 0.3, 0.8, 0.1, -0.4, 0.1, 0.5);
        let s = cubic_eigenvalues(&a);
        assert!(s.delta <= 1e-15);
        for r in s.roots {
            assert!(s.residual(r).abs() <= 1e-10 * r.abs().powi(3).max(1.0));
        }
        let it = iterative_eigenvalues(&a);
        for (x, y) in s.roots.iter().zip(it) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-13);
        }
    }

    #[test]
    fn double_root() {
        let s = cubic_eigenvalues(&diag(0.5, 0.5, 0.2));
        assert_abs_diff_eq!(s.roots[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.roots[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.roots[2], 0.2, epsilon = 1e-15);
    }

    #[test]
    fn rotated_double_root_keeps_full_precision() {
        // Q diag(1.64, 0.36, 0.36) Qᵀ for a generic rotation
        let q = nalgebra::Rotation3::from_euler_angles(0.3, -1.1, 0.7).into_inner();
        let a = q * diag(1.64, 0.36, 0.36) * q.transpose();
        let s = cubic_eigenvalues(&a);
        for (r, e) in s.roots.iter().zip([1.64, 0.36, 0.36]) {
            assert_abs_diff_eq!(*r, e, epsilon = 1e-14);
        }
        let s = cubic_eigenvalues(&diag(0.36, 1.64, 0.36));
        for (r, e) in s.roots.iter().zip([1.64, 0.36, 0.36]) {
            assert_abs_diff_eq!(*r, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn near_double_root_pair_resolved() {
        let s = cubic_eigenvalues(&diag(0.2, 0.5 + 1e-9, 0.5));
        assert_abs_diff_eq!(s.roots[0], 0.5 + 1e-9, epsilon = 1e-15);
        assert_abs_diff_eq!(s.roots[1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.roots[2], 0.2, epsilon = 1e-15);
    }
}
