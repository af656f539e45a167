// Geometric discord `¼(tr A − λ_max)` for a few familiar states.

use discord_witness::discord::{correlation_matrix, geometric_discord};
use discord_witness::qstate::{bell_diagonal, pauli_decompose, BellDiagonalParams, DensityMatrix};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let bell = bell_diagonal(BellDiagonalParams::new(1.0, -1.0, 1.0))?;
    println!("Bell state: {:.6}", geometric_discord(&bell));
    println!(
        "maximally mixed: {:.6}",
        geometric_discord(&DensityMatrix::maximally_mixed())
    );

    let c = BellDiagonalParams::new(0.12, 0.13, 0.08);
    let rho = bell_diagonal(c)?;
    let a = correlation_matrix(&pauli_decompose(&rho));
    println!("A eigenvalues {:?}, tr A = {:.6}", a.eigenvalues().roots, a.trace());
    println!(
        "Bell-diagonal (0.12, 0.13, 0.08): {:.8} = ¼(0.12² + 0.08²) = {:.8}",
        geometric_discord(&rho),
        0.25 * (0.12f64.powi(2) + 0.08f64.powi(2))
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
