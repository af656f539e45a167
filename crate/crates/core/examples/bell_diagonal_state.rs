// Builds a Bell-diagonal state, checks it, and round-trips it through the
// Pauli representation.

use discord_witness::qstate::{bell_diagonal, pauli_compose, pauli_decompose, BellDiagonalParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let c = BellDiagonalParams::new(-0.5, -0.3, -0.4);
    println!("spectrum {:?}", c.spectrum());
    let rho = bell_diagonal(c)?;
    let report = rho.validate();
    println!(
        "hermiticity {:.1e}, trace {:.1e}, min eigenvalue {:.4}",
        report.hermiticity_defect, report.trace_defect, report.min_eigenvalue
    );

    let d = pauli_decompose(&rho);
    println!("x = {:?}, y = {:?}", d.x.as_slice(), d.y.as_slice());
    println!("T diagonal = ({}, {}, {})", d.t[(0, 0)], d.t[(1, 1)], d.t[(2, 2)]);
    let back = pauli_compose(&d)?;
    let gap = (back.matrix() - rho.matrix())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    println!("round-trip error {gap:.1e}");

    // (0.5, 0.3, 0.4) has a negative eigenvalue
    println!(
        "(0.5, 0.3, 0.4) rejected: {}",
        bell_diagonal(BellDiagonalParams::new(0.5, 0.3, 0.4)).is_err()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
