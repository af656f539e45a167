// Applies phase damping and bit flip through their Kraus operators and
// compares with the closed-form decay of the correlation coefficients.

use discord_witness::channels::{
    apply_product_channel, bit_flip, evolve_bd_phase_bitflip, markov_probability, phase_damping,
};
use discord_witness::qstate::{bell_diagonal, pauli_decompose, BellDiagonalParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let c0 = BellDiagonalParams::new(0.12, 0.13, 0.08);
    let (g1, g2) = (0.035, 0.015);
    let rho0 = bell_diagonal(c0)?;

    for t in [0.0, 5.0, 20.0, 40.0] {
        let a = phase_damping(markov_probability(g1, t))?;
        let b = bit_flip(markov_probability(g2, t))?;
        let rho = apply_product_channel(&rho0, &a, &b)?;
        let d = pauli_decompose(&rho);
        let law = evolve_bd_phase_bitflip(c0, g1, g2, t);
        println!(
            "t = {t:5.1}  Kraus c = ({:.6}, {:.6}, {:.6})  law c = ({:.6}, {:.6}, {:.6})  completeness {:.1e}",
            d.t[(0, 0)],
            d.t[(1, 1)],
            d.t[(2, 2)],
            law.c1,
            law.c2,
            law.c3,
            a.completeness_defect().max(b.completeness_defect())
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
