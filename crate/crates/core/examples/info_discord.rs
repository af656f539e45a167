// Entropies and the measurement-minimised information discord, numerically
// and from the Bell-diagonal and collective closed forms.

use discord_witness::collective::{collective_state, CollectiveParams};
use discord_witness::discord::{
    bell_diagonal_info_discord, binary_entropy, compare_collective_discord, info_discord_numeric, von_neumann_entropy,
    OptimizerOptions,
};
use discord_witness::qstate::{bell_diagonal, BellDiagonalParams};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // argument is the Bloch length r of the distribution ((1+r)/2, (1-r)/2)
    println!(
        "h(r = 0) = {:.6} bits, h(r = 0.8) = {:.6} bits",
        binary_entropy(0.0),
        binary_entropy(0.8)
    );

    let opts = OptimizerOptions::default();
    let c = BellDiagonalParams::new(-0.5, -0.3, -0.4);
    let rho = bell_diagonal(c)?;
    let d = info_discord_numeric(&rho, &opts)?;
    println!("S(ρ) = {:.6}", von_neumann_entropy(&rho)?);
    println!(
        "Bell-diagonal: numeric {:.10}, closed form {:.10}, axis {:?}",
        d.value,
        bell_diagonal_info_discord(&c)?,
        d.direction.as_slice()
    );

    let p = CollectiveParams::new(0.9f64.sqrt(), 1.0, 0.6737, 0.0)?;
    let audit = compare_collective_discord(&collective_state(&p, 1.0)?, &opts)?;
    println!(
        "collective at υ = 1: closed form {:.6}, numeric {:.6}, largest sub-term gap {:.3e}",
        audit.closed_form,
        audit.numeric,
        audit.term_defects.max()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
