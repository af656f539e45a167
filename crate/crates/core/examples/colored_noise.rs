// Colored-noise flip probability and the resulting Bell-diagonal decay.
//
// With `4aτ > 1` the channel is oscillatory and the transverse factor
// `1 − p` changes sign, which is what produces repeated crossings.

use discord_witness::channels::{colored_noise_probability, evolve_bd_colored, ColoredNoiseParams};
use discord_witness::qstate::BellDiagonalParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let pa = ColoredNoiseParams::new(2.0 / 3.0, 5.0)?;
    let pb = ColoredNoiseParams::new(1.0 / 3.0, 5.0)?;
    let c0 = BellDiagonalParams::new(-0.5, -0.3, -0.4);
    let two_tau = 10.0;

    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "υ", "p_A", "p_B", "c1", "c2", "c3"
    );
    for k in 0..=10 {
        let u = 0.05 * k as f64;
        let t = u * two_tau;
        let c = evolve_bd_colored(c0, pa, pb, t);
        println!(
            "{u:6.2} {:10.6} {:10.6} {:10.6} {:10.6} {:10.6}",
            colored_noise_probability(pa, t),
            colored_noise_probability(pb, t),
            c.c1,
            c.c2,
            c.c3
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
