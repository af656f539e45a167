// One-sided slopes of the geometric discord at a sudden change and at an
// ordinary time.

use discord_witness::channels::evolve_bd_phase_phase;
use discord_witness::discord::geometric_discord;
use discord_witness::qstate::{bell_diagonal, BellDiagonalParams};
use discord_witness::witness::{default_h_schedule, derivative_jump};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let c0 = BellDiagonalParams::new(-0.5, -0.3, -0.4);
    let d = |t: f64| geometric_discord(&bell_diagonal(evolve_bd_phase_phase(c0, 0.45, 0.15, t)).unwrap());
    let t_star = 1.25f64.ln() / 0.6;
    for t in [t_star, 1.5] {
        let j = derivative_jump(d, t, &default_h_schedule(3.0));
        println!(
            "t = {t:.6}: left {:+.6}, right {:+.6}, jump {:+.3e}, noise {:.1e}, discontinuous {}",
            j.left_slope, j.right_slope, j.jump, j.noise, j.discontinuous
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
