// Two atoms in a common vacuum: the analytic X-state solution against a
// direct RK4 integration of the master equation, and the closed-form
// spectrum of `A`.

use discord_witness::collective::{
    collective_eigs_a, collective_state, integrate_master_equation, CollectiveParams, MasterEquationOptions,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = CollectiveParams::new(0.9f64.sqrt(), 1.0, 0.6737, 0.0)?;
    let traj = integrate_master_equation(&p, 3.0, 3000, &MasterEquationOptions::default())?;

    let mut worst = 0.0f64;
    for (t, rho_num) in traj.times.iter().zip(&traj.states) {
        let rho = collective_state(&p, *t)?;
        let gap = (rho.matrix() - rho_num.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        worst = worst.max(gap);
    }
    println!(
        "max |analytic - integrated| over {} steps: {worst:.2e}",
        traj.times.len() - 1
    );

    for u in [0.0, 0.25, 0.89, 1.65, 3.0] {
        let s = collective_eigs_a(&collective_state(&p, u)?)?;
        println!(
            "υ = {u:4.2}  λ+ = {:.6}  λ- = {:.6}  λ0 = {:.6}",
            s.plus, s.minus, s.zero
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
