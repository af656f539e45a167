// Refines grid-level crossings to near machine precision and compares with
// the analytic crossing times.

use discord_witness::channels::evolve_bd_phase_bitflip;
use discord_witness::qstate::BellDiagonalParams;
use discord_witness::witness::{
    analytic_crossings_bd, detect_crossings, golden_minimize, refine_crossing, refine_events, scan_branches, BdLaw,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let root = refine_crossing(|t| t * t - 2.0, (0.0, 2.0))?;
    println!("√2 by bracketed refinement: {root:.15}");
    let (x, fx) = golden_minimize(|t| (t - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-12);
    println!("golden-section minimum at {x:.10} with value {fx}");

    let c0 = BellDiagonalParams::new(0.12, 0.13, 0.08);
    let eig = |t: f64| Ok(evolve_bd_phase_bitflip(c0, 0.035, 0.015, t).as_array().map(|c| c * c));
    let times: Vec<f64> = (0..200).map(|k| 40.0 * k as f64 / 199.0).collect();
    let s = scan_branches(eig, &times)?;
    let refined = refine_events(&s, &detect_crossings(&s), eig, 1e-12)?;
    let exact = analytic_crossings_bd(c0, 0.035, 0.015, BdLaw::PhaseBitflip);
    for (e, a) in refined.iter().zip(&exact) {
        println!(
            "refined {:.12}  analytic {:.12}  gap {:.1e}",
            e.t_star,
            a.t_star,
            (e.t_star - a.t_star).abs()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
