// Tracks the eigenvalues of `A` as continuous branches over a time grid and
// lists the crossings, marking those that change the maximum.

use discord_witness::channels::evolve_bd_phase_bitflip;
use discord_witness::qstate::BellDiagonalParams;
use discord_witness::witness::{detect_crossings, scan_branches};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let c0 = BellDiagonalParams::new(0.12, 0.13, 0.08);
    let times: Vec<f64> = (0..2000).map(|k| 40.0 * k as f64 / 1999.0).collect();
    // sorted on purpose: the tracker has to untangle the branches
    let eig = |t: f64| {
        let mut v = evolve_bd_phase_bitflip(c0, 0.035, 0.015, t).as_array().map(|c| c * c);
        v.sort_by(|a, b| b.total_cmp(a));
        Ok(v)
    };
    let s = scan_branches(eig, &times)?;
    for e in detect_crossings(&s) {
        println!(
            "t ≈ {:8.4}  branches {}-{}  λ ≈ {:.3e}  {:?}  changes max: {}",
            e.t_star,
            e.branch_pair.0 + 1,
            e.branch_pair.1 + 1,
            e.lambda_at_crossing,
            e.kind,
            e.involves_max
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
