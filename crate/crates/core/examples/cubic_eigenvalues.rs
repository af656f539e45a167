// Closed-form eigenvalues of a symmetric 3×3 matrix against an iterative
// solver.

use discord_witness::discord::{cubic_eigenvalues, iterative_eigenvalues};
use nalgebra::Matrix3;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        Matrix3::new(1.2, 0.3, -0.4, 0.3, 0.8, 0.1, -0.4, 0.1, 0.5),
        Matrix3::from_diagonal(&nalgebra::Vector3::new(1.64, 0.36, 0.36)),
        Matrix3::new(2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 3.0),
    ];
    for a in cases {
        let s = cubic_eigenvalues(&a);
        let it = iterative_eigenvalues(&a);
        println!(
            "cubic λ³ + {:.4}λ² + {:.4}λ + {:.4}, Δ = {:.2e}",
            s.a2, s.a1, s.a0, s.delta
        );
        println!("  closed form {:?}", s.roots);
        println!("  iterative   {it:?}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
