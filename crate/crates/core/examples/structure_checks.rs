//! Sampled structure conditions and the radial operator for the
//! m-Laplacian, the m-mean-curvature operator and a perturbed power law.

use nonlocal_supersol::constructor::RadialProfile;
use nonlocal_supersol::operators::{apply_l, check_structure, log_grid, Condition, OperatorSpec};

fn main() -> nonlocal_supersol::Result<()> {
    let grid = log_grid(1e-6, 1e6, 400);
    let ops = [
        ("3-Laplace", OperatorSpec::m_laplace(3.0)?),
        ("2-mean-curvature", OperatorSpec::m_mean_curvature(2.0)?),
        ("2-power times 1+t/(5+5t)", OperatorSpec::power_perturbed(2.0, "1+0.2*t/(1+t)")?),
    ];
    for (name, op) in &ops {
        println!("{name}");
        for c in Condition::ALL {
            let rep = check_structure(op, c, &grid)?;
            println!("  {:<20} {:?}", format!("{c:?}"), rep.verdict);
        }
    }

    let u = RadialProfile::power_decay(0.1, 2.5)?;
    let op = OperatorSpec::m_laplace(2.0)?;
    for r in [0.1, 1.0, 10.0] {
        println!("L u at r={r:<4} (N=5, m=2): {:.6e}", apply_l(&op, &u, r, 5)?);
    }
    Ok(())
}
