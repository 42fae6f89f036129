//! Phase diagram in the (p, q) plane for the m-Laplacian, written as CSV
//! and SVG into the system temp directory.

use nonlocal_supersol::classifier::region::{boundary_lines, region_grid, to_csv, to_svg};
use nonlocal_supersol::classifier::{OperatorClass, ProblemDomain, ProblemParams, Status};

fn main() -> nonlocal_supersol::Result<()> {
    let base = ProblemParams {
        n: 4,
        m: 2.0,
        alpha: 1.0,
        p: 1.0,
        q: 0.0,
        domain: ProblemDomain::WholeSpace,
        class: OperatorClass::m_laplace(),
    };
    let grid = region_grid(&base, (0.0, 5.0), (-1.0, 5.0), 120, 120)?;
    let lines = boundary_lines(&base, grid.p_range, grid.q_range);

    let count = |s: Status| grid.cells.iter().filter(|c| c.verdict.status == s).count();
    println!(
        "existence {}  nonexistence {}  unknown {}",
        count(Status::Existence),
        count(Status::Nonexistence),
        count(Status::Unknown)
    );
    for l in &lines {
        println!("boundary {:<28} {:?}", l.label, l.coeffs);
    }

    let dir = std::env::temp_dir();
    let (csv, svg) = (dir.join("region_N4_m2.csv"), dir.join("region_N4_m2.svg"));
    std::fs::write(&csv, to_csv(&grid))?;
    std::fs::write(&svg, to_svg(&grid, &lines, "N = 4, m = 2, alpha = 1"))?;
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}
