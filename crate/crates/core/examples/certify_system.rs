//! A pair of log-corrected profiles for the first system shape on `R^5`.

use nonlocal_supersol::constructor::make_system_pair;
use nonlocal_supersol::operators::OperatorSpec;
use nonlocal_supersol::riesz::QuadratureConfig;
use nonlocal_supersol::verifier::{tune_system, Domain, GridSpec, SystemExponents, SystemShape};

fn main() -> nonlocal_supersol::Result<()> {
    let n = 5;
    let op = OperatorSpec::m_laplace(2.0)?;
    let (u, v) = make_system_pair(n, 2.0, 2.0, 1.0)?;
    let exps = SystemExponents { alpha: 1.0, beta: 1.0, p: 1.5, q: 1.5, r: 1.5, s: 1.5 };
    let tuned = tune_system(
        &op,
        &op,
        &u,
        &v,
        n,
        exps,
        SystemShape::Sys1,
        Domain::WholeSpace,
        &GridSpec::whole_space(),
        &QuadratureConfig::default(),
    )?;
    println!("epsilon  {:e}", tuned.amplitude);
    println!("first    {:?}", tuned.first.status);
    println!("second   {:?}", tuned.second.status);
    Ok(())
}
