//! Tunes the log-corrected profile until it certifies on `R^4`
//! (`m = 2`, `alpha = 1`, `p = 2`, `q = 1`) and reports the side slopes.

use std::time::Instant;

use nonlocal_supersol::constructor::make_log_corrected;
use nonlocal_supersol::operators::OperatorSpec;
use nonlocal_supersol::riesz::QuadratureConfig;
use nonlocal_supersol::verifier::{loglog_slope, tune_amplitude, Direction, Domain, GridSpec, Side};

fn main() -> nonlocal_supersol::Result<()> {
    let (n, m, alpha, p, q) = (4, 2.0, 1.0, 2.0, 1.0);
    let op = OperatorSpec::m_laplace(m)?;
    let seed = make_log_corrected(n, m, 1.0)?;
    let start = Instant::now();
    let tuned = tune_amplitude(
        &op,
        &seed,
        n,
        alpha,
        p,
        q,
        Domain::WholeSpace,
        &GridSpec::whole_space(),
        &QuadratureConfig::default(),
        Direction::Shrink,
    )?;
    let cert = &tuned.certificate;
    println!("status      {:?}", cert.status);
    println!("epsilon     {:e}", tuned.amplitude);
    println!("k           {:?}", cert.tuned_params.k);
    println!("tried       {:?}", tuned.trail);
    let lhs = loglog_slope(cert, Side::Lhs, 10.0, 100.0, 2.0 * m).unwrap_or(f64::NAN);
    let rhs = loglog_slope(cert, Side::Rhs, 10.0, 100.0, 0.0).unwrap_or(f64::NAN);
    println!("lhs slope   {lhs:.4}  (log factor removed)");
    println!("rhs slope   {rhs:.4}");
    println!("elapsed     {:.1?}", start.elapsed());
    Ok(())
}
