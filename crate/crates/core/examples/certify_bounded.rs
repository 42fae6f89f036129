//! Bounded-domain constructions in the unit disc: a small linear profile
//! when `p + q > m - 1`, a large one when `p + q < m - 1`.

use nonlocal_supersol::constructor::{make_bounded, AmplitudeMode, BoundedKind};
use nonlocal_supersol::operators::OperatorSpec;
use nonlocal_supersol::riesz::QuadratureConfig;
use nonlocal_supersol::verifier::{tune_amplitude, Direction, Domain, GridSpec};

fn main() -> nonlocal_supersol::Result<()> {
    let (n, m, alpha, radius) = (2, 2.0, 1.0, 1.0);
    let op = OperatorSpec::m_laplace(m)?;
    let cases = [
        ("p = q = 1", 1.0, 1.0, AmplitudeMode::Small, Direction::Shrink),
        ("p = q = 1/4", 0.25, 0.25, AmplitudeMode::Large, Direction::Grow),
    ];
    for (label, p, q, mode, direction) in cases {
        let seed = make_bounded(BoundedKind::Linear, mode, radius, 1.0)?;
        let tuned = tune_amplitude(
            &op,
            &seed,
            n,
            alpha,
            p,
            q,
            Domain::Bounded { radius },
            &GridSpec::bounded(radius),
            &QuadratureConfig::default(),
            direction,
        )?;
        let c = &tuned.certificate;
        println!(
            "{label:<12} {:?}  {} = {:e}  origin lhs = {:?}",
            c.status,
            c.tuned_params.symbol,
            tuned.amplitude,
            c.origin.as_ref().map(|o| o.lhs)
        );
    }
    Ok(())
}
