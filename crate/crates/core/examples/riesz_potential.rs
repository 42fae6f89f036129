//! Riesz potentials of radial densities: a closed form, a compactly
//! supported density, a divergent one, and the decay probe.

use nonlocal_supersol::riesz::{
    asymptotic_probe, riesz_constant, riesz_convolve, riesz_convolve_on, QuadratureConfig, RadialFunction, RieszDomain,
    TailSpec,
};

fn main() -> nonlocal_supersol::Result<()> {
    let cfg = QuadratureConfig::default();

    // Indicator of the unit ball in R^3 with alpha = 2: the Newtonian
    // potential, (3 - r^2)/6 inside and 1/(3r) outside.
    let ball = RadialFunction::parse("indicator(0,1)", TailSpec::Compact, Some(1.0))?;
    for r in [0.0, 0.5, 2.0] {
        let v = riesz_convolve(3, 2.0, &ball, 1.0, r, &cfg)?;
        let exact = if r < 1.0 { (3.0 - r * r) / 6.0 } else { 1.0 / (3.0 * r) };
        println!("ball  r={r:<4} value={:.12} exact={exact:.12} err<={:.1e}", v.value, v.budget());
    }

    let gauss = RadialFunction::parse("exp(-r^2)", TailSpec::Power(40.0), None)?;
    let v = riesz_convolve(4, 1.5, &gauss, 2.0, 1.0, &cfg)?;
    println!("gauss^2 N=4 alpha=1.5 r=1: {:.10} (A = {:.6})", v.value, riesz_constant(4, 1.5)?);

    let half = riesz_convolve_on(1, 0.5, &ball, 1.0, 0.5, RieszDomain::Interval { radius: 1.0 }, &cfg)?;
    println!("interval (0,1), N=1, alpha=1/2, r=1/2: {:.10}", half.value);

    let slow = RadialFunction::parse("(1+r)^-2", TailSpec::Power(2.0), None)?;
    let v = riesz_convolve(4, 2.0, &slow, 1.0, 1.0, &cfg)?;
    println!("(1+r)^-2 in R^4, alpha=2: {:?}", v.status);

    let radii = [10.0, 30.0, 100.0, 300.0];
    let f = RadialFunction::parse("(1+r)^-3", TailSpec::Power(3.0), None)?;
    let probe = asymptotic_probe(5, 2.0, &f, 3.0, &radii, &cfg)?;
    println!("probe N=5 beta=3: {:?} bounded={} scaled={:.4?}", probe.regime, probe.bounded, probe.scaled);
    Ok(())
}
