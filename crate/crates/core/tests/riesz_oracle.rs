//! Cross-checks of the radial reduction against independent oracles.

use nonlocal_supersol::riesz::{
    angular_kernel, riesz_constant, riesz_convolve, sphere_area, QuadratureConfig, RadialFunction, TailSpec,
};

mod common;

use common::{centred_oracle, simpson};

fn gauss(s: f64) -> f64 {
    (-s * s).exp()
}

#[test]
fn gaussian_matches_centred_oracle() {
    let f = RadialFunction::parse("exp(-r^2)", TailSpec::Power(4.0), None).unwrap();
    let cfg = QuadratureConfig::default();
    for (n, alphas) in [(2u32, vec![0.5, 1.0]), (3, vec![0.5, 1.0, 2.0])] {
        for alpha in alphas {
            for r in [0.0, 1.0, 2.0] {
                let v = riesz_convolve(n, alpha, &f, 1.0, r, &cfg).unwrap();
                let o = centred_oracle(n, alpha, gauss, r);
                let rel = (v.value - o).abs() / o;
                assert!(rel < 1e-6, "N={n} alpha={alpha} r={r}: {} vs {o} (rel {rel:e})", v.value);
            }
        }
    }
}

/// Closed form of the three-dimensional angular kernel.
fn kernel_n3(r: f64, s: f64, alpha: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-15 {
        ((r + s) / (r - s).abs()).ln() / (r * s)
    } else {
        ((r + s).powf(alpha - 1.0) - (r - s).abs().powf(alpha - 1.0)) / ((alpha - 1.0) * r * s)
    }
}

#[test]
fn three_dimensional_kernel_closed_form() {
    for alpha in [0.3, 0.5, 1.0, 1.5, 2.0, 2.7] {
        for (r, s) in [(1.0, 2.0), (2.0, 1.0), (1.0, 1.001), (0.01, 5.0), (30.0, 29.9)] {
            let k = angular_kernel(3, r, s, alpha).unwrap();
            let e = kernel_n3(r, s, alpha);
            assert!((k - e).abs() < 1e-9 * e.abs(), "alpha={alpha} r={r} s={s}: {k} vs {e}");
        }
    }
}

#[test]
fn two_dimensional_kernel_matches_circle_quadrature() {
    // int over |y| = 3 of |x - y|^{-1} with |x| = 1, via a full-circle Simpson rule.
    let g = |phi: f64| (1.0 + 9.0 - 6.0 * phi.cos()).powf(-0.5);
    let full = simpson(&g, 0.0, 2.0 * std::f64::consts::PI, 1e-14);
    let k = angular_kernel(2, 1.0, 3.0, 1.0).unwrap();
    assert!((2.0 * k - full).abs() < 1e-11 * full);
}

#[test]
fn unit_ball_far_field() {
    // |x|^{N-alpha} (I * 1_B)(x) -> A_alpha |B_1| at large |x|.
    let f = RadialFunction::parse("indicator(0,1)", TailSpec::Compact, None).unwrap();
    let cfg = QuadratureConfig::default();
    let (n, alpha) = (3u32, 1.0);
    let ball = sphere_area(n) / n as f64;
    let lim = riesz_constant(n, alpha).unwrap() * ball;
    let v = riesz_convolve(n, alpha, &f, 1.0, 1e3, &cfg).unwrap().value * 1e6;
    assert!((v - lim).abs() < 1e-5 * lim, "{v} vs {lim}");
}
