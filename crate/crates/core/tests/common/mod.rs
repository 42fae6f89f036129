//! Independent quadrature oracles shared by the integration tests.
#![allow(dead_code)]

use nonlocal_supersol::riesz::riesz_constant;
use num_rational::BigRational;

/// Adaptive Simpson rule.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, eps, 40)
}

/// `(I_alpha * f)(x)` computed in polar coordinates centred at `x`.
pub fn centred_oracle(n: u32, alpha: f64, f: fn(f64) -> f64, r: f64) -> f64 {
    let k = (1.0 / alpha).max(1.0);
    let rho_max: f64 = r + 9.0;
    let t_max = rho_max.powf(1.0 / k);
    let shell = |rho: f64| -> f64 {
        match n {
            2 => {
                let g = |phi: f64| f((r * r + rho * rho + 2.0 * r * rho * phi.cos()).max(0.0).sqrt());
                simpson(&g, 0.0, std::f64::consts::PI, 1e-14) * 2.0
            }
            3 => {
                let g = |c: f64| f((r * r + rho * rho + 2.0 * r * rho * c).max(0.0).sqrt());
                2.0 * std::f64::consts::PI * simpson(&g, -1.0, 1.0, 1e-14)
            }
            _ => unreachable!(),
        }
    };
    let outer = |t: f64| {
        if t == 0.0 && k * alpha - 1.0 > 0.0 {
            return 0.0;
        }
        k * t.powf(k * alpha - 1.0) * shell(t.powf(k))
    };
    riesz_constant(n, alpha).unwrap() * simpson(&outer, 0.0, t_max, 1e-13)
}

/// Existence predicate for an `(H_m)` operator with the upper slope bound,
/// `N > m`, read off the closed-form trichotomy in `(p, q)`, in exact
/// rational arithmetic.
pub fn trichotomy_exists(n: i64, m: &BigRational, alpha: &BigRational, p: &BigRational, q: &BigRational) -> bool {
    let n = BigRational::from_integer(n.into());
    let one = BigRational::from_integer(1.into());
    let two = BigRational::from_integer(2.into());
    let m1 = m - &one;
    let a1 = alpha * &m1 / (&n - m);
    let a2 = (&n + alpha) * &m1 / (&n - m);
    let pq = p + q;
    if alpha < &(&n - m) {
        p > &a1 && pq > a2 && q > &(&m1 - (&n - alpha - m) / &n * p)
    } else if alpha == &(&n - m) {
        p.min(q) > &a1 && pq > a2
    } else {
        p > &m1 && q >= &m1 && pq > (&two * &n - m) * &m1 / (&n - m)
    }
}
