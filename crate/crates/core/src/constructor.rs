//! Explicit radial profiles with exact derivatives, and the parameter rules
//! that place them inside the admissible exponent intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::Radial;
use crate::riesz::{RadialFunction, TailSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum RadialProfile {
    /// `eps (1+r)^(-gamma)`
    PowerDecay {
        epsilon: f64,
        gamma: f64,
    },
    /// `eps (1+r)^(-gamma) (1 - k / (1 + log(1+r)))`
    LogCorrectedDecay {
        epsilon: f64,
        gamma: f64,
        k: f64,
    },
    /// `c (1 + R - r)` on `[0, R]`
    LinearBounded {
        amplitude: f64,
        #[serde(rename = "R")]
        radius: f64,
    },
    /// `c log(1 + R + r)` on `[0, R]`
    LogBounded {
        amplitude: f64,
        #[serde(rename = "R")]
        radius: f64,
    },
    Constant {
        c: f64,
    },
}

impl RadialProfile {
    pub fn power_decay(epsilon: f64, gamma: f64) -> Result<Self> {
        positive("epsilon", epsilon)?;
        positive("gamma", gamma)?;
        Ok(Self::PowerDecay { epsilon, gamma })
    }

    pub fn log_corrected(epsilon: f64, gamma: f64, k: f64) -> Result<Self> {
        positive("epsilon", epsilon)?;
        positive("gamma", gamma)?;
        let bound = gamma / (2.0 * gamma + 3.0);
        if !(k > 0.0 && k < bound) {
            return Err(Error::domain(format!("k must lie in (0, {bound}), got {k}")));
        }
        Ok(Self::LogCorrectedDecay { epsilon, gamma, k })
    }

    pub fn linear_bounded(amplitude: f64, radius: f64) -> Result<Self> {
        positive("amplitude", amplitude)?;
        positive("R", radius)?;
        Ok(Self::LinearBounded { amplitude, radius })
    }

    pub fn log_bounded(amplitude: f64, radius: f64) -> Result<Self> {
        positive("amplitude", amplitude)?;
        positive("R", radius)?;
        Ok(Self::LogBounded { amplitude, radius })
    }

    pub fn constant(c: f64) -> Result<Self> {
        positive("c", c)?;
        Ok(Self::Constant { c })
    }

    /// The overall multiplicative factor (`eps`, `delta`, `L` or `c`).
    pub fn amplitude(&self) -> f64 {
        match *self {
            Self::PowerDecay { epsilon, .. } | Self::LogCorrectedDecay { epsilon, .. } => epsilon,
            Self::LinearBounded { amplitude, .. } | Self::LogBounded { amplitude, .. } => amplitude,
            Self::Constant { c } => c,
        }
    }

    /// Same shape, different amplitude; every family is linear in it.
    pub fn with_amplitude(&self, a: f64) -> Self {
        let mut out = *self;
        match &mut out {
            Self::PowerDecay { epsilon, .. } | Self::LogCorrectedDecay { epsilon, .. } => *epsilon = a,
            Self::LinearBounded { amplitude, .. } | Self::LogBounded { amplitude, .. } => *amplitude = a,
            Self::Constant { c } => *c = a,
        }
        out
    }

    /// Radius of the ball the profile lives on, if bounded.
    pub fn domain_radius(&self) -> Option<f64> {
        match *self {
            Self::LinearBounded { radius, .. } | Self::LogBounded { radius, .. } => Some(radius),
            _ => None,
        }
    }

    pub fn tail_exponent(&self) -> Option<f64> {
        match *self {
            Self::PowerDecay { gamma, .. } | Self::LogCorrectedDecay { gamma, .. } => Some(gamma),
            Self::Constant { .. } => Some(0.0),
            _ => None,
        }
    }

    /// Closed-form expression in `r`, parseable by [`crate::expr::Expr`].
    pub fn expression(&self) -> String {
        match *self {
            Self::PowerDecay { epsilon, gamma } => format!("{epsilon:?}*(1+r)^(-{gamma:?})"),
            Self::LogCorrectedDecay { epsilon, gamma, k } => {
                format!("{epsilon:?}*(1+r)^(-{gamma:?})*(1-{k:?}/(1+log(1+r)))")
            }
            Self::LinearBounded { amplitude, radius } => format!("{amplitude:?}*(1+{radius:?}-r)"),
            Self::LogBounded { amplitude, radius } => format!("{amplitude:?}*log(1+{radius:?}+r)"),
            Self::Constant { c } => format!("{c:?}"),
        }
    }

    /// The profile as a convolution density (raised to `p` by the caller).
    pub fn to_radial_function(&self) -> Result<RadialFunction> {
        let me = *self;
        let (tail, support) = match *self {
            Self::PowerDecay { gamma, .. } | Self::LogCorrectedDecay { gamma, .. } => (TailSpec::Power(gamma), None),
            Self::LinearBounded { radius, .. } | Self::LogBounded { radius, .. } => (TailSpec::Compact, Some(radius)),
            Self::Constant { .. } => (TailSpec::Power(0.0), None),
        };
        RadialFunction::from_fn(self.expression(), move |r| me.value(r), tail, support, Vec::new())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

impl Radial for RadialProfile {
    fn value(&self, r: f64) -> f64 {
        match *self {
            Self::PowerDecay { epsilon, gamma } => epsilon * (1.0 + r).powf(-gamma),
            Self::LogCorrectedDecay { epsilon, gamma, k } => {
                epsilon * (1.0 + r).powf(-gamma) * (1.0 - k / (1.0 + r.ln_1p()))
            }
            Self::LinearBounded { amplitude, radius } => amplitude * (1.0 + radius - r),
            Self::LogBounded { amplitude, radius } => amplitude * (1.0 + radius + r).ln(),
            Self::Constant { c } => c,
        }
    }

    fn d1(&self, r: f64) -> f64 {
        match *self {
            Self::PowerDecay { epsilon, gamma } => -gamma * epsilon * (1.0 + r).powf(-gamma - 1.0),
            Self::LogCorrectedDecay { epsilon, gamma, k } => {
                let x = 1.0 + r;
                let w = 1.0 + r.ln_1p();
                let pw = x.powf(-gamma);
                -gamma * self.value(r) / x + epsilon * k * pw / (x * w * w)
            }
            Self::LinearBounded { amplitude, .. } => -amplitude,
            Self::LogBounded { amplitude, radius } => amplitude / (1.0 + radius + r),
            Self::Constant { .. } => 0.0,
        }
    }

    fn d2(&self, r: f64) -> f64 {
        match *self {
            Self::PowerDecay { epsilon, gamma } => gamma * (gamma + 1.0) * epsilon * (1.0 + r).powf(-gamma - 2.0),
            Self::LogCorrectedDecay { epsilon, gamma, k } => {
                let x = 1.0 + r;
                let w = 1.0 + r.ln_1p();
                let pw = x.powf(-gamma);
                let x2 = x * x;
                -gamma * self.d1(r) / x + gamma * self.value(r) / x2
                    - epsilon * k * (gamma + 1.0) * pw / (x2 * w * w)
                    - 2.0 * epsilon * k * pw / (x2 * w * w * w)
            }
            Self::LinearBounded { .. } | Self::Constant { .. } => 0.0,
            Self::LogBounded { amplitude, radius } => -amplitude / (1.0 + radius + r).powi(2),
        }
    }
}

/// A chosen exponent together with the open interval it was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaChoice {
    pub gamma: f64,
    pub lower: f64,
    pub upper: f64,
}

fn require_supercritical_dim(n: u32, m: f64) -> Result<()> {
    if !(m > 1.0) || !(n as f64 > m) {
        return Err(Error::domain(format!("needs N > m > 1, got N = {n}, m = {m}")));
    }
    Ok(())
}

fn midpoint(lower: f64, upper: f64) -> Result<GammaChoice> {
    if !(lower < upper) {
        return Err(Error::EmptyInterval { lo: lower, hi: upper });
    }
    Ok(GammaChoice { gamma: 0.5 * (lower + upper), lower, upper })
}

/// Midpoint of `(N/p, (N-m)/(m-1))`.
pub fn select_gamma_case_i(n: u32, m: f64, p: f64) -> Result<GammaChoice> {
    require_supercritical_dim(n, m)?;
    positive("p", p)?;
    let nf = n as f64;
    midpoint(nf / p, (nf - m) / (m - 1.0))
}

/// Midpoint of `(max{(alpha+m)/(p+q-m+1), alpha/p}, N/p)`.
pub fn select_gamma_case_ii(n: u32, m: f64, alpha: f64, p: f64, q: f64) -> Result<GammaChoice> {
    require_supercritical_dim(n, m)?;
    positive("p", p)?;
    let nf = n as f64;
    let upper = nf / p;
    let excess = p + q - m + 1.0;
    let first = if excess > 0.0 { (alpha + m) / excess } else { f64::INFINITY };
    let lower = first.max(alpha / p);
    let choice = midpoint(lower, upper)?;
    let cap = (nf - m) / (m - 1.0);
    if upper > cap {
        return Err(Error::Precondition(format!("N/p = {upper} exceeds (N-m)/(m-1) = {cap}; needs p >= N(m-1)/(N-m)")));
    }
    Ok(choice)
}

/// Log-corrected profile with `gamma = (N-m)/(m-1)` and `k` at half its bound.
pub fn make_log_corrected(n: u32, m: f64, epsilon: f64) -> Result<RadialProfile> {
    require_supercritical_dim(n, m)?;
    let gamma = (n as f64 - m) / (m - 1.0);
    RadialProfile::log_corrected(epsilon, gamma, half_k(gamma))
}

fn half_k(gamma: f64) -> f64 {
    gamma / (2.0 * (2.0 * gamma + 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundedKind {
    Linear,
    Log,
}

/// Whether the construction wants a small (`p+q > m-1`) or large
/// (`p+q < m-1`) amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AmplitudeMode {
    Small,
    Large,
}

pub fn make_bounded(kind: BoundedKind, mode: AmplitudeMode, radius: f64, seed: f64) -> Result<RadialProfile> {
    let _ = mode;
    match kind {
        BoundedKind::Linear => RadialProfile::linear_bounded(seed, radius),
        BoundedKind::Log => RadialProfile::log_bounded(seed, radius),
    }
}

/// Two log-corrected profiles sharing `eps` and the smaller of the two `k`s.
pub fn make_system_pair(n: u32, m1: f64, m2: f64, epsilon: f64) -> Result<(RadialProfile, RadialProfile)> {
    require_supercritical_dim(n, m1)?;
    require_supercritical_dim(n, m2)?;
    let nf = n as f64;
    let g1 = (nf - m1) / (m1 - 1.0);
    let g2 = (nf - m2) / (m2 - 1.0);
    let k = half_k(g1).min(half_k(g2));
    Ok((RadialProfile::log_corrected(epsilon, g1, k)?, RadialProfile::log_corrected(epsilon, g2, k)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * (1.0 + b.abs())
    }

    #[test]
    fn gamma_case_i() {
        assert!(close(select_gamma_case_i(4, 2.0, 3.0).unwrap().gamma, 5.0 / 3.0));
        assert!(matches!(select_gamma_case_i(4, 2.0, 2.0), Err(Error::EmptyInterval { .. })));
        assert!(close(select_gamma_case_i(6, 2.0, 2.0).unwrap().gamma, 3.5));
        assert!(select_gamma_case_i(2, 2.0, 2.0).is_err());
    }

    #[test]
    fn gamma_case_ii() {
        let g = select_gamma_case_ii(5, 2.0, 1.0, 2.0, 1.0).unwrap();
        assert!(close(g.gamma, 2.0));
        assert!(close(g.lower, 1.5) && close(g.upper, 2.5));
        assert!(matches!(select_gamma_case_ii(4, 2.0, 1.0, 2.0, 0.0), Err(Error::EmptyInterval { .. })));
        assert!(close(select_gamma_case_ii(4, 2.0, 2.0, 4.0, 2.0).unwrap().gamma, 0.9));
        assert!(matches!(select_gamma_case_ii(5, 2.0, 1.0, 1.0, 5.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn log_corrected_parameters() {
        match make_log_corrected(4, 2.0, 0.1).unwrap() {
            RadialProfile::LogCorrectedDecay { gamma, k, .. } => {
                assert!(close(gamma, 2.0));
                assert!(close(k, 1.0 / 7.0));
            }
            p => panic!("{p:?}"),
        }
        match make_log_corrected(3, 2.0, 0.1).unwrap() {
            RadialProfile::LogCorrectedDecay { gamma, k, .. } => {
                assert!(close(gamma, 1.0));
                assert!(close(k, 0.1));
            }
            p => panic!("{p:?}"),
        }
        assert!(make_log_corrected(2, 2.0, 0.1).is_err());
    }

    #[test]
    fn bounded_profiles() {
        let u = make_bounded(BoundedKind::Linear, AmplitudeMode::Small, 1.0, 0.01).unwrap();
        assert!(close(u.value(0.0), 0.02) && close(u.value(1.0), 0.01));
        let u = make_bounded(BoundedKind::Log, AmplitudeMode::Small, 1.0, 0.01).unwrap();
        assert!(close(u.value(0.5), 0.01 * 2.5f64.ln()));
        let u = make_bounded(BoundedKind::Linear, AmplitudeMode::Large, 1.0, 100.0).unwrap();
        assert!(close(u.value(0.25), 175.0));
    }

    #[test]
    fn system_pairs() {
        let (u, v) = make_system_pair(5, 2.0, 2.0, 0.1).unwrap();
        assert_eq!(u, v);
        match u {
            RadialProfile::LogCorrectedDecay { gamma, k, .. } => assert!(close(gamma, 3.0) && close(k, 1.0 / 6.0)),
            p => panic!("{p:?}"),
        }
        let (u, v) = make_system_pair(4, 2.0, 3.0, 0.1).unwrap();
        match (u, v) {
            (
                RadialProfile::LogCorrectedDecay { gamma: g1, k: k1, .. },
                RadialProfile::LogCorrectedDecay { gamma: g2, k: k2, .. },
            ) => {
                assert!(close(g1, 2.0) && close(g2, 0.5));
                assert!(close(k1, 1.0 / 16.0) && close(k2, 1.0 / 16.0));
            }
            p => panic!("{p:?}"),
        }
        assert!(make_system_pair(3, 3.0, 2.0, 0.1).is_err());
    }

    #[test]
    fn expression_matches_closed_form() {
        let profiles = [
            RadialProfile::power_decay(0.3, 1.7).unwrap(),
            make_log_corrected(4, 2.0, 0.2).unwrap(),
            RadialProfile::linear_bounded(2.0, 1.5).unwrap(),
            RadialProfile::log_bounded(0.5, 2.0).unwrap(),
            RadialProfile::constant(3.0).unwrap(),
        ];
        for p in profiles {
            let e = crate::expr::Expr::parse(&p.expression()).unwrap();
            for r in [0.0, 0.3, 1.0, 1.4] {
                assert!((e.eval(r) - p.value(r)).abs() < 1e-14, "{p:?} at {r}");
            }
        }
    }

    #[test]
    fn json_shape() {
        let p = RadialProfile::linear_bounded(0.5, 1.0).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"family":"linear_bounded","amplitude":0.5,"R":1.0}"#);
        let q: RadialProfile =
            serde_json::from_str(r#"{"family":"log_corrected_decay","epsilon":0.1,"gamma":2.0,"k":0.1}"#).unwrap();
        assert_eq!(q.amplitude(), 0.1);
    }

    #[test]
    fn density_tails() {
        let d = make_log_corrected(4, 2.0, 0.5).unwrap().to_radial_function().unwrap();
        assert!(matches!(d.tail(), crate::riesz::Tail::Power { exact: true, .. }));
        let b = RadialProfile::linear_bounded(1.0, 2.0).unwrap().to_radial_function().unwrap();
        assert_eq!(b.tail(), crate::riesz::Tail::Compact { radius: 2.0 });
    }
}
