//! Grid certification of `L_A u >= (I_alpha * u^p) u^q` with explicit error
//! budgets, amplitude tuning, and the three system pairings.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructor::RadialProfile;
use crate::error::{Error, Result};
use crate::operators::{log_grid, radial_divergence_terms, OperatorSpec, Radial};
use crate::riesz::{finiteness_check_c1, riesz_convolve_on, QuadratureConfig, RieszDomain, RieszStatus, RieszValue};

/// Relative rounding allowance charged on each side of the inequality.
const ROUNDING: f64 = 64.0 * f64::EPSILON;
const SEARCH_DECADES: u32 = 12;
const BISECTION_STEPS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spacing {
    Linear,
    LogSpaced,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(r_min: f64, r_max: f64, points: usize, spacing: Spacing) -> Result<Self> {
        let g = Self { r_min, r_max, points, spacing };
        g.validate()?;
        Ok(g)
    }

    /// 1000 log-spaced radii on `[1e-3, 100]`.
    pub fn whole_space() -> Self {
        Self { r_min: 1e-3, r_max: 100.0, points: 1000, spacing: Spacing::LogSpaced }
    }

    /// 500 evenly spaced radii on `[0, R]`.
    pub fn bounded(radius: f64) -> Self {
        Self { r_min: 0.0, r_max: radius, points: 500, spacing: Spacing::Linear }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min >= 0.0) || !self.r_max.is_finite() || !(self.r_min < self.r_max) {
            return Err(Error::domain(format!("grid needs 0 <= r_min < r_max, got [{}, {}]", self.r_min, self.r_max)));
        }
        if self.points < 2 {
            return Err(Error::domain("grid needs at least two points"));
        }
        if self.spacing == Spacing::LogSpaced && self.r_min == 0.0 {
            return Err(Error::domain("log-spaced grids need r_min > 0"));
        }
        Ok(())
    }

    pub fn radii(&self) -> Result<Vec<f64>> {
        self.validate()?;
        Ok(match self.spacing {
            Spacing::LogSpaced => log_grid(self.r_min, self.r_max, self.points),
            Spacing::Linear => {
                let h = (self.r_max - self.r_min) / (self.points - 1) as f64;
                (0..self.points)
                    .map(|i| if i + 1 == self.points { self.r_max } else { self.r_min + h * i as f64 })
                    .collect()
            }
        })
    }
}

/// Where the inequality is posed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    WholeSpace,
    Bounded { radius: f64 },
}

impl Domain {
    fn riesz(self, n: u32) -> RieszDomain {
        match self {
            Domain::WholeSpace => RieszDomain::WholeSpace,
            Domain::Bounded { radius } if n == 1 => RieszDomain::Interval { radius },
            Domain::Bounded { radius } => RieszDomain::Ball { radius },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Shrink,
    Grow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SystemShape {
    Sys1,
    Sys2,
    Sys3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum CertStatus {
    Certified,
    Failed {
        worst_r: f64,
        #[serde(with = "crate::extreal")]
        worst_margin: f64,
    },
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evidence {
    /// Checked pointwise on the listed radii only.
    GridEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunedParams {
    /// `epsilon`, `delta`, `L` or `c`.
    pub symbol: String,
    pub amplitude: f64,
    pub k: Option<f64>,
    pub gamma: Option<f64>,
}

impl TunedParams {
    fn of(profile: &RadialProfile, direction: Option<Direction>) -> Self {
        let (symbol, k, gamma) = match *profile {
            RadialProfile::PowerDecay { gamma, .. } => ("epsilon", None, Some(gamma)),
            RadialProfile::LogCorrectedDecay { gamma, k, .. } => ("epsilon", Some(k), Some(gamma)),
            RadialProfile::LinearBounded { .. } | RadialProfile::LogBounded { .. } => {
                (if direction == Some(Direction::Grow) { "L" } else { "delta" }, None, None)
            }
            RadialProfile::Constant { .. } => ("c", None, None),
        };
        Self { symbol: symbol.into(), amplitude: profile.amplitude(), k, gamma }
    }
}

/// Value of the left side at `r = 0`, obtained as the limit `r -> 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginLimit {
    #[serde(with = "crate::extreal")]
    pub lhs: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub grid: Vec<f64>,
    #[serde(with = "crate::extreal::vec")]
    pub lhs: Vec<f64>,
    #[serde(with = "crate::extreal::vec")]
    pub rhs: Vec<f64>,
    #[serde(with = "crate::extreal::vec")]
    pub margins: Vec<f64>,
    #[serde(with = "crate::extreal::vec")]
    pub quadrature_budget: Vec<f64>,
    pub tuned_params: TunedParams,
    pub c1_ok: bool,
    pub status: CertStatus,
    pub origin: Option<OriginLimit>,
    pub evidence: Evidence,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.status == CertStatus::Certified
    }

    /// Columns `r,lhs,rhs,margin,budget`, one row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,lhs,rhs,margin,budget\n");
        for i in 0..self.grid.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                self.grid[i], self.lhs[i], self.rhs[i], self.margins[i], self.quadrature_budget[i]
            );
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

/// Least-squares slope of `log(side * (1 + log(1+r))^log_power)` against
/// `log(1+r)` over grid points in `[r_lo, r_hi]`.
pub fn loglog_slope(cert: &Certificate, side: Side, r_lo: f64, r_hi: f64, log_power: f64) -> Option<f64> {
    let values = match side {
        Side::Lhs => &cert.lhs,
        Side::Rhs => &cert.rhs,
    };
    let pts: Vec<(f64, f64)> = cert
        .grid
        .iter()
        .zip(values)
        .filter(|(r, v)| **r >= r_lo && **r <= r_hi && **v > 0.0 && v.is_finite())
        .map(|(&r, &v)| (r.ln_1p(), v.ln() + log_power * (1.0 + r.ln_1p()).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// The convolution `I_alpha * f^p` of a unit-amplitude density on the grid.
struct UnitConvolution {
    values: Vec<RieszValue>,
    divergent: bool,
    c1_ok: bool,
}

fn convolve_grid(
    n: u32,
    alpha: f64,
    density: &RadialProfile,
    p: f64,
    radii: &[f64],
    domain: Domain,
    cfg: &QuadratureConfig,
) -> Result<UnitConvolution> {
    let f = density.with_amplitude(1.0).to_radial_function()?;
    let c1_ok = match domain {
        Domain::WholeSpace => finiteness_check_c1(n, alpha, p, &f),
        Domain::Bounded { .. } => true,
    };
    let rd = domain.riesz(n);
    let first = riesz_convolve_on(n, alpha, &f, p, radii[0], rd, cfg)?;
    if first.status == RieszStatus::Divergent {
        return Ok(UnitConvolution { values: vec![first; radii.len()], divergent: true, c1_ok });
    }
    let rest: Vec<RieszValue> =
        radii[1..].par_iter().map(|&r| riesz_convolve_on(n, alpha, &f, p, r, rd, cfg)).collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(radii.len());
    values.push(first);
    values.extend(rest);
    Ok(UnitConvolution { values, divergent: false, c1_ok })
}

/// `(L_A u)(r)` with a rounding allowance; `r = 0` is handled as a limit.
fn lhs_at(op: &OperatorSpec, u: &RadialProfile, r: f64, n: u32) -> Result<(f64, f64)> {
    if r > 0.0 {
        return match radial_divergence_terms(op, u, r, n) {
            Ok(t) => Ok((-t.total(), ROUNDING * (t.second_order.abs() + t.first_order.abs()))),
            Err(Error::Indeterminate { .. }) => Ok((f64::NAN, 0.0)),
            Err(e) => Err(e),
        };
    }
    let d1 = u.d1(0.0);
    let d2 = u.d2(0.0);
    let t = d1.abs();
    if t == 0.0 && op.m() < 2.0 {
        return Ok((f64::NAN, 0.0));
    }
    if n > 1 && d1 != 0.0 {
        return Ok((-d1.signum() * f64::INFINITY, 0.0));
    }
    let v = if t == 0.0 { -(n as f64) * d2 * op.eval_a(0.0) } else { -d2 * (t * op.eval_a_prime(t)? + op.eval_a(t)) };
    Ok((v, ROUNDING * v.abs()))
}

/// One inequality `L u >= (I * X^p) Y^q` with the convolution precomputed.
struct Prepared<'a> {
    op: &'a OperatorSpec,
    n: u32,
    p: f64,
    q: f64,
    radii: Vec<f64>,
    conv: UnitConvolution,
}

impl<'a> Prepared<'a> {
    #[allow(clippy::too_many_arguments)]
    fn new(
        op: &'a OperatorSpec,
        density: &RadialProfile,
        n: u32,
        alpha: f64,
        p: f64,
        q: f64,
        domain: Domain,
        grid: &GridSpec,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < n as f64) {
            return Err(Error::domain(format!("alpha must lie in (0, N), got {alpha}")));
        }
        if !(p > 0.0) || !q.is_finite() {
            return Err(Error::domain(format!("need p > 0 and finite q, got p = {p}, q = {q}")));
        }
        let radii = grid.radii()?;
        if let Domain::Bounded { radius } = domain {
            if grid.r_max > radius {
                return Err(Error::domain(format!("grid exceeds the domain radius {radius}")));
            }
        }
        let conv = convolve_grid(n, alpha, density, p, &radii, domain, cfg)?;
        Ok(Self { op, n, p, q, radii, conv })
    }

    fn certify(
        &self,
        lhs_profile: &RadialProfile,
        density_amplitude: f64,
        multiplier: &RadialProfile,
        params: TunedParams,
    ) -> Result<Certificate> {
        let k = self.radii.len();
        let mut cert = Certificate {
            grid: self.radii.clone(),
            lhs: Vec::with_capacity(k),
            rhs: Vec::with_capacity(k),
            margins: Vec::with_capacity(k),
            quadrature_budget: Vec::with_capacity(k),
            tuned_params: params,
            c1_ok: self.conv.c1_ok,
            status: CertStatus::Divergent,
            origin: None,
            evidence: Evidence::GridEvidence,
            notes: Vec::new(),
        };
        if self.conv.divergent {
            cert.notes.push(format!("the Riesz potential of u^p diverges (p * gamma <= alpha with p = {})", self.p));
            for _ in 0..k {
                cert.lhs.push(f64::NAN);
                cert.rhs.push(f64::INFINITY);
                cert.margins.push(f64::NEG_INFINITY);
                cert.quadrature_budget.push(f64::INFINITY);
            }
            return Ok(cert);
        }
        let scale = density_amplitude.powf(self.p);
        let mut indeterminate = 0usize;
        for (i, &r) in self.radii.iter().enumerate() {
            let (lhs, lhs_budget) = lhs_at(self.op, lhs_profile, r, self.n)?;
            if lhs.is_nan() {
                indeterminate += 1;
            }
            let y = multiplier.value(r);
            if !(y > 0.0) {
                return Err(Error::domain(format!("profile must be positive on the grid, u({r}) = {y}")));
            }
            let mult = y.powf(self.q);
            let c = self.conv.values[i].scaled(scale);
            let rhs = c.value * mult;
            let budget = lhs_budget + c.budget() * mult + ROUNDING * rhs.abs();
            if r == 0.0 {
                let note = if lhs.is_infinite() {
                    "limit of the (N-1)/r term with u'(0) != 0".to_string()
                } else {
                    "finite limit of the radial identity".to_string()
                };
                cert.origin = Some(OriginLimit { lhs, note });
            }
            cert.lhs.push(lhs);
            cert.rhs.push(rhs);
            cert.margins.push(lhs - rhs);
            cert.quadrature_budget.push(budget);
        }
        if indeterminate > 0 {
            cert.notes.push(format!("{indeterminate} grid point(s) hit u' = 0 with m < 2 and count as failures"));
        }
        let mut worst: Option<(usize, f64)> = None;
        for i in 0..k {
            let slack = cert.margins[i] - cert.quadrature_budget[i];
            let slack = if slack.is_nan() { f64::NEG_INFINITY } else { slack };
            if worst.is_none_or(|(_, w)| slack < w) {
                worst = Some((i, slack));
            }
        }
        let (wi, wslack) = worst.expect("grid has at least two points");
        cert.status = if wslack >= 0.0 && cert.c1_ok {
            CertStatus::Certified
        } else {
            if !cert.c1_ok {
                cert.notes.push("condition (c1) fails".into());
            }
            CertStatus::Failed { worst_r: cert.grid[wi], worst_margin: cert.margins[wi] }
        };
        Ok(cert)
    }
}

/// Checks `L_A u >= (I_alpha * u^p) u^q` at every grid point.
#[allow(clippy::too_many_arguments)]
pub fn certify_single(
    op: &OperatorSpec,
    u: &RadialProfile,
    n: u32,
    alpha: f64,
    p: f64,
    q: f64,
    domain: Domain,
    grid: &GridSpec,
    cfg: &QuadratureConfig,
) -> Result<Certificate> {
    certify_component(op, u, u, u, n, alpha, p, q, domain, grid, cfg)
}

/// Checks `L_A x >= (I_alpha * y^p) z^q`.
#[allow(clippy::too_many_arguments)]
pub fn certify_component(
    op: &OperatorSpec,
    lhs: &RadialProfile,
    density: &RadialProfile,
    multiplier: &RadialProfile,
    n: u32,
    alpha: f64,
    p: f64,
    q: f64,
    domain: Domain,
    grid: &GridSpec,
    cfg: &QuadratureConfig,
) -> Result<Certificate> {
    let prep = Prepared::new(op, density, n, alpha, p, q, domain, grid, cfg)?;
    prep.certify(lhs, density.amplitude(), multiplier, TunedParams::of(lhs, None))
}

/// Result of an amplitude search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tuned {
    pub amplitude: f64,
    pub certificate: Certificate,
    /// Every amplitude tried, with whether it certified.
    pub trail: Vec<(f64, bool)>,
}

/// Searches amplitudes `seed * 10^(+-i)`, `i = 0..=12`, then bisects
/// geometrically between the last failure and the first success.
#[allow(clippy::too_many_arguments)]
pub fn tune_amplitude(
    op: &OperatorSpec,
    seed: &RadialProfile,
    n: u32,
    alpha: f64,
    p: f64,
    q: f64,
    domain: Domain,
    grid: &GridSpec,
    cfg: &QuadratureConfig,
    direction: Direction,
) -> Result<Tuned> {
    if let Domain::Bounded { .. } = domain {
        if (p + q - (op.m() - 1.0)).abs() <= 1e-12 * (1.0 + op.m()) {
            return Err(Error::Precondition(format!(
                "p + q = m - 1 = {}: both sides scale alike in the amplitude",
                op.m() - 1.0
            )));
        }
    }
    let prep = Prepared::new(op, seed, n, alpha, p, q, domain, grid, cfg)?;
    let run = |a: f64| {
        let u = seed.with_amplitude(a);
        prep.certify(&u, a, &u, TunedParams::of(&u, Some(direction)))
    };
    search(seed.amplitude(), direction, run)
}

fn search(seed: f64, direction: Direction, mut run: impl FnMut(f64) -> Result<Certificate>) -> Result<Tuned> {
    let factor: f64 = match direction {
        Direction::Shrink => 0.1,
        Direction::Grow => 10.0,
    };
    let mut trail = Vec::new();
    let mut failed: Option<f64> = None;
    let mut last = None;
    for i in 0..=SEARCH_DECADES {
        let a = seed * factor.powi(i as i32);
        let cert = run(a)?;
        if cert.status == CertStatus::Divergent {
            trail.push((a, false));
            return Ok(Tuned { amplitude: a, certificate: cert, trail });
        }
        let ok = cert.is_certified();
        trail.push((a, ok));
        if ok {
            let (mut good, mut good_cert) = (a, cert);
            if let Some(mut bad) = failed {
                for _ in 0..BISECTION_STEPS {
                    let mid = (good * bad).sqrt();
                    let c = run(mid)?;
                    let ok = c.is_certified();
                    trail.push((mid, ok));
                    if ok {
                        good = mid;
                        good_cert = c;
                    } else {
                        bad = mid;
                    }
                }
            }
            return Ok(Tuned { amplitude: good, certificate: good_cert, trail });
        }
        failed = Some(a);
        last = Some(a);
    }
    Err(Error::NoAmplitudeFound { decades: SEARCH_DECADES, last_amplitude: last.unwrap_or(seed) })
}

/// Exponents of a two-equation system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemExponents {
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

/// `(convolved, multiplier)` for each component, as indices 0 = u, 1 = v.
fn pairing(shape: SystemShape) -> [(usize, usize); 2] {
    match shape {
        SystemShape::Sys1 => [(1, 0), (0, 1)],
        SystemShape::Sys2 => [(1, 1), (0, 0)],
        SystemShape::Sys3 => [(0, 1), (1, 0)],
    }
}

/// Certifies `L_A u >= (I_alpha * X^p) Y^q` and `L_B v >= (I_beta * Z^r) W^s`
/// with the pairing given by `shape`.
#[allow(clippy::too_many_arguments)]
pub fn certify_system(
    op_a: &OperatorSpec,
    op_b: &OperatorSpec,
    u: &RadialProfile,
    v: &RadialProfile,
    n: u32,
    exps: SystemExponents,
    shape: SystemShape,
    domain: Domain,
    grid: &GridSpec,
    cfg: &QuadratureConfig,
) -> Result<(Certificate, Certificate)> {
    let uv = [u, v];
    let [(c1, m1), (c2, m2)] = pairing(shape);
    let a = certify_component(op_a, u, uv[c1], uv[m1], n, exps.alpha, exps.p, exps.q, domain, grid, cfg)?;
    let b = certify_component(op_b, v, uv[c2], uv[m2], n, exps.beta, exps.r, exps.s, domain, grid, cfg)?;
    Ok((a, b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunedSystem {
    pub amplitude: f64,
    pub first: Certificate,
    pub second: Certificate,
    pub trail: Vec<(f64, bool)>,
}

/// Shrinks the amplitude shared by both profiles until both components certify.
#[allow(clippy::too_many_arguments)]
pub fn tune_system(
    op_a: &OperatorSpec,
    op_b: &OperatorSpec,
    u: &RadialProfile,
    v: &RadialProfile,
    n: u32,
    exps: SystemExponents,
    shape: SystemShape,
    domain: Domain,
    grid: &GridSpec,
    cfg: &QuadratureConfig,
) -> Result<TunedSystem> {
    let uv = [u, v];
    let [(c1, m1), (c2, m2)] = pairing(shape);
    let pa = Prepared::new(op_a, uv[c1], n, exps.alpha, exps.p, exps.q, domain, grid, cfg)?;
    let pb = Prepared::new(op_b, uv[c2], n, exps.beta, exps.r, exps.s, domain, grid, cfg)?;
    let mut second = None;
    let run = |a: f64| -> Result<Certificate> {
        let w = [u.with_amplitude(a), v.with_amplitude(a)];
        let ca = pa.certify(&w[0], a, &w[m1], TunedParams::of(&w[0], None))?;
        let cb = pb.certify(&w[1], a, &w[m2], TunedParams::of(&w[1], None))?;
        let mut merged = ca.clone();
        merged.status = if cb.status == CertStatus::Divergent || !ca.is_certified() { ca.status } else { cb.status };
        if cb.status == CertStatus::Divergent {
            merged.status = CertStatus::Divergent;
        }
        second = Some((a, ca, cb));
        Ok(merged)
    };
    let tuned = search(u.amplitude(), Direction::Shrink, run)?;
    let (first, second) = match second {
        Some((a, ca, cb)) if a == tuned.amplitude => (ca, cb),
        _ => {
            let w = [u.with_amplitude(tuned.amplitude), v.with_amplitude(tuned.amplitude)];
            (
                pa.certify(&w[0], tuned.amplitude, &w[m1], TunedParams::of(&w[0], None))?,
                pb.certify(&w[1], tuned.amplitude, &w[m2], TunedParams::of(&w[1], None))?,
            )
        }
    };
    Ok(TunedSystem { amplitude: tuned.amplitude, first, second, trail: tuned.trail })
}
