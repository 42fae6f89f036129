//! Radial Riesz potentials `(I_alpha * f^p)(r)` in `R^N`.
//!
//! For radial `f` the convolution reduces to
//! `A_alpha * |S^{N-2}| * int_0^inf f(s)^p s^{N-1} K(r, s) ds` with the
//! angular kernel `K(r, s) = int_0^pi sin^{N-2}(th) |x - y|^{alpha-N} dth`.
//! On the line the kernel is `|r - s|^{alpha-1} + (r + s)^{alpha-1}`.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quadrature::{integrate_segments, integrate_segments_offset, Segment, Tolerance};

/// `A_alpha = Gamma((N-alpha)/2) / (Gamma(alpha/2) pi^{N/2} 2^alpha)`.
pub fn riesz_constant(n: u32, alpha: f64) -> Result<f64> {
    check_alpha(n, alpha)?;
    let nf = n as f64;
    let ln = ln_gamma(0.5 * (nf - alpha))
        - ln_gamma(0.5 * alpha)
        - 0.5 * nf * std::f64::consts::PI.ln()
        - alpha * std::f64::consts::LN_2;
    Ok(ln.exp())
}

/// Surface measure of the unit sphere `S^{n-1}` in `R^n`; `|S^0| = 2`.
pub fn sphere_area(n: u32) -> f64 {
    let h = 0.5 * n as f64;
    2.0 * (h * std::f64::consts::PI.ln() - ln_gamma(h)).exp()
}

fn check_alpha(n: u32, alpha: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(alpha > 0.0 && alpha < n as f64) {
        return Err(Error::domain(format!("alpha must lie in (0, {n}), got {alpha}")));
    }
    Ok(())
}

const INNER_REL: f64 = 1e-11;

fn kernel_exponent(n: u32, alpha: f64) -> f64 {
    0.5 * (alpha - n as f64)
}

/// Angular kernel for `r != s`, with `d = |r - s|` supplied separately so it
/// can carry full precision when `s` is close to `r`.
fn angular_kernel_raw(n: u32, r: f64, s: f64, d: f64, alpha: f64, max_sub: usize, failed: &AtomicBool) -> f64 {
    let e = kernel_exponent(n, alpha);
    let four_rs = 4.0 * r * s;
    let d2 = d * d;
    let nm2 = (n - 2) as i32;
    let f = |th: f64| {
        let h = (0.5 * th).sin();
        let w = if nm2 == 0 { 1.0 } else { th.sin().powi(nm2) };
        w * (d2 + four_rs * h * h).powf(e)
    };
    let pi = std::f64::consts::PI;
    let theta_c = d / (r * s).sqrt();
    let mut pts = vec![0.0];
    if theta_c < pi {
        let mut t = theta_c;
        while t < pi {
            pts.push(t);
            t *= 8.0;
        }
    }
    pts.push(0.5 * pi);
    pts.push(pi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let segs: Vec<Segment> = pts.windows(2).map(|w| Segment::uniform(w[0], w[1])).collect();
    let res = integrate_segments(f, &segs, Tolerance::new(0.0, INNER_REL, max_sub));
    if !res.converged {
        failed.store(true, Ordering::Relaxed);
    }
    res.value
}

/// `int_0^pi sin^{N-2}(th) (r^2 + s^2 - 2 r s cos th)^{(alpha-N)/2} dth`.
pub fn angular_kernel(n: u32, r: f64, s: f64, alpha: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("angular kernel needs N >= 2; use the line kernel for N = 1"));
    }
    check_alpha(n, alpha)?;
    if !(r > 0.0 && s > 0.0) {
        return Err(Error::domain("angular kernel needs r, s > 0"));
    }
    if r == s {
        return Err(Error::domain("angular kernel is singular at r = s; split the radial integral there"));
    }
    let failed = AtomicBool::new(false);
    let v = angular_kernel_raw(n, r, s, (r - s).abs(), alpha, 2000, &failed);
    if failed.load(Ordering::Relaxed) {
        return Err(Error::BudgetExceeded { achieved: f64::NAN, budget: INNER_REL * v.abs() });
    }
    Ok(v)
}

/// Tail metadata requested for a radial function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailSpec {
    Power(f64),
    Compact,
}

impl Serialize for TailSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TailSpec::Power(g) => s.serialize_f64(*g),
            TailSpec::Compact => s.serialize_str("compact"),
        }
    }
}

impl<'de> Deserialize<'de> for TailSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(g) => Ok(TailSpec::Power(g)),
            Raw::Str(s) if s == "compact" => Ok(TailSpec::Compact),
            Raw::Str(s) => {
                Err(serde::de::Error::custom(format!("tail_exponent must be a number or \"compact\", got {s:?}")))
            }
        }
    }
}

/// Validated tail behaviour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tail {
    /// `f(r) r^gamma` stays in `[c/2, 2c]` for `r >= r_tail` (`exact`), or
    /// only below `constant` when `exact` is false (faster-than-power decay).
    Power {
        exponent: f64,
        constant: f64,
        r_tail: f64,
        exact: bool,
    },
    Compact {
        radius: f64,
    },
}

const PROBE_FAR: f64 = 1e6;
const PROBE_MAX_TAIL: f64 = 1e4;

/// A non-negative radial density with validated tail metadata.
#[derive(Clone)]
pub struct RadialFunction {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    tail_spec: TailSpec,
    tail: Tail,
    support: Option<f64>,
    breakpoints: Vec<f64>,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("expr", &self.label)
            .field("tail", &self.tail)
            .field("support", &self.support)
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct RadialFunctionJson {
    expr: String,
    tail_exponent: TailSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support: Option<f64>,
}

impl Serialize for RadialFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RadialFunctionJson { expr: self.label.clone(), tail_exponent: self.tail_spec, support: self.support }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RadialFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = RadialFunctionJson::deserialize(d)?;
        RadialFunction::parse(&j.expr, j.tail_exponent, j.support).map_err(serde::de::Error::custom)
    }
}

impl RadialFunction {
    /// Parses an expression in `r` and validates the requested tail.
    pub fn parse(src: &str, tail: TailSpec, support: Option<f64>) -> Result<Self> {
        let e = Expr::parse(src)?;
        let breaks = e.breakpoints();
        let support = support.or_else(|| if tail == TailSpec::Compact { e.support_bound() } else { None });
        let label = e.source().to_string();
        Self::from_fn(label, move |r| e.eval(r), tail, support, breaks)
    }

    /// Wraps a closure; `breakpoints` lists jump locations of `f`.
    pub fn from_fn<F>(
        label: impl Into<String>,
        f: F,
        tail: TailSpec,
        support: Option<f64>,
        breakpoints: Vec<f64>,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let f: Arc<dyn Fn(f64) -> f64 + Send + Sync> = Arc::new(f);
        let cut = support.unwrap_or(f64::INFINITY);
        let probe_tail = probe(&|r| if r > cut { 0.0 } else { f(r) }, tail, support)?;
        let mut breakpoints: Vec<f64> = breakpoints.into_iter().filter(|b| b.is_finite() && *b > 0.0).collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Ok(Self { label: label.into(), f, tail_spec: tail, tail: probe_tail, support, breakpoints })
    }

    pub fn eval(&self, r: f64) -> f64 {
        if let Some(s) = self.support {
            if r > s {
                return 0.0;
            }
        }
        (self.f)(r)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

fn probe(f: &dyn Fn(f64) -> f64, tail: TailSpec, support: Option<f64>) -> Result<Tail> {
    for r in [0.0, 1e-3, 0.1, 0.5, 1.0, 2.0, 10.0] {
        let v = f(r);
        if v < 0.0 || v.is_nan() {
            return Err(Error::domain(format!("density must be non-negative, f({r}) = {v}")));
        }
    }
    match tail {
        TailSpec::Compact => {
            let radius = support.ok_or_else(|| {
                Error::TailMetadataInvalid("compact tail needs a support radius (or an indicator factor)".into())
            })?;
            if !(radius >= 0.0) || !radius.is_finite() {
                return Err(Error::TailMetadataInvalid(format!("support radius must be finite, got {radius}")));
            }
            Ok(Tail::Compact { radius })
        }
        TailSpec::Power(g) => {
            if !(g >= 0.0) || !g.is_finite() {
                return Err(Error::TailMetadataInvalid(format!("tail exponent must be non-negative, got {g}")));
            }
            let grid = crate::operators::log_grid(1.0, PROBE_FAR, 61);
            let scaled: Vec<f64> = grid.iter().map(|&r| f(r) * r.powf(g)).collect();
            if scaled.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::TailMetadataInvalid(
                    "density is not finite and non-negative on the probe grid".into(),
                ));
            }
            let c = *scaled.last().expect("non-empty");
            if c > 0.0 {
                let mut start = None;
                for i in (0..grid.len()).rev() {
                    if scaled[i] < 0.5 * c || scaled[i] > 2.0 * c {
                        break;
                    }
                    start = Some(i);
                }
                match start {
                    Some(i) if grid[i] <= PROBE_MAX_TAIL => {
                        Ok(Tail::Power { exponent: g, constant: c, r_tail: grid[i], exact: true })
                    }
                    _ => Err(Error::TailMetadataInvalid(format!(
                        "f(r) r^{g} does not settle within [c/2, 2c] (c = {c:e}) before r = {PROBE_MAX_TAIL:e}"
                    ))),
                }
            } else {
                // Decays faster than the declared power: usable as an upper bound
                // once the scaled sequence is non-increasing.
                let mut i = grid.len() - 1;
                while i > 0 && scaled[i - 1] >= scaled[i] {
                    i -= 1;
                }
                if grid[i] > PROBE_MAX_TAIL {
                    return Err(Error::TailMetadataInvalid(format!("f(r) r^{g} is not eventually decreasing")));
                }
                Ok(Tail::Power { exponent: g, constant: scaled[i], r_tail: grid[i], exact: false })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Initial truncation radius; `None` picks `max(100, 50 r)`.
    #[serde(default)]
    pub truncation_radius: Option<f64>,
    /// Subdivision cap of each angular integral.
    pub angular_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-15, max_subdivisions: 4000, truncation_radius: None, angular_nodes: 400 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if let Some(r) = self.truncation_radius {
            if !(r > 0.0) {
                return Err(Error::domain("truncation radius must be positive"));
            }
        }
        if self.max_subdivisions == 0 || self.angular_nodes == 0 {
            return Err(Error::domain("subdivision caps must be positive"));
        }
        Ok(())
    }

    fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RieszStatus {
    Finite,
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszValue {
    #[serde(with = "crate::extreal")]
    pub value: f64,
    pub error_estimate: f64,
    #[serde(with = "crate::extreal")]
    pub tail_bound: f64,
    pub status: RieszStatus,
}

impl RieszValue {
    fn divergent() -> Self {
        Self { value: f64::INFINITY, error_estimate: 0.0, tail_bound: f64::INFINITY, status: RieszStatus::Divergent }
    }

    fn zero() -> Self {
        Self { value: 0.0, error_estimate: 0.0, tail_bound: 0.0, status: RieszStatus::Finite }
    }

    /// Multiplies value and error terms by `k >= 0`.
    pub fn scaled(&self, k: f64) -> Self {
        match self.status {
            RieszStatus::Divergent => *self,
            RieszStatus::Finite => Self {
                value: self.value * k,
                error_estimate: self.error_estimate * k,
                tail_bound: self.tail_bound * k,
                status: self.status,
            },
        }
    }

    /// Error estimate plus tail bound.
    pub fn budget(&self) -> f64 {
        self.error_estimate + self.tail_bound
    }
}

/// Where the convolution integrates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RieszDomain {
    WholeSpace,
    /// The ball `B_R`.
    Ball {
        radius: f64,
    },
    /// The interval `(0, R)` on the line (`N = 1` only).
    Interval {
        radius: f64,
    },
}

/// `true` iff `int u^p / (1 + |y|^{N-alpha}) dy < inf`, decided from the tail.
pub fn finiteness_check_c1(n: u32, alpha: f64, p: f64, u: &RadialFunction) -> bool {
    let _ = n;
    match u.tail {
        Tail::Compact { .. } => true,
        Tail::Power { exponent, .. } => p * exponent > alpha,
    }
}

/// `(I_alpha * f^p)(r)` over `R^N`.
pub fn riesz_convolve(
    n: u32,
    alpha: f64,
    f: &RadialFunction,
    p: f64,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<RieszValue> {
    riesz_convolve_on(n, alpha, f, p, r, RieszDomain::WholeSpace, cfg)
}

/// `(I_alpha * f^p)(r)` with the integral restricted to `domain`.
pub fn riesz_convolve_on(
    n: u32,
    alpha: f64,
    f: &RadialFunction,
    p: f64,
    r: f64,
    domain: RieszDomain,
    cfg: &QuadratureConfig,
) -> Result<RieszValue> {
    check_alpha(n, alpha)?;
    cfg.validate()?;
    if !(p > 0.0) {
        return Err(Error::domain(format!("p must be positive, got {p}")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("radius must be finite and non-negative, got {r}")));
    }
    let (domain_edge, half_line) = match domain {
        RieszDomain::WholeSpace => (None, false),
        RieszDomain::Ball { radius } => (Some(radius), false),
        RieszDomain::Interval { radius } => {
            if n != 1 {
                return Err(Error::domain("interval domains are one-dimensional"));
            }
            (Some(radius), true)
        }
    };
    if let Some(rad) = domain_edge {
        if !(rad > 0.0) {
            return Err(Error::domain("domain radius must be positive"));
        }
    }
    let a_alpha = riesz_constant(n, alpha)?;
    let ctx = Ctx { n, alpha, p, r, f, half_line, cfg };

    let support = match f.tail {
        Tail::Compact { radius } => Some(radius),
        Tail::Power { .. } => None,
    };
    let finite_upper = match (support, domain_edge) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };

    let prefactor = a_alpha * ctx.measure();
    if let Some(upper) = finite_upper {
        if upper <= 0.0 {
            return Ok(RieszValue::zero());
        }
        let q = ctx.integrate(0.0, upper)?;
        let value = prefactor * q.value;
        let err = prefactor * q.error;
        return finish(value, err, 0.0, cfg);
    }

    let Tail::Power { exponent, constant, r_tail, exact } = f.tail else { unreachable!() };
    if p * exponent <= alpha {
        if exact {
            return Ok(RieszValue::divergent());
        }
        return Err(Error::TailMetadataInvalid(format!(
            "declared tail exponent {exponent} is too slow to bound the tail (p*gamma <= alpha) and the density has no exact power tail"
        )));
    }

    let tail_bound = |big_r: f64| -> f64 {
        let c = 2.0 * constant;
        a_alpha
            * sphere_area(n)
            * c.powf(p)
            * (1.0 - r / big_r).powf(alpha - n as f64)
            * big_r.powf(alpha - p * exponent)
            / (p * exponent - alpha)
    };

    let mut big_r = cfg.truncation_radius.unwrap_or_else(|| 100f64.max(50.0 * r)).max(2.0 * r).max(r_tail);
    let core = ctx.integrate(0.0, big_r)?;
    let mut value = core.value;
    let mut err = core.error;
    const R_CAP: f64 = 1e14;
    while tail_bound(big_r) > 0.5 * cfg.target(prefactor * value) && big_r < R_CAP {
        let next = big_r * 10.0;
        let piece = ctx.integrate(big_r, next)?;
        value += piece.value;
        err += piece.error;
        big_r = next;
    }
    // Metadata sanity: the next doubling must respect the analytic bound.
    let check = ctx.integrate(big_r, 2.0 * big_r)?;
    let bound = tail_bound(big_r);
    if prefactor * check.value > bound * (1.0 + 1e-9) + prefactor * check.error {
        return Err(Error::TailMetadataInvalid(format!(
            "numerical tail piece on [{big_r:e}, {:e}] = {:e} exceeds the analytic tail bound {bound:e}",
            2.0 * big_r,
            prefactor * check.value,
        )));
    }
    finish(prefactor * value, prefactor * err, bound, cfg)
}

fn finish(value: f64, err: f64, tail: f64, cfg: &QuadratureConfig) -> Result<RieszValue> {
    let budget = cfg.target(value);
    if !value.is_finite() || !err.is_finite() {
        return Err(Error::BudgetExceeded { achieved: f64::INFINITY, budget });
    }
    if err + tail > budget {
        return Err(Error::BudgetExceeded { achieved: err + tail, budget });
    }
    Ok(RieszValue { value, error_estimate: err, tail_bound: tail, status: RieszStatus::Finite })
}

struct Ctx<'a> {
    n: u32,
    alpha: f64,
    p: f64,
    r: f64,
    f: &'a RadialFunction,
    half_line: bool,
    cfg: &'a QuadratureConfig,
}

struct Piece {
    value: f64,
    error: f64,
}

impl Ctx<'_> {
    /// The constant in front of the reduced one-dimensional integral.
    fn measure(&self) -> f64 {
        let n = self.n;
        if self.r == 0.0 {
            if self.half_line {
                1.0
            } else {
                sphere_area(n)
            }
        } else if n == 1 {
            1.0
        } else {
            sphere_area(n - 1)
        }
    }

    fn density(&self, s: f64) -> f64 {
        let v = self.f.eval(s);
        if v == 0.0 {
            0.0
        } else {
            v.powf(self.p)
        }
    }

    /// Reduced integral over `[lo, hi]` without the prefactor.
    fn integrate(&self, lo: f64, hi: f64) -> Result<Piece> {
        let (segs, dl, dr) = self.segments(lo, hi);
        let r = self.r;
        let n = self.n;
        let alpha = self.alpha;
        let failed = AtomicBool::new(false);
        let tol = Tolerance::new(0.0, 0.1 * self.cfg.rel_tol, self.cfg.max_subdivisions);
        let res = if r == 0.0 {
            integrate_segments_offset(
                |s, off| {
                    let s_exact = if s <= dr { off.abs() } else { s };
                    let fp = self.density(s);
                    if fp == 0.0 {
                        0.0
                    } else {
                        fp * s_exact.powf(alpha - 1.0)
                    }
                },
                &segs,
                tol,
            )
        } else {
            integrate_segments_offset(
                |s, off| {
                    let fp = self.density(s);
                    if fp == 0.0 {
                        return 0.0;
                    }
                    let d = if s >= r - dl && s <= r + dr { off.abs() } else { (s - r).abs() };
                    if n == 1 {
                        let mut k = d.powf(alpha - 1.0);
                        if !self.half_line {
                            k += (r + s).powf(alpha - 1.0);
                        }
                        fp * k
                    } else {
                        let k = angular_kernel_raw(n, r, s, d, alpha, self.cfg.angular_nodes, &failed);
                        fp * s.powi(n as i32 - 1) * k
                    }
                },
                &segs,
                tol,
            )
        };
        if failed.load(Ordering::Relaxed) {
            return Err(Error::BudgetExceeded { achieved: f64::NAN, budget: INNER_REL });
        }
        if !res.converged {
            return Err(Error::BudgetExceeded { achieved: res.error, budget: tol.rel * res.value.abs() });
        }
        let inner = if n >= 2 && r > 0.0 { 10.0 * INNER_REL * res.value.abs() } else { 0.0 };
        Ok(Piece { value: res.value, error: res.error + inner })
    }

    /// Segments of `[lo, hi]`, graded toward the kernel singularity at `s = r`
    /// (or toward `s = 0` when `r = 0`). Returns the widths of the graded
    /// pieces left and right of the singular point.
    fn segments(&self, lo: f64, hi: f64) -> (Vec<Segment>, f64, f64) {
        let kappa = (2.0 / self.alpha).max(1.0);
        let r = self.r;
        let breaks: Vec<f64> = self.f.breakpoints().iter().copied().filter(|&b| b > lo && b < hi).collect();
        let mut segs = Vec::new();
        let mut pts: Vec<f64> = breaks.clone();
        let (mut dl, mut dr) = (0.0, 0.0);

        if r == 0.0 && lo == 0.0 {
            let mut d = hi.min(1.0);
            if let Some(b) = breaks.first() {
                d = d.min(*b);
            }
            dr = d;
            segs.push(Segment::toward_start(0.0, d, kappa));
            let mut x = d;
            while x * 4.0 < hi {
                x *= 4.0;
                pts.push(x);
            }
            pts.retain(|&x| x > d);
            pts.push(d);
        } else if r > lo && r <= hi {
            dl = (0.5 * r).min(0.5).min(r - lo);
            dr = if r < hi { (0.5 * r).min(0.5).min(hi - r) } else { 0.0 };
            for &b in &breaks {
                if b < r {
                    dl = dl.min(0.5 * (r - b));
                } else if b > r {
                    dr = dr.min(0.5 * (b - r));
                }
            }
            if dl > 0.0 {
                segs.push(Segment::toward_end(r - dl, r, kappa));
            }
            if dr > 0.0 {
                segs.push(Segment::toward_start(r, r + dr, kappa));
            }
            let mut w = dl;
            while r - w * 4.0 > lo {
                w *= 4.0;
                pts.push(r - w);
            }
            let mut w = dr;
            while dr > 0.0 && r + w * 4.0 < hi.min(3.0 * r.max(1.0)) {
                w *= 4.0;
                pts.push(r + w);
            }
            let mut x = (2.0 * r).max(1.0);
            while x < hi {
                pts.push(x);
                x *= 2.0;
            }
            pts.retain(|&x| x <= r - dl || x >= r + dr);
            if dl > 0.0 {
                pts.push(r - dl);
            }
            if dr > 0.0 {
                pts.push(r + dr);
            }
        } else {
            let mut x = lo.max(1.0);
            while x < hi {
                pts.push(x);
                x *= 2.0;
            }
        }
        let (glo, ghi) = if r == 0.0 && lo == 0.0 { (0.0, dr) } else { (r - dl, r + dr) };
        pts.push(lo);
        pts.push(hi);
        pts.retain(|&x| x >= lo && x <= hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a || (a >= glo && b <= ghi && ghi > glo) {
                continue;
            }
            segs.push(Segment::uniform(a, b));
        }
        segs.sort_by(|x, y| x.a.total_cmp(&y.a));
        (segs, dl, dr)
    }
}

/// Which decay regime an asymptotic probe measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    PowerRegime,
    LogRegime,
    SaturatedRegime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub regime: Regime,
    pub radii: Vec<f64>,
    /// Rescaled potential at each radius.
    pub scaled: Vec<f64>,
    /// Monotone-tail heuristic over finitely many radii; not a proof.
    pub bounded: bool,
    pub limsup_proxy: f64,
}

/// Rescales `(I_alpha * f)(r)` by the growth rate predicted for a density
/// decaying like `r^{-beta}` and reports whether the rescaled values stay
/// bounded across `radii`.
pub fn asymptotic_probe(
    n: u32,
    alpha: f64,
    f: &RadialFunction,
    beta: f64,
    radii: &[f64],
    cfg: &QuadratureConfig,
) -> Result<ProbeReport> {
    check_alpha(n, alpha)?;
    if !(beta > alpha) {
        return Err(Error::domain(format!("probe needs beta > alpha, got beta = {beta}")));
    }
    if radii.len() < 2 || radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= 1.0 {
        return Err(Error::domain("probe radii must be increasing, above 1, and at least two"));
    }
    let nf = n as f64;
    let regime = if (beta - nf).abs() <= 1e-12 {
        Regime::LogRegime
    } else if beta < nf {
        Regime::PowerRegime
    } else {
        Regime::SaturatedRegime
    };
    let mut scaled = Vec::with_capacity(radii.len());
    for &x in radii {
        let v = riesz_convolve(n, alpha, f, 1.0, x, cfg)?.value;
        let s = match regime {
            Regime::PowerRegime => x.powf(beta - alpha) * v,
            Regime::LogRegime => x.powf(nf - alpha) / x.ln() * v,
            Regime::SaturatedRegime => x.powf(nf - alpha) * v,
        };
        scaled.push(s);
    }
    let half = &scaled[scaled.len() / 2..];
    let hi = half.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = half.iter().copied().fold(f64::INFINITY, f64::min);
    let k = scaled.len();
    let decelerating = k >= 3 && (scaled[k - 1] - scaled[k - 2]) <= (scaled[k - 2] - scaled[k - 3]).max(0.0);
    let bounded = hi.is_finite() && (hi <= 2.0 * lo || scaled[k - 1] <= scaled[k - 2] || decelerating);
    let limsup_proxy = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ProbeReport { regime, radii: radii.to_vec(), scaled, bounded, limsup_proxy })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn constants() {
        assert!((riesz_constant(3, 2.0).unwrap() - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!((riesz_constant(2, 1.0).unwrap() - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
        assert!((riesz_constant(1, 0.5).unwrap() - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert!(riesz_constant(3, 3.0).is_err());
        assert!(riesz_constant(3, 0.0).is_err());
        assert!((sphere_area(1) - 2.0).abs() < 1e-15);
        assert!((sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn newtonian_kernel() {
        assert!((angular_kernel(3, 2.0, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((angular_kernel(3, 1.0, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(angular_kernel(3, 1.0, 1.0, 2.0).is_err());
        assert!(angular_kernel(1, 1.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn newtonian_ball_at_origin() {
        let f = RadialFunction::parse("indicator(0,1)", TailSpec::Compact, None).unwrap();
        let v = riesz_convolve(3, 2.0, &f, 1.0, 0.0, &cfg()).unwrap();
        assert!((v.value - 0.5).abs() < 1e-10, "{v:?}");
        assert_eq!(v.status, RieszStatus::Finite);
    }

    #[test]
    fn zero_density_and_divergence() {
        let z = RadialFunction::parse("0", TailSpec::Compact, Some(1.0)).unwrap();
        assert_eq!(riesz_convolve(3, 1.0, &z, 1.0, 0.7, &cfg()).unwrap().value, 0.0);
        let f = RadialFunction::parse("(1+r)^-2", TailSpec::Power(2.0), None).unwrap();
        let v = riesz_convolve(4, 2.0, &f, 1.0, 1.0, &cfg()).unwrap();
        assert_eq!(v.status, RieszStatus::Divergent);
        assert_eq!(v.value, f64::INFINITY);
    }

    #[test]
    fn tail_metadata_is_probed() {
        assert!(matches!(
            RadialFunction::parse("(1+r)^-2", TailSpec::Power(3.0), None),
            Err(Error::TailMetadataInvalid(_))
        ));
        assert!(matches!(
            RadialFunction::parse("exp(-r)", TailSpec::Compact, None),
            Err(Error::TailMetadataInvalid(_))
        ));
        assert!(matches!(RadialFunction::parse("r-1", TailSpec::Compact, Some(3.0)), Err(Error::Domain(_))));
        let g = RadialFunction::parse("exp(-r^2)", TailSpec::Power(4.0), None).unwrap();
        assert!(matches!(g.tail(), Tail::Power { exact: false, .. }));
        let p = RadialFunction::parse("3*(1+r)^-2", TailSpec::Power(2.0), None).unwrap();
        match p.tail() {
            Tail::Power { constant, exact, .. } => {
                assert!(exact);
                assert!((constant - 3.0).abs() < 1e-4);
            }
            t => panic!("{t:?}"),
        }
    }

    #[test]
    fn c1_finiteness() {
        let a = RadialFunction::parse("(1+r)^-2", TailSpec::Power(2.0), None).unwrap();
        assert!(finiteness_check_c1(4, 1.0, 2.0, &a));
        let b = RadialFunction::parse("(1+r)^-1", TailSpec::Power(1.0), None).unwrap();
        assert!(!finiteness_check_c1(4, 2.0, 1.0, &b));
        let c = RadialFunction::parse("indicator(0,2)", TailSpec::Compact, None).unwrap();
        assert!(finiteness_check_c1(4, 3.9, 0.01, &c));
    }

    #[test]
    fn line_kernel_matches_closed_form() {
        // N = 1, f = indicator(0,1), r = 0: A * 2 * int_0^1 s^{alpha-1} ds = 2A/alpha
        let f = RadialFunction::parse("indicator(0,1)", TailSpec::Compact, None).unwrap();
        let a = riesz_constant(1, 0.5).unwrap();
        let v = riesz_convolve(1, 0.5, &f, 1.0, 0.0, &cfg()).unwrap();
        assert!((v.value - 2.0 * a / 0.5).abs() < 1e-9 * v.value);
        // r = 2: A int_0^1 (2-s)^{-1/2} + (2+s)^{-1/2} ds
        let exact = a * (2.0 * (2f64.sqrt() - 1.0) + 2.0 * (3f64.sqrt() - 2f64.sqrt()));
        let v = riesz_convolve(1, 0.5, &f, 1.0, 2.0, &cfg()).unwrap();
        assert!((v.value - exact).abs() < 1e-9 * exact, "{} vs {exact}", v.value);
        // Interval domain drops the mirrored term.
        let v = riesz_convolve_on(1, 0.5, &f, 1.0, 2.0, RieszDomain::Interval { radius: 1.0 }, &cfg()).unwrap();
        let exact = a * 2.0 * (2f64.sqrt() - 1.0);
        assert!((v.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn interval_domain_needs_line() {
        let f = RadialFunction::parse("1", TailSpec::Compact, Some(1.0)).unwrap();
        assert!(riesz_convolve_on(3, 1.0, &f, 1.0, 0.5, RieszDomain::Interval { radius: 1.0 }, &cfg()).is_err());
    }

    #[test]
    fn json_shape() {
        let f: RadialFunction = serde_json::from_str(r#"{"expr":"(1+r)^-3","tail_exponent":3}"#).unwrap();
        assert!(matches!(f.tail(), Tail::Power { .. }));
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"expr":"(1+r)^-3","tail_exponent":3.0}"#);
        let c: RadialFunction = serde_json::from_str(r#"{"expr":"indicator(0,1)","tail_exponent":"compact"}"#).unwrap();
        assert_eq!(c.tail(), Tail::Compact { radius: 1.0 });
        let v = RieszValue::divergent();
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"value":"+inf","error_estimate":0.0,"tail_bound":"+inf","status":"Divergent"}"#
        );
    }
}
