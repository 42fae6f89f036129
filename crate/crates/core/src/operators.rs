//! Isotropic quasilinear operators `-div(A(|grad u|) grad u)` acting on
//! radial profiles, together with sampling-based structure checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Derivative, Expr};

/// A radial function with closed-form first and second derivatives.
pub trait Radial {
    fn value(&self, r: f64) -> f64;
    fn d1(&self, r: f64) -> f64;
    fn d2(&self, r: f64) -> f64;
}

impl<T: Radial + ?Sized> Radial for &T {
    fn value(&self, r: f64) -> f64 {
        (**self).value(r)
    }
    fn d1(&self, r: f64) -> f64 {
        (**self).d1(r)
    }
    fn d2(&self, r: f64) -> f64 {
        (**self).d2(r)
    }
}

/// Pure power `c * r^s`, handy for closed-form cross-checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    pub coeff: f64,
    pub exponent: f64,
}

impl Radial for PowerLaw {
    fn value(&self, r: f64) -> f64 {
        self.coeff * r.powf(self.exponent)
    }
    fn d1(&self, r: f64) -> f64 {
        self.coeff * self.exponent * r.powf(self.exponent - 1.0)
    }
    fn d2(&self, r: f64) -> f64 {
        self.coeff * self.exponent * (self.exponent - 1.0) * r.powf(self.exponent - 2.0)
    }
}

#[derive(Debug, Clone)]
pub struct Perturbation {
    expr: Expr,
    deriv: Derivative,
}

impl Perturbation {
    pub fn parse(src: &str) -> Result<Self> {
        let expr = Expr::parse(src)?;
        let deriv = expr.derivative();
        Ok(Self { expr, deriv })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl PartialEq for Perturbation {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    MLaplace,
    MMeanCurvature,
    /// `A(t) = t^(m-2) f(t)`.
    PowerPerturbed(Perturbation),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorJson", into = "OperatorJson")]
pub struct OperatorSpec {
    family: Family,
    m: f64,
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    family: String,
    m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    perturbation: Option<String>,
}

impl TryFrom<OperatorJson> for OperatorSpec {
    type Error = Error;
    fn try_from(j: OperatorJson) -> Result<Self> {
        match j.family.as_str() {
            "m_laplace" => OperatorSpec::m_laplace(j.m),
            "m_mean_curvature" => OperatorSpec::m_mean_curvature(j.m),
            "power_perturbed" => {
                let src = j
                    .perturbation
                    .ok_or_else(|| Error::domain("power_perturbed requires a perturbation expression"))?;
                OperatorSpec::power_perturbed(j.m, &src)
            }
            other => Err(Error::domain(format!("unknown operator family '{other}'"))),
        }
    }
}

impl From<OperatorSpec> for OperatorJson {
    fn from(op: OperatorSpec) -> Self {
        let (family, perturbation) = match &op.family {
            Family::MLaplace => ("m_laplace", None),
            Family::MMeanCurvature => ("m_mean_curvature", None),
            Family::PowerPerturbed(p) => ("power_perturbed", Some(p.expr.source().to_string())),
        };
        OperatorJson { family: family.into(), m: op.m, perturbation }
    }
}

fn check_m(m: f64) -> Result<()> {
    if m.is_finite() && m > 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("operator exponent m must exceed 1, got {m}")))
    }
}

impl OperatorSpec {
    pub fn m_laplace(m: f64) -> Result<Self> {
        check_m(m)?;
        Ok(Self { family: Family::MLaplace, m })
    }

    pub fn m_mean_curvature(m: f64) -> Result<Self> {
        check_m(m)?;
        Ok(Self { family: Family::MMeanCurvature, m })
    }

    pub fn power_perturbed(m: f64, perturbation: &str) -> Result<Self> {
        check_m(m)?;
        Ok(Self { family: Family::PowerPerturbed(Perturbation::parse(perturbation)?), m })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `A(t)`; at `t = 0` with `m < 2` this is `+inf`.
    pub fn eval_a(&self, t: f64) -> f64 {
        let m = self.m;
        let base = if t == 0.0 {
            match m.partial_cmp(&2.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => 1.0,
                _ => 0.0,
            }
        } else {
            t.powf(m - 2.0)
        };
        match &self.family {
            Family::MLaplace => base,
            Family::MMeanCurvature => base / (1.0 + t.powf(m)).sqrt(),
            Family::PowerPerturbed(p) => base * p.expr.eval(t),
        }
    }

    /// `A'(t)` from the closed form of the family.
    pub fn eval_a_prime(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::domain(format!("A'(t) requires t > 0, got {t}")));
        }
        let m = self.m;
        let lead = if m == 2.0 { 0.0 } else { (m - 2.0) * t.powf(m - 3.0) };
        Ok(match &self.family {
            Family::MLaplace => lead,
            Family::MMeanCurvature => {
                let w = 1.0 + t.powf(m);
                lead / w.sqrt() - 0.5 * m * t.powf(2.0 * m - 3.0) / (w * w.sqrt())
            }
            Family::PowerPerturbed(p) => lead * p.expr.eval(t) + t.powf(m - 2.0) * p.deriv.eval(t),
        })
    }

    /// Ridders-extrapolated central difference of `A`; offered only for
    /// perturbed families, as a cross-check of the symbolic derivative.
    pub fn eval_a_prime_numeric(&self, t: f64) -> Result<f64> {
        if !matches!(self.family, Family::PowerPerturbed(_)) {
            return Err(Error::domain("numeric A' is only provided for power_perturbed operators"));
        }
        if !(t > 0.0) {
            return Err(Error::domain(format!("A'(t) requires t > 0, got {t}")));
        }
        Ok(ridders(|x| self.eval_a(x), t, 0.1 * t))
    }

    /// The combination `t A'(t) + A(t)`, continuous at `t = 0` when `m >= 2`.
    fn flux_slope(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(self.eval_a(0.0));
        }
        Ok(t * self.eval_a_prime(t)? + self.eval_a(t))
    }
}

/// Central differences with Richardson extrapolation (Ridders' method).
pub(crate) fn ridders<F: Fn(f64) -> f64>(f: F, x: f64, h0: f64) -> f64 {
    const NTAB: usize = 10;
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut h = h0;
    a[0][0] = (f(x + h) - f(x - h)) / (2.0 * h);
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        h /= CON;
        a[0][i] = (f(x + h) - f(x - h)) / (2.0 * h);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (a[j][i] - a[j - 1][i]).abs().max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}

/// The two summands of the radial divergence identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceTerms {
    /// `u'' [t A'(t) + A(t)]`
    pub second_order: f64,
    /// `(N-1)/r A(t) u'`
    pub first_order: f64,
}

impl DivergenceTerms {
    pub fn total(&self) -> f64 {
        self.second_order + self.first_order
    }
}

pub fn radial_divergence_terms<U: Radial + ?Sized>(
    op: &OperatorSpec,
    u: &U,
    r: f64,
    n: u32,
) -> Result<DivergenceTerms> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("radius must be positive, got {r}")));
    }
    if n == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    let d1 = u.d1(r);
    let d2 = u.d2(r);
    let t = d1.abs();
    if t == 0.0 && op.m < 2.0 {
        return Err(Error::Indeterminate { r, m: op.m });
    }
    let second_order = if d2 == 0.0 { 0.0 } else { d2 * op.flux_slope(t)? };
    let first_order = if d1 == 0.0 || n == 1 { 0.0 } else { (n as f64 - 1.0) / r * op.eval_a(t) * d1 };
    Ok(DivergenceTerms { second_order, first_order })
}

/// `div(A(|grad u|) grad u)` at radius `r` in dimension `n`.
pub fn radial_divergence<U: Radial + ?Sized>(op: &OperatorSpec, u: &U, r: f64, n: u32) -> Result<f64> {
    radial_divergence_terms(op, u, r, n).map(|t| t.total())
}

/// `L_A u = -div(A(|grad u|) grad u)`.
pub fn apply_l<U: Radial + ?Sized>(op: &OperatorSpec, u: &U, r: f64, n: u32) -> Result<f64> {
    radial_divergence(op, u, r, n).map(|v| -v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    WmC,
    SmC,
    Hm,
    UpperSlope,
    #[serde(rename = "SmallT_LowerBound")]
    SmallTLowerBound,
    #[serde(rename = "LargeT_LowerBound")]
    LargeTLowerBound,
    #[serde(rename = "DerivCombo_Small")]
    DerivComboSmall,
    #[serde(rename = "DerivCombo_Large")]
    DerivComboLarge,
}

impl Condition {
    pub const ALL: [Condition; 8] = [
        Condition::WmC,
        Condition::SmC,
        Condition::Hm,
        Condition::UpperSlope,
        Condition::SmallTLowerBound,
        Condition::LargeTLowerBound,
        Condition::DerivComboSmall,
        Condition::DerivComboLarge,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StructureVerdict {
    Falsified { witness_t: f64, witness_value: f64 },
    ConsistentWithConstant { constant: f64 },
}

/// What a structure report is worth: sampling evidence only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evidence {
    SamplingOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub condition: Condition,
    pub verdict: StructureVerdict,
    pub samples: usize,
    pub evidence: Evidence,
}

impl StructureReport {
    pub fn is_falsified(&self) -> bool {
        matches!(self.verdict, StructureVerdict::Falsified { .. })
    }
}

#[derive(Clone, Copy, PartialEq)]
enum End {
    Small,
    Large,
    Both,
}

/// Minimum log-log slope that counts as a drift of the ratio toward zero.
const DRIFT: f64 = 0.05;

struct Sample {
    t: f64,
    ratio: f64,
}

fn slope(points: &[Sample]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for p in points {
        let x = p.t.ln();
        let y = p.ratio.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    let den = n * sxx - sx * sx;
    if den == 0.0 {
        0.0
    } else {
        (n * sxy - sx * sy) / den
    }
}

fn end_window(samples: &[Sample], small: bool) -> &[Sample] {
    let n = samples.len();
    if n < 3 {
        return samples;
    }
    if small {
        let lim = samples[0].t * 10.0;
        let k = samples.iter().take_while(|s| s.t <= lim).count().max(3);
        &samples[..k.min(n)]
    } else {
        let lim = samples[n - 1].t / 10.0;
        let k = samples.iter().rev().take_while(|s| s.t >= lim).count().max(3);
        &samples[n - k.min(n)..]
    }
}

/// Tests whether `ratio >= C > 0` can hold uniformly on the relevant end(s).
fn ratio_verdict(samples: &[Sample], end: End) -> StructureVerdict {
    if let Some(bad) = samples.iter().find(|s| !(s.ratio > 0.0) || !s.ratio.is_finite()) {
        return StructureVerdict::Falsified { witness_t: bad.t, witness_value: bad.ratio };
    }
    if samples.len() >= 3 {
        if matches!(end, End::Small | End::Both) {
            let w = end_window(samples, true);
            if w.len() >= 3 && slope(w) > DRIFT {
                let s = &samples[0];
                return StructureVerdict::Falsified { witness_t: s.t, witness_value: s.ratio };
            }
        }
        if matches!(end, End::Large | End::Both) {
            let w = end_window(samples, false);
            if w.len() >= 3 && slope(w) < -DRIFT {
                let s = &samples[samples.len() - 1];
                return StructureVerdict::Falsified { witness_t: s.t, witness_value: s.ratio };
            }
        }
    }
    let constant = samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    StructureVerdict::ConsistentWithConstant { constant }
}

fn sample<F: Fn(f64) -> Result<f64>>(grid: &[f64], f: F) -> Result<Vec<Sample>> {
    grid.iter().map(|&t| Ok(Sample { t, ratio: f(t)? })).collect()
}

fn combine(verdicts: impl IntoIterator<Item = StructureVerdict>) -> StructureVerdict {
    let mut best = f64::INFINITY;
    for v in verdicts {
        match v {
            StructureVerdict::Falsified { .. } => return v,
            StructureVerdict::ConsistentWithConstant { constant } => best = best.min(constant),
        }
    }
    StructureVerdict::ConsistentWithConstant { constant: best }
}

/// Falsification test of a structural condition on a grid of `t` values.
///
/// A `Falsified` verdict means either a sample where no positive constant
/// can work, or a sustained log-log drift of the defining ratio toward zero
/// at the end of the grid where the condition is quantified.
pub fn check_structure(op: &OperatorSpec, condition: Condition, t_grid: &[f64]) -> Result<StructureReport> {
    if t_grid.is_empty() {
        return Err(Error::domain("structure check needs a non-empty t grid"));
    }
    if t_grid.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::domain("structure check grid must be positive and finite"));
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("structure check grid must be strictly increasing"));
    }
    let m = op.m;
    let mc = m / (m - 1.0);
    let a = |t: f64| op.eval_a(t);
    let pow_m2 = |t: f64| t.powf(m - 2.0);
    let verdict = match condition {
        Condition::WmC => {
            // A(t) t^2 >= C (A(t) t)^{m'}
            let s = sample(t_grid, |t| Ok(a(t) * t * t / (a(t) * t).powf(mc)))?;
            ratio_verdict(&s, End::Both)
        }
        Condition::SmC => {
            let first = sample(t_grid, |t| Ok(a(t) * t * t / t.powf(m)))?;
            let second = sample(t_grid, |t| Ok(t.powf(m) / (a(t) * t).powf(mc)))?;
            combine([ratio_verdict(&first, End::Both), ratio_verdict(&second, End::Both)])
        }
        Condition::Hm => {
            let mut monotone = StructureVerdict::ConsistentWithConstant { constant: 1.0 };
            for w in t_grid.windows(2) {
                let (f0, f1) = (w[0] * a(w[0]), w[1] * a(w[1]));
                if f1 < f0 * (1.0 - 1e-12) {
                    monotone = StructureVerdict::Falsified { witness_t: w[1], witness_value: f1 - f0 };
                    break;
                }
            }
            let upper = sample(t_grid, |t| Ok(pow_m2(t) / a(t)))?;
            let below_one: Vec<f64> = t_grid.iter().copied().filter(|&t| t < 1.0).collect();
            let lower = sample(&below_one, |t| Ok(a(t) / pow_m2(t)))?;
            let mut parts = vec![monotone, ratio_verdict(&upper, End::Both)];
            if !lower.is_empty() {
                parts.push(ratio_verdict(&lower, End::Small));
            }
            combine(parts)
        }
        Condition::UpperSlope => {
            let s = sample(t_grid, |t| Ok(t * op.eval_a_prime(t)? / a(t)))?;
            let window = end_window(&s, true);
            let tol = 1e-10 * (1.0 + (m - 2.0).abs());
            if window.iter().all(|p| p.ratio > m - 2.0 + tol) {
                StructureVerdict::Falsified { witness_t: window[0].t, witness_value: window[0].ratio }
            } else {
                let sup = window.iter().map(|p| p.ratio).fold(f64::NEG_INFINITY, f64::max);
                StructureVerdict::ConsistentWithConstant { constant: sup }
            }
        }
        Condition::SmallTLowerBound => ratio_verdict(&sample(t_grid, |t| Ok(a(t) / pow_m2(t)))?, End::Small),
        Condition::LargeTLowerBound => ratio_verdict(&sample(t_grid, |t| Ok(a(t) / pow_m2(t)))?, End::Large),
        Condition::DerivComboSmall => {
            ratio_verdict(&sample(t_grid, |t| Ok(op.flux_slope(t)? / pow_m2(t)))?, End::Small)
        }
        Condition::DerivComboLarge => {
            ratio_verdict(&sample(t_grid, |t| Ok(op.flux_slope(t)? / pow_m2(t)))?, End::Large)
        }
    };
    Ok(StructureReport { condition, verdict, samples: t_grid.len(), evidence: Evidence::SamplingOnly })
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == n => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}
