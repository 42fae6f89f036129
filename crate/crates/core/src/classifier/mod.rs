//! Existence / nonexistence verdicts from the printed hypothesis sets, for
//! single inequalities and for the three system shapes.

pub mod region;
pub mod scalar;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::verifier::SystemShape;
pub use scalar::{Exact, Scalar, FLOAT_TOLERANCE};

/// Structural properties the caller vouches for.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OperatorClass {
    pub wmc: bool,
    pub smc: bool,
    pub hm: bool,
    pub upper: bool,
    pub con1: bool,
    pub con2: bool,
    pub con3: bool,
    pub con4: bool,
    /// `A(x, u, eta) = A(|eta|) eta`.
    pub isotropic: bool,
}

impl OperatorClass {
    /// Adds the flags implied by the ones set.
    pub fn normalized(mut self) -> Self {
        if self.hm {
            self.wmc = true;
            self.isotropic = true;
            self.con1 = true;
        }
        if self.smc {
            self.wmc = true;
        }
        if self.upper || self.con1 || self.con2 || self.con3 || self.con4 {
            self.isotropic = true;
        }
        self
    }

    pub fn m_laplace() -> Self {
        Self {
            wmc: true,
            smc: true,
            hm: true,
            upper: true,
            con1: true,
            con2: true,
            con3: true,
            con4: true,
            isotropic: true,
        }
    }

    /// `A(t) = t^(m-2) / sqrt(1 + t^m)`; of mean curvature type only for `m >= 2`.
    pub fn mean_curvature(m: f64) -> Self {
        Self { wmc: true, hm: m >= 2.0, upper: true, con1: true, con2: true, isotropic: true, ..Self::default() }
            .normalized()
    }

    /// Parses tokens such as `hm+upper`, `wmc,con1` or `laplace`.
    pub fn from_tokens(spec: &str, m: f64) -> Result<Self> {
        let mut c = Self::default();
        for tok in spec.split([',', '+', ' ']).map(str::trim).filter(|t| !t.is_empty()) {
            match tok.to_ascii_lowercase().as_str() {
                "hm" => c.hm = true,
                "wmc" => c.wmc = true,
                "smc" => c.smc = true,
                "upper" => c.upper = true,
                "con1" => c.con1 = true,
                "con2" => c.con2 = true,
                "con3" => c.con3 = true,
                "con4" => c.con4 = true,
                "isotropic" => c.isotropic = true,
                "laplace" | "m-laplace" => c = merge(c, Self::m_laplace()),
                "mean-curvature" | "mmc" => c = merge(c, Self::mean_curvature(m)),
                "none" => {}
                other => return Err(Error::domain(format!("unknown operator flag {other:?}"))),
            }
        }
        Ok(c.normalized())
    }
}

fn merge(a: OperatorClass, b: OperatorClass) -> OperatorClass {
    OperatorClass {
        wmc: a.wmc || b.wmc,
        smc: a.smc || b.smc,
        hm: a.hm || b.hm,
        upper: a.upper || b.upper,
        con1: a.con1 || b.con1,
        con2: a.con2 || b.con2,
        con3: a.con3 || b.con3,
        con4: a.con4 || b.con4,
        isotropic: a.isotropic || b.isotropic,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemDomain {
    /// `R^N` minus the closed unit ball.
    Exterior,
    WholeSpace,
    Bounded {
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar + Serialize + DeserializeOwned")]
pub struct ProblemParams<S = f64> {
    #[serde(rename = "N")]
    pub n: u32,
    pub m: S,
    pub alpha: S,
    pub p: S,
    pub q: S,
    pub domain: ProblemDomain,
    #[serde(default)]
    pub class: OperatorClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar + Serialize + DeserializeOwned")]
pub struct SystemParams<S = f64> {
    #[serde(rename = "N")]
    pub n: u32,
    pub m1: S,
    pub m2: S,
    pub alpha: S,
    pub beta: S,
    pub p: S,
    pub q: S,
    pub r: S,
    pub s: S,
    pub shape: SystemShape,
    #[serde(default)]
    pub class_a: OperatorClass,
    #[serde(default)]
    pub class_b: OperatorClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    Existence,
    Nonexistence,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub tags: Vec<String>,
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn existence_tags(&self) -> impl Iterator<Item = &str> {
        self.tags.iter().map(String::as_str).filter(|t| tag_kind(t) == Some(Status::Existence))
    }

    pub fn nonexistence_tags(&self) -> impl Iterator<Item = &str> {
        self.tags.iter().map(String::as_str).filter(|t| tag_kind(t) == Some(Status::Nonexistence))
    }
}

/// Whether a tag asserts existence or nonexistence.
pub fn tag_kind(tag: &str) -> Option<Status> {
    use Status::*;
    if tag.starts_with("Cor2.6") {
        return Some(if tag.starts_with("Cor2.6-ii3") { Existence } else { Nonexistence });
    }
    if tag == "Thm2.10" {
        return Some(Existence);
    }
    let non = ["Thm2.1(", "Thm2.2(", "Thm2.10(", "Thm2.11("];
    let ex = ["Thm2.3(", "Thm2.4", "Thm2.7", "Thm2.8", "Thm2.9", "Thm2.12("];
    if non.iter().any(|p| tag.starts_with(p)) {
        Some(Nonexistence)
    } else if ex.iter().any(|p| tag.starts_with(p)) {
        Some(Existence)
    } else {
        None
    }
}

fn int<S: Scalar>(n: i64) -> S {
    S::from_int(n)
}

fn quot<S: Scalar>(a: &S, b: &S) -> S {
    a.div(b).expect("denominator checked positive")
}

/// Thresholds that recur across the single-equation theorems, for `N > m`.
struct Thresholds<S> {
    /// `alpha (m-1) / (N-m)`
    a1: S,
    /// `(N+alpha)(m-1) / (N-m)`
    a2: S,
    /// `N (m-1) / (N-m)`
    serrin: S,
    /// `(2N-m)(m-1) / (N-m)`
    a3: S,
}

impl<S: Scalar> Thresholds<S> {
    fn new(n: &S, m: &S, alpha: &S) -> Self {
        let m1 = m.sub(&int(1));
        let nm = n.sub(m);
        Self {
            a1: quot(&alpha.mul(&m1), &nm),
            a2: quot(&n.add(alpha).mul(&m1), &nm),
            serrin: quot(&n.mul(&m1), &nm),
            a3: quot(&n.mul(&int(2)).sub(m).mul(&m1), &nm),
        }
    }
}

/// `m - 1 - (N - alpha - m) p / N`
fn critical_line<S: Scalar>(n: &S, m: &S, alpha: &S, p: &S) -> S {
    m.sub(&int(1)).sub(&quot(&n.sub(alpha).sub(m).mul(p), n))
}

/// Which of the three Corollary 2.6 regimes `alpha` falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `0 < alpha < N - m`
    A,
    /// `alpha = N - m`
    B,
    /// `N - m < alpha < N`
    C,
}

pub fn regime<S: Scalar>(n: u32, m: &S, alpha: &S) -> Regime {
    let nm = int::<S>(n as i64).sub(m);
    match alpha.compare(&nm) {
        std::cmp::Ordering::Less => Regime::A,
        std::cmp::Ordering::Equal => Regime::B,
        std::cmp::Ordering::Greater => Regime::C,
    }
}

fn validate_single<S: Scalar>(p: &ProblemParams<S>) -> Result<()> {
    let n = int::<S>(p.n as i64);
    if p.n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    if !p.m.gt(&int(1)) {
        return Err(Error::domain(format!("m must exceed 1, got {:?}", p.m)));
    }
    if !(p.alpha.gt(&int(0)) && p.alpha.lt(&n)) {
        return Err(Error::domain(format!("alpha must lie in (0, N), got {:?}", p.alpha)));
    }
    if !p.p.gt(&int(0)) {
        return Err(Error::domain(format!("p must be positive, got {:?}", p.p)));
    }
    if !p.q.to_f64().is_finite() {
        return Err(Error::domain("q must be finite"));
    }
    if let ProblemDomain::Bounded { radius } = p.domain {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::domain(format!("domain radius must be positive, got {radius}")));
        }
    }
    Ok(())
}

/// Verdict for `L_A u >= (I_alpha * u^p) u^q` from the printed theorems.
pub fn classify_single<S: Scalar>(params: &ProblemParams<S>) -> Result<Verdict> {
    validate_single(params)?;
    let class = params.class.normalized();
    let n = int::<S>(params.n as i64);
    let (m, alpha, p, q) = (&params.m, &params.alpha, &params.p, &params.q);
    let m1 = m.sub(&int(1));
    let pq = p.add(q);
    let supercritical = n.gt(m);
    let mut ex: Vec<String> = Vec::new();
    let mut non: Vec<String> = Vec::new();
    let mut notes: Vec<String> = Vec::new();

    if let ProblemDomain::Bounded { .. } = params.domain {
        let tag = match (pq.gt(&m1), pq.lt(&m1), params.n > 1) {
            (false, false, _) => {
                notes.push("p + q = m - 1 is not covered by the bounded-domain theorems".into());
                return Ok(settle(ex, non, notes));
            }
            (true, _, true) => Theorem::T2_7,
            (true, _, false) => Theorem::T2_8,
            (_, true, true) => Theorem::T2_9,
            (_, true, false) => Theorem::T2_10,
        };
        let failed: Vec<Hypothesis> = existence_hypotheses(tag, params)?.into_iter().filter(|h| !h.holds).collect();
        if failed.is_empty() {
            ex.push(tag.tag().into());
        } else {
            for h in failed {
                notes.push(format!("{} needs {}", tag.tag(), h.label));
            }
        }
        return Ok(settle(ex, non, notes));
    }

    // Exterior nonexistence; a solution in R^N restricts to one in the exterior domain.
    if class.hm {
        if !supercritical {
            non.push("Thm2.1(i)".into());
        } else {
            let t = Thresholds::new(&n, m, alpha);
            if p.le(&t.a1) {
                non.push("Thm2.1(ii1)".into());
            }
            if m1.lt(q) && q.le(&t.a1) && alpha.gt(&n.sub(m)) {
                non.push("Thm2.1(ii2)".into());
            }
            if m1.le(&pq) && pq.le(&t.a2) {
                non.push("Thm2.1(ii3)".into());
            }
        }
    }
    if class.wmc && supercritical {
        let line = critical_line(&n, m, alpha, p);
        if pq.gt(&m1) && q.le(&m1) && q.lt(&line) {
            non.push("Thm2.2(i)".into());
        }
        if pq.gt(&m1) && q.lt(&m1) && q.equals(&line) {
            if q.gt(&int(0)) {
                non.push("Thm2.2(ii)".into());
            } else {
                notes.push("on the critical line with q <= 0, where the argument for Thm2.2(ii) assumes q > 0".into());
            }
        }
        if pq.le(&m1) {
            non.push("Thm2.2(iii)".into());
        }
    }

    // R^N existence; a solution in R^N is also one in the exterior domain.
    for thm in [Theorem::T2_3i, Theorem::T2_3ii, Theorem::T2_4] {
        if existence_hypotheses(thm, params)?.iter().all(|h| h.holds) {
            ex.push(thm.tag().into());
        }
    }

    if class.hm && class.upper {
        let (status, tag) = corollary(&n, m, alpha, p, q, params.n);
        let (keep, drop) = match status {
            Status::Existence => (ex, non),
            _ => (non, ex),
        };
        for d in &drop {
            notes.push(format!("{d} also applies but disagrees with the printed corollary, which decides here"));
        }
        let mut tags = vec![tag];
        tags.extend(keep);
        return Ok(Verdict { status, tags, notes });
    }
    Ok(settle(ex, non, notes))
}

/// The Corollary 2.6 trichotomy.
fn corollary<S: Scalar>(n: &S, m: &S, alpha: &S, p: &S, q: &S, dim: u32) -> (Status, String) {
    if !n.gt(m) {
        return (Status::Nonexistence, "Cor2.6(i)".into());
    }
    let t = Thresholds::new(n, m, alpha);
    let m1 = m.sub(&int(1));
    let pq = p.add(q);
    let r = regime(dim, m, alpha);
    let holds = match r {
        Regime::A => p.gt(&t.a1) && pq.gt(&t.a2) && q.gt(&critical_line(n, m, alpha, p)),
        Regime::B => p.gt(&t.a1) && q.gt(&t.a1) && pq.gt(&t.a2),
        Regime::C => p.gt(&m1) && q.ge(&m1) && pq.gt(&t.a3),
    };
    if holds {
        (Status::Existence, format!("Cor2.6-ii3-{r:?}"))
    } else {
        (Status::Nonexistence, format!("Cor2.6-complement-{r:?}"))
    }
}

fn settle(ex: Vec<String>, non: Vec<String>, mut notes: Vec<String>) -> Verdict {
    match (ex.is_empty(), non.is_empty()) {
        (true, true) => {
            notes.push("no theorem licensed by the operator flags covers these parameters".into());
            Verdict { status: Status::Unknown, tags: Vec::new(), notes }
        }
        (false, true) => Verdict { status: Status::Existence, tags: ex, notes },
        (true, false) => Verdict { status: Status::Nonexistence, tags: non, notes },
        (false, false) => {
            notes.push(format!(
                "conflicting results: existence by {} and nonexistence by {}",
                ex.join(", "),
                non.join(", ")
            ));
            Verdict { status: Status::Unknown, tags: Vec::new(), notes }
        }
    }
}

fn validate_system<S: Scalar>(s: &SystemParams<S>) -> Result<()> {
    let n = int::<S>(s.n as i64);
    if s.n == 0 {
        return Err(Error::domain("N must be at least 1"));
    }
    for (name, m) in [("m1", &s.m1), ("m2", &s.m2)] {
        if !m.gt(&int(1)) {
            return Err(Error::domain(format!("{name} must exceed 1, got {m:?}")));
        }
    }
    for (name, a) in [("alpha", &s.alpha), ("beta", &s.beta)] {
        if !(a.gt(&int(0)) && a.lt(&n)) {
            return Err(Error::domain(format!("{name} must lie in (0, N), got {a:?}")));
        }
    }
    for (name, e) in [("p", &s.p), ("r", &s.r)] {
        if !e.gt(&int(0)) {
            return Err(Error::domain(format!("{name} must be positive, got {e:?}")));
        }
    }
    Ok(())
}

/// The exponents `(gamma, xi)` of the second part of the mean-curvature-type
/// system theorem.
pub fn system_decay_exponents<S: Scalar>(s: &SystemParams<S>) -> Result<(S, S)> {
    let n = int::<S>(s.n as i64);
    let (a1, b1) = (s.m1.sub(&int(1)), s.m2.sub(&int(1)));
    let den = s.q.mul(&s.s).sub(&a1.mul(&b1));
    let ea = s.alpha.add(&s.m1).sub(&n);
    let eb = s.beta.add(&s.m2).sub(&n);
    let gamma = ea.mul(&b1).add(&eb.mul(&s.q)).div(&den).ok_or(Error::DegenerateDenominator)?;
    let xi = eb.mul(&a1).add(&ea.mul(&s.s)).div(&den).ok_or(Error::DegenerateDenominator)?;
    Ok((gamma, xi))
}

/// Verdict for one of the three systems.
pub fn classify_system<S: Scalar>(params: &SystemParams<S>) -> Result<Verdict> {
    validate_system(params)?;
    let (ca, cb) = (params.class_a.normalized(), params.class_b.normalized());
    let n = int::<S>(params.n as i64);
    let SystemParams { m1, m2, alpha, beta, p, q, r, s, shape, .. } = params;
    let (a1, b1) = (m1.sub(&int(1)), m2.sub(&int(1)));
    let zero = int::<S>(0);
    let mut ex: Vec<String> = Vec::new();
    let mut non: Vec<String> = Vec::new();
    let mut notes: Vec<String> = Vec::new();

    if ca.wmc && cb.wmc {
        let lhs = n.mul(&int(2)).sub(&m1.add(m2).add(alpha).add(beta));
        let part = |x: &S, y: &S, ok: bool| -> Option<S> {
            if ok {
                x.div(y)
            } else {
                None
            }
        };
        let (tag, sum, conds) = match shape {
            SystemShape::Sys1 => (
                "Thm2.11(i)",
                part(&a1.sub(q), r, true).zip(part(&b1.sub(s), p, true)),
                p.ge(&b1.sub(s)) && b1.sub(s).ge(&zero) && r.ge(&a1.sub(q)) && a1.sub(q).ge(&zero),
            ),
            SystemShape::Sys2 => (
                "Thm2.11(ii)",
                part(&b1.sub(q), p, true).zip(part(&a1.sub(r), s, true)),
                p.ge(&b1.sub(q)) && b1.sub(q).ge(&zero) && r.ge(&a1.sub(s)) && a1.sub(s).ge(&zero),
            ),
            SystemShape::Sys3 => (
                "Thm2.11(iii)",
                part(&a1.sub(s), p, true).zip(part(&b1.sub(q), r, true)),
                p.ge(&a1.sub(s)) && a1.sub(s).ge(&zero) && r.ge(&b1.sub(q)) && b1.sub(q).ge(&zero),
            ),
        };
        match sum {
            Some((x, y)) => {
                if conds && lhs.le(&n.mul(&x.add(&y))) {
                    non.push(tag.into());
                }
            }
            None => notes.push(format!("{tag} skipped: a denominator vanishes")),
        }
    }

    if ca.hm && cb.hm {
        match shape {
            SystemShape::Sys1 => {
                let parts = [
                    ("Thm2.10(i1)", m1, alpha, q, true),
                    ("Thm2.10(i2)", m2, beta, s, true),
                    ("Thm2.10(i3)", m1, alpha, q, ca.smc),
                    ("Thm2.10(i4)", m2, beta, s, cb.smc),
                ];
                for (i, (tag, mi, a, e, gate)) in parts.into_iter().enumerate() {
                    if !gate {
                        continue;
                    }
                    if !n.gt(mi) {
                        notes.push(format!("{tag} skipped: its bound needs N > m"));
                        continue;
                    }
                    let nm = n.sub(mi);
                    let bound = quot(&a.mul(&mi.sub(&int(1))), &nm);
                    let lower_ok = i >= 2 || mi.sub(&int(1)).lt(e);
                    if a.gt(&nm) && lower_ok && e.le(&bound) {
                        non.push(tag.into());
                    }
                }
            }
            SystemShape::Sys2 | SystemShape::Sys3 => {
                let (na, nb) = (n.sub(m1), n.sub(m2));
                if alpha.gt(&na) && na.gt(&zero) && beta.gt(&nb) && nb.gt(&zero) && q.gt(&a1) && s.gt(&b1) {
                    match system_decay_exponents(params) {
                        Ok((g, xi)) => {
                            let x = a1.mul(&g).sub(&na);
                            let y = b1.mul(&xi).sub(&nb);
                            if x.ge(&zero) || y.ge(&zero) {
                                non.push("Thm2.10(ii)".into());
                            }
                        }
                        Err(_) => notes.push("Thm2.10(ii) skipped: qs = (m1-1)(m2-1)".into()),
                    }
                }
            }
        }
    }

    if system_existence_hypotheses(params)?.iter().all(|h| h.holds) {
        ex.push(system_existence_tag(*shape).into());
    }
    Ok(settle(ex, non, notes))
}

/// One printed hypothesis of an existence theorem and whether it holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub label: String,
    pub holds: bool,
}

fn hyp(label: impl Into<String>, holds: bool) -> Hypothesis {
    Hypothesis { label: label.into(), holds }
}

/// The single-equation existence theorems that have a construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    T2_3i,
    T2_3ii,
    T2_4,
    T2_7,
    T2_8,
    T2_9,
    T2_10,
}

impl Theorem {
    pub fn tag(self) -> &'static str {
        match self {
            Theorem::T2_3i => "Thm2.3(i)",
            Theorem::T2_3ii => "Thm2.3(ii)",
            Theorem::T2_4 => "Thm2.4",
            Theorem::T2_7 => "Thm2.7",
            Theorem::T2_8 => "Thm2.8",
            Theorem::T2_9 => "Thm2.9",
            Theorem::T2_10 => "Thm2.10",
        }
    }

    pub fn is_bounded(self) -> bool {
        matches!(self, Theorem::T2_7 | Theorem::T2_8 | Theorem::T2_9 | Theorem::T2_10)
    }
}

fn show<S: Scalar>(x: &S) -> String {
    format!("{}", x.to_f64())
}

/// Every printed hypothesis of `thm` (operator flags included), evaluated at
/// `params`. The domain of `params` is not consulted.
pub fn existence_hypotheses<S: Scalar>(thm: Theorem, params: &ProblemParams<S>) -> Result<Vec<Hypothesis>> {
    validate_single(params)?;
    let class = params.class.normalized();
    let n = int::<S>(params.n as i64);
    let (m, alpha, p, q) = (&params.m, &params.alpha, &params.p, &params.q);
    let m1 = m.sub(&int(1));
    let pq = p.add(q);
    let mut hs = Vec::new();
    match thm {
        Theorem::T2_3i | Theorem::T2_3ii | Theorem::T2_4 => {
            hs.push(hyp("A(|grad u|) grad u form with con1 and upper", class.isotropic && class.con1 && class.upper));
            hs.push(hyp("N > m", n.gt(m)));
            if !n.gt(m) {
                return Ok(hs);
            }
            let t = Thresholds::new(&n, m, alpha);
            match thm {
                Theorem::T2_3i => {
                    hs.push(hyp(format!("p > N(m-1)/(N-m) = {}", show(&t.serrin)), p.gt(&t.serrin)));
                    hs.push(hyp(format!("q = m-1 = {}", show(&m1)), q.equals(&m1)));
                    hs.push(hyp(format!("alpha = N-m = {}", show(&n.sub(m))), alpha.equals(&n.sub(m))));
                }
                Theorem::T2_3ii => {
                    let line = critical_line(&n, m, alpha, p);
                    hs.push(hyp(format!("p >= N(m-1)/(N-m) = {}", show(&t.serrin)), p.ge(&t.serrin)));
                    hs.push(hyp(format!("q > m-1-(N-alpha-m)p/N = {}", show(&line)), q.gt(&line)));
                }
                _ => {
                    hs.push(hyp(format!("p > alpha(m-1)/(N-m) = {}", show(&t.a1)), p.gt(&t.a1)));
                    hs.push(hyp(format!("q > alpha(m-1)/(N-m) = {}", show(&t.a1)), q.gt(&t.a1)));
                    hs.push(hyp(format!("p+q > (alpha+N)(m-1)/(N-m) = {}", show(&t.a2)), pq.gt(&t.a2)));
                }
            }
        }
        Theorem::T2_7 | Theorem::T2_8 | Theorem::T2_9 | Theorem::T2_10 => {
            let (flag, name) = match thm {
                Theorem::T2_7 => (class.con1, "con1"),
                Theorem::T2_8 => (class.con2, "con2"),
                Theorem::T2_9 => (class.con3, "con3"),
                _ => (class.con4, "con4"),
            };
            hs.push(hyp(format!("A(|grad u|) grad u form with {name}"), class.isotropic && flag));
            if matches!(thm, Theorem::T2_7 | Theorem::T2_9) {
                hs.push(hyp("N > 1", params.n > 1));
            } else {
                hs.push(hyp("N = 1", params.n == 1));
            }
            if matches!(thm, Theorem::T2_7 | Theorem::T2_8) {
                hs.push(hyp(format!("p+q > m-1 = {}", show(&m1)), pq.gt(&m1)));
            } else {
                hs.push(hyp(format!("p+q < m-1 = {}", show(&m1)), pq.lt(&m1)));
            }
        }
    }
    Ok(hs)
}

pub fn system_existence_tag(shape: SystemShape) -> &'static str {
    match shape {
        SystemShape::Sys1 => "Thm2.12(i)",
        SystemShape::Sys2 => "Thm2.12(ii)",
        SystemShape::Sys3 => "Thm2.12(iii)",
    }
}

/// Every printed hypothesis of the system existence theorem for `params.shape`.
pub fn system_existence_hypotheses<S: Scalar>(params: &SystemParams<S>) -> Result<Vec<Hypothesis>> {
    validate_system(params)?;
    let (ca, cb) = (params.class_a.normalized(), params.class_b.normalized());
    let n = int::<S>(params.n as i64);
    let SystemParams { m1, m2, alpha, beta, p, q, r, s, shape, .. } = params;
    let (a1, b1) = (m1.sub(&int(1)), m2.sub(&int(1)));
    let licensed = |c: &OperatorClass| c.isotropic && c.upper && c.con1;
    let mut hs = vec![
        hyp("both operators of A(|grad u|) grad u form with upper and con1", licensed(&ca) && licensed(&cb)),
        hyp("N > m1 and N > m2", n.gt(m1) && n.gt(m2)),
    ];
    if !(n.gt(m1) && n.gt(m2)) {
        return Ok(hs);
    }
    hs.push(hyp(format!("p+q > m1-1 = {}", show(&a1)), p.add(q).gt(&a1)));
    hs.push(hyp(format!("r+s > m2-1 = {}", show(&b1)), r.add(s).gt(&b1)));
    let (na, nb) = (n.sub(m1), n.sub(m2));
    let th = |x: &S, mm: &S, nn: &S| quot(&x.mul(mm), nn);
    let w = |e: &S, mm: &S, nn: &S| quot(&e.mul(nn), mm);
    let n_alpha = n.add(alpha);
    let n_beta = n.add(beta);
    let gt = |name: &str, lhs: S, rhs: S| hyp(format!("{name} > {}", show(&rhs)), lhs.gt(&rhs));
    match shape {
        SystemShape::Sys1 => {
            hs.push(gt("p", p.clone(), th(alpha, &b1, &nb)));
            hs.push(gt("q", q.clone(), th(alpha, &a1, &na)));
            hs.push(gt("r", r.clone(), th(beta, &a1, &na)));
            hs.push(gt("s", s.clone(), th(beta, &b1, &nb)));
            hs.push(gt("q(N-m1)/(m1-1) + p(N-m2)/(m2-1)", w(q, &a1, &na).add(&w(p, &b1, &nb)), n_alpha));
            hs.push(gt("r(N-m1)/(m1-1) + s(N-m2)/(m2-1)", w(r, &a1, &na).add(&w(s, &b1, &nb)), n_beta));
        }
        SystemShape::Sys2 => {
            hs.push(gt("p", p.clone(), th(alpha, &b1, &nb)));
            hs.push(gt("q", q.clone(), th(alpha, &b1, &nb)));
            hs.push(gt("p+q", p.add(q), th(&n_alpha, &b1, &nb)));
            hs.push(gt("r", r.clone(), th(beta, &a1, &na)));
            hs.push(gt("s", s.clone(), th(beta, &a1, &na)));
            hs.push(gt("r+s", r.add(s), th(&n_alpha, &a1, &na)));
        }
        SystemShape::Sys3 => {
            hs.push(gt("p", p.clone(), th(alpha, &a1, &na)));
            hs.push(gt("q", q.clone(), th(alpha, &b1, &nb)));
            hs.push(gt("r", r.clone(), th(beta, &a1, &na)));
            hs.push(gt("s", s.clone(), th(beta, &b1, &nb)));
            hs.push(gt("p(N-m1)/(m1-1) + q(N-m2)/(m2-1)", w(p, &a1, &na).add(&w(q, &b1, &nb)), n_alpha));
            hs.push(gt("s(N-m1)/(m1-1) + r(N-m2)/(m2-1)", w(s, &a1, &na).add(&w(r, &b1, &nb)), n_beta));
        }
    }
    Ok(hs)
}
