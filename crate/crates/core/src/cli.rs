//! Command-line front end. Exit codes: 0 success (including Divergent
//! answers), 1 a mathematical negative (Failed, no amplitude found),
//! 2 invalid input or violated hypotheses, 3 I/O failure.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::classifier::region::{boundary_lines, region_grid, to_csv, to_svg};
use crate::classifier::{
    classify_single, classify_system, existence_hypotheses, system_existence_hypotheses, system_existence_tag, Exact,
    Hypothesis, OperatorClass, ProblemDomain, ProblemParams, Scalar, SystemParams, Theorem,
};
use crate::constructor::{
    make_bounded, make_log_corrected, make_system_pair, select_gamma_case_i, select_gamma_case_ii, AmplitudeMode,
    BoundedKind, RadialProfile,
};
use crate::error::Error;
use crate::expr::Expr;
use crate::operators::OperatorSpec;
use crate::riesz::{riesz_convolve_on, QuadratureConfig, RadialFunction, RieszDomain, TailSpec};
use crate::verifier::{
    certify_single, tune_amplitude, tune_system, CertStatus, Certificate, Direction, Domain, GridSpec, SystemExponents,
    SystemShape,
};

pub const THREADS_ENV: &str = "NONLOCAL_SUPERSOL_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "nonlocal-supersol",
    version,
    about = "Supersolutions of quasilinear inequalities with Riesz potential terms"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the existence / nonexistence verdict as JSON.
    Classify(ClassifyArgs),
    /// Write a (p, q) phase diagram: PREFIX.csv (columns p,q,status,tags),
    /// PREFIX.svg and PREFIX.manifest.json.
    Region(RegionArgs),
    /// Evaluate (I_alpha * f^p)(r) for a radial f and print it as JSON.
    RieszEval(RieszArgs),
    /// Build a theorem's supersolution, tune its amplitude and certify it.
    /// Writes certificate JSON and a margin CSV (columns r,lhs,rhs,margin,budget).
    Certify(CertifyArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    #[arg(long = "N")]
    pub n: u32,
    /// Numbers accept fractions such as 5/2 and are compared exactly.
    #[arg(long)]
    pub m: String,
    #[arg(long)]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    /// exterior | rn | bounded:R
    #[arg(long, default_value = "exterior")]
    pub domain: String,
    /// Tokens joined by + or ,: hm upper wmc smc con1..con4 isotropic laplace mean-curvature none
    #[arg(long = "operator-class", default_value = "laplace")]
    pub operator_class: String,
    /// Classify the system with exponents p, q, r, s instead.
    #[arg(long)]
    pub system: bool,
    #[arg(long)]
    pub m2: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    /// 1 | 2 | 3
    #[arg(long, default_value = "1")]
    pub shape: String,
    /// Flags of the second operator; defaults to those of the first.
    #[arg(long = "operator-class-b")]
    pub operator_class_b: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct RegionArgs {
    #[arg(long = "N")]
    pub n: u32,
    #[arg(long)]
    pub m: String,
    #[arg(long)]
    pub alpha: String,
    #[arg(long, default_value = "rn")]
    pub domain: String,
    #[arg(long = "operator-class", default_value = "hm+upper")]
    pub operator_class: String,
    /// lo:hi
    #[arg(long = "p-range", default_value = "0:5", allow_hyphen_values = true)]
    pub p_range: String,
    /// lo:hi
    #[arg(long = "q-range", default_value = "-1:5", allow_hyphen_values = true)]
    pub q_range: String,
    /// Cells per axis.
    #[arg(long, default_value_t = 200)]
    pub res: usize,
    /// Output path prefix.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct RieszArgs {
    #[arg(long = "N")]
    pub n: u32,
    #[arg(long)]
    pub alpha: f64,
    /// Expression in r, e.g. "exp(-r^2)" or "indicator(0,1)".
    #[arg(long)]
    pub f: String,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub r: f64,
    /// Decay exponent of f, or "compact"; inferred when omitted.
    #[arg(long = "tail-exponent")]
    pub tail_exponent: Option<String>,
    #[arg(long)]
    pub support: Option<f64>,
    /// rn | ball:R | interval:R
    #[arg(long, default_value = "rn")]
    pub domain: String,
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs-tol")]
    pub abs_tol: Option<f64>,
    #[arg(long = "max-subdivisions")]
    pub max_subdivisions: Option<usize>,
    #[arg(long = "truncation-radius")]
    pub truncation_radius: Option<f64>,
    #[arg(long = "angular-nodes")]
    pub angular_nodes: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
pub struct CertifyArgs {
    /// 2.3i | 2.3ii | 2.4 | 2.7 | 2.8 | 2.9 | 2.10 | 2.12i | 2.12ii | 2.12iii
    #[arg(long)]
    pub theorem: Option<String>,
    /// Ad-hoc profile JSON, e.g. {"family":"power_decay","epsilon":0.1,"gamma":3}.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long = "N")]
    pub n: u32,
    #[arg(long, default_value = "2")]
    pub m: String,
    #[arg(long, default_value = "1")]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    /// Radius of the ball for bounded-domain theorems.
    #[arg(long = "R", default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long)]
    pub m2: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    /// laplace | mean-curvature
    #[arg(long, default_value = "laplace")]
    pub operator: String,
    /// Starting amplitude of the search.
    #[arg(long, default_value_t = 1.0)]
    pub seed: f64,
    /// Grid points (default 1000 on R^N, 500 on a ball).
    #[arg(long)]
    pub points: Option<usize>,
    /// Domain for --profile: rn | bounded:R
    #[arg(long, default_value = "rn")]
    pub domain: String,
    /// Output directory for certificate, CSV and manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parameters and provenance of one run, written beside its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub parameters: serde_json::Value,
    pub tool_version: String,
    /// SHA-256 of the subcommand and parameters.
    pub config_hash: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: &impl Serialize) -> Self {
        let parameters = serde_json::to_value(parameters).unwrap_or(serde_json::Value::Null);
        let canonical = serde_json::json!({ "subcommand": subcommand, "parameters": parameters }).to_string();
        let digest = Sha256::digest(canonical.as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self {
            subcommand: subcommand.into(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config_hash,
            timestamp,
        }
    }
}

struct Failure {
    code: i32,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.into() }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            Error::BudgetExceeded { .. } | Error::NoAmplitudeFound { .. } => EXIT_NEGATIVE,
            _ => EXIT_USAGE,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn io_fail(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_IO, msg: format!("cannot write {}: {e}", path.display()) }
}

type Outcome = std::result::Result<i32, Failure>;

/// Caps rayon workers from the environment; later calls are no-ops.
pub fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_threads();
    let out = match cli.command {
        Command::Classify(a) => cmd_classify(&a),
        Command::Region(a) => cmd_region(&a),
        Command::RieszEval(a) => cmd_riesz_eval(&a),
        Command::Certify(a) => cmd_certify(&a),
    };
    match out {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn num(name: &str, v: &str) -> std::result::Result<Exact, Failure> {
    v.parse::<Exact>().map_err(|_| usage(format!("--{name}: not a number: {v:?}")))
}

fn required<'a>(name: &str, v: &'a Option<String>) -> std::result::Result<&'a str, Failure> {
    v.as_deref().ok_or_else(|| usage(format!("--{name} is required here")))
}

fn parse_domain(s: &str) -> std::result::Result<ProblemDomain, Failure> {
    match s.trim().to_ascii_lowercase().as_str() {
        "exterior" => Ok(ProblemDomain::Exterior),
        "rn" | "whole" | "wholespace" => Ok(ProblemDomain::WholeSpace),
        other => match other.strip_prefix("bounded:") {
            Some(r) => {
                let radius: f64 = r.parse().map_err(|_| usage(format!("bad radius in --domain {s:?}")))?;
                Ok(ProblemDomain::Bounded { radius })
            }
            None => Err(usage(format!("--domain must be exterior, rn or bounded:R, got {s:?}"))),
        },
    }
}

fn parse_shape(s: &str) -> std::result::Result<SystemShape, Failure> {
    match s.trim().to_ascii_lowercase().trim_start_matches("sys") {
        "1" => Ok(SystemShape::Sys1),
        "2" => Ok(SystemShape::Sys2),
        "3" => Ok(SystemShape::Sys3),
        _ => Err(usage(format!("--shape must be 1, 2 or 3, got {s:?}"))),
    }
}

fn print_json(v: &impl Serialize) -> std::result::Result<(), Failure> {
    let s = serde_json::to_string(v).map_err(Error::from)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{s}").map_err(|e| Failure { code: EXIT_IO, msg: e.to_string() })
}

fn cmd_classify(a: &ClassifyArgs) -> Outcome {
    let m = num("m", &a.m)?;
    let class = OperatorClass::from_tokens(&a.operator_class, m.to_f64())?;
    let verdict = if a.system {
        let m2 = num("m2", a.m2.as_deref().unwrap_or(&a.m))?;
        let class_b = match &a.operator_class_b {
            Some(t) => OperatorClass::from_tokens(t, m2.to_f64())?,
            None => OperatorClass::from_tokens(&a.operator_class, m2.to_f64())?,
        };
        let params = SystemParams {
            n: a.n,
            m1: m,
            m2,
            alpha: num("alpha", &a.alpha)?,
            beta: num("beta", a.beta.as_deref().unwrap_or(&a.alpha))?,
            p: num("p", &a.p)?,
            q: num("q", &a.q)?,
            r: num("r", required("r", &a.r)?)?,
            s: num("s", required("s", &a.s)?)?,
            shape: parse_shape(&a.shape)?,
            class_a: class,
            class_b,
        };
        classify_system(&params)?
    } else {
        let params = ProblemParams {
            n: a.n,
            m,
            alpha: num("alpha", &a.alpha)?,
            p: num("p", &a.p)?,
            q: num("q", &a.q)?,
            domain: parse_domain(&a.domain)?,
            class,
        };
        classify_single(&params)?
    };
    print_json(&verdict)?;
    Ok(EXIT_OK)
}

fn parse_range(name: &str, s: &str) -> std::result::Result<(Exact, Exact), Failure> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| usage(format!("--{name} must look like lo:hi, got {s:?}")))?;
    let (lo, hi) = (num(name, lo)?, num(name, hi)?);
    if !Scalar::lt(&lo, &hi) {
        return Err(usage(format!("--{name}: lo must be below hi")));
    }
    Ok((lo, hi))
}

fn write_file(path: &Path, contents: &str) -> std::result::Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| io_fail(path, e))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_region(a: &RegionArgs) -> Outcome {
    let m = num("m", &a.m)?;
    let class = OperatorClass::from_tokens(&a.operator_class, m.to_f64())?;
    let (p_range, q_range) = (parse_range("p-range", &a.p_range)?, parse_range("q-range", &a.q_range)?);
    let base = ProblemParams {
        n: a.n,
        m,
        alpha: num("alpha", &a.alpha)?,
        p: Exact::from_int(1),
        q: Exact::from_int(0),
        domain: parse_domain(&a.domain)?,
        class,
    };
    let grid = region_grid(&base, p_range, q_range, a.res, a.res)?;
    let lines = boundary_lines(&base, grid.p_range, grid.q_range);
    let title = format!("N = {}, m = {}, alpha = {}", a.n, base.m, base.alpha);
    write_file(&with_suffix(&a.out, ".csv"), &to_csv(&grid))?;
    write_file(&with_suffix(&a.out, ".svg"), &to_svg(&grid, &lines, &title))?;
    let manifest = RunManifest::new("region", a);
    write_file(&with_suffix(&a.out, ".manifest.json"), &serde_json::to_string_pretty(&manifest).map_err(Error::from)?)?;
    Ok(EXIT_OK)
}

/// Tail exponent guessed from the decay of `f` between `1e5` and `1e6`.
fn infer_tail(e: &Expr, alpha: f64, p: f64) -> (TailSpec, Option<f64>) {
    if let Some(b) = e.support_bound() {
        return (TailSpec::Compact, Some(b));
    }
    if e.is_constant() && e.eval(0.0) == 0.0 {
        return (TailSpec::Compact, Some(0.0));
    }
    let (f5, f6) = (e.eval(1e5), e.eval(1e6));
    if f6 > 0.0 && f5 > 0.0 {
        let g = -(f6 / f5).ln() / 10f64.ln();
        let rounded = (g * 1000.0).round() / 1000.0;
        let g = if (g - rounded).abs() < 1e-4 { rounded } else { g };
        return (TailSpec::Power(g.max(0.0)), None);
    }
    (TailSpec::Power(alpha / p + 1.0), None)
}

fn cmd_riesz_eval(a: &RieszArgs) -> Outcome {
    let e = Expr::parse(&a.f)?;
    let (tail, support) = match a.tail_exponent.as_deref() {
        Some("compact") => (TailSpec::Compact, a.support.or_else(|| e.support_bound())),
        Some(g) => (TailSpec::Power(g.parse().map_err(|_| usage(format!("bad --tail-exponent {g:?}")))?), a.support),
        None => {
            let (t, s) = infer_tail(&e, a.alpha, a.p);
            (t, a.support.or(s))
        }
    };
    let f = RadialFunction::parse(&a.f, tail, support)?;
    let d = a.domain.trim().to_ascii_lowercase();
    let domain = if d == "rn" {
        RieszDomain::WholeSpace
    } else if let Some(r) = d.strip_prefix("ball:") {
        RieszDomain::Ball { radius: r.parse().map_err(|_| usage("bad ball radius"))? }
    } else if let Some(r) = d.strip_prefix("interval:") {
        RieszDomain::Interval { radius: r.parse().map_err(|_| usage("bad interval radius"))? }
    } else {
        return Err(usage(format!("--domain must be rn, ball:R or interval:R, got {:?}", a.domain)));
    };
    let mut cfg = QuadratureConfig::default();
    if let Some(v) = a.rel_tol {
        cfg.rel_tol = v;
    }
    if let Some(v) = a.abs_tol {
        cfg.abs_tol = v;
    }
    if let Some(v) = a.max_subdivisions {
        cfg.max_subdivisions = v;
    }
    if let Some(v) = a.angular_nodes {
        cfg.angular_nodes = v;
    }
    cfg.truncation_radius = a.truncation_radius;
    let v = riesz_convolve_on(a.n, a.alpha, &f, a.p, a.r, domain, &cfg)?;
    print_json(&v)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CertifySummary<'a> {
    theorem: Option<&'a str>,
    status: &'a CertStatus,
    amplitude: f64,
    components: Vec<ComponentSummary<'a>>,
}

#[derive(Serialize)]
struct ComponentSummary<'a> {
    status: &'a CertStatus,
    c1_ok: bool,
    #[serde(with = "crate::extreal")]
    min_slack: f64,
}

fn min_slack(c: &Certificate) -> f64 {
    c.margins
        .iter()
        .zip(&c.quadrature_budget)
        .map(|(m, b)| m - b)
        .map(|x| if x.is_nan() { f64::NEG_INFINITY } else { x })
        .fold(f64::INFINITY, f64::min)
}

fn parse_theorem(s: &str) -> std::result::Result<Result2, Failure> {
    Ok(match s.trim().trim_start_matches("Thm").trim_start_matches("thm") {
        "2.3i" | "2.3(i)" => Result2::Single(Theorem::T2_3i),
        "2.3ii" | "2.3(ii)" => Result2::Single(Theorem::T2_3ii),
        "2.4" => Result2::Single(Theorem::T2_4),
        "2.7" => Result2::Single(Theorem::T2_7),
        "2.8" => Result2::Single(Theorem::T2_8),
        "2.9" => Result2::Single(Theorem::T2_9),
        "2.10" => Result2::Single(Theorem::T2_10),
        "2.12i" | "2.12(i)" => Result2::System(SystemShape::Sys1),
        "2.12ii" | "2.12(ii)" => Result2::System(SystemShape::Sys2),
        "2.12iii" | "2.12(iii)" => Result2::System(SystemShape::Sys3),
        _ => return Err(usage(format!("unknown --theorem {s:?}"))),
    })
}

enum Result2 {
    Single(Theorem),
    System(SystemShape),
}

fn operator(name: &str, m: f64) -> std::result::Result<(OperatorSpec, OperatorClass), Failure> {
    match name.trim().to_ascii_lowercase().as_str() {
        "laplace" | "m-laplace" => Ok((OperatorSpec::m_laplace(m)?, OperatorClass::m_laplace())),
        "mean-curvature" | "mmc" => Ok((OperatorSpec::m_mean_curvature(m)?, OperatorClass::mean_curvature(m))),
        other => Err(usage(format!("--operator must be laplace or mean-curvature, got {other:?}"))),
    }
}

fn rejection(tag: &str, hs: &[Hypothesis], nonexistence: &[String]) -> Failure {
    let failed: Vec<&str> = hs.iter().filter(|h| !h.holds).map(|h| h.label.as_str()).collect();
    let mut msg = format!("{tag} does not apply: violated hypotheses: {}", failed.join("; "));
    if !nonexistence.is_empty() {
        msg.push_str(&format!(" (nonexistence holds by {})", nonexistence.join(", ")));
    }
    usage(msg)
}

fn emit(a: &CertifyArgs, certs: &[(&str, &Certificate)], summary: &CertifySummary) -> std::result::Result<(), Failure> {
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir).map_err(|e| io_fail(dir, e))?;
        for (name, c) in certs {
            let json = serde_json::to_string_pretty(c).map_err(Error::from)?;
            write_file(&dir.join(format!("certificate{name}.json")), &json)?;
            write_file(&dir.join(format!("margins{name}.csv")), &c.to_csv())?;
        }
        let manifest = RunManifest::new("certify", a);
        write_file(&dir.join("manifest.json"), &serde_json::to_string_pretty(&manifest).map_err(Error::from)?)?;
    }
    print_json(summary)
}

fn exit_for(status: &CertStatus) -> i32 {
    match status {
        CertStatus::Certified | CertStatus::Divergent => EXIT_OK,
        CertStatus::Failed { .. } => EXIT_NEGATIVE,
    }
}

fn cmd_certify(a: &CertifyArgs) -> Outcome {
    let cfg = QuadratureConfig::default();
    let (m, alpha, p, q) = (num("m", &a.m)?, num("alpha", &a.alpha)?, num("p", &a.p)?, num("q", &a.q)?);
    let (op, class) = operator(&a.operator, m.to_f64())?;
    let (mf, af, pf, qf) = (m.to_f64(), alpha.to_f64(), p.to_f64(), q.to_f64());

    if let Some(profile) = &a.profile {
        if a.theorem.is_some() {
            return Err(usage("--theorem and --profile are exclusive"));
        }
        let u: RadialProfile = serde_json::from_str(profile).map_err(|e| usage(format!("bad --profile: {e}")))?;
        let (domain, grid) = match parse_domain(&a.domain)? {
            ProblemDomain::Bounded { radius } => (Domain::Bounded { radius }, GridSpec::bounded(radius)),
            _ => (Domain::WholeSpace, GridSpec::whole_space()),
        };
        let grid = GridSpec { points: a.points.unwrap_or(grid.points), ..grid };
        let c = certify_single(&op, &u, a.n, af, pf, qf, domain, &grid, &cfg)?;
        let summary = CertifySummary {
            theorem: None,
            status: &c.status,
            amplitude: u.amplitude(),
            components: vec![ComponentSummary { status: &c.status, c1_ok: c.c1_ok, min_slack: min_slack(&c) }],
        };
        emit(a, &[("", &c)], &summary)?;
        return Ok(exit_for(&c.status));
    }

    let theorem = a.theorem.as_deref().ok_or_else(|| usage("one of --theorem or --profile is required"))?;
    match parse_theorem(theorem)? {
        Result2::Single(thm) => {
            let domain =
                if thm.is_bounded() { ProblemDomain::Bounded { radius: a.radius } } else { ProblemDomain::WholeSpace };
            let params =
                ProblemParams { n: a.n, m: m.clone(), alpha: alpha.clone(), p: p.clone(), q: q.clone(), domain, class };
            let hs = existence_hypotheses(thm, &params)?;
            if hs.iter().any(|h| !h.holds) {
                let ext = ProblemParams { domain: ProblemDomain::Exterior, ..params.clone() };
                let non: Vec<String> = classify_single(&ext)
                    .map(|v| v.nonexistence_tags().map(String::from).collect())
                    .unwrap_or_default();
                return Err(rejection(thm.tag(), &hs, &non));
            }
            let (u, domain, grid, direction) = match thm {
                Theorem::T2_3i => {
                    let g = select_gamma_case_i(a.n, mf, pf)?;
                    (
                        RadialProfile::power_decay(a.seed, g.gamma)?,
                        Domain::WholeSpace,
                        GridSpec::whole_space(),
                        Direction::Shrink,
                    )
                }
                Theorem::T2_3ii => {
                    let g = select_gamma_case_ii(a.n, mf, af, pf, qf)?;
                    (
                        RadialProfile::power_decay(a.seed, g.gamma)?,
                        Domain::WholeSpace,
                        GridSpec::whole_space(),
                        Direction::Shrink,
                    )
                }
                Theorem::T2_4 => (
                    make_log_corrected(a.n, mf, a.seed)?,
                    Domain::WholeSpace,
                    GridSpec::whole_space(),
                    Direction::Shrink,
                ),
                _ => {
                    let (kind, mode, dir) = match thm {
                        Theorem::T2_7 => (BoundedKind::Linear, AmplitudeMode::Small, Direction::Shrink),
                        Theorem::T2_8 => (BoundedKind::Log, AmplitudeMode::Small, Direction::Shrink),
                        Theorem::T2_9 => (BoundedKind::Linear, AmplitudeMode::Large, Direction::Grow),
                        _ => (BoundedKind::Log, AmplitudeMode::Large, Direction::Grow),
                    };
                    let u = make_bounded(kind, mode, a.radius, a.seed)?;
                    (u, Domain::Bounded { radius: a.radius }, GridSpec::bounded(a.radius), dir)
                }
            };
            let grid = GridSpec { points: a.points.unwrap_or(grid.points), ..grid };
            let tuned = tune_amplitude(&op, &u, a.n, af, pf, qf, domain, &grid, &cfg, direction)?;
            let c = &tuned.certificate;
            let summary = CertifySummary {
                theorem: Some(thm.tag()),
                status: &c.status,
                amplitude: tuned.amplitude,
                components: vec![ComponentSummary { status: &c.status, c1_ok: c.c1_ok, min_slack: min_slack(c) }],
            };
            emit(a, &[("", c)], &summary)?;
            Ok(exit_for(&c.status))
        }
        Result2::System(shape) => {
            let m2 = num("m2", a.m2.as_deref().unwrap_or(&a.m))?;
            let beta = num("beta", a.beta.as_deref().unwrap_or(&a.alpha))?;
            let (r, s) = (num("r", required("r", &a.r)?)?, num("s", required("s", &a.s)?)?);
            let (op_b, class_b) = operator(&a.operator, m2.to_f64())?;
            let params = SystemParams {
                n: a.n,
                m1: m,
                m2: m2.clone(),
                alpha,
                beta: beta.clone(),
                p,
                q,
                r: r.clone(),
                s: s.clone(),
                shape,
                class_a: class,
                class_b,
            };
            let tag = system_existence_tag(shape);
            let hs = system_existence_hypotheses(&params)?;
            if hs.iter().any(|h| !h.holds) {
                let non: Vec<String> = classify_system(&params)
                    .map(|v| v.nonexistence_tags().map(String::from).collect())
                    .unwrap_or_default();
                return Err(rejection(tag, &hs, &non));
            }
            let (u, v) = make_system_pair(a.n, mf, m2.to_f64(), a.seed)?;
            let exps = SystemExponents { alpha: af, beta: beta.to_f64(), p: pf, q: qf, r: r.to_f64(), s: s.to_f64() };
            let grid = GridSpec { points: a.points.unwrap_or(1000), ..GridSpec::whole_space() };
            let t = tune_system(&op, &op_b, &u, &v, a.n, exps, shape, Domain::WholeSpace, &grid, &cfg)?;
            let both = match (&t.first.status, &t.second.status) {
                (CertStatus::Divergent, _) | (_, CertStatus::Divergent) => CertStatus::Divergent,
                (CertStatus::Certified, CertStatus::Certified) => CertStatus::Certified,
                (CertStatus::Certified, other) => *other,
                (other, _) => *other,
            };
            let summary = CertifySummary {
                theorem: Some(tag),
                status: &both,
                amplitude: t.amplitude,
                components: vec![
                    ComponentSummary { status: &t.first.status, c1_ok: t.first.c1_ok, min_slack: min_slack(&t.first) },
                    ComponentSummary {
                        status: &t.second.status,
                        c1_ok: t.second.c1_ok,
                        min_slack: min_slack(&t.second),
                    },
                ],
            };
            emit(a, &[("_u", &t.first), ("_v", &t.second)], &summary)?;
            Ok(exit_for(&both))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_hash_ignores_timestamp() {
        let a = RunManifest::new("classify", &serde_json::json!({"N": 4, "p": "2"}));
        let b = RunManifest::new("classify", &serde_json::json!({"p": "2", "N": 4}));
        assert_eq!(a.config_hash, b.config_hash);
        assert_eq!(a.config_hash.len(), 64);
        let c = RunManifest::new("region", &serde_json::json!({"N": 4, "p": "2"}));
        assert_ne!(a.config_hash, c.config_hash);
    }

    #[test]
    fn tail_inference() {
        let e = Expr::parse("(1+r)^-2").unwrap();
        assert_eq!(infer_tail(&e, 2.0, 1.0).0, TailSpec::Power(2.0));
        let e = Expr::parse("indicator(0,1)").unwrap();
        assert_eq!(infer_tail(&e, 2.0, 1.0), (TailSpec::Compact, Some(1.0)));
        let e = Expr::parse("exp(-r^2)").unwrap();
        assert_eq!(infer_tail(&e, 1.0, 1.0).0, TailSpec::Power(2.0));
        let e = Expr::parse("0").unwrap();
        assert_eq!(infer_tail(&e, 1.0, 1.0), (TailSpec::Compact, Some(0.0)));
    }

    #[test]
    fn parsing_helpers() {
        assert_eq!(parse_domain("bounded:2").ok(), Some(ProblemDomain::Bounded { radius: 2.0 }));
        assert!(parse_domain("ball").is_err());
        assert_eq!(parse_shape("sys3").ok(), Some(SystemShape::Sys3));
        assert!(parse_range("p", "5:0").is_err());
        assert!(parse_range("p", "-1:5").is_ok());
        assert!(matches!(parse_theorem("2.12ii").ok(), Some(Result2::System(SystemShape::Sys2))));
    }
}
