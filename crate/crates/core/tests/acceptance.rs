//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use nonlocal_supersol::classifier::region::region_grid;
use nonlocal_supersol::classifier::{
    classify_single, Exact, OperatorClass, ProblemDomain, ProblemParams, Scalar, Status,
};
use nonlocal_supersol::constructor::{
    make_bounded, make_log_corrected, make_system_pair, select_gamma_case_ii, AmplitudeMode, BoundedKind, RadialProfile,
};
use nonlocal_supersol::operators::{apply_l, radial_divergence_terms, OperatorSpec, PowerLaw};
use nonlocal_supersol::riesz::{
    riesz_convolve, riesz_convolve_on, QuadratureConfig, RadialFunction, RieszDomain, RieszStatus, TailSpec,
};
use nonlocal_supersol::verifier::{
    loglog_slope, tune_amplitude, tune_system, CertStatus, Direction, Domain, GridSpec, Side, SystemExponents,
    SystemShape,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use common::{centred_oracle, trichotomy_exists};

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn report(id: u32, title: &str, started: Instant, out: Outcome) -> bool {
    let secs = started.elapsed().as_secs_f64();
    match out {
        Ok(detail) => {
            println!("PASS {id:>2} {title} [{secs:.1}s] {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL {id:>2} {title} [{secs:.1}s] {detail}");
            false
        }
    }
}

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let t = started.elapsed();
    if t <= limit {
        Ok(())
    } else {
        Err(format!("runtime {:.1}s exceeds {:.0}s", t.as_secs_f64(), limit.as_secs_f64()))
    }
}

fn x(s: &str) -> Exact {
    s.parse().unwrap()
}

fn laplace_params(n: u32, alpha: &str, p: Exact, q: Exact) -> ProblemParams<Exact> {
    ProblemParams {
        n,
        m: x("2"),
        alpha: x(alpha),
        p,
        q,
        domain: ProblemDomain::WholeSpace,
        class: OperatorClass::m_laplace(),
    }
}

/// Line through `(p0, q0) + t (dp, dq)`; probes are on it and a normal step either side.
struct Line {
    label: &'static str,
    start: (Exact, Exact),
    dir: (Exact, Exact),
    normal: (Exact, Exact),
}

fn check_plane(n: u32, alpha: &str, lines: &[Line]) -> Result<String, String> {
    let (m, a) = (x("2").0, x(alpha).0);
    let h = x("1/1000000");
    let mut probes = 0;
    for line in lines {
        for i in 1..=50i64 {
            let t = Exact::new(i, 51);
            let p = line.start.0.add(&t.mul(&line.dir.0));
            let q = line.start.1.add(&t.mul(&line.dir.1));
            let mut sides = Vec::new();
            for k in [-1i64, 0, 1] {
                let s = Exact::from_int(k).mul(&h);
                let (pp, qq) = (p.add(&s.mul(&line.normal.0)), q.add(&s.mul(&line.normal.1)));
                let v =
                    classify_single(&laplace_params(n, alpha, pp.clone(), qq.clone())).map_err(|e| e.to_string())?;
                let want = if trichotomy_exists(n as i64, &m, &a, &pp.0, &qq.0) {
                    Status::Existence
                } else {
                    Status::Nonexistence
                };
                if v.status != want {
                    return Err(format!("{}: ({pp}, {qq}) classified {:?}, expected {want:?}", line.label, v.status));
                }
                sides.push(v.status);
                probes += 1;
            }
            if sides[0] == sides[2] {
                return Err(format!("{}: ({p}, {q}) is not on the boundary", line.label));
            }
        }
    }
    let grid = region_grid(&laplace_params(n, alpha, x("1"), x("0")), (x("0"), x("5")), (x("-1"), x("5")), 200, 200)
        .map_err(|e| e.to_string())?;
    let wrong = grid
        .cells
        .iter()
        .filter(|c| {
            let want = trichotomy_exists(n as i64, &m, &a, &c.p.0, &c.q.0);
            (c.verdict.status == Status::Existence) != want || c.verdict.status == Status::Unknown
        })
        .count();
    if wrong > 0 {
        return Err(format!("{wrong} grid cells misclassified"));
    }
    Ok(format!("{probes} boundary probes, 40000 cells, 0 misclassified"))
}

fn line(label: &'static str, start: (&str, &str), dir: (&str, &str), normal: (&str, &str)) -> Line {
    Line { label, start: (x(start.0), x(start.1)), dir: (x(dir.0), x(dir.1)), normal: (x(normal.0), x(normal.1)) }
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let out = check_plane(
        4,
        "1",
        &[
            line("p = 1/2", ("1/2", "2"), ("0", "3"), ("1", "0")),
            line("p + q = 5/2", ("1/2", "2"), ("3/2", "-3/2"), ("1", "1")),
            line("q = 1 - p/4", ("2", "1/2"), ("3", "-3/4"), ("1", "4")),
        ],
    )?;
    within(Duration::from_secs(5), t)?;
    Ok(out)
}

fn criterion_2() -> Outcome {
    let lines = [
        line("p = 1", ("1", "2"), ("0", "3"), ("1", "0")),
        line("q = 1", ("2", "1"), ("3", "0"), ("0", "1")),
        line("p + q = 3", ("1", "2"), ("1", "-1"), ("1", "1")),
    ];
    let a = check_plane(4, "2", &lines)?;
    let b = check_plane(4, "3", &lines)?;
    Ok(format!("alpha=2: {a}; alpha=3: {b}"))
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let cfg = QuadratureConfig::default();
    let f = RadialFunction::parse("exp(-r^2)", TailSpec::Power(4.0), None).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (n, alphas) in [(2u32, vec![0.5, 1.0]), (3, vec![0.5, 1.0, 2.0])] {
        for alpha in alphas {
            for r in [0.0, 1.0, 2.0] {
                let v = riesz_convolve(n, alpha, &f, 1.0, r, &cfg).map_err(|e| e.to_string())?;
                let o = centred_oracle(n, alpha, |s| (-s * s).exp(), r);
                let rel = (v.value - o).abs() / o;
                worst = worst.max(rel);
                if !(rel < 1e-4) {
                    return Err(format!("N={n} alpha={alpha} r={r}: {} vs oracle {o}", v.value));
                }
            }
        }
    }
    let ball = RadialFunction::parse("indicator(0,1)", TailSpec::Compact, Some(1.0)).map_err(|e| e.to_string())?;
    let v = riesz_convolve(3, 2.0, &ball, 1.0, 0.0, &cfg).map_err(|e| e.to_string())?.value;
    if !((v - 0.5).abs() < 1e-6) {
        return Err(format!("Newtonian potential at 0 is {v}"));
    }
    within(Duration::from_secs(30), t)?;
    Ok(format!("worst relative gap {worst:.1e}; ball potential at 0 = {v:.10}"))
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, m) in [(3u32, 2.0), (4, 2.0), (5, 3.0)] {
        let op = OperatorSpec::m_laplace(m).map_err(|e| e.to_string())?;
        let u = PowerLaw { coeff: 1.0, exponent: -(n as f64 - m) / (m - 1.0) };
        for i in 0..100 {
            let r = 1.0 + 9.0 * i as f64 / 99.0;
            let d = radial_divergence_terms(&op, &u, r, n).map_err(|e| e.to_string())?;
            let scale = d.second_order.abs().min(d.first_order.abs());
            let ratio = d.total().abs() / scale;
            worst = worst.max(ratio);
            if !(ratio < 1e-8) {
                return Err(format!("N={n} m={m} r={r}: residual {} vs summands {scale}", d.total()));
            }
        }
    }
    Ok(format!("worst residual / summand {worst:.1e}"))
}

fn slopes(
    cert: &nonlocal_supersol::verifier::Certificate,
    log_power: f64,
    lhs_want: f64,
    rhs_want: f64,
) -> Result<String, String> {
    let lhs = loglog_slope(cert, Side::Lhs, 10.0, 100.0, log_power).ok_or("no lhs samples")?;
    let rhs = loglog_slope(cert, Side::Rhs, 10.0, 100.0, 0.0).ok_or("no rhs samples")?;
    let text = format!("lhs slope {lhs:.4} (want {lhs_want}), rhs slope {rhs:.4} (want {rhs_want})");
    if (lhs - lhs_want).abs() <= 0.05 && (rhs - rhs_want).abs() <= 0.05 {
        Ok(text)
    } else {
        Err(text)
    }
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let op = OperatorSpec::m_laplace(2.0).map_err(|e| e.to_string())?;
    let seed = make_log_corrected(4, 2.0, 1.0).map_err(|e| e.to_string())?;
    let grid = GridSpec::whole_space();
    let tuned = tune_amplitude(
        &op,
        &seed,
        4,
        1.0,
        2.0,
        1.0,
        Domain::WholeSpace,
        &grid,
        &QuadratureConfig::default(),
        Direction::Shrink,
    )
    .map_err(|e| e.to_string())?;
    let c = &tuned.certificate;
    if c.status != CertStatus::Certified {
        return Err(format!("status {:?}", c.status));
    }
    let s = slopes(c, 4.0, -4.0, -5.0).map_err(|e| format!("Certified at epsilon {:e}; {e}", tuned.amplitude))?;
    within(Duration::from_secs(120), t)?;
    Ok(format!("Certified at epsilon {:e}; {s}", tuned.amplitude))
}

fn criterion_6() -> Outcome {
    let op = OperatorSpec::m_laplace(2.0).map_err(|e| e.to_string())?;
    let g = select_gamma_case_ii(5, 2.0, 1.0, 2.0, 1.0).map_err(|e| e.to_string())?;
    if g.gamma != 2.0 {
        return Err(format!("gamma {} instead of 2", g.gamma));
    }
    let seed = RadialProfile::power_decay(1.0, g.gamma).map_err(|e| e.to_string())?;
    let tuned = tune_amplitude(
        &op,
        &seed,
        5,
        1.0,
        2.0,
        1.0,
        Domain::WholeSpace,
        &GridSpec::whole_space(),
        &QuadratureConfig::default(),
        Direction::Shrink,
    )
    .map_err(|e| e.to_string())?;
    let c = &tuned.certificate;
    if c.status != CertStatus::Certified {
        return Err(format!("status {:?}", c.status));
    }
    let s = slopes(c, 0.0, -4.0, -5.0).map_err(|e| format!("Certified at epsilon {:e}; {e}", tuned.amplitude))?;
    Ok(format!("Certified at epsilon {:e}; {s}", tuned.amplitude))
}

fn criterion_7() -> Outcome {
    let op = OperatorSpec::m_laplace(2.0).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    for (label, pq, mode, direction) in [
        ("Thm2.7", 1.0, AmplitudeMode::Small, Direction::Shrink),
        ("Thm2.9", 0.25, AmplitudeMode::Large, Direction::Grow),
    ] {
        let t = Instant::now();
        let seed = make_bounded(BoundedKind::Linear, mode, 1.0, 1.0).map_err(|e| e.to_string())?;
        let tuned = tune_amplitude(
            &op,
            &seed,
            2,
            1.0,
            pq,
            pq,
            Domain::Bounded { radius: 1.0 },
            &GridSpec::bounded(1.0),
            &QuadratureConfig::default(),
            direction,
        )
        .map_err(|e| format!("{label}: {e}"))?;
        if tuned.certificate.status != CertStatus::Certified {
            return Err(format!("{label}: {:?}", tuned.certificate.status));
        }
        within(Duration::from_secs(60), t).map_err(|e| format!("{label}: {e}"))?;
        parts.push(format!("{label} {} = {:e}", tuned.certificate.tuned_params.symbol, tuned.amplitude));
    }
    Ok(parts.join(", "))
}

fn criterion_8() -> Outcome {
    let op = OperatorSpec::m_laplace(2.0).map_err(|e| e.to_string())?;
    let (u, v) = make_system_pair(5, 2.0, 2.0, 1.0).map_err(|e| e.to_string())?;
    let exps = SystemExponents { alpha: 1.0, beta: 1.0, p: 1.5, q: 1.5, r: 1.5, s: 1.5 };
    let t = tune_system(
        &op,
        &op,
        &u,
        &v,
        5,
        exps,
        SystemShape::Sys1,
        Domain::WholeSpace,
        &GridSpec::whole_space(),
        &QuadratureConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    if t.first.status == CertStatus::Certified && t.second.status == CertStatus::Certified {
        Ok(format!("both components Certified at epsilon {:e}", t.amplitude))
    } else {
        Err(format!("components {:?} / {:?}", t.first.status, t.second.status))
    }
}

fn criterion_9() -> Outcome {
    let f = RadialProfile::power_decay(1.0, 2.0).and_then(|u| u.to_radial_function()).map_err(|e| e.to_string())?;
    let v = riesz_convolve(4, 2.0, &f, 1.0, 1.0, &QuadratureConfig::default()).map_err(|e| e.to_string())?;
    if v.status != RieszStatus::Divergent {
        return Err(format!("gamma = 2 potential reported {:?}", v.status));
    }
    let out = Command::new(env!("CARGO_BIN_EXE_nonlocal-supersol"))
        .args(["certify", "--theorem", "2.4", "--N", "4", "--m", "2", "--alpha", "1", "--p", "0.4", "--q", "1"])
        .output()
        .map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    if out.status.code() != Some(2) {
        return Err(format!("certify exited {:?}", out.status.code()));
    }
    if !(stderr.contains("Thm2.1(ii1)") && stderr.contains("p > alpha(m-1)/(N-m)")) {
        return Err(format!("message does not name the violation: {stderr}"));
    }
    Ok(format!("Divergent; certify exit 2: {}", stderr.trim()))
}

fn random_class() -> impl Strategy<Value = OperatorClass> {
    proptest::collection::vec(any::<bool>(), 9).prop_map(|b| {
        OperatorClass {
            hm: b[0],
            wmc: b[1],
            smc: b[2],
            upper: b[3],
            con1: b[4],
            con2: b[5],
            con3: b[6],
            con4: b[7],
            isotropic: b[8],
        }
        .normalized()
    })
}

fn random_problem() -> impl Strategy<Value = ProblemParams> {
    (1u32..=8, 1.05f64..6.0, 0.01f64..0.99, 0.01f64..6.0, -2.0f64..6.0, 0u8..3, random_class()).prop_map(
        |(n, m, a, p, q, d, class)| ProblemParams {
            n,
            m,
            alpha: a * n as f64,
            p,
            q,
            domain: match d {
                0 => ProblemDomain::Exterior,
                1 => ProblemDomain::WholeSpace,
                _ => ProblemDomain::Bounded { radius: 1.0 },
            },
            class,
        },
    )
}

fn criterion_10() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 10_000, failure_persistence: None, ..Config::default() });
    runner
        .run(&random_problem(), |params| {
            let v = classify_single(&params).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(
                v.existence_tags().next().is_none() || v.nonexistence_tags().next().is_none(),
                "mixed tags {:?}",
                v.tags
            );
            let licensed = params.class.hm && params.class.upper && params.n as f64 > params.m;
            if licensed && !matches!(params.domain, ProblemDomain::Bounded { .. }) {
                prop_assert!(v.status != Status::Unknown, "Unknown under hm+upper: {:?}", v);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let cfg = QuadratureConfig::default();
    let profiles = (0u8..3, 0.05f64..0.95, 1.0f64..4.0, 1.1f64..4.0, 0.2f64..2.0, -1.0f64..2.0, 0.1f64..10.0);
    let mut runner = TestRunner::new(Config { cases: 100, failure_persistence: None, ..Config::default() });
    runner
        .run(&profiles, |(family, rr, gamma, m, p, q, amp)| {
            let (unit, n, domain) = match family {
                0 => (RadialProfile::power_decay(1.0, gamma + 3.0 / p), 3u32, RieszDomain::WholeSpace),
                1 => (RadialProfile::linear_bounded(1.0, 1.0), 3, RieszDomain::Ball { radius: 1.0 }),
                _ => (RadialProfile::log_bounded(1.0, 1.0), 3, RieszDomain::Ball { radius: 1.0 }),
            };
            let unit = unit.map_err(|e| TestCaseError::fail(e.to_string()))?;
            let scaled = unit.with_amplitude(amp);
            let op = OperatorSpec::m_laplace(m).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let alpha = 1.5;
            let l1 = apply_l(&op, &unit, rr, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let la = apply_l(&op, &scaled, rr, n).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let want = amp.powf(m - 1.0) * l1;
            prop_assert!((la - want).abs() <= 1e-10 * want.abs(), "lhs {la} vs {want}");
            let rhs = |u: &RadialProfile| -> Result<f64, TestCaseError> {
                let f = u.to_radial_function().map_err(|e| TestCaseError::fail(e.to_string()))?;
                let c = riesz_convolve_on(n, alpha, &f, p, rr, domain, &cfg)
                    .map_err(|e| TestCaseError::fail(e.to_string()))?;
                Ok(c.value * nonlocal_supersol::operators::Radial::value(u, rr).powf(q))
            };
            let (r1, ra) = (rhs(&unit)?, rhs(&scaled)?);
            let want = amp.powf(p + q) * r1;
            prop_assert!((ra - want).abs() <= 1e-10 * want.abs(), "rhs {ra} vs {want}");
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("10^4 classifier draws and 100 scaling pairs hold".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "phase diagram N=4 m=2 alpha=1", criterion_1),
        (2, "phase diagrams N=4 m=2 alpha=2,3", criterion_2),
        (3, "Riesz potential vs direct quadrature", criterion_3),
        (4, "m-Laplacian annihilates the fundamental solution", criterion_4),
        (5, "Thm2.4 certificate and slopes", criterion_5),
        (6, "Thm2.3(ii) certificate and slopes", criterion_6),
        (7, "bounded-domain certificates", criterion_7),
        (8, "Thm2.12(i) system certificate", criterion_8),
        (9, "obstruction witnesses", criterion_9),
        (10, "classifier and scaling properties", criterion_10),
    ];
    let mut failed = 0;
    for (id, title, run) in criteria {
        let t = Instant::now();
        if !report(id, title, t, run()) {
            failed += 1;
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
