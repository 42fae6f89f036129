//! Existence / nonexistence verdicts for a few parameter points, with
//! exact rational comparisons on the borderlines.

use nonlocal_supersol::classifier::{
    classify_single, classify_system, Exact, OperatorClass, ProblemDomain, ProblemParams, SystemParams,
};
use nonlocal_supersol::verifier::SystemShape;

fn q(s: &str) -> Exact {
    s.parse().expect("literal")
}

fn main() -> nonlocal_supersol::Result<()> {
    let points = [
        ("4", "2", "1", "2", "1", "exterior"),
        ("4", "2", "1", "1/2", "1", "exterior"),
        ("4", "2", "1", "2/5", "1", "rn"),
        ("3", "2", "1", "1", "1", "bounded"),
    ];
    for (n, m, alpha, p, qq, dom) in points {
        let domain = match dom {
            "exterior" => ProblemDomain::Exterior,
            "rn" => ProblemDomain::WholeSpace,
            _ => ProblemDomain::Bounded { radius: 1.0 },
        };
        let params = ProblemParams {
            n: n.parse().unwrap(),
            m: q(m),
            alpha: q(alpha),
            p: q(p),
            q: q(qq),
            domain,
            class: OperatorClass::m_laplace(),
        };
        let v = classify_single(&params)?;
        println!("N={n} m={m} alpha={alpha} p={p} q={qq} {dom:<8} -> {:?} {:?}", v.status, v.tags);
        for note in &v.notes {
            println!("    note: {note}");
        }
    }

    let sys = SystemParams {
        n: 5,
        m1: q("2"),
        m2: q("2"),
        alpha: q("3/2"),
        beta: q("3/2"),
        p: q("3/2"),
        q: q("3/2"),
        r: q("3/2"),
        s: q("3/2"),
        shape: SystemShape::Sys1,
        class_a: OperatorClass::m_laplace(),
        class_b: OperatorClass::m_laplace(),
    };
    let v = classify_system(&sys)?;
    println!("system Sys1, N=5, all exponents 3/2 -> {:?} {:?}", v.status, v.tags);
    Ok(())
}
