//! `(p, q)` phase diagrams: lattice classification plus the analytic
//! boundary lines, written as CSV and SVG.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{classify_single, regime, ProblemDomain, ProblemParams, Regime, Scalar, Status, Verdict};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RegionCell<S> {
    pub p: S,
    pub q: S,
    pub verdict: Verdict,
}

/// Cells in row-major order: `q` outer (ascending), `p` inner (ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid<S> {
    pub p_range: (f64, f64),
    pub q_range: (f64, f64),
    pub res_p: usize,
    pub res_q: usize,
    pub cells: Vec<RegionCell<S>>,
}

impl<S> RegionGrid<S> {
    pub fn cell(&self, ip: usize, iq: usize) -> &RegionCell<S> {
        &self.cells[iq * self.res_p + ip]
    }
}

/// `lo + (2i + 1)(hi - lo) / (2 res)`: the centre of cell `i`.
fn centre<S: Scalar>(lo: &S, hi: &S, i: usize, res: usize) -> S {
    let w = hi.sub(lo).mul(&S::from_int(2 * i as i64 + 1));
    lo.add(&w.div(&S::from_int(2 * res as i64)).expect("res > 0"))
}

/// Classifies the centre of every cell of a `res_p x res_q` partition of
/// `p_range x q_range`, with the other parameters taken from `base`.
pub fn region_grid<S: Scalar>(
    base: &ProblemParams<S>,
    p_range: (S, S),
    q_range: (S, S),
    res_p: usize,
    res_q: usize,
) -> Result<RegionGrid<S>> {
    if res_p < 2 || res_q < 2 {
        return Err(Error::domain(format!("resolution must be at least 2 per axis, got {res_p} x {res_q}")));
    }
    if !p_range.0.lt(&p_range.1) || !q_range.0.lt(&q_range.1) {
        return Err(Error::domain("ranges must satisfy lo < hi"));
    }
    if !p_range.0.ge(&S::from_int(0)) {
        return Err(Error::domain("p range must lie in p >= 0"));
    }
    let cells = (0..res_p * res_q)
        .into_par_iter()
        .map(|k| {
            let (ip, iq) = (k % res_p, k / res_p);
            let p = centre(&p_range.0, &p_range.1, ip, res_p);
            let q = centre(&q_range.0, &q_range.1, iq, res_q);
            let params = ProblemParams { p: p.clone(), q: q.clone(), ..base.clone() };
            classify_single(&params).map(|verdict| RegionCell { p, q, verdict })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionGrid {
        p_range: (p_range.0.to_f64(), p_range.1.to_f64()),
        q_range: (q_range.0.to_f64(), q_range.1.to_f64()),
        res_p,
        res_q,
        cells,
    })
}

/// A boundary line `a p + b q = c`, clipped to the plotting window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLine {
    pub label: String,
    pub coeffs: (f64, f64, f64),
    pub from: (f64, f64),
    pub to: (f64, f64),
}

fn clip(label: String, (a, b, c): (f64, f64, f64), pr: (f64, f64), qr: (f64, f64)) -> Option<BoundaryLine> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let inside = |x: f64, lo: f64, hi: f64| x >= lo - 1e-12 && x <= hi + 1e-12;
    if b != 0.0 {
        for p in [pr.0, pr.1] {
            let q = (c - a * p) / b;
            if inside(q, qr.0, qr.1) {
                pts.push((p, q));
            }
        }
    }
    if a != 0.0 {
        for q in [qr.0, qr.1] {
            let p = (c - b * q) / a;
            if inside(p, pr.0, pr.1) {
                pts.push((p, q));
            }
        }
    }
    pts.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    pts.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12);
    let (from, to) = (*pts.first()?, *pts.last()?);
    (from != to).then_some(BoundaryLine { label, coeffs: (a, b, c), from, to })
}

/// The closed-form lines that separate the verdicts for `base` (with `p`,
/// `q` free), clipped to the window.
pub fn boundary_lines<S: Scalar>(
    base: &ProblemParams<S>,
    p_range: (f64, f64),
    q_range: (f64, f64),
) -> Vec<BoundaryLine> {
    let class = base.class.normalized();
    let n = base.n as f64;
    let m = base.m.to_f64();
    let alpha = base.alpha.to_f64();
    let m1 = m - 1.0;
    let mut raw: Vec<(String, (f64, f64, f64))> = Vec::new();
    let critical = ("q = m-1-(N-alpha-m)p/N".to_string(), ((n - alpha - m) / n, 1.0, m1));
    if let ProblemDomain::Bounded { .. } = base.domain {
        raw.push(("p + q = m-1".into(), (1.0, 1.0, m1)));
    } else if n > m && class.hm && class.upper {
        let a1 = alpha * m1 / (n - m);
        let a2 = (n + alpha) * m1 / (n - m);
        match regime(base.n, &base.m, &base.alpha) {
            Regime::A => {
                raw.push((format!("p = {a1}"), (1.0, 0.0, a1)));
                raw.push((format!("p + q = {a2}"), (1.0, 1.0, a2)));
                raw.push(critical);
            }
            Regime::B => {
                raw.push((format!("p = {a1}"), (1.0, 0.0, a1)));
                raw.push((format!("q = {a1}"), (0.0, 1.0, a1)));
                raw.push((format!("p + q = {a2}"), (1.0, 1.0, a2)));
            }
            Regime::C => {
                let a3 = (2.0 * n - m) * m1 / (n - m);
                raw.push((format!("p = {m1}"), (1.0, 0.0, m1)));
                raw.push((format!("q = {m1}"), (0.0, 1.0, m1)));
                raw.push((format!("p + q = {a3}"), (1.0, 1.0, a3)));
            }
        }
    } else if n > m && class.wmc {
        raw.push(critical);
        raw.push(("p + q = m-1".into(), (1.0, 1.0, m1)));
    }
    raw.into_iter().filter_map(|(l, c)| clip(l, c, p_range, q_range)).collect()
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Existence => "Existence",
        Status::Nonexistence => "Nonexistence",
        Status::Unknown => "Unknown",
    }
}

/// Columns `p,q,status,tags`; tags are `;`-separated.
pub fn to_csv<S: Scalar>(grid: &RegionGrid<S>) -> String {
    let mut out = String::from("p,q,status,tags\n");
    for c in &grid.cells {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            c.p.to_f64(),
            c.q.to_f64(),
            status_name(c.verdict.status),
            c.verdict.tags.join(";")
        );
    }
    out
}

/// Nonexistence shaded, existence white, unknown hatched; boundary lines on top.
pub fn to_svg<S: Scalar>(grid: &RegionGrid<S>, lines: &[BoundaryLine], title: &str) -> String {
    const SIZE: f64 = 560.0;
    const PAD: f64 = 50.0;
    let (p0, p1) = grid.p_range;
    let (q0, q1) = grid.q_range;
    let x = |p: f64| PAD + (p - p0) / (p1 - p0) * SIZE;
    let y = |q: f64| PAD + (q1 - q) / (q1 - q0) * SIZE;
    let (cw, ch) = (SIZE / grid.res_p as f64, SIZE / grid.res_q as f64);
    let total = SIZE + 2.0 * PAD;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    s.push_str(concat!(
        r#"<defs><pattern id="hatch" width="6" height="6" patternUnits="userSpaceOnUse" patternTransform="rotate(45)">"#,
        r##"<line x1="0" y1="0" x2="0" y2="6" stroke="#888" stroke-width="1"/></pattern></defs>"##,
        "\n"
    ));
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        total / 2.0,
        escape(title)
    );
    for iq in 0..grid.res_q {
        for ip in 0..grid.res_p {
            let fill = match grid.cell(ip, iq).verdict.status {
                Status::Nonexistence => "#b0b0b0",
                Status::Existence => "#ffffff",
                Status::Unknown => "url(#hatch)",
            };
            let _ = writeln!(
                s,
                r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{fill}" stroke="none"/>"#,
                PAD + ip as f64 * cw,
                PAD + SIZE - (iq + 1) as f64 * ch,
                cw + 0.01,
                ch + 0.01
            );
        }
    }
    let _ = writeln!(s, r#"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#);
    for l in lines {
        let _ = writeln!(
            s,
            r#"<polyline points="{:.3},{:.3} {:.3},{:.3}" fill="none" stroke="black" stroke-width="1.5"><title>{}</title></polyline>"#,
            x(l.from.0),
            y(l.from.1),
            x(l.to.0),
            y(l.to.1),
            escape(&l.label)
        );
    }
    if q0 < 0.0 && q1 > 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{PAD}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#555" stroke-dasharray="4 3"/>"##,
            y(0.0),
            PAD + SIZE,
            y(0.0)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif">p</text>"#,
        PAD + SIZE / 2.0,
        total - 12.0
    );
    let _ =
        writeln!(s, r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif">q</text>"#, PAD + SIZE / 2.0);
    for (v, anchor_x, anchor_y) in [(p0, x(p0), total - 32.0), (p1, x(p1), total - 32.0)] {
        let _ = writeln!(
            s,
            r#"<text x="{anchor_x:.1}" y="{anchor_y:.1}" text-anchor="middle" font-family="sans-serif" font-size="11">{v}</text>"#
        );
    }
    for v in [q0, q1] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-family="sans-serif" font-size="11">{v}</text>"#,
            PAD - 4.0,
            y(v) + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
