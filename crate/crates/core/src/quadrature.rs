//! Adaptive Gauss-Kronrod (7/15) quadrature over a list of segments sharing a
//! single error budget, with optional power-law substitutions toward an
//! endpoint carrying an algebraic singularity.
//!
//! Error estimates use the raw Kronrod-Gauss difference, which is an honest
//! (usually pessimistic) bound for the 15-point result on smooth pieces.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_subdivisions: usize) -> Self {
        Self { abs, rel, max_subdivisions }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn zero() -> Self {
        Self { value: 0.0, error: 0.0, evaluations: 0, subdivisions: 0, converged: true }
    }
}

/// How a segment is mapped onto the unit interval before integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grading {
    Uniform,
    /// x = a + (b - a) u^k, clustering nodes toward `a`.
    TowardStart(f64),
    /// x = b - (b - a) u^k, clustering nodes toward `b`.
    TowardEnd(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: f64,
    pub b: f64,
    pub grading: Grading,
}

impl Segment {
    pub fn uniform(a: f64, b: f64) -> Self {
        Self { a, b, grading: Grading::Uniform }
    }

    pub fn toward_start(a: f64, b: f64, power: f64) -> Self {
        Self { a, b, grading: grading_for(power, true) }
    }

    pub fn toward_end(a: f64, b: f64, power: f64) -> Self {
        Self { a, b, grading: grading_for(power, false) }
    }

    /// Returns `(x, offset, jacobian)` where `offset` is `x` measured from the
    /// graded endpoint (from `a` for uniform segments), free of cancellation.
    #[inline]
    fn map(&self, u: f64) -> (f64, f64, f64) {
        let w = self.b - self.a;
        match self.grading {
            Grading::Uniform => (self.a + w * u, w * u, w),
            Grading::TowardStart(k) => {
                let h = w * u.powf(k);
                (self.a + h, h, w * k * u.powf(k - 1.0))
            }
            Grading::TowardEnd(k) => {
                let h = w * u.powf(k);
                (self.b - h, -h, w * k * u.powf(k - 1.0))
            }
        }
    }
}

fn grading_for(power: f64, start: bool) -> Grading {
    // A power of 1 keeps the segment linear but still anchors offsets.
    let k = power.max(1.0);
    if start {
        Grading::TowardStart(k)
    } else {
        Grading::TowardEnd(k)
    }
}

struct Piece {
    seg: usize,
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties broken by position for determinism.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seg.cmp(&self.seg))
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn kronrod<F: Fn(f64, f64) -> f64>(f: &F, seg: &Segment, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let eval = |u: f64| {
        let (x, off, jac) = seg.map(u);
        if jac == 0.0 {
            0.0
        } else {
            f(x, off) * jac
        }
    };
    let fc = eval(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = eval(c - dx) + eval(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).abs())
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Integrates `f` over every segment with one global error budget.
///
/// Non-finite integrand values poison the result (`value` becomes NaN and
/// `converged` is false) rather than being silently dropped.
pub fn integrate_segments<F: Fn(f64) -> f64>(f: F, segments: &[Segment], tol: Tolerance) -> QuadResult {
    integrate_segments_offset(|x, _| f(x), segments, tol)
}

/// Like [`integrate_segments`], but the integrand also receives the offset of
/// the node from the segment's graded endpoint, so singular factors such as
/// `|x - a|^(-s)` can be formed without cancellation.
pub fn integrate_segments_offset<F: Fn(f64, f64) -> f64>(f: F, segments: &[Segment], tol: Tolerance) -> QuadResult {
    let segments: Vec<Segment> = segments.iter().copied().filter(|s| s.b > s.a).collect();
    if segments.is_empty() {
        return QuadResult::zero();
    }
    let mut heap = BinaryHeap::with_capacity(segments.len() * 4);
    let mut done: Vec<Piece> = Vec::new();
    let mut evaluations = 0usize;
    for (i, seg) in segments.iter().enumerate() {
        let (v, e) = kronrod(&f, seg, 0.0, 1.0);
        evaluations += 15;
        heap.push(Piece { seg: i, lo: 0.0, hi: 1.0, value: v, error: e });
    }
    let mut subdivisions = heap.len();
    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    let mut err: f64 = heap.iter().map(|p| p.error).sum();
    let mut converged = true;
    loop {
        if !total.is_finite() || !err.is_finite() {
            converged = false;
            break;
        }
        if err <= tol.target(total) {
            break;
        }
        if subdivisions >= tol.max_subdivisions {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) || (worst.hi - worst.lo) < 1e-14 {
            // Cannot split further; its error stays in the budget.
            done.push(worst);
            if heap.is_empty() {
                converged = err <= tol.target(total);
                break;
            }
            continue;
        }
        let seg = &segments[worst.seg];
        let (v1, e1) = kronrod(&f, seg, worst.lo, mid);
        let (v2, e2) = kronrod(&f, seg, mid, worst.hi);
        evaluations += 30;
        subdivisions += 1;
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        heap.push(Piece { seg: worst.seg, lo: worst.lo, hi: mid, value: v1, error: e1 });
        heap.push(Piece { seg: worst.seg, lo: mid, hi: worst.hi, value: v2, error: e2 });
    }
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.extend(done);
    pieces.sort_by(|x, y| x.seg.cmp(&y.seg).then(x.lo.total_cmp(&y.lo)));
    let value = compensated_sum(pieces.iter().map(|p| p.value));
    let error = compensated_sum(pieces.iter().map(|p| p.error));
    if !value.is_finite() {
        converged = false;
    }
    QuadResult { value, error, evaluations, subdivisions, converged }
}

/// Adaptive integration of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> QuadResult {
    if b < a {
        let r = integrate(f, b, a, tol);
        return QuadResult { value: -r.value, ..r };
    }
    integrate_segments(f, &[Segment::uniform(a, b)], tol)
}

/// Breaks `[a, b]` at the given interior points (out-of-range points are
/// ignored) and integrates adaptively with a shared budget.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: Tolerance) -> QuadResult {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let segs: Vec<Segment> = pts.windows(2).map(|w| Segment::uniform(w[0], w[1])).collect();
    integrate_segments(f, &segs, tol)
}
