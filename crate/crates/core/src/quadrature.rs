//! Globally adaptive Gauss–Kronrod (G7/K15) quadrature on finite intervals.
//!
//! Used as the independent numerical route that the closed-form Gaussian
//! overlap integrals are checked against; it knows nothing about those
//! closed forms.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

// QUADPACK 15-point Kronrod rule: positive abscissae and weights, with the
// embedded 7-point Gauss rule (odd-index nodes). Tabulated values exceed
// f64 precision; they round on parse.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            // Tie-break on the interval so heap order is deterministic.
            .then_with(|| self.a.partial_cmp(&other.a).unwrap_or(Ordering::Equal))
    }
}

fn kronrod_15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[a, b]` to the requested relative tolerance by
/// repeatedly bisecting the segment with the largest error estimate.
pub fn adaptive_quad(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> QuadResult {
    const MAX_SEGMENTS: usize = 512;
    let f: &dyn Fn(f64) -> f64 = &f;
    let mut heap = BinaryHeap::new();
    heap.push(kronrod_15(f, a, b));
    let mut subdivisions = 0usize;
    loop {
        let total: f64 = heap.iter().map(|s| s.value).sum();
        let total_err: f64 = heap.iter().map(|s| s.error).sum();
        let bound = rel_tol * total.abs().max(f64::MIN_POSITIVE);
        if total_err <= bound || heap.len() >= MAX_SEGMENTS {
            return QuadResult {
                value: total,
                error_estimate: total_err,
                subdivisions,
            };
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval no longer bisectable at f64 resolution.
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            continue;
        }
        heap.push(kronrod_15(f, worst.a, mid));
        heap.push(kronrod_15(f, mid, worst.b));
        subdivisions += 1;
    }
}
