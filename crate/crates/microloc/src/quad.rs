//! Globally adaptive Simpson quadrature: the panel with the largest error
//! estimate is split until the summed estimate meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const INITIAL_PANELS: usize = 16;
/// Evaluation budget per call. Chirp integrands never resolve near their
/// centre, but their mass there is already below any useful tolerance by
/// the time the budget matters.
const MAX_EVALS: usize = 1 << 20;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    value: f64,
    err: f64,
}

impl Panel {
    fn new(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> Self {
        let coarse = 0.5 * (b - a) * (fa + fb);
        let fine = 0.25 * (b - a) * (fa + 2.0 * fm + fb);
        let e = (fine - coarse) / 3.0;
        Self {
            a,
            b,
            fa,
            fm,
            fb,
            value: fine + e,
            err: e.abs(),
        }
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Integral of `f` over [a, b] to absolute tolerance `tol`. Points in
/// `splits` that fall inside the interval become panel boundaries, so
/// kinks and oscillation centres never sit inside a panel.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, splits: &[f64]) -> f64 {
    if a == b {
        return 0.0;
    }
    if a > b {
        return -integrate(f, b, a, tol, splits);
    }
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = splits.iter().copied().filter(|&s| s > a && s < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.extend(inner);
    cuts.push(b);
    let mut heap = BinaryHeap::new();
    let mut finished = Vec::new();
    let mut evals = 0;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = (hi - lo) / INITIAL_PANELS as f64;
        let mut x0 = lo;
        let mut f0 = f(x0);
        for k in 0..INITIAL_PANELS {
            let x1 = if k + 1 == INITIAL_PANELS { hi } else { lo + (k + 1) as f64 * h };
            let (fm, f1) = (f(0.5 * (x0 + x1)), f(x1));
            heap.push(Panel::new(x0, x1, f0, fm, f1));
            evals += 2;
            x0 = x1;
            f0 = f1;
        }
    }
    let mut total_err: f64 = heap.iter().map(|p| p.err).sum();
    let mut steps = 0usize;
    while total_err > tol && evals < MAX_EVALS {
        let Some(p) = heap.pop() else { break };
        let m = 0.5 * (p.a + p.b);
        let (ql, qr) = (0.5 * (p.a + m), 0.5 * (m + p.b));
        if !(ql > p.a && ql < m && qr > m && qr < p.b) {
            total_err -= p.err;
            finished.push(p);
            continue;
        }
        let left = Panel::new(p.a, m, p.fa, f(ql), p.fm);
        let right = Panel::new(m, p.b, p.fm, f(qr), p.fb);
        evals += 2;
        total_err += left.err + right.err - p.err;
        heap.push(left);
        heap.push(right);
        steps += 1;
        if steps % 4096 == 0 {
            total_err = heap.iter().map(|q| q.err).sum();
        }
    }
    heap.iter().chain(&finished).map(|p| p.value).sum()
}
