//! Adaptive composite Simpson quadrature in one and two dimensions.
//!
//! Both integrators start from the panels defined by the breakpoints of the
//! domain. Every panel carries a Richardson error estimate `|S(h/2) - S(h)| / 15`
//! and the panel with the largest estimate is bisected until the total meets
//! `max(abs_tol, rel_tol·|value|)`. The 2-D rule is the tensor Simpson rule on
//! rectangles, refined into quadrants.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances, refinement depth and integration domain.
///
/// Each entry of `domain` holds the sorted breakpoints of one dimension: the
/// first and last entries bound the interval and interior entries seed the
/// initial panels (use them to mark kinks, peaks or scale changes).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_refinements: u32,
    pub domain: Vec<Vec<f64>>,
}

impl QuadratureSpec {
    pub fn new(domain: Vec<Vec<f64>>) -> Self {
        QuadratureSpec { abs_tol: 1e-10, rel_tol: 1e-10, max_refinements: 40, domain }
    }

    pub fn interval(a: f64, b: f64) -> Self {
        Self::new(vec![vec![a, b]])
    }

    pub fn rectangle(x: (f64, f64), y: (f64, f64)) -> Self {
        Self::new(vec![vec![x.0, x.1], vec![y.0, y.1]])
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_refinements(mut self, max_refinements: u32) -> Self {
        self.max_refinements = max_refinements;
        self
    }

    /// Same tolerances on a different domain.
    pub fn with_domain(&self, domain: Vec<Vec<f64>>) -> Self {
        QuadratureSpec { domain, ..self.clone() }
    }

    /// Checks the invariants and returns the domain breakpoints cleaned of
    /// duplicates.
    pub fn validate(&self, dims: usize) -> Result<Vec<Vec<f64>>> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::invalid("quadrature tolerances must be positive"));
        }
        if self.max_refinements < 1 {
            return Err(Error::invalid("max_refinements must be at least 1"));
        }
        if self.domain.len() != dims {
            return Err(Error::invalid(format!(
                "expected a {dims}-dimensional domain, got {}",
                self.domain.len()
            )));
        }
        self.domain
            .iter()
            .map(|bps| {
                let mut v = bps.clone();
                if v.len() < 2 || v.iter().any(|b| !b.is_finite()) {
                    return Err(Error::invalid("domain bounds must be finite with at least two breakpoints"));
                }
                if v.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::invalid("domain breakpoints must be sorted"));
                }
                v.dedup();
                if v.len() < 2 {
                    return Err(Error::invalid("domain lower bound must be below the upper bound"));
                }
                Ok(v)
            })
            .collect()
    }
}

/// An integral estimate with its accumulated error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Hard ceiling on integrand evaluations per call.
const MAX_EVALUATIONS: usize = 20_000_000;

/// Heap entry ordered by error estimate (largest first).
struct Ranked<P> {
    error: f64,
    panel: P,
}

impl<P> PartialEq for Ranked<P> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}
impl<P> Eq for Ranked<P> {}
impl<P> PartialOrd for Ranked<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<P> Ord for Ranked<P> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Something that knows its refined estimate and can split itself.
trait Refinable: Sized {
    fn estimate(&self) -> f64;
    fn error(&self) -> f64;
    fn depth(&self) -> u32;
}

/// Global adaptive driver: bisect the worst panel until the summed error
/// estimate meets the tolerance.
fn refine_globally<P: Refinable>(
    panels: Vec<P>,
    spec: &QuadratureSpec,
    evaluations: &mut usize,
    mut split: impl FnMut(P, &mut usize) -> Result<Vec<P>>,
) -> Result<Integral> {
    let mut heap: BinaryHeap<Ranked<P>> = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for p in panels {
        value += p.estimate();
        error += p.error();
        heap.push(Ranked { error: p.error(), panel: p });
    }
    // Panels at the depth cap are frozen; their error still counts.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut capped = false;
    loop {
        let target = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= target {
            break;
        }
        let Some(Ranked { panel, .. }) = heap.pop() else { break };
        if panel.depth() + 1 >= spec.max_refinements || *evaluations >= MAX_EVALUATIONS {
            capped = true;
            frozen_value += panel.estimate();
            frozen_error += panel.error();
            continue;
        }
        value -= panel.estimate();
        error -= panel.error();
        for child in split(panel, evaluations)? {
            value += child.estimate();
            error += child.error();
            heap.push(Ranked { error: child.error(), panel: child });
        }
    }
    // Re-sum to shed drift from the running updates.
    let live_value: f64 = heap.iter().map(|r| r.panel.estimate()).sum();
    let live_error: f64 = heap.iter().map(|r| r.panel.error()).sum();
    let value = live_value + frozen_value;
    let error = live_error + frozen_error;
    let target = spec.abs_tol.max(spec.rel_tol * value.abs());
    if capped && error > target {
        return Err(Error::Quadrature { estimate: value, error_bound: error });
    }
    Ok(Integral { value, error, evaluations: *evaluations })
}

/// A 1-D panel with function values at the five equispaced nodes.
struct Panel1 {
    a: f64,
    b: f64,
    f: [f64; 5],
    estimate: f64,
    error: f64,
    depth: u32,
}

impl Panel1 {
    fn new(a: f64, b: f64, f: [f64; 5], depth: u32) -> Result<Self> {
        let h = b - a;
        let whole = h / 6.0 * (f[0] + 4.0 * f[2] + f[4]);
        let fine = h / 12.0 * (f[0] + 4.0 * f[1] + 2.0 * f[2] + 4.0 * f[3] + f[4]);
        let delta = fine - whole;
        if !delta.is_finite() {
            return Err(Error::invalid(format!("integrand is not finite on [{a}, {b}]")));
        }
        Ok(Panel1 { a, b, f, estimate: fine + delta / 15.0, error: delta.abs() / 15.0, depth })
    }
}

impl Refinable for Panel1 {
    fn estimate(&self) -> f64 {
        self.estimate
    }
    fn error(&self) -> f64 {
        self.error
    }
    fn depth(&self) -> u32 {
        self.depth
    }
}

/// Integrates `f` over the (single) dimension of `spec.domain`.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<Integral> {
    let bps = spec.validate(1)?.remove(0);
    let mut evaluations = 0usize;
    let mut panels = Vec::with_capacity(bps.len());
    let mut left = f(bps[0]);
    evaluations += 1;
    for w in bps.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = 0.25 * (b - a);
        let vals = [left, f(a + h), f(a + 2.0 * h), f(a + 3.0 * h), f(b)];
        evaluations += 4;
        left = vals[4];
        panels.push(Panel1::new(a, b, vals, 0)?);
    }
    refine_globally(panels, spec, &mut evaluations, |p, evals| {
        let m = 0.5 * (p.a + p.b);
        let q = 0.125 * (p.b - p.a);
        let l = [p.f[0], f(p.a + q), p.f[1], f(p.a + 3.0 * q), p.f[2]];
        let r = [p.f[2], f(m + q), p.f[3], f(m + 3.0 * q), p.f[4]];
        *evals += 4;
        Ok(vec![Panel1::new(p.a, m, l, p.depth + 1)?, Panel1::new(m, p.b, r, p.depth + 1)?])
    })
}

/// A rectangle with function values on its 5×5 grid (row index = y).
struct Panel2 {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    g: [[f64; 5]; 5],
    estimate: f64,
    error: f64,
    depth: u32,
}

const SIMPSON_W: [f64; 3] = [1.0, 4.0, 1.0];

impl Panel2 {
    fn new(x0: f64, x1: f64, y0: f64, y1: f64, g: [[f64; 5]; 5], depth: u32) -> Result<Self> {
        let area = (x1 - x0) * (y1 - y0);
        let mut whole = 0.0;
        for j in 0..3 {
            for i in 0..3 {
                whole += SIMPSON_W[j] * SIMPSON_W[i] * g[2 * j][2 * i];
            }
        }
        whole *= area / 36.0;
        let mut fine = 0.0;
        for (qj, qi) in [(0, 0), (0, 2), (2, 0), (2, 2)] {
            for j in 0..3 {
                for i in 0..3 {
                    fine += SIMPSON_W[j] * SIMPSON_W[i] * g[qj + j][qi + i];
                }
            }
        }
        fine *= area / 144.0;
        let delta = fine - whole;
        if !delta.is_finite() {
            return Err(Error::invalid(format!(
                "integrand is not finite on [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Panel2 { x0, x1, y0, y1, g, estimate: fine + delta / 15.0, error: delta.abs() / 15.0, depth })
    }
}

impl Refinable for Panel2 {
    fn estimate(&self) -> f64 {
        self.estimate
    }
    fn error(&self) -> f64 {
        self.error
    }
    fn depth(&self) -> u32 {
        self.depth
    }
}

/// Integrates `f(x, y)` over the rectangle (tiled by breakpoints) in `spec.domain`.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(f: F, spec: &QuadratureSpec) -> Result<Integral> {
    let mut dom = spec.validate(2)?;
    let ybps = dom.pop().expect("two dims");
    let xbps = dom.pop().expect("two dims");
    let mut evaluations = 0usize;
    let mut panels = Vec::with_capacity((xbps.len() - 1) * (ybps.len() - 1));
    for yw in ybps.windows(2) {
        for xw in xbps.windows(2) {
            let (x0, x1, y0, y1) = (xw[0], xw[1], yw[0], yw[1]);
            let (hx, hy) = (0.25 * (x1 - x0), 0.25 * (y1 - y0));
            let mut g = [[0.0; 5]; 5];
            for (j, row) in g.iter_mut().enumerate() {
                for (i, v) in row.iter_mut().enumerate() {
                    *v = f(x0 + hx * i as f64, y0 + hy * j as f64);
                }
            }
            evaluations += 25;
            panels.push(Panel2::new(x0, x1, y0, y1, g, 0)?);
        }
    }
    refine_globally(panels, spec, &mut evaluations, |p, evals| {
        let (hx, hy) = (0.125 * (p.x1 - p.x0), 0.125 * (p.y1 - p.y0));
        let mut children = Vec::with_capacity(4);
        for (qj, qi) in [(0usize, 0usize), (0, 2), (2, 0), (2, 2)] {
            let x0 = p.x0 + 2.0 * hx * qi as f64;
            let y0 = p.y0 + 2.0 * hy * qj as f64;
            let mut g = [[0.0; 5]; 5];
            for (j, row) in g.iter_mut().enumerate() {
                for (i, v) in row.iter_mut().enumerate() {
                    *v = if i % 2 == 0 && j % 2 == 0 {
                        p.g[qj + j / 2][qi + i / 2]
                    } else {
                        *evals += 1;
                        f(x0 + hx * i as f64, y0 + hy * j as f64)
                    };
                }
            }
            children.push(Panel2::new(x0, x0 + 4.0 * hx, y0, y0 + 4.0 * hy, g, p.depth + 1)?);
        }
        Ok(children)
    })
}
