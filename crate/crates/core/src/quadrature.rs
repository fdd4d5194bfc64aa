//! Composite 16-point Gauss–Legendre quadrature with optional endpoint power
//! weights `(b−x)^σ` and `(x−a)^σ`.
//!
//! Gauss nodes are interior, so an integrand is never sampled at an interval
//! endpoint. Two refinement strategies are available: uniform panel doubling
//! and largest-error-first bisection. Both estimate error as the difference
//! between two successive refinement levels. Bisection is the default.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::function_model::{FunctionSpec, Interval};

pub const NODES_PER_PANEL: usize = 16;
pub const DEFAULT_TOL: f64 = 1e-10;

/// Endpoint weight multiplying the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "exponent", rename_all = "snake_case")]
pub enum WeightKind {
    None,
    /// `(b − x)^exponent`
    LeftPower(f64),
    /// `(x − a)^exponent`
    RightPower(f64),
}

impl WeightKind {
    fn validate(&self) -> Result<()> {
        match *self {
            WeightKind::None => Ok(()),
            WeightKind::LeftPower(e) | WeightKind::RightPower(e) => {
                if e > 0.0 && e <= 1.0 {
                    Ok(())
                } else {
                    Err(domain(
                        "integrate",
                        format!("weight exponent must lie in (0, 1], got {e}"),
                    ))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub panels: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refinement {
    /// Bisect the panel with the largest two-level difference until the
    /// differences sum to at most the tolerance.
    Adaptive,
    /// Double every panel until the global two-level difference is below tolerance.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub initial_panels: usize,
    pub max_panels: usize,
    pub refinement: Refinement,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            initial_panels: 4,
            max_panels: 1 << 14,
            refinement: Refinement::Adaptive,
        }
    }
}

struct GaussRule {
    nodes: [f64; NODES_PER_PANEL],
    weights: [f64; NODES_PER_PANEL],
}

/// Legendre P_n and its derivative at x.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

fn gauss_rule() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NODES_PER_PANEL;
        let mut nodes = [0.0; NODES_PER_PANEL];
        let mut weights = [0.0; NODES_PER_PANEL];
        for i in 0..n {
            let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let step = p / dp;
                x -= step;
                if step.abs() < 1e-17 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussRule { nodes, weights }
    })
}

fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

struct Integrand<'a, F> {
    f: &'a F,
    interval: Interval,
    weight: WeightKind,
}

impl<F: Fn(f64) -> f64> Integrand<'_, F> {
    /// Gauss sum on `[lo, hi]`. Weight distances are measured from the panel
    /// edge so they stay accurate in tiny panels next to the endpoint.
    fn panel(&self, lo: f64, hi: f64) -> f64 {
        let rule = gauss_rule();
        let half = 0.5 * (hi - lo);
        let center = lo + half;
        let (a, b) = (self.interval.a(), self.interval.b());
        let mut acc = 0.0;
        for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
            let x = center + half * xi;
            let weight = match self.weight {
                WeightKind::None => 1.0,
                WeightKind::LeftPower(e) => ((b - hi) + half * (1.0 - xi)).powf(e),
                WeightKind::RightPower(e) => ((lo - a) + half * (1.0 + xi)).powf(e),
            };
            acc += w * weight * (self.f)(x);
        }
        acc * half
    }
}

fn panel_bounds(interval: &Interval, count: usize) -> Vec<(f64, f64)> {
    let (a, b) = (interval.a(), interval.b());
    let h = (b - a) / count as f64;
    (0..count)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == count {
                b
            } else {
                a + h * (i + 1) as f64
            };
            (lo, hi)
        })
        .collect()
}

/// Uniform panels further cut at every break point strictly inside the interval.
fn split_bounds(interval: &Interval, count: usize, breaks: &[f64]) -> Vec<(f64, f64)> {
    let mut edges: Vec<f64> = panel_bounds(interval, count).iter().map(|p| p.0).collect();
    edges.extend(
        breaks
            .iter()
            .copied()
            .filter(|&x| x > interval.a() && x < interval.b()),
    );
    edges.push(interval.b());
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `∫_a^b w(x) f(x) dx` with the default options.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    interval: &Interval,
    weight: WeightKind,
    tol: f64,
) -> Result<QuadratureEstimate> {
    integrate_with(f, interval, weight, tol, &QuadratureOptions::default())
}

pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    interval: &Interval,
    weight: WeightKind,
    tol: f64,
    options: &QuadratureOptions,
) -> Result<QuadratureEstimate> {
    match options.refinement {
        Refinement::Adaptive => adaptive(&f, interval, weight, tol, &[], options),
        Refinement::Uniform => {
            uniform_levels(&f, interval, weight, tol, options).map(|(est, _)| est)
        }
    }
}

fn check_inputs(weight: WeightKind, tol: f64, options: &QuadratureOptions) -> Result<()> {
    weight.validate()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(domain(
            "integrate",
            format!("tolerance must be positive, got {tol}"),
        ));
    }
    if options.initial_panels == 0 || options.max_panels < options.initial_panels {
        return Err(Error::Config(format!(
            "panel counts must satisfy 0 < initial ({}) <= max ({})",
            options.initial_panels, options.max_panels
        )));
    }
    Ok(())
}

/// Uniform panel doubling. Returns the estimate together with the two-level
/// difference recorded at each doubling.
pub fn uniform_levels<F: Fn(f64) -> f64>(
    f: &F,
    interval: &Interval,
    weight: WeightKind,
    tol: f64,
    options: &QuadratureOptions,
) -> Result<(QuadratureEstimate, Vec<f64>)> {
    check_inputs(weight, tol, options)?;
    let integrand = Integrand {
        f,
        interval: *interval,
        weight,
    };
    let level = |count: usize| {
        let sums: Vec<f64> = panel_bounds(interval, count)
            .into_iter()
            .map(|(lo, hi)| integrand.panel(lo, hi))
            .collect();
        pairwise_sum(&sums)
    };
    let mut count = options.initial_panels;
    let mut previous = level(count);
    let mut history = Vec::new();
    loop {
        if count * 2 > options.max_panels {
            let error_estimate = history.last().copied().unwrap_or(f64::INFINITY);
            let estimate = QuadratureEstimate {
                value: previous,
                error_estimate,
                panels: count,
                converged: error_estimate <= tol,
            };
            return Ok((estimate, history));
        }
        count *= 2;
        let current = level(count);
        let diff = (current - previous).abs();
        history.push(diff);
        previous = current;
        if diff <= tol {
            let estimate = QuadratureEstimate {
                value: current,
                error_estimate: diff,
                panels: count,
                converged: true,
            };
            return Ok((estimate, history));
        }
    }
}

/// A leaf of the bisection tree: its Gauss sum, the sum over its two
/// halves, and their difference as the error of the refined value.
struct Panel {
    lo: f64,
    hi: f64,
    left: f64,
    right: f64,
    error: f64,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(integrand: &Integrand<'_, F>, lo: f64, hi: f64, coarse: f64) -> Self {
        let mid = 0.5 * (lo + hi);
        let left = integrand.panel(lo, mid);
        let right = integrand.panel(mid, hi);
        Panel {
            lo,
            hi,
            left,
            right,
            error: (left + right - coarse).abs(),
        }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // largest error first, ties broken by position for a deterministic order
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Repeatedly bisects the panel with the largest two-level difference until
/// the differences sum to at most `tol`, or the panel cap is reached.
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    interval: &Interval,
    weight: WeightKind,
    tol: f64,
    breaks: &[f64],
    options: &QuadratureOptions,
) -> Result<QuadratureEstimate> {
    check_inputs(weight, tol, options)?;
    let integrand = Integrand {
        f,
        interval: *interval,
        weight,
    };
    let min_width = interval.width() * 1e-15;

    let mut heap: BinaryHeap<Panel> = split_bounds(interval, options.initial_panels, breaks)
        .into_iter()
        .map(|(lo, hi)| Panel::new(&integrand, lo, hi, integrand.panel(lo, hi)))
        .collect();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut total: f64 = heap.iter().map(|p| p.error).sum();

    // every leaf holds two Gauss panels
    while total > tol && 2 * (heap.len() + frozen.len() + 1) <= options.max_panels {
        let Some(worst) = heap.pop() else { break };
        if worst.hi - worst.lo <= min_width {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = Panel::new(&integrand, worst.lo, mid, worst.left);
        let right = Panel::new(&integrand, mid, worst.hi, worst.right);
        total += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    let mut leaves: Vec<Panel> = heap.into_vec();
    leaves.append(&mut frozen);
    leaves.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let values: Vec<f64> = leaves.iter().map(Panel::value).collect();
    let errors: Vec<f64> = leaves.iter().map(|p| p.error).collect();
    let error_estimate = pairwise_sum(&errors);
    Ok(QuadratureEstimate {
        value: pairwise_sum(&values),
        error_estimate,
        panels: 2 * leaves.len(),
        converged: error_estimate <= tol,
    })
}

/// Adaptive integration whose initial panels are also cut at `breaks`, the
/// points where the integrand is known to lose smoothness.
pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    interval: &Interval,
    weight: WeightKind,
    tol: f64,
    breaks: &[f64],
) -> Result<QuadratureEstimate> {
    adaptive(
        &f,
        interval,
        weight,
        tol,
        breaks,
        &QuadratureOptions::default(),
    )
}

/// `∫_a^b w(x) f(x) dx` for a function spec.
pub fn integrate_spec(
    f: &FunctionSpec,
    interval: &Interval,
    weight: WeightKind,
    tol: f64,
) -> Result<QuadratureEstimate> {
    f.check_domain(interval)?;
    integrate_split(|x| f.value_at(x), interval, weight, tol, &f.kinks())
}

/// `∫_a^b f(x) g(x) dx`; the caller applies any `1/(b−a)` normalization.
pub fn product_integrate(
    f: &FunctionSpec,
    g: &FunctionSpec,
    interval: &Interval,
    tol: f64,
) -> Result<QuadratureEstimate> {
    f.check_domain(interval)?;
    g.check_domain(interval)?;
    let mut breaks = f.kinks();
    breaks.extend(g.kinks());
    integrate_split(
        |x| f.value_at(x) * g.value_at(x),
        interval,
        WeightKind::None,
        tol,
        &breaks,
    )
}
