//! Sampled membership checks for convexity, s-convexity in the second sense
//! and nonnegativity.
//!
//! A check searches a fixed grid of points and a seeded batch of random pairs
//! for a violation of the defining inequality. A counterexample is a concrete,
//! re-checkable witness; "no violation found" only records the search effort.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::function_model::{FunctionSpec, Interval};
use crate::stream;

/// Points per side of the deterministic x-grid whose pairs are always tested.
pub const X_GRID_POINTS: usize = 17;
pub const NONNEGATIVE_TOLERANCE: f64 = 1e-12;

/// The class a function is asked to belong to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum FunctionClass {
    Convex,
    SConvex { s: f64 },
}

impl FunctionClass {
    /// Coefficients of f(x) and f(y) on the right of the defining inequality.
    fn coefficients(&self, t: f64) -> (f64, f64) {
        match *self {
            FunctionClass::Convex => (t, 1.0 - t),
            FunctionClass::SConvex { s } => (t.powf(s), (1.0 - t).powf(s)),
        }
    }

    fn validate(&self, interval: &Interval) -> Result<()> {
        if let FunctionClass::SConvex { s } = *self {
            if !(s > 0.0 && s <= 1.0) {
                return Err(domain(
                    "check_s_convex",
                    format!("s must lie in (0, 1], got {s}"),
                ));
            }
            interval.require_nonnegative()?;
        }
        Ok(())
    }
}

/// Allowed excess of the left side over the right side.
pub fn violation_tolerance(rhs: f64) -> f64 {
    1e-10 * (1.0 + rhs.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub t_points: usize,
    pub pair_samples: usize,
}

impl Resolution {
    pub fn new(t_points: usize, pair_samples: usize) -> Self {
        Self {
            t_points,
            pair_samples,
        }
    }

    /// Cheaper search used per trial inside campaigns.
    pub fn campaign() -> Self {
        Self {
            t_points: 17,
            pair_samples: 32,
        }
    }

    fn t_grid(&self) -> Vec<f64> {
        if self.t_points == 1 {
            return vec![0.5];
        }
        let last = (self.t_points - 1) as f64;
        (0..self.t_points).map(|k| k as f64 / last).collect()
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Self {
            t_points: 65,
            pair_samples: 256,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Counterexample,
    NoViolationFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub violation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckKind {
    Membership(FunctionClass),
    Nonnegative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationVerdict {
    pub kind: CheckKind,
    pub interval: Interval,
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub resolution: Option<Resolution>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

impl CertificationVerdict {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::NoViolationFound
    }
}

fn x_grid(interval: &Interval) -> Vec<f64> {
    let (a, b) = (interval.a(), interval.b());
    let last = (X_GRID_POINTS - 1) as f64;
    (0..X_GRID_POINTS)
        .map(|i| {
            if i + 1 == X_GRID_POINTS {
                b
            } else {
                a + interval.width() * i as f64 / last
            }
        })
        .collect()
}

/// Half the random points are uniform; the rest cluster at either endpoint,
/// where jumps and power-law behaviour live.
fn sample_point<R: Rng>(rng: &mut R, interval: &Interval) -> f64 {
    let u: f64 = rng.random();
    let x = match rng.random_range(0..4u8) {
        0 | 1 => interval.a() + interval.width() * u,
        2 => interval.a() + interval.width() * u.powi(8),
        _ => interval.b() - interval.width() * u.powi(8),
    };
    x.clamp(interval.a(), interval.b())
}

/// Left side, right side of the defining inequality at (x, y, t).
pub fn membership_sides(
    spec: &FunctionSpec,
    class: FunctionClass,
    x: f64,
    y: f64,
    t: f64,
) -> Result<(f64, f64)> {
    let (cx, cy) = class.coefficients(t);
    let lhs = spec.evaluate(t * x + (1.0 - t) * y)?;
    let rhs = cx * spec.evaluate(x)? + cy * spec.evaluate(y)?;
    Ok((lhs, rhs))
}

impl Witness {
    /// Recomputes the violation from scratch for a membership witness.
    pub fn recheck(&self, spec: &FunctionSpec, class: FunctionClass) -> Result<f64> {
        match (self.y, self.t) {
            (Some(y), Some(t)) => {
                let (lhs, rhs) = membership_sides(spec, class, self.x, y, t)?;
                Ok(lhs - rhs)
            }
            _ => Ok(-spec.evaluate(self.x)?),
        }
    }
}

struct Search<'a> {
    spec: &'a FunctionSpec,
    class: FunctionClass,
    t_grid: Vec<f64>,
    worst: Option<Witness>,
}

impl Search<'_> {
    fn pair(&mut self, x: f64, y: f64) {
        if x == y {
            return;
        }
        let fx = self.spec.value_at(x);
        let fy = self.spec.value_at(y);
        for &t in &self.t_grid {
            let (cx, cy) = self.class.coefficients(t);
            let lhs = self.spec.value_at(t * x + (1.0 - t) * y);
            let rhs = cx * fx + cy * fy;
            let violation = lhs - rhs;
            if violation > violation_tolerance(rhs)
                && self.worst.is_none_or(|w| violation > w.violation)
            {
                self.worst = Some(Witness {
                    x,
                    y: Some(y),
                    t: Some(t),
                    lhs,
                    rhs,
                    violation,
                });
            }
        }
    }
}

/// Samples the defining inequality of `class` on `interval`.
pub fn check_class(
    spec: &FunctionSpec,
    class: FunctionClass,
    interval: &Interval,
    resolution: Resolution,
    seed: u64,
) -> Result<CertificationVerdict> {
    class.validate(interval)?;
    if resolution.t_points == 0 {
        return Err(Error::Config(
            "resolution needs at least one t point".into(),
        ));
    }
    spec.check_domain(interval)?;

    let mut search = Search {
        spec,
        class,
        t_grid: resolution.t_grid(),
        worst: None,
    };
    let grid = x_grid(interval);
    for (i, &x) in grid.iter().enumerate() {
        for &y in &grid[i + 1..] {
            search.pair(x, y);
        }
    }
    let mut rng = stream::rng(seed);
    for _ in 0..resolution.pair_samples {
        let x = sample_point(&mut rng, interval);
        let y = sample_point(&mut rng, interval);
        search.pair(x, y);
    }

    let worst = search.worst;
    Ok(CertificationVerdict {
        kind: CheckKind::Membership(class),
        interval: *interval,
        outcome: if worst.is_some() {
            Outcome::Counterexample
        } else {
            Outcome::NoViolationFound
        },
        witness: worst,
        resolution: Some(resolution),
        grid_points: None,
        seed: Some(seed),
    })
}

/// Sampled test of `f(tx+(1−t)y) ≤ t f(x) + (1−t) f(y)`.
pub fn check_convex(
    spec: &FunctionSpec,
    interval: &Interval,
    resolution: Resolution,
    seed: u64,
) -> Result<CertificationVerdict> {
    check_class(spec, FunctionClass::Convex, interval, resolution, seed)
}

/// Sampled test of `f(tx+(1−t)y) ≤ t^s f(x) + (1−t)^s f(y)`; needs `a ≥ 0`.
pub fn check_s_convex(
    spec: &FunctionSpec,
    s: f64,
    interval: &Interval,
    resolution: Resolution,
    seed: u64,
) -> Result<CertificationVerdict> {
    check_class(
        spec,
        FunctionClass::SConvex { s },
        interval,
        resolution,
        seed,
    )
}

/// Evaluates on `grid_points` equally spaced points including both ends and
/// reports the most negative value below `−1e−12`.
pub fn check_nonnegative(
    spec: &FunctionSpec,
    interval: &Interval,
    grid_points: usize,
) -> Result<CertificationVerdict> {
    interval.require_nonnegative()?;
    if grid_points < 2 {
        return Err(Error::Config(
            "nonnegativity grid needs at least two points".into(),
        ));
    }
    let last = (grid_points - 1) as f64;
    let mut worst: Option<Witness> = None;
    for i in 0..grid_points {
        let x = if i + 1 == grid_points {
            interval.b()
        } else {
            interval.a() + interval.width() * i as f64 / last
        };
        let value = spec.evaluate(x)?;
        if value < -NONNEGATIVE_TOLERANCE && worst.is_none_or(|w| -value > w.violation) {
            worst = Some(Witness {
                x,
                y: None,
                t: None,
                lhs: 0.0,
                rhs: value,
                violation: -value,
            });
        }
    }
    Ok(CertificationVerdict {
        kind: CheckKind::Nonnegative,
        interval: *interval,
        outcome: if worst.is_some() {
            Outcome::Counterexample
        } else {
            Outcome::NoViolationFound
        },
        witness: worst,
        resolution: None,
        grid_points: Some(grid_points),
        seed: None,
    })
}
