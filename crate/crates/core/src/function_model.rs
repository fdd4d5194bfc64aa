//! Function descriptions, intervals and the seeded generators for convex and
//! s-convex (second sense) functions.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::stream;

/// A closed interval `[a, b]` with `a < b`, both finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterval {
    a: f64,
    b: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;

    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.a, raw.b)
    }
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInterval {
                a,
                b,
                reason: "endpoints must be finite",
            });
        }
        if a >= b {
            return Err(Error::InvalidInterval {
                a,
                b,
                reason: "left endpoint must be below the right endpoint",
            });
        }
        Ok(Self { a, b })
    }

    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.a <= x && x <= self.b
    }

    /// The point `t·a + (1−t)·b`, exact at both `t = 0` and `t = 1`.
    pub fn convex_point(&self, t: f64) -> f64 {
        t * self.a + (1.0 - t) * self.b
    }

    /// Required before any s-convexity operation with `s < 1`: the class
    /// lives on `[0, ∞)`.
    pub fn require_nonnegative(&self) -> Result<()> {
        if self.a < 0.0 {
            Err(Error::InvalidInterval {
                a: self.a,
                b: self.b,
                reason: "s-convexity requires a nonnegative left endpoint",
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.a, self.b)
    }
}

/// A real function of one variable built from a fixed set of shapes.
///
/// `PowerS` is the two-piece family taking the value `a0` at `t = 0` and
/// `b_coef·t^s + c_off` for `t > 0`. It is a member of K_s^2 whenever
/// `b_coef ≥ 0` and `0 ≤ c_off ≤ a0`, and is not when `b_coef > 0` and
/// `c_off < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Constant {
        value: f64,
    },
    Affine {
        slope: f64,
        offset: f64,
    },
    /// Coefficients in ascending degree.
    Polynomial {
        coefficients: Vec<f64>,
    },
    PowerS {
        a0: f64,
        b_coef: f64,
        c_off: f64,
        s: f64,
    },
    /// `slope·|x − center| + offset`
    AbsKink {
        center: f64,
        slope: f64,
        offset: f64,
    },
    /// `scale·e^(rate·x) + offset`
    ExpAffine {
        rate: f64,
        scale: f64,
        offset: f64,
    },
    Sum {
        terms: Vec<FunctionSpec>,
    },
    Scale {
        factor: f64,
        inner: Box<FunctionSpec>,
    },
}

fn finite(what: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{what} must be finite, got {x}"
        )))
    }
}

fn nonneg(what: &str, x: f64) -> Result<()> {
    finite(what, x)?;
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!(
            "{what} must be nonnegative, got {x}"
        )))
    }
}

impl FunctionSpec {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn affine(slope: f64, offset: f64) -> Self {
        Self::Affine { slope, offset }
    }

    pub fn polynomial(coefficients: impl Into<Vec<f64>>) -> Self {
        Self::Polynomial {
            coefficients: coefficients.into(),
        }
    }

    pub fn power_s(a0: f64, b_coef: f64, c_off: f64, s: f64) -> Self {
        Self::PowerS {
            a0,
            b_coef,
            c_off,
            s,
        }
    }

    pub fn abs_kink(center: f64, slope: f64, offset: f64) -> Self {
        Self::AbsKink {
            center,
            slope,
            offset,
        }
    }

    pub fn exp_affine(rate: f64, scale: f64, offset: f64) -> Self {
        Self::ExpAffine {
            rate,
            scale,
            offset,
        }
    }

    pub fn sum(terms: impl Into<Vec<FunctionSpec>>) -> Self {
        Self::Sum {
            terms: terms.into(),
        }
    }

    pub fn scale(factor: f64, inner: FunctionSpec) -> Self {
        Self::Scale {
            factor,
            inner: Box::new(inner),
        }
    }

    /// Checks the structural constraints of every node.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Constant { value } => finite("constant value", *value),
            Self::Affine { slope, offset } => {
                finite("affine slope", *slope)?;
                finite("affine offset", *offset)
            }
            Self::Polynomial { coefficients } => coefficients
                .iter()
                .try_for_each(|&c| finite("polynomial coefficient", c)),
            Self::PowerS {
                a0,
                b_coef,
                c_off,
                s,
            } => {
                finite("power_s a0", *a0)?;
                finite("power_s b_coef", *b_coef)?;
                finite("power_s c_off", *c_off)?;
                if !(*s > 0.0 && *s <= 1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "power_s exponent must lie in (0, 1], got {s}"
                    )));
                }
                Ok(())
            }
            Self::AbsKink {
                center,
                slope,
                offset,
            } => {
                finite("abs_kink center", *center)?;
                nonneg("abs_kink slope", *slope)?;
                finite("abs_kink offset", *offset)
            }
            Self::ExpAffine {
                rate,
                scale,
                offset,
            } => {
                finite("exp_affine rate", *rate)?;
                nonneg("exp_affine scale", *scale)?;
                finite("exp_affine offset", *offset)
            }
            Self::Sum { terms } => terms.iter().try_for_each(FunctionSpec::validate),
            Self::Scale { factor, inner } => {
                nonneg("scale factor", *factor)?;
                inner.validate()
            }
        }
    }

    /// True if any node is restricted to `x ≥ 0`.
    pub fn needs_nonnegative_domain(&self) -> bool {
        match self {
            Self::PowerS { .. } => true,
            Self::Sum { terms } => terms.iter().any(FunctionSpec::needs_nonnegative_domain),
            Self::Scale { inner, .. } => inner.needs_nonnegative_domain(),
            _ => false,
        }
    }

    /// Points where the function is not smooth: kink centers.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Self::AbsKink { center, .. } => vec![*center],
            Self::Sum { terms } => terms.iter().flat_map(FunctionSpec::kinks).collect(),
            Self::Scale { inner, .. } => inner.kinks(),
            _ => Vec::new(),
        }
    }

    /// Fails if the interval leaves the natural domain of the function.
    pub fn check_domain(&self, interval: &Interval) -> Result<()> {
        if interval.a() < 0.0 && self.needs_nonnegative_domain() {
            return Err(domain(
                "evaluate",
                format!("power_s is defined on [0, ∞) but the interval is {interval}"),
            ));
        }
        Ok(())
    }

    /// Pointwise value; errors only when `x` leaves the natural domain.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if x.is_nan() {
            return Err(domain("evaluate", "argument is NaN"));
        }
        if x < 0.0 && self.needs_nonnegative_domain() {
            return Err(domain(
                "evaluate",
                format!("power_s evaluated at negative argument {x}"),
            ));
        }
        Ok(self.value_at(x))
    }

    /// Pointwise value without the domain check. Callers validate the
    /// interval once with [`FunctionSpec::check_domain`].
    pub(crate) fn value_at(&self, x: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Affine { slope, offset } => slope * x + offset,
            Self::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
            }
            Self::PowerS {
                a0,
                b_coef,
                c_off,
                s,
            } => {
                if x == 0.0 {
                    *a0
                } else {
                    b_coef * x.powf(*s) + c_off
                }
            }
            Self::AbsKink {
                center,
                slope,
                offset,
            } => slope * (x - center).abs() + offset,
            Self::ExpAffine {
                rate,
                scale,
                offset,
            } => scale * (rate * x).exp() + offset,
            Self::Sum { terms } => terms.iter().map(|t| t.value_at(x)).sum(),
            Self::Scale { factor, inner } => factor * inner.value_at(x),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: FunctionSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Compact JSON rendering; `from_json(render())` reproduces the spec.
    pub fn render(&self) -> String {
        serde_json::to_string(self).expect("function specs always serialize")
    }

    pub fn render_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("function specs always serialize")
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub const MAX_COMPLEXITY: u32 = 8;

fn check_complexity(complexity: u32) -> Result<()> {
    if (1..=MAX_COMPLEXITY).contains(&complexity) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "complexity must lie in [1, {MAX_COMPLEXITY}], got {complexity}"
        )))
    }
}

fn free<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-1.0..=1.0)
}

fn weight<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(0.0..=2.0)
}

fn combine(mut terms: Vec<FunctionSpec>) -> FunctionSpec {
    if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        FunctionSpec::sum(terms)
    }
}

/// A convex function with `complexity` terms, kink centers drawn from `[0, 1]`.
pub fn random_convex(seed: u64, complexity: u32) -> Result<FunctionSpec> {
    random_convex_on(seed, complexity, &Interval::unit())
}

/// A convex-by-construction function with `complexity` terms, each an affine
/// map, a kink centered inside `interval`, an even polynomial with
/// nonnegative coefficients or a nonnegatively scaled exponential.
pub fn random_convex_on(seed: u64, complexity: u32, interval: &Interval) -> Result<FunctionSpec> {
    check_complexity(complexity)?;
    let mut rng = stream::rng(seed);
    let terms = (0..complexity)
        .map(|_| match rng.random_range(0..4u8) {
            0 => FunctionSpec::affine(free(&mut rng), free(&mut rng)),
            1 => FunctionSpec::abs_kink(
                rng.random_range(interval.a()..=interval.b()),
                weight(&mut rng),
                free(&mut rng),
            ),
            2 => {
                let degree = if rng.random_bool(0.5) { 2 } else { 4 };
                let coefficients = (0..=degree)
                    .map(|k| if k % 2 == 0 { weight(&mut rng) } else { 0.0 })
                    .collect::<Vec<_>>();
                FunctionSpec::polynomial(coefficients)
            }
            _ => FunctionSpec::exp_affine(free(&mut rng), weight(&mut rng), free(&mut rng)),
        })
        .collect();
    Ok(combine(terms))
}

/// A member of K_s^2 with `complexity` terms: the first is always a `PowerS`
/// with `b_coef ≥ 0` and `0 ≤ c_off ≤ a0`; later terms are further such
/// members or nonnegative constants.
pub fn random_s_convex(seed: u64, s: f64, complexity: u32) -> Result<FunctionSpec> {
    check_complexity(complexity)?;
    if !(s > 0.0 && s <= 1.0) {
        return Err(domain(
            "random_s_convex",
            format!("s must lie in (0, 1], got {s}"),
        ));
    }
    let mut rng = stream::rng(seed);
    let terms = (0..complexity)
        .map(|i| {
            if i > 0 && rng.random_bool(0.25) {
                FunctionSpec::constant(weight(&mut rng))
            } else {
                let a0 = weight(&mut rng);
                let b_coef = weight(&mut rng);
                let c_off = rng.random_range(0.0..=a0);
                FunctionSpec::power_s(a0, b_coef, c_off, s)
            }
        })
        .collect();
    Ok(combine(terms))
}
