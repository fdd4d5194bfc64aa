//! Both sides of the Hadamard-type inequalities for products of convex and
//! s-convex functions, evaluated into auditable reports.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::function_model::{FunctionSpec, Interval};
use crate::quadrature::{self, QuadratureEstimate, WeightKind};
use crate::special;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    /// Midpoint value below the integral mean.
    HhLeft,
    /// Integral mean below the endpoint average.
    HhRight,
    /// Product of two convex functions.
    T1,
    /// Convex times s-convex.
    T2,
    /// s1-convex times s2-convex.
    T3,
    /// Midpoint corollary for two convex functions.
    C29,
}

impl InequalityId {
    pub const ALL: [InequalityId; 6] = [
        InequalityId::HhLeft,
        InequalityId::HhRight,
        InequalityId::T1,
        InequalityId::T2,
        InequalityId::T3,
        InequalityId::C29,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            InequalityId::HhLeft => "hh_left",
            InequalityId::HhRight => "hh_right",
            InequalityId::T1 => "t1",
            InequalityId::T2 => "t2",
            InequalityId::T3 => "t3",
            InequalityId::C29 => "c29",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InequalityId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownInequality(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Target absolute error of each prefactor-scaled quadrature term.
    pub quadrature: f64,
    /// Absolute slack tolerance on top of the quadrature error budget.
    pub slack: f64,
}

pub const DEFAULT_SLACK_TOL: f64 = 1e-9;

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature: quadrature::DEFAULT_TOL,
            slack: DEFAULT_SLACK_TOL,
        }
    }
}

impl Tolerances {
    pub fn with_quadrature(quadrature: f64) -> Self {
        Self {
            quadrature,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub inequality_id: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub terms: BTreeMap<String, f64>,
    pub quad_error_budget: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// `holds` iff slack ≥ −tolerance, `violated` iff slack < −(tolerance + budget).
pub fn classify(slack: f64, tolerance: f64, budget: f64, converged: bool) -> Verdict {
    if !converged || slack.is_nan() {
        Verdict::Inconclusive
    } else if slack >= -tolerance {
        Verdict::Holds
    } else if slack < -(tolerance + budget) {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

/// Endpoint products `M = f(a)g(a) + f(b)g(b)` and `N = f(a)g(b) + f(b)g(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MnTerms {
    pub m: f64,
    pub n: f64,
}

pub fn mn_terms(f: &FunctionSpec, g: &FunctionSpec, interval: &Interval) -> Result<MnTerms> {
    let (fa, fb) = (f.evaluate(interval.a())?, f.evaluate(interval.b())?);
    let (ga, gb) = (g.evaluate(interval.a())?, g.evaluate(interval.b())?);
    Ok(MnTerms {
        m: fa * ga + fb * gb,
        n: fa * gb + fb * ga,
    })
}

fn check_exponent(what: &'static str, s: f64) -> Result<()> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(domain(
            what,
            format!("exponent must lie in (0, 1], got {s}"),
        ))
    }
}

struct Budget {
    total: f64,
    converged: bool,
}

impl Budget {
    fn new() -> Self {
        Self {
            total: 0.0,
            converged: true,
        }
    }

    /// Scales an estimate by `prefactor`, folding its error into the budget.
    fn take(&mut self, prefactor: f64, est: QuadratureEstimate) -> f64 {
        self.total += prefactor.abs() * est.error_estimate;
        self.converged &= est.converged;
        prefactor * est.value
    }
}

/// Quadrature tolerance that keeps `|prefactor| · error` near `tol`.
fn scaled_tol(tol: f64, prefactor: f64) -> f64 {
    tol / prefactor.abs().max(1.0)
}

/// `prefactor · ∫ w(x) h(x) dx` with its error folded into `budget`.
fn weighted_term(
    budget: &mut Budget,
    prefactor: f64,
    h: &FunctionSpec,
    interval: &Interval,
    weight: WeightKind,
    tol: f64,
) -> Result<f64> {
    if prefactor == 0.0 {
        return Ok(0.0);
    }
    let est = quadrature::integrate_spec(h, interval, weight, scaled_tol(tol, prefactor))?;
    Ok(budget.take(prefactor, est))
}

fn report(
    id: InequalityId,
    lhs: f64,
    rhs: f64,
    terms: BTreeMap<String, f64>,
    budget: Budget,
    tolerances: &Tolerances,
) -> InequalityReport {
    let slack = rhs - lhs;
    InequalityReport {
        inequality_id: id,
        lhs,
        rhs,
        slack,
        terms,
        quad_error_budget: budget.total,
        tolerance: tolerances.slack,
        verdict: classify(slack, tolerances.slack, budget.total, budget.converged),
    }
}

/// Both halves of the Hermite–Hadamard double inequality.
pub fn eval_hermite_hadamard(
    f: &FunctionSpec,
    interval: &Interval,
    tolerances: &Tolerances,
) -> Result<(InequalityReport, InequalityReport)> {
    let (fa, fb) = (f.evaluate(interval.a())?, f.evaluate(interval.b())?);
    let midpoint = f.evaluate(interval.midpoint())?;
    let width = interval.width();
    let mut budget = Budget::new();
    let est = quadrature::integrate_spec(
        f,
        interval,
        WeightKind::None,
        tolerances.quadrature * width.max(1.0),
    )?;
    let mean = budget.take(1.0 / width, est);
    let endpoint_average = 0.5 * (fa + fb);

    let terms: BTreeMap<String, f64> = [
        ("midpoint_value", midpoint),
        ("integral_mean", mean),
        ("endpoint_average", endpoint_average),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let midpoint_budget = Budget {
        total: budget.total,
        converged: budget.converged,
    };
    let left = report(
        InequalityId::HhLeft,
        midpoint,
        mean,
        terms.clone(),
        midpoint_budget,
        tolerances,
    );
    let right = report(
        InequalityId::HhRight,
        mean,
        endpoint_average,
        terms,
        budget,
        tolerances,
    );
    Ok((left, right))
}

/// The shared shape of the three product inequalities:
///
/// LHS = f(a)/(b−a)^(σf+1) ∫(b−x)^σf g + f(b)/(b−a)^(σf+1) ∫(x−a)^σf g
///     + g(a)/(b−a)^(σg+1) ∫(b−x)^σg f + g(b)/(b−a)^(σg+1) ∫(x−a)^σg f
/// RHS = 1/(b−a) ∫ f g + m_coef·M + n_coef·N
#[allow(clippy::too_many_arguments)]
fn product_inequality(
    id: InequalityId,
    f: &FunctionSpec,
    g: &FunctionSpec,
    sigma_f: f64,
    sigma_g: f64,
    m_coef: f64,
    n_coef: f64,
    interval: &Interval,
    tolerances: &Tolerances,
) -> Result<InequalityReport> {
    f.check_domain(interval)?;
    g.check_domain(interval)?;
    let (a, b) = (interval.a(), interval.b());
    let (fa, fb) = (f.value_at(a), f.value_at(b));
    let (ga, gb) = (g.value_at(a), g.value_at(b));
    let width = interval.width();
    let pre_f = 1.0 / width.powf(sigma_f + 1.0);
    let pre_g = 1.0 / width.powf(sigma_g + 1.0);
    let tol = tolerances.quadrature;

    let mut budget = Budget::new();
    let fa_g_left = weighted_term(
        &mut budget,
        fa * pre_f,
        g,
        interval,
        WeightKind::LeftPower(sigma_f),
        tol,
    )?;
    let fb_g_right = weighted_term(
        &mut budget,
        fb * pre_f,
        g,
        interval,
        WeightKind::RightPower(sigma_f),
        tol,
    )?;
    let ga_f_left = weighted_term(
        &mut budget,
        ga * pre_g,
        f,
        interval,
        WeightKind::LeftPower(sigma_g),
        tol,
    )?;
    let gb_f_right = weighted_term(
        &mut budget,
        gb * pre_g,
        f,
        interval,
        WeightKind::RightPower(sigma_g),
        tol,
    )?;

    let product = quadrature::product_integrate(f, g, interval, scaled_tol(tol, 1.0 / width))?;
    let mean_fg = budget.take(1.0 / width, product);

    let mn = MnTerms {
        m: fa * ga + fb * gb,
        n: fa * gb + fb * ga,
    };
    let m_term = m_coef * mn.m;
    let n_term = n_coef * mn.n;

    let lhs = fa_g_left + fb_g_right + ga_f_left + gb_f_right;
    let rhs = mean_fg + m_term + n_term;
    let terms: BTreeMap<String, f64> = [
        ("fa_g_left", fa_g_left),
        ("fb_g_right", fb_g_right),
        ("ga_f_left", ga_f_left),
        ("gb_f_right", gb_f_right),
        ("mean_fg", mean_fg),
        ("m", mn.m),
        ("n", mn.n),
        ("m_term", m_term),
        ("n_term", n_term),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    Ok(report(id, lhs, rhs, terms, budget, tolerances))
}

/// Product of two convex functions; M/3 and N/6 on the right.
pub fn eval_t1(
    f: &FunctionSpec,
    g: &FunctionSpec,
    interval: &Interval,
    tolerances: &Tolerances,
) -> Result<InequalityReport> {
    product_inequality(
        InequalityId::T1,
        f,
        g,
        1.0,
        1.0,
        1.0 / 3.0,
        1.0 / 6.0,
        interval,
        tolerances,
    )
}

/// `f` convex, `g` s-convex; M/(s+2) and N/((s+1)(s+2)) on the right.
pub fn eval_t2(
    f: &FunctionSpec,
    g: &FunctionSpec,
    s: f64,
    interval: &Interval,
    tolerances: &Tolerances,
) -> Result<InequalityReport> {
    check_exponent("eval_t2", s)?;
    interval.require_nonnegative()?;
    let n_coef = special::beta_2_splus1(s)?;
    product_inequality(
        InequalityId::T2,
        f,
        g,
        1.0,
        s,
        1.0 / (s + 2.0),
        n_coef,
        interval,
        tolerances,
    )
}

/// `f` s1-convex, `g` s2-convex; M/(s1+s2+1) and β(s1+1, s2+1)·N on the right.
pub fn eval_t3(
    f: &FunctionSpec,
    s1: f64,
    g: &FunctionSpec,
    s2: f64,
    interval: &Interval,
    tolerances: &Tolerances,
) -> Result<InequalityReport> {
    check_exponent("eval_t3", s1)?;
    check_exponent("eval_t3", s2)?;
    interval.require_nonnegative()?;
    let m_coef = 1.0 / (s1 + s2 + 1.0);
    let n_coef = special::beta_cross(s1, s2)?;
    product_inequality(
        InequalityId::T3,
        f,
        g,
        s1,
        s2,
        m_coef,
        n_coef,
        interval,
        tolerances,
    )
}

fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| domain("eval_c29", format!("non-finite value {x}")))
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// The midpoint corollary, evaluated in exact rational arithmetic on the six
/// point values; only the final results are rounded.
pub fn eval_c29(
    f: &FunctionSpec,
    g: &FunctionSpec,
    interval: &Interval,
    tolerances: &Tolerances,
) -> Result<InequalityReport> {
    let (a, b, mid) = (interval.a(), interval.b(), interval.midpoint());
    let fa = rational(f.evaluate(a)?)?;
    let fb = rational(f.evaluate(b)?)?;
    let fm = rational(f.evaluate(mid)?)?;
    let ga = rational(g.evaluate(a)?)?;
    let gb = rational(g.evaluate(b)?)?;
    let gm = rational(g.evaluate(mid)?)?;
    let int = |n: i64| BigRational::from_integer(BigInt::from(n));

    let m = &fa * &ga + &fb * &gb;
    let n = &fa * &gb + &fb * &ga;
    let lhs = (&fa + &fb) / int(2) * &gm + (&ga + &gb) / int(2) * &fm;
    let m_term = &m / int(3);
    let n_term = &n / int(6);
    let rhs = &fm * &gm + &m_term + &n_term;
    let slack = &rhs - &lhs;

    let terms: BTreeMap<String, f64> = [
        ("f_mid", &fm),
        ("g_mid", &gm),
        ("m", &m),
        ("n", &n),
        ("m_term", &m_term),
        ("n_term", &n_term),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), to_f64(v)))
    .collect();
    let slack = to_f64(&slack);
    Ok(InequalityReport {
        inequality_id: InequalityId::C29,
        lhs: to_f64(&lhs),
        rhs: to_f64(&rhs),
        slack,
        terms,
        quad_error_budget: 0.0,
        tolerance: tolerances.slack,
        verdict: classify(slack, tolerances.slack, 0.0, true),
    })
}

/// `(A − f(u))·(B − g(u))` at `u = ta + (1−t)b`, where `A` and `B` are the
/// s1- and s2-convexity upper bounds for `f(u)` and `g(u)`. Integrating over
/// `t ∈ [0, 1]` yields the slack of [`eval_t3`].
pub fn proof_step_pointwise(
    f: &FunctionSpec,
    g: &FunctionSpec,
    s1: f64,
    s2: f64,
    t: f64,
    interval: &Interval,
) -> Result<f64> {
    check_exponent("proof_step_pointwise", s1)?;
    check_exponent("proof_step_pointwise", s2)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(
            "proof_step_pointwise",
            format!("t must lie in [0, 1], got {t}"),
        ));
    }
    interval.require_nonnegative()?;
    let (a, b) = (interval.a(), interval.b());
    let u = interval.convex_point(t);
    let bound_f = t.powf(s1) * f.evaluate(a)? + (1.0 - t).powf(s1) * f.evaluate(b)?;
    let bound_g = t.powf(s2) * g.evaluate(a)? + (1.0 - t).powf(s2) * g.evaluate(b)?;
    Ok((bound_f - f.evaluate(u)?) * (bound_g - g.evaluate(u)?))
}
