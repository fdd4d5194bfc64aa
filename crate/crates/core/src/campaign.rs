//! Seeded falsification campaigns.
//!
//! Trial `i` draws everything from the stream keyed by `(root_seed, i)`:
//! its exponents, the term counts, both functions and the certification
//! pairs. Trials are independent, run in parallel, and are aggregated in
//! index order, so a report is identical for any thread count.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certification::{self, FunctionClass, Resolution};
use crate::error::{Error, Result};
use crate::function_model::{self, FunctionSpec, Interval, MAX_COMPLEXITY};
use crate::inequality::{InequalityId, InequalityReport, Tolerances, Verdict};
use crate::registry::{Case, ExponentArity, Exponents, Registry};
use crate::stream;

pub const DESCRIPTOR_VERSION: u32 = 1;

const EXPONENT_STREAM: u64 = 0;
const F_STREAM: u64 = 1;
const G_STREAM: u64 = 2;
const TERM_COUNT_STREAM: u64 = 0;
const CERT_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SRange {
    pub lo: f64,
    pub hi: f64,
}

impl SRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let range = Self { lo, hi };
        range.validate()?;
        Ok(range)
    }

    fn validate(&self) -> Result<()> {
        if self.lo > 0.0 && self.lo <= self.hi && self.hi <= 1.0 {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "s range [{}, {}] must be a subinterval of (0, 1]",
                self.lo, self.hi
            )))
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.random_range(self.lo..=self.hi)
        }
    }
}

impl Default for SRange {
    fn default() -> Self {
        Self { lo: 0.1, hi: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub inequality: InequalityId,
    pub n_samples: u64,
    pub root_seed: u64,
    pub interval: Interval,
    pub s_range: SRange,
    /// Upper bound on the number of terms per generated function; each
    /// function draws its own count uniformly from `1..=complexity`.
    pub complexity: u32,
    pub tolerances: Tolerances,
    pub resolution: Resolution,
    pub max_redraws: u32,
}

impl CampaignConfig {
    pub fn new(
        inequality: InequalityId,
        n_samples: u64,
        root_seed: u64,
        interval: Interval,
    ) -> Self {
        Self {
            inequality,
            n_samples,
            root_seed,
            interval,
            s_range: SRange::default(),
            complexity: 3,
            tolerances: Tolerances::default(),
            resolution: Resolution::campaign(),
            max_redraws: 16,
        }
    }

    pub fn validate(&self, registry: &Registry) -> Result<()> {
        let entry = registry.by_id(self.inequality)?;
        if self.n_samples == 0 {
            return Err(Error::Config("a campaign needs at least one sample".into()));
        }
        self.s_range.validate()?;
        if !(1..=MAX_COMPLEXITY).contains(&self.complexity) {
            return Err(Error::Config(format!(
                "complexity must lie in [1, {MAX_COMPLEXITY}], got {}",
                self.complexity
            )));
        }
        if self.tolerances.quadrature.is_nan()
            || self.tolerances.quadrature <= 0.0
            || self.tolerances.slack.is_nan()
            || self.tolerances.slack < 0.0
        {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.resolution.t_points == 0 {
            return Err(Error::Config(
                "certification needs at least one t point".into(),
            ));
        }
        if entry.arity() != ExponentArity::None {
            self.interval.require_nonnegative()?;
        }
        Ok(())
    }
}

/// Everything needed to rebuild one trial without the rest of its campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialDescriptor {
    pub format_version: u32,
    pub inequality: InequalityId,
    pub interval: Interval,
    pub tolerances: Tolerances,
    pub resolution: Resolution,
    pub complexity: u32,
    pub s_range: SRange,
    pub max_redraws: u32,
    pub root_seed: u64,
    pub index: u64,
    pub trial_seed: u64,
    pub exponents: Exponents,
    pub f_redraws: u32,
    pub g_redraws: u32,
    pub f: FunctionSpec,
    pub g: Option<FunctionSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: TrialDescriptor,
    pub report: InequalityReport,
}

/// One line of the per-trial CSV export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub index: u64,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub slack: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub samples_run: u64,
    pub min_slack: f64,
    pub min_slack_sample: Option<TrialRecord>,
    pub violations: Vec<TrialRecord>,
    pub inconclusive_count: u64,
    pub redraw_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutcome {
    pub report: CampaignReport,
    pub rows: Vec<TrialRow>,
}

impl CampaignOutcome {
    /// `index,s1,s2,slack,verdict` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,s1,s2,slack,verdict\n");
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for row in &self.rows {
            let verdict = serde_json::to_value(row.verdict).expect("verdict serializes");
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.index,
                opt(row.s1),
                opt(row.s2),
                row.slack,
                verdict.as_str().unwrap_or_default()
            ));
        }
        out
    }
}

struct TrialPlan<'a> {
    inequality: InequalityId,
    interval: Interval,
    tolerances: Tolerances,
    resolution: Resolution,
    complexity: u32,
    s_range: SRange,
    max_redraws: u32,
    registry: &'a Registry,
}

impl<'a> TrialPlan<'a> {
    fn from_config(config: &CampaignConfig, registry: &'a Registry) -> Self {
        Self {
            inequality: config.inequality,
            interval: config.interval,
            tolerances: config.tolerances,
            resolution: config.resolution,
            complexity: config.complexity,
            s_range: config.s_range,
            max_redraws: config.max_redraws,
            registry,
        }
    }

    fn from_descriptor(d: &TrialDescriptor, registry: &'a Registry) -> Self {
        Self {
            inequality: d.inequality,
            interval: d.interval,
            tolerances: d.tolerances,
            resolution: d.resolution,
            complexity: d.complexity,
            s_range: d.s_range,
            max_redraws: d.max_redraws,
            registry,
        }
    }

    fn draw_exponents(&self, arity: ExponentArity, trial_seed: u64) -> Exponents {
        let mut rng = stream::rng(stream::derive(trial_seed, EXPONENT_STREAM));
        match arity {
            ExponentArity::None => Exponents::None,
            ExponentArity::One => Exponents::Single {
                s: self.s_range.draw(&mut rng),
            },
            ExponentArity::Two => {
                let s1 = self.s_range.draw(&mut rng);
                let s2 = self.s_range.draw(&mut rng);
                Exponents::Pair { s1, s2 }
            }
        }
    }

    /// Generates and certifies one function, redrawing on certification failure.
    fn certified(&self, class: FunctionClass, base: u64) -> Result<(FunctionSpec, u32)> {
        for redraw in 0..=self.max_redraws {
            let key = stream::derive(base, redraw as u64);
            let terms =
                1 + (stream::derive(key, TERM_COUNT_STREAM) % self.complexity as u64) as u32;
            let spec = match class {
                FunctionClass::Convex => {
                    function_model::random_convex_on(key, terms, &self.interval)?
                }
                FunctionClass::SConvex { s } => function_model::random_s_convex(key, s, terms)?,
            };
            let cert_seed = stream::derive(key, CERT_STREAM);
            let verdict = certification::check_class(
                &spec,
                class,
                &self.interval,
                self.resolution,
                cert_seed,
            )?;
            if verdict.passed() {
                return Ok((spec, redraw));
            }
        }
        Err(Error::RedrawLimit(self.max_redraws))
    }

    fn run(&self, root_seed: u64, index: u64, trial_seed: u64) -> Result<TrialRecord> {
        let entry = self.registry.by_id(self.inequality)?;
        let exponents = self.draw_exponents(entry.arity(), trial_seed);
        let (class_f, class_g) = entry.classes(&exponents)?;
        let (f, f_redraws) = self.certified(class_f, stream::derive(trial_seed, F_STREAM))?;
        let (g, g_redraws) = match class_g {
            Some(class) => {
                let (g, r) = self.certified(class, stream::derive(trial_seed, G_STREAM))?;
                (Some(g), r)
            }
            None => (None, 0),
        };
        let report = entry.evaluate(&Case {
            f: &f,
            g: g.as_ref(),
            exponents,
            interval: self.interval,
            tolerances: self.tolerances,
        })?;
        let trial = TrialDescriptor {
            format_version: DESCRIPTOR_VERSION,
            inequality: self.inequality,
            interval: self.interval,
            tolerances: self.tolerances,
            resolution: self.resolution,
            complexity: self.complexity,
            s_range: self.s_range,
            max_redraws: self.max_redraws,
            root_seed,
            index,
            trial_seed,
            exponents,
            f_redraws,
            g_redraws,
            f,
            g,
        };
        Ok(TrialRecord { trial, report })
    }
}

fn row(record: &TrialRecord) -> TrialRow {
    let (s1, s2) = match record.trial.exponents {
        Exponents::None => (None, None),
        Exponents::Single { s } => (Some(s), None),
        Exponents::Pair { s1, s2 } => (Some(s1), Some(s2)),
    };
    TrialRow {
        index: record.trial.index,
        s1,
        s2,
        slack: record.report.slack,
        verdict: record.report.verdict,
    }
}

pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignOutcome> {
    run_campaign_with(config, &Registry::standard())
}

pub fn run_campaign_with(config: &CampaignConfig, registry: &Registry) -> Result<CampaignOutcome> {
    config.validate(registry)?;
    let plan = TrialPlan::from_config(config, registry);
    let records: Vec<TrialRecord> = (0..config.n_samples)
        .into_par_iter()
        .map(|i| plan.run(config.root_seed, i, stream::derive(config.root_seed, i)))
        .collect::<Result<_>>()?;

    let rows = records.iter().map(row).collect();
    let mut min: Option<&TrialRecord> = None;
    let mut inconclusive_count = 0;
    let mut redraw_count = 0;
    let mut violations = Vec::new();
    for record in &records {
        redraw_count += (record.trial.f_redraws + record.trial.g_redraws) as u64;
        match record.report.verdict {
            Verdict::Violated => violations.push(record.clone()),
            Verdict::Inconclusive => inconclusive_count += 1,
            Verdict::Holds => {}
        }
        let slack = record.report.slack;
        if !slack.is_nan() && min.is_none_or(|m| slack < m.report.slack) {
            min = Some(record);
        }
    }

    let report = CampaignReport {
        config: config.clone(),
        samples_run: records.len() as u64,
        min_slack: min.map_or(f64::NAN, |m| m.report.slack),
        min_slack_sample: min.cloned(),
        violations,
        inconclusive_count,
        redraw_count,
    };
    Ok(CampaignOutcome { report, rows })
}

/// Rebuilds a trial from its descriptor alone and re-evaluates it. Fails if
/// the regenerated functions differ from the recorded ones.
pub fn replay(trial: &TrialDescriptor) -> Result<InequalityReport> {
    replay_with(trial, &Registry::standard())
}

pub fn replay_with(trial: &TrialDescriptor, registry: &Registry) -> Result<InequalityReport> {
    let rebuilt = regenerate_with(trial, registry)?;
    if rebuilt.trial != *trial {
        return Err(Error::DescriptorMismatch(format!(
            "trial {} regenerates f = {} instead of f = {}",
            trial.index, rebuilt.trial.f, trial.f
        )));
    }
    Ok(rebuilt.report)
}

/// Re-runs the trial addressed by a descriptor's seed, ignoring its recorded
/// functions.
pub fn regenerate(trial: &TrialDescriptor) -> Result<TrialRecord> {
    regenerate_with(trial, &Registry::standard())
}

fn regenerate_with(trial: &TrialDescriptor, registry: &Registry) -> Result<TrialRecord> {
    if trial.format_version != DESCRIPTOR_VERSION {
        return Err(Error::VersionMismatch {
            found: trial.format_version,
            expected: DESCRIPTOR_VERSION,
        });
    }
    TrialPlan::from_descriptor(trial, registry).run(trial.root_seed, trial.index, trial.trial_seed)
}
