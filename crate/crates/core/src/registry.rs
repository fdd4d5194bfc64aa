//! Inequality evaluators behind a common trait, looked up by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::certification::FunctionClass;
use crate::error::{Error, Result};
use crate::function_model::{FunctionSpec, Interval};
use crate::inequality::{self, InequalityId, InequalityReport, Tolerances};

/// How many s-exponents an inequality takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentArity {
    None,
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Exponents {
    None,
    Single { s: f64 },
    Pair { s1: f64, s2: f64 },
}

impl Exponents {
    pub fn arity(&self) -> ExponentArity {
        match self {
            Exponents::None => ExponentArity::None,
            Exponents::Single { .. } => ExponentArity::One,
            Exponents::Pair { .. } => ExponentArity::Two,
        }
    }
}

/// One evaluation request.
#[derive(Debug, Clone, Copy)]
pub struct Case<'a> {
    pub f: &'a FunctionSpec,
    pub g: Option<&'a FunctionSpec>,
    pub exponents: Exponents,
    pub interval: Interval,
    pub tolerances: Tolerances,
}

impl<'a> Case<'a> {
    fn g(&self, id: InequalityId) -> Result<&'a FunctionSpec> {
        self.g
            .ok_or_else(|| Error::Config(format!("inequality {id} needs a second function g")))
    }
}

pub trait Inequality: Send + Sync {
    fn id(&self) -> InequalityId;

    fn name(&self) -> &'static str {
        self.id().as_str()
    }

    fn uses_g(&self) -> bool {
        true
    }

    fn arity(&self) -> ExponentArity {
        ExponentArity::None
    }

    /// Classes the inputs must belong to for the statement to apply.
    fn classes(&self, exponents: &Exponents) -> Result<(FunctionClass, Option<FunctionClass>)>;

    fn evaluate(&self, case: &Case<'_>) -> Result<InequalityReport>;

    fn check_exponents(&self, exponents: &Exponents) -> Result<()> {
        if exponents.arity() == self.arity() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "inequality {} expects {:?} exponents, got {:?}",
                self.id(),
                self.arity(),
                exponents
            )))
        }
    }
}

struct HermiteHadamardLeft;
struct HermiteHadamardRight;
struct ConvexProduct;
struct ConvexTimesSConvex;
struct SConvexProduct;
struct MidpointCorollary;

impl Inequality for HermiteHadamardLeft {
    fn id(&self) -> InequalityId {
        InequalityId::HhLeft
    }

    fn uses_g(&self) -> bool {
        false
    }

    fn classes(&self, _: &Exponents) -> Result<(FunctionClass, Option<FunctionClass>)> {
        Ok((FunctionClass::Convex, None))
    }

    fn evaluate(&self, case: &Case<'_>) -> Result<InequalityReport> {
        self.check_exponents(&case.exponents)?;
        inequality::eval_hermite_hadamard(case.f, &case.interval, &case.tolerances).map(|(l, _)| l)
    }
}

impl Inequality for HermiteHadamardRight {
    fn id(&self) -> InequalityId {
        InequalityId::HhRight
    }

    fn uses_g(&self) -> bool {
        false
    }

    fn classes(&self, _: &Exponents) -> Result<(FunctionClass, Option<FunctionClass>)> {
        Ok((FunctionClass::Convex, None))
    }

    fn evaluate(&self, case: &Case<'_>) -> Result<InequalityReport> {
        self.check_exponents(&case.exponents)?;
        inequality::eval_hermite_hadamard(case.f, &case.interval, &case.tolerances).map(|(_, r)| r)
    }
}

impl Inequality for ConvexProduct {
    fn id(&self) -> InequalityId {
        InequalityId::T1
    }

    fn classes(&self, _: &Exponents) -> Result<(FunctionClass, Option<FunctionClass>)> {
        Ok((FunctionClass::Convex, Some(FunctionClass::Convex)))
    }

    fn evaluate(&self, case: &Case<'_>) -> Result<InequalityReport> {
        self.check_exponents(&case.exponents)?;
        inequality::eval_t1(case.f, case.g(self.id())?, &case.interval, &case.tolerances)
    }
}

impl Inequality for ConvexTimesSConvex {
    fn id(&self) -> InequalityId {
        InequalityId::T2
    }

    fn arity(&self) -> ExponentArity {
        ExponentArity::One
    }

    fn classes(&self, exponents: &Exponents) -> Result<(FunctionClass, Option<FunctionClass>)> {
        self.check_exponents(exponents)?;
        match *exponents {
            Exponents::Single { s } => {
                Ok((FunctionClass::Convex, Some(FunctionClass::SConvex { s })))
            }
            _ => unreachable!("arity checked"),
        }
    }

    fn evaluate(&self, case: &Case<'_>) -> Result<InequalityReport> {
        self.check_exponents(&case.exponents)?;
        let Exponents::Single { s } = case.exponents else {
            unreachable!("arity checked")
        };
        inequality::eval_t2(
            case.f,
            case.g(self.id())?,
            s,
            &case.interval,
            &case.tolerances,
        )
    }
}

impl Inequality for SConvexProduct {
    fn id(&self) -> InequalityId {
        InequalityId::T3
    }

    fn arity(&self) -> ExponentArity {
        ExponentArity::Two
    }

    fn classes(&self, exponents: &Exponents) -> Result<(FunctionClass, Option<FunctionClass>)> {
        self.check_exponents(exponents)?;
        match *exponents {
            Exponents::Pair { s1, s2 } => Ok((
                FunctionClass::SConvex { s: s1 },
                Some(FunctionClass::SConvex { s: s2 }),
            )),
            _ => unreachable!("arity checked"),
        }
    }

    fn evaluate(&self, case: &Case<'_>) -> Result<InequalityReport> {
        self.check_exponents(&case.exponents)?;
        let Exponents::Pair { s1, s2 } = case.exponents else {
            unreachable!("arity checked")
        };
        inequality::eval_t3(
            case.f,
            s1,
            case.g(self.id())?,
            s2,
            &case.interval,
            &case.tolerances,
        )
    }
}

impl Inequality for MidpointCorollary {
    fn id(&self) -> InequalityId {
        InequalityId::C29
    }

    fn classes(&self, _: &Exponents) -> Result<(FunctionClass, Option<FunctionClass>)> {
        Ok((FunctionClass::Convex, Some(FunctionClass::Convex)))
    }

    fn evaluate(&self, case: &Case<'_>) -> Result<InequalityReport> {
        self.check_exponents(&case.exponents)?;
        inequality::eval_c29(case.f, case.g(self.id())?, &case.interval, &case.tolerances)
    }
}

/// Name-keyed collection of evaluators.
#[derive(Clone, Default)]
pub struct Registry {
    entries: BTreeMap<&'static str, Arc<dyn Inequality>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// All six built-in evaluators.
    pub fn standard() -> Self {
        Self::new()
            .with(Arc::new(HermiteHadamardLeft))
            .with(Arc::new(HermiteHadamardRight))
            .with(Arc::new(ConvexProduct))
            .with(Arc::new(ConvexTimesSConvex))
            .with(Arc::new(SConvexProduct))
            .with(Arc::new(MidpointCorollary))
    }

    pub fn with(mut self, entry: Arc<dyn Inequality>) -> Self {
        self.register(entry);
        self
    }

    /// Adds an evaluator, replacing any previous one with the same name.
    pub fn register(&mut self, entry: Arc<dyn Inequality>) {
        self.entries.insert(entry.name(), entry);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Inequality>> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownInequality(name.to_string()))
    }

    pub fn by_id(&self, id: InequalityId) -> Result<Arc<dyn Inequality>> {
        self.get(id.as_str())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}
