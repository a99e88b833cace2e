//! Complete experiments: an initial state, an ordered list of measurement
//! and preparation steps, and an optional halting (post-selection)
//! condition.
//!
//! Distributions are exact. [`evolve`] reads every agent's outcome at the end
//! of the run; the pairwise tables ([`conditional_table`],
//! [`conditional_via_renormalized_state`]) first truncate the experiment
//! after the later of the two agents, so a superobserver acting afterwards
//! cannot disturb the records being compared.

mod config;
mod distribution;
mod evolve;
pub mod presets;

use std::collections::BTreeMap;
use std::fmt;

use crate::channels::{CollapseModel, Isometry, MeasurementIsometry, PreparationIsometry};
use crate::qstate::{Registry, StateVector};
use crate::{Error, Result};

pub use config::{export_json, from_json, to_json_value, ExperimentConfig};
pub use distribution::{conditional, marginal, AgentOutcomes, ConditionalTable, JointDistribution};
pub use evolve::{
    conditional_table, conditional_via_renormalized_state, evolve, memory_state, memory_state_given,
};

#[derive(Debug, Clone, PartialEq)]
pub enum Operation {
    Measure(MeasurementIsometry),
    Prepare(PreparationIsometry),
}

impl Operation {
    pub fn agent(&self) -> &str {
        self.isometry().agent()
    }

    pub fn isometry(&self) -> &dyn Isometry {
        match self {
            Operation::Measure(m) => m,
            Operation::Prepare(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub time: u32,
    pub op: Operation,
}

impl Step {
    pub fn measure(time: u32, iso: MeasurementIsometry) -> Self {
        Self {
            time,
            op: Operation::Measure(iso),
        }
    }

    pub fn prepare(time: u32, iso: PreparationIsometry) -> Self {
        Self {
            time,
            op: Operation::Prepare(iso),
        }
    }
}

/// Agent → outcome label.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeAssignment(BTreeMap<String, String>);

impl OutcomeAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, agent: &str, outcome: &str) -> Self {
        self.0.insert(agent.to_string(), outcome.to_string());
        self
    }

    pub fn insert(&mut self, agent: &str, outcome: &str) {
        self.0.insert(agent.to_string(), outcome.to_string());
    }

    pub fn get(&self, agent: &str) -> Option<&str> {
        self.0.get(agent).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(a, o)| (a.as_str(), o.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for OutcomeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(a, o)| format!("{a}={o}")).collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl<A: AsRef<str>, O: AsRef<str>> FromIterator<(A, O)> for OutcomeAssignment {
    fn from_iter<T: IntoIterator<Item = (A, O)>>(iter: T) -> Self {
        Self(
            iter.into_iter()
                .map(|(a, o)| (a.as_ref().to_string(), o.as_ref().to_string()))
                .collect(),
        )
    }
}

/// An immutable, validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    name: String,
    initial: StateVector,
    steps: Vec<Step>,
    halting: Option<OutcomeAssignment>,
}

impl ExperimentSpec {
    /// Validates step ordering and label resolution.
    ///
    /// Times must be non-decreasing. A time may repeat only for a `prepare`
    /// step by the same agent as the step before it (a measure-and-prepare
    /// instrument). Each agent measures at most once.
    pub fn new(
        name: &str,
        initial: StateVector,
        steps: Vec<Step>,
        halting: Option<OutcomeAssignment>,
    ) -> Result<Self> {
        if !initial.is_normalized() {
            return Err(Error::NotNormalized(initial.norm_sqr()));
        }
        let invalid = |msg: String| Err(Error::InvalidExperiment(msg));
        let mut registry = initial.registry().clone();
        let mut measuring: Vec<&str> = Vec::new();
        for (k, step) in steps.iter().enumerate() {
            if k > 0 {
                let prev = &steps[k - 1];
                if step.time < prev.time {
                    return invalid(format!(
                        "step {k} at t{} precedes t{}",
                        step.time, prev.time
                    ));
                }
                if step.time == prev.time
                    && !(matches!(step.op, Operation::Prepare(_))
                        && step.op.agent() == prev.op.agent())
                {
                    return invalid(format!(
                        "step {k} repeats t{} without being a preparation by `{}`",
                        step.time,
                        prev.op.agent()
                    ));
                }
            }
            let iso = step.op.isometry();
            for t in iso.targets() {
                if !registry.contains(t) {
                    return Err(Error::UnknownLabel(t.clone()));
                }
            }
            // measured factors must match the registry's subsystems exactly
            if let Operation::Measure(m) = &step.op {
                for s in m.measured_registry().subsystems() {
                    if registry.get(s.label())? != s {
                        return invalid(format!(
                            "`{}` measures `{}` with a mismatched basis",
                            m.agent(),
                            s.label()
                        ));
                    }
                }
                if measuring.contains(&m.agent()) {
                    return invalid(format!("agent `{}` measures twice", m.agent()));
                }
                measuring.push(m.agent());
            }
            if let Operation::Prepare(p) = &step.op {
                for s in p.control().subsystems() {
                    if registry.get(s.label())? != s {
                        return invalid(format!("control `{}` mismatches the registry", s.label()));
                    }
                }
            }
            let appended = iso.appended();
            if registry.contains(appended.label()) {
                return Err(Error::LabelCollision(appended.label().to_string()));
            }
            registry.push(appended.clone())?;
        }
        let spec = Self {
            name: name.to_string(),
            initial,
            steps,
            halting: None,
        };
        if let Some(h) = &halting {
            for (agent, outcome) in h.iter() {
                spec.measurement(agent)?.outcome_index(outcome)?;
            }
        }
        Ok(Self { halting, ..spec })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    /// Registry of the initial state.
    pub fn registry(&self) -> &Registry {
        self.initial.registry()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn halting(&self) -> Option<&OutcomeAssignment> {
        self.halting.as_ref()
    }

    /// Registry after every step, memories and outputs appended in order.
    pub fn final_registry(&self) -> Registry {
        let mut reg = self.registry().clone();
        for s in &self.steps {
            reg.push(s.op.isometry().appended().clone())
                .expect("validated at construction");
        }
        reg
    }

    /// Measuring agents in step order.
    pub fn agents(&self) -> Vec<&str> {
        self.measurements().map(|(_, m)| m.agent()).collect()
    }

    pub fn measurements(&self) -> impl Iterator<Item = (usize, &MeasurementIsometry)> {
        self.steps
            .iter()
            .enumerate()
            .filter_map(|(k, s)| match &s.op {
                Operation::Measure(m) => Some((k, m)),
                Operation::Prepare(_) => None,
            })
    }

    pub fn measurement(&self, agent: &str) -> Result<&MeasurementIsometry> {
        self.measurements()
            .find(|(_, m)| m.agent() == agent)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::UnknownAgent(agent.to_string()))
    }

    /// Step index and time of an agent's measurement.
    pub fn step_of(&self, agent: &str) -> Result<(usize, u32)> {
        self.measurements()
            .find(|(_, m)| m.agent() == agent)
            .map(|(k, _)| (k, self.steps[k].time))
            .ok_or_else(|| Error::UnknownAgent(agent.to_string()))
    }

    /// Case-insensitive agent lookup returning the canonical label.
    pub fn resolve_agent(&self, name: &str) -> Result<&str> {
        self.agents()
            .into_iter()
            .find(|a| a.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownAgent(name.to_string()))
    }

    /// Rejects a subjective model naming an agent that never measures.
    pub fn check_model(&self, model: &CollapseModel) -> Result<()> {
        if let CollapseModel::SubjectiveCollapse(a) = model {
            self.measurement(a)?;
        }
        Ok(())
    }

    /// The experiment cut right after the last measurement among `agents`
    /// (plus any preparation that belongs to the same instrument). The
    /// halting condition survives only if all of its agents remain.
    pub fn truncated_after(&self, agents: &[&str]) -> Result<ExperimentSpec> {
        let mut last = 0;
        for a in agents {
            last = last.max(self.step_of(a)?.0);
        }
        let (time, agent) = (self.steps[last].time, self.steps[last].op.agent());
        let mut end = last + 1;
        while end < self.steps.len()
            && self.steps[end].time == time
            && self.steps[end].op.agent() == agent
        {
            end += 1;
        }
        let steps = self.steps[..end].to_vec();
        let kept = |a: &str| {
            steps
                .iter()
                .any(|s| matches!(&s.op, Operation::Measure(m) if m.agent() == a))
        };
        let halting = self
            .halting
            .as_ref()
            .filter(|h| h.iter().all(|(a, _)| kept(a)))
            .cloned();
        Ok(ExperimentSpec {
            name: self.name.clone(),
            initial: self.initial.clone(),
            steps,
            halting,
        })
    }
}
