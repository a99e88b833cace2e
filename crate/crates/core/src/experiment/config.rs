//! JSON experiment documents.
//!
//! Measurement steps store only the supplied basis; completion vectors are
//! recomputed on load. Preparation steps reuse the same fields: `targets`
//! are the control subsystems, `basis[c]` is the state prepared for control
//! index `c`, and `memory_label`/`outcomes` describe the output subsystem.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::channels::{Isometry, MeasurementIsometry, PreparationIsometry};
use crate::qstate::{Registry, StateVector, Subsystem, C64};
use crate::{tol, Error, Result};

use super::{ExperimentSpec, Operation, OutcomeAssignment, Step};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsystemConfig {
    pub label: String,
    pub dim: usize,
    pub basis_labels: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Measure,
    Prepare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepConfig {
    pub time: u32,
    pub agent: String,
    #[serde(rename = "type")]
    pub kind: StepKind,
    pub targets: Vec<String>,
    pub basis: Vec<Vec<[f64; 2]>>,
    pub memory_label: String,
    pub outcomes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HaltingConfig {
    pub agent: String,
    pub outcome: String,
}

/// Serialized form of an [`ExperimentSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub registry: Vec<SubsystemConfig>,
    /// Nonzero amplitudes keyed by comma-joined basis labels.
    pub initial: BTreeMap<String, [f64; 2]>,
    pub steps: Vec<StepConfig>,
    #[serde(default)]
    pub halting: Vec<HaltingConfig>,
}

fn pairs(v: &StateVector) -> Vec<[f64; 2]> {
    v.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

fn amps(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

/// Accepts hand-written vectors within the basis tolerance; exact inputs are
/// left untouched so exports stay byte-stable.
fn tolerant(v: StateVector) -> Result<StateVector> {
    let n = v.norm_sqr();
    if (n - 1.0).abs() <= tol::CONSTRUCTION {
        Ok(v)
    } else if (n - 1.0).abs() <= tol::BASIS {
        v.normalized()
    } else {
        Err(Error::NotNormalized(n))
    }
}

impl ExperimentConfig {
    pub fn from_spec(spec: &ExperimentSpec) -> Self {
        let reg = spec.registry();
        let registry = reg
            .subsystems()
            .iter()
            .map(|s| SubsystemConfig {
                label: s.label().to_string(),
                dim: s.dim(),
                basis_labels: s.basis_labels().to_vec(),
            })
            .collect();
        let initial = spec
            .initial()
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm_sqr() != 0.0)
            .map(|(i, z)| (reg.key_of(i), [z.re, z.im]))
            .collect();
        let steps = spec
            .steps()
            .iter()
            .map(|s| match &s.op {
                Operation::Measure(m) => StepConfig {
                    time: s.time,
                    agent: m.agent().to_string(),
                    kind: StepKind::Measure,
                    targets: m.measured().to_vec(),
                    basis: m.supplied_basis().iter().map(pairs).collect(),
                    memory_label: m.memory_label().to_string(),
                    outcomes: m.outcomes()[..m.supplied_basis().len()].to_vec(),
                },
                Operation::Prepare(p) => StepConfig {
                    time: s.time,
                    agent: p.agent().to_string(),
                    kind: StepKind::Prepare,
                    targets: p.control().labels().map(str::to_string).collect(),
                    basis: p.prepared().iter().map(pairs).collect(),
                    memory_label: p.output().label().to_string(),
                    outcomes: p.output().basis_labels().to_vec(),
                },
            })
            .collect();
        let halting = spec
            .halting()
            .map(|h| {
                h.iter()
                    .map(|(a, o)| HaltingConfig {
                        agent: a.to_string(),
                        outcome: o.to_string(),
                    })
                    .collect()
            })
            .unwrap_or_default();
        Self {
            name: spec.name().to_string(),
            registry,
            initial,
            steps,
            halting,
        }
    }

    pub fn to_spec(&self) -> Result<ExperimentSpec> {
        let mut registry = Registry::new();
        for s in &self.registry {
            if s.basis_labels.len() != s.dim {
                return Err(Error::DimensionMismatch {
                    expected: s.dim,
                    got: s.basis_labels.len(),
                });
            }
            registry.push(Subsystem::new(s.label.as_str(), s.basis_labels.clone())?)?;
        }
        let mut initial = vec![C64::new(0.0, 0.0); registry.dim()];
        for (key, [re, im]) in &self.initial {
            initial[registry.index_of_key(key)?] = C64::new(*re, *im);
        }
        let initial = tolerant(StateVector::branch(registry.clone(), initial)?)?;

        let mut running = registry;
        let mut steps = Vec::with_capacity(self.steps.len());
        for s in &self.steps {
            let targets = running.select(&s.targets)?;
            let step = match s.kind {
                StepKind::Measure => {
                    let basis = s
                        .basis
                        .iter()
                        .map(|v| StateVector::branch(targets.clone(), amps(v)))
                        .collect::<Result<Vec<_>>>()?;
                    Step::measure(
                        s.time,
                        MeasurementIsometry::new(
                            &s.agent,
                            basis,
                            &s.memory_label,
                            s.outcomes.clone(),
                        )?,
                    )
                }
                StepKind::Prepare => {
                    let labels: Vec<&str> = s.outcomes.iter().map(String::as_str).collect();
                    let out = Registry::new().with(&s.memory_label, &labels)?;
                    let prepared = s
                        .basis
                        .iter()
                        .map(|v| StateVector::branch(out.clone(), amps(v)).and_then(tolerant))
                        .collect::<Result<Vec<_>>>()?;
                    Step::prepare(
                        s.time,
                        PreparationIsometry::new(&s.agent, targets, prepared)?,
                    )
                }
            };
            let appended = step.op.isometry().appended().clone();
            if running.contains(appended.label()) {
                return Err(Error::LabelCollision(appended.label().to_string()));
            }
            running.push(appended)?;
            steps.push(step);
        }
        let halting = (!self.halting.is_empty()).then(|| {
            self.halting
                .iter()
                .map(|h| (h.agent.as_str(), h.outcome.as_str()))
                .collect::<OutcomeAssignment>()
        });
        ExperimentSpec::new(&self.name, initial, steps, halting)
    }
}

/// Parses and validates a JSON experiment document.
pub fn from_json(text: &str) -> Result<ExperimentSpec> {
    serde_json::from_str::<ExperimentConfig>(text)?.to_spec()
}

/// The config as a JSON value (object keys sorted).
pub fn to_json_value(spec: &ExperimentSpec) -> serde_json::Value {
    serde_json::to_value(ExperimentConfig::from_spec(spec)).expect("config is plain data")
}

/// Pretty printer that writes every float with 17 significant digits.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Byte-stable JSON export: sorted keys, two-space indent, floats in
/// `d.ddddddddddddddddde±x` form, trailing newline.
pub fn export_json(spec: &ExperimentSpec) -> String {
    let value = to_json_value(spec);
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("writing to a Vec cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}
