//! Observer measurements as memory-entangling isometries, controlled
//! preparations, and the measurement-update rule.
//!
//! A measurement by agent `X` in basis `{|m_i⟩}` is the isometry
//! `|m_i⟩ ↦ |m_i⟩ ⊗ |z_i⟩` that appends `X`'s memory subsystem to the end
//! of the registry. Whether an agent's measurement additionally triggers the
//! Lüders update is decided by a [`CollapseModel`].

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::qstate::{Registry, StateVector, Subsystem, C64};
use crate::{tol, Error, Result};

/// Common view of measurement and preparation isometries:
/// `V : H_targets → H_targets ⊗ H_appended`.
pub trait Isometry {
    fn agent(&self) -> &str;
    /// Subsystems the isometry acts on, in the order of the matrix columns.
    fn targets(&self) -> &[String];
    /// The single subsystem appended to the registry.
    fn appended(&self) -> &Subsystem;
    /// Rows indexed by `target * dim(appended) + appended`.
    fn matrix(&self) -> &DMatrix<C64>;
}

fn isometry_deviation(v: &DMatrix<C64>) -> f64 {
    let n = v.ncols();
    (v.adjoint() * v - DMatrix::<C64>::identity(n, n))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Completes an orthonormal family to a basis of the whole space by
/// Gram–Schmidt over the computational basis, in index order.
fn complete_basis(basis: &[StateVector], registry: &Registry) -> Result<Vec<StateVector>> {
    let dim = registry.dim();
    let mut out: Vec<StateVector> = basis.to_vec();
    for k in 0..dim {
        if out.len() == dim {
            break;
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[k] = C64::new(1.0, 0.0);
        let mut r = StateVector::branch(registry.clone(), amps)?;
        // two passes keep the residual orthogonal to working precision
        for _ in 0..2 {
            for b in &out {
                let c = b.inner(&r)?;
                let a = r.amplitudes() - b.amplitudes() * c;
                r = StateVector::branch(registry.clone(), a.iter().copied().collect())?;
            }
        }
        if r.norm_sqr().sqrt() > 1e-6 {
            out.push(r.normalized()?);
        }
    }
    Ok(out)
}

/// An observer's measurement, `|m_i⟩ ↦ |m_i⟩ ⊗ |z_i⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementIsometry {
    agent: String,
    measured: Vec<String>,
    basis: Vec<StateVector>,
    supplied: usize,
    memory: Subsystem,
    matrix: DMatrix<C64>,
}

impl MeasurementIsometry {
    /// Builds the isometry from an orthonormal family over the measured
    /// subsystems (taken from the basis vectors' registry). A family that
    /// spans only a subspace is completed; the extra outcomes are labelled
    /// `⊥1`, `⊥2`, ….
    pub fn new(
        agent: &str,
        basis: Vec<StateVector>,
        memory_label: &str,
        outcomes: Vec<String>,
    ) -> Result<Self> {
        let first = basis
            .first()
            .ok_or_else(|| Error::InvalidExperiment(format!("{agent}: empty measurement basis")))?;
        let measured_reg = first.registry().clone();
        if outcomes.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: outcomes.len(),
            });
        }
        if basis.len() > measured_reg.dim() {
            return Err(Error::NotOrthonormal(1.0));
        }
        let mut worst = 0.0_f64;
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let g = a.inner(b)?;
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - C64::new(want, 0.0)).norm());
            }
        }
        if worst > tol::BASIS {
            return Err(Error::NotOrthonormal(worst));
        }
        if measured_reg.contains(memory_label) {
            return Err(Error::LabelCollision(memory_label.to_string()));
        }

        let supplied = basis.len();
        let basis = complete_basis(&basis, &measured_reg)?;
        let mut labels = outcomes;
        for n in 1..=(basis.len() - supplied) {
            labels.push(format!("⊥{n}"));
        }
        let memory = Subsystem::new(memory_label, labels)?;

        let (m, k) = (measured_reg.dim(), basis.len());
        let mut matrix = DMatrix::zeros(m * k, m);
        for (z, v) in basis.iter().enumerate() {
            let amps = v.amplitudes();
            for a in 0..m {
                for b in 0..m {
                    matrix[(a * k + z, b)] += amps[a] * amps[b].conj();
                }
            }
        }
        let dev = isometry_deviation(&matrix);
        if dev > tol::BASIS {
            return Err(Error::NotIsometry(dev));
        }

        Ok(Self {
            agent: agent.to_string(),
            measured: measured_reg.labels().map(str::to_string).collect(),
            basis,
            supplied,
            memory,
            matrix,
        })
    }

    pub fn measured(&self) -> &[String] {
        &self.measured
    }

    /// The measured subsystems as a registry.
    pub fn measured_registry(&self) -> &Registry {
        self.basis[0].registry()
    }

    /// Measurement basis after completion.
    pub fn basis(&self) -> &[StateVector] {
        &self.basis
    }

    /// Caller-supplied basis vectors, before completion.
    pub fn supplied_basis(&self) -> &[StateVector] {
        &self.basis[..self.supplied]
    }

    pub fn memory(&self) -> &Subsystem {
        &self.memory
    }

    pub fn memory_label(&self) -> &str {
        self.memory.label()
    }

    pub fn outcomes(&self) -> &[String] {
        self.memory.basis_labels()
    }

    pub fn outcome_index(&self, outcome: &str) -> Result<usize> {
        self.memory
            .basis_index(outcome)
            .map_err(|_| Error::UnknownOutcome {
                agent: self.agent.clone(),
                outcome: outcome.to_string(),
            })
    }

    /// True for outcomes added by basis completion.
    pub fn is_completion(&self, index: usize) -> bool {
        index >= self.supplied
    }
}

impl Isometry for MeasurementIsometry {
    fn agent(&self) -> &str {
        &self.agent
    }
    fn targets(&self) -> &[String] {
        &self.measured
    }
    fn appended(&self) -> &Subsystem {
        &self.memory
    }
    fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }
}

/// Prepares a fresh subsystem conditioned on the computational basis state
/// of the control subsystems: `|c⟩ ↦ |c⟩ ⊗ |φ_c⟩`. With no control
/// subsystems it is an unconditional preparation.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparationIsometry {
    agent: String,
    control: Registry,
    control_labels: Vec<String>,
    prepared: Vec<StateVector>,
    output: Subsystem,
    matrix: DMatrix<C64>,
}

impl PreparationIsometry {
    /// `prepared[c]` is the state for control basis index `c`; every
    /// prepared state lives on the same single-subsystem output registry.
    pub fn new(agent: &str, control: Registry, prepared: Vec<StateVector>) -> Result<Self> {
        if prepared.len() != control.dim() {
            return Err(Error::DimensionMismatch {
                expected: control.dim(),
                got: prepared.len(),
            });
        }
        let out_reg = prepared[0].registry().clone();
        if out_reg.len() != 1 {
            return Err(Error::InvalidExperiment(format!(
                "{agent}: prepared states must live on exactly one output subsystem"
            )));
        }
        let output = out_reg.subsystems()[0].clone();
        if control.contains(output.label()) {
            return Err(Error::LabelCollision(output.label().to_string()));
        }
        for p in &prepared {
            if p.registry() != &out_reg {
                return Err(Error::RegistryMismatch);
            }
            if !p.is_normalized() {
                return Err(Error::NotNormalized(p.norm_sqr()));
            }
        }
        let (m, k) = (control.dim(), output.dim());
        let mut matrix = DMatrix::zeros(m * k, m);
        for (c, p) in prepared.iter().enumerate() {
            for (o, a) in p.amplitudes().iter().enumerate() {
                matrix[(c * k + o, c)] = *a;
            }
        }
        let dev = isometry_deviation(&matrix);
        if dev > tol::CONSTRUCTION {
            return Err(Error::NotIsometry(dev));
        }
        Ok(Self {
            agent: agent.to_string(),
            control_labels: control.labels().map(str::to_string).collect(),
            control,
            prepared,
            output,
            matrix,
        })
    }

    pub fn control(&self) -> &Registry {
        &self.control
    }

    pub fn prepared(&self) -> &[StateVector] {
        &self.prepared
    }

    pub fn output(&self) -> &Subsystem {
        &self.output
    }
}

impl Isometry for PreparationIsometry {
    fn agent(&self) -> &str {
        &self.agent
    }
    fn targets(&self) -> &[String] {
        &self.control_labels
    }
    fn appended(&self) -> &Subsystem {
        &self.output
    }
    fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }
}

/// Which measurements apply the update rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CollapseModel {
    /// Every measurement is an isometry; the update rule is never applied.
    NoCollapse,
    /// Every measurement collapses, for all observers.
    ObjectiveCollapse,
    /// Only the named agent's own measurement collapses.
    SubjectiveCollapse(String),
}

impl CollapseModel {
    pub fn subjective(agent: &str) -> Self {
        CollapseModel::SubjectiveCollapse(agent.to_string())
    }

    pub fn collapses(&self, agent: &str) -> bool {
        match self {
            CollapseModel::NoCollapse => false,
            CollapseModel::ObjectiveCollapse => true,
            CollapseModel::SubjectiveCollapse(a) => a == agent,
        }
    }

    /// Short tag used in tables and reports: `ism`, `objective`, `clps:X`.
    pub fn tag(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for CollapseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollapseModel::NoCollapse => write!(f, "ism"),
            CollapseModel::ObjectiveCollapse => write!(f, "objective"),
            CollapseModel::SubjectiveCollapse(a) => write!(f, "clps:{a}"),
        }
    }
}

impl FromStr for CollapseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ism" | "none" | "no-collapse" | "unitary" => Ok(CollapseModel::NoCollapse),
            "objective" | "obj" => Ok(CollapseModel::ObjectiveCollapse),
            _ => match s.split_once(':') {
                Some(("clps" | "subjective", agent)) if !agent.is_empty() => {
                    Ok(CollapseModel::subjective(agent))
                }
                _ => Err(Error::Config(format!("unknown collapse model `{s}`"))),
            },
        }
    }
}

/// `V|ψ⟩`, appending the isometry's new subsystem at the end of the registry.
pub fn apply_isometry<I: Isometry + ?Sized>(state: &StateVector, iso: &I) -> Result<StateVector> {
    let appended = Registry::from_subsystems([iso.appended().clone()])?;
    state.apply_local(iso.targets(), iso.matrix(), &appended)
}

/// Lüders update: measure, then project onto `outcome`'s memory record and
/// renormalize.
pub fn collapse(
    state: &StateVector,
    iso: &MeasurementIsometry,
    outcome: &str,
) -> Result<StateVector> {
    let z = iso.outcome_index(outcome)?;
    let branch = apply_isometry(state, iso)?.project_basis(iso.memory_label(), z)?;
    if branch.norm_sqr() / state.norm_sqr() <= tol::ZERO_BRANCH {
        return Err(Error::ZeroProbability {
            agent: iso.agent().to_string(),
            outcome: outcome.to_string(),
        });
    }
    branch.normalized()
}

/// One outcome of a measurement together with its renormalized post-state.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub outcome: String,
    pub probability: f64,
    /// `None` for impossible outcomes.
    pub state: Option<StateVector>,
}

/// Enumerates all outcomes of `iso` on `state` with their Born weights.
pub fn branch_decomposition(state: &StateVector, iso: &MeasurementIsometry) -> Result<Vec<Branch>> {
    let applied = apply_isometry(state, iso)?;
    let norm = state.norm_sqr();
    iso.outcomes()
        .iter()
        .enumerate()
        .map(|(z, outcome)| {
            let b = applied.project_basis(iso.memory_label(), z)?;
            let p = b.norm_sqr() / norm;
            Ok(if p <= tol::ZERO_BRANCH {
                Branch {
                    outcome: outcome.clone(),
                    probability: 0.0,
                    state: None,
                }
            } else {
                Branch {
                    outcome: outcome.clone(),
                    probability: p,
                    state: Some(b.normalized()?),
                }
            })
        })
        .collect()
}
