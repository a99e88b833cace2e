use std::collections::BTreeMap;

use crate::channels::{
    apply_isometry, branch_decomposition, CollapseModel, Isometry, MeasurementIsometry,
};
use crate::qstate::{born_probability, DensityMatrix, Projector, StateVector};
use crate::{tol, Error, Result};

use super::distribution::{conditional, AgentOutcomes, ConditionalTable, JointDistribution};
use super::{ExperimentSpec, Operation};

/// One term of the classical mixture produced by collapsing agents.
#[derive(Debug, Clone)]
struct Member {
    weight: f64,
    state: StateVector,
    /// Outcome indices of agents whose measurement collapsed this member.
    record: BTreeMap<String, usize>,
}

/// Runs every step. Collapsing measurements split members into branches;
/// `pin` keeps only one branch of a collapsing agent (weights are left
/// unnormalized so they sum to that outcome's probability).
fn run(
    spec: &ExperimentSpec,
    model: &CollapseModel,
    pin: Option<(&str, usize)>,
) -> Result<Vec<Member>> {
    let mut members = vec![Member {
        weight: 1.0,
        state: spec.initial().clone(),
        record: BTreeMap::new(),
    }];
    for step in spec.steps() {
        match &step.op {
            Operation::Measure(m) if model.collapses(m.agent()) => {
                let mut next = Vec::new();
                for member in members {
                    for (z, b) in branch_decomposition(&member.state, m)?
                        .into_iter()
                        .enumerate()
                    {
                        let Some(state) = b.state else { continue };
                        if matches!(pin, Some((a, k)) if a == m.agent() && k != z) {
                            continue;
                        }
                        let mut record = member.record.clone();
                        record.insert(m.agent().to_string(), z);
                        next.push(Member {
                            weight: member.weight * b.probability,
                            state,
                            record,
                        });
                    }
                }
                members = next;
            }
            op => {
                for member in &mut members {
                    member.state = apply_isometry(&member.state, op.isometry())?;
                }
            }
        }
    }
    Ok(members)
}

fn alphabet(m: &MeasurementIsometry) -> AgentOutcomes {
    AgentOutcomes {
        agent: m.agent().to_string(),
        outcomes: m.outcomes().to_vec(),
        completion: (0..m.outcomes().len())
            .map(|i| m.is_completion(i))
            .collect(),
    }
}

/// Exact joint distribution of every agent's outcome under `model`.
///
/// Agents that the model collapses contribute the branch they were
/// collapsed onto; all other agents are read from their memory registers at
/// the end of the run.
pub fn evolve(spec: &ExperimentSpec, model: &CollapseModel) -> Result<JointDistribution> {
    spec.check_model(model)?;
    joint(spec, model)
}

/// A subjective agent cut off by a horizon simply never collapses.
fn joint(spec: &ExperimentSpec, model: &CollapseModel) -> Result<JointDistribution> {
    let members = run(spec, model, None)?;
    let registry = spec.final_registry();
    let measurements: Vec<&MeasurementIsometry> = spec.measurements().map(|(_, m)| m).collect();
    let radix: Vec<usize> = measurements.iter().map(|m| m.outcomes().len()).collect();
    let positions: Vec<Option<usize>> = measurements
        .iter()
        .map(|m| {
            (!model.collapses(m.agent())).then(|| {
                registry
                    .position(m.memory_label())
                    .expect("memory is registered")
            })
        })
        .collect();
    let mut probs = vec![0.0; radix.iter().product()];
    for member in &members {
        for (i, a) in member.state.amplitudes().iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let digits = registry.multi_index(i);
            let mut flat = 0;
            for (k, m) in measurements.iter().enumerate() {
                let z = match positions[k] {
                    Some(pos) => digits[pos],
                    None => member.record[m.agent()],
                };
                flat = flat * radix[k] + z;
            }
            probs[flat] += member.weight * p;
        }
    }
    Ok(JointDistribution::new(
        measurements.into_iter().map(alphabet).collect(),
        probs,
        model.clone(),
    ))
}

/// `P(target | given)` with the experiment cut after the later of the two
/// agents.
pub fn conditional_table(
    spec: &ExperimentSpec,
    model: &CollapseModel,
    target: &str,
    given: &str,
) -> Result<ConditionalTable> {
    spec.check_model(model)?;
    let horizon = spec.truncated_after(&[target, given])?;
    conditional(&joint(&horizon, model)?, target, given)
}

/// Members restricted to `given = outcome` and renormalized; each carries
/// the conditional weight. Collapsing agents are pinned during the run,
/// others are projected onto their memory record afterwards.
fn conditioned_members(
    spec: &ExperimentSpec,
    model: &CollapseModel,
    given: &str,
    outcome: &str,
) -> Result<Vec<Member>> {
    let z = spec.measurement(given)?.outcome_index(outcome)?;
    let mut members = if model.collapses(given) {
        run(spec, model, Some((given, z)))?
    } else {
        let registry = spec.final_registry();
        let memory = spec.measurement(given)?.memory_label();
        let proj = Projector::basis_outcome(&registry, memory, outcome)?;
        run(spec, model, None)?
            .into_iter()
            .filter_map(|m| {
                let p = match born_probability(&m.state, &proj) {
                    Ok(p) => p,
                    Err(e) => return Some(Err(e)),
                };
                if p <= tol::ZERO_BRANCH {
                    return None;
                }
                let projected = proj.full_matrix() * m.state.amplitudes();
                let state =
                    StateVector::branch(registry.clone(), projected.iter().copied().collect())
                        .and_then(|s| s.normalized());
                Some(state.map(|state| Member {
                    weight: m.weight * p,
                    state,
                    record: m.record,
                }))
            })
            .collect::<Result<Vec<_>>>()?
    };
    let total: f64 = members.iter().map(|m| m.weight).sum();
    if total <= tol::ZERO_BRANCH {
        return Err(Error::ZeroProbability {
            agent: given.to_string(),
            outcome: outcome.to_string(),
        });
    }
    for m in &mut members {
        m.weight /= total;
    }
    Ok(members)
}

/// `P(target | given = outcome)` computed from the renormalized post-state
/// rather than from the joint distribution. Uses the same horizon as
/// [`conditional_table`].
pub fn conditional_via_renormalized_state(
    spec: &ExperimentSpec,
    model: &CollapseModel,
    target: &str,
    given: &str,
    outcome: &str,
) -> Result<Vec<(String, f64)>> {
    spec.check_model(model)?;
    let horizon = spec.truncated_after(&[target, given])?;
    let members = conditioned_members(&horizon, model, given, outcome)?;
    let m = horizon.measurement(target)?;
    let mut out = vec![0.0; m.outcomes().len()];
    if model.collapses(target) {
        for member in &members {
            out[member.record[target]] += member.weight;
        }
    } else {
        let registry = horizon.final_registry();
        for (k, o) in m.outcomes().iter().enumerate() {
            let proj = Projector::basis_outcome(&registry, m.memory_label(), o)?;
            for member in &members {
                out[k] += member.weight * born_probability(&member.state, &proj)?;
            }
        }
    }
    Ok(m.outcomes().iter().cloned().zip(out).collect())
}

fn reduced(spec: &ExperimentSpec, members: &[Member], discard: &[&str]) -> Result<DensityMatrix> {
    let registry = spec.final_registry();
    for d in discard {
        registry.get(d)?;
    }
    let keep: Vec<&str> = registry.labels().filter(|l| !discard.contains(l)).collect();
    let terms: Vec<(f64, StateVector)> = members
        .iter()
        .map(|m| (m.weight, m.state.clone()))
        .collect();
    DensityMatrix::mixture(&terms)?.partial_trace(&keep)
}

/// Final state of the whole run with `discard` traced out.
pub fn memory_state(
    spec: &ExperimentSpec,
    model: &CollapseModel,
    discard: &[&str],
) -> Result<DensityMatrix> {
    spec.check_model(model)?;
    reduced(spec, &run(spec, model, None)?, discard)
}

/// Final state conditioned on `given = (agent, outcome)` and renormalized,
/// with `discard` traced out.
pub fn memory_state_given(
    spec: &ExperimentSpec,
    model: &CollapseModel,
    given: (&str, &str),
    discard: &[&str],
) -> Result<DensityMatrix> {
    spec.check_model(model)?;
    let members = conditioned_members(spec, model, given.0, given.1)?;
    reduced(spec, &members, discard)
}
