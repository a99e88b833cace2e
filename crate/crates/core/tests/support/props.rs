//! Strategies and checks shared by the property suite and the acceptance
//! harness. Every check returns `Err` with a description on failure.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use wigner_core::channels::{apply_isometry, branch_decomposition};
use wigner_core::experiment::{
    conditional_table, conditional_via_renormalized_state, evolve, marginal, Step,
};
use wigner_core::qstate::{born_probability, projector_from_basis_vector, Subsystem};
use wigner_core::storyplot::{
    check_compatibility, project, validate_relations, Relation, RelationGroup, RelationVerdict,
};
use wigner_core::{
    CollapseModel, CompatibilityConstraint, DensityMatrix, Entry, Error, Event, EventSchema,
    ExperimentSpec, MeasurementIsometry, Plot, Registry, StateVector, Story, C64,
};

type Check = Result<(), TestCaseError>;

fn fail<T>(msg: String) -> Result<T, TestCaseError> {
    Err(TestCaseError::fail(msg))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        fail(msg())
    }
}

fn core<T>(r: wigner_core::Result<T>) -> Result<T, TestCaseError> {
    r.map_err(|e| TestCaseError::fail(e.to_string()))
}

// ---------- linear algebra inputs ----------

/// Raw numbers from which states and bases are built deterministically.
#[derive(Debug, Clone)]
pub struct Seeds(pub Vec<(f64, f64)>);

impl Seeds {
    fn take(&self, offset: usize, n: usize) -> Vec<C64> {
        (0..n)
            .map(|i| {
                let (re, im) = self.0[(offset + i) % self.0.len()];
                C64::new(re, im)
            })
            .collect()
    }
}

fn seeds(n: usize) -> impl Strategy<Value = Seeds> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(Seeds)
}

fn normalize(v: &mut [C64]) -> f64 {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

/// Gram-Schmidt over the seed vectors; drops nearly dependent ones.
fn orthonormal(raw: Vec<Vec<C64>>) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for mut v in raw {
        for b in &out {
            let c: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= c * bi;
            }
        }
        if normalize(&mut v) > 1e-3 {
            out.push(v);
        }
    }
    out
}

/// Subsystem dimensions with product at most 16.
fn dims() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=4, 1..=3).prop_filter("total dimension ≤ 16", |d| {
        d.iter().product::<usize>() <= 16
    })
}

fn registry(dims: &[usize]) -> Registry {
    Registry::from_subsystems(dims.iter().enumerate().map(|(i, &d)| {
        Subsystem::new(format!("q{i}"), (0..d).map(|k| k.to_string()).collect()).unwrap()
    }))
    .unwrap()
}

fn state(reg: &Registry, s: &Seeds, offset: usize) -> Option<StateVector> {
    let mut v = s.take(offset, reg.dim());
    (normalize(&mut v) > 1e-3).then(|| StateVector::new(reg.clone(), v).unwrap())
}

/// A random state and a random (possibly partial) measurement on a subset
/// of its subsystems whose dimension is at most 4.
#[derive(Debug, Clone)]
pub struct MeasureCase {
    pub dims: Vec<usize>,
    pub mask: u8,
    pub vectors: usize,
    pub seeds: Seeds,
}

pub fn measure_case() -> impl Strategy<Value = MeasureCase> {
    (dims(), any::<u8>(), 1usize..=4, seeds(48)).prop_map(|(dims, mask, vectors, seeds)| {
        MeasureCase {
            dims,
            mask,
            vectors,
            seeds,
        }
    })
}

fn targets(reg: &Registry, mask: u8) -> Vec<String> {
    let labels: Vec<String> = reg.labels().map(str::to_string).collect();
    let mut chosen: Vec<String> = labels
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, l)| l.clone())
        .collect();
    if chosen.is_empty() || reg.select(&chosen).unwrap().dim() > 4 {
        chosen = vec![labels[mask as usize % labels.len()].clone()];
    }
    chosen
}

fn measurement(
    reg: &Registry,
    mask: u8,
    vectors: usize,
    s: &Seeds,
    offset: usize,
    agent: &str,
) -> Option<MeasurementIsometry> {
    let sub = reg.select(&targets(reg, mask)).unwrap();
    let n = sub.dim();
    let raw: Vec<Vec<C64>> = (0..vectors.min(n))
        .map(|k| s.take(offset + 7 * k, n))
        .collect();
    let basis = orthonormal(raw);
    if basis.is_empty() {
        return None;
    }
    let outcomes = (0..basis.len()).map(|k| format!("o{k}")).collect();
    let vecs = basis
        .into_iter()
        .map(|v| StateVector::new(sub.clone(), v).unwrap())
        .collect();
    Some(MeasurementIsometry::new(agent, vecs, agent, outcomes).unwrap())
}

impl MeasureCase {
    fn build(&self) -> Option<(StateVector, MeasurementIsometry)> {
        let reg = registry(&self.dims);
        Some((
            state(&reg, &self.seeds, 0)?,
            measurement(&reg, self.mask, self.vectors, &self.seeds, 17, "M")?,
        ))
    }
}

/// `‖Vψ‖ = ‖ψ‖` within 1e-12.
pub fn isometry_preserves_norm(case: &MeasureCase) -> Check {
    let Some((psi, iso)) = case.build() else {
        return Ok(());
    };
    let out = core(apply_isometry(&psi, &iso))?;
    let dev = (out.norm_sqr() - psi.norm_sqr()).abs();
    ensure(dev <= 1e-12, || format!("norm deviation {dev:e}"))
}

/// Branch weights and projector expectations both sum to 1 within 1e-12,
/// and distinct outcome projectors are orthogonal within 1e-12.
pub fn born_completeness(case: &MeasureCase) -> Check {
    let Some((psi, iso)) = case.build() else {
        return Ok(());
    };
    let branches = core(branch_decomposition(&psi, &iso))?;
    let total: f64 = branches.iter().map(|b| b.probability).sum();
    ensure((total - 1.0).abs() <= 1e-12, || {
        format!("branch total {total}")
    })?;
    let projectors = iso
        .basis()
        .iter()
        .map(|b| projector_from_basis_vector(b, psi.registry()))
        .collect::<wigner_core::Result<Vec<_>>>();
    let projectors = core(projectors)?;
    let mut born = 0.0;
    for p in &projectors {
        born += core(born_probability(&psi, p))?;
    }
    ensure((born - 1.0).abs() <= 1e-12, || {
        format!("projector total {born}")
    })?;
    for (i, p) in projectors.iter().enumerate() {
        for q in &projectors[i + 1..] {
            let prod = (p.full_matrix() * q.full_matrix()).norm();
            ensure(prod <= 1e-12, || format!("projector overlap {prod:e}"))?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct TraceCase {
    pub dims: Vec<usize>,
    pub weights: Vec<f64>,
    pub keep: u8,
    pub seeds: Seeds,
}

pub fn trace_case() -> impl Strategy<Value = TraceCase> {
    (
        dims(),
        prop::collection::vec(0.05f64..1.0, 1..=3),
        any::<u8>(),
        seeds(64),
    )
        .prop_map(|(dims, weights, keep, seeds)| TraceCase {
            dims,
            weights,
            keep,
            seeds,
        })
}

/// `tr(tr_B ρ) = tr ρ` within 1e-12 for a random mixture and kept subset.
pub fn partial_trace_preserves_trace(case: &TraceCase) -> Check {
    let reg = registry(&case.dims);
    let total: f64 = case.weights.iter().sum();
    let mut terms = Vec::new();
    for (k, w) in case.weights.iter().enumerate() {
        let Some(psi) = state(&reg, &case.seeds, 13 * k) else {
            return Ok(());
        };
        terms.push((w / total, psi));
    }
    let rho = core(DensityMatrix::mixture(&terms))?;
    let keep = targets(&reg, case.keep);
    let reduced = core(rho.partial_trace(&keep))?;
    let dev = (reduced.trace() - rho.trace()).abs();
    ensure(dev <= 1e-12, || format!("trace deviation {dev:e}"))
}

// ---------- experiments ----------

/// A random sequential experiment: a state on two or three small
/// subsystems and up to three agents, each measuring some registered
/// subsystems (earlier memories included). Final dimension stays ≤ 64.
#[derive(Debug, Clone)]
pub struct ExperimentCase {
    pub dims: Vec<usize>,
    pub steps: Vec<(u8, usize)>,
    pub model: usize,
    pub seeds: Seeds,
}

pub fn experiment_case() -> impl Strategy<Value = ExperimentCase> {
    (
        prop::collection::vec(2usize..=3, 1..=2),
        prop::collection::vec((any::<u8>(), 1usize..=3), 2..=3),
        0usize..5,
        seeds(96),
    )
        .prop_map(|(dims, steps, model, seeds)| ExperimentCase {
            dims,
            steps,
            model,
            seeds,
        })
}

impl ExperimentCase {
    pub fn build(&self) -> Option<(ExperimentSpec, CollapseModel)> {
        let mut reg = registry(&self.dims);
        let initial = state(&reg, &self.seeds, 0)?;
        let mut steps = Vec::new();
        for (k, (mask, vectors)) in self.steps.iter().enumerate() {
            let agent = format!("X{k}");
            let m = measurement(&reg, *mask, *vectors, &self.seeds, 11 + 19 * k, &agent)?;
            if reg.dim() * m.memory().dim() > 64 {
                break;
            }
            reg.push(m.memory().clone()).unwrap();
            steps.push(Step::measure(k as u32 + 1, m));
        }
        let spec = ExperimentSpec::new("random", initial, steps, None).unwrap();
        let agents = spec.agents();
        let model = match self.model {
            0 => CollapseModel::NoCollapse,
            1 => CollapseModel::ObjectiveCollapse,
            k => CollapseModel::subjective(agents[(k - 2) % agents.len()]),
        };
        Some((spec, model))
    }
}

/// Bayes tables and renormalized-state conditionals agree within 1e-9 for
/// every agent pair and every conditioning outcome of nonzero probability;
/// every joint is nonnegative and normalized within 1e-9.
pub fn bayes_matches_renormalized(case: &ExperimentCase) -> Check {
    let Some((spec, model)) = case.build() else {
        return Ok(());
    };
    let joint = core(evolve(&spec, &model))?;
    ensure((joint.total() - 1.0).abs() <= 1e-9, || {
        format!("joint total {}", joint.total())
    })?;
    ensure(joint.iter().all(|(_, p)| p >= 0.0), || {
        "negative joint entry".into()
    })?;
    let agents: Vec<String> = spec.agents().iter().map(|a| a.to_string()).collect();
    for target in &agents {
        for given in &agents {
            if target == given {
                continue;
            }
            let table = core(conditional_table(&spec, &model, target, given))?;
            let horizon = core(spec.truncated_after(&[target, given]))?;
            let horizon_model = match horizon.check_model(&model) {
                Ok(()) => model.clone(),
                Err(_) => CollapseModel::NoCollapse,
            };
            let given_marginal = core(marginal(&core(evolve(&horizon, &horizon_model))?, given))?;
            for ((outcome, column), (_, p_given)) in table.columns().zip(&given_marginal) {
                let Some(column) = column else { continue };
                if *p_given <= 1e-10 {
                    continue;
                }
                let via = core(conditional_via_renormalized_state(
                    &spec, &model, target, given, outcome,
                ))?;
                for (b, (_, r)) in column.iter().zip(&via) {
                    let dev = (b - r).abs();
                    ensure(dev <= 1e-9, || {
                        format!("{target}|{given}={outcome} under {model}: bayes {b} vs renormalized {r}")
                    })?;
                }
            }
        }
    }
    Ok(())
}

// ---------- plots ----------

pub fn schema() -> EventSchema {
    EventSchema::new(
        &["t0", "t1", "t2"],
        &[("p", &["0", "1", "2"]), ("q", &["0", "1"])],
    )
    .unwrap()
}

/// Per event: time index and, per slot, 0 = wildcard, 1 = value, 2 = deduced,
/// with a value index.
pub type RawEvent = (usize, [(u8, usize); 2]);

pub fn raw_plot() -> impl Strategy<Value = Vec<RawEvent>> {
    prop::collection::vec(
        (0usize..3, [(0u8..3, 0usize..3), (0u8..3, 0usize..3)]),
        0..6,
    )
}

pub fn plot(raw: &[RawEvent]) -> Plot {
    let s = schema();
    let events = raw.iter().map(|(t, slots)| {
        let entries: Vec<(&str, Entry)> = ["p", "q"]
            .iter()
            .zip(slots)
            .map(|(name, (kind, v))| {
                let alphabet = &s.slot(name).unwrap().alphabet;
                let v = alphabet[v % alphabet.len()].clone();
                let e = match kind {
                    0 => Entry::Wildcard,
                    1 => Entry::Value(v),
                    _ => Entry::Deduced(v),
                };
                (*name, e)
            })
            .collect();
        Event::new(&s, &s.times()[*t], &entries).unwrap()
    });
    Plot::from_events(s.clone(), events).unwrap()
}

/// Violations of `(a, b)` and `(b, a)` name the same `(time, slot)` pairs.
pub fn compatibility_symmetric(a: &[RawEvent], b: &[RawEvent], shared: u8) -> Check {
    let (pa, pb) = (plot(a), plot(b));
    let slots: Vec<&str> = match shared % 3 {
        0 => vec!["p"],
        1 => vec!["q"],
        _ => vec!["p", "q"],
    };
    let ab = core(check_compatibility(
        &CompatibilityConstraint::new("a", "b", &slots),
        &pa,
        &pb,
    ))?;
    let ba = core(check_compatibility(
        &CompatibilityConstraint::new("b", "a", &slots),
        &pb,
        &pa,
    ))?;
    let key = |v: &wigner_core::storyplot::Violation| (v.time.clone(), v.slot.clone());
    let x: BTreeSet<_> = ab.violations.iter().map(key).collect();
    let y: BTreeSet<_> = ba.violations.iter().map(key).collect();
    ensure(x == y, || format!("{x:?} vs {y:?}"))?;
    let self_check = core(check_compatibility(
        &CompatibilityConstraint::new("a", "a", &slots),
        &pa,
        &pa,
    ))?;
    ensure(self_check.is_consistent(), || {
        "a plot clashes with itself".into()
    })
}

/// `project(project(p, S), S) = project(p, S)`.
pub fn projection_idempotent(raw: &[RawEvent], keep: u8) -> Check {
    let p = plot(raw);
    let keep: Vec<&str> = match keep % 3 {
        0 => vec!["p"],
        1 => vec!["q"],
        _ => vec!["p", "q"],
    };
    let once = core(project(&p, &keep))?;
    let twice = core(project(&once, &keep))?;
    ensure(once == twice, || format!("{once} vs {twice}"))?;
    ensure(once.len() <= p.len(), || "projection added events".into())
}

/// The three relation patterns: AND over one measurement with two values
/// is rejected; AND across two measurements and OR over one measurement
/// are accepted.
pub fn relation_patterns(first: usize, second: usize, other: usize) -> Check {
    let s = EventSchema::new(
        &["t"],
        &[("alice", &["0", "1", "2"]), ("bob", &["0", "1", "2"])],
    )
    .unwrap();
    let (a, b) = (first % 3, (first + 1 + second % 2) % 3);
    let ev =
        |slot: &str, v: usize| Event::new(&s, "t", &[(slot, Entry::Value(v.to_string()))]).unwrap();
    let map: BTreeMap<(String, String), String> = [
        (("t".into(), "alice".into()), "alice".into()),
        (("t".into(), "bob".into()), "bob".into()),
    ]
    .into();
    let story = |events: Vec<Event>, relation| {
        let plot = Plot::from_events(s.clone(), events.clone()).unwrap();
        Story::new(plot, vec![RelationGroup { relation, events }], "").unwrap()
    };
    let and_same = core(validate_relations(
        &story(vec![ev("alice", a), ev("alice", b)], Relation::And),
        &map,
    ))?;
    ensure(matches!(and_same, RelationVerdict::Rejected { .. }), || {
        "AND over one measurement accepted".into()
    })?;
    let and_distinct = core(validate_relations(
        &story(vec![ev("alice", a), ev("bob", other % 3)], Relation::And),
        &map,
    ))?;
    ensure(and_distinct == RelationVerdict::Accepted, || {
        "AND across measurements rejected".into()
    })?;
    let or_same = core(validate_relations(
        &story(vec![ev("alice", a), ev("alice", b)], Relation::Or),
        &map,
    ))?;
    ensure(or_same == RelationVerdict::Accepted, || {
        "OR over one measurement rejected".into()
    })?;
    let empty: BTreeMap<(String, String), String> = BTreeMap::new();
    let unmapped = validate_relations(
        &story(vec![ev("alice", a), ev("bob", b)], Relation::And),
        &empty,
    );
    ensure(matches!(unmapped, Err(Error::UnmappedSlot { .. })), || {
        "unmapped slot accepted".into()
    })
}
