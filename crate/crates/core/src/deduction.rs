//! Certainty deductions between agents and the scenario checks built on
//! them.
//!
//! A [`DeductionRule`] records that an agent, having seen one outcome, can
//! name another agent's outcome with certainty under some collapse model.
//! [`chain`] follows such rules from a starting observation. The scenario
//! runners assemble each agent's plot from its observation and deductions and
//! check every pair of plots for compatibility.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::channels::CollapseModel;
use crate::experiment::presets::{self, WignerBasis};
use crate::experiment::{
    conditional_table, conditional_via_renormalized_state, evolve, marginal, ConditionalTable,
    ExperimentSpec, OutcomeAssignment,
};
use crate::storyplot::{
    check_compatibility, plot_from_distribution, CompatibilityConstraint, Entry, Event,
    EventSchema, Layout, Plot, Violation,
};
use crate::{tol, Error, Result};

/// `reasoner` sees `given_outcome` and concludes `target = deduced`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeductionRule {
    pub reasoner: String,
    pub given_outcome: String,
    pub target: String,
    pub deduced: String,
    pub model: String,
    pub probability: f64,
}

impl fmt::Display for DeductionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{} ⊢ {}={} [{}]",
            self.reasoner, self.given_outcome, self.target, self.deduced, self.model
        )
    }
}

/// One rule per conditioning outcome whose column is a point mass.
pub fn certainty_deductions(table: &ConditionalTable) -> Vec<DeductionRule> {
    let target = table.target();
    table
        .columns()
        .filter_map(|(given, column)| {
            let column = column?;
            let (k, p) = column
                .iter()
                .copied()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(&b.1))?;
            (p >= 1.0 - tol::CERTAINTY).then(|| DeductionRule {
                reasoner: table.given().agent.clone(),
                given_outcome: given.to_string(),
                target: target.agent.clone(),
                deduced: target.outcomes[k].clone(),
                model: table.model_tag().to_string(),
                probability: p,
            })
        })
        .collect()
}

/// Linked certainty rules starting from an observation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeductionChain {
    pub start: (String, String),
    pub rules: Vec<DeductionRule>,
}

impl DeductionChain {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Every `(agent, outcome)` the chain visits, start included.
    pub fn conclusions(&self) -> Vec<(&str, &str)> {
        let mut out = vec![(self.start.0.as_str(), self.start.1.as_str())];
        out.extend(
            self.rules
                .iter()
                .map(|r| (r.target.as_str(), r.deduced.as_str())),
        );
        out
    }

    pub fn outcome_of(&self, agent: &str) -> Option<&str> {
        self.conclusions()
            .into_iter()
            .find(|(a, _)| *a == agent)
            .map(|(_, o)| o)
    }
}

impl fmt::Display for DeductionChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.start.0, self.start.1)?;
        if self.rules.is_empty() {
            return write!(f, " (no certain deduction)");
        }
        for r in &self.rules {
            write!(f, " ⊢ {}={} [{}]", r.target, r.deduced, r.model)?;
        }
        Ok(())
    }
}

/// Follows the first applicable certainty rule until none applies.
pub fn chain(rules: &[DeductionRule], start: (&str, &str)) -> Result<DeductionChain> {
    let mut out = DeductionChain {
        start: (start.0.to_string(), start.1.to_string()),
        rules: Vec::new(),
    };
    let mut seen = BTreeSet::from([(start.0.to_string(), start.1.to_string())]);
    let mut cur = out.start.clone();
    while let Some(rule) = rules.iter().find(|r| {
        r.reasoner == cur.0 && r.given_outcome == cur.1 && r.probability >= 1.0 - tol::CERTAINTY
    }) {
        let next = (rule.target.clone(), rule.deduced.clone());
        if !seen.insert(next.clone()) {
            return Err(Error::CycleDetected {
                agent: next.0,
                outcome: next.1,
            });
        }
        out.rules.push(rule.clone());
        cur = next;
    }
    Ok(out)
}

/// A statement an agent derived, and the model it relied on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub agent: String,
    pub model: String,
    pub statement: String,
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.agent, self.model, self.statement)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedPlot {
    pub name: String,
    pub plot: Plot,
}

/// Everything a scenario run assembled, whatever the verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRun {
    pub scenario: String,
    pub post_selection: Option<BTreeMap<String, String>>,
    pub chain: Option<DeductionChain>,
    pub derivations: Vec<Derivation>,
    pub plots: Vec<NamedPlot>,
    pub constraints: Vec<CompatibilityConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContradictionReport {
    #[serde(flatten)]
    pub run: ScenarioRun,
    pub constraint: CompatibilityConstraint,
    pub violation: Violation,
    /// The clashing events as rendered in the left and right plots.
    pub clashing_events: [String; 2],
    /// The derivation that put the deduced side of the clash into its plot.
    pub offending: Derivation,
}

impl ContradictionReport {
    /// Model tag of the offending link.
    pub fn offending_model(&self) -> &str {
        &self.offending.model
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum ScenarioOutcome {
    Consistent(ScenarioRun),
    Contradiction(Box<ContradictionReport>),
}

impl ScenarioOutcome {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ScenarioOutcome::Consistent(_))
    }

    pub fn report(&self) -> Option<&ContradictionReport> {
        match self {
            ScenarioOutcome::Consistent(_) => None,
            ScenarioOutcome::Contradiction(r) => Some(r),
        }
    }

    pub fn run(&self) -> &ScenarioRun {
        match self {
            ScenarioOutcome::Consistent(r) => r,
            ScenarioOutcome::Contradiction(r) => &r.run,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports are plain data")
    }

    /// Human-readable block: chain, plots, clash marker and verdict.
    pub fn render_text(&self) -> String {
        let run = self.run();
        let mut out = format!("scenario: {}\n", run.scenario);
        if let Some(ps) = &run.post_selection {
            let parts: Vec<String> = ps.iter().map(|(a, o)| format!("{a}={o}")).collect();
            out += &format!("post-selection: {}\n", parts.join(", "));
        }
        if let Some(c) = &run.chain {
            out += &format!("chain: {c}\n");
        }
        if !run.derivations.is_empty() {
            out += "derivations:\n";
            for d in &run.derivations {
                out += &format!("  {d}\n");
            }
        }
        let width = run
            .plots
            .iter()
            .map(|p| p.name.chars().count())
            .max()
            .unwrap_or(0);
        out += "plots:\n";
        for p in &run.plots {
            let pad = width - p.name.chars().count();
            out += &format!("  {}{} = {}\n", p.name, " ".repeat(pad), p.plot);
        }
        match self {
            ScenarioOutcome::Consistent(_) => out += "verdict: consistent\n",
            ScenarioOutcome::Contradiction(r) => {
                out += &format!(
                    "clash ✗ {} in {} vs {}\n",
                    r.violation.render(),
                    r.constraint.left,
                    r.constraint.right
                );
                out += &format!("  {} ∋ {}\n", r.constraint.left, r.clashing_events[0]);
                out += &format!("  {} ∋ {}\n", r.constraint.right, r.clashing_events[1]);
                out += &format!("offending link: {}\n", r.offending);
                out += "verdict: contradiction\n";
            }
        }
        out
    }
}

/// Checks every constraint and returns the first clash, if any.
fn settle(
    run: ScenarioRun,
    offending: impl Fn(&str, &Violation) -> Derivation,
) -> Result<ScenarioOutcome> {
    let plot = |name: &str| {
        run.plots
            .iter()
            .find(|p| p.name == name)
            .map(|p| &p.plot)
            .ok_or_else(|| Error::InvalidStory(format!("no plot named `{name}`")))
    };
    for c in &run.constraints {
        let (a, b) = (plot(&c.left)?, plot(&c.right)?);
        let verdict = check_compatibility(c, a, b)?;
        if let Some(v) = verdict.violations.into_iter().next() {
            let render = |p: &Plot| -> Result<String> {
                let t = v.time.as_str();
                let stated = p.stated(t, &v.slot)?;
                let e = p
                    .events()
                    .find(|e| {
                        p.schema().times()[e.time()] == t
                            && e.entry(p.schema(), &v.slot)
                                .map(|x| stated.contains(&x))
                                .unwrap_or(false)
                    })
                    .expect("a violation cites stated entries");
                Ok(e.render(p.schema()))
            };
            let deduced_side = if v.left.iter().any(|e| matches!(e, Entry::Deduced(_))) {
                c.left.as_str()
            } else {
                c.right.as_str()
            };
            let report = ContradictionReport {
                constraint: c.clone(),
                clashing_events: [render(a)?, render(b)?],
                offending: offending(deduced_side, &v),
                violation: v,
                run,
            };
            return Ok(ScenarioOutcome::Contradiction(Box::new(report)));
        }
    }
    Ok(ScenarioOutcome::Consistent(run))
}

/// Options for the four-agent run.
#[derive(Debug, Clone, PartialEq)]
pub struct FrScenario {
    /// Model `F1` uses to predict `W`. `A` and `F2` always reason unitarily.
    pub f1_model: CollapseModel,
    /// Condition on the halting round `{A: o, W: O}`.
    pub post_select: bool,
}

const FR_LAYOUT: [(&str, &str, &str); 4] = [
    ("F1", "t1", "f1"),
    ("F2", "t2", "f2"),
    ("A", "t3", "a"),
    ("W", "t4", "w"),
];

fn fr_schema(spec: &ExperimentSpec) -> Result<(EventSchema, Layout)> {
    let mut slots = Vec::new();
    for (agent, _, slot) in FR_LAYOUT {
        let m = spec.measurement(agent)?;
        let alphabet: Vec<&str> = (0..m.outcomes().len())
            .filter(|&i| !m.is_completion(i))
            .map(|i| m.outcomes()[i].as_str())
            .collect();
        slots.push((slot, alphabet));
    }
    let slot_refs: Vec<(&str, &[&str])> = slots.iter().map(|(s, a)| (*s, a.as_slice())).collect();
    let schema = EventSchema::new(&["t0", "t1", "t2", "t3", "t4"], &slot_refs)?;
    let layout = FR_LAYOUT
        .iter()
        .map(|(a, t, s)| (a.to_string(), (t.to_string(), s.to_string())))
        .collect();
    Ok((schema, layout))
}

fn plot_name(agent: &str) -> String {
    format!("s^{agent}")
}

/// Every unordered pair of plots, constrained on all slots.
fn all_pairs(names: &[String], slots: &[&str]) -> Vec<CompatibilityConstraint> {
    let mut out = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            out.push(CompatibilityConstraint::new(a, b, slots));
        }
    }
    out
}

/// The four-agent run with `F1` using `f1_model` and post-selection on.
pub fn run_fr_contradiction(f1_model: CollapseModel) -> Result<ScenarioOutcome> {
    run_fr(&FrScenario {
        f1_model,
        post_select: true,
    })
}

pub fn run_fr(options: &FrScenario) -> Result<ScenarioOutcome> {
    let spec = presets::frauchiger_renner();
    spec.check_model(&options.f1_model)?;
    let ism = CollapseModel::NoCollapse;
    let (schema, layout) = fr_schema(&spec)?;
    let slot_of = |agent: &str| layout[agent].clone();

    // (reasoner, target, model)
    let reasoning = [
        ("A", "F2", ism.clone()),
        ("F2", "F1", ism.clone()),
        ("F1", "W", options.f1_model.clone()),
    ];
    let tables = reasoning
        .iter()
        .map(|(r, t, m)| conditional_table(&spec, m, t, r))
        .collect::<Result<Vec<_>>>()?;
    let rules: Vec<DeductionRule> = tables.iter().flat_map(certainty_deductions).collect();
    let derivation = |r: &DeductionRule| Derivation {
        agent: r.reasoner.clone(),
        model: r.model.clone(),
        statement: format!(
            "P({}={} | {}={}) = {:.5}",
            r.target, r.deduced, r.reasoner, r.given_outcome, r.probability
        ),
    };
    let names: Vec<String> = ["F1", "F2", "A", "W"]
        .iter()
        .map(|a| plot_name(a))
        .collect();
    let slot_names: Vec<&str> = schema.slots().iter().map(|s| s.name.as_str()).collect();
    let constraints = all_pairs(&names, &slot_names);
    let joint = evolve(&spec, &ism)?;
    let halting = spec.halting().cloned().expect("preset halts");

    if !options.post_select {
        // each agent knows only its own possible outcomes and, for every
        // outcome, what it would predict about its target
        let mut plots = Vec::new();
        for agent in ["F1", "F2", "A", "W"] {
            let mut plot = plot_from_distribution(
                &schema,
                &joint,
                &OutcomeAssignment::new(),
                &[],
                &layout,
                &[agent],
            )?;
            if let Some(k) = reasoning.iter().position(|(r, _, _)| *r == agent) {
                let target = reasoning[k].1;
                let (t, s) = slot_of(target);
                let mut support = BTreeSet::new();
                for (_, column) in tables[k].columns() {
                    for (o, p) in tables[k]
                        .target()
                        .outcomes
                        .iter()
                        .zip(column.unwrap_or(&[]))
                    {
                        if *p > tol::ZERO_BRANCH {
                            support.insert(o.clone());
                        }
                    }
                }
                for o in support {
                    plot.insert(Event::new(&schema, &t, &[(s.as_str(), Entry::Deduced(o))])?)?;
                }
            }
            plots.push(NamedPlot {
                name: plot_name(agent),
                plot,
            });
        }
        let run = ScenarioRun {
            scenario: spec.name().to_string(),
            post_selection: None,
            chain: None,
            derivations: rules.iter().map(derivation).collect(),
            plots,
            constraints,
        };
        return settle(run, |_, _| unreachable_offender());
    }

    let start = ("A", halting.get("A").expect("halting names A"));
    let chain = chain(&rules, start)?;
    let conditioned = joint.conditioned_on(&halting)?;
    let mut plots = Vec::new();
    for agent in ["F1", "F2", "A", "W"] {
        let mut deductions = Vec::new();
        let mut observed = OutcomeAssignment::new();
        let own = halting.get(agent).or_else(|| chain.outcome_of(agent));
        if let Some(o) = own {
            observed.insert(agent, o);
        }
        if agent == "W" {
            // the halting announcement tells W what A saw
            let (t, s) = slot_of("A");
            deductions.push((t, s, halting.get("A").expect("halting names A").to_string()));
        }
        if let Some(r) = chain.rules.iter().find(|r| r.reasoner == agent) {
            let (t, s) = slot_of(&r.target);
            deductions.push((t, s, r.deduced.clone()));
        }
        let deductions: Vec<(&str, &str, &str)> = deductions
            .iter()
            .map(|(t, s, v)| (t.as_str(), s.as_str(), v.as_str()))
            .collect();
        let alternatives: Vec<&str> = if own.is_none() { vec![agent] } else { vec![] };
        let plot = plot_from_distribution(
            &schema,
            &conditioned,
            &observed,
            &deductions,
            &layout,
            &alternatives,
        )?;
        plots.push(NamedPlot {
            name: plot_name(agent),
            plot,
        });
    }
    let run = ScenarioRun {
        scenario: spec.name().to_string(),
        post_selection: Some(
            halting
                .iter()
                .map(|(a, o)| (a.to_string(), o.to_string()))
                .collect(),
        ),
        derivations: chain.rules.iter().map(derivation).collect(),
        chain: Some(chain.clone()),
        plots,
        constraints,
    };
    let rules_by_agent = chain.rules.clone();
    let layout_for = layout.clone();
    settle(run, move |deduced_plot, v| {
        // the deduced entry in `deduced_plot` came from that agent's link, or
        // from the halting announcement for W
        let agent = deduced_plot.trim_start_matches("s^");
        let target = layout_for
            .iter()
            .find(|(_, (t, s))| *t == v.time && *s == v.slot)
            .map(|(a, _)| a.clone())
            .unwrap_or_default();
        rules_by_agent
            .iter()
            .find(|r| r.reasoner == agent && r.target == target)
            .map(derivation)
            .unwrap_or(Derivation {
                agent: agent.to_string(),
                model: "ism".into(),
                statement: format!("announced {}={}", v.slot, halting_value(v)),
            })
    })
}

fn halting_value(v: &Violation) -> String {
    v.left
        .iter()
        .chain(&v.right)
        .find_map(|e| match e {
            Entry::Deduced(x) => Some(x.clone()),
            _ => None,
        })
        .unwrap_or_default()
}

fn unreachable_offender() -> Derivation {
    Derivation {
        agent: String::new(),
        model: String::new(),
        statement: "unconditioned plots only carry alternatives".into(),
    }
}

/// Options for the two-party run with reporting bits.
#[derive(Debug, Clone, PartialEq)]
pub struct DeutschScenario {
    /// Model the friend uses to predict Wigner.
    pub friend_model: CollapseModel,
    /// Model Wigner uses.
    pub wigner_model: CollapseModel,
    pub basis: WignerBasis,
}

impl Default for DeutschScenario {
    fn default() -> Self {
        Self {
            friend_model: CollapseModel::subjective("F"),
            wigner_model: CollapseModel::NoCollapse,
            basis: WignerBasis::Superposition,
        }
    }
}

/// Friend observes `u` and a definite result (`x = 0`); asked whether
/// Wigner can obtain `-`, the friend answers `y = 1` by collapsing while
/// Wigner answers `y = 0` unitarily.
pub fn run_deutsch_contradiction() -> Result<ScenarioOutcome> {
    run_deutsch(&DeutschScenario::default())
}

pub fn run_deutsch(options: &DeutschScenario) -> Result<ScenarioOutcome> {
    let base = presets::wigner_friend(options.basis);
    base.check_model(&options.friend_model)?;
    base.check_model(&options.wigner_model)?;
    let w_outcomes = base.measurement("W")?.outcomes().to_vec();
    let (w_first, w_second) = (w_outcomes[0].as_str(), w_outcomes[1].as_str());
    let z = "u";
    let friend_tag = options.friend_model.tag();
    let wigner_tag = options.wigner_model.tag();
    let mut derivations = Vec::new();

    let (friend_y, wigner_y) = if options.basis == WignerBasis::Superposition {
        let friend_p =
            conditional_via_renormalized_state(&base, &options.friend_model, "W", "F", z)?[1].1;
        let fy = u8::from(friend_p > tol::ZERO_BRANCH);
        derivations.push(Derivation {
            agent: "F".into(),
            model: friend_tag.clone(),
            statement: format!("P(W={w_second} | F={z}) = {friend_p:.5} ⇒ y={fy}"),
        });
        let wigner_p = marginal(&evolve(&base, &options.wigner_model)?, "W")?[1].1;
        let wy = u8::from(wigner_p > tol::ZERO_BRANCH);
        derivations.push(Derivation {
            agent: "W".into(),
            model: wigner_tag.clone(),
            statement: format!("P(W={w_second}) = {wigner_p:.5} ⇒ y={wy}"),
        });
        (Some(fy), Some(wy))
    } else {
        (None, None)
    };

    let spec = presets::deutsch_variant_with(options.basis, friend_y.unwrap_or(0));
    let world = evolve(&spec, &options.wigner_model)?;
    let given_z = world.conditioned_on(&OutcomeAssignment::new().with("F", z))?;
    let w_obs = marginal(&given_z, "W")?
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(o, _)| o)
        .expect("W has outcomes");

    let w_alphabet = [w_first, w_second];
    let schema = EventSchema::new(
        &["t0", "t1", "t2"],
        &[
            ("z", &["u", "d"]),
            ("x", &["0", "1"]),
            ("w", &w_alphabet),
            ("y", &["0", "1"]),
        ],
    )?;
    let v = |x: &str| Entry::Value(x.to_string());
    let d = |x: &str| Entry::Deduced(x.to_string());
    let mut friend = Plot::from_events(
        schema.clone(),
        [Event::new(&schema, "t1", &[("z", v(z)), ("x", v("0"))])?],
    )?;
    let mut wigner_t2 = vec![("w", v(&w_obs))];
    let mut wigner = Plot::new(schema.clone());
    let mut wigner_t1: Vec<(&str, Entry)> = vec![("x", d("0"))];
    let zs;
    if let (Some(fy), Some(wy)) = (friend_y, wigner_y) {
        friend.insert(Event::new(&schema, "t2", &[("y", d(&fy.to_string()))])?)?;
        wigner_t2.push(("y", d(&wy.to_string())));
    } else {
        // a product-basis outcome reveals the friend's record
        let table = conditional_table(&spec, &options.wigner_model, "F", "W")?;
        let rule = certainty_deductions(&table)
            .into_iter()
            .find(|r| r.given_outcome == w_obs)
            .ok_or_else(|| Error::InvalidStory("Wigner cannot infer the friend's record".into()))?;
        derivations.push(Derivation {
            agent: "W".into(),
            model: rule.model.clone(),
            statement: format!(
                "P(F={} | W={}) = {:.5}",
                rule.deduced, w_obs, rule.probability
            ),
        });
        zs = rule.deduced;
        wigner_t1.push(("z", d(&zs)));
    }
    wigner.insert(Event::new(&schema, "t1", &wigner_t1)?)?;
    wigner.insert(Event::new(&schema, "t2", &wigner_t2)?)?;

    let run = ScenarioRun {
        scenario: spec.name().to_string(),
        post_selection: None,
        chain: None,
        derivations: derivations.clone(),
        plots: vec![
            NamedPlot {
                name: "s^F".into(),
                plot: friend,
            },
            NamedPlot {
                name: "s^W".into(),
                plot: wigner,
            },
        ],
        constraints: vec![CompatibilityConstraint::new("s^F", "s^W", &["z", "x", "y"])],
    };
    settle(run, move |_, _| derivations[0].clone())
}
