//! Events, plots and stories.
//!
//! An event is a time label together with one entry per slot of an
//! [`EventSchema`]. A [`Plot`] is the finite set of events an agent's story
//! commits to; the empty plot stands for a story that is meaningless with
//! respect to the schema. [`check_compatibility`] compares two plots on the
//! slots they share.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::experiment::{marginal, JointDistribution, OutcomeAssignment};
use crate::{tol, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub name: String,
    pub alphabet: Vec<String>,
}

/// Ordered time labels and ordered, finite-alphabet slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SchemaDoc")]
pub struct EventSchema {
    times: Vec<String>,
    slots: Vec<Slot>,
}

#[derive(Deserialize)]
struct SchemaDoc {
    times: Vec<String>,
    slots: Vec<Slot>,
}

impl TryFrom<SchemaDoc> for EventSchema {
    type Error = Error;
    fn try_from(d: SchemaDoc) -> Result<Self> {
        Self::from_parts(d.times, d.slots)
    }
}

impl EventSchema {
    pub fn new(times: &[&str], slots: &[(&str, &[&str])]) -> Result<Self> {
        Self::from_parts(
            times.iter().map(|t| t.to_string()).collect(),
            slots
                .iter()
                .map(|(name, alphabet)| Slot {
                    name: name.to_string(),
                    alphabet: alphabet.iter().map(|v| v.to_string()).collect(),
                })
                .collect(),
        )
    }

    pub fn from_parts(times: Vec<String>, slots: Vec<Slot>) -> Result<Self> {
        fn unique<'a>(xs: impl IntoIterator<Item = &'a String>) -> bool {
            let mut seen = BTreeSet::new();
            xs.into_iter().all(|x| seen.insert(x))
        }
        if !unique(&times) {
            return Err(Error::SchemaMismatch("duplicate time label".into()));
        }
        if !unique(slots.iter().map(|s| &s.name)) {
            return Err(Error::SchemaMismatch("duplicate slot name".into()));
        }
        for s in &slots {
            if s.alphabet.is_empty() || !unique(&s.alphabet) {
                return Err(Error::SchemaMismatch(format!(
                    "slot `{}` needs a nonempty alphabet without repeats",
                    s.name
                )));
            }
        }
        Ok(Self { times, slots })
    }

    pub fn times(&self) -> &[String] {
        &self.times
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn time_index(&self, label: &str) -> Result<usize> {
        self.times
            .iter()
            .position(|t| t == label)
            .ok_or_else(|| Error::UnknownTime(label.to_string()))
    }

    pub fn slot_index(&self, name: &str) -> Result<usize> {
        self.slots
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSlot(name.to_string()))
    }

    pub fn slot(&self, name: &str) -> Result<&Slot> {
        Ok(&self.slots[self.slot_index(name)?])
    }

    /// The schema with only `keep` slots, in schema order.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<EventSchema> {
        for k in keep {
            self.slot_index(k.as_ref())?;
        }
        Ok(Self {
            times: self.times.clone(),
            slots: self
                .slots
                .iter()
                .filter(|s| keep.iter().any(|k| k.as_ref() == s.name))
                .cloned()
                .collect(),
        })
    }
}

/// One slot of an event: an observed value, a deduced value, or `⋆`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Entry {
    #[serde(rename = "wild")]
    Wildcard,
    #[serde(rename = "v")]
    Value(String),
    #[serde(rename = "deduced")]
    Deduced(String),
}

impl Entry {
    pub fn value(&self) -> Option<&str> {
        match self {
            Entry::Wildcard => None,
            Entry::Value(v) | Entry::Deduced(v) => Some(v),
        }
    }

    pub fn is_wildcard(&self) -> bool {
        matches!(self, Entry::Wildcard)
    }

    /// `v`, `slot=v` or `⋆`.
    pub fn render(&self, slot: &str) -> String {
        match self {
            Entry::Wildcard => "⋆".into(),
            Entry::Value(v) => v.clone(),
            Entry::Deduced(v) => format!("{slot}={v}"),
        }
    }
}

/// A time index into the schema and one entry per schema slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    time: usize,
    entries: Vec<Entry>,
}

impl Event {
    /// Unlisted slots are wildcards.
    pub fn new(schema: &EventSchema, time: &str, entries: &[(&str, Entry)]) -> Result<Self> {
        let mut e = Self {
            time: schema.time_index(time)?,
            entries: vec![Entry::Wildcard; schema.slots().len()],
        };
        for (slot, entry) in entries {
            e.entries[schema.slot_index(slot)?] = entry.clone();
        }
        e.check(schema)?;
        Ok(e)
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn entry(&self, schema: &EventSchema, slot: &str) -> Result<&Entry> {
        Ok(&self.entries[schema.slot_index(slot)?])
    }

    fn check(&self, schema: &EventSchema) -> Result<()> {
        if self.time >= schema.times().len() || self.entries.len() != schema.slots().len() {
            return Err(Error::InvalidEvent(
                "event does not match the schema".into(),
            ));
        }
        for (e, s) in self.entries.iter().zip(schema.slots()) {
            if let Some(v) = e.value() {
                if !s.alphabet.iter().any(|a| a == v) {
                    return Err(Error::InvalidEvent(format!(
                        "`{v}` is not a value of slot `{}`",
                        s.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn render(&self, schema: &EventSchema) -> String {
        let mut parts = vec![schema.times()[self.time].clone()];
        parts.extend(
            self.entries
                .iter()
                .zip(schema.slots())
                .map(|(e, s)| e.render(&s.name)),
        );
        format!("({})", parts.join(", "))
    }
}

/// A finite set of events over one schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "PlotDoc", try_from = "PlotDoc")]
pub struct Plot {
    schema: EventSchema,
    events: BTreeSet<Event>,
}

#[derive(Serialize, Deserialize)]
struct EventDoc {
    t: String,
    entries: BTreeMap<String, Entry>,
}

#[derive(Serialize, Deserialize)]
struct PlotDoc {
    schema: EventSchema,
    events: Vec<EventDoc>,
}

impl From<Plot> for PlotDoc {
    fn from(p: Plot) -> Self {
        let events = p
            .events
            .iter()
            .map(|e| EventDoc {
                t: p.schema.times()[e.time].clone(),
                entries: p
                    .schema
                    .slots()
                    .iter()
                    .zip(&e.entries)
                    .map(|(s, x)| (s.name.clone(), x.clone()))
                    .collect(),
            })
            .collect();
        PlotDoc {
            schema: p.schema,
            events,
        }
    }
}

impl TryFrom<PlotDoc> for Plot {
    type Error = Error;
    fn try_from(d: PlotDoc) -> Result<Self> {
        let mut plot = Plot::new(d.schema);
        for e in d.events {
            let entries: Vec<(&str, Entry)> = e
                .entries
                .iter()
                .map(|(k, v)| (k.as_str(), v.clone()))
                .collect();
            let event = Event::new(&plot.schema, &e.t, &entries)?;
            plot.insert(event)?;
        }
        Ok(plot)
    }
}

impl Plot {
    /// The empty plot.
    pub fn new(schema: EventSchema) -> Self {
        Self {
            schema,
            events: BTreeSet::new(),
        }
    }

    pub fn from_events(
        schema: EventSchema,
        events: impl IntoIterator<Item = Event>,
    ) -> Result<Self> {
        let mut p = Self::new(schema);
        for e in events {
            p.insert(e)?;
        }
        Ok(p)
    }

    pub fn insert(&mut self, event: Event) -> Result<()> {
        event.check(&self.schema)?;
        self.events.insert(event);
        Ok(())
    }

    pub fn schema(&self) -> &EventSchema {
        &self.schema
    }

    pub fn events(&self) -> impl Iterator<Item = &Event> {
        self.events.iter()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// True for a meaningless story.
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn contains(&self, event: &Event) -> bool {
        self.events.contains(event)
    }

    /// Stated entries (non-wildcard) at a time label and slot.
    pub fn stated(&self, time: &str, slot: &str) -> Result<Vec<&Entry>> {
        let t = self.schema.time_index(time)?;
        let k = self.schema.slot_index(slot)?;
        Ok(self
            .events
            .iter()
            .filter(|e| e.time == t && !e.entries[k].is_wildcard())
            .map(|e| &e.entries[k])
            .collect())
    }
}

impl fmt::Display for Plot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.events.iter().map(|e| e.render(&self.schema)).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Restricts every event to `keep`; events that coincide afterwards merge.
pub fn project<S: AsRef<str>>(plot: &Plot, keep: &[S]) -> Result<Plot> {
    let schema = plot.schema.restrict(keep)?;
    let idx: Vec<usize> = schema
        .slots()
        .iter()
        .map(|s| plot.schema.slot_index(&s.name))
        .collect::<Result<_>>()?;
    let events = plot
        .events
        .iter()
        .map(|e| Event {
            time: e.time,
            entries: idx.iter().map(|&k| e.entries[k].clone()).collect(),
        })
        .collect();
    Ok(Plot { schema, events })
}

/// Two plots that must agree on a set of shared slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityConstraint {
    pub left: String,
    pub right: String,
    pub shared_slots: Vec<String>,
}

impl CompatibilityConstraint {
    pub fn new(left: &str, right: &str, shared_slots: &[&str]) -> Self {
        Self {
            left: left.into(),
            right: right.into(),
            shared_slots: shared_slots.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub time: String,
    pub slot: String,
    pub left: Vec<Entry>,
    pub right: Vec<Entry>,
}

impl Violation {
    pub fn render(&self) -> String {
        let side = |xs: &[Entry]| {
            xs.iter()
                .map(|e| e.render(&self.slot))
                .collect::<Vec<_>>()
                .join(" | ")
        };
        format!(
            "({}, {}): {} vs {}",
            self.time,
            self.slot,
            side(&self.left),
            side(&self.right)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityVerdict {
    pub constraint: CompatibilityConstraint,
    pub violations: Vec<Violation>,
}

impl CompatibilityVerdict {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// At every time both schemas know and every shared slot, the values the two
/// plots state must overlap. A plot that states nothing there (all
/// wildcards, or no event) places no constraint.
pub fn check_compatibility(
    c: &CompatibilityConstraint,
    a: &Plot,
    b: &Plot,
) -> Result<CompatibilityVerdict> {
    for slot in &c.shared_slots {
        let (sa, sb) = (a.schema.slot(slot), b.schema.slot(slot));
        match (sa, sb) {
            (Ok(x), Ok(y)) if x.alphabet == y.alphabet => {}
            (Ok(_), Ok(_)) => {
                return Err(Error::SchemaMismatch(format!(
                    "slot `{slot}` has different alphabets"
                )))
            }
            _ => {
                return Err(Error::SchemaMismatch(format!(
                    "slot `{slot}` is not shared"
                )))
            }
        }
    }
    let mut violations = Vec::new();
    for time in a.schema.times() {
        if b.schema.time_index(time).is_err() {
            continue;
        }
        for slot in &c.shared_slots {
            let left: Vec<Entry> = a.stated(time, slot)?.into_iter().cloned().collect();
            let right: Vec<Entry> = b.stated(time, slot)?.into_iter().cloned().collect();
            if left.is_empty() || right.is_empty() {
                continue;
            }
            let overlap = left
                .iter()
                .any(|l| right.iter().any(|r| l.value() == r.value()));
            if !overlap {
                violations.push(Violation {
                    time: time.clone(),
                    slot: slot.clone(),
                    left,
                    right,
                });
            }
        }
    }
    Ok(CompatibilityVerdict {
        constraint: c.clone(),
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationGroup {
    pub relation: Relation,
    pub events: Vec<Event>,
}

/// A plot together with how its same-time events relate and the story's
/// free-text account.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Story {
    plot: Plot,
    groups: Vec<RelationGroup>,
    account: String,
}

impl Story {
    /// Every group must hold same-time events of the plot, and every pair of
    /// distinct same-time events must share exactly one group.
    pub fn new(plot: Plot, groups: Vec<RelationGroup>, account: &str) -> Result<Self> {
        for (g, group) in groups.iter().enumerate() {
            for e in &group.events {
                if !plot.contains(e) {
                    return Err(Error::InvalidStory(format!(
                        "group {g} holds {} which is not in the plot",
                        e.render(plot.schema())
                    )));
                }
                if e.time != group.events[0].time {
                    return Err(Error::InvalidStory(format!("group {g} mixes times")));
                }
            }
        }
        let events: Vec<&Event> = plot.events().collect();
        for (i, a) in events.iter().enumerate() {
            for b in &events[i + 1..] {
                if a.time != b.time {
                    continue;
                }
                let n = groups
                    .iter()
                    .filter(|g| g.events.contains(a) && g.events.contains(b))
                    .count();
                if n != 1 {
                    return Err(Error::InvalidStory(format!(
                        "{} and {} are related by {n} groups",
                        a.render(plot.schema()),
                        b.render(plot.schema())
                    )));
                }
            }
        }
        Ok(Self {
            plot,
            groups,
            account: account.to_string(),
        })
    }

    pub fn plot(&self) -> &Plot {
        &self.plot
    }

    pub fn groups(&self) -> &[RelationGroup] {
        &self.groups
    }

    pub fn account(&self) -> &str {
        &self.account
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationVerdict {
    Accepted,
    /// An AND-group assigns several values to one measurement.
    Rejected {
        group: usize,
        measurement: String,
        values: Vec<String>,
    },
}

/// Rejects AND-groups that give one measurement two different outcomes.
/// `measurement_map` names the measurement behind each `(time, slot)` that
/// carries a value.
pub fn validate_relations(
    story: &Story,
    measurement_map: &BTreeMap<(String, String), String>,
) -> Result<RelationVerdict> {
    let schema = story.plot.schema();
    for (g, group) in story.groups.iter().enumerate() {
        let mut seen: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for e in &group.events {
            let time = &schema.times()[e.time];
            for (entry, slot) in e.entries.iter().zip(schema.slots()) {
                let Some(v) = entry.value() else { continue };
                let m = measurement_map
                    .get(&(time.clone(), slot.name.clone()))
                    .ok_or_else(|| Error::UnmappedSlot {
                        time: time.clone(),
                        slot: slot.name.clone(),
                    })?;
                seen.entry(m).or_default().insert(v);
            }
        }
        if group.relation == Relation::Or {
            continue;
        }
        if let Some((m, vs)) = seen.iter().find(|(_, vs)| vs.len() > 1) {
            return Ok(RelationVerdict::Rejected {
                group: g,
                measurement: m.to_string(),
                values: vs.iter().map(|v| v.to_string()).collect(),
            });
        }
    }
    Ok(RelationVerdict::Accepted)
}

/// Where an agent's outcome lives in a schema.
pub type Layout = BTreeMap<String, (String, String)>;

/// Builds an agent's plot from the joint distribution.
///
/// Observed outcomes become `Value` entries at the agent's `(time, slot)`
/// from `layout`; `deductions` become `Deduced` entries. For each agent in
/// `alternatives` whose distribution given `observed` has more than one
/// possible outcome, the event at its time is split into OR-alternatives,
/// one `Deduced` event per possible outcome.
pub fn plot_from_distribution(
    schema: &EventSchema,
    joint: &JointDistribution,
    observed: &OutcomeAssignment,
    deductions: &[(&str, &str, &str)],
    layout: &Layout,
    alternatives: &[&str],
) -> Result<Plot> {
    let p = joint.probability(observed)?;
    if p <= tol::ZERO_BRANCH {
        let (agent, outcome) = observed.iter().next().unwrap_or(("", ""));
        return Err(Error::ZeroProbability {
            agent: agent.to_string(),
            outcome: outcome.to_string(),
        });
    }
    let place = |agent: &str| -> Result<(usize, usize)> {
        let (t, s) = layout
            .get(agent)
            .ok_or_else(|| Error::UnknownAgent(agent.to_string()))?;
        Ok((schema.time_index(t)?, schema.slot_index(s)?))
    };
    let blank = || vec![Entry::Wildcard; schema.slots().len()];
    let mut base: BTreeMap<usize, Vec<Entry>> = BTreeMap::new();
    for (agent, outcome) in observed.iter() {
        let (t, k) = place(agent)?;
        base.entry(t).or_insert_with(blank)[k] = Entry::Value(outcome.to_string());
    }
    for (time, slot, value) in deductions {
        let (t, k) = (schema.time_index(time)?, schema.slot_index(slot)?);
        base.entry(t).or_insert_with(blank)[k] = Entry::Deduced(value.to_string());
    }
    let mut plot = Plot::new(schema.clone());
    let conditioned = joint.conditioned_on(observed)?;
    let mut split = BTreeSet::new();
    for agent in alternatives {
        let (t, k) = place(agent)?;
        let possible: Vec<String> = marginal(&conditioned, agent)?
            .into_iter()
            .filter(|(_, p)| *p > tol::ZERO_BRANCH)
            .map(|(o, _)| o)
            .collect();
        if possible.len() < 2 {
            continue;
        }
        let template = base.get(&t).cloned().unwrap_or_else(blank);
        for v in possible {
            let mut entries = template.clone();
            entries[k] = Entry::Deduced(v);
            plot.insert(Event { time: t, entries })?;
        }
        split.insert(t);
    }
    for (t, entries) in base {
        if !split.contains(&t) {
            plot.insert(Event { time: t, entries })?;
        }
    }
    Ok(plot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fr_schema() -> EventSchema {
        EventSchema::new(
            &["t0", "t1", "t2", "t3", "t4"],
            &[
                ("f1", &["H", "T"]),
                ("f2", &["U", "D"]),
                ("a", &["f", "o"]),
                ("w", &["F", "O"]),
            ],
        )
        .unwrap()
    }

    fn v(x: &str) -> Entry {
        Entry::Value(x.into())
    }

    fn d(x: &str) -> Entry {
        Entry::Deduced(x.into())
    }

    #[test]
    fn rendering() {
        let s = fr_schema();
        let p = Plot::from_events(
            s.clone(),
            [
                Event::new(&s, "t1", &[("f1", v("T"))]).unwrap(),
                Event::new(&s, "t4", &[("w", d("F"))]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(p.to_string(), "{(t1, T, ⋆, ⋆, ⋆), (t4, ⋆, ⋆, ⋆, w=F)}");
    }

    #[test]
    fn projection() {
        let s = EventSchema::new(&["t1"], &[("z", &["0", "1"]), ("w", &["+", "-"])]).unwrap();
        let p = Plot::from_events(s.clone(), [Event::new(&s, "t1", &[("z", v("0"))]).unwrap()])
            .unwrap();
        let z = project(&p, &["z"]).unwrap();
        assert_eq!(z.to_string(), "{(t1, 0)}");
        assert_eq!(project(&z, &["z"]).unwrap(), z);
        assert_eq!(project(&p, &["z", "w"]).unwrap(), p);
        assert!(matches!(project(&p, &["q"]), Err(Error::UnknownSlot(_))));
    }

    #[test]
    fn invalid_events() {
        let s = fr_schema();
        assert!(matches!(
            Event::new(&s, "t9", &[]),
            Err(Error::UnknownTime(_))
        ));
        assert!(matches!(
            Event::new(&s, "t1", &[("f1", v("X"))]),
            Err(Error::InvalidEvent(_))
        ));
        assert!(EventSchema::new(&["t", "t"], &[]).is_err());
        assert!(EventSchema::new(&["t"], &[("a", &[])]).is_err());
    }

    #[test]
    fn deutsch_clash_on_y() {
        let s = EventSchema::new(&["t2"], &[("y", &["0", "1"])]).unwrap();
        let friend =
            Plot::from_events(s.clone(), [Event::new(&s, "t2", &[("y", d("1"))]).unwrap()])
                .unwrap();
        let wigner =
            Plot::from_events(s.clone(), [Event::new(&s, "t2", &[("y", v("0"))]).unwrap()])
                .unwrap();
        let c = CompatibilityConstraint::new("F", "W", &["y"]);
        let verdict = check_compatibility(&c, &friend, &wigner).unwrap();
        assert_eq!(verdict.violations.len(), 1);
        assert_eq!(verdict.violations[0].render(), "(t2, y): y=1 vs 0");
        assert!(check_compatibility(&c, &friend, &friend)
            .unwrap()
            .is_consistent());
        let bad = CompatibilityConstraint::new("F", "W", &["q"]);
        assert!(matches!(
            check_compatibility(&bad, &friend, &wigner),
            Err(Error::SchemaMismatch(_))
        ));
    }

    #[test]
    fn relations() {
        let s = EventSchema::new(&["t"], &[("alice", &["0", "1"]), ("bob", &["0", "1"])]).unwrap();
        let a0 = Event::new(&s, "t", &[("alice", v("0"))]).unwrap();
        let a1 = Event::new(&s, "t", &[("alice", v("1"))]).unwrap();
        let b1 = Event::new(&s, "t", &[("bob", v("1"))]).unwrap();
        let map: BTreeMap<_, _> = [
            (("t".to_string(), "alice".to_string()), "alice".to_string()),
            (("t".to_string(), "bob".to_string()), "bob".to_string()),
        ]
        .into();
        let story = |events: Vec<Event>, relation| {
            let plot = Plot::from_events(s.clone(), events.clone()).unwrap();
            Story::new(plot, vec![RelationGroup { relation, events }], "").unwrap()
        };
        let both = story(vec![a0.clone(), a1.clone()], Relation::And);
        assert!(matches!(
            validate_relations(&both, &map).unwrap(),
            RelationVerdict::Rejected { .. }
        ));
        let either = story(vec![a0.clone(), a1.clone()], Relation::Or);
        assert_eq!(
            validate_relations(&either, &map).unwrap(),
            RelationVerdict::Accepted
        );
        let pair = story(vec![a0.clone(), b1.clone()], Relation::And);
        assert_eq!(
            validate_relations(&pair, &map).unwrap(),
            RelationVerdict::Accepted
        );
        let partial: BTreeMap<_, _> =
            [(("t".to_string(), "alice".to_string()), "alice".to_string())].into();
        assert!(matches!(
            validate_relations(&pair, &partial),
            Err(Error::UnmappedSlot { .. })
        ));

        let plot = Plot::from_events(s.clone(), [a0, a1]).unwrap();
        assert!(matches!(
            Story::new(plot, vec![], ""),
            Err(Error::InvalidStory(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = fr_schema();
        let p = Plot::from_events(
            s.clone(),
            [Event::new(&s, "t3", &[("a", v("o")), ("f2", d("U"))]).unwrap()],
        )
        .unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains(r#""f2":{"deduced":"U"}"#), "{text}");
        assert!(text.contains(r#""w":"wild""#), "{text}");
        let back: Plot = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }
}
