use serde_json::{json, Value};
use wigner_core::experiment::{
    conditional, conditional_table, conditional_via_renormalized_state, evolve, marginal,
    AgentOutcomes,
};
use wigner_core::tol::ZERO_BRANCH;
use wigner_core::{
    CollapseModel, ConditionalTable, Error, ExperimentSpec, JointDistribution, Result,
};

use crate::args::{Format, TablesArgs};

/// A rectangular table of probabilities; `None` marks an impossible
/// conditioning outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub kind: &'static str,
    pub title: String,
    pub model: String,
    pub corner: String,
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

pub fn render(spec: &ExperimentSpec, model: &CollapseModel, args: &TablesArgs) -> Result<String> {
    let table = build(spec, model, args)?;
    Ok(match args.format {
        Format::Text => text(&table, args.digits),
        Format::Csv => csv(&table, args.digits),
        Format::Json => json_text(&table, args.digits),
    })
}

fn halted_joint(spec: &ExperimentSpec, model: &CollapseModel) -> Result<JointDistribution> {
    let halting = spec
        .halting()
        .ok_or_else(|| Error::Config(format!("`{}` has no halting condition", spec.name())))?;
    evolve(spec, model)?.conditioned_on(halting)
}

pub fn build(spec: &ExperimentSpec, model: &CollapseModel, args: &TablesArgs) -> Result<Table> {
    let target = args
        .target
        .as_deref()
        .map(|t| spec.resolve_agent(t))
        .transpose()?;
    let given = args
        .given
        .as_deref()
        .map(|g| spec.resolve_agent(g))
        .transpose()?;
    let suffix = if args.post_select { " | halted" } else { "" };
    match (target, given) {
        (Some(t), Some(g)) => {
            if let Some(o) = &args.given_outcome {
                let column = conditional_via_renormalized_state(spec, model, t, g, o)?;
                let rows = column
                    .into_iter()
                    .enumerate()
                    .filter(|(i, (_, p))| !completion(spec, t, *i) || *p > ZERO_BRANCH)
                    .map(|(_, (label, p))| (label, vec![Some(p)]))
                    .collect();
                return Ok(Table {
                    kind: "conditional",
                    title: format!("P({t} | {g}={o})"),
                    model: model.tag(),
                    corner: "target".into(),
                    columns: vec![format!("{g}={o}")],
                    rows,
                });
            }
            let table = if args.post_select {
                conditional(&halted_joint(spec, model)?, t, g)?
            } else {
                conditional_table(spec, model, t, g)?
            };
            let mut out = conditional_rows(&table);
            out.title = format!("P({t} | {g}{suffix})");
            Ok(out)
        }
        (Some(t), None) => {
            let joint = if args.post_select {
                halted_joint(spec, model)?
            } else {
                evolve(spec, model)?
            };
            let rows = marginal(&joint, t)?
                .into_iter()
                .enumerate()
                .filter(|(i, (_, p))| !completion(spec, t, *i) || *p > ZERO_BRANCH)
                .map(|(_, (label, p))| (label, vec![Some(p)]))
                .collect();
            Ok(Table {
                kind: "marginal",
                title: format!("P({t}{suffix})"),
                model: model.tag(),
                corner: "target".into(),
                columns: vec!["P".into()],
                rows,
            })
        }
        _ => {
            let joint = if args.post_select {
                halted_joint(spec, model)?
            } else {
                evolve(spec, model)?
            };
            let agents = joint.agents();
            let names: Vec<&str> = agents.iter().map(|a| a.agent.as_str()).collect();
            let rows = joint
                .iter()
                .filter(|(a, p)| {
                    *p > ZERO_BRANCH
                        || !agents.iter().any(|ag| {
                            ag.index(a.get(&ag.agent).unwrap_or(""))
                                .is_ok_and(|i| ag.completion[i])
                        })
                })
                .map(|(a, p)| {
                    let label = names
                        .iter()
                        .map(|n| format!("{n}={}", a.get(n).unwrap_or("?")))
                        .collect::<Vec<_>>()
                        .join(" ");
                    (label, vec![Some(p)])
                })
                .collect();
            Ok(Table {
                kind: "joint",
                title: format!("P({}{suffix})", names.join(", ")),
                model: model.tag(),
                corner: "assignment".into(),
                columns: vec!["P".into()],
                rows,
            })
        }
    }
}

fn completion(spec: &ExperimentSpec, agent: &str, index: usize) -> bool {
    spec.measurement(agent)
        .is_ok_and(|m| m.is_completion(index))
}

/// Drops completion outcomes that never occur.
fn conditional_rows(table: &ConditionalTable) -> Table {
    let (t, g): (&AgentOutcomes, &AgentOutcomes) = (table.target(), table.given());
    let columns: Vec<usize> = (0..g.outcomes.len())
        .filter(|&j| !g.completion[j] || table.column(&g.outcomes[j]).is_some())
        .collect();
    let rows = (0..t.outcomes.len())
        .filter_map(|i| {
            let cells: Vec<Option<f64>> = columns
                .iter()
                .map(|&j| table.column(&g.outcomes[j]).map(|c| c[i]))
                .collect();
            let occurs = cells.iter().flatten().any(|p| *p > ZERO_BRANCH);
            (!t.completion[i] || occurs).then(|| (t.outcomes[i].clone(), cells))
        })
        .collect();
    Table {
        kind: "conditional",
        title: String::new(),
        model: table.model_tag().to_string(),
        corner: "target".into(),
        columns: columns
            .iter()
            .map(|&j| format!("{}={}", g.agent, g.outcomes[j]))
            .collect(),
        rows,
    }
}

/// Fixed-point with `digits` decimals and no negative zero.
pub fn number(p: f64, digits: u8) -> String {
    let p = if p <= 0.0 { 0.0 } else { p };
    format!("{p:.*}", digits as usize)
}

fn cell(p: Option<f64>, digits: u8) -> String {
    p.map_or_else(|| "-".to_string(), |p| number(p, digits))
}

fn width(s: &str) -> usize {
    s.chars().count()
}

fn pad(s: &str, w: usize) -> String {
    format!("{s}{}", " ".repeat(w.saturating_sub(width(s))))
}

pub fn text(table: &Table, digits: u8) -> String {
    let mut out = format!("{}  [{}]\n", table.title, table.model);
    let first = table
        .rows
        .iter()
        .map(|(l, _)| width(l))
        .chain([width(&table.corner)])
        .max()
        .unwrap_or(0);
    let widths: Vec<usize> = table
        .columns
        .iter()
        .map(|c| width(c).max(digits as usize + 2))
        .collect();
    let line = |label: &str, cells: Vec<String>| {
        let mut s = pad(label, first);
        for (c, w) in cells.iter().zip(&widths) {
            s += "  ";
            s += &pad(c, *w);
        }
        s.trim_end().to_string() + "\n"
    };
    out += &line(&table.corner, table.columns.clone());
    for (label, cells) in &table.rows {
        out += &line(label, cells.iter().map(|p| cell(*p, digits)).collect());
    }
    out
}

pub fn csv(table: &Table, digits: u8) -> String {
    let mut out = std::iter::once(table.corner.clone())
        .chain(table.columns.iter().cloned())
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for (label, cells) in &table.rows {
        out += label;
        for p in cells {
            out.push(',');
            out += &p.map(|p| number(p, digits)).unwrap_or_default();
        }
        out.push('\n');
    }
    out
}

pub fn to_json(table: &Table, digits: u8) -> Value {
    let round = |p: f64| -> Value {
        number(p, digits)
            .parse::<f64>()
            .map_or(Value::Null, |x| json!(x))
    };
    json!({
        "kind": table.kind,
        "title": table.title,
        "model": table.model,
        "columns": table.columns,
        "rows": table.rows.iter().map(|(label, cells)| json!({
            "label": label,
            "values": cells.iter().map(|p| p.map_or(Value::Null, round)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn json_text(table: &Table, digits: u8) -> String {
    let mut s = serde_json::to_string_pretty(&to_json(table, digits)).expect("json value");
    s.push('\n');
    s
}
