use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigner_core::experiment::evolve;
use wigner_core::{CollapseModel, ExperimentSpec, OutcomeAssignment, Result};

use crate::tables::number;

/// Draws `shots` indices from `cumulative` (nondecreasing, last entry is the
/// total) by inverse CDF.
pub fn draw(cumulative: &[f64], shots: u64, seed: u64) -> Vec<u64> {
    let mut counts = vec![0; cumulative.len()];
    let Some(&total) = cumulative.last() else {
        return counts;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..shots {
        let u = rng.random::<f64>() * total;
        let k = cumulative
            .partition_point(|&c| c <= u)
            .min(cumulative.len() - 1);
        counts[k] += 1;
    }
    counts
}

fn label(a: &OutcomeAssignment, order: &[&str]) -> String {
    order
        .iter()
        .map(|n| format!("{n}={}", a.get(n).unwrap_or("?")))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn render(
    spec: &ExperimentSpec,
    model: &CollapseModel,
    shots: u64,
    seed: u64,
) -> Result<String> {
    let joint = evolve(spec, model)?;
    let order: Vec<&str> = joint.agents().iter().map(|a| a.agent.as_str()).collect();
    let support: Vec<(OutcomeAssignment, f64)> = joint.iter().filter(|(_, p)| *p > 0.0).collect();
    let mut cumulative = Vec::with_capacity(support.len());
    let mut acc = 0.0;
    for (_, p) in &support {
        acc += p;
        cumulative.push(acc);
    }
    let counts = draw(&cumulative, shots, seed);

    let mut out = format!(
        "experiment: {}\nmodel: {}\nseed: {seed}\nshots: {shots}\n",
        spec.name(),
        model.tag()
    );
    if let Some(h) = spec.halting() {
        let hits: u64 = support
            .iter()
            .zip(&counts)
            .filter(|((a, _), _)| h.iter().all(|(agent, o)| a.get(agent) == Some(o)))
            .map(|(_, c)| c)
            .sum();
        let freq = if shots == 0 {
            "-".to_string()
        } else {
            number(hits as f64 / shots as f64, 5)
        };
        out += &format!(
            "halting: {h}\nhalting frequency: {freq} ({hits}/{shots})\nhalting probability: {}\n",
            number(joint.probability(h)?, 5)
        );
    }
    out += "histogram:\n";
    let rows: Vec<(String, u64, f64)> = support
        .iter()
        .zip(&counts)
        .filter(|(_, c)| **c > 0)
        .map(|((a, p), c)| (label(a, &order), *c, *p))
        .collect();
    if rows.is_empty() {
        out += "  (empty)\n";
    }
    let w = rows
        .iter()
        .map(|(l, _, _)| l.chars().count())
        .max()
        .unwrap_or(0);
    let cw = rows
        .iter()
        .map(|(_, c, _)| c.to_string().len())
        .max()
        .unwrap_or(0);
    for (l, c, p) in rows {
        let pad = w - l.chars().count();
        out += &format!(
            "  {l}{}  {c:>cw$}  (exact {})\n",
            " ".repeat(pad),
            number(p, 5)
        );
    }
    Ok(out)
}
