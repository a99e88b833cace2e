use crate::channels::CollapseModel;
use crate::{tol, Error, Result};

use super::OutcomeAssignment;

/// One agent's outcome alphabet. `completion[i]` marks outcomes introduced
/// by basis completion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentOutcomes {
    pub agent: String,
    pub outcomes: Vec<String>,
    pub completion: Vec<bool>,
}

impl AgentOutcomes {
    pub fn index(&self, outcome: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|o| o == outcome)
            .ok_or_else(|| Error::UnknownOutcome {
                agent: self.agent.clone(),
                outcome: outcome.to_string(),
            })
    }
}

/// Exact joint distribution over the outcomes of every measuring agent,
/// stored densely in mixed radix (agents in step order).
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    agents: Vec<AgentOutcomes>,
    probs: Vec<f64>,
    model: CollapseModel,
}

impl JointDistribution {
    pub(crate) fn new(agents: Vec<AgentOutcomes>, probs: Vec<f64>, model: CollapseModel) -> Self {
        debug_assert_eq!(
            probs.len(),
            agents.iter().map(|a| a.outcomes.len()).product::<usize>()
        );
        Self {
            agents,
            probs,
            model,
        }
    }

    pub fn agents(&self) -> &[AgentOutcomes] {
        &self.agents
    }

    /// The collapse model that produced this distribution.
    pub fn model(&self) -> &CollapseModel {
        &self.model
    }

    pub fn agent(&self, agent: &str) -> Result<(usize, &AgentOutcomes)> {
        self.agents
            .iter()
            .enumerate()
            .find(|(_, a)| a.agent == agent)
            .ok_or_else(|| Error::UnknownAgent(agent.to_string()))
    }

    pub(crate) fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut d = vec![0; self.agents.len()];
        for (k, a) in self.agents.iter().enumerate().rev() {
            d[k] = flat % a.outcomes.len();
            flat /= a.outcomes.len();
        }
        d
    }

    fn assignment(&self, digits: &[usize]) -> OutcomeAssignment {
        self.agents
            .iter()
            .zip(digits)
            .map(|(a, &d)| (a.agent.as_str(), a.outcomes[d].as_str()))
            .collect()
    }

    /// Every full assignment with its probability, in mixed-radix order.
    pub fn iter(&self) -> impl Iterator<Item = (OutcomeAssignment, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.assignment(&self.digits(i)), p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn matcher(&self, partial: &OutcomeAssignment) -> Result<Vec<(usize, usize)>> {
        partial
            .iter()
            .map(|(agent, outcome)| {
                let (k, a) = self.agent(agent)?;
                Ok((k, a.index(outcome)?))
            })
            .collect()
    }

    /// Probability of a (possibly partial) assignment.
    pub fn probability(&self, partial: &OutcomeAssignment) -> Result<f64> {
        let want = self.matcher(partial)?;
        Ok(self
            .probs
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let d = self.digits(*i);
                want.iter().all(|&(k, o)| d[k] == o)
            })
            .map(|(_, p)| p)
            .sum())
    }

    /// Post-selection: the distribution conditioned on `event`.
    pub fn conditioned_on(&self, event: &OutcomeAssignment) -> Result<JointDistribution> {
        let want = self.matcher(event)?;
        let norm = self.probability(event)?;
        if norm <= tol::ZERO_BRANCH {
            return Err(Error::ZeroProbability {
                agent: event.iter().map(|(a, _)| a).collect::<Vec<_>>().join(","),
                outcome: event.to_string(),
            });
        }
        let probs = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let d = self.digits(i);
                if want.iter().all(|&(k, o)| d[k] == o) {
                    p / norm
                } else {
                    0.0
                }
            })
            .collect();
        Ok(Self {
            probs,
            ..self.clone()
        })
    }

    /// `P(target = ·, given = ·)` as `[target][given]`.
    fn pair(&self, target: usize, given: usize) -> Vec<Vec<f64>> {
        let (nt, ng) = (
            self.agents[target].outcomes.len(),
            self.agents[given].outcomes.len(),
        );
        let mut out = vec![vec![0.0; ng]; nt];
        for (i, &p) in self.probs.iter().enumerate() {
            let d = self.digits(i);
            out[d[target]][d[given]] += p;
        }
        out
    }
}

/// `P_k(w_k)`: sums the joint over every other agent.
pub fn marginal(joint: &JointDistribution, agent: &str) -> Result<Vec<(String, f64)>> {
    let (k, a) = joint.agent(agent)?;
    let mut out = vec![0.0; a.outcomes.len()];
    for (i, &p) in joint.probs.iter().enumerate() {
        out[joint.digits(i)[k]] += p;
    }
    Ok(a.outcomes.iter().cloned().zip(out).collect())
}

/// `P(target | given)` as a table with one column per conditioning outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    target: AgentOutcomes,
    given: AgentOutcomes,
    /// `None` when the conditioning outcome has zero probability.
    columns: Vec<Option<Vec<f64>>>,
    model: String,
}

impl ConditionalTable {
    pub fn target(&self) -> &AgentOutcomes {
        &self.target
    }

    pub fn given(&self) -> &AgentOutcomes {
        &self.given
    }

    pub fn model_tag(&self) -> &str {
        &self.model
    }

    pub fn column(&self, given_outcome: &str) -> Option<&[f64]> {
        let g = self.given.index(given_outcome).ok()?;
        self.columns[g].as_deref()
    }

    pub fn columns(&self) -> impl Iterator<Item = (&str, Option<&[f64]>)> {
        self.given
            .outcomes
            .iter()
            .map(String::as_str)
            .zip(self.columns.iter().map(|c| c.as_deref()))
    }

    pub fn get(&self, target_outcome: &str, given_outcome: &str) -> Option<f64> {
        let t = self.target.index(target_outcome).ok()?;
        self.column(given_outcome).map(|c| c[t])
    }
}

/// Bayes route: `P(target | given) = P(target, given) / P(given)`.
pub fn conditional(
    joint: &JointDistribution,
    target: &str,
    given: &str,
) -> Result<ConditionalTable> {
    let (t, ta) = joint.agent(target)?;
    let (g, ga) = joint.agent(given)?;
    let pair = joint.pair(t, g);
    let columns = (0..ga.outcomes.len())
        .map(|j| {
            let norm: f64 = pair.iter().map(|row| row[j]).sum();
            (norm > tol::ZERO_BRANCH).then(|| pair.iter().map(|row| row[j] / norm).collect())
        })
        .collect();
    Ok(ConditionalTable {
        target: ta.clone(),
        given: ga.clone(),
        columns,
        model: joint.model.tag(),
    })
}
