//! Benchmark fixtures.

use wigner_core::experiment::Step;
use wigner_core::{ExperimentSpec, MeasurementIsometry, Registry, StateVector};

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A spin in `|+⟩` followed by `n` observers, each measuring the previous
/// record (the spin, for the first) in alternating computational and `±`
/// bases. The final dimension is `2^(n+1)`.
pub fn observer_chain(n: usize) -> ExperimentSpec {
    let mut registry = Registry::new()
        .with("S", &["0", "1"])
        .expect("static labels");
    let initial =
        StateVector::real_superposition(&registry, &[(H, "0"), (H, "1")]).expect("static state");
    let mut steps = Vec::with_capacity(n);
    let mut previous = "S".to_string();
    for k in 0..n {
        let agent = format!("O{k}");
        let local = registry.select(&[previous.as_str()]).expect("registered");
        let basis = if k % 2 == 0 {
            vec![
                StateVector::basis(&local, &["0"]).expect("basis"),
                StateVector::basis(&local, &["1"]).expect("basis"),
            ]
        } else {
            vec![
                StateVector::real_superposition(&local, &[(H, "0"), (H, "1")]).expect("basis"),
                StateVector::real_superposition(&local, &[(H, "0"), (-H, "1")]).expect("basis"),
            ]
        };
        let m = MeasurementIsometry::new(&agent, basis, &agent, vec!["0".into(), "1".into()])
            .expect("orthonormal");
        registry.push(m.memory().clone()).expect("fresh label");
        steps.push(Step::measure(k as u32 + 1, m));
        previous = agent;
    }
    ExperimentSpec::new(&format!("chain-{n}"), initial, steps, None).expect("valid chain")
}
