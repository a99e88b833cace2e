//! Ready-made experiments.

use crate::channels::{MeasurementIsometry, PreparationIsometry};
use crate::qstate::{Registry, StateVector};

use super::{ExperimentSpec, OutcomeAssignment, Step};

const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Wigner's measurement basis in the two-party experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WignerBasis {
    /// `{|↑,u⟩, |↓,d⟩}` with outcomes `U`, `D`.
    Product,
    /// `{(|↑,u⟩ ± |↓,d⟩)/√2}` with outcomes `+`, `-`.
    Superposition,
}

fn reg(label: &str, basis: &[&str]) -> Registry {
    Registry::new().with(label, basis).expect("static labels")
}

fn ket(r: &Registry, key: &[&str]) -> StateVector {
    StateVector::basis(r, key).expect("static labels")
}

fn real(r: &Registry, terms: &[(f64, &str)]) -> StateVector {
    StateVector::real_superposition(r, terms).expect("static state")
}

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn measure(agent: &str, basis: Vec<StateVector>, outcomes: &[&str]) -> MeasurementIsometry {
    MeasurementIsometry::new(agent, basis, agent, labels(outcomes)).expect("static basis")
}

fn friend_steps(basis: WignerBasis) -> (StateVector, Step, Step) {
    let s = reg("S", &["↑", "↓"]);
    let initial = real(&s, &[(H, "↑"), (H, "↓")]);
    let friend = measure("F", vec![ket(&s, &["↑"]), ket(&s, &["↓"])], &["u", "d"]);
    let sf = s.with("F", &["u", "d"]).expect("static labels");
    let wigner = match basis {
        WignerBasis::Product => measure(
            "W",
            vec![ket(&sf, &["↑", "u"]), ket(&sf, &["↓", "d"])],
            &["U", "D"],
        ),
        WignerBasis::Superposition => measure(
            "W",
            vec![
                real(&sf, &[(H, "↑,u"), (H, "↓,d")]),
                real(&sf, &[(H, "↑,u"), (-H, "↓,d")]),
            ],
            &["+", "-"],
        ),
    };
    (initial, Step::measure(1, friend), Step::measure(2, wigner))
}

/// Friend `F` measures a spin at t1; Wigner `W` measures spin and friend
/// jointly at t2.
pub fn wigner_friend(basis: WignerBasis) -> ExperimentSpec {
    let (initial, f, w) = friend_steps(basis);
    let name = match basis {
        WignerBasis::Product => "wigner-friend-product",
        WignerBasis::Superposition => "wigner-friend-superposition",
    };
    ExperimentSpec::new(name, initial, vec![f, w], None).expect("valid preset")
}

/// Superposition-basis Wigner's friend where the friend also writes two
/// reporting bits at t1: `x` (the friend has a definite result, fixed to 0)
/// and `y` (the friend's answer to "is `-` possible?", 1 = yes).
pub fn deutsch_variant() -> ExperimentSpec {
    deutsch_variant_with_report(1)
}

/// As [`deutsch_variant`] with an explicit `y` bit.
pub fn deutsch_variant_with_report(y: u8) -> ExperimentSpec {
    deutsch_variant_with(WignerBasis::Superposition, y)
}

/// Reporting bits on top of either Wigner basis.
pub fn deutsch_variant_with(basis: WignerBasis, y: u8) -> ExperimentSpec {
    let (initial, f, w) = friend_steps(basis);
    let bit = |label: &str, v: u8| {
        let r = reg(label, &["0", "1"]);
        let state = ket(&r, &[if v == 0 { "0" } else { "1" }]);
        PreparationIsometry::new("F", Registry::new(), vec![state]).expect("static preparation")
    };
    let steps = vec![
        f,
        Step::prepare(1, bit("x", 0)),
        Step::prepare(1, bit("y", y)),
        w,
    ];
    let name = match basis {
        WignerBasis::Superposition => "deutsch",
        WignerBasis::Product => "deutsch-product",
    };
    ExperimentSpec::new(name, initial, steps, None).expect("valid preset")
}

/// Coin `C`, first friend `F1` (measures the coin and prepares spin `S`),
/// second friend `F2` (measures `S`), and superobservers `A` and `W`.
/// Halts on `{A: o, W: O}`.
pub fn frauchiger_renner() -> ExperimentSpec {
    let c = reg("C", &["h", "t"]);
    let initial = real(
        &c,
        &[((1.0f64 / 3.0).sqrt(), "h"), ((2.0f64 / 3.0).sqrt(), "t")],
    );
    let f1 = measure("F1", vec![ket(&c, &["h"]), ket(&c, &["t"])], &["H", "T"]);
    let s = reg("S", &["↑", "↓"]);
    let prep = PreparationIsometry::new(
        "F1",
        reg("F1", &["H", "T"]),
        vec![ket(&s, &["↓"]), real(&s, &[(H, "↓"), (H, "↑")])],
    )
    .expect("static preparation");
    let f2 = measure("F2", vec![ket(&s, &["↑"]), ket(&s, &["↓"])], &["U", "D"]);
    let lab = Registry::new()
        .with("C", &["h", "t"])
        .and_then(|r| r.with("F1", &["H", "T"]))
        .expect("static labels");
    let a = measure(
        "A",
        vec![
            real(&lab, &[(H, "h,H"), (H, "t,T")]),
            real(&lab, &[(H, "h,H"), (-H, "t,T")]),
        ],
        &["f", "o"],
    );
    let lab = Registry::new()
        .with("S", &["↑", "↓"])
        .and_then(|r| r.with("F2", &["U", "D"]))
        .expect("static labels");
    let w = measure(
        "W",
        vec![
            real(&lab, &[(H, "↓,D"), (H, "↑,U")]),
            real(&lab, &[(H, "↓,D"), (-H, "↑,U")]),
        ],
        &["F", "O"],
    );
    let steps = vec![
        Step::measure(1, f1),
        Step::prepare(1, prep),
        Step::measure(2, f2),
        Step::measure(3, a),
        Step::measure(4, w),
    ];
    let halting = OutcomeAssignment::new().with("A", "o").with("W", "O");
    ExperimentSpec::new("frauchiger-renner", initial, steps, Some(halting)).expect("valid preset")
}

/// Preset lookup by CLI name.
pub fn by_name(name: &str) -> Option<ExperimentSpec> {
    match name.to_ascii_lowercase().as_str() {
        "fr" | "frauchiger-renner" => Some(frauchiger_renner()),
        "wf" | "wf-superposition" | "wigner-friend-superposition" => {
            Some(wigner_friend(WignerBasis::Superposition))
        }
        "wf-product" | "wigner-friend-product" => Some(wigner_friend(WignerBasis::Product)),
        "deutsch" => Some(deutsch_variant()),
        _ => None,
    }
}

/// Names accepted by [`by_name`] (canonical spellings).
pub const NAMES: [&str; 4] = ["fr", "wf-product", "wf-superposition", "deutsch"];
