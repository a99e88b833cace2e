//! `wigner`: distribution tables, contradiction checks and sampling for the
//! bundled extended Wigner's-friend experiments.

mod args;
mod sample;
mod tables;

use std::process::ExitCode;

use clap::Parser;
use wigner_core::deduction::{run_deutsch, run_fr, DeutschScenario, FrScenario};
use wigner_core::experiment::{export_json, from_json, presets};
use wigner_core::{CollapseModel, Error, ExperimentSpec};

use args::{Cli, Command, Format, ModelChoice, Scenario, Source};

/// Failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ZeroProbability { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn load(source: &Source) -> Result<ExperimentSpec, Failure> {
    match (&source.preset, &source.config) {
        (Some(name), None) => presets::by_name(name).ok_or_else(|| {
            usage(format!(
                "unknown preset `{name}` (available: {})",
                presets::NAMES.join(", ")
            ))
        }),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            Ok(from_json(&text)?)
        }
        _ => Err(usage("exactly one of --preset and --config is required")),
    }
}

/// Parses a model and resolves a subjective agent case-insensitively.
fn model(spec: &ExperimentSpec, text: &str) -> Result<CollapseModel, Failure> {
    let model: CollapseModel = text
        .to_ascii_lowercase()
        .parse()
        .or_else(|_| text.parse())?;
    Ok(match model {
        CollapseModel::SubjectiveCollapse(a) => CollapseModel::subjective(spec.resolve_agent(&a)?),
        m => m,
    })
}

fn run(cli: Cli) -> Result<(String, u8), Failure> {
    match cli.command {
        Command::Tables(t) => {
            let spec = load(&t.source)?;
            let model = model(&spec, &t.model)?;
            let out = tables::render(&spec, &model, &t)?;
            Ok((out, 0))
        }
        Command::Check(c) => {
            let outcome = match c.scenario {
                Scenario::Fr => run_fr(&FrScenario {
                    f1_model: c.f1_model.model("F1"),
                    post_select: !c.no_post_select,
                })?,
                Scenario::Deutsch => run_deutsch(&DeutschScenario {
                    friend_model: c.friend_model.model("F"),
                    wigner_model: ModelChoice::Ism.model("W"),
                    basis: c.wigner_basis.into(),
                })?,
            };
            let text = match c.format {
                Format::Json => {
                    let mut s =
                        serde_json::to_string_pretty(&outcome.to_json()).expect("json value");
                    s.push('\n');
                    s
                }
                Format::Text | Format::Csv => outcome.render_text(),
            };
            Ok((text, if outcome.is_consistent() { 0 } else { 1 }))
        }
        Command::Sample(s) => {
            let spec = load(&s.source)?;
            let model = model(&spec, &s.model)?;
            Ok((sample::render(&spec, &model, s.shots, s.seed)?, 0))
        }
        Command::ExportPreset { name } => {
            let spec = presets::by_name(&name).ok_or_else(|| {
                usage(format!(
                    "unknown preset `{name}` (available: {})",
                    presets::NAMES.join(", ")
                ))
            })?;
            Ok((export_json(&spec), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
