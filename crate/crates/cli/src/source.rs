use std::fs;

use fairmdp_core::backend::FeasibilityBackend;
use fairmdp_core::instance::{example1_mdp, example2_mdp, parse_instance_file};
use fairmdp_core::lp::ExternalSolver;
use fairmdp_core::oracle::enumerate_deterministic_values;
use fairmdp_core::{example1_values, example2_values, LpBackend, Momdp, ValueSet};

use crate::CliError;

/// What `--in` resolved to.
pub enum Source {
    /// A closed-form value set.
    Explicit { label: String, set: ValueSet },
    /// A model answered through the LP path.
    Model { label: String, momdp: Momdp },
}

pub struct ModelOptions {
    pub deterministic: bool,
    pub max_binaries: Option<usize>,
    /// Builtins load as discounted chains with this γ instead of value sets.
    pub as_mdp: Option<f64>,
}

fn parse_builtin(spec: &str) -> Result<(&str, u32), CliError> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let n = parts
        .next()
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| {
            CliError::Usage(format!("expected builtin:<name>:<N>, got builtin:{spec}"))
        })?;
    if parts.next().is_some() {
        return Err(CliError::Usage(format!(
            "trailing fields in builtin:{spec}"
        )));
    }
    Ok((name, n))
}

pub fn load(input: &str, opts: &ModelOptions) -> Result<Source, CliError> {
    if let Some(spec) = input.strip_prefix("builtin:") {
        let (name, n) = parse_builtin(spec)?;
        if let Some(gamma) = opts.as_mdp {
            let momdp = match name {
                "example1" => example1_mdp(n, gamma)?,
                "example2" => example2_mdp(n, gamma)?,
                _ => return Err(CliError::Usage(format!("unknown builtin {name}"))),
            };
            return Ok(Source::Model {
                label: format!("{input} (mdp, discount {gamma})"),
                momdp,
            });
        }
        let set = match name {
            "example1" => example1_values(n)?,
            "example2" => example2_values(n)?,
            _ => return Err(CliError::Usage(format!("unknown builtin {name}"))),
        };
        return Ok(Source::Explicit {
            label: input.to_string(),
            set,
        });
    }
    let text = fs::read_to_string(input).map_err(|e| CliError::Usage(format!("{input}: {e}")))?;
    let file = parse_instance_file(&text)?;
    Ok(Source::Model {
        label: file.name.unwrap_or_else(|| input.to_string()),
        momdp: file.momdp,
    })
}

impl Source {
    pub fn label(&self) -> &str {
        match self {
            Source::Explicit { label, .. } | Source::Model { label, .. } => label,
        }
    }

    pub fn backend(&self, opts: &ModelOptions) -> FeasibilityBackend {
        match self {
            Source::Explicit { set, .. } => FeasibilityBackend::Explicit(set.clone()),
            Source::Model { momdp, .. } => {
                let mut b = LpBackend::new(momdp.clone(), opts.deterministic);
                if let Some(limit) = opts.max_binaries {
                    b.config.max_binaries = limit;
                }
                b.external = ExternalSolver::from_env();
                FeasibilityBackend::Lp(b)
            }
        }
    }

    /// Ground truth for checks and plots: the set itself, or the values of
    /// every deterministic policy.
    pub fn exact(&self, limit: u64) -> Result<ValueSet, CliError> {
        match self {
            Source::Explicit { set, .. } => Ok(set.clone()),
            Source::Model { momdp, .. } => {
                let frontier = enumerate_deterministic_values(momdp, limit)?;
                Ok(ValueSet::Finite(frontier.values))
            }
        }
    }
}
