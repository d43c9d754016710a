use std::fs;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::{Cli, Command, Format, COMMANDS};
use crate::error::CliError;

/// JSON job file accepted by --config.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct JobFile {
    command: Option<String>,
    parameters: Option<Map<String, Value>>,
    output: Option<OutputFile>,
    threads: Option<usize>,
    tol: Option<f64>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct OutputFile {
    path: Option<PathBuf>,
    format: Option<Format>,
}

/// Fully resolved job: flags over config file over defaults.
#[derive(Debug, Clone)]
pub struct Job {
    pub command: Option<Command>,
    /// Merged command parameters as recorded in the manifest.
    pub parameters: Value,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    pub tol: Option<f64>,
    pub selftest: bool,
}

fn strip_nulls(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    }
}

/// Overlays the flags set on the command line onto the config parameters.
fn merge<T>(cli: &T, file: Option<&Map<String, Value>>) -> Result<(T, Value), CliError>
where
    T: Serialize + DeserializeOwned + Default,
{
    let known = match serde_json::to_value(T::default()).expect("arguments serialize") {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    let mut merged = Map::new();
    if let Some(file) = file {
        for (k, v) in file {
            if !known.contains_key(k) {
                return Err(CliError::Config(format!("unknown parameter '{k}' in config file")));
            }
            if !v.is_null() {
                merged.insert(k.clone(), v.clone());
            }
        }
    }
    merged.extend(strip_nulls(serde_json::to_value(cli).expect("arguments serialize")));
    let value = Value::Object(merged);
    let parsed = serde_json::from_value(value.clone())
        .map_err(|e| CliError::Config(format!("bad parameter in config file: {e}")))?;
    Ok((parsed, value))
}

fn merge_command(cmd: Command, file: Option<&Map<String, Value>>) -> Result<(Command, Value), CliError> {
    macro_rules! with {
        ($variant:ident, $a:expr) => {{
            let (a, v) = merge(&$a, file)?;
            (Command::$variant(a), v)
        }};
    }
    Ok(match cmd {
        Command::Eval(a) => with!(Eval, a),
        Command::RadialTable(a) => with!(RadialTable, a),
        Command::FourierField(a) => with!(FourierField, a),
        Command::RadonSinogram(a) => with!(RadonSinogram, a),
        Command::PsfStack(a) => with!(PsfStack, a),
        Command::Acoustics(a) => with!(Acoustics, a),
        Command::FitDisk(a) => with!(FitDisk, a),
        Command::FitRadon(a) => with!(FitRadon, a),
        Command::FitNearfield(a) => with!(FitNearfield, a),
        Command::ConvertBasis(a) => with!(ConvertBasis, a),
    })
}

pub fn resolve(cli: Cli) -> Result<Job, CliError> {
    let file: JobFile = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => JobFile::default(),
    };
    let command = match (cli.command, &file.command) {
        (Some(c), Some(name)) if c.name() != name => {
            return Err(CliError::Config(format!(
                "command '{}' conflicts with '{name}' in config file",
                c.name()
            )))
        }
        (Some(c), _) => Some(c),
        (None, Some(name)) => Some(Command::from_name(name).ok_or_else(|| {
            CliError::Config(format!("unknown command '{name}' (expected one of {})", COMMANDS.join(", ")))
        })?),
        (None, None) if cli.selftest => None,
        (None, None) => {
            return Err(CliError::Config(format!(
                "no command given (expected one of {})",
                COMMANDS.join(", ")
            )))
        }
    };
    let (command, parameters) = match command {
        Some(c) => {
            let (c, v) = merge_command(c, file.parameters.as_ref())?;
            (Some(c), v)
        }
        None => (None, Value::Object(Map::new())),
    };
    let output = file.output.unwrap_or_default();
    let format = cli
        .format
        .or(output.format)
        .or(command.as_ref().map(|c| c.default_format()))
        .unwrap_or(Format::Json);
    let threads = cli.threads.or(file.threads);
    if threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    let tol = cli.tol.or(file.tol);
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("--tol {t} must be positive")));
        }
    }
    Ok(Job {
        command,
        parameters,
        out: cli.out.or(output.path),
        format,
        threads,
        tol,
        selftest: cli.selftest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::EvalArgs;
    use serde_json::json;

    #[test]
    fn flags_override_config_values() {
        let mut cli = EvalArgs::default();
        cli.mode.n = Some(4);
        let file = json!({"n": 2, "m": 0, "rho": 0.5}).as_object().unwrap().clone();
        let (a, v) = merge(&cli, Some(&file)).unwrap();
        assert_eq!(a.mode.n, Some(4));
        assert_eq!(a.mode.m, Some(0));
        assert_eq!(a.rho, Some(0.5));
        assert_eq!(v, json!({"n": 4, "m": 0, "rho": 0.5}));
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let file = json!({"radius": 1.0}).as_object().unwrap().clone();
        let err = merge(&EvalArgs::default(), Some(&file)).unwrap_err();
        assert_eq!(err.code(), 1);
    }

    #[test]
    fn mistyped_config_value_is_rejected() {
        let file = json!({"n": "two"}).as_object().unwrap().clone();
        assert!(merge(&EvalArgs::default(), Some(&file)).is_err());
    }
}
