use std::env;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::Job;
use crate::error::CliError;
use crate::jobs::Artifact;

/// Environment variable that redirects file output into a directory.
pub const OUTPUT_DIR_VAR: &str = "GZ_OUTPUT_DIR";

/// Destination file, if any: --out (relative paths resolved under the
/// output directory override) or `<command>.<ext>` in that directory.
pub fn target(job: &Job) -> Option<PathBuf> {
    let dir = env::var_os(OUTPUT_DIR_VAR).filter(|d| !d.is_empty()).map(PathBuf::from);
    match (&job.out, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(d)) => {
            let name = job.command.as_ref().map_or("output", |c| c.name());
            Some(d.join(format!("{name}.{}", job.format.ext())))
        }
        (None, None) => None,
    }
}

fn part_path(base: &Path, suffix: &str) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{suffix}"),
    };
    base.with_file_name(name)
}

pub fn manifest_path(base: &Path) -> PathBuf {
    base.with_extension("manifest.json")
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Writes the artifacts and their run manifest, or prints them to stdout.
pub fn emit(job: &Job, artifacts: Vec<Artifact>) -> Result<(), CliError> {
    let Some(base) = target(job) else {
        let mut out = std::io::stdout().lock();
        let text: Vec<String> = artifacts.into_iter().map(|a| with_newline(a.body)).collect();
        return out
            .write_all(text.join("\n").as_bytes())
            .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")));
    };
    if let Some(parent) = base.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
    }
    let mut files = Vec::new();
    for a in artifacts {
        let path = match &a.suffix {
            Some(s) => part_path(&base, s),
            None => base.clone(),
        };
        write_file(&path, &with_newline(a.body))?;
        files.push(path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
    }
    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "tool_version": env!("CARGO_PKG_VERSION"),
        "library_version": genzernike::VERSION,
        "command": job.command.as_ref().map(|c| c.name()),
        "parameters": job.parameters,
        "format": job.format,
        "threads": job.threads,
        "tol": job.tol,
        "outputs": files,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&manifest_path(&base), &with_newline(text))
}
