use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Subcommand;
use serde_json::{json, Value};

use idealab::orders::{builtin, builtin_catalog, IdealHandle};
use idealab::Rational;

use crate::report::{Outcome, Status};
use crate::{read_json, Globals};

pub type Handle = IdealHandle<Rational>;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Catalog directory
    #[arg(long, default_value = "catalog")]
    pub dir: PathBuf,
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Subcommand, Debug)]
pub enum Action {
    /// Validate an ideal handle and store it as `<name>.json`
    Add {
        file: PathBuf,
        /// Replace an existing entry of the same name
        #[arg(long)]
        force: bool,
    },
    /// List stored and built-in ideals
    List,
    /// Print an ideal handle, optionally re-checking its generators
    Show {
        name: String,
        #[arg(long)]
        check: bool,
    },
}

/// Where a name was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Directory,
    Builtin,
}

/// Looks the name up in the directory first, then among the built-in ideals.
pub fn resolve(name: &str, dir: &Path) -> Result<(Handle, Source)> {
    let path = dir.join(format!("{name}.json"));
    if path.is_file() {
        let h: Handle = serde_json::from_value(read_json(&path)?).with_context(|| format!("{}", path.display()))?;
        h.validate()?;
        return Ok((h, Source::Directory));
    }
    match builtin(name) {
        Some(h) => Ok((h, Source::Builtin)),
        None => bail!("unknown ideal {name:?} (not in {} and not built in)", dir.display()),
    }
}

fn stored(dir: &Path) -> Result<BTreeMap<String, Handle>> {
    let mut out = BTreeMap::new();
    if !dir.is_dir() {
        return Ok(out);
    }
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else { continue };
        if stem == "index" || path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let h: Handle = serde_json::from_value(read_json(&path)?).with_context(|| format!("{}", path.display()))?;
        out.insert(stem.to_string(), h);
    }
    Ok(out)
}

fn write_index(dir: &Path) -> Result<()> {
    let index: Vec<Value> = stored(dir)?
        .into_iter()
        .map(|(name, h)| json!({ "name": name, "description": h.description, "generators": h.generators.len() }))
        .collect();
    fs::write(dir.join("index.json"), serde_json::to_string_pretty(&index)? + "\n")?;
    Ok(())
}

impl Args {
    pub fn describe(&self) -> Result<(String, Value, Value)> {
        let dir = self.dir.display().to_string();
        Ok(match &self.action {
            Action::Add { file, force } => {
                ("catalog add".into(), json!({ "dir": dir, "force": force }), read_json(file)?)
            }
            Action::List => ("catalog list".into(), json!({ "dir": dir }), Value::Null),
            Action::Show { name, check } => {
                ("catalog show".into(), json!({ "dir": dir, "name": name, "check": check }), Value::Null)
            }
        })
    }

    pub fn run(&self, input: &Value, _g: &Globals) -> Result<Outcome> {
        match &self.action {
            Action::Add { force, .. } => {
                let h: Handle = serde_json::from_value(input.clone()).context("ideal handle")?;
                h.validate()?;
                let path = self.dir.join(format!("{}.json", h.name));
                if path.exists() && !force {
                    bail!("{} already exists (use --force to replace it)", path.display());
                }
                let certs = h.check_generators()?;
                let failed: Vec<usize> =
                    certs.iter().enumerate().filter(|(_, c)| c.kind.is_no()).map(|(i, _)| i).collect();
                if !failed.is_empty() {
                    return Outcome::new(
                        Status::Falsified,
                        json!({ "name": h.name, "rejected_generators": failed, "certificates": certs }),
                    );
                }
                fs::create_dir_all(&self.dir)?;
                fs::write(&path, serde_json::to_string_pretty(&h)? + "\n")?;
                write_index(&self.dir)?;
                Outcome::new(Status::Verified, json!({ "name": h.name, "path": path.display().to_string() }))
            }
            Action::List => {
                let stored: Vec<Value> = stored(&self.dir)?
                    .into_iter()
                    .map(|(n, h)| json!({ "name": n, "description": h.description }))
                    .collect();
                let builtins: Vec<Value> = builtin_catalog::<Rational>()
                    .into_iter()
                    .map(|h| json!({ "name": h.name, "description": h.description }))
                    .collect();
                Outcome::new(Status::Verified, json!({ "stored": stored, "builtin": builtins }))
            }
            Action::Show { name, check } => {
                let (h, source) = resolve(name, &self.dir)?;
                if !check {
                    return Outcome::new(Status::Verified, json!({ "source": source, "ideal": h }));
                }
                let certs = h.check_generators()?;
                let kinds: Vec<_> = certs.iter().map(|c| c.kind).collect();
                let status = if kinds.iter().any(|k| k.is_no()) {
                    Status::Falsified
                } else if kinds.iter().all(|k| k.is_yes()) {
                    Status::Verified
                } else {
                    Status::Unknown
                };
                Outcome::new(status, json!({ "source": source, "ideal": h, "generator_certificates": certs }))
            }
        }
    }
}
