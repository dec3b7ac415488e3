use std::path::PathBuf;

use anyhow::Result;
use clap::Subcommand;
use serde_json::{json, Value};

use idealab::omega::{MapFormula, OmegaSet};
use idealab::orders::{dominance, katetov_verify, splitting_check, tukey_demo, DominanceReport, Evidence};
use idealab::submeasure::{DensityBlocks, WeightFn};
use idealab::Rational;

use crate::catalog::{resolve, Handle};
use crate::report::{Outcome, Status};
use crate::{field, field_or, json_arg, lift, read_json, Globals};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Catalog directory used to resolve ideal names
    #[arg(long, default_value = "catalog")]
    pub dir: PathBuf,
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Subcommand, Debug)]
pub enum Action {
    /// Evidence that a map witnesses `I ≤_K J`
    Katetov {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Map formula as JSON, or `@path`
        #[arg(long, default_value = r#"{"name":"identity"}"#)]
        map: String,
    },
    /// Eventual domination `f ≤* g` of two weight functions below the horizon
    Dominance {
        /// Weight function as JSON, or `@path`
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Search a family of sets for splitters of each test set modulo an ideal
    Splitting {
        /// JSON file with `family` and `tests`
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        ideal: String,
    },
    /// Build summable extensions of density witnesses and compare them
    TukeyDemo {
        /// JSON file with `witnesses`
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
}

fn evidence_status(e: Evidence) -> Status {
    match e {
        Evidence::Verified => Status::Verified,
        Evidence::Falsified => Status::Falsified,
        Evidence::Unknown => Status::Unknown,
    }
}

impl Args {
    /// Resolves names and reads files so the run depends only on the returned input.
    pub fn describe(&self) -> Result<(String, Value, Value)> {
        let dir = self.dir.display().to_string();
        Ok(match &self.action {
            Action::Katetov { from, to, map } => {
                let (i, _) = resolve(from, &self.dir)?;
                let (j, _) = resolve(to, &self.dir)?;
                let map: MapFormula = serde_json::from_value(json_arg(map)?)?;
                (
                    "order katetov".into(),
                    json!({ "dir": dir, "from": from, "to": to }),
                    json!({ "from": i, "to": j, "map": map }),
                )
            }
            Action::Dominance { f, g } => {
                ("order dominance".into(), json!({}), json!({ "f": json_arg(f)?, "g": json_arg(g)? }))
            }
            Action::Splitting { input, ideal } => {
                let (h, _) = resolve(ideal, &self.dir)?;
                let mut v = read_json(input)?;
                v["ideal"] = serde_json::to_value(h)?;
                ("order splitting".into(), json!({ "dir": dir, "ideal_name": ideal }), v)
            }
            Action::TukeyDemo { input, depth } => {
                ("order tukey-demo".into(), json!({ "depth": depth }), read_json(input)?)
            }
        })
    }

    pub fn run(&self, input: &Value, g: &Globals) -> Result<Outcome> {
        match &self.action {
            Action::Katetov { .. } => {
                let i: Handle = field(input, "from")?;
                let j: Handle = field(input, "to")?;
                let map: MapFormula = field(input, "map")?;
                let report = katetov_verify(&i, &j, &map, g.budget)?;
                Outcome::new(evidence_status(report.verdict), &report)
            }
            Action::Dominance { .. } => {
                let f: WeightFn<Rational> = field(input, "f")?;
                let h: WeightFn<Rational> = field(input, "g")?;
                let report = dominance(&f, &h, g.horizon.unwrap_or(1000));
                let status = match report {
                    DominanceReport::Dominated { .. } => Status::Verified,
                    DominanceReport::Falsified { .. } => Status::Falsified,
                };
                Outcome::new(status, &report)
            }
            Action::Splitting { .. } => {
                let ideal: Handle = field(input, "ideal")?;
                let family: Vec<OmegaSet> = field(input, "family")?;
                let tests: Vec<OmegaSet> = field(input, "tests")?;
                family.iter().chain(&tests).try_for_each(|s| s.validate())?;
                let report = splitting_check(&family, &ideal, &tests, g.budget)?;
                let status = if report.all_split() { Status::Verified } else { Status::Unknown };
                Outcome::new(status, &report)
            }
            Action::TukeyDemo { depth, .. } => {
                let witnesses: Vec<DensityBlocks<Rational>> = field(input, "witnesses")?;
                witnesses.iter().try_for_each(|w| w.validate())?;
                let horizon: u64 = field_or(input, "horizon", g.horizon.unwrap_or(1 << 12))?;
                let report = match lift(tukey_demo(&witnesses, *depth, horizon))? {
                    Ok(r) => r,
                    Err(outcome) => return Ok(outcome),
                };
                Outcome::verified_if(report.inclusion_holds(), &report)
            }
        }
    }
}
