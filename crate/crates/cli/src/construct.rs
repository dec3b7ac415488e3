use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::ValueEnum;
use serde_json::{json, Value};

use idealab::hypergraph::{adl_select, HyperBlocks};
use idealab::submeasure::{DensityBlocks, WeightFn};
use idealab::{ExactSubmeasure, Rational};

use crate::report::{Outcome, Status};
use crate::{field, field_or, json_arg, lift, Globals};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Family {
    AsymptoticDensity,
    Fin,
    TraceNull,
    Summable,
    ErdosUlam,
    Density,
    Hypergraph,
    Table,
    Adl,
    /// a complete submeasure descriptor passed as params
    Descriptor,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

#[derive(clap::Args, Debug)]
pub struct Args {
    pub family: Family,
    /// Family parameters as JSON, or `@path` to read them from a file
    #[arg(long)]
    pub params: Option<String>,
    /// Number of selected blocks for `adl`
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Also write the bare descriptor to this file
    #[arg(long)]
    pub write: Option<PathBuf>,
}

impl Args {
    fn params(&self) -> Result<Value> {
        match &self.params {
            Some(p) => json_arg(p),
            None => Ok(json!({})),
        }
    }

    pub fn describe(&self) -> Result<(Value, Value)> {
        Ok((json!({ "family": self.family.to_string(), "depth": self.depth }), self.params()?))
    }

    pub fn run(&self, g: &Globals) -> Result<Outcome> {
        let params = self.params()?;
        let descriptor = match self.family {
            Family::Adl => {
                let blocks: HyperBlocks = field_or(&params, "blocks", HyperBlocks::adl_kneser())?;
                let config = match lift(adl_select(&blocks, self.depth, g.budget.unwrap_or(64)))? {
                    Ok(c) => c,
                    Err(outcome) => return Ok(outcome),
                };
                config.validate()?;
                let checks = config.star_checks()?;
                let descriptor = serde_json::to_value(&config)?;
                self.write_descriptor(&descriptor)?;
                return Outcome::new(Status::Verified, json!({ "descriptor": descriptor, "star_checks": checks }));
            }
            Family::AsymptoticDensity => ExactSubmeasure::AsymptoticDensity,
            Family::Fin => ExactSubmeasure::fin(),
            Family::TraceNull => ExactSubmeasure::TraceNull,
            Family::Summable => ExactSubmeasure::summable(field_or(&params, "f", WeightFn::reciprocal())?),
            Family::ErdosUlam => ExactSubmeasure::erdos_ulam(field_or(&params, "f", WeightFn::reciprocal())?),
            Family::Density => {
                let blocks: DensityBlocks<Rational> = field(&params, "blocks")?;
                ExactSubmeasure::density(blocks)
            }
            Family::Hypergraph => ExactSubmeasure::hypergraph(field_or(&params, "blocks", HyperBlocks::adl_kneser())?),
            Family::Table => {
                ExactSubmeasure::Table { domain: field(&params, "domain")?, values: parse_values(&params)? }
            }
            Family::Descriptor => ExactSubmeasure::from_json(params.clone())?,
        };
        descriptor.validate()?;
        let value = serde_json::to_value(&descriptor)?;
        self.write_descriptor(&value)?;
        Outcome::new(Status::Verified, json!({ "descriptor": value }))
    }

    fn write_descriptor(&self, v: &Value) -> Result<()> {
        if let Some(p) = &self.write {
            std::fs::write(p, serde_json::to_string_pretty(v)? + "\n")?;
        }
        Ok(())
    }
}

fn parse_values(params: &Value) -> Result<Vec<Rational>> {
    let raw: Vec<String> = field(params, "values")?;
    raw.iter()
        .map(|s| match idealab::scalar::parse_rational(s) {
            Some(q) => Ok(q),
            None => bail!("bad rational {s:?}"),
        })
        .collect()
}
