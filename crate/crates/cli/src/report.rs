use std::io::Write;
use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Falsified,
    Unknown,
    Failure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Verified => 0,
            Status::Falsified => 1,
            Status::Unknown | Status::Failure => 2,
        }
    }
}

/// What a command hands back before the report is assembled.
pub struct Outcome {
    pub status: Status,
    pub payload: Value,
}

impl Outcome {
    pub fn new(status: Status, payload: impl Serialize) -> Result<Self> {
        Ok(Outcome { status, payload: serde_json::to_value(payload)? })
    }

    pub fn verified_if(ok: bool, payload: impl Serialize) -> Result<Self> {
        Self::new(if ok { Status::Verified } else { Status::Falsified }, payload)
    }
}

/// Everything that determines a run; its hash goes into the report.
#[derive(Serialize)]
pub struct RunInputs {
    pub operation: String,
    pub arguments: Value,
    pub input: Value,
    pub horizon: Option<u64>,
    pub budget: Option<u64>,
    pub seed: u64,
}

impl RunInputs {
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("inputs serialize");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Serialize)]
pub struct RunReport {
    pub operation: String,
    pub status: Status,
    pub input_hash: String,
    pub horizon: Option<u64>,
    pub budget: Option<u64>,
    pub seed: u64,
    pub payload: Value,
    pub timing: Value,
}

impl RunReport {
    pub fn new(inputs: &RunInputs, outcome: Outcome, elapsed: Duration) -> Self {
        RunReport {
            operation: inputs.operation.clone(),
            status: outcome.status,
            input_hash: inputs.hash(),
            horizon: inputs.horizon,
            budget: inputs.budget,
            seed: inputs.seed,
            payload: outcome.payload,
            timing: json!({ "elapsed_ms": elapsed.as_secs_f64() * 1000.0 }),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// One row per leaf of the payload and timing objects.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["operation", "status", "input_hash", "horizon", "budget", "seed", "path", "value"])?;
        let status = serde_json::to_value(self.status)?;
        let status = status.as_str().unwrap_or_default().to_string();
        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut leaves = Vec::new();
        flatten("payload", &self.payload, &mut leaves);
        flatten("timing", &self.timing, &mut leaves);
        for (path, value) in leaves {
            w.write_record([
                self.operation.as_str(),
                status.as_str(),
                self.input_hash.as_str(),
                opt(self.horizon).as_str(),
                opt(self.budget).as_str(),
                self.seed.to_string().as_str(),
                path.as_str(),
                value.as_str(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                flatten(&format!("{prefix}.{k}"), x, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs(seed: u64) -> RunInputs {
        RunInputs {
            operation: "verify nonpath".into(),
            arguments: json!({ "suite": "nonpath" }),
            input: Value::Null,
            horizon: Some(10),
            budget: None,
            seed,
        }
    }

    #[test]
    fn hash_depends_on_every_input() {
        assert_eq!(inputs(1).hash(), inputs(1).hash());
        assert_ne!(inputs(1).hash(), inputs(2).hash());
        assert_eq!(inputs(1).hash().len(), 64);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Verified.exit_code(), 0);
        assert_eq!(Status::Falsified.exit_code(), 1);
        assert_eq!(Status::Unknown.exit_code(), 2);
        assert_eq!(Status::Failure.exit_code(), 2);
    }

    #[test]
    fn csv_flattens_nested_payload() {
        let outcome = Outcome::new(Status::Verified, json!({ "a": [1, { "b": "x" }], "c": {} })).unwrap();
        let r = RunReport::new(&inputs(0), outcome, Duration::from_millis(3));
        let text = r.to_csv().unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<(String, String)> =
            rd.records().map(|r| r.unwrap()).map(|r| (r[6].to_string(), r[7].to_string())).collect();
        assert_eq!(rows[0], ("payload.a.0".into(), "1".into()));
        assert_eq!(rows[1], ("payload.a.1.b".into(), "x".into()));
        assert_eq!(rows[2], ("payload.c".into(), "{}".into()));
        assert_eq!(rows[3].0, "timing.elapsed_ms");
    }
}
