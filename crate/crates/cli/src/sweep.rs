//! Parameter grids: every combination of per-index `(m, L)` choices, scheme
//! and failure count becomes one simulated cell and one CSV row.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use codedtn::fixtures::plan_network;
use codedtn::simulator::run_experiment;
use codedtn::{ComplexField, Field, FieldKind, IndexLabel, PrimeField, RealField, SlicingPlan};
use serde::{Deserialize, Serialize};

use crate::{parse_failures, parse_scheme_choice, pick_scheme, with_field};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub schema_version: u32,
    #[serde(default = "default_field")]
    pub field: String,
    #[serde(default)]
    pub seed: u64,
    /// Dimension of the ring bonds joining the generated tensors.
    #[serde(default = "default_bond")]
    pub bond: usize,
    /// Allowed node counts and dimensions, one entry per sliced index.
    pub indices: Vec<IndexChoice>,
    pub schemes: Vec<String>,
    pub f: Vec<u64>,
    #[serde(default = "default_failures")]
    pub failures: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexChoice {
    pub nodes: Vec<usize>,
    pub dims: Vec<usize>,
}

fn default_field() -> String {
    "gf".into()
}

fn default_bond() -> usize {
    2
}

fn default_failures() -> String {
    "adversarial".into()
}

#[derive(Debug, Serialize)]
struct Row {
    plan: String,
    scheme: String,
    f: u64,
    workers: Option<u64>,
    gain: Option<i64>,
    decode_verified: bool,
    note: String,
}

fn plans(config: &SweepConfig) -> Vec<Vec<(usize, usize)>> {
    if config.indices.is_empty() {
        return Vec::new();
    }
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for choice in &config.indices {
        let mut next = Vec::new();
        for prefix in &out {
            for &m in &choice.nodes {
                for &l in &choice.dims {
                    let mut p = prefix.clone();
                    p.push((m, l));
                    next.push(p);
                }
            }
        }
        out = next;
    }
    out
}

fn cell<F: Field>(field: F, config: &SweepConfig, params: &[(usize, usize)], scheme: &str, f: u64) -> Result<Row> {
    let plan_text: Vec<String> = params.iter().map(|(m, l)| format!("{m}:{l}")).collect();
    let mut row = Row {
        plan: plan_text.join(","),
        scheme: scheme.to_string(),
        f,
        workers: None,
        gain: None,
        decode_verified: false,
        note: String::new(),
    };
    let attempt = || -> Result<codedtn::simulator::SimulationReport> {
        let net = plan_network(field, params, config.bond, config.seed);
        let labels: Vec<IndexLabel> = (1..=params.len()).map(|i| IndexLabel::new(format!("s{i}"))).collect();
        let plan = SlicingPlan::new(&net, &labels)?;
        let choice = parse_scheme_choice(scheme).map_err(anyhow::Error::msg)?;
        let code = pick_scheme(choice, &plan, f)?;
        let pattern = parse_failures(&config.failures, f, config.seed)?;
        Ok(run_experiment(&net, &code, f, &pattern)?)
    };
    match attempt() {
        Ok(r) => {
            if scheme == "auto" {
                row.scheme = format!("auto:{}", r.scheme);
            }
            row.workers = Some(r.workers_provisioned);
            row.gain = Some(r.gain);
            row.decode_verified = r.verified;
            row.note = match r.failure_reason {
                Some(reason) => reason,
                None if !r.exhaustive && r.failure_sets_tested > 1 => "sampled failure sets".into(),
                None => String::new(),
            };
        }
        Err(e) => row.note = format!("{e:#}"),
    }
    Ok(row)
}

/// Returns false when some applicable cell failed to decode correctly.
pub fn run(config_path: &Path, out: Option<&Path>) -> Result<bool> {
    let text = fs::read_to_string(config_path).with_context(|| format!("reading {}", config_path.display()))?;
    let config: SweepConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", config_path.display()))?;
    anyhow::ensure!(config.schema_version == 1, "schema_version {} is not supported", config.schema_version);
    let kind: FieldKind = config.field.parse()?;

    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout()),
    };
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
    writer.write_record(["plan", "scheme", "f", "workers", "gain", "decode_verified", "note"])?;
    let mut ok = true;
    for params in plans(&config) {
        for scheme in &config.schemes {
            for &f in &config.f {
                let row = with_field!(kind, |field| cell(field, &config, &params, scheme, f))?;
                ok &= row.decode_verified || row.workers.is_none();
                writer.serialize(&row)?;
            }
        }
    }
    writer.flush()?;
    Ok(ok)
}
