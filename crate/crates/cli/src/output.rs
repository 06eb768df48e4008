//! Record formats shared by the subcommands.
//!
//! CSV: `,` separated, `\n` terminated, header always present. JSON: one flat
//! object per line. Floats use the shortest representation that round-trips.

use std::io::{self, Write};

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A flat record with a fixed CSV column order.
pub trait Record: Serialize {
    const HEADER: &'static [&'static str];

    fn fields(&self) -> Vec<String>;
}

pub fn write_records<R: Record, W: Write>(out: &mut W, format: Format, records: &[R]) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", R::HEADER.join(","))?;
            for r in records {
                writeln!(out, "{}", r.fields().join(","))?;
            }
        }
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct ClosedFormRecord {
    pub measure: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub value: f64,
}

impl Record for ClosedFormRecord {
    const HEADER: &'static [&'static str] = &["measure", "N", "value"];

    fn fields(&self) -> Vec<String> {
        vec![self.measure.clone(), self.n.to_string(), self.value.to_string()]
    }
}

#[derive(Debug, Serialize)]
pub struct McRecord {
    pub ensemble: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    pub measure: &'static str,
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Record for McRecord {
    const HEADER: &'static [&'static str] =
        &["ensemble", "N", "measure", "mean", "stderr", "samples", "seed"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.ensemble.to_string(),
            self.n.to_string(),
            self.measure.to_string(),
            self.mean.to_string(),
            self.stderr.to_string(),
            self.samples.to_string(),
            self.seed.to_string(),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct TailRecord {
    pub ensemble: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    pub epsilon: f64,
    pub frequency: f64,
    pub bound: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Record for TailRecord {
    const HEADER: &'static [&'static str] =
        &["ensemble", "N", "epsilon", "frequency", "bound", "samples", "seed"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.ensemble.to_string(),
            self.n.to_string(),
            self.epsilon.to_string(),
            self.frequency.to_string(),
            self.bound.to_string(),
            self.samples.to_string(),
            self.seed.to_string(),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct Figure1Record {
    #[serde(rename = "N")]
    pub n: usize,
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_stderr: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl Record for Figure1Record {
    const HEADER: &'static [&'static str] =
        &["N", "analytic", "mc_mean", "mc_stderr", "n_samples", "seed"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.analytic.to_string(),
            self.mc_mean.to_string(),
            self.mc_stderr.to_string(),
            self.n_samples.to_string(),
            self.seed.to_string(),
        ]
    }
}

/// A sampled vector or matrix; matrices are flattened row-major.
#[derive(Debug, Serialize)]
pub struct SampleRecord {
    pub ensemble: &'static str,
    pub dim: usize,
    pub seed: u64,
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}
