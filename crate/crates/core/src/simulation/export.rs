//! On-disk form of an experiment.
//!
//! Every file starts with a `#` header block carrying the configuration
//! (as one line of JSON) and the master seed. CSV readers that treat `#`
//! as a comment character can consume the tables unmodified.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ExperimentConfig, ExperimentOutput};
use crate::error::Result;

pub const ENSEMBLES_CSV: &str = "ensembles.csv";
pub const NODES_CSV: &str = "nodes.csv";
pub const LIKEDNESS_CURVE_CSV: &str = "likedness_curve.csv";
pub const NEIGHBOR_CURVE_CSV: &str = "neighbor_curve.csv";
pub const HISTOGRAM_CSV: &str = "histogram.csv";
pub const AGGREGATE_JSON: &str = "aggregate.json";

fn header_block<W: Write>(mut w: W, cfg: &ExperimentConfig) -> Result<W> {
    writeln!(w, "# config: {}", serde_json::to_string(cfg)?)?;
    writeln!(w, "# master_seed: {}", cfg.master_seed)?;
    Ok(w)
}

fn csv_writer<W: Write>(w: W, cfg: &ExperimentConfig) -> Result<csv::Writer<W>> {
    Ok(csv::Writer::from_writer(header_block(w, cfg)?))
}

/// One row per `(ensemble, node)`: unique likedness and desirability.
pub fn write_ensembles_csv<W: Write>(
    w: W,
    cfg: &ExperimentConfig,
    output: &ExperimentOutput,
) -> Result<()> {
    let mut wtr = csv_writer(w, cfg)?;
    wtr.write_record(["ensemble", "node", "likedness", "desirability"])?;
    for r in &output.results {
        for (node, (l, nd)) in r.likedness.iter().zip(&r.desirability).enumerate() {
            wtr.serialize((r.index, node, l, nd))?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_nodes_csv<W: Write>(w: W, cfg: &ExperimentConfig, output: &ExperimentOutput) -> Result<()> {
    let mut wtr = csv_writer(w, cfg)?;
    for node in &output.aggregate.nodes {
        wtr.serialize(node)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct LikednessRow {
    bin_lo: f64,
    bin_hi: f64,
    count: usize,
    mean_likedness: Option<f64>,
    mean_desirability: Option<f64>,
}

pub fn write_likedness_curve_csv<W: Write>(
    w: W,
    cfg: &ExperimentConfig,
    output: &ExperimentOutput,
) -> Result<()> {
    let mut wtr = csv_writer(w, cfg)?;
    for b in &output.aggregate.likedness_curve.bins {
        wtr.serialize(LikednessRow {
            bin_lo: b.lo,
            bin_hi: b.hi,
            count: b.count,
            mean_likedness: b.mean_x,
            mean_desirability: b.mean_y,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct NeighborRow {
    bin_lo: f64,
    bin_hi: f64,
    count: usize,
    mean_desirability: Option<f64>,
    mean_neighbor_desirability: Option<f64>,
    scaled_neighbor_desirability: Option<f64>,
}

pub fn write_neighbor_curve_csv<W: Write>(
    w: W,
    cfg: &ExperimentConfig,
    output: &ExperimentOutput,
) -> Result<()> {
    let mut wtr = csv_writer(w, cfg)?;
    for b in &output.aggregate.neighbor_curve.bins {
        wtr.serialize(NeighborRow {
            bin_lo: b.lo,
            bin_hi: b.hi,
            count: b.count,
            mean_desirability: b.mean_desirability,
            mean_neighbor_desirability: b.mean_neighbor_desirability,
            scaled_neighbor_desirability: b.scaled_neighbor_desirability,
        })?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_histogram_csv<W: Write>(
    w: W,
    cfg: &ExperimentConfig,
    output: &ExperimentOutput,
) -> Result<()> {
    let mut wtr = csv_writer(w, cfg)?;
    wtr.write_record(["bin_lo", "bin_hi", "count"])?;
    let h = &output.aggregate.histogram;
    for (k, count) in h.counts.iter().enumerate() {
        let (lo, hi) = h.bins.bounds(k);
        wtr.serialize((lo, hi, count))?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct AggregateFile<'a> {
    config: &'a ExperimentConfig,
    master_seed: u64,
    graph_order: usize,
    graph_edges: usize,
    failures: &'a [super::EnsembleFailure],
    #[serde(flatten)]
    aggregate: &'a super::AggregateDataset,
}

pub fn write_aggregate_json<W: Write>(
    w: W,
    cfg: &ExperimentConfig,
    output: &ExperimentOutput,
) -> Result<()> {
    let mut w = w;
    let file = AggregateFile {
        config: cfg,
        master_seed: cfg.master_seed,
        graph_order: output.graph.order(),
        graph_edges: output.graph.edge_count(),
        failures: &output.failures,
        aggregate: &output.aggregate,
    };
    serde_json::to_writer_pretty(&mut w, &file)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes every artifact into `dir` (created if missing) and returns the
/// paths written. The per-ensemble table is optional since it grows with
/// `ensembles × order`.
pub fn write_all(
    dir: &Path,
    cfg: &ExperimentConfig,
    output: &ExperimentOutput,
    include_ensembles: bool,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    type Writer = fn(BufWriter<File>, &ExperimentConfig, &ExperimentOutput) -> Result<()>;
    let mut jobs: Vec<(&str, Writer)> = vec![
        (AGGREGATE_JSON, write_aggregate_json),
        (NODES_CSV, write_nodes_csv),
        (LIKEDNESS_CURVE_CSV, write_likedness_curve_csv),
        (NEIGHBOR_CURVE_CSV, write_neighbor_curve_csv),
        (HISTOGRAM_CSV, write_histogram_csv),
    ];
    if include_ensembles {
        jobs.push((ENSEMBLES_CSV, write_ensembles_csv));
    }
    let mut written = Vec::with_capacity(jobs.len());
    for (name, job) in jobs {
        let path = dir.join(name);
        job(BufWriter::new(File::create(&path)?), cfg, output)?;
        written.push(path);
    }
    Ok(written)
}
