//! Command-line front end.
//!
//! Subcommands:
//!
//! * `generate` grows a Barabási–Albert graph and writes its edge list.
//! * `solve` computes unique likedness, desirability and product-formula
//!   diagnostics for a graph and a rate file.
//! * `simulate` runs the Monte Carlo experiment and writes its tables.
//! * `fit` fits a power law or exponential to two columns of a table.
//! * `replay` re-executes the command recorded in a manifest.
//!
//! Every command that writes files also writes a JSON manifest next to them
//! holding the canonical argument list, the resolved configuration and the
//! seed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::desirability::{log_drift, neighbor_desirability, product_formula_report};
use crate::error::{Error, Result};
use crate::fitting::{fit_weighted, read_columns, Family};
use crate::graph::{generate_ba, read_edge_list, write_edge_list, BaParams};
use crate::likedness::{normalize_unique, residual, solve, RateMatrix, SolverConfig};
use crate::markov::stationary_closed_form;
use crate::simulation::{
    export, run_experiment, BinSpec, Execution, ExperimentConfig, GraphSource,
};

pub const MANIFEST_SUFFIX: &str = ".manifest.json";
pub const SIMULATION_MANIFEST: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "likedness", version, about = "Likedness centrality toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow a Barabási–Albert graph and write its edge list
    Generate(GenerateArgs),
    /// Solve for likedness and desirability on a graph with given rates
    Solve(SolveArgs),
    /// Run the Monte Carlo rate-ensemble experiment
    Simulate(SimulateArgs),
    /// Fit a power law or exponential to two table columns
    Fit(FitArgs),
    /// Re-run the command recorded in a manifest
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub m0: usize,
    #[arg(long)]
    pub t: usize,
    /// Edges per added vertex [default: m0]
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    /// Output path; the edge list goes to stdout when absent
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            damping: self.damping,
            initial: None,
        }
    }

    fn to_args(&self) -> Vec<String> {
        vec![
            "--tol".into(),
            self.tol.to_string(),
            "--max-iter".into(),
            self.max_iter.to_string(),
            "--damping".into(),
            self.damping.to_string(),
        ]
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Edge-list file
    #[arg(long)]
    pub graph: PathBuf,
    /// Rate CSV with header `i,j,rate`
    #[arg(long)]
    pub rates: PathBuf,
    /// Evaluate the random-walk product formula truncated at this length
    #[arg(long)]
    pub product_n: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output path; JSON goes to stdout when absent
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Edge-list file; a Barabási–Albert graph is generated when absent
    #[arg(long, conflicts_with_all = ["m0", "t", "m", "graph_seed"])]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub m0: usize,
    #[arg(long, default_value_t = 95)]
    pub t: usize,
    /// Edges per added vertex [default: m0]
    #[arg(long)]
    pub m: Option<usize>,
    /// Seed of the generated graph [default: --seed]
    #[arg(long)]
    pub graph_seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    pub ensembles: usize,
    /// Rate parameter of the exponential like-rate distribution
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 30)]
    pub bins: usize,
    /// Bins with fewer observations are left out of the curve fits
    #[arg(long, default_value_t = 10)]
    pub min_bin_count: usize,
    #[arg(long, default_value_t = 0.01)]
    pub max_failure_fraction: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Run ensembles on the current thread
    #[arg(long)]
    pub sequential: bool,
    /// Skip the per-ensemble table
    #[arg(long)]
    pub no_ensembles: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
}

impl SimulateArgs {
    pub fn config(&self) -> ExperimentConfig {
        let graph = match &self.graph {
            Some(path) => GraphSource::File { path: path.clone() },
            None => GraphSource::Generated(BaParams {
                m0: self.m0,
                t: self.t,
                m: self.m.unwrap_or(self.m0),
                seed: self.graph_seed.unwrap_or(self.seed),
            }),
        };
        ExperimentConfig {
            graph,
            ensembles: self.ensembles,
            lambda: self.lambda,
            master_seed: self.seed,
            solver: self.solver.config(),
            bins: BinSpec {
                count: self.bins,
                min_count: self.min_bin_count,
            },
            max_failure_fraction: self.max_failure_fraction,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV table, e.g. one written by `simulate`
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    /// `power` or `exponential`
    #[arg(long, default_value = "power")]
    pub family: String,
    /// Column of regression weights
    #[arg(long)]
    pub weight: Option<String>,
    /// Drop points outside the family's domain instead of failing
    #[arg(long)]
    pub drop_nonpositive: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub subcommand: String,
    /// Arguments that reproduce the run when passed back to the tool.
    pub args: Vec<String>,
    pub config: serde_json::Value,
    pub master_seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    fn new(subcommand: &str, args: Vec<String>, config: serde_json::Value) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            args,
            config,
            master_seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(MANIFEST_SUFFIX);
    PathBuf::from(name)
}

fn path_arg(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

pub fn cmd_generate(args: &GenerateArgs, stdout: &mut dyn Write) -> Result<()> {
    let params = BaParams {
        m0: args.m0,
        t: args.t,
        m: args.m.unwrap_or(args.m0),
        seed: args.seed,
    };
    let graph = generate_ba(&params)?;
    let text = write_edge_list(&graph);
    let Some(output) = &args.output else {
        stdout.write_all(text.as_bytes())?;
        return Ok(());
    };
    fs::write(output, &text)?;
    let mut canonical = vec![
        "generate".to_string(),
        "--m0".into(),
        params.m0.to_string(),
        "--t".into(),
        params.t.to_string(),
        "--m".into(),
        params.m.to_string(),
        "--seed".into(),
        params.seed.to_string(),
    ];
    canonical.extend(["--output".into(), path_arg(output)]);
    let mut manifest = RunManifest::new("generate", canonical, serde_json::to_value(params)?);
    manifest.master_seed = Some(params.seed);
    manifest.outputs.push(output.clone());
    manifest.write(&manifest_path(output))?;
    writeln!(
        stdout,
        "wrote {} vertices, {} edges to {}",
        graph.order(),
        graph.edge_count(),
        output.display()
    )?;
    Ok(())
}

/// Builds the JSON document emitted by `solve`.
pub fn solve_report(args: &SolveArgs) -> Result<serde_json::Value> {
    let graph = read_edge_list(&fs::read_to_string(&args.graph)?)?;
    graph.require_walkable()?;
    let rates = RateMatrix::read_csv(&graph, fs::File::open(&args.rates)?)?;
    let solution = solve(&graph, &rates, &args.solver.config())?;
    let p = stationary_closed_form(&graph)?;
    let unique = normalize_unique(&solution.likedness, &p)?;
    let nd = neighbor_desirability(&graph, &rates, &unique)?;
    let drift = log_drift(&graph, &rates, &unique, &p)?;
    let product = args
        .product_n
        .map(|n| product_formula_report(&graph, &rates, &unique, &p, n))
        .transpose()?;
    Ok(json!({
        "order": graph.order(),
        "edges": graph.edge_count(),
        "iterations": solution.iterations,
        "residual": solution.residual,
        "residuals": residual(&graph, &rates, &unique),
        "stationary": p.values(),
        "likedness_raw": solution.likedness.values(),
        "likedness": unique.values(),
        "desirability": nd.values(),
        "drift": drift,
        "log_stationary_scale": drift.exp(),
        "product": product,
    }))
}

pub fn cmd_solve(args: &SolveArgs, stdout: &mut dyn Write) -> Result<()> {
    let report = solve_report(args)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    let Some(output) = &args.output else {
        stdout.write_all(text.as_bytes())?;
        return Ok(());
    };
    fs::write(output, text)?;
    let mut canonical = vec![
        "solve".to_string(),
        "--graph".into(),
        path_arg(&args.graph),
        "--rates".into(),
        path_arg(&args.rates),
    ];
    if let Some(n) = args.product_n {
        canonical.extend(["--product-n".into(), n.to_string()]);
    }
    canonical.extend(args.solver.to_args());
    canonical.extend(["--output".into(), path_arg(output)]);
    let mut manifest = RunManifest::new(
        "solve",
        canonical,
        json!({ "solver": args.solver.config(), "product_n": args.product_n }),
    );
    manifest.inputs = vec![args.graph.clone(), args.rates.clone()];
    manifest.outputs.push(output.clone());
    manifest.write(&manifest_path(output))?;
    writeln!(stdout, "wrote {}", output.display())?;
    Ok(())
}

fn simulate_canonical_args(args: &SimulateArgs) -> Vec<String> {
    let mut out = vec!["simulate".to_string()];
    match &args.graph {
        Some(path) => out.extend(["--graph".into(), path_arg(path)]),
        None => out.extend([
            "--m0".into(),
            args.m0.to_string(),
            "--t".into(),
            args.t.to_string(),
            "--m".into(),
            args.m.unwrap_or(args.m0).to_string(),
            "--graph-seed".into(),
            args.graph_seed.unwrap_or(args.seed).to_string(),
        ]),
    }
    out.extend([
        "--ensembles".into(),
        args.ensembles.to_string(),
        "--lambda".into(),
        args.lambda.to_string(),
        "--seed".into(),
        args.seed.to_string(),
        "--bins".into(),
        args.bins.to_string(),
        "--min-bin-count".into(),
        args.min_bin_count.to_string(),
        "--max-failure-fraction".into(),
        args.max_failure_fraction.to_string(),
    ]);
    out.extend(args.solver.to_args());
    if args.sequential {
        out.push("--sequential".into());
    }
    if args.no_ensembles {
        out.push("--no-ensembles".into());
    }
    out.extend(["--out-dir".into(), path_arg(&args.out_dir)]);
    out
}

pub fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let cfg = args.config();
    let execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let output = run_experiment(&cfg, execution)?;
    let written = export::write_all(&args.out_dir, &cfg, &output, !args.no_ensembles)?;
    let mut manifest = RunManifest::new(
        "simulate",
        simulate_canonical_args(args),
        serde_json::to_value(&cfg)?,
    );
    manifest.master_seed = Some(cfg.master_seed);
    if let Some(path) = &args.graph {
        manifest.inputs.push(path.clone());
    }
    manifest.outputs = written;
    manifest.write(&args.out_dir.join(SIMULATION_MANIFEST))?;

    let agg = &output.aggregate;
    writeln!(
        stdout,
        "{} ensembles accepted, {} failed, {} observations -> {}",
        agg.accepted,
        agg.failed,
        agg.observations,
        args.out_dir.display()
    )?;
    Ok(())
}

fn fit_points(args: &FitArgs) -> Result<(Family, Vec<(f64, f64)>, Vec<f64>, usize, usize)> {
    let family: Family = args.family.parse()?;
    let data = read_columns(
        fs::File::open(&args.input)?,
        &args.x,
        &args.y,
        args.weight.as_deref(),
    )?;
    let weights = data
        .weights
        .unwrap_or_else(|| vec![1.0; data.points.len()]);
    let mut points = Vec::with_capacity(data.points.len());
    let mut kept_weights = Vec::with_capacity(weights.len());
    let mut dropped = 0;
    for (&(x, y), &w) in data.points.iter().zip(&weights) {
        let in_domain = y > 0.0 && (family == Family::Exponential || x > 0.0) && w > 0.0;
        if !in_domain && args.drop_nonpositive {
            dropped += 1;
            continue;
        }
        points.push((x, y));
        kept_weights.push(w);
    }
    Ok((family, points, kept_weights, data.skipped, dropped))
}

pub fn fit_report(args: &FitArgs) -> Result<serde_json::Value> {
    let (family, points, weights, skipped, dropped) = fit_points(args)?;
    let result = fit_weighted(family, &points, &weights)?;
    Ok(json!({
        "input": args.input,
        "x": args.x,
        "y": args.y,
        "weight": args.weight,
        "fit": result,
        "skipped_empty": skipped,
        "dropped_nonpositive": dropped,
    }))
}

pub fn cmd_fit(args: &FitArgs, stdout: &mut dyn Write) -> Result<()> {
    let report = fit_report(args)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    let Some(output) = &args.output else {
        stdout.write_all(text.as_bytes())?;
        return Ok(());
    };
    fs::write(output, text)?;
    let mut canonical = vec![
        "fit".to_string(),
        "--input".into(),
        path_arg(&args.input),
        "--x".into(),
        args.x.clone(),
        "--y".into(),
        args.y.clone(),
        "--family".into(),
        args.family.clone(),
    ];
    if let Some(w) = &args.weight {
        canonical.extend(["--weight".into(), w.clone()]);
    }
    if args.drop_nonpositive {
        canonical.push("--drop-nonpositive".into());
    }
    canonical.extend(["--output".into(), path_arg(output)]);
    let mut manifest = RunManifest::new(
        "fit",
        canonical,
        json!({ "x": args.x, "y": args.y, "family": args.family, "weight": args.weight }),
    );
    manifest.inputs.push(args.input.clone());
    manifest.outputs.push(output.clone());
    manifest.write(&manifest_path(output))?;
    writeln!(stdout, "wrote {}", output.display())?;
    Ok(())
}

pub fn cmd_replay(args: &ReplayArgs, stdout: &mut dyn Write) -> Result<()> {
    let manifest = RunManifest::read(&args.manifest)?;
    if manifest.subcommand == "replay" {
        return Err(Error::InvalidParams("cannot replay a replay".into()));
    }
    run_args(
        std::iter::once(manifest.tool.clone()).chain(manifest.args.iter().cloned()),
        stdout,
    )
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => cmd_generate(a, stdout),
        Command::Solve(a) => cmd_solve(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Fit(a) => cmd_fit(a, stdout),
        Command::Replay(a) => cmd_replay(a, stdout),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I, stdout: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::InvalidParams(e.to_string()))?;
    run(cli, stdout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parser_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn manifest_path_appends_suffix() {
        assert_eq!(
            manifest_path(Path::new("out/g.txt")),
            PathBuf::from("out/g.txt.manifest.json")
        );
    }

    #[test]
    fn simulate_defaults_match_reference() {
        let cli = Cli::try_parse_from(["likedness", "simulate", "--seed", "7", "--out-dir", "x"])
            .unwrap();
        let Command::Simulate(args) = cli.command else {
            unreachable!()
        };
        let mut expected = ExperimentConfig::reference(1000, 7);
        expected.bins = BinSpec::default();
        assert_eq!(args.config(), expected);
    }

    #[test]
    fn generate_rejects_m_above_m0() {
        let mut sink = Vec::new();
        let err = run_args(
            ["likedness", "generate", "--m0", "5", "--t", "3", "--m", "6", "--seed", "1"],
            &mut sink,
        );
        assert!(matches!(err, Err(Error::InvalidParams(_))));
    }
}
