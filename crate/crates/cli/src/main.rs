//! `scn`: generate benchmark data, train stochastic configuration networks,
//! evaluate saved models, and reproduce the benchmark tables.
//!
//! Exit codes: 0 success, 1 data or I/O failure, 2 usage error, 3 training
//! stalled before reaching the tolerance or the node budget.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};

use scn_cli::model_file::ModelFile;
use scn_cli::report;
use scn_core::data::{apply_norm, gen_db1, load_csv, normalize_minmax, Dataset};
use scn_core::trainer::{run_trials, train, Stats, StopReason, TrialsSummary};
use scn_core::{AlgorithmKind, ScnConfig};

#[derive(Parser)]
#[command(
    name = "scn",
    version,
    about = "Stochastic configuration networks: training, evaluation, and benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a benchmark dataset as train.csv and test.csv
    GenData(GenDataArgs),
    /// Train a model on CSV data and optionally persist model and report
    Train(TrainArgs),
    /// Evaluate a saved model on CSV data
    Eval(EvalArgs),
    /// Run the benchmark suite and emit summary tables
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenDataArgs {
    /// Directory that will receive train.csv and test.csv
    #[arg(long)]
    out: PathBuf,
    /// Dataset family; only "db1" is built in
    #[arg(long, default_value = "db1")]
    dataset: String,
    #[arg(long, default_value_t = 1000)]
    n_train: usize,
    #[arg(long, default_value_t = 300)]
    n_test: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TrainArgs {
    /// Training CSV (trailing --targets columns are the targets)
    #[arg(long)]
    train: PathBuf,
    /// Optional test CSV for per-node generalization reporting
    #[arg(long)]
    test: Option<PathBuf>,
    /// sc1 | sc2 | sc3 | irvfl
    #[arg(long, default_value = "sc3")]
    algorithm: String,
    #[arg(long, default_value_t = 50)]
    l_max: usize,
    /// Stop once training RMSE falls to this (0 disables early stopping)
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Candidate draws per amplitude round
    #[arg(long, default_value_t = 200)]
    t_max: usize,
    /// Comma-separated candidate amplitude ladder
    #[arg(long, default_value = "1,5,15,30,50,100,150,200")]
    upsilon: String,
    /// Initial admissibility level in (0,1)
    #[arg(long, default_value_t = 0.9)]
    r0: f64,
    /// Admissibility-relaxation rounds; each scans the full amplitude ladder
    #[arg(long, default_value_t = 24)]
    max_r_rounds: usize,
    /// deterministic-half | random
    #[arg(long, default_value = "deterministic-half")]
    tau_mode: String,
    /// Window width K; required when --algorithm sc2
    #[arg(long)]
    window: Option<usize>,
    /// sigmoid | tanh | gaussian | sine | cosine
    #[arg(long, default_value = "sigmoid")]
    activation: String,
    /// Number of trailing target columns in the CSVs
    #[arg(long, default_value_t = 1)]
    targets: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the trained model as JSON here
    #[arg(long)]
    model_out: Option<PathBuf>,
    /// Write the per-node CSV report here
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Model JSON produced by `scn train --model-out`
    #[arg(long)]
    model: PathBuf,
    /// CSV whose trailing columns match the model's output count
    #[arg(long)]
    data: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark suite; only "db1" is built in
    #[arg(long, default_value = "db1")]
    suite: String,
    /// Independent trials per configuration
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Worker threads for trials (0 uses all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for table1.csv, efficiency.csv, and window_sweep.csv
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Cmd::GenData(a) => cmd_gen_data(a),
        Cmd::Train(a) => cmd_train(a),
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Bench(a) => cmd_bench(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Renders a flag-level mistake through the normal usage machinery (exit 2).
fn usage_error(kind: ErrorKind, message: String) -> ! {
    Cli::command().error(kind, message).exit()
}

fn write_dataset_csv(path: &Path, ds: &Dataset) -> Result<()> {
    let mut out = String::new();
    for i in 0..ds.n_samples() {
        let mut fields: Vec<String> = Vec::with_capacity(ds.input_dim() + ds.output_dim());
        fields.extend(ds.x.row(i).iter().map(|v| v.to_string()));
        fields.extend(ds.t.row(i).iter().map(|v| v.to_string()));
        writeln!(out, "{}", fields.join(",")).expect("writing to a string cannot fail");
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_gen_data(a: GenDataArgs) -> Result<ExitCode> {
    if a.dataset != "db1" {
        usage_error(
            ErrorKind::InvalidValue,
            format!("unknown dataset '{}'; available: db1", a.dataset),
        );
    }
    let (tr, te) = gen_db1(a.n_train, a.n_test, a.seed)?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    write_dataset_csv(&a.out.join("train.csv"), &tr)?;
    write_dataset_csv(&a.out.join("test.csv"), &te)?;
    println!(
        "wrote {} train rows and {} test rows under {}",
        tr.n_samples(),
        te.n_samples(),
        a.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn build_config(a: &TrainArgs) -> ScnConfig {
    let algorithm = a
        .algorithm
        .parse()
        .unwrap_or_else(|e| usage_error(ErrorKind::InvalidValue, format!("{e}")));
    let activation = a
        .activation
        .parse()
        .unwrap_or_else(|e| usage_error(ErrorKind::InvalidValue, format!("{e}")));
    let tau_mode = a
        .tau_mode
        .parse()
        .unwrap_or_else(|e| usage_error(ErrorKind::InvalidValue, format!("{e}")));
    let upsilon: Vec<f64> = a
        .upsilon
        .split(',')
        .map(|s| {
            s.trim().parse::<f64>().unwrap_or_else(|_| {
                usage_error(
                    ErrorKind::InvalidValue,
                    format!("--upsilon entry '{s}' is not a number"),
                )
            })
        })
        .collect();
    let k_window = match (algorithm, a.window) {
        (AlgorithmKind::Sc2, None) => usage_error(
            ErrorKind::MissingRequiredArgument,
            "--window is required when --algorithm sc2".into(),
        ),
        (_, Some(k)) => k,
        (_, None) => ScnConfig::default().k_window,
    };
    let cfg = ScnConfig {
        l_max: a.l_max,
        epsilon: a.epsilon,
        t_max: a.t_max,
        upsilon,
        r0: a.r0,
        max_r_rounds_per_lambda: a.max_r_rounds,
        tau_mode,
        k_window,
        algorithm,
        activation,
        seed: a.seed,
    };
    if let Err(e) = cfg.validate() {
        usage_error(ErrorKind::InvalidValue, format!("{e}"));
    }
    cfg
}

fn cmd_train(a: TrainArgs) -> Result<ExitCode> {
    let cfg = build_config(&a);
    let train_raw = load_csv(&a.train, a.targets)?;
    let train_n = normalize_minmax(&train_raw)?;
    let meta = train_n
        .norm_meta
        .clone()
        .expect("normalize_minmax always attaches metadata");
    let test_n = match &a.test {
        None => None,
        Some(p) => Some(apply_norm(&load_csv(p, a.targets)?, &meta)?),
    };
    let report = train(&train_n, test_n.as_ref(), &cfg)?;

    println!("algorithm: {}", cfg.algorithm);
    println!("nodes: {}", report.model.node_count());
    println!("stop-reason: {}", report.stop_reason);
    println!("train-rmse: {}", report.final_train_rmse);
    if let Some(t) = report.final_test_rmse {
        println!("test-rmse: {t}");
    }
    println!("time-s: {}", report.construction_time_s);

    if let Some(p) = &a.model_out {
        ModelFile::from_report(&report, &cfg).save(p)?;
    }
    if let Some(p) = &a.report_out {
        report::write(p, &report.trace)?;
    }
    Ok(if report.stop_reason == StopReason::Stalled {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_eval(a: EvalArgs) -> Result<ExitCode> {
    let model = ModelFile::load(&a.model)?.to_model()?;
    let ds = load_csv(&a.data, model.output_dim())?;
    let rmse = model.evaluate(&ds.x, &ds.t)?;
    println!("rmse: {rmse}");
    Ok(ExitCode::SUCCESS)
}

// Benchmark protocol: the approximation table reads every algorithm at two
// depths, the efficiency table runs to a fixed tolerance, and the window
// sweep varies K at a fixed depth.
const BENCH_N_TRAIN: usize = 1000;
const BENCH_N_TEST: usize = 300;
const BENCH_L_FULL: usize = 50;
const BENCH_L_PROBE: usize = 25;
const BENCH_EFF_L_MAX: usize = 100;
const BENCH_EFF_EPSILON: f64 = 0.05;
const BENCH_SWEEP_L: usize = 35;
const BENCH_SWEEP_KS: [usize; 7] = [5, 10, 15, 20, 25, 30, 35];
const BENCH_ALGOS: [AlgorithmKind; 4] = [
    AlgorithmKind::Irvfl,
    AlgorithmKind::Sc1,
    AlgorithmKind::Sc2,
    AlgorithmKind::Sc3,
];

struct TableDoc {
    title: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl TableDoc {
    fn print(&self) {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        println!("\n{}", self.title);
        let fmt_row = |row: &[String]| {
            row.iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        println!("{}", fmt_row(&self.header));
        for row in &self.rows {
            println!("{}", fmt_row(row));
        }
    }

    fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
    }
}

fn probe_stats(summary: &TrialsSummary, l: usize, test: bool) -> Stats {
    let values: Vec<f64> = summary
        .runs
        .iter()
        .map(|run| {
            let steps = &run.report.trace.steps;
            // A run that stopped before depth l contributes its final state.
            let step = steps.get(l - 1).or(steps.last());
            match (step, test) {
                (Some(s), false) => s.train_rmse,
                (Some(s), true) => s.test_rmse.expect("bench runs carry a test set"),
                (None, false) => run.report.final_train_rmse,
                (None, true) => run.report.final_test_rmse.expect("bench runs carry a test set"),
            }
        })
        .collect();
    Stats::of(&values)
}

fn cmd_bench(a: BenchArgs) -> Result<ExitCode> {
    if a.suite != "db1" {
        usage_error(
            ErrorKind::InvalidValue,
            format!("unknown suite '{}'; available: db1", a.suite),
        );
    }
    if a.trials == 0 {
        usage_error(ErrorKind::InvalidValue, "--trials must be at least 1".into());
    }
    let (tr, te) = gen_db1(BENCH_N_TRAIN, BENCH_N_TEST, a.seed)?;
    let tr_n = normalize_minmax(&tr)?;
    let meta = tr_n
        .norm_meta
        .clone()
        .expect("normalize_minmax always attaches metadata");
    let te_n = apply_norm(&te, &meta)?;
    let base = ScnConfig {
        seed: a.seed,
        ..ScnConfig::default()
    };
    println!(
        "suite: db1 ({BENCH_N_TRAIN} train / {BENCH_N_TEST} test), trials: {}, seed: {}",
        a.trials, a.seed
    );

    // Approximation quality at fixed depths.
    let mut table1 = TableDoc {
        title: format!("approximation (L = {BENCH_L_PROBE} and {BENCH_L_FULL})"),
        header: ["algorithm", "L", "train_rmse_mean", "train_rmse_std", "test_rmse_mean", "test_rmse_std"]
            .map(String::from)
            .to_vec(),
        rows: Vec::new(),
    };
    for algorithm in BENCH_ALGOS {
        let cfg = ScnConfig {
            algorithm,
            l_max: BENCH_L_FULL,
            epsilon: 0.0,
            ..base.clone()
        };
        let summary = run_trials(&tr_n, Some(&te_n), &cfg, a.trials, a.jobs)?;
        for l in [BENCH_L_PROBE, BENCH_L_FULL] {
            let train_s = probe_stats(&summary, l, false);
            let test_s = probe_stats(&summary, l, true);
            table1.rows.push(vec![
                algorithm.to_string(),
                l.to_string(),
                train_s.mean.to_string(),
                train_s.std.to_string(),
                test_s.mean.to_string(),
                test_s.std.to_string(),
            ]);
        }
    }
    table1.print();

    // Cost of reaching a fixed tolerance.
    let mut efficiency = TableDoc {
        title: format!(
            "efficiency (epsilon = {BENCH_EFF_EPSILON}, node budget {BENCH_EFF_L_MAX})"
        ),
        header: [
            "algorithm",
            "nodes_mean",
            "nodes_std",
            "time_s_mean",
            "time_s_std",
            "train_rmse_mean",
            "tolerance_met",
            "trials",
        ]
        .map(String::from)
        .to_vec(),
        rows: Vec::new(),
    };
    for algorithm in BENCH_ALGOS {
        let cfg = ScnConfig {
            algorithm,
            l_max: BENCH_EFF_L_MAX,
            epsilon: BENCH_EFF_EPSILON,
            ..base.clone()
        };
        let summary = run_trials(&tr_n, Some(&te_n), &cfg, a.trials, a.jobs)?;
        let met = summary
            .runs
            .iter()
            .filter(|r| r.report.stop_reason == StopReason::ToleranceMet)
            .count();
        efficiency.rows.push(vec![
            algorithm.to_string(),
            summary.node_count.mean.to_string(),
            summary.node_count.std.to_string(),
            summary.time_s.mean.to_string(),
            summary.time_s.std.to_string(),
            summary.train_rmse.mean.to_string(),
            met.to_string(),
            a.trials.to_string(),
        ]);
    }
    efficiency.print();

    // Window width against quality at fixed depth.
    let mut sweep = TableDoc {
        title: format!("window sweep (sc2, L = {BENCH_SWEEP_L})"),
        header: ["K", "train_rmse_mean", "train_rmse_std", "test_rmse_mean", "test_rmse_std"]
            .map(String::from)
            .to_vec(),
        rows: Vec::new(),
    };
    for k in BENCH_SWEEP_KS {
        let cfg = ScnConfig {
            algorithm: AlgorithmKind::Sc2,
            l_max: BENCH_SWEEP_L,
            epsilon: 0.0,
            k_window: k,
            ..base.clone()
        };
        let summary = run_trials(&tr_n, Some(&te_n), &cfg, a.trials, a.jobs)?;
        sweep.rows.push(vec![
            k.to_string(),
            summary.train_rmse.mean.to_string(),
            summary.train_rmse.std.to_string(),
            summary
                .test_rmse
                .as_ref()
                .expect("bench runs carry a test set")
                .mean
                .to_string(),
            summary
                .test_rmse
                .as_ref()
                .expect("bench runs carry a test set")
                .std
                .to_string(),
        ]);
    }
    sweep.print();

    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        table1.write_csv(&dir.join("table1.csv"))?;
        efficiency.write_csv(&dir.join("efficiency.csv"))?;
        sweep.write_csv(&dir.join("window_sweep.csv"))?;
        println!("\ntables written under {}", dir.display());
    }
    Ok(ExitCode::SUCCESS)
}
