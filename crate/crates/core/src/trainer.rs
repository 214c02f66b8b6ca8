//! The incremental construction loop and repeated-trial harness.
//!
//! One node per iteration: search for an admissible candidate, weight it
//! according to the configured algorithm, update the residual, record a trace
//! step. The loop stops when the training RMSE reaches the tolerance, the
//! node budget is spent, or the candidate search stalls. The tolerance is
//! compared on the normalized target scale, the same scale every reported
//! RMSE uses.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::configurator::{find_best_node, sample_candidate, AlgorithmKind, FindOutcome, RngStream, ScnConfig};
use crate::data::{rmse, Dataset};
use crate::error::{Result, ScnError};
use crate::linalg::{frob_norm_sq, Matrix, SolveTolerance};
use crate::model::{node_activation_vector, residual, HiddenNode, ScnModel};
use crate::weights::{eval_constructive, eval_global, eval_window};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Training RMSE fell to the tolerance.
    ToleranceMet,
    /// The node budget was spent first.
    NodeBudgetExhausted,
    /// The candidate search exhausted every amplitude and relaxation round.
    Stalled,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::ToleranceMet => "tolerance-met",
            Self::NodeBudgetExhausted => "node-budget-exhausted",
            Self::Stalled => "stalled",
        };
        f.write_str(s)
    }
}

impl FromStr for StopReason {
    type Err = ScnError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tolerance-met" => Ok(Self::ToleranceMet),
            "node-budget-exhausted" => Ok(Self::NodeBudgetExhausted),
            "stalled" => Ok(Self::Stalled),
            other => Err(ScnError::InvalidConfig(format!(
                "unknown stop reason '{other}'"
            ))),
        }
    }
}

/// One accepted node, as recorded during construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    /// 1-based node index.
    pub l: usize,
    pub train_residual_frob: f64,
    pub train_rmse: f64,
    pub test_rmse: Option<f64>,
    /// Admissibility level at acceptance, after any relaxation.
    pub r_at_acceptance: f64,
    pub lambda_used: f64,
    pub candidates_tried: usize,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingTrace {
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub model: ScnModel,
    pub trace: TrainingTrace,
    pub stop_reason: StopReason,
    pub final_train_rmse: f64,
    pub final_test_rmse: Option<f64>,
    pub construction_time_s: f64,
}

fn rmse_of_residual(e: &Matrix) -> f64 {
    (frob_norm_sq(e) / e.rows() as f64).sqrt()
}

/// Builds one model on a normalized training set.
///
/// `train` must carry normalization metadata (see
/// [`crate::data::normalize_minmax`]); `test`, when given, must already be
/// mapped with the same statistics and is only used for per-step reporting.
pub fn train(train: &Dataset, test: Option<&Dataset>, cfg: &ScnConfig) -> Result<TrainReport> {
    cfg.validate()?;
    let meta = train.norm_meta.clone().ok_or_else(|| {
        ScnError::InvalidConfig("training data must be normalized first".into())
    })?;
    if let Some(ts) = test {
        if ts.input_dim() != train.input_dim() || ts.output_dim() != train.output_dim() {
            return Err(ScnError::DimensionMismatch(format!(
                "test data is {}->{} but train data is {}->{}",
                ts.input_dim(),
                ts.output_dim(),
                train.input_dim(),
                train.output_dim()
            )));
        }
    }
    let x = &train.x;
    let t = &train.t;
    let n = x.rows();
    let stream = RngStream::new(cfg.seed);

    let mut e = t.clone();
    let mut nodes: Vec<HiddenNode> = Vec::new();
    let mut h_cols: Vec<Vec<f64>> = Vec::new();
    let mut h_test_cols: Vec<Vec<f64>> = Vec::new();
    let mut beta: Option<Matrix> = None;
    let mut steps: Vec<TraceStep> = Vec::new();

    let t0 = Instant::now();
    let stop_reason = loop {
        if rmse_of_residual(&e) <= cfg.epsilon {
            break StopReason::ToleranceMet;
        }
        if nodes.len() >= cfg.l_max {
            break StopReason::NodeBudgetExhausted;
        }
        let l = nodes.len() + 1;
        let step_start = Instant::now();

        let (node, h, r_acc, lambda_used, tried) = match cfg.algorithm {
            AlgorithmKind::Irvfl => {
                // Baseline: fixed amplitude, first draw accepted untested.
                let lambda = cfg.upsilon[0];
                let mut rng = stream.candidate_rng(l, 0, 0);
                let node = sample_candidate(&mut rng, x.cols(), lambda, cfg.activation);
                let h = node_activation_vector(&node, x)?;
                (node, h, cfg.r0, lambda, 1)
            }
            _ => {
                // The admissibility level resets for every node search.
                let mut r = cfg.r0;
                match find_best_node(x, &e, l, &mut r, cfg, &stream)? {
                    FindOutcome::Found {
                        score,
                        lambda_used,
                        candidates_tried,
                    } => (score.node, score.h, r, lambda_used, candidates_tried),
                    FindOutcome::Stalled { .. } => break StopReason::Stalled,
                }
            }
        };

        h_cols.push(h.clone());
        if let Some(ts) = test {
            h_test_cols.push(node_activation_vector(&node, &ts.x)?);
        }
        nodes.push(node);

        match cfg.algorithm {
            AlgorithmKind::Sc1 | AlgorithmKind::Irvfl => {
                let row = eval_constructive(&e, &h)?;
                for q in 0..e.cols() {
                    for i in 0..e.rows() {
                        e.set(i, q, e.get(i, q) - row[q] * h[i]);
                    }
                }
                let row = Matrix::from_vec(1, row.len(), row)?;
                beta = Some(match beta.take() {
                    None => row,
                    Some(prev) => Matrix::vstack(&prev, &row)?,
                });
            }
            AlgorithmKind::Sc3 => {
                let hm = Matrix::from_cols(&h_cols)?;
                let b = eval_global(&hm, t, SolveTolerance::default_for(n, l))?;
                e = residual(&hm, &b, t)?;
                beta = Some(b);
            }
            AlgorithmKind::Sc2 => {
                let hm = Matrix::from_cols(&h_cols)?;
                let tol = SolveTolerance::default_for(n, l.min(cfg.k_window));
                let b = if l <= cfg.k_window {
                    eval_window(&hm, t, None, cfg.k_window, tol)?
                } else {
                    let prev = beta.as_ref().expect("later steps have weights");
                    let prefix = prev.slice_rows(0, l - cfg.k_window)?;
                    eval_window(&hm, t, Some(&prefix), cfg.k_window, tol)?
                };
                e = residual(&hm, &b, t)?;
                beta = Some(b);
            }
        }

        let train_rmse = rmse_of_residual(&e);
        if let Some(prev) = steps.last() {
            debug_assert!(
                train_rmse <= prev.train_rmse + 1e-10,
                "residual grew from {} to {train_rmse}",
                prev.train_rmse
            );
        }
        let test_rmse = match test {
            None => None,
            Some(ts) => {
                let ht = Matrix::from_cols(&h_test_cols)?;
                let pred = ht.matmul(beta.as_ref().expect("weights exist after update"))?;
                Some(rmse(&pred, &ts.t)?)
            }
        };
        steps.push(TraceStep {
            l,
            train_residual_frob: frob_norm_sq(&e).sqrt(),
            train_rmse,
            test_rmse,
            r_at_acceptance: r_acc,
            lambda_used,
            candidates_tried: tried,
            elapsed_s: step_start.elapsed().as_secs_f64(),
        });
    };
    let construction_time_s = t0.elapsed().as_secs_f64();

    let model = if nodes.is_empty() {
        ScnModel::empty(meta)
    } else {
        ScnModel::new(nodes, beta, meta)?
    };
    let final_train_rmse = rmse_of_residual(&e);
    let final_test_rmse = match test {
        None => None,
        Some(ts) => Some(rmse(&model.predict_normalized(&ts.x)?, &ts.t)?),
    };
    Ok(TrainReport {
        model,
        trace: TrainingTrace { steps },
        stop_reason,
        final_train_rmse,
        final_test_rmse,
        construction_time_s,
    })
}

/// One completed trial of a repeated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRun {
    pub seed: u64,
    pub report: TrainReport,
}

/// Mean and sample standard deviation (zero when fewer than two values).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n >= 1, "stats need at least one value");
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
            var.sqrt()
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialsSummary {
    pub runs: Vec<TrialRun>,
    pub train_rmse: Stats,
    pub test_rmse: Option<Stats>,
    pub node_count: Stats,
    pub time_s: Stats,
}

/// Runs `n_trials` independent constructions, one derived seed per trial,
/// optionally across `jobs` worker threads (0 uses the ambient thread pool).
/// Trial order, and therefore the summary, is independent of scheduling.
pub fn run_trials(
    train: &Dataset,
    test: Option<&Dataset>,
    cfg: &ScnConfig,
    n_trials: usize,
    jobs: usize,
) -> Result<TrialsSummary> {
    if n_trials == 0 {
        return Err(ScnError::InvalidConfig("n_trials must be at least 1".into()));
    }
    let stream = RngStream::new(cfg.seed);
    let seeds: Vec<u64> = (0..n_trials).map(|t| stream.derive_seed(t as u64)).collect();
    let run_one = |seed: &u64| -> Result<TrialRun> {
        let mut trial_cfg = cfg.clone();
        trial_cfg.seed = *seed;
        Ok(TrialRun {
            seed: *seed,
            report: self::train(train, test, &trial_cfg)?,
        })
    };
    let runs: Vec<TrialRun> = if jobs == 1 {
        seeds.iter().map(run_one).collect::<Result<_>>()?
    } else if jobs == 0 {
        seeds.par_iter().map(run_one).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| ScnError::InvalidConfig(format!("cannot build thread pool: {e}")))?;
        pool.install(|| seeds.par_iter().map(run_one).collect::<Result<Vec<_>>>())?
    };

    let train_rmse = Stats::of(&runs.iter().map(|r| r.report.final_train_rmse).collect::<Vec<_>>());
    let test_rmse = if test.is_some() {
        Some(Stats::of(
            &runs
                .iter()
                .map(|r| r.report.final_test_rmse.expect("test set implies test rmse"))
                .collect::<Vec<_>>(),
        ))
    } else {
        None
    };
    let node_count = Stats::of(
        &runs
            .iter()
            .map(|r| r.report.model.node_count() as f64)
            .collect::<Vec<_>>(),
    );
    let time_s = Stats::of(
        &runs
            .iter()
            .map(|r| r.report.construction_time_s)
            .collect::<Vec<_>>(),
    );
    Ok(TrialsSummary {
        runs,
        train_rmse,
        test_rmse,
        node_count,
        time_s,
    })
}
