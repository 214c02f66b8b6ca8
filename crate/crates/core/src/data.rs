//! Dataset plumbing: CSV loading, min-max normalization with stored
//! statistics, seeded splits, the DB1 benchmark generator, and RMSE.
//!
//! Normalization statistics are always computed on a training partition and
//! then applied to held-out data via [`apply_norm`], so no test information
//! leaks into the mapping. The statistics travel with the trained model,
//! which is what makes a saved model self-contained.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, ScnError};
use crate::linalg::Matrix;

/// Per-column min/max statistics for inputs and targets.
///
/// A constant column maps to 0.5 and maps back to its original value, so
/// degenerate features round-trip instead of dividing by zero.
#[derive(Debug, Clone, PartialEq)]
pub struct NormMeta {
    x_min: Vec<f64>,
    x_max: Vec<f64>,
    t_min: Vec<f64>,
    t_max: Vec<f64>,
}

fn norm_one(v: f64, min: f64, max: f64) -> f64 {
    if max == min {
        0.5
    } else {
        (v - min) / (max - min)
    }
}

fn denorm_one(v: f64, min: f64, max: f64) -> f64 {
    min + v * (max - min)
}

impl NormMeta {
    pub fn new(x_min: Vec<f64>, x_max: Vec<f64>, t_min: Vec<f64>, t_max: Vec<f64>) -> Result<Self> {
        if x_min.len() != x_max.len() || t_min.len() != t_max.len() {
            return Err(ScnError::DimensionMismatch(
                "min/max vectors must pair up".into(),
            ));
        }
        if x_min.is_empty() || t_min.is_empty() {
            return Err(ScnError::DimensionMismatch(
                "normalization metadata needs at least one input and one target column".into(),
            ));
        }
        let all = x_min.iter().chain(&x_max).chain(&t_min).chain(&t_max);
        for (i, v) in all.enumerate() {
            if !v.is_finite() {
                return Err(ScnError::NonFinite(format!(
                    "normalization statistic {i} is {v}"
                )));
            }
        }
        for (lo, hi) in x_min.iter().zip(&x_max).chain(t_min.iter().zip(&t_max)) {
            if lo > hi {
                return Err(ScnError::InvalidConfig(format!(
                    "normalization min {lo} exceeds max {hi}"
                )));
            }
        }
        Ok(Self {
            x_min,
            x_max,
            t_min,
            t_max,
        })
    }

    /// Identity mapping: every column already treated as spanning [0, 1].
    pub fn identity(input_dim: usize, output_dim: usize) -> Self {
        Self {
            x_min: vec![0.0; input_dim],
            x_max: vec![1.0; input_dim],
            t_min: vec![0.0; output_dim],
            t_max: vec![1.0; output_dim],
        }
    }

    /// Statistics taken column-wise over a training pair.
    pub fn fit(x: &Matrix, t: &Matrix) -> Self {
        let col_range = |m: &Matrix, j: usize| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for i in 0..m.rows() {
                lo = lo.min(m.get(i, j));
                hi = hi.max(m.get(i, j));
            }
            (lo, hi)
        };
        let (mut x_min, mut x_max) = (vec![], vec![]);
        for j in 0..x.cols() {
            let (lo, hi) = col_range(x, j);
            x_min.push(lo);
            x_max.push(hi);
        }
        let (mut t_min, mut t_max) = (vec![], vec![]);
        for j in 0..t.cols() {
            let (lo, hi) = col_range(t, j);
            t_min.push(lo);
            t_max.push(hi);
        }
        Self {
            x_min,
            x_max,
            t_min,
            t_max,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.x_min.len()
    }

    pub fn output_dim(&self) -> usize {
        self.t_min.len()
    }

    pub fn x_min(&self) -> &[f64] {
        &self.x_min
    }

    pub fn x_max(&self) -> &[f64] {
        &self.x_max
    }

    pub fn t_min(&self) -> &[f64] {
        &self.t_min
    }

    pub fn t_max(&self) -> &[f64] {
        &self.t_max
    }

    fn map(m: &Matrix, min: &[f64], max: &[f64], f: fn(f64, f64, f64) -> f64) -> Result<Matrix> {
        if m.cols() != min.len() {
            return Err(ScnError::DimensionMismatch(format!(
                "matrix has {} columns but metadata covers {}",
                m.cols(),
                min.len()
            )));
        }
        let mut out = m.clone();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(i, j, f(m.get(i, j), min[j], max[j]));
            }
        }
        Ok(out)
    }

    pub fn normalize_x(&self, x: &Matrix) -> Result<Matrix> {
        Self::map(x, &self.x_min, &self.x_max, norm_one)
    }

    pub fn normalize_t(&self, t: &Matrix) -> Result<Matrix> {
        Self::map(t, &self.t_min, &self.t_max, norm_one)
    }

    pub fn denormalize_t(&self, t: &Matrix) -> Result<Matrix> {
        Self::map(t, &self.t_min, &self.t_max, denorm_one)
    }
}

/// Supervised sample pair. `norm_meta` is `None` until the dataset has been
/// min-max normalized; the trainer refuses raw data.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    pub t: Matrix,
    pub norm_meta: Option<NormMeta>,
}

impl Dataset {
    pub fn new(x: Matrix, t: Matrix) -> Result<Self> {
        if x.rows() != t.rows() {
            return Err(ScnError::DimensionMismatch(format!(
                "{} input rows but {} target rows",
                x.rows(),
                t.rows()
            )));
        }
        Ok(Self {
            x,
            t,
            norm_meta: None,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.x.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.x.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.t.cols()
    }
}

/// The DB1 target: three Gaussian bumps of very different widths on [0, 1].
pub fn db1_target(x: f64) -> f64 {
    let a = 10.0 * x - 4.0;
    let b = 80.0 * x - 40.0;
    let c = 80.0 * x - 20.0;
    0.2 * (-a * a).exp() + 0.5 * (-b * b).exp() + 0.3 * (-c * c).exp()
}

/// DB1 sample pair: `n_train` i.i.d. uniform inputs drawn from `seed`, and a
/// seed-independent regular grid of `n_test` points spanning [0, 1] inclusive.
/// Both come back raw; normalize before training.
pub fn gen_db1(n_train: usize, n_test: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    if n_train == 0 || n_test == 0 {
        return Err(ScnError::EmptyData(
            "db1 needs at least one train and one test sample".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train_x: Vec<f64> = (0..n_train).map(|_| rng.random::<f64>()).collect();
    let test_x: Vec<f64> = if n_test == 1 {
        vec![0.5]
    } else {
        (0..n_test)
            .map(|i| i as f64 / (n_test - 1) as f64)
            .collect()
    };
    let build = |xs: &[f64]| -> Result<Dataset> {
        let t: Vec<f64> = xs.iter().map(|&x| db1_target(x)).collect();
        Dataset::new(
            Matrix::from_vec(xs.len(), 1, xs.to_vec())?,
            Matrix::from_vec(xs.len(), 1, t)?,
        )
    };
    Ok((build(&train_x)?, build(&test_x)?))
}

/// Loads a CSV of decimal-point reals where the last `target_cols` columns are
/// targets. A non-numeric first line is treated as a header. Row and column
/// numbers in errors are 1-based physical file positions.
pub fn load_csv(path: &Path, target_cols: usize) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text, target_cols)
}

fn parse_csv(text: &str, target_cols: usize) -> Result<Dataset> {
    let mut lines = text.lines().enumerate();
    let first = match lines.next() {
        Some((_, line)) => line,
        None => return Err(ScnError::EmptyData("csv file has no rows".into())),
    };
    let parse_row = |row: usize, line: &str, expect: Option<usize>| -> Result<Vec<f64>> {
        let cells: Vec<&str> = line.split(',').collect();
        if let Some(want) = expect {
            if cells.len() != want {
                return Err(ScnError::Parse {
                    row,
                    col: cells.len().min(want) + 1,
                    message: format!("expected {want} columns, got {}", cells.len()),
                });
            }
        }
        cells
            .iter()
            .enumerate()
            .map(|(j, cell)| {
                let v: f64 = cell.trim().parse().map_err(|_| ScnError::Parse {
                    row,
                    col: j + 1,
                    message: format!("cannot parse '{}' as a number", cell.trim()),
                })?;
                if !v.is_finite() {
                    return Err(ScnError::Parse {
                        row,
                        col: j + 1,
                        message: format!("non-finite value '{}'", cell.trim()),
                    });
                }
                Ok(v)
            })
            .collect()
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let header_like = first
        .split(',')
        .any(|cell| cell.trim().parse::<f64>().is_err());
    if !header_like {
        rows.push(parse_row(1, first, None)?);
    }
    let width = rows.first().map(|r| r.len());
    let mut width = width;
    for (idx, line) in lines {
        let row = parse_row(idx + 1, line, width)?;
        width = Some(row.len());
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(ScnError::EmptyData("csv file has no data rows".into()));
    }
    let cols = rows[0].len();
    if target_cols == 0 {
        return Err(ScnError::InvalidConfig(
            "at least one target column is required".into(),
        ));
    }
    if target_cols >= cols {
        return Err(ScnError::InvalidConfig(format!(
            "{target_cols} target columns leave no input columns in a {cols}-column file"
        )));
    }
    let d = cols - target_cols;
    let n = rows.len();
    let mut x = Matrix::zeros(n, d);
    let mut t = Matrix::zeros(n, target_cols);
    for (i, row) in rows.iter().enumerate() {
        for j in 0..d {
            x.set(i, j, row[j]);
        }
        for j in 0..target_cols {
            t.set(i, j, row[d + j]);
        }
    }
    Dataset::new(x, t)
}

/// Min-max normalizes a dataset using its own statistics and records them.
pub fn normalize_minmax(ds: &Dataset) -> Result<Dataset> {
    let meta = NormMeta::fit(&ds.x, &ds.t);
    apply_norm(ds, &meta)
}

/// Normalizes a dataset with statistics fitted elsewhere (train statistics
/// applied to a test partition, or a stored model's metadata).
pub fn apply_norm(ds: &Dataset, meta: &NormMeta) -> Result<Dataset> {
    Ok(Dataset {
        x: meta.normalize_x(&ds.x)?,
        t: meta.normalize_t(&ds.t)?,
        norm_meta: Some(meta.clone()),
    })
}

/// Seeded random partition. The train side gets `ceil(train_fraction * N)`
/// rows; both sides must end up non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.75,
            seed: 0,
        }
    }
}

pub fn split(ds: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(ScnError::InvalidConfig(format!(
            "train_fraction must lie in (0, 1), got {}",
            spec.train_fraction
        )));
    }
    let n = ds.n_samples();
    let n_train = (spec.train_fraction * n as f64).ceil() as usize;
    if n_train == 0 || n_train >= n {
        return Err(ScnError::EmptyData(format!(
            "split of {n} rows at fraction {} leaves an empty side",
            spec.train_fraction
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    idx.shuffle(&mut rng);
    let take = |ids: &[usize]| -> Result<Dataset> {
        let xr: Vec<Vec<f64>> = ids.iter().map(|&i| ds.x.row(i).to_vec()).collect();
        let tr: Vec<Vec<f64>> = ids.iter().map(|&i| ds.t.row(i).to_vec()).collect();
        Ok(Dataset {
            x: Matrix::from_rows(&xr)?,
            t: Matrix::from_rows(&tr)?,
            norm_meta: ds.norm_meta.clone(),
        })
    };
    Ok((take(&idx[..n_train])?, take(&idx[n_train..])?))
}

/// Root mean square error over all samples, with multi-output squared errors
/// summed across outputs inside each sample before averaging.
pub fn rmse(pred: &Matrix, target: &Matrix) -> Result<f64> {
    if pred.rows() != target.rows() || pred.cols() != target.cols() {
        return Err(ScnError::DimensionMismatch(format!(
            "prediction is {}x{} but target is {}x{}",
            pred.rows(),
            pred.cols(),
            target.rows(),
            target.cols()
        )));
    }
    let s: f64 = pred
        .as_slice()
        .iter()
        .zip(target.as_slice())
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok((s / pred.rows() as f64).sqrt())
}
