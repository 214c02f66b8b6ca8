//! JSON persistence for trained models.
//!
//! The on-disk document keeps everything needed to predict without the
//! training data: node parameters, output weights, and the normalization
//! statistics baked in at training time. Numbers round-trip exactly, so a
//! load-save cycle is byte-stable and a loaded model predicts bit-for-bit
//! like the original.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use scn_core::data::NormMeta;
use scn_core::linalg::Matrix;
use scn_core::model::{HiddenNode, ScnModel};
use scn_core::trainer::TrainReport;
use scn_core::ScnConfig;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub w: Vec<f64>,
    pub b: f64,
    /// Amplitude bound the node was drawn from.
    pub lambda_used: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormMetaEntry {
    pub x_min: Vec<f64>,
    pub x_max: Vec<f64>,
    pub t_min: Vec<f64>,
    pub t_max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub algorithm: String,
    pub seed: u64,
    pub final_train_rmse: f64,
    pub stop_reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub input_dim: usize,
    pub output_dim: usize,
    pub activation: String,
    pub nodes: Vec<NodeEntry>,
    /// Row l holds the output weights of node l; L rows by m columns.
    pub output_weights: Vec<Vec<f64>>,
    pub norm_meta: NormMetaEntry,
    pub training_summary: TrainingSummary,
}

impl ModelFile {
    pub fn from_report(report: &TrainReport, cfg: &ScnConfig) -> Self {
        let model = &report.model;
        let steps = &report.trace.steps;
        assert_eq!(
            model.node_count(),
            steps.len(),
            "trace length always matches the node count"
        );
        let nodes = model
            .nodes()
            .iter()
            .zip(steps)
            .map(|(node, step)| NodeEntry {
                w: node.w.clone(),
                b: node.b,
                lambda_used: step.lambda_used,
            })
            .collect();
        let output_weights = match model.output_weights() {
            None => Vec::new(),
            Some(b) => (0..b.rows()).map(|i| b.row(i).to_vec()).collect(),
        };
        let meta = model.norm_meta();
        ModelFile {
            format_version: FORMAT_VERSION,
            input_dim: model.input_dim(),
            output_dim: model.output_dim(),
            activation: model
                .nodes()
                .first()
                .map(|n| n.activation)
                .unwrap_or(cfg.activation)
                .to_string(),
            nodes,
            output_weights,
            norm_meta: NormMetaEntry {
                x_min: meta.x_min().to_vec(),
                x_max: meta.x_max().to_vec(),
                t_min: meta.t_min().to_vec(),
                t_max: meta.t_max().to_vec(),
            },
            training_summary: TrainingSummary {
                algorithm: cfg.algorithm.to_string(),
                seed: cfg.seed,
                final_train_rmse: report.final_train_rmse,
                stop_reason: report.stop_reason.to_string(),
            },
        }
    }

    pub fn to_model(&self) -> Result<ScnModel> {
        if self.format_version != FORMAT_VERSION {
            bail!(
                "unsupported model format version {} (expected {FORMAT_VERSION})",
                self.format_version
            );
        }
        let activation = self
            .activation
            .parse()
            .with_context(|| format!("bad activation '{}'", self.activation))?;
        let meta = NormMeta::new(
            self.norm_meta.x_min.clone(),
            self.norm_meta.x_max.clone(),
            self.norm_meta.t_min.clone(),
            self.norm_meta.t_max.clone(),
        )?;
        if meta.input_dim() != self.input_dim || meta.output_dim() != self.output_dim {
            bail!(
                "normalization metadata is {}->{} but the header says {}->{}",
                meta.input_dim(),
                meta.output_dim(),
                self.input_dim,
                self.output_dim
            );
        }
        if self.nodes.is_empty() {
            if !self.output_weights.is_empty() {
                bail!("a model without nodes cannot carry output weights");
            }
            return Ok(ScnModel::empty(meta));
        }
        if self.output_weights.len() != self.nodes.len() {
            bail!(
                "{} output weight rows for {} nodes",
                self.output_weights.len(),
                self.nodes.len()
            );
        }
        let nodes = self
            .nodes
            .iter()
            .map(|n| HiddenNode::new(n.w.clone(), n.b, activation))
            .collect::<scn_core::Result<Vec<_>>>()?;
        let weights = Matrix::from_rows(&self.output_weights)?;
        Ok(ScnModel::new(nodes, Some(weights), meta)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let file: ModelFile =
            serde_json::from_str(&text).with_context(|| format!("bad model file {}", path.display()))?;
        Ok(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use scn_core::data::{apply_norm, gen_db1, normalize_minmax};
    use scn_core::trainer::train;
    use scn_core::AlgorithmKind;

    fn trained() -> (TrainReport, ScnConfig, scn_core::Dataset) {
        let (tr, te) = gen_db1(80, 40, 5).unwrap();
        let tr_n = normalize_minmax(&tr).unwrap();
        let te_n = apply_norm(&te, tr_n.norm_meta.as_ref().unwrap()).unwrap();
        let cfg = ScnConfig {
            l_max: 6,
            epsilon: 0.0,
            t_max: 25,
            algorithm: AlgorithmKind::Sc3,
            ..ScnConfig::default()
        };
        let report = train(&tr_n, Some(&te_n), &cfg).unwrap();
        (report, cfg, te)
    }

    #[test]
    fn round_trip_is_byte_stable_and_predicts_identically() {
        let (report, cfg, te_raw) = trained();
        let file = ModelFile::from_report(&report, &cfg);
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("m1.json");
        let p2 = dir.path().join("m2.json");
        file.save(&p1).unwrap();
        let loaded = ModelFile::load(&p1).unwrap();
        loaded.save(&p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());

        let rebuilt = loaded.to_model().unwrap();
        let a = report.model.predict(&te_raw.x).unwrap();
        let b = rebuilt.predict(&te_raw.x).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lambda_used_follows_the_trace() {
        let (report, cfg, _) = trained();
        let file = ModelFile::from_report(&report, &cfg);
        for (entry, step) in file.nodes.iter().zip(&report.trace.steps) {
            assert_eq!(entry.lambda_used, step.lambda_used);
        }
        assert_eq!(file.training_summary.stop_reason, "node-budget-exhausted");
    }

    #[test]
    fn empty_model_round_trips() {
        let (tr, _) = gen_db1(30, 10, 9).unwrap();
        let tr_n = normalize_minmax(&tr).unwrap();
        let cfg = ScnConfig {
            epsilon: 10.0,
            ..ScnConfig::default()
        };
        let report = train(&tr_n, None, &cfg).unwrap();
        assert_eq!(report.model.node_count(), 0);
        let file = ModelFile::from_report(&report, &cfg);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("empty.json");
        file.save(&p).unwrap();
        let rebuilt = ModelFile::load(&p).unwrap().to_model().unwrap();
        assert_eq!(rebuilt.node_count(), 0);
        let pred = rebuilt.predict(&tr.x).unwrap();
        // A zero-node model predicts the normalized zero, i.e. each target's
        // stored minimum after denormalization.
        let t_min = rebuilt.norm_meta().t_min()[0];
        for i in 0..pred.rows() {
            assert!((pred.get(i, 0) - t_min).abs() < 1e-15);
        }
    }

    #[test]
    fn corrupt_documents_are_rejected() {
        let (report, cfg, _) = trained();
        let mut file = ModelFile::from_report(&report, &cfg);
        file.output_weights.pop();
        assert!(file.to_model().is_err());

        let mut file = ModelFile::from_report(&report, &cfg);
        file.activation = "step".into();
        assert!(file.to_model().is_err());

        let mut file = ModelFile::from_report(&report, &cfg);
        file.format_version = 99;
        assert!(file.to_model().is_err());
    }
}
