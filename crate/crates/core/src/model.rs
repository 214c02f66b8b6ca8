//! Hidden nodes, activation kinds, and the assembled model.
//!
//! A model is a flat sum: prediction = sum_j beta_j * g(w_j . x + b_j),
//! computed in normalized space. The stored normalization statistics map raw
//! inputs in and raw predictions out, so a model file is self-contained.

use std::fmt;
use std::str::FromStr;

use crate::data::NormMeta;
use crate::error::{Result, ScnError};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ActivationKind {
    #[default]
    Sigmoid,
    Tanh,
    Gaussian,
    Sine,
    Cosine,
}

impl ActivationKind {
    pub fn apply(self, t: f64) -> f64 {
        match self {
            Self::Sigmoid => 1.0 / (1.0 + (-t).exp()),
            Self::Tanh => t.tanh(),
            Self::Gaussian => (-t * t).exp(),
            Self::Sine => t.sin(),
            Self::Cosine => t.cos(),
        }
    }

    pub const ALL: [ActivationKind; 5] = [
        Self::Sigmoid,
        Self::Tanh,
        Self::Gaussian,
        Self::Sine,
        Self::Cosine,
    ];
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Sigmoid => "sigmoid",
            Self::Tanh => "tanh",
            Self::Gaussian => "gaussian",
            Self::Sine => "sine",
            Self::Cosine => "cosine",
        };
        f.write_str(s)
    }
}

impl FromStr for ActivationKind {
    type Err = ScnError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(Self::Sigmoid),
            "tanh" => Ok(Self::Tanh),
            "gaussian" => Ok(Self::Gaussian),
            "sine" => Ok(Self::Sine),
            "cosine" => Ok(Self::Cosine),
            other => Err(ScnError::InvalidConfig(format!(
                "unknown activation '{other}'"
            ))),
        }
    }
}

/// One random hidden node: finite weights, finite bias, an activation kind.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenNode {
    pub w: Vec<f64>,
    pub b: f64,
    pub activation: ActivationKind,
}

impl HiddenNode {
    pub fn new(w: Vec<f64>, b: f64, activation: ActivationKind) -> Result<Self> {
        if w.is_empty() {
            return Err(ScnError::DimensionMismatch(
                "hidden node needs at least one input weight".into(),
            ));
        }
        if !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
            return Err(ScnError::NonFinite("hidden node parameters".into()));
        }
        Ok(Self { w, b, activation })
    }

    pub fn input_dim(&self) -> usize {
        self.w.len()
    }
}

/// Activation column of one node over every sample row of `x`.
pub fn node_activation_vector(node: &HiddenNode, x: &Matrix) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    fill_activation_column(node, x, &mut out)?;
    Ok(out)
}

/// Buffer-reusing variant for the candidate search, which evaluates many
/// thousands of throwaway columns per accepted node.
pub(crate) fn fill_activation_column(
    node: &HiddenNode,
    x: &Matrix,
    out: &mut Vec<f64>,
) -> Result<()> {
    if x.cols() != node.w.len() {
        return Err(ScnError::DimensionMismatch(format!(
            "node expects {} inputs but samples have {}",
            node.w.len(),
            x.cols()
        )));
    }
    out.clear();
    out.extend((0..x.rows()).map(|i| {
        let row = x.row(i);
        let z: f64 = row.iter().zip(&node.w).map(|(xi, wi)| xi * wi).sum();
        node.activation.apply(z + node.b)
    }));
    Ok(())
}

/// Residual of a fitted expansion: `T - H B`.
pub fn residual(h: &Matrix, b: &Matrix, t: &Matrix) -> Result<Matrix> {
    t.sub(&h.matmul(b)?)
}

/// A trained stochastic configuration network.
///
/// Invariants: every node has `input_dim` weights; the weight matrix, when
/// present, is nodes x outputs; `output_weights` is `None` exactly when the
/// model has zero nodes (in which case the normalized prediction is zero).
#[derive(Debug, Clone, PartialEq)]
pub struct ScnModel {
    nodes: Vec<HiddenNode>,
    output_weights: Option<Matrix>,
    norm_meta: NormMeta,
}

impl ScnModel {
    pub fn empty(norm_meta: NormMeta) -> Self {
        Self {
            nodes: Vec::new(),
            output_weights: None,
            norm_meta,
        }
    }

    pub fn new(
        nodes: Vec<HiddenNode>,
        output_weights: Option<Matrix>,
        norm_meta: NormMeta,
    ) -> Result<Self> {
        let d = norm_meta.input_dim();
        let m = norm_meta.output_dim();
        for (i, node) in nodes.iter().enumerate() {
            if node.input_dim() != d {
                return Err(ScnError::DimensionMismatch(format!(
                    "node {i} expects {} inputs but the model maps {d}",
                    node.input_dim()
                )));
            }
        }
        match (&output_weights, nodes.len()) {
            (None, 0) => {}
            (None, _) => {
                return Err(ScnError::DimensionMismatch(
                    "a model with nodes needs output weights".into(),
                ))
            }
            (Some(_), 0) => {
                return Err(ScnError::DimensionMismatch(
                    "a model without nodes cannot carry output weights".into(),
                ))
            }
            (Some(b), l) => {
                if b.rows() != l || b.cols() != m {
                    return Err(ScnError::DimensionMismatch(format!(
                        "weight matrix is {}x{} but {l} nodes map to {m} outputs",
                        b.rows(),
                        b.cols()
                    )));
                }
            }
        }
        Ok(Self {
            nodes,
            output_weights,
            norm_meta,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[HiddenNode] {
        &self.nodes
    }

    pub fn output_weights(&self) -> Option<&Matrix> {
        self.output_weights.as_ref()
    }

    pub fn norm_meta(&self) -> &NormMeta {
        &self.norm_meta
    }

    pub fn input_dim(&self) -> usize {
        self.norm_meta.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.norm_meta.output_dim()
    }

    /// Activation matrix over normalized inputs; `None` for an empty model.
    pub fn hidden_matrix(&self, x_norm: &Matrix) -> Result<Option<Matrix>> {
        if self.nodes.is_empty() {
            return Ok(None);
        }
        let cols: Vec<Vec<f64>> = self
            .nodes
            .iter()
            .map(|node| node_activation_vector(node, x_norm))
            .collect::<Result<_>>()?;
        Ok(Some(Matrix::from_cols(&cols)?))
    }

    /// Prediction over inputs that are already in normalized space; the
    /// output stays in normalized space.
    pub fn predict_normalized(&self, x_norm: &Matrix) -> Result<Matrix> {
        if x_norm.cols() != self.input_dim() {
            return Err(ScnError::DimensionMismatch(format!(
                "model expects {} inputs but samples have {}",
                self.input_dim(),
                x_norm.cols()
            )));
        }
        match self.hidden_matrix(x_norm)? {
            None => Ok(Matrix::zeros(x_norm.rows(), self.output_dim())),
            Some(h) => {
                let b = self.output_weights.as_ref().expect("nodes imply weights");
                h.matmul(b)
            }
        }
    }

    /// Prediction over raw inputs, returned on the raw target scale.
    pub fn predict(&self, x_raw: &Matrix) -> Result<Matrix> {
        let xn = self.norm_meta.normalize_x(x_raw)?;
        let yn = self.predict_normalized(&xn)?;
        self.norm_meta.denormalize_t(&yn)
    }

    /// RMSE against raw targets, measured on the normalized target scale the
    /// model was trained on.
    pub fn evaluate(&self, x_raw: &Matrix, t_raw: &Matrix) -> Result<f64> {
        let xn = self.norm_meta.normalize_x(x_raw)?;
        let tn = self.norm_meta.normalize_t(t_raw)?;
        let yn = self.predict_normalized(&xn)?;
        crate::data::rmse(&yn, &tn)
    }
}
