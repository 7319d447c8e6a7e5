use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ansatz::{Entangler, StyleAnsatz};
use crate::error::{Error, Result};

/// Version of the gate layout and latent schedule; bumped whenever a trained
/// parameter file would map onto different gates.
pub const LAYOUT_VERSION: u32 = 1;

/// Trainable (weight, bias) pairs, one per parameterised base-circuit gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    pub pairs: Vec<(f64, f64)>,
}

impl ParamVector {
    pub fn new(pairs: Vec<(f64, f64)>) -> Self {
        Self { pairs }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            pairs: vec![(0.0, 0.0); len],
        }
    }

    /// Weights uniform in `±weight_scale`, biases uniform in `±pi`.
    pub fn random<R: Rng + ?Sized>(len: usize, weight_scale: f64, rng: &mut R) -> Self {
        Self {
            pairs: (0..len)
                .map(|_| {
                    (
                        rng.random_range(-weight_scale..=weight_scale),
                        rng.random_range(-PI..=PI),
                    )
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Interleaved `[w0, b0, w1, b1, ...]`, the layout used by gradients.
    pub fn to_flat(&self) -> Vec<f64> {
        self.pairs.iter().flat_map(|&(w, b)| [w, b]).collect()
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() % 2 != 0 {
            return Err(Error::Configuration("flat parameter vector has odd length".into()));
        }
        Ok(Self {
            pairs: flat.chunks(2).map(|c| (c[0], c[1])).collect(),
        })
    }
}

/// Renders parameters as a self-describing text file.
pub fn params_to_text(ansatz: &StyleAnsatz, params: &ParamVector) -> String {
    let mut out = String::new();
    out.push_str("# style-qgan generator parameters\n");
    let _ = writeln!(out, "layout_version = {LAYOUT_VERSION}");
    let _ = writeln!(out, "base_qubits = {}", ansatz.base_qubits);
    let _ = writeln!(out, "layers = {}", ansatz.layers);
    let _ = writeln!(out, "latent_dim = {}", ansatz.latent_dim);
    let _ = writeln!(out, "entangler = {}", ansatz.entangler.as_str());
    let _ = writeln!(out, "pairs = {}", params.len());
    out.push_str("# weight bias\n");
    for (w, b) in &params.pairs {
        let _ = writeln!(out, "{w:?} {b:?}");
    }
    out
}

/// Parses [`params_to_text`] output. The returned ansatz has one replica.
pub fn params_from_text(text: &str) -> Result<(StyleAnsatz, ParamVector)> {
    let mut header = std::collections::HashMap::new();
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((k, v)) = line.split_once('=') {
            header.insert(k.trim().to_string(), v.trim().to_string());
            continue;
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        if nums.len() != 2 {
            return Err(Error::Parse(format!("line {}: expected `weight bias`", lineno + 1)));
        }
        pairs.push((nums[0], nums[1]));
    }
    let field = |k: &str| -> Result<usize> {
        header
            .get(k)
            .ok_or_else(|| Error::Parse(format!("missing header field `{k}`")))?
            .parse()
            .map_err(|e| Error::Parse(format!("header field `{k}`: {e}")))
    };
    let version = field("layout_version")?;
    if version != LAYOUT_VERSION as usize {
        return Err(Error::Configuration(format!(
            "parameter layout version {version} is not supported (expected {LAYOUT_VERSION})"
        )));
    }
    let entangler = Entangler::parse(
        header
            .get("entangler")
            .ok_or_else(|| Error::Parse("missing header field `entangler`".into()))?,
    )?;
    let ansatz = StyleAnsatz::new(field("base_qubits")?, field("layers")?, field("latent_dim")?)
        .with_entangler(entangler);
    ansatz.validate()?;
    if field("pairs")? != pairs.len() || pairs.len() != ansatz.param_count() {
        return Err(Error::Configuration(format!(
            "parameter file lists {} pairs, ansatz needs {}",
            pairs.len(),
            ansatz.param_count()
        )));
    }
    Ok((ansatz, ParamVector::new(pairs)))
}
