use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tape::{ConvGeometry, Tape, Tensor, Var};
use crate::error::{Error, Result};

pub const DEFAULT_LEAKY_SLOPE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layer", rename_all = "snake_case")]
pub enum LayerSpec {
    Conv1d {
        channels_in: usize,
        channels_out: usize,
        kernel: usize,
        stride: usize,
    },
    Dense {
        input: usize,
        output: usize,
    },
    LeakyRelu {
        slope: f64,
    },
    Sigmoid,
    Flatten,
}

impl LayerSpec {
    fn weight_shape(&self) -> Option<((usize, usize), usize, usize)> {
        // (weight rows x cols, fan_in, fan_out)
        match *self {
            Self::Conv1d {
                channels_in,
                channels_out,
                kernel,
                ..
            } => Some((
                (channels_out, channels_in * kernel),
                channels_in * kernel,
                channels_out * kernel,
            )),
            Self::Dense { input, output } => Some(((input, output), input, output)),
            _ => None,
        }
    }

    fn bias_len(&self) -> usize {
        match *self {
            Self::Conv1d { channels_out, .. } => channels_out,
            Self::Dense { output, .. } => output,
            _ => 0,
        }
    }
}

/// Default stack for `n_inputs` features: two width-2 convolutions (fewer
/// when the input is too short), flatten, a 32-unit hidden layer and a
/// sigmoid output.
pub fn default_layers(n_inputs: usize) -> Vec<LayerSpec> {
    let leaky = LayerSpec::LeakyRelu {
        slope: DEFAULT_LEAKY_SLOPE,
    };
    let mut layers = Vec::new();
    let (mut channels, mut length) = (1, n_inputs);
    for out in [8, 16] {
        if length < 2 {
            break;
        }
        layers.push(LayerSpec::Conv1d {
            channels_in: channels,
            channels_out: out,
            kernel: 2,
            stride: 1,
        });
        layers.push(leaky);
        channels = out;
        length -= 1;
    }
    layers.push(LayerSpec::Flatten);
    layers.extend([
        LayerSpec::Dense {
            input: channels * length,
            output: 32,
        },
        leaky,
        LayerSpec::Dense { input: 32, output: 1 },
        LayerSpec::Sigmoid,
    ]);
    layers
}

/// Feature shape between layers: `(channels, length)` before flattening.
#[derive(Debug, Clone, Copy)]
enum Shape {
    Sequence(usize, usize),
    Flat(usize),
}

impl Shape {
    fn width(self) -> usize {
        match self {
            Self::Sequence(c, l) => c * l,
            Self::Flat(n) => n,
        }
    }
}

/// Convolutional classifier mapping a sample vector to `P(real)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminatorNet {
    pub n_inputs: usize,
    pub layers: Vec<LayerSpec>,
    /// `[w, b]` per parameterised layer, in layer order.
    pub params: Vec<Tensor>,
}

fn check_layers(n_inputs: usize, layers: &[LayerSpec]) -> Result<Vec<Shape>> {
    let mut shape = Shape::Sequence(1, n_inputs);
    let mut shapes = Vec::with_capacity(layers.len());
    if n_inputs == 0 {
        return Err(Error::Configuration("discriminator needs at least one input".into()));
    }
    for (i, layer) in layers.iter().enumerate() {
        shapes.push(shape);
        shape = match (*layer, shape) {
            (
                LayerSpec::Conv1d {
                    channels_in,
                    channels_out,
                    kernel,
                    stride,
                },
                Shape::Sequence(c, l),
            ) if channels_in == c && kernel >= 1 && kernel <= l && stride >= 1 && channels_out >= 1 => {
                Shape::Sequence(channels_out, (l - kernel) / stride + 1)
            }
            (LayerSpec::Dense { input, output }, Shape::Flat(n)) if input == n && output >= 1 => Shape::Flat(output),
            (LayerSpec::LeakyRelu { slope }, s) if slope.is_finite() => s,
            (LayerSpec::Sigmoid, s) => s,
            (LayerSpec::Flatten, s) => Shape::Flat(s.width()),
            _ => {
                return Err(Error::Configuration(format!(
                    "layer {i} ({layer:?}) does not fit input shape {shape:?}"
                )))
            }
        };
    }
    if shape.width() != 1 || layers.last() != Some(&LayerSpec::Sigmoid) {
        return Err(Error::Configuration(
            "discriminator must end in a single sigmoid output".into(),
        ));
    }
    Ok(shapes)
}

impl DiscriminatorNet {
    /// Glorot-uniform weights, zero biases.
    pub fn new<R: Rng + ?Sized>(n_inputs: usize, layers: Vec<LayerSpec>, rng: &mut R) -> Result<Self> {
        check_layers(n_inputs, &layers)?;
        let mut params = Vec::new();
        for layer in &layers {
            if let Some(((rows, cols), fan_in, fan_out)) = layer.weight_shape() {
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let data = (0..rows * cols).map(|_| rng.random_range(-limit..limit)).collect();
                params.push(Tensor::new(rows, cols, data)?);
                params.push(Tensor::zeros(1, layer.bias_len()));
            }
        }
        Ok(Self {
            n_inputs,
            layers,
            params,
        })
    }

    /// All weights and biases zero.
    pub fn zeroed(n_inputs: usize, layers: Vec<LayerSpec>) -> Result<Self> {
        check_layers(n_inputs, &layers)?;
        let params = layers
            .iter()
            .filter_map(LayerSpec::weight_shape)
            .zip(layers.iter().filter(|l| l.weight_shape().is_some()))
            .flat_map(|(((r, c), _, _), l)| [Tensor::zeros(r, c), Tensor::zeros(1, l.bias_len())])
            .collect();
        Ok(Self {
            n_inputs,
            layers,
            params,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let fresh = Self::zeroed(self.n_inputs, self.layers.clone())?;
        let ok = fresh.params.len() == self.params.len()
            && fresh
                .params
                .iter()
                .zip(&self.params)
                .all(|(a, b)| a.rows == b.rows && a.cols == b.cols && b.data.iter().all(|v| v.is_finite()));
        if ok {
            Ok(())
        } else {
            Err(Error::Configuration("discriminator parameters do not match its layers".into()))
        }
    }

    pub fn param_count(&self) -> usize {
        self.params.iter().map(|t| t.data.len()).sum()
    }

    pub fn flat_params(&self) -> Vec<f64> {
        self.params.iter().flat_map(|t| t.data.iter().copied()).collect()
    }

    pub fn set_flat_params(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::Size(format!(
                "{} values for {} discriminator parameters",
                flat.len(),
                self.param_count()
            )));
        }
        let mut off = 0;
        for t in &mut self.params {
            let n = t.data.len();
            t.data.copy_from_slice(&flat[off..off + n]);
            off += n;
        }
        Ok(())
    }

    /// Records the forward pass of `input` (`batch x n_inputs`); returns the
    /// output variable and the parameter leaves in [`Self::params`] order.
    pub fn record(&self, tape: &mut Tape, input: Var) -> Result<(Var, Vec<Var>)> {
        let x = tape.value(input);
        if x.cols != self.n_inputs {
            return Err(Error::Configuration(format!(
                "discriminator expects {} inputs, got {}",
                self.n_inputs, x.cols
            )));
        }
        let shapes = check_layers(self.n_inputs, &self.layers)?;
        let param_vars: Vec<Var> = self.params.iter().map(|t| tape.leaf(t.clone())).collect();
        let mut next_param = 0;
        let mut h = input;
        for (layer, shape) in self.layers.iter().zip(shapes) {
            h = match *layer {
                LayerSpec::Conv1d {
                    channels_in,
                    channels_out,
                    kernel,
                    stride,
                } => {
                    let Shape::Sequence(_, length_in) = shape else { unreachable!() };
                    let geom = ConvGeometry {
                        channels_in,
                        channels_out,
                        kernel,
                        stride,
                        length_in,
                    };
                    next_param += 2;
                    tape.conv1d(h, param_vars[next_param - 2], param_vars[next_param - 1], geom)?
                }
                LayerSpec::Dense { .. } => {
                    next_param += 2;
                    let z = tape.matmul(h, param_vars[next_param - 2])?;
                    tape.add_row_bias(z, param_vars[next_param - 1])?
                }
                LayerSpec::LeakyRelu { slope } => tape.leaky_relu(h, slope),
                LayerSpec::Sigmoid => tape.sigmoid(h),
                // Channel-major layout is already flat.
                LayerSpec::Flatten => h,
            };
        }
        Ok((h, param_vars))
    }

    /// `P(real)` for each row of `batch`.
    pub fn predict(&self, batch: &[Vec<f64>]) -> Result<Vec<f64>> {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::from_rows(batch)?);
        let (out, _) = self.record(&mut tape, x)?;
        Ok(tape.value(out).data.clone())
    }
}
