//! Minimal reverse-mode automatic differentiation over row-major matrices.
//!
//! Every value is a `rows x cols` matrix; rows index the batch. Operations
//! are appended to a [`Tape`] and replayed backwards by [`Tape::backward`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BCE_CLAMP: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Size(format!(
                "{} values for a {rows}x{cols} tensor",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn scalar(v: f64) -> Self {
        Self {
            rows: 1,
            cols: 1,
            data: vec![v],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Size("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }
}

// Serialized as `[rows, cols, data]`; shape is checked on load.
impl Serialize for Tensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        (self.rows, self.cols, &self.data).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tensor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (rows, cols, data) = <(usize, usize, Vec<f64>)>::deserialize(d)?;
        Tensor::new(rows, cols, data).map_err(serde::de::Error::custom)
    }
}

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(pub(crate) usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Geometry of a 1D convolution. Features are laid out channel-major:
/// column `c * length + t` holds channel `c` at position `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvGeometry {
    pub channels_in: usize,
    pub channels_out: usize,
    pub kernel: usize,
    pub stride: usize,
    pub length_in: usize,
}

impl ConvGeometry {
    pub fn length_out(&self) -> usize {
        (self.length_in - self.kernel) / self.stride + 1
    }

    fn validate(&self) -> Result<()> {
        if self.channels_in == 0 || self.channels_out == 0 || self.kernel == 0 || self.stride == 0 {
            return Err(Error::Configuration(format!("degenerate convolution {self:?}")));
        }
        if self.kernel > self.length_in {
            return Err(Error::Configuration(format!(
                "kernel {} longer than input length {}",
                self.kernel, self.length_in
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    MatMul(Var, Var),
    AddRowBias(Var, Var),
    Conv1d { x: Var, w: Var, b: Var, geom: ConvGeometry },
    LeakyRelu(Var, f64),
    Sigmoid(Var),
    Bce { pred: Var, labels: Vec<f64> },
    Add(Var, Var),
    Affine(Var, f64),
    Mean(Var),
}

#[derive(Debug, Clone)]
struct Node {
    value: Tensor,
    op: Op,
}

#[derive(Debug, Default, Clone)]
pub struct Tape {
    nodes: Vec<Node>,
}

/// Gradients of a scalar with respect to every leaf that influenced it.
#[derive(Debug, Clone)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    /// Errors when `v` did not contribute to the differentiated value.
    pub fn get(&self, v: Var) -> Result<&Tensor> {
        self.grads
            .get(v.0)
            .and_then(Option::as_ref)
            .ok_or(Error::MissingGradient(v.0))
    }
}

fn clamp_prob(p: f64) -> f64 {
    p.clamp(BCE_CLAMP, 1.0 - BCE_CLAMP)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean binary cross-entropy with predictions clamped to `[1e-7, 1 - 1e-7]`.
pub fn bce_loss(pred: &[f64], labels: &[f64]) -> f64 {
    let n = pred.len() as f64;
    -pred
        .iter()
        .zip(labels)
        .map(|(&p, &y)| {
            let p = clamp_prob(p);
            y * p.ln() + (1.0 - y) * (1.0 - p).ln()
        })
        .sum::<f64>()
        / n
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (x, w) = (self.value(a), self.value(b));
        if x.cols != w.rows {
            return Err(Error::Configuration(format!(
                "matmul {}x{} by {}x{}",
                x.rows, x.cols, w.rows, w.cols
            )));
        }
        let mut out = Tensor::zeros(x.rows, w.cols);
        for r in 0..x.rows {
            for k in 0..x.cols {
                let xv = x.at(r, k);
                for c in 0..w.cols {
                    out.data[r * w.cols + c] += xv * w.at(k, c);
                }
            }
        }
        Ok(self.push(out, Op::MatMul(a, b)))
    }

    pub fn add_row_bias(&mut self, a: Var, bias: Var) -> Result<Var> {
        let (x, b) = (self.value(a), self.value(bias));
        if b.rows != 1 || b.cols != x.cols {
            return Err(Error::Configuration(format!(
                "bias {}x{} for {} columns",
                b.rows, b.cols, x.cols
            )));
        }
        let mut out = x.clone();
        for r in 0..out.rows {
            for c in 0..out.cols {
                out.data[r * out.cols + c] += b.data[c];
            }
        }
        Ok(self.push(out, Op::AddRowBias(a, bias)))
    }

    /// Valid (unpadded) convolution. `w` is `channels_out x (channels_in * kernel)`
    /// and `b` is `1 x channels_out`.
    pub fn conv1d(&mut self, x: Var, w: Var, b: Var, geom: ConvGeometry) -> Result<Var> {
        geom.validate()?;
        let (xv, wv, bv) = (self.value(x), self.value(w), self.value(b));
        let (ci, co, k, s, li) = (geom.channels_in, geom.channels_out, geom.kernel, geom.stride, geom.length_in);
        if xv.cols != ci * li || wv.rows != co || wv.cols != ci * k || bv.rows != 1 || bv.cols != co {
            return Err(Error::Configuration(format!(
                "conv1d shapes: input {}x{}, weight {}x{}, bias {}x{} for {geom:?}",
                xv.rows, xv.cols, wv.rows, wv.cols, bv.rows, bv.cols
            )));
        }
        let lo = geom.length_out();
        let mut out = Tensor::zeros(xv.rows, co * lo);
        for r in 0..xv.rows {
            let xr = xv.row(r);
            for o in 0..co {
                for t in 0..lo {
                    let mut acc = bv.data[o];
                    for i in 0..ci {
                        for j in 0..k {
                            acc += wv.at(o, i * k + j) * xr[i * li + t * s + j];
                        }
                    }
                    out.data[r * co * lo + o * lo + t] = acc;
                }
            }
        }
        Ok(self.push(out, Op::Conv1d { x, w, b, geom }))
    }

    pub fn leaky_relu(&mut self, a: Var, slope: f64) -> Var {
        let mut out = self.value(a).clone();
        for v in &mut out.data {
            if *v <= 0.0 {
                *v *= slope;
            }
        }
        self.push(out, Op::LeakyRelu(a, slope))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let mut out = self.value(a).clone();
        for v in &mut out.data {
            *v = sigmoid(*v);
        }
        self.push(out, Op::Sigmoid(a))
    }

    /// Scalar mean binary cross-entropy of `pred` against constant labels.
    pub fn bce(&mut self, pred: Var, labels: &[f64]) -> Result<Var> {
        let p = self.value(pred);
        if p.data.len() != labels.len() || labels.is_empty() {
            return Err(Error::Configuration(format!(
                "{} predictions for {} labels",
                p.data.len(),
                labels.len()
            )));
        }
        let loss = bce_loss(&p.data, labels);
        Ok(self.push(
            Tensor::scalar(loss),
            Op::Bce {
                pred,
                labels: labels.to_vec(),
            },
        ))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (x, y) = (self.value(a), self.value(b));
        if !x.same_shape(y) {
            return Err(Error::Configuration("add of mismatched shapes".into()));
        }
        let mut out = x.clone();
        out.add_assign(y);
        Ok(self.push(out, Op::Add(a, b)))
    }

    /// `scale * a + shift`, elementwise.
    pub fn affine(&mut self, a: Var, scale: f64, shift: f64) -> Var {
        let mut out = self.value(a).clone();
        for v in &mut out.data {
            *v = scale * *v + shift;
        }
        self.push(out, Op::Affine(a, scale))
    }

    pub fn scale(&mut self, a: Var, factor: f64) -> Var {
        self.affine(a, factor, 0.0)
    }

    pub fn mean(&mut self, a: Var) -> Var {
        let x = self.value(a);
        let m = x.data.iter().sum::<f64>() / x.data.len() as f64;
        self.push(Tensor::scalar(m), Op::Mean(a))
    }

    /// Reverse accumulation from the scalar `output`.
    pub fn backward(&self, output: Var) -> Result<Gradients> {
        let out = self.value(output);
        if out.rows != 1 || out.cols != 1 {
            return Err(Error::Argument(format!(
                "backward needs a scalar, got {}x{}",
                out.rows, out.cols
            )));
        }
        let mut grads: Vec<Option<Tensor>> = vec![None; output.0 + 1];
        grads[output.0] = Some(Tensor::scalar(1.0));
        for idx in (0..=output.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            let mut send = |v: Var, t: Tensor| accumulate(&mut grads, v, t);
            match &node.op {
                // Leaves keep their gradient; intermediates are dropped once used.
                Op::Leaf => send(Var(idx), g),
                Op::MatMul(a, b) => {
                    let (x, w) = (self.value(*a), self.value(*b));
                    let mut dx = Tensor::zeros(x.rows, x.cols);
                    let mut dw = Tensor::zeros(w.rows, w.cols);
                    for r in 0..x.rows {
                        for k in 0..x.cols {
                            let mut acc = 0.0;
                            for c in 0..w.cols {
                                let gv = g.at(r, c);
                                acc += gv * w.at(k, c);
                                dw.data[k * w.cols + c] += x.at(r, k) * gv;
                            }
                            dx.data[r * x.cols + k] = acc;
                        }
                    }
                    send(*a, dx);
                    send(*b, dw);
                }
                Op::AddRowBias(a, b) => {
                    let mut db = Tensor::zeros(1, g.cols);
                    for r in 0..g.rows {
                        for c in 0..g.cols {
                            db.data[c] += g.at(r, c);
                        }
                    }
                    send(*a, g.clone());
                    send(*b, db);
                }
                Op::Conv1d { x, w, b, geom } => {
                    let (xv, wv) = (self.value(*x), self.value(*w));
                    let (ci, co, k, s, li) =
                        (geom.channels_in, geom.channels_out, geom.kernel, geom.stride, geom.length_in);
                    let lo = geom.length_out();
                    let mut dx = Tensor::zeros(xv.rows, xv.cols);
                    let mut dw = Tensor::zeros(wv.rows, wv.cols);
                    let mut db = Tensor::zeros(1, co);
                    for r in 0..xv.rows {
                        let xr = xv.row(r);
                        for o in 0..co {
                            for t in 0..lo {
                                let gv = g.at(r, o * lo + t);
                                db.data[o] += gv;
                                for i in 0..ci {
                                    for j in 0..k {
                                        let xi = i * li + t * s + j;
                                        dw.data[o * ci * k + i * k + j] += gv * xr[xi];
                                        dx.data[r * xv.cols + xi] += gv * wv.at(o, i * k + j);
                                    }
                                }
                            }
                        }
                    }
                    send(*x, dx);
                    send(*w, dw);
                    send(*b, db);
                }
                Op::LeakyRelu(a, slope) => {
                    let x = self.value(*a);
                    let mut d = g;
                    for (dv, &xv) in d.data.iter_mut().zip(&x.data) {
                        if xv <= 0.0 {
                            *dv *= slope;
                        }
                    }
                    send(*a, d);
                }
                Op::Sigmoid(a) => {
                    let y = &node.value;
                    let mut d = g;
                    for (dv, &yv) in d.data.iter_mut().zip(&y.data) {
                        *dv *= yv * (1.0 - yv);
                    }
                    send(*a, d);
                }
                Op::Bce { pred, labels } => {
                    let p = self.value(*pred);
                    let n = labels.len() as f64;
                    let scale = g.data[0];
                    let data = p
                        .data
                        .iter()
                        .zip(labels)
                        .map(|(&pv, &y)| {
                            // The clamp is flat outside its interval.
                            if pv < BCE_CLAMP || pv > 1.0 - BCE_CLAMP {
                                0.0
                            } else {
                                -scale * (y / pv - (1.0 - y) / (1.0 - pv)) / n
                            }
                        })
                        .collect();
                    send(*pred, Tensor::new(p.rows, p.cols, data)?);
                }
                Op::Add(a, b) => {
                    send(*a, g.clone());
                    send(*b, g);
                }
                Op::Affine(a, scale) => {
                    let mut d = g;
                    for v in &mut d.data {
                        *v *= scale;
                    }
                    send(*a, d);
                }
                Op::Mean(a) => {
                    let x = self.value(*a);
                    let n = x.data.len() as f64;
                    send(*a, Tensor::new(x.rows, x.cols, vec![g.data[0] / n; x.data.len()])?);
                }
            }
        }
        Ok(Gradients { grads })
    }
}

fn accumulate(grads: &mut [Option<Tensor>], v: Var, t: Tensor) {
    match &mut grads[v.0] {
        Some(acc) => acc.add_assign(&t),
        slot => *slot = Some(t),
    }
}
