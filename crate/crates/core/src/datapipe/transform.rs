//! Per-column mapping between physical values and the generator's `[-1, 1]`.
//!
//! Forward, per column: divide by a robust scale (median absolute
//! deviation), apply Yeo-Johnson with a maximum-likelihood exponent,
//! standardise to zero mean and unit variance, then map the training
//! extremes affinely onto `[-1, 1]`. The inverse runs the steps backwards.

use serde::{Deserialize, Serialize};

use super::dataset::RawDataset;
use super::yeo_johnson::{fit_lambda, image_bounds, inverse_yeo_johnson, yeo_johnson};
use crate::error::{Error, Result};
use crate::generator::SampleVector;

pub const LAMBDA_SEARCH: (f64, f64) = (-5.0, 5.0);
pub const LAMBDA_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnTransform {
    pub prescale: f64,
    pub yj_lambda: f64,
    pub standardize_mean: f64,
    pub standardize_std: f64,
    pub minmax_lo: f64,
    pub minmax_hi: f64,
}

impl ColumnTransform {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.prescale,
            self.yj_lambda,
            self.standardize_mean,
            self.standardize_std,
            self.minmax_lo,
            self.minmax_hi,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite || self.prescale <= 0.0 || self.standardize_std <= 0.0 || self.minmax_hi <= self.minmax_lo {
            return Err(Error::Configuration(format!("invalid column transform {self:?}")));
        }
        Ok(())
    }

    pub fn forward(&self, x: f64) -> f64 {
        let z = (yeo_johnson(x / self.prescale, self.yj_lambda) - self.standardize_mean) / self.standardize_std;
        2.0 * (z - self.minmax_lo) / (self.minmax_hi - self.minmax_lo) - 1.0
    }

    /// Inverse map; the flag reports whether the input had to be clamped
    /// into the invertible range.
    pub fn inverse(&self, x: f64) -> (f64, bool) {
        let mut clamped = false;
        let x = if x < -1.0 || x > 1.0 || x.is_nan() {
            clamped = true;
            if x.is_nan() {
                0.0
            } else {
                x.clamp(-1.0, 1.0)
            }
        } else {
            x
        };
        let z = self.minmax_lo + (x + 1.0) / 2.0 * (self.minmax_hi - self.minmax_lo);
        let mut y = z * self.standardize_std + self.standardize_mean;
        let (lo, hi) = image_bounds(self.yj_lambda);
        if y >= hi {
            y = hi - hi.abs() * 1e-12;
            clamped = true;
        } else if y <= lo {
            y = lo + lo.abs() * 1e-12;
            clamped = true;
        }
        let u = inverse_yeo_johnson(y, self.yj_lambda).expect("value clamped into the image");
        (u * self.prescale, clamped)
    }
}

/// Fitted transform for every column of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformModel {
    pub columns: Vec<String>,
    pub transforms: Vec<ColumnTransform>,
    /// Standardisation after the power transform is always applied; kept in
    /// the serialized model so readers need not assume it.
    pub standardize: bool,
}

/// Result of [`TransformModel::inverse_transform`].
#[derive(Debug, Clone, PartialEq)]
pub struct InverseOutput {
    pub data: RawDataset,
    /// Entries clamped before inversion.
    pub clamped: usize,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn robust_scale(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let med = median(&sorted);
    let mut dev: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
    dev.sort_by(f64::total_cmp);
    let mad = median(&dev);
    if mad > 0.0 {
        return mad;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn fit_column(name: &str, values: &[f64]) -> Result<ColumnTransform> {
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Err(Error::DegenerateData(format!("column `{name}` is constant")));
    }
    let prescale = robust_scale(values);
    let scaled: Vec<f64> = values.iter().map(|v| v / prescale).collect();
    let lambda = fit_lambda(&scaled, LAMBDA_SEARCH.0, LAMBDA_SEARCH.1, LAMBDA_TOL);
    let transformed: Vec<f64> = scaled.iter().map(|&u| yeo_johnson(u, lambda)).collect();
    let n = transformed.len() as f64;
    let mean = transformed.iter().sum::<f64>() / n;
    let std = (transformed.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n).sqrt();
    if !(std > 0.0) || !std.is_finite() {
        return Err(Error::DegenerateData(format!(
            "column `{name}` collapses under the power transform"
        )));
    }
    let standardized = transformed.iter().map(|t| (t - mean) / std);
    let (lo, hi) = standardized.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| {
        (lo.min(z), hi.max(z))
    });
    let t = ColumnTransform {
        prescale,
        yj_lambda: lambda,
        standardize_mean: mean,
        standardize_std: std,
        minmax_lo: lo,
        minmax_hi: hi,
    };
    t.validate()?;
    Ok(t)
}

impl TransformModel {
    /// Fits every column of `data` and returns the model together with the
    /// transformed rows, each entry in `[-1, 1]`.
    pub fn fit(data: &RawDataset) -> Result<(Self, Vec<Vec<f64>>)> {
        if data.len() < 2 {
            return Err(Error::DegenerateData(format!(
                "need at least 2 samples to fit, got {}",
                data.len()
            )));
        }
        let transforms = (0..data.n_columns())
            .map(|j| fit_column(&data.columns()[j], &data.column(j)))
            .collect::<Result<Vec<_>>>()?;
        let model = Self {
            columns: data.columns().to_vec(),
            transforms,
            standardize: true,
        };
        let rows = model.forward_rows(data)?;
        Ok((model, rows))
    }

    pub fn n_columns(&self) -> usize {
        self.transforms.len()
    }

    pub fn forward_rows(&self, data: &RawDataset) -> Result<Vec<Vec<f64>>> {
        if data.n_columns() != self.n_columns() {
            return Err(Error::Configuration(format!(
                "model has {} columns, data has {}",
                self.n_columns(),
                data.n_columns()
            )));
        }
        Ok(data
            .rows()
            .iter()
            .map(|r| r.iter().zip(&self.transforms).map(|(&x, t)| t.forward(x)).collect())
            .collect())
    }

    pub fn inverse_rows<'a, I>(&self, rows: I) -> Result<InverseOutput>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut clamped = 0usize;
        let mut out = Vec::new();
        for row in rows {
            if row.len() != self.n_columns() {
                return Err(Error::Configuration(format!(
                    "sample has {} entries, model has {} columns",
                    row.len(),
                    self.n_columns()
                )));
            }
            out.push(
                row.iter()
                    .zip(&self.transforms)
                    .map(|(&x, t)| {
                        let (v, c) = t.inverse(x);
                        clamped += c as usize;
                        v
                    })
                    .collect(),
            );
        }
        Ok(InverseOutput {
            data: RawDataset::new(self.columns.clone(), out)?,
            clamped,
        })
    }

    /// Maps generated samples back to physical units.
    pub fn inverse_transform(&self, samples: &[SampleVector]) -> Result<InverseOutput> {
        self.inverse_rows(samples.iter().map(|s| s.values()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, LogNormal, StandardNormal};

    fn column(name: &str, values: Vec<f64>) -> RawDataset {
        RawDataset::from_columns(vec![name.to_string()], &[values]).unwrap()
    }

    #[test]
    fn gaussian_column_keeps_unit_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let (model, _) = TransformModel::fit(&column("g", v)).unwrap();
        let l = model.transforms[0].yj_lambda;
        assert!((l - 1.0).abs() < 0.05, "{l}");
    }

    #[test]
    fn lognormal_column_is_compressed() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dist = LogNormal::new(0.0, 1.0).unwrap();
        let v: Vec<f64> = (0..20_000).map(|_| dist.sample(&mut rng)).collect();
        let (model, _) = TransformModel::fit(&column("ln", v)).unwrap();
        let l = model.transforms[0].yj_lambda;
        assert!(l < 0.3, "{l}");
    }

    #[test]
    fn training_extremes_hit_the_box() {
        let v = vec![3.0, -1.0, 7.5, 0.2, 2.0];
        let (_, rows) = TransformModel::fit(&column("a", v)).unwrap();
        let min = rows.iter().map(|r| r[0]).fold(f64::INFINITY, f64::min);
        let max = rows.iter().map(|r| r[0]).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(min, -1.0);
        assert_eq!(max, 1.0);
    }

    #[test]
    fn constant_column_is_degenerate() {
        assert!(matches!(
            TransformModel::fit(&column("c", vec![2.0; 10])),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            TransformModel::fit(&column("c", vec![2.0])),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn endpoints_and_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dist = LogNormal::new(1.0, 0.8).unwrap();
        let a: Vec<f64> = (0..1000).map(|_| dist.sample(&mut rng)).collect();
        let b: Vec<f64> = (0..1000).map(|_| -dist.sample(&mut rng)).collect();
        let data = RawDataset::from_columns(vec!["a".into(), "b".into()], &[a.clone(), b.clone()]).unwrap();
        let (model, _) = TransformModel::fit(&data).unwrap();
        let lows = model.inverse_transform(&[SampleVector(vec![-1.0, -1.0])]).unwrap();
        let amin = a.iter().copied().fold(f64::INFINITY, f64::min);
        let bmin = b.iter().copied().fold(f64::INFINITY, f64::min);
        assert!((lows.data.rows()[0][0] - amin).abs() <= 1e-7 * amin.abs());
        assert!((lows.data.rows()[0][1] - bmin).abs() <= 1e-7 * bmin.abs());
        let mid = model.inverse_transform(&[SampleVector(vec![0.0, 0.0])]).unwrap();
        let m = &mid.data.rows()[0];
        assert!(m[0] > amin && m[0] < a.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        assert!(m[1] > bmin && m[1] < b.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        assert_eq!(mid.clamped, 0);
    }

    #[test]
    fn out_of_box_samples_are_clamped_and_counted() {
        let data = column("a", vec![1.0, 2.0, 4.0, 8.0]);
        let (model, _) = TransformModel::fit(&data).unwrap();
        let out = model
            .inverse_transform(&[SampleVector(vec![1.2]), SampleVector(vec![-3.0]), SampleVector(vec![0.1])])
            .unwrap();
        assert_eq!(out.clamped, 2);
        assert!((out.data.rows()[0][0] - 8.0).abs() < 1e-9);
        assert!((out.data.rows()[1][0] - 1.0).abs() < 1e-9);
    }
}
