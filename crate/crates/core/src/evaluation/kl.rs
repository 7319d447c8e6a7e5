//! Binned Kullback-Leibler divergence and its shot-noise error bars.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::datapipe::{HistogramGrid, TransformModel};
use crate::error::{Error, Result};
use crate::generator::SampleVector;

pub const KL_EPS: f64 = 1e-12;
/// Number of perturbed sets in the error-bar scan.
pub const SCAN_SETS: usize = 11;
/// Index of the unperturbed set.
pub const NOMINAL_SET: usize = 5;

/// `delta_j = -1 + 0.2 j`.
pub fn scan_delta(j: usize) -> f64 {
    -1.0 + 0.2 * j as f64
}

/// `sum_x P(x) ln(P(x) / max(Q(x), eps))` over normalised counts, skipping
/// bins where `P` is zero.
pub fn kl_divergence(p: &HistogramGrid, q: &HistogramGrid, eps: f64) -> Result<f64> {
    if !p.same_grid(q) {
        return Err(Error::Grid("KL divergence needs histograms on the same grid".into()));
    }
    kl_from_counts(&p.counts, &q.counts, eps)
}

/// [`kl_divergence`] on raw bin weights.
pub fn kl_from_counts(p: &[f64], q: &[f64], eps: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Grid(format!("{} bins against {}", p.len(), q.len())));
    }
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    if !(sp > 0.0) {
        return Err(Error::Grid("reference histogram is empty".into()));
    }
    let mut kl = 0.0;
    for (&pc, &qc) in p.iter().zip(q) {
        if pc == 0.0 {
            continue;
        }
        let pp = pc / sp;
        let qq = if sq > 0.0 { qc / sq } else { 0.0 };
        kl += pp * (pp / qq.max(eps)).ln();
    }
    Ok(kl)
}

/// Per-dimension variance of one shot-estimated sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceVector(pub Vec<f64>);

/// Binomial variance `(1 - x_i^2) / n_shots` of every entry of every
/// sample. Exact-mode samples carry no shot noise and are rejected.
pub fn sample_variance(samples: &[SampleVector], shots: Option<u64>) -> Result<Vec<VarianceVector>> {
    let shots = match shots {
        Some(s) if s > 0 => s as f64,
        _ => {
            return Err(Error::Unsupported(
                "sample variance needs shot-estimated samples".into(),
            ))
        }
    };
    Ok(samples
        .iter()
        .map(|s| VarianceVector(s.values().iter().map(|x| ((1.0 - x * x) / shots).max(0.0)).collect()))
        .collect())
}

/// KL of one dimension with its scan interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlResult {
    pub dimension: String,
    pub nominal: f64,
    pub upper_delta: f64,
    pub lower_delta: f64,
    /// KL of every perturbed set, in `j` order.
    pub scan: Vec<f64>,
    /// Generated samples outside the reference grid in the nominal set.
    pub dropped: u64,
}

impl KlResult {
    /// Result without a variance scan.
    pub fn point(dimension: impl Into<String>, nominal: f64, dropped: u64) -> Self {
        Self {
            dimension: dimension.into(),
            nominal,
            upper_delta: 0.0,
            lower_delta: 0.0,
            scan: Vec::new(),
            dropped,
        }
    }
}

/// Writes `dimension,nominal,plus,minus,dropped` rows.
pub fn write_kl_csv<W: Write>(results: &[KlResult], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["dimension", "nominal", "plus", "minus", "dropped"])?;
    for r in results {
        w.write_record([
            r.dimension.clone(),
            format!("{:?}", r.nominal),
            format!("{:?}", r.upper_delta),
            format!("{:?}", r.lower_delta),
            r.dropped.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// KL of each dimension of `samples` (mapped to physical units by `model`)
/// against `reference`, with error bars from re-evaluating the KL on the
/// shifted sets `x_i + delta_j sqrt(sigma_i)`, `j = 0..=10`. Shifted entries
/// are clamped to `[-1, 1]` before the inverse transform.
pub fn kl_with_errorbars(
    samples: &[SampleVector],
    variances: &[VarianceVector],
    model: &TransformModel,
    reference: &[HistogramGrid],
) -> Result<Vec<KlResult>> {
    let n = model.n_columns();
    if samples.len() != variances.len() {
        return Err(Error::Size(format!(
            "{} samples but {} variance vectors",
            samples.len(),
            variances.len()
        )));
    }
    if reference.len() != n {
        return Err(Error::Grid(format!("{} reference histograms for {n} columns", reference.len())));
    }
    if let Some(i) = samples
        .iter()
        .zip(variances)
        .position(|(s, v)| s.values().len() != n || v.0.len() != n || v.0.iter().any(|x| !(*x >= 0.0)))
    {
        return Err(Error::Size(format!("sample {i} does not match the {n}-column model")));
    }

    let kls_for = |shift: Option<f64>| -> Result<(Vec<f64>, Vec<u64>)> {
        let rows: Vec<Vec<f64>> = samples
            .iter()
            .zip(variances)
            .map(|(s, v)| match shift {
                None => s.values().to_vec(),
                Some(d) => s
                    .values()
                    .iter()
                    .zip(&v.0)
                    .map(|(x, var)| (x + d * var.sqrt()).clamp(-1.0, 1.0))
                    .collect(),
            })
            .collect();
        let physical = model.inverse_rows(rows.iter().map(Vec::as_slice))?.data;
        let mut kls = Vec::with_capacity(n);
        let mut dropped = Vec::with_capacity(n);
        for (j, grid) in reference.iter().enumerate() {
            let h = grid.bin_like(&physical.column(j));
            kls.push(kl_divergence(grid, &h, KL_EPS)?);
            dropped.push(h.out_of_range);
        }
        Ok((kls, dropped))
    };

    let (nominal, dropped) = kls_for(None)?;
    let scans: Vec<Vec<f64>> = (0..SCAN_SETS)
        .map(|j| kls_for(Some(scan_delta(j))).map(|(k, _)| k))
        .collect::<Result<_>>()?;
    Ok((0..n)
        .map(|d| {
            let scan: Vec<f64> = scans.iter().map(|s| s[d]).collect();
            let hi = scan.iter().copied().fold(nominal[d], f64::max);
            let lo = scan.iter().copied().fold(nominal[d], f64::min);
            KlResult {
                dimension: model.columns[d].clone(),
                nominal: nominal[d],
                upper_delta: hi - nominal[d],
                lower_delta: nominal[d] - lo,
                scan,
                dropped: dropped[d],
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datapipe::{bin_histogram, Scale};

    fn grid(counts: Vec<f64>) -> HistogramGrid {
        let mut h = bin_histogram(&[], Scale::Linear, counts.len(), (0.0, 1.0)).unwrap();
        h.counts = counts;
        h
    }

    #[test]
    fn reference_values() {
        let p = grid(vec![0.5, 0.5]);
        let q = grid(vec![0.25, 0.75]);
        assert_eq!(kl_divergence(&p, &p, KL_EPS).unwrap(), 0.0);
        let pq = kl_divergence(&p, &q, KL_EPS).unwrap();
        let qp = kl_divergence(&q, &p, KL_EPS).unwrap();
        assert!((pq - (0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln())).abs() < 1e-15);
        assert!((pq - 0.1438).abs() < 1e-4);
        assert!((qp - 0.1308).abs() < 1e-4);
    }

    #[test]
    fn counts_are_normalised_and_zero_bins_floored() {
        let p = grid(vec![10.0, 10.0, 0.0]);
        let q = grid(vec![3.0, 9.0, 100.0]);
        let expected = 0.5 * (0.5f64 / (3.0 / 112.0)).ln() + 0.5 * (0.5f64 / (9.0 / 112.0)).ln();
        assert!((kl_divergence(&p, &q, KL_EPS).unwrap() - expected).abs() < 1e-14);
        let empty_q = grid(vec![0.0, 1.0, 0.0]);
        let v = kl_divergence(&p, &empty_q, KL_EPS).unwrap();
        assert!(v.is_finite() && v > 10.0);
    }

    #[test]
    fn grid_mismatch() {
        let a = grid(vec![1.0, 1.0]);
        let b = bin_histogram(&[], Scale::Linear, 2, (0.0, 2.0)).unwrap();
        assert!(matches!(kl_divergence(&a, &b, KL_EPS), Err(Error::Grid(_))));
        assert!(matches!(kl_divergence(&a, &grid(vec![1.0; 3]), KL_EPS), Err(Error::Grid(_))));
    }

    #[test]
    fn variance_formula() {
        let s = [SampleVector(vec![1.0, -1.0, 0.0])];
        let v = sample_variance(&s, Some(512)).unwrap();
        assert_eq!(v[0].0, vec![0.0, 0.0, 1.0 / 512.0]);
        let v2 = sample_variance(&s, Some(1024)).unwrap();
        assert_eq!(v2[0].0[2] * 2.0, v[0].0[2]);
        assert!(matches!(sample_variance(&s, None), Err(Error::Unsupported(_))));
    }

    #[test]
    fn deltas() {
        let d: Vec<f64> = (0..SCAN_SETS).map(scan_delta).collect();
        assert_eq!(d[0], -1.0);
        assert_eq!(d[NOMINAL_SET], 0.0);
        assert!((d[10] - 1.0).abs() < 1e-15);
    }
}
