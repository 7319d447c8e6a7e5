//! Reference-vs-generated comparison of whole datasets.

use std::path::Path;

use super::kl::{kl_divergence, write_kl_csv, KlResult, KL_EPS};
use super::maps::{correlation_map, ratio_map};
use crate::datapipe::{bin_histogram2d, write_matrix_csv, AxisSpec, HistogramGrid, HistogramGrid2D, RawDataset, Scale};
use crate::error::{Error, Result};

/// Maps for one pair of columns.
#[derive(Debug, Clone, PartialEq)]
pub struct PairMaps {
    pub x: String,
    pub y: String,
    pub reference: HistogramGrid2D,
    pub generated: HistogramGrid2D,
    pub ratio: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub axes: Vec<AxisSpec>,
    pub reference: Vec<HistogramGrid>,
    pub generated: Vec<HistogramGrid>,
    pub kl: Vec<KlResult>,
    pub pairs: Vec<PairMaps>,
}

/// Grids fitted to `reference`, one per column. `scales` overrides the
/// automatic choice per column.
pub fn reference_axes(reference: &RawDataset, n_bins: usize, scales: &[Option<Scale>]) -> Result<Vec<AxisSpec>> {
    (0..reference.n_columns())
        .map(|j| AxisSpec::fit(&reference.column(j), scales.get(j).copied().flatten(), n_bins))
        .collect()
}

/// Bins both datasets on grids fitted to `reference` and computes per-column
/// KL (`KL(reference || generated)`), 2D histograms and ratio maps.
pub fn evaluate_datasets(
    reference: &RawDataset,
    generated: &RawDataset,
    n_bins: usize,
    scales: &[Option<Scale>],
) -> Result<EvaluationReport> {
    if reference.columns() != generated.columns() {
        return Err(Error::Grid(format!(
            "column mismatch: reference {:?}, generated {:?}",
            reference.columns(),
            generated.columns()
        )));
    }
    let axes = reference_axes(reference, n_bins, scales)?;
    let mut ref_h = Vec::new();
    let mut gen_h = Vec::new();
    let mut kl = Vec::new();
    for (j, axis) in axes.iter().enumerate() {
        let r = axis.bin(&reference.column(j))?;
        let g = r.bin_like(&generated.column(j));
        kl.push(KlResult::point(
            reference.columns()[j].clone(),
            kl_divergence(&r, &g, KL_EPS)?,
            g.out_of_range,
        ));
        ref_h.push(r);
        gen_h.push(g);
    }
    let mut pairs = Vec::new();
    for a in 0..axes.len() {
        for b in a + 1..axes.len() {
            let r = bin_histogram2d(&reference.column(a), &reference.column(b), &axes[a], &axes[b])?;
            let g = bin_histogram2d(&generated.column(a), &generated.column(b), &axes[a], &axes[b])?;
            let ratio = ratio_map(&r, &g)?;
            pairs.push(PairMaps {
                x: reference.columns()[a].clone(),
                y: reference.columns()[b].clone(),
                reference: r,
                generated: g,
                ratio,
            });
        }
    }
    Ok(EvaluationReport {
        axes,
        reference: ref_h,
        generated: gen_h,
        kl,
        pairs,
    })
}

impl EvaluationReport {
    /// Writes `kl.csv`, `hist_<col>_{reference,generated}.csv`,
    /// `corr_<x>_<y>_{reference,generated}.csv` and `ratio_<x>_<y>.csv`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let create = |name: String| std::fs::File::create(dir.join(name));
        write_kl_csv(&self.kl, create("kl.csv".into())?)?;
        for (k, (r, g)) in self.kl.iter().zip(self.reference.iter().zip(&self.generated)) {
            r.write_csv(create(format!("hist_{}_reference.csv", k.dimension))?)?;
            g.write_csv(create(format!("hist_{}_generated.csv", k.dimension))?)?;
        }
        for p in &self.pairs {
            for (tag, grid) in [("reference", &p.reference), ("generated", &p.generated)] {
                let m = correlation_map(grid);
                write_matrix_csv(grid, |i, j| Some(m[i][j]), create(format!("corr_{}_{}_{tag}.csv", p.x, p.y))?)?;
            }
            write_matrix_csv(&p.reference, |i, j| p.ratio[i][j], create(format!("ratio_{}_{}.csv", p.x, p.y))?)?;
        }
        Ok(())
    }
}
