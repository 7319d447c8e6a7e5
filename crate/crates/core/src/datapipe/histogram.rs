//! Fixed-grid histograms shared between reference and generated samples.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BINS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "log" => Ok(Self::Log),
            _ => Err(Error::UnknownName {
                kind: "scale",
                name: s.to_string(),
            }),
        }
    }
}

fn make_edges(scale: Scale, n_bins: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if n_bins == 0 {
        return Err(Error::Grid("histogram needs at least one bin".into()));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::Range(format!("invalid histogram range ({lo}, {hi})")));
    }
    let mut edges: Vec<f64> = match scale {
        Scale::Linear => {
            let w = (hi - lo) / n_bins as f64;
            (0..=n_bins).map(|i| lo + w * i as f64).collect()
        }
        Scale::Log => {
            if lo <= 0.0 {
                return Err(Error::Range(format!("log-scale range needs lo > 0, got {lo}")));
            }
            let (a, b) = (lo.ln(), hi.ln());
            let w = (b - a) / n_bins as f64;
            (0..=n_bins).map(|i| (a + w * i as f64).exp()).collect()
        }
    };
    edges[0] = lo;
    edges[n_bins] = hi;
    if edges.windows(2).any(|e| e[0] >= e[1]) {
        return Err(Error::Range(format!("range ({lo}, {hi}) too narrow for {n_bins} bins")));
    }
    Ok(edges)
}

/// Bins are half-open `[e_i, e_{i+1})` except the last, which also takes `hi`.
fn locate(edges: &[f64], v: f64) -> Option<usize> {
    let n = edges.len() - 1;
    if !(v >= edges[0] && v <= edges[n]) {
        return None;
    }
    Some(edges.partition_point(|&e| e <= v).saturating_sub(1).min(n - 1))
}

/// One-dimensional histogram on a fixed grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramGrid {
    pub edges: Vec<f64>,
    pub counts: Vec<f64>,
    pub scale: Scale,
    /// Samples outside `[edges[0], edges[n]]`, NaN included.
    pub out_of_range: u64,
    /// The grid lives on `-x`; see [`AxisSpec`].
    #[serde(default)]
    pub reflected: bool,
}

impl HistogramGrid {
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn in_range(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn total(&self) -> f64 {
        self.in_range() + self.out_of_range as f64
    }

    /// Counts divided by their sum; all zeros when the histogram is empty.
    pub fn normalized(&self) -> Vec<f64> {
        let s = self.in_range();
        if s > 0.0 {
            self.counts.iter().map(|c| c / s).collect()
        } else {
            vec![0.0; self.counts.len()]
        }
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.scale == other.scale && self.reflected == other.reflected && self.edges == other.edges
    }

    /// Histograms `values` on this grid (counts and overflow start afresh).
    pub fn bin_like(&self, values: &[f64]) -> HistogramGrid {
        let mut counts = vec![0.0; self.n_bins()];
        let mut out_of_range = 0;
        for &v in values {
            let v = if self.reflected { -v } else { v };
            match locate(&self.edges, v) {
                Some(i) => counts[i] += 1.0,
                None => out_of_range += 1,
            }
        }
        HistogramGrid {
            edges: self.edges.clone(),
            counts,
            scale: self.scale,
            out_of_range,
            reflected: self.reflected,
        }
    }

    /// Writes `edge_lo,edge_hi,count` rows in physical units, ascending.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["edge_lo", "edge_hi", "count"])?;
        let n = self.n_bins();
        for k in 0..n {
            let (lo, hi, c) = if self.reflected {
                let i = n - 1 - k;
                (-self.edges[i + 1], -self.edges[i], self.counts[i])
            } else {
                (self.edges[k], self.edges[k + 1], self.counts[k])
            };
            w.write_record([format!("{lo:?}"), format!("{hi:?}"), format!("{c:?}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Histograms `values` on `n_bins` bins spanning `range`.
pub fn bin_histogram(values: &[f64], scale: Scale, n_bins: usize, range: (f64, f64)) -> Result<HistogramGrid> {
    let edges = make_edges(scale, n_bins, range.0, range.1)?;
    let mut counts = vec![0.0; n_bins];
    let mut out_of_range = 0;
    for &v in values {
        match locate(&edges, v) {
            Some(i) => counts[i] += 1.0,
            None => out_of_range += 1,
        }
    }
    Ok(HistogramGrid {
        edges,
        counts,
        scale,
        out_of_range,
        reflected: false,
    })
}

/// Binning recipe for one column, fitted once on reference data and then
/// reused so that every compared histogram shares the same grid.
///
/// Log scale needs a single-signed column; an all-negative column is binned
/// on `-x` (`reflect`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub scale: Scale,
    pub lo: f64,
    pub hi: f64,
    pub n_bins: usize,
    pub reflect: bool,
}

impl AxisSpec {
    /// Spans the reference's extremes. Without an explicit `scale`, a
    /// single-signed column covering more than a decade gets log bins.
    pub fn fit(reference: &[f64], scale: Option<Scale>, n_bins: usize) -> Result<Self> {
        let (min, max) = reference
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if !(min.is_finite() && max.is_finite()) || min >= max {
            return Err(Error::Range(format!("cannot fit an axis to values spanning ({min}, {max})")));
        }
        let reflect = max < 0.0;
        let (lo, hi) = if reflect { (-max, -min) } else { (min, max) };
        let scale = scale.unwrap_or(if lo > 0.0 && hi / lo > 10.0 {
            Scale::Log
        } else {
            Scale::Linear
        });
        if scale == Scale::Log && lo <= 0.0 {
            return Err(Error::Range(format!(
                "log scale needs a single-signed column, got ({min}, {max})"
            )));
        }
        Ok(Self {
            scale,
            lo,
            hi,
            n_bins,
            reflect: reflect && scale == Scale::Log,
        }
        .normalize_linear(min, max))
    }

    fn normalize_linear(mut self, min: f64, max: f64) -> Self {
        if self.scale == Scale::Linear {
            self.lo = min;
            self.hi = max;
            self.reflect = false;
        }
        self
    }

    fn map(&self, v: f64) -> f64 {
        if self.reflect {
            -v
        } else {
            v
        }
    }

    pub fn bin(&self, values: &[f64]) -> Result<HistogramGrid> {
        let mapped: Vec<f64> = values.iter().map(|&v| self.map(v)).collect();
        let mut h = bin_histogram(&mapped, self.scale, self.n_bins, (self.lo, self.hi))?;
        h.reflected = self.reflect;
        Ok(h)
    }
}

/// Two-dimensional histogram; `counts[i][j]` is x-bin `i`, y-bin `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramGrid2D {
    pub x: AxisSpec,
    pub y: AxisSpec,
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    pub counts: Vec<Vec<f64>>,
    pub out_of_range: u64,
}

impl HistogramGrid2D {
    pub fn in_range(&self) -> f64 {
        self.counts.iter().flatten().sum()
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.x == other.x && self.y == other.y
    }

    /// Dense matrix export; see [`write_matrix_csv`].
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_matrix_csv(self, |i, j| Some(self.counts[i][j]), writer)
    }
}

/// Writes one row per x bin: `x_lo,x_hi` then one value per y bin. The
/// header names each y column by its bin's lower edge. Cells without a
/// value are written as `nan`. Edges are in the binned coordinate (negated
/// on reflected axes).
pub fn write_matrix_csv<W: Write>(
    grid: &HistogramGrid2D,
    value: impl Fn(usize, usize) -> Option<f64>,
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["x_lo".to_string(), "x_hi".to_string()];
    header.extend(grid.y_edges[..grid.y.n_bins].iter().map(|e| format!("{e:?}")));
    w.write_record(&header)?;
    for i in 0..grid.x.n_bins {
        let mut row = vec![format!("{:?}", grid.x_edges[i]), format!("{:?}", grid.x_edges[i + 1])];
        row.extend((0..grid.y.n_bins).map(|j| value(i, j).map_or_else(|| "nan".to_string(), |v| format!("{v:?}"))));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn bin_histogram2d(xs: &[f64], ys: &[f64], x: &AxisSpec, y: &AxisSpec) -> Result<HistogramGrid2D> {
    if xs.len() != ys.len() {
        return Err(Error::Size(format!("{} x values but {} y values", xs.len(), ys.len())));
    }
    let x_edges = make_edges(x.scale, x.n_bins, x.lo, x.hi)?;
    let y_edges = make_edges(y.scale, y.n_bins, y.lo, y.hi)?;
    let mut counts = vec![vec![0.0; y.n_bins]; x.n_bins];
    let mut out_of_range = 0;
    for (&a, &b) in xs.iter().zip(ys) {
        match (locate(&x_edges, x.map(a)), locate(&y_edges, y.map(b))) {
            (Some(i), Some(j)) => counts[i][j] += 1.0,
            _ => out_of_range += 1,
        }
    }
    Ok(HistogramGrid2D {
        x: *x,
        y: *y,
        x_edges,
        y_edges,
        counts,
        out_of_range,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bin_centres_fill_each_bin_once() {
        let centres: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let h = bin_histogram(&centres, Scale::Linear, 100, (0.0, 1.0)).unwrap();
        assert_eq!(h.edges.len(), 101);
        assert!(h.counts.iter().all(|&c| c == 1.0));
        let geo: Vec<f64> = (0..100).map(|i| 10f64.powf(1.0 + 3.0 * (i as f64 + 0.5) / 100.0)).collect();
        let h = bin_histogram(&geo, Scale::Log, 100, (10.0, 1e4)).unwrap();
        assert!(h.counts.iter().all(|&c| c == 1.0));
    }

    #[test]
    fn range_errors() {
        assert!(matches!(bin_histogram(&[1.0], Scale::Log, 100, (0.0, 1.0)), Err(Error::Range(_))));
        assert!(matches!(bin_histogram(&[1.0], Scale::Log, 100, (-1.0, 1.0)), Err(Error::Range(_))));
        assert!(matches!(bin_histogram(&[1.0], Scale::Linear, 100, (1.0, 1.0)), Err(Error::Range(_))));
        assert!(matches!(bin_histogram(&[1.0], Scale::Linear, 100, (2.0, 1.0)), Err(Error::Range(_))));
    }

    #[test]
    fn uniform_bins_are_binomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let v: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        let h = bin_histogram(&v, Scale::Linear, 100, (0.0, 1.0)).unwrap();
        assert!(h.counts.iter().all(|&c| (c - 1000.0).abs() <= 100.0), "{:?}", h.counts);
    }

    #[test]
    fn upper_edge_is_inclusive() {
        let h = bin_histogram(&[0.0, 1.0, 1.0 + 1e-12, -1e-12, f64::NAN], Scale::Linear, 4, (0.0, 1.0)).unwrap();
        assert_eq!(h.counts, vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(h.out_of_range, 3);
    }

    #[test]
    fn axis_fit_picks_scales() {
        let s: Vec<f64> = (1..=100).map(|i| 1e5 * i as f64).collect();
        let a = AxisSpec::fit(&s, None, 100).unwrap();
        assert_eq!((a.scale, a.reflect, a.lo, a.hi), (Scale::Log, false, 1e5, 1e7));
        let t: Vec<f64> = s.iter().map(|v| -v).collect();
        let a = AxisSpec::fit(&t, None, 100).unwrap();
        assert_eq!((a.scale, a.reflect, a.lo, a.hi), (Scale::Log, true, 1e5, 1e7));
        let h = a.bin(&t).unwrap();
        assert_eq!(h.out_of_range, 0);
        let y = [-2.0, 0.5, 1.5];
        let a = AxisSpec::fit(&y, None, 100).unwrap();
        assert_eq!((a.scale, a.lo, a.hi), (Scale::Linear, -2.0, 1.5));
        assert!(AxisSpec::fit(&y, Some(Scale::Log), 100).is_err());
    }

    #[test]
    fn reflected_csv_is_in_physical_order() {
        let a = AxisSpec::fit(&[-100.0, -1.0], Some(Scale::Log), 2).unwrap();
        let h = a.bin(&[-50.0, -2.0, -2.0]).unwrap();
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "edge_lo,edge_hi,count");
        assert!(lines[1].starts_with("-100.0,") && lines[1].ends_with(",1.0"));
        assert!(lines[2].ends_with("-1.0,2.0"));
    }

    #[test]
    fn grid2d_conserves() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let xs: Vec<f64> = (0..1000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ys: Vec<f64> = (0..1000).map(|_| rng.random_range(0.5..20.0)).collect();
        let ax = AxisSpec::fit(&xs[..500], Some(Scale::Linear), 10).unwrap();
        let ay = AxisSpec::fit(&ys[..500], None, 8).unwrap();
        let h = bin_histogram2d(&xs, &ys, &ax, &ay).unwrap();
        assert_eq!(h.in_range() as u64 + h.out_of_range, 1000);
        assert!(bin_histogram2d(&xs, &ys[..3], &ax, &ay).is_err());
    }

    proptest! {
        #[test]
        fn conservation_and_determinism(
            values in prop::collection::vec(-10.0f64..10.0, 0..300),
            lo in -5.0f64..0.0,
            width in 0.1f64..8.0,
        ) {
            let a = bin_histogram(&values, Scale::Linear, 100, (lo, lo + width)).unwrap();
            let b = bin_histogram(&values, Scale::Linear, 100, (lo, lo + width)).unwrap();
            prop_assert_eq!(a.in_range() as u64 + a.out_of_range, values.len() as u64);
            prop_assert!(a.edges.windows(2).all(|e| e[0] < e[1]));
            prop_assert_eq!(a, b);
        }
    }
}
