use crate::datapipe::HistogramGrid2D;
use crate::error::{Error, Result};

/// Cell-wise `generated / reference` after normalising both to unit mass.
/// Cells with an empty reference are `None`.
pub fn ratio_map(reference: &HistogramGrid2D, generated: &HistogramGrid2D) -> Result<Vec<Vec<Option<f64>>>> {
    if !reference.same_grid(generated) {
        return Err(Error::Grid("ratio map needs histograms on the same grid".into()));
    }
    let (sr, sg) = (reference.in_range(), generated.in_range());
    if !(sr > 0.0) {
        return Err(Error::Grid("reference histogram is empty".into()));
    }
    Ok(reference
        .counts
        .iter()
        .zip(&generated.counts)
        .map(|(rr, gr)| {
            rr.iter()
                .zip(gr)
                .map(|(&r, &g)| (r > 0.0).then(|| if sg > 0.0 { (g / sg) / (r / sr) } else { 0.0 }))
                .collect()
        })
        .collect())
}

/// Normalised 2D histogram (probability per cell).
pub fn correlation_map(grid: &HistogramGrid2D) -> Vec<Vec<f64>> {
    let s = grid.in_range();
    grid.counts
        .iter()
        .map(|row| row.iter().map(|&c| if s > 0.0 { c / s } else { 0.0 }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datapipe::{bin_histogram2d, AxisSpec, Scale};

    fn grids() -> (HistogramGrid2D, HistogramGrid2D) {
        let ax = AxisSpec::fit(&[0.0, 1.0], Some(Scale::Linear), 2).unwrap();
        let xs = [0.1, 0.2, 0.9, 0.6];
        let ys = [0.1, 0.8, 0.9, 0.7];
        let r = bin_histogram2d(&xs, &ys, &ax, &ax).unwrap();
        (r.clone(), r)
    }

    #[test]
    fn identical_and_scaled() {
        let (r, mut g) = grids();
        let m = ratio_map(&r, &g).unwrap();
        assert_eq!(m[0][0], Some(1.0));
        assert_eq!(m[1][1], Some(1.0));
        assert_eq!(m[1][0], None);
        for row in &mut g.counts {
            for c in row.iter_mut() {
                *c *= 2.0;
            }
        }
        let m = ratio_map(&r, &g).unwrap();
        assert!(m.iter().flatten().flatten().all(|&v| v == 1.0));
    }

    #[test]
    fn empty_reference_cell_is_undefined() {
        let (r, mut g) = grids();
        g.counts[1][0] = 5.0;
        let m = ratio_map(&r, &g).unwrap();
        assert_eq!(m[1][0], None);
        let total: f64 = correlation_map(&g).iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mismatched_grid() {
        let (r, _) = grids();
        let ax = AxisSpec::fit(&[0.0, 2.0], Some(Scale::Linear), 2).unwrap();
        let g = bin_histogram2d(&[0.5], &[0.5], &ax, &ax).unwrap();
        assert!(matches!(ratio_map(&r, &g), Err(Error::Grid(_))));
    }
}
