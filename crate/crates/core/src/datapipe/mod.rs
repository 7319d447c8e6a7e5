//! Data ingestion, the `[-1, 1]` pre/post-processing and histogramming.

mod dataset;
mod histogram;
mod synth;
mod transform;
mod yeo_johnson;

pub use dataset::RawDataset;
pub use histogram::{bin_histogram, bin_histogram2d, write_matrix_csv, AxisSpec, HistogramGrid, HistogramGrid2D, Scale, DEFAULT_BINS};
pub use synth::{synth_dataset, ColumnFamily, OracleColumn, SyntheticOracleSpec};
pub use transform::{ColumnTransform, InverseOutput, TransformModel, LAMBDA_SEARCH, LAMBDA_TOL};
pub use yeo_johnson::{fit_lambda, image_bounds, inverse_yeo_johnson, log_likelihood, yeo_johnson};
