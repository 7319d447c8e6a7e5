//! Distribution comparison: binned KL divergence with shot-noise error bars,
//! correlation and ratio maps.

mod kl;
mod maps;
mod report;

pub use kl::{
    kl_divergence, kl_from_counts, kl_with_errorbars, sample_variance, scan_delta, write_kl_csv, KlResult,
    VarianceVector, KL_EPS, NOMINAL_SET, SCAN_SETS,
};
pub use maps::{correlation_map, ratio_map};
pub use report::{evaluate_datasets, reference_axes, EvaluationReport, PairMaps};
