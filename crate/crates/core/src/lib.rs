//! Statistics of calibrated measurements.
//!
//! Readings `Z` taken on an instrument are projected onto a reference scale
//! through a fitted calibration line, `Y = b0_hat + b1_hat * Z`. Because every
//! projected value shares the same random pair `(b0_hat, b1_hat)`, the
//! calibrated sample is no longer an iid Gaussian sample: the mean, the sample
//! variance and Student's statistic follow translation/scale mixtures of their
//! textbook laws. This crate evaluates those mixture laws, their moments,
//! probability regions and test operating characteristics, and carries the
//! Monte Carlo engine and diagnostics used to check them.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the command
//! line and parallel execution live in the `calmix` companion crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diagnostics;
pub mod error;
pub mod mixtures;
pub mod model;
pub mod moments;
pub mod noncentral;
pub mod oneway;
pub mod power;
pub mod quad;
pub mod series;
pub mod simulate;
pub mod special;

pub use diagnostics::{
    blindness_suite, blom_weights, diagnose, moment_ratios, residual_diagnostics, shapiro_type_w,
    von_neumann_ratio, BlindnessReport, DiagnosticReport, DifferenceMatrix, IdentityGaps,
    KsComparison, ResidualSet,
};
pub use error::{Error, Result};
pub use mixtures::{
    nc_chisq1_pdf, pdf_mass, CalibratedTsq, CdfEval, DistSpec, MeanMixture, Mixture, PdfMass,
    QuadSpec, SignedTMixture, TsqMixture, VarianceMixture,
};
pub use model::{
    correlation_params, derive_params, fit_calibration, unconditional_mean_cov, CalibrationData,
    CalibrationFit, CovarianceStructure, DerivedParams, Matrix, MixtureParams,
};
pub use moments::{
    expected_sample_variance, interval_coverage, mean_moments, probability_region, MomentSummary,
    ProbRegion, VarianceBias,
};
pub use oneway::{
    decompose, f_noncentrality, f_power, group_variance_bias, group_variances,
    homoscedasticity_condition, mc_oneway, variance_tests, AnovaDecomposition, FPower, GroupBias,
    Homoscedasticity, OneWayDesign, OneWayMc, PairCheck, VarianceTests,
};
pub use power::{
    nonrejection_via_signed, operating_characteristics, ordering_probe, power_table, tsq_critical,
    OrderingFamily, OrderingReport, PowerCell,
};
pub use simulate::{
    calibration_params, draw_calibrated_sample, draw_coefficients, ks_band, ks_band_two_sample,
    ks_bounds, ks_distance, ks_two_sample, mc_inconsistency_curve, mc_statistic_sample, replicate,
    simulate_summary, BlockExecutor, CurvePoint, Estimate, KsBounds, McConfig, McSummary, Moments,
    Normals, Serial, SimMode, Statistic, TsqTest,
};
