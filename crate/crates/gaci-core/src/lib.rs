//! Global Agricultural Competitiveness Index (GACI) pipeline.
//!
//! The index scores countries on 14 pillars. Twelve come from published
//! competitiveness data; this crate computes the remaining two and
//! everything downstream:
//!
//! * **Pillar 13 (agriculture)** — log-transformed, min-max normalized
//!   agricultural indicators averaged per country ([`pillars::build_pillar13`]).
//! * **Pillar 14 (climate impact)** — a panel regression of agricultural
//!   TFP on temperature and precipitation with country fixed effects and
//!   heteroskedasticity-robust standard errors
//!   ([`econometrics::fit_climate_model`]); the per-country intercepts
//!   are normalized and signed into scores ([`pillars::build_pillar14`]).
//! * **Aggregation** — equal-weight mean over the 14 pillars, ranking,
//!   comparison against an external index, and region/disparity reports
//!   ([`index_engine`]).
//! * **Validation** — Pearson item analysis of every pillar against the
//!   composite ([`validation`]).
//!
//! [`ingest`] reads the CSV inputs and writes every report with a fixed
//! dialect so outputs are byte-reproducible. All numeric choices that
//! affect results (normalization range, log-floor epsilon, robust
//! covariance variant, significance level) are explicit parameters.

pub mod econometrics;
pub mod error;
pub mod index_engine;
pub mod ingest;
pub mod model;
pub mod pillars;
pub mod transform;
pub mod validation;

pub use error::{GaciError, Result};
pub use model::{
    CorrelationMatrix, CountryId, Development, IndicatorRecord, NormalizationSpec,
    OutputInputAggregate, PanelObservation, Pillar13Row, Pillar14Row, PillarMatrix, RegionMap,
    ScoreBoard, ScoreEntry, N_PILLARS,
};

pub use econometrics::{
    encode_design, fit_climate_model, inference, ols_fit, panel_r2, robust_covariance,
    DesignMatrix, HcType, OlsFit, PanelR2, RegressionFit, RegressionTerm,
};
pub use index_engine::{
    assemble_matrix, compare, compute_gaci, disparity_stats, rank, region_report, DisparityStats,
    RegionReport,
};
pub use ingest::{write_table, Cell, DatasetBundle, ReportTable};
pub use pillars::{
    aggregate_pillar13, build_pillar13, build_pillar14, compute_agcs, tfp_growth, tfp_ratio,
    ClimateEffects,
};
pub use transform::{apply_sign, log_transform, minmax_normalize};
pub use validation::{item_analysis, pearson};
