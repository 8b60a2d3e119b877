use std::path::PathBuf;

use clap::{Parser, Subcommand};

/// Command-line surface. Shared settings are global so they can be given
/// before or after the subcommand; each one can also come from a
/// `key=value` config file (flags win).
#[derive(Debug, Parser)]
#[command(
    name = "gaci",
    version,
    about = "Build agriculture and climate pillars, aggregate the 14-pillar index, and report on it"
)]
pub struct Cli {
    /// Directory holding the input CSV files
    #[arg(long, global = true, value_name = "DIR")]
    pub fixtures: Option<PathBuf>,

    /// Directory for generated files
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// key=value settings file; command-line flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Lower bound of the normalization range
    #[arg(long, global = true, value_name = "N")]
    pub norm_lo: Option<f64>,

    /// Upper bound of the normalization range
    #[arg(long, global = true, value_name = "N")]
    pub norm_hi: Option<f64>,

    /// Floor applied to raw indicator values before logarithms
    #[arg(long, global = true, value_name = "N")]
    pub epsilon: Option<f64>,

    /// Two-sided significance level for confidence intervals
    #[arg(long, global = true, value_name = "N")]
    pub alpha: Option<f64>,

    /// Robust covariance variant: hc0, hc1, or hc3
    #[arg(long, global = true, value_name = "VARIANT")]
    pub hc: Option<String>,

    /// Reference country for the regression dummy encoding
    #[arg(long, global = true, value_name = "COUNTRY")]
    pub base_country: Option<String>,

    /// Region report rendering: csv, md, or both
    #[arg(long, global = true, value_name = "FORMAT")]
    pub format: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the agriculture pillar from indicator data
    Pillar13 {
        /// CSV of already-normalized indicators (country,agtfp,aoi,agcs)
        #[arg(long, value_name = "FILE", conflicts_with = "raw")]
        indicators: Option<PathBuf>,

        /// CSV of raw indicator levels
        /// (country,agtfp_level,aoi,value_added,world_gdp) to
        /// log-transform and normalize first
        #[arg(long, value_name = "FILE")]
        raw: Option<PathBuf>,
    },

    /// Build the climate pillar from a coefficient table or a fitted panel
    Pillar14 {
        /// CSV of regression terms (term,coef)
        #[arg(long, value_name = "FILE", conflicts_with = "panel")]
        coefficients: Option<PathBuf>,

        /// Panel CSV (country,year,agtfp,temp_c,prec_mm) to fit first
        #[arg(long, value_name = "FILE")]
        panel: Option<PathBuf>,
    },

    /// Aggregate pillars into country scores and write every report the
    /// inputs allow: ranking, comparison, disparities, regions, validity
    Compute {
        /// Pillar matrix CSV (country,p1..p14)
        #[arg(long, value_name = "FILE")]
        pillars: Option<PathBuf>,

        /// Comparison index CSV (country,score); comparison is skipped
        /// when neither this flag nor the default file is present
        #[arg(long, value_name = "FILE")]
        gci: Option<PathBuf>,

        /// Region labels CSV (country,region[,development])
        #[arg(long, value_name = "FILE")]
        regions: Option<PathBuf>,
    },

    /// Correlate every pillar with the composite index
    Validate {
        /// Pillar matrix CSV (country,p1..p14)
        #[arg(long, value_name = "FILE")]
        pillars: Option<PathBuf>,
    },

    /// Region-grouped comparison tables plus per-region plot data
    Report {
        /// Pillar matrix CSV (country,p1..p14)
        #[arg(long, value_name = "FILE")]
        pillars: Option<PathBuf>,

        /// Comparison index CSV (country,score)
        #[arg(long, value_name = "FILE")]
        gci: Option<PathBuf>,

        /// Region labels CSV (country,region[,development])
        #[arg(long, value_name = "FILE")]
        regions: Option<PathBuf>,
    },
}
