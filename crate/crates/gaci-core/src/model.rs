//! Shared domain types.
//!
//! Everything here is immutable value data validated at construction, so
//! downstream code can rely on the invariants (bounded pillar values, rank
//! permutations, positive denominators) instead of re-checking them. All
//! types are `Send + Sync`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{GaciError, Result};

/// Number of pillars in the composite index.
pub const N_PILLARS: usize = 14;

/// Canonical country identifier.
///
/// `name` preserves the source spelling ("Gambia, The" stays verbatim);
/// `key` is the join key — trimmed, uppercased, internal whitespace runs
/// collapsed. Equality, ordering, and hashing all use the key, so joins
/// are case- and spacing-insensitive while display output keeps the
/// original form.
#[derive(Debug, Clone)]
pub struct CountryId {
    name: String,
    key: String,
}

impl CountryId {
    pub fn new(name: &str) -> Result<Self> {
        let trimmed = name.trim();
        if trimmed.is_empty() {
            return Err(GaciError::Domain("country name is empty".into()));
        }
        let key = trimmed
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .to_uppercase();
        Ok(CountryId {
            name: trimmed.to_string(),
            key,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn key(&self) -> &str {
        &self.key
    }
}

impl fmt::Display for CountryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl PartialEq for CountryId {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for CountryId {}

impl PartialOrd for CountryId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CountryId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key.cmp(&other.key)
    }
}

impl std::hash::Hash for CountryId {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

/// One (country, year) row of the climate panel.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelObservation {
    pub country: CountryId,
    pub year: i32,
    /// Agricultural total factor productivity index (base 2015 = 100).
    pub agtfp: f64,
    /// Annual mean temperature, °C.
    pub temp_c: f64,
    /// Annual precipitation, mm.
    pub prec_mm: f64,
}

impl PanelObservation {
    pub fn new(
        country: CountryId,
        year: i32,
        agtfp: f64,
        temp_c: f64,
        prec_mm: f64,
    ) -> Result<Self> {
        if !(1900..=2100).contains(&year) {
            return Err(GaciError::Domain(format!(
                "year {year} outside [1900, 2100]"
            )));
        }
        if !(agtfp.is_finite() && agtfp > 0.0) {
            return Err(GaciError::Domain(format!(
                "agtfp must be positive (got {agtfp})"
            )));
        }
        if !temp_c.is_finite() {
            return Err(GaciError::Domain(format!(
                "temp_c must be finite (got {temp_c})"
            )));
        }
        if !(prec_mm.is_finite() && prec_mm >= 0.0) {
            return Err(GaciError::Domain(format!(
                "prec_mm must be non-negative (got {prec_mm})"
            )));
        }
        Ok(PanelObservation {
            country,
            year,
            agtfp,
            temp_c,
            prec_mm,
        })
    }
}

/// Total output and total input whose ratio defines a TFP level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputInputAggregate {
    total_output: f64,
    total_input: f64,
}

impl OutputInputAggregate {
    pub fn new(total_output: f64, total_input: f64) -> Result<Self> {
        if !(total_output.is_finite() && total_output >= 0.0) {
            return Err(GaciError::Domain(format!(
                "total output must be non-negative (got {total_output})"
            )));
        }
        if !(total_input.is_finite() && total_input > 0.0) {
            return Err(GaciError::ZeroInput(total_input));
        }
        Ok(OutputInputAggregate {
            total_output,
            total_input,
        })
    }

    pub fn total_output(&self) -> f64 {
        self.total_output
    }

    pub fn total_input(&self) -> f64 {
        self.total_input
    }
}

/// Per-country raw inputs for the agriculture pillar: TFP level,
/// agriculture orientation index, and the value-added / world-GDP pair
/// whose ratio is the agricultural contribution share.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorRecord {
    pub country: CountryId,
    pub agtfp_level: f64,
    pub aoi: f64,
    pub value_added: f64,
    pub world_gdp: f64,
}

impl IndicatorRecord {
    pub fn new(
        country: CountryId,
        agtfp_level: f64,
        aoi: f64,
        value_added: f64,
        world_gdp: f64,
    ) -> Result<Self> {
        if !(agtfp_level.is_finite() && agtfp_level > 0.0) {
            return Err(GaciError::Domain(format!(
                "agtfp_level must be positive (got {agtfp_level})"
            )));
        }
        if !aoi.is_finite() {
            return Err(GaciError::Domain(format!("aoi must be finite (got {aoi})")));
        }
        if !(value_added.is_finite() && value_added >= 0.0) {
            return Err(GaciError::Domain(format!(
                "value_added must be non-negative (got {value_added})"
            )));
        }
        if !(world_gdp.is_finite() && world_gdp > 0.0) {
            return Err(GaciError::ZeroWorldGdp(world_gdp));
        }
        if value_added > world_gdp {
            return Err(GaciError::Domain(format!(
                "value_added {value_added} exceeds world_gdp {world_gdp}"
            )));
        }
        Ok(IndicatorRecord {
            country,
            agtfp_level,
            aoi,
            value_added,
            world_gdp,
        })
    }
}

/// Country × pillar score table. Pillars 1–13 are unsigned scores in
/// [0, 100]; pillar 14 is signed in [−100, 100] (the climate pillar keeps
/// the direction of the estimated effect).
#[derive(Debug, Clone, PartialEq)]
pub struct PillarMatrix {
    countries: Vec<CountryId>,
    values: Vec<[f64; N_PILLARS]>,
}

/// Slack for inclusive bound checks on parsed/rounded data.
const BOUND_EPS: f64 = 1e-9;

impl PillarMatrix {
    pub fn new(countries: Vec<CountryId>, values: Vec<[f64; N_PILLARS]>) -> Result<Self> {
        if countries.len() != values.len() {
            return Err(GaciError::Domain(format!(
                "{} countries but {} value rows",
                countries.len(),
                values.len()
            )));
        }
        if countries.is_empty() {
            return Err(GaciError::Domain("pillar matrix is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for (country, row) in countries.iter().zip(&values) {
            if !seen.insert(country.key().to_string()) {
                return Err(GaciError::Domain(format!("duplicate country `{country}`")));
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(GaciError::Domain(format!(
                        "pillar {} for {country} is not finite",
                        j + 1
                    )));
                }
                let (lo, hi) = if j + 1 == N_PILLARS {
                    (-100.0, 100.0)
                } else {
                    (0.0, 100.0)
                };
                if *v < lo - BOUND_EPS || *v > hi + BOUND_EPS {
                    return Err(GaciError::Domain(format!(
                        "pillar {} value {v} for {country} outside [{lo}, {hi}]",
                        j + 1
                    )));
                }
            }
        }
        Ok(PillarMatrix { countries, values })
    }

    pub fn len(&self) -> usize {
        self.countries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.countries.is_empty()
    }

    pub fn countries(&self) -> &[CountryId] {
        &self.countries
    }

    pub fn rows(&self) -> impl Iterator<Item = (&CountryId, &[f64; N_PILLARS])> {
        self.countries.iter().zip(self.values.iter())
    }

    pub fn row(&self, country: &CountryId) -> Option<&[f64; N_PILLARS]> {
        self.countries
            .iter()
            .position(|c| c == country)
            .map(|i| &self.values[i])
    }

    /// Values of one pillar across countries, in row order.
    /// `pillar` is 1-based.
    pub fn pillar_column(&self, pillar: usize) -> Result<Vec<f64>> {
        if pillar == 0 || pillar > N_PILLARS {
            return Err(GaciError::MissingPillar(pillar));
        }
        Ok(self.values.iter().map(|row| row[pillar - 1]).collect())
    }

    /// Returns a copy with `delta` added to every cell. The result is
    /// validated like any other matrix, so a shift that pushes values
    /// outside the pillar bounds is rejected.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .map(|row| {
                let mut out = *row;
                for v in &mut out {
                    *v += delta;
                }
                out
            })
            .collect();
        PillarMatrix::new(self.countries.clone(), values)
    }
}

/// One row of the climate pillar score table.
///
/// `d1 = coefficient + constant` and `d2 = d1 − 2·constant`, so the
/// identity `d1 − d2 = 2·constant` holds bit-exactly (building `d2` as
/// `coefficient − constant` could differ in the last ulp). Min-max
/// normalization is shift-invariant, so normalizing the d1 and the d2
/// column gives the same scores; `normalized` stores that common value.
#[derive(Debug, Clone, PartialEq)]
pub struct Pillar14Row {
    pub country: CountryId,
    /// Estimated country effect (0 for the base country).
    pub coefficient: f64,
    /// Model intercept.
    pub constant: f64,
    pub d1: f64,
    pub d2: f64,
    /// Unsigned normalized score.
    pub normalized: f64,
    /// −1.0 or +1.0.
    pub sign: f64,
    /// `sign × normalized`.
    pub signed_score: f64,
}

impl Pillar14Row {
    pub fn new(
        country: CountryId,
        coefficient: f64,
        constant: f64,
        normalized: f64,
        sign: f64,
    ) -> Result<Self> {
        if !(coefficient.is_finite() && constant.is_finite() && normalized.is_finite()) {
            return Err(GaciError::Domain(format!(
                "non-finite climate score inputs for {country}"
            )));
        }
        if sign != 1.0 && sign != -1.0 {
            return Err(GaciError::Domain(format!("sign must be ±1 (got {sign})")));
        }
        let d1 = coefficient + constant;
        let d2 = d1 - 2.0 * constant;
        Ok(Pillar14Row {
            country,
            coefficient,
            constant,
            d1,
            d2,
            normalized,
            sign,
            signed_score: sign * normalized,
        })
    }
}

/// One row of the agriculture pillar table: three normalized indicators
/// and their arithmetic mean. The mean is computed here so the invariant
/// `score = (agtfp + aoi + agcs)/3` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Pillar13Row {
    pub country: CountryId,
    pub agtfp_norm: f64,
    pub aoi_norm: f64,
    pub agcs_norm: f64,
    pub score: f64,
}

impl Pillar13Row {
    pub fn new(country: CountryId, agtfp_norm: f64, aoi_norm: f64, agcs_norm: f64) -> Result<Self> {
        for (label, v) in [
            ("agtfp", agtfp_norm),
            ("aoi", aoi_norm),
            ("agcs", agcs_norm),
        ] {
            if !v.is_finite() || !(-BOUND_EPS..=100.0 + BOUND_EPS).contains(&v) {
                return Err(GaciError::Domain(format!(
                    "normalized {label} value {v} for {country} outside [0, 100]"
                )));
            }
        }
        let score = (agtfp_norm + aoi_norm + agcs_norm) / 3.0;
        Ok(Pillar13Row {
            country,
            agtfp_norm,
            aoi_norm,
            agcs_norm,
            score,
        })
    }
}

/// Target range and log guard for normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationSpec {
    pub lo: f64,
    pub hi: f64,
    /// Floor applied before taking logarithms.
    pub epsilon: f64,
}

impl NormalizationSpec {
    pub fn new(lo: f64, hi: f64, epsilon: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(GaciError::Domain(format!(
                "normalization range [{lo}, {hi}] is invalid"
            )));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(GaciError::Domain(format!(
                "epsilon must be positive (got {epsilon})"
            )));
        }
        Ok(NormalizationSpec { lo, hi, epsilon })
    }
}

impl Default for NormalizationSpec {
    fn default() -> Self {
        NormalizationSpec {
            lo: 0.0,
            hi: 100.0,
            epsilon: 1e-9,
        }
    }
}

/// Country → region label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegionMap {
    labels: BTreeMap<CountryId, String>,
}

impl RegionMap {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (CountryId, String)>) -> Result<Self> {
        let mut labels = BTreeMap::new();
        for (country, label) in pairs {
            if label.trim().is_empty() {
                return Err(GaciError::Domain(format!(
                    "empty region label for {country}"
                )));
            }
            if labels.insert(country.clone(), label).is_some() {
                return Err(GaciError::Domain(format!(
                    "duplicate region entry for {country}"
                )));
            }
        }
        Ok(RegionMap { labels })
    }

    pub fn get(&self, country: &CountryId) -> Option<&str> {
        self.labels.get(country).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CountryId, &str)> {
        self.labels.iter().map(|(c, l)| (c, l.as_str()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Development status used by the disparity split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Development {
    Developed,
    Developing,
}

impl std::str::FromStr for Development {
    type Err = GaciError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "developed" => Ok(Development::Developed),
            "developing" => Ok(Development::Developing),
            other => Err(GaciError::Domain(format!(
                "unknown development tag `{other}` (expected developed/developing)"
            ))),
        }
    }
}

/// One country's entry on the score board.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreEntry {
    pub country: CountryId,
    pub gaci_score: f64,
    /// 1-based rank under descending score, ties broken alphabetically.
    pub gaci_rank: usize,
    pub gci_score: Option<f64>,
    pub gci_rank: Option<usize>,
    /// `gaci_score − gci_score` when the comparison score is present.
    pub diff: Option<f64>,
    pub region: Option<String>,
}

/// Ranked index scores with optional comparison columns.
///
/// Entries are ordered by rank. Countries present only on the comparison
/// side are kept in `unmatched_comparison` so nothing is dropped silently.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreBoard {
    entries: Vec<ScoreEntry>,
    unmatched_comparison: Vec<CountryId>,
}

impl ScoreBoard {
    pub fn new(entries: Vec<ScoreEntry>, unmatched_comparison: Vec<CountryId>) -> Result<Self> {
        if entries.is_empty() {
            return Err(GaciError::Domain("score board is empty".into()));
        }
        // Ranks must be the permutation 1..N induced by descending score
        // with alphabetical tie-breaks.
        for (i, e) in entries.iter().enumerate() {
            if e.gaci_rank != i + 1 {
                return Err(GaciError::Domain(format!(
                    "rank {} at position {} breaks the 1..N permutation",
                    e.gaci_rank,
                    i + 1
                )));
            }
            if i > 0 {
                let prev = &entries[i - 1];
                let tied = prev.gaci_score == e.gaci_score;
                if prev.gaci_score < e.gaci_score || (tied && prev.country > e.country) {
                    return Err(GaciError::Domain(format!(
                        "entries out of rank order at `{}`",
                        e.country
                    )));
                }
            }
            if let (Some(g), Some(d)) = (e.gci_score, e.diff) {
                if d != e.gaci_score - g {
                    return Err(GaciError::Domain(format!(
                        "diff for `{}` is not gaci − gci",
                        e.country
                    )));
                }
            }
            if e.gci_score.is_none() && (e.diff.is_some() || e.gci_rank.is_some()) {
                return Err(GaciError::Domain(format!(
                    "`{}` has comparison columns without a comparison score",
                    e.country
                )));
            }
        }
        let mut gci_ranks: Vec<usize> = entries.iter().filter_map(|e| e.gci_rank).collect();
        gci_ranks.sort_unstable();
        if !gci_ranks.is_empty()
            && (gci_ranks.first() != Some(&1) || gci_ranks.windows(2).any(|w| w[1] != w[0] + 1))
        {
            return Err(GaciError::Domain(
                "comparison ranks are not a permutation of 1..M".into(),
            ));
        }
        Ok(ScoreBoard {
            entries,
            unmatched_comparison,
        })
    }

    pub fn entries(&self) -> &[ScoreEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, country: &CountryId) -> Option<&ScoreEntry> {
        self.entries.iter().find(|e| &e.country == country)
    }

    pub fn unmatched_comparison(&self) -> &[CountryId] {
        &self.unmatched_comparison
    }

    /// Attach region labels. Labels for countries not on the board are
    /// reported as an error so a typo in a region file cannot silently
    /// drop a country from region reports.
    pub fn with_regions(mut self, regions: &RegionMap) -> Result<Self> {
        for (country, _) in regions.iter() {
            if self.get(country).is_none() {
                return Err(GaciError::UnknownCountry {
                    context: "region map".into(),
                    country: country.name().into(),
                });
            }
        }
        for e in &mut self.entries {
            e.region = regions.get(&e.country).map(str::to_string);
        }
        Ok(self)
    }
}

/// Pearson correlation matrix over the pillar columns plus the composite
/// index, with two-sided p-values.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    labels: Vec<String>,
    r: Vec<f64>,
    p: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn new(labels: Vec<String>, r: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if r.len() != n * n || p.len() != n * n {
            return Err(GaciError::Domain(format!(
                "correlation matrix shape mismatch: {n} labels, {} r cells, {} p cells",
                r.len(),
                p.len()
            )));
        }
        for i in 0..n {
            if (r[i * n + i] - 1.0).abs() > 1e-12 {
                return Err(GaciError::Domain(format!(
                    "diagonal r for `{}` is {}, expected 1",
                    labels[i],
                    r[i * n + i]
                )));
            }
            for j in 0..n {
                let v = r[i * n + j];
                if !v.is_finite() || v.abs() > 1.0 + 1e-12 {
                    return Err(GaciError::Domain(format!(
                        "r({}, {}) = {v} outside [−1, 1]",
                        labels[i], labels[j]
                    )));
                }
                if (v - r[j * n + i]).abs() > 1e-12 {
                    return Err(GaciError::Domain(format!(
                        "correlation matrix asymmetric at ({}, {})",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(CorrelationMatrix { labels, r, p })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn r(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.labels.len() + j]
    }

    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.labels.len() + j]
    }
}
