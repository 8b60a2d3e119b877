//! The two computed pillars: agricultural competitiveness (pillar 13)
//! and climate impact (pillar 14).
//!
//! Pillar 13 condenses three indicators — an agricultural TFP level, an
//! agriculture orientation index, and the country's share of world
//! agricultural value added — each log-transformed and min-max
//! normalized, then averaged with equal weights. Pillar 14 converts the
//! fitted climate-model country effects into a normalized score whose
//! sign records whether the estimated climate response helps or hurts.

use std::collections::BTreeMap;

use crate::econometrics::{RegressionFit, COL_INTERCEPT, COL_PREC, COL_TEMP};
use crate::error::{GaciError, Result};
use crate::model::{CountryId, IndicatorRecord, NormalizationSpec, Pillar13Row, Pillar14Row};
use crate::transform::{apply_sign, log_transform, minmax_normalize};

/// Total-factor-productivity ratio: aggregate output over aggregate input.
pub fn tfp_ratio(output: f64, input: f64) -> Result<f64> {
    if !(output.is_finite() && input.is_finite()) {
        return Err(GaciError::Domain(format!(
            "non-finite TFP aggregate: output {output}, input {input}"
        )));
    }
    if input == 0.0 {
        return Err(GaciError::ZeroInput(input));
    }
    Ok(output / input)
}

/// Log growth of a TFP level series: element `i` is `ln(x[i+1] / x[i])`,
/// so the result is one shorter than the input. Levels must be positive.
pub fn tfp_growth(levels: &[f64]) -> Result<Vec<f64>> {
    for &v in levels {
        if !(v.is_finite() && v > 0.0) {
            return Err(GaciError::NonPositiveValue(v));
        }
    }
    Ok(levels.windows(2).map(|w| w[1].ln() - w[0].ln()).collect())
}

/// Agricultural value-added share of world GDP.
pub fn compute_agcs(value_added: f64, world_gdp: f64) -> Result<f64> {
    if !(value_added.is_finite() && value_added >= 0.0) {
        return Err(GaciError::Domain(format!(
            "agricultural value added {value_added} must be finite and non-negative"
        )));
    }
    if !(world_gdp.is_finite() && world_gdp > 0.0) {
        return Err(GaciError::ZeroWorldGdp(world_gdp));
    }
    Ok(value_added / world_gdp)
}

/// Build pillar 13 from raw indicator records: compute the value-added
/// share, log-transform all three indicators, min-max normalize each
/// across countries, and average. Returns the rows (sorted by country)
/// plus the count of log-floor clamps per indicator, in
/// `[agtfp, aoi, agcs]` order.
pub fn build_pillar13(
    records: &[IndicatorRecord],
    spec: &NormalizationSpec,
) -> Result<(Vec<Pillar13Row>, [usize; 3])> {
    if records.len() < 2 {
        return Err(GaciError::Domain(format!(
            "pillar 13 needs at least two countries to normalize, got {}",
            records.len()
        )));
    }
    let mut ordered: Vec<&IndicatorRecord> = records.iter().collect();
    ordered.sort_by(|a, b| a.country.cmp(&b.country));
    for pair in ordered.windows(2) {
        if pair[0].country == pair[1].country {
            return Err(GaciError::DuplicateCountry {
                path: "pillar 13 indicator records".into(),
                country: pair[0].country.name().into(),
            });
        }
    }

    let agtfp: Vec<f64> = ordered.iter().map(|r| r.agtfp_level).collect();
    let aoi: Vec<f64> = ordered.iter().map(|r| r.aoi).collect();
    let agcs = ordered
        .iter()
        .map(|r| compute_agcs(r.value_added, r.world_gdp))
        .collect::<Result<Vec<f64>>>()?;

    let mut normalized = Vec::with_capacity(3);
    let mut clamps = [0usize; 3];
    for (slot, (name, column)) in [("agtfp", agtfp), ("aoi", aoi), ("agcs", agcs)]
        .into_iter()
        .enumerate()
    {
        let (logged, clamped) = log_transform(&column, spec);
        clamps[slot] = clamped;
        let norm = minmax_normalize(&logged, spec).map_err(|e| match e {
            GaciError::DegenerateRange { value, .. } => GaciError::DegenerateRange {
                context: format!("pillar 13 indicator `{name}`"),
                value,
            },
            other => other,
        })?;
        normalized.push(norm);
    }

    let rows = ordered
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Pillar13Row::new(
                r.country.clone(),
                normalized[0][i],
                normalized[1][i],
                normalized[2][i],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, clamps))
}

/// Assemble pillar 13 rows from indicator values that are already
/// normalized to the scoring range (e.g. replaying a published table).
pub fn aggregate_pillar13(rows: &[(CountryId, [f64; 3])]) -> Result<Vec<Pillar13Row>> {
    let mut ordered: Vec<&(CountryId, [f64; 3])> = rows.iter().collect();
    ordered.sort_by(|a, b| a.0.cmp(&b.0));
    for pair in ordered.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(GaciError::DuplicateCountry {
                path: "normalized indicator rows".into(),
                country: pair[0].0.name().into(),
            });
        }
    }
    ordered
        .into_iter()
        .map(|(country, [a, o, c])| Pillar13Row::new(country.clone(), *a, *o, *c))
        .collect()
}

/// Country-level inputs to pillar 14: fitted dummy coefficients relative
/// to a base country, plus the model intercept. The base country is in
/// `effects` with coefficient zero.
#[derive(Debug, Clone)]
pub struct ClimateEffects {
    base: CountryId,
    constant: f64,
    effects: BTreeMap<CountryId, f64>,
}

impl ClimateEffects {
    /// `named` lists every non-base country with its dummy coefficient.
    pub fn new(base: CountryId, constant: f64, named: Vec<(CountryId, f64)>) -> Result<Self> {
        if !constant.is_finite() {
            return Err(GaciError::Domain(format!(
                "climate model constant {constant} is not finite"
            )));
        }
        let mut effects = BTreeMap::new();
        effects.insert(base.clone(), 0.0);
        for (country, coef) in named {
            if !coef.is_finite() {
                return Err(GaciError::Domain(format!(
                    "coefficient {coef} for {country} is not finite"
                )));
            }
            if effects.insert(country.clone(), coef).is_some() {
                return Err(GaciError::DuplicateCountry {
                    path: "climate effects".into(),
                    country: country.name().into(),
                });
            }
        }
        Ok(ClimateEffects {
            base,
            constant,
            effects,
        })
    }

    pub fn from_fit(fit: &RegressionFit) -> Result<Self> {
        let constant = fit
            .term(COL_INTERCEPT)
            .ok_or_else(|| GaciError::MissingColumn {
                path: "regression terms".into(),
                column: COL_INTERCEPT.into(),
            })?
            .coefficient;
        let named = fit
            .terms
            .iter()
            .filter(|t| !matches!(t.name.as_str(), COL_INTERCEPT | COL_TEMP | COL_PREC))
            .map(|t| Ok((CountryId::new(&t.name)?, t.coefficient)))
            .collect::<Result<Vec<_>>>()?;
        ClimateEffects::new(fit.base_country.clone(), constant, named)
    }

    pub fn base(&self) -> &CountryId {
        &self.base
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// All countries (base included) with their dummy coefficients,
    /// sorted by country.
    pub fn effects(&self) -> &BTreeMap<CountryId, f64> {
        &self.effects
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

/// Build pillar 14 from fitted climate effects. Each country's intercept
/// level (dummy + constant) is min-max normalized; the score then takes
/// the sign of the country's own coefficient (the constant's sign for
/// the base country). The alternative centering `d2 = d1 − 2·constant`
/// must normalize identically — min-max is shift invariant — and the
/// builder checks that agreement to 1e-9 as a guard on the arithmetic.
pub fn build_pillar14(
    effects: &ClimateEffects,
    spec: &NormalizationSpec,
) -> Result<Vec<Pillar14Row>> {
    if effects.len() < 2 {
        return Err(GaciError::Domain(format!(
            "pillar 14 needs at least two countries to normalize, got {}",
            effects.len()
        )));
    }
    let countries: Vec<&CountryId> = effects.effects().keys().collect();
    let coefs: Vec<f64> = effects.effects().values().copied().collect();
    let constant = effects.constant();

    let d1: Vec<f64> = coefs.iter().map(|c| c + constant).collect();
    let d2: Vec<f64> = d1.iter().map(|v| v - 2.0 * constant).collect();
    let n1 = minmax_normalize(&d1, spec).map_err(|e| match e {
        GaciError::DegenerateRange { value, .. } => GaciError::DegenerateRange {
            context: "pillar 14 intercept levels".into(),
            value,
        },
        other => other,
    })?;
    let n2 = minmax_normalize(&d2, spec)?;
    for (i, (a, b)) in n1.iter().zip(&n2).enumerate() {
        if (a - b).abs() > 1e-9 {
            return Err(GaciError::Domain(format!(
                "shift-invariance check failed for {}: {a} vs {b}",
                countries[i]
            )));
        }
    }

    countries
        .iter()
        .zip(&coefs)
        .zip(&n1)
        .map(|((country, &coef), &norm)| {
            let is_base = *country == effects.base();
            let driver = if is_base { constant } else { coef };
            let sign = if driver < 0.0 { -1.0 } else { 1.0 };
            debug_assert_eq!(apply_sign(norm, coef, constant, is_base), sign * norm);
            Pillar14Row::new((*country).clone(), coef, constant, norm, sign)
        })
        .collect()
}
