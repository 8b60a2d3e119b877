//! Scalar and vector transforms used by pillar construction: guarded
//! logarithm, min-max normalization, and sign application.
//!
//! Min-max normalization maps a vector affinely onto `[lo, hi]` via its
//! own extrema, so it is invariant under additive shifts and positive
//! scalings of the input — the property that makes the "effect + constant"
//! and "effect − constant" score columns normalize identically.

use crate::error::{GaciError, Result};
use crate::model::NormalizationSpec;

/// Natural log with an epsilon floor: values at or below `spec.epsilon`
/// are clamped to `ln(epsilon)` instead of producing −∞/NaN. Returns the
/// transformed vector and the number of clamped entries so callers can
/// surface a data-quality warning.
pub fn log_transform(values: &[f64], spec: &NormalizationSpec) -> (Vec<f64>, usize) {
    let mut clamped = 0usize;
    let floor = spec.epsilon.ln();
    let out = values
        .iter()
        .map(|&v| {
            debug_assert!(v.is_finite(), "log_transform expects finite input");
            if v <= spec.epsilon {
                clamped += 1;
                floor
            } else {
                v.ln()
            }
        })
        .collect();
    (out, clamped)
}

/// Affine map of `values` onto `[spec.lo, spec.hi]`: the minimum lands
/// exactly on `lo`, the maximum exactly on `hi`.
pub fn minmax_normalize(values: &[f64], spec: &NormalizationSpec) -> Result<Vec<f64>> {
    let Some(first) = values.first() else {
        return Err(GaciError::DegenerateRange {
            context: "empty input".into(),
            value: f64::NAN,
        });
    };
    let (mut min, mut max) = (*first, *first);
    for &v in values {
        debug_assert!(v.is_finite(), "minmax_normalize expects finite input");
        min = min.min(v);
        max = max.max(v);
    }
    if max <= min {
        return Err(GaciError::DegenerateRange {
            context: "input vector".into(),
            value: min,
        });
    }
    let span = max - min;
    let width = spec.hi - spec.lo;
    Ok(values
        .iter()
        .map(|&v| spec.lo + width * ((v - min) / span))
        .collect())
}

/// Attach the direction of an estimated effect to an unsigned score.
///
/// Non-base countries take the sign of their own effect; the base country
/// (whose effect is absorbed elsewhere) takes the sign of `base_effect`.
/// Zero is treated as positive.
pub fn apply_sign(normalized: f64, effect: f64, base_effect: f64, is_base: bool) -> f64 {
    let driver = if is_base { base_effect } else { effect };
    if driver < 0.0 {
        -normalized
    } else {
        normalized
    }
}
