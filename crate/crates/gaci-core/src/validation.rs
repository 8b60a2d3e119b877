//! Index validity checks: bivariate Pearson correlation with two-sided
//! p-values, and the pillar-vs-index item analysis built from it.

use std::collections::BTreeMap;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{GaciError, Result};
use crate::model::{CorrelationMatrix, CountryId, PillarMatrix, N_PILLARS};

/// Product-moment correlation of two equal-length series, with the
/// two-sided p-value of H₀: ρ = 0 from `t = r·√((n−2)/(1−r²))` on n−2
/// degrees of freedom. Needs at least three pairs and positive variance
/// on both sides; a perfectly collinear pair (|r| = 1) reports p = 0.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(GaciError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(GaciError::Domain(format!(
            "correlation needs at least 3 paired observations, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(GaciError::DegenerateVariance("left series".into()));
    }
    if syy == 0.0 {
        return Err(GaciError::DegenerateVariance("right series".into()));
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);

    let denom = 1.0 - r * r;
    let p = if denom <= 0.0 {
        0.0
    } else {
        let dof = (n - 2) as f64;
        let t = r * (dof / denom).sqrt();
        let dist = StudentsT::new(0.0, 1.0, dof)
            .map_err(|e| GaciError::Domain(format!("t distribution with {dof} dof: {e}")))?;
        (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
    };
    Ok((r, p))
}

/// Machine labels for the item-analysis rows/columns: `pillar1` …
/// `pillar14` followed by `gaci`.
pub fn item_labels() -> Vec<String> {
    let mut labels: Vec<String> = (1..=N_PILLARS).map(|p| format!("pillar{p}")).collect();
    labels.push("gaci".to_string());
    labels
}

/// Correlate every pillar column with every other and with the composite
/// index: a symmetric 15×15 matrix of r and p values. `gaci` must score
/// exactly the countries in the matrix; passing a freshly computed map
/// (rather than published scores) makes this an end-to-end check of the
/// aggregation. A constant column is reported by pillar name.
pub fn item_analysis(
    matrix: &PillarMatrix,
    gaci: &BTreeMap<CountryId, f64>,
) -> Result<CorrelationMatrix> {
    if matrix.len() < 3 {
        return Err(GaciError::Domain(format!(
            "item analysis needs at least 3 countries, got {}",
            matrix.len()
        )));
    }
    for country in matrix.countries() {
        if !gaci.contains_key(country) {
            return Err(GaciError::UnknownCountry {
                context: "index scores".into(),
                country: country.name().into(),
            });
        }
    }
    for country in gaci.keys() {
        if matrix.row(country).is_none() {
            return Err(GaciError::UnknownCountry {
                context: "pillar matrix".into(),
                country: country.name().into(),
            });
        }
    }

    let labels = item_labels();
    let mut columns: Vec<Vec<f64>> = (1..=N_PILLARS)
        .map(|p| matrix.pillar_column(p))
        .collect::<Result<_>>()?;
    columns.push(
        matrix
            .countries()
            .iter()
            .map(|c| gaci[c])
            .collect::<Vec<f64>>(),
    );
    for (label, col) in labels.iter().zip(&columns) {
        let first = col[0];
        if col.iter().all(|v| *v == first) {
            return Err(GaciError::DegenerateVariance(label.clone()));
        }
    }

    let m = labels.len();
    let mut r = vec![0.0; m * m];
    let mut p = vec![0.0; m * m];
    for i in 0..m {
        r[i * m + i] = 1.0;
        for j in 0..i {
            let (rij, pij) = pearson(&columns[i], &columns[j])?;
            r[i * m + j] = rij;
            r[j * m + i] = rij;
            p[i * m + j] = pij;
            p[j * m + i] = pij;
        }
    }
    CorrelationMatrix::new(labels, r, p)
}

/// One lower-triangle cell of the item-analysis matrix in long form,
/// ready for tabular output. `starred` marks p < 0.05.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCell {
    pub row_var: String,
    pub col_var: String,
    pub r: f64,
    pub p: f64,
    pub starred: bool,
}

/// Flatten the strict lower triangle (row index > column index) in
/// row-major order — 105 cells for the 15-label matrix.
pub fn long_form(matrix: &CorrelationMatrix) -> Vec<CorrelationCell> {
    let labels = matrix.labels();
    let mut cells = Vec::with_capacity(labels.len() * (labels.len() - 1) / 2);
    for i in 1..labels.len() {
        for j in 0..i {
            let p = matrix.p(i, j);
            cells.push(CorrelationCell {
                row_var: labels[i].clone(),
                col_var: labels[j].clone(),
                r: matrix.r(i, j),
                p,
                starred: p < 0.05,
            });
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PillarMatrix;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identical_series_correlate_perfectly() {
        let x = [1.0, 2.0, 3.0, 5.0];
        let (r, p) = pearson(&x, &x).unwrap();
        assert_eq!(r, 1.0);
        assert_eq!(p, 0.0);
    }

    #[test]
    fn negated_series_correlate_at_minus_one() {
        let x = [1.0, 2.0, 3.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        let (r, p) = pearson(&x, &y).unwrap();
        assert_eq!(r, -1.0);
        assert_eq!(p, 0.0);
    }

    #[test]
    fn hand_computed_case_gives_exact_r_and_p() {
        // Σdxdy = 4, Σdx² = Σdy² = 5 ⇒ r = 0.8; with n = 4 the closed-form
        // 2-dof t CDF gives p = 0.2 exactly.
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.0, 3.0, 2.0, 4.0];
        let (r, p) = pearson(&x, &y).unwrap();
        assert_abs_diff_eq!(r, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(p, 0.2, epsilon = 1e-10);
    }

    #[test]
    fn affine_transforms_preserve_r() {
        let x = [1.0, 2.0, 4.0, 7.0, 11.0];
        let y = [2.0, 1.0, 5.0, 6.0, 13.0];
        let (r0, p0) = pearson(&x, &y).unwrap();
        let scaled: Vec<f64> = y.iter().map(|v| 3.5 * v + 17.0).collect();
        let (r1, p1) = pearson(&x, &scaled).unwrap();
        assert_abs_diff_eq!(r0, r1, epsilon = 1e-12);
        assert_abs_diff_eq!(p0, p1, epsilon = 1e-12);
        let flipped: Vec<f64> = y.iter().map(|v| -2.0 * v).collect();
        let (r2, _) = pearson(&x, &flipped).unwrap();
        assert_abs_diff_eq!(r2, -r0, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            GaciError::LengthMismatch { .. }
        ));
        assert!(pearson(&[1.0, 2.0], &[3.0, 4.0]).is_err());
        assert!(matches!(
            pearson(&[5.0, 5.0, 5.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            GaciError::DegenerateVariance(_)
        ));
    }

    fn tiny_matrix() -> PillarMatrix {
        let countries = ["Alpha", "Beta", "Gamma", "Delta"]
            .iter()
            .map(|n| CountryId::new(n).unwrap())
            .collect();
        // linearly varied rows so no column is constant
        let values = (0..4)
            .map(|i| std::array::from_fn(|p| 10.0 + 5.0 * i as f64 + ((i * (p + 1)) % 7) as f64))
            .collect();
        PillarMatrix::new(countries, values).unwrap()
    }

    #[test]
    fn item_analysis_is_symmetric_with_unit_diagonal() {
        let matrix = tiny_matrix();
        let gaci = crate::index_engine::compute_gaci(&matrix);
        let out = item_analysis(&matrix, &gaci).unwrap();
        assert_eq!(out.len(), N_PILLARS + 1);
        for i in 0..out.len() {
            assert_eq!(out.r(i, i), 1.0);
            for j in 0..out.len() {
                assert_eq!(out.r(i, j), out.r(j, i));
                assert_eq!(out.p(i, j), out.p(j, i));
            }
        }
        assert_eq!(out.labels()[0], "pillar1");
        assert_eq!(out.labels()[N_PILLARS], "gaci");
    }

    #[test]
    fn constant_pillar_is_named() {
        let countries: Vec<CountryId> = ["Alpha", "Beta", "Gamma"]
            .iter()
            .map(|n| CountryId::new(n).unwrap())
            .collect();
        let values: Vec<[f64; N_PILLARS]> = (0..3)
            .map(|i| {
                std::array::from_fn(|p| {
                    if p == 6 {
                        42.0 // pillar 7 constant
                    } else {
                        10.0 + 5.0 * i as f64 + ((i * (p + 1)) % 5) as f64
                    }
                })
            })
            .collect();
        let matrix = PillarMatrix::new(countries, values).unwrap();
        let gaci = crate::index_engine::compute_gaci(&matrix);
        match item_analysis(&matrix, &gaci).unwrap_err() {
            GaciError::DegenerateVariance(label) => assert_eq!(label, "pillar7"),
            other => panic!("expected DegenerateVariance, got {other}"),
        }
    }

    #[test]
    fn mismatched_country_sets_are_rejected() {
        let matrix = tiny_matrix();
        let mut gaci = crate::index_engine::compute_gaci(&matrix);
        gaci.remove(&CountryId::new("Alpha").unwrap());
        assert!(matches!(
            item_analysis(&matrix, &gaci).unwrap_err(),
            GaciError::UnknownCountry { .. }
        ));
    }

    #[test]
    fn long_form_walks_the_lower_triangle() {
        let matrix = tiny_matrix();
        let gaci = crate::index_engine::compute_gaci(&matrix);
        let out = item_analysis(&matrix, &gaci).unwrap();
        let cells = long_form(&out);
        assert_eq!(cells.len(), 105);
        assert_eq!(cells[0].row_var, "pillar2");
        assert_eq!(cells[0].col_var, "pillar1");
        let last = cells.last().unwrap();
        assert_eq!(last.row_var, "gaci");
        assert_eq!(last.col_var, "pillar14");
    }
}
