//! Least squares with country-dummy encoding and heteroskedasticity-robust
//! inference.
//!
//! The solver is Householder QR with column pivoting (Businger & Golub
//! 1965). Pivoting surfaces rank deficiency by column name — with an
//! 80-column dummy block a collinearity bug should point at the offending
//! regressor, not smear a near-singular normal-equations solve across all
//! coefficients. Robust covariance follows White (1980); the HC1
//! small-sample scaling and the HC3 leverage weights are the variants of
//! MacKinnon & White (1985). The moment inverse (XᵀX)⁻¹ is formed from the
//! triangular factor (R⁻¹R⁻ᵀ), which squares the attainable accuracy
//! compared to inverting XᵀX directly.

use std::collections::BTreeMap;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{GaciError, Result};
use crate::model::{CountryId, PanelObservation};

/// Design column name for the intercept.
pub const COL_INTERCEPT: &str = "const";
/// Design column name for annual mean temperature.
pub const COL_TEMP: &str = "temp_c";
/// Design column name for annual precipitation.
pub const COL_PREC: &str = "prec_mm";

/// Relative rank tolerance: a pivot below `RANK_TOL · max column norm`
/// marks the design as rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Row-major regression design: `n` rows × `k` named columns plus the
/// response vector.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub names: Vec<String>,
    data: Vec<f64>,
    n: usize,
    k: usize,
    pub response: Vec<f64>,
}

impl DesignMatrix {
    pub fn new(names: Vec<String>, data: Vec<f64>, response: Vec<f64>) -> Result<Self> {
        let k = names.len();
        let n = response.len();
        if k == 0 || n == 0 || data.len() != n * k {
            return Err(GaciError::Domain(format!(
                "design shape mismatch: {} cells for {n} rows × {k} columns",
                data.len()
            )));
        }
        Ok(DesignMatrix {
            names,
            data,
            n,
            k,
            response,
        })
    }

    pub fn n_obs(&self) -> usize {
        self.n
    }

    pub fn n_cols(&self) -> usize {
        self.k
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.k + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.k..(row + 1) * self.k]
    }

    fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.data[i * self.k + col]).collect()
    }
}

/// Encode a panel into `[1, temp, prec, country dummies]` with the base
/// country's dummy omitted. Dummy columns are ordered alphabetically by
/// country key; row order follows the panel.
pub fn encode_design(panel: &[PanelObservation], base_country: &CountryId) -> Result<DesignMatrix> {
    if panel.is_empty() {
        return Err(GaciError::Domain("panel is empty".into()));
    }
    let mut countries: BTreeMap<&CountryId, usize> = BTreeMap::new();
    for obs in panel {
        let next = countries.len();
        countries.entry(&obs.country).or_insert(next);
    }
    if !countries.contains_key(base_country) {
        return Err(GaciError::UnknownBaseCountry(base_country.name().into()));
    }
    let dummies: Vec<&CountryId> = countries
        .keys()
        .copied()
        .filter(|c| *c != base_country)
        .collect();
    let dummy_pos: BTreeMap<&CountryId, usize> =
        dummies.iter().enumerate().map(|(i, c)| (*c, i)).collect();

    let k = 3 + dummies.len();
    let mut names = Vec::with_capacity(k);
    names.push(COL_INTERCEPT.to_string());
    names.push(COL_TEMP.to_string());
    names.push(COL_PREC.to_string());
    names.extend(dummies.iter().map(|c| c.name().to_string()));

    let mut data = vec![0.0; panel.len() * k];
    let mut response = Vec::with_capacity(panel.len());
    for (i, obs) in panel.iter().enumerate() {
        let row = &mut data[i * k..(i + 1) * k];
        row[0] = 1.0;
        row[1] = obs.temp_c;
        row[2] = obs.prec_mm;
        if let Some(&d) = dummy_pos.get(&obs.country) {
            row[3 + d] = 1.0;
        }
        response.push(obs.agtfp);
    }
    DesignMatrix::new(names, data, response)
}

/// Coefficients and residuals of a least-squares fit.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub n_obs: usize,
    pub n_cols: usize,
}

/// In-place pivoted Householder QR over column-major `cols`. On success
/// the upper triangle holds R (column `c`, rows `0..=c`) and `perm[j]`
/// is the original index of factored column `j`. `extra`, when given, is
/// transformed alongside (yielding Qᵀ·extra). Remaining column norms are
/// recomputed exactly at every step — an O(k²n) cost that buys immunity
/// to the cancellation that plagues norm downdating.
fn pivoted_qr(
    cols: &mut [Vec<f64>],
    names: &[String],
    mut extra: Option<&mut Vec<f64>>,
) -> Result<Vec<usize>> {
    let k = cols.len();
    let xnorm = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let tol = RANK_TOL * xnorm;
    let mut perm: Vec<usize> = (0..k).collect();

    for j in 0..k {
        let mut pivot = j;
        let mut pivot_norm = -1.0;
        for (c, col) in cols.iter().enumerate().skip(j) {
            let norm = col[j..].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > pivot_norm {
                pivot = c;
                pivot_norm = norm;
            }
        }
        if pivot_norm <= tol {
            return Err(GaciError::RankDeficient {
                column: names[perm[pivot]].clone(),
                pivot: pivot_norm,
                tolerance: tol,
            });
        }
        cols.swap(j, pivot);
        perm.swap(j, pivot);

        let mut v = cols[j][j..].to_vec();
        let alpha = if v[0] >= 0.0 { -pivot_norm } else { pivot_norm };
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 > 0.0 {
            for col in cols.iter_mut().skip(j + 1) {
                let tau = 2.0 * dot(&v, &col[j..]) / vnorm2;
                for (t, vi) in col[j..].iter_mut().zip(&v) {
                    *t -= tau * vi;
                }
            }
            if let Some(y) = extra.as_deref_mut() {
                let tau = 2.0 * dot(&v, &y[j..]) / vnorm2;
                for (t, vi) in y[j..].iter_mut().zip(&v) {
                    *t -= tau * vi;
                }
            }
        }
        cols[j][j] = alpha;
        for t in cols[j][j + 1..].iter_mut() {
            *t = 0.0;
        }
    }
    Ok(perm)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimize ‖y − Xβ‖² via pivoted QR. Requires `n_obs > n_cols` and full
/// column rank; rank failures name the dependent column.
pub fn ols_fit(design: &DesignMatrix) -> Result<OlsFit> {
    let (n, k) = (design.n, design.k);
    if n <= k {
        return Err(GaciError::TooFewObservations { n_obs: n, k });
    }
    let mut cols: Vec<Vec<f64>> = (0..k).map(|c| design.column(c)).collect();
    let mut qty = design.response.clone();
    let perm = pivoted_qr(&mut cols, &design.names, Some(&mut qty))?;

    // back-substitution on R, then undo the permutation
    let mut z = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = qty[i];
        for c in (i + 1)..k {
            s -= cols[c][i] * z[c];
        }
        z[i] = s / cols[i][i];
    }
    let mut coefficients = vec![0.0; k];
    for (j, &p) in perm.iter().enumerate() {
        coefficients[p] = z[j];
    }

    let fitted: Vec<f64> = (0..n).map(|i| dot(design.row(i), &coefficients)).collect();
    let residuals: Vec<f64> = design
        .response
        .iter()
        .zip(&fitted)
        .map(|(y, f)| y - f)
        .collect();
    Ok(OlsFit {
        names: design.names.clone(),
        coefficients,
        fitted,
        residuals,
        n_obs: n,
        n_cols: k,
    })
}

/// Heteroskedasticity-consistent covariance variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HcType {
    /// White's original estimator, no small-sample adjustment.
    Hc0,
    /// HC0 scaled by n/(n−k).
    #[default]
    Hc1,
    /// Squared-leverage weights 1/(1−hᵢᵢ)².
    Hc3,
}

impl std::str::FromStr for HcType {
    type Err = GaciError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hc0" => Ok(HcType::Hc0),
            "hc1" => Ok(HcType::Hc1),
            "hc3" => Ok(HcType::Hc3),
            other => Err(GaciError::Config(format!(
                "unknown robust variant `{other}` (expected hc0, hc1, or hc3)"
            ))),
        }
    }
}

/// Sandwich covariance (XᵀX)⁻¹ · Σᵢ wᵢ eᵢ² xᵢxᵢᵀ · (XᵀX)⁻¹, returned as a
/// row-major k×k matrix. `Hc1` multiplies by n/(n−k); `Hc3` sets
/// wᵢ = 1/(1−hᵢᵢ)².
pub fn robust_covariance(
    design: &DesignMatrix,
    residuals: &[f64],
    variant: HcType,
) -> Result<Vec<f64>> {
    let (n, k) = (design.n, design.k);
    if residuals.len() != n {
        return Err(GaciError::LengthMismatch {
            left: residuals.len(),
            right: n,
        });
    }

    // (XᵀX)⁻¹ = P·R⁻¹R⁻ᵀ·Pᵀ from the pivoted factor X·P = Q·R.
    let mut cols: Vec<Vec<f64>> = (0..k).map(|c| design.column(c)).collect();
    let perm = pivoted_qr(&mut cols, &design.names, None).map_err(|e| match e {
        GaciError::RankDeficient { .. } => GaciError::SingularMoment,
        other => other,
    })?;
    // W = R⁻¹ (upper triangular), solved column by column.
    let mut w = vec![0.0; k * k];
    for c in 0..k {
        let mut col = vec![0.0; k];
        col[c] = 1.0;
        for i in (0..=c).rev() {
            let mut s = col[i];
            for j in (i + 1)..=c {
                s -= cols[j][i] * col[j];
            }
            col[i] = s / cols[i][i];
        }
        for i in 0..k {
            w[i * k + c] = col[i];
        }
    }
    let mut xtx_inv = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let mut s = 0.0;
            for l in a.max(b)..k {
                s += w[a * k + l] * w[b * k + l];
            }
            xtx_inv[perm[a] * k + perm[b]] = s;
            xtx_inv[perm[b] * k + perm[a]] = s;
        }
    }

    // meat Σ wᵢ eᵢ² xᵢxᵢᵀ
    let mut meat = vec![0.0; k * k];
    for (i, e) in residuals.iter().enumerate() {
        let x = design.row(i);
        let weight = match variant {
            HcType::Hc0 | HcType::Hc1 => 1.0,
            HcType::Hc3 => {
                let mut h = 0.0;
                for a in 0..k {
                    let mut s = 0.0;
                    for b in 0..k {
                        s += xtx_inv[a * k + b] * x[b];
                    }
                    h += x[a] * s;
                }
                let d = 1.0 - h;
                if d <= 0.0 {
                    return Err(GaciError::SingularMoment);
                }
                1.0 / (d * d)
            }
        };
        let we2 = weight * e * e;
        if we2 == 0.0 {
            continue;
        }
        for a in 0..k {
            let xa = x[a] * we2;
            if xa == 0.0 {
                continue;
            }
            for b in a..k {
                meat[a * k + b] += xa * x[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            meat[a * k + b] = meat[b * k + a];
        }
    }

    // bread · meat · bread
    let mut tmp = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            let mut s = 0.0;
            for l in 0..k {
                s += xtx_inv[a * k + l] * meat[l * k + b];
            }
            tmp[a * k + b] = s;
        }
    }
    let scale = match variant {
        HcType::Hc1 => n as f64 / (n - k) as f64,
        _ => 1.0,
    };
    let mut cov = vec![0.0; k * k];
    for a in 0..k {
        for b in 0..k {
            let mut s = 0.0;
            for l in 0..k {
                s += tmp[a * k + l] * xtx_inv[l * k + b];
            }
            cov[a * k + b] = scale * s;
        }
    }
    Ok(cov)
}

/// Per-term test statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct TermInference {
    pub name: String,
    pub robust_se: f64,
    pub t_value: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub stars: &'static str,
}

/// Significance stars at the 1% / 5% / 10% thresholds.
pub fn stars(p_value: f64) -> &'static str {
    if p_value < 0.01 {
        "***"
    } else if p_value < 0.05 {
        "**"
    } else if p_value < 0.1 {
        "*"
    } else {
        ""
    }
}

/// t statistics, two-sided p-values (Student t, n−k dof), and
/// `1−alpha` confidence intervals from a coefficient vector and its
/// covariance.
pub fn inference(
    names: &[String],
    coefficients: &[f64],
    covariance: &[f64],
    n_obs: usize,
    alpha: f64,
) -> Result<Vec<TermInference>> {
    let k = names.len();
    if coefficients.len() != k || covariance.len() != k * k {
        return Err(GaciError::LengthMismatch {
            left: coefficients.len(),
            right: k,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(GaciError::Config(format!("alpha {alpha} outside (0, 1)")));
    }
    if n_obs <= k {
        return Err(GaciError::TooFewObservations { n_obs, k });
    }
    let dof = (n_obs - k) as f64;
    let t_dist = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| GaciError::Domain(format!("t distribution with {dof} dof: {e}")))?;
    let t_crit = t_dist.inverse_cdf(1.0 - alpha / 2.0);

    names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let se = covariance[i * k + i].max(0.0).sqrt();
            if se == 0.0 {
                return Err(GaciError::ZeroStandardError(name.clone()));
            }
            let coef = coefficients[i];
            let t_value = coef / se;
            let p_value = (2.0 * (1.0 - t_dist.cdf(t_value.abs()))).clamp(0.0, 1.0);
            Ok(TermInference {
                name: name.clone(),
                robust_se: se,
                t_value,
                p_value,
                ci_low: coef - t_crit * se,
                ci_high: coef + t_crit * se,
                stars: stars(p_value),
            })
        })
        .collect()
}

/// Overall / within / between R² diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelR2 {
    /// Squared correlation of fitted vs actual over all rows.
    pub overall: f64,
    /// Squared correlation of country-demeaned fitted vs actual.
    pub within: f64,
    /// Squared correlation of per-country means of fitted vs actual.
    pub between: f64,
}

/// Squared correlation where `b` is the reference series: zero variance
/// in `b` is an error, zero variance in `a` (a fit with no variation in
/// that dimension) yields 0 by convention.
fn sq_corr(a: &[f64], b: &[f64], label: &str) -> Result<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        saa += dx * dx;
        sbb += dy * dy;
        sab += dx * dy;
    }
    if sbb == 0.0 {
        return Err(GaciError::DegenerateVariance(label.to_string()));
    }
    if saa == 0.0 {
        return Ok(0.0);
    }
    Ok((sab * sab / (saa * sbb)).min(1.0))
}

/// R² diagnostics in the three panel senses. `fit` must come from a design
/// encoded over `panel` (same row order).
pub fn panel_r2(fit: &OlsFit, panel: &[PanelObservation]) -> Result<PanelR2> {
    if fit.fitted.len() != panel.len() {
        return Err(GaciError::LengthMismatch {
            left: fit.fitted.len(),
            right: panel.len(),
        });
    }
    let actual: Vec<f64> = panel.iter().map(|o| o.agtfp).collect();
    let overall = sq_corr(&fit.fitted, &actual, "response")?;

    let mut groups: BTreeMap<&str, (f64, f64, usize)> = BTreeMap::new();
    for (obs, f) in panel.iter().zip(&fit.fitted) {
        let g = groups.entry(obs.country.key()).or_insert((0.0, 0.0, 0));
        g.0 += f;
        g.1 += obs.agtfp;
        g.2 += 1;
    }
    let mean_f: Vec<f64> = groups.values().map(|(f, _, c)| f / *c as f64).collect();
    let mean_a: Vec<f64> = groups.values().map(|(_, a, c)| a / *c as f64).collect();
    let between = if mean_f.len() < 2 {
        return Err(GaciError::DegenerateVariance("country means".into()));
    } else {
        sq_corr(&mean_f, &mean_a, "country means of the response")?
    };

    let mut demeaned_f = Vec::with_capacity(panel.len());
    let mut demeaned_a = Vec::with_capacity(panel.len());
    for (obs, f) in panel.iter().zip(&fit.fitted) {
        let (sf, sa, c) = groups[obs.country.key()];
        demeaned_f.push(f - sf / c as f64);
        demeaned_a.push(obs.agtfp - sa / c as f64);
    }
    let within = sq_corr(&demeaned_f, &demeaned_a, "within-country response")?;

    Ok(PanelR2 {
        overall,
        within,
        between,
    })
}

/// One fully-inferred regression term.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionTerm {
    pub name: String,
    pub coefficient: f64,
    pub robust_se: f64,
    pub t_value: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub stars: &'static str,
}

/// Complete climate-model fit: coefficients with robust inference, panel
/// R² diagnostics, and response summary statistics.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub terms: Vec<RegressionTerm>,
    pub base_country: CountryId,
    pub n_obs: usize,
    pub n_cols: usize,
    pub r2: PanelR2,
    pub mean_dep: f64,
    pub sd_dep: f64,
    pub variant: HcType,
    pub alpha: f64,
}

impl RegressionFit {
    pub fn term(&self, name: &str) -> Option<&RegressionTerm> {
        self.terms.iter().find(|t| t.name == name)
    }

    /// Terms in report order: temperature, precipitation, country dummies,
    /// intercept last.
    pub fn display_terms(&self) -> Vec<&RegressionTerm> {
        let mut out: Vec<&RegressionTerm> = Vec::with_capacity(self.terms.len());
        for special in [COL_TEMP, COL_PREC] {
            out.extend(self.terms.iter().filter(|t| t.name == special));
        }
        out.extend(
            self.terms
                .iter()
                .filter(|t| !matches!(t.name.as_str(), COL_TEMP | COL_PREC | COL_INTERCEPT)),
        );
        out.extend(self.terms.iter().filter(|t| t.name == COL_INTERCEPT));
        out
    }
}

/// Fit the climate model `agtfp = β0 + β1·temp + β2·prec + country effects`
/// end to end: encode, solve, robust covariance, inference, panel R².
/// The base country defaults to the alphabetically first in the panel.
pub fn fit_climate_model(
    panel: &[PanelObservation],
    base_country: Option<&CountryId>,
    variant: HcType,
    alpha: f64,
) -> Result<RegressionFit> {
    if panel.is_empty() {
        return Err(GaciError::Domain("panel is empty".into()));
    }
    let default_base = panel.iter().map(|o| &o.country).min().cloned();
    let base = base_country
        .cloned()
        .or(default_base)
        .expect("non-empty panel has a minimum country");

    let design = encode_design(panel, &base)?;
    let fit = ols_fit(&design)?;
    let cov = robust_covariance(&design, &fit.residuals, variant)?;
    let stats = inference(&fit.names, &fit.coefficients, &cov, fit.n_obs, alpha)?;
    let r2 = panel_r2(&fit, panel)?;

    let n = fit.n_obs as f64;
    let mean_dep = design.response.iter().sum::<f64>() / n;
    let sd_dep = (design
        .response
        .iter()
        .map(|y| (y - mean_dep).powi(2))
        .sum::<f64>()
        / (n - 1.0))
        .sqrt();

    let terms = fit
        .coefficients
        .iter()
        .zip(&stats)
        .map(|(&coefficient, s)| RegressionTerm {
            name: s.name.clone(),
            coefficient,
            robust_se: s.robust_se,
            t_value: s.t_value,
            p_value: s.p_value,
            ci_low: s.ci_low,
            ci_high: s.ci_high,
            stars: s.stars,
        })
        .collect();

    Ok(RegressionFit {
        terms,
        base_country: base,
        n_obs: fit.n_obs,
        n_cols: fit.n_cols,
        r2,
        mean_dep,
        sd_dep,
        variant,
        alpha,
    })
}
