//! Shared test support: fixture paths, a double-double (~31 significant
//! digit) reference implementation of least squares and the sandwich
//! covariance, and a seeded synthetic-panel generator.
//!
//! The reference solver deliberately uses a *different* algorithm from
//! the production code (normal equations + Gauss-Jordan in compensated
//! arithmetic vs. Householder QR in f64) so agreement between the two is
//! meaningful evidence rather than the same bits twice.

#![allow(dead_code)] // shared by several test binaries; not all use everything
#![allow(clippy::needless_range_loop)] // index loops mirror the matrix algebra

use std::collections::BTreeMap;
use std::path::PathBuf;

use gaci_core::econometrics::DesignMatrix;
use gaci_core::model::{CountryId, PanelObservation};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// Raw view of a fixture file for golden-value comparisons: a map from
/// header name to column index, plus all data records. Tests that check
/// published numbers read the file themselves instead of going through
/// the production loaders, so a loader bug cannot hide a value bug.
pub struct FixtureTable {
    pub columns: BTreeMap<String, usize>,
    pub rows: Vec<csv::StringRecord>,
}

impl FixtureTable {
    pub fn cell(&self, row: &csv::StringRecord, column: &str) -> String {
        let idx = *self
            .columns
            .get(column)
            .unwrap_or_else(|| panic!("fixture lacks column `{column}`"));
        row.get(idx).unwrap_or("").trim().to_owned()
    }

    pub fn number(&self, row: &csv::StringRecord, column: &str) -> f64 {
        let text = self.cell(row, column);
        text.parse()
            .unwrap_or_else(|_| panic!("fixture cell `{column}` is not numeric: {text:?}"))
    }
}

pub fn read_fixture(name: &str) -> FixtureTable {
    let path = fixture_path(name);
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(&path)
        .unwrap_or_else(|e| panic!("cannot open fixture {}: {e}", path.display()));
    let columns = reader
        .headers()
        .expect("fixture header")
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim().to_owned(), i))
        .collect();
    let rows = reader
        .records()
        .collect::<Result<Vec<_>, _>>()
        .expect("fixture rows");
    FixtureTable { columns, rows }
}

// ---------------------------------------------------------------------
// double-double arithmetic (Dekker/Knuth error-free transformations)
// ---------------------------------------------------------------------

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Assumes `|a| ≥ |b|`.
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

/// Exact product via fused multiply-add.
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(r.hi, r.lo + t.lo)
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from_f64(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from_f64(q2)));
        let q3 = r.hi / o.hi;
        quick_two_sum(q1, q2).add(Dd::from_f64(q3))
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            self.neg()
        } else {
            self
        }
    }
}

/// Σᵢ a[i]·b[i] accumulated in double-double.
pub fn dd_dot(a: &[f64], b: &[f64]) -> Dd {
    let mut acc = Dd::ZERO;
    for (x, y) in a.iter().zip(b) {
        acc = acc.add(two_prod(*x, *y));
    }
    acc
}

/// Solve the dense system `a · x = rhs` by Gauss-Jordan elimination with
/// partial pivoting, entirely in double-double. `rhs` holds one or more
/// right-hand sides (columns). Returns the solutions in the same layout.
fn dd_gauss_jordan(mut a: Vec<Vec<Dd>>, mut rhs: Vec<Vec<Dd>>) -> Vec<Vec<Dd>> {
    let k = a.len();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&r, &s| a[r][col].abs().hi.total_cmp(&a[s][col].abs().hi))
            .expect("non-empty pivot range");
        assert!(
            a[pivot][col].hi != 0.0,
            "reference solver hit a singular matrix"
        );
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..k {
            if r == col {
                continue;
            }
            let f = a[r][col].div(a[col][col]);
            for c in col..k {
                let delta = f.mul(a[col][c]);
                a[r][c] = a[r][c].sub(delta);
            }
            for c in 0..rhs[r].len() {
                let delta = f.mul(rhs[col][c]);
                rhs[r][c] = rhs[r][c].sub(delta);
            }
        }
    }
    for r in 0..k {
        let d = a[r][r];
        for c in 0..rhs[r].len() {
            rhs[r][c] = rhs[r][c].div(d);
        }
    }
    rhs
}

fn dd_xtx(design: &DesignMatrix) -> Vec<Vec<Dd>> {
    let k = design.n_cols();
    let n = design.n_obs();
    let mut xtx = vec![vec![Dd::ZERO; k]; k];
    for a in 0..k {
        for b in a..k {
            let mut acc = Dd::ZERO;
            for i in 0..n {
                acc = acc.add(two_prod(design.value(i, a), design.value(i, b)));
            }
            xtx[a][b] = acc;
            xtx[b][a] = acc;
        }
    }
    xtx
}

/// Reference least-squares coefficients via double-double normal
/// equations.
pub fn oracle_ols(design: &DesignMatrix) -> Vec<f64> {
    let k = design.n_cols();
    let n = design.n_obs();
    let xtx = dd_xtx(design);
    let mut xty = vec![vec![Dd::ZERO]; k];
    for (a, slot) in xty.iter_mut().enumerate() {
        let mut acc = Dd::ZERO;
        for i in 0..n {
            acc = acc.add(two_prod(design.value(i, a), design.response[i]));
        }
        slot[0] = acc;
    }
    dd_gauss_jordan(xtx, xty)
        .into_iter()
        .map(|row| row[0].to_f64())
        .collect()
}

/// Reference HC1 sandwich covariance via the direct product
/// `n/(n−k) · (XᵀX)⁻¹ (Σ eᵢ² xᵢxᵢᵀ) (XᵀX)⁻¹` in double-double.
pub fn oracle_hc1(design: &DesignMatrix, residuals: &[f64]) -> Vec<f64> {
    let k = design.n_cols();
    let n = design.n_obs();
    assert_eq!(residuals.len(), n);

    let xtx = dd_xtx(design);
    let identity: Vec<Vec<Dd>> = (0..k)
        .map(|r| {
            (0..k)
                .map(|c| Dd::from_f64(if r == c { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect();
    let bread = dd_gauss_jordan(xtx, identity);

    let mut meat = vec![vec![Dd::ZERO; k]; k];
    for (i, e) in residuals.iter().enumerate() {
        let e2 = two_prod(*e, *e);
        for a in 0..k {
            let xa = design.value(i, a);
            if xa == 0.0 {
                continue;
            }
            for b in a..k {
                let xab = two_prod(xa, design.value(i, b));
                let term = xab.mul(e2);
                meat[a][b] = meat[a][b].add(term);
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            meat[a][b] = meat[b][a];
        }
    }

    let mul = |x: &Vec<Vec<Dd>>, y: &Vec<Vec<Dd>>| -> Vec<Vec<Dd>> {
        let mut out = vec![vec![Dd::ZERO; k]; k];
        for r in 0..k {
            for c in 0..k {
                let mut acc = Dd::ZERO;
                for l in 0..k {
                    acc = acc.add(x[r][l].mul(y[l][c]));
                }
                out[r][c] = acc;
            }
        }
        out
    };
    let sandwich = mul(&mul(&bread, &meat), &bread);
    let scale = Dd::from_f64(n as f64).div(Dd::from_f64((n - k) as f64));
    sandwich
        .into_iter()
        .flat_map(|row| row.into_iter().map(|v| v.mul(scale).to_f64()))
        .collect()
}

// ---------------------------------------------------------------------
// synthetic panels
// ---------------------------------------------------------------------

/// A generated panel plus the coefficients that produced it. Country 00
/// is alphabetically first, so with the default base choice the fitted
/// dummy coefficients equal `effects` directly (effects[0] = 0).
pub struct SyntheticPanel {
    pub panel: Vec<PanelObservation>,
    pub intercept: f64,
    pub beta_temp: f64,
    pub beta_prec: f64,
    pub effects: BTreeMap<String, f64>,
    pub noise_sd: f64,
}

/// Deterministic panel draw: `n_countries` × `n_years`, AgTFP generated
/// as `intercept + βt·temp + βp·prec + country effect + noise` with
/// bounded noise (Irwin-Hall 12, sd = `noise_sd`), guaranteed positive.
pub fn synthetic_panel(
    seed: u64,
    n_countries: usize,
    n_years: usize,
    noise_sd: f64,
) -> SyntheticPanel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let intercept = rng.gen_range(50.0..150.0);
    let beta_temp = rng.gen_range(0.1..2.0);
    let beta_prec = rng.gen_range(1e-3..1e-2);
    let mut effects = BTreeMap::new();
    let mut panel = Vec::with_capacity(n_countries * n_years);
    for c in 0..n_countries {
        let name = format!("Country {c:02}");
        let effect = if c == 0 {
            0.0
        } else {
            rng.gen_range(-20.0..20.0)
        };
        effects.insert(name.clone(), effect);
        let country = CountryId::new(&name).expect("generated name is valid");
        for y in 0..n_years {
            let temp = rng.gen_range(0.0..30.0);
            let prec = rng.gen_range(200.0..2000.0);
            // Irwin-Hall(12) − 6 has mean 0 and unit variance, support ±6
            let noise: f64 = if noise_sd == 0.0 {
                0.0
            } else {
                let s: f64 = (0..12).map(|_| rng.gen_range(0.0..1.0)).sum();
                (s - 6.0) * noise_sd
            };
            let agtfp = intercept + beta_temp * temp + beta_prec * prec + effect + noise;
            assert!(agtfp > 0.0, "generator parameters keep AgTFP positive");
            panel.push(
                PanelObservation::new(country.clone(), 1990 + y as i32, agtfp, temp, prec)
                    .expect("generated observation is valid"),
            );
        }
    }
    SyntheticPanel {
        panel,
        intercept,
        beta_temp,
        beta_prec,
        effects,
        noise_sd,
    }
}

/// Largest absolute difference between two equal-length slices.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod dd_sanity {
    use super::*;

    #[test]
    fn dd_tracks_cancellation_that_f64_loses() {
        // (1e16 + 1) − 1e16 = 1 exactly in double-double
        let big = Dd::from_f64(1e16);
        let one = Dd::from_f64(1.0);
        let diff = big.add(one).sub(big);
        assert_eq!(diff.to_f64(), 1.0);
    }

    #[test]
    fn dd_division_round_trips() {
        let a = Dd::from_f64(std::f64::consts::PI);
        let b = Dd::from_f64(std::f64::consts::E);
        let q = a.div(b).mul(b);
        assert!((q.to_f64() - std::f64::consts::PI).abs() < 1e-30);
        assert!(q.sub(a).abs().hi < 1e-30);
    }
}
