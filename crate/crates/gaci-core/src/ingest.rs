//! CSV input parsing with schema validation, and CSV report writing.
//!
//! Dialect is fixed for reproducible outputs: comma delimiter, `.`
//! decimal point, UTF-8, first row is a header, `\n` line endings,
//! quoting only where needed. Loaders address columns by header name, so
//! extra columns (notes, precomputed references) are ignored; every
//! parse failure reports file, row, and column.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{GaciError, Result};
use crate::model::{
    CountryId, Development, IndicatorRecord, PanelObservation, PillarMatrix, RegionMap, N_PILLARS,
};
use crate::pillars::ClimateEffects;

/// Everything a full pipeline run can consume, loaded from one fixture
/// directory. Only the pillar matrix is mandatory; the optional parts
/// must reference matrix countries only.
#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub pillar_matrix: PillarMatrix,
    pub indicator_table: Option<Vec<IndicatorRecord>>,
    pub panel: Option<Vec<PanelObservation>>,
    pub gci_scores: Option<BTreeMap<CountryId, f64>>,
    pub regions: Option<RegionMap>,
    pub development: Option<BTreeMap<CountryId, Development>>,
}

impl DatasetBundle {
    /// Assemble and check cross-references: GCI scores, region labels,
    /// and development tags may only name countries present in the
    /// pillar matrix.
    pub fn new(
        pillar_matrix: PillarMatrix,
        indicator_table: Option<Vec<IndicatorRecord>>,
        panel: Option<Vec<PanelObservation>>,
        gci_scores: Option<BTreeMap<CountryId, f64>>,
        regions: Option<RegionMap>,
        development: Option<BTreeMap<CountryId, Development>>,
    ) -> Result<Self> {
        let check = |country: &CountryId, context: &str| -> Result<()> {
            if pillar_matrix.row(country).is_none() {
                return Err(GaciError::UnknownCountry {
                    context: context.into(),
                    country: country.name().into(),
                });
            }
            Ok(())
        };
        if let Some(gci) = &gci_scores {
            for country in gci.keys() {
                check(country, "comparison scores")?;
            }
        }
        if let Some(regions) = &regions {
            for (country, _) in regions.iter() {
                check(country, "region map")?;
            }
        }
        if let Some(tags) = &development {
            for country in tags.keys() {
                check(country, "development tags")?;
            }
        }
        Ok(DatasetBundle {
            pillar_matrix,
            indicator_table,
            panel,
            gci_scores,
            regions,
            development,
        })
    }
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

fn map_csv(path: &Path, err: csv::Error) -> GaciError {
    if err.is_io_error() {
        if let csv::ErrorKind::Io(io) = err.into_kind() {
            return GaciError::Io {
                path: path_str(path),
                source: io,
            };
        }
        unreachable!("is_io_error implies ErrorKind::Io");
    }
    GaciError::Csv {
        path: path_str(path),
        source: err,
    }
}

/// Header names mapped to indices, plus all data rows.
struct RawTable {
    header: BTreeMap<String, usize>,
    rows: Vec<csv::StringRecord>,
}

impl RawTable {
    fn open(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| map_csv(path, e))?;
        let header: BTreeMap<String, usize> = reader
            .headers()
            .map_err(|e| map_csv(path, e))?
            .iter()
            .enumerate()
            .map(|(i, name)| (name.to_string(), i))
            .collect();
        let rows = reader
            .records()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| map_csv(path, e))?;
        if rows.is_empty() {
            return Err(GaciError::EmptyFile {
                path: path_str(path),
            });
        }
        Ok(RawTable { header, rows })
    }

    fn column(&self, path: &Path, name: &str) -> Result<usize> {
        self.header
            .get(name)
            .copied()
            .ok_or(GaciError::MissingColumn {
                path: path_str(path),
                column: name.to_string(),
            })
    }

    /// 1-based data row number as reported in errors (header is row 1).
    fn row_number(&self, index: usize) -> usize {
        index + 2
    }

    fn cell<'a>(&self, row: &'a csv::StringRecord, col: usize) -> &'a str {
        row.get(col).unwrap_or("")
    }

    fn number(&self, path: &Path, index: usize, column: &str, raw: &str) -> Result<f64> {
        let parsed: f64 = raw.parse().map_err(|_| GaciError::NonNumericCell {
            path: path_str(path),
            row: self.row_number(index),
            column: column.to_string(),
            value: raw.to_string(),
        })?;
        if !parsed.is_finite() {
            return Err(GaciError::NonNumericCell {
                path: path_str(path),
                row: self.row_number(index),
                column: column.to_string(),
                value: raw.to_string(),
            });
        }
        Ok(parsed)
    }

    fn country(&self, path: &Path, index: usize, raw: &str) -> Result<CountryId> {
        CountryId::new(raw).map_err(|e| GaciError::InvalidValue {
            path: path_str(path),
            row: self.row_number(index),
            message: e.to_string(),
        })
    }

    fn invalid(&self, path: &Path, index: usize, message: String) -> GaciError {
        GaciError::InvalidValue {
            path: path_str(path),
            row: self.row_number(index),
            message,
        }
    }
}

fn check_duplicate(seen: &mut BTreeSet<String>, path: &Path, country: &CountryId) -> Result<()> {
    if !seen.insert(country.key().to_string()) {
        return Err(GaciError::DuplicateCountry {
            path: path_str(path),
            country: country.name().into(),
        });
    }
    Ok(())
}

/// Load the `country,p1,…,p14` pillar matrix.
pub fn load_pillar_matrix(path: &Path) -> Result<PillarMatrix> {
    let table = RawTable::open(path)?;
    let country_col = table.column(path, "country")?;
    let pillar_cols: Vec<usize> = (1..=N_PILLARS)
        .map(|p| table.column(path, &format!("p{p}")))
        .collect::<Result<_>>()?;

    let mut seen = BTreeSet::new();
    let mut countries = Vec::with_capacity(table.rows.len());
    let mut values = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let country = table.country(path, i, table.cell(row, country_col))?;
        check_duplicate(&mut seen, path, &country)?;
        let mut pillar_row = [0.0; N_PILLARS];
        for (j, &col) in pillar_cols.iter().enumerate() {
            pillar_row[j] = table.number(path, i, &format!("p{}", j + 1), table.cell(row, col))?;
        }
        // validate the row's bounds in isolation so the error carries a
        // row number
        PillarMatrix::new(vec![country.clone()], vec![pillar_row])
            .map_err(|e| table.invalid(path, i, e.to_string()))?;
        countries.push(country);
        values.push(pillar_row);
    }
    PillarMatrix::new(countries, values)
}

/// Load a `country,year,agtfp,temp_c,prec_mm` panel, sorted by
/// (country, year). Duplicate observations for a (country, year) pair
/// are rejected.
pub fn load_panel(path: &Path) -> Result<Vec<PanelObservation>> {
    let table = RawTable::open(path)?;
    let country_col = table.column(path, "country")?;
    let year_col = table.column(path, "year")?;
    let agtfp_col = table.column(path, "agtfp")?;
    let temp_col = table.column(path, "temp_c")?;
    let prec_col = table.column(path, "prec_mm")?;

    let mut seen: BTreeSet<(String, i32)> = BTreeSet::new();
    let mut panel = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let country = table.country(path, i, table.cell(row, country_col))?;
        let year_raw = table.cell(row, year_col);
        let year: i32 = year_raw.parse().map_err(|_| GaciError::NonNumericCell {
            path: path_str(path),
            row: table.row_number(i),
            column: "year".into(),
            value: year_raw.to_string(),
        })?;
        if !(1900..=2100).contains(&year) {
            return Err(GaciError::YearOutOfRange {
                path: path_str(path),
                row: table.row_number(i),
                year,
            });
        }
        if !seen.insert((country.key().to_string(), year)) {
            return Err(GaciError::DuplicateObservation {
                path: path_str(path),
                country: country.name().into(),
                year,
            });
        }
        let agtfp = table.number(path, i, "agtfp", table.cell(row, agtfp_col))?;
        let temp_c = table.number(path, i, "temp_c", table.cell(row, temp_col))?;
        let prec_mm = table.number(path, i, "prec_mm", table.cell(row, prec_col))?;
        let obs = PanelObservation::new(country, year, agtfp, temp_c, prec_mm)
            .map_err(|e| table.invalid(path, i, e.to_string()))?;
        panel.push(obs);
    }
    panel.sort_by(|a, b| a.country.cmp(&b.country).then(a.year.cmp(&b.year)));
    Ok(panel)
}

/// True when every country covers the same set of years.
pub fn is_balanced(panel: &[PanelObservation]) -> bool {
    let mut years: BTreeMap<&str, BTreeSet<i32>> = BTreeMap::new();
    for obs in panel {
        years.entry(obs.country.key()).or_default().insert(obs.year);
    }
    let mut sets = years.values();
    match sets.next() {
        None => true,
        Some(first) => sets.all(|s| s == first),
    }
}

/// Load a `country,score` map. Extra columns (such as a published rank)
/// are ignored.
pub fn load_scores(path: &Path) -> Result<BTreeMap<CountryId, f64>> {
    let table = RawTable::open(path)?;
    let country_col = table.column(path, "country")?;
    let score_col = table.column(path, "score")?;
    let mut seen = BTreeSet::new();
    let mut scores = BTreeMap::new();
    for (i, row) in table.rows.iter().enumerate() {
        let country = table.country(path, i, table.cell(row, country_col))?;
        check_duplicate(&mut seen, path, &country)?;
        let score = table.number(path, i, "score", table.cell(row, score_col))?;
        scores.insert(country, score);
    }
    Ok(scores)
}

/// Load `country,region` labels, plus developed/developing tags when the
/// optional `development` column is present. Blank development cells
/// leave the country untagged.
pub fn load_regions(path: &Path) -> Result<(RegionMap, Option<BTreeMap<CountryId, Development>>)> {
    let table = RawTable::open(path)?;
    let country_col = table.column(path, "country")?;
    let region_col = table.column(path, "region")?;
    let development_col = table.header.get("development").copied();

    let mut seen = BTreeSet::new();
    let mut pairs = Vec::with_capacity(table.rows.len());
    let mut tags = BTreeMap::new();
    for (i, row) in table.rows.iter().enumerate() {
        let country = table.country(path, i, table.cell(row, country_col))?;
        check_duplicate(&mut seen, path, &country)?;
        let region = table.cell(row, region_col);
        if region.is_empty() {
            return Err(table.invalid(path, i, format!("empty region label for {country}")));
        }
        pairs.push((country.clone(), region.to_string()));
        if let Some(col) = development_col {
            let raw = table.cell(row, col);
            if !raw.is_empty() {
                let tag: Development = raw
                    .parse()
                    .map_err(|e: GaciError| table.invalid(path, i, e.to_string()))?;
                tags.insert(country, tag);
            }
        }
    }
    let regions = RegionMap::from_pairs(pairs)?;
    Ok((regions, development_col.map(|_| tags)))
}

/// Load already-normalized pillar 13 indicators:
/// `country,agtfp,aoi,agcs`.
pub fn load_normalized_indicators(path: &Path) -> Result<Vec<(CountryId, [f64; 3])>> {
    let table = RawTable::open(path)?;
    let country_col = table.column(path, "country")?;
    let cols = [
        table.column(path, "agtfp")?,
        table.column(path, "aoi")?,
        table.column(path, "agcs")?,
    ];
    let names = ["agtfp", "aoi", "agcs"];
    let mut seen = BTreeSet::new();
    let mut rows = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let country = table.country(path, i, table.cell(row, country_col))?;
        check_duplicate(&mut seen, path, &country)?;
        let mut triple = [0.0; 3];
        for ((slot, &col), name) in triple.iter_mut().zip(&cols).zip(names) {
            *slot = table.number(path, i, name, table.cell(row, col))?;
        }
        rows.push((country, triple));
    }
    Ok(rows)
}

/// Load raw pillar 13 inputs:
/// `country,agtfp_level,aoi,value_added,world_gdp`.
pub fn load_indicator_records(path: &Path) -> Result<Vec<IndicatorRecord>> {
    let table = RawTable::open(path)?;
    let country_col = table.column(path, "country")?;
    let agtfp_col = table.column(path, "agtfp_level")?;
    let aoi_col = table.column(path, "aoi")?;
    let va_col = table.column(path, "value_added")?;
    let gdp_col = table.column(path, "world_gdp")?;
    let mut seen = BTreeSet::new();
    let mut records = Vec::with_capacity(table.rows.len());
    for (i, row) in table.rows.iter().enumerate() {
        let country = table.country(path, i, table.cell(row, country_col))?;
        check_duplicate(&mut seen, path, &country)?;
        let agtfp_level = table.number(path, i, "agtfp_level", table.cell(row, agtfp_col))?;
        let aoi = table.number(path, i, "aoi", table.cell(row, aoi_col))?;
        let value_added = table.number(path, i, "value_added", table.cell(row, va_col))?;
        let world_gdp = table.number(path, i, "world_gdp", table.cell(row, gdp_col))?;
        let record = IndicatorRecord::new(country, agtfp_level, aoi, value_added, world_gdp)
            .map_err(|e| table.invalid(path, i, e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}

/// Load fitted climate-model terms from a `term,coef` table. The
/// `Temperature` and `Precipitation` rows are ignored here (they are not
/// country effects), the `Constant` row sets the intercept, the single
/// row with an empty coefficient is the base country, and every other
/// row is a country dummy coefficient.
pub fn load_climate_effects(path: &Path) -> Result<ClimateEffects> {
    let table = RawTable::open(path)?;
    let term_col = table.column(path, "term")?;
    let coef_col = table.column(path, "coef")?;

    let mut constant: Option<f64> = None;
    let mut base: Option<CountryId> = None;
    let mut named = Vec::new();
    for (i, row) in table.rows.iter().enumerate() {
        let term = table.cell(row, term_col);
        let coef_raw = table.cell(row, coef_col);
        match term {
            "Temperature" | "Precipitation" => continue,
            "Constant" => {
                let value = table.number(path, i, "coef", coef_raw)?;
                if constant.replace(value).is_some() {
                    return Err(table.invalid(path, i, "second `Constant` row".into()));
                }
            }
            _ => {
                let country = table.country(path, i, term)?;
                if coef_raw.is_empty() {
                    if let Some(first) = &base {
                        return Err(table.invalid(
                            path,
                            i,
                            format!("second base row `{country}` (base is already `{first}`)"),
                        ));
                    }
                    base = Some(country);
                } else {
                    named.push((country, table.number(path, i, "coef", coef_raw)?));
                }
            }
        }
    }
    let constant = constant.ok_or_else(|| GaciError::InvalidValue {
        path: path_str(path),
        row: 0,
        message: "no `Constant` row".into(),
    })?;
    let base = base.ok_or_else(|| GaciError::InvalidValue {
        path: path_str(path),
        row: 0,
        message: "no base-country row (empty coefficient) found".into(),
    })?;
    ClimateEffects::new(base, constant, named)
}

/// One formatted output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    /// Rendered with a fixed number of decimals, e.g. `Num { value:
    /// 80.676…, decimals: 3 }` → `80.676`.
    Num {
        value: f64,
        decimals: usize,
    },
    /// Rendered empty (missing comparison values and the like).
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn num(value: f64, decimals: usize) -> Self {
        Cell::Num { value, decimals }
    }

    fn render(&self) -> Result<String> {
        match self {
            Cell::Text(s) => Ok(s.clone()),
            Cell::Int(i) => Ok(i.to_string()),
            Cell::Num { value, decimals } => {
                if !value.is_finite() {
                    return Err(GaciError::Domain(format!(
                        "refusing to render non-finite value {value}"
                    )));
                }
                Ok(format!("{value:.decimals$}"))
            }
            Cell::Empty => Ok(String::new()),
        }
    }
}

/// A rectangular report: header plus rows of formatted cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    header: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl ReportTable {
    pub fn new(header: Vec<String>, rows: Vec<Vec<Cell>>) -> Result<Self> {
        if header.is_empty() {
            return Err(GaciError::Domain("report has no columns".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != header.len() {
                return Err(GaciError::Domain(format!(
                    "report row {} has {} cells, header has {}",
                    i + 1,
                    row.len(),
                    header.len()
                )));
            }
        }
        Ok(ReportTable { header, rows })
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows rendered to strings (same shape as the CSV output).
    pub fn rendered_rows(&self) -> Result<Vec<Vec<String>>> {
        self.rows
            .iter()
            .map(|row| row.iter().map(Cell::render).collect())
            .collect()
    }
}

/// Write a report as CSV: header row, `\n` terminators, quoting only
/// when a field requires it. Refuses to write an empty table.
pub fn write_table(table: &ReportTable, path: &Path) -> Result<()> {
    if table.is_empty() {
        return Err(GaciError::EmptyReport {
            path: path_str(path),
        });
    }
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer
        .write_record(table.header())
        .map_err(|e| map_csv(path, e))?;
    for row in table.rows() {
        let rendered = row.iter().map(Cell::render).collect::<Result<Vec<_>>>()?;
        writer
            .write_record(&rendered)
            .map_err(|e| map_csv(path, e))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| GaciError::Domain(format!("flushing CSV for {}: {e}", path.display())))?;
    std::fs::write(path, bytes).map_err(|source| GaciError::Io {
        path: path_str(path),
        source,
    })
}
