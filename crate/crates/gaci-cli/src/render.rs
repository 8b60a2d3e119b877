use gaci_core::econometrics::{COL_INTERCEPT, COL_PREC, COL_TEMP};
use gaci_core::{
    Cell, CorrelationMatrix, CountryId, HcType, Pillar13Row, Pillar14Row, RegionReport,
    RegressionFit, RegressionTerm, ReportTable, Result, ScoreBoard, ScoreEntry,
};

/// Scores and pillar values are rendered to 3 decimals, matching the
/// resolution of the shipped tables.
const DP: usize = 3;

fn n3(value: f64) -> Cell {
    // A signed zero (e.g. sign −1 × normalized 0.0) should print as
    // plain 0.000.
    Cell::num(if value == 0.0 { 0.0 } else { value }, DP)
}

fn alphabetical(board: &ScoreBoard) -> Vec<&ScoreEntry> {
    let mut entries: Vec<&ScoreEntry> = board.entries().iter().collect();
    entries.sort_by(|a, b| a.country.cmp(&b.country));
    entries
}

/// `country,rank,score` in alphabetical country order.
pub fn scores_table(board: &ScoreBoard) -> Result<ReportTable> {
    ReportTable::new(
        vec!["country".into(), "rank".into(), "score".into()],
        alphabetical(board)
            .iter()
            .map(|e| {
                vec![
                    Cell::text(e.country.name()),
                    Cell::Int(e.gaci_rank as i64),
                    n3(e.gaci_score),
                ]
            })
            .collect(),
    )
}

/// `country,gaci,gci,diff` in alphabetical country order; countries
/// missing from the comparison index keep empty gci/diff cells.
pub fn comparison_table(board: &ScoreBoard) -> Result<ReportTable> {
    ReportTable::new(
        vec!["country".into(), "gaci".into(), "gci".into(), "diff".into()],
        alphabetical(board)
            .iter()
            .map(|e| {
                vec![
                    Cell::text(e.country.name()),
                    n3(e.gaci_score),
                    e.gci_score.map_or(Cell::Empty, n3),
                    e.diff.map_or(Cell::Empty, n3),
                ]
            })
            .collect(),
    )
}

pub fn pillar13_table(rows: &[Pillar13Row]) -> Result<ReportTable> {
    ReportTable::new(
        vec![
            "country".into(),
            "agtfp".into(),
            "aoi".into(),
            "agcs".into(),
            "pillar13".into(),
        ],
        rows.iter()
            .map(|r| {
                vec![
                    Cell::text(r.country.name()),
                    n3(r.agtfp_norm),
                    n3(r.aoi_norm),
                    n3(r.agcs_norm),
                    n3(r.score),
                ]
            })
            .collect(),
    )
}

pub fn pillar14_table(rows: &[Pillar14Row]) -> Result<ReportTable> {
    ReportTable::new(
        vec![
            "country".into(),
            "coefficient".into(),
            "constant".into(),
            "d1".into(),
            "d2".into(),
            "normalized".into(),
            "sign".into(),
            "signed_score".into(),
        ],
        rows.iter()
            .map(|r| {
                vec![
                    Cell::text(r.country.name()),
                    n3(r.coefficient),
                    n3(r.constant),
                    n3(r.d1),
                    n3(r.d2),
                    n3(r.normalized),
                    Cell::Int(r.sign as i64),
                    n3(r.signed_score),
                ]
            })
            .collect(),
    )
}

fn term_row(label: &str, t: &RegressionTerm) -> Vec<Cell> {
    vec![
        Cell::text(label),
        n3(t.coefficient),
        n3(t.robust_se),
        n3(t.t_value),
        n3(t.p_value),
        n3(t.ci_low),
        n3(t.ci_high),
        Cell::text(t.stars),
    ]
}

/// Fitted terms as a `term,coef,...` table in the same layout the
/// coefficient loader reads back: Temperature and Precipitation first,
/// country rows alphabetical with the base country present but blank,
/// Constant last. The file can be fed straight back through
/// `pillar14 --coefficients` (at the 3-decimal resolution it is
/// written with).
pub fn regression_table(fit: &RegressionFit) -> Result<ReportTable> {
    let mut country_rows: Vec<(CountryId, Vec<Cell>)> = Vec::new();
    for t in fit.display_terms() {
        if matches!(t.name.as_str(), COL_TEMP | COL_PREC | COL_INTERCEPT) {
            continue;
        }
        country_rows.push((CountryId::new(&t.name)?, term_row(&t.name, t)));
    }
    let mut base_row = vec![Cell::text(fit.base_country.name())];
    base_row.resize(8, Cell::Empty);
    country_rows.push((fit.base_country.clone(), base_row));
    country_rows.sort_by(|a, b| a.0.cmp(&b.0));

    let mut rows = Vec::with_capacity(country_rows.len() + 3);
    for (label, name) in [("Temperature", COL_TEMP), ("Precipitation", COL_PREC)] {
        if let Some(t) = fit.term(name) {
            rows.push(term_row(label, t));
        }
    }
    rows.extend(country_rows.into_iter().map(|(_, row)| row));
    if let Some(t) = fit.term(COL_INTERCEPT) {
        rows.push(term_row("Constant", t));
    }

    ReportTable::new(
        vec![
            "term".into(),
            "coef".into(),
            "robust_se".into(),
            "t_value".into(),
            "p_value".into(),
            "ci_low".into(),
            "ci_high".into(),
            "sig".into(),
        ],
        rows,
    )
}

fn hc_label(hc: HcType) -> &'static str {
    match hc {
        HcType::Hc0 => "HC0",
        HcType::Hc1 => "HC1",
        HcType::Hc3 => "HC3",
    }
}

/// Fit diagnostics as a `statistic,value` table.
pub fn regression_stats_table(fit: &RegressionFit) -> Result<ReportTable> {
    let n_countries = fit.n_cols - 2;
    let rows = vec![
        vec![Cell::text("n_obs"), Cell::Int(fit.n_obs as i64)],
        vec![Cell::text("n_countries"), Cell::Int(n_countries as i64)],
        vec![Cell::text("n_terms"), Cell::Int(fit.terms.len() as i64)],
        vec![
            Cell::text("base_country"),
            Cell::text(fit.base_country.name()),
        ],
        vec![Cell::text("covariance"), Cell::text(hc_label(fit.variant))],
        vec![Cell::text("alpha"), n3(fit.alpha)],
        vec![Cell::text("r2_overall"), n3(fit.r2.overall)],
        vec![Cell::text("r2_within"), n3(fit.r2.within)],
        vec![Cell::text("r2_between"), n3(fit.r2.between)],
        vec![Cell::text("mean_dep"), n3(fit.mean_dep)],
        vec![Cell::text("sd_dep"), n3(fit.sd_dep)],
    ];
    ReportTable::new(vec!["statistic".into(), "value".into()], rows)
}

/// The item-analysis matrix in lower-triangular layout: one row per
/// item from the second onward, each populated cell holding
/// `r (p)` against an earlier item, upper cells left empty.
pub fn validity_triangle(matrix: &CorrelationMatrix) -> Result<ReportTable> {
    let labels = matrix.labels();
    let mut header = vec!["item".to_string()];
    header.extend(labels[..labels.len() - 1].iter().cloned());

    let rows = (1..labels.len())
        .map(|i| {
            let mut row = vec![Cell::text(&labels[i])];
            for j in 0..labels.len() - 1 {
                if j < i {
                    row.push(Cell::text(format!(
                        "{:.3} ({:.3})",
                        matrix.r(i, j),
                        matrix.p(i, j)
                    )));
                } else {
                    row.push(Cell::Empty);
                }
            }
            row
        })
        .collect();
    ReportTable::new(header, rows)
}

fn comparison_cells(e: &ScoreEntry) -> [Cell; 4] {
    [
        Cell::Int(e.gaci_rank as i64),
        n3(e.gaci_score),
        e.gci_score.map_or(Cell::Empty, n3),
        e.diff.map_or(Cell::Empty, n3),
    ]
}

/// Region report as `region,country,gaci_rank,gaci,gci,diff`, groups in
/// alphabetical region order, rows in each group sorted by diff
/// ascending. Countries without a region label follow under an
/// `(unassigned)` region.
pub fn region_csv(report: &RegionReport, board: &ScoreBoard) -> Result<ReportTable> {
    let mut rows = Vec::new();
    for group in &report.groups {
        for e in &group.rows {
            let mut row = vec![Cell::text(&group.region), Cell::text(e.country.name())];
            row.extend(comparison_cells(e));
            rows.push(row);
        }
    }
    for country in &report.unassigned {
        if let Some(e) = board.get(country) {
            let mut row = vec![Cell::text("(unassigned)"), Cell::text(e.country.name())];
            row.extend(comparison_cells(e));
            rows.push(row);
        }
    }
    ReportTable::new(
        vec![
            "region".into(),
            "country".into(),
            "gaci_rank".into(),
            "gaci".into(),
            "gci".into(),
            "diff".into(),
        ],
        rows,
    )
}

fn md_num(value: Option<f64>) -> String {
    value.map_or(String::new(), |v| {
        format!("{:.3}", if v == 0.0 { 0.0 } else { v })
    })
}

/// The region report as a Markdown document: one table per region plus
/// a per-region mean/min/max diff summary line.
pub fn region_markdown(report: &RegionReport) -> String {
    let mut out = String::from("# Regional comparison\n");
    for group in &report.groups {
        out.push_str(&format!("\n## {}\n\n", group.region));
        out.push_str("| Country | Rank | GACI | GCI | Diff |\n");
        out.push_str("| --- | ---: | ---: | ---: | ---: |\n");
        for e in &group.rows {
            out.push_str(&format!(
                "| {} | {} | {:.3} | {} | {} |\n",
                e.country.name(),
                e.gaci_rank,
                e.gaci_score,
                md_num(e.gci_score),
                md_num(e.diff),
            ));
        }
        if let (Some(mean), Some(min), Some(max)) =
            (group.mean_diff, group.min_diff, group.max_diff)
        {
            out.push_str(&format!(
                "\nMean diff {mean:.3}; min {min:.3}; max {max:.3}.\n"
            ));
        }
    }
    if !report.unassigned.is_empty() {
        out.push_str("\n## Unassigned\n\n");
        for country in &report.unassigned {
            out.push_str(&format!("- {}\n", country.name()));
        }
    }
    out
}

/// `country,gci,gaci` rows for scatter plots, in the order given.
pub fn plot_table<'a, I>(entries: I) -> Result<ReportTable>
where
    I: IntoIterator<Item = &'a ScoreEntry>,
{
    ReportTable::new(
        vec!["country".into(), "gci".into(), "gaci".into()],
        entries
            .into_iter()
            .map(|e| {
                vec![
                    Cell::text(e.country.name()),
                    e.gci_score.map_or(Cell::Empty, n3),
                    n3(e.gaci_score),
                ]
            })
            .collect(),
    )
}

/// File-name slug for a region label: lowercase alphanumerics with
/// underscores between words.
pub fn slug(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    let mut gap = false;
    for ch in label.chars() {
        if ch.is_ascii_alphanumeric() {
            if gap && !out.is_empty() {
                out.push('_');
            }
            gap = false;
            out.push(ch.to_ascii_lowercase());
        } else {
            gap = true;
        }
    }
    out
}
