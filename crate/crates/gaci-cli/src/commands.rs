use std::fs;
use std::path::PathBuf;

use gaci_core::ingest::{
    is_balanced, load_climate_effects, load_indicator_records, load_normalized_indicators,
    load_panel, load_pillar_matrix, load_regions, load_scores,
};
use gaci_core::validation::long_form;
use gaci_core::{
    aggregate_pillar13, build_pillar13, build_pillar14, compare, compute_gaci, disparity_stats,
    fit_climate_model, item_analysis, rank, region_report, write_table, ClimateEffects, GaciError,
    ReportTable,
};

use crate::args::Command;
use crate::config::{CliError, RunConfig};
use crate::render;

pub fn run(cfg: &RunConfig, command: &Command) -> Result<(), CliError> {
    match command {
        Command::Pillar13 { indicators, raw } => pillar13(cfg, indicators, raw),
        Command::Pillar14 {
            coefficients,
            panel,
        } => pillar14(cfg, coefficients, panel),
        Command::Compute {
            pillars,
            gci,
            regions,
        } => compute(cfg, pillars, gci, regions),
        Command::Validate { pillars } => validate(cfg, pillars),
        Command::Report {
            pillars,
            gci,
            regions,
        } => report(cfg, pillars, gci, regions),
    }
}

fn write(cfg: &RunConfig, name: &str, table: &ReportTable) -> Result<PathBuf, CliError> {
    let path = cfg.out_file(name)?;
    write_table(table, &path)?;
    Ok(path)
}

fn write_text(cfg: &RunConfig, name: &str, text: &str) -> Result<PathBuf, CliError> {
    let path = cfg.out_file(name)?;
    fs::write(&path, text).map_err(|source| GaciError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(path)
}

fn pillar13(
    cfg: &RunConfig,
    indicators: &Option<PathBuf>,
    raw: &Option<PathBuf>,
) -> Result<(), CliError> {
    let rows = if let Some(raw_path) = raw {
        let records = load_indicator_records(raw_path)?;
        let (rows, clamped) = build_pillar13(&records, &cfg.spec)?;
        for (name, n) in ["agtfp", "aoi", "agcs"].into_iter().zip(clamped) {
            if n > 0 {
                eprintln!(
                    "note: {n} `{name}` value(s) raised to the {:e} floor before the log transform",
                    cfg.spec.epsilon
                );
            }
        }
        rows
    } else {
        let path = cfg.input(indicators, "pillar13_indicators.csv");
        aggregate_pillar13(&load_normalized_indicators(&path)?)?
    };
    let path = write(cfg, "pillar13.csv", &render::pillar13_table(&rows)?)?;
    println!("pillar 13: {} countries -> {}", rows.len(), path.display());
    Ok(())
}

fn pillar14(
    cfg: &RunConfig,
    coefficients: &Option<PathBuf>,
    panel: &Option<PathBuf>,
) -> Result<(), CliError> {
    let effects = if let Some(panel_path) = panel {
        let observations = load_panel(panel_path)?;
        if !is_balanced(&observations) {
            eprintln!("note: panel is unbalanced (unequal year coverage across countries)");
        }
        let fit = fit_climate_model(&observations, cfg.base_country.as_ref(), cfg.hc, cfg.alpha)?;
        let reg_path = write(cfg, "regression.csv", &render::regression_table(&fit)?)?;
        write(
            cfg,
            "regression_stats.csv",
            &render::regression_stats_table(&fit)?,
        )?;
        println!(
            "fitted {} observations across {} countries, R2 overall {:.3} -> {}",
            fit.n_obs,
            fit.n_cols - 2,
            fit.r2.overall,
            reg_path.display()
        );
        ClimateEffects::from_fit(&fit)?
    } else {
        let path = cfg.input(coefficients, "climate_coefficients.csv");
        load_climate_effects(&path)?
    };

    let rows = build_pillar14(&effects, &cfg.spec)?;
    let negative = rows.iter().filter(|r| r.sign < 0.0).count();
    let path = write(cfg, "pillar14.csv", &render::pillar14_table(&rows)?)?;
    println!(
        "pillar 14: {} countries ({} negative, {} positive) -> {}",
        rows.len(),
        negative,
        rows.len() - negative,
        path.display()
    );
    Ok(())
}

fn compute(
    cfg: &RunConfig,
    pillars: &Option<PathBuf>,
    gci: &Option<PathBuf>,
    regions: &Option<PathBuf>,
) -> Result<(), CliError> {
    let matrix = load_pillar_matrix(&cfg.input(pillars, "pillars_2019.csv"))?;
    let gaci = compute_gaci(&matrix);

    let gci_path = cfg.optional_input(gci, "gci_scores.csv");
    let board = match &gci_path {
        Some(path) => compare(&gaci, &load_scores(path)?)?,
        None => rank(&gaci)?,
    };
    let region_data = match cfg.optional_input(regions, "regions.csv") {
        Some(path) => Some(load_regions(&path)?),
        None => None,
    };

    let scores_path = write(cfg, "gaci_scores.csv", &render::scores_table(&board)?)?;
    let entries = board.entries();
    let low = entries[entries.len() - 1].gaci_score;
    let high = entries[0].gaci_score;
    println!("{} countries, range {low:.2}–{high:.2}", entries.len());
    println!("scores -> {}", scores_path.display());

    if gci_path.is_some() {
        let comparison_path = write(cfg, "comparison.csv", &render::comparison_table(&board)?)?;
        let tags = region_data.as_ref().and_then(|(_, tags)| tags.as_ref());
        let stats = disparity_stats(&board, tags);
        println!(
            "comparison: {} lower than the comparison index, {} higher, {} even -> {}",
            stats.n_negative,
            stats.n_positive,
            stats.n_zero,
            comparison_path.display()
        );
        let mut line = format!("declines over 4 points: {}", stats.n_over_4pt_decline);
        if let Some(split) = stats.over_4pt_by_tag {
            line.push_str(&format!(
                " (developed {}, developing {})",
                split.developed, split.developing
            ));
            if split.untagged > 0 {
                line.push_str(&format!(" with {} untagged", split.untagged));
            }
        }
        println!("{line}");
        if !board.unmatched_comparison().is_empty() {
            let names: Vec<&str> = board
                .unmatched_comparison()
                .iter()
                .map(|c| c.name())
                .collect();
            eprintln!(
                "note: {} comparison-only countries ignored: {}",
                names.len(),
                names.join(", ")
            );
        }
    } else {
        println!(
            "comparison skipped: no comparison scores given and {} not found",
            cfg.fixtures.join("gci_scores.csv").display()
        );
    }

    if let Some((map, _)) = &region_data {
        let rep = region_report(&board, map)?;
        if cfg.format.csv() {
            write(cfg, "region_report.csv", &render::region_csv(&rep, &board)?)?;
        }
        if cfg.format.md() {
            write_text(cfg, "region_report.md", &render::region_markdown(&rep))?;
        }
        println!("region report: {} regions", rep.groups.len());
    }

    let corr = item_analysis(&matrix, &gaci)?;
    let validity_path = write(
        cfg,
        "validity_matrix.csv",
        &render::validity_triangle(&corr)?,
    )?;
    println!("validity matrix -> {}", validity_path.display());
    Ok(())
}

fn validate(cfg: &RunConfig, pillars: &Option<PathBuf>) -> Result<(), CliError> {
    let matrix = load_pillar_matrix(&cfg.input(pillars, "pillars_2019.csv"))?;
    let gaci = compute_gaci(&matrix);
    let corr = item_analysis(&matrix, &gaci)?;
    let cells = long_form(&corr);
    let starred = cells.iter().filter(|c| c.starred).count();
    let path = write(
        cfg,
        "validity_matrix.csv",
        &render::validity_triangle(&corr)?,
    )?;
    println!(
        "item analysis: {} pairwise correlations, {} significant at 5% -> {}",
        cells.len(),
        starred,
        path.display()
    );
    Ok(())
}

fn report(
    cfg: &RunConfig,
    pillars: &Option<PathBuf>,
    gci: &Option<PathBuf>,
    regions: &Option<PathBuf>,
) -> Result<(), CliError> {
    let matrix = load_pillar_matrix(&cfg.input(pillars, "pillars_2019.csv"))?;
    let gaci = compute_gaci(&matrix);
    let board = compare(&gaci, &load_scores(&cfg.input(gci, "gci_scores.csv"))?)?;
    let (map, _) = load_regions(&cfg.input(regions, "regions.csv"))?;
    let rep = region_report(&board, &map)?;

    if cfg.format.csv() {
        write(cfg, "region_report.csv", &render::region_csv(&rep, &board)?)?;
    }
    if cfg.format.md() {
        write_text(cfg, "region_report.md", &render::region_markdown(&rep))?;
    }
    write(
        cfg,
        "plot_overall.csv",
        &render::plot_table(board.entries())?,
    )?;
    for group in &rep.groups {
        let name = format!("plot_{}.csv", render::slug(&group.region));
        write(cfg, &name, &render::plot_table(group.rows.iter())?)?;
    }
    println!(
        "region report: {} regions, {} countries -> {}",
        rep.groups.len(),
        board.entries().len(),
        cfg.out.display()
    );
    Ok(())
}
