//! Index aggregation, ranking, cross-index comparison, and the region /
//! disparity reports built on top of the comparison.

use std::collections::BTreeMap;

use crate::error::{GaciError, Result};
use crate::model::{
    CountryId, Development, PillarMatrix, RegionMap, ScoreBoard, ScoreEntry, N_PILLARS,
};

/// Equal-weight composite score per country: the mean of all 14 pillar
/// values (pillar 14 contributes with its sign). Completeness of the
/// matrix is a construction invariant of [`PillarMatrix`]; when splicing
/// a matrix together from per-pillar columns use [`assemble_matrix`],
/// which reports missing pillars.
pub fn compute_gaci(matrix: &PillarMatrix) -> BTreeMap<CountryId, f64> {
    matrix
        .rows()
        .map(|(country, row)| (country.clone(), row.iter().sum::<f64>() / N_PILLARS as f64))
        .collect()
}

/// Build a complete pillar matrix from per-pillar columns keyed by pillar
/// number (1-based). Every pillar 1..=14 must be present with one value
/// per country.
pub fn assemble_matrix(
    countries: Vec<CountryId>,
    columns: &BTreeMap<usize, Vec<f64>>,
) -> Result<PillarMatrix> {
    for pillar in 1..=N_PILLARS {
        match columns.get(&pillar) {
            None => return Err(GaciError::MissingPillar(pillar)),
            Some(col) if col.len() != countries.len() => {
                return Err(GaciError::LengthMismatch {
                    left: col.len(),
                    right: countries.len(),
                })
            }
            Some(_) => {}
        }
    }
    if let Some(&extra) = columns.keys().find(|p| **p == 0 || **p > N_PILLARS) {
        return Err(GaciError::Domain(format!(
            "pillar number {extra} outside 1..={N_PILLARS}"
        )));
    }
    let values: Vec<[f64; N_PILLARS]> = (0..countries.len())
        .map(|i| std::array::from_fn(|p| columns[&(p + 1)][i]))
        .collect();
    PillarMatrix::new(countries, values)
}

/// Rank scores descending; ties are broken alphabetically by country and
/// ranks run 1..N.
pub fn rank(scores: &BTreeMap<CountryId, f64>) -> Result<ScoreBoard> {
    if scores.is_empty() {
        return Err(GaciError::Domain("no scores to rank".into()));
    }
    for (country, score) in scores {
        if !score.is_finite() {
            return Err(GaciError::Domain(format!(
                "score for {country} is not finite ({score})"
            )));
        }
    }
    let mut ordered: Vec<(&CountryId, f64)> = scores.iter().map(|(c, &s)| (c, s)).collect();
    ordered.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let entries = ordered
        .into_iter()
        .enumerate()
        .map(|(i, (country, score))| ScoreEntry {
            country: country.clone(),
            gaci_score: score,
            gaci_rank: i + 1,
            gci_score: None,
            gci_rank: None,
            diff: None,
            region: None,
        })
        .collect();
    ScoreBoard::new(entries, Vec::new())
}

/// Rank `gaci` and attach the comparison index: per shared country the
/// comparison score, its rank among the shared set (descending, ties
/// alphabetical), and `diff = gaci − gci`. Countries on only one side are
/// flagged — board rows keep empty comparison columns, comparison-only
/// countries land in `unmatched_comparison` — rather than dropped.
pub fn compare(
    gaci: &BTreeMap<CountryId, f64>,
    gci: &BTreeMap<CountryId, f64>,
) -> Result<ScoreBoard> {
    let board = rank(gaci)?;
    let mut shared: Vec<(&CountryId, f64)> = gci
        .iter()
        .filter(|(c, _)| gaci.contains_key(c))
        .map(|(c, &s)| (c, s))
        .collect();
    if shared.is_empty() {
        return Err(GaciError::EmptyIntersection);
    }
    shared.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let gci_ranks: BTreeMap<&CountryId, usize> = shared
        .iter()
        .enumerate()
        .map(|(i, (c, _))| (*c, i + 1))
        .collect();

    let entries = board
        .entries()
        .iter()
        .map(|e| {
            let gci_score = gci.get(&e.country).copied();
            ScoreEntry {
                country: e.country.clone(),
                gaci_score: e.gaci_score,
                gaci_rank: e.gaci_rank,
                gci_score,
                gci_rank: gci_ranks.get(&e.country).copied(),
                diff: gci_score.map(|g| e.gaci_score - g),
                region: None,
            }
        })
        .collect();
    let unmatched: Vec<CountryId> = gci
        .keys()
        .filter(|c| !gaci.contains_key(c))
        .cloned()
        .collect();
    ScoreBoard::new(entries, unmatched)
}

/// One region's block of the region report.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGroup {
    pub region: String,
    /// Entries sorted by diff ascending (largest decline first); entries
    /// without a comparison score come last, alphabetically.
    pub rows: Vec<ScoreEntry>,
    pub mean_diff: Option<f64>,
    pub min_diff: Option<f64>,
    pub max_diff: Option<f64>,
}

/// Region-grouped comparison report.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegionReport {
    /// Groups in alphabetical region order.
    pub groups: Vec<RegionGroup>,
    /// Board countries with no region label, in board (rank) order.
    pub unassigned: Vec<CountryId>,
}

/// Group board entries by region. Every labeled country must be on the
/// board; an unknown label is an error so a typo cannot silently drop a
/// country. Board countries without a label are listed as unassigned.
pub fn region_report(board: &ScoreBoard, regions: &RegionMap) -> Result<RegionReport> {
    for (country, _) in regions.iter() {
        if board.get(country).is_none() {
            return Err(GaciError::UnknownCountry {
                context: "region map".into(),
                country: country.name().into(),
            });
        }
    }
    let mut grouped: BTreeMap<&str, Vec<ScoreEntry>> = BTreeMap::new();
    let mut unassigned = Vec::new();
    for e in board.entries() {
        match regions.get(&e.country) {
            Some(label) => grouped.entry(label).or_default().push(e.clone()),
            None => unassigned.push(e.country.clone()),
        }
    }
    let groups = grouped
        .into_iter()
        .map(|(region, mut rows)| {
            rows.sort_by(|a, b| match (a.diff, b.diff) {
                (Some(x), Some(y)) => x.total_cmp(&y).then_with(|| a.country.cmp(&b.country)),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => a.country.cmp(&b.country),
            });
            let diffs: Vec<f64> = rows.iter().filter_map(|r| r.diff).collect();
            let (mean, min, max) = if diffs.is_empty() {
                (None, None, None)
            } else {
                (
                    Some(diffs.iter().sum::<f64>() / diffs.len() as f64),
                    Some(diffs.iter().copied().fold(f64::INFINITY, f64::min)),
                    Some(diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
                )
            };
            RegionGroup {
                region: region.to_string(),
                rows,
                mean_diff: mean,
                min_diff: min,
                max_diff: max,
            }
        })
        .collect();
    Ok(RegionReport { groups, unassigned })
}

/// Whole-point decline counts split by development tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DisparitySplit {
    pub developed: usize,
    pub developing: usize,
    pub untagged: usize,
}

/// Summary of GACI−GCI disparities across the board.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DisparityStats {
    pub n_negative: usize,
    pub n_positive: usize,
    pub n_zero: usize,
    /// Entries with no comparison score.
    pub n_missing_comparison: usize,
    /// Declines of more than four whole points, i.e. `trunc(−diff) > 4`.
    pub n_over_4pt_decline: usize,
    /// The over-4-point declines split by tag, when tags were supplied.
    pub over_4pt_by_tag: Option<DisparitySplit>,
}

/// Count negative/positive disparities and declines of more than four
/// whole points. Declines are measured in truncated whole points, so a
/// 4.9-point drop does not count as "over 4". When `tags` is given the
/// over-4-point count is additionally split developed/developing.
pub fn disparity_stats(
    board: &ScoreBoard,
    tags: Option<&BTreeMap<CountryId, Development>>,
) -> DisparityStats {
    let mut stats = DisparityStats {
        over_4pt_by_tag: tags.map(|_| DisparitySplit::default()),
        ..DisparityStats::default()
    };
    for e in board.entries() {
        let Some(diff) = e.diff else {
            stats.n_missing_comparison += 1;
            continue;
        };
        if diff < 0.0 {
            stats.n_negative += 1;
        } else if diff > 0.0 {
            stats.n_positive += 1;
        } else {
            stats.n_zero += 1;
        }
        if diff < 0.0 && (-diff).trunc() > 4.0 {
            stats.n_over_4pt_decline += 1;
            if let (Some(split), Some(tag_map)) = (stats.over_4pt_by_tag.as_mut(), tags) {
                match tag_map.get(&e.country) {
                    Some(Development::Developed) => split.developed += 1,
                    Some(Development::Developing) => split.developing += 1,
                    None => split.untagged += 1,
                }
            }
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(name: &str) -> CountryId {
        CountryId::new(name).unwrap()
    }

    fn matrix(rows: Vec<(&str, [f64; N_PILLARS])>) -> PillarMatrix {
        let countries = rows.iter().map(|(n, _)| c(n)).collect();
        let values = rows.into_iter().map(|(_, v)| v).collect();
        PillarMatrix::new(countries, values).unwrap()
    }

    #[test]
    fn gaci_is_equal_weight_mean() {
        let m = matrix(vec![
            ("Alpha", [70.0; N_PILLARS]),
            ("Beta", [0.0; N_PILLARS]),
        ]);
        let scores = compute_gaci(&m);
        assert_eq!(scores[&c("Alpha")], 70.0);
        assert_eq!(scores[&c("Beta")], 0.0);
    }

    #[test]
    fn gaci_uses_signed_last_pillar() {
        let mut row = [14.0; N_PILLARS];
        row[N_PILLARS - 1] = -14.0;
        let m = matrix(vec![("Alpha", row), ("Beta", [14.0; N_PILLARS])]);
        let scores = compute_gaci(&m);
        assert_abs_diff_eq!(scores[&c("Alpha")], 12.0, epsilon = 1e-12);
        assert_abs_diff_eq!(scores[&c("Beta")], 14.0, epsilon = 1e-12);
    }

    #[test]
    fn assemble_requires_every_pillar() {
        let countries = vec![c("Alpha"), c("Beta")];
        let mut columns: BTreeMap<usize, Vec<f64>> =
            (1..=N_PILLARS).map(|p| (p, vec![50.0, 60.0])).collect();
        assert!(assemble_matrix(countries.clone(), &columns).is_ok());
        columns.remove(&13);
        match assemble_matrix(countries, &columns).unwrap_err() {
            GaciError::MissingPillar(p) => assert_eq!(p, 13),
            other => panic!("expected MissingPillar, got {other}"),
        }
    }

    #[test]
    fn assemble_checks_column_lengths() {
        let countries = vec![c("Alpha"), c("Beta")];
        let mut columns: BTreeMap<usize, Vec<f64>> =
            (1..=N_PILLARS).map(|p| (p, vec![50.0, 60.0])).collect();
        columns.insert(7, vec![50.0]);
        assert!(matches!(
            assemble_matrix(countries, &columns).unwrap_err(),
            GaciError::LengthMismatch { .. }
        ));
    }

    #[test]
    fn single_country_gets_rank_one() {
        let scores = BTreeMap::from([(c("Alpha"), 55.0)]);
        let board = rank(&scores).unwrap();
        assert_eq!(board.len(), 1);
        assert_eq!(board.entries()[0].gaci_rank, 1);
    }

    #[test]
    fn ties_rank_alphabetically_with_consecutive_ranks() {
        let scores = BTreeMap::from([(c("Zeta"), 50.0), (c("Alpha"), 50.0), (c("Mid"), 60.0)]);
        let board = rank(&scores).unwrap();
        let order: Vec<&str> = board.entries().iter().map(|e| e.country.name()).collect();
        assert_eq!(order, vec!["Mid", "Alpha", "Zeta"]);
        let ranks: Vec<usize> = board.entries().iter().map(|e| e.gaci_rank).collect();
        assert_eq!(ranks, vec![1, 2, 3]);
    }

    #[test]
    fn constant_shift_moves_scores_and_keeps_ranking() {
        let m = matrix(vec![
            ("Alpha", [40.0; N_PILLARS]),
            ("Beta", [70.0; N_PILLARS]),
            ("Gamma", [55.0; N_PILLARS]),
        ]);
        let before = compute_gaci(&m);
        let after = compute_gaci(&m.shifted(5.0).unwrap());
        for (country, score) in &before {
            assert_abs_diff_eq!(after[country], score + 5.0, epsilon = 1e-12);
        }
        let order_before: Vec<String> = rank(&before)
            .unwrap()
            .entries()
            .iter()
            .map(|e| e.country.name().to_string())
            .collect();
        let order_after: Vec<String> = rank(&after)
            .unwrap()
            .entries()
            .iter()
            .map(|e| e.country.name().to_string())
            .collect();
        assert_eq!(order_before, order_after);
    }

    #[test]
    fn identical_maps_compare_to_zero_diffs() {
        let scores = BTreeMap::from([(c("Alpha"), 50.0), (c("Beta"), 60.0)]);
        let board = compare(&scores, &scores).unwrap();
        assert!(board.entries().iter().all(|e| e.diff == Some(0.0)));
        assert!(board.unmatched_comparison().is_empty());
    }

    #[test]
    fn one_sided_countries_are_flagged_not_dropped() {
        let gaci = BTreeMap::from([(c("Alpha"), 50.0), (c("Beta"), 60.0)]);
        let gci = BTreeMap::from([(c("Beta"), 55.0), (c("Gamma"), 70.0)]);
        let board = compare(&gaci, &gci).unwrap();
        let alpha = board.get(&c("Alpha")).unwrap();
        assert_eq!(alpha.gci_score, None);
        assert_eq!(alpha.diff, None);
        let beta = board.get(&c("Beta")).unwrap();
        assert_abs_diff_eq!(beta.diff.unwrap(), 5.0, epsilon = 1e-12);
        assert_eq!(beta.gci_rank, Some(1));
        assert_eq!(board.unmatched_comparison(), &[c("Gamma")]);
    }

    #[test]
    fn disjoint_maps_share_nothing() {
        let gaci = BTreeMap::from([(c("Alpha"), 50.0)]);
        let gci = BTreeMap::from([(c("Beta"), 55.0)]);
        assert!(matches!(
            compare(&gaci, &gci).unwrap_err(),
            GaciError::EmptyIntersection
        ));
    }

    fn comparison_board() -> ScoreBoard {
        let gaci = BTreeMap::from([
            (c("Alpha"), 50.0),
            (c("Beta"), 60.0),
            (c("Gamma"), 40.0),
            (c("Delta"), 70.0),
        ]);
        let gci = BTreeMap::from([
            (c("Alpha"), 56.0), // diff −6.0
            (c("Beta"), 64.9),  // diff −4.9 (not an over-4 decline)
            (c("Gamma"), 38.0), // diff +2.0
            (c("Delta"), 75.0), // diff −5.0 (counts: trunc(5.0) = 5 > 4)
        ]);
        compare(&gaci, &gci).unwrap()
    }

    #[test]
    fn region_groups_sort_by_decline_and_summarize() {
        let board = comparison_board();
        let regions = RegionMap::from_pairs([
            (c("Alpha"), "West".to_string()),
            (c("Beta"), "West".to_string()),
            (c("Gamma"), "East".to_string()),
        ])
        .unwrap();
        let report = region_report(&board, &regions).unwrap();
        assert_eq!(report.groups.len(), 2);
        assert_eq!(report.groups[0].region, "East");
        assert_eq!(report.groups[1].region, "West");
        let west = &report.groups[1];
        let order: Vec<&str> = west.rows.iter().map(|r| r.country.name()).collect();
        assert_eq!(order, vec!["Alpha", "Beta"]); // −6.0 before −4.9
        assert_abs_diff_eq!(west.mean_diff.unwrap(), -5.45, epsilon = 1e-12);
        assert_abs_diff_eq!(west.min_diff.unwrap(), -6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(west.max_diff.unwrap(), -4.9, epsilon = 1e-12);
        assert_eq!(report.unassigned, vec![c("Delta")]);
    }

    #[test]
    fn empty_region_map_reports_everyone_unassigned() {
        let board = comparison_board();
        let report = region_report(&board, &RegionMap::default()).unwrap();
        assert!(report.groups.is_empty());
        assert_eq!(report.unassigned.len(), 4);
    }

    #[test]
    fn region_map_must_match_board() {
        let board = comparison_board();
        let regions = RegionMap::from_pairs([(c("Nowhere"), "West".to_string())]).unwrap();
        assert!(matches!(
            region_report(&board, &regions).unwrap_err(),
            GaciError::UnknownCountry { .. }
        ));
    }

    #[test]
    fn disparity_counts_sign_and_whole_point_declines() {
        let board = comparison_board();
        let stats = disparity_stats(&board, None);
        assert_eq!(stats.n_negative, 3);
        assert_eq!(stats.n_positive, 1);
        assert_eq!(stats.n_zero, 0);
        // −4.9 truncates to 4 whole points and is excluded; −5.0 and −6.0 count
        assert_eq!(stats.n_over_4pt_decline, 2);
        assert_eq!(stats.over_4pt_by_tag, None);
    }

    #[test]
    fn disparity_splits_by_development_tag() {
        let board = comparison_board();
        let tags = BTreeMap::from([
            (c("Alpha"), Development::Developed),
            (c("Beta"), Development::Developing),
        ]);
        let stats = disparity_stats(&board, Some(&tags));
        let split = stats.over_4pt_by_tag.unwrap();
        assert_eq!(split.developed, 1); // Alpha at −6.0
        assert_eq!(split.developing, 0); // Beta's −4.9 is under the bar
        assert_eq!(split.untagged, 1); // Delta at −5.0 has no tag
    }

    #[test]
    fn zero_diffs_count_nowhere() {
        let scores = BTreeMap::from([(c("Alpha"), 50.0), (c("Beta"), 60.0)]);
        let board = compare(&scores, &scores).unwrap();
        let stats = disparity_stats(&board, None);
        assert_eq!(
            (stats.n_negative, stats.n_positive, stats.n_over_4pt_decline),
            (0, 0, 0)
        );
        assert_eq!(stats.n_zero, 2);
    }
}
