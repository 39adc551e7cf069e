//! Direct estimation of the selection probability from many corpora.
//!
//! Given rank-frequency tables for a collection of texts, the proportion of
//! tables whose rank-`r` word is a stopword estimates the selection
//! probability at rank `r`. Points sharing a proportion value are merged at
//! the geometric mean of their ranks, and the Hill curve is fitted to the
//! binned points.

use serde::{Deserialize, Serialize};

use crate::corpus::RankFrequencyTable;
use crate::error::{Error, Result};
use crate::selection::{HillGrid, HillParams};
use crate::stoplists::StopwordList;

/// One rank's stopword proportion across the collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProportionPoint {
    pub rank: u32,
    pub proportion: f64,
    /// Number of corpora with at least `rank` ranked words (the denominator).
    pub n_corpora: u32,
}

/// The raw proportion curve.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionCurve {
    pub points: Vec<ProportionPoint>,
}

/// A merged point: the geometric mean rank of a group sharing one
/// proportion value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedPoint {
    pub gmean_rank: f64,
    pub proportion: f64,
}

/// For each rank `r` up to `max_rank`, the fraction of tables whose rank-`r`
/// word is in `list`, among tables long enough to have a rank-`r` word.
/// Ranks beyond every table are dropped.
pub fn stopword_proportion(
    tables: &[RankFrequencyTable],
    list: &StopwordList,
    max_rank: u32,
) -> Result<ProportionCurve> {
    if tables.len() < 2 {
        return Err(Error::TooFewPoints {
            op: "stopword_proportion",
            needed: 2,
            got: tables.len(),
        });
    }
    if max_rank < 1 {
        return Err(Error::InvalidInput("max_rank must be >= 1".into()));
    }
    let mut points = Vec::new();
    for r in 1..=max_rank {
        let mut denom = 0u32;
        let mut num = 0u32;
        for table in tables {
            if let Some(rec) = table.record(r) {
                denom += 1;
                if list.contains(&rec.word) {
                    num += 1;
                }
            }
        }
        if denom == 0 {
            break;
        }
        points.push(ProportionPoint {
            rank: r,
            proportion: f64::from(num) / f64::from(denom),
            n_corpora: denom,
        });
    }
    Ok(ProportionCurve { points })
}

/// Groups points by identical proportion value and replaces each group with
/// one point at the geometric mean of its ranks. Output is ordered by
/// ascending mean rank.
pub fn geometric_mean_bins(curve: &ProportionCurve) -> Vec<BinnedPoint> {
    // Proportions are ratios of small integers, so grouping by exact value
    // is well defined.
    let mut groups: Vec<(f64, Vec<u32>)> = Vec::new();
    for p in &curve.points {
        match groups.iter_mut().find(|(v, _)| *v == p.proportion) {
            Some((_, ranks)) => ranks.push(p.rank),
            None => groups.push((p.proportion, vec![p.rank])),
        }
    }
    let mut binned: Vec<BinnedPoint> = groups
        .into_iter()
        .map(|(proportion, ranks)| {
            let mean_log =
                ranks.iter().map(|&r| f64::from(r).ln()).sum::<f64>() / ranks.len() as f64;
            BinnedPoint {
                gmean_rank: mean_log.exp(),
                proportion,
            }
        })
        .collect();
    binned.sort_by(|a, b| a.gmean_rank.partial_cmp(&b.gmean_rank).unwrap());
    binned
}

/// Fits the decreasing Hill curve to binned proportion points by grid
/// search plus one local refinement pass, minimizing plain squared error
/// (proportions include 0 and 1, so no log transform).
///
/// Needs at least 4 points spanning both sides of 0.5, otherwise the
/// midpoint is not identifiable.
pub fn fit_proportion_hill(
    binned: &[BinnedPoint],
    grid: &HillGrid,
) -> Result<(HillParams, f64)> {
    if binned.len() < 4 {
        return Err(Error::TooFewPoints {
            op: "fit_proportion_hill",
            needed: 4,
            got: binned.len(),
        });
    }
    if !binned.iter().any(|p| p.proportion > 0.5)
        || !binned.iter().any(|p| p.proportion < 0.5)
    {
        return Err(Error::Unidentifiable(
            "proportion points must span both sides of 0.5 to pin r_mid".into(),
        ));
    }
    let objective = |params: &HillParams| -> f64 {
        binned
            .iter()
            .map(|p| {
                let predicted = 1.0 / (1.0 + (p.gmean_rank / params.r_mid).powf(params.gamma));
                let d = predicted - p.proportion;
                d * d
            })
            .sum()
    };
    let scan = |grid: &HillGrid| -> (HillParams, f64) {
        let mut best: Option<(HillParams, f64)> = None;
        for &r_mid in &grid.r_mid {
            for &gamma in &grid.gamma {
                let params = HillParams { r_mid, gamma };
                let value = objective(&params);
                let better = match &best {
                    None => true,
                    Some((cur, cur_value)) => {
                        value < *cur_value
                            || (value == *cur_value && (r_mid, gamma) < (cur.r_mid, cur.gamma))
                    }
                };
                if better {
                    best = Some((params, value));
                }
            }
        }
        best.expect("non-empty grid")
    };
    if grid.r_mid.is_empty() || grid.gamma.is_empty() {
        return Err(Error::InvalidInput("empty Hill grid".into()));
    }
    let (coarse, _) = scan(grid);
    let refine = |center: f64, step: f64| -> Vec<f64> {
        (0..=20)
            .map(|k| center + step * (f64::from(k) - 10.0))
            .filter(|v| *v > 0.0)
            .collect()
    };
    let fine = HillGrid {
        r_mid: refine(coarse.r_mid, 0.1),
        gamma: refine(coarse.gamma, 0.005),
    };
    Ok(scan(&fine))
}

/// End-to-end validation: proportion curve, binned curve and Hill fit for a
/// set of already-ranked corpora.
pub struct ValidationReport {
    pub curve: ProportionCurve,
    pub binned: Vec<BinnedPoint>,
    pub params: HillParams,
    pub objective: f64,
}

/// Runs [`stopword_proportion`], [`geometric_mean_bins`] and
/// [`fit_proportion_hill`] with the default grid.
pub fn validate_selection_model(
    tables: &[RankFrequencyTable],
    list: &StopwordList,
    max_rank: u32,
) -> Result<ValidationReport> {
    let curve = stopword_proportion(tables, list, max_rank)?;
    let binned = geometric_mean_bins(&curve);
    let (params, objective) = fit_proportion_hill(&binned, &HillGrid::default())?;
    Ok(ValidationReport {
        curve,
        binned,
        params,
        objective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{count_tokens, rank};

    fn table_from(words: &[&str]) -> RankFrequencyTable {
        rank(count_tokens(words.iter().map(|w| w.to_string()).collect())).unwrap()
    }

    #[test]
    fn proportion_counts_agreeing_top_words() {
        let a = table_from(&["the", "the", "whale"]);
        let b = table_from(&["the", "the", "sea"]);
        let list = crate::stoplists::StopwordList::from_words("x", ["the"]);
        let curve = stopword_proportion(&[a, b], &list, 10).unwrap();
        assert_eq!(curve.points[0].rank, 1);
        assert_eq!(curve.points[0].proportion, 1.0);
        assert_eq!(curve.points[0].n_corpora, 2);
    }

    #[test]
    fn short_tables_leave_both_numerator_and_denominator() {
        let a = table_from(&["the", "the", "whale"]); // 2 types
        let b = table_from(&["the", "of", "sea", "sea", "deep"]); // 4 types
        let list = crate::stoplists::StopwordList::from_words("x", ["the", "of"]);
        let curve = stopword_proportion(&[a, b], &list, 10).unwrap();
        // Rank 3 exists only in the longer table.
        let p3 = &curve.points[2];
        assert_eq!(p3.n_corpora, 1);
        // Curve stops at the longest table.
        assert_eq!(curve.points.len(), 4);
    }

    #[test]
    fn proportion_requires_two_tables() {
        let a = table_from(&["the"]);
        let list = crate::stoplists::StopwordList::from_words("x", ["the"]);
        assert!(stopword_proportion(&[a], &list, 10).is_err());
        assert!(stopword_proportion(&[], &list, 10).is_err());
    }

    #[test]
    fn bins_merge_equal_proportions_at_geometric_mean() {
        let curve = ProportionCurve {
            points: vec![
                ProportionPoint {
                    rank: 10,
                    proportion: 0.5,
                    n_corpora: 2,
                },
                ProportionPoint {
                    rank: 40,
                    proportion: 0.5,
                    n_corpora: 2,
                },
            ],
        };
        let binned = geometric_mean_bins(&curve);
        assert_eq!(binned.len(), 1);
        approx::assert_relative_eq!(binned[0].gmean_rank, 20.0, epsilon = 1e-12);
        assert_eq!(binned[0].proportion, 0.5);
    }

    #[test]
    fn singleton_groups_pass_through() {
        let curve = ProportionCurve {
            points: vec![
                ProportionPoint {
                    rank: 3,
                    proportion: 1.0,
                    n_corpora: 2,
                },
                ProportionPoint {
                    rank: 7,
                    proportion: 0.25,
                    n_corpora: 2,
                },
            ],
        };
        let binned = geometric_mean_bins(&curve);
        assert_eq!(binned.len(), 2);
        approx::assert_relative_eq!(binned[0].gmean_rank, 3.0, epsilon = 1e-12);
        approx::assert_relative_eq!(binned[1].gmean_rank, 7.0, epsilon = 1e-12);
    }

    #[test]
    fn all_distinct_proportions_leave_curve_unchanged() {
        let points: Vec<ProportionPoint> = (1..=5)
            .map(|r| ProportionPoint {
                rank: r,
                proportion: 1.0 / f64::from(r + 1),
                n_corpora: 3,
            })
            .collect();
        let curve = ProportionCurve {
            points: points.clone(),
        };
        let binned = geometric_mean_bins(&curve);
        assert_eq!(binned.len(), points.len());
        for (b, p) in binned.iter().zip(&points) {
            approx::assert_relative_eq!(b.gmean_rank, f64::from(p.rank), epsilon = 1e-12);
            assert_eq!(b.proportion, p.proportion);
        }
    }

    #[test]
    fn bins_preserve_proportion_values_and_rank_bounds() {
        let points: Vec<ProportionPoint> = (1..=60)
            .map(|r| ProportionPoint {
                rank: r,
                proportion: f64::from(30 - (r as i32 - 30).unsigned_abs() as u32) / 30.0,
                n_corpora: 30,
            })
            .collect();
        let curve = ProportionCurve { points };
        let binned = geometric_mean_bins(&curve);
        let mut input_values: Vec<f64> =
            curve.points.iter().map(|p| p.proportion).collect();
        input_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        input_values.dedup();
        let mut output_values: Vec<f64> = binned.iter().map(|p| p.proportion).collect();
        output_values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(input_values, output_values);
        for b in &binned {
            let group: Vec<u32> = curve
                .points
                .iter()
                .filter(|p| p.proportion == b.proportion)
                .map(|p| p.rank)
                .collect();
            let lo = f64::from(*group.iter().min().unwrap());
            let hi = f64::from(*group.iter().max().unwrap());
            assert!(b.gmean_rank >= lo - 1e-9 && b.gmean_rank <= hi + 1e-9);
        }
    }

    #[test]
    fn hill_fit_round_trips_synthetic_proportions() {
        // Points generated exactly from the Hill curve at (75, 1.8).
        let truth = HillParams::new(75.0, 1.8).unwrap();
        let binned: Vec<BinnedPoint> = [2.0, 5.0, 12.0, 30.0, 75.0, 180.0, 400.0, 900.0]
            .iter()
            .map(|&r| BinnedPoint {
                gmean_rank: r,
                proportion: 1.0 / (1.0 + (r / truth.r_mid).powf(truth.gamma)),
            })
            .collect();
        let (fitted, objective) =
            fit_proportion_hill(&binned, &HillGrid::default()).unwrap();
        assert!((fitted.r_mid - 75.0).abs() < 0.2, "r_mid = {}", fitted.r_mid);
        assert!((fitted.gamma - 1.8).abs() < 0.01, "gamma = {}", fitted.gamma);
        assert!(objective < 1e-6);
    }

    #[test]
    fn fitted_curve_is_half_at_fitted_r_mid() {
        let truth = HillParams::new(60.0, 2.1).unwrap();
        let binned: Vec<BinnedPoint> = (0..8)
            .map(|k| {
                let r = 3.0 * 2.5f64.powi(k);
                BinnedPoint {
                    gmean_rank: r,
                    proportion: 1.0 / (1.0 + (r / truth.r_mid).powf(truth.gamma)),
                }
            })
            .collect();
        let (fitted, _) = fit_proportion_hill(&binned, &HillGrid::default()).unwrap();
        let at_mid = crate::selection::prob_selected(fitted.r_mid, &fitted).unwrap();
        assert_eq!(at_mid, 0.5);
    }

    #[test]
    fn constant_half_curve_is_unidentifiable() {
        let binned: Vec<BinnedPoint> = (1..=6)
            .map(|k| BinnedPoint {
                gmean_rank: f64::from(k * 10),
                proportion: 0.5,
            })
            .collect();
        assert!(matches!(
            fit_proportion_hill(&binned, &HillGrid::default()),
            Err(Error::Unidentifiable(_))
        ));
    }
}
