//! Rank-frequency analysis of text corpora.
//!
//! The crate covers the full pipeline from raw text to the subset-selection
//! model of stopword statistics:
//!
//! * [`corpus`] — tokenization, token counting, rank-frequency tables, and
//!   partitioning a table by a stopword list;
//! * [`stoplists`] — three bundled English stopword lists plus set algebra;
//! * [`sampling`] — log-evenly spaced rank subsets for fitting;
//! * [`fitting`] — Zipf, quadratic, BRF and Mandelbrot fits in log-log
//!   space, with adjusted R² model comparison;
//! * [`selection`] — the Hill-function selection model: probabilities,
//!   cumulative expected ranks, grid fitting, integer-crossing simulation;
//! * [`validation`] — estimating the selection probability directly from a
//!   collection of corpora and fitting the Hill curve to it.

pub mod corpus;
pub mod error;
pub mod fitting;
pub mod sampling;
pub mod selection;
pub mod stoplists;
pub mod validation;

pub use corpus::{
    count_tokens, load_text, partition, rank, rank_frequency_from_text, tokenize, Partitioned,
    RankFrequencyTable, RankMapping, RankRecord, TokenCountTable, TokenizationRules,
};
pub use error::{Error, Result};
pub use fitting::{
    compare_models, default_mandelbrot_grid, fit_brf, fit_mandelbrot, fit_quadratic, fit_zipf,
    grid_search, linear_least_squares, FitInput, FitModel, FitParams, FitResult,
};
pub use sampling::{log_even_ranks, log_even_ranks_default};
pub use selection::{
    cumulative_new_rank, cumulative_nonstop_rank, fit_hill, fit_hill_refined, hill_objective,
    predicted_beta, prob_not_selected, prob_selected, simulate_subset, CumulativeMethod,
    HillGrid, HillParams, SelectionMode, SimulatedSubset, SyntheticZipfPopulation,
};
pub use stoplists::{bundled, difference, intersect, load_list, save_list, union, StopwordList};
pub use validation::{
    fit_proportion_hill, geometric_mean_bins, stopword_proportion, validate_selection_model,
    BinnedPoint, ProportionCurve, ProportionPoint, ValidationReport,
};
