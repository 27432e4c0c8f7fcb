//! Output-analysis procedures: descriptive statistics, Mann-Whitney U,
//! frequency histograms, t intervals and Bonferroni-adjusted comparisons.

pub mod descriptive;
pub mod histogram;
pub mod mann_whitney;
pub mod special;
pub mod ttest;

pub use descriptive::{descriptive, DescriptiveStats};
pub use histogram::{histogram, FrequencyHistogram};
pub use mann_whitney::{mann_whitney, MannWhitneyResult, MwMethod, DEFAULT_EXACT_THRESHOLD};
pub use ttest::{
    bonferroni_level, classify_ci, classify_interval, mean_ci, paired_t_ci, paired_t_ci_of,
    CiConclusion, MeanCi, PairedTCIResult,
};
