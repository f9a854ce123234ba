//! Singular-value gap profiles over word balls, linear growth fits, index-set
//! estimates and limit-set sampling through Cartan attractors.

mod limit;
mod profile;
mod report;

pub use limit::{limit_set_sample, one_sided_hausdorff};
pub use profile::{
    fit_growth, gap_profile, index_set, index_set_from_profile, profile_words, qie_report, GapIndex,
    GapProfile, GrowthFit, IndexSetEstimate, Verdict, WordRecord, ESTIMATE_CAVEAT,
};
pub use report::{profile_csv, svg_scatter};
