//! Quantitative ping-pong: projective set descriptors, the sampled and analytic
//! certificate, and the combination-set builder.

mod check;
mod sets;
mod flag_sets;

pub use check::{
    check_pingpong, recheck_witness, spot_check_products, suggest_alpha, AnalyticSummary, Certificate, CheckKind,
    PingPongConfig, PingPongVerdict, ProductSpotCheck, Witness, DEFAULT_SAMPLES, MAX_WITNESSES, PINGPONG_CAVEAT,
};
pub use sets::{certified_disjoint, certified_subset, derive_seed, ProjectiveSet};
pub use flag_sets::{
    build_flag_sets, diagonal_schottky_config, transversality_margin, FlagSetParams, FlagSets, EPS_MAX,
};
