//! Free products of free factors, reduced words, ball enumeration and
//! representation evaluation (float and exact rational).

mod ball;
mod exact;
mod rep;
mod word;

pub use ball::{
    ball_size, enumerate_ball, enumerate_ball_over, freeness_check_exact, map_ball, sphere_size,
    Ball, FreenessReport,
};
pub use exact::{format_rational, parse_rational, RatMat};
pub use rep::{Factor, Generator, Rep, ScaledMat, EXACT_AGREEMENT_TOL};
pub use word::{FactorSpec, FreeProduct, Letter, Syllable, Word};
