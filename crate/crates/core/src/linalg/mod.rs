//! Scalars, dense matrices, singular/eigen decompositions, Cartan attractors
//! and the angle metric on projective space.

mod decomp;
mod jacobi;
mod estimates;
mod mat;
mod quaternion;
pub mod random;
mod subspace;

pub use decomp::{
    cartan_attractor, moduli_of_eigenvalues, null_space, numeric_rank, orthonormal_columns,
    singular_values, svd, SvdResult,
};
pub(crate) use decomp::{eigenvalues, smallest_right_singular_vector};
pub use estimates::{
    contraction_bound_check, near_identity_displacement_check, quasi_uniform_lines, BoundCheck,
    DisplacementCheck, DISPLACEMENT_SAMPLES,
};
pub use mat::{Field, Mat};
pub use quaternion::Quaternion;
pub use subspace::{
    dist_to_subspace, proj_metric, unit_line_distance, unit_subspace_distance, Flag, Subspace,
};

/// Complex scalar (pair of doubles). Real matrices store zero imaginary parts.
pub type C64 = num_complex::Complex64;

pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

#[inline]
pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Euclidean norm of a complex vector.
#[inline]
pub fn vnorm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product `<a, b> = sum conj(a_i) b_i`.
#[inline]
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}
