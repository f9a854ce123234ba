//! Block constructions, the quaternionic realization, the second exterior power and
//! the explicit test families.

mod blocks;
pub mod families;
mod quat;
mod wedge;

pub use blocks::{
    centralizer_orbit_dim, make_phi, make_phi_exact, make_psi, make_rho, psi_centralizer_basis,
    rho_centralizer_basis, BlockSpec,
};
pub use quat::{tau, tau_scalar, QuatMat3};
pub use wedge::{
    sp21_generator, sp21_limit_point, sp21_normal, sp21_rep, sp21_transverse_flag, sp21_vectors,
    exterior_square, random_sphere_point, wedge, wedge_index, wedge_pairs,
};
