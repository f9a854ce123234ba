//! Burnside spans, invariant subspaces, proximal data, the adjoint representation,
//! determinant genericity and block centralizers.

mod adjoint;
mod burnside;
mod genericity;
mod proximal;

use serde::{Deserialize, Serialize};

pub use adjoint::{adjoint_rep, trace_zero_basis};
pub use burnside::{
    burnside_span_dim, invariant_subspace_refute, zariski_density_heuristic, BurnsideReport, DensityReport,
    DensityVerdict, IrreducibilityReport, IrreducibilityVerdict, DENSITY_CAVEAT, REAL_IRREDUCIBILITY_CAVEAT,
};
pub use genericity::{
    conjugate_family, genericity_check, verify_conjugate_family, DetRow, GenericityFailure, GenericityReport,
    GenericitySide, GenericityVerdict,
};
pub use proximal::{proximal_data, rank_one_proximal, ProximalData, ProximalDoc};

use crate::constructions::{psi_centralizer_basis, rho_centralizer_basis, BlockSpec};
use crate::error::Result;
use crate::linalg::{Field, Mat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Rho,
    Psi,
}

/// Linear basis of the commutant of `rho_{p,r}` or `psi_{p,r}`.
pub fn centralizer_basis(spec: &BlockSpec, kind: BlockKind, field: Field) -> Result<Vec<Mat>> {
    spec.validate()?;
    match kind {
        BlockKind::Rho => Ok(rho_centralizer_basis(spec, field)),
        BlockKind::Psi => psi_centralizer_basis(spec, field),
    }
}
