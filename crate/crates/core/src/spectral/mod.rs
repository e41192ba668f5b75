//! Dense linear algebra used by the oracle and the iterations.

pub mod eig;
pub mod expm;
pub mod modified;
pub mod projection;

pub use eig::{
    eig_dense, eigenvalues, left_null_eigvec, SpectralTriplets, Triplet, EIG_RESIDUAL_TOL,
};
pub use expm::matrix_exp;
pub use modified::{
    approx_modified_laplacian, gac_oracle, modified_laplacian, taylor_exp_series,
    ApproxModifiedLaplacian, DominantKind, GacReport, ModifiedLaplacian,
};
pub use projection::{
    dominant_2x2_magnitude, dominant_2x2_magnitude_real, project_f, project_g, subspace_dist_1d,
    subspace_dist_2d,
};
