//! Independent eigensolvers used to check the closed forms: a 1D
//! Sturm–Liouville solver, the separated (modal) Jacobi spectrum built on
//! it, and a full 2D solver that does not separate variables.

mod full2d;
mod modal;
mod sturm;

pub use full2d::{eigenvalue_count_below, full_2d_jacobi_spectrum, refine_eigenpair, MAX_2D_NODES};
pub use modal::{
    discrete_modal_spectrum, modal_jacobi_grid, modal_jacobi_spectrum, relative_error, sturm_problem,
};
pub use sturm::{sturm_eigen, sturm_eigen_extrapolated, sturm_eigen_with_modes, EigenResult, RightBc, SturmProblem};
