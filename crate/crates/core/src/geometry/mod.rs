//! Cylinder configurations, grids, normal graphs and the discrete operators
//! living on them.

mod config;
mod grid;
mod jacobi;
mod obj;
mod surface;

pub use config::{Convexity, CylinderConfig, Scenario};
pub use grid::{build_grid, Grid, ScalarField, TMode};
pub use jacobi::{arc_operator_apply, index_form, jacobi_apply};
pub(crate) use jacobi::{assemble_symmetric, UnknownLayout};
pub use obj::write_obj;
pub use surface::{
    graph_mean_curvature, mean_curvature, normal_graph, unit_normal, SurfaceMesh,
    DEGENERACY_FRACTION,
};
pub(crate) use surface::{polar_mean_curvature, polar_tangents, rho_derivatives, AxisStencils, PolarJet};
