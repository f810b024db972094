//! Sound-hard forward scattering: boundary mesh, single-layer solver and the
//! disc series oracle.

pub mod disc;
pub mod mesh;
pub mod solver;

pub use disc::{disc_series_solution, DiscSeries};
pub use mesh::{build_mesh, build_mesh_for, BoundaryMesh, MeshNode, Panel};
pub use solver::{solve_scattering, BoundaryOperator, ScatterSolution, SolveDiagnostics};
