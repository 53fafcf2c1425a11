//! Axisymmetric Q8 finite elements on the meridian section.

pub mod assembly;
pub mod dirichlet;
pub mod mesh;
pub mod q8;
pub mod solver;
pub mod sparse;

pub use assembly::{assemble, assemble_tl, assemble_ul, Assembly, ElemStates, Formulation, GpState, Model};
pub use dirichlet::{apply_dirichlet, benchmark_bcs, DirichletSet};
pub use mesh::{gen_cylinder_mesh, MeshAxi};
pub use solver::{linearise, nr_solve, run_steps, Linearisation, NrOutcome, NrReport, NrSettings, StepControl, StepRecord};
pub use sparse::{BandLu, CsrMatrix};
