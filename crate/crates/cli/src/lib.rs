//! Experiment harness for the quad-curl IPDG discretization: eigenvalue
//! studies written as long-format CSV, SVG error plots and the published
//! reference values.

pub mod csv;
pub mod plot;
pub mod reference;
pub mod study;

pub use csv::{read_study_csv, write_study_csv, StudyRow, SweepParam, STUDY_HEADER};
pub use plot::{emit_plot, svg_geometry};
pub use study::{dg_dofs, hanging_demo_mesh, parse_domain, run_study, solve_point, MeshKind, PointResult, StudyConfig, Sweep};
