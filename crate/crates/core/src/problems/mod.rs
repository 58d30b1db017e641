//! Model problems: semi-discretizations handed to the time-stepping engine.

mod convdiff;
mod diffreact;
mod grid;
mod manufactured;
mod q1;
pub mod richards;
mod van_genuchten;
mod vtk;

pub use convdiff::{ConvDiff, ConvDiffData, InflowProfile};
pub use diffreact::{DiffReact, DiffReactData};
pub use grid::StructuredGrid;
pub use manufactured::ManufacturedHeat;
pub use q1::Q1Space;
pub use richards::{Richards, RichardsData};
pub use van_genuchten::VanGenuchten;
pub use vtk::{write_vtk, FieldLocation};
