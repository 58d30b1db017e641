//! Legacy ASCII VTK output on structured grids.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{mismatch, Result};
use crate::problems::StructuredGrid;

/// Where a field lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldLocation {
    Cells,
    Vertices,
}

/// Writes scalar fields as `STRUCTURED_POINTS`.
pub fn write_vtk(
    path: &Path,
    grid: &StructuredGrid,
    location: FieldLocation,
    fields: &[(&str, &[f64])],
) -> Result<()> {
    let expected = match location {
        FieldLocation::Cells => grid.n_cells(),
        FieldLocation::Vertices => grid.n_vertices(),
    };
    for (_, values) in fields {
        if values.len() != expected {
            return Err(mismatch("write_vtk", expected, values.len()));
        }
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "blockstep")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {} {} 1", grid.nx + 1, grid.ny + 1)?;
    writeln!(w, "ORIGIN 0 0 0")?;
    writeln!(w, "SPACING {} {} 1", grid.hx(), grid.hy())?;
    let tag = match location {
        FieldLocation::Cells => "CELL_DATA",
        FieldLocation::Vertices => "POINT_DATA",
    };
    writeln!(w, "{tag} {expected}")?;
    for (name, values) in fields {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in values.iter() {
            writeln!(w, "{v:e}")?;
        }
    }
    w.flush()?;
    Ok(())
}
