//! Field and summary writers: CSV (cell centers, row-major, full `f64`
//! precision) and legacy-VTK structured points with inactive bounding-box
//! cells masked by a blanking value.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::equilibrium::EquilibriumSolution;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{Grid, RegionPartition};

/// Value written for inactive bounding-box cells in VTK output.
pub const VTK_BLANK: f64 = -9999.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldFormat {
    Csv,
    Vtk,
}

impl FieldFormat {
    pub fn extension(self) -> &'static str {
        match self {
            FieldFormat::Csv => "csv",
            FieldFormat::Vtk => "vtk",
        }
    }
}

impl std::str::FromStr for FieldFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(FieldFormat::Csv),
            "vtk" => Ok(FieldFormat::Vtk),
            other => Err(Error::Scenario(format!("unknown output format `{other}`"))),
        }
    }
}

/// CSV rows `x,y,value` over active cells in row-major order, 17 significant
/// digits so values round-trip bitwise.
pub fn field_to_csv(field: &Field, grid: &Grid) -> String {
    let mut out = String::with_capacity(field.len() * 64);
    out.push_str("x,y,value\n");
    for c in 0..grid.n_cells() {
        let (x, y) = grid.cell_center(c);
        let _ = writeln!(out, "{x:.16e},{y:.16e},{:.16e}", field[c]);
    }
    out
}

/// Parse a CSV file produced by [`field_to_csv`] back into a field; the rows
/// must match the grid's active cells in order.
pub fn field_from_csv(text: &str, grid: &Grid) -> Result<Field> {
    let mut values = Vec::with_capacity(grid.n_cells());
    for (ln, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Scenario(format!("csv line {}: expected 3 columns", ln + 1)));
        }
        let value: f64 = cols[2]
            .trim()
            .parse()
            .map_err(|e| Error::Scenario(format!("csv line {}: {e}", ln + 1)))?;
        values.push(value);
    }
    if values.len() != grid.n_cells() {
        return Err(Error::Scenario(format!(
            "csv has {} rows for {} active cells",
            values.len(),
            grid.n_cells()
        )));
    }
    Ok(Field::from_vec(values))
}

/// Legacy-VTK structured points with one cell-data scalar. Inactive cells of
/// the bounding box carry [`VTK_BLANK`].
pub fn field_to_vtk(field: &Field, grid: &Grid, name: &str) -> String {
    let (x0, y0) = grid.origin();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    let _ = writeln!(out, "{name}");
    out.push_str("ASCII\nDATASET STRUCTURED_POINTS\n");
    let _ = writeln!(out, "DIMENSIONS {} {} 1", grid.nx() + 1, grid.ny() + 1);
    let _ = writeln!(out, "ORIGIN {x0:.16e} {y0:.16e} 0");
    let _ = writeln!(out, "SPACING {:.16e} {:.16e} 1", grid.hx(), grid.hy());
    let _ = writeln!(out, "CELL_DATA {}", grid.nx() * grid.ny());
    let _ = writeln!(out, "SCALARS {name} double 1");
    out.push_str("LOOKUP_TABLE default\n");
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let v = grid.compact_at(i, j).map_or(VTK_BLANK, |c| field[c]);
            let _ = writeln!(out, "{v:.16e}");
        }
    }
    out
}

pub fn write_field(
    field: &Field,
    grid: &Grid,
    format: FieldFormat,
    name: &str,
    path: &Path,
) -> Result<()> {
    let text = match format {
        FieldFormat::Csv => field_to_csv(field, grid),
        FieldFormat::Vtk => field_to_vtk(field, grid, name),
    };
    fs::write(path, text)?;
    Ok(())
}

/// Per-player summary table: `player,w,mean_u,max_u,argmax_x,argmax_y,mean_Pss`.
pub fn summary_csv(eq: &EquilibriumSolution, partition: &RegionPartition, grid: &Grid) -> String {
    let mut out = String::from("player,w,mean_u,max_u,argmax_x,argmax_y,mean_Pss\n");
    for i in 0..partition.players() {
        let mean_u = partition.region_mean(i, &eq.u[i]);
        let (argmax, (ax, ay)) = partition.region_argmax(i, &eq.u[i], grid);
        let max_u = eq.u[i][argmax];
        let mean_pss = partition.region_mean(i, &eq.p_ss);
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            i + 1,
            eq.w[i],
            mean_u,
            max_u,
            ax,
            ay,
            mean_pss
        );
    }
    out
}

/// Trajectory diagnostics: per step, the region means of the stock.
pub fn trajectory_csv(traj: &crate::simulation::Trajectory, players: usize) -> String {
    let mut out = String::from("t");
    for i in 0..players {
        let _ = write!(out, ",mean_P_{}", i + 1);
    }
    out.push('\n');
    for (k, &t) in traj.times.iter().enumerate() {
        let _ = write!(out, "{t:.6}");
        for i in 0..players {
            let _ = write!(out, ",{:.16e}", traj.region_means[k][i]);
        }
        out.push('\n');
    }
    out
}
