use std::io::{self, Write};

use super::ComplexGrid;
use crate::scalar::Real;

/// Writes `x1,x2,re,im` rows, one per sample, for plotting.
pub fn write_csv<T: Real, W: Write>(grid: &ComplexGrid<T>, mut out: W) -> io::Result<()> {
    writeln!(out, "x1,x2,re,im")?;
    for (x, v) in grid.samples() {
        writeln!(out, "{},{},{:e},{:e}", x.re, x.im, v.re, v.im)?;
    }
    Ok(())
}
