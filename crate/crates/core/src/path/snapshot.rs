//! CSV path snapshots: `k,alpha,x0,...,x{N-1},energy`, one row per image.
//!
//! Values are written with 17 significant digits, which round-trips `f64`
//! exactly.

use std::io::{BufRead, Write};

use super::DiscretePath;
use crate::error::{MepError, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T: Real> {
    pub path: DiscretePath<T>,
    pub energies: Vec<T>,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_snapshot<T: Real, W: Write>(mut w: W, path: &DiscretePath<T>, energies: &[T]) -> Result<()> {
    if energies.len() != path.len() {
        return Err(MepError::Dimension {
            expected: path.len(),
            got: energies.len(),
        });
    }
    let mut header = String::from("k,alpha");
    for i in 0..path.dim() {
        header.push_str(&format!(",x{i}"));
    }
    header.push_str(",energy");
    writeln!(w, "{header}")?;
    for (k, x) in path.images().enumerate() {
        let mut row = format!("{k},{}", fmt17(path.alpha(k).as_f64()));
        for v in x {
            row.push(',');
            row.push_str(&fmt17(v.as_f64()));
        }
        row.push(',');
        row.push_str(&fmt17(energies[k].as_f64()));
        writeln!(w, "{row}")?;
    }
    Ok(())
}

pub fn read_snapshot<T: Real, R: BufRead>(r: R) -> Result<Snapshot<T>> {
    let bad = |msg: String| MepError::Snapshot(msg);
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))??;
    let cols: Vec<&str> = header.trim().split(',').collect();
    if cols.len() < 4 || cols[0] != "k" || cols[1] != "alpha" || cols[cols.len() - 1] != "energy" {
        return Err(bad(format!("unexpected header '{header}'")));
    }
    let dim = cols.len() - 3;
    for (i, c) in cols[2..2 + dim].iter().enumerate() {
        if *c != format!("x{i}") {
            return Err(bad(format!("unexpected column '{c}'")));
        }
    }
    let mut coords = Vec::new();
    let mut energies = Vec::new();
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != cols.len() {
            return Err(bad(format!("row {row} has {} fields", fields.len())));
        }
        let k: usize = fields[0].parse().map_err(|_| bad(format!("row {row}: bad index")))?;
        if k != row {
            return Err(bad(format!("row {row} has index {k}")));
        }
        let parse = |s: &str| -> Result<T> {
            s.parse::<f64>()
                .map(T::lit)
                .map_err(|_| bad(format!("row {row}: bad number '{s}'")))
        };
        for f in &fields[2..2 + dim] {
            coords.push(parse(f)?);
        }
        energies.push(parse(fields[cols.len() - 1])?);
    }
    let path = DiscretePath::from_flat(dim, coords)?;
    path.check_distinct()?;
    Ok(Snapshot { path, energies })
}
