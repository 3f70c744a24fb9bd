//! Collocation data for a physics-informed network on the heat problem.
//!
//! Three CSV files: `initial.csv` (initial condition on 50 points),
//! `boundary.csv` (25 times on each boundary, `u = 0`) and `interior.csv`
//! (10000 Sobol points in `(0, 1) x (-1, 1)`, no targets). Each file starts
//! with a `# alpha=<value>` comment line so consumers solve the same PDE;
//! the readers here skip it.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::uniform_grid;
use crate::error::ReportError;
use crate::integrands::{sample_initial_condition, IntegrandVariant, QuarticParams};
use crate::sobol::Sobol2;

pub const INITIAL_POINTS: usize = 50;
pub const BOUNDARY_TIMES: usize = 25;
pub const INTERIOR_POINTS: usize = 10000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialRecord {
    pub x: f64,
    pub value: f64,
    pub variant: String,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    pub t: f64,
    pub x: f64,
    pub u: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteriorRecord {
    pub t: f64,
    pub x: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingData {
    pub alpha: f64,
    pub initial: Vec<InitialRecord>,
    pub boundary: Vec<BoundaryRecord>,
    pub interior: Vec<InteriorRecord>,
}

impl TrainingData {
    pub fn generate(
        variant: IntegrandVariant,
        p: &QuarticParams,
        digits: u32,
        alpha: f64,
    ) -> Result<Self, ReportError> {
        let grid = uniform_grid(-1.0, 1.0, INITIAL_POINTS);
        let initial = sample_initial_condition(variant, p, digits, &grid)?
            .into_iter()
            .map(|(x, value)| InitialRecord {
                x,
                value,
                variant: variant.regime_label().to_owned(),
                delta: p.delta(),
            })
            .collect();
        let times = uniform_grid(0.0, 1.0, BOUNDARY_TIMES);
        let boundary = [-1.0, 1.0]
            .iter()
            .flat_map(|&x| times.iter().map(move |&t| BoundaryRecord { t, x, u: 0.0 }))
            .collect();
        Ok(TrainingData {
            alpha,
            initial,
            boundary,
            interior: interior_points(INTERIOR_POINTS),
        })
    }

    /// Writes the three files into `dir` and returns their paths.
    pub fn write_dir(&self, dir: &Path) -> Result<[PathBuf; 3], ReportError> {
        std::fs::create_dir_all(dir)?;
        let paths = [dir.join("initial.csv"), dir.join("boundary.csv"), dir.join("interior.csv")];
        write_records(BufWriter::new(File::create(&paths[0])?), self.alpha, &self.initial)?;
        write_records(BufWriter::new(File::create(&paths[1])?), self.alpha, &self.boundary)?;
        write_records(BufWriter::new(File::create(&paths[2])?), self.alpha, &self.interior)?;
        Ok(paths)
    }

    pub fn read_dir(dir: &Path) -> Result<Self, ReportError> {
        let (alpha, initial) = read_records(File::open(dir.join("initial.csv"))?)?;
        let (_, boundary) = read_records(File::open(dir.join("boundary.csv"))?)?;
        let (_, interior) = read_records(File::open(dir.join("interior.csv"))?)?;
        Ok(TrainingData {
            alpha,
            initial,
            boundary,
            interior,
        })
    }
}

/// Sobol points mapped to `t = s1`, `x = 2 s2 - 1`. The origin of the
/// sequence would land on the corner `(0, -1)`, so it is skipped.
pub fn interior_points(n: usize) -> Vec<InteriorRecord> {
    let mut seq = Sobol2::new();
    seq.advance(1);
    seq.take(n)
        .map(|[s1, s2]| InteriorRecord { t: s1, x: 2.0 * s2 - 1.0 })
        .collect()
}

pub fn write_records<W: Write, T: Serialize>(mut w: W, alpha: f64, records: &[T]) -> Result<(), ReportError> {
    writeln!(w, "# alpha={alpha}")?;
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads records and the `alpha` recorded in the leading comment line.
pub fn read_records<R: Read, T: for<'de> Deserialize<'de>>(mut r: R) -> Result<(f64, Vec<T>), ReportError> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let alpha = text
        .lines()
        .find_map(|l| l.strip_prefix("# alpha="))
        .ok_or_else(|| ReportError::Parse("missing '# alpha=' header line".to_owned()))?
        .trim()
        .parse::<f64>()
        .map_err(|e| ReportError::Parse(e.to_string()))?;
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let records = reader.deserialize().collect::<Result<Vec<T>, _>>()?;
    Ok((alpha, records))
}
