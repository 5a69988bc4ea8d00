pub mod analyze;
pub mod assign;
pub mod fit;
pub mod simulate;
pub mod sweep;

use std::path::PathBuf;

use regsir_core::dynamics::{ContactRateLaw, EpidemicParams};
use regsir_core::{sample_daily, Error, Trajectory};

use crate::output::Table;

/// Files to write, `None` meaning standard output.
pub type Outputs = Vec<(Option<PathBuf>, Vec<u8>)>;

pub fn no_endemic<L: ContactRateLaw + ?Sized>(law: &L, gamma: f64, c_s: f64) -> Error {
    let img = law.h_image();
    Error::NoEndemicState {
        value: law.g(gamma / c_s),
        lower: img.lower,
        upper: img.upper,
    }
}

/// Daily samples of a full-model run with the conserved total and the
/// incidence `c β S I`.
pub fn full_table(traj: &Trajectory<4>, params: &EpidemicParams) -> Result<Table, Error> {
    let daily = sample_daily(traj)?;
    let mut table = Table::new(&["t", "S", "I", "R", "beta", "total", "incidence"]);
    for (t, &[s, i, r, b]) in daily.iter() {
        table.push(vec![t, s, i, r, b, s + i + r, params.c * b * s * i]);
    }
    Ok(table)
}
