//! Seeded experiment runner and report emitter.

mod plot;
mod runners;
mod spec;
mod table;

use std::path::Path;
use std::str::FromStr;

pub use plot::render_svg;
pub use runners::{run, run_ber_curve, run_inversion_set, run_threshold_compare, run_wer_bec, run_wer_bsc};
pub use spec::{
    BecParams, BerParams, BscParams, ExperimentKind, ExperimentSpec, InversionSetParams, Params,
    ThresholdParams,
};
pub use table::{ResultTable, Row, CSV_HEADER};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Svg,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "svg" => Ok(OutputFormat::Svg),
            _ => Err(Error::Parse(format!("unknown format {s:?}"))),
        }
    }
}

pub fn render(table: &ResultTable, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Svg => Ok(render_svg(table, None)),
    }
}

/// Writes the table to `path` in the given format.
pub fn emit(table: &ResultTable, format: OutputFormat, path: &Path) -> Result<()> {
    std::fs::write(path, render(table, format)?)?;
    Ok(())
}
