//! Instance formats and run-time budget schedules.

mod budget;
mod json;
mod orlib;

pub use budget::{budget_for, ProblemKind};
pub use json::{
    parse_mip, parse_portfolio, parse_tdtsp, parse_tdtsp_with_warnings, write_mip, write_portfolio,
    write_tdtsp, TDTSP_SCHEMA_VERSION,
};
pub use orlib::{format_orlib_portfolio, parse_orlib_portfolio, OrLibPortfolio};

use std::path::Path;

use crate::error::Result;

pub fn read_to_string(path: impl AsRef<Path>) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}
