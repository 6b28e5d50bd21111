//! Structure files, analysis driver and reports.

pub mod parse;
pub mod report;

pub use parse::{parse_structure, StructureFile};
pub use report::{run_report, Mode, Options, Report};
