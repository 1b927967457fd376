//! Plain-text persistence for sectors, verification documents and statistics
//! reports.
//!
//! Floating-point values are written with 17 significant digits, which is
//! enough for every `f64` to read back bit-exactly.

mod number;
mod report;
mod spectrum_file;
mod verification;

pub use number::{format_f64, format_sci};
pub use report::{
    read_table, read_table_file, write_stats_report, write_table, Delta3Section, FitSection, LsdSection, RatioSection, SelectionSection,
    SourceSection, StatsReport, Table, UnfoldingSection, REPORT_FORMAT_VERSION,
};
pub use spectrum_file::{read_sector, read_sector_file, write_sector, write_sector_file, SPECTRUM_FORMAT_VERSION};
pub use verification::{
    read_document, write_document, ModelSection, NewLevel, PairResult, SaturationDocument, SymmetryDocument,
    VERIFICATION_FORMAT_VERSION,
};
