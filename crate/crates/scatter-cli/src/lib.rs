//! Batch front end: runs the scattering pipeline on a scenario file and
//! writes CSV tables and a JSON report.

pub mod error;
pub mod export;
pub mod report;
pub mod run;
pub mod stage;
pub mod table;

pub use error::CliError;
pub use report::RunReport;
pub use run::run_pipeline;
pub use stage::Stage;
