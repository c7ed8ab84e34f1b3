//! Command-line front end: data ingestion, single tests, power studies,
//! critical-value tables and the carbon fiber reproduction.

pub mod app;
pub mod ingest;
pub mod report;

pub use app::{main_with_args, Cli, EXIT_ERROR, EXIT_OK, EXIT_REJECT};
pub use ingest::{ingest, parse, write_sample, IngestError, InputDataset, ParseReport, Source};
pub use report::JsonReport;
