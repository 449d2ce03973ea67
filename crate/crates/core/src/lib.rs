pub mod fmt;
pub mod ingest;
pub mod lint;
pub mod metrics;
pub mod pipeline;
pub mod pyast;
pub mod stats;
pub mod store;

/// Scalar used for document-level real-valued metrics.
pub type Real = f64;

pub type SampleDescriptorF64 = stats::SampleDescriptor<f64>;
pub type TTestResultF64 = stats::TTestResult<f64>;
