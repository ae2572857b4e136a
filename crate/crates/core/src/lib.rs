//! Chained two-stage lossless compression over LZMA, Zstd, Brotli, Bzip2 and
//! LZ4HC, a self-describing `.hybc` container, a benchmark harness, and
//! weighted min-max efficiency ranking with CSV/JSON/Markdown/SVG reports.

pub mod cli;
pub mod codec;
pub mod corpus;
pub mod error;
pub mod exec;
pub mod harness;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod scoring;

pub use codec::{codec_params, compress_one, decompress_one, CodecConfig, CodecId};
pub use corpus::{classify_size, generate_synthetic, load_dataset, DatasetDescriptor, SizeClass};
pub use error::{Error, Result};
pub use exec::Execution;
pub use metrics::{compression_ratio, compression_speed, decompression_speed, measure, DsBasis, Measurement};
pub use pipeline::{
    compress_pipeline, decompress_pipeline, enumerate_pipelines, parse_header, ContainerHeader, PipelineSpec,
    HEADER_LEN,
};
pub use report::{emit_report, ReportFormat};
pub use scoring::{
    balance_table, component_frequency, efficiency_score, minmax_normalize, rank_pipelines, EfficiencyRow,
    Weights,
};
