//! Benchmark matrix: datasets x pipelines.
//!
//! Timed measurements run one at a time. Untimed work (container size sweeps,
//! round-trip verification, per-dataset ranking) fans out through [`exec`].
//!
//! [`exec`]: crate::exec

use serde::{Deserialize, Serialize};

use crate::corpus::{DatasetDescriptor, SizeClass};
use crate::error::Result;
use crate::exec::{self, Execution};
use crate::metrics::{self, DsBasis, Measurement};
use crate::pipeline::{compress_pipeline, decompress_pipeline, PipelineSpec};
use crate::scoring::{rank_pipelines, EfficiencyRow, Weights};

#[derive(Debug, Clone)]
pub struct Dataset {
    pub descriptor: DatasetDescriptor,
    pub bytes: Vec<u8>,
}

impl Dataset {
    pub fn from_bytes(name: &str, bytes: Vec<u8>) -> Result<Self> {
        Ok(Dataset {
            descriptor: DatasetDescriptor::describe(name, &bytes)?,
            bytes,
        })
    }

    pub fn name(&self) -> &str {
        &self.descriptor.name
    }
}

/// Container size for one (dataset, pipeline) cell, round trip verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub dataset: String,
    pub pipeline: PipelineSpec,
    pub original_bytes: u64,
    pub compressed_bytes: u64,
    pub round_trip_ok: bool,
}

impl SweepRow {
    pub fn ratio(&self) -> f64 {
        self.original_bytes as f64 / self.compressed_bytes as f64
    }
}

pub fn sweep_cell(dataset: &Dataset, spec: &PipelineSpec) -> Result<SweepRow> {
    let container = compress_pipeline(spec, &dataset.bytes)?;
    let restored = decompress_pipeline(&container)?;
    Ok(SweepRow {
        dataset: dataset.name().to_string(),
        pipeline: *spec,
        original_bytes: dataset.bytes.len() as u64,
        compressed_bytes: container.len() as u64,
        round_trip_ok: restored == dataset.bytes,
    })
}

/// Untimed compress + decompress of every cell, dataset-major order.
pub fn sweep(datasets: &[Dataset], pipelines: &[PipelineSpec], mode: Execution) -> Vec<Result<SweepRow>> {
    let cells: Vec<(&Dataset, &PipelineSpec)> = datasets
        .iter()
        .flat_map(|d| pipelines.iter().map(move |p| (d, p)))
        .collect();
    exec::map(&cells, mode, |(d, p)| sweep_cell(d, p))
}

/// One row of the measurement matrix; failed cells keep their error text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub dataset: String,
    pub size_class: SizeClass,
    pub pipeline: PipelineSpec,
    pub measurement: Option<Measurement>,
    pub error: Option<String>,
}

impl BenchRecord {
    pub fn is_ok(&self) -> bool {
        self.measurement.is_some()
    }
}

/// Time every cell, one measurement at a time. A failing cell becomes an error
/// record and the run continues.
pub fn run_measurements(
    datasets: &[Dataset],
    pipelines: &[PipelineSpec],
    repetitions: usize,
    mut progress: impl FnMut(&BenchRecord),
) -> Vec<BenchRecord> {
    let mut out = Vec::with_capacity(datasets.len() * pipelines.len());
    for d in datasets {
        for p in pipelines {
            let rec = match metrics::measure(p, d.name(), &d.bytes, repetitions) {
                Ok(m) => BenchRecord {
                    dataset: d.name().to_string(),
                    size_class: d.descriptor.size_class,
                    pipeline: *p,
                    measurement: Some(m),
                    error: None,
                },
                Err(e) => BenchRecord {
                    dataset: d.name().to_string(),
                    size_class: d.descriptor.size_class,
                    pipeline: *p,
                    measurement: None,
                    error: Some(e.to_string()),
                },
            };
            progress(&rec);
            out.push(rec);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetRanking {
    pub dataset: String,
    pub rows: Vec<EfficiencyRow>,
}

/// Rank each dataset's successful measurements as its own cohort.
/// Datasets appear in order of first appearance in `records`.
pub fn rank_records(
    records: &[BenchRecord],
    weights: &Weights,
    basis: DsBasis,
    mode: Execution,
) -> Result<Vec<DatasetRanking>> {
    let mut cohorts: Vec<(String, Vec<Measurement>)> = Vec::new();
    for r in records {
        let Some(m) = &r.measurement else { continue };
        match cohorts.iter_mut().find(|(d, _)| *d == r.dataset) {
            Some((_, ms)) => ms.push(m.clone()),
            None => cohorts.push((r.dataset.clone(), vec![m.clone()])),
        }
    }
    exec::map(&cohorts, mode, |(dataset, ms)| {
        Ok(DatasetRanking {
            dataset: dataset.clone(),
            rows: rank_pipelines(ms, weights, basis)?,
        })
    })
    .into_iter()
    .collect()
}
