//! Timed pipeline runs and the three raw metrics: compression ratio,
//! compression speed and decompression speed.
//!
//! MB means 2^20 bytes everywhere. Timed regions cover only in-memory
//! compress/decompress calls; a process-wide lock keeps two measurements from
//! overlapping.

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{compress_pipeline, decompress_pipeline, PipelineSpec};

pub const BYTES_PER_MB: f64 = 1_048_576.0;

static MEASUREMENT_LOCK: Mutex<()> = Mutex::new(());

/// Smallest duration a timed phase may report; guards against a zero reading
/// from a coarse clock.
const MIN_PHASE: Duration = Duration::from_nanos(1);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub pipeline: PipelineSpec,
    pub dataset: String,
    pub original_bytes: u64,
    /// Full container length, header included.
    pub compressed_bytes: u64,
    /// Median over `repetitions`.
    pub compress_seconds: f64,
    /// Median over `repetitions`.
    pub decompress_seconds: f64,
    pub repetitions: usize,
}

/// Which size the decompression speed is computed from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DsBasis {
    #[default]
    Compressed,
    Original,
}

impl fmt::Display for DsBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DsBasis::Compressed => "compressed",
            DsBasis::Original => "original",
        })
    }
}

impl FromStr for DsBasis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "compressed" => Ok(DsBasis::Compressed),
            "original" => Ok(DsBasis::Original),
            other => Err(format!("unknown ds basis {other:?} (expected compressed|original)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Compress,
    Decompress,
}

/// Time `spec` on `data`, `repetitions` times per phase after one untimed warm-up.
pub fn measure(
    spec: &PipelineSpec,
    dataset: &str,
    data: &[u8],
    repetitions: usize,
) -> Result<Measurement> {
    measure_with_hook(spec, dataset, data, repetitions, |_, _| {})
}

/// Like [`measure`], but `hook(phase, repetition)` runs inside each timed region.
/// Used by tests to inject slow repetitions.
pub fn measure_with_hook<F>(
    spec: &PipelineSpec,
    dataset: &str,
    data: &[u8],
    repetitions: usize,
    mut hook: F,
) -> Result<Measurement>
where
    F: FnMut(Phase, usize),
{
    if repetitions == 0 {
        return Err(Error::ZeroRepetitions);
    }
    let _guard = MEASUREMENT_LOCK.lock().unwrap_or_else(|p| p.into_inner());

    let container = compress_pipeline(spec, data)?;
    check_round_trip(spec, data, &decompress_pipeline(&container)?, 0)?;

    let mut compress_times = Vec::with_capacity(repetitions);
    let mut decompress_times = Vec::with_capacity(repetitions);
    let mut compressed_bytes = container.len() as u64;
    for rep in 0..repetitions {
        let start = Instant::now();
        hook(Phase::Compress, rep);
        let container = compress_pipeline(spec, data)?;
        compress_times.push(start.elapsed().max(MIN_PHASE).as_secs_f64());

        let start = Instant::now();
        hook(Phase::Decompress, rep);
        let restored = decompress_pipeline(&container)?;
        decompress_times.push(start.elapsed().max(MIN_PHASE).as_secs_f64());

        check_round_trip(spec, data, &restored, rep + 1)?;
        compressed_bytes = container.len() as u64;
    }

    Ok(Measurement {
        pipeline: *spec,
        dataset: dataset.to_string(),
        original_bytes: data.len() as u64,
        compressed_bytes,
        compress_seconds: median(&mut compress_times),
        decompress_seconds: median(&mut decompress_times),
        repetitions,
    })
}

fn check_round_trip(spec: &PipelineSpec, data: &[u8], restored: &[u8], rep: usize) -> Result<()> {
    if restored != data {
        return Err(Error::RoundTripMismatch {
            pipeline: spec.to_string(),
            repetition: rep,
        });
    }
    Ok(())
}

/// Median of a non-empty sample; mean of the middle pair for even lengths.
pub fn median(samples: &mut [f64]) -> f64 {
    assert!(!samples.is_empty(), "median of empty sample");
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2.0
    }
}

/// original / compressed, unit-free.
pub fn compression_ratio(m: &Measurement) -> Result<f64> {
    if m.compressed_bytes == 0 {
        return Err(Error::DivisionDomain("compression ratio"));
    }
    Ok(m.original_bytes as f64 / m.compressed_bytes as f64)
}

/// Original MB per second of compression time.
pub fn compression_speed(m: &Measurement) -> Result<f64> {
    if !m.compress_seconds.is_finite() || m.compress_seconds <= 0.0 {
        return Err(Error::DivisionDomain("compression speed"));
    }
    Ok(m.original_bytes as f64 / BYTES_PER_MB / m.compress_seconds)
}

/// MB per second of decompression time, sized by `basis`.
pub fn decompression_speed(m: &Measurement, basis: DsBasis) -> Result<f64> {
    if !m.decompress_seconds.is_finite() || m.decompress_seconds <= 0.0 {
        return Err(Error::DivisionDomain("decompression speed"));
    }
    let bytes = match basis {
        DsBasis::Compressed => m.compressed_bytes,
        DsBasis::Original => m.original_bytes,
    };
    Ok(bytes as f64 / BYTES_PER_MB / m.decompress_seconds)
}
