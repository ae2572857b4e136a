//! Min-max normalization, the weighted efficiency score, rankings and the
//! derived analyses built on them (component frequency, ratio/speed balance).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::codec::CodecId;
use crate::corpus::{classify_size, SizeClass};
use crate::error::{Error, Result};
use crate::metrics::{
    compression_ratio, compression_speed, decompression_speed, DsBasis, Measurement,
};
use crate::pipeline::PipelineSpec;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    cr: f64,
    cs: f64,
    ds: f64,
}

impl Weights {
    pub fn new(cr: f64, cs: f64, ds: f64) -> Result<Self> {
        let in_unit = |w: f64| (0.0..=1.0).contains(&w);
        if !(in_unit(cr) && in_unit(cs) && in_unit(ds))
            || ((cr + cs + ds) - 1.0).abs() > WEIGHT_SUM_TOLERANCE
        {
            return Err(Error::InvalidWeights { cr, cs, ds });
        }
        Ok(Weights { cr, cs, ds })
    }

    pub fn cr(&self) -> f64 {
        self.cr
    }

    pub fn cs(&self) -> f64 {
        self.cs
    }

    pub fn ds(&self) -> f64 {
        self.ds
    }
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            cr: 0.40,
            cs: 0.30,
            ds: 0.30,
        }
    }
}

impl std::str::FromStr for Weights {
    type Err = String;

    /// `cr,cs,ds`, e.g. `0.4,0.3,0.3`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<std::result::Result<_, _>>()?;
        match parts[..] {
            [cr, cs, ds] => Weights::new(cr, cs, ds).map_err(|e| e.to_string()),
            _ => Err(format!("expected three comma-separated weights, got {}", parts.len())),
        }
    }
}

/// Raw metrics for one pipeline on one dataset, before normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawMetrics {
    pub pipeline: PipelineSpec,
    pub dataset: String,
    pub size_class: Option<SizeClass>,
    pub cr: f64,
    pub cs: f64,
    pub ds: f64,
}

impl RawMetrics {
    pub fn from_measurement(m: &Measurement, basis: DsBasis) -> Result<Self> {
        Ok(RawMetrics {
            pipeline: m.pipeline,
            dataset: m.dataset.clone(),
            size_class: Some(classify_size(m.original_bytes)),
            cr: compression_ratio(m)?,
            cs: compression_speed(m)?,
            ds: decompression_speed(m, basis)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyRow {
    pub pipeline: PipelineSpec,
    pub dataset: String,
    pub size_class: Option<SizeClass>,
    pub cr: f64,
    pub cs: f64,
    pub ds: f64,
    pub cr_norm: f64,
    pub cs_norm: f64,
    pub ds_norm: f64,
    pub efficiency: f64,
}

/// `(x - min) / (max - min)` per element; 0.5 everywhere when all values are equal.
pub fn minmax_normalize(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("minmax_normalize"));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(i));
    }
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if max == min {
        return Ok(vec![0.5; values.len()]);
    }
    let span = max - min;
    Ok(values.iter().map(|&v| ((v - min) / span).clamp(0.0, 1.0)).collect())
}

pub fn efficiency_score(cr_norm: f64, cs_norm: f64, ds_norm: f64, w: &Weights) -> Result<f64> {
    for v in [cr_norm, cs_norm, ds_norm] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::DomainError { value: v });
        }
    }
    let e = w.cr * cr_norm + w.cs * cs_norm + w.ds * ds_norm;
    Ok(e.clamp(0.0, 1.0))
}

/// Score and sort one dataset's measurements.
pub fn rank_pipelines(rows: &[Measurement], w: &Weights, basis: DsBasis) -> Result<Vec<EfficiencyRow>> {
    let raw = rows
        .iter()
        .map(|m| RawMetrics::from_measurement(m, basis))
        .collect::<Result<Vec<_>>>()?;
    rank_raw(raw, w)
}

/// Normalize each metric within the cohort, score, and sort descending by
/// efficiency with ties broken by ascending display name.
pub fn rank_raw(rows: Vec<RawMetrics>, w: &Weights) -> Result<Vec<EfficiencyRow>> {
    if rows.len() < 2 {
        return Err(Error::CohortTooSmall(rows.len()));
    }
    if let Some(other) = rows.iter().find(|r| r.dataset != rows[0].dataset) {
        return Err(Error::MixedCohort(rows[0].dataset.clone(), other.dataset.clone()));
    }
    let column = |f: fn(&RawMetrics) -> f64| minmax_normalize(&rows.iter().map(f).collect::<Vec<_>>());
    let cr_norm = column(|r| r.cr)?;
    let cs_norm = column(|r| r.cs)?;
    let ds_norm = column(|r| r.ds)?;

    let mut out = rows
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(EfficiencyRow {
                efficiency: efficiency_score(cr_norm[i], cs_norm[i], ds_norm[i], w)?,
                cr_norm: cr_norm[i],
                cs_norm: cs_norm[i],
                ds_norm: ds_norm[i],
                pipeline: r.pipeline,
                dataset: r.dataset,
                size_class: r.size_class,
                cr: r.cr,
                cs: r.cs,
                ds: r.ds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(compare_rows);
    Ok(out)
}

fn compare_rows(a: &EfficiencyRow, b: &EfficiencyRow) -> Ordering {
    b.efficiency
        .total_cmp(&a.efficiency)
        .then_with(|| a.pipeline.to_string().cmp(&b.pipeline.to_string()))
}

/// How pipelines contribute to codec counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountingRule {
    /// Singles count once, hybrids count each member once.
    #[default]
    AllRows,
    /// Only hybrid rows are counted.
    HybridsOnly,
}

/// Codec appearances across the first `k` rows of every dataset group.
/// Groups are taken in order of first appearance; rows within a group are
/// assumed already ranked.
pub fn component_frequency(top_rows: &[EfficiencyRow], k: usize) -> BTreeMap<CodecId, usize> {
    component_frequency_with(top_rows, k, CountingRule::AllRows)
}

pub fn component_frequency_with(
    top_rows: &[EfficiencyRow],
    k: usize,
    rule: CountingRule,
) -> BTreeMap<CodecId, usize> {
    let mut groups: Vec<(&str, Vec<&PipelineSpec>)> = Vec::new();
    for row in top_rows {
        match groups.iter_mut().find(|(d, _)| *d == row.dataset) {
            Some((_, specs)) => specs.push(&row.pipeline),
            None => groups.push((&row.dataset, vec![&row.pipeline])),
        }
    }
    count_components(
        groups.iter().flat_map(|(_, specs)| specs.iter().take(k).copied()),
        rule,
    )
}

pub fn count_components<'a>(
    specs: impl IntoIterator<Item = &'a PipelineSpec>,
    rule: CountingRule,
) -> BTreeMap<CodecId, usize> {
    let mut counts: BTreeMap<CodecId, usize> = CodecId::ALL.iter().map(|&c| (c, 0)).collect();
    for spec in specs {
        if rule == CountingRule::HybridsOnly && !spec.is_hybrid() {
            continue;
        }
        for codec in spec.stages() {
            *counts.entry(codec).or_default() += 1;
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalancePoint {
    pub pipeline: PipelineSpec,
    pub dataset: String,
    pub cr: f64,
    pub cs: f64,
}

/// (CR, CS) per row, sorted by CR descending.
pub fn balance_table(rows: &[EfficiencyRow]) -> Vec<BalancePoint> {
    let mut out: Vec<BalancePoint> = rows
        .iter()
        .map(|r| BalancePoint {
            pipeline: r.pipeline,
            dataset: r.dataset.clone(),
            cr: r.cr,
            cs: r.cs,
        })
        .collect();
    out.sort_by(|a, b| {
        b.cr.total_cmp(&a.cr)
            .then_with(|| a.pipeline.to_string().cmp(&b.pipeline.to_string()))
    });
    out
}

/// The chosen pipeline plus every single-codec row, in ranked order.
pub fn head_to_head(rows: &[EfficiencyRow], pipeline: &PipelineSpec) -> Vec<EfficiencyRow> {
    rows.iter()
        .filter(|r| r.pipeline == *pipeline || !r.pipeline.is_hybrid())
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(name: &str, cr: f64, cs: f64, ds: f64) -> RawMetrics {
        RawMetrics {
            pipeline: name.parse().unwrap(),
            dataset: "d".into(),
            size_class: None,
            cr,
            cs,
            ds,
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(minmax_normalize(&[10.0, 20.0, 30.0]).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(minmax_normalize(&[5.0, 5.0, 5.0]).unwrap(), vec![0.5; 3]);
        assert!(matches!(minmax_normalize(&[1.0, f64::NAN]), Err(Error::NonFiniteInput(1))));
        assert!(minmax_normalize(&[]).is_err());
    }

    #[test]
    fn normalize_table6_ratio_column() {
        let n = minmax_normalize(&[94.82, 94.49, 117.11, 9.77, 3.79, 141.91]).unwrap();
        // (94.82 - 3.79) / (141.91 - 3.79)
        assert!((n[0] - 0.659_064_58).abs() < 1e-8, "{}", n[0]);
    }

    #[test]
    fn score_examples() {
        let w = Weights::default();
        assert_eq!(efficiency_score(1.0, 1.0, 1.0, &w).unwrap(), 1.0);
        assert_eq!(efficiency_score(1.0, 0.0, 0.0, &w).unwrap(), 0.4);
        let e = efficiency_score(0.6591, 1.0, 1.0, &w).unwrap();
        assert!((e - 0.86364).abs() < 1e-9, "{e}");
        assert!(matches!(efficiency_score(1.2, 0.0, 0.0, &w), Err(Error::DomainError { .. })));
    }

    #[test]
    fn weights_validation() {
        assert!(Weights::new(0.5, 0.25, 0.25).is_ok());
        assert!(Weights::new(0.5, 0.5, 0.5).is_err());
        assert!(Weights::new(1.2, -0.1, -0.1).is_err());
        assert_eq!("0.4, 0.3, 0.3".parse::<Weights>().unwrap(), Weights::default());
        assert!("0.4,0.6".parse::<Weights>().is_err());
    }

    #[test]
    fn dominant_pipeline_scores_one() {
        let rows = vec![
            raw("Zstd", 2.0, 10.0, 10.0),
            raw("LZMA", 5.0, 100.0, 200.0),
            raw("Bzip2", 3.0, 50.0, 20.0),
        ];
        let ranked = rank_raw(rows, &Weights::default()).unwrap();
        assert_eq!(ranked[0].pipeline.to_string(), "LZMA");
        assert_eq!(ranked[0].efficiency, 1.0);
    }

    #[test]
    fn ties_break_by_name() {
        let rows = vec![raw("Zstd", 2.0, 1.0, 1.0), raw("Brotli", 2.0, 1.0, 1.0)];
        let ranked = rank_raw(rows, &Weights::default()).unwrap();
        assert_eq!(ranked[0].efficiency, ranked[1].efficiency);
        assert_eq!(ranked[0].pipeline.to_string(), "Brotli");
    }

    #[test]
    fn cohort_rules() {
        let mut b = raw("Zstd", 1.0, 1.0, 1.0);
        b.dataset = "other".into();
        assert!(matches!(
            rank_raw(vec![raw("LZMA", 1.0, 1.0, 1.0), b], &Weights::default()),
            Err(Error::MixedCohort(..))
        ));
        assert!(matches!(
            rank_raw(vec![raw("LZMA", 1.0, 1.0, 1.0)], &Weights::default()),
            Err(Error::CohortTooSmall(1))
        ));
    }

    #[test]
    fn frequency_counting() {
        let rows = rank_raw(
            vec![raw("Zstd+LZ4HC", 2.0, 2.0, 2.0), raw("Zstd", 1.0, 1.0, 1.0)],
            &Weights::default(),
        )
        .unwrap();
        let f = component_frequency(&rows, 10);
        assert_eq!(f[&CodecId::Zstd], 2);
        assert_eq!(f[&CodecId::Lz4hc], 1);
        assert_eq!(f[&CodecId::Lzma], 0);
        let h = component_frequency_with(&rows, 10, CountingRule::HybridsOnly);
        assert_eq!(h[&CodecId::Zstd], 1);
        assert!(component_frequency(&[], 10).values().all(|&n| n == 0));
        assert_eq!(component_frequency(&[], 10).len(), 5);
    }

    #[test]
    fn frequency_respects_k_per_group() {
        let mut rows = rank_raw(
            vec![raw("Zstd", 2.0, 2.0, 2.0), raw("LZMA", 1.0, 1.0, 1.0)],
            &Weights::default(),
        )
        .unwrap();
        let mut other = rows.clone();
        for r in &mut other {
            r.dataset = "e".into();
        }
        rows.extend(other);
        let f = component_frequency(&rows, 1);
        assert_eq!(f[&CodecId::Zstd], 2);
        assert_eq!(f[&CodecId::Lzma], 0);
    }

    #[test]
    fn balance_projection() {
        let rows = rank_raw(
            vec![
                raw("Zstd+Brotli", 94.49, 1071.57, 1.0),
                raw("LZMA+Brotli", 141.59, 6.09, 1.0),
            ],
            &Weights::default(),
        )
        .unwrap();
        let b = balance_table(&rows);
        assert_eq!(b.len(), 2);
        assert_eq!(b[0].pipeline.to_string(), "LZMA + Brotli");
        assert_eq!((b[0].cr, b[0].cs), (141.59, 6.09));
        assert!(balance_table(&[]).is_empty());
    }
}
