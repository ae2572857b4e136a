//! Report emission: CSV, JSON, Markdown and SVG renderings of rankings,
//! raw measurements, the ratio/speed balance table and codec frequency.
//!
//! CSV and JSON carry full `f64` precision (shortest round-trip form), so the
//! same rows always produce the same bytes. Markdown rounds to table precision.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::codec::{codec_params, library_versions, CodecConfig, CodecId};
use crate::exec::Execution;
use crate::harness::{BenchRecord, DatasetRanking};
use crate::metrics::{compression_ratio, compression_speed, decompression_speed, DsBasis, BYTES_PER_MB};
use crate::pipeline::{PipelineSpec, HEADER_LEN};
use crate::scoring::{BalancePoint, EfficiencyRow, Weights};

pub const RANKING_CSV_HEADER: &str =
    "rank,pipeline,dataset,size_class,cr,cs_mb_s,ds_mb_s,cr_norm,cs_norm,ds_norm,efficiency";

pub const MEASUREMENT_CSV_HEADER: &str = "dataset,size_class,pipeline,original_bytes,compressed_bytes,compress_seconds,decompress_seconds,repetitions,cr,cs_mb_s,ds_mb_s,error";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
    Svg,
}

impl ReportFormat {
    pub const ALL: [ReportFormat; 4] = [
        ReportFormat::Csv,
        ReportFormat::Json,
        ReportFormat::Markdown,
        ReportFormat::Svg,
    ];

    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
            ReportFormat::Markdown => "md",
            ReportFormat::Svg => "svg",
        }
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            "svg" => Ok(ReportFormat::Svg),
            other => Err(format!("unknown format {other:?} (expected csv|json|md|svg)")),
        }
    }
}

/// Provenance attached to machine-readable reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub tool: String,
    pub tool_version: String,
    pub codec_libraries: BTreeMap<String, String>,
    pub codec_configs: BTreeMap<String, CodecConfig>,
    pub clock: String,
    pub timing_statistic: String,
    pub warmup_runs: usize,
    pub repetitions: usize,
    pub bytes_per_mb: u64,
    pub ds_basis: DsBasis,
    pub weights: Weights,
    pub container_header_bytes: usize,
    pub compressed_size_includes_header: bool,
    pub os: String,
    pub arch: String,
    pub parallel_feature: bool,
    pub worker_threads: usize,
}

impl Environment {
    pub fn capture(repetitions: usize, weights: Weights, ds_basis: DsBasis) -> Self {
        Environment {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            codec_libraries: library_versions()
                .into_iter()
                .map(|(c, v)| (c.name().to_string(), v))
                .collect(),
            codec_configs: CodecId::ALL
                .iter()
                .map(|&c| (c.name().to_string(), codec_params(c)))
                .collect(),
            clock: "std::time::Instant (monotonic)".to_string(),
            timing_statistic: "median".to_string(),
            warmup_runs: 1,
            repetitions,
            bytes_per_mb: BYTES_PER_MB as u64,
            ds_basis,
            weights,
            container_header_bytes: HEADER_LEN,
            compressed_size_includes_header: true,
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            parallel_feature: cfg!(feature = "parallel"),
            worker_threads: Execution::default().threads(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    pub weights: Weights,
    pub ds_basis: DsBasis,
    pub environment: Option<Environment>,
    pub title: Option<String>,
}

/// Render ranked rows with default options.
pub fn emit_report(rows: &[EfficiencyRow], format: ReportFormat) -> Vec<u8> {
    emit_report_with(rows, format, &ReportOptions::default())
}

pub fn emit_report_with(rows: &[EfficiencyRow], format: ReportFormat, opts: &ReportOptions) -> Vec<u8> {
    match format {
        ReportFormat::Csv => ranking_csv(rows),
        ReportFormat::Json => json_doc("ranking", rows, opts),
        ReportFormat::Markdown => ranking_md(rows, opts),
        ReportFormat::Svg => ranking_svg(rows, opts),
    }
    .into_bytes()
}

fn size_class_cell(row: &EfficiencyRow) -> String {
    row.size_class.map(|c| c.to_string()).unwrap_or_default()
}

/// Quote a CSV field only when it needs it.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn ranking_csv(rows: &[EfficiencyRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(RANKING_CSV_HEADER);
    out.push('\n');
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            i + 1,
            csv_field(&r.pipeline.to_string()),
            csv_field(&r.dataset),
            size_class_cell(r),
            r.cr,
            r.cs,
            r.ds,
            r.cr_norm,
            r.cs_norm,
            r.ds_norm,
            r.efficiency
        );
    }
    out
}

#[derive(Serialize)]
struct JsonDoc<'a, T: Serialize> {
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    environment: Option<&'a Environment>,
    weights: Weights,
    ds_basis: DsBasis,
    rows: T,
}

fn json_doc<T: Serialize>(kind: &str, rows: T, opts: &ReportOptions) -> String {
    let doc = JsonDoc {
        kind,
        environment: opts.environment.as_ref(),
        weights: opts.weights,
        ds_basis: opts.ds_basis,
        rows,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report rows serialize");
    s.push('\n');
    s
}

/// Singles are labelled "(Independent)" in human-readable tables.
pub fn table_label(p: &PipelineSpec) -> String {
    if p.is_hybrid() {
        p.to_string()
    } else {
        format!("{p} (Independent)")
    }
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

fn ranking_md(rows: &[EfficiencyRow], opts: &ReportOptions) -> String {
    let mut out = String::new();
    if let Some(t) = &opts.title {
        let _ = writeln!(out, "## {}\n", md_escape(t));
    }
    out.push_str("| Rank | Algorithm/Hybrid | Dataset | Compression Ratio | Compression Speed (MB/s) | Decompression Speed (MB/s) | Efficiency Score |\n");
    out.push_str("|---:|---|---|---:|---:|---:|---:|\n");
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {:.2} | {:.2} | {:.2} | {:.4} |",
            i + 1,
            table_label(&r.pipeline),
            md_escape(&r.dataset),
            r.cr,
            r.cs,
            r.ds,
            r.efficiency
        );
    }
    let _ = writeln!(
        out,
        "\nWeights: CR {}, CS {}, DS {}. Decompression speed basis: {} size.",
        opts.weights.cr(),
        opts.weights.cs(),
        opts.weights.ds(),
        opts.ds_basis
    );
    out
}

/// Top-`k` rows of several rankings side by side, one column pair per dataset.
pub fn emit_top_table_md(rankings: &[DatasetRanking], k: usize) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("| Rank |");
    for r in rankings {
        let _ = write!(out, " Algorithm/Hybrid ({0}) | Efficiency ({0}) |", md_escape(&r.dataset));
    }
    out.push_str("\n|---:|");
    for _ in rankings {
        out.push_str("---|---:|");
    }
    out.push('\n');
    let depth = rankings.iter().map(|r| r.rows.len().min(k)).max().unwrap_or(0);
    for i in 0..depth {
        let _ = write!(out, "| {} |", i + 1);
        for r in rankings {
            match r.rows.get(i) {
                Some(row) => {
                    let _ = write!(out, " {} | {:.4} |", table_label(&row.pipeline), row.efficiency);
                }
                None => out.push_str("  |  |"),
            }
        }
        out.push('\n');
    }
    out.into_bytes()
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

const SVG_COLORS: [&str; 3] = ["#4e79a7", "#f28e2b", "#59a14f"];

/// Horizontal stacked bars of the three weighted normalized components.
fn ranking_svg(rows: &[EfficiencyRow], opts: &ReportOptions) -> String {
    let (label_w, bar_w, row_h, top) = (220.0, 500.0, 22.0, 40.0);
    let width = label_w + bar_w + 80.0;
    let height = top + row_h * rows.len() as f64 + 50.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let title = opts.title.as_deref().unwrap_or("Normalized and weighted efficiency");
    let _ = writeln!(out, r#"<text x="10" y="20" font-size="14">{}</text>"#, xml_escape(title));
    let w = opts.weights;
    for (i, r) in rows.iter().enumerate() {
        let y = top + row_h * i as f64;
        let parts = [w.cr() * r.cr_norm, w.cs() * r.cs_norm, w.ds() * r.ds_norm];
        let _ = writeln!(
            out,
            r#"<g class="bar" data-pipeline="{}" data-efficiency="{}">"#,
            xml_escape(&r.pipeline.to_string()),
            r.efficiency
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            label_w - 6.0,
            y + row_h * 0.7,
            xml_escape(&r.pipeline.to_string())
        );
        let mut x = label_w;
        for (part, color) in parts.iter().zip(SVG_COLORS) {
            let len = part * bar_w;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.3}" y="{:.3}" width="{len:.3}" height="{:.3}" fill="{color}"/>"#,
                y + 2.0,
                row_h - 4.0
            );
            x += len;
        }
        let _ = writeln!(out, r#"<text x="{:.3}" y="{:.3}">{:.4}</text>"#, x + 4.0, y + row_h * 0.7, r.efficiency);
        out.push_str("</g>\n");
    }
    let ly = top + row_h * rows.len() as f64 + 20.0;
    for (i, (name, color)) in ["CR", "CS", "DS"].iter().zip(SVG_COLORS).enumerate() {
        let lx = label_w + 120.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{lx}" y="{ly}" width="12" height="12" fill="{color}"/><text x="{}" y="{}">weighted {name}_norm</text>"#,
            lx + 16.0,
            ly + 10.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Raw measurement matrix, error rows included.
pub fn emit_measurements(records: &[BenchRecord], format: ReportFormat, opts: &ReportOptions) -> Option<Vec<u8>> {
    let metrics = |r: &BenchRecord| {
        r.measurement.as_ref().and_then(|m| {
            Some((
                compression_ratio(m).ok()?,
                compression_speed(m).ok()?,
                decompression_speed(m, opts.ds_basis).ok()?,
            ))
        })
    };
    let out = match format {
        ReportFormat::Csv => {
            let mut out = String::new();
            out.push_str(MEASUREMENT_CSV_HEADER);
            out.push('\n');
            for r in records {
                let name = csv_field(&r.pipeline.to_string());
                match (&r.measurement, metrics(r)) {
                    (Some(m), Some((cr, cs, ds))) => {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{},{},{},{},{},{},",
                            csv_field(&r.dataset),
                            r.size_class,
                            name,
                            m.original_bytes,
                            m.compressed_bytes,
                            m.compress_seconds,
                            m.decompress_seconds,
                            m.repetitions,
                            cr,
                            cs,
                            ds
                        );
                    }
                    _ => {
                        let _ = writeln!(
                            out,
                            "{},{},{},,,,,,,,,{}",
                            csv_field(&r.dataset),
                            r.size_class,
                            name,
                            csv_field(r.error.as_deref().unwrap_or("metric error"))
                        );
                    }
                }
            }
            out
        }
        ReportFormat::Json => json_doc("measurements", records, opts),
        ReportFormat::Markdown => {
            let mut out = String::from(
                "| Dataset | Algorithm/Hybrid | Original (B) | Compressed (B) | CR | CS (MB/s) | DS (MB/s) | Status |\n|---|---|---:|---:|---:|---:|---:|---|\n",
            );
            for r in records {
                match (&r.measurement, metrics(r)) {
                    (Some(m), Some((cr, cs, ds))) => {
                        let _ = writeln!(
                            out,
                            "| {} | {} | {} | {} | {cr:.2} | {cs:.2} | {ds:.2} | ok |",
                            md_escape(&r.dataset),
                            table_label(&r.pipeline),
                            m.original_bytes,
                            m.compressed_bytes
                        );
                    }
                    _ => {
                        let _ = writeln!(
                            out,
                            "| {} | {} |  |  |  |  |  | {} |",
                            md_escape(&r.dataset),
                            table_label(&r.pipeline),
                            md_escape(r.error.as_deref().unwrap_or("metric error"))
                        );
                    }
                }
            }
            out
        }
        ReportFormat::Svg => return None,
    };
    Some(out.into_bytes())
}

/// Ratio/speed projection; SVG is a scatter with CS on x and CR on y.
pub fn emit_balance(points: &[BalancePoint], format: ReportFormat, opts: &ReportOptions) -> Vec<u8> {
    match format {
        ReportFormat::Csv => {
            let mut out = String::from("pipeline,dataset,cr,cs_mb_s\n");
            for p in points {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    csv_field(&p.pipeline.to_string()),
                    csv_field(&p.dataset),
                    p.cr,
                    p.cs
                );
            }
            out
        }
        ReportFormat::Json => json_doc("balance", points, opts),
        ReportFormat::Markdown => {
            let mut out = String::from("| Algorithm | Compression Ratio | Compression Speed (MB/s) |\n|---|---:|---:|\n");
            for p in points {
                let _ = writeln!(out, "| {} | {:.2} | {:.2} |", table_label(&p.pipeline), p.cr, p.cs);
            }
            out
        }
        ReportFormat::Svg => balance_svg(points, opts),
    }
    .into_bytes()
}

fn balance_svg(points: &[BalancePoint], opts: &ReportOptions) -> String {
    let (w, h, pad) = (640.0, 420.0, 60.0);
    let max_cs = points.iter().map(|p| p.cs).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let max_cr = points.iter().map(|p| p.cr).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    );
    let title = opts.title.as_deref().unwrap_or("Performance balance: ratio vs compression speed");
    let _ = writeln!(out, r#"<text x="10" y="20" font-size="14">{}</text>"#, xml_escape(title));
    let _ = writeln!(
        out,
        r#"<line x1="{pad}" y1="{}" x2="{}" y2="{}" stroke="black"/><line x1="{pad}" y1="{pad}" x2="{pad}" y2="{}" stroke="black"/>"#,
        h - pad,
        w - pad,
        h - pad,
        h - pad
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">Compression speed (MB/s), max {max_cs:.2}</text>"#, w / 2.0, h - 20.0);
    let _ = writeln!(out, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">Compression ratio, max {max_cr:.2}</text>"#, h / 2.0, h / 2.0);
    for p in points {
        let x = pad + (w - 2.0 * pad) * p.cs / max_cs;
        let y = h - pad - (h - 2.0 * pad) * p.cr / max_cr;
        let name = xml_escape(&p.pipeline.to_string());
        let _ = writeln!(
            out,
            r##"<g class="point" data-pipeline="{name}"><circle cx="{x:.3}" cy="{y:.3}" r="4" fill="#4e79a7"/><text x="{:.3}" y="{:.3}">{name}</text></g>"##,
            x + 6.0,
            y - 4.0
        );
    }
    out.push_str("</svg>\n");
    out
}

#[derive(Serialize)]
struct FrequencyRow {
    codec: CodecId,
    count: usize,
    percent_of_rows: f64,
}

/// Codec appearance counts; percentages are relative to `rows_counted`.
pub fn emit_frequency(
    counts: &BTreeMap<CodecId, usize>,
    rows_counted: usize,
    format: ReportFormat,
    opts: &ReportOptions,
) -> Vec<u8> {
    let mut rows: Vec<FrequencyRow> = counts
        .iter()
        .map(|(&codec, &count)| FrequencyRow {
            codec,
            count,
            percent_of_rows: if rows_counted == 0 {
                0.0
            } else {
                100.0 * count as f64 / rows_counted as f64
            },
        })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then(a.codec.cmp(&b.codec)));
    match format {
        ReportFormat::Csv => {
            let mut out = String::from("codec,count,percent_of_rows\n");
            for r in &rows {
                let _ = writeln!(out, "{},{},{}", r.codec, r.count, r.percent_of_rows);
            }
            out
        }
        ReportFormat::Json => json_doc("component_frequency", &rows, opts),
        ReportFormat::Markdown => {
            let mut out = format!("Rows counted: {rows_counted}\n\n| Component | Appearances | Share of rows |\n|---|---:|---:|\n");
            for r in &rows {
                let _ = writeln!(out, "| {} | {} | {:.1}% |", r.codec, r.count, r.percent_of_rows);
            }
            out
        }
        ReportFormat::Svg => {
            let (bar_h, top, label_w, scale_w) = (26.0, 40.0, 80.0, 400.0);
            let max = rows.iter().map(|r| r.count).max().unwrap_or(0).max(1) as f64;
            let height = top + bar_h * rows.len() as f64 + 20.0;
            let mut out = String::new();
            let _ = writeln!(
                out,
                r#"<svg xmlns="http://www.w3.org/2000/svg" width="560" height="{height}" viewBox="0 0 560 {height}" font-family="sans-serif" font-size="12">"#
            );
            let _ = writeln!(
                out,
                r#"<text x="10" y="20" font-size="14">Frequency of components in top-ranked pipelines ({rows_counted} rows)</text>"#
            );
            for (i, r) in rows.iter().enumerate() {
                let y = top + bar_h * i as f64;
                let len = scale_w * r.count as f64 / max;
                let _ = writeln!(
                    out,
                    r##"<g class="bar" data-codec="{}"><text x="{}" y="{:.1}" text-anchor="end">{}</text><rect x="{label_w}" y="{:.1}" width="{len:.3}" height="{:.1}" fill="#4e79a7"/><text x="{:.3}" y="{:.1}">{}</text></g>"##,
                    r.codec,
                    label_w - 6.0,
                    y + bar_h * 0.65,
                    r.codec,
                    y + 3.0,
                    bar_h - 6.0,
                    label_w + len + 4.0,
                    y + bar_h * 0.65,
                    r.count
                );
            }
            out.push_str("</svg>\n");
            out
        }
    }
    .into_bytes()
}
