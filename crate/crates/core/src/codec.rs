//! Uniform in-memory compress/decompress over the five supported codecs.
//!
//! Every codec runs with one fixed configuration (see [`codec_params`]); there
//! is no runtime override. All encoders are single-threaded and stateless, so
//! the functions here may be called from any number of threads at once.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the five codecs. The discriminant is the byte stored in container headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
#[repr(u8)]
pub enum CodecId {
    Lzma = 1,
    Zstd = 2,
    Brotli = 3,
    Bzip2 = 4,
    Lz4hc = 5,
}

impl CodecId {
    pub const ALL: [CodecId; 5] = [
        CodecId::Lzma,
        CodecId::Zstd,
        CodecId::Brotli,
        CodecId::Bzip2,
        CodecId::Lz4hc,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<CodecId> {
        match code {
            1 => Some(CodecId::Lzma),
            2 => Some(CodecId::Zstd),
            3 => Some(CodecId::Brotli),
            4 => Some(CodecId::Bzip2),
            5 => Some(CodecId::Lz4hc),
            _ => None,
        }
    }

    /// Canonical display name.
    pub fn name(self) -> &'static str {
        match self {
            CodecId::Lzma => "LZMA",
            CodecId::Zstd => "Zstd",
            CodecId::Brotli => "Brotli",
            CodecId::Bzip2 => "Bzip2",
            CodecId::Lz4hc => "LZ4HC",
        }
    }
}

impl fmt::Display for CodecId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodecId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        CodecId::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(trimmed))
            .ok_or_else(|| Error::UnknownPipeline(s.to_string()))
    }
}

impl From<CodecId> for String {
    fn from(c: CodecId) -> String {
        c.name().to_string()
    }
}

impl TryFrom<String> for CodecId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Fixed encoder configuration for a codec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CodecConfig {
    /// Native preset / quality level.
    pub level: Option<u32>,
    /// log2 of the sliding window (Brotli only).
    pub window_log: Option<u32>,
    /// Block size in KiB (Bzip2 only).
    pub block_size_kb: Option<u32>,
    /// Preset dictionaries are never used.
    pub dictionary: bool,
}

/// The configuration table. Total over [`CodecId`].
pub fn codec_params(codec: CodecId) -> CodecConfig {
    let base = CodecConfig {
        level: None,
        window_log: None,
        block_size_kb: None,
        dictionary: false,
    };
    match codec {
        CodecId::Lzma | CodecId::Zstd | CodecId::Lz4hc => CodecConfig {
            level: Some(6),
            ..base
        },
        CodecId::Brotli => CodecConfig {
            level: Some(6),
            window_log: Some(22),
            ..base
        },
        CodecId::Bzip2 => CodecConfig {
            block_size_kb: Some(900),
            ..base
        },
    }
}

/// Encode `input` as a single self-terminating stream of `codec`.
pub fn compress_one(codec: CodecId, input: &[u8]) -> Result<Vec<u8>> {
    let cfg = codec_params(codec);
    let fail = |e: std::io::Error| Error::CodecFailure {
        codec,
        message: e.to_string(),
    };
    match codec {
        CodecId::Lzma => {
            let preset = cfg.level.unwrap_or(6);
            let stream = xz2::stream::Stream::new_easy_encoder(preset, xz2::stream::Check::Crc64)
                .map_err(|e| fail(e.into()))?;
            let mut enc = xz2::write::XzEncoder::new_stream(Vec::with_capacity(input.len() / 4), stream);
            enc.write_all(input).map_err(fail)?;
            enc.finish().map_err(fail)
        }
        CodecId::Zstd => {
            let level = cfg.level.unwrap_or(6) as i32;
            zstd::bulk::compress(input, level).map_err(fail)
        }
        CodecId::Brotli => {
            let params = brotli::enc::BrotliEncoderParams {
                quality: cfg.level.unwrap_or(6) as i32,
                lgwin: cfg.window_log.unwrap_or(22) as i32,
                size_hint: input.len(),
                ..Default::default()
            };
            let mut out = Vec::with_capacity(input.len() / 4);
            let mut reader = input;
            brotli::BrotliCompress(&mut reader, &mut out, &params).map_err(fail)?;
            Ok(out)
        }
        CodecId::Bzip2 => {
            // bzip2 levels select the block size in units of 100 KiB.
            let level = cfg.block_size_kb.unwrap_or(900) / 100;
            let mut enc = bzip2::write::BzEncoder::new(
                Vec::with_capacity(input.len() / 4),
                bzip2::Compression::new(level),
            );
            enc.write_all(input).map_err(fail)?;
            enc.finish().map_err(fail)
        }
        CodecId::Lz4hc => {
            // Frame levels >= 3 select the HC match finder.
            let mut enc = lz4::EncoderBuilder::new()
                .level(cfg.level.unwrap_or(6))
                .build(Vec::with_capacity(input.len() / 2))
                .map_err(fail)?;
            enc.write_all(input).map_err(fail)?;
            let (out, res) = enc.finish();
            res.map_err(fail)?;
            Ok(out)
        }
    }
}

/// Decode a stream produced by [`compress_one`] with the same codec.
pub fn decompress_one(codec: CodecId, input: &[u8]) -> Result<Vec<u8>> {
    let corrupt = |e: std::io::Error| Error::CorruptStream {
        codec,
        message: e.to_string(),
    };
    let mut out = Vec::with_capacity(input.len().saturating_mul(4));
    match codec {
        CodecId::Lzma => {
            xz2::read::XzDecoder::new(input)
                .read_to_end(&mut out)
                .map_err(corrupt)?;
        }
        CodecId::Zstd => {
            out = zstd::stream::decode_all(input).map_err(corrupt)?;
        }
        CodecId::Brotli => {
            let mut reader = input;
            brotli::BrotliDecompress(&mut reader, &mut out).map_err(corrupt)?;
        }
        CodecId::Bzip2 => {
            bzip2::read::BzDecoder::new(input)
                .read_to_end(&mut out)
                .map_err(corrupt)?;
        }
        CodecId::Lz4hc => {
            lz4::Decoder::new(input)
                .and_then(|mut d| d.read_to_end(&mut out))
                .map_err(corrupt)?;
        }
    }
    Ok(out)
}

/// Library versions linked into this build, for report provenance.
pub fn library_versions() -> Vec<(CodecId, String)> {
    vec![
        (CodecId::Lzma, "xz2 0.1 / liblzma (lzma-sys 0.1.20)".to_string()),
        (
            CodecId::Zstd,
            format!("zstd 0.13 / libzstd {}", zstd::zstd_safe::version_string()),
        ),
        (CodecId::Brotli, "brotli 7.0 (pure Rust)".to_string()),
        (CodecId::Bzip2, "bzip2 0.4 / libbzip2 1.0.8".to_string()),
        (CodecId::Lz4hc, format!("lz4 1.28 / liblz4 {}", lz4_version())),
    ]
}

fn lz4_version() -> String {
    let v = lz4::version();
    format!("{}.{}.{}", v / 10000, (v / 100) % 100, v % 100)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip_and_reject_others() {
        for c in CodecId::ALL {
            assert_eq!(CodecId::from_code(c.code()), Some(c));
        }
        for b in [0u8, 6, 7, 0xff] {
            assert_eq!(CodecId::from_code(b), None);
        }
    }

    #[test]
    fn params_table() {
        let lzma = codec_params(CodecId::Lzma);
        assert_eq!(lzma.level, Some(6));
        assert!(!lzma.dictionary);
        let br = codec_params(CodecId::Brotli);
        assert_eq!((br.level, br.window_log), (Some(6), Some(22)));
        assert_eq!(codec_params(CodecId::Bzip2).block_size_kb, Some(900));
        assert_eq!(codec_params(CodecId::Zstd).level, Some(6));
        assert_eq!(codec_params(CodecId::Lz4hc).level, Some(6));
        assert!(CodecId::ALL.iter().all(|&c| !codec_params(c).dictionary));
    }

    #[test]
    fn names_parse_case_insensitively() {
        assert_eq!("lz4hc".parse::<CodecId>().unwrap(), CodecId::Lz4hc);
        assert_eq!(" ZSTD ".parse::<CodecId>().unwrap(), CodecId::Zstd);
        assert!("gzip".parse::<CodecId>().is_err());
    }

    #[test]
    fn empty_round_trip() {
        for c in CodecId::ALL {
            let s = compress_one(c, b"").unwrap();
            assert!(!s.is_empty(), "{c}");
            assert!(decompress_one(c, &s).unwrap().is_empty(), "{c}");
        }
    }

    #[test]
    fn repetitive_devanagari_shrinks() {
        let text = "अ".repeat(1024);
        assert_eq!(text.len(), 3072);
        // stream lengths recorded with the pinned library versions
        let expected = [
            (CodecId::Lzma, 92),
            (CodecId::Zstd, 20),
            (CodecId::Brotli, 23),
            (CodecId::Bzip2, 47),
            (CodecId::Lz4hc, 47),
        ];
        for (c, len) in expected {
            let s = compress_one(c, text.as_bytes()).unwrap();
            assert!(s.len() < 3072, "{c}: {}", s.len());
            assert_eq!(s.len(), len, "{c}");
            assert_eq!(decompress_one(c, &s).unwrap(), text.as_bytes());
        }
    }

    #[test]
    fn lzma_rejects_random_bytes() {
        let junk = [
            0x3a, 0x91, 0x07, 0xee, 0x52, 0x1c, 0xd4, 0x60, 0x8b, 0x2f, 0xf0, 0x13, 0x9e, 0x44,
            0xa7, 0x05,
        ];
        assert!(matches!(
            decompress_one(CodecId::Lzma, &junk),
            Err(Error::CorruptStream { codec: CodecId::Lzma, .. })
        ));
    }

    #[test]
    fn deterministic_and_stateless() {
        let x = b"the quick brown fox jumps over the lazy dog ".repeat(50);
        let y = "नमस्ते दुनिया। ".repeat(80);
        for c in CodecId::ALL {
            let alone = compress_one(c, y.as_bytes()).unwrap();
            let _ = compress_one(c, &x).unwrap();
            let after = compress_one(c, y.as_bytes()).unwrap();
            assert_eq!(alone, after, "{c}");
        }
    }
}
