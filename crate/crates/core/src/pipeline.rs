//! One- and two-stage codec chains and the `.hybc` container.
//!
//! Container layout (20 bytes, little-endian integers):
//!
//! ```text
//! offset  size  field
//!      0     4  magic "HYBC"
//!      4     1  version (1)
//!      5     1  first codec id
//!      6     1  second codec id, 0 = single stage
//!      7     1  reserved (0)
//!      8     8  original length in bytes
//!     16     4  CRC-32 (IEEE) of the original bytes
//! ```
//!
//! The chained payload follows the header directly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::codec::{compress_one, decompress_one, CodecId};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"HYBC";
pub const FORMAT_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 20;

/// An ordered chain of one or two distinct codecs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct PipelineSpec {
    first: CodecId,
    second: Option<CodecId>,
}

impl PipelineSpec {
    pub const fn single(codec: CodecId) -> Self {
        PipelineSpec {
            first: codec,
            second: None,
        }
    }

    pub fn hybrid(first: CodecId, second: CodecId) -> Result<Self> {
        if first == second {
            return Err(Error::SelfPair(first));
        }
        Ok(PipelineSpec {
            first,
            second: Some(second),
        })
    }

    pub fn first(&self) -> CodecId {
        self.first
    }

    pub fn second(&self) -> Option<CodecId> {
        self.second
    }

    pub fn is_hybrid(&self) -> bool {
        self.second.is_some()
    }

    /// Codecs in application order.
    pub fn stages(&self) -> impl Iterator<Item = CodecId> {
        std::iter::once(self.first).chain(self.second)
    }

    pub fn contains(&self, codec: CodecId) -> bool {
        self.stages().any(|c| c == codec)
    }

    pub fn display_name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PipelineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.second {
            None => write!(f, "{}", self.first),
            Some(second) => write!(f, "{} + {}", self.first, second),
        }
    }
}

impl FromStr for PipelineSpec {
    type Err = Error;

    /// Accepts `A` or `A+B`, case-insensitive, whitespace around `+` ignored.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownPipeline(s.to_string());
        let mut parts = s.split('+');
        let first = parts.next().ok_or_else(unknown)?;
        let first: CodecId = first.parse().map_err(|_| unknown())?;
        match (parts.next(), parts.next()) {
            (None, _) => Ok(PipelineSpec::single(first)),
            (Some(second), None) => {
                let second: CodecId = second.parse().map_err(|_| unknown())?;
                PipelineSpec::hybrid(first, second)
            }
            _ => Err(unknown()),
        }
    }
}

impl From<PipelineSpec> for String {
    fn from(p: PipelineSpec) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for PipelineSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// The 5 singles ordered by codec id, then the 20 ordered distinct pairs
/// ordered by (first, second).
pub fn enumerate_pipelines() -> Vec<PipelineSpec> {
    let singles = CodecId::ALL.into_iter().map(PipelineSpec::single);
    let pairs = CodecId::ALL.into_iter().flat_map(|a| {
        CodecId::ALL
            .into_iter()
            .filter(move |&b| b != a)
            .map(move |b| PipelineSpec {
                first: a,
                second: Some(b),
            })
    });
    singles.chain(pairs).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContainerHeader {
    pub version: u8,
    pub first_codec: u8,
    pub second_codec: u8,
    pub original_len: u64,
    pub original_crc32: u32,
}

impl ContainerHeader {
    pub fn for_input(spec: &PipelineSpec, input: &[u8]) -> Self {
        ContainerHeader {
            version: FORMAT_VERSION,
            first_codec: spec.first.code(),
            second_codec: spec.second.map_or(0, CodecId::code),
            original_len: input.len() as u64,
            original_crc32: crc32fast::hash(input),
        }
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&MAGIC);
        out[4] = self.version;
        out[5] = self.first_codec;
        out[6] = self.second_codec;
        out[7] = 0;
        out[8..16].copy_from_slice(&self.original_len.to_le_bytes());
        out[16..20].copy_from_slice(&self.original_crc32.to_le_bytes());
        out
    }

    /// The chain this header describes. Only valid for headers that passed [`parse_header`].
    pub fn pipeline(&self) -> Result<PipelineSpec> {
        let bad = || Error::InvalidCodecByte {
            first: self.first_codec,
            second: self.second_codec,
        };
        let first = CodecId::from_code(self.first_codec).ok_or_else(bad)?;
        match self.second_codec {
            0 => Ok(PipelineSpec::single(first)),
            b => {
                let second = CodecId::from_code(b).ok_or_else(bad)?;
                PipelineSpec::hybrid(first, second).map_err(|_| bad())
            }
        }
    }
}

/// Decode the fixed header layout. Does not look at the payload.
pub fn parse_header(bytes: &[u8]) -> Result<ContainerHeader> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 4 && bytes[..4] != MAGIC {
            return Err(Error::BadMagic {
                found: bytes[..4].try_into().unwrap(),
            });
        }
        return Err(Error::Truncated {
            len: bytes.len(),
            needed: HEADER_LEN,
        });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(Error::BadMagic { found: magic });
    }
    if bytes[4] != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(bytes[4]));
    }
    let header = ContainerHeader {
        version: bytes[4],
        first_codec: bytes[5],
        second_codec: bytes[6],
        original_len: u64::from_le_bytes(bytes[8..16].try_into().unwrap()),
        original_crc32: u32::from_le_bytes(bytes[16..20].try_into().unwrap()),
    };
    header.pipeline()?;
    if bytes[7] != 0 {
        return Err(Error::ReservedByte(bytes[7]));
    }
    Ok(header)
}

/// Header followed by `second(first(input))`, or `first(input)` for singles.
pub fn compress_pipeline(spec: &PipelineSpec, input: &[u8]) -> Result<Vec<u8>> {
    let header = ContainerHeader::for_input(spec, input);
    let stage1 = compress_one(spec.first, input)?;
    let payload = match spec.second {
        Some(second) => compress_one(second, &stage1)?,
        None => stage1,
    };
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&header.to_bytes());
    out.extend_from_slice(&payload);
    Ok(out)
}

/// Restore the original bytes using only what the header records.
pub fn decompress_pipeline(container: &[u8]) -> Result<Vec<u8>> {
    let header = parse_header(container)?;
    let spec = header.pipeline()?;
    let payload = &container[HEADER_LEN..];
    let decoded = match spec.second {
        Some(second) => {
            let stage1 = decompress_one(second, payload)?;
            decompress_one(spec.first, &stage1)?
        }
        None => decompress_one(spec.first, payload)?,
    };
    let actual_len = decoded.len() as u64;
    let actual_crc = crc32fast::hash(&decoded);
    if actual_len != header.original_len || actual_crc != header.original_crc32 {
        return Err(Error::IntegrityMismatch {
            expected_len: header.original_len,
            expected_crc: header.original_crc32,
            actual_len,
            actual_crc,
        });
    }
    Ok(decoded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn enumeration_shape() {
        let all = enumerate_pipelines();
        assert_eq!(all.len(), 25);
        assert_eq!(all.iter().filter(|p| p.is_hybrid()).count(), 20);
        assert!(all.iter().all(|p| p.second() != Some(p.first())));
        assert_eq!(all[0].to_string(), "LZMA");
        assert_eq!(all[4].to_string(), "LZ4HC");
        assert_eq!(all[5].to_string(), "LZMA + Zstd");
        assert_eq!(all[24].to_string(), "LZ4HC + Bzip2");
        let mut dedup = all.clone();
        dedup.sort_by_key(|p| (p.first(), p.second()));
        dedup.dedup();
        assert_eq!(dedup.len(), 25);
    }

    #[test]
    fn names_parse() {
        let p: PipelineSpec = "zstd+lz4hc".parse().unwrap();
        assert_eq!(p.to_string(), "Zstd + LZ4HC");
        let q: PipelineSpec = " Zstd  +  LZ4HC ".parse().unwrap();
        assert_eq!(p, q);
        assert_eq!("BROTLI".parse::<PipelineSpec>().unwrap().to_string(), "Brotli");
        assert!("Zstd+Zstd".parse::<PipelineSpec>().is_err());
        assert!("Zstd+LZ4HC+LZMA".parse::<PipelineSpec>().is_err());
        assert!("gzip".parse::<PipelineSpec>().is_err());
        assert!("".parse::<PipelineSpec>().is_err());
    }

    #[test]
    fn header_decode() {
        let spec = PipelineSpec::hybrid(CodecId::Brotli, CodecId::Zstd).unwrap();
        let h = ContainerHeader {
            version: 1,
            first_codec: spec.first().code(),
            second_codec: spec.second().unwrap().code(),
            original_len: 1000,
            original_crc32: 0xdead_beef,
        };
        let bytes = h.to_bytes();
        assert_eq!(&bytes[..8], &[b'H', b'Y', b'B', b'C', 1, 3, 2, 0]);
        let parsed = parse_header(&bytes).unwrap();
        assert_eq!(parsed.first_codec, 3);
        assert_eq!(parsed.second_codec, 2);
        assert_eq!(parsed.original_len, 1000);
        assert_eq!(parsed.pipeline().unwrap(), spec);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_header(&[b'H'; 10]), Err(Error::BadMagic { .. })));
        assert!(matches!(parse_header(b"HYBC\x01"), Err(Error::Truncated { len: 5, .. })));
        let good = ContainerHeader::for_input(&PipelineSpec::single(CodecId::Zstd), b"x").to_bytes();

        let mut b = good;
        b[..4].copy_from_slice(b"XXXX");
        assert!(matches!(parse_header(&b), Err(Error::BadMagic { .. })));
        let mut b = good;
        b[4] = 2;
        assert!(matches!(parse_header(&b), Err(Error::UnsupportedVersion(2))));
        let mut b = good;
        b[6] = 7;
        assert!(matches!(parse_header(&b), Err(Error::InvalidCodecByte { .. })));
        let mut b = good;
        b[5] = 0;
        assert!(matches!(parse_header(&b), Err(Error::InvalidCodecByte { .. })));
        let mut b = good;
        b[6] = b[5];
        assert!(matches!(parse_header(&b), Err(Error::InvalidCodecByte { .. })));
        let mut b = good;
        b[7] = 1;
        assert!(matches!(parse_header(&b), Err(Error::ReservedByte(1))));
    }

    #[test]
    fn single_container_header_fields() {
        let x = b"hello hello hello";
        let c = compress_pipeline(&PipelineSpec::single(CodecId::Zstd), x).unwrap();
        let h = parse_header(&c).unwrap();
        assert_eq!((h.first_codec, h.second_codec), (2, 0));
        assert_eq!(h.original_len, x.len() as u64);
        assert_eq!(h.original_crc32, crc32fast::hash(x));
    }

    #[test]
    fn lzma_brotli_round_trip() {
        let x = "क्षत्रिय धर्म ".repeat(300);
        let spec: PipelineSpec = "LZMA+Brotli".parse().unwrap();
        let c = compress_pipeline(&spec, x.as_bytes()).unwrap();
        assert_eq!(decompress_pipeline(&c).unwrap(), x.as_bytes());
    }

    #[test]
    fn integrity_mismatch_on_header_tamper() {
        let x = b"abcdefgh".repeat(64);
        let mut c = compress_pipeline(&PipelineSpec::single(CodecId::Bzip2), &x).unwrap();
        c[16] ^= 0x01;
        assert!(matches!(decompress_pipeline(&c), Err(Error::IntegrityMismatch { .. })));
    }

    proptest! {
        #[test]
        fn header_bytes_inverse(
            idx in 0usize..25,
            len in any::<u64>(),
            crc in any::<u32>(),
        ) {
            let spec = enumerate_pipelines()[idx];
            let h = ContainerHeader {
                version: FORMAT_VERSION,
                first_codec: spec.first().code(),
                second_codec: spec.second().map_or(0, CodecId::code),
                original_len: len,
                original_crc32: crc,
            };
            let bytes = h.to_bytes();
            prop_assert_eq!(bytes.len(), HEADER_LEN);
            prop_assert_eq!(parse_header(&bytes).unwrap(), h);
        }

        #[test]
        fn display_parse_inverse(idx in 0usize..25) {
            let spec = enumerate_pipelines()[idx];
            prop_assert_eq!(spec.to_string().parse::<PipelineSpec>().unwrap(), spec);
        }
    }
}
