//! Dataset loading, size tiers, and a deterministic synthetic Devanagari
//! text generator used as a stand-in corpus.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const KIB: u64 = 1024;
const MIB: u64 = 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SizeClass {
    Small,
    Medium,
    Large,
}

impl SizeClass {
    pub const ALL: [SizeClass; 3] = [SizeClass::Small, SizeClass::Medium, SizeClass::Large];

    /// Anchor size of the tier: 145, 1,600 and 13,000 KiB.
    pub fn target_bytes(self) -> usize {
        (match self {
            SizeClass::Small => 145 * KIB,
            SizeClass::Medium => 1_600 * KIB,
            SizeClass::Large => 13_000 * KIB,
        }) as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
        }
    }
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SizeClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SizeClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown size class {s:?} (expected small|medium|large)"))
    }
}

/// Small below 512 KiB, Medium below 4 MiB, Large otherwise.
pub fn classify_size(byte_len: u64) -> SizeClass {
    if byte_len < 512 * KIB {
        SizeClass::Small
    } else if byte_len < 4 * MIB {
        SizeClass::Medium
    } else {
        SizeClass::Large
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDescriptor {
    pub name: String,
    pub size_class: SizeClass,
    pub byte_len: u64,
    /// Fraction of code points in U+0900..=U+097F.
    pub devanagari_fraction: f64,
}

impl DatasetDescriptor {
    /// Describe an in-memory buffer; fails on invalid UTF-8.
    pub fn describe(name: &str, bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|e| Error::InvalidUtf8 {
            path: name.into(),
            offset: e.valid_up_to(),
        })?;
        Ok(DatasetDescriptor {
            name: name.to_string(),
            size_class: classify_size(bytes.len() as u64),
            byte_len: bytes.len() as u64,
            devanagari_fraction: devanagari_fraction(text),
        })
    }
}

pub fn is_devanagari(c: char) -> bool {
    ('\u{0900}'..='\u{097F}').contains(&c)
}

pub fn devanagari_fraction(text: &str) -> f64 {
    let (mut total, mut deva) = (0usize, 0usize);
    for c in text.chars() {
        total += 1;
        deva += is_devanagari(c) as usize;
    }
    if total == 0 {
        0.0
    } else {
        deva as f64 / total as f64
    }
}

/// Read a file and validate it as strict UTF-8. Bytes are returned unmodified.
/// The dataset name is the file stem.
pub fn load_dataset(path: &Path) -> Result<(DatasetDescriptor, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let desc = DatasetDescriptor::describe(&name, &bytes).map_err(|e| match e {
        Error::InvalidUtf8 { offset, .. } => Error::InvalidUtf8 {
            path: path.to_path_buf(),
            offset,
        },
        other => other,
    })?;
    Ok((desc, bytes))
}

const CONSONANTS: &[char] = &[
    'क', 'ख', 'ग', 'घ', 'च', 'छ', 'ज', 'झ', 'ट', 'ठ', 'ड', 'ढ', 'ण', 'त', 'थ', 'द', 'ध', 'न',
    'प', 'फ', 'ब', 'भ', 'म', 'य', 'र', 'ल', 'व', 'श', 'ष', 'स', 'ह',
];
const VOWELS: &[char] = &['अ', 'आ', 'इ', 'ई', 'उ', 'ऊ', 'ए', 'ऐ', 'ओ', 'औ'];
const MATRAS: &[char] = &['ा', 'ि', 'ी', 'ु', 'ू', 'े', 'ै', 'ो', 'ौ', 'ं'];
const VIRAMA: char = '्';
const DANDA: char = '।';

const LEXICON_SIZE: usize = 5_000;
const ZIPF_EXPONENT: f64 = 1.1;

fn syllable(rng: &mut ChaCha8Rng, out: &mut String, word_initial: bool) {
    if word_initial && rng.gen_bool(0.12) {
        out.push(VOWELS[rng.gen_range(0..VOWELS.len())]);
        return;
    }
    out.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())]);
    if rng.gen_bool(0.12) {
        // conjunct
        out.push(VIRAMA);
        out.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())]);
    }
    if rng.gen_bool(0.65) {
        out.push(MATRAS[rng.gen_range(0..MATRAS.len())]);
    }
}

fn lexicon(rng: &mut ChaCha8Rng) -> Vec<String> {
    (0..LEXICON_SIZE)
        .map(|_| {
            let mut w = String::new();
            let syllables = rng.gen_range(2..=4);
            for i in 0..syllables {
                syllable(rng, &mut w, i == 0);
            }
            w
        })
        .collect()
}

/// Deterministic Devanagari text of exactly `size_class.target_bytes()` bytes.
pub fn generate_synthetic(size_class: SizeClass, seed: u64) -> Vec<u8> {
    generate_text(size_class.target_bytes(), seed)
}

/// Deterministic Devanagari text of exactly `target` bytes: words from a
/// seeded lexicon drawn with Zipf-distributed frequency, grouped into
/// danda-terminated sentences and lines.
pub fn generate_text(target: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = lexicon(&mut rng);
    let zipf = Zipf::new(words.len() as u64, ZIPF_EXPONENT).expect("valid zipf parameters");

    let mut out = String::with_capacity(target + 64);
    let mut sentence_left = rng.gen_range(5..=15);
    let mut sentences_in_line = 0;
    loop {
        let word = &words[zipf.sample(&mut rng) as usize - 1];
        let end = if sentence_left == 1 {
            sentences_in_line += 1;
            if sentences_in_line >= rng.gen_range(2..=5) {
                sentences_in_line = 0;
                " ।\n"
            } else {
                " । "
            }
        } else {
            " "
        };
        if out.len() + word.len() + end.len() > target {
            break;
        }
        out.push_str(word);
        out.push_str(end);
        sentence_left -= 1;
        if sentence_left == 0 {
            sentence_left = rng.gen_range(5..=15);
        }
    }
    debug_assert!(out.chars().all(|c| is_devanagari(c) || c == ' ' || c == '\n' || c == DANDA));
    // pad to the exact length with ASCII so the result stays valid UTF-8
    while out.len() < target {
        out.push(if out.len() + 1 == target { '\n' } else { ' ' });
    }
    out.into_bytes()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_tiers() {
        assert_eq!(classify_size(0), SizeClass::Small);
        assert_eq!(classify_size(148_480), SizeClass::Small);
        assert_eq!(classify_size(1_638_400), SizeClass::Medium);
        assert_eq!(classify_size(13_312_000), SizeClass::Large);
        assert_eq!(classify_size(512 * 1024 - 1), SizeClass::Small);
        assert_eq!(classify_size(512 * 1024), SizeClass::Medium);
        assert_eq!(classify_size(4 * 1024 * 1024), SizeClass::Large);
    }

    #[test]
    fn classify_is_monotone() {
        let mut prev = SizeClass::Small;
        for len in (0..20_000_000u64).step_by(65_537) {
            let c = classify_size(len);
            assert!(c >= prev);
            prev = c;
        }
    }

    #[test]
    fn fraction_rules() {
        assert_eq!(devanagari_fraction("plain ascii"), 0.0);
        assert_eq!(devanagari_fraction(""), 0.0);
        assert_eq!(devanagari_fraction("कख"), 1.0);
        assert_eq!(devanagari_fraction("क "), 0.5);
    }

    #[test]
    fn describe_rejects_bad_utf8() {
        let mut bytes = "नमस्ते".as_bytes().to_vec();
        let at = bytes.len();
        bytes.push(0xFF);
        match DatasetDescriptor::describe("x", &bytes) {
            Err(Error::InvalidUtf8 { offset, .. }) => assert_eq!(offset, at),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn synthetic_is_deterministic_and_exact() {
        let a = generate_synthetic(SizeClass::Small, 42);
        let b = generate_synthetic(SizeClass::Small, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 148_480);
        assert_ne!(a, generate_synthetic(SizeClass::Small, 43));
        let d = DatasetDescriptor::describe("s", &a).unwrap();
        assert_eq!(d.size_class, SizeClass::Small);
        assert!(d.devanagari_fraction > 0.8, "{}", d.devanagari_fraction);
    }

    #[test]
    fn generate_text_small_targets() {
        for target in [0usize, 1, 2, 3, 7, 100] {
            let t = generate_text(target, 1);
            assert_eq!(t.len(), target);
            assert!(std::str::from_utf8(&t).is_ok());
        }
    }
}
