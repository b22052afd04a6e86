//! Persisted index format: a versioned header with the enabled schemes
//! and the fingerprint parameters, followed by the raw text. Loading
//! rebuilds the structures deterministically from the persisted `(p, x)`,
//! so a reloaded index answers queries byte-identically to the one that
//! was saved.

use czix::fingerprint::CertMode;
use czix::lz::Scheme;
use czix::{BuildOptions, Index};
use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"CZIX";
const VERSION: u16 = 1;

const FLAG_LZ77SR: u8 = 1;
const FLAG_LZ77NSR: u8 = 2;
const FLAG_LZ78: u8 = 4;

pub enum LoadError {
    Io(io::Error),
    /// Magic/version mismatch or corrupt header.
    Format(String),
    /// The persisted fingerprint parameters fail certification.
    Integrity(String),
}

impl From<io::Error> for LoadError {
    fn from(e: io::Error) -> Self {
        LoadError::Io(e)
    }
}

fn scheme_flags(options: &BuildOptions) -> u8 {
    let mut f = 0;
    for s in &options.schemes {
        f |= match s {
            Scheme::Lz77SelfRef => FLAG_LZ77SR,
            Scheme::Lz77NoSelfRef => FLAG_LZ77NSR,
            Scheme::Lz78 => FLAG_LZ78,
        };
    }
    f
}

fn flags_schemes(f: u8) -> Vec<Scheme> {
    let mut v = Vec::new();
    if f & FLAG_LZ77SR != 0 {
        v.push(Scheme::Lz77SelfRef);
    }
    if f & FLAG_LZ77NSR != 0 {
        v.push(Scheme::Lz77NoSelfRef);
    }
    if f & FLAG_LZ78 != 0 {
        v.push(Scheme::Lz78);
    }
    v
}

pub fn save(index: &Index, path: &Path) -> io::Result<()> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(scheme_flags(index.options()));
    out.push(match index.fingerprints().mode() {
        CertMode::AllSubstrings => 0,
        CertMode::Pow2LengthsOnly => 1,
    });
    out.extend_from_slice(&index.fingerprints().modulus().to_le_bytes());
    out.extend_from_slice(&index.fingerprints().base().to_le_bytes());
    out.extend_from_slice(&(index.text().len() as u64).to_le_bytes());
    out.extend_from_slice(index.text());
    let mut f = fs::File::create(path)?;
    f.write_all(&out)
}

pub fn load(path: &Path) -> Result<Index, LoadError> {
    let mut data = Vec::new();
    fs::File::open(path)?.read_to_end(&mut data)?;
    if data.len() < 4 + 2 + 1 + 1 + 8 + 8 + 8 {
        return Err(LoadError::Format("file too short".into()));
    }
    if &data[0..4] != MAGIC {
        return Err(LoadError::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes([data[4], data[5]]);
    if version != VERSION {
        return Err(LoadError::Format(format!(
            "unsupported version {version} (expected {VERSION})"
        )));
    }
    let flags = data[6];
    let mode = data[7];
    let p = u64::from_le_bytes(data[8..16].try_into().unwrap());
    let x = u64::from_le_bytes(data[16..24].try_into().unwrap());
    let text_len = u64::from_le_bytes(data[24..32].try_into().unwrap()) as usize;
    let text = &data[32..];
    if text.len() != text_len {
        return Err(LoadError::Format("text length mismatch".into()));
    }
    let options = BuildOptions {
        schemes: flags_schemes(flags),
    };
    let expected_mode = match options.cert_mode() {
        CertMode::AllSubstrings => 0,
        CertMode::Pow2LengthsOnly => 1,
    };
    if mode != expected_mode {
        return Err(LoadError::Format("certification mode mismatch".into()));
    }
    Index::build_with_params(text, options, p, x).ok_or_else(|| {
        LoadError::Integrity("persisted fingerprint parameters fail certification".into())
    })
}
