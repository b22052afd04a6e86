use std::fmt;

/// Errors surfaced by parsing, decompression and queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An LZ77 copy phrase reaches left of the start of the string.
    CopyOutOfRange { phrase: usize },
    /// An LZ78 phrase references a phrase at or after its own index.
    BadPhraseRef { phrase: usize },
    /// Fingerprint algebra asked to strip more characters than present.
    LengthUnderflow,
    /// A query pattern contains the sentinel symbol.
    SentinelInPattern,
    /// A query parse failed a greedy-maximality check during matching.
    /// Detection is best effort; behavior on undetected non-canonical
    /// input is unspecified.
    NonCanonicalParse { phrase: usize },
    /// The index was not built for the scheme of the supplied parse.
    SchemeDisabled,
    /// Malformed parse text (the `LZPARSE v1` interchange format).
    ParseFormat(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::CopyOutOfRange { phrase } => {
                write!(f, "copy phrase {phrase} reaches before the string start")
            }
            Error::BadPhraseRef { phrase } => {
                write!(f, "phrase {phrase} references a later or equal phrase")
            }
            Error::LengthUnderflow => write!(f, "fingerprint strip longer than the whole"),
            Error::SentinelInPattern => write!(f, "pattern contains the sentinel symbol"),
            Error::NonCanonicalParse { phrase } => {
                write!(f, "parse is not canonical at phrase {phrase}")
            }
            Error::SchemeDisabled => write!(f, "index was not built for this parse scheme"),
            Error::ParseFormat(msg) => write!(f, "bad parse text: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
