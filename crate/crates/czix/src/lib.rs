//! Text indexing for compressed pattern queries.
//!
//! `czix` preprocesses a byte string `S` into a linear-space index that
//! answers pattern-matching queries given only the LZ77- or LZ78-compressed
//! form of the pattern, without ever decompressing it. Query time is
//! proportional to the number of phrases in the compressed pattern plus
//! `log` of the pattern length plus the number of reported occurrences.
//!
//! The index is built from four cooperating structures:
//!
//! * [`suffix::SuffixIndex`] — suffix array, compact suffix tree and a
//!   constant-time lcp oracle over `S` plus a terminating sentinel,
//! * [`phrase_trie::CompactPhraseTrie`] — a blind trie over the LZ parses of
//!   all suffixes, storing one phrase key per edge,
//! * [`fingerprint::FingerprintScheme`] — Karp-Rabin fingerprints with O(1)
//!   substring evaluation, certified collision-free on substrings of `S`,
//! * [`slice::SliceIndex`] — power-of-two level tables and slice trees that
//!   replace the suffix-array binary search with a fingerprint search whose
//!   cost depends on the pattern length, not the text length.
//!
//! [`query::Index`] ties everything together; see [`query::Index::locate`].
//!
//! Queries always report the longest prefix of the pattern that occurs in
//! the text, together with *all* its occurrence positions.

pub mod error;
pub mod fingerprint;
pub mod lz;
pub mod phrase_trie;
pub mod query;
pub mod slice;
pub mod suffix;

#[cfg(feature = "oracle")]
pub mod oracle;

/// Symbol over the extended alphabet: byte values `0..=255` plus the
/// virtual sentinel.
pub type Sym = u16;

/// End-of-string sentinel, appended to every indexed suffix. Compares
/// greater than every byte and never appears inside query patterns.
pub const SENTINEL: Sym = 256;

/// "No extension character" marker for a final partial LZ78 phrase.
pub const END78: Sym = 257;

pub use error::Error;
pub use query::{BuildOptions, Index, LocateResult, QueryStats};
