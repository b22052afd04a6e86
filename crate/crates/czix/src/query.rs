//! Query engine: ties the phrase-trie descent, the lcp-based edge
//! resolution and the slice-tree extension into the three query types
//! (report, count, exists) for LZ77 and LZ78 patterns.

use crate::error::Error;
use crate::fingerprint::{certify_params, make_scheme_for, CertMode, FingerprintScheme};
use crate::lz::{LzParse, Scheme};
use crate::phrase_trie::{
    build_phrase_trie_streaming, descend, CompactPhraseTrie, MatchResult, PatternPhrase,
    PatternView,
};
use crate::slice::{build_slice_index, ExtSource, SliceIndex};
use crate::suffix::SuffixIndex;
use rand::Rng;

/// Instrumentation counters, one instance per query.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct QueryStats {
    /// Calls to the constant-time lcp oracle.
    pub lcp_calls: u64,
    /// Phrase-key lookups in trie child maps.
    pub child_map_probes: u64,
    /// Fingerprint comparisons and top-table lookups.
    pub fingerprint_probes: u64,
    /// Lookups in the power-of-two level tables.
    pub level_probes: u64,
}

impl QueryStats {
    pub fn total_probes(&self) -> u64 {
        self.lcp_calls + self.child_map_probes + self.fingerprint_probes + self.level_probes
    }
}

/// Which parsing schemes the index answers; the fingerprint certification
/// mode follows from whether self-referencing phrases are possible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildOptions {
    pub schemes: Vec<Scheme>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            schemes: vec![Scheme::Lz77SelfRef, Scheme::Lz77NoSelfRef, Scheme::Lz78],
        }
    }
}

impl BuildOptions {
    pub fn cert_mode(&self) -> CertMode {
        if self.schemes.contains(&Scheme::Lz77SelfRef) {
            CertMode::AllSubstrings
        } else {
            CertMode::Pow2LengthsOnly
        }
    }
}

/// Result of a reporting query.
#[derive(Debug, Clone)]
pub struct LocateResult {
    /// Length of the longest prefix of the pattern occurring in the text.
    pub matched_len: usize,
    /// Whether the entire pattern matched.
    pub full_match: bool,
    /// Suffix-array interval of all occurrences of the matched prefix.
    pub interval: (usize, usize),
    /// Occurrence positions in suffix-array order (not text order).
    pub positions: Vec<usize>,
    pub stats: QueryStats,
}

/// The linear-space index: suffix structures, one phrase trie per enabled
/// scheme, the slice index, and the certified fingerprint scheme.
pub struct Index {
    sidx: SuffixIndex,
    fps: FingerprintScheme,
    tries: Vec<(Scheme, CompactPhraseTrie)>,
    slice: SliceIndex,
    options: BuildOptions,
}

impl Index {
    /// Build with a fresh random fingerprint base.
    pub fn build(text: &[u8], options: BuildOptions) -> Index {
        Self::build_with_rng(text, options, &mut rand::thread_rng())
    }

    pub fn build_with_rng(text: &[u8], options: BuildOptions, rng: &mut impl Rng) -> Index {
        let sidx = SuffixIndex::new(text.to_vec());
        let fps = make_scheme_for(&sidx, options.cert_mode(), rng);
        Self::assemble(sidx, fps, options)
    }

    /// Rebuild deterministically from persisted fingerprint parameters.
    /// Fails if `(p, x)` is not collision-free for the options' mode.
    pub fn build_with_params(
        text: &[u8],
        options: BuildOptions,
        p: u64,
        x: u64,
    ) -> Option<Index> {
        let sidx = SuffixIndex::new(text.to_vec());
        let fps = certify_params(&sidx, p, x, options.cert_mode())?;
        Some(Self::assemble(sidx, fps, options))
    }

    /// Same index with the unpruned (O(n log n) node) slice variant, for
    /// equivalence testing only.
    #[cfg(feature = "oracle")]
    pub fn build_unpruned_with_rng(
        text: &[u8],
        options: BuildOptions,
        rng: &mut impl Rng,
    ) -> Index {
        let sidx = SuffixIndex::new(text.to_vec());
        let fps = make_scheme_for(&sidx, options.cert_mode(), rng);
        let tries = options
            .schemes
            .iter()
            .map(|&s| (s, build_phrase_trie_streaming(&sidx, s)))
            .collect();
        let slice = crate::slice::build_slice_index_unpruned(&sidx, &fps);
        Index {
            sidx,
            fps,
            tries,
            slice,
            options,
        }
    }

    fn assemble(sidx: SuffixIndex, fps: FingerprintScheme, options: BuildOptions) -> Index {
        let tries = options
            .schemes
            .iter()
            .map(|&s| (s, build_phrase_trie_streaming(&sidx, s)))
            .collect();
        let slice = build_slice_index(&sidx, &fps);
        Index {
            sidx,
            fps,
            tries,
            slice,
            options,
        }
    }

    pub fn text(&self) -> &[u8] {
        self.sidx.text()
    }

    pub fn suffix_index(&self) -> &SuffixIndex {
        &self.sidx
    }

    pub fn fingerprints(&self) -> &FingerprintScheme {
        &self.fps
    }

    pub fn slice_index(&self) -> &SliceIndex {
        &self.slice
    }

    pub fn options(&self) -> &BuildOptions {
        &self.options
    }

    pub fn trie_for(&self, scheme: Scheme) -> Option<&CompactPhraseTrie> {
        self.tries
            .iter()
            .find(|(s, _)| *s == scheme)
            .map(|(_, t)| t)
    }

    /// Total nodes across the augmented suffix tree (space accounting).
    pub fn augmented_node_count(&self) -> usize {
        self.slice.node_count()
    }

    /// Run every structural invariant; panics on violation.
    pub fn self_check(&self) {
        self.sidx.check_invariants();
        assert!(self.fps.is_certified(), "fingerprint scheme not certified");
        for (_, trie) in &self.tries {
            trie.check_invariants(&self.sidx);
        }
        self.slice.check_invariants(&self.sidx, &self.fps);
    }

    /// All occurrences of the longest matching pattern prefix, given only
    /// the compressed pattern.
    pub fn locate(&self, parse: &LzParse) -> Result<LocateResult, Error> {
        let (res, stats) = self.query_core(parse)?;
        let positions = (res.interval.0..res.interval.1)
            .map(|k| self.sidx.sa()[k] as usize)
            .collect();
        Ok(LocateResult {
            matched_len: res.matched_len,
            full_match: res.full_match,
            interval: res.interval,
            positions,
            stats,
        })
    }

    /// Longest matched prefix length and its occurrence count, without
    /// materializing positions.
    pub fn count(&self, parse: &LzParse) -> Result<(usize, usize), Error> {
        let (res, _) = self.query_core(parse)?;
        Ok((res.matched_len, res.interval.1 - res.interval.0))
    }

    /// Whether the whole pattern occurs.
    pub fn exists(&self, parse: &LzParse) -> Result<bool, Error> {
        let (res, _) = self.query_core(parse)?;
        Ok(res.full_match)
    }

    fn query_core(&self, parse: &LzParse) -> Result<(MatchResult, QueryStats), Error> {
        let view = PatternView::from_parse(parse)?;
        let trie = self
            .trie_for(view.scheme)
            .ok_or(Error::SchemeDisabled)?;
        let mut stats = QueryStats::default();
        let total = view.total_len();
        let z = view.phrase_count();

        let state = descend(trie, &self.sidx, &view, &mut stats);
        let mut res: MatchResult = match state.fail {
            None => MatchResult {
                matched_len: state.p,
                interval: state.interval,
                full_match: true,
            },
            Some(_) => {
                // Resolve the failing phrase and everything after it with
                // the global fingerprint extension. The trie interval only
                // covers suffixes whose parses agree with the followed
                // path; equal phrase prefixes can reappear in other
                // suffix-array regions, so a phrase that fails here may
                // still continue elsewhere.
                let mut k = state.k - 1; // 0-based failing phrase
                let mut p = state.p;
                let mut rep = state.rep;
                let mut dict = state.dict;
                loop {
                    let (src, budget) = match view.phrases[k] {
                        PatternPhrase::Literal(c) => {
                            if p == 0 {
                                // no suffix starts with this character
                                break MatchResult {
                                    matched_len: 0,
                                    interval: (0, self.sidx.len_with_sentinel()),
                                    full_match: false,
                                };
                            }
                            (
                                ExtSource::Span {
                                    start: 0,
                                    len: 0,
                                    extra: Some(c),
                                },
                                1,
                            )
                        }
                        PatternPhrase::Copy { r, l } => {
                            let src = if l > r {
                                ExtSource::Periodic {
                                    rho_start: rep + p - r,
                                    r,
                                }
                            } else {
                                ExtSource::in_text(rep + p - r, l)
                            };
                            (src, l)
                        }
                        PatternPhrase::Extend { j, c } => {
                            let (s, dl) = dict[j - 1];
                            let extra = (c != crate::END78).then_some(c);
                            (
                                ExtSource::Span {
                                    start: s,
                                    len: dl,
                                    extra,
                                },
                                dl + usize::from(c != crate::END78),
                            )
                        }
                    };
                    let (m_new, ivl) =
                        self.slice
                            .extend(&self.sidx, &self.fps, p, rep, src, budget, &mut stats);
                    if m_new < p + budget || k + 1 == z {
                        break MatchResult {
                            matched_len: m_new,
                            interval: ivl,
                            full_match: m_new == total,
                        };
                    }
                    // the phrase matched in full somewhere: record it and
                    // keep extending with the next phrase
                    rep = self.sidx.sa()[ivl.0] as usize;
                    if view.scheme == Scheme::Lz78 {
                        dict.push((rep + p, view.starts[k + 1] - view.starts[k]));
                    }
                    p = m_new;
                    k += 1;
                }
            }
        };

        res.interval = self.complete_interval(res.interval, res.matched_len);
        Ok((res, stats))
    }

    /// Widen a seed interval (whose suffixes all carry the matched prefix)
    /// to every suffix sharing it. Costs O(occurrences added); phrase-trie
    /// node intervals only cover suffixes whose parses agree, which can be
    /// a strict subset of the string-level occurrence set.
    fn complete_interval(&self, interval: (usize, usize), len: usize) -> (usize, usize) {
        let n_ext = self.sidx.len_with_sentinel();
        if len == 0 {
            return (0, n_ext);
        }
        let lcp = self.sidx.lcp_array();
        let (mut lo, mut hi) = interval;
        while lo > 0 && lcp[lo - 1] as usize >= len {
            lo -= 1;
        }
        while hi < n_ext && lcp[hi - 1] as usize >= len {
            hi += 1;
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lz::{lz77_parse, lz78_parse, SelfRefMode};
    use crate::oracle::naive_locate;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn build(text: &[u8], seed: u64) -> Index {
        let mut rng = StdRng::seed_from_u64(seed);
        Index::build_with_rng(text, BuildOptions::default(), &mut rng)
    }

    fn parse_for(pattern: &[u8], scheme: Scheme) -> LzParse {
        match scheme {
            Scheme::Lz77SelfRef => LzParse::Lz77(lz77_parse(pattern, SelfRefMode::SelfRef)),
            Scheme::Lz77NoSelfRef => LzParse::Lz77(lz77_parse(pattern, SelfRefMode::NoSelfRef)),
            Scheme::Lz78 => LzParse::Lz78(lz78_parse(pattern)),
        }
    }

    #[test]
    fn running_example_locate() {
        let idx = build(b"ABABACABABA", 1);
        idx.self_check();

        let res = idx
            .locate(&parse_for(b"ABABA", Scheme::Lz77SelfRef))
            .unwrap();
        assert_eq!(res.matched_len, 5);
        assert!(res.full_match);
        let mut pos = res.positions.clone();
        pos.sort_unstable();
        assert_eq!(pos, vec![0, 6]);

        let res = idx
            .locate(&parse_for(b"ABABAB", Scheme::Lz77SelfRef))
            .unwrap();
        assert_eq!(res.matched_len, 5);
        assert!(!res.full_match);
        let mut pos = res.positions.clone();
        pos.sort_unstable();
        assert_eq!(pos, vec![0, 6]);

        assert_eq!(
            idx.count(&parse_for(b"ABABA", Scheme::Lz77SelfRef)).unwrap(),
            (5, 2)
        );
        assert!(idx.exists(&parse_for(b"ABABA", Scheme::Lz77SelfRef)).unwrap());
        assert!(!idx.exists(&parse_for(b"ABABAB", Scheme::Lz77SelfRef)).unwrap());
    }

    #[test]
    fn empty_pattern_and_empty_text() {
        let idx = build(b"ABABACABABA", 2);
        let res = idx.locate(&parse_for(b"", Scheme::Lz77SelfRef)).unwrap();
        assert_eq!(res.matched_len, 0);
        assert!(res.full_match);
        assert_eq!(res.positions.len(), 12);
        assert_eq!(idx.count(&parse_for(b"", Scheme::Lz78)).unwrap(), (0, 12));

        let idx = build(b"", 3);
        idx.self_check();
        for scheme in [Scheme::Lz77SelfRef, Scheme::Lz77NoSelfRef, Scheme::Lz78] {
            let res = idx.locate(&parse_for(b"XYZ", scheme)).unwrap();
            assert_eq!(res.matched_len, 0);
            assert!(!res.full_match);
        }
    }

    #[test]
    fn scheme_gating_and_validation() {
        let mut rng = StdRng::seed_from_u64(4);
        let idx = Index::build_with_rng(
            b"ABAB",
            BuildOptions {
                schemes: vec![Scheme::Lz77NoSelfRef],
            },
            &mut rng,
        );
        assert_eq!(
            idx.locate(&parse_for(b"AB", Scheme::Lz78)).err(),
            Some(Error::SchemeDisabled)
        );
        // bad copy: r > available prefix
        let bad = LzParse::Lz77(crate::lz::Lz77Parse {
            phrases: vec![
                crate::lz::Phrase77::Literal(b'A' as crate::Sym),
                crate::lz::Phrase77::Copy { r: 2, l: 1 },
            ],
            mode: SelfRefMode::NoSelfRef,
        });
        assert_eq!(
            idx.locate(&bad).err(),
            Some(Error::CopyOutOfRange { phrase: 2 })
        );
    }

    #[test]
    fn occurrence_sets_complete_across_parse_shapes() {
        // full-consume locus covers only one suffix's subtree while the
        // other occurrence parses differently
        let idx = build(b"ABABAB", 5);
        let res = idx.locate(&parse_for(b"ABAB", Scheme::Lz77SelfRef)).unwrap();
        assert_eq!(res.matched_len, 4);
        assert!(res.full_match);
        let mut pos = res.positions.clone();
        pos.sort_unstable();
        assert_eq!(pos, vec![0, 2]);

        // mid-edge mismatch with a sibling-subtree occurrence
        let idx = build(b"ABACABAB", 6);
        let res = idx.locate(&parse_for(b"ABAX", Scheme::Lz77SelfRef)).unwrap();
        assert_eq!(res.matched_len, 3);
        let (nm, nocc) = naive_locate(b"ABACABAB", b"ABAX");
        assert_eq!(res.matched_len, nm);
        let mut pos = res.positions.clone();
        pos.sort_unstable();
        assert_eq!(pos, nocc);
    }

    #[test]
    fn selfref_pattern_on_periodic_text() {
        let idx = build(b"AAAAAAAAAB", 7);
        // "AAAAAAAA" = [A, Copy(1,7)], self-referencing
        let res = idx
            .locate(&parse_for(b"AAAAAAAA", Scheme::Lz77SelfRef))
            .unwrap();
        assert_eq!(res.matched_len, 8);
        assert!(res.full_match);
        let mut pos = res.positions.clone();
        pos.sort_unstable();
        assert_eq!(pos, vec![0, 1]);
    }

    #[test]
    fn master_equivalence_randomized() {
        let mut rng = StdRng::seed_from_u64(99);
        for trial in 0..40u64 {
            let n = rng.gen_range(1..160);
            let sigma = rng.gen_range(2..=4u8);
            let text: Vec<u8> = (0..n).map(|_| b'A' + rng.gen_range(0..sigma)).collect();
            let idx = build(&text, 10_000 + trial);

            for q in 0..12 {
                let pattern: Vec<u8> = if q % 2 == 0 && n >= 2 {
                    let s = rng.gen_range(0..n - 1);
                    let e = rng.gen_range(s + 1..=n.min(s + 40));
                    text[s..e].to_vec()
                } else {
                    let m = rng.gen_range(0..20);
                    (0..m).map(|_| b'A' + rng.gen_range(0..sigma)).collect()
                };
                let (nm, nocc) = naive_locate(&text, &pattern);
                for scheme in [Scheme::Lz77SelfRef, Scheme::Lz77NoSelfRef, Scheme::Lz78] {
                    let parse = parse_for(&pattern, scheme);
                    let res = idx.locate(&parse).unwrap();
                    let mut pos = res.positions.clone();
                    pos.sort_unstable();
                    assert_eq!(
                        (res.matched_len, &pos),
                        (nm, &nocc),
                        "text={:?} pattern={:?} scheme={:?}",
                        String::from_utf8_lossy(&text),
                        String::from_utf8_lossy(&pattern),
                        scheme,
                    );
                    assert_eq!(res.full_match, nm == pattern.len());
                    let (cl, cc) = idx.count(&parse).unwrap();
                    assert_eq!((cl, cc), (nm, nocc.len()));
                    assert_eq!(idx.exists(&parse).unwrap(), nm == pattern.len());
                }
            }
        }
    }

}
