//! Space-efficient (blind) phrase trie: a compact trie over the LZ parses
//! of all suffixes that stores one phrase key per edge, the uncompressed
//! character length of each edge and one representative leaf, plus the
//! matching logic that resolves mismatches with single lcp queries and a
//! suffix-array binary search.

use crate::error::Error;
use crate::lz::{
    make_suffix_provider, LzParse, MaterializedProvider, Phrase77, Phrase78, PhraseKind,
    PhraseProvider, Scheme,
};
use crate::query::QueryStats;
use crate::suffix::SuffixIndex;
use crate::{Sym, END78};
use std::collections::HashMap;

/// Key identifying the first phrase of an edge. LZ78 keys use the raw
/// (phrase index, next character) pair: below any given node both sides of
/// a comparison share all earlier phrases, so equal indices reference
/// equal strings and key equality coincides with phrase-expansion
/// equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhraseKey {
    Literal(Sym),
    Copy { r: u32, l: u32 },
    Lz78 { j: u32, next: Sym },
}

fn key_of(kind: PhraseKind) -> PhraseKey {
    match kind {
        PhraseKind::Lit(c) => PhraseKey::Literal(c),
        PhraseKind::Copy { r, l } => PhraseKey::Copy { r, l },
        PhraseKind::Ext { j, c } => PhraseKey::Lz78 { j, next: c },
    }
}

const LEAF_PHRASE_DEPTH: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
struct TrieNode {
    parent: u32,
    /// Number of whole phrases on the root path. Leaves store a marker
    /// (their phrase count is never needed).
    phrase_depth: u32,
    /// Uncompressed characters on the root path.
    char_depth: u32,
    lo: u32,
    hi: u32,
    kids_start: u32,
    kids_len: u32,
}

/// Blind trie over the LZ parses of all suffixes of `text + sentinel`.
#[derive(Debug, PartialEq, Eq)]
pub struct CompactPhraseTrie {
    scheme: Scheme,
    nodes: Vec<TrieNode>,
    kids: Vec<u32>,
    child_map: HashMap<(u32, PhraseKey), u32>,
}

impl CompactPhraseTrie {
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> u32 {
        0
    }

    pub fn interval(&self, v: u32) -> (usize, usize) {
        let n = &self.nodes[v as usize];
        (n.lo as usize, n.hi as usize)
    }

    pub fn char_depth(&self, v: u32) -> usize {
        self.nodes[v as usize].char_depth as usize
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.nodes[v as usize].kids_len == 0
    }

    pub fn children(&self, v: u32) -> &[u32] {
        let n = &self.nodes[v as usize];
        &self.kids[n.kids_start as usize..(n.kids_start + n.kids_len) as usize]
    }

    pub fn child_by_key(&self, v: u32, key: PhraseKey) -> Option<u32> {
        self.child_map.get(&(v, key)).copied()
    }

    /// Leftmost suffix start below `v`.
    pub fn rep_suffix(&self, idx: &SuffixIndex, v: u32) -> usize {
        idx.sa()[self.nodes[v as usize].lo as usize] as usize
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.kids_len == 0).count()
    }

    /// True when some node carries two children with equal phrase keys:
    /// the suffixes sharing a phrase prefix then split into several
    /// suffix-array fragments and a key lookup reaches only one of them.
    pub fn has_duplicate_keys(&self) -> bool {
        self.child_map.len() < self.nodes.len() - 1
    }

    /// Structural invariants. O(N) plus one range-minimum per node.
    pub fn check_invariants(&self, idx: &SuffixIndex) {
        let n_ext = idx.len_with_sentinel();
        assert_eq!(self.leaf_count(), n_ext, "trie leaf count != N");
        assert!(self.node_count() <= 2 * n_ext, "trie node count > 2N");
        for v in 0..self.node_count() {
            let node = &self.nodes[v];
            let (lo, hi) = (node.lo as usize, node.hi as usize);
            assert!(lo < hi);
            if node.kids_len == 0 {
                assert_eq!(hi - lo, 1);
            } else {
                assert!(v == 0 || node.kids_len >= 2, "unary internal trie node");
                let mut at = lo;
                for &c in self.children(v as u32) {
                    let cn = &self.nodes[c as usize];
                    assert_eq!(cn.lo as usize, at);
                    assert!(cn.char_depth > node.char_depth || v == 0);
                    at = cn.hi as usize;
                }
                assert_eq!(at, hi);
            }
            // every leaf below shares the root-path characters
            if hi - lo > 1 {
                assert!(
                    idx.lcp_range_min(lo, hi - 1) >= node.char_depth as usize,
                    "leaves below a node disagree on the edge span"
                );
            }
        }
    }
}

/// Build from pre-materialized parses, one per suffix in text order
/// (`parses[i]` parses suffix `i`). Fine at desk scale; index construction
/// uses [`build_phrase_trie_streaming`] which generates phrases lazily and
/// produces the identical structure.
pub fn build_phrase_trie(idx: &SuffixIndex, parses: &[LzParse]) -> CompactPhraseTrie {
    assert_eq!(parses.len(), idx.len_with_sentinel());
    let scheme = parses[0].scheme();
    build_impl(idx, scheme, |start| {
        Box::new(MaterializedProvider::new(&parses[start]))
    })
}

/// Build by parsing each suffix lazily, only as far as the divergence from
/// its suffix-array neighbor requires.
pub fn build_phrase_trie_streaming(idx: &SuffixIndex, scheme: Scheme) -> CompactPhraseTrie {
    build_impl(idx, scheme, |start| make_suffix_provider(idx, start, scheme))
}

fn build_impl<'a>(
    idx: &'a SuffixIndex,
    scheme: Scheme,
    mut provider_for: impl FnMut(usize) -> Box<dyn PhraseProvider + 'a>,
) -> CompactPhraseTrie {
    let n_ext = idx.len_with_sentinel();
    let sa = idx.sa();

    let mut nodes = vec![TrieNode {
        parent: 0,
        phrase_depth: 0,
        char_depth: 0,
        lo: 0,
        hi: n_ext as u32,
        kids_start: 0,
        kids_len: 0,
    }];
    // Edge key stored on the child side; parents may change on splits but
    // the key of an existing edge never changes above the split point.
    let mut edge_key: Vec<Option<PhraseKey>> = vec![None];
    let mut stack: Vec<u32> = vec![0];
    let mut prev: Option<Box<dyn PhraseProvider + 'a>> = None;

    for k in 0..n_ext {
        let start = sa[k] as usize;
        let mut cur = provider_for(start);

        if let Some(mut pv) = prev.take() {
            // common phrase count with the previous (suffix-array) parse
            let mut t = 0usize;
            loop {
                match (pv.get(t), cur.get(t)) {
                    (Some(a), Some(b)) if a == b => t += 1,
                    _ => break,
                }
            }
            let p_div = cur.boundary(t) as u32;
            let t = t as u32;

            let mut last_popped: Option<u32> = None;
            while nodes[*stack.last().unwrap() as usize].phrase_depth > t {
                let popped = stack.pop().unwrap();
                nodes[popped as usize].hi = k as u32;
                last_popped = Some(popped);
            }
            let top = *stack.last().unwrap();
            if nodes[top as usize].phrase_depth < t {
                let adopted = last_popped.expect("divergence below the stack top");
                let u = nodes.len() as u32;
                nodes.push(TrieNode {
                    parent: top,
                    phrase_depth: t,
                    char_depth: p_div,
                    lo: nodes[adopted as usize].lo,
                    hi: 0,
                    kids_start: 0,
                    kids_len: 0,
                });
                // the split keeps the old key above; the adopted child
                // re-enters below keyed by the previous parse's phrase t
                edge_key.push(edge_key[adopted as usize]);
                edge_key[adopted as usize] = Some(key_of(
                    pv.get(t as usize).expect("prev parse has phrase t").kind,
                ));
                nodes[adopted as usize].parent = u;
                stack.push(u);
            }
        }

        let top = *stack.last().unwrap();
        let leaf = nodes.len() as u32;
        let first_unshared = nodes[top as usize].phrase_depth as usize;
        nodes.push(TrieNode {
            parent: top,
            phrase_depth: LEAF_PHRASE_DEPTH,
            char_depth: (n_ext - start) as u32,
            lo: k as u32,
            hi: k as u32 + 1,
            kids_start: 0,
            kids_len: 0,
        });
        edge_key.push(Some(key_of(
            cur.get(first_unshared)
                .expect("parse extends past the branch point")
                .kind,
        )));
        stack.push(leaf);
        prev = Some(cur);
    }

    while let Some(t) = stack.pop() {
        if nodes[t as usize].hi == 0 {
            nodes[t as usize].hi = n_ext as u32;
        }
    }
    nodes[0].hi = n_ext as u32;

    // child lists in suffix-array order + key map
    let mut per_parent: Vec<Vec<u32>> = vec![Vec::new(); nodes.len()];
    for v in 1..nodes.len() as u32 {
        per_parent[nodes[v as usize].parent as usize].push(v);
    }
    let mut kids = Vec::with_capacity(nodes.len().saturating_sub(1));
    let mut child_map = HashMap::new();
    for v in 0..nodes.len() {
        per_parent[v].sort_by_key(|&c| nodes[c as usize].lo);
        nodes[v].kids_start = kids.len() as u32;
        nodes[v].kids_len = per_parent[v].len() as u32;
        for &c in &per_parent[v] {
            kids.push(c);
            child_map.insert(
                (v as u32, edge_key[c as usize].expect("non-root edge key")),
                c,
            );
        }
    }

    CompactPhraseTrie {
        scheme,
        nodes,
        kids,
        child_map,
    }
}

// ---------------------------------------------------------------------------
// Pattern-side view and descent.
// ---------------------------------------------------------------------------

/// One phrase of a validated query parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternPhrase {
    Literal(Sym),
    Copy { r: usize, l: usize },
    Extend { j: usize, c: Sym },
}

/// A query parse prepared for matching: validated phrases plus their
/// character start offsets.
#[derive(Debug, Clone)]
pub struct PatternView {
    pub scheme: Scheme,
    pub phrases: Vec<PatternPhrase>,
    /// starts[k] = character offset of phrase k; one extra entry = total.
    pub starts: Vec<usize>,
}

impl PatternView {
    pub fn from_parse(parse: &LzParse) -> Result<PatternView, Error> {
        let scheme = parse.scheme();
        let mut phrases = Vec::with_capacity(parse.phrase_count());
        let mut starts = vec![0usize];
        match parse {
            LzParse::Lz77(p) => {
                for (i, ph) in p.phrases.iter().enumerate() {
                    let pos = *starts.last().unwrap();
                    match *ph {
                        Phrase77::Literal(c) => {
                            if c >= 256 {
                                return Err(Error::SentinelInPattern);
                            }
                            phrases.push(PatternPhrase::Literal(c));
                            starts.push(pos + 1);
                        }
                        Phrase77::Copy { r, l } => {
                            if r == 0 || l == 0 || r > pos {
                                return Err(Error::CopyOutOfRange { phrase: i + 1 });
                            }
                            phrases.push(PatternPhrase::Copy { r, l });
                            starts.push(pos + l);
                        }
                    }
                }
            }
            LzParse::Lz78(p) => {
                let mut lens: Vec<usize> = Vec::with_capacity(p.phrases.len());
                for (i, ph) in p.phrases.iter().enumerate() {
                    let pos = *starts.last().unwrap();
                    match *ph {
                        Phrase78::Literal(c) => {
                            if c >= 256 {
                                return Err(Error::SentinelInPattern);
                            }
                            phrases.push(PatternPhrase::Literal(c));
                            lens.push(1);
                            starts.push(pos + 1);
                        }
                        Phrase78::Extend { j, c } => {
                            if j == 0 || j > i {
                                return Err(Error::BadPhraseRef { phrase: i + 1 });
                            }
                            if c == END78 {
                                if i + 1 != p.phrases.len() {
                                    return Err(Error::NonCanonicalParse { phrase: i + 1 });
                                }
                            } else if c >= 256 {
                                return Err(Error::SentinelInPattern);
                            }
                            let len = lens[j - 1] + usize::from(c != END78);
                            phrases.push(PatternPhrase::Extend { j, c });
                            lens.push(len);
                            starts.push(pos + len);
                        }
                    }
                }
            }
        }
        Ok(PatternView {
            scheme,
            phrases,
            starts,
        })
    }

    pub fn total_len(&self) -> usize {
        *self.starts.last().unwrap()
    }

    pub fn phrase_count(&self) -> usize {
        self.phrases.len()
    }
}

/// Where the descent stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriePos {
    Node(u32),
    /// Inside the edge entering `child` (character progress lives in the
    /// state's matched length).
    OnEdge { child: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailKind {
    /// Phrase `k` is absent from the child map of the current node.
    AtNode,
    /// Phrase `k` failed the content test inside the current edge.
    OnEdge,
}

/// Descent outcome: either every phrase matched (`fail == None`) or
/// phrase `k` (1-based) is the first that fails.
#[derive(Debug, Clone)]
pub struct DescentState {
    /// 1-based index of the first unmatched phrase; `z + 1` when the whole
    /// compressed pattern was consumed.
    pub k: usize,
    /// Characters matched so far (start offset of phrase `k`).
    pub p: usize,
    pub pos: TriePos,
    /// A suffix start whose suffix realizes the matched prefix.
    pub rep: usize,
    /// Suffix-array interval at the current position.
    pub interval: (usize, usize),
    pub fail: Option<FailKind>,
    /// For LZ78: (start in S, expansion length) of every fully matched
    /// phrase, in phrase order.
    pub dict: Vec<(usize, usize)>,
}

/// Match the pattern's phrases in the trie as far as possible.
///
/// Fully matched phrases cost one child-map probe (at nodes) or one lcp
/// query (inside edges) each. The failing phrase is left unresolved; see
/// [`finish_on_edge`], [`binary_search_longest`] and the slice-tree
/// extension.
pub fn descend(
    trie: &CompactPhraseTrie,
    idx: &SuffixIndex,
    pattern: &PatternView,
    stats: &mut QueryStats,
) -> DescentState {
    let z = pattern.phrases.len();
    let mut state = DescentState {
        k: 1,
        p: 0,
        pos: TriePos::Node(trie.root()),
        rep: trie.rep_suffix(idx, trie.root()),
        interval: trie.interval(trie.root()),
        fail: None,
        dict: Vec::new(),
    };

    let mut k = 0usize; // 0-based next phrase
    loop {
        if k == z {
            state.k = z + 1;
            return state;
        }
        let ph = pattern.phrases[k];
        match state.pos {
            TriePos::Node(v) => {
                let key = match ph {
                    PatternPhrase::Literal(c) => PhraseKey::Literal(c),
                    PatternPhrase::Copy { r, l } => PhraseKey::Copy {
                        r: r as u32,
                        l: l as u32,
                    },
                    PatternPhrase::Extend { j, c } => PhraseKey::Lz78 {
                        j: j as u32,
                        next: c,
                    },
                };
                stats.child_map_probes += 1;
                match trie.child_by_key(v, key) {
                    None => {
                        state.k = k + 1;
                        state.fail = Some(FailKind::AtNode);
                        return state;
                    }
                    Some(child) => {
                        let rep = trie.rep_suffix(idx, child);
                        if pattern.scheme == Scheme::Lz78 {
                            state
                                .dict
                                .push((rep + state.p, pattern.starts[k + 1] - pattern.starts[k]));
                        }
                        state.p = pattern.starts[k + 1];
                        state.rep = rep;
                        state.interval = trie.interval(child);
                        k += 1;
                        state.pos = if state.p == trie.char_depth(child) {
                            TriePos::Node(child)
                        } else {
                            TriePos::OnEdge { child }
                        };
                    }
                }
            }
            TriePos::OnEdge { child } => {
                let i = state.rep;
                let matched_full = match ph {
                    PatternPhrase::Literal(c) => {
                        if idx.sym(i + state.p) == c {
                            if pattern.scheme == Scheme::Lz78 {
                                state.dict.push((i + state.p, 1));
                            }
                            true
                        } else {
                            false
                        }
                    }
                    PatternPhrase::Copy { r, l } => {
                        stats.lcp_calls += 1;
                        let t = idx.lcp_suffixes(i + state.p, i + state.p - r).min(l);
                        t == l
                    }
                    PatternPhrase::Extend { j, c } => {
                        let (s, dl) = state.dict[j - 1];
                        stats.lcp_calls += 1;
                        let t = idx.lcp_suffixes(s, i + state.p).min(dl);
                        if t < dl {
                            false
                        } else if c == END78 {
                            state.dict.push((i + state.p, dl));
                            true
                        } else if idx.sym(i + state.p + dl) == c {
                            state.dict.push((i + state.p, dl + 1));
                            true
                        } else {
                            false
                        }
                    }
                };
                if !matched_full {
                    state.k = k + 1;
                    state.fail = Some(FailKind::OnEdge);
                    return state;
                }
                state.p = pattern.starts[k + 1];
                k += 1;
                if state.p == trie.char_depth(child) {
                    state.pos = TriePos::Node(child);
                }
            }
        }
    }
}

/// Query result: the longest matched prefix length, the suffix-array
/// interval of all its occurrences, and whether the whole pattern matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchResult {
    pub matched_len: usize,
    pub interval: (usize, usize),
    pub full_match: bool,
}

/// Resolve a mismatch that happened inside an edge, or a literal mismatch
/// at a node: one lcp query against the representative leaf gives the
/// exact matched length; the occurrences are the interval stored at the
/// node below (completed to the full occurrence set by the query engine).
pub fn finish_on_edge(
    idx: &SuffixIndex,
    pattern: &PatternView,
    state: &DescentState,
    stats: &mut QueryStats,
) -> MatchResult {
    debug_assert!(state.fail.is_some());
    let ph = pattern.phrases[state.k - 1];
    let i = state.rep;
    let p = state.p;
    let matched_len = match ph {
        PatternPhrase::Literal(_) => p,
        PatternPhrase::Copy { r, l } => {
            stats.lcp_calls += 1;
            p + idx.lcp_suffixes(i + p, i + p - r).min(l)
        }
        PatternPhrase::Extend { j, c } => {
            let (s, dl) = state.dict[j - 1];
            stats.lcp_calls += 1;
            let within = idx.lcp_suffixes(s, i + p).min(dl);
            let _ = c;
            p + within
        }
    };
    MatchResult {
        matched_len,
        interval: state.interval,
        full_match: matched_len == pattern.total_len(),
    }
}

/// Candidate leaves for the longest-match binary search: either a raw
/// suffix-array interval or the leaf list of a slice-tree bottom tree.
pub(crate) trait Candidates {
    fn count(&self) -> usize;
    /// Representative suffix start of candidate `i`.
    fn rep(&self, i: usize) -> usize;
    /// Suffix-array interval contributed by candidate `i`.
    fn interval(&self, i: usize) -> (usize, usize);
}

pub(crate) struct SaInterval<'a> {
    pub idx: &'a SuffixIndex,
    pub lo: usize,
    pub hi: usize,
}

impl Candidates for SaInterval<'_> {
    fn count(&self) -> usize {
        self.hi - self.lo
    }
    fn rep(&self, i: usize) -> usize {
        self.idx.sa()[self.lo + i] as usize
    }
    fn interval(&self, i: usize) -> (usize, usize) {
        (self.lo + i, self.lo + i + 1)
    }
}

/// How the failing copy phrase's characters are reproduced from the
/// text: each candidate's own prefix holds the source `r` characters
/// back. Valid for self-referencing phrases too.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ProbeSrc {
    pub r: usize,
}

impl ProbeSrc {
    /// Extension of candidate `rep` beyond `p`, capped at `l`. Exact for
    /// candidates sharing the length-`p` prefix with the pattern.
    #[inline]
    pub(crate) fn probe(self, idx: &SuffixIndex, rep: usize, p: usize, l: usize) -> usize {
        idx.lcp_suffixes(rep + p, rep + p - self.r).min(l)
    }

    /// Pattern character at offset `p + t`, `t < l`, reading through the
    /// candidate that realized agreement `t`.
    #[inline]
    pub(crate) fn pattern_sym(self, idx: &SuffixIndex, rep: usize, p: usize, t: usize) -> Sym {
        idx.sym(rep + p + t - self.r)
    }
}

/// Binary search over candidate leaves that all share the length-`p`
/// prefix with the pattern, for the longest extension of the failing copy
/// phrase. Returns the exact extension and the contiguous candidate range
/// achieving it (one lcp probe per step, plus an O(occ) outward scan).
pub(crate) fn longest_match_search(
    idx: &SuffixIndex,
    cands: &dyn Candidates,
    p: usize,
    src: ProbeSrc,
    l: usize,
    stats: &mut QueryStats,
) -> (usize, (usize, usize)) {
    let n = cands.count();
    debug_assert!(n > 0);
    let mut best_t = 0usize;
    let mut best_i = 0usize;

    let mut lo = 0usize;
    let mut hi = n;
    while lo < hi {
        let mid = (lo + hi) / 2;
        let rep = cands.rep(mid);
        stats.lcp_calls += 1;
        let t = src.probe(idx, rep, p, l);
        if t > best_t {
            best_t = t;
            best_i = mid;
        }
        if t == l {
            best_t = l;
            best_i = mid;
            break;
        }
        let pat = src.pattern_sym(idx, rep, p, t);
        let suf = idx.sym(rep + p + t);
        debug_assert_ne!(pat, suf);
        if pat < suf {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }

    // collect every candidate achieving the maximum; they are adjacent
    let target = p + best_t;
    let best_rep = cands.rep(best_i);
    let mut alo = best_i;
    while alo > 0 {
        stats.lcp_calls += 1;
        if idx.lcp_suffixes(cands.rep(alo - 1), best_rep) >= target {
            alo -= 1;
        } else {
            break;
        }
    }
    let mut ahi = best_i + 1;
    while ahi < n {
        stats.lcp_calls += 1;
        if idx.lcp_suffixes(cands.rep(ahi), best_rep) >= target {
            ahi += 1;
        } else {
            break;
        }
    }
    let interval = (cands.interval(alo).0, cands.interval(ahi - 1).1);
    (best_t, interval)
}

/// Longest match of a failing LZ77 copy phrase among the leaves of a
/// suffix-array interval, per the plain (non-slice) algorithm.
pub fn binary_search_longest(
    idx: &SuffixIndex,
    interval: (usize, usize),
    p: usize,
    r: usize,
    l: usize,
    pattern_total: usize,
    stats: &mut QueryStats,
) -> MatchResult {
    let cands = SaInterval {
        idx,
        lo: interval.0,
        hi: interval.1,
    };
    let (t, occ) = longest_match_search(idx, &cands, p, ProbeSrc { r }, l, stats);
    MatchResult {
        matched_len: p + t,
        interval: occ,
        full_match: p + t == pattern_total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lz::{lz77_parse, parse_all_suffixes, SelfRefMode};
    use crate::suffix::build_suffix_index;
    use crate::SENTINEL;

    fn trie_for(text: &[u8], scheme: Scheme) -> (crate::suffix::SuffixIndex, CompactPhraseTrie) {
        let idx = build_suffix_index(text);
        let parses = parse_all_suffixes(&idx, scheme);
        let trie = build_phrase_trie(&idx, &parses);
        let streamed = build_phrase_trie_streaming(&idx, scheme);
        assert_eq!(trie, streamed, "streaming and materialized builds differ");
        trie.check_invariants(&idx);
        (idx, trie)
    }

    #[test]
    fn fig1_structure() {
        let (idx, trie) = trie_for(b"ABABACABABA", Scheme::Lz77SelfRef);
        assert_eq!(trie.leaf_count(), 12);

        // path of suffix 6: keys A, B, Copy(2,3), then the sentinel
        let mut v = trie.root();
        let path = [
            PhraseKey::Literal(b'A' as Sym),
            PhraseKey::Literal(b'B' as Sym),
            PhraseKey::Copy { r: 2, l: 3 },
        ];
        for key in path {
            v = trie.child_by_key(v, key).expect("path key present");
        }
        let (lo, hi) = trie.interval(v);
        let mut suffixes: Vec<usize> = (lo..hi).map(|k| idx.sa()[k] as usize).collect();
        suffixes.sort_unstable();
        assert_eq!(suffixes, vec![0, 6]);

        // the node reached by A, B branches on Copy(2,1) and Copy(2,3)
        let mut v = trie.root();
        v = trie
            .child_by_key(v, PhraseKey::Literal(b'A' as Sym))
            .unwrap();
        v = trie
            .child_by_key(v, PhraseKey::Literal(b'B' as Sym))
            .unwrap();
        assert!(trie
            .child_by_key(v, PhraseKey::Copy { r: 2, l: 1 })
            .is_some());
        assert!(trie
            .child_by_key(v, PhraseKey::Copy { r: 2, l: 3 })
            .is_some());
    }

    #[test]
    fn empty_text_trie() {
        let (_idx, trie) = trie_for(b"", Scheme::Lz77SelfRef);
        assert_eq!(trie.leaf_count(), 1);
        assert_eq!(trie.node_count(), 2); // root + sentinel leaf
        assert!(trie
            .child_by_key(trie.root(), PhraseKey::Literal(SENTINEL))
            .is_some());
    }

    #[test]
    fn descend_full_consume() {
        let (idx, trie) = trie_for(b"ABABACABABA", Scheme::Lz77SelfRef);
        let parse = LzParse::Lz77(lz77_parse(b"ABABA", SelfRefMode::SelfRef));
        let view = PatternView::from_parse(&parse).unwrap();
        let mut stats = QueryStats::default();
        let st = descend(&trie, &idx, &view, &mut stats);
        assert_eq!(st.fail, None);
        assert_eq!(st.k, 4);
        assert_eq!(st.p, 5);
        let mut occ: Vec<usize> = (st.interval.0..st.interval.1)
            .map(|k| idx.sa()[k] as usize)
            .collect();
        occ.sort_unstable();
        assert_eq!(occ, vec![0, 6]);
    }

    #[test]
    fn descend_empty_pattern() {
        let (idx, trie) = trie_for(b"ABABACABABA", Scheme::Lz77SelfRef);
        let parse = LzParse::Lz77(lz77_parse(b"", SelfRefMode::SelfRef));
        let view = PatternView::from_parse(&parse).unwrap();
        let mut stats = QueryStats::default();
        let st = descend(&trie, &idx, &view, &mut stats);
        assert_eq!(st.fail, None);
        assert_eq!(st.k, 1);
        assert_eq!(st.p, 0);
        assert_eq!(st.interval, (0, 12));
    }

    #[test]
    fn descend_node_mismatch_and_search() {
        // "ABABAB" parses to [A, B, Copy(2,4)]; after A, B the child map
        // has Copy(2,1) and Copy(2,3) but not Copy(2,4)
        let (idx, trie) = trie_for(b"ABABACABABA", Scheme::Lz77SelfRef);
        let parse = LzParse::Lz77(lz77_parse(b"ABABAB", SelfRefMode::SelfRef));
        let view = PatternView::from_parse(&parse).unwrap();
        let mut stats = QueryStats::default();
        let st = descend(&trie, &idx, &view, &mut stats);
        assert_eq!(st.fail, Some(FailKind::AtNode));
        assert_eq!(st.k, 3);
        assert_eq!(st.p, 2);

        let res =
            binary_search_longest(&idx, st.interval, st.p, 2, 4, view.total_len(), &mut stats);
        assert_eq!(res.matched_len, 5);
        assert!(!res.full_match);
        let mut occ: Vec<usize> = (res.interval.0..res.interval.1)
            .map(|k| idx.sa()[k] as usize)
            .collect();
        occ.sort_unstable();
        assert_eq!(occ, vec![0, 6]);
    }

    #[test]
    fn finish_on_edge_copy() {
        let (idx, trie) = trie_for(b"ABABACABABA", Scheme::Lz77SelfRef);
        let parse = LzParse::Lz77(lz77_parse(b"ABABACAX", SelfRefMode::SelfRef));
        let view = PatternView::from_parse(&parse).unwrap();
        let mut stats = QueryStats::default();
        let st = descend(&trie, &idx, &view, &mut stats);
        assert!(st.fail.is_some());
        let res = finish_on_edge(&idx, &view, &st, &mut stats);
        assert_eq!(res.matched_len, 7); // "ABABACA"
        assert!(!res.full_match);
    }

    #[test]
    fn single_leaf_interval_search() {
        let (idx, _trie) = trie_for(b"ABC", Scheme::Lz77SelfRef);
        let mut stats = QueryStats::default();
        // interval of size 1: a single probe resolves it
        let res = binary_search_longest(&idx, (0, 1), 1, 1, 3, 100, &mut stats);
        assert_eq!(stats.lcp_calls, 1);
        assert!(res.matched_len >= 1);
    }

    #[test]
    fn lz78_descent_with_dictionary() {
        let (idx, trie) = trie_for(b"ABABACABABA", Scheme::Lz78);
        let parse = LzParse::Lz78(crate::lz::lz78_parse(b"ABABA"));
        let view = PatternView::from_parse(&parse).unwrap();
        let mut stats = QueryStats::default();
        let st = descend(&trie, &idx, &view, &mut stats);
        let res = match st.fail {
            None => MatchResult {
                matched_len: st.p,
                interval: st.interval,
                full_match: true,
            },
            Some(_) => finish_on_edge(&idx, &view, &st, &mut stats),
        };
        assert_eq!(res.matched_len, 5);
    }
}
