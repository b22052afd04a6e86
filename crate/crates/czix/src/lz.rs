//! Canonical LZ77 and LZ78 parsing, decompression, and the all-suffixes
//! parser that feeds the phrase trie.
//!
//! Both parsers are greedy and deterministic. For LZ77, every copy phrase
//! uses the maximal length over all admissible sources, and among
//! maximal-length sources the one closest to the phrase (smallest
//! distance) is chosen. The pattern-side compressor and the index-side
//! suffix parses must agree on this choice for trie matching to be sound.

use crate::error::Error;
use crate::suffix::SuffixIndex;
use crate::{Sym, END78};
use std::collections::HashMap;

/// Whether LZ77 copies may overlap the phrase they encode (`l > r`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelfRefMode {
    SelfRef,
    NoSelfRef,
}

/// Parsing scheme selector shared by the library and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Lz77SelfRef,
    Lz77NoSelfRef,
    Lz78,
}

impl Scheme {
    pub fn tag(self) -> &'static str {
        match self {
            Scheme::Lz77SelfRef => "lz77sr",
            Scheme::Lz77NoSelfRef => "lz77nsr",
            Scheme::Lz78 => "lz78",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Scheme> {
        match tag {
            "lz77sr" => Some(Scheme::Lz77SelfRef),
            "lz77nsr" => Some(Scheme::Lz77NoSelfRef),
            "lz78" => Some(Scheme::Lz78),
            _ => None,
        }
    }
}

/// One LZ77 phrase. Literals carry a symbol of the extended alphabet so
/// that index-side suffix parses can end in the sentinel phrase; query
/// patterns only ever contain byte literals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phrase77 {
    Literal(Sym),
    /// Copy `l` characters from `r` positions back.
    Copy { r: usize, l: usize },
}

impl Phrase77 {
    pub fn len(&self) -> usize {
        match *self {
            Phrase77::Literal(_) => 1,
            Phrase77::Copy { l, .. } => l,
        }
    }
}

/// A full LZ77 parse: the phrase sequence plus the mode it was produced
/// under. Phrase start offsets are prefix sums of the phrase lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lz77Parse {
    pub phrases: Vec<Phrase77>,
    pub mode: SelfRefMode,
}

impl Lz77Parse {
    pub fn decompressed_len(&self) -> usize {
        self.phrases.iter().map(|p| p.len()).sum()
    }

    /// Start offset of every phrase; one extra entry holds the total length.
    pub fn phrase_starts(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.phrases.len() + 1);
        let mut pos = 0;
        for p in &self.phrases {
            out.push(pos);
            pos += p.len();
        }
        out.push(pos);
        out
    }

    /// Expand to the extended alphabet, resolving self-referencing copies
    /// character by character.
    pub fn decompress_ext(&self) -> Result<Vec<Sym>, Error> {
        let mut out: Vec<Sym> = Vec::with_capacity(self.decompressed_len());
        for (i, p) in self.phrases.iter().enumerate() {
            match *p {
                Phrase77::Literal(c) => out.push(c),
                Phrase77::Copy { r, l } => {
                    if r == 0 || l == 0 || r > out.len() {
                        return Err(Error::CopyOutOfRange { phrase: i + 1 });
                    }
                    let src = out.len() - r;
                    for k in 0..l {
                        out.push(out[src + k]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Expand to bytes. Fails if the parse contains the sentinel phrase.
    pub fn decompress(&self) -> Result<Vec<u8>, Error> {
        let syms = self.decompress_ext()?;
        syms_to_bytes(&syms)
    }
}

/// One LZ78 phrase. `Extend` appends one more character to an earlier
/// phrase; a final partial phrase uses [`END78`] as its character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phrase78 {
    Literal(Sym),
    /// Phrase `j` (1-based) extended by character `c`.
    Extend { j: usize, c: Sym },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lz78Parse {
    pub phrases: Vec<Phrase78>,
}

impl Lz78Parse {
    /// Expanded length of every phrase (`length(j) + 1`, END adds nothing).
    pub fn lengths(&self) -> Vec<usize> {
        let mut lens = Vec::with_capacity(self.phrases.len());
        for p in &self.phrases {
            let len = match *p {
                Phrase78::Literal(_) => 1,
                Phrase78::Extend { j, c } => {
                    let base = lens[j - 1];
                    if c == END78 {
                        base
                    } else {
                        base + 1
                    }
                }
            };
            lens.push(len);
        }
        lens
    }

    pub fn decompressed_len(&self) -> usize {
        self.lengths().iter().sum()
    }

    pub fn phrase_starts(&self) -> Vec<usize> {
        let lens = self.lengths();
        let mut out = Vec::with_capacity(lens.len() + 1);
        let mut pos = 0;
        for l in lens {
            out.push(pos);
            pos += l;
        }
        out.push(pos);
        out
    }

    pub fn decompress_ext(&self) -> Result<Vec<Sym>, Error> {
        // spans[j] = (start, len) of phrase j+1 in the output
        let mut spans: Vec<(usize, usize)> = Vec::with_capacity(self.phrases.len());
        let mut out: Vec<Sym> = Vec::new();
        for (i, p) in self.phrases.iter().enumerate() {
            let start = out.len();
            match *p {
                Phrase78::Literal(c) => out.push(c),
                Phrase78::Extend { j, c } => {
                    if j == 0 || j > i {
                        return Err(Error::BadPhraseRef { phrase: i + 1 });
                    }
                    let (s, l) = spans[j - 1];
                    for k in 0..l {
                        out.push(out[s + k]);
                    }
                    if c != END78 {
                        out.push(c);
                    }
                }
            }
            spans.push((start, out.len() - start));
        }
        Ok(out)
    }

    pub fn decompress(&self) -> Result<Vec<u8>, Error> {
        let syms = self.decompress_ext()?;
        syms_to_bytes(&syms)
    }
}

/// A parse under any of the three schemes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LzParse {
    Lz77(Lz77Parse),
    Lz78(Lz78Parse),
}

impl LzParse {
    pub fn scheme(&self) -> Scheme {
        match self {
            LzParse::Lz77(p) => match p.mode {
                SelfRefMode::SelfRef => Scheme::Lz77SelfRef,
                SelfRefMode::NoSelfRef => Scheme::Lz77NoSelfRef,
            },
            LzParse::Lz78(_) => Scheme::Lz78,
        }
    }

    pub fn phrase_count(&self) -> usize {
        match self {
            LzParse::Lz77(p) => p.phrases.len(),
            LzParse::Lz78(p) => p.phrases.len(),
        }
    }

    pub fn decompressed_len(&self) -> usize {
        match self {
            LzParse::Lz77(p) => p.decompressed_len(),
            LzParse::Lz78(p) => p.decompressed_len(),
        }
    }

    pub fn decompress_ext(&self) -> Result<Vec<Sym>, Error> {
        match self {
            LzParse::Lz77(p) => p.decompress_ext(),
            LzParse::Lz78(p) => p.decompress_ext(),
        }
    }

    pub fn decompress(&self) -> Result<Vec<u8>, Error> {
        match self {
            LzParse::Lz77(p) => p.decompress(),
            LzParse::Lz78(p) => p.decompress(),
        }
    }
}

fn syms_to_bytes(syms: &[Sym]) -> Result<Vec<u8>, Error> {
    syms.iter()
        .map(|&s| {
            if s < 256 {
                Ok(s as u8)
            } else {
                Err(Error::SentinelInPattern)
            }
        })
        .collect()
}

/// Greedy LZ77 parse of a byte string.
///
/// Works directly on the text with per-source character extension; fine for
/// pattern-sized inputs. Index-side suffix parsing goes through
/// [`parse_all_suffixes`] instead.
pub fn lz77_parse(text: &[u8], mode: SelfRefMode) -> Lz77Parse {
    let n = text.len();
    let mut phrases = Vec::new();
    let mut a = 0;
    while a < n {
        let mut best_l = 0usize;
        let mut best_b = 0usize;
        for b in 0..a {
            let cap = if mode == SelfRefMode::NoSelfRef {
                a - b
            } else {
                usize::MAX
            };
            let mut k = 0;
            while a + k < n && k < cap && text[b + k] == text[a + k] {
                k += 1;
            }
            if k >= best_l && k > 0 {
                best_l = k;
                best_b = b;
            }
        }
        if best_l == 0 {
            phrases.push(Phrase77::Literal(text[a] as Sym));
            a += 1;
        } else {
            phrases.push(Phrase77::Copy {
                r: a - best_b,
                l: best_l,
            });
            a += best_l;
        }
    }
    Lz77Parse { phrases, mode }
}

/// Greedy LZ78 parse of a byte string. The choice is unique; if the input
/// ends exactly at a dictionary phrase the final phrase is
/// `Extend(j, END78)`.
pub fn lz78_parse(text: &[u8]) -> Lz78Parse {
    let mut dict = Lz78Dict::new();
    let mut phrases = Vec::new();
    let mut a = 0;
    while a < text.len() {
        let (j, d) = dict.walk(|k| {
            if a + k < text.len() {
                Some(text[a + k] as Sym)
            } else {
                None
            }
        });
        let phrase = if a + d < text.len() {
            let c = text[a + d] as Sym;
            dict.insert(j, c);
            if j == 0 {
                Phrase78::Literal(c)
            } else {
                Phrase78::Extend { j: j as usize, c }
            }
        } else {
            // input exhausted mid-phrase
            debug_assert!(j > 0);
            Phrase78::Extend {
                j: j as usize,
                c: END78,
            }
        };
        phrases.push(phrase);
        a += d + usize::from(a + d < text.len());
    }
    Lz78Parse { phrases }
}

/// LZ78 dictionary trie. Node 0 is the empty phrase; node `i > 0` is
/// phrase `i`.
struct Lz78Dict {
    children: HashMap<(u32, Sym), u32>,
    nodes: u32,
}

impl Lz78Dict {
    fn new() -> Self {
        Lz78Dict {
            children: HashMap::new(),
            nodes: 1,
        }
    }

    /// Follow the longest dictionary phrase matching `next(0), next(1), ...`.
    /// Returns (phrase index, matched length).
    fn walk(&self, mut next: impl FnMut(usize) -> Option<Sym>) -> (u32, usize) {
        let mut cur = 0u32;
        let mut d = 0usize;
        while let Some(c) = next(d) {
            match self.children.get(&(cur, c)) {
                Some(&ch) => {
                    cur = ch;
                    d += 1;
                }
                None => break,
            }
        }
        (cur, d)
    }

    fn insert(&mut self, parent: u32, c: Sym) {
        let id = self.nodes;
        self.nodes += 1;
        self.children.insert((parent, c), id);
    }
}

// ---------------------------------------------------------------------------
// Per-suffix parsing against the suffix index.
// ---------------------------------------------------------------------------

/// Structural form of a phrase as the trie builder sees it. Comparing two
/// records positionally in two parses that agree on all earlier phrases is
/// equivalent to comparing the phrase expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum PhraseKind {
    Lit(Sym),
    Copy { r: u32, l: u32 },
    /// LZ78 extension of phrase `j` (1-based, 0 = literal is not used here).
    Ext { j: u32, c: Sym },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ProvPhrase {
    pub kind: PhraseKind,
    pub char_len: u32,
}

/// Lazily yields the canonical phrases of one suffix. The trie builder
/// only ever asks for the phrases up to the point where two adjacent
/// suffix parses diverge, so providers must not parse eagerly.
pub(crate) trait PhraseProvider {
    /// Phrase `k` (0-based), or `None` past the end of the parse.
    fn get(&mut self, k: usize) -> Option<ProvPhrase>;
    /// Character start offset of phrase `k`; only valid once `get(k)`
    /// returned `Some` (or `None`, for the one-past-the-end boundary).
    fn boundary(&self, k: usize) -> usize;
}

/// Lazy greedy LZ77 parser for the suffix starting at `start`, evaluating
/// candidate sources with the lcp oracle. Worst case O(suffix length)
/// candidates per phrase.
pub(crate) struct Lz77SuffixParser<'a> {
    idx: &'a SuffixIndex,
    start: usize,
    mode: SelfRefMode,
    pos: usize,
    phrases: Vec<ProvPhrase>,
    bounds: Vec<usize>,
    done: bool,
}

impl<'a> Lz77SuffixParser<'a> {
    pub fn new(idx: &'a SuffixIndex, start: usize, mode: SelfRefMode) -> Self {
        Lz77SuffixParser {
            idx,
            start,
            mode,
            pos: start,
            phrases: Vec::new(),
            bounds: vec![0],
            done: false,
        }
    }

    fn parse_next(&mut self) {
        let n_ext = self.idx.len_with_sentinel();
        if self.pos >= n_ext {
            self.done = true;
            return;
        }
        let a = self.pos;
        let mut best_l = 0usize;
        let mut best_b = 0usize;
        for b in self.start..a {
            let mut l = self.idx.lcp_suffixes(a, b);
            if self.mode == SelfRefMode::NoSelfRef {
                l = l.min(a - b);
            }
            if l >= best_l && l > 0 {
                best_l = l;
                best_b = b;
            }
        }
        let phrase = if best_l == 0 {
            ProvPhrase {
                kind: PhraseKind::Lit(self.idx.sym(a)),
                char_len: 1,
            }
        } else {
            ProvPhrase {
                kind: PhraseKind::Copy {
                    r: (a - best_b) as u32,
                    l: best_l as u32,
                },
                char_len: best_l as u32,
            }
        };
        self.pos += phrase.char_len as usize;
        self.phrases.push(phrase);
        self.bounds.push(self.pos - self.start);
    }
}

impl PhraseProvider for Lz77SuffixParser<'_> {
    fn get(&mut self, k: usize) -> Option<ProvPhrase> {
        while self.phrases.len() <= k && !self.done {
            self.parse_next();
        }
        self.phrases.get(k).copied()
    }

    fn boundary(&self, k: usize) -> usize {
        self.bounds[k]
    }
}

/// Lazy greedy LZ78 parser for one suffix, with its own dictionary trie.
pub(crate) struct Lz78SuffixParser<'a> {
    idx: &'a SuffixIndex,
    start: usize,
    pos: usize,
    dict: Lz78Dict,
    phrases: Vec<ProvPhrase>,
    bounds: Vec<usize>,
    done: bool,
}

impl<'a> Lz78SuffixParser<'a> {
    pub fn new(idx: &'a SuffixIndex, start: usize) -> Self {
        Lz78SuffixParser {
            idx,
            start,
            pos: start,
            dict: Lz78Dict::new(),
            phrases: Vec::new(),
            bounds: vec![0],
            done: false,
        }
    }

    fn parse_next(&mut self) {
        let n_ext = self.idx.len_with_sentinel();
        if self.pos >= n_ext {
            self.done = true;
            return;
        }
        let a = self.pos;
        let (j, d) = self.dict.walk(|k| {
            if a + k < n_ext {
                Some(self.idx.sym(a + k))
            } else {
                None
            }
        });
        let (kind, len) = if a + d < n_ext {
            let c = self.idx.sym(a + d);
            self.dict.insert(j, c);
            if j == 0 {
                (PhraseKind::Lit(c), 1)
            } else {
                (PhraseKind::Ext { j, c }, d + 1)
            }
        } else {
            debug_assert!(j > 0);
            (PhraseKind::Ext { j, c: END78 }, d)
        };
        self.pos += len;
        self.phrases.push(ProvPhrase {
            kind,
            char_len: len as u32,
        });
        self.bounds.push(self.pos - self.start);
    }
}

impl PhraseProvider for Lz78SuffixParser<'_> {
    fn get(&mut self, k: usize) -> Option<ProvPhrase> {
        while self.phrases.len() <= k && !self.done {
            self.parse_next();
        }
        self.phrases.get(k).copied()
    }

    fn boundary(&self, k: usize) -> usize {
        self.bounds[k]
    }
}

pub(crate) fn make_suffix_provider<'a>(
    idx: &'a SuffixIndex,
    start: usize,
    scheme: Scheme,
) -> Box<dyn PhraseProvider + 'a> {
    match scheme {
        Scheme::Lz77SelfRef => Box::new(Lz77SuffixParser::new(idx, start, SelfRefMode::SelfRef)),
        Scheme::Lz77NoSelfRef => {
            Box::new(Lz77SuffixParser::new(idx, start, SelfRefMode::NoSelfRef))
        }
        Scheme::Lz78 => Box::new(Lz78SuffixParser::new(idx, start)),
    }
}

/// Serves phrases of pre-materialized parses (the spec-level
/// `build from parses` entry point).
pub(crate) struct MaterializedProvider<'a> {
    parse: &'a LzParse,
    bounds: Vec<usize>,
}

impl<'a> MaterializedProvider<'a> {
    pub fn new(parse: &'a LzParse) -> Self {
        let bounds = match parse {
            LzParse::Lz77(p) => p.phrase_starts(),
            LzParse::Lz78(p) => p.phrase_starts(),
        };
        MaterializedProvider { parse, bounds }
    }
}

impl PhraseProvider for MaterializedProvider<'_> {
    fn get(&mut self, k: usize) -> Option<ProvPhrase> {
        match self.parse {
            LzParse::Lz77(p) => p.phrases.get(k).map(|ph| ProvPhrase {
                kind: match *ph {
                    Phrase77::Literal(c) => PhraseKind::Lit(c),
                    Phrase77::Copy { r, l } => PhraseKind::Copy {
                        r: r as u32,
                        l: l as u32,
                    },
                },
                char_len: ph.len() as u32,
            }),
            LzParse::Lz78(p) => p.phrases.get(k).map(|ph| ProvPhrase {
                kind: match *ph {
                    Phrase78::Literal(c) => PhraseKind::Lit(c),
                    Phrase78::Extend { j, c } => PhraseKind::Ext { j: j as u32, c },
                },
                char_len: (self.bounds[k + 1] - self.bounds[k]) as u32,
            }),
        }
    }

    fn boundary(&self, k: usize) -> usize {
        self.bounds[k]
    }
}

/// Canonical parse of every suffix of `text + sentinel`, one per suffix.
/// `output[i]` parses `S[i..n]` followed by the sentinel.
///
/// Candidate sources are evaluated with the lcp oracle, worst case O(n)
/// candidates per phrase; fine at desk scale. Index construction drives
/// the same parsers lazily instead of materializing everything.
pub fn parse_all_suffixes(idx: &SuffixIndex, scheme: Scheme) -> Vec<LzParse> {
    let n_ext = idx.len_with_sentinel();
    let mut out = Vec::with_capacity(n_ext);
    for start in 0..n_ext {
        let mut prov = make_suffix_provider(idx, start, scheme);
        let mut k = 0;
        let mut phrases77 = Vec::new();
        let mut phrases78 = Vec::new();
        while let Some(p) = prov.get(k) {
            match p.kind {
                PhraseKind::Lit(c) => match scheme {
                    Scheme::Lz78 => phrases78.push(Phrase78::Literal(c)),
                    _ => phrases77.push(Phrase77::Literal(c)),
                },
                PhraseKind::Copy { r, l } => phrases77.push(Phrase77::Copy {
                    r: r as usize,
                    l: l as usize,
                }),
                PhraseKind::Ext { j, c } => phrases78.push(Phrase78::Extend {
                    j: j as usize,
                    c,
                }),
            }
            k += 1;
        }
        out.push(match scheme {
            Scheme::Lz77SelfRef => LzParse::Lz77(Lz77Parse {
                phrases: phrases77,
                mode: SelfRefMode::SelfRef,
            }),
            Scheme::Lz77NoSelfRef => LzParse::Lz77(Lz77Parse {
                phrases: phrases77,
                mode: SelfRefMode::NoSelfRef,
            }),
            Scheme::Lz78 => LzParse::Lz78(Lz78Parse {
                phrases: phrases78,
            }),
        });
    }
    out
}

// ---------------------------------------------------------------------------
// LZPARSE v1 interchange format.
// ---------------------------------------------------------------------------

/// Render a pattern parse in the `LZPARSE v1` text format. Only byte
/// literals are representable; index-side sentinel phrases are rejected.
pub fn write_parse_text(parse: &LzParse) -> Result<String, Error> {
    let mut out = format!("LZPARSE v1 {}\n", parse.scheme().tag());
    match parse {
        LzParse::Lz77(p) => {
            for ph in &p.phrases {
                match *ph {
                    Phrase77::Literal(c) => {
                        if c >= 256 {
                            return Err(Error::SentinelInPattern);
                        }
                        out.push_str(&format!("L {:02x}\n", c));
                    }
                    Phrase77::Copy { r, l } => out.push_str(&format!("C {} {}\n", r, l)),
                }
            }
        }
        LzParse::Lz78(p) => {
            for ph in &p.phrases {
                match *ph {
                    Phrase78::Literal(c) => {
                        if c >= 256 {
                            return Err(Error::SentinelInPattern);
                        }
                        out.push_str(&format!("L {:02x}\n", c));
                    }
                    Phrase78::Extend { j, c } => {
                        if c == END78 {
                            out.push_str(&format!("E {} $\n", j));
                        } else if c >= 256 {
                            return Err(Error::SentinelInPattern);
                        } else {
                            out.push_str(&format!("E {} {:02x}\n", j, c));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Parse the `LZPARSE v1` text format back into a parse.
pub fn read_parse_text(input: &str) -> Result<LzParse, Error> {
    if !input.ends_with('\n') {
        return Err(Error::ParseFormat("missing trailing newline".into()));
    }
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::ParseFormat("empty input".into()))?;
    let mut hp = header.split_ascii_whitespace();
    if hp.next() != Some("LZPARSE") || hp.next() != Some("v1") {
        return Err(Error::ParseFormat("bad header".into()));
    }
    let scheme = hp
        .next()
        .and_then(Scheme::from_tag)
        .ok_or_else(|| Error::ParseFormat("unknown scheme".into()))?;
    if hp.next().is_some() {
        return Err(Error::ParseFormat("trailing header fields".into()));
    }

    let mut phrases77 = Vec::new();
    let mut phrases78 = Vec::new();
    for (ln, line) in lines.enumerate() {
        let err = |m: &str| Error::ParseFormat(format!("line {}: {}", ln + 2, m));
        let mut it = line.split_ascii_whitespace();
        let op = it.next().ok_or_else(|| err("empty line"))?;
        match (op, scheme) {
            ("L", _) => {
                let hex = it.next().ok_or_else(|| err("missing byte"))?;
                if hex.len() != 2 {
                    return Err(err("byte must be 2 hex digits"));
                }
                let b = u8::from_str_radix(hex, 16).map_err(|_| err("bad hex byte"))?;
                match scheme {
                    Scheme::Lz78 => phrases78.push(Phrase78::Literal(b as Sym)),
                    _ => phrases77.push(Phrase77::Literal(b as Sym)),
                }
            }
            ("C", Scheme::Lz77SelfRef | Scheme::Lz77NoSelfRef) => {
                let r: usize = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("bad r"))?;
                let l: usize = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("bad l"))?;
                if r == 0 || l == 0 {
                    return Err(err("r and l must be positive"));
                }
                phrases77.push(Phrase77::Copy { r, l });
            }
            ("E", Scheme::Lz78) => {
                let j: usize = it
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err("bad j"))?;
                if j == 0 {
                    return Err(err("j must be positive"));
                }
                let c = it.next().ok_or_else(|| err("missing char"))?;
                let c = if c == "$" {
                    END78
                } else if c.len() == 2 {
                    u8::from_str_radix(c, 16).map_err(|_| err("bad hex byte"))? as Sym
                } else {
                    return Err(err("char must be 2 hex digits or $"));
                };
                phrases78.push(Phrase78::Extend { j, c });
            }
            _ => return Err(err("phrase kind not valid for scheme")),
        }
        if it.next().is_some() {
            return Err(err("trailing fields"));
        }
    }

    Ok(match scheme {
        Scheme::Lz77SelfRef => LzParse::Lz77(Lz77Parse {
            phrases: phrases77,
            mode: SelfRefMode::SelfRef,
        }),
        Scheme::Lz77NoSelfRef => LzParse::Lz77(Lz77Parse {
            phrases: phrases77,
            mode: SelfRefMode::NoSelfRef,
        }),
        Scheme::Lz78 => LzParse::Lz78(Lz78Parse {
            phrases: phrases78,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suffix::build_suffix_index;
    use crate::SENTINEL;

    fn lit(b: u8) -> Phrase77 {
        Phrase77::Literal(b as Sym)
    }

    #[test]
    fn fig1_suffix_parse() {
        // suffix 6 of the running example, parsed standalone with sentinel
        let idx = build_suffix_index(b"ABABACABABA");
        let parses = parse_all_suffixes(&idx, Scheme::Lz77SelfRef);
        let LzParse::Lz77(p) = &parses[6] else {
            panic!()
        };
        assert_eq!(
            p.phrases,
            vec![
                lit(b'A'),
                lit(b'B'),
                Phrase77::Copy { r: 2, l: 3 },
                Phrase77::Literal(SENTINEL),
            ]
        );
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(lz77_parse(b"", SelfRefMode::SelfRef).phrases, vec![]);
        assert_eq!(lz78_parse(b"").phrases, vec![]);
        let idx = build_suffix_index(b"");
        let parses = parse_all_suffixes(&idx, Scheme::Lz77SelfRef);
        assert_eq!(parses.len(), 1);
        let LzParse::Lz77(p) = &parses[0] else {
            panic!()
        };
        assert_eq!(p.phrases, vec![Phrase77::Literal(SENTINEL)]);
    }

    #[test]
    fn running_example_parses() {
        let p = lz77_parse(b"ABABACABABA", SelfRefMode::SelfRef);
        assert_eq!(
            p.phrases,
            vec![
                lit(b'A'),
                lit(b'B'),
                Phrase77::Copy { r: 2, l: 3 },
                lit(b'C'),
                Phrase77::Copy { r: 6, l: 5 },
            ]
        );
        let p = lz77_parse(b"AAAA", SelfRefMode::NoSelfRef);
        assert_eq!(
            p.phrases,
            vec![
                lit(b'A'),
                Phrase77::Copy { r: 1, l: 1 },
                Phrase77::Copy { r: 2, l: 2 },
            ]
        );
    }

    #[test]
    fn lz78_basics() {
        let p = lz78_parse(b"AAAA");
        assert_eq!(
            p.phrases,
            vec![
                Phrase78::Literal(b'A' as Sym),
                Phrase78::Extend {
                    j: 1,
                    c: b'A' as Sym
                },
                Phrase78::Extend { j: 1, c: END78 },
            ]
        );
        assert_eq!(p.decompress().unwrap(), b"AAAA");
    }

    #[test]
    fn decompress_examples() {
        let p = Lz77Parse {
            phrases: vec![lit(b'A'), lit(b'B'), Phrase77::Copy { r: 2, l: 3 }],
            mode: SelfRefMode::SelfRef,
        };
        assert_eq!(p.decompress().unwrap(), b"ABABA");

        let p = Lz77Parse {
            phrases: vec![],
            mode: SelfRefMode::SelfRef,
        };
        assert_eq!(p.decompress().unwrap(), b"");

        let p = Lz77Parse {
            phrases: vec![lit(b'A'), Phrase77::Copy { r: 1, l: 5 }],
            mode: SelfRefMode::SelfRef,
        };
        assert_eq!(p.decompress().unwrap(), b"AAAAAA");

        let p = Lz77Parse {
            phrases: vec![lit(b'A'), Phrase77::Copy { r: 2, l: 1 }],
            mode: SelfRefMode::SelfRef,
        };
        assert_eq!(
            p.decompress(),
            Err(Error::CopyOutOfRange { phrase: 2 })
        );
    }

    #[test]
    fn all_suffixes_match_standalone_parse() {
        let idx = build_suffix_index(b"ABABACABABA");
        let parses = parse_all_suffixes(&idx, Scheme::Lz77SelfRef);
        let LzParse::Lz77(p) = &parses[0] else {
            panic!()
        };
        assert_eq!(
            p.phrases,
            vec![
                lit(b'A'),
                lit(b'B'),
                Phrase77::Copy { r: 2, l: 3 },
                lit(b'C'),
                Phrase77::Copy { r: 6, l: 5 },
                Phrase77::Literal(SENTINEL),
            ]
        );
    }

    #[test]
    fn parse_text_round_trip() {
        let p = LzParse::Lz77(lz77_parse(b"ABABA", SelfRefMode::SelfRef));
        let text = write_parse_text(&p).unwrap();
        assert_eq!(text, "LZPARSE v1 lz77sr\nL 41\nL 42\nC 2 3\n");
        assert_eq!(read_parse_text(&text).unwrap(), p);

        let p = LzParse::Lz78(lz78_parse(b"AAAA"));
        let text = write_parse_text(&p).unwrap();
        assert_eq!(text, "LZPARSE v1 lz78\nL 41\nE 1 41\nE 1 $\n");
        assert_eq!(read_parse_text(&text).unwrap(), p);

        let empty = LzParse::Lz77(lz77_parse(b"", SelfRefMode::NoSelfRef));
        let text = write_parse_text(&empty).unwrap();
        assert_eq!(text, "LZPARSE v1 lz77nsr\n");
        assert_eq!(read_parse_text(&text).unwrap(), empty);

        assert!(read_parse_text("LZPARSE v1 lz77sr\nL 41").is_err());
    }
}
