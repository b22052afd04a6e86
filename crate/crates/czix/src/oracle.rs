//! Brute-force reference implementations: deliberately simple and slow,
//! used to generate expected values and as the baseline for differential
//! tests. Gated behind the `oracle` feature (on by default) so the derived
//! values in the documentation stay regenerable.

use crate::lz::{Lz77Parse, Lz78Parse, LzParse, Phrase77, Phrase78, SelfRefMode};
use crate::{Sym, END78, SENTINEL};

/// Longest prefix of `pattern` occurring in `text`, with every occurrence
/// position, by quadratic scan. The empty prefix occurs at positions
/// `0..=|text|`.
pub fn naive_locate(text: &[u8], pattern: &[u8]) -> (usize, Vec<usize>) {
    let mut best = 0;
    for len in (1..=pattern.len()).rev() {
        if len > text.len() {
            continue;
        }
        if text.windows(len).any(|w| w == &pattern[..len]) {
            best = len;
            break;
        }
    }
    let occs = if best == 0 {
        (0..=text.len()).collect()
    } else {
        (0..=text.len() - best)
            .filter(|&i| &text[i..i + best] == &pattern[..best])
            .collect()
    };
    (best, occs)
}

/// Greedy LZ77 by explicit all-source scanning over the extended alphabet.
/// Independent of the production parser.
pub fn naive_lz77_ext(syms: &[Sym], mode: SelfRefMode) -> Lz77Parse {
    let n = syms.len();
    let mut phrases = Vec::new();
    let mut a = 0;
    while a < n {
        let mut best: Option<(usize, usize)> = None; // (l, b)
        for b in 0..a {
            let mut l = 0;
            while a + l < n
                && syms[b + l] == syms[a + l]
                && (mode == SelfRefMode::SelfRef || l < a - b)
            {
                l += 1;
            }
            if l > 0 && best.map_or(true, |(bl, _)| l >= bl) {
                best = Some((l, b));
            }
        }
        match best {
            None => {
                phrases.push(Phrase77::Literal(syms[a]));
                a += 1;
            }
            Some((l, b)) => {
                phrases.push(Phrase77::Copy { r: a - b, l });
                a += l;
            }
        }
    }
    Lz77Parse { phrases, mode }
}

pub fn naive_lz77(text: &[u8], mode: SelfRefMode) -> Lz77Parse {
    let syms: Vec<Sym> = text.iter().map(|&b| b as Sym).collect();
    naive_lz77_ext(&syms, mode)
}

/// Greedy LZ78 by scanning all earlier phrases for the longest
/// phrase-plus-one-character prefix. Independent of the production parser.
pub fn naive_lz78_ext(syms: &[Sym]) -> Lz78Parse {
    let n = syms.len();
    let mut phrases: Vec<Phrase78> = Vec::new();
    let mut spans: Vec<(usize, usize)> = Vec::new(); // (start, len) per phrase
    let mut a = 0;
    while a < n {
        let mut best: Option<(usize, usize)> = None; // (len of f_j, j)
        for (j, &(s, l)) in spans.iter().enumerate() {
            if a + l <= n
                && syms[s..s + l] == syms[a..a + l]
                && best.map_or(true, |(bl, _)| l > bl)
            {
                best = Some((l, j + 1));
            }
        }
        match best {
            Some((l, j)) if a + l < n => {
                phrases.push(Phrase78::Extend { j, c: syms[a + l] });
                spans.push((a, l + 1));
                a += l + 1;
            }
            Some((l, j)) => {
                // input exhausted exactly at the end of phrase j
                phrases.push(Phrase78::Extend { j, c: END78 });
                spans.push((a, l));
                a += l;
            }
            None => {
                phrases.push(Phrase78::Literal(syms[a]));
                spans.push((a, 1));
                a += 1;
            }
        }
    }
    Lz78Parse { phrases }
}

pub fn naive_lz78(text: &[u8]) -> Lz78Parse {
    let syms: Vec<Sym> = text.iter().map(|&b| b as Sym).collect();
    naive_lz78_ext(&syms)
}

/// Uncompacted phrase trie with fully materialized decompressed edge
/// labels: the quadratic-space structure the compact trie is checked
/// against.
pub struct NaiveTrie {
    nodes: Vec<NaiveNode>,
}

struct NaiveNode {
    /// (phrase, decompressed phrase label, child)
    children: Vec<(NaivePhrase, Vec<Sym>, usize)>,
    /// Suffix start positions of leaves in this subtree.
    suffixes: Vec<usize>,
}

/// Phrase identity for the naive trie: the structural phrase plus its
/// expansion (LZ78 indices are suffix-local, so equality must compare
/// expansions).
#[derive(Debug, Clone, PartialEq, Eq)]
enum NaivePhrase {
    P77(Phrase77),
    P78 { expansion: Vec<Sym> },
}

impl NaiveTrie {
    /// Build from the parses of all suffixes (one per suffix, sentinel
    /// phrase included).
    pub fn build(parses: &[LzParse]) -> NaiveTrie {
        let mut trie = NaiveTrie {
            nodes: vec![NaiveNode {
                children: Vec::new(),
                suffixes: Vec::new(),
            }],
        };
        for (suffix, parse) in parses.iter().enumerate() {
            let phrases = naive_phrases(parse);
            trie.insert(suffix, &phrases);
        }
        trie
    }

    fn insert(&mut self, suffix: usize, phrases: &[(NaivePhrase, Vec<Sym>)]) {
        let mut v = 0;
        self.nodes[v].suffixes.push(suffix);
        for (ph, label) in phrases {
            let next = self.nodes[v]
                .children
                .iter()
                .find(|(p, _, _)| p == ph)
                .map(|&(_, _, c)| c);
            v = match next {
                Some(c) => c,
                None => {
                    let c = self.nodes.len();
                    self.nodes.push(NaiveNode {
                        children: Vec::new(),
                        suffixes: Vec::new(),
                    });
                    self.nodes[v].children.push((ph.clone(), label.clone(), c));
                    c
                }
            };
            self.nodes[v].suffixes.push(suffix);
        }
    }

    /// Walk a pattern parse phrase by phrase, comparing decompressed
    /// labels, and return the longest matched prefix length plus the
    /// suffixes whose labels realize it.
    pub fn walk(&self, pattern: &LzParse) -> (usize, Vec<usize>) {
        let w = self.walk_full(pattern);
        (w.matched, w.occ)
    }

    /// Like [`NaiveTrie::walk`] but also reports where the walk stopped:
    /// `k` is the 1-based index of the first unmatched phrase (z + 1 when
    /// everything matched) and `p` the characters covered by the matched
    /// phrases.
    pub fn walk_full(&self, pattern: &LzParse) -> NaiveWalk {
        let phrases = naive_phrases(pattern);
        let mut v = 0;
        let mut depth = 0usize; // characters fully matched
        for (k, (ph, label)) in phrases.iter().enumerate() {
            if let Some(&(_, _, c)) = self.nodes[v].children.iter().find(|(p, _, _)| p == ph) {
                v = c;
                depth += label.len();
                continue;
            }
            // first failing phrase: find how far its label agrees with any
            // child label (character matching over materialized labels);
            // ties across children are unioned
            let mut best = 0usize;
            let mut occ: Vec<usize> = self.nodes[v].suffixes.clone();
            for (_, clabel, c) in &self.nodes[v].children {
                let mut t = 0;
                while t < label.len() && t < clabel.len() && label[t] == clabel[t] {
                    t += 1;
                }
                if t > best {
                    best = t;
                    occ = self.nodes[*c].suffixes.clone();
                } else if t == best && t > 0 {
                    occ.extend(self.nodes[*c].suffixes.iter().copied());
                }
            }
            let mut occ = occ;
            occ.sort_unstable();
            occ.dedup();
            return NaiveWalk {
                k: k + 1,
                p: depth,
                matched: depth + best,
                occ,
            };
        }
        NaiveWalk {
            k: phrases.len() + 1,
            p: depth,
            matched: depth,
            occ: self.nodes[v].suffixes.clone(),
        }
    }
}

/// Outcome of a naive phrase-trie walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveWalk {
    pub k: usize,
    pub p: usize,
    pub matched: usize,
    pub occ: Vec<usize>,
}

fn naive_phrases(parse: &LzParse) -> Vec<(NaivePhrase, Vec<Sym>)> {
    match parse {
        LzParse::Lz77(p) => {
            let expanded = p.decompress_ext().expect("consistent parse");
            let starts = p.phrase_starts();
            p.phrases
                .iter()
                .enumerate()
                .map(|(i, ph)| {
                    (
                        NaivePhrase::P77(*ph),
                        expanded[starts[i]..starts[i + 1]].to_vec(),
                    )
                })
                .collect()
        }
        LzParse::Lz78(p) => {
            let expanded = p.decompress_ext().expect("consistent parse");
            let starts = p.phrase_starts();
            p.phrases
                .iter()
                .enumerate()
                .map(|(i, _)| {
                    let label = expanded[starts[i]..starts[i + 1]].to_vec();
                    (
                        NaivePhrase::P78 {
                            expansion: label.clone(),
                        },
                        label,
                    )
                })
                .collect()
        }
    }
}

/// Parses of all suffixes of `text + sentinel`, via the naive parsers.
pub fn naive_all_suffix_parses(text: &[u8], scheme: crate::lz::Scheme) -> Vec<LzParse> {
    let mut syms: Vec<Sym> = text.iter().map(|&b| b as Sym).collect();
    syms.push(SENTINEL);
    (0..syms.len())
        .map(|i| match scheme {
            crate::lz::Scheme::Lz77SelfRef => {
                LzParse::Lz77(naive_lz77_ext(&syms[i..], SelfRefMode::SelfRef))
            }
            crate::lz::Scheme::Lz77NoSelfRef => {
                LzParse::Lz77(naive_lz77_ext(&syms[i..], SelfRefMode::NoSelfRef))
            }
            crate::lz::Scheme::Lz78 => LzParse::Lz78(naive_lz78_ext(&syms[i..])),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locate_examples() {
        assert_eq!(
            naive_locate(b"ABABACABABA", b"ABABA"),
            (5, vec![0, 6])
        );
        assert_eq!(naive_locate(b"ABABACABABA", b""), (0, (0..=11).collect()));
        assert_eq!(
            naive_locate(b"ABABACABABA", b"ZZZ"),
            (0, (0..=11).collect())
        );
    }

    #[test]
    fn lz77_fig1() {
        let p = naive_lz77(b"ABABA", SelfRefMode::SelfRef);
        assert_eq!(
            p.phrases,
            vec![
                Phrase77::Literal(b'A' as Sym),
                Phrase77::Literal(b'B' as Sym),
                Phrase77::Copy { r: 2, l: 3 },
            ]
        );
        assert_eq!(naive_lz77(b"", SelfRefMode::SelfRef).phrases, vec![]);
    }

    #[test]
    fn lz78_derived_example() {
        // greedy unique parse of the running example plus sentinel
        let mut syms: Vec<Sym> = b"ABABACABABA".iter().map(|&b| b as Sym).collect();
        syms.push(SENTINEL);
        let p = naive_lz78_ext(&syms);
        assert_eq!(
            p.phrases,
            vec![
                Phrase78::Literal(b'A' as Sym),
                Phrase78::Literal(b'B' as Sym),
                Phrase78::Extend { j: 1, c: b'B' as Sym },
                Phrase78::Extend { j: 1, c: b'C' as Sym },
                Phrase78::Extend { j: 3, c: b'A' as Sym },
                Phrase78::Extend { j: 2, c: b'A' as Sym },
                Phrase78::Literal(SENTINEL),
            ]
        );
        assert_eq!(p.decompress_ext().unwrap(), syms);
    }

    #[test]
    fn naive_trie_walk_runs() {
        let parses = naive_all_suffix_parses(b"ABABACABABA", crate::lz::Scheme::Lz77SelfRef);
        let trie = NaiveTrie::build(&parses);
        let pat = LzParse::Lz77(crate::lz::lz77_parse(b"ABABA", SelfRefMode::SelfRef));
        let (len, occ) = trie.walk(&pat);
        assert_eq!((len, occ), (5, vec![0, 6]));
        let pat = LzParse::Lz77(crate::lz::lz77_parse(b"ABABAB", SelfRefMode::SelfRef));
        let (len, occ) = trie.walk(&pat);
        assert_eq!((len, occ), (5, vec![0, 6]));
        let empty = LzParse::Lz77(crate::lz::lz77_parse(b"", SelfRefMode::SelfRef));
        let (len, occ) = trie.walk(&empty);
        assert_eq!(len, 0);
        assert_eq!(occ.len(), 12);
    }
}
