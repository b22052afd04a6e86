//! Property tests pinning the parsing, fingerprint and matching layers
//! against brute-force oracles.

use czix::fingerprint::{make_scheme_for, verify_collision_free, CertMode, FingerprintScheme};
use czix::lz::{
    lz77_parse, lz78_parse, parse_all_suffixes, LzParse, Phrase77, Phrase78, Scheme, SelfRefMode,
};
use czix::oracle::{naive_all_suffix_parses, naive_locate, naive_lz77, naive_lz78, NaiveTrie};
use czix::phrase_trie::{build_phrase_trie, descend, finish_on_edge, PatternView};
use czix::query::{BuildOptions, Index, QueryStats};
use czix::suffix::build_suffix_index;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn small_text(max_len: usize, sigma: std::ops::RangeInclusive<u8>) -> impl Strategy<Value = Vec<u8>> {
    (0..=max_len).prop_flat_map(move |len| {
        proptest::collection::vec(
            (sigma.clone()).prop_map(|c| b'A' + c),
            len,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn lz77_round_trip_and_canonical(t in small_text(512, 0..=3u8)) {
        for mode in [SelfRefMode::SelfRef, SelfRefMode::NoSelfRef] {
            let parse = lz77_parse(&t, mode);
            let back = parse.decompress().unwrap();
            prop_assert_eq!(&back, &t);
            // reparsing the decompression reproduces the phrase list
            prop_assert_eq!(lz77_parse(&back, mode), parse);
        }
    }

    #[test]
    fn lz78_round_trip(t in small_text(512, 0..=3u8)) {
        let parse = lz78_parse(&t);
        let back = parse.decompress().unwrap();
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(lz78_parse(&back), parse.clone());
        // phrase j's expansion equals its source phrase's expansion plus
        // one character
        let starts = parse.phrase_starts();
        let lens = parse.lengths();
        for (i, ph) in parse.phrases.iter().enumerate() {
            if let Phrase78::Extend { j, c } = *ph {
                let src_len = lens[j - 1];
                let (si, pi) = (starts[j - 1], starts[i]);
                prop_assert_eq!(&t[si..si + src_len], &t[pi..pi + src_len]);
                if c != czix::END78 {
                    prop_assert_eq!(t[pi + src_len] as czix::Sym, c);
                }
            }
        }
    }

    #[test]
    fn lz77_modes_relate(t in small_text(256, 0..=2u8)) {
        let sr = lz77_parse(&t, SelfRefMode::SelfRef);
        let nsr = lz77_parse(&t, SelfRefMode::NoSelfRef);
        for ph in &nsr.phrases {
            if let Phrase77::Copy { r, l } = *ph {
                prop_assert!(l <= r, "NoSelfRef copy with l > r");
            }
        }
        prop_assert!(sr.phrases.len() <= nsr.phrases.len());
    }

    #[test]
    fn lz77_prefix_stability(t in small_text(200, 0..=1u8), u in small_text(200, 0..=1u8)) {
        // parses of two strings agree on every phrase ending strictly
        // before their common prefix length
        let lcp = t.iter().zip(u.iter()).take_while(|(a, b)| a == b).count();
        for mode in [SelfRefMode::SelfRef, SelfRefMode::NoSelfRef] {
            let pt = lz77_parse(&t, mode);
            let pu = lz77_parse(&u, mode);
            let st = pt.phrase_starts();
            for (i, (a, b)) in pt.phrases.iter().zip(pu.phrases.iter()).enumerate() {
                if st[i + 1] < lcp {
                    prop_assert_eq!(a, b, "phrase {} differs before the lcp", i);
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn parsers_match_oracles(t in small_text(64, 0..=2u8)) {
        for mode in [SelfRefMode::SelfRef, SelfRefMode::NoSelfRef] {
            prop_assert_eq!(lz77_parse(&t, mode), naive_lz77(&t, mode));
        }
        prop_assert_eq!(lz78_parse(&t), naive_lz78(&t));
    }

    #[test]
    fn all_suffix_parses_match_oracle(t in small_text(48, 0..=2u8)) {
        let idx = build_suffix_index(&t);
        for scheme in [Scheme::Lz77SelfRef, Scheme::Lz77NoSelfRef, Scheme::Lz78] {
            let fast = parse_all_suffixes(&idx, scheme);
            let slow = naive_all_suffix_parses(&t, scheme);
            prop_assert_eq!(&fast, &slow);
        }
    }

    #[test]
    fn fingerprint_algebra(t in small_text(150, 0..=3u8), seed in 0u64..1000) {
        let idx = build_suffix_index(&t);
        let mut rng = StdRng::seed_from_u64(seed);
        let s = make_scheme_for(&idx, CertMode::AllSubstrings, &mut rng);
        let n_ext = idx.len_with_sentinel();
        for _ in 0..32 {
            let i = rng.gen_range(0..=n_ext);
            let k = rng.gen_range(i..=n_ext);
            let j = rng.gen_range(i..=k);
            let whole = s.fp_substring(i, k);
            let a = s.fp_substring(i, j);
            let b = s.fp_substring(j, k);
            prop_assert_eq!(s.concat(a, b), whole);
            prop_assert_eq!(s.strip_prefix(whole, a).unwrap(), b);
            prop_assert_eq!(s.strip_suffix(whole, b).unwrap(), a);
        }
    }
}

#[test]
fn oracle_parsers_cross_agree_exhaustively() {
    // every binary string up to length 12: the production parsers and the
    // definitional oracles are independent code paths
    for len in 0..=12usize {
        for bits in 0u32..(1 << len) {
            let t: Vec<u8> = (0..len)
                .map(|i| b'A' + ((bits >> i) & 1) as u8)
                .collect();
            for mode in [SelfRefMode::SelfRef, SelfRefMode::NoSelfRef] {
                let a = lz77_parse(&t, mode);
                let b = naive_lz77(&t, mode);
                assert_eq!(a, b, "t={:?}", t);
                assert_eq!(a.decompress().unwrap(), t);
            }
            let a = lz78_parse(&t);
            assert_eq!(a, naive_lz78(&t), "t={:?}", t);
            assert_eq!(a.decompress().unwrap(), t);
        }
    }
}

#[test]
fn certified_scheme_equals_substring_equality_exhaustively() {
    let mut rng = StdRng::seed_from_u64(9);
    for len in [0usize, 1, 2, 37, 120, 200] {
        let text: Vec<u8> = (0..len).map(|_| b'A' + rng.gen_range(0..3)).collect();
        let idx = build_suffix_index(&text);
        let s = make_scheme_for(&idx, CertMode::AllSubstrings, &mut rng);
        let n_ext = idx.len_with_sentinel();
        let sym = |i: usize| -> u16 {
            if i == len {
                czix::SENTINEL
            } else {
                text[i] as u16
            }
        };
        for sub_len in 1..=n_ext {
            for i in 0..=n_ext - sub_len {
                for j in i + 1..=n_ext - sub_len {
                    let eq_str = (0..sub_len).all(|k| sym(i + k) == sym(j + k));
                    let eq_fp =
                        s.fp_substring(i, i + sub_len) == s.fp_substring(j, j + sub_len);
                    assert_eq!(eq_str, eq_fp, "i={i} j={j} len={sub_len}");
                }
            }
        }
        assert!(verify_collision_free(&s, &idx, CertMode::AllSubstrings));
    }
}

#[test]
fn pow2_certification_mode() {
    let mut rng = StdRng::seed_from_u64(10);
    for len in [5usize, 50, 130] {
        let text: Vec<u8> = (0..len).map(|_| b'A' + rng.gen_range(0..2)).collect();
        let idx = build_suffix_index(&text);
        let s = make_scheme_for(&idx, CertMode::Pow2LengthsOnly, &mut rng);
        assert!(s.is_certified());
        assert_eq!(s.mode(), CertMode::Pow2LengthsOnly);
        assert!(verify_collision_free(&s, &idx, CertMode::Pow2LengthsOnly));
    }
}

/// Exercises the trie descent against the uncompacted phrase trie with
/// materialized labels. Fragment-free tries must agree exactly on where
/// the descent stops; fragmented tries (equal phrase keys on several
/// children, possible because suffixes sharing a phrase prefix need not be
/// suffix-array contiguous) may stop earlier, and the engine's global
/// extension covers the difference — asserted via the end-to-end check.
#[test]
fn blind_trie_matches_naive_walk() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut fragment_free = 0;
    let mut fragmented = 0;
    for trial in 0..150u64 {
        let n = rng.gen_range(1..90);
        let sigma = rng.gen_range(2..=3u8);
        let text: Vec<u8> = (0..n).map(|_| b'A' + rng.gen_range(0..sigma)).collect();
        let idx = build_suffix_index(&text);
        let mut brng = StdRng::seed_from_u64(5000 + trial);
        let index = Index::build_with_rng(&text, BuildOptions::default(), &mut brng);

        for scheme in [Scheme::Lz77SelfRef, Scheme::Lz77NoSelfRef, Scheme::Lz78] {
            let parses = parse_all_suffixes(&idx, scheme);
            let trie = build_phrase_trie(&idx, &parses);
            let naive = NaiveTrie::build(&parses);
            if trie.has_duplicate_keys() {
                fragmented += 1;
            } else {
                fragment_free += 1;
            }

            for _ in 0..8 {
                let pattern: Vec<u8> = if rng.gen_bool(0.5) && n >= 2 {
                    let s = rng.gen_range(0..n - 1);
                    let e = rng.gen_range(s + 1..=n);
                    text[s..e].to_vec()
                } else {
                    let m = rng.gen_range(0..12);
                    (0..m).map(|_| b'A' + rng.gen_range(0..sigma)).collect()
                };
                let parse = match scheme {
                    Scheme::Lz77SelfRef => {
                        LzParse::Lz77(lz77_parse(&pattern, SelfRefMode::SelfRef))
                    }
                    Scheme::Lz77NoSelfRef => {
                        LzParse::Lz77(lz77_parse(&pattern, SelfRefMode::NoSelfRef))
                    }
                    Scheme::Lz78 => LzParse::Lz78(lz78_parse(&pattern)),
                };
                let view = PatternView::from_parse(&parse).unwrap();
                let mut stats = QueryStats::default();
                let st = descend(&trie, &idx, &view, &mut stats);
                let walk = naive.walk_full(&parse);

                // one lcp call per phrase at most during the descent
                assert!(stats.lcp_calls as usize <= view.phrase_count());

                // The blind descent follows one suffix-array fragment and
                // matches phrase *content*, so its stop point is
                // incomparable to the structural walk over merged nodes in
                // both directions; what must hold is that a fragment-local
                // resolution never overshoots the true longest match.
                if st.fail.is_some() {
                    let res = finish_on_edge(&idx, &view, &st, &mut stats);
                    assert!(res.matched_len <= walk.matched, "pattern {:?}", pattern);
                } else {
                    assert!(st.p <= walk.matched, "pattern {:?}", pattern);
                }

                // the naive walk is string-sound
                let (nm, nocc) = naive_locate(&text, &pattern);
                assert_eq!(walk.matched, nm, "pattern {:?}", pattern);

                // end-to-end result is exact regardless of fragmentation
                let res = index.locate(&parse).unwrap();
                let mut pos = res.positions.clone();
                pos.sort_unstable();
                assert_eq!((res.matched_len, pos), (nm, nocc));
            }
        }
    }
    // both shapes must actually occur for the test to mean anything
    assert!(fragment_free > 0 && fragmented > 0);
}

/// Lemma law: when a pattern and a suffix share exactly k-1 canonical
/// phrases and the pattern's k-th phrase is a copy that differs from the
/// suffix's, the lcp of the two strings is p_k + min(lcp-oracle, l_k).
#[test]
fn lcp_reduction_law_randomized() {
    let mut rng = StdRng::seed_from_u64(12);
    let mut checked = 0u32;
    'outer: for _ in 0..400 {
        let n = rng.gen_range(4..120);
        let sigma = rng.gen_range(2..=3u8);
        let text: Vec<u8> = (0..n).map(|_| b'A' + rng.gen_range(0..sigma)).collect();
        let idx = build_suffix_index(&text);
        let parses = parse_all_suffixes(&idx, Scheme::Lz77SelfRef);

        for _ in 0..16 {
            let pattern: Vec<u8> = if rng.gen_bool(0.5) && n >= 2 {
                let s = rng.gen_range(0..n - 1);
                let e = rng.gen_range(s + 1..=n);
                text[s..e].to_vec()
            } else {
                let m = rng.gen_range(1..16);
                (0..m).map(|_| b'A' + rng.gen_range(0..sigma)).collect()
            };
            let pp = lz77_parse(&pattern, SelfRefMode::SelfRef);
            let pstarts = pp.phrase_starts();
            for i in 0..n {
                let LzParse::Lz77(sp) = &parses[i] else { unreachable!() };
                // shared phrase count
                let mut k = 0;
                while k < pp.phrases.len()
                    && k < sp.phrases.len()
                    && pp.phrases[k] == sp.phrases[k]
                {
                    k += 1;
                }
                if k >= pp.phrases.len() {
                    continue;
                }
                let Phrase77::Copy { r, l } = pp.phrases[k] else {
                    continue;
                };
                let p_k = pstarts[k];
                // naive lcp of pattern and suffix
                let mut naive = 0;
                while naive < pattern.len()
                    && i + naive < n
                    && pattern[naive] == text[i + naive]
                {
                    naive += 1;
                }
                let oracle = idx.lcp_suffixes(i + p_k, i + p_k - r).min(l);
                assert_eq!(
                    naive,
                    p_k + oracle,
                    "text={:?} pattern={:?} suffix={}",
                    text,
                    pattern,
                    i
                );
                checked += 1;
                if checked > 3000 {
                    break 'outer;
                }
            }
        }
    }
    assert!(checked > 1000, "not enough instances generated");
}

/// Pruned and unpruned slice variants answer identically.
#[test]
fn pruning_equivalence_randomized() {
    let mut rng = StdRng::seed_from_u64(13);
    for trial in 0..30u64 {
        let n = rng.gen_range(1..200);
        let kind = rng.gen_range(0..3);
        let text: Vec<u8> = match kind {
            0 => (0..n).map(|_| b'A' + rng.gen_range(0..2)).collect(),
            1 => (0..n).map(|i| (i % 251) as u8).collect(),
            _ => vec![b'A'; n],
        };
        let mut r1 = StdRng::seed_from_u64(7000 + trial);
        let mut r2 = StdRng::seed_from_u64(7000 + trial);
        let pruned = Index::build_with_rng(&text, BuildOptions::default(), &mut r1);
        let unpruned = Index::build_unpruned_with_rng(&text, BuildOptions::default(), &mut r2);
        assert!(pruned.augmented_node_count() <= unpruned.augmented_node_count());

        for _ in 0..16 {
            let pattern: Vec<u8> = if rng.gen_bool(0.5) && n >= 2 {
                let s = rng.gen_range(0..n - 1);
                let e = rng.gen_range(s + 1..=n);
                text[s..e].to_vec()
            } else {
                let m = rng.gen_range(0..24);
                (0..m).map(|_| rng.gen_range(0..4u8) * 31).collect()
            };
            for scheme in [Scheme::Lz77SelfRef, Scheme::Lz78] {
                let parse = match scheme {
                    Scheme::Lz78 => LzParse::Lz78(lz78_parse(&pattern)),
                    _ => LzParse::Lz77(lz77_parse(&pattern, SelfRefMode::SelfRef)),
                };
                let a = pruned.locate(&parse).unwrap();
                let b = unpruned.locate(&parse).unwrap();
                assert_eq!(a.matched_len, b.matched_len);
                assert_eq!(a.full_match, b.full_match);
                assert_eq!(a.positions, b.positions);
            }
        }
    }
}

/// count and exists are projections of locate, on every tested input.
#[test]
fn count_exists_consistent_with_locate() {
    let mut rng = StdRng::seed_from_u64(14);
    for trial in 0..25u64 {
        let n = rng.gen_range(1..150);
        let text: Vec<u8> = (0..n).map(|_| b'A' + rng.gen_range(0..3)).collect();
        let mut brng = StdRng::seed_from_u64(8000 + trial);
        let index = Index::build_with_rng(&text, BuildOptions::default(), &mut brng);
        for _ in 0..10 {
            let m = rng.gen_range(0..20);
            let pattern: Vec<u8> = (0..m).map(|_| b'A' + rng.gen_range(0..3)).collect();
            for scheme in [Scheme::Lz77SelfRef, Scheme::Lz77NoSelfRef, Scheme::Lz78] {
                let parse = match scheme {
                    Scheme::Lz77SelfRef => {
                        LzParse::Lz77(lz77_parse(&pattern, SelfRefMode::SelfRef))
                    }
                    Scheme::Lz77NoSelfRef => {
                        LzParse::Lz77(lz77_parse(&pattern, SelfRefMode::NoSelfRef))
                    }
                    Scheme::Lz78 => LzParse::Lz78(lz78_parse(&pattern)),
                };
                let loc = index.locate(&parse).unwrap();
                assert_eq!(
                    index.count(&parse).unwrap(),
                    (loc.matched_len, loc.positions.len())
                );
                assert_eq!(index.exists(&parse).unwrap(), loc.full_match);
            }
        }
    }
}

/// The parse interchange format round-trips for arbitrary parse shapes.
#[test]
fn parse_text_round_trips() {
    let mut rng = StdRng::seed_from_u64(15);
    for _ in 0..200 {
        let m = rng.gen_range(0..64);
        let pattern: Vec<u8> = (0..m).map(|_| rng.gen::<u8>()).collect();
        for scheme in [Scheme::Lz77SelfRef, Scheme::Lz77NoSelfRef, Scheme::Lz78] {
            let parse = match scheme {
                Scheme::Lz77SelfRef => LzParse::Lz77(lz77_parse(&pattern, SelfRefMode::SelfRef)),
                Scheme::Lz77NoSelfRef => {
                    LzParse::Lz77(lz77_parse(&pattern, SelfRefMode::NoSelfRef))
                }
                Scheme::Lz78 => LzParse::Lz78(lz78_parse(&pattern)),
            };
            let text = czix::lz::write_parse_text(&parse).unwrap();
            assert_eq!(czix::lz::read_parse_text(&text).unwrap(), parse);
        }
    }
}

/// The certified-scheme requirement is visible: a hand-picked degenerate
/// base is rejected.
#[test]
fn degenerate_base_rejected() {
    let idx = build_suffix_index(b"ABA");
    let s = FingerprintScheme::with_params(b"ABA", 101, 1, CertMode::AllSubstrings);
    assert!(!verify_collision_free(&s, &idx, CertMode::AllSubstrings));
}
