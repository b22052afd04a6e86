//! Slice trees: the machinery that replaces the suffix-array binary search
//! with a fingerprint search whose cost depends on the pattern length.
//!
//! The suffix tree is augmented with extra nodes at power-of-two string
//! depths. Each level keeps a fingerprint table of its nodes. The subtree
//! under a depth-2^i node, truncated at depth 2^(i+1), forms a slice of
//! order i; each slice stores an ART decomposition with parameter 2^i:
//! per-depth fingerprint tables over the top tree, and ordered leaf lists
//! with representative suffixes for the bottom trees. Edges crossing two
//! or more levels keep only the first and last extra node; the level scan
//! jumps across such edges and a single lcp query resolves matches ending
//! on them.

use crate::fingerprint::{CertMode, FingerprintScheme, Fp};
use crate::phrase_trie::MatchResult;
use crate::query::QueryStats;
use crate::suffix::SuffixIndex;
use crate::Sym;
use std::collections::HashMap;

const F_EXTRA: u8 = 1;
const F_SUFFIX_LEAF: u8 = 2;

#[derive(Debug, Clone)]
struct AugNode {
    parent: u32,
    depth: u32,
    lo: u32,
    hi: u32,
    kids_start: u32,
    kids_len: u32,
    /// Ancestor at depth 2^floor(log2(depth)); self for nodes at a
    /// power-of-two depth. u32::MAX for the root.
    slice_root: u32,
    flags: u8,
}

#[derive(Debug, Clone)]
struct BottomInfo {
    /// First character of the edge entering the bottom root.
    entry: Sym,
    leaves_start: u32,
    leaves_len: u32,
}

#[derive(Debug, Clone, Copy)]
struct LongEdge {
    /// String depth of the edge's lower endpoint.
    end_depth: u32,
    /// A suffix start below the edge.
    leaf: u32,
}

/// Augmented suffix tree with level tables, slice-tree ART data and
/// long-edge records.
pub struct SliceIndex {
    nodes: Vec<AugNode>,
    kids: Vec<u32>,
    child_map: HashMap<(u32, Sym), u32>,
    /// levels[i]: fingerprint of the root-to-node string -> nodes at
    /// string depth 2^i. Buckets hold the rare same-fingerprint entries
    /// possible under Pow2 certification.
    levels: Vec<HashMap<u64, Vec<u32>>>,
    /// (slice root, absolute depth, fingerprint) -> top-tree positions.
    top: HashMap<(u32, u32, u64), Vec<u32>>,
    bottoms: Vec<BottomInfo>,
    /// (slice root, node) -> index into `bottoms`; bottom-root status is
    /// relative to one slice (a boundary node is a leaf of its parent
    /// slice and the root of its own).
    bottom_map: HashMap<(u32, u32), u32>,
    bottom_leaves: Vec<u32>,
    long_edges: HashMap<u32, LongEdge>,
    pruned: bool,
}

/// The content of the phrase being extended, expressed through the text.
#[derive(Debug, Clone, Copy)]
pub enum ExtSource {
    /// An in-text span of `len` characters (possibly zero), optionally
    /// followed by one explicit character: covers non-self-referencing
    /// copies, LZ78 phrases (source span plus appended character) and
    /// plain literals (empty span plus the character).
    Span {
        start: usize,
        len: usize,
        extra: Option<Sym>,
    },
    /// Self-referencing copy: the content is periodic with period
    /// `rho = S[rho_start..rho_start + r]`.
    Periodic { rho_start: usize, r: usize },
}

impl ExtSource {
    pub fn in_text(start: usize, len: usize) -> ExtSource {
        ExtSource::Span {
            start,
            len,
            extra: None,
        }
    }

    /// Total number of characters this source can produce.
    pub fn budget(&self, l: usize) -> usize {
        match *self {
            ExtSource::Span { len, extra, .. } => len + usize::from(extra.is_some()),
            ExtSource::Periodic { .. } => l,
        }
    }
}

// ---------------------------------------------------------------------------
// Construction.
// ---------------------------------------------------------------------------

/// ART decomposition of an arbitrary rooted tree given as adjacency lists
/// (a leaf is a node without children). Returns the top-tree nodes and the
/// bottom-tree roots: every vertex of minimal depth with at most `chi`
/// leaves below it roots a bottom tree; the top tree is everything else.
pub fn art_decompose(children: &[Vec<usize>], root: usize, chi: usize) -> (Vec<usize>, Vec<usize>) {
    let n = children.len();
    let mut leaf_count = vec![0usize; n];
    // iterative post-order
    let mut stack = vec![(root, false)];
    while let Some((v, processed)) = stack.pop() {
        if processed {
            if children[v].is_empty() {
                leaf_count[v] = 1;
            } else {
                leaf_count[v] = children[v].iter().map(|&c| leaf_count[c]).sum();
            }
        } else {
            stack.push((v, true));
            for &c in &children[v] {
                stack.push((c, false));
            }
        }
    }
    let mut top = Vec::new();
    let mut bottom_roots = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        if leaf_count[v] <= chi {
            bottom_roots.push(v);
        } else {
            top.push(v);
            for &c in &children[v] {
                stack.push(c);
            }
        }
    }
    (top, bottom_roots)
}

/// Alstrup bound for one decomposition: top-tree leaves (top nodes whose
/// children are all bottom roots) never exceed leaves/(chi+1).
pub fn art_bound_holds(
    children: &[Vec<usize>],
    top: &[usize],
    chi: usize,
    total_leaves: usize,
) -> bool {
    let is_top = {
        let mut v = vec![false; children.len()];
        for &t in top {
            v[t] = true;
        }
        v
    };
    let top_leaves = top
        .iter()
        .filter(|&&t| children[t].iter().all(|&c| !is_top[c]))
        .count();
    top_leaves * (chi + 1) <= total_leaves
}

/// Build the pruned (linear-space) slice index.
pub fn build_slice_index(idx: &SuffixIndex, fps: &FingerprintScheme) -> SliceIndex {
    SliceIndex::build(idx, fps, true)
}

/// Build the unpruned variant that keeps every power-of-two crossing.
/// Space grows to O(n log n); only used to validate that pruning does not
/// change answers.
#[cfg(feature = "oracle")]
pub fn build_slice_index_unpruned(idx: &SuffixIndex, fps: &FingerprintScheme) -> SliceIndex {
    SliceIndex::build(idx, fps, false)
}

impl SliceIndex {
    fn build(idx: &SuffixIndex, fps: &FingerprintScheme, pruned: bool) -> SliceIndex {
        let n_ext = idx.len_with_sentinel();
        let mut nodes: Vec<AugNode> = Vec::new();
        let mut long_edges = HashMap::new();

        // 1. copy the suffix tree, subdividing edges at power-of-two depths
        let mut map = vec![u32::MAX; idx.node_count()];
        let mut order = vec![idx.root()];
        // BFS so parents are mapped before children
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &c in idx.children(v) {
                order.push(c);
            }
        }
        for &v in &order {
            let depth = idx.depth(v);
            let (lo, hi) = idx.interval(v);
            let flags = if idx.is_leaf(v) { F_SUFFIX_LEAF } else { 0 };
            let parent_aug = if v == idx.root() {
                u32::MAX
            } else {
                let pu = idx.parent(v);
                let pd = idx.depth(pu);
                // power-of-two crossings strictly inside the edge
                let mut crossings: Vec<usize> = Vec::new();
                let mut lvl = 1usize;
                while lvl < depth {
                    if lvl > pd {
                        crossings.push(lvl);
                    }
                    if lvl > n_ext {
                        break;
                    }
                    lvl *= 2;
                }
                let kept: &[usize] = if pruned && crossings.len() > 2 {
                    &[crossings[0], crossings[crossings.len() - 1]]
                } else {
                    &crossings
                };
                let mut up = map[pu as usize];
                let first_kept_id = nodes.len() as u32;
                for &d in kept {
                    let id = nodes.len() as u32;
                    nodes.push(AugNode {
                        parent: up,
                        depth: d as u32,
                        lo: lo as u32,
                        hi: hi as u32,
                        kids_start: 0,
                        kids_len: 0,
                        slice_root: u32::MAX,
                        flags: F_EXTRA,
                    });
                    up = id;
                }
                if pruned && crossings.len() >= 2 {
                    long_edges.insert(
                        first_kept_id,
                        LongEdge {
                            end_depth: depth as u32,
                            leaf: idx.sa()[lo],
                        },
                    );
                }
                up
            };
            let id = nodes.len() as u32;
            nodes.push(AugNode {
                parent: parent_aug,
                depth: depth as u32,
                lo: lo as u32,
                hi: hi as u32,
                kids_start: 0,
                kids_len: 0,
                slice_root: u32::MAX,
                flags,
            });
            map[v as usize] = id;
        }

        // child lists in suffix-array order + first-symbol map
        let mut kids = Vec::new();
        let mut child_map = HashMap::new();
        {
            let mut per_parent: Vec<Vec<u32>> = vec![Vec::new(); nodes.len()];
            for v in 0..nodes.len() as u32 {
                let p = nodes[v as usize].parent;
                if p != u32::MAX {
                    per_parent[p as usize].push(v);
                }
            }
            for v in 0..nodes.len() {
                per_parent[v].sort_by_key(|&c| {
                    (nodes[c as usize].lo, std::cmp::Reverse(nodes[c as usize].hi))
                });
                nodes[v].kids_start = kids.len() as u32;
                nodes[v].kids_len = per_parent[v].len() as u32;
                for &c in &per_parent[v] {
                    kids.push(c);
                    let first = idx.sym(
                        idx.sa()[nodes[c as usize].lo as usize] as usize + nodes[v].depth as usize,
                    );
                    child_map.insert((v as u32, first), c);
                }
            }
        }

        let root_id = map[idx.root() as usize];
        debug_assert_eq!(root_id, 0);

        let mut slice = SliceIndex {
            nodes,
            kids,
            child_map,
            levels: Vec::new(),
            top: HashMap::new(),
            bottoms: Vec::new(),
            bottom_map: HashMap::new(),
            bottom_leaves: Vec::new(),
            long_edges,
            pruned,
        };

        // 2. level tables
        let max_level = usize::BITS as usize - 1 - n_ext.leading_zeros() as usize;
        slice.levels = vec![HashMap::new(); max_level + 1];
        for v in 0..slice.nodes.len() as u32 {
            let d = slice.nodes[v as usize].depth as usize;
            if d > 0 && d.is_power_of_two() && d <= n_ext {
                let i = d.trailing_zeros() as usize;
                let rep = slice.rep(v, idx);
                let fp = fps.fp_substring(rep, rep + d).value;
                let bucket = slice.levels[i].entry(fp).or_default();
                if fps.mode() == CertMode::AllSubstrings {
                    debug_assert!(bucket.is_empty(), "level collision under full certification");
                }
                bucket.push(v);
            }
        }

        // 3. slice-root annotation: nearest ancestor at the octave level
        {
            let mut anc: Vec<u32> = vec![u32::MAX; max_level + 2];
            let mut stack: Vec<(u32, bool)> = vec![(slice.root(), false)];
            let mut saved: Vec<(usize, u32)> = Vec::new();
            let mut save_marks: Vec<usize> = Vec::new();
            while let Some((v, leave)) = stack.pop() {
                if leave {
                    let from = save_marks.pop().unwrap();
                    while saved.len() > from {
                        let (i, old) = saved.pop().unwrap();
                        anc[i] = old;
                    }
                    continue;
                }
                let d = slice.nodes[v as usize].depth as usize;
                save_marks.push(saved.len());
                stack.push((v, true));
                if d > 0 {
                    let o = usize::BITS as usize - 1 - d.leading_zeros() as usize;
                    if d.is_power_of_two() {
                        if o < anc.len() {
                            saved.push((o, anc[o]));
                            anc[o] = v;
                        }
                        slice.nodes[v as usize].slice_root = v;
                    } else {
                        debug_assert!(o < anc.len() && anc[o] != u32::MAX, "missing octave ancestor");
                        slice.nodes[v as usize].slice_root = anc[o];
                    }
                }
                for &c in slice.children_of(v) {
                    stack.push((c, false));
                }
            }
        }

        // 4. per-slice ART decomposition, bottom leaf lists, top tables.
        // Slices rooted at the first extra node of a long edge are never
        // searched (the level scan jumps across the edge), and with the
        // middle nodes pruned they could not be cut at their boundary
        // anyway, so they are not built.
        let roots: Vec<u32> = (0..slice.nodes.len() as u32)
            .filter(|&v| {
                let d = slice.nodes[v as usize].depth as usize;
                d > 0 && d.is_power_of_two() && !slice.long_edges.contains_key(&v)
            })
            .collect();
        for &r_node in &roots {
            slice.build_one_slice(idx, fps, r_node);
        }

        slice
    }

    fn build_one_slice(&mut self, idx: &SuffixIndex, fps: &FingerprintScheme, root: u32) {
        let d0 = self.nodes[root as usize].depth as usize;
        let bound = 2 * d0;
        let chi = d0;

        // collect members (local adjacency); slice leaves have no local kids
        let mut ids = vec![root];
        let mut local: Vec<Vec<usize>> = vec![Vec::new()];
        let mut walk: Vec<usize> = vec![0];
        while let Some(vi) = walk.pop() {
            let v = ids[vi];
            let vd = self.nodes[v as usize].depth as usize;
            let v_is_leaf =
                (vd >= bound || self.nodes[v as usize].flags & F_SUFFIX_LEAF != 0) && vi != 0;
            if v_is_leaf {
                continue;
            }
            if vi == 0 && (self.nodes[v as usize].flags & F_SUFFIX_LEAF != 0) {
                continue;
            }
            for &c in self.children_of(v) {
                debug_assert!(self.nodes[c as usize].depth as usize <= bound);
                let ci = ids.len();
                ids.push(c);
                local.push(Vec::new());
                local[vi].push(ci);
                walk.push(ci);
            }
        }

        let (top, bottom_roots) = art_decompose(&local, 0, chi);
        let total_leaves = local.iter().filter(|c| c.is_empty()).count();
        assert!(
            art_bound_holds(&local, &top, chi, total_leaves),
            "ART bound violated in a slice"
        );

        let is_top = {
            let mut v = vec![false; ids.len()];
            for &t in &top {
                v[t] = true;
            }
            v
        };

        // bottom roots: entry character + ordered leaf list
        for &b in &bottom_roots {
            let node = ids[b];
            let leaves_start = self.bottom_leaves.len() as u32;
            let mut st = vec![b];
            while let Some(x) = st.pop() {
                if local[x].is_empty() {
                    self.bottom_leaves.push(ids[x]);
                } else {
                    for &c in local[x].iter().rev() {
                        st.push(c);
                    }
                }
            }
            let entry = if node == root {
                0 // unused: the slice root is its own bottom tree
            } else {
                let parent = self.nodes[node as usize].parent;
                idx.sym(
                    idx.sa()[self.nodes[node as usize].lo as usize] as usize
                        + self.nodes[parent as usize].depth as usize,
                )
            };
            let bi = self.bottoms.len() as u32;
            self.bottoms.push(BottomInfo {
                entry,
                leaves_start,
                leaves_len: self.bottom_leaves.len() as u32 - leaves_start,
            });
            self.bottom_map.insert((root, node), bi);
        }

        // top tables: every depth along edges between top members
        for (li, &w) in ids.iter().enumerate() {
            if li == 0 || !is_top[li] {
                continue;
            }
            let u = self.nodes[w as usize].parent;
            let ud = self.nodes[u as usize].depth as usize;
            let wd = self.nodes[w as usize].depth as usize;
            let rep = self.rep(w, idx);
            for d in (ud + 1)..=wd {
                let fp = fps.fp_substring(rep, rep + d).value;
                let bucket = self.top.entry((root, d as u32, fp)).or_default();
                if fps.mode() == CertMode::AllSubstrings {
                    debug_assert!(bucket.is_empty(), "top collision under full certification");
                }
                bucket.push(w);
            }
        }
    }

    // -- small accessors -----------------------------------------------------

    pub fn root(&self) -> u32 {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_pruned(&self) -> bool {
        self.pruned
    }

    pub fn depth(&self, v: u32) -> usize {
        self.nodes[v as usize].depth as usize
    }

    pub fn interval(&self, v: u32) -> (usize, usize) {
        (
            self.nodes[v as usize].lo as usize,
            self.nodes[v as usize].hi as usize,
        )
    }

    fn rep(&self, v: u32, idx: &SuffixIndex) -> usize {
        idx.sa()[self.nodes[v as usize].lo as usize] as usize
    }

    fn children_of(&self, v: u32) -> &[u32] {
        let n = &self.nodes[v as usize];
        &self.kids[n.kids_start as usize..(n.kids_start + n.kids_len) as usize]
    }

    fn bottom_of(&self, slice_root: u32, v: u32) -> Option<u32> {
        self.bottom_map.get(&(slice_root, v)).copied()
    }

    fn bottom_leaves_of(&self, bi: u32) -> &[u32] {
        let b = &self.bottoms[bi as usize];
        &self.bottom_leaves[b.leaves_start as usize..(b.leaves_start + b.leaves_len) as usize]
    }

    /// Extra (non-original) node count, for space accounting.
    pub fn extra_node_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.flags & F_EXTRA != 0).count()
    }

    /// Structural invariants; also re-verifies every level-table entry's
    /// fingerprint against the stored node's span.
    pub fn check_invariants(&self, idx: &SuffixIndex, fps: &FingerprintScheme) {
        for (i, table) in self.levels.iter().enumerate() {
            let d = 1usize << i;
            for (&fp, bucket) in table {
                for &v in bucket {
                    assert_eq!(self.nodes[v as usize].depth as usize, d);
                    let rep = self.rep(v, idx);
                    assert_eq!(fps.fp_substring(rep, rep + d).value, fp);
                }
            }
        }
        if self.pruned {
            // extra nodes are unary subdivision points; a chain longer
            // than two would mean a long edge kept a middle node
            for v in 0..self.nodes.len() as u32 {
                if self.nodes[v as usize].flags & F_EXTRA == 0 {
                    continue;
                }
                let mut chain = 1;
                let mut p = self.nodes[v as usize].parent;
                while p != u32::MAX && self.nodes[p as usize].flags & F_EXTRA != 0 {
                    chain += 1;
                    p = self.nodes[p as usize].parent;
                }
                assert!(chain <= 2, "more than two extra nodes on an edge");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Self-referencing phrase fingerprints.
// ---------------------------------------------------------------------------

/// Fingerprints of every power-of-two-length prefix of the periodic
/// expansion of a self-referencing phrase `(r, l)` whose period is
/// `rho = S[rho_start..rho_start + r]`. O(log l) total, using only
/// fingerprint algebra on in-text substrings.
pub fn selfref_pow2_prefix_fps(
    fps: &FingerprintScheme,
    rho_start: usize,
    r: usize,
    l: usize,
) -> Vec<Fp> {
    assert!(r >= 1);
    let rho = |a: usize, b: usize| fps.fp_substring(rho_start + a, rho_start + b);
    // substring of rho.rho given 0 <= a <= b <= 2r
    let rho2 = |a: usize, b: usize| -> Fp {
        if b <= r {
            rho(a, b)
        } else if a >= r {
            rho(a - r, b - r)
        } else {
            fps.concat(rho(a, r), rho(0, b - r))
        }
    };
    let mut out: Vec<Fp> = Vec::new();
    let mut h = 1usize;
    while h <= l {
        if h <= r {
            out.push(rho(0, h));
        } else {
            let prev = *out.last().unwrap();
            let half = h / 2;
            let q = half % r;
            let q2 = h % r;
            // prev . rho[q..r] . prev, then cut the trailing r-q characters
            let full = fps.concat(fps.concat(prev, rho(q, r)), prev);
            let cut = rho2(q2, q2 + (r - q));
            out.push(fps.strip_suffix(full, cut).expect("length bookkeeping"));
        }
        if h > l / 2 {
            break;
        }
        h *= 2;
    }
    out
}

/// Check that `S[leaf + p .. leaf + p + t]` equals the first `t`
/// characters of the periodic expansion, by the repeated-doubling
/// comparison of in-text fingerprints. O(log t).
#[allow(clippy::too_many_arguments)]
pub fn selfref_verify(
    fps: &FingerprintScheme,
    idx: &SuffixIndex,
    leaf: usize,
    p: usize,
    rho_start: usize,
    r: usize,
    t: usize,
    stats: &mut QueryStats,
) -> bool {
    let n_ext = idx.len_with_sentinel();
    if t == 0 {
        return true;
    }
    if leaf + p + t > n_ext {
        return false;
    }
    let rho = |a: usize, b: usize| fps.fp_substring(rho_start + a, rho_start + b);
    let span = |a: usize, b: usize| fps.fp_substring(a, b);
    let base = leaf + p;

    // verified pow2 prefix lengths, in increasing order
    let mut h_star = 0usize;
    let mut h = 1usize;
    while h <= t {
        let ok = if h <= r {
            stats.fingerprint_probes += 1;
            rho(0, h) == span(base, base + h)
        } else {
            let half = h / 2;
            let q = half % r;
            // span[0..half] == expansion[0..half] is already verified;
            // check the filler and the wrapped prefix piece
            stats.fingerprint_probes += 2;
            rho(q, r) == span(base + half, base + half + (r - q))
                && span(base, base + half - (r - q)) == span(base + half + (r - q), base + h)
        };
        if !ok {
            return false;
        }
        h_star = h;
        if h > t / 2 {
            break;
        }
        h *= 2;
    }

    // tail: expansion[h_star..t] checked against span from verified pieces
    check_periodic_piece(
        fps,
        stats,
        rho_start,
        r,
        base,
        h_star % r,
        t - h_star,
        base + h_star,
        h_star,
    )
}

/// Claim: S[at..at+len] equals the periodic expansion starting at phase
/// `b`, given that S[base..base+verified_limit] is a verified expansion
/// prefix. All comparisons are between in-text substrings.
#[allow(clippy::too_many_arguments)]
fn check_periodic_piece(
    fps: &FingerprintScheme,
    stats: &mut QueryStats,
    rho_start: usize,
    r: usize,
    base: usize,
    b: usize,
    len: usize,
    at: usize,
    verified_limit: usize,
) -> bool {
    if len == 0 {
        return true;
    }
    let rho = |x: usize, y: usize| fps.fp_substring(rho_start + x, rho_start + y);
    let span = |x: usize, y: usize| fps.fp_substring(x, y);
    if b + len <= r {
        stats.fingerprint_probes += 1;
        return rho(b, b + len) == span(at, at + len);
    }
    if b > 0 {
        stats.fingerprint_probes += 1;
        if rho(b, r) != span(at, at + (r - b)) {
            return false;
        }
        return check_periodic_piece(
            fps,
            stats,
            rho_start,
            r,
            base,
            0,
            len - (r - b),
            at + (r - b),
            verified_limit,
        );
    }
    // b == 0: compare against the verified prefix of the same length class
    let mut h = verified_limit;
    while h > len {
        h /= 2;
    }
    debug_assert!(h >= 1);
    stats.fingerprint_probes += 1;
    if span(base, base + h) != span(at, at + h) {
        return false;
    }
    check_periodic_piece(
        fps,
        stats,
        rho_start,
        r,
        base,
        h % r,
        len - h,
        at + h,
        verified_limit,
    )
}

// ---------------------------------------------------------------------------
// The extension search.
// ---------------------------------------------------------------------------

struct Content<'a> {
    fps: &'a FingerprintScheme,
    idx: &'a SuffixIndex,
    src: ExtSource,
    /// Matched prefix length and its representative in-text realization.
    p: usize,
    rep: usize,
    fp_prefix: Fp,
    /// Power-of-two prefix fingerprints, periodic sources only.
    pow2: Vec<Fp>,
    l: usize,
}

impl<'a> Content<'a> {
    fn new(
        fps: &'a FingerprintScheme,
        idx: &'a SuffixIndex,
        src: ExtSource,
        p: usize,
        rep: usize,
        l: usize,
    ) -> Content<'a> {
        let pow2 = match src {
            ExtSource::Periodic { rho_start, r } => selfref_pow2_prefix_fps(fps, rho_start, r, l),
            ExtSource::Span { .. } => Vec::new(),
        };
        Content {
            fps,
            idx,
            src,
            p,
            rep,
            fp_prefix: fps.fp_substring(rep, rep + p),
            pow2,
            l,
        }
    }

    /// Content character at offset `o < l`.
    fn sym_at(&self, o: usize) -> Sym {
        match self.src {
            ExtSource::Span { start, len, extra } => {
                if o < len {
                    self.idx.sym(start + o)
                } else {
                    extra.expect("offset inside the content")
                }
            }
            ExtSource::Periodic { rho_start, r } => self.idx.sym(rho_start + o % r),
        }
    }

    /// Fingerprint of the phrase content prefix of length `t <= l`.
    fn content_prefix_fp(&self, t: usize) -> Fp {
        match self.src {
            ExtSource::Span { start, len, extra } => {
                if t <= len {
                    self.fps.fp_substring(start, start + t)
                } else {
                    let c = extra.expect("length inside the content");
                    let ch = Fp {
                        value: c as u64 % self.fps.modulus(),
                        len: 1,
                    };
                    self.fps.concat(self.fps.fp_substring(start, start + len), ch)
                }
            }
            ExtSource::Periodic { rho_start, r } => self.periodic_prefix_fp(rho_start, r, t),
        }
    }

    fn periodic_prefix_fp(&self, rho_start: usize, r: usize, t: usize) -> Fp {
        if t == 0 {
            return Fp::EMPTY;
        }
        if t <= r {
            return self.fps.fp_substring(rho_start, rho_start + t);
        }
        let a = usize::BITS as usize - 1 - t.leading_zeros() as usize;
        let h = 1usize << a;
        let head = self.pow2[a];
        debug_assert_eq!(head.len, h);
        if t == h {
            return head;
        }
        let tail = self.periodic_piece_fp(rho_start, r, h % r, t - h);
        self.fps.concat(head, tail)
    }

    /// Fingerprint of the periodic stream starting at phase `b`, length `len`.
    fn periodic_piece_fp(&self, rho_start: usize, r: usize, b: usize, len: usize) -> Fp {
        if len == 0 {
            return Fp::EMPTY;
        }
        if b + len <= r {
            return self.fps.fp_substring(rho_start + b, rho_start + b + len);
        }
        if b > 0 {
            let head = self.fps.fp_substring(rho_start + b, rho_start + r);
            let tail = self.periodic_prefix_fp(rho_start, r, len - (r - b));
            return self.fps.concat(head, tail);
        }
        self.periodic_prefix_fp(rho_start, r, len)
    }

    /// Fingerprint of `P[0..d]` for `d <= p + l`: the matched prefix comes
    /// from the trie representative, the rest from the phrase content.
    fn pattern_prefix_fp(&self, d: usize) -> Fp {
        if d <= self.p {
            self.fps.fp_substring(self.rep, self.rep + d)
        } else {
            self.fps
                .concat(self.fp_prefix, self.content_prefix_fp(d - self.p))
        }
    }

    /// Pattern character at offset `o < p + l`.
    fn pattern_sym(&self, o: usize) -> Sym {
        if o < self.p {
            self.idx.sym(self.rep + o)
        } else {
            self.sym_at(o - self.p)
        }
    }

    /// Exact content agreement beyond `p` for a candidate leaf known to
    /// share the length-p prefix with the pattern.
    fn content_probe(&self, leaf: usize, stats: &mut QueryStats) -> usize {
        match self.src {
            ExtSource::Span { start, len, extra } => {
                let t0 = if len > 0 {
                    stats.lcp_calls += 1;
                    self.idx.lcp_suffixes(start, leaf + self.p).min(len)
                } else {
                    0
                };
                let n_ext = self.idx.len_with_sentinel();
                if t0 == len
                    && extra.is_some()
                    && leaf + self.p + len < n_ext
                    && self.idx.sym(leaf + self.p + len) == extra.unwrap()
                {
                    t0 + 1
                } else {
                    t0
                }
            }
            ExtSource::Periodic { r, .. } => {
                stats.lcp_calls += 1;
                self.idx
                    .lcp_suffixes(leaf + self.p, leaf + self.p - r)
                    .min(self.l)
            }
        }
    }
}

impl SliceIndex {
    /// Verify the claim `S[rep_w..rep_w+d] == P[0..d]` for a table
    /// candidate, according to the certification mode.
    fn verify_candidate(
        &self,
        idx: &SuffixIndex,
        fps: &FingerprintScheme,
        content: &Content,
        w: u32,
        d: usize,
        stats: &mut QueryStats,
    ) -> bool {
        let rep_w = self.rep(w, idx);
        let p = content.p;
        match fps.mode() {
            CertMode::AllSubstrings => {
                if d <= p {
                    // in-text vs in-text at equal length: the table hit is
                    // already conclusive
                    return true;
                }
                stats.fingerprint_probes += 1;
                if fps.fp_substring(rep_w, rep_w + p) != content.fp_prefix {
                    return false;
                }
                let e = d - p;
                match content.src {
                    ExtSource::Span { start, len, extra } => {
                        if e <= len {
                            // both extension pieces are in-text substrings
                            true
                        } else {
                            debug_assert_eq!(e, len + 1);
                            let span_ok = len == 0 || {
                                stats.fingerprint_probes += 1;
                                fps.fp_substring(rep_w + p, rep_w + p + len)
                                    == fps.fp_substring(start, start + len)
                            };
                            span_ok && idx.sym(rep_w + p + len) == extra.expect("extra char")
                        }
                    }
                    ExtSource::Periodic { rho_start, r } => {
                        selfref_verify(fps, idx, rep_w, p, rho_start, r, e, stats)
                    }
                }
            }
            CertMode::Pow2LengthsOnly => {
                // decompose both sides into power-of-two pieces; each piece
                // is an in-text comparison at a certified length
                match content.src {
                    ExtSource::Periodic { .. } => {
                        unreachable!("self-referencing phrases need full certification")
                    }
                    ExtSource::Span { start, len, extra } => {
                        let head = d.min(p);
                        if !pow2_piecewise_eq(fps, content.rep, rep_w, head, stats) {
                            return false;
                        }
                        if d <= p {
                            return true;
                        }
                        let e = d - p;
                        let span_part = e.min(len);
                        if span_part > 0
                            && !pow2_piecewise_eq(fps, start, rep_w + p, span_part, stats)
                        {
                            return false;
                        }
                        if e > len {
                            debug_assert_eq!(e, len + 1);
                            idx.sym(rep_w + p + len) == extra.expect("extra char")
                        } else {
                            true
                        }
                    }
                }
            }
        }
    }

    fn level_probe(
        &self,
        idx: &SuffixIndex,
        fps: &FingerprintScheme,
        content: &Content,
        level: usize,
        stats: &mut QueryStats,
    ) -> Option<u32> {
        let i = level.trailing_zeros() as usize;
        if !level.is_power_of_two() || i >= self.levels.len() {
            return None;
        }
        stats.level_probes += 1;
        let fp = content.pattern_prefix_fp(level);
        let bucket = self.levels[i].get(&fp.value)?;
        bucket
            .iter()
            .copied()
            .find(|&w| self.verify_candidate(idx, fps, content, w, level, stats))
    }

    fn top_probe(
        &self,
        idx: &SuffixIndex,
        fps: &FingerprintScheme,
        content: &Content,
        root: u32,
        d: usize,
        stats: &mut QueryStats,
    ) -> Option<u32> {
        stats.fingerprint_probes += 1;
        let fp = content.pattern_prefix_fp(d);
        let bucket = self.top.get(&(root, d as u32, fp.value))?;
        bucket
            .iter()
            .copied()
            .find(|&w| self.verify_candidate(idx, fps, content, w, d, stats))
    }

    /// Extend the matched prefix `P[0..p]` by the failing phrase whose
    /// content is `src`, up to `l` more characters (`l` must equal the
    /// source budget for span sources). Returns the exact total match
    /// length and the suffix-array interval of all its occurrences. The
    /// interval is suffix-tree precise.
    pub(crate) fn extend(
        &self,
        idx: &SuffixIndex,
        fps: &FingerprintScheme,
        p: usize,
        rep: usize,
        src: ExtSource,
        l: usize,
        stats: &mut QueryStats,
    ) -> (usize, (usize, usize)) {
        assert!(p >= 1, "extension with an empty matched prefix");
        debug_assert!(l >= 1);
        if let ExtSource::Span { len, extra, .. } = src {
            debug_assert_eq!(len + usize::from(extra.is_some()), l);
        }
        let content = Content::new(fps, idx, src, p, rep, l);
        let n_ext = idx.len_with_sentinel();

        // level scan for the deepest verified power-of-two prefix
        let first_level = p.next_power_of_two();
        let mut cur: Option<u32> = None;
        if first_level <= n_ext && first_level - p <= l {
            cur = self.level_probe(idx, fps, &content, first_level, stats);
        }
        if cur.is_none() {
            // the first probe missed (or was out of budget): find the
            // deepest surviving level at or below p on the rep path
            let mut c = prev_pow2(p);
            loop {
                if c > n_ext {
                    break;
                }
                if let Some(w) = self.level_probe(idx, fps, &content, c, stats) {
                    cur = Some(w);
                    break;
                }
                if c == 1 {
                    break;
                }
                c /= 2;
            }
        }
        let mut cur = match cur {
            Some(w) => w,
            None => {
                // no surviving level position above the match (tiny trees)
                return self.resolve_from_root(idx, &content, stats);
            }
        };

        loop {
            let cd = self.nodes[cur as usize].depth as usize;
            if let Some(le) = self.long_edges.get(&cur).copied() {
                let end = le.end_depth as usize;
                let jump = prev_pow2(end - 1);
                debug_assert!(jump > cd);
                if jump <= n_ext && jump >= p && jump - p <= l {
                    if let Some(w) = self.level_probe(idx, fps, &content, jump, stats) {
                        cur = w;
                        continue;
                    }
                }
                // the match ends on this long edge: one lcp query
                let leaf = if cd <= p { rep } else { le.leaf as usize };
                let t = content.content_probe(leaf, stats);
                return (p + t, self.interval(cur));
            }
            let next = 2 * cd;
            if next <= n_ext && next >= p && next - p <= l {
                if let Some(w) = self.level_probe(idx, fps, &content, next, stats) {
                    cur = w;
                    continue;
                }
            }
            // deepest level found; search inside its slice
            return self.slice_search(idx, fps, &content, cur, stats);
        }
    }

    /// No level node exists on the match path (only possible when every
    /// candidate's depth-1 position was never created, i.e. bare root).
    fn resolve_from_root(
        &self,
        idx: &SuffixIndex,
        content: &Content,
        stats: &mut QueryStats,
    ) -> (usize, (usize, usize)) {
        let root = self.root();
        let c0 = content.pattern_sym(0);
        match self.child_map.get(&(root, c0)) {
            None => (0, self.interval(root)),
            Some(&child) => {
                stats.lcp_calls += 1;
                let shared = idx
                    .lcp_suffixes(self.rep(child, idx), content.rep)
                    .min(content.p);
                let t = if shared >= content.p {
                    content.content_probe(self.rep(child, idx), stats)
                } else {
                    0
                };
                (content.p + t, self.interval(child))
            }
        }
    }

    fn slice_search(
        &self,
        idx: &SuffixIndex,
        fps: &FingerprintScheme,
        content: &Content,
        root: u32,
        stats: &mut QueryStats,
    ) -> (usize, (usize, usize)) {
        let d0 = self.nodes[root as usize].depth as usize;
        let p = content.p;
        let cap = (2 * d0 - 1).min(p + content.l);

        // deepest verified top-tree position in (d0, cap]
        let mut lo = d0;
        let mut hi = cap.max(d0);
        let mut best: Option<(u32, usize)> = None;
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            match self.top_probe(idx, fps, content, root, mid, stats) {
                Some(w) => {
                    best = Some((w, mid));
                    lo = mid;
                }
                None => hi = mid - 1,
            }
        }
        let d_star = lo;
        let rem = (p + content.l) - d_star;

        let at_node: Option<u32> = match best {
            None => Some(root),
            Some((w, bd)) => {
                debug_assert_eq!(bd, d_star);
                if self.nodes[w as usize].depth as usize == d_star {
                    Some(w)
                } else {
                    None // position inside a top-tree edge
                }
            }
        };
        let Some(u) = at_node else {
            // mid-edge locus: the tables cover the next position on the
            // same edge, so the next character mismatches
            return (d_star, self.interval(best.unwrap().0));
        };
        if rem == 0 {
            return (d_star, self.interval(u));
        }
        if self.nodes[u as usize].flags & F_SUFFIX_LEAF != 0 {
            return (d_star, self.interval(u));
        }
        if let Some(bi) = self.bottom_of(root, u) {
            // the slice root owns the whole slice as one bottom tree
            return self.bottom_search(idx, content, bi, d_star, stats);
        }
        let c_next = content.pattern_sym(d_star);
        match self.child_map.get(&(u, c_next)) {
            None => (d_star, self.interval(u)),
            Some(&b) => {
                if let Some(bi) = self.bottom_of(root, b) {
                    debug_assert_eq!(self.bottoms[bi as usize].entry, c_next);
                    self.bottom_search(idx, content, bi, d_star, stats)
                } else {
                    // a top child here would have produced a deeper hit
                    debug_assert!(false, "top child below the deepest top hit");
                    (d_star, self.interval(u))
                }
            }
        }
    }

    /// Binary search over the ordered bottom-tree leaves for the longest
    /// match, then an outward scan collecting every leaf achieving it.
    /// Probes stay exact for leaves that diverge from the pattern before
    /// depth `p` (possible when the matched prefix dives into the bottom
    /// tree).
    fn bottom_search(
        &self,
        idx: &SuffixIndex,
        content: &Content,
        bi: u32,
        floor_depth: usize,
        stats: &mut QueryStats,
    ) -> (usize, (usize, usize)) {
        let leaves = self.bottom_leaves_of(bi);
        let n = leaves.len();
        debug_assert!(n > 0);
        let p = content.p;
        let total = p + content.l;

        let agreement = |x: u32, stats: &mut QueryStats| -> usize {
            let rep_x = self.rep(x, idx);
            stats.lcp_calls += 1;
            let shared = idx.lcp_suffixes(rep_x, content.rep);
            if shared >= p {
                p + content.content_probe(rep_x, stats)
            } else {
                shared
            }
        };

        let mut best_a = 0usize;
        let mut best_i = 0usize;
        let mut lo = 0usize;
        let mut hi = n;
        while lo < hi {
            let mid = (lo + hi) / 2;
            let a = agreement(leaves[mid], stats);
            if a > best_a {
                best_a = a;
                best_i = mid;
            }
            if a == total {
                break;
            }
            let rep_x = self.rep(leaves[mid], idx);
            let pat = content.pattern_sym(a);
            let suf = idx.sym(rep_x + a);
            debug_assert_ne!(pat, suf);
            if pat < suf {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }

        let _ = floor_depth;
        let best_rep = self.rep(leaves[best_i], idx);
        let mut alo = best_i;
        while alo > 0 {
            stats.lcp_calls += 1;
            if idx.lcp_suffixes(self.rep(leaves[alo - 1], idx), best_rep) >= best_a {
                alo -= 1;
            } else {
                break;
            }
        }
        let mut ahi = best_i + 1;
        while ahi < n {
            stats.lcp_calls += 1;
            if idx.lcp_suffixes(self.rep(leaves[ahi], idx), best_rep) >= best_a {
                ahi += 1;
            } else {
                break;
            }
        }
        let interval = (
            self.interval(leaves[alo]).0,
            self.interval(leaves[ahi - 1]).1,
        );
        (best_a, interval)
    }
}

/// Equality of `S[a..a+len]` and `S[b..b+len]` by comparing
/// power-of-two-length fingerprint pieces (sound under Pow2 certification).
fn pow2_piecewise_eq(
    fps: &FingerprintScheme,
    mut a: usize,
    mut b: usize,
    mut len: usize,
    stats: &mut QueryStats,
) -> bool {
    while len > 0 {
        let h = prev_pow2(len);
        stats.fingerprint_probes += 1;
        if fps.fp_substring(a, a + h) != fps.fp_substring(b, b + h) {
            return false;
        }
        a += h;
        b += h;
        len -= h;
    }
    true
}

/// Public wrapper: extend a failing LZ77 copy phrase from a descent state.
pub fn extend_at_node(
    slice: &SliceIndex,
    idx: &SuffixIndex,
    fps: &FingerprintScheme,
    state: &crate::phrase_trie::DescentState,
    r: usize,
    l: usize,
    pattern_total: usize,
    stats: &mut QueryStats,
) -> MatchResult {
    let src = if l > r {
        ExtSource::Periodic {
            rho_start: state.rep + state.p - r,
            r,
        }
    } else {
        ExtSource::in_text(state.rep + state.p - r, l)
    };
    let (matched_len, interval) = slice.extend(idx, fps, state.p, state.rep, src, l, stats);
    MatchResult {
        matched_len,
        interval,
        full_match: matched_len == pattern_total,
    }
}

fn prev_pow2(x: usize) -> usize {
    debug_assert!(x >= 1);
    1usize << (usize::BITS as usize - 1 - x.leading_zeros() as usize)
}
