//! Suffix array, compact suffix tree with leaf intervals, and a
//! constant-time lcp oracle over `S` plus a terminating sentinel.
//!
//! The sentinel compares *greater* than every byte; every lexicographic
//! comparison in the crate uses this order.

use crate::{Sym, SENTINEL};
use std::collections::HashMap;

pub type NodeId = u32;

/// A position in the suffix tree: a node, or a point inside the edge
/// entering `child` after consuming `offset >= 1` characters of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreePosition {
    Node(NodeId),
    OnEdge { child: NodeId, offset: usize },
}

/// Character mismatch while descending; `offset` counts the characters
/// consumed successfully.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mismatch {
    pub offset: usize,
}

#[derive(Debug, Clone)]
struct Node {
    parent: NodeId,
    /// String depth in characters.
    depth: u32,
    /// Suffix-array interval [lo, hi) of the leaves below.
    lo: u32,
    hi: u32,
    kids_start: u32,
    kids_len: u32,
}

/// Suffix array + suffix tree + lcp oracle over `text + sentinel`.
pub struct SuffixIndex {
    text: Vec<u8>,
    sa: Vec<u32>,
    rank: Vec<u32>,
    /// lcp[k] = lcp(suffix sa[k], suffix sa[k+1]); length N-1.
    lcp: Vec<u32>,
    rmq: SparseTable,
    nodes: Vec<Node>,
    /// Children of every node, concatenated in suffix-array order.
    kids: Vec<NodeId>,
    /// (node, first character of edge) -> child
    child_map: HashMap<(NodeId, Sym), NodeId>,
}

/// Build the index over `text`; the sentinel is appended internally.
pub fn build_suffix_index(text: &[u8]) -> SuffixIndex {
    SuffixIndex::new(text.to_vec())
}

impl SuffixIndex {
    pub fn new(text: Vec<u8>) -> SuffixIndex {
        let n = text.len();
        let n_ext = n + 1;
        let sym = |i: usize| -> Sym {
            if i == n {
                SENTINEL
            } else {
                text[i] as Sym
            }
        };

        let sa = build_sa(n_ext, &sym);
        let mut rank = vec![0u32; n_ext];
        for (k, &s) in sa.iter().enumerate() {
            rank[s as usize] = k as u32;
        }
        let lcp = kasai(n_ext, &sym, &sa, &rank);
        let rmq = SparseTable::new(&lcp);

        let mut idx = SuffixIndex {
            text,
            sa,
            rank,
            lcp,
            rmq,
            nodes: Vec::new(),
            kids: Vec::new(),
            child_map: HashMap::new(),
        };
        idx.build_tree();
        idx
    }

    /// Length of the underlying text, without the sentinel.
    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    /// N = text length + 1; the number of suffixes and leaves.
    pub fn len_with_sentinel(&self) -> usize {
        self.text.len() + 1
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    /// Symbol at position `i`, `0 <= i <= n`; position `n` is the sentinel.
    #[inline]
    pub fn sym(&self, i: usize) -> Sym {
        if i == self.text.len() {
            SENTINEL
        } else {
            self.text[i] as Sym
        }
    }

    pub fn sa(&self) -> &[u32] {
        &self.sa
    }

    pub fn rank(&self) -> &[u32] {
        &self.rank
    }

    pub fn lcp_array(&self) -> &[u32] {
        &self.lcp
    }

    /// lcp of the suffixes starting at `i` and `j`, in characters. O(1).
    #[inline]
    pub fn lcp_suffixes(&self, i: usize, j: usize) -> usize {
        let n_ext = self.len_with_sentinel();
        debug_assert!(i < n_ext && j < n_ext);
        if i == j {
            return n_ext - i;
        }
        let (a, b) = {
            let (ra, rb) = (self.rank[i], self.rank[j]);
            if ra < rb {
                (ra, rb)
            } else {
                (rb, ra)
            }
        };
        self.rmq.min(a as usize, b as usize) as usize
    }

    /// Minimum of `lcp[a..b]`; the lcp of any two suffixes whose ranks
    /// span that interval.
    pub(crate) fn lcp_range_min(&self, a: usize, b: usize) -> usize {
        self.rmq.min(a, b) as usize
    }

    // -- tree accessors ----------------------------------------------------

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn parent(&self, v: NodeId) -> NodeId {
        self.nodes[v as usize].parent
    }

    /// String depth of a node. For leaves this is the full suffix length
    /// including the sentinel.
    pub fn depth(&self, v: NodeId) -> usize {
        self.nodes[v as usize].depth as usize
    }

    pub fn interval(&self, v: NodeId) -> (usize, usize) {
        let n = &self.nodes[v as usize];
        (n.lo as usize, n.hi as usize)
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.nodes[v as usize].kids_len == 0
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        let n = &self.nodes[v as usize];
        &self.kids[n.kids_start as usize..(n.kids_start + n.kids_len) as usize]
    }

    pub fn child_by_sym(&self, v: NodeId, c: Sym) -> Option<NodeId> {
        self.child_map.get(&(v, c)).copied()
    }

    /// Leftmost suffix start below `v`; usable as a representative.
    pub fn rep_suffix(&self, v: NodeId) -> usize {
        self.sa[self.nodes[v as usize].lo as usize] as usize
    }

    pub fn position_depth(&self, pos: TreePosition) -> usize {
        match pos {
            TreePosition::Node(v) => self.depth(v),
            TreePosition::OnEdge { child, offset } => {
                self.depth(self.parent(child)) + offset
            }
        }
    }

    pub fn position_interval(&self, pos: TreePosition) -> (usize, usize) {
        match pos {
            TreePosition::Node(v) => self.interval(v),
            TreePosition::OnEdge { child, .. } => self.interval(child),
        }
    }

    /// Walk down from `start` consuming `chars`, comparing against the
    /// text. Returns the final position, or the number of characters
    /// consumed before the first mismatch.
    pub fn locus_descend(
        &self,
        start: TreePosition,
        chars: &[u8],
    ) -> Result<TreePosition, Mismatch> {
        let mut pos = start;
        for (off, &b) in chars.iter().enumerate() {
            let c = b as Sym;
            pos = match pos {
                TreePosition::Node(v) => match self.child_by_sym(v, c) {
                    None => return Err(Mismatch { offset: off }),
                    Some(child) => {
                        let edge_len = self.depth(child) - self.depth(v);
                        if edge_len == 1 {
                            TreePosition::Node(child)
                        } else {
                            TreePosition::OnEdge { child, offset: 1 }
                        }
                    }
                },
                TreePosition::OnEdge { child, offset } => {
                    let base = self.depth(self.parent(child));
                    let edge_char = self.sym(self.rep_suffix(child) + base + offset);
                    if edge_char != c {
                        return Err(Mismatch { offset: off });
                    }
                    if base + offset + 1 == self.depth(child) {
                        TreePosition::Node(child)
                    } else {
                        TreePosition::OnEdge {
                            child,
                            offset: offset + 1,
                        }
                    }
                }
            };
        }
        Ok(pos)
    }

    // -- construction ------------------------------------------------------

    fn build_tree(&mut self) {
        let n_ext = self.len_with_sentinel();
        self.nodes.push(Node {
            parent: 0,
            depth: 0,
            lo: 0,
            hi: n_ext as u32,
            kids_start: 0,
            kids_len: 0,
        });
        // Stack of node ids along the rightmost path, depths strictly
        // increasing.
        let mut stack: Vec<NodeId> = vec![0];

        for k in 0..n_ext {
            if k > 0 {
                let h = self.lcp[k - 1];
                let mut last_popped: Option<NodeId> = None;
                while self.nodes[*stack.last().unwrap() as usize].depth > h {
                    let t = stack.pop().unwrap();
                    self.nodes[t as usize].hi = k as u32;
                    last_popped = Some(t);
                }
                let top = *stack.last().unwrap();
                if self.nodes[top as usize].depth < h {
                    let adopted = last_popped.expect("pop preceded branch creation");
                    let u = self.nodes.len() as NodeId;
                    self.nodes.push(Node {
                        parent: top,
                        depth: h,
                        lo: self.nodes[adopted as usize].lo,
                        hi: 0,
                        kids_start: 0,
                        kids_len: 0,
                    });
                    self.nodes[adopted as usize].parent = u;
                    stack.push(u);
                }
            }
            let top = *stack.last().unwrap();
            let leaf_depth = (n_ext - self.sa[k] as usize) as u32;
            let leaf = self.nodes.len() as NodeId;
            self.nodes.push(Node {
                parent: top,
                depth: leaf_depth,
                lo: k as u32,
                hi: k as u32 + 1,
                kids_start: 0,
                kids_len: 0,
            });
            stack.push(leaf);
        }
        while let Some(t) = stack.pop() {
            if self.nodes[t as usize].hi == 0 {
                self.nodes[t as usize].hi = n_ext as u32;
            }
        }
        self.nodes[0].hi = n_ext as u32;

        // Child lists in suffix-array order, plus the first-symbol map.
        let mut per_parent: Vec<Vec<NodeId>> = vec![Vec::new(); self.nodes.len()];
        for v in 1..self.nodes.len() as NodeId {
            per_parent[self.nodes[v as usize].parent as usize].push(v);
        }
        for v in 0..self.nodes.len() {
            per_parent[v].sort_by_key(|&c| self.nodes[c as usize].lo);
            self.nodes[v].kids_start = self.kids.len() as u32;
            self.nodes[v].kids_len = per_parent[v].len() as u32;
            for &c in &per_parent[v] {
                self.kids.push(c);
                let first = self.sym(
                    self.sa[self.nodes[c as usize].lo as usize] as usize
                        + self.nodes[v].depth as usize,
                );
                self.child_map.insert((v as NodeId, first), c);
            }
        }
    }

    /// Structural invariants; used by index self-checks and tests.
    pub fn check_invariants(&self) {
        let n_ext = self.len_with_sentinel();
        // sa is a permutation in strictly increasing suffix order
        let mut seen = vec![false; n_ext];
        for &s in &self.sa {
            assert!(!seen[s as usize], "sa not a permutation");
            seen[s as usize] = true;
        }
        assert!(self.node_count() <= 2 * n_ext, "node count exceeds 2N");
        let mut leaves = 0;
        for v in 0..self.node_count() as NodeId {
            let (lo, hi) = self.interval(v);
            assert!(lo < hi, "empty interval");
            if self.is_leaf(v) {
                leaves += 1;
                assert_eq!(hi - lo, 1);
            } else {
                assert!(v == 0 || self.children(v).len() >= 2, "unary internal node");
                let mut at = lo;
                for &c in self.children(v) {
                    let (clo, chi) = self.interval(c);
                    assert_eq!(clo, at, "children do not tile the interval");
                    assert!(self.depth(c) > self.depth(v));
                    at = chi;
                }
                assert_eq!(at, hi);
            }
        }
        assert_eq!(leaves, n_ext, "leaf count != N");
    }
}

fn build_sa(n_ext: usize, sym: &impl Fn(usize) -> Sym) -> Vec<u32> {
    let mut sa: Vec<u32> = (0..n_ext as u32).collect();
    let mut rank: Vec<i64> = (0..n_ext).map(|i| sym(i) as i64).collect();
    let mut tmp = vec![0i64; n_ext];
    let mut k = 1;
    loop {
        let key = |i: usize| -> (i64, i64) {
            let second = if i + k < n_ext { rank[i + k] } else { -1 };
            (rank[i], second)
        };
        sa.sort_by(|&a, &b| key(a as usize).cmp(&key(b as usize)));
        tmp[sa[0] as usize] = 0;
        for i in 1..n_ext {
            let d = i64::from(key(sa[i - 1] as usize) < key(sa[i] as usize));
            tmp[sa[i] as usize] = tmp[sa[i - 1] as usize] + d;
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n_ext - 1] as usize] as usize == n_ext - 1 {
            break;
        }
        k *= 2;
    }
    sa
}

fn kasai(n_ext: usize, sym: &impl Fn(usize) -> Sym, sa: &[u32], rank: &[u32]) -> Vec<u32> {
    let mut lcp = vec![0u32; n_ext.saturating_sub(1)];
    let mut h = 0usize;
    for i in 0..n_ext {
        let r = rank[i] as usize;
        if r > 0 {
            let j = sa[r - 1] as usize;
            while i + h < n_ext && j + h < n_ext && sym(i + h) == sym(j + h) {
                h += 1;
            }
            lcp[r - 1] = h as u32;
            if h > 0 {
                h -= 1;
            }
        } else {
            h = 0;
        }
    }
    lcp
}

/// Sparse table for range-minimum over the lcp array.
struct SparseTable {
    levels: Vec<Vec<u32>>,
}

impl SparseTable {
    fn new(data: &[u32]) -> SparseTable {
        let n = data.len();
        let mut levels = vec![data.to_vec()];
        let mut width = 1;
        while 2 * width <= n {
            let prev = levels.last().unwrap();
            let mut next = Vec::with_capacity(n - 2 * width + 1);
            for i in 0..=n - 2 * width {
                next.push(prev[i].min(prev[i + width]));
            }
            levels.push(next);
            width *= 2;
        }
        SparseTable { levels }
    }

    /// Minimum over `data[a..b]`, `a < b`.
    #[inline]
    fn min(&self, a: usize, b: usize) -> u32 {
        debug_assert!(a < b && b <= self.levels[0].len());
        let j = usize::BITS as usize - 1 - (b - a).leading_zeros() as usize;
        self.levels[j][a].min(self.levels[j][b - (1 << j)])
    }
}
