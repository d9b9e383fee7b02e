//! Multigraphs on the vertex set [t], spanning-tree packings, and
//! exhaustive partition-connectivity checks.
//!
//! The packing engine is a matroid-union augmenting-path method in the
//! style of Roskind-Tarjan; an exhaustive backtracking packer doubles as
//! an independent oracle on small graphs. Partition enumeration uses
//! restricted-growth strings, so results are deterministic.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Default cap on the vertex count for partition enumeration
/// (Bell(12) is about 4.2 million).
pub const PARTITION_ENUM_BOUND: usize = 12;

/// One edge of a multigraph: endpoints `1 <= u < v <= t` plus an
/// optional opaque label. Parallel edges are kept distinct by their
/// position in the edge list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "EdgeWire", try_from = "EdgeWire")]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeWire {
    Plain(usize, usize),
    Labeled(usize, usize, String),
}

impl From<Edge> for EdgeWire {
    fn from(e: Edge) -> Self {
        match e.label {
            Some(l) => EdgeWire::Labeled(e.u, e.v, l),
            None => EdgeWire::Plain(e.u, e.v),
        }
    }
}

impl TryFrom<EdgeWire> for Edge {
    type Error = String;
    fn try_from(w: EdgeWire) -> std::result::Result<Edge, String> {
        let (u, v, label) = match w {
            EdgeWire::Plain(u, v) => (u, v, None),
            EdgeWire::Labeled(u, v, l) => (u, v, Some(l)),
        };
        if u == v {
            return Err(format!("self-loop at vertex {u}"));
        }
        Ok(Edge {
            u: u.min(v),
            v: u.max(v),
            label,
        })
    }
}

/// A multigraph on vertices `1..=t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiGraph {
    pub t: usize,
    pub edges: Vec<Edge>,
}

impl MultiGraph {
    /// Builds a multigraph, normalizing each edge to `u < v`.
    pub fn new(t: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let edges = edges
            .iter()
            .map(|&(u, v)| {
                if u == v || u == 0 || v == 0 || u > t || v > t {
                    return Err(Error::InvalidInput(format!(
                        "edge ({u},{v}) is not a pair of distinct vertices in [{t}]"
                    )));
                }
                Ok(Edge {
                    u: u.min(v),
                    v: u.max(v),
                    label: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiGraph { t, edges })
    }

    pub fn validate(&self) -> Result<()> {
        for e in &self.edges {
            if e.u == 0 || e.v == 0 || e.u >= e.v || e.v > self.t {
                return Err(Error::InvalidInput(format!(
                    "edge ({},{}) out of range for t={}",
                    e.u, e.v, self.t
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: MultiGraph =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }
}

/// A partition of [t] in canonical form: blocks ordered by their
/// smallest element, elements sorted within each block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Canonicalizes and validates disjointness and coverage of [t].
    pub fn new(t: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut seen = vec![false; t + 1];
        let mut count = 0;
        for b in blocks {
            if b.is_empty() {
                return Err(Error::InvalidInput("empty partition block".into()));
            }
            for &x in b {
                if x == 0 || x > t || seen[x] {
                    return Err(Error::InvalidInput(format!(
                        "element {x} missing from [t] or repeated"
                    )));
                }
                seen[x] = true;
                count += 1;
            }
        }
        if count != t {
            return Err(Error::InvalidInput(format!(
                "blocks cover {count} of {t} elements"
            )));
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort_by_key(|b| b[0]);
        Ok(Partition { blocks })
    }

    /// Builds a partition from a restricted-growth string over `0..blocks`.
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let nblocks = rgs.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); nblocks];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        Partition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// The restricted-growth string of this partition (block id per element).
    pub fn rgs(&self) -> Vec<usize> {
        let t: usize = self.blocks.iter().map(|b| b.len()).sum();
        let mut rgs = vec![0; t];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &x in b {
                rgs[x - 1] = bi;
            }
        }
        rgs
    }
}

/// Visits every partition of [t] as a restricted-growth string
/// (`rgs[i]` = block of vertex `i+1`). The callback receives the string
/// and the block count; returning `false` aborts the enumeration.
/// Returns `true` iff the enumeration ran to completion.
pub fn for_each_partition_rgs<F: FnMut(&[usize], usize) -> bool>(t: usize, mut f: F) -> bool {
    if t == 0 {
        return true;
    }
    let mut a = vec![0usize; t];
    loop {
        let nblocks = a.iter().copied().max().unwrap() + 1;
        if !f(&a, nblocks) {
            return false;
        }
        // Advance to the next restricted-growth string.
        let mut i = t;
        loop {
            if i <= 1 {
                return true; // wrapped: enumeration complete
            }
            i -= 1;
            let prefix_max = a[..i].iter().copied().max().unwrap();
            if a[i] <= prefix_max {
                a[i] += 1;
                for x in &mut a[i + 1..] {
                    *x = 0;
                }
                break;
            }
        }
    }
}

/// All partitions of [t], in restricted-growth order.
pub fn partitions(t: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    for_each_partition_rgs(t, |rgs, _| {
        out.push(Partition::from_rgs(rgs));
        true
    });
    out
}

/// Number of edges whose endpoints lie in different blocks.
pub fn cross_edges(g: &MultiGraph, p: &Partition) -> usize {
    let rgs = p.rgs();
    g.edges
        .iter()
        .filter(|e| rgs[e.u - 1] != rgs[e.v - 1])
        .count()
}

/// Checks k-partition-connectivity by exhausting all partitions:
/// every partition P must have at least `k (|P| - 1)` cross-edges.
pub fn is_partition_connected(g: &MultiGraph, k: usize) -> Result<bool> {
    is_partition_connected_with_bound(g, k, PARTITION_ENUM_BOUND)
}

/// Same as [`is_partition_connected`] with an explicit enumeration bound.
pub fn is_partition_connected_with_bound(g: &MultiGraph, k: usize, bound: usize) -> Result<bool> {
    if g.t == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.t > bound {
        return Err(Error::TooLarge {
            what: format!("t={}", g.t),
            limit: bound as u64,
        });
    }
    let mut ok = true;
    for_each_partition_rgs(g.t, |rgs, nblocks| {
        if nblocks < 2 {
            return true;
        }
        let cross = g
            .edges
            .iter()
            .filter(|e| rgs[e.u - 1] != rgs[e.v - 1])
            .count();
        if cross < k * (nblocks - 1) {
            ok = false;
            return false;
        }
        true
    });
    Ok(ok)
}

/// A collection of k pairwise edge-disjoint spanning trees, each given
/// as a set of indices into the source graph's edge list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePacking {
    pub trees: Vec<Vec<usize>>,
}

/// Independent verification of a packing: disjointness, and per tree
/// acyclicity + connectivity + coverage via union-find.
pub fn verify_packing(g: &MultiGraph, packing: &TreePacking, k: usize) -> bool {
    if packing.trees.len() != k {
        return false;
    }
    let mut used = vec![false; g.edges.len()];
    for tree in &packing.trees {
        if tree.len() != g.t.saturating_sub(1) {
            return false;
        }
        let mut dsu = Dsu::new(g.t);
        for &ei in tree {
            if ei >= g.edges.len() || used[ei] {
                return false;
            }
            used[ei] = true;
            let e = &g.edges[ei];
            if !dsu.union(e.u - 1, e.v - 1) {
                return false; // cycle
            }
        }
        if g.t > 0 && dsu.components() != 1 {
            return false;
        }
    }
    true
}

struct Dsu {
    parent: Vec<usize>,
    comps: usize,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
            comps: n,
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let r = self.find(self.parent[x]);
            self.parent[x] = r;
        }
        self.parent[x]
    }

    /// Returns false if x and y were already connected.
    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        self.parent[rx] = ry;
        self.comps -= 1;
        true
    }

    fn components(&self) -> usize {
        self.comps
    }
}

/// Finds k pairwise edge-disjoint spanning trees, or `None` when no
/// packing exists (which, by Nash-Williams-Tutte, happens exactly when
/// some partition has fewer than `k (|P|-1)` cross-edges).
pub fn tree_packing(g: &MultiGraph, k: usize) -> Result<Option<TreePacking>> {
    if g.t == 0 {
        return Err(Error::EmptyGraph);
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if g.t == 1 {
        return Ok(Some(TreePacking {
            trees: vec![Vec::new(); k],
        }));
    }
    let m = g.edges.len();
    if m < k * (g.t - 1) {
        return Ok(None);
    }

    // Matroid-union augmentation: grow k edge-disjoint forests one edge
    // at a time; an exchange-graph BFS finds a reassignment sequence
    // whenever the next edge does not fit directly.
    let mut assignment: Vec<Option<usize>> = vec![None; m];
    let mut placed = 0usize;
    for e0 in 0..m {
        let mut parent: Vec<usize> = vec![usize::MAX; m];
        let mut labeled = vec![false; m];
        labeled[e0] = true;
        let mut queue = VecDeque::new();
        queue.push_back(e0);
        let mut found: Option<(usize, usize)> = None;
        'bfs: while let Some(e) = queue.pop_front() {
            for j in 0..k {
                if assignment[e] == Some(j) {
                    continue;
                }
                match forest_path(g, &assignment, j, g.edges[e].u, g.edges[e].v) {
                    None => {
                        found = Some((e, j));
                        break 'bfs;
                    }
                    Some(path) => {
                        for f in path {
                            if !labeled[f] {
                                labeled[f] = true;
                                parent[f] = e;
                                queue.push_back(f);
                            }
                        }
                    }
                }
            }
        }
        if let Some((mut cur, mut target)) = found {
            loop {
                let prev = assignment[cur];
                assignment[cur] = Some(target);
                if cur == e0 {
                    break;
                }
                target = prev.expect("every displaced edge was assigned");
                cur = parent[cur];
            }
            placed += 1;
            if placed == k * (g.t - 1) {
                break;
            }
        }
    }

    if placed < k * (g.t - 1) {
        return Ok(None);
    }
    let mut trees = vec![Vec::new(); k];
    for (e, a) in assignment.iter().enumerate() {
        if let Some(j) = *a {
            trees[j].push(e);
        }
    }
    let packing = TreePacking { trees };
    debug_assert!(verify_packing(g, &packing, k));
    Ok(Some(packing))
}

/// Edge path between `u` and `v` inside forest `j`, or `None` when the
/// endpoints lie in different components.
fn forest_path(
    g: &MultiGraph,
    assignment: &[Option<usize>],
    j: usize,
    u: usize,
    v: usize,
) -> Option<Vec<usize>> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.t];
    for (ei, a) in assignment.iter().enumerate() {
        if *a == Some(j) {
            let e = &g.edges[ei];
            adj[e.u - 1].push((e.v - 1, ei));
            adj[e.v - 1].push((e.u - 1, ei));
        }
    }
    let (s, d) = (u - 1, v - 1);
    let mut via: Vec<Option<(usize, usize)>> = vec![None; g.t];
    let mut seen = vec![false; g.t];
    seen[s] = true;
    let mut queue = VecDeque::new();
    queue.push_back(s);
    while let Some(x) = queue.pop_front() {
        if x == d {
            let mut path = Vec::new();
            let mut cur = d;
            while cur != s {
                let (prev, ei) = via[cur].unwrap();
                path.push(ei);
                cur = prev;
            }
            return Some(path);
        }
        for &(y, ei) in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                via[y] = Some((x, ei));
                queue.push_back(y);
            }
        }
    }
    None
}

/// Exhaustive backtracking packer; independent oracle for small graphs.
pub fn tree_packing_exhaustive(g: &MultiGraph, k: usize) -> Result<Option<TreePacking>> {
    if g.t == 0 {
        return Err(Error::EmptyGraph);
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if g.t == 1 {
        return Ok(Some(TreePacking {
            trees: vec![Vec::new(); k],
        }));
    }
    let need = g.t - 1;
    let m = g.edges.len();
    if m < k * need {
        return Ok(None);
    }
    let mut trees: Vec<Vec<usize>> = vec![Vec::new(); k];

    fn recurse(
        g: &MultiGraph,
        k: usize,
        need: usize,
        next: usize,
        trees: &mut Vec<Vec<usize>>,
    ) -> bool {
        let placed: usize = trees.iter().map(|t| t.len()).sum();
        if placed == k * need {
            return true;
        }
        let remaining = g.edges.len() - next;
        if placed + remaining < k * need {
            return false;
        }
        if next == g.edges.len() {
            return false;
        }
        // Try the edge in each unsaturated forest where it keeps acyclicity.
        for j in 0..k {
            if trees[j].len() == need {
                continue;
            }
            let mut dsu = Dsu::new(g.t);
            let mut ok = true;
            for &ei in trees[j].iter() {
                dsu.union(g.edges[ei].u - 1, g.edges[ei].v - 1);
            }
            if !dsu.union(g.edges[next].u - 1, g.edges[next].v - 1) {
                ok = false;
            }
            if ok {
                trees[j].push(next);
                if recurse(g, k, need, next + 1, trees) {
                    return true;
                }
                trees[j].pop();
            }
            // Skip identical sibling forests (all empty forests are equivalent).
            if trees[j].is_empty() {
                break;
            }
        }
        // Leave the edge unused.
        recurse(g, k, need, next + 1, trees)
    }

    if recurse(g, k, need, 0, &mut trees) {
        let packing = TreePacking { trees };
        debug_assert!(verify_packing(g, &packing, k));
        Ok(Some(packing))
    } else {
        Ok(None)
    }
}
