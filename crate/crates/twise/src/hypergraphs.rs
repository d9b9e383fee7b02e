//! Hypergraphs on [t]: weak partition connectivity, tree-assignments,
//! signatures of tree-decompositions, k-distinguishability, and the
//! randomized connected-subhypergraph routines.

use crate::error::{Error, Result};
use crate::graphs::{for_each_partition_rgs, PARTITION_ENUM_BOUND};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// Default cap on the number of tree-assignments enumerated.
pub const ASSIGNMENT_BUDGET: u64 = 1 << 20;
/// Default cap on the number of k-tree-decompositions enumerated.
pub const DECOMPOSITION_BUDGET: u64 = 1 << 22;
/// Vertex-subset scan bound for the weight-form connectivity condition.
pub const SUBSET_SCAN_BOUND: usize = 20;

/// A hypergraph on vertices `1..=t` with multiset edge semantics:
/// repeated edges are kept distinct by their list position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub t: usize,
    pub edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a hypergraph; edges are sorted and checked to be nonempty
    /// subsets of [t].
    pub fn new(t: usize, edges: &[Vec<usize>]) -> Result<Self> {
        let mut out = Vec::with_capacity(edges.len());
        for e in edges {
            let mut e = e.clone();
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(Error::InvalidInput("empty hyperedge".into()));
            }
            if e[0] == 0 || *e.last().unwrap() > t {
                return Err(Error::InvalidInput(format!(
                    "hyperedge {e:?} is not a subset of [{t}]"
                )));
            }
            out.push(e);
        }
        Ok(Hypergraph { t, edges: out })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: Hypergraph =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Hypergraph::new(raw.t, &raw.edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypergraph serializes")
    }

    /// Sub-hypergraph induced by a list of edge indices, on all t vertices.
    pub fn restrict_to_edges(&self, indices: &[usize]) -> Hypergraph {
        Hypergraph {
            t: self.t,
            edges: indices.iter().map(|&i| self.edges[i].clone()).collect(),
        }
    }
}

/// Number of connected components: equivalence classes of vertices under
/// shared-edge reachability. Isolated vertices count.
pub fn connected_components(h: &Hypergraph) -> usize {
    let mut parent: Vec<usize> = (0..h.t).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let mut comps = h.t;
    for e in &h.edges {
        for w in e.windows(2) {
            let (a, b) = (find(&mut parent, w[0] - 1), find(&mut parent, w[1] - 1));
            if a != b {
                parent[a] = b;
                comps -= 1;
            }
        }
    }
    comps
}

/// Largest k such that every partition P of [t] satisfies
/// `sum_e (P(e) - 1) >= k (|P| - 1)`; equals 0 for disconnected inputs.
pub fn weak_partition_connectivity(h: &Hypergraph) -> Result<usize> {
    if h.t < 2 {
        return Err(Error::InvalidInput(
            "weak partition connectivity needs t >= 2".into(),
        ));
    }
    if h.t > PARTITION_ENUM_BOUND {
        return Err(Error::TooLarge {
            what: format!("t={}", h.t),
            limit: PARTITION_ENUM_BOUND as u64,
        });
    }
    let mut best = usize::MAX;
    for_each_partition_rgs(h.t, |rgs, nblocks| {
        if nblocks < 2 {
            return true;
        }
        let total: usize = h
            .edges
            .iter()
            .map(|e| {
                let mut mask = 0u64;
                for &v in e {
                    mask |= 1 << rgs[v - 1];
                }
                (mask.count_ones() as usize) - 1
            })
            .sum();
        best = best.min(total / (nblocks - 1));
        best > 0 // once 0, no partition can lower it further
    });
    Ok(best)
}

/// Weight-form sufficient condition for k-weak-partition-connectivity:
/// `sum_e max(0, |e cap J| - 1) <= k (|J| - 1)` for every nonempty
/// proper subset J, together with `sum_e (|e| - 1) >= k (t - 1)`.
pub fn sufficient_weak_connectivity(h: &Hypergraph, k: usize) -> Result<bool> {
    if h.t > SUBSET_SCAN_BOUND {
        return Err(Error::TooLarge {
            what: format!("t={}", h.t),
            limit: SUBSET_SCAN_BOUND as u64,
        });
    }
    let total: usize = h.edges.iter().map(|e| e.len() - 1).sum();
    if total < k * (h.t.saturating_sub(1)) {
        return Ok(false);
    }
    let masks: Vec<u64> = h
        .edges
        .iter()
        .map(|e| e.iter().fold(0u64, |m, &v| m | (1 << (v - 1))))
        .collect();
    let full: u64 = if h.t == 64 { u64::MAX } else { (1 << h.t) - 1 };
    for j in 1..full {
        let size = j.count_ones() as usize;
        let sum: usize = masks
            .iter()
            .map(|&m| ((m & j).count_ones() as usize).saturating_sub(1))
            .sum();
        if sum > k * (size - 1) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// An edge of a labeled graph; the label is a hyperedge index into the
/// source hypergraph's edge list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledEdge {
    pub u: usize,
    pub v: usize,
    pub label: usize,
}

/// A multigraph on [t] whose edges carry hyperedge-index labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledGraph {
    pub t: usize,
    pub edges: Vec<LabeledEdge>,
}

impl LabeledGraph {
    /// Distinct labels present, sorted.
    pub fn labels(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.edges.iter().map(|e| e.label).collect();
        l.sort_unstable();
        l.dedup();
        l
    }

    /// Sub-multigraph given by edge indices.
    pub fn subgraph(&self, indices: &[usize]) -> LabeledGraph {
        LabeledGraph {
            t: self.t,
            edges: indices.iter().map(|&i| self.edges[i]).collect(),
        }
    }
}

/// An ordered k-tuple of pairwise disjoint edge-index sets, each forming
/// a spanning tree of the underlying labeled graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub trees: Vec<Vec<usize>>,
}

/// The index-weighted label-count vector of a tree-decomposition:
/// label e maps to `sum_i i * (number of e-labeled edges in T_i)`.
/// Every label of the source graph appears, possibly with weight 0.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Signature(pub BTreeMap<usize, u64>);

/// Computes the signature of a decomposition. The trees must partition
/// the edge list of `g` (each edge index used exactly once).
pub fn signature_of(g: &LabeledGraph, d: &TreeDecomposition) -> Result<Signature> {
    let mut used = vec![false; g.edges.len()];
    for tree in &d.trees {
        for &ei in tree {
            if ei >= g.edges.len() || used[ei] {
                return Err(Error::NotADecomposition(format!(
                    "edge index {ei} repeated or out of range"
                )));
            }
            used[ei] = true;
        }
    }
    if used.iter().any(|&u| !u) {
        return Err(Error::NotADecomposition(
            "some edges are not covered by the trees".into(),
        ));
    }
    let mut sig: BTreeMap<usize, u64> = g.labels().into_iter().map(|l| (l, 0)).collect();
    for (i, tree) in d.trees.iter().enumerate() {
        for &ei in tree {
            *sig.get_mut(&g.edges[ei].label).unwrap() += i as u64;
        }
    }
    Ok(Signature(sig))
}

/// True iff every label's edges are confined to a single tree of the
/// decomposition. A true result guarantees k-distinguishability.
pub fn label_disjoint_decomposition_check(g: &LabeledGraph, d: &TreeDecomposition) -> bool {
    let mut home: HashMap<usize, usize> = HashMap::new();
    for (i, tree) in d.trees.iter().enumerate() {
        for &ei in tree {
            match home.insert(g.edges[ei].label, i) {
                Some(prev) if prev != i => return false,
                _ => {}
            }
        }
    }
    true
}

fn is_spanning_tree(t: usize, edges: &[(usize, usize)]) -> bool {
    if edges.len() + 1 != t {
        return false;
    }
    let mut parent: Vec<usize> = (0..t).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u - 1), find(&mut parent, v - 1));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Enumerates all ordered k-tree-decompositions of `g`, invoking the
/// visitor on each. Requires exactly `k (t - 1)` edges.
fn for_each_decomposition<F: FnMut(&TreeDecomposition)>(
    g: &LabeledGraph,
    k: usize,
    budget: u64,
    visitor: &mut F,
) -> Result<()> {
    let need = g.t - 1;
    fn rec<F: FnMut(&TreeDecomposition)>(
        g: &LabeledGraph,
        k: usize,
        need: usize,
        remaining: &[usize],
        acc: &mut Vec<Vec<usize>>,
        visited: &mut u64,
        budget: u64,
        visitor: &mut F,
    ) -> Result<()> {
        if acc.len() == k {
            *visited += 1;
            if *visited > budget {
                return Err(Error::SearchBudgetExceeded(budget));
            }
            visitor(&TreeDecomposition { trees: acc.clone() });
            return Ok(());
        }
        // Choose the next tree: every `need`-subset of the remaining
        // edges that forms a spanning tree.
        let mut subset: Vec<usize> = Vec::with_capacity(need);
        choose(
            g, k, need, remaining, 0, &mut subset, acc, visited, budget, visitor,
        )
    }
    #[allow(clippy::too_many_arguments)]
    fn choose<F: FnMut(&TreeDecomposition)>(
        g: &LabeledGraph,
        k: usize,
        need: usize,
        remaining: &[usize],
        start: usize,
        subset: &mut Vec<usize>,
        acc: &mut Vec<Vec<usize>>,
        visited: &mut u64,
        budget: u64,
        visitor: &mut F,
    ) -> Result<()> {
        if subset.len() == need {
            let edges: Vec<(usize, usize)> = subset
                .iter()
                .map(|&i| (g.edges[i].u, g.edges[i].v))
                .collect();
            if is_spanning_tree(g.t, &edges) {
                let rest: Vec<usize> = remaining
                    .iter()
                    .copied()
                    .filter(|i| !subset.contains(i))
                    .collect();
                acc.push(subset.clone());
                rec(g, k, need, &rest, acc, visited, budget, visitor)?;
                acc.pop();
            }
            return Ok(());
        }
        for pos in start..remaining.len() {
            if remaining.len() - pos < need - subset.len() {
                break;
            }
            subset.push(remaining[pos]);
            choose(
                g,
                k,
                need,
                remaining,
                pos + 1,
                subset,
                acc,
                visited,
                budget,
                visitor,
            )?;
            subset.pop();
        }
        Ok(())
    }
    let all: Vec<usize> = (0..g.edges.len()).collect();
    let mut acc = Vec::new();
    let mut visited = 0u64;
    rec(g, k, need, &all, &mut acc, &mut visited, budget, visitor)
}

/// Decides k-distinguishability by exhausting all ordered
/// k-tree-decompositions. On success the witness is the first
/// decomposition (in enumeration order) whose signature is unique.
pub fn is_k_distinguishable(
    g: &LabeledGraph,
    k: usize,
) -> Result<(bool, Option<TreeDecomposition>)> {
    is_k_distinguishable_with_budget(g, k, DECOMPOSITION_BUDGET)
}

pub fn is_k_distinguishable_with_budget(
    g: &LabeledGraph,
    k: usize,
    budget: u64,
) -> Result<(bool, Option<TreeDecomposition>)> {
    if g.t == 0 {
        return Err(Error::EmptyGraph);
    }
    let expected = k * (g.t - 1);
    if g.edges.len() != expected {
        return Err(Error::EdgeCountMismatch {
            expected,
            got: g.edges.len(),
        });
    }
    let mut counts: HashMap<Signature, u64> = HashMap::new();
    let mut in_order: Vec<(Signature, TreeDecomposition)> = Vec::new();
    for_each_decomposition(g, k, budget, &mut |d| {
        let sig = signature_of(g, d).expect("enumerated decompositions are valid");
        *counts.entry(sig.clone()).or_insert(0) += 1;
        in_order.push((sig, d.clone()));
    })?;
    for (sig, d) in &in_order {
        if counts[sig] == 1 {
            return Ok((true, Some(d.clone())));
        }
    }
    Ok((false, None))
}

/// The replacement options for one hyperedge: all `|e|-1`-subsets of the
/// pairs on its vertex set, optionally restricted to spanning trees (of
/// which a vertex set of size s has s^(s-2)).
fn subgraph_choices(verts: &[usize], trees_only: bool) -> Vec<Vec<(usize, usize)>> {
    let s = verts.len();
    if s == 1 {
        return vec![Vec::new()];
    }
    let mut pairs = Vec::new();
    for i in 0..s {
        for j in i + 1..s {
            pairs.push((verts[i], verts[j]));
        }
    }
    let mut out = Vec::new();
    let mut pick = Vec::with_capacity(s - 1);
    fn rec(
        pairs: &[(usize, usize)],
        start: usize,
        need: usize,
        verts: &[usize],
        trees_only: bool,
        pick: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if pick.len() == need {
            if !trees_only || is_tree_on(verts, pick) {
                out.push(pick.clone());
            }
            return;
        }
        for pos in start..pairs.len() {
            if pairs.len() - pos < need - pick.len() {
                break;
            }
            pick.push(pairs[pos]);
            rec(pairs, pos + 1, need, verts, trees_only, pick, out);
            pick.pop();
        }
    }
    rec(&pairs, 0, s - 1, verts, trees_only, &mut pick, &mut out);
    out
}

fn is_tree_on(verts: &[usize], edges: &[(usize, usize)]) -> bool {
    let index: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, index[&u]), find(&mut parent, index[&v]));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Streaming enumeration of tree-assignments of `h`: each hyperedge e is
/// replaced by a graph on `|e| - 1` edges over the vertices of e, labeled
/// by the hyperedge index. With `trees_only`, each replacement must be a
/// spanning tree of e's vertex set; otherwise any `|e| - 1` of the
/// possible pairs are allowed.
pub fn tree_assignments(h: &Hypergraph, trees_only: bool) -> Result<TreeAssignments> {
    tree_assignments_with_budget(h, trees_only, ASSIGNMENT_BUDGET)
}

pub fn tree_assignments_with_budget(
    h: &Hypergraph,
    trees_only: bool,
    budget: u64,
) -> Result<TreeAssignments> {
    let mut choices = Vec::with_capacity(h.edges.len());
    let mut total: u64 = 1;
    for e in &h.edges {
        let c = subgraph_choices(e, trees_only);
        total = total.saturating_mul(c.len() as u64);
        if total > budget {
            return Err(Error::SearchBudgetExceeded(budget));
        }
        choices.push(c);
    }
    Ok(TreeAssignments {
        t: h.t,
        choices,
        cursor: Vec::new(),
        done: false,
    })
}

pub struct TreeAssignments {
    t: usize,
    choices: Vec<Vec<Vec<(usize, usize)>>>,
    cursor: Vec<usize>,
    done: bool,
}

impl Iterator for TreeAssignments {
    type Item = LabeledGraph;

    fn next(&mut self) -> Option<LabeledGraph> {
        if self.done {
            return None;
        }
        if self.cursor.is_empty() {
            self.cursor = vec![0; self.choices.len()];
        } else {
            // Odometer increment.
            let mut i = self.choices.len();
            loop {
                if i == 0 {
                    self.done = true;
                    return None;
                }
                i -= 1;
                if self.cursor[i] + 1 < self.choices[i].len() {
                    self.cursor[i] += 1;
                    for c in &mut self.cursor[i + 1..] {
                        *c = 0;
                    }
                    break;
                }
            }
        }
        let mut edges = Vec::new();
        for (label, (choice, options)) in self.cursor.iter().zip(&self.choices).enumerate() {
            for &(u, v) in &options[*choice] {
                edges.push(LabeledEdge {
                    u: u.min(v),
                    v: u.max(v),
                    label,
                });
            }
        }
        Some(LabeledGraph {
            t: self.t,
            edges,
        })
    }
}

/// Samples `m` edges (with or without replacement) and reports whether
/// the sampled sub-hypergraph is connected on all t vertices.
pub fn random_connected_subhypergraph<R: Rng + ?Sized>(
    h: &Hypergraph,
    m: usize,
    with_replacement: bool,
    rng: &mut R,
) -> Result<(Hypergraph, bool)> {
    let indices: Vec<usize> = if with_replacement {
        (0..m).map(|_| rng.gen_range(0..h.edges.len())).collect()
    } else {
        if m > h.edges.len() {
            return Err(Error::InvalidInput(format!(
                "cannot sample {m} of {} edges without replacement",
                h.edges.len()
            )));
        }
        let mut all: Vec<usize> = (0..h.edges.len()).collect();
        all.shuffle(rng);
        all.truncate(m);
        all
    };
    let sub = h.restrict_to_edges(&indices);
    let connected = connected_components(&sub) == 1;
    Ok((sub, connected))
}

/// Randomized partition into groups of `floor(|E| / g)` edges each,
/// keeping the connected groups; retries until k edge-disjoint connected
/// sub-hypergraphs are found or the budget runs out. Even retries use
/// g = 2k groups (the analyzed scheme, which succeeds in expectation at
/// high connectivity); odd retries coarsen to g = k groups so that small
/// instances can return themselves. Returns the groups as sorted lists
/// of edge indices.
pub fn disjoint_connected_subhypergraphs<R: Rng + ?Sized>(
    h: &Hypergraph,
    k: usize,
    max_retries: usize,
    rng: &mut R,
) -> Result<Option<Vec<Vec<usize>>>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    if h.edges.len() < k {
        return Ok(None);
    }
    if h.t >= 2 && h.t <= PARTITION_ENUM_BOUND {
        let needed = 6.0 * (h.t as f64).log2() * k as f64;
        let wpc = weak_partition_connectivity(h)?;
        if (wpc as f64) < needed {
            log::warn!(
                "weak partition connectivity {wpc} is below 6 k log t = {needed:.1}; \
                 the random partition may fail often"
            );
        }
    }
    for retry in 0..max_retries {
        let mut groups = if retry % 2 == 0 { 2 * k } else { k };
        let mut m = h.edges.len() / groups;
        if m == 0 {
            m = 1;
            groups = h.edges.len();
        }
        let mut all: Vec<usize> = (0..h.edges.len()).collect();
        all.shuffle(rng);
        let mut connected_groups = Vec::new();
        for g in 0..groups {
            let group = &all[g * m..(g + 1) * m];
            let sub = h.restrict_to_edges(group);
            if connected_components(&sub) == 1 {
                let mut group = group.to_vec();
                group.sort_unstable();
                connected_groups.push(group);
                if connected_groups.len() == k {
                    return Ok(Some(connected_groups));
                }
            }
        }
    }
    Ok(None)
}

/// Constructive route to a k-distinguishable subgraph: split the
/// hypergraph into k edge-disjoint connected sub-hypergraphs, replace
/// each hyperedge by a spanning tree (a star at its smallest vertex),
/// and take one spanning tree per group. The resulting k(t-1)-edge graph
/// has a label-disjoint decomposition and is therefore k-distinguishable.
pub fn distinguishable_via_disjoint_subhypergraphs<R: Rng + ?Sized>(
    h: &Hypergraph,
    k: usize,
    max_retries: usize,
    rng: &mut R,
) -> Result<Option<(LabeledGraph, TreeDecomposition)>> {
    let Some(groups) = disjoint_connected_subhypergraphs(h, k, max_retries, rng)? else {
        return Ok(None);
    };
    let mut edges: Vec<LabeledEdge> = Vec::new();
    let mut trees: Vec<Vec<usize>> = Vec::new();
    for group in &groups {
        // Star tree-assignment of this group.
        let mut group_edges: Vec<LabeledEdge> = Vec::new();
        for &label in group {
            let e = &h.edges[label];
            let center = e[0];
            for &v in &e[1..] {
                group_edges.push(LabeledEdge {
                    u: center.min(v),
                    v: center.max(v),
                    label,
                });
            }
        }
        // Spanning tree of the assignment by first-fit over edge order.
        let mut parent: Vec<usize> = (0..h.t).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        let mut tree = Vec::new();
        for ge in &group_edges {
            let (a, b) = (find(&mut parent, ge.u - 1), find(&mut parent, ge.v - 1));
            if a != b {
                parent[a] = b;
                tree.push(edges.len());
                edges.push(*ge);
            }
        }
        if tree.len() != h.t - 1 {
            // The group was connected, so its star assignment spans; this
            // cannot happen for valid inputs.
            return Err(Error::InvalidInput(
                "connected group produced a non-spanning assignment".into(),
            ));
        }
        trees.push(tree);
    }
    let g = LabeledGraph { t: h.t, edges };
    let d = TreeDecomposition { trees };
    debug_assert!(label_disjoint_decomposition_check(&g, &d));
    Ok(Some((g, d)))
}

/// Searches the k(t-1)-edge subgraphs of `g` for a k-distinguishable
/// one. Subsets that do not even pack k spanning trees are pruned; when
/// the subset's labels are pairwise distinct, any packing is already a
/// unique-signature witness, so the decomposition enumeration is skipped.
pub fn find_distinguishable_subgraph(
    g: &LabeledGraph,
    k: usize,
    subset_budget: u64,
    decomposition_budget: u64,
) -> Result<Option<(Vec<usize>, TreeDecomposition)>> {
    if g.t == 0 {
        return Err(Error::EmptyGraph);
    }
    let need = k * (g.t - 1);
    if g.edges.len() < need {
        return Ok(None);
    }
    let mut subset: Vec<usize> = (0..need).collect();
    let mut visited = 0u64;
    loop {
        visited += 1;
        if visited > subset_budget {
            return Err(Error::SearchBudgetExceeded(subset_budget));
        }
        let sub = g.subgraph(&subset);
        let plain: Vec<(usize, usize)> = sub.edges.iter().map(|e| (e.u, e.v)).collect();
        let mg = crate::graphs::MultiGraph::new(g.t, &plain)?;
        if let Some(packing) = crate::graphs::tree_packing(&mg, k)? {
            let labels: Vec<usize> = sub.edges.iter().map(|e| e.label).collect();
            let distinct = {
                let mut l = labels.clone();
                l.sort_unstable();
                l.dedup();
                l.len() == labels.len()
            };
            if distinct {
                // Unique labels: every decomposition has a distinct
                // signature, so this packing is a witness.
                return Ok(Some((
                    subset.clone(),
                    TreeDecomposition {
                        trees: packing.trees,
                    },
                )));
            }
            let (ok, witness) = is_k_distinguishable_with_budget(&sub, k, decomposition_budget)?;
            if ok {
                return Ok(Some((subset.clone(), witness.unwrap())));
            }
        }
        // Next lexicographic subset.
        let mut i = need;
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            if subset[i] + 1 <= g.edges.len() - (need - i) {
                subset[i] += 1;
                for j in i + 1..need {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The hypergraph of the worked 2-weakly-partition-connected example:
/// edges {1,2,3}, {1,3,4}, {1,2,4} on four vertices.
#[cfg(test)]
pub(crate) fn three_triangles() -> Hypergraph {
    Hypergraph::new(4, &[vec![1, 2, 3], vec![1, 3, 4], vec![1, 2, 4]]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// The worked example's tree-assignment: each hyperedge becomes the
    /// path through vertex 1, giving a six-edge multistar.
    fn star_assignment() -> LabeledGraph {
        LabeledGraph {
            t: 4,
            edges: vec![
                LabeledEdge { u: 1, v: 2, label: 0 },
                LabeledEdge { u: 1, v: 3, label: 0 },
                LabeledEdge { u: 1, v: 3, label: 1 },
                LabeledEdge { u: 1, v: 4, label: 1 },
                LabeledEdge { u: 1, v: 2, label: 2 },
                LabeledEdge { u: 1, v: 4, label: 2 },
            ],
        }
    }

    #[test]
    fn full_edge_has_connectivity_one() {
        let h = Hypergraph::new(5, &[vec![1, 2, 3, 4, 5]]).unwrap();
        assert_eq!(weak_partition_connectivity(&h).unwrap(), 1);
    }

    #[test]
    fn example_hypergraph_is_2_weakly_partition_connected() {
        assert_eq!(weak_partition_connectivity(&three_triangles()).unwrap(), 2);
    }

    #[test]
    fn edgeless_hypergraph_has_connectivity_zero() {
        let h = Hypergraph::new(3, &[]).unwrap();
        assert_eq!(weak_partition_connectivity(&h).unwrap(), 0);
    }

    #[test]
    fn component_counts() {
        let h = Hypergraph::new(4, &[]).unwrap();
        assert_eq!(connected_components(&h), 4);
        let h = Hypergraph::new(4, &[vec![1, 2, 3, 4]]).unwrap();
        assert_eq!(connected_components(&h), 1);
        let h = Hypergraph::new(4, &[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(connected_components(&h), 2);
    }

    #[test]
    fn assignment_counts_follow_cayley() {
        // Size-2 edge: exactly one replacement.
        let h = Hypergraph::new(3, &[vec![1, 2]]).unwrap();
        assert_eq!(tree_assignments(&h, true).unwrap().count(), 1);
        // Size-3 edge: 3 spanning trees, and 3 arbitrary 2-subsets.
        let h = Hypergraph::new(3, &[vec![1, 2, 3]]).unwrap();
        assert_eq!(tree_assignments(&h, true).unwrap().count(), 3);
        assert_eq!(tree_assignments(&h, false).unwrap().count(), 3);
        // Size-4 edge: Cayley gives 4^2 = 16 trees out of C(6,3) = 20 subsets.
        let h = Hypergraph::new(4, &[vec![1, 2, 3, 4]]).unwrap();
        assert_eq!(tree_assignments(&h, true).unwrap().count(), 16);
        assert_eq!(tree_assignments(&h, false).unwrap().count(), 20);
    }

    #[test]
    fn example_signature_is_0_1_2() {
        let g = star_assignment();
        // T_0 = both green edges plus orange {1,4}; T_1 = the rest.
        let d = TreeDecomposition {
            trees: vec![vec![0, 1, 3], vec![2, 4, 5]],
        };
        let sig = signature_of(&g, &d).unwrap();
        let expect: BTreeMap<usize, u64> = [(0, 0), (1, 1), (2, 2)].into_iter().collect();
        assert_eq!(sig, Signature(expect));
        // Swapping the trees reweights the labels the other way.
        let swapped = TreeDecomposition {
            trees: vec![vec![2, 4, 5], vec![0, 1, 3]],
        };
        let sig = signature_of(&g, &swapped).unwrap();
        let expect: BTreeMap<usize, u64> = [(0, 2), (1, 1), (2, 0)].into_iter().collect();
        assert_eq!(sig, Signature(expect));
    }

    #[test]
    fn single_tree_signature_is_zero() {
        let g = LabeledGraph {
            t: 3,
            edges: vec![
                LabeledEdge { u: 1, v: 2, label: 0 },
                LabeledEdge { u: 2, v: 3, label: 1 },
            ],
        };
        let d = TreeDecomposition {
            trees: vec![vec![0, 1]],
        };
        let sig = signature_of(&g, &d).unwrap();
        assert!(sig.0.values().all(|&w| w == 0));
        // k = 1: the only decomposition, hence distinguishable.
        let (ok, witness) = is_k_distinguishable(&g, 1).unwrap();
        assert!(ok);
        assert_eq!(witness.unwrap(), d);
    }

    #[test]
    fn non_partition_is_rejected() {
        let g = star_assignment();
        let d = TreeDecomposition {
            trees: vec![vec![0, 1, 3], vec![2, 4, 4]],
        };
        assert!(matches!(
            signature_of(&g, &d),
            Err(Error::NotADecomposition(_))
        ));
    }

    #[test]
    fn example_graph_is_2_distinguishable() {
        let g = star_assignment();
        let (ok, witness) = is_k_distinguishable(&g, 2).unwrap();
        assert!(ok);
        let w = witness.unwrap();
        let sig = signature_of(&g, &w).unwrap();
        // The witness signature occurs exactly once among all 8
        // decompositions of the multistar.
        let mut count = 0;
        for_each_decomposition(&g, 2, 1 << 20, &mut |d| {
            if signature_of(&g, d).unwrap() == sig {
                count += 1;
            }
        })
        .unwrap();
        assert_eq!(count, 1);
    }

    #[test]
    fn example_decomposition_is_not_label_disjoint() {
        let g = star_assignment();
        let d = TreeDecomposition {
            trees: vec![vec![0, 1, 3], vec![2, 4, 5]],
        };
        // Orange (label 1) appears in both trees.
        assert!(!label_disjoint_decomposition_check(&g, &d));
        // Any single-tree decomposition is label-disjoint.
        let g1 = LabeledGraph {
            t: 3,
            edges: vec![
                LabeledEdge { u: 1, v: 2, label: 0 },
                LabeledEdge { u: 2, v: 3, label: 0 },
            ],
        };
        let d1 = TreeDecomposition {
            trees: vec![vec![0, 1]],
        };
        assert!(label_disjoint_decomposition_check(&g1, &d1));
    }

    #[test]
    fn distinct_labels_with_packing_are_distinguishable() {
        // All labels distinct: every decomposition has a distinct signature.
        let g = LabeledGraph {
            t: 3,
            edges: vec![
                LabeledEdge { u: 1, v: 2, label: 0 },
                LabeledEdge { u: 1, v: 3, label: 1 },
                LabeledEdge { u: 2, v: 3, label: 2 },
                LabeledEdge { u: 1, v: 2, label: 3 },
            ],
        };
        let (ok, _) = is_k_distinguishable(&g, 2).unwrap();
        assert!(ok);
    }

    #[test]
    fn edge_count_mismatch_reported() {
        let g = star_assignment();
        assert!(matches!(
            is_k_distinguishable(&g, 1),
            Err(Error::EdgeCountMismatch { .. })
        ));
    }

    #[test]
    fn sampling_whole_hypergraph_keeps_connectivity() {
        let h = three_triangles();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (sub, connected) =
            random_connected_subhypergraph(&h, h.edges.len(), false, &mut rng).unwrap();
        assert_eq!(sub.edges.len(), h.edges.len());
        assert!(connected);
        let (_, connected) = random_connected_subhypergraph(&h, 0, false, &mut rng).unwrap();
        assert!(!connected);
    }

    #[test]
    fn disjoint_groups_from_disjoint_copies() {
        // k disjoint copies of the full edge: the k copies come back.
        let h = Hypergraph::new(3, &[vec![1, 2, 3], vec![1, 2, 3]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let groups = disjoint_connected_subhypergraphs(&h, 2, 16, &mut rng)
            .unwrap()
            .unwrap();
        assert_eq!(groups.len(), 2);
        let mut all: Vec<usize> = groups.concat();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1]);
    }

    #[test]
    fn example_hypergraph_gives_single_connected_group() {
        let h = three_triangles();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let groups = disjoint_connected_subhypergraphs(&h, 1, 16, &mut rng)
            .unwrap()
            .unwrap();
        assert_eq!(groups.len(), 1);
        let sub = h.restrict_to_edges(&groups[0]);
        assert_eq!(connected_components(&sub), 1);
    }

    #[test]
    fn sufficient_condition_examples() {
        let h = Hypergraph::new(4, &[vec![1, 2, 3, 4]]).unwrap();
        assert!(sufficient_weak_connectivity(&h, 1).unwrap());
        let empty = Hypergraph::new(4, &[]).unwrap();
        assert!(!sufficient_weak_connectivity(&empty, 1).unwrap());
    }

    #[test]
    fn sufficient_condition_implies_weak_connectivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut implications = 0;
        for _ in 0..500 {
            let t = rng.gen_range(2..=6usize);
            let m = rng.gen_range(0..=6usize);
            let edges: Vec<Vec<usize>> = (0..m)
                .map(|_| {
                    let size = rng.gen_range(1..=t);
                    let mut all: Vec<usize> = (1..=t).collect();
                    all.shuffle(&mut rng);
                    all.truncate(size);
                    all
                })
                .collect();
            let h = Hypergraph::new(t, &edges).unwrap();
            for k in 1..=3 {
                if sufficient_weak_connectivity(&h, k).unwrap() {
                    implications += 1;
                    assert!(weak_partition_connectivity(&h).unwrap() >= k);
                }
            }
        }
        assert!(implications > 0, "test never exercised the implication");
    }

    #[test]
    fn high_connectivity_route_succeeds_quickly() {
        // At connectivity 6 k ceil(log2 t) the random partition finds k
        // connected groups within 32 retries in at least 95 of 100 runs.
        let (t, k) = (5usize, 2usize);
        let c = 6 * (t as f64).log2().ceil() as usize;
        let edges: Vec<Vec<usize>> = (0..c * k).map(|_| (1..=t).collect()).collect();
        let h = Hypergraph::new(t, &edges).unwrap();
        assert!(weak_partition_connectivity(&h).unwrap() >= c * k);
        let mut ok = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if disjoint_connected_subhypergraphs(&h, k, 32, &mut rng)
                .unwrap()
                .is_some()
            {
                ok += 1;
            }
        }
        assert!(ok >= 95, "only {ok}/100 runs succeeded within 32 retries");
    }

    #[test]
    fn label_disjoint_implies_distinguishable_exhaustively() {
        // For every labeled graph on t <= 5 with k <= 2 built from random
        // assignments: a label-disjoint decomposition forces a positive
        // distinguishability verdict.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut checked = 0;
        for _ in 0..300 {
            let t = rng.gen_range(2..=5usize);
            let k = rng.gen_range(1..=2usize);
            let m = k * (t - 1);
            let labels = rng.gen_range(1..=m);
            let edges: Vec<LabeledEdge> = (0..m)
                .map(|_| {
                    let u = rng.gen_range(1..=t);
                    let mut v = rng.gen_range(1..=t);
                    while v == u {
                        v = rng.gen_range(1..=t);
                    }
                    LabeledEdge {
                        u: u.min(v),
                        v: u.max(v),
                        label: rng.gen_range(0..labels),
                    }
                })
                .collect();
            let g = LabeledGraph { t, edges };
            // Find any label-disjoint decomposition by brute force.
            let mut found: Option<TreeDecomposition> = None;
            let _ = for_each_decomposition(&g, k, 1 << 16, &mut |d| {
                if found.is_none() && label_disjoint_decomposition_check(&g, d) {
                    found = Some(d.clone());
                }
            });
            if found.is_some() {
                checked += 1;
                assert!(is_k_distinguishable(&g, k).unwrap().0);
            }
        }
        assert!(checked > 20);
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"t":4,"edges":[[1,2,3],[1,3,4],[1,2,4]]}"#;
        let h = Hypergraph::from_json(s).unwrap();
        assert_eq!(h, three_triangles());
        assert_eq!(Hypergraph::from_json(&h.to_json()).unwrap(), h);
    }
}
