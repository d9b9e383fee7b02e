//! Cycle-space basis, set-system weights, t-wise intersection matrices,
//! nonsingularity testing and certification, and the kernel-vector check.
//!
//! Symbolic entries are stored structurally (variable index plus
//! exponent); nothing ever expands a symbolic determinant. Nonsingularity
//! is established either by a tree-packing monomial certificate or by
//! randomized evaluation, and refuted only probabilistically.

use crate::error::{Error, Result};
use crate::fields::{FieldElement, FieldSpec};
use crate::graphs::{tree_packing, MultiGraph, TreePacking};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Subset-scan guard for weight-condition checks.
pub const SUBSET_CHECK_BOUND: usize = 20;

// ---------------------------------------------------------------------------
// Pair ordering
// ---------------------------------------------------------------------------

/// All 2-subsets of [t] in the max-then-min lexicographic order:
/// {i,j} < {i',j'} iff max < max', or max = max' and min < min'.
/// Every row/column indexing in this module flows from this one order.
pub fn pair_order(t: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(t * (t - 1) / 2);
    for j in 2..=t {
        for i in 1..j {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Rank of the pair {i, j} (i < j) in [`pair_order`].
pub fn pair_rank(i: usize, j: usize) -> usize {
    debug_assert!(0 < i && i < j);
    (j - 1) * (j - 2) / 2 + (i - 1)
}

fn choose2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

// ---------------------------------------------------------------------------
// Set systems
// ---------------------------------------------------------------------------

/// A layered family of agreement sets: for each set index `i` in [t] and
/// layer `r` in [l], a subset of the ground set [n]. The working set
/// I_i is the union of its layers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystem {
    pub n: usize,
    pub t: usize,
    pub l: usize,
    /// `layers[i-1][r-1]` is the r-th layer of set i, sorted.
    pub layers: Vec<Vec<Vec<usize>>>,
}

impl SetSystem {
    pub fn new(n: usize, t: usize, layers: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if layers.len() != t {
            return Err(Error::InvalidInput(format!(
                "expected {t} sets, got {}",
                layers.len()
            )));
        }
        let l = layers.first().map_or(1, |s| s.len());
        if l == 0 {
            return Err(Error::InvalidInput("layer count must be positive".into()));
        }
        let mut canon = Vec::with_capacity(t);
        for per_set in &layers {
            if per_set.len() != l {
                return Err(Error::InvalidInput(
                    "all sets must have the same layer count".into(),
                ));
            }
            let mut set_layers = Vec::with_capacity(l);
            for layer in per_set {
                let mut layer = layer.clone();
                layer.sort_unstable();
                layer.dedup();
                if layer.iter().any(|&x| x == 0 || x > n) {
                    return Err(Error::InvalidInput(format!(
                        "layer {layer:?} is not a subset of [{n}]"
                    )));
                }
                set_layers.push(layer);
            }
            canon.push(set_layers);
        }
        Ok(SetSystem {
            n,
            t,
            l,
            layers: canon,
        })
    }

    /// Single-layer system from plain sets.
    pub fn single_layer(n: usize, sets: &[Vec<usize>]) -> Result<Self> {
        SetSystem::new(n, sets.len(), sets.iter().map(|s| vec![s.clone()]).collect())
    }

    /// System defined by element memberships: `t_sets[j]` lists the
    /// (1-based) set indices containing ground element j+1.
    pub fn from_memberships(t: usize, t_sets: &[Vec<usize>]) -> Result<Self> {
        let n = t_sets.len();
        let mut sets = vec![Vec::new(); t];
        for (j, owners) in t_sets.iter().enumerate() {
            for &i in owners {
                if i == 0 || i > t {
                    return Err(Error::InvalidInput(format!("set index {i} out of [t]")));
                }
                sets[i - 1].push(j + 1);
            }
        }
        SetSystem::single_layer(n, &sets)
    }

    /// I_i: the union of the layers of set `i` (1-based), sorted.
    pub fn set(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.layers[i - 1].iter().flatten().copied().collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// S_j = { i in [t] : j in I_i }.
    pub fn owners(&self, j: usize) -> Vec<usize> {
        (1..=self.t)
            .filter(|&i| self.layers[i - 1].iter().any(|layer| layer.contains(&j)))
            .collect()
    }

    /// S_j^{(r)} = { i in [t] : j in I_i^{(r)} }.
    pub fn owners_in_layer(&self, j: usize, r: usize) -> Vec<usize> {
        (1..=self.t)
            .filter(|&i| self.layers[i - 1][r - 1].contains(&j))
            .collect()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: SetSystem =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let sys = SetSystem::new(raw.n, raw.t, raw.layers)?;
        if sys.l != raw.l {
            return Err(Error::InvalidInput(format!(
                "declared l={} but layers have length {}",
                raw.l, sys.l
            )));
        }
        Ok(sys)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("set system serializes")
    }
}

/// wt(I_J) = sum_{i in J} |I_i| - |union_{i in J} I_i| for nonempty J.
pub fn weight(s: &SetSystem, j_set: &[usize]) -> Result<u64> {
    if j_set.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    let mut total = 0u64;
    let mut union: BTreeSet<usize> = BTreeSet::new();
    for &i in j_set {
        let set = s.set(i);
        total += set.len() as u64;
        union.extend(set);
    }
    Ok(total - union.len() as u64)
}

/// wt_l(I_J) = sum_j max(|S_j cap J| - l, 0).
pub fn generalized_weight(s: &SetSystem, j_set: &[usize], ell: usize) -> u64 {
    let j_set: BTreeSet<usize> = j_set.iter().copied().collect();
    (1..=s.n)
        .map(|j| {
            let hits = s.owners(j).iter().filter(|i| j_set.contains(i)).count();
            hits.saturating_sub(ell) as u64
        })
        .sum()
}

// ---------------------------------------------------------------------------
// Cycle basis
// ---------------------------------------------------------------------------

/// The oriented-triangle basis of the cycle space of K_t, as a
/// C(t-1,2) x C(t,2) matrix with entries in {-1, 0, +1}. Row {i,j}
/// (i < j <= t-1) is the indicator of the oriented triangle through
/// i, j, t: +1 at column {i,j}, +1 at {j,t}, -1 at {i,t}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleBasis {
    pub t: usize,
    rows: Vec<Vec<i8>>,
}

pub fn cycle_basis(t: usize) -> Result<CycleBasis> {
    if t < 3 {
        return Err(Error::TooSmall(t));
    }
    let cols = choose2(t);
    let row_pairs = pair_order(t - 1);
    let mut rows = Vec::with_capacity(row_pairs.len());
    for &(i, j) in &row_pairs {
        let mut row = vec![0i8; cols];
        row[pair_rank(i, j)] = 1;
        row[pair_rank(j, t)] = 1;
        row[pair_rank(i, t)] = -1;
        rows.push(row);
    }
    Ok(CycleBasis { t, rows })
}

impl CycleBasis {
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        choose2(self.t)
    }

    pub fn entry(&self, row: usize, col: usize) -> i8 {
        self.rows[row][col]
    }

    pub fn as_rows(&self) -> &[Vec<i8>] {
        &self.rows
    }
}

/// Exact rank of an integer matrix by fraction-free elimination with
/// first-nonzero pivoting. Entry growth is bounded by minors, so i128
/// is ample for the matrices handled here.
pub fn integer_rank(mut m: Vec<Vec<i128>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0usize;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(pivot_row) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let piv = m[rank][c];
        for r in rank + 1..rows {
            let factor = m[r][c];
            for cc in c + 1..cols {
                let num = piv * m[r][cc] - factor * m[rank][cc];
                debug_assert_eq!(num % prev, 0, "fraction-free step must divide exactly");
                m[r][cc] = num / prev;
            }
            m[r][c] = 0;
        }
        prev = piv;
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// True iff deleting the given pair-labeled columns from B_t preserves
/// its full row rank C(t-1,2) -- equivalently, iff the deleted columns
/// are labeled by an acyclic subgraph of K_t.
pub fn column_removal_rank_test(b: &CycleBasis, removed: &[(usize, usize)]) -> bool {
    let removed: BTreeSet<usize> = removed
        .iter()
        .map(|&(i, j)| pair_rank(i.min(j), i.max(j)))
        .collect();
    let kept: Vec<usize> = (0..b.cols()).filter(|c| !removed.contains(c)).collect();
    let mat: Vec<Vec<i128>> = b
        .as_rows()
        .iter()
        .map(|row| kept.iter().map(|&c| row[c] as i128).collect())
        .collect();
    integer_rank(mat) == b.rows()
}

// ---------------------------------------------------------------------------
// Intersection matrices
// ---------------------------------------------------------------------------

/// A single symbolic entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entry {
    Zero,
    Const(i8),
    /// x_var ^ exp (exp may be 0, in which case the entry evaluates to 1).
    Var { var: usize, exp: usize },
}

/// The t-wise intersection matrix of the sets indexed by `j_set`,
/// stored structurally: the top block is `B_s (x) I_k` (constants) and
/// each bottom row is a Vandermonde row in one variable. The permuted
/// form M' is exposed as a view over the same data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionMatrix {
    pub k: usize,
    /// Original 1-based set indices, sorted ascending.
    pub j_set: Vec<usize>,
    /// For each pair rank over the relabeled index set [s], the sorted
    /// variable indices in the corresponding pairwise intersection.
    pub pair_vars: Vec<Vec<usize>>,
}

/// Builds the intersection matrix for `(I_i : i in j_set)` (duplicate
/// indices are ignored; at least two are required).
pub fn build(s: &SetSystem, j_set: &[usize], k: usize) -> Result<IntersectionMatrix> {
    let j_set: BTreeSet<usize> = j_set.iter().copied().collect();
    if j_set.len() < 2 {
        return Err(Error::InvalidInput(
            "an intersection matrix needs at least two sets".into(),
        ));
    }
    if let Some(&bad) = j_set.iter().find(|&&i| i == 0 || i > s.t) {
        return Err(Error::InvalidInput(format!("set index {bad} out of [t]")));
    }
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let j_set: Vec<usize> = j_set.into_iter().collect();
    let sets: Vec<BTreeSet<usize>> = j_set
        .iter()
        .map(|&i| s.set(i).into_iter().collect())
        .collect();
    let mut pair_vars = Vec::with_capacity(choose2(j_set.len()));
    for (a, b) in pair_order(j_set.len()) {
        let inter: Vec<usize> = sets[a - 1].intersection(&sets[b - 1]).copied().collect();
        pair_vars.push(inter);
    }
    Ok(IntersectionMatrix {
        k,
        j_set,
        pair_vars,
    })
}

impl IntersectionMatrix {
    /// Number of participating sets (the matrix is `s`-wise).
    pub fn s(&self) -> usize {
        self.j_set.len()
    }

    pub fn top_rows(&self) -> usize {
        choose2(self.s() - 1) * self.k
    }

    pub fn bottom_row_count(&self) -> usize {
        self.pair_vars.iter().map(|v| v.len()).sum()
    }

    pub fn rows(&self) -> usize {
        self.top_rows() + self.bottom_row_count()
    }

    pub fn cols(&self) -> usize {
        choose2(self.s()) * self.k
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Bound on the total degree of any maximal minor:
    /// each of the (s-1)k bottom rows contributes at most k-1.
    pub fn total_degree(&self) -> u64 {
        ((self.s() - 1) * self.k * (self.k - 1)) as u64
    }

    /// Sorted distinct variable indices appearing in the matrix.
    pub fn variables(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pair_vars.iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Bottom row descriptors in row order: (pair rank, variable).
    /// Rows follow the lexicographic pair order, variables ascending
    /// within each pair.
    pub fn bottom_rows(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.bottom_row_count());
        for (p, vars) in self.pair_vars.iter().enumerate() {
            for &v in vars {
                out.push((p, v));
            }
        }
        out
    }

    fn basis(&self) -> Option<CycleBasis> {
        if self.s() >= 3 {
            Some(cycle_basis(self.s()).expect("s >= 3"))
        } else {
            None
        }
    }

    /// Entry in the standard layout: columns grouped by pair (k columns
    /// per pair, powers 0..k within the group).
    pub fn entry(&self, row: usize, col: usize) -> Entry {
        let (p, b) = (col / self.k, col % self.k);
        if row < self.top_rows() {
            let (r, a) = (row / self.k, row % self.k);
            if a != b {
                return Entry::Zero;
            }
            let c = self.basis().map_or(0, |basis| basis.entry(r, p));
            if c == 0 {
                Entry::Zero
            } else {
                Entry::Const(c)
            }
        } else {
            let (pair, var) = self.bottom_rows()[row - self.top_rows()];
            if pair == p {
                Entry::Var { var, exp: b }
            } else {
                Entry::Zero
            }
        }
    }

    /// Entry in the permuted layout M': columns grouped by power
    /// (C(s,2) columns per power), top block `I_k (x) B_s`. The bottom
    /// rows are the same rows as in the standard layout; each one shows
    /// its k nonzero entries x_s^0, ..., x_s^{k-1} spread over the k
    /// column groups of its pair.
    pub fn entry_permuted(&self, row: usize, col: usize) -> Entry {
        let npairs = choose2(self.s());
        let (b, p) = (col / npairs, col % npairs);
        if row < self.top_rows() {
            let nbasis = choose2(self.s() - 1);
            let (a, r) = (row / nbasis, row % nbasis);
            if a != b {
                return Entry::Zero;
            }
            let c = self.basis().map_or(0, |basis| basis.entry(r, p));
            if c == 0 {
                Entry::Zero
            } else {
                Entry::Const(c)
            }
        } else {
            let (pair, var) = self.bottom_rows()[row - self.top_rows()];
            if pair == p {
                Entry::Var { var, exp: b }
            } else {
                Entry::Zero
            }
        }
    }

    /// Dense evaluation at a vector with n coordinates (standard layout).
    pub fn evaluate(&self, spec: FieldSpec, alpha: &[FieldElement]) -> Vec<Vec<FieldElement>> {
        self.evaluate_layout(spec, alpha, false)
    }

    /// Dense evaluation in the permuted layout.
    pub fn evaluate_permuted(
        &self,
        spec: FieldSpec,
        alpha: &[FieldElement],
    ) -> Vec<Vec<FieldElement>> {
        self.evaluate_layout(spec, alpha, true)
    }

    fn evaluate_layout(
        &self,
        spec: FieldSpec,
        alpha: &[FieldElement],
        permuted: bool,
    ) -> Vec<Vec<FieldElement>> {
        let (rows, cols) = (self.rows(), self.cols());
        let k = self.k;
        let npairs = choose2(self.s());
        let nbasis = choose2(self.s() - 1);
        let basis = self.basis();
        let minus_one = spec.neg(spec.one());
        let mut out = vec![vec![spec.zero(); cols]; rows];

        // Top block: B_s (x) I_k, or I_k (x) B_s in the permuted layout.
        if let Some(basis) = &basis {
            for a in 0..k {
                for (r, brow) in basis.as_rows().iter().enumerate() {
                    let row = if permuted { a * nbasis + r } else { r * k + a };
                    for (p, &v) in brow.iter().enumerate() {
                        if v != 0 {
                            let col = if permuted { a * npairs + p } else { p * k + a };
                            out[row][col] = if v == 1 { spec.one() } else { minus_one };
                        }
                    }
                }
            }
        }

        // Bottom block: one Vandermonde row per (pair, variable), its k
        // powers contiguous per pair or spread across the power groups.
        let top = self.top_rows();
        let mut row = top;
        for (p, vars) in self.pair_vars.iter().enumerate() {
            for &v in vars {
                let mut power = spec.one();
                for b in 0..k {
                    let col = if permuted { b * npairs + p } else { p * k + b };
                    out[row][col] = power;
                    power = spec.mul(power, alpha[v - 1]);
                }
                row += 1;
            }
        }
        out
    }

    /// Coordinate-list dump: variable entries as (row, col, sign, var,
    /// exp) plus the constant top-block entries.
    pub fn to_dump(&self) -> MatrixDump {
        let mut constants = Vec::new();
        let mut variables = Vec::new();
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                match self.entry(r, c) {
                    Entry::Zero => {}
                    Entry::Const(v) => constants.push((r, c, v)),
                    Entry::Var { var, exp } => variables.push((r, c, 1i8, var, exp)),
                }
            }
        }
        MatrixDump {
            k: self.k,
            j_set: self.j_set.clone(),
            rows: self.rows(),
            cols: self.cols(),
            constants,
            variables,
        }
    }
}

/// Serializable coordinate-list form of an intersection matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDump {
    pub k: usize,
    pub j_set: Vec<usize>,
    pub rows: usize,
    pub cols: usize,
    /// Constant entries (row, col, sign).
    pub constants: Vec<(usize, usize, i8)>,
    /// Variable entries (row, col, sign, var, exp).
    pub variables: Vec<(usize, usize, i8, usize, usize)>,
}

/// Rank over F_p by Gaussian elimination with first-nonzero pivoting.
pub fn rank_mod_p(spec: FieldSpec, mut m: Vec<Vec<FieldElement>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0usize;
    for c in 0..cols {
        let Some(pivot_row) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let inv = spec.inv(m[rank][c]).expect("pivot is nonzero");
        for cc in c..cols {
            m[rank][cc] = spec.mul(m[rank][cc], inv);
        }
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c];
                for cc in c..cols {
                    let sub = spec.mul(f, m[rank][cc]);
                    m[r][cc] = spec.sub(m[r][cc], sub);
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Verdict of the randomized nonsingularity test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    /// Some evaluation reached full column rank; the witness vector is
    /// the n field values assigned to x_1..x_n.
    Nonsingular { witness: Vec<u64>, trials_used: usize },
    /// Every trial was rank-deficient. If the matrix were nonsingular,
    /// the chance of that is at most `false_negative_bound`.
    ProbablySingular {
        trials: usize,
        false_negative_bound: f64,
    },
}

impl Verdict {
    pub fn is_nonsingular(&self) -> bool {
        matches!(self, Verdict::Nonsingular { .. })
    }
}

/// Randomized nonsingularity: a variable matrix is nonsingular iff some
/// maximal square submatrix has a nonzero determinant polynomial, so a
/// full-column-rank evaluation at any point is a proof. Rank-deficient
/// evaluations at `trials` independent uniform points bound the failure
/// probability by (d/p)^trials.
pub fn nonsingular_randomized<R: Rng + ?Sized>(
    m: &IntersectionMatrix,
    spec: FieldSpec,
    trials: usize,
    max_var: usize,
    rng: &mut R,
) -> Verdict {
    if m.rows() < m.cols() {
        // Too few rows: singular regardless of evaluation.
        return Verdict::ProbablySingular {
            trials: 0,
            false_negative_bound: 0.0,
        };
    }
    let d = m.total_degree();
    let ratio = d as f64 / spec.modulus() as f64;
    if ratio > 0.01 {
        log::warn!(
            "field size {} is not much larger than the degree bound {d}; \
             the per-trial failure bound {ratio:.3} is weak",
            spec.modulus()
        );
    }
    for trial in 0..trials {
        let alpha: Vec<FieldElement> = (0..max_var).map(|_| spec.sample(rng)).collect();
        let eval = m.evaluate(spec, &alpha);
        if rank_mod_p(spec, eval) == m.cols() {
            return Verdict::Nonsingular {
                witness: alpha.iter().map(|e| e.value()).collect(),
                trials_used: trial + 1,
            };
        }
    }
    Verdict::ProbablySingular {
        trials,
        false_negative_bound: ratio.min(1.0).powi(trials as i32),
    }
}

// ---------------------------------------------------------------------------
// Tree-packing certificate
// ---------------------------------------------------------------------------

/// A constructive nonsingularity certificate: an edge-variable bijection
/// on the pairwise-intersection multigraph, a k-tree packing of it, and
/// the monomial (variable -> exponent) it selects in the determinant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PackingCertificate {
    /// Multigraph on [s] with |I_i cap I_j| parallel edges per pair.
    pub graph: MultiGraph,
    /// Variable carried by each edge (indexed like `graph.edges`).
    pub edge_vars: Vec<usize>,
    pub packing: TreePacking,
    /// The certified monomial m(x): variable -> positive exponent.
    /// Variables picked by tree T_0 carry exponent 0 and are omitted.
    pub monomial: BTreeMap<usize, usize>,
}

/// Checks conditions (i) empty triple intersections, (ii) subset weight
/// bounds, (iii) exact total weight, then produces the certificate.
pub fn certify_nonsingular_treepack(
    s: &SetSystem,
    j_set: &[usize],
    k: usize,
) -> Result<PackingCertificate> {
    let j_set: Vec<usize> = {
        let set: BTreeSet<usize> = j_set.iter().copied().collect();
        set.into_iter().collect()
    };
    let sz = j_set.len();
    if sz < 2 {
        return Err(Error::InvalidInput(
            "certification needs at least two sets".into(),
        ));
    }
    if sz > SUBSET_CHECK_BOUND {
        return Err(Error::TooLarge {
            what: format!("|J|={sz}"),
            limit: SUBSET_CHECK_BOUND as u64,
        });
    }
    let sets: Vec<BTreeSet<usize>> = j_set
        .iter()
        .map(|&i| s.set(i).into_iter().collect())
        .collect();

    // (i) Empty triple intersections.
    for a in 0..sz {
        for b in a + 1..sz {
            for c in b + 1..sz {
                if let Some(x) = sets[a]
                    .iter()
                    .find(|x| sets[b].contains(x) && sets[c].contains(x))
                {
                    return Err(Error::PreconditionFailed {
                        condition: "(i)".into(),
                        detail: format!(
                            "element {x} lies in I_{}, I_{} and I_{}",
                            j_set[a],
                            j_set[b],
                            j_set[c]
                        ),
                    });
                }
            }
        }
    }

    // (ii) wt(I_J') <= (|J'|-1) k for every nonempty J', and
    // (iii) equality for the full index set.
    for mask in 1u64..(1 << sz) {
        let sub: Vec<usize> = (0..sz)
            .filter(|&a| mask >> a & 1 == 1)
            .map(|a| j_set[a])
            .collect();
        let w = weight(s, &sub)?;
        let bound = ((sub.len() - 1) * k) as u64;
        if w > bound {
            return Err(Error::PreconditionFailed {
                condition: "(ii)".into(),
                detail: format!("wt(I_J') = {w} > {bound} for J' = {sub:?}"),
            });
        }
        if sub.len() == sz && w < bound {
            return Err(Error::PreconditionFailed {
                condition: "(iii)".into(),
                detail: format!("wt(I_J) = {w} < {bound}"),
            });
        }
    }

    // Pairwise-intersection multigraph with the edge-variable bijection.
    let mut edges = Vec::new();
    let mut edge_vars = Vec::new();
    for (a, b) in pair_order(sz) {
        for x in sets[a - 1].intersection(&sets[b - 1]) {
            edges.push((a, b));
            edge_vars.push(*x);
        }
    }
    let graph = MultiGraph::new(sz, &edges)?;
    let packing = tree_packing(&graph, k)?
        .expect("conditions (ii)+(iii) make the graph k-partition-connected");

    // Cross-validation: the columns removed per tree leave B_s full-rank.
    if sz >= 3 {
        let basis = cycle_basis(sz)?;
        for tree in &packing.trees {
            let removed: Vec<(usize, usize)> = tree
                .iter()
                .map(|&e| (graph.edges[e].u, graph.edges[e].v))
                .collect();
            assert!(
                column_removal_rank_test(&basis, &removed),
                "spanning tree columns must preserve the basis rank"
            );
        }
    }

    let mut monomial = BTreeMap::new();
    for (i, tree) in packing.trees.iter().enumerate() {
        if i == 0 {
            continue;
        }
        for &e in tree {
            monomial.insert(edge_vars[e], i);
        }
    }
    Ok(PackingCertificate {
        graph,
        edge_vars,
        packing,
        monomial,
    })
}

// ---------------------------------------------------------------------------
// Kernel-vector check
// ---------------------------------------------------------------------------

/// Matrix-vector product over F_p.
pub fn mat_vec(
    spec: FieldSpec,
    m: &[Vec<FieldElement>],
    v: &[FieldElement],
) -> Vec<FieldElement> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(spec.zero(), |acc, (&a, &b)| spec.add(acc, spec.mul(a, b)))
        })
        .collect()
}

/// Forms u = (f_i - f_j : pairs of J in lexicographic order), verifies
/// M(alpha) u^T = 0 exactly, and reports whether u is nonzero. The
/// layered sets must be honest agreement sets: every shared element of a
/// pairwise intersection must actually see the two polynomials agree.
pub fn kernel_vector_check(
    spec: FieldSpec,
    polys: &[Vec<FieldElement>],
    s: &SetSystem,
    j_set: &[usize],
    alpha: &[FieldElement],
) -> Result<bool> {
    let j_sorted: Vec<usize> = {
        let set: BTreeSet<usize> = j_set.iter().copied().collect();
        set.into_iter().collect()
    };
    if polys.len() != j_sorted.len() {
        return Err(Error::InvalidInput(format!(
            "{} polynomials for {} sets",
            polys.len(),
            j_sorted.len()
        )));
    }
    let k = polys.first().map_or(0, |p| p.len());
    if k == 0 || polys.iter().any(|p| p.len() != k) {
        return Err(Error::InvalidInput(
            "polynomials must share a positive length k".into(),
        ));
    }
    if alpha.len() != s.n {
        return Err(Error::InvalidInput(format!(
            "alpha has {} coordinates, expected n={}",
            alpha.len(),
            s.n
        )));
    }

    // Honesty of the agreement sets.
    for a in 0..j_sorted.len() {
        for b in a + 1..j_sorted.len() {
            let sa: BTreeSet<usize> = s.set(j_sorted[a]).into_iter().collect();
            let sb: BTreeSet<usize> = s.set(j_sorted[b]).into_iter().collect();
            for &x in sa.intersection(&sb) {
                let fa = spec.eval_poly(&polys[a], alpha[x - 1]);
                let fb = spec.eval_poly(&polys[b], alpha[x - 1]);
                if fa != fb {
                    return Err(Error::AgreementMismatch(format!(
                        "element {x} is shared by I_{} and I_{} but the polynomials \
                         disagree there ({} vs {})",
                        j_sorted[a], j_sorted[b], fa, fb
                    )));
                }
            }
        }
    }

    let m = build(s, &j_sorted, k)?;
    let u = pair_difference_vector(spec, polys, j_sorted.len());
    let eval = m.evaluate(spec, alpha);
    let product = mat_vec(spec, &eval, &u);
    if product.iter().any(|e| !e.is_zero()) {
        return Err(Error::AgreementMismatch(
            "evaluated matrix-vector product is nonzero".into(),
        ));
    }
    Ok(u.iter().any(|e| !e.is_zero()))
}

/// The concatenated difference vector (f_a - f_b : pairs in
/// lexicographic order), length C(s,2) k.
pub fn pair_difference_vector(
    spec: FieldSpec,
    polys: &[Vec<FieldElement>],
    s: usize,
) -> Vec<FieldElement> {
    let k = polys[0].len();
    let mut u = Vec::with_capacity(choose2(s) * k);
    for (a, b) in pair_order(s) {
        for c in 0..k {
            u.push(spec.sub(polys[a - 1][c], polys[b - 1][c]));
        }
    }
    u
}

// ---------------------------------------------------------------------------
// Transversal criterion
// ---------------------------------------------------------------------------

/// A partial transversal of the bottom rows of M': one power (= column
/// group) chosen per bottom row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transversal {
    /// `powers[r]` is the exponent chosen in bottom row r.
    pub powers: Vec<usize>,
}

/// For a square instance in the permuted layout, removes the bottom rows
/// and their chosen columns and tests det(M_Q) != 0 by exact integer
/// rank. This holds iff the per-power label graphs Q_0..Q_{k-1} form
/// pairwise edge-disjoint spanning trees.
pub fn transversal_criterion_check(m: &IntersectionMatrix, q: &Transversal) -> Result<bool> {
    let bottom = m.bottom_rows();
    if !m.is_square() {
        return Err(Error::NotATransversal(
            "criterion applies to square instances only".into(),
        ));
    }
    if q.powers.len() != bottom.len() {
        return Err(Error::NotATransversal(format!(
            "{} powers for {} bottom rows",
            q.powers.len(),
            bottom.len()
        )));
    }
    let npairs = choose2(m.s());
    let mut chosen_cols = BTreeSet::new();
    for (r, &(pair, _)) in bottom.iter().enumerate() {
        let b = q.powers[r];
        if b >= m.k {
            return Err(Error::NotATransversal(format!(
                "power {b} out of range in row {r}"
            )));
        }
        // Column of x_var^b in the permuted layout.
        if !chosen_cols.insert(b * npairs + pair) {
            return Err(Error::NotATransversal(format!(
                "two rows share the column for power {b} of pair rank {pair}"
            )));
        }
    }
    let kept: Vec<usize> = (0..m.cols())
        .filter(|c| !chosen_cols.contains(c))
        .collect();
    let mat: Vec<Vec<i128>> = (0..m.top_rows())
        .map(|r| {
            kept.iter()
                .map(|&c| match m.entry_permuted(r, c) {
                    Entry::Zero => 0,
                    Entry::Const(v) => v as i128,
                    Entry::Var { .. } => unreachable!("top block is constant"),
                })
                .collect()
        })
        .collect();
    Ok(integer_rank(mat) == m.top_rows())
}

/// The per-power label subgraphs Q_i selected by a transversal, as edge
/// lists of vertex pairs over [s].
pub fn transversal_subgraphs(m: &IntersectionMatrix, q: &Transversal) -> Vec<Vec<(usize, usize)>> {
    let pairs = pair_order(m.s());
    let mut out = vec![Vec::new(); m.k];
    for (r, &(pair, _)) in m.bottom_rows().iter().enumerate() {
        out[q.powers[r]].push(pairs[pair]);
    }
    out
}
