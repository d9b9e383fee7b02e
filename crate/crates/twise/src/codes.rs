//! Reed-Solomon encoding, brute-force list-decoding/list-recovery
//! oracles, the Johnson-bound reference, and strongly perfect hash
//! matrices with exhaustive separation verification.
//!
//! Columns of a hash matrix are never materialized: the q^k degree-<k
//! polynomials are enumerated in coefficient order (column index c has
//! coefficient of x^i equal to digit i of c in base q) and evaluated on
//! the fly.

use crate::error::{Error, Result};
use crate::fields::{FieldElement, FieldSpec};
use crate::intmat::{weight, SetSystem};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Default work budget (subsets times rows) for exhaustive scans.
pub const SCAN_BUDGET: u128 = 2_000_000_000;
/// Default codeword-enumeration budget for brute-force decoding.
pub const DECODE_BUDGET: u128 = 10_000_000;

/// An [n, k] Reed-Solomon code with a fixed evaluation vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    pub spec: FieldSpec,
    pub n: usize,
    pub k: usize,
    pub alpha: Vec<FieldElement>,
}

impl CodeSpec {
    pub fn new(spec: FieldSpec, k: usize, alpha: Vec<FieldElement>) -> Result<Self> {
        let n = alpha.len();
        if !(1 <= k && k < n) || n as u64 > spec.modulus() {
            return Err(Error::InvalidInput(format!(
                "need 1 <= k < n <= q, got k={k}, n={n}, q={}",
                spec.modulus()
            )));
        }
        let distinct: BTreeSet<u64> = alpha.iter().map(|e| e.value()).collect();
        if distinct.len() != n {
            return Err(Error::InvalidInput(
                "evaluation coordinates must be pairwise distinct".into(),
            ));
        }
        Ok(CodeSpec { spec, n, k, alpha })
    }

    /// Codeword of a k-coefficient message: coordinate i is f(alpha_i).
    pub fn encode(&self, message: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if message.len() != self.k {
            return Err(Error::InvalidInput(format!(
                "message length {} differs from k={}",
                message.len(),
                self.k
            )));
        }
        Ok(self
            .alpha
            .iter()
            .map(|&a| self.spec.eval_poly(message, a))
            .collect())
    }

    /// Number of codewords, q^k.
    pub fn codeword_count(&self) -> u128 {
        (self.spec.modulus() as u128).pow(self.k as u32)
    }

    /// The degree-<k polynomial at a given column index: coefficient of
    /// x^i is digit i of the index in base q.
    pub fn poly_at(&self, index: u128) -> Vec<FieldElement> {
        let q = self.spec.modulus() as u128;
        let mut idx = index;
        (0..self.k)
            .map(|_| {
                let d = (idx % q) as u64;
                idx /= q;
                self.spec.element(d)
            })
            .collect()
    }

    /// Rate k/n.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

/// Per-coordinate input lists and a relative radius.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecodeInstance {
    pub lists: Vec<Vec<FieldElement>>,
    pub radius: f64,
}

impl DecodeInstance {
    /// List decoding: singleton lists from a received word.
    pub fn from_received(y: &[FieldElement], radius: f64) -> Self {
        DecodeInstance {
            lists: y.iter().map(|&v| vec![v]).collect(),
            radius,
        }
    }
}

/// Exhaustively lists every message whose codeword disagrees with the
/// input lists in at most `radius * n` coordinates. With singleton
/// lists this is exact list decoding.
pub fn brute_force_list_recover(
    c: &CodeSpec,
    inst: &DecodeInstance,
    budget: u128,
) -> Result<Vec<Vec<FieldElement>>> {
    if inst.lists.len() != c.n {
        return Err(Error::InvalidInput(format!(
            "{} coordinate lists for n={}",
            inst.lists.len(),
            c.n
        )));
    }
    let total = c.codeword_count();
    if total > budget {
        return Err(Error::TooLarge {
            what: format!("q^k = {total}"),
            limit: budget as u64,
        });
    }
    let allowed = (inst.radius * c.n as f64).floor() as usize;
    let sets: Vec<BTreeSet<u64>> = inst
        .lists
        .iter()
        .map(|l| l.iter().map(|e| e.value()).collect())
        .collect();
    let mut out = Vec::new();
    for idx in 0..total {
        let f = c.poly_at(idx);
        let mut misses = 0usize;
        for (i, &a) in c.alpha.iter().enumerate() {
            if !sets[i].contains(&c.spec.eval_poly(&f, a).value()) {
                misses += 1;
                if misses > allowed {
                    break;
                }
            }
        }
        if misses <= allowed {
            out.push(f);
        }
    }
    Ok(out)
}

/// The generic list-decoding guarantee from distance alone:
/// radius `1 - sqrt(1 - delta)` with list bound `q n^2 delta`,
/// where `delta = (n - k + 1) / n`.
pub fn johnson_radius(n: usize, k: usize, q: u64) -> (f64, f64) {
    let delta = (n - k + 1) as f64 / n as f64;
    (1.0 - (1.0 - delta).sqrt(), q as f64 * (n * n) as f64 * delta)
}

/// Upper bound on the separation threshold achievable by any linear
/// n x q^k hash matrix: `n - k(t-1) + 1`.
pub fn linear_phf_bound(n: usize, k: usize, t: usize) -> Result<usize> {
    if k * (t - 1) > n + 1 {
        return Err(Error::InvalidInput(format!(
            "k(t-1) = {} exceeds n+1 = {}",
            k * (t - 1),
            n + 1
        )));
    }
    Ok(n + 1 - k * (t - 1))
}

/// Counts the rows where the given columns take pairwise distinct
/// values. Columns are polynomial indices; repeats are rejected.
pub fn verify_separation(c: &CodeSpec, columns: &[u128]) -> Result<usize> {
    let mut seen = BTreeSet::new();
    for &col in columns {
        if !seen.insert(col) {
            return Err(Error::DuplicateColumn(col as u64));
        }
    }
    let polys: Vec<Vec<FieldElement>> = columns.iter().map(|&i| c.poly_at(i)).collect();
    let mut count = 0;
    for &a in &c.alpha {
        let vals: BTreeSet<u64> = polys
            .iter()
            .map(|f| c.spec.eval_poly(f, a).value())
            .collect();
        if vals.len() == polys.len() {
            count += 1;
        }
    }
    Ok(count)
}

fn combination_count(m: u128, t: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..t as u128 {
        acc = acc.saturating_mul(m - i) / (i + 1);
        if acc > u128::MAX / 2 {
            return u128::MAX;
        }
    }
    acc
}

/// Minimum separation count over all t-subsets of columns, with early
/// exit once the running minimum drops below `stop_below` (if given).
/// Returns the minimum and a subset attaining it.
pub fn min_separation(
    c: &CodeSpec,
    t: usize,
    stop_below: Option<usize>,
    budget: u128,
) -> Result<(usize, Vec<u128>)> {
    let total = c.codeword_count();
    if t == 0 || (t as u128) > total {
        return Err(Error::InvalidInput("t out of range".into()));
    }
    let work = combination_count(total, t).saturating_mul(c.n as u128);
    if work > budget {
        return Err(Error::TooLarge {
            what: format!("C(q^k, t) * n = {work}"),
            limit: budget as u64,
        });
    }
    // Lexicographic enumeration of t-subsets of 0..total.
    let mut idx: Vec<u128> = (0..t as u128).collect();
    let mut best = usize::MAX;
    let mut witness = idx.clone();
    loop {
        let count = verify_separation(c, &idx)?;
        if count < best {
            best = count;
            witness = idx.clone();
            if let Some(stop) = stop_below {
                if best < stop {
                    return Ok((best, witness));
                }
            }
        }
        // Advance.
        let mut i = t;
        loop {
            if i == 0 {
                return Ok((best, witness));
            }
            i -= 1;
            if idx[i] + 1 <= total - (t - i) as u128 {
                idx[i] += 1;
                for j in i + 1..t {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// A certified strongly t-perfect hash matrix: every t columns are
/// separated by at least `threshold` rows, verified exhaustively.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HashMatrix {
    pub code: CodeSpec,
    pub t: usize,
    /// The target n - k(t-1) + 1.
    pub threshold: usize,
    /// The exhaustively verified minimum over all t-subsets.
    pub realized_min: usize,
}

/// Statistics of one failed attempt.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttemptStat {
    pub alpha: Vec<u64>,
    pub realized_min: usize,
}

/// Outcome of [`build_phf`]: either a certified matrix or the realized
/// minima of every attempt.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhfOutcome {
    pub matrix: Option<HashMatrix>,
    pub failures: Vec<AttemptStat>,
}

/// Samples evaluation vectors until one certifies as a strongly
/// t-perfect hash matrix (every t-subset of the q^k columns separated by
/// at least n - k(t-1) + 1 rows), or the attempt budget runs out.
pub fn build_phf<R: Rng + ?Sized>(
    spec: FieldSpec,
    n: usize,
    k: usize,
    t: usize,
    attempts: usize,
    budget: u128,
    rng: &mut R,
) -> Result<PhfOutcome> {
    if k * (t - 1) > n {
        return Err(Error::InvalidInput(format!(
            "strong separation needs n >= k(t-1) = {}",
            k * (t - 1)
        )));
    }
    let threshold = linear_phf_bound(n, k, t)?;
    let mut failures = Vec::new();
    for _ in 0..attempts {
        let alpha = spec.sample_distinct_vector(n, rng)?;
        let code = CodeSpec::new(spec, k, alpha)?;
        let (realized, _) = min_separation(&code, t, Some(threshold), budget)?;
        if realized >= threshold {
            return Ok(PhfOutcome {
                matrix: Some(HashMatrix {
                    code,
                    t,
                    threshold,
                    realized_min: realized,
                }),
                failures,
            });
        }
        failures.push(AttemptStat {
            alpha: code.alpha.iter().map(|e| e.value()).collect(),
            realized_min: realized,
        });
    }
    Ok(PhfOutcome {
        matrix: None,
        failures,
    })
}

/// A set of t columns separated by at most n - k(t-1) rows, together
/// with the agreement sets assembled from its non-separating rows.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BadWitness {
    /// Column indices of the offending polynomials.
    pub columns: Vec<u128>,
    /// A received word every offending codeword is close to: on each
    /// non-separating row it takes the value of the agreeing pair.
    pub y: Vec<FieldElement>,
    /// I_i built by adding each non-separating row to the first
    /// agreeing pair of sets. Empty triple intersections by
    /// construction; |I_i cap I_j| <= k-1 by the code distance.
    pub sets: Vec<Vec<usize>>,
    pub separating_rows: usize,
}

/// Exhaustive search for a violation of strong separation. `None` means
/// the evaluation vector certifies (within the scanned range).
pub fn bad_vector_witness(c: &CodeSpec, t: usize, budget: u128) -> Result<Option<BadWitness>> {
    let threshold = linear_phf_bound(c.n, c.k, t)?;
    let (min, witness) = min_separation(c, t, Some(threshold), budget)?;
    if min >= threshold {
        return Ok(None);
    }
    let polys: Vec<Vec<FieldElement>> = witness.iter().map(|&i| c.poly_at(i)).collect();
    let mut sets = vec![Vec::new(); t];
    let mut y = Vec::with_capacity(c.n);
    for (row, &a) in c.alpha.iter().enumerate() {
        let vals: Vec<u64> = polys
            .iter()
            .map(|f| c.spec.eval_poly(f, a).value())
            .collect();
        let mut agreeing: Option<(usize, usize)> = None;
        'outer: for i in 0..t {
            for j in i + 1..t {
                if vals[i] == vals[j] {
                    agreeing = Some((i, j));
                    break 'outer;
                }
            }
        }
        match agreeing {
            Some((i, j)) => {
                sets[i].push(row + 1);
                sets[j].push(row + 1);
                y.push(c.spec.element(vals[i]));
            }
            None => y.push(c.spec.element(vals[0])),
        }
    }
    Ok(Some(BadWitness {
        columns: witness,
        y,
        sets,
        separating_rows: min,
    }))
}

/// The minimal-index-set extraction: the smallest S (by cardinality,
/// deterministic tie-break) with wt(I_S) >= k(|S|-1) > 0, trimmed by
/// element removal until equality holds. Returns the 1-based index set
/// and the trimmed sets (aligned with S).
pub fn minimal_tight_subsystem(
    sets: &[Vec<usize>],
    n: usize,
    k: usize,
) -> Result<Option<(Vec<usize>, Vec<Vec<usize>>)>> {
    let t = sets.len();
    if t > 20 {
        return Err(Error::TooLarge {
            what: format!("t={t}"),
            limit: 20,
        });
    }
    let system = SetSystem::single_layer(n, sets)?;
    let mut found: Option<Vec<usize>> = None;
    for size in 2..=t {
        for mask in 1u64..(1 << t) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let sub: Vec<usize> = (0..t).filter(|&a| mask >> a & 1 == 1).map(|a| a + 1).collect();
            let w = weight(&system, &sub)?;
            if w >= (k * (size - 1)) as u64 && w > 0 {
                found = Some(sub);
                break;
            }
        }
        if found.is_some() {
            break;
        }
    }
    let Some(s_idx) = found else {
        return Ok(None);
    };
    // Trim to equality: each removal of a multiply-owned element lowers
    // the weight by exactly one.
    let mut trimmed: Vec<Vec<usize>> = s_idx.iter().map(|&i| sets[i - 1].clone()).collect();
    let target = (k * (s_idx.len() - 1)) as u64;
    loop {
        let sys = SetSystem::single_layer(n, &trimmed)?;
        let all: Vec<usize> = (1..=trimmed.len()).collect();
        let w = weight(&sys, &all)?;
        if w == target {
            break;
        }
        // Remove the smallest multiply-owned element from the largest set.
        let mut owners = vec![0usize; n + 1];
        for set in &trimmed {
            for &x in set {
                owners[x] += 1;
            }
        }
        let mut order: Vec<usize> = (0..trimmed.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(trimmed[i].len()));
        let mut removed = false;
        'sets: for &i in &order {
            for pos in 0..trimmed[i].len() {
                if owners[trimmed[i][pos]] >= 2 {
                    trimmed[i].remove(pos);
                    removed = true;
                    break 'sets;
                }
            }
        }
        if !removed {
            return Err(Error::InvalidInput(
                "weight exceeds target but no element is shared".into(),
            ));
        }
    }
    Ok(Some((s_idx, trimmed)))
}
