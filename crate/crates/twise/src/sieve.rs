//! The randomized subset sieve: bucket selection, random index sampling,
//! reduction to pairwise-only intersections, and trimming to tight
//! weight. A successful run yields a trace whose final system passes the
//! exact preconditions of the tree-packing certificate, and which can be
//! replayed bit-identically from its seed.

use crate::error::{Error, Result};
use crate::intmat::{generalized_weight, SetSystem};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const TRACE_SCHEMA: &str = "twise-sieve-trace-1";
/// Subset-scan guard for minimal-index-set enforcement.
pub const MINIMAL_J_BOUND: usize = 20;

/// Tunable parameters of the sieve. The absolute constants c, c0, c1, c2
/// are unspecified by the underlying analysis; they are configuration
/// with defaults calibrated by the Monte Carlo suite, and every report
/// echoes the values used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub ell: usize,
    pub k: usize,
    /// Weight-hypothesis constant.
    pub c: f64,
    /// Bucket-guarantee constant (reported, not asserted).
    pub c0: f64,
    /// Sample-size constant for the |J| event.
    pub c1: f64,
    /// Yield constant for the |A_J| event.
    pub c2: f64,
    pub max_retries: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            epsilon: 1.0,
            delta: 1.0,
            ell: 1,
            k: 1,
            c: 8.0,
            c0: 8.0,
            c1: 4.0,
            c2: 0.01,
            max_retries: 64,
        }
    }
}

impl SieveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidInput("epsilon must lie in (0, 1]".into()));
        }
        if self.delta <= 0.0 {
            return Err(Error::InvalidInput("delta must be positive".into()));
        }
        if self.ell == 0 || self.k == 0 {
            return Err(Error::InvalidInput("ell and k must be positive".into()));
        }
        if [self.c, self.c0, self.c1, self.c2].iter().any(|&c| c <= 0.0) {
            return Err(Error::InvalidInput("constants must be positive".into()));
        }
        Ok(())
    }

    /// The logarithmic factor log(1/eps) + log((1+delta)/delta) + 1.
    pub fn log_factor(&self) -> f64 {
        (1.0 / self.epsilon).log2() + ((1.0 + self.delta) / self.delta).log2() + 1.0
    }
}

/// Full record of one successful sieve run, sufficient for bit-identical
/// replay and for independent verification of conditions (1)-(4).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveTrace {
    pub schema: String,
    pub seed: u64,
    pub config: SieveConfig,
    /// The input system, as given (normalization is re-derived on replay).
    pub system: SetSystem,
    pub retries_used: usize,
    /// Chosen bucket: K = 2^bucket_index.
    pub bucket_index: u32,
    pub k_bucket: u64,
    pub a_set: Vec<usize>,
    /// Realized ratio |A| * c0 K logfactor / wt_l (reported, not asserted).
    pub bucket_ratio: f64,
    pub sample_p: f64,
    pub j_set: Vec<usize>,
    pub a_j: Vec<usize>,
    /// For each j in A_J: (j, the two chosen indices, the layer r_j).
    pub t_map: Vec<(usize, [usize; 2], usize)>,
    /// Whether the |J| <= c1 sqrt(l) t / K event held.
    pub c1_event: bool,
    /// Whether the |A_J| >= c2 |A| event held.
    pub c2_event: bool,
    pub final_j: Vec<usize>,
    /// I'_i for i in final_j order.
    pub final_sets: Vec<Vec<usize>>,
}

/// Makes the layers of every set pairwise disjoint (an element appearing
/// in two layers of one set is kept only in the earliest) without
/// changing any I_i.
pub fn normalize_layers(s: &SetSystem) -> SetSystem {
    let mut layers = Vec::with_capacity(s.t);
    for i in 1..=s.t {
        let before = s.set(i);
        let mut seen = std::collections::BTreeSet::new();
        let mut per_set = Vec::with_capacity(s.l);
        for layer in &s.layers[i - 1] {
            per_set.push(
                layer
                    .iter()
                    .copied()
                    .filter(|&x| seen.insert(x))
                    .collect::<Vec<_>>(),
            );
        }
        let out = SetSystem::new(s.n, 1, vec![per_set.clone()]).expect("layer shape preserved");
        debug_assert_eq!(out.set(1), before, "normalization must not change I_i");
        layers.push(per_set);
    }
    SetSystem::new(s.n, s.t, layers).expect("normalized system is valid")
}

/// Checks the three run hypotheses, listing every failure.
pub fn check_hypotheses(s: &SetSystem, cfg: &SieveConfig) -> Result<()> {
    let mut failures = Vec::new();
    let t_min = (1.0 + cfg.delta) * cfg.ell as f64 / cfg.epsilon;
    if (s.t as f64) < t_min {
        failures.push(format!("t = {} < (1+delta) l / eps = {t_min:.3}", s.t));
    }
    let set_min = cfg.epsilon * s.n as f64;
    for i in 1..=s.t {
        let size = s.set(i).len() as f64;
        if size < set_min {
            failures.push(format!("|I_{i}| = {size} < eps n = {set_min:.3}"));
        }
    }
    let all: Vec<usize> = (1..=s.t).collect();
    let wt = generalized_weight(s, &all, cfg.ell) as f64;
    let wt_min = cfg.c * (cfg.ell as f64).sqrt() * cfg.log_factor() * (s.t * cfg.k) as f64;
    if wt < wt_min {
        failures.push(format!("wt_l = {wt} < c sqrt(l) logfactor t k = {wt_min:.3}"));
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Error::HypothesesUnmet(failures))
    }
}

/// Bucket candidates (index, bucket weight), heaviest first with the
/// smallest index winning ties; only indices at least
/// max(floor(log2(delta/(1+delta) * t eps / 2)), 0) participate.
pub fn bucket_candidates(s: &SetSystem, cfg: &SieveConfig) -> Vec<(u32, u64)> {
    let owner_excess: Vec<usize> = (1..=s.n)
        .map(|j| s.owners(j).len().saturating_sub(cfg.ell))
        .collect();
    let d = (cfg.delta / (1.0 + cfg.delta) * s.t as f64 * cfg.epsilon / 2.0).log2();
    let i_min = if d.is_finite() && d.floor() > 0.0 {
        d.floor() as u32
    } else {
        0
    };
    let i_max = (s.t as f64).log2().ceil() as u32;
    let mut out = Vec::new();
    for i in i_min..i_max.max(i_min + 1) {
        let lo = 1u64 << i;
        let hi = lo << 1;
        let weight: u64 = owner_excess
            .iter()
            .filter(|&&x| (x as u64) >= lo && (x as u64) < hi)
            .map(|&x| x as u64)
            .sum();
        if weight > 0 {
            out.push((i, weight));
        }
    }
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

/// Selects the heaviest bucket and returns (K, A) with
/// A = { j : |S_j| >= K + l }.
pub fn bucket_select(s: &SetSystem, cfg: &SieveConfig) -> Result<(u64, Vec<usize>)> {
    let candidates = bucket_candidates(s, cfg);
    let Some(&(i0, _)) = candidates.first() else {
        return Err(Error::DegenerateSystem(
            "every bucket in range is empty (wt_l = 0)".into(),
        ));
    };
    Ok(bucket_from_index(s, cfg, i0))
}

fn bucket_from_index(s: &SetSystem, cfg: &SieveConfig, i0: u32) -> (u64, Vec<usize>) {
    let k_bucket = 1u64 << i0;
    let a: Vec<usize> = (1..=s.n)
        .filter(|&j| s.owners(j).len() as u64 >= k_bucket + cfg.ell as u64)
        .collect();
    (k_bucket, a)
}

/// Includes each index of [t] independently with probability
/// p = min(sqrt(l) / 2K, 1/2) and collects
/// A_J = { j in A : some layer has |S_j^{(r)} cap J| >= 2 }.
pub fn sample_j<R: Rng + ?Sized>(
    s: &SetSystem,
    k_bucket: u64,
    a_set: &[usize],
    cfg: &SieveConfig,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    let p = sample_probability(k_bucket, cfg);
    let j_set: Vec<usize> = (1..=s.t).filter(|_| rng.gen_bool(p)).collect();
    let a_j = collect_a_j(s, a_set, &j_set);
    (j_set, a_j)
}

pub fn sample_probability(k_bucket: u64, cfg: &SieveConfig) -> f64 {
    ((cfg.ell as f64).sqrt() / (2.0 * k_bucket as f64)).min(0.5)
}

fn collect_a_j(s: &SetSystem, a_set: &[usize], j_set: &[usize]) -> Vec<usize> {
    a_set
        .iter()
        .copied()
        .filter(|&j| {
            (1..=s.l).any(|r| {
                s.owners_in_layer(j, r)
                    .iter()
                    .filter(|i| j_set.contains(i))
                    .count()
                    >= 2
            })
        })
        .collect()
}

/// The reduced, pairwise-only system: for each j in A_J a two-element
/// T_j drawn from a single layer, and I'_i = { j : i in T_j }.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedSystem {
    pub j_set: Vec<usize>,
    /// (j, chosen pair, layer r_j) per element of A_J.
    pub t_map: Vec<(usize, [usize; 2], usize)>,
    /// I'_i keyed by set index.
    pub sets: BTreeMap<usize, Vec<usize>>,
}

pub fn reduce_to_pairs<R: Rng + ?Sized>(
    s: &SetSystem,
    j_set: &[usize],
    a_j: &[usize],
    rng: &mut R,
) -> ReducedSystem {
    let mut t_map = Vec::with_capacity(a_j.len());
    let mut sets: BTreeMap<usize, Vec<usize>> = j_set.iter().map(|&i| (i, Vec::new())).collect();
    for &j in a_j {
        // Layers with at least two sampled owners.
        let valid: Vec<usize> = (1..=s.l)
            .filter(|&r| {
                s.owners_in_layer(j, r)
                    .iter()
                    .filter(|i| j_set.contains(i))
                    .count()
                    >= 2
            })
            .collect();
        let r_j = valid[rng.gen_range(0..valid.len())];
        let owners: Vec<usize> = s
            .owners_in_layer(j, r_j)
            .into_iter()
            .filter(|i| j_set.contains(i))
            .collect();
        let a = rng.gen_range(0..owners.len());
        let mut b = rng.gen_range(0..owners.len());
        while b == a {
            b = rng.gen_range(0..owners.len());
        }
        let pair = [owners[a.min(b)], owners[a.max(b)]];
        t_map.push((j, pair, r_j));
        sets.get_mut(&pair[0]).unwrap().push(j);
        sets.get_mut(&pair[1]).unwrap().push(j);
    }
    for set in sets.values_mut() {
        set.sort_unstable();
    }
    ReducedSystem {
        j_set: j_set.to_vec(),
        t_map,
        sets,
    }
}

/// wt(I'_{J'}) for the reduced system: every ground element contributes
/// max(owners within J' - 1, 0); owner counts never exceed 2.
fn reduced_weight(sets: &BTreeMap<usize, Vec<usize>>, sub: &[usize]) -> u64 {
    let mut count: BTreeMap<usize, u64> = BTreeMap::new();
    for &i in sub {
        for &j in &sets[&i] {
            *count.entry(j).or_insert(0) += 1;
        }
    }
    count.values().map(|&c| c.saturating_sub(1)).sum()
}

/// Trims the reduced system to a final index set J with
/// wt(I'_J) = (|J|-1) k exactly and every nonempty subset within its
/// bound. First recurses to a minimal-cardinality subset still carrying
/// enough weight, then removes elements one at a time (largest set
/// first, smallest element within it).
pub fn trim_to_tight(
    reduced: &ReducedSystem,
    k: usize,
) -> Result<(Vec<usize>, BTreeMap<usize, Vec<usize>>)> {
    let j_all = &reduced.j_set;
    if j_all.len() > MINIMAL_J_BOUND {
        return Err(Error::TooLarge {
            what: format!("|J| = {}", j_all.len()),
            limit: MINIMAL_J_BOUND as u64,
        });
    }
    let total = reduced_weight(&reduced.sets, j_all);
    let needed = ((j_all.len().max(1) - 1) * k) as u64;
    if j_all.len() < 2 || total < needed {
        return Err(Error::WeightDeficit {
            got: total,
            needed: needed.max(k as u64),
        });
    }

    // Minimal violating subset: smallest cardinality with
    // wt >= (|J'|-1) k, deterministic tie-break by mask order.
    let mut chosen: Option<Vec<usize>> = None;
    'sizes: for size in 2..=j_all.len() {
        for mask in 1u64..(1 << j_all.len()) {
            if mask.count_ones() as usize != size {
                continue;
            }
            let sub: Vec<usize> = (0..j_all.len())
                .filter(|&a| mask >> a & 1 == 1)
                .map(|a| j_all[a])
                .collect();
            if reduced_weight(&reduced.sets, &sub) >= ((size - 1) * k) as u64 {
                chosen = Some(sub);
                break 'sizes;
            }
        }
    }
    let final_j = chosen.expect("the full index set qualifies");
    let mut sets: BTreeMap<usize, Vec<usize>> = final_j
        .iter()
        .map(|&i| (i, reduced.sets[&i].clone()))
        .collect();

    let target = ((final_j.len() - 1) * k) as u64;
    loop {
        let w = reduced_weight(&sets, &final_j);
        if w == target {
            break;
        }
        // Remove the smallest doubly-owned element of the largest set.
        let mut owners: BTreeMap<usize, u64> = BTreeMap::new();
        for set in sets.values() {
            for &j in set {
                *owners.entry(j).or_insert(0) += 1;
            }
        }
        let mut order: Vec<usize> = final_j.clone();
        order.sort_by_key(|i| (std::cmp::Reverse(sets[i].len()), *i));
        let mut removed = false;
        'outer: for i in order {
            let set = sets.get_mut(&i).unwrap();
            for pos in 0..set.len() {
                if owners[&set[pos]] >= 2 {
                    set.remove(pos);
                    removed = true;
                    break 'outer;
                }
            }
        }
        debug_assert!(removed, "weight above target implies a shared element");
        if !removed {
            return Err(Error::WeightDeficit {
                got: w,
                needed: target,
            });
        }
    }
    Ok((final_j, sets))
}

/// Failure report of a run that exhausted its retries.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SieveFailure {
    pub retries: usize,
    pub rejected_j_sizes: Vec<usize>,
}

/// Runs the full pipeline. Retries resample J; after half the budget the
/// bucket choice starts cycling through the remaining candidates.
pub fn sieve_run(s: &SetSystem, cfg: &SieveConfig, seed: u64) -> Result<SieveTrace> {
    cfg.validate()?;
    check_hypotheses(s, cfg)?;
    let norm = normalize_layers(s);
    let candidates = bucket_candidates(&norm, cfg);
    if candidates.is_empty() {
        return Err(Error::DegenerateSystem(
            "every bucket in range is empty (wt_l = 0)".into(),
        ));
    }
    let all: Vec<usize> = (1..=norm.t).collect();
    let wt = generalized_weight(&norm, &all, cfg.ell) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = cfg.max_retries / 2;
    for retry in 0..cfg.max_retries {
        let candidate = if retry < half || candidates.len() == 1 {
            0
        } else {
            (retry - half) % candidates.len()
        };
        let (i0, _) = candidates[candidate];
        let (k_bucket, a_set) = bucket_from_index(&norm, cfg, i0);
        let (j_set, a_j) = sample_j(&norm, k_bucket, &a_set, cfg, &mut rng);
        let needed = (j_set.len().saturating_sub(1) * cfg.k) as u64;
        if j_set.len() < 2 || (a_j.len() as u64) < needed {
            continue;
        }
        let reduced = reduce_to_pairs(&norm, &j_set, &a_j, &mut rng);
        let (final_j, final_sets_map) = trim_to_tight(&reduced, cfg.k)?;
        let final_sets: Vec<Vec<usize>> = final_j.iter().map(|i| final_sets_map[i].clone()).collect();

        let c1_bound = cfg.c1 * (cfg.ell as f64).sqrt() * norm.t as f64 / k_bucket as f64;
        let bucket_ratio = if wt > 0.0 {
            a_set.len() as f64 * cfg.c0 * k_bucket as f64 * cfg.log_factor() / wt
        } else {
            f64::INFINITY
        };
        let trace = SieveTrace {
            schema: TRACE_SCHEMA.into(),
            seed,
            config: cfg.clone(),
            system: s.clone(),
            retries_used: retry + 1,
            bucket_index: i0,
            k_bucket,
            bucket_ratio,
            sample_p: sample_probability(k_bucket, cfg),
            a_set,
            j_set,
            a_j,
            t_map: reduced.t_map,
            c1_event: true, // overwritten below
            c2_event: true,
            final_j,
            final_sets,
        };
        let mut trace = trace;
        trace.c1_event = (trace.j_set.len() as f64) <= c1_bound;
        trace.c2_event = (trace.a_j.len() as f64) >= cfg.c2 * trace.a_set.len() as f64;
        verify_trace(&trace)?;
        return Ok(trace);
    }
    Err(Error::BudgetExhausted(cfg.max_retries))
}

/// Machine-checks a trace: the final system must satisfy
/// (1) empty triple intersections, (2) subset weight bounds,
/// (3) exact total weight, (4) a single-layer home for every element,
/// and each final set must sit inside its source set.
pub fn verify_trace(trace: &SieveTrace) -> Result<()> {
    let cfg = &trace.config;
    let norm = normalize_layers(&trace.system);
    let s_count = trace.final_j.len();
    if s_count < 2 || trace.final_sets.len() != s_count {
        return Err(Error::InvalidInput("malformed final index set".into()));
    }
    let sets: BTreeMap<usize, Vec<usize>> = trace
        .final_j
        .iter()
        .cloned()
        .zip(trace.final_sets.iter().cloned())
        .collect();

    // Containment I'_i within I_i.
    for (&i, set) in &sets {
        let source = norm.set(i);
        if !set.iter().all(|j| source.contains(j)) {
            return Err(Error::InvalidInput(format!(
                "final set of index {i} is not contained in I_{i}"
            )));
        }
    }

    // Owner counts; condition (1) needs every count <= 2.
    let mut owners: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (&i, set) in &sets {
        for &j in set {
            owners.entry(j).or_default().push(i);
        }
    }
    if let Some((j, o)) = owners.iter().find(|(_, o)| o.len() > 2) {
        return Err(Error::InvalidInput(format!(
            "condition (1) fails: element {j} lies in {} final sets",
            o.len()
        )));
    }

    // Conditions (2) and (3) by subset scan.
    for mask in 1u64..(1 << s_count) {
        let sub: Vec<usize> = (0..s_count)
            .filter(|&a| mask >> a & 1 == 1)
            .map(|a| trace.final_j[a])
            .collect();
        let w = reduced_weight(&sets, &sub);
        let bound = ((sub.len() - 1) * cfg.k) as u64;
        if w > bound {
            return Err(Error::InvalidInput(format!(
                "condition (2) fails: wt = {w} > {bound} on {sub:?}"
            )));
        }
        if sub.len() == s_count && w < bound {
            return Err(Error::InvalidInput(format!(
                "condition (3) fails: wt = {w} < {bound}"
            )));
        }
    }

    // Condition (4): a single layer containing all final owners of j.
    for (&j, owner_list) in &owners {
        let ok = (1..=norm.l).any(|r| {
            let layer_owners = norm.owners_in_layer(j, r);
            owner_list.iter().all(|i| layer_owners.contains(i))
        });
        if !ok {
            return Err(Error::InvalidInput(format!(
                "condition (4) fails: element {j} has no single-layer home"
            )));
        }
    }
    Ok(())
}

/// Re-runs a trace from its stored system, config and seed; the result
/// must be bit-identical.
pub fn replay_trace(trace: &SieveTrace) -> Result<SieveTrace> {
    if trace.schema != TRACE_SCHEMA {
        return Err(Error::VersionMismatch(format!(
            "trace schema {} (expected {TRACE_SCHEMA})",
            trace.schema
        )));
    }
    let rerun = sieve_run(&trace.system, &trace.config, trace.seed)?;
    if &rerun != trace {
        return Err(Error::VersionMismatch(
            "replayed trace differs from the stored one".into(),
        ));
    }
    Ok(rerun)
}

/// Materializes the final system of a trace as a single-layer SetSystem
/// over the same ground set (sets in final_j order).
pub fn final_subsystem(trace: &SieveTrace) -> Result<(SetSystem, Vec<usize>)> {
    let sys = SetSystem::single_layer(trace.system.n, &trace.final_sets)?;
    let all: Vec<usize> = (1..=trace.final_j.len()).collect();
    Ok((sys, all))
}

/// Grid bound used by the sampling analysis: for p in (0, 1/2] and
/// x >= 0, (1-p)^x (1+px) <= 1 - p^2 x^2 / 8 when x <= 1/p, and <= 2/e
/// beyond.
pub fn miss_probability_bound_holds(p: f64, x: f64) -> bool {
    let lhs = (1.0 - p).powf(x) * (1.0 + p * x);
    if x <= 1.0 / p {
        lhs <= 1.0 - p * p * x * x / 8.0
    } else {
        lhs <= 2.0 / std::f64::consts::E
    }
}

/// Draws random layered systems until one satisfies the run hypotheses
/// for `cfg`; `density` is the per-(element, set) inclusion probability.
pub fn generate_admissible_system<R: Rng + ?Sized>(
    t: usize,
    n: usize,
    cfg: &SieveConfig,
    density: f64,
    attempts: usize,
    rng: &mut R,
) -> Option<SetSystem> {
    for _ in 0..attempts {
        let mut layers = vec![vec![Vec::new(); cfg.ell]; t];
        for (i, per_set) in layers.iter_mut().enumerate() {
            let _ = i;
            for j in 1..=n {
                if rng.gen_bool(density) {
                    let r = rng.gen_range(0..cfg.ell);
                    per_set[r].push(j);
                }
            }
        }
        let Ok(s) = SetSystem::new(n, t, layers) else {
            continue;
        };
        if check_hypotheses(&s, cfg).is_ok() {
            return Some(s);
        }
    }
    None
}
