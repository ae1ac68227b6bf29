//! Standard structures and seeded searches for sparse witnesses.
//!
//! Every search is a sequence of numbered candidates. Candidate `i` draws
//! from its own ChaCha stream (`seed`, stream `i`), candidates are checked
//! in parallel batches, and the lowest verified index wins, so results do
//! not depend on the thread count. Every returned structure has been
//! re-verified by the analysis and hom modules.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, girth, girth_exceeds, is_hyperforest};
use crate::error::{Error, Result};
use crate::hom::{hom_exists, Limits};
use crate::membership::{self, subsets};
use crate::structure::{disjoint_union, Hypergraph, KStructure};

/// K_n^(k): every subset of `0..n` with between 2 and k elements.
pub fn complete_hypergraph(n: usize, k: usize) -> Result<Hypergraph> {
    if k < 2 {
        return Err(Error::DegenerateArity(k));
    }
    if n == 0 {
        return Err(Error::PreconditionFailed("needs at least one vertex".into()));
    }
    let edges: Vec<Vec<usize>> = (2..=k.min(n)).flat_map(|size| subsets(n, size)).collect();
    Hypergraph::with_size(n, edges)
}

/// One edge on `l` vertices.
pub fn single_edge(l: usize) -> Result<Hypergraph> {
    if l == 0 {
        return Err(Error::EmptyEdge);
    }
    Hypergraph::with_size(l, [(0..l).collect::<Vec<_>>()])
}

pub fn edgeless(n: usize) -> Hypergraph {
    Hypergraph::with_size(n, Vec::<Vec<usize>>::new()).expect("edgeless is valid")
}

/// The cycle graph on `n >= 3` vertices.
pub fn cycle(n: usize) -> Result<Hypergraph> {
    if n < 3 {
        return Err(Error::PreconditionFailed(format!(
            "cycle needs 3 vertices, got {n}"
        )));
    }
    Hypergraph::with_size(n, (0..n).map(|i| vec![i, (i + 1) % n]))
}

/// The path graph on `n` vertices.
pub fn path(n: usize) -> Hypergraph {
    Hypergraph::with_size(n, (1..n).map(|i| vec![i - 1, i])).expect("path is valid")
}

/// The seven lines of the Fano plane.
pub fn fano_plane() -> Hypergraph {
    Hypergraph::with_size(
        7,
        [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ],
    )
    .expect("fixture is valid")
}

/// A k-uniform hyperforest grown one edge at a time; each new edge meets
/// the forest in at most one vertex.
pub fn random_hyperforest(k: usize, edges: usize, seed: u64) -> Result<Hypergraph> {
    if k < 2 {
        return Err(Error::DegenerateArity(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = 0usize;
    let mut list: Vec<Vec<usize>> = Vec::with_capacity(edges);
    for i in 0..edges {
        let detached = i == 0 || rng.random_range(0..4) == 0;
        let mut edge = Vec::with_capacity(k);
        if !detached {
            edge.push(rng.random_range(0..n));
        }
        while edge.len() < k {
            edge.push(n);
            n += 1;
        }
        list.push(edge);
    }
    let h = Hypergraph::with_size(n, list)?;
    if !is_hyperforest(&h) || !h.is_uniform(k) {
        return Err(Error::Verification("generated forest has a cycle".into()));
    }
    Ok(h)
}

/// Parameters of a seeded witness search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBudget {
    pub seed: u64,
    pub max_candidates: u64,
    /// Inclusive vertex-count range for candidates.
    pub min_vertices: usize,
    pub max_vertices: usize,
    #[serde(skip)]
    pub time_limit: Option<Duration>,
    /// Per-candidate hom-search limits.
    #[serde(skip)]
    pub limits: Limits,
    /// Try the named fixtures before searching.
    pub prefer_fixture: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            seed: 0,
            max_candidates: 100_000,
            min_vertices: 5,
            max_vertices: 15,
            time_limit: Some(Duration::from_secs(300)),
            limits: Limits::nodes(100_000),
            prefer_fixture: false,
        }
    }
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        SearchBudget {
            seed,
            ..Self::default()
        }
    }

    fn rng(&self, candidate: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(candidate);
        rng
    }
}

const BATCH: u64 = 64;

/// Runs `check` on candidates 0, 1, 2, ... and returns the result of the
/// lowest index that succeeds.
fn search<T: Send>(budget: &SearchBudget, check: impl Fn(u64) -> Option<T> + Sync) -> Result<T> {
    let start = Instant::now();
    let mut next = 0u64;
    while next < budget.max_candidates {
        if budget.time_limit.is_some_and(|t| start.elapsed() > t) {
            break;
        }
        let end = (next + BATCH).min(budget.max_candidates);
        let found = (next..end)
            .into_par_iter()
            .map(&check)
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .next();
        if let Some(t) = found {
            return Ok(t);
        }
        next = end;
    }
    Err(Error::SearchExhausted { candidates: next })
}

/// Random k-uniform hypergraph with every cycle longer than `girth_above`:
/// uniform k-subsets at density between 1 and 3 edges per vertex, then one
/// edge of each remaining short cycle deleted.
fn sparse_candidate(k: usize, girth_above: usize, budget: &SearchBudget, candidate: u64) -> Hypergraph {
    let mut rng = budget.rng(candidate);
    let lo = budget.min_vertices.max(k);
    let hi = budget.max_vertices.max(lo);
    let v = rng.random_range(lo..=hi);
    let density: f64 = rng.random_range(1.0..=3.0);
    let target = (density * v as f64).ceil() as usize;
    let mut edges = BTreeSet::new();
    let mut attempts = 0;
    while edges.len() < target && attempts < 20 * target {
        attempts += 1;
        let mut e = index::sample(&mut rng, v, k).into_vec();
        e.sort_unstable();
        edges.insert(e);
    }
    let mut h = Hypergraph::with_size(v, edges).expect("candidate edges are valid");
    while let Some((g, witness)) = girth(&h) {
        if g > girth_above {
            break;
        }
        let drop = witness.edges[rng.random_range(0..witness.edges.len())].clone();
        h = h.without_edges(&[drop]);
    }
    h
}

/// Drops isolated vertices.
fn compact(h: &Hypergraph) -> Hypergraph {
    let used: BTreeSet<usize> = h.edges().iter().flatten().copied().collect();
    let keep: Vec<usize> = used.into_iter().collect();
    h.induced(&keep).expect("subset of own vertices")
}

/// Checks the three sparse-witness properties directly.
pub fn verify_sparse(h: &Hypergraph, k: usize, girth_above: usize, not_colourable: usize) -> Result<()> {
    if !h.is_uniform(k) {
        return Err(Error::Verification(format!("not {k}-uniform")));
    }
    if !girth_exceeds(h, girth_above) {
        return Err(Error::Verification(format!(
            "has a cycle of length at most {girth_above}"
        )));
    }
    if analysis::colour_with(h, not_colourable)?.is_some() {
        return Err(Error::Verification(format!("is {not_colourable}-colourable")));
    }
    Ok(())
}

/// A k-uniform hypergraph with girth above `girth_above` and no proper
/// colouring with `not_colourable` colours.
pub fn high_chromatic_sparse(
    k: usize,
    girth_above: usize,
    not_colourable: usize,
    budget: &SearchBudget,
) -> Result<Hypergraph> {
    if k < 2 {
        return Err(Error::DegenerateArity(k));
    }
    if girth_above < 2 || not_colourable < 1 {
        return Err(Error::PreconditionFailed(
            "girth bound must be at least 2 and colour count at least 1".into(),
        ));
    }
    if budget.prefer_fixture {
        for fixture in [fano_plane(), single_edge(k)?] {
            if verify_sparse(&fixture, k, girth_above, not_colourable).is_ok() {
                return Ok(fixture);
            }
        }
    }
    search(budget, |i| {
        let h = compact(&sparse_candidate(k, girth_above, budget, i));
        verify_sparse(&h, k, girth_above, not_colourable).ok().map(|_| h)
    })
}

fn solves(s: &KStructure, t: &KStructure, limits: Limits) -> Option<bool> {
    hom_exists(s, t, limits).ok().map(|h| h.is_some())
}

/// A k-uniform structure with girth above `girth_above` that maps into `h2`
/// but not into `h1`.
pub fn sparse_incomparability(
    h1: &KStructure,
    h2: &KStructure,
    girth_above: usize,
    budget: &SearchBudget,
) -> Result<KStructure> {
    let k = h1.arity();
    if h2.arity() != k {
        return Err(Error::MixedArity);
    }
    if hom_exists(h2, h1, budget.limits)?.is_some() {
        return Err(Error::PreconditionFailed(
            "the second structure maps into the first".into(),
        ));
    }
    let check = |h: &Hypergraph| -> Option<KStructure> {
        if h.num_edges() == 0 || !girth_exceeds(h, girth_above) {
            return None;
        }
        let s = h.to_kstructure(k).ok()?;
        (solves(&s, h2, budget.limits)? && !solves(&s, h1, budget.limits)?).then_some(s)
    };
    if budget.prefer_fixture {
        let mut fixtures = vec![fano_plane(), single_edge(k)?];
        fixtures.extend((5..12).step_by(2).filter_map(|n| cycle(n).ok()));
        for f in fixtures.iter().filter(|f| f.is_uniform(k)) {
            if let Some(s) = check(f) {
                return Ok(s);
            }
        }
    }
    search(budget, |i| {
        check(&compact(&sparse_candidate(k, girth_above, budget, i)))
    })
}

/// A structure strictly between `g1` and `g2` in the homomorphism order,
/// with the hom facts that place it there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityWitness {
    /// The sparse part followed by a copy of `g1`.
    pub structure: KStructure,
    pub sparse: KStructure,
    /// g1 -> H, H -> g2, H -/-> g1, g2 -/-> H.
    pub checks: [bool; 4],
}

pub fn density_witness(g1: &KStructure, g2: &KStructure, budget: &SearchBudget) -> Result<DensityWitness> {
    if g1.arity() != g2.arity() {
        return Err(Error::MixedArity);
    }
    if !g1.has_tuples() || !g2.has_tuples() {
        return Err(Error::PreconditionFailed(
            "both structures need a hyperedge".into(),
        ));
    }
    if hom_exists(g1, g2, budget.limits)?.is_none() {
        return Err(Error::PreconditionFailed(
            "the first structure must map into the second".into(),
        ));
    }
    if hom_exists(g2, g1, budget.limits)?.is_some() {
        return Err(Error::PreconditionFailed(
            "the second structure maps into the first".into(),
        ));
    }
    let sparse = sparse_incomparability(g1, g2, g2.len() + 1, budget)?;
    let h = disjoint_union(&[sparse.clone(), g1.clone()])?.structure;
    let lim = budget.limits;
    let checks = [
        hom_exists(g1, &h, lim)?.is_some(),
        hom_exists(&h, g2, lim)?.is_some(),
        hom_exists(&h, g1, lim)?.is_none(),
        hom_exists(g2, &h, lim)?.is_none(),
    ];
    if checks != [true; 4] {
        return Err(Error::Verification(format!("hom checks {checks:?}")));
    }
    Ok(DensityWitness {
        structure: h,
        sparse,
        checks,
    })
}

/// Report for a witness that the class generated by `m` is not finitely
/// axiomatisable at level `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NfaReport {
    pub n: usize,
    pub template_chromatic: usize,
    #[serde(skip)]
    pub witness: Hypergraph,
    pub witness_vertices: usize,
    pub witness_edges: usize,
    pub maps_into_template: bool,
    /// Whether every n-element subset was checked (otherwise a seeded sample).
    pub exhaustive: bool,
    pub subsets_checked: usize,
    pub subsets_failed: usize,
}

const NFA_SUBSET_LIMIT: usize = 10_000;

pub fn nfa_witness(m: &KStructure, n: usize, budget: &SearchBudget) -> Result<NfaReport> {
    let k = m.arity();
    if k < 3 {
        return Err(Error::PreconditionFailed(format!(
            "needs arity at least 3, got {k}"
        )));
    }
    if !m.has_tuples() {
        return Err(Error::PreconditionFailed("template needs a hyperedge".into()));
    }
    if !m.is_loop_free() {
        return Err(Error::HasLoop);
    }
    let chi = analysis::chromatic_number(&m.to_hypergraph()?, m.len().max(1))?.colours;
    let u = high_chromatic_sparse(k, n, chi, budget)?;
    let us = u.to_kstructure(k)?;
    let maps_into_template = hom_exists(&us, m, budget.limits)?.is_some();
    let ek = single_edge(k)?.to_kstructure(k)?;

    let total = binomial(u.num_vertices(), n);
    let exhaustive = total <= NFA_SUBSET_LIMIT as u128;
    let chosen: Vec<Vec<usize>> = if exhaustive {
        subsets(u.num_vertices(), n)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        (0..NFA_SUBSET_LIMIT)
            .map(|_| {
                let mut s = index::sample(&mut rng, u.num_vertices(), n).into_vec();
                s.sort_unstable();
                s
            })
            .collect()
    };
    let failed = chosen
        .par_iter()
        .map(|subset| -> Result<bool> {
            let sub = u.induced(subset)?;
            if !is_hyperforest(&sub) {
                return Ok(true);
            }
            let cert = membership::member(&sub.to_kstructure(k)?, std::slice::from_ref(&ek), budget.limits)?;
            Ok(!cert.member)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&f| f)
        .count();
    Ok(NfaReport {
        n,
        template_chromatic: chi,
        witness_vertices: u.num_vertices(),
        witness_edges: u.num_edges(),
        witness: u,
        maps_into_template,
        exhaustive,
        subsets_checked: chosen.len(),
        subsets_failed: failed,
    })
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}
