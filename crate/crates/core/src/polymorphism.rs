//! Cyclic polymorphisms and the tractability classifier for loop-free
//! set-closed structures.
//!
//! A cyclic p-ary operation is determined by its values on necklace
//! classes, the orbits of p-tuples under rotation. The search builds the
//! quotient of the p-th power by rotation (elements are classes, a k-tuple
//! of classes is related when some choice of representatives is related
//! coordinatewise) and asks the hom solver for a map from the quotient back
//! into the structure. Such maps are exactly the cyclic polymorphisms.

use serde::{Deserialize, Serialize};

use crate::analysis::{is_bipartite, is_odd_cycle, Bipartiteness, ShadowGraph};
use crate::error::{Error, Result};
use crate::hom::{HomProblem, Limits};
use crate::structure::{direct_power, product_coords, product_index, KStructure, Tuple};

const TUPLE_SPACE_LIMIT: u128 = 10_000_000;
const MATRIX_LIMIT: u128 = 100_000_000;

/// Lexicographically least rotation.
pub fn least_rotation(t: &[usize]) -> Vec<usize> {
    let p = t.len();
    (0..p.max(1))
        .map(|r| (0..p).map(|i| t[(i + r) % p]).collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

fn rotate(t: &[usize], by: usize) -> Vec<usize> {
    let p = t.len();
    (0..p).map(|i| t[(i + by) % p]).collect()
}

/// Necklace classes of p-tuples over `0..n`, as a class index for every
/// tuple (in mixed-radix order) plus the least representative of each class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Necklaces {
    pub n: usize,
    pub p: usize,
    pub representatives: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

impl Necklaces {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::PreconditionFailed(format!(
                "arity must be at least 2, got {p}"
            )));
        }
        let total = (n as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
        if total > TUPLE_SPACE_LIMIT {
            return Err(Error::TooLarge(total));
        }
        let sizes = vec![n; p];
        let mut class_of = vec![usize::MAX; total as usize];
        let mut representatives = Vec::new();
        for i in 0..total as usize {
            if class_of[i] != usize::MAX {
                continue;
            }
            // index order is lexicographic, so the first unseen member of an
            // orbit is its least rotation
            let t = product_coords(i, &sizes);
            let c = representatives.len();
            for r in 0..p {
                class_of[product_index(&rotate(&t, r), &sizes)] = c;
            }
            representatives.push(t);
        }
        Ok(Necklaces {
            n,
            p,
            representatives,
            class_of,
        })
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn class(&self, t: &[usize]) -> usize {
        self.class_of[product_index(t, &vec![self.n; self.p])]
    }
}

/// Visits every p-row matrix whose rows are relation tuples, passing the
/// k columns (each a p-tuple).
fn for_each_matrix(s: &KStructure, p: usize, mut visit: impl FnMut(&[Vec<usize>])) -> Result<()> {
    let rows: Vec<&Tuple> = s.relation().iter().collect();
    let k = s.arity();
    let total = (rows.len() as u128).checked_pow(p as u32).unwrap_or(u128::MAX);
    if total > MATRIX_LIMIT {
        return Err(Error::TooLarge(total));
    }
    if rows.is_empty() {
        return Ok(());
    }
    let mut choice = vec![0usize; p];
    let mut columns = vec![vec![0usize; p]; k];
    loop {
        for (j, col) in columns.iter_mut().enumerate() {
            for (i, slot) in col.iter_mut().enumerate() {
                *slot = rows[choice[i]][j];
            }
        }
        visit(&columns);
        let mut pos = p;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < rows.len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// The p-th power of `s` modulo rotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub structure: KStructure,
    pub necklaces: Necklaces,
}

pub fn rotation_quotient(s: &KStructure, p: usize) -> Result<Quotient> {
    let necklaces = Necklaces::new(s.len(), p)?;
    let mut tuples = std::collections::BTreeSet::new();
    for_each_matrix(s, p, |columns| {
        tuples.insert(columns.iter().map(|c| necklaces.class(c)).collect::<Tuple>());
    })?;
    let names = necklaces
        .representatives
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().map(|&x| s.universe()[x].as_str()).collect();
            format!("[{}]", parts.join(","))
        })
        .collect();
    let structure = KStructure::new(s.arity(), names, tuples)?;
    Ok(Quotient { structure, necklaces })
}

/// A cyclic operation given by its values on necklace classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicOpTable {
    pub arity: usize,
    pub size: usize,
    pub representatives: Vec<Vec<usize>>,
    pub values: Vec<usize>,
}

impl CyclicOpTable {
    pub fn eval(&self, args: &[usize]) -> usize {
        let rep = least_rotation(args);
        let c = self
            .representatives
            .binary_search(&rep)
            .expect("representatives cover every necklace");
        self.values[c]
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.size).all(|x| self.eval(&vec![x; self.arity]) == x)
    }

    /// Brute-force check over every matrix of relation tuples.
    pub fn is_polymorphism(&self, s: &KStructure) -> Result<bool> {
        let mut ok = true;
        let mut image = vec![0; s.arity()];
        for_each_matrix(s, self.arity, |columns| {
            if ok {
                for (slot, c) in image.iter_mut().zip(columns) {
                    *slot = self.eval(c);
                }
                ok = s.contains(&image);
            }
        })?;
        Ok(ok)
    }
}

/// Rotating coordinates is an automorphism of the p-th power.
pub fn rotation_is_automorphism(s: &KStructure, p: usize) -> Result<bool> {
    let power = direct_power(s, p)?;
    let sizes = vec![s.len(); p];
    let perm: Vec<usize> = (0..power.len())
        .map(|x| product_index(&rotate(&product_coords(x, &sizes), 1), &sizes))
        .collect();
    Ok(power.permuted(&perm)?.relation() == power.relation())
}

/// Result of a cyclic-polymorphism search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicSearch {
    pub table: Option<CyclicOpTable>,
    pub classes: usize,
    pub nodes: u64,
}

/// Searches for a cyclic polymorphism of arity `p`; `idempotent` restricts
/// to operations fixing every constant tuple.
pub fn cyclic_polymorphism(
    s: &KStructure,
    p: usize,
    idempotent: bool,
    limits: Limits,
) -> Result<CyclicSearch> {
    let q = rotation_quotient(s, p)?;
    let mut problem = HomProblem::new(&q.structure, s)?;
    if idempotent {
        for x in 0..s.len() {
            problem = problem.pin(q.necklaces.class(&vec![x; p]), x);
        }
    }
    let mut found = None;
    let stats = problem.solve_with(limits, &mut |map| {
        found = Some(map.to_vec());
        false
    })?;
    let table = found.map(|values| CyclicOpTable {
        arity: p,
        size: s.len(),
        representatives: q.necklaces.representatives.clone(),
        values,
    });
    Ok(CyclicSearch {
        table,
        classes: q.necklaces.len(),
        nodes: stats.nodes,
    })
}

fn min_cardinality(s: &KStructure) -> Result<usize> {
    if !s.is_set_closed() {
        return Err(Error::NotSetClosed);
    }
    if !s.is_loop_free() {
        return Err(Error::HasLoop);
    }
    Ok(s.cardinality_range().map_or(0, |(lo, _)| lo))
}

/// The graph defined by `(x1, x2, x3, ..., x_{d-1}, x_d, ..., x_d) in r`
/// with `x3..x_d` existentially quantified, `d` the least edge size.
pub fn derive_sim(s: &KStructure) -> Result<KStructure> {
    let d = min_cardinality(s)?;
    if d <= 2 {
        return Err(Error::MinCardinalityNotAbove2(d));
    }
    let k = s.arity();
    let pairs: Vec<Tuple> = s
        .relation()
        .iter()
        .filter(|t| t[d - 1..k].iter().all(|&x| x == t[d - 1]))
        .map(|t| vec![t[0], t[1]])
        .collect();
    KStructure::new(2, s.universe().to_vec(), pairs)
}

/// A binary sequence of length `p` in which every cyclic window of `k`
/// consecutive entries contains both symbols.
pub fn nae_sequence(p: usize, k: usize) -> Result<Vec<u8>> {
    if p < 2 || k < 2 || (k == 2 && p % 2 == 1) {
        return Err(Error::NoSuchSequence { p, k });
    }
    let seq: Vec<u8> = if p.is_multiple_of(2) {
        (0..p).map(|i| (i % 2) as u8).collect()
    } else {
        let mut s = vec![0, 0, 1];
        for _ in 0..(p - 3) / 2 {
            s.extend([0, 1]);
        }
        s
    };
    debug_assert!(is_nae_sequence(&seq, k));
    Ok(seq)
}

pub fn is_nae_sequence(seq: &[u8], k: usize) -> bool {
    let p = seq.len();
    p > 0
        && seq.iter().all(|&b| b <= 1)
        && (0..p).all(|i| {
            let first = seq[i];
            (1..k).any(|j| seq[(i + j) % p] != first)
        })
}

/// Replay of the rotation argument against a concrete cyclic table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Replay {
    /// The k rotations of the sequence, fed to the operation.
    pub arguments: Vec<Vec<usize>>,
    /// The p cyclic windows of length k; each must be a relation tuple.
    pub windows: Vec<Tuple>,
    pub windows_related: bool,
    pub image: Tuple,
    pub image_constant: bool,
    pub image_related: bool,
}

impl Replay {
    /// True when the replay shows the table is not a polymorphism.
    pub fn refutes(&self) -> bool {
        self.windows_related && self.image_constant && !self.image_related
    }
}

/// Applies `table` to the k rotations of `seq` written over the edge
/// `{a, b}`. The windows are related, so a polymorphism would have to
/// relate the image, which cyclicity forces to be constant.
pub fn replay_sequence_argument(
    s: &KStructure,
    edge: [usize; 2],
    seq: &[u8],
    table: &CyclicOpTable,
) -> Replay {
    let k = s.arity();
    let p = seq.len();
    let over: Vec<usize> = seq.iter().map(|&b| edge[b as usize]).collect();
    let arguments: Vec<Vec<usize>> = (0..k).map(|r| rotate(&over, r % p.max(1))).collect();
    let windows: Vec<Tuple> = (0..p)
        .map(|i| (0..k).map(|j| over[(i + j) % p]).collect())
        .collect();
    let image: Tuple = arguments.iter().map(|a| table.eval(a)).collect();
    Replay {
        windows_related: windows.iter().all(|w| s.contains(w)),
        image_constant: image.iter().all(|&x| x == image[0]),
        image_related: s.contains(&image),
        arguments,
        windows,
        image,
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Least prime strictly greater than `n`.
pub fn next_prime(n: usize) -> usize {
    (n + 1..).find(|&m| is_prime(m)).unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum TractableReason {
    NoHyperedges,
    Bipartite { sides: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SearchMode {
    /// The quotient search finished without a solution.
    ExhaustiveSearch { classes: usize, nodes: u64 },
    /// Symbolic certificate: a sequence over a two-element edge whose
    /// rotation argument rules out every cyclic operation of arity p.
    SequenceArgument { edge: [usize; 2], sequence: Vec<u8> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "evidence", rename_all = "snake_case")]
pub enum Evidence {
    NonBipartiteGraph {
        odd_cycle: Vec<usize>,
    },
    SimNonBipartite {
        d: usize,
        odd_cycle: Vec<usize>,
    },
    NoCyclicPolymorphism {
        p: usize,
        #[serde(flatten)]
        mode: SearchMode,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Classification {
    Tractable(TractableReason),
    NpComplete(Evidence),
}

/// Options for [`classify_with`].
#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub limits: Limits,
    /// Largest necklace count attempted by exhaustive search.
    pub max_classes: usize,
    /// Largest number of relation matrices the quotient may enumerate.
    pub max_matrices: u128,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            limits: Limits::default(),
            max_classes: 5_000,
            max_matrices: 1_000_000,
        }
    }
}

pub fn classify(s: &KStructure) -> Result<Classification> {
    classify_with(s, ClassifyOptions::default())
}

pub fn classify_with(s: &KStructure, options: ClassifyOptions) -> Result<Classification> {
    if !s.is_loop_free() {
        return Err(Error::HasLoop);
    }
    let d = min_cardinality(s)?;
    if !s.has_tuples() {
        return Ok(Classification::Tractable(TractableReason::NoHyperedges));
    }
    if s.arity() == 2 {
        return Ok(match is_bipartite(s)? {
            Bipartiteness::Bipartite(sides) => {
                Classification::Tractable(TractableReason::Bipartite { sides })
            }
            Bipartiteness::OddCycle(odd_cycle) => {
                Classification::NpComplete(Evidence::NonBipartiteGraph { odd_cycle })
            }
        });
    }
    if d > 2 {
        let sim = derive_sim(s)?;
        let odd_cycle = ShadowGraph::of_structure(&sim)
            .odd_cycle()
            .ok_or_else(|| Error::Verification("derived graph is bipartite".into()))?;
        return Ok(Classification::NpComplete(Evidence::SimNonBipartite {
            d,
            odd_cycle,
        }));
    }
    let p = next_prime(s.len());
    let edge = s
        .underlying_sets()
        .into_iter()
        .find(|e| e.len() == 2)
        .expect("least edge size is 2");
    let small = Necklaces::new(s.len(), p).is_ok_and(|n| n.len() <= options.max_classes)
        && (s.relation().len() as u128)
            .checked_pow(p as u32)
            .is_some_and(|m| m <= options.max_matrices.min(MATRIX_LIMIT));
    if small {
        match cyclic_polymorphism(s, p, false, options.limits) {
            Ok(CyclicSearch {
                table: None,
                classes,
                nodes,
            }) => {
                return Ok(Classification::NpComplete(Evidence::NoCyclicPolymorphism {
                    p,
                    mode: SearchMode::ExhaustiveSearch { classes, nodes },
                }))
            }
            Ok(CyclicSearch { table: Some(_), .. }) => {
                return Err(Error::Verification(format!(
                    "found a cyclic polymorphism of arity {p}"
                )))
            }
            Err(e) if e.is_budget() || matches!(e, Error::TooLarge(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(Classification::NpComplete(Evidence::NoCyclicPolymorphism {
        p,
        mode: SearchMode::SequenceArgument {
            edge: [edge[0], edge[1]],
            sequence: nae_sequence(p, s.arity())?,
        },
    }))
}

impl Classification {
    pub fn is_tractable(&self) -> bool {
        matches!(self, Classification::Tractable(_))
    }

    /// Re-checks the evidence against `s`.
    pub fn validate(&self, s: &KStructure, limits: Limits) -> Result<()> {
        let fail = |m: &str| Err(Error::Verification(m.to_string()));
        match self {
            Classification::Tractable(TractableReason::NoHyperedges) => {
                if s.has_tuples() {
                    return fail("structure has tuples");
                }
            }
            Classification::Tractable(TractableReason::Bipartite { sides }) => {
                if s.arity() != 2 || sides.len() != s.len() || sides.iter().any(|&x| x > 1) {
                    return fail("malformed bipartition");
                }
                if s.relation().iter().any(|t| sides[t[0]] == sides[t[1]]) {
                    return fail("bipartition has a monochromatic edge");
                }
            }
            Classification::NpComplete(Evidence::NonBipartiteGraph { odd_cycle }) => {
                if s.arity() != 2 || !is_odd_cycle(&ShadowGraph::of_structure(s), odd_cycle) {
                    return fail("odd cycle does not validate");
                }
            }
            Classification::NpComplete(Evidence::SimNonBipartite { d, odd_cycle }) => {
                if min_cardinality(s)? != *d {
                    return fail("wrong least edge size");
                }
                let sim = derive_sim(s)?;
                if !is_odd_cycle(&ShadowGraph::of_structure(&sim), odd_cycle) {
                    return fail("odd cycle does not validate in the derived graph");
                }
            }
            Classification::NpComplete(Evidence::NoCyclicPolymorphism { p, mode }) => {
                if !is_prime(*p) || *p <= s.len() {
                    return fail("arity is not a prime above the universe size");
                }
                match mode {
                    SearchMode::ExhaustiveSearch { .. } => {
                        if cyclic_polymorphism(s, *p, false, limits)?.table.is_some() {
                            return fail("a cyclic polymorphism exists");
                        }
                    }
                    SearchMode::SequenceArgument { edge, sequence } => {
                        if s.arity() < 3 || sequence.len() != *p || !is_nae_sequence(sequence, s.arity()) {
                            return fail("sequence does not avoid constant windows");
                        }
                        if !s
                            .underlying_sets()
                            .contains(&vec![edge[0].min(edge[1]), edge[0].max(edge[1])])
                            || edge[0] == edge[1]
                        {
                            return fail("edge is not a two-element hyperedge");
                        }
                        if !s.is_loop_free() {
                            return fail("structure has a loop");
                        }
                        let k = s.arity();
                        let all_related = (0..*p).all(|i| {
                            let w: Tuple = (0..k).map(|j| edge[sequence[(i + j) % p] as usize]).collect();
                            s.contains(&w)
                        });
                        if !all_related {
                            return fail("a window is not a relation tuple");
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
