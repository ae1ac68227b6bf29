//! Membership in the class generated by finite templates under
//! substructures and direct products, decided through three separation
//! conditions:
//!
//! 1. some template receives a homomorphism;
//! 2. every pair of distinct elements is split by some homomorphism;
//! 3. every non-tuple of the source is sent outside the template relation
//!    by some homomorphism.
//!
//! A positive answer carries a certificate listing one witness per query;
//! [`verify_certificate`] re-checks it without trusting the search.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hom::{HomProblem, HomSet, Limits};
use crate::structure::{self, check_hom, KStructure, Tuple};

/// Homomorphisms enumerated per template before falling back to one
/// targeted search per query.
pub const DEFAULT_HOM_CAP: usize = 10_000;

const RAW_TUPLE_LIMIT: u128 = 10_000_000;

/// A homomorphism into template `template`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Witness {
    pub template: usize,
    pub map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub x: usize,
    pub y: usize,
    /// Index into [`MembershipCertificate::witnesses`].
    pub witness: usize,
}

/// Witness for one non-tuple. With set-closed inputs `tuple` represents
/// every tuple over the same underlying set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonTupleWitness {
    pub tuple: Tuple,
    pub witness: usize,
}

/// The first separation condition that fails, in canonical query order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum Failure {
    NoHomomorphism,
    Unseparated { x: usize, y: usize },
    NonTupleKept { tuple: Tuple },
}

impl Failure {
    pub fn id(&self) -> &'static str {
        match self {
            Failure::NoHomomorphism => "SEP1",
            Failure::Unseparated { .. } => "SEP2",
            Failure::NonTupleKept { .. } => "SEP3",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCertificate {
    pub member: bool,
    /// Distinct homomorphisms referenced by the tables below.
    pub witnesses: Vec<Witness>,
    pub exists: Option<usize>,
    pub pairs: Vec<PairWitness>,
    pub non_tuples: Vec<NonTupleWitness>,
    pub failure: Option<Failure>,
    /// Whether non-tuples were grouped by underlying set.
    pub by_set: bool,
}

/// Options for [`member_with`].
#[derive(Debug, Clone, Copy)]
pub struct MemberOptions {
    pub hom_cap: usize,
    pub limits: Limits,
}

impl Default for MemberOptions {
    fn default() -> Self {
        MemberOptions {
            hom_cap: DEFAULT_HOM_CAP,
            limits: Limits::default(),
        }
    }
}

fn check_inputs(s: &KStructure, templates: &[KStructure]) -> Result<()> {
    if templates.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if templates.iter().any(|m| m.arity() != s.arity()) {
        return Err(Error::MixedArity);
    }
    Ok(())
}

/// The non-tuples of `s` that need a witness, in canonical order, and
/// whether they stand for whole underlying-set classes.
fn non_tuple_queries(s: &KStructure, templates: &[KStructure]) -> Result<(Vec<Tuple>, bool)> {
    let k = s.arity();
    let n = s.len();
    let by_set = s.is_set_closed() && templates.iter().all(KStructure::is_set_closed);
    if by_set {
        let edges = s.underlying_sets();
        let mut out = Vec::new();
        for size in 1..=k.min(n) {
            for subset in subsets(n, size) {
                if !edges.contains(&subset) {
                    out.push(structure::tuples_with_support(&subset, k).swap_remove(0));
                }
            }
        }
        return Ok((out, true));
    }
    let total = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if total > RAW_TUPLE_LIMIT {
        return Err(Error::TooLarge(total));
    }
    let mut out = Vec::new();
    let mut t = vec![0usize; k];
    if n > 0 {
        loop {
            if !s.contains(&t) {
                out.push(t.clone());
            }
            let mut pos = k;
            loop {
                if pos == 0 {
                    return Ok((out, false));
                }
                pos -= 1;
                t[pos] += 1;
                if t[pos] < n {
                    break;
                }
                t[pos] = 0;
            }
        }
    }
    Ok((out, false))
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if size > n {
        return out;
    }
    let mut c: Vec<usize> = (0..size).collect();
    loop {
        out.push(c.clone());
        let mut i = size;
        while i > 0 && c[i - 1] == n - size + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        c[i - 1] += 1;
        for j in i..size {
            c[j] = c[j - 1] + 1;
        }
    }
}

fn image_outside(template: &KStructure, map: &[usize], tuple: &[usize]) -> bool {
    let image: Tuple = tuple.iter().map(|&x| map[x]).collect();
    !template.contains(&image)
}

enum Query<'q> {
    Pair(usize, usize),
    NonTuple(&'q [usize]),
}

struct Solver<'a> {
    s: &'a KStructure,
    templates: &'a [KStructure],
    sets: Vec<HomSet>,
    limits: Limits,
}

impl Solver<'_> {
    fn satisfies(&self, t: usize, map: &[usize], q: &Query) -> bool {
        match q {
            Query::Pair(x, y) => map[*x] != map[*y],
            Query::NonTuple(tuple) => image_outside(&self.templates[t], map, tuple),
        }
    }

    fn answer(&self, q: &Query) -> Result<Option<Witness>> {
        for (t, set) in self.sets.iter().enumerate() {
            if let Some(h) = set.homs.iter().find(|h| self.satisfies(t, h.map(), q)) {
                return Ok(Some(Witness {
                    template: t,
                    map: h.map().to_vec(),
                }));
            }
        }
        for (t, set) in self.sets.iter().enumerate() {
            if set.complete {
                continue;
            }
            let base = HomProblem::new(self.s, &self.templates[t])?;
            let problem = match q {
                Query::Pair(x, y) => base.distinct(*x, *y),
                Query::NonTuple(tuple) => base.avoid(tuple.to_vec()),
            };
            if let Some(h) = problem.first(self.limits)? {
                return Ok(Some(Witness {
                    template: t,
                    map: h.into_map(),
                }));
            }
        }
        Ok(None)
    }
}

struct Interner {
    witnesses: Vec<Witness>,
    index: std::collections::HashMap<Witness, usize>,
}

impl Interner {
    fn add(&mut self, w: Witness) -> usize {
        if let Some(&i) = self.index.get(&w) {
            return i;
        }
        let i = self.witnesses.len();
        self.index.insert(w.clone(), i);
        self.witnesses.push(w);
        i
    }
}

pub fn member(s: &KStructure, templates: &[KStructure], limits: Limits) -> Result<MembershipCertificate> {
    member_with(
        s,
        templates,
        MemberOptions {
            limits,
            ..MemberOptions::default()
        },
    )
}

pub fn member_with(
    s: &KStructure,
    templates: &[KStructure],
    options: MemberOptions,
) -> Result<MembershipCertificate> {
    check_inputs(s, templates)?;
    let sets = templates
        .iter()
        .map(|m| HomProblem::new(s, m)?.enumerate(options.hom_cap, options.limits))
        .collect::<Result<Vec<_>>>()?;
    let solver = Solver {
        s,
        templates,
        sets,
        limits: options.limits,
    };
    let mut interner = Interner {
        witnesses: Vec::new(),
        index: Default::default(),
    };
    let (non_tuples, by_set) = non_tuple_queries(s, templates)?;
    let mut cert = MembershipCertificate {
        member: false,
        witnesses: Vec::new(),
        exists: None,
        pairs: Vec::new(),
        non_tuples: Vec::new(),
        failure: None,
        by_set,
    };
    let first = solver
        .sets
        .iter()
        .enumerate()
        .find_map(|(t, set)| set.homs.first().map(|h| (t, h.map().to_vec())));
    let Some((t0, phi)) = first else {
        cert.failure = Some(Failure::NoHomomorphism);
        return Ok(cert);
    };
    let exists = interner.add(Witness {
        template: t0,
        map: phi,
    });
    cert.exists = Some(exists);

    let n = s.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect();
    let answers = pairs
        .par_iter()
        .map(|&(x, y)| solver.answer(&Query::Pair(x, y)))
        .collect::<Result<Vec<_>>>()?;
    for (&(x, y), answer) in pairs.iter().zip(answers) {
        match answer {
            Some(w) => cert.pairs.push(PairWitness {
                x,
                y,
                witness: interner.add(w),
            }),
            None => {
                cert.failure = Some(Failure::Unseparated { x, y });
                cert.witnesses = interner.witnesses;
                return Ok(cert);
            }
        }
    }

    // singleton classes of set-closed inputs go to singletons under any
    // map, so against loop-free templates every witness works
    let loop_free = templates.iter().all(KStructure::is_loop_free);
    let answers = non_tuples
        .par_iter()
        .map(|t| {
            if by_set && loop_free && structure::support(t).len() == 1 {
                Ok(None)
            } else {
                solver.answer(&Query::NonTuple(t)).map(Some)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    for (t, answer) in non_tuples.into_iter().zip(answers) {
        let witness = match answer {
            None => exists,
            Some(Some(w)) => interner.add(w),
            Some(None) => {
                cert.failure = Some(Failure::NonTupleKept { tuple: t });
                cert.witnesses = interner.witnesses;
                return Ok(cert);
            }
        };
        cert.non_tuples.push(NonTupleWitness { tuple: t, witness });
    }
    cert.member = true;
    cert.witnesses = interner.witnesses;
    Ok(cert)
}

/// Re-checks a certificate against the structures. Positive certificates
/// are checked completely; for negative ones the reported failure is
/// confirmed by a fresh targeted search.
pub fn verify_certificate(
    cert: &MembershipCertificate,
    s: &KStructure,
    templates: &[KStructure],
    limits: Limits,
) -> Result<()> {
    check_inputs(s, templates)?;
    let fail = |msg: String| Err(Error::Verification(msg));
    for (i, w) in cert.witnesses.iter().enumerate() {
        let Some(m) = templates.get(w.template) else {
            return fail(format!("witness {i} names missing template {}", w.template));
        };
        check_hom(s, m, &w.map).map_err(|e| Error::Verification(format!("witness {i}: {e}")))?;
    }
    let get = |i: usize| {
        cert.witnesses
            .get(i)
            .ok_or_else(|| Error::Verification(format!("dangling witness index {i}")))
    };
    if !cert.member {
        return match &cert.failure {
            None => fail("negative certificate without a failure".into()),
            Some(Failure::NoHomomorphism) => {
                for m in templates {
                    if HomProblem::new(s, m)?.first(limits)?.is_some() {
                        return fail("a homomorphism exists".into());
                    }
                }
                Ok(())
            }
            Some(Failure::Unseparated { x, y }) => {
                for m in templates {
                    if HomProblem::new(s, m)?.distinct(*x, *y).first(limits)?.is_some() {
                        return fail(format!("pair ({x},{y}) is separable"));
                    }
                }
                Ok(())
            }
            Some(Failure::NonTupleKept { tuple }) => {
                if s.contains(tuple) {
                    return fail(format!("{tuple:?} is a tuple of the source"));
                }
                for m in templates {
                    if HomProblem::new(s, m)?
                        .avoid(tuple.clone())
                        .first(limits)?
                        .is_some()
                    {
                        return fail(format!("{tuple:?} can be separated"));
                    }
                }
                Ok(())
            }
        };
    }
    if cert.failure.is_some() {
        return fail("positive certificate carries a failure".into());
    }
    match cert.exists {
        Some(i) => {
            get(i)?;
        }
        None => return fail("no homomorphism recorded".into()),
    }
    let n = s.len();
    let mut covered = vec![false; n * n];
    for p in &cert.pairs {
        if p.x >= n || p.y >= n {
            return fail(format!("pair ({},{}) out of range", p.x, p.y));
        }
        let w = get(p.witness)?;
        if w.map[p.x] == w.map[p.y] {
            return fail(format!("pair ({},{}) not separated", p.x, p.y));
        }
        covered[p.x * n + p.y] = true;
        covered[p.y * n + p.x] = true;
    }
    for x in 0..n {
        for y in x + 1..n {
            if !covered[x * n + y] {
                return fail(format!("pair ({x},{y}) has no witness"));
            }
        }
    }
    let (queries, by_set) = non_tuple_queries(s, templates)?;
    if by_set != cert.by_set {
        return fail("non-tuple grouping mismatch".into());
    }
    let recorded: std::collections::HashMap<&Tuple, usize> =
        cert.non_tuples.iter().map(|q| (&q.tuple, q.witness)).collect();
    for t in &queries {
        let Some(&i) = recorded.get(t) else {
            return fail(format!("non-tuple {t:?} has no witness"));
        };
        let w = get(i)?;
        if !image_outside(&templates[w.template], &w.map, t) {
            return fail(format!("non-tuple {t:?} is mapped into the relation"));
        }
        if by_set {
            // the class claim: every tuple over the same set maps outside
            let m = &templates[w.template];
            for other in structure::tuples_with_support(&structure::support(t), s.arity()) {
                if !image_outside(m, &w.map, &other) {
                    return fail(format!("class of {t:?} is not separated"));
                }
            }
        }
    }
    Ok(())
}

/// The embedding `x -> (h(x))_h` of a member into the power of its template
/// indexed by all homomorphisms. Coordinates are kept implicit; the power
/// itself is built only on request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerEmbedding {
    pub homs: Vec<Vec<usize>>,
    pub template_size: usize,
}

impl PowerEmbedding {
    pub fn exponent(&self) -> usize {
        self.homs.len()
    }

    /// Coordinates of the image of `x`.
    pub fn image(&self, x: usize) -> Vec<usize> {
        self.homs.iter().map(|h| h[x]).collect()
    }

    /// Checks injectivity, preservation and reflection of the relation.
    pub fn validate(&self, s: &KStructure, m: &KStructure) -> Result<()> {
        for h in &self.homs {
            check_hom(s, m, h)?;
        }
        let images: std::collections::HashSet<Vec<usize>> = (0..s.len()).map(|x| self.image(x)).collect();
        if images.len() != s.len() {
            return Err(Error::Verification("embedding is not injective".into()));
        }
        let (queries, by_set) = non_tuple_queries(s, std::slice::from_ref(m))?;
        for t in queries {
            let group = if by_set {
                structure::tuples_with_support(&structure::support(&t), s.arity())
            } else {
                vec![t]
            };
            for t in group {
                if self.homs.iter().all(|h| !image_outside(m, h, &t)) {
                    return Err(Error::Verification(format!(
                        "non-tuple {t:?} maps into the power's relation"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Builds the power and the embedding into it as an explicit map.
    pub fn materialize(&self, m: &KStructure) -> Result<(KStructure, Vec<usize>)> {
        let power = structure::direct_power(m, self.exponent())?;
        let sizes = vec![self.template_size; self.exponent()];
        let n = self.homs.first().map_or(0, Vec::len);
        let map = (0..n)
            .map(|x| structure::product_index(&self.image(x), &sizes))
            .collect();
        Ok((power, map))
    }
}

/// The canonical embedding of `s` into a power of `m`. Fails with
/// `NotMember` when the homomorphisms do not separate points or non-tuples.
pub fn power_embedding(s: &KStructure, m: &KStructure, cap: usize, limits: Limits) -> Result<PowerEmbedding> {
    let set = HomProblem::new(s, m)?.enumerate(cap, limits)?;
    if !set.complete {
        return Err(Error::HomSetTruncated(cap));
    }
    if set.is_empty() {
        return Err(Error::NotMember("no homomorphism".into()));
    }
    let embedding = PowerEmbedding {
        homs: set.homs.into_iter().map(|h| h.into_map()).collect(),
        template_size: m.len(),
    };
    embedding
        .validate(s, m)
        .map_err(|e| Error::NotMember(e.to_string()))?;
    Ok(embedding)
}

/// Outcome of checking that the k-element single edge lies in the class of
/// the `l`-element single edge viewed at arity k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaeReport {
    pub k: usize,
    pub l: usize,
    pub member: bool,
    /// Number of homomorphisms; equals the number of surjections k -> l.
    pub homomorphisms: u64,
    pub surjections: u64,
    /// Explicit separating maps for every non-edge class of size at least
    /// `l`: the class goes onto the first `l - 1` points, the rest onto the
    /// last one.
    pub constructed: Vec<(Vec<usize>, Vec<usize>)>,
    pub certificate: MembershipCertificate,
}

fn surjections(k: usize, l: usize) -> u64 {
    // inclusion-exclusion over the missed points
    let mut total: i128 = 0;
    let mut binom: i128 = 1;
    for j in 0..=l {
        let term = binom * ((l - j) as i128).pow(k as u32);
        total += if j % 2 == 0 { term } else { -term };
        binom = binom * (l - j) as i128 / (j + 1) as i128;
    }
    total as u64
}

pub fn nae_membership_suite(k: usize, l: usize, limits: Limits) -> Result<NaeReport> {
    if !(l > 1 && k > l && k <= 5) {
        return Err(Error::PreconditionFailed(format!(
            "needs 1 < l < k <= 5, got k = {k}, l = {l}"
        )));
    }
    let ek = crate::generators::single_edge(k)?.to_kstructure(k)?;
    let e = crate::generators::single_edge(l)?.to_kstructure(k)?;
    let certificate = member(&ek, std::slice::from_ref(&e), limits)?;
    verify_certificate(&certificate, &ek, std::slice::from_ref(&e), limits)?;
    let homomorphisms = HomProblem::new(&ek, &e)?.count(limits)?;
    let mut constructed = Vec::new();
    for j in l..k {
        for class in subsets(k, j) {
            let mut map = vec![l - 1; k];
            for (i, &x) in class.iter().enumerate() {
                map[x] = i.min(l - 2);
            }
            check_hom(&ek, &e, &map)?;
            let image = structure::support(&class.iter().map(|&x| map[x]).collect::<Vec<_>>());
            if e.underlying_sets().contains(&image) {
                return Err(Error::Verification(format!("class {class:?} not separated")));
            }
            constructed.push((class, map));
        }
    }
    Ok(NaeReport {
        k,
        l,
        member: certificate.member,
        homomorphisms,
        surjections: surjections(k, l),
        constructed,
        certificate,
    })
}
