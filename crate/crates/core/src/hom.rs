//! Homomorphism search: existence, enumeration and counting.
//!
//! The solver is a backtracking search over source elements with a static
//! variable order (descending shadow-graph degree, ties by index) and values
//! tried in index order, so the first witness is always the same one. Every
//! node runs table-based generalised arc consistency: each source tuple is a
//! table constraint over its distinct entries, and a candidate value is kept
//! only while some target row supports it against the current domains.
//! Set-closed targets share one table per scope size, since only the image
//! set of a tuple matters there.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::{self, check_hom, Homomorphism, KStructure, Tuple};

/// Node and wall-clock caps for one search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_nodes: 10_000_000,
            time_limit: Some(Duration::from_secs(60)),
        }
    }
}

impl Limits {
    pub fn nodes(max_nodes: u64) -> Self {
        Limits {
            max_nodes,
            time_limit: None,
        }
    }

    pub fn unlimited() -> Self {
        Limits {
            max_nodes: u64::MAX,
            time_limit: None,
        }
    }
}

/// Search statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub nodes: u64,
    pub solutions: u64,
}

/// The homomorphisms from a source into a target, possibly truncated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomSet {
    pub homs: Vec<Homomorphism>,
    /// False when enumeration stopped at the cap.
    pub complete: bool,
}

impl HomSet {
    pub fn len(&self) -> usize {
        self.homs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.homs.is_empty()
    }
}

#[derive(Clone)]
struct Domains {
    words: usize,
    bits: Vec<u64>,
}

impl Domains {
    fn full(vars: usize, values: usize) -> Self {
        let words = values.div_ceil(64).max(1);
        let mut bits = vec![0u64; vars * words];
        for v in 0..vars {
            for x in 0..values {
                bits[v * words + x / 64] |= 1 << (x % 64);
            }
        }
        Domains { words, bits }
    }

    fn row(&self, var: usize) -> &[u64] {
        &self.bits[var * self.words..(var + 1) * self.words]
    }

    fn has(&self, var: usize, x: usize) -> bool {
        self.bits[var * self.words + x / 64] >> (x % 64) & 1 == 1
    }

    fn size(&self, var: usize) -> u32 {
        self.row(var).iter().map(|w| w.count_ones()).sum()
    }

    fn single(&self, var: usize) -> Option<usize> {
        let mut found = None;
        for (i, &w) in self.row(var).iter().enumerate() {
            if w != 0 {
                if found.is_some() || w.count_ones() > 1 {
                    return None;
                }
                found = Some(i * 64 + w.trailing_zeros() as usize);
            }
        }
        found
    }

    fn values(&self, var: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, &w) in self.row(var).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(i * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    fn set_single(&mut self, var: usize, x: usize) {
        let words = self.words;
        for w in &mut self.bits[var * words..(var + 1) * words] {
            *w = 0;
        }
        self.bits[var * words + x / 64] |= 1 << (x % 64);
    }

    fn remove(&mut self, var: usize, x: usize) -> bool {
        let slot = &mut self.bits[var * self.words + x / 64];
        let before = *slot;
        *slot &= !(1 << (x % 64));
        before != *slot
    }

    /// Intersects with `mask`; returns whether anything changed.
    fn restrict(&mut self, var: usize, mask: &[u64]) -> bool {
        let words = self.words;
        let mut changed = false;
        for (w, m) in self.bits[var * words..(var + 1) * words].iter_mut().zip(mask) {
            let next = *w & m;
            changed |= next != *w;
            *w = next;
        }
        changed
    }

    fn is_empty(&self, var: usize) -> bool {
        self.row(var).iter().all(|&w| w == 0)
    }
}

struct Table {
    scope: Vec<usize>,
    rows: Arc<Vec<Tuple>>,
}

enum Side {
    Distinct(usize, usize),
    /// Source tuple whose image must fall outside the target relation.
    Avoid(Tuple),
}

/// A homomorphism query with optional side conditions.
pub struct HomProblem<'a> {
    source: &'a KStructure,
    target: &'a KStructure,
    pins: Vec<(usize, usize)>,
    sides: Vec<Side>,
}

struct Compiled {
    tables: Vec<Table>,
    sides: Vec<(Vec<usize>, Side)>,
    var_tables: Vec<Vec<usize>>,
    var_sides: Vec<Vec<usize>>,
    order: Vec<usize>,
    values: usize,
}

impl<'a> HomProblem<'a> {
    pub fn new(source: &'a KStructure, target: &'a KStructure) -> Result<Self> {
        if source.arity() != target.arity() {
            return Err(Error::MixedArity);
        }
        Ok(HomProblem {
            source,
            target,
            pins: Vec::new(),
            sides: Vec::new(),
        })
    }

    /// Forces `x` to map to `y`.
    pub fn pin(mut self, x: usize, y: usize) -> Self {
        self.pins.push((x, y));
        self
    }

    /// Requires `x` and `y` to have different images.
    pub fn distinct(mut self, x: usize, y: usize) -> Self {
        self.sides.push(Side::Distinct(x, y));
        self
    }

    /// Requires the image of `tuple` to lie outside the target relation.
    pub fn avoid(mut self, tuple: Tuple) -> Self {
        self.sides.push(Side::Avoid(tuple));
        self
    }

    fn compile(&self) -> Result<Compiled> {
        let n = self.source.len();
        let k = self.source.arity();
        for &(x, y) in &self.pins {
            if x >= n {
                return Err(Error::UnknownElement(x));
            }
            if y >= self.target.len() {
                return Err(Error::UnknownElement(y));
            }
        }
        let set_closed = self.target.is_set_closed();
        let edges: Vec<Vec<usize>> = if set_closed {
            self.target.underlying_sets().into_iter().collect()
        } else {
            Vec::new()
        };
        let mut by_size: HashMap<usize, Arc<Vec<Tuple>>> = HashMap::new();
        let mut by_pattern: HashMap<Vec<usize>, Arc<Vec<Tuple>>> = HashMap::new();
        let mut seen: HashMap<(Vec<usize>, usize), ()> = HashMap::new();
        let mut tables = Vec::new();
        for t in self.source.relation() {
            let scope = structure::support(t);
            let pattern: Vec<usize> = t.iter().map(|x| scope.binary_search(x).unwrap()).collect();
            let rows = if set_closed {
                by_size
                    .entry(scope.len())
                    .or_insert_with(|| {
                        let mut rows: Vec<Tuple> = edges
                            .iter()
                            .flat_map(|e| structure::tuples_with_support(e, scope.len()))
                            .collect();
                        rows.sort();
                        Arc::new(rows)
                    })
                    .clone()
            } else {
                by_pattern
                    .entry(pattern.clone())
                    .or_insert_with(|| {
                        let width = scope.len();
                        let mut rows: Vec<Tuple> = self
                            .target
                            .relation()
                            .iter()
                            .filter_map(|r| {
                                let mut row = vec![usize::MAX; width];
                                for (pos, &slot) in pattern.iter().enumerate() {
                                    if row[slot] == usize::MAX {
                                        row[slot] = r[pos];
                                    } else if row[slot] != r[pos] {
                                        return None;
                                    }
                                }
                                Some(row)
                            })
                            .collect();
                        rows.sort();
                        rows.dedup();
                        Arc::new(rows)
                    })
                    .clone()
            };
            let key = (scope.clone(), Arc::as_ptr(&rows) as usize);
            if seen.insert(key, ()).is_none() {
                tables.push(Table { scope, rows });
            }
        }
        let mut sides = Vec::new();
        for side in &self.sides {
            let vars = match side {
                Side::Distinct(x, y) => vec![*x, *y],
                Side::Avoid(t) => {
                    if t.len() != k {
                        return Err(Error::TupleLength {
                            expected: k,
                            found: t.len(),
                        });
                    }
                    structure::support(t)
                }
            };
            if let Some(&bad) = vars.iter().find(|&&v| v >= n) {
                return Err(Error::UnknownElement(bad));
            }
            let copy = match side {
                Side::Distinct(x, y) => Side::Distinct(*x, *y),
                Side::Avoid(t) => Side::Avoid(t.clone()),
            };
            sides.push((vars, copy));
        }
        let mut var_tables = vec![Vec::new(); n];
        for (i, t) in tables.iter().enumerate() {
            for &v in &t.scope {
                var_tables[v].push(i);
            }
        }
        let mut var_sides = vec![Vec::new(); n];
        for (i, (vars, _)) in sides.iter().enumerate() {
            for &v in vars {
                if !var_sides[v].contains(&i) {
                    var_sides[v].push(i);
                }
            }
        }
        let adjacency = self.source.adjacency();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| adjacency[b].len().cmp(&adjacency[a].len()).then(a.cmp(&b)));
        Ok(Compiled {
            tables,
            sides,
            var_tables,
            var_sides,
            order,
            values: self.target.len(),
        })
    }

    /// First homomorphism in the solver's canonical order.
    pub fn first(&self, limits: Limits) -> Result<Option<Homomorphism>> {
        let mut found = None;
        self.solve_with(limits, &mut |map| {
            found = Some(map.to_vec());
            false
        })?;
        Ok(found.map(|map| {
            debug_assert!(check_hom(self.source, self.target, &map).is_ok());
            Homomorphism::unchecked(map)
        }))
    }

    /// Up to `cap` homomorphisms.
    pub fn enumerate(&self, cap: usize, limits: Limits) -> Result<HomSet> {
        let mut homs = Vec::new();
        let mut complete = true;
        if cap == 0 {
            let any = self.first(limits)?;
            return Ok(HomSet {
                homs,
                complete: any.is_none(),
            });
        }
        self.solve_with(limits, &mut |map| {
            if homs.len() == cap {
                complete = false;
                return false;
            }
            homs.push(Homomorphism::unchecked(map.to_vec()));
            true
        })?;
        Ok(HomSet { homs, complete })
    }

    pub fn count(&self, limits: Limits) -> Result<u64> {
        self.solve_with(limits, &mut |_| true).map(|s| s.solutions)
    }

    /// Runs the search, handing every solution to `visit`; the search stops
    /// as soon as `visit` returns false.
    pub fn solve_with(&self, limits: Limits, visit: &mut dyn FnMut(&[usize]) -> bool) -> Result<Stats> {
        let compiled = self.compile()?;
        let mut search = Search {
            c: &compiled,
            limits,
            start: Instant::now(),
            stats: Stats::default(),
            visit,
        };
        let n = self.source.len();
        let mut dom = Domains::full(n, compiled.values);
        for &(x, y) in &self.pins {
            if !dom.has(x, y) {
                return Ok(search.stats);
            }
            dom.set_single(x, y);
        }
        if (0..n).any(|v| dom.is_empty(v)) {
            return Ok(search.stats);
        }
        let all_tables: Vec<usize> = (0..compiled.tables.len()).collect();
        let all_sides: Vec<usize> = (0..compiled.sides.len()).collect();
        if propagate(&compiled, self.target, &mut dom, all_tables, all_sides) {
            search.run(self.target, dom)?;
        }
        Ok(search.stats)
    }
}

struct Search<'c, 'v> {
    c: &'c Compiled,
    limits: Limits,
    start: Instant,
    stats: Stats,
    visit: &'v mut dyn FnMut(&[usize]) -> bool,
}

impl Search<'_, '_> {
    /// Returns Ok(false) once the visitor asks to stop.
    fn run(&mut self, target: &KStructure, dom: Domains) -> Result<bool> {
        let Some(&var) = self.c.order.iter().find(|&&v| dom.size(v) > 1) else {
            let map: Vec<usize> = (0..self.c.order.len()).map(|v| dom.single(v).unwrap()).collect();
            self.stats.solutions += 1;
            return Ok((self.visit)(&map));
        };
        for x in dom.values(var) {
            self.stats.nodes += 1;
            if self.stats.nodes > self.limits.max_nodes {
                return Err(Error::BudgetExhausted {
                    nodes: self.stats.nodes - 1,
                });
            }
            if self.stats.nodes.is_multiple_of(1024) {
                if let Some(limit) = self.limits.time_limit {
                    if self.start.elapsed() > limit {
                        return Err(Error::BudgetExhausted {
                            nodes: self.stats.nodes,
                        });
                    }
                }
            }
            let mut next = dom.clone();
            next.set_single(var, x);
            if propagate(
                self.c,
                target,
                &mut next,
                self.c.var_tables[var].clone(),
                self.c.var_sides[var].clone(),
            ) && !self.run(target, next)?
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Runs table and side-condition revisions to a fixpoint. Returns false on
/// a wipe-out.
fn propagate(
    c: &Compiled,
    target: &KStructure,
    dom: &mut Domains,
    mut table_queue: Vec<usize>,
    mut side_queue: Vec<usize>,
) -> bool {
    let mut queued_table = vec![false; c.tables.len()];
    for &t in &table_queue {
        queued_table[t] = true;
    }
    let mut queued_side = vec![false; c.sides.len()];
    for &s in &side_queue {
        queued_side[s] = true;
    }
    let mut changed_vars: Vec<usize> = Vec::new();
    let mut supports: Vec<Vec<u64>> = Vec::new();
    loop {
        if let Some(t) = table_queue.pop() {
            queued_table[t] = false;
            let table = &c.tables[t];
            let width = table.scope.len();
            supports.resize(width.max(supports.len()), Vec::new());
            for s in supports.iter_mut().take(width) {
                s.clear();
                s.resize(dom.words, 0);
            }
            for row in table.rows.iter() {
                if row.iter().zip(&table.scope).all(|(&x, &v)| dom.has(v, x)) {
                    for (p, &x) in row.iter().enumerate() {
                        supports[p][x / 64] |= 1 << (x % 64);
                    }
                }
            }
            for (p, &v) in table.scope.iter().enumerate() {
                if dom.restrict(v, &supports[p]) {
                    if dom.is_empty(v) {
                        return false;
                    }
                    changed_vars.push(v);
                }
            }
        } else if let Some(s) = side_queue.pop() {
            queued_side[s] = false;
            match revise_side(c, s, target, dom, &mut changed_vars) {
                Some(()) => {}
                None => return false,
            }
        } else {
            return true;
        }
        for v in changed_vars.drain(..) {
            for &t in &c.var_tables[v] {
                if !queued_table[t] {
                    queued_table[t] = true;
                    table_queue.push(t);
                }
            }
            for &s in &c.var_sides[v] {
                if !queued_side[s] {
                    queued_side[s] = true;
                    side_queue.push(s);
                }
            }
        }
    }
}

fn revise_side(
    c: &Compiled,
    s: usize,
    target: &KStructure,
    dom: &mut Domains,
    changed: &mut Vec<usize>,
) -> Option<()> {
    let (vars, side) = &c.sides[s];
    match side {
        Side::Distinct(x, y) => {
            if x == y {
                return None;
            }
            for (a, b) in [(*x, *y), (*y, *x)] {
                if let Some(val) = dom.single(a) {
                    if dom.remove(b, val) {
                        if dom.is_empty(b) {
                            return None;
                        }
                        changed.push(b);
                    }
                }
            }
        }
        Side::Avoid(tuple) => {
            let open: Vec<usize> = vars
                .iter()
                .copied()
                .filter(|&v| dom.single(v).is_none())
                .collect();
            let image = |z: Option<(usize, usize)>| -> Tuple {
                tuple
                    .iter()
                    .map(|&v| match z {
                        Some((var, val)) if var == v => val,
                        _ => dom.single(v).unwrap(),
                    })
                    .collect()
            };
            match open.as_slice() {
                [] => {
                    if target.contains(&image(None)) {
                        return None;
                    }
                }
                [z] => {
                    let bad: Vec<usize> = dom
                        .values(*z)
                        .into_iter()
                        .filter(|&val| target.contains(&image(Some((*z, val)))))
                        .collect();
                    if !bad.is_empty() {
                        for val in bad {
                            dom.remove(*z, val);
                        }
                        if dom.is_empty(*z) {
                            return None;
                        }
                        changed.push(*z);
                    }
                }
                _ => {}
            }
        }
    }
    Some(())
}

/// A homomorphism from `s` to `t`, or `None` after an exhaustive search.
pub fn hom_exists(s: &KStructure, t: &KStructure, limits: Limits) -> Result<Option<Homomorphism>> {
    HomProblem::new(s, t)?.first(limits)
}

pub fn hom_enumerate(s: &KStructure, t: &KStructure, cap: usize, limits: Limits) -> Result<HomSet> {
    HomProblem::new(s, t)?.enumerate(cap, limits)
}

pub fn hom_count(s: &KStructure, t: &KStructure, limits: Limits) -> Result<u64> {
    HomProblem::new(s, t)?.count(limits)
}

/// An `n`-colouring of a set-closed loop-free structure, found as a
/// homomorphism into the complete hypergraph on `n` points.
pub fn colourable(s: &KStructure, n: usize, limits: Limits) -> Result<Option<Homomorphism>> {
    if !s.is_set_closed() {
        return Err(Error::NotSetClosed);
    }
    if !s.is_loop_free() {
        return Err(Error::HasLoop);
    }
    if n == 0 {
        return Ok(s.is_empty().then(|| Homomorphism::unchecked(Vec::new())));
    }
    let complete = crate::generators::complete_hypergraph(n, s.arity())?.to_kstructure(s.arity())?;
    hom_exists(s, &complete, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_hypergraph, single_edge};
    use crate::structure::Hypergraph;

    fn graph(n: usize, edges: &[[usize; 2]]) -> KStructure {
        Hypergraph::with_size(n, edges.iter().map(|e| e.to_vec()))
            .unwrap()
            .to_kstructure(2)
            .unwrap()
    }

    fn fano3() -> KStructure {
        crate::generators::fano_plane().to_kstructure(3).unwrap()
    }

    #[test]
    fn existence_examples() {
        let k2 = graph(2, &[[0, 1]]);
        let k3 = graph(3, &[[0, 1], [1, 2], [0, 2]]);
        assert!(hom_exists(&k3, &k2, Limits::default()).unwrap().is_none());
        let k2_3 = complete_hypergraph(2, 3).unwrap().to_kstructure(3).unwrap();
        let e3 = single_edge(3).unwrap().to_kstructure(3).unwrap();
        let h = hom_exists(&e3, &k2_3, Limits::default()).unwrap().unwrap();
        assert!(h.is_valid(&e3, &k2_3));
        assert!(hom_exists(&fano3(), &k2_3, Limits::default()).unwrap().is_none());
    }

    #[test]
    fn enumeration_examples() {
        let k2 = graph(2, &[[0, 1]]);
        let p3 = graph(3, &[[0, 1], [1, 2]]);
        let homs = hom_enumerate(&p3, &k2, 100, Limits::default()).unwrap();
        assert!(homs.complete);
        assert_eq!(homs.len(), 2);
        for h in &homs.homs {
            assert_eq!(h.apply(0), h.apply(2));
        }
        assert_eq!(hom_enumerate(&k2, &k2, 100, Limits::default()).unwrap().len(), 2);
        let g1 = KStructure::with_size(2, 1, []).unwrap();
        let k3 = graph(3, &[[0, 1], [1, 2], [0, 2]]);
        assert_eq!(hom_count(&g1, &k3, Limits::default()).unwrap(), 3);

        let truncated = hom_enumerate(&p3, &k2, 1, Limits::default()).unwrap();
        assert_eq!(truncated.len(), 1);
        assert!(!truncated.complete);
    }

    #[test]
    fn colourability() {
        let chain = Hypergraph::with_size(7, [[0, 1, 2], [2, 3, 4], [4, 5, 6]])
            .unwrap()
            .to_kstructure(3)
            .unwrap();
        assert!(colourable(&chain, 2, Limits::default()).unwrap().is_some());
        let k3 = graph(3, &[[0, 1], [1, 2], [0, 2]]);
        assert!(colourable(&k3, 2, Limits::default()).unwrap().is_none());
        assert!(colourable(&fano3(), 3, Limits::default()).unwrap().is_some());
        assert!(colourable(&fano3(), 2, Limits::default()).unwrap().is_none());
    }

    #[test]
    fn side_conditions() {
        let k2 = graph(2, &[[0, 1]]);
        let g2 = KStructure::with_size(2, 2, []).unwrap();
        let p = HomProblem::new(&g2, &k2).unwrap().distinct(0, 1);
        assert_eq!(p.count(Limits::default()).unwrap(), 2);
        let p = HomProblem::new(&g2, &k2).unwrap().avoid(vec![0, 1]);
        // images outside {(0,1),(1,0)}: the two constant maps
        assert_eq!(p.count(Limits::default()).unwrap(), 2);
        let p = HomProblem::new(&g2, &k2).unwrap().pin(0, 1).avoid(vec![0, 1]);
        assert_eq!(p.first(Limits::default()).unwrap().unwrap().map(), &[1, 1]);
    }

    #[test]
    fn budget_is_an_error_not_a_no() {
        let k4 = complete_hypergraph(6, 2).unwrap().to_kstructure(2).unwrap();
        let k3 = graph(3, &[[0, 1], [1, 2], [0, 2]]);
        let err = hom_exists(&k4, &k3, Limits::nodes(3)).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn mixed_arity_rejected() {
        let k2 = graph(2, &[[0, 1]]);
        let e3 = single_edge(3).unwrap().to_kstructure(3).unwrap();
        assert_eq!(
            hom_exists(&k2, &e3, Limits::default()).unwrap_err(),
            Error::MixedArity
        );
    }
}
