//! Structural analysis: Berge cycles and girth, hyperforests and leaves,
//! colourings, shadow-graph distances, balls and bipartiteness.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::structure::{Hypergraph, KStructure};

/// Undirected graph joining two distinct elements whenever they occur
/// together in a tuple (or an edge).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowGraph {
    adj: Vec<Vec<usize>>,
}

impl ShadowGraph {
    pub fn of_structure(s: &KStructure) -> Self {
        ShadowGraph { adj: s.adjacency() }
    }

    pub fn of_hypergraph(h: &Hypergraph) -> Self {
        let mut adj = vec![Vec::new(); h.num_vertices()];
        for e in h.edges() {
            for &a in e {
                adj[a].extend(e.iter().copied().filter(|&b| b != a));
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        ShadowGraph { adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbours(&self, a: usize) -> &[usize] {
        &self.adj[a]
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adj[a].len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// BFS distances from `a`; `None` marks unreachable elements.
    pub fn distances_from(&self, a: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::from([a]);
        dist[a] = Some(0);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected component label of every element, labels in order of first
    /// appearance.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.len()];
        let mut next = 0;
        for start in 0..self.len() {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn components(&self) -> usize {
        self.component_labels().into_iter().max().map_or(0, |m| m + 1)
    }

    /// An odd cycle, if the graph has one.
    pub fn odd_cycle(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut side = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        for start in 0..n {
            if side[start] != usize::MAX {
                continue;
            }
            side[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if side[w] == usize::MAX {
                        side[w] = 1 - side[u];
                        parent[w] = u;
                        depth[w] = depth[u] + 1;
                        queue.push_back(w);
                    } else if side[w] == side[u] {
                        return Some(tree_cycle(&parent, &depth, u, w));
                    }
                }
            }
        }
        None
    }

    /// Two-colouring of the vertices, if one exists.
    pub fn bipartition(&self) -> Option<Vec<usize>> {
        if self.odd_cycle().is_some() {
            return None;
        }
        let mut side = vec![usize::MAX; self.len()];
        for start in 0..self.len() {
            if side[start] != usize::MAX {
                continue;
            }
            side[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if side[w] == usize::MAX {
                        side[w] = 1 - side[u];
                        queue.push_back(w);
                    }
                }
            }
        }
        Some(side)
    }
}

/// Closes the tree paths from `u` and `w` to their lowest common ancestor
/// into a cycle through the non-tree edge `u - w`.
fn tree_cycle(parent: &[usize], depth: &[usize], u: usize, w: usize) -> Vec<usize> {
    let (mut a, mut b) = (u, w);
    let mut left = vec![a];
    let mut right = vec![b];
    while depth[a] > depth[b] {
        a = parent[a];
        left.push(a);
    }
    while depth[b] > depth[a] {
        b = parent[b];
        right.push(b);
    }
    while a != b {
        a = parent[a];
        b = parent[b];
        left.push(a);
        right.push(b);
    }
    // left runs u..lca, right runs w..lca
    right.pop();
    left.reverse();
    left.extend(right);
    left
}

/// Checks that consecutive entries (cyclically) are adjacent, entries are
/// distinct and the length is odd.
pub fn is_odd_cycle(graph: &ShadowGraph, cycle: &[usize]) -> bool {
    let n = cycle.len();
    n >= 3
        && n % 2 == 1
        && crate::structure::support(cycle).len() == n
        && cycle.iter().all(|&v| v < graph.len())
        && (0..n).all(|i| graph.adjacent(cycle[i], cycle[(i + 1) % n]))
}

/// A Berge cycle `v0, e0, v1, e1, ...` with `v_i` in `e_i` and `e_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleWitness {
    pub vertices: Vec<usize>,
    pub edges: Vec<Vec<usize>>,
}

impl CycleWitness {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Accepts either incidence convention (`v_i` in `e_i, e_{i+1}` or in
    /// `e_{i-1}, e_i`).
    pub fn is_valid(&self, h: &Hypergraph) -> bool {
        let n = self.vertices.len();
        if n < 2 || self.edges.len() != n {
            return false;
        }
        if crate::structure::support(&self.vertices).len() != n {
            return false;
        }
        let mut edges = self.edges.clone();
        edges.sort();
        edges.dedup();
        if edges.len() != n || !self.edges.iter().all(|e| h.edges().contains(e)) {
            return false;
        }
        let has = |e: &Vec<usize>, v: usize| e.binary_search(&v).is_ok();
        let forward = (0..n).all(|i| {
            has(&self.edges[i], self.vertices[i]) && has(&self.edges[(i + 1) % n], self.vertices[i])
        });
        let backward = (0..n).all(|i| {
            has(&self.edges[(i + n - 1) % n], self.vertices[i]) && has(&self.edges[i], self.vertices[i])
        });
        forward || backward
    }
}

struct Incidence {
    nv: usize,
    edges: Vec<Vec<usize>>,
    adj: Vec<Vec<usize>>,
}

impl Incidence {
    fn new(h: &Hypergraph) -> Self {
        let nv = h.num_vertices();
        let edges: Vec<Vec<usize>> = h.edges().iter().cloned().collect();
        let mut adj = vec![Vec::new(); nv + edges.len()];
        for (i, e) in edges.iter().enumerate() {
            for &v in e {
                adj[v].push(nv + i);
                adj[nv + i].push(v);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Incidence { nv, edges, adj }
    }

    /// Shortest cycle length through BFS from `s`, cut off at `bound`.
    fn shortest_from(&self, s: usize, bound: usize) -> Option<(usize, usize, usize)> {
        let n = self.adj.len();
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        let mut best: Option<(usize, usize, usize)> = None;
        while let Some(u) = queue.pop_front() {
            let limit = best.map_or(bound, |b| b.0.min(bound));
            if 2 * dist[u] >= limit {
                break;
            }
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    let len = dist[u] + dist[w] + 1;
                    if best.is_none_or(|b| len < b.0) {
                        best = Some((len, u, w));
                    }
                }
            }
        }
        best.filter(|b| b.0 < bound)
    }

    fn cycle_from(&self, s: usize, u: usize, w: usize) -> Vec<usize> {
        let n = self.adj.len();
        let mut depth = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        depth[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adj[x] {
                if depth[y] == usize::MAX {
                    depth[y] = depth[x] + 1;
                    parent[y] = x;
                    queue.push_back(y);
                }
            }
        }
        tree_cycle(&parent, &depth, u, w)
    }

    fn witness(&self, mut cycle: Vec<usize>) -> CycleWitness {
        let start = cycle.iter().position(|&x| x < self.nv).unwrap();
        cycle.rotate_left(start);
        let len = cycle.len();
        let n = len / 2;
        let vertices = (0..n).map(|i| cycle[2 * i]).collect();
        let edges = (0..n)
            .map(|i| self.edges[cycle[(2 * i + len - 1) % len] - self.nv].clone())
            .collect();
        CycleWitness { vertices, edges }
    }
}

/// Berge girth with a shortest cycle, or `None` when the hypergraph has no
/// cycle. Computed as half the shortest cycle of the vertex-edge incidence
/// graph, so the shortest possible cycle has length 2.
pub fn girth(h: &Hypergraph) -> Option<(usize, CycleWitness)> {
    let inc = Incidence::new(h);
    let mut best: Option<(usize, usize, usize, usize)> = None;
    for s in 0..inc.adj.len() {
        let bound = best.map_or(usize::MAX, |b| b.0);
        if let Some((len, u, w)) = inc.shortest_from(s, bound) {
            best = Some((len, s, u, w));
            if len == 4 {
                break;
            }
        }
    }
    best.map(|(len, s, u, w)| {
        let witness = inc.witness(inc.cycle_from(s, u, w));
        debug_assert_eq!(witness.len() * 2, len);
        (len / 2, witness)
    })
}

/// Girth as a plain number, `None` for infinite.
pub fn girth_value(h: &Hypergraph) -> Option<usize> {
    girth(h).map(|(g, _)| g)
}

/// True iff every cycle is longer than `bound`.
pub fn girth_exceeds(h: &Hypergraph, bound: usize) -> bool {
    girth_value(h).is_none_or(|g| g > bound)
}

pub fn is_hyperforest(h: &Hypergraph) -> bool {
    girth(h).is_none()
}

/// First edge (in canonical order) with at most one vertex shared with
/// other edges.
pub fn find_leaf(h: &Hypergraph) -> Option<Vec<usize>> {
    let mut degree = vec![0usize; h.num_vertices()];
    for e in h.edges() {
        for &v in e {
            degree[v] += 1;
        }
    }
    h.edges()
        .iter()
        .find(|e| e.iter().filter(|&&v| degree[v] >= 2).count() <= 1)
        .cloned()
}

/// A proper colouring: no edge is monochromatic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Colouring {
    pub colours: usize,
    pub assignment: Vec<usize>,
}

pub const DEFAULT_COLOUR_CAP: usize = 8;

/// Checks that no edge of `h` is monochromatic under `assignment`.
pub fn is_proper_colouring(h: &Hypergraph, assignment: &[usize]) -> bool {
    assignment.len() == h.num_vertices()
        && h.edges()
            .iter()
            .all(|e| e.iter().any(|&v| assignment[v] != assignment[e[0]]))
}

/// Colouring with at most `colours` colours, by backtracking with the
/// first vertex pinned to colour 0 and new colours opened one at a time.
pub fn colour_with(h: &Hypergraph, colours: usize) -> Result<Option<Vec<usize>>> {
    if !h.is_loop_free() {
        return Err(Error::HasLoop);
    }
    let n = h.num_vertices();
    if n == 0 {
        return Ok(Some(Vec::new()));
    }
    if colours == 0 {
        return Ok(None);
    }
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    let edges: Vec<&Vec<usize>> = h.edges().iter().collect();
    for (i, e) in edges.iter().enumerate() {
        for &v in e.iter() {
            incident[v].push(i);
        }
    }
    let order = colouring_order(n, &edges, &incident);
    let mut colour = vec![usize::MAX; n];
    fn rec(
        pos: usize,
        used: usize,
        limit: usize,
        order: &[usize],
        edges: &[&Vec<usize>],
        incident: &[Vec<usize>],
        colour: &mut [usize],
    ) -> bool {
        let Some(&v) = order.get(pos) else {
            return true;
        };
        let top = (used + 1).min(limit);
        for c in 0..top {
            colour[v] = c;
            let clash = incident[v]
                .iter()
                .any(|&i| edges[i].iter().all(|&u| colour[u] == c));
            if !clash && rec(pos + 1, used.max(c + 1), limit, order, edges, incident, colour) {
                return true;
            }
        }
        colour[v] = usize::MAX;
        false
    }
    Ok(rec(0, 0, colours, &order, &edges, &incident, &mut colour).then_some(colour))
}

/// Greedy order that closes edges early: repeatedly take the vertex with
/// most edges already touching the chosen set, then by degree.
fn colouring_order(n: usize, edges: &[&Vec<usize>], incident: &[Vec<usize>]) -> Vec<usize> {
    let mut placed = vec![false; n];
    let mut touched = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .max_by(|&a, &b| {
                (touched[a], incident[a].len())
                    .cmp(&(touched[b], incident[b].len()))
                    .then(b.cmp(&a))
            })
            .unwrap();
        placed[v] = true;
        order.push(v);
        for &i in &incident[v] {
            for &u in edges[i].iter() {
                touched[u] += 1;
            }
        }
    }
    order
}

/// Least number of colours (up to `cap`) leaving no edge monochromatic.
pub fn chromatic_number(h: &Hypergraph, cap: usize) -> Result<Colouring> {
    if !h.is_loop_free() {
        return Err(Error::HasLoop);
    }
    if h.num_vertices() == 0 {
        return Ok(Colouring {
            colours: 0,
            assignment: Vec::new(),
        });
    }
    for colours in 1..=cap {
        if let Some(assignment) = colour_with(h, colours)? {
            return Ok(Colouring { colours, assignment });
        }
    }
    Err(Error::CapExceeded(cap))
}

fn check_element(s: &KStructure, a: usize) -> Result<()> {
    if a >= s.len() {
        Err(Error::UnknownElement(a))
    } else {
        Ok(())
    }
}

/// Shadow-graph distance; `None` when `a` and `b` are in different
/// components.
pub fn distance(s: &KStructure, a: usize, b: usize) -> Result<Option<usize>> {
    check_element(s, a)?;
    check_element(s, b)?;
    Ok(ShadowGraph::of_structure(s).distances_from(a)[b])
}

/// The substructure induced on everything within distance `n` of a centre.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub structure: KStructure,
    /// Original index of each ball element, increasing.
    pub members: Vec<usize>,
    /// Index of the centre inside the ball.
    pub centre: usize,
    /// Ball indices at distance exactly `n` from the centre.
    pub boundary: Vec<usize>,
}

pub fn n_ball(s: &KStructure, a: usize, n: usize) -> Result<Ball> {
    check_element(s, a)?;
    let dist = ShadowGraph::of_structure(s).distances_from(a);
    n_ball_with(s, a, n, &dist)
}

pub(crate) fn n_ball_with(s: &KStructure, a: usize, n: usize, dist: &[Option<usize>]) -> Result<Ball> {
    let members: Vec<usize> = (0..s.len())
        .filter(|&x| dist[x].is_some_and(|d| d <= n))
        .collect();
    let structure = s.induced_substructure(&members)?;
    let centre = members.binary_search(&a).unwrap();
    let boundary = members
        .iter()
        .enumerate()
        .filter(|&(_, &x)| dist[x] == Some(n))
        .map(|(i, _)| i)
        .collect();
    Ok(Ball {
        structure,
        members,
        centre,
        boundary,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bipartiteness {
    /// Side (0 or 1) of every element.
    Bipartite(Vec<usize>),
    OddCycle(Vec<usize>),
}

/// Two-colourability of a loop-free, set-closed graph structure.
pub fn is_bipartite(s: &KStructure) -> Result<Bipartiteness> {
    if s.arity() != 2 {
        return Err(Error::PreconditionFailed(format!(
            "bipartiteness needs arity 2, found {}",
            s.arity()
        )));
    }
    if !s.is_loop_free() {
        return Err(Error::HasLoop);
    }
    if !s.is_set_closed() {
        return Err(Error::NotSetClosed);
    }
    let g = ShadowGraph::of_structure(s);
    Ok(match g.odd_cycle() {
        Some(c) => Bipartiteness::OddCycle(c),
        None => Bipartiteness::Bipartite(g.bipartition().unwrap()),
    })
}
