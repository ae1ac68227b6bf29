//! Hypergraphs, single-relation k-ary structures and the algebraic
//! constructions on them.
//!
//! Element names are opaque strings on the outside and dense indices
//! `0..n` on the inside; the index order is the input order. Relations and
//! edge sets live in `BTreeSet`s so two structures are equal exactly when
//! their canonical forms are.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};

pub type Tuple = Vec<usize>;

fn check_names(names: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(names.len());
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateName(name.clone()));
        }
    }
    Ok(())
}

fn numbered(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn name_index(names: &[String]) -> HashMap<&str, usize> {
    names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect()
}

/// A finite hypergraph: vertices plus a set of non-empty vertex subsets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    vertices: Vec<String>,
    edges: BTreeSet<Vec<usize>>,
}

impl Hypergraph {
    /// Builds a hypergraph from vertex names and edges given as index lists.
    /// Edges are normalised to sorted vertex sets and deduplicated.
    pub fn new<I, E>(vertices: Vec<String>, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: IntoIterator<Item = usize>,
    {
        check_names(&vertices)?;
        let n = vertices.len();
        let mut set = BTreeSet::new();
        for edge in edges {
            let mut e: Vec<usize> = edge.into_iter().collect();
            if let Some(&bad) = e.iter().find(|&&v| v >= n) {
                return Err(Error::UnknownElement(bad));
            }
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(Error::EmptyEdge);
            }
            set.insert(e);
        }
        Ok(Hypergraph { vertices, edges: set })
    }

    /// Vertices named `"0"..."n-1"`.
    pub fn with_size<I, E>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: IntoIterator<Item = usize>,
    {
        Self::new(numbered(n), edges)
    }

    /// Edges given by vertex names.
    pub fn from_named(vertices: &[&str], edges: &[&[&str]]) -> Result<Self> {
        let names: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let index = name_index(&names);
        let mut idx_edges = Vec::with_capacity(edges.len());
        for edge in edges {
            let mut e = Vec::with_capacity(edge.len());
            for v in edge.iter() {
                e.push(*index.get(v).ok_or_else(|| Error::UnknownName(v.to_string()))?);
            }
            idx_edges.push(e);
        }
        Self::new(names, idx_edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &BTreeSet<Vec<usize>> {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }

    pub fn is_loop_free(&self) -> bool {
        self.edges.iter().all(|e| e.len() >= 2)
    }

    pub fn is_uniform(&self, k: usize) -> bool {
        self.edges.iter().all(|e| e.len() == k)
    }

    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn has_edge(&self, edge: &[usize]) -> bool {
        let mut e = edge.to_vec();
        e.sort_unstable();
        e.dedup();
        self.edges.contains(&e)
    }

    /// Copy without the listed edges.
    pub fn without_edges(&self, remove: &[Vec<usize>]) -> Hypergraph {
        let mut edges = self.edges.clone();
        for e in remove {
            edges.remove(e);
        }
        Hypergraph {
            vertices: self.vertices.clone(),
            edges,
        }
    }

    /// Hypergraph induced on `subset` in the model-theoretic sense: only
    /// edges lying entirely inside the subset survive.
    pub fn induced(&self, subset: &[usize]) -> Result<Hypergraph> {
        let keep = sorted_subset(subset, self.num_vertices())?;
        let mut relabel = vec![usize::MAX; self.num_vertices()];
        for (new, &old) in keep.iter().enumerate() {
            relabel[old] = new;
        }
        let edges: Vec<Vec<usize>> = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| relabel[v] != usize::MAX))
            .map(|e| e.iter().map(|&v| relabel[v]).collect())
            .collect();
        Hypergraph::new(keep.iter().map(|&v| self.vertices[v].clone()).collect(), edges)
    }

    /// Encodes the hypergraph as a k-ary structure: every edge becomes all
    /// k-tuples whose underlying set is that edge.
    pub fn to_kstructure(&self, k: usize) -> Result<KStructure> {
        if k < 2 {
            return Err(Error::DegenerateArity(k));
        }
        if let Some(e) = self.edges.iter().find(|e| e.len() > k) {
            return Err(Error::ArityTooSmall {
                k,
                edge_size: e.len(),
            });
        }
        let mut relation = BTreeSet::new();
        for e in &self.edges {
            relation.extend(tuples_with_support(e, k));
        }
        Ok(KStructure {
            k,
            universe: self.vertices.clone(),
            relation,
        })
    }

    /// Hom condition on hypergraphs: the image set of every edge is an edge.
    pub fn is_homomorphism(&self, target: &Hypergraph, map: &[usize]) -> bool {
        map.len() == self.num_vertices()
            && map.iter().all(|&v| v < target.num_vertices())
            && self.edges.iter().all(|e| {
                let image: Vec<usize> = e.iter().map(|&v| map[v]).collect();
                target.has_edge(&image)
            })
    }
}

fn sorted_subset(subset: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut keep = subset.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&v| v >= n) {
        return Err(Error::UnknownElement(bad));
    }
    Ok(keep)
}

/// All k-tuples over `support` (a sorted set) whose underlying set is the
/// whole of `support`.
pub fn tuples_with_support(support: &[usize], k: usize) -> Vec<Tuple> {
    let m = support.len();
    if m == 0 || m > k {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut digits = vec![0usize; k];
    let mut seen = vec![false; m];
    loop {
        seen.iter_mut().for_each(|s| *s = false);
        for &d in &digits {
            seen[d] = true;
        }
        if seen.iter().all(|&s| s) {
            out.push(digits.iter().map(|&d| support[d]).collect());
        }
        // odometer over m^k with the last position fastest
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < m {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Sorted distinct entries of a tuple.
pub fn support(tuple: &[usize]) -> Vec<usize> {
    let mut s = tuple.to_vec();
    s.sort_unstable();
    s.dedup();
    s
}

/// A structure with a single k-ary relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KStructure {
    k: usize,
    universe: Vec<String>,
    relation: BTreeSet<Tuple>,
}

impl KStructure {
    pub fn new<I>(k: usize, universe: Vec<String>, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Tuple>,
    {
        if k < 2 {
            return Err(Error::DegenerateArity(k));
        }
        check_names(&universe)?;
        let n = universe.len();
        let mut relation = BTreeSet::new();
        for t in tuples {
            if t.len() != k {
                return Err(Error::TupleLength {
                    expected: k,
                    found: t.len(),
                });
            }
            if let Some(&bad) = t.iter().find(|&&v| v >= n) {
                return Err(Error::UnknownElement(bad));
            }
            relation.insert(t);
        }
        Ok(KStructure {
            k,
            universe,
            relation,
        })
    }

    /// Elements named `"0"..."n-1"`.
    pub fn with_size<I>(k: usize, n: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = Tuple>,
    {
        Self::new(k, numbered(n), tuples)
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn element_index(&self, name: &str) -> Option<usize> {
        self.universe.iter().position(|v| v == name)
    }

    pub fn relation(&self) -> &BTreeSet<Tuple> {
        &self.relation
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.relation.contains(tuple)
    }

    pub fn has_tuples(&self) -> bool {
        !self.relation.is_empty()
    }

    /// Underlying sets of the relation tuples (the hyperedges when the
    /// structure is set-closed).
    pub fn underlying_sets(&self) -> BTreeSet<Vec<usize>> {
        self.relation.iter().map(|t| support(t)).collect()
    }

    pub fn is_set_closed(&self) -> bool {
        self.underlying_sets().iter().all(|s| {
            tuples_with_support(s, self.k)
                .iter()
                .all(|t| self.relation.contains(t))
        })
    }

    pub fn is_uniform(&self) -> bool {
        self.relation.iter().all(|t| support(t).len() == t.len())
    }

    pub fn is_loop_free(&self) -> bool {
        self.relation.iter().all(|t| t.iter().any(|&x| x != t[0]))
    }

    /// Minimum and maximum cardinality of the tuples' underlying sets.
    pub fn cardinality_range(&self) -> Option<(usize, usize)> {
        let sizes = self.relation.iter().map(|t| support(t).len());
        let (mut lo, mut hi) = (usize::MAX, 0);
        for s in sizes {
            lo = lo.min(s);
            hi = hi.max(s);
        }
        (hi > 0).then_some((lo, hi))
    }

    /// Closure of the relation under the set-equivalence laws.
    pub fn set_closure(&self) -> KStructure {
        let mut relation = BTreeSet::new();
        for s in self.underlying_sets() {
            relation.extend(tuples_with_support(&s, self.k));
        }
        KStructure {
            k: self.k,
            universe: self.universe.clone(),
            relation,
        }
    }

    /// Decodes a set-closed structure back into a hypergraph.
    pub fn to_hypergraph(&self) -> Result<Hypergraph> {
        if !self.is_set_closed() {
            return Err(Error::NotSetClosed);
        }
        Ok(Hypergraph {
            vertices: self.universe.clone(),
            edges: self.underlying_sets(),
        })
    }

    /// Substructure on `subset`: keeps the tuples whose entries all lie in
    /// the subset. Surviving elements keep their relative order.
    pub fn induced_substructure(&self, subset: &[usize]) -> Result<KStructure> {
        let keep = sorted_subset(subset, self.len())?;
        let mut relabel = vec![usize::MAX; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            relabel[old] = new;
        }
        let relation = self
            .relation
            .iter()
            .filter(|t| t.iter().all(|&v| relabel[v] != usize::MAX))
            .map(|t| t.iter().map(|&v| relabel[v]).collect())
            .collect();
        Ok(KStructure {
            k: self.k,
            universe: keep.iter().map(|&v| self.universe[v].clone()).collect(),
            relation,
        })
    }

    /// Same structure with element `i` moved to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<KStructure> {
        let n = self.len();
        if perm.len() != n || support(perm).len() != n || perm.iter().any(|&p| p >= n) {
            return Err(Error::PreconditionFailed("not a permutation".into()));
        }
        let mut universe = vec![String::new(); n];
        for (i, &p) in perm.iter().enumerate() {
            universe[p] = self.universe[i].clone();
        }
        let relation = self
            .relation
            .iter()
            .map(|t| t.iter().map(|&v| perm[v]).collect())
            .collect();
        Ok(KStructure {
            k: self.k,
            universe,
            relation,
        })
    }

    /// Same structure with fresh element names.
    pub fn renamed(&self, names: Vec<String>) -> Result<KStructure> {
        if names.len() != self.len() {
            return Err(Error::PreconditionFailed("name count mismatch".into()));
        }
        check_names(&names)?;
        Ok(KStructure {
            k: self.k,
            universe: names,
            relation: self.relation.clone(),
        })
    }

    /// All ordered pairs of distinct elements sharing a tuple.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.len()];
        for t in &self.relation {
            for &a in t {
                for &b in t {
                    if a != b {
                        adj[a].insert(b);
                    }
                }
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}

/// A total map between element index sets.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Homomorphism {
    map: Vec<usize>,
}

impl Homomorphism {
    /// Wraps a map after checking it is a homomorphism.
    pub fn new(source: &KStructure, target: &KStructure, map: Vec<usize>) -> Result<Self> {
        check_hom(source, target, &map)?;
        Ok(Homomorphism { map })
    }

    pub(crate) fn unchecked(map: Vec<usize>) -> Self {
        Homomorphism { map }
    }

    pub fn identity(s: &KStructure) -> Self {
        Homomorphism {
            map: (0..s.len()).collect(),
        }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn into_map(self) -> Vec<usize> {
        self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn image(&self, tuple: &[usize]) -> Tuple {
        tuple.iter().map(|&x| self.map[x]).collect()
    }

    /// `then` after `self`.
    pub fn compose(&self, then: &Homomorphism) -> Homomorphism {
        Homomorphism {
            map: self.map.iter().map(|&x| then.map[x]).collect(),
        }
    }

    pub fn is_valid(&self, source: &KStructure, target: &KStructure) -> bool {
        check_hom(source, target, &self.map).is_ok()
    }

    pub fn is_injective(&self) -> bool {
        support(&self.map).len() == self.map.len()
    }
}

/// Validates that `map` sends every tuple of `source` into `target`.
pub fn check_hom(source: &KStructure, target: &KStructure, map: &[usize]) -> Result<()> {
    if source.arity() != target.arity() {
        return Err(Error::MixedArity);
    }
    if map.len() != source.len() {
        return Err(Error::Verification(format!(
            "map has {} entries for {} elements",
            map.len(),
            source.len()
        )));
    }
    if let Some(&bad) = map.iter().find(|&&v| v >= target.len()) {
        return Err(Error::UnknownElement(bad));
    }
    let mut image = vec![0; source.arity()];
    for t in source.relation() {
        for (slot, &x) in image.iter_mut().zip(t) {
            *slot = map[x];
        }
        if !target.contains(&image) {
            return Err(Error::Verification(format!(
                "tuple {t:?} maps to non-tuple {image:?}"
            )));
        }
    }
    Ok(())
}

/// Disjoint union with bookkeeping of where each element came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointUnion {
    pub structure: KStructure,
    /// Component index of every element.
    pub component: Vec<usize>,
    /// Index of the first element of each component.
    pub offsets: Vec<usize>,
}

impl DisjointUnion {
    pub fn locate(&self, x: usize) -> (usize, usize) {
        let c = self.component[x];
        (c, x - self.offsets[c])
    }
}

/// Tagged union; element `x` of part `i` is named `"i.x"`.
pub fn disjoint_union(parts: &[KStructure]) -> Result<DisjointUnion> {
    let first = parts.first().ok_or(Error::EmptyFamily)?;
    let k = first.arity();
    if parts.iter().any(|p| p.arity() != k) {
        return Err(Error::MixedArity);
    }
    let mut universe = Vec::new();
    let mut component = Vec::new();
    let mut offsets = Vec::with_capacity(parts.len());
    let mut relation = BTreeSet::new();
    for (i, part) in parts.iter().enumerate() {
        let offset = universe.len();
        offsets.push(offset);
        universe.extend(part.universe().iter().map(|x| format!("{i}.{x}")));
        component.extend(std::iter::repeat_n(i, part.len()));
        relation.extend(
            part.relation()
                .iter()
                .map(|t| t.iter().map(|&v| v + offset).collect::<Tuple>()),
        );
    }
    Ok(DisjointUnion {
        structure: KStructure {
            k,
            universe,
            relation,
        },
        component,
        offsets,
    })
}

/// Mixed-radix index of a product element, first factor most significant.
pub fn product_index(coords: &[usize], sizes: &[usize]) -> usize {
    coords
        .iter()
        .zip(sizes)
        .fold(0, |acc, (&c, &size)| acc * size + c)
}

/// Inverse of [`product_index`].
pub fn product_coords(mut index: usize, sizes: &[usize]) -> Vec<usize> {
    let mut coords = vec![0; sizes.len()];
    for (slot, &size) in coords.iter_mut().zip(sizes).rev() {
        *slot = index % size;
        index /= size;
    }
    coords
}

const PRODUCT_LIMIT: u128 = 1 << 24;

/// Direct product. A k-tuple of product elements is related iff every
/// coordinate projection is related in its factor.
pub fn direct_product(parts: &[KStructure]) -> Result<KStructure> {
    let first = parts.first().ok_or(Error::EmptyFamily)?;
    let k = first.arity();
    if parts.iter().any(|p| p.arity() != k) {
        return Err(Error::MixedArity);
    }
    let sizes: Vec<usize> = parts.iter().map(KStructure::len).collect();
    let elements: u128 = sizes.iter().map(|&s| s as u128).product();
    let tuples: u128 = parts.iter().map(|p| p.relation().len() as u128).product();
    if elements > PRODUCT_LIMIT || tuples > PRODUCT_LIMIT {
        return Err(Error::TooLarge(elements.max(tuples)));
    }
    let n = elements as usize;
    let universe = (0..n)
        .map(|i| {
            let coords = product_coords(i, &sizes);
            let names: Vec<&str> = coords
                .iter()
                .zip(parts)
                .map(|(&c, p)| p.universe()[c].as_str())
                .collect();
            format!("({})", names.join(","))
        })
        .collect();
    let factor_tuples: Vec<Vec<&Tuple>> = parts.iter().map(|p| p.relation().iter().collect()).collect();
    let mut relation = BTreeSet::new();
    if factor_tuples.iter().all(|f| !f.is_empty()) {
        let mut choice = vec![0usize; parts.len()];
        let mut coords = vec![0usize; parts.len()];
        'outer: loop {
            let tuple: Tuple = (0..k)
                .map(|j| {
                    for (f, slot) in coords.iter_mut().enumerate() {
                        *slot = factor_tuples[f][choice[f]][j];
                    }
                    product_index(&coords, &sizes)
                })
                .collect();
            relation.insert(tuple);
            let mut pos = parts.len();
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                choice[pos] += 1;
                if choice[pos] < factor_tuples[pos].len() {
                    break;
                }
                choice[pos] = 0;
            }
        }
    }
    Ok(KStructure {
        k,
        universe,
        relation,
    })
}

pub fn direct_power(s: &KStructure, n: usize) -> Result<KStructure> {
    direct_product(&vec![s.clone(); n])
}

/// Projection of `direct_product(parts)` onto factor `i`.
pub fn projection(parts: &[KStructure], i: usize) -> Homomorphism {
    let sizes: Vec<usize> = parts.iter().map(KStructure::len).collect();
    let n: usize = sizes.iter().product();
    Homomorphism::unchecked((0..n).map(|x| product_coords(x, &sizes)[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k2(k: usize) -> KStructure {
        Hypergraph::with_size(2, [vec![0, 1]])
            .unwrap()
            .to_kstructure(k)
            .unwrap()
    }

    fn fano() -> Hypergraph {
        let lines = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ];
        Hypergraph::with_size(7, lines).unwrap()
    }

    #[test]
    fn k2_encodings() {
        let s2 = k2(2);
        assert_eq!(
            s2.relation().iter().cloned().collect::<Vec<_>>(),
            vec![vec![0, 1], vec![1, 0]]
        );
        let s3 = k2(3);
        let expected: BTreeSet<Tuple> = [[0, 0, 1], [0, 1, 0], [1, 0, 0], [1, 1, 0], [1, 0, 1], [0, 1, 1]]
            .iter()
            .map(|t| t.to_vec())
            .collect();
        assert_eq!(s3.relation(), &expected);
        assert!(s3.is_set_closed());
        assert!(!s3.is_uniform());
        assert!(s3.is_loop_free());
    }

    #[test]
    fn closure_of_single_tuple() {
        let s = KStructure::with_size(3, 2, [vec![0, 0, 1]]).unwrap();
        assert!(!s.is_set_closed());
        let c = s.set_closure();
        assert_eq!(c, k2(3));
        assert_eq!(c.set_closure(), c);

        let constant = KStructure::with_size(3, 1, [vec![0, 0, 0]]).unwrap();
        assert_eq!(constant.set_closure(), constant);
        assert!(!constant.is_loop_free());
    }

    #[test]
    fn triple_edge_permutations() {
        // brute force: all 27 triples over {a,b,c} with full support
        let h = Hypergraph::from_named(&["a", "b", "c"], &[&["a", "b", "c"]]).unwrap();
        let s = h.to_kstructure(3).unwrap();
        let mut expected = BTreeSet::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let mut set = [a, b, c];
                    set.sort();
                    if set == [0, 1, 2] {
                        expected.insert(vec![a, b, c]);
                    }
                }
            }
        }
        assert_eq!(expected.len(), 6);
        assert_eq!(s.relation(), &expected);
        assert!(s.is_uniform());
    }

    #[test]
    fn arity_checks() {
        let h = fano();
        assert_eq!(
            h.to_kstructure(2),
            Err(Error::ArityTooSmall { k: 2, edge_size: 3 })
        );
        assert_eq!(h.to_kstructure(1), Err(Error::DegenerateArity(1)));
        let edgeless = Hypergraph::with_size(3, Vec::<Vec<usize>>::new()).unwrap();
        assert!(edgeless.to_kstructure(4).unwrap().relation().is_empty());
    }

    #[test]
    fn hypergraph_roundtrip() {
        let s = k2(3);
        let h = s.to_hypergraph().unwrap();
        assert_eq!(h.edges().iter().cloned().collect::<Vec<_>>(), vec![vec![0, 1]]);
        let raw = KStructure::with_size(3, 2, [vec![0, 0, 1]]).unwrap();
        assert_eq!(raw.to_hypergraph(), Err(Error::NotSetClosed));
        let empty = KStructure::with_size(3, 4, []).unwrap();
        assert_eq!(empty.to_hypergraph().unwrap().num_edges(), 0);
    }

    #[test]
    fn induced_substructures() {
        let e3 = Hypergraph::with_size(3, [vec![0, 1, 2]])
            .unwrap()
            .to_kstructure(3)
            .unwrap();
        assert!(e3.induced_substructure(&[0, 1]).unwrap().relation().is_empty());
        let k3 = Hypergraph::with_size(3, [vec![0, 1], vec![1, 2], vec![0, 2]])
            .unwrap()
            .to_kstructure(2)
            .unwrap();
        assert_eq!(k3.induced_substructure(&[1, 2]).unwrap().relation().len(), 2);
        assert_eq!(k3.induced_substructure(&[0, 1, 2]).unwrap(), k3);
        assert_eq!(k3.induced_substructure(&[0, 7]), Err(Error::UnknownElement(7)));

        // Fano restricted to one line: filter the 42 tuples by containment
        let f = fano().to_kstructure(3).unwrap();
        assert_eq!(f.relation().len(), 42);
        let line = [1, 3, 5];
        let expected = f
            .relation()
            .iter()
            .filter(|t| t.iter().all(|v| line.contains(v)))
            .count();
        let sub = f.induced_substructure(&line).unwrap();
        assert_eq!(sub.relation().len(), expected);
        assert_eq!(sub.relation().len(), 6);
        assert_eq!(sub.underlying_sets().len(), 1);
    }

    #[test]
    fn unions() {
        let u = disjoint_union(&[k2(2), k2(2)]).unwrap();
        assert_eq!(u.structure.len(), 4);
        assert_eq!(u.structure.underlying_sets().len(), 2);
        assert_eq!(u.locate(3), (1, 1));
        assert_eq!(disjoint_union(&[]), Err(Error::EmptyFamily));
        assert_eq!(disjoint_union(&[k2(2), k2(3)]), Err(Error::MixedArity));

        let e3 = Hypergraph::with_size(3, [vec![0, 1, 2]])
            .unwrap()
            .to_kstructure(3)
            .unwrap();
        let g1 = KStructure::with_size(3, 1, []).unwrap();
        let u = disjoint_union(&[e3, g1]).unwrap();
        assert_eq!(u.structure.len(), 4);
        assert_eq!(u.structure.underlying_sets().len(), 1);
    }

    #[test]
    fn products() {
        let p = direct_product(&[k2(2), k2(2)]).unwrap();
        assert_eq!(p.len(), 4);
        // brute force over all 16 ordered pairs of product elements
        let mut expected = BTreeSet::new();
        for x in 0..4 {
            for y in 0..4 {
                let (x0, x1) = (x / 2, x % 2);
                let (y0, y1) = (y / 2, y % 2);
                if x0 != y0 && x1 != y1 {
                    expected.insert(vec![x, y]);
                }
            }
        }
        assert_eq!(p.relation(), &expected);
        assert_eq!(
            p.underlying_sets().into_iter().collect::<Vec<_>>(),
            vec![vec![0, 3], vec![1, 2]]
        );

        let g1 = KStructure::with_size(2, 1, []).unwrap();
        let q = direct_product(&[k2(2), g1]).unwrap();
        assert_eq!(q.len(), 2);
        assert!(q.relation().is_empty());

        let single = direct_product(&[k2(3)]).unwrap();
        assert_eq!(single.relation(), k2(3).relation());
        assert_eq!(direct_product(&[]), Err(Error::EmptyFamily));

        let parts = [k2(3), k2(3)];
        let prod = direct_product(&parts).unwrap();
        for i in 0..2 {
            assert!(projection(&parts, i).is_valid(&prod, &parts[i]));
        }
    }

    #[test]
    fn homomorphism_validation() {
        let s = k2(2);
        assert!(Homomorphism::new(&s, &s, vec![1, 0]).is_ok());
        assert!(Homomorphism::new(&s, &s, vec![0, 0]).is_err());
        let id = Homomorphism::identity(&s);
        let swap = Homomorphism::new(&s, &s, vec![1, 0]).unwrap();
        assert_eq!(swap.compose(&swap), id);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            KStructure::with_size(2, 2, [vec![0, 1, 1]]),
            Err(Error::TupleLength {
                expected: 2,
                found: 3
            })
        );
        assert_eq!(
            KStructure::new(2, vec!["a".into(), "a".into()], []),
            Err(Error::DuplicateName("a".into()))
        );
        assert_eq!(
            Hypergraph::with_size(2, [Vec::<usize>::new()]),
            Err(Error::EmptyEdge)
        );
        let h = Hypergraph::with_size(2, [vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(h.num_edges(), 1);
    }
}
