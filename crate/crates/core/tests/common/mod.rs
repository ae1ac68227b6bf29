//! Brute-force reference implementations shared by the integration tests.
//! Each one enumerates its search space directly and shares no code with
//! the library's solvers.

#![allow(dead_code)]

use std::collections::BTreeSet;

use hornlab::{Hypergraph, KStructure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Calls `visit` on every map `0..n -> 0..m` until it returns false.
pub fn for_each_map(n: usize, m: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if m == 0 {
        if n == 0 {
            visit(&[]);
        }
        return;
    }
    let mut map = vec![0; n];
    loop {
        if !visit(&map) {
            return;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            map[i] += 1;
            if map[i] < m {
                break;
            }
            map[i] = 0;
        }
    }
}

pub fn preserves(s: &KStructure, t: &KStructure, map: &[usize]) -> bool {
    s.relation()
        .iter()
        .all(|tuple| t.contains(&tuple.iter().map(|&x| map[x]).collect::<Vec<_>>()))
}

pub fn brute_homs(s: &KStructure, t: &KStructure) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_map(s.len(), t.len(), |map| {
        if preserves(s, t, map) {
            out.push(map.to_vec());
        }
        true
    });
    out
}

pub fn brute_hom_exists(s: &KStructure, t: &KStructure) -> bool {
    let mut found = false;
    for_each_map(s.len(), t.len(), |map| {
        found = preserves(s, t, map);
        !found
    });
    found
}

/// Every `k`-tuple over `0..n`.
pub fn all_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_map(k, n, |t| {
        out.push(t.to_vec());
        true
    });
    out
}

/// A structure where each of the `n^k` tuples is present with probability
/// `density`.
pub fn random_structure(rng: &mut ChaCha8Rng, k: usize, n: usize, density: f64) -> KStructure {
    let tuples: Vec<Vec<usize>> = all_tuples(n, k)
        .into_iter()
        .filter(|_| rng.random_bool(density))
        .collect();
    KStructure::with_size(k, n, tuples).unwrap()
}

/// A random hypergraph on `n` vertices with edges of size in `2..=max_size`.
pub fn random_hypergraph(rng: &mut ChaCha8Rng, n: usize, edges: usize, max_size: usize) -> Hypergraph {
    let mut set = BTreeSet::new();
    for _ in 0..edges {
        let size = rng.random_range(2..=max_size.min(n).max(2));
        let mut e = BTreeSet::new();
        while e.len() < size.min(n) {
            e.insert(rng.random_range(0..n));
        }
        set.insert(e.into_iter().collect::<Vec<_>>());
    }
    Hypergraph::with_size(n, set).unwrap()
}

pub fn random_set_closed(rng: &mut ChaCha8Rng, k: usize, n: usize, edges: usize) -> KStructure {
    random_hypergraph(rng, n, edges, k).to_kstructure(k).unwrap()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

/// Least Berge cycle length by trying every ordered choice of distinct
/// edges and then every choice of distinct linking vertices.
pub fn brute_girth(h: &Hypergraph) -> Option<usize> {
    let edges: Vec<&Vec<usize>> = h.edges().iter().collect();
    let max = edges.len().min(h.num_vertices());
    (2..=max).find(|&n| {
        let mut found = false;
        for_each_map(n, edges.len(), |sel| {
            let distinct: BTreeSet<_> = sel.iter().collect();
            if distinct.len() == n && links(&edges, sel, 0, &mut Vec::new()) {
                found = true;
            }
            !found
        });
        found
    })
}

fn links(edges: &[&Vec<usize>], sel: &[usize], i: usize, used: &mut Vec<usize>) -> bool {
    let n = sel.len();
    if i == n {
        return true;
    }
    let (a, b) = (edges[sel[i]], edges[sel[(i + 1) % n]]);
    for &v in a.iter().filter(|v| b.contains(v)) {
        if !used.contains(&v) {
            used.push(v);
            if links(edges, sel, i + 1, used) {
                return true;
            }
            used.pop();
        }
    }
    false
}

/// Least number of colours with no monochromatic edge.
pub fn brute_chromatic(h: &Hypergraph) -> usize {
    (1..=h.num_vertices().max(1))
        .find(|&c| {
            let mut ok = false;
            for_each_map(h.num_vertices(), c, |col| {
                ok = h.edges().iter().all(|e| e.iter().any(|&v| col[v] != col[e[0]]));
                !ok
            });
            ok
        })
        .unwrap_or(1)
}

/// Separation conditions checked against the full hom sets.
pub fn brute_member(s: &KStructure, templates: &[KStructure]) -> bool {
    let homs: Vec<(usize, Vec<Vec<usize>>)> = templates
        .iter()
        .enumerate()
        .map(|(i, m)| (i, brute_homs(s, m)))
        .collect();
    if homs.iter().all(|(_, h)| h.is_empty()) {
        return false;
    }
    let n = s.len();
    for x in 0..n {
        for y in x + 1..n {
            if !homs.iter().any(|(_, hs)| hs.iter().any(|h| h[x] != h[y])) {
                return false;
            }
        }
    }
    all_tuples(n, s.arity())
        .into_iter()
        .filter(|t| !s.contains(t))
        .all(|t| {
            homs.iter().any(|(i, hs)| {
                hs.iter()
                    .any(|h| !templates[*i].contains(&t.iter().map(|&x| h[x]).collect::<Vec<_>>()))
            })
        })
}

/// Whether some injective map `s -> t` reflects and preserves every tuple.
pub fn brute_embeds(s: &KStructure, t: &KStructure) -> bool {
    let tuples = all_tuples(s.len(), s.arity());
    let mut found = false;
    for_each_map(s.len(), t.len(), |map| {
        let injective = map.iter().collect::<BTreeSet<_>>().len() == map.len();
        found = injective
            && tuples
                .iter()
                .all(|tu| s.contains(tu) == t.contains(&tu.iter().map(|&x| map[x]).collect::<Vec<_>>()));
        !found
    });
    found
}

/// Plain recursive EF game: Spoiler wins iff some move on either side has
/// no reply from which Duplicator survives the remaining rounds.
pub fn reference_winner_is_duplicator(a: &KStructure, b: &KStructure, rounds: usize) -> bool {
    fn ok(a: &KStructure, b: &KStructure, xs: &[usize], ys: &[usize]) -> bool {
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                if (xs[i] == xs[j]) != (ys[i] == ys[j]) {
                    return false;
                }
            }
        }
        all_tuples(xs.len(), a.arity()).iter().all(|idx| {
            let ta: Vec<usize> = idx.iter().map(|&i| xs[i]).collect();
            let tb: Vec<usize> = idx.iter().map(|&i| ys[i]).collect();
            a.contains(&ta) == b.contains(&tb)
        })
    }
    fn wins(a: &KStructure, b: &KStructure, xs: &mut Vec<usize>, ys: &mut Vec<usize>, left: usize) -> bool {
        if !ok(a, b, xs, ys) {
            return false;
        }
        if left == 0 {
            return true;
        }
        let in_a = (0..a.len()).all(|x| {
            (0..b.len()).any(|y| {
                xs.push(x);
                ys.push(y);
                let r = wins(a, b, xs, ys, left - 1);
                xs.pop();
                ys.pop();
                r
            })
        });
        in_a && (0..b.len()).all(|y| {
            (0..a.len()).any(|x| {
                xs.push(x);
                ys.push(y);
                let r = wins(a, b, xs, ys, left - 1);
                xs.pop();
                ys.pop();
                r
            })
        })
    }
    wins(a, b, &mut Vec::new(), &mut Vec::new(), rounds)
}

/// The graph `K_2` at arity `k`.
pub fn k2(k: usize) -> KStructure {
    Hypergraph::with_size(2, [[0, 1]])
        .unwrap()
        .to_kstructure(k)
        .unwrap()
}
