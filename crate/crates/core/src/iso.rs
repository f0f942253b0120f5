//! Backtracking isomorphism and embedding search for link multigraphs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::link::LinkGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoMode {
    /// Adjacency only.
    Plain,
    /// Edge lengths must agree.
    Isometry,
    /// Edge lengths and corner labels must agree.
    Label,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphIsoWitness {
    /// `mapping[v]` is the image of vertex `v` of the first graph.
    pub mapping: Vec<usize>,
    pub mode: IsoMode,
}

type Attr = (u32, String);

fn attr(mode: IsoMode, length: u32, label: &str) -> Attr {
    match mode {
        IsoMode::Plain => (0, String::new()),
        IsoMode::Isometry => (length, String::new()),
        IsoMode::Label => (length, label.to_string()),
    }
}

/// Sorted edge attributes for each unordered vertex pair.
struct PairTable {
    pairs: BTreeMap<(usize, usize), Vec<Attr>>,
    neighbours: Vec<Vec<usize>>,
    degree: Vec<usize>,
    profile: Vec<Vec<Attr>>,
}

impl PairTable {
    fn new(g: &LinkGraph, mode: IsoMode) -> Self {
        let n = g.vertex_count();
        let mut pairs: BTreeMap<(usize, usize), Vec<Attr>> = BTreeMap::new();
        let mut neighbours = vec![Vec::new(); n];
        let mut degree = vec![0; n];
        let mut profile = vec![Vec::new(); n];
        for e in &g.edges {
            let key = (e.a.min(e.b), e.a.max(e.b));
            let a = attr(mode, e.length.0, &e.label);
            pairs.entry(key).or_default().push(a.clone());
            degree[e.a] += 1;
            degree[e.b] += 1;
            profile[e.a].push(a.clone());
            profile[e.b].push(a);
            if !neighbours[e.a].contains(&e.b) {
                neighbours[e.a].push(e.b);
            }
            if !neighbours[e.b].contains(&e.a) {
                neighbours[e.b].push(e.a);
            }
        }
        for v in pairs.values_mut() {
            v.sort();
        }
        for p in &mut profile {
            p.sort();
        }
        for nb in &mut neighbours {
            nb.sort_unstable();
        }
        PairTable { pairs, neighbours, degree, profile }
    }

    fn between(&self, a: usize, b: usize) -> &[Attr] {
        self.pairs.get(&(a.min(b), a.max(b))).map_or(&[], Vec::as_slice)
    }
}

fn is_submultiset(small: &[Attr], big: &[Attr]) -> bool {
    let mut j = 0;
    for x in small {
        while j < big.len() && big[j] < *x {
            j += 1;
        }
        if j == big.len() || big[j] != *x {
            return false;
        }
        j += 1;
    }
    true
}

struct Search {
    t1: PairTable,
    t2: PairTable,
    order: Vec<usize>,
    exact: bool,
    limit: usize,
    found: Vec<Vec<usize>>,
    map: Vec<usize>,
    used: Vec<bool>,
}

impl Search {
    fn compatible(&self, v: usize, w: usize) -> bool {
        if self.exact {
            if self.t1.profile[v] != self.t2.profile[w] {
                return false;
            }
        } else if self.t1.degree[v] > self.t2.degree[w] || !is_submultiset(&self.t1.profile[v], &self.t2.profile[w]) {
            return false;
        }
        let own = self.t1.between(v, v);
        let img = self.t2.between(w, w);
        if (self.exact && own != img) || !is_submultiset(own, img) {
            return false;
        }
        for (x, &y) in self.map.iter().enumerate() {
            if y == usize::MAX {
                continue;
            }
            let a = self.t1.between(v, x);
            let b = self.t2.between(w, y);
            if self.exact {
                if a != b {
                    return false;
                }
            } else if !is_submultiset(a, b) {
                return false;
            }
        }
        true
    }

    fn run(&mut self, depth: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        if depth == self.order.len() {
            self.found.push(self.map.clone());
            return;
        }
        let v = self.order[depth];
        // Restrict to neighbours of an already mapped neighbour's image.
        let anchor = self.t1.neighbours[v].iter().find(|&&x| self.map[x] != usize::MAX).copied();
        let candidates: Vec<usize> = match anchor {
            Some(x) => self.t2.neighbours[self.map[x]].clone(),
            None => (0..self.used.len()).collect(),
        };
        for w in candidates {
            if self.used[w] || !self.compatible(v, w) {
                continue;
            }
            self.map[v] = w;
            self.used[w] = true;
            self.run(depth + 1);
            self.map[v] = usize::MAX;
            self.used[w] = false;
            if self.found.len() >= self.limit {
                return;
            }
        }
    }
}

/// Vertex order for the search: breadth-first within each component,
/// components started from their highest-degree vertex.
fn search_order(t: &PairTable) -> Vec<usize> {
    let n = t.degree.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&v| (std::cmp::Reverse(t.degree[v]), v));
    for s in starts {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &t.neighbours[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

fn enumerate(g1: &LinkGraph, g2: &LinkGraph, mode: IsoMode, exact: bool, limit: usize) -> Vec<Vec<usize>> {
    if g1.vertex_count() > g2.vertex_count() || g1.edge_count() > g2.edge_count() {
        return Vec::new();
    }
    if exact && (g1.vertex_count() != g2.vertex_count() || g1.edge_count() != g2.edge_count()) {
        return Vec::new();
    }
    let t1 = PairTable::new(g1, mode);
    let t2 = PairTable::new(g2, mode);
    let order = search_order(&t1);
    let mut s = Search {
        t1,
        t2,
        order,
        exact,
        limit,
        found: Vec::new(),
        map: vec![usize::MAX; g1.vertex_count()],
        used: vec![false; g2.vertex_count()],
    };
    s.run(0);
    s.found
}

/// First isomorphism in canonical search order, if any.
pub fn find_isomorphism(g1: &LinkGraph, g2: &LinkGraph, mode: IsoMode) -> Option<GraphIsoWitness> {
    enumerate(g1, g2, mode, true, 1).pop().map(|mapping| GraphIsoWitness { mapping, mode })
}

/// All isomorphisms (up to `limit`).
pub fn isomorphisms(g1: &LinkGraph, g2: &LinkGraph, mode: IsoMode, limit: usize) -> Vec<GraphIsoWitness> {
    enumerate(g1, g2, mode, true, limit).into_iter().map(|mapping| GraphIsoWitness { mapping, mode }).collect()
}

pub fn automorphisms(g: &LinkGraph, mode: IsoMode) -> Vec<GraphIsoWitness> {
    isomorphisms(g, g, mode, usize::MAX)
}

/// Injective vertex maps carrying the edges of `g1` onto distinct edges of
/// `g2` (not necessarily induced).
pub fn embeddings(g1: &LinkGraph, g2: &LinkGraph, mode: IsoMode, limit: usize) -> Vec<Vec<usize>> {
    enumerate(g1, g2, mode, false, limit)
}

/// Independent check of a witness.
pub fn verify_witness(g1: &LinkGraph, g2: &LinkGraph, w: &GraphIsoWitness) -> bool {
    let n = g1.vertex_count();
    if w.mapping.len() != n || g2.vertex_count() != n || g1.edge_count() != g2.edge_count() {
        return false;
    }
    let mut seen = vec![false; n];
    for &y in &w.mapping {
        if y >= n || seen[y] {
            return false;
        }
        seen[y] = true;
    }
    let key = |a: usize, b: usize, len: u32, label: &str| {
        let (a, b) = (a.min(b), a.max(b));
        (a, b, attr(w.mode, len, label))
    };
    let mut left: Vec<_> = g1.edges.iter().map(|e| key(w.mapping[e.a], w.mapping[e.b], e.length.0, &e.label)).collect();
    let mut right: Vec<_> = g2.edges.iter().map(|e| key(e.a, e.b, e.length.0, &e.label)).collect();
    left.sort();
    right.sort();
    left == right
}

/// Edge correspondence induced by a vertex map: for each edge of `g1`, a
/// distinct edge of `g2` with matching endpoints and attributes.
pub fn induced_edge_map(g1: &LinkGraph, g2: &LinkGraph, mapping: &[usize], mode: IsoMode) -> Option<Vec<usize>> {
    let mut used = vec![false; g2.edge_count()];
    let mut out = Vec::with_capacity(g1.edge_count());
    for e in &g1.edges {
        let (a, b) = (mapping[e.a], mapping[e.b]);
        let want = attr(mode, e.length.0, &e.label);
        let hit = g2.edges.iter().enumerate().position(|(i, f)| {
            !used[i] && ((f.a == a && f.b == b) || (f.a == b && f.b == a)) && attr(mode, f.length.0, &f.label) == want
        })?;
        used[hit] = true;
        out.push(hit);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_found_first() {
        let g = LinkGraph::cycle(&[2, 4, 2, 4], "x");
        for mode in [IsoMode::Plain, IsoMode::Isometry, IsoMode::Label] {
            let w = find_isomorphism(&g, &g, mode).unwrap();
            assert_eq!(w.mapping, vec![0, 1, 2, 3]);
            assert!(verify_witness(&g, &g, &w));
        }
    }

    #[test]
    fn length_sequences_distinguish_cycles() {
        let a = LinkGraph::cycle(&[2, 4, 2, 4], "x");
        let b = LinkGraph::cycle(&[2, 2, 4, 4], "x");
        assert!(find_isomorphism(&a, &b, IsoMode::Isometry).is_none());
        assert!(find_isomorphism(&a, &b, IsoMode::Plain).is_some());
    }

    #[test]
    fn labels_matter_only_in_label_mode() {
        let a = LinkGraph::cycle(&[2, 2, 2], "x");
        let b = LinkGraph::cycle(&[2, 2, 2], "y");
        assert!(find_isomorphism(&a, &b, IsoMode::Isometry).is_some());
        assert!(find_isomorphism(&a, &b, IsoMode::Label).is_none());
    }

    #[test]
    fn cycle_automorphisms_are_dihedral() {
        assert_eq!(automorphisms(&LinkGraph::cycle(&[2; 6], "x"), IsoMode::Isometry).len(), 12);
        assert_eq!(automorphisms(&LinkGraph::cycle(&[2, 4, 2, 4], "x"), IsoMode::Isometry).len(), 4);
    }

    #[test]
    fn multi_edges_are_counted() {
        let mut a = LinkGraph::new();
        a.add_vertex("a");
        a.add_vertex("b");
        a.add_edge(0, 1, 2, "x");
        a.add_edge(0, 1, 2, "x");
        let mut b = a.clone();
        b.edges[1].length = crate::complex::AngleUnits(4);
        assert!(find_isomorphism(&a, &b, IsoMode::Isometry).is_none());
        assert!(find_isomorphism(&a, &b, IsoMode::Plain).is_some());
    }

    #[test]
    fn path_embeds_in_cycle() {
        let mut p = LinkGraph::new();
        for i in 0..3 {
            p.add_vertex(i.to_string());
        }
        p.add_edge(0, 1, 2, "x");
        p.add_edge(1, 2, 2, "x");
        let c = LinkGraph::cycle(&[2; 5], "x");
        assert_eq!(embeddings(&p, &c, IsoMode::Isometry, usize::MAX).len(), 10);
        let m = &embeddings(&p, &c, IsoMode::Isometry, 1)[0];
        assert_eq!(induced_edge_map(&p, &c, m, IsoMode::Isometry).map(|v| v.len()), Some(2));
    }
}
