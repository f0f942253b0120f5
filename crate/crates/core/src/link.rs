//! Vertex links as metric multigraphs with exact integer lengths.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::complex::{AngleUnits, Complex2, EdgeEnd, End};
use crate::error::ComplexError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkVertex {
    pub name: String,
    /// The edge-end this vertex stands for, when the graph is a computed link.
    pub end: Option<EdgeEnd>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkEdge {
    pub a: usize,
    pub b: usize,
    pub length: AngleUnits,
    pub label: String,
    /// (face, corner) that produced this edge, if computed from a complex.
    pub source: Option<(usize, usize)>,
}

impl LinkEdge {
    pub fn other(&self, v: usize) -> usize {
        if self.a == v {
            self.b
        } else {
            self.a
        }
    }

    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkGraph {
    pub vertices: Vec<LinkVertex>,
    pub edges: Vec<LinkEdge>,
}

/// A shortest cycle: its total length and the link edges it uses, in order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleWitness {
    pub length: AngleUnits,
    pub edges: Vec<usize>,
    pub is_loop: bool,
}

impl LinkGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>) -> usize {
        self.vertices.push(LinkVertex { name: name.into(), end: None });
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize, length: u32, label: impl Into<String>) -> usize {
        self.edges.push(LinkEdge { a, b, length: AngleUnits(length), label: label.into(), source: None });
        self.edges.len() - 1
    }

    /// A cycle through `lengths.len()` fresh vertices with the given edge lengths.
    pub fn cycle(lengths: &[u32], label: &str) -> LinkGraph {
        let mut g = LinkGraph::new();
        let k = lengths.len();
        for i in 0..k {
            g.add_vertex(i.to_string());
        }
        for (i, &len) in lengths.iter().enumerate() {
            g.add_edge(i, (i + 1) % k, len, label);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    /// Incident edge ids per vertex; a loop appears twice.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (id, e) in self.edges.iter().enumerate() {
            inc[e.a].push(id);
            inc[e.b].push(id);
        }
        inc
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.incidence().iter().map(Vec::len).collect()
    }

    pub fn total_length(&self) -> AngleUnits {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|e| e.is_loop()).count()
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let inc = self.incidence();
        let mut seen = vec![false; self.vertices.len()];
        let mut comps = Vec::new();
        for s in 0..self.vertices.len() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &e in &inc[v] {
                    let w = self.edges[e].other(v);
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// For each component that is a cycle (every vertex of degree 2), its
    /// total length; `None` for components that are not cycles.
    pub fn cycle_component_lengths(&self) -> Vec<Option<AngleUnits>> {
        let deg = self.degrees();
        self.components()
            .into_iter()
            .map(|comp| {
                if comp.iter().any(|&v| deg[v] != 2) {
                    return None;
                }
                Some(self.edges.iter().filter(|e| comp.binary_search(&e.a).is_ok()).map(|e| e.length).sum())
            })
            .collect()
    }

    /// Sorted multiset of incident edge lengths at `v`.
    pub fn length_profile(&self, v: usize) -> Vec<u32> {
        let mut out: Vec<u32> = self.incidence()[v].iter().map(|&e| self.edges[e].length.0).collect();
        out.sort_unstable();
        out
    }

    /// Shortest cycle, or `None` for a forest.
    pub fn shortest_cycle(&self) -> Option<CycleWitness> {
        let inc = self.incidence();
        let mut best: Option<CycleWitness> = None;
        for (id, e) in self.edges.iter().enumerate() {
            if best.as_ref().is_some_and(|b| b.length <= e.length) {
                continue;
            }
            if e.is_loop() {
                best = Some(CycleWitness { length: e.length, edges: vec![id], is_loop: true });
                continue;
            }
            if let Some((len, path)) = self.shortest_path_avoiding(&inc, e.b, e.a, id) {
                let total = AngleUnits(len) + e.length;
                if best.as_ref().is_none_or(|b| total < b.length) {
                    let mut edges = vec![id];
                    edges.extend(path);
                    best = Some(CycleWitness { length: total, edges, is_loop: false });
                }
            }
        }
        best
    }

    pub fn girth(&self) -> Option<AngleUnits> {
        self.shortest_cycle().map(|c| c.length)
    }

    fn shortest_path_avoiding(&self, inc: &[Vec<usize>], from: usize, to: usize, skip: usize) -> Option<(u32, Vec<usize>)> {
        let n = self.vertices.len();
        let mut dist = vec![u32::MAX; n];
        let mut via = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[from] = 0;
        heap.push(Reverse((0u32, from)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            if v == to {
                break;
            }
            for &eid in &inc[v] {
                let e = &self.edges[eid];
                if eid == skip || e.is_loop() {
                    continue;
                }
                let w = e.other(v);
                let nd = d + e.length.0;
                if nd < dist[w] {
                    dist[w] = nd;
                    via[w] = eid;
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        if dist[to] == u32::MAX {
            return None;
        }
        let mut path = Vec::new();
        let mut v = to;
        while v != from {
            let eid = via[v];
            path.push(eid);
            v = self.edges[eid].other(v);
        }
        path.reverse();
        Some((dist[to], path))
    }

    /// Graphviz rendering; edge attributes `len` (units of π/6) and `label`.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph \"{name}\" {{");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  v{i} [label=\"{}\"];", v.name);
        }
        for e in &self.edges {
            let _ = writeln!(out, "  v{} -- v{} [len={}, label=\"{}\"];", e.a, e.b, e.length.0, e.label);
        }
        out.push_str("}\n");
        out
    }
}

fn end_name(end: EdgeEnd) -> String {
    format!("e{}{}", end.edge, if end.end == End::Tail { "t" } else { "h" })
}

/// The link of `vertex`: one link vertex per edge-end at it, one link edge
/// per face corner at it.
pub fn compute_link(complex: &Complex2, vertex: usize) -> Result<LinkGraph, ComplexError> {
    if vertex >= complex.vertex_count() {
        return Err(ComplexError::UnknownVertex(vertex));
    }
    let ends = complex.edge_ends_at(vertex);
    let vertices = ends.iter().map(|&e| LinkVertex { name: end_name(e), end: Some(e) }).collect();
    let index = |e: EdgeEnd| ends.binary_search(&e).expect("edge-end at vertex");
    let mut edges = Vec::new();
    for (f, face) in complex.faces().iter().enumerate() {
        for i in 0..face.len() {
            if complex.corner_vertex(f, i) != vertex {
                continue;
            }
            let (a, b) = face.corner_ends(i);
            edges.push(LinkEdge {
                a: index(a),
                b: index(b),
                length: face.corners[i].angle,
                label: face.corners[i].label.clone(),
                source: Some((f, i)),
            });
        }
    }
    Ok(LinkGraph { vertices, edges })
}

/// Links of every vertex, in vertex order.
pub fn all_links(complex: &Complex2) -> Vec<LinkGraph> {
    complex.vertices().map(|v| compute_link(complex, v).expect("vertex in range")).collect()
}
