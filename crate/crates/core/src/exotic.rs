//! A compact quotient of a CAT(0) complex `X'` built from regular hexagons
//! and equilateral triangles whose links are isometric to the Brady link,
//! but which is not of type Aut(F2).
//!
//! Vertices, in hexagon order: `1+ 2- 3+ 1- 2+ 3-`. Hexagon edge `k` joins
//! positions `k` and `k-1` (mod 6) and is oriented downwards in position.
//! Lettered edges, `i` mod 3: `a_i: i+ → (i+1)+`, `b_i: (i+1)+ → i+`,
//! `c_i: i+ → i-`, `d_i: i- → i+`, `e_i: i- → (i+1)-`, `f_i: (i+1)- → i-`.
//! The symmetry σ sends `i ↦ i+1`, so positions move by `-2` and hexagon
//! edge `k` goes to `k-2`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complex::{AngleUnits, Complex2, Corner, Face, Traversal};
use crate::complex_iso::{complex_automorphisms, verify_complex_witness, ComplexIsoWitness};
use crate::error::ComplexError;
use crate::iso::{find_isomorphism, IsoMode};
use crate::link::{compute_link, LinkGraph};
use crate::typesys::{autf2_type, brady_link, is_of_type, metric_type_a, TypeReport};

pub const VERTEX_NAMES: [&str; 6] = ["1+", "2-", "3+", "1-", "2+", "3-"];

pub const HEXAGON: &str = "hexagon";
pub const TRIANGLE: &str = "triangle";

fn pos(sign: char, i: usize) -> usize {
    let i = (i + 2) % 3 + 1;
    VERTEX_NAMES.iter().position(|n| *n == format!("{i}{sign}")).expect("vertex name")
}

/// Endpoints (tail, head) of a named edge.
fn endpoints(name: &str) -> (usize, usize) {
    if let Ok(k) = name.parse::<usize>() {
        return (k % 6, k - 1);
    }
    let (letter, idx) = name.split_at(1);
    let i: usize = idx.parse().expect("edge index");
    match letter {
        "a" => (pos('+', i), pos('+', i + 1)),
        "b" => (pos('+', i + 1), pos('+', i)),
        "c" => (pos('+', i), pos('-', i)),
        "d" => (pos('-', i), pos('+', i)),
        "e" => (pos('-', i), pos('-', i + 1)),
        _ => (pos('-', i + 1), pos('-', i)),
    }
}

pub fn edge_names() -> Vec<String> {
    let mut out: Vec<String> = (1..=6).map(|k| k.to_string()).collect();
    for letter in ["a", "b", "c", "d", "e", "f"] {
        for i in 1..=3 {
            out.push(format!("{letter}{i}"));
        }
    }
    out
}

/// σ on edge names.
pub fn sigma_name(name: &str) -> String {
    if let Ok(k) = name.parse::<usize>() {
        return ((k + 3) % 6 + 1).to_string();
    }
    let (letter, idx) = name.split_at(1);
    let i: usize = idx.parse().expect("edge index");
    format!("{letter}{}", i % 3 + 1)
}

/// Face words; a trailing `-` on a hexagon edge means it is read against
/// its orientation.
pub fn face_words() -> Vec<(&'static str, Vec<String>)> {
    let word = |w: &[&str]| w.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let orbit = |w: Vec<String>| {
        let mut out = vec![w];
        for _ in 0..2 {
            let last = out.last().expect("non-empty");
            out.push(
                last.iter()
                    .map(|t| match t.strip_suffix('-') {
                        Some(base) => format!("{}-", sigma_name(base)),
                        None => sigma_name(t),
                    })
                    .collect(),
            );
        }
        out
    };
    let mut faces = vec![(HEXAGON, word(&["1", "2", "3", "4", "5", "6"]))];
    faces.extend(orbit(word(&["a1", "c2", "f1", "e1", "d2", "b1"])).into_iter().map(|w| (HEXAGON, w)));
    for t in [["d1", "a1", "4"], ["f1", "d1", "1-"], ["b1", "c1", "4-"], ["c1", "e1", "1"]] {
        faces.extend(orbit(word(&t)).into_iter().map(|w| (TRIANGLE, w)));
    }
    for l in ["a", "b", "e", "f"] {
        faces.push((TRIANGLE, (1..=3).map(|i| format!("{l}{i}")).collect()));
    }
    faces
}

/// Reads a face word as a closed edge path. Unmarked edges are traversed
/// whichever way continues the path.
fn close_word(c: &Complex2, ids: &BTreeMap<String, usize>, word: &[String]) -> Result<Vec<Traversal>, ComplexError> {
    let parsed: Vec<(usize, Option<bool>)> = word
        .iter()
        .map(|t| {
            let (base, rev) = match t.strip_suffix('-') {
                Some(b) => (b, Some(true)),
                None => (t.as_str(), None),
            };
            (ids[base], rev)
        })
        .collect();
    for first in [false, true] {
        if parsed[0].1.is_some_and(|r| r != first) {
            continue;
        }
        let mut path = vec![Traversal { edge: parsed[0].0, reversed: first }];
        let mut at = c.traversal_finish(path[0]);
        let mut ok = true;
        for &(e, rev) in &parsed[1..] {
            let options: Vec<bool> = match rev {
                Some(r) => vec![r],
                None => vec![false, true],
            };
            let next = options.into_iter().map(|r| Traversal { edge: e, reversed: r }).find(|&t| c.traversal_start(t) == at);
            match next {
                Some(t) => {
                    at = c.traversal_finish(t);
                    path.push(t);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && at == c.traversal_start(path[0]) {
            return Ok(path);
        }
    }
    Err(ComplexError::OpenBoundary { face: usize::MAX, position: 0 })
}

/// The quotient complex `X'/G'`: 6 vertices, 24 edges, 4 hexagons and 16 triangles.
pub fn build_xprime() -> Result<Complex2, ComplexError> {
    let mut c = Complex2::with_vertices(6);
    let mut ids = BTreeMap::new();
    for name in edge_names() {
        let (a, b) = endpoints(&name);
        ids.insert(name.clone(), c.add_edge(a, b, Some(name))?);
    }
    for (shape, word) in face_words() {
        let boundary = close_word(&c, &ids, &word).map_err(|_| ComplexError::OpenBoundary { face: c.faces().len(), position: 0 })?;
        let corners = if shape == HEXAGON { vec![Corner::new(4, "h"); 6] } else { vec![Corner::new(2, "t"); 3] };
        c.add_face(Face { shape: shape.into(), boundary, corners })?;
    }
    Ok(c)
}

/// The link at `v` with vertices named by their edge labels.
pub fn named_link(c: &Complex2, v: usize) -> Result<LinkGraph, ComplexError> {
    let mut link = compute_link(c, v)?;
    for lv in &mut link.vertices {
        let end = lv.end.expect("computed link");
        lv.name = c.edge(end.edge).label.clone().unwrap_or_else(|| end.edge.to_string());
    }
    Ok(link)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VertexLinkCheck {
    pub vertex: String,
    pub vertices: usize,
    pub edges: usize,
    pub total_length: u32,
    pub isometric: bool,
    /// Link vertex name → reference vertex name.
    pub witness: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XPrimeReport {
    pub counts: (usize, usize, usize),
    pub degrees: Vec<usize>,
    pub links: Vec<VertexLinkCheck>,
    pub autf2: TypeReport,
    pub type_a: TypeReport,
}

impl XPrimeReport {
    pub fn all_links_isometric(&self) -> bool {
        self.links.iter().all(|l| l.isometric)
    }
}

pub fn link_checks(c: &Complex2) -> Result<Vec<VertexLinkCheck>, ComplexError> {
    let reference = brady_link();
    let mut out = Vec::with_capacity(c.vertex_count());
    for v in c.vertices() {
        let link = named_link(c, v)?;
        let w = find_isomorphism(&link, &reference, IsoMode::Isometry);
        let witness = w
            .as_ref()
            .map(|w| {
                w.mapping.iter().enumerate().map(|(i, &j)| (link.vertices[i].name.clone(), reference.vertices[j].name.clone())).collect()
            })
            .unwrap_or_default();
        out.push(VertexLinkCheck {
            vertex: VERTEX_NAMES.get(v).map_or_else(|| v.to_string(), |s| s.to_string()),
            vertices: link.vertex_count(),
            edges: link.edge_count(),
            total_length: link.total_length().0,
            isometric: w.is_some(),
            witness,
        });
    }
    Ok(out)
}

pub fn verify_xprime(c: &Complex2) -> Result<XPrimeReport, ComplexError> {
    Ok(XPrimeReport {
        counts: c.euler_counts(),
        degrees: c.degrees(),
        links: link_checks(c)?,
        autf2: is_of_type(c, &autf2_type(), false),
        type_a: is_of_type(c, &metric_type_a(), false),
    })
}

/// σ as a cellular map of the built complex.
pub fn sigma_witness(c: &Complex2) -> Option<ComplexIsoWitness> {
    let names: Vec<String> = c.edges().iter().map(|e| e.label.clone().unwrap_or_default()).collect();
    let id_of: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let vertices: Vec<usize> = (0..c.vertex_count()).map(|p| (p + 4) % 6).collect();
    let mut edges = Vec::with_capacity(names.len());
    for (e, name) in names.iter().enumerate() {
        let t = *id_of.get(sigma_name(name).as_str())?;
        let flip = c.edge(t).from != vertices[c.edge(e).from];
        edges.push((t, flip));
    }
    let key = |f: &Face, map: &dyn Fn(usize) -> usize| {
        let mut k: Vec<usize> = f.boundary.iter().map(|t| map(t.edge)).collect();
        k.sort_unstable();
        (f.shape.clone(), k)
    };
    let mut faces = Vec::with_capacity(c.faces().len());
    for f in c.faces() {
        let want = key(f, &|e| edges[e].0);
        faces.push(c.faces().iter().position(|g| key(g, &|e| e) == want)?);
    }
    let w = ComplexIsoWitness { vertices, edges, faces };
    verify_complex_witness(c, c, &w).then_some(w)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransitivityReport {
    pub automorphisms: usize,
    pub identity_found: bool,
    pub orbit_of_first: Vec<usize>,
    pub sigma_order: Option<usize>,
}

impl TransitivityReport {
    pub fn transitive(&self, vertex_count: usize) -> bool {
        self.orbit_of_first.len() == vertex_count
    }
}

pub fn vertex_transitivity(c: &Complex2) -> TransitivityReport {
    let autos = complex_automorphisms(c, 10_000);
    let identity_found =
        autos.iter().any(|w| w.vertices.iter().enumerate().all(|(i, &j)| i == j) && w.faces.iter().enumerate().all(|(i, &j)| i == j));
    let mut orbit: Vec<usize> = autos.iter().map(|w| w.vertices[0]).collect();
    orbit.sort_unstable();
    orbit.dedup();
    let sigma_order = sigma_witness(c).map(|w| {
        let mut p: Vec<usize> = (0..c.vertex_count()).collect();
        let mut k = 0;
        loop {
            p = p.iter().map(|&v| w.vertices[v]).collect();
            k += 1;
            if p.iter().enumerate().all(|(i, &j)| i == j) || k > 12 {
                return k;
            }
        }
    });
    TransitivityReport { automorphisms: autos.len(), identity_found, orbit_of_first: orbit, sigma_order }
}

/// A copy with face `f` removed.
pub fn without_face(c: &Complex2, f: usize) -> Complex2 {
    let mut out = c.clone();
    out.remove_face(f);
    out
}

/// Angle sum at each vertex.
pub fn angle_sums(c: &Complex2) -> Vec<AngleUnits> {
    let mut sums = vec![AngleUnits(0); c.vertex_count()];
    for (f, face) in c.faces().iter().enumerate() {
        for i in 0..face.len() {
            let v = c.corner_vertex(f, i);
            sums[v] = sums[v] + face.corners[i].angle;
        }
    }
    sums
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_follow_hexagon_order() {
        assert_eq!(endpoints("4"), (4, 3));
        assert_eq!(endpoints("1"), (1, 0));
        assert_eq!(endpoints("6"), (0, 5));
        assert_eq!(endpoints("a3"), (2, 0));
        assert_eq!(endpoints("c1"), (0, 3));
    }

    #[test]
    fn sigma_shifts_hexagon_labels_by_two() {
        assert_eq!(sigma_name("4"), "2");
        assert_eq!(sigma_name("1"), "5");
        assert_eq!(sigma_name("e3"), "e1");
    }
}
