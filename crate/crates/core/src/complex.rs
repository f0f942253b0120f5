//! Finite combinatorial 2-complexes with oriented edges and angle-labelled
//! face corners.
//!
//! Vertices are dense indices `0..vertex_count`. Every edge has a `from` and a
//! `to` vertex (its tail and head); a face is a cyclic sequence of edge
//! traversals, and corner `i` of a face sits at the start vertex of traversal
//! `i`, between the end of traversal `i - 1` and the start of traversal `i`.
//! All angles are exact integers in units of π/6.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ComplexError;

/// An angle measured in units of π/6.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngleUnits(pub u32);

impl AngleUnits {
    pub const THIRD_PI: AngleUnits = AngleUnits(2);
    pub const HALF_PI: AngleUnits = AngleUnits(3);
    pub const TWO_THIRDS_PI: AngleUnits = AngleUnits(4);
    pub const PI: AngleUnits = AngleUnits(6);
    pub const FULL_TURN: AngleUnits = AngleUnits(12);

    pub fn units(self) -> u32 {
        self.0
    }
}

impl std::ops::Add for AngleUnits {
    type Output = AngleUnits;
    fn add(self, rhs: AngleUnits) -> AngleUnits {
        AngleUnits(self.0 + rhs.0)
    }
}

impl std::iter::Sum for AngleUnits {
    fn sum<I: Iterator<Item = AngleUnits>>(iter: I) -> AngleUnits {
        AngleUnits(iter.map(|a| a.0).sum())
    }
}

impl fmt::Display for AngleUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}π/6", self.0)
    }
}

/// Which end of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum End {
    Tail,
    Head,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::Tail => End::Head,
            End::Head => End::Tail,
        }
    }
}

/// One end of an edge; the vertices of a link are edge-ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub edge: usize,
    pub end: End,
}

impl EdgeEnd {
    pub fn new(edge: usize, end: End) -> Self {
        EdgeEnd { edge, end }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub label: Option<String>,
}

impl Edge {
    pub fn vertex_at(&self, end: End) -> usize {
        match end {
            End::Tail => self.from,
            End::Head => self.to,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

/// A directed pass along an edge inside a face boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Traversal {
    pub edge: usize,
    pub reversed: bool,
}

impl Traversal {
    pub fn forward(edge: usize) -> Self {
        Traversal { edge, reversed: false }
    }

    pub fn backward(edge: usize) -> Self {
        Traversal { edge, reversed: true }
    }

    pub fn inverse(self) -> Self {
        Traversal { edge: self.edge, reversed: !self.reversed }
    }

    /// The edge-end the traversal leaves from.
    pub fn start_end(self) -> EdgeEnd {
        EdgeEnd::new(self.edge, if self.reversed { End::Head } else { End::Tail })
    }

    /// The edge-end the traversal arrives at.
    pub fn finish_end(self) -> EdgeEnd {
        EdgeEnd::new(self.edge, if self.reversed { End::Tail } else { End::Head })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Corner {
    pub angle: AngleUnits,
    pub label: String,
}

impl Corner {
    pub fn new(angle: u32, label: &str) -> Self {
        Corner { angle: AngleUnits(angle), label: label.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub shape: String,
    pub boundary: Vec<Traversal>,
    pub corners: Vec<Corner>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    /// Edge-ends joined by corner `i`: (arriving end, leaving end).
    pub fn corner_ends(&self, i: usize) -> (EdgeEnd, EdgeEnd) {
        let k = self.boundary.len();
        let prev = self.boundary[(i + k - 1) % k];
        (prev.finish_end(), self.boundary[i].start_end())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Complex2 {
    vertex_count: usize,
    edges: Vec<Edge>,
    faces: Vec<Face>,
}

impl Complex2 {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vertices(vertex_count: usize) -> Self {
        Complex2 { vertex_count, edges: Vec::new(), faces: Vec::new() }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_edge(&mut self, from: usize, to: usize, label: Option<String>) -> Result<usize, ComplexError> {
        for v in [from, to] {
            if v >= self.vertex_count {
                return Err(ComplexError::UnknownVertex(v));
            }
        }
        self.edges.push(Edge { from, to, label });
        Ok(self.edges.len() - 1)
    }

    /// Adds a face after checking that its boundary closes up.
    pub fn add_face(&mut self, face: Face) -> Result<usize, ComplexError> {
        self.check_face(self.faces.len(), &face)?;
        self.faces.push(face);
        Ok(self.faces.len() - 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    pub fn edge_mut(&mut self, id: usize) -> &mut Edge {
        &mut self.edges[id]
    }

    pub fn face_mut(&mut self, id: usize) -> &mut Face {
        &mut self.faces[id]
    }

    /// Removes one face, renumbering the faces after it.
    pub fn remove_face(&mut self, id: usize) -> Face {
        self.faces.remove(id)
    }

    pub fn vertex_of(&self, end: EdgeEnd) -> usize {
        self.edges[end.edge].vertex_at(end.end)
    }

    pub fn traversal_start(&self, t: Traversal) -> usize {
        self.vertex_of(t.start_end())
    }

    pub fn traversal_finish(&self, t: Traversal) -> usize {
        self.vertex_of(t.finish_end())
    }

    /// Vertex at which corner `i` of face `f` sits.
    pub fn corner_vertex(&self, f: usize, i: usize) -> usize {
        self.traversal_start(self.faces[f].boundary[i])
    }

    /// (V, E, F).
    pub fn euler_counts(&self) -> (usize, usize, usize) {
        (self.vertex_count, self.edges.len(), self.faces.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// All edge-ends located at `v`, in ascending order.
    pub fn edge_ends_at(&self, v: usize) -> Vec<EdgeEnd> {
        let mut out = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if e.from == v {
                out.push(EdgeEnd::new(id, End::Tail));
            }
            if e.to == v {
                out.push(EdgeEnd::new(id, End::Head));
            }
        }
        out
    }

    /// Degree of every vertex in the 1-skeleton (loops count twice).
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for e in &self.edges {
            deg[e.from] += 1;
            deg[e.to] += 1;
        }
        deg
    }

    /// Number of face corners using each edge-end, indexed by `2 * edge + end`.
    pub fn end_corner_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; 2 * self.edges.len()];
        for face in &self.faces {
            for i in 0..face.len() {
                let (a, b) = face.corner_ends(i);
                counts[end_index(a)] += 1;
                counts[end_index(b)] += 1;
            }
        }
        counts
    }

    /// Number of faces traversing each edge (with multiplicity).
    pub fn edge_face_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.edges.len()];
        for face in &self.faces {
            for t in &face.boundary {
                counts[t.edge] += 1;
            }
        }
        counts
    }

    /// Faces containing each edge, as (face, position) pairs.
    pub fn edge_incidence(&self) -> Vec<Vec<(usize, usize)>> {
        let mut inc = vec![Vec::new(); self.edges.len()];
        for (f, face) in self.faces.iter().enumerate() {
            for (i, t) in face.boundary.iter().enumerate() {
                inc[t.edge].push((f, i));
            }
        }
        inc
    }

    fn check_face(&self, id: usize, face: &Face) -> Result<(), ComplexError> {
        if face.boundary.is_empty() {
            return Err(ComplexError::EmptyFace(id));
        }
        if face.corners.len() != face.boundary.len() {
            return Err(ComplexError::CornerCount { face: id, boundary: face.boundary.len(), corners: face.corners.len() });
        }
        for t in &face.boundary {
            if t.edge >= self.edges.len() {
                return Err(ComplexError::UnknownEdge(t.edge));
            }
        }
        let k = face.boundary.len();
        for i in 0..k {
            let here = self.traversal_finish(face.boundary[i]);
            let next = self.traversal_start(face.boundary[(i + 1) % k]);
            if here != next {
                return Err(ComplexError::OpenBoundary { face: id, position: i });
            }
        }
        Ok(())
    }

    /// Checks every structural invariant.
    pub fn validate(&self) -> Result<(), ComplexError> {
        for e in &self.edges {
            for v in [e.from, e.to] {
                if v >= self.vertex_count {
                    return Err(ComplexError::UnknownVertex(v));
                }
            }
        }
        for (id, face) in self.faces.iter().enumerate() {
            self.check_face(id, face)?;
        }
        Ok(())
    }

    /// Applies a vertex relabelling `map` (old id → new id, new ids dense in
    /// `0..new_count`) and merges nothing else.
    pub fn relabel_vertices(&self, map: &[usize], new_count: usize) -> Complex2 {
        let edges = self.edges.iter().map(|e| Edge { from: map[e.from], to: map[e.to], label: e.label.clone() }).collect();
        Complex2 { vertex_count: new_count, edges, faces: self.faces.clone() }
    }

    /// The closure of a set of faces: those faces with the edges and
    /// vertices they use, renumbered in ascending order of the old ids.
    /// Returns the complex and the old ids of its vertices, edges and faces.
    pub fn subcomplex(&self, faces: &[usize]) -> (Complex2, Vec<usize>, Vec<usize>, Vec<usize>) {
        let mut face_ids = faces.to_vec();
        face_ids.sort_unstable();
        face_ids.dedup();
        let mut edge_ids: Vec<usize> = face_ids.iter().flat_map(|&f| self.faces[f].boundary.iter().map(|t| t.edge)).collect();
        edge_ids.sort_unstable();
        edge_ids.dedup();
        let mut vertex_ids: Vec<usize> = edge_ids.iter().flat_map(|&e| [self.edges[e].from, self.edges[e].to]).collect();
        vertex_ids.sort_unstable();
        vertex_ids.dedup();
        let vpos = |v: usize| vertex_ids.binary_search(&v).expect("used vertex");
        let epos = |e: usize| edge_ids.binary_search(&e).expect("used edge");
        let edges = edge_ids
            .iter()
            .map(|&e| {
                let old = &self.edges[e];
                Edge { from: vpos(old.from), to: vpos(old.to), label: old.label.clone() }
            })
            .collect();
        let new_faces = face_ids
            .iter()
            .map(|&f| {
                let old = &self.faces[f];
                Face {
                    shape: old.shape.clone(),
                    boundary: old.boundary.iter().map(|t| Traversal { edge: epos(t.edge), reversed: t.reversed }).collect(),
                    corners: old.corners.clone(),
                }
            })
            .collect();
        let c = Complex2 { vertex_count: vertex_ids.len(), edges, faces: new_faces };
        (c, vertex_ids, edge_ids, face_ids)
    }

    pub fn to_json_value(&self) -> ComplexJson {
        ComplexJson {
            vertices: (0..self.vertex_count as u64).collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeJson { id: id as u64, from: e.from as u64, to: e.to as u64, label: e.label.clone() })
                .collect(),
            faces: self
                .faces
                .iter()
                .map(|f| FaceJson {
                    shape: f.shape.clone(),
                    boundary: f.boundary.iter().map(|t| TraversalJson { edge: t.edge as u64, reversed: t.reversed }).collect(),
                    corners: f.corners.iter().map(|c| CornerJson { angle_units: c.angle.0, label: c.label.clone() }).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("complex serializes")
    }

    pub fn from_json(text: &str) -> Result<Complex2, ComplexError> {
        let raw: ComplexJson = serde_json::from_str(text).map_err(|e| ComplexError::Json(e.to_string()))?;
        Complex2::try_from(raw)
    }
}

pub(crate) fn end_index(e: EdgeEnd) -> usize {
    2 * e.edge + usize::from(e.end == End::Head)
}

/// Wire format: ids are arbitrary non-negative integers; on output they are
/// dense and ascending.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexJson {
    pub vertices: Vec<u64>,
    pub edges: Vec<EdgeJson>,
    pub faces: Vec<FaceJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: u64,
    pub from: u64,
    pub to: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraversalJson {
    pub edge: u64,
    #[serde(default)]
    pub reversed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CornerJson {
    pub angle_units: u32,
    pub label: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaceJson {
    pub shape: String,
    pub boundary: Vec<TraversalJson>,
    pub corners: Vec<CornerJson>,
}

impl TryFrom<ComplexJson> for Complex2 {
    type Error = ComplexError;

    fn try_from(raw: ComplexJson) -> Result<Self, Self::Error> {
        use std::collections::BTreeMap;

        let mut vertex_ids = raw.vertices.clone();
        vertex_ids.sort_unstable();
        let vmap: BTreeMap<u64, usize> = vertex_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        if vmap.len() != raw.vertices.len() {
            return Err(ComplexError::DuplicateId("vertex"));
        }
        let mut edges = raw.edges.clone();
        edges.sort_by_key(|e| e.id);
        let emap: BTreeMap<u64, usize> = edges.iter().enumerate().map(|(i, e)| (e.id, i)).collect();
        if emap.len() != edges.len() {
            return Err(ComplexError::DuplicateId("edge"));
        }
        let lookup_v = |v: u64| vmap.get(&v).copied().ok_or(ComplexError::UnknownVertex(v as usize));
        let mut complex = Complex2::with_vertices(vmap.len());
        for e in &edges {
            complex.add_edge(lookup_v(e.from)?, lookup_v(e.to)?, e.label.clone())?;
        }
        for f in raw.faces {
            let boundary = f
                .boundary
                .iter()
                .map(|t| {
                    emap.get(&t.edge)
                        .map(|&edge| Traversal { edge, reversed: t.reversed })
                        .ok_or(ComplexError::UnknownEdge(t.edge as usize))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let corners = f.corners.into_iter().map(|c| Corner { angle: AngleUnits(c.angle_units), label: c.label }).collect();
            complex.add_face(Face { shape: f.shape, boundary, corners })?;
        }
        Ok(complex)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Complex2 {
        let mut c = Complex2::with_vertices(3);
        let a = c.add_edge(0, 1, None).unwrap();
        let b = c.add_edge(1, 2, None).unwrap();
        let d = c.add_edge(2, 0, None).unwrap();
        c.add_face(Face {
            shape: "triangle".into(),
            boundary: vec![Traversal::forward(a), Traversal::forward(b), Traversal::forward(d)],
            corners: vec![Corner::new(2, "t"); 3],
        })
        .unwrap();
        c
    }

    #[test]
    fn empty_complex_counts() {
        assert_eq!(Complex2::new().euler_counts(), (0, 0, 0));
    }

    #[test]
    fn open_boundary_is_rejected() {
        let mut c = Complex2::with_vertices(3);
        let a = c.add_edge(0, 1, None).unwrap();
        let b = c.add_edge(1, 2, None).unwrap();
        let err = c
            .add_face(Face {
                shape: "bad".into(),
                boundary: vec![Traversal::forward(a), Traversal::forward(b)],
                corners: vec![Corner::new(2, "t"); 2],
            })
            .unwrap_err();
        assert_eq!(err, ComplexError::OpenBoundary { face: 0, position: 1 });
    }

    #[test]
    fn corner_count_must_match() {
        let mut c = Complex2::with_vertices(1);
        let a = c.add_edge(0, 0, None).unwrap();
        let err = c.add_face(Face { shape: "x".into(), boundary: vec![Traversal::forward(a)], corners: vec![] }).unwrap_err();
        assert!(matches!(err, ComplexError::CornerCount { .. }));
    }

    #[test]
    fn unknown_ids_are_rejected() {
        let mut c = Complex2::with_vertices(1);
        assert_eq!(c.add_edge(0, 3, None), Err(ComplexError::UnknownVertex(3)));
        let err =
            c.add_face(Face { shape: "x".into(), boundary: vec![Traversal::forward(9)], corners: vec![Corner::new(2, "t")] }).unwrap_err();
        assert_eq!(err, ComplexError::UnknownEdge(9));
    }

    #[test]
    fn json_round_trip_and_remap() {
        let c = triangle();
        let back = Complex2::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);

        let sparse = r#"{"vertices":[10,30,20],
            "edges":[{"id":7,"from":10,"to":20},{"id":3,"from":20,"to":30},{"id":5,"from":30,"to":10}],
            "faces":[{"shape":"triangle","boundary":[{"edge":7},{"edge":3},{"edge":5}],
                      "corners":[{"angle_units":2,"label":"t"},{"angle_units":2,"label":"t"},{"angle_units":2,"label":"t"}]}]}"#;
        let c = Complex2::from_json(sparse).unwrap();
        assert_eq!(c.euler_counts(), (3, 3, 1));
        // edge 3 becomes id 0 (ascending ids)
        assert_eq!((c.edge(0).from, c.edge(0).to), (1, 2));
    }

    #[test]
    fn corner_ends_follow_boundary() {
        let c = triangle();
        let f = c.face(0);
        let (a, b) = f.corner_ends(0);
        assert_eq!(a, EdgeEnd::new(2, End::Head));
        assert_eq!(b, EdgeEnd::new(0, End::Tail));
        assert_eq!(c.corner_vertex(0, 0), 0);
    }
}
