//! Labelled types, the type Aut(F2) and its reference link, and the type
//! membership checker.

use serde::{Deserialize, Serialize};

use crate::complex::{AngleUnits, Complex2, Corner};
use crate::iso::{embeddings, find_isomorphism, induced_edge_map, IsoMode};
use crate::link::{compute_link, CycleWitness, LinkGraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub id: String,
    pub corners: Vec<Corner>,
}

impl Shape {
    pub fn boundary_len(&self) -> usize {
        self.corners.len()
    }

    pub fn triangle() -> Shape {
        Shape { id: "triangle".into(), corners: vec![Corner::new(2, "t"); 3] }
    }

    pub fn lozenge() -> Shape {
        Shape { id: "lozenge".into(), corners: vec![Corner::new(2, "p"), Corner::new(4, "q"), Corner::new(2, "p"), Corner::new(4, "q")] }
    }

    pub fn hexagon() -> Shape {
        Shape { id: "hexagon".into(), corners: vec![Corner::new(4, "h"); 6] }
    }

    /// Whether `corners` reads as this shape's corner cycle, in either direction.
    pub fn matches(&self, corners: &[Corner]) -> bool {
        let k = self.corners.len();
        if corners.len() != k {
            return false;
        }
        (0..k)
            .any(|o| (0..k).all(|j| corners[j] == self.corners[(o + j) % k]) || (0..k).all(|j| corners[j] == self.corners[(o + k - j) % k]))
    }
}

/// Corner label of each edge of a type link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectingMap {
    /// `(link index, edge index) -> corner label`
    pub marks: Vec<((usize, usize), String)>,
}

impl ConnectingMap {
    pub fn label(&self, link: usize, edge: usize) -> Option<&str> {
        self.marks.iter().find(|(k, _)| *k == (link, edge)).map(|(_, l)| l.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelledType {
    pub name: String,
    pub links: Vec<LinkGraph>,
    pub shapes: Vec<Shape>,
    pub connecting: ConnectingMap,
    /// How links are compared: `Label` for labelled types, `Isometry` for
    /// purely metric ones.
    pub mode: IsoMode,
}

impl LabelledType {
    pub fn shape(&self, id: &str) -> Option<&Shape> {
        self.shapes.iter().find(|s| s.id == id)
    }

    /// Every link edge is marked, and every mark names a corner label of
    /// some shape.
    pub fn is_consistent(&self) -> bool {
        let total = self.links.iter().enumerate().all(|(i, l)| (0..l.edge_count()).all(|e| self.connecting.label(i, e).is_some()));
        let known = self.connecting.marks.iter().all(|(_, lab)| self.shapes.iter().any(|s| s.corners.iter().any(|c| &c.label == lab)));
        total && known
    }
}

pub const PRIMED: [&str; 4] = ["1'", "2'", "3'", "4'"];
pub const UNPRIMED: [&str; 4] = ["1", "2", "3", "4"];

/// The two direction circles `1-2-3-4` and `1'-2'-3'-4'` with alternating
/// acute/obtuse lozenge corners, joined by the triangle corners of `matching`
/// (`matching[i]` is the primed partner of `i + 1`, zero-based).
pub fn link_with_matching(matching: [usize; 4]) -> LinkGraph {
    let mut g = LinkGraph::new();
    for name in UNPRIMED.iter().chain(PRIMED.iter()) {
        g.add_vertex(*name);
    }
    for base in [0, 4] {
        g.add_edge(base, base + 1, 2, "p");
        g.add_edge(base + 1, base + 2, 4, "q");
        g.add_edge(base + 2, base + 3, 2, "p");
        g.add_edge(base + 3, base, 4, "q");
    }
    for (i, &j) in matching.iter().enumerate() {
        g.add_edge(i, 4 + j, 2, "t");
    }
    g
}

/// The Brady link: matching 1↦2', 2↦4', 3↦1', 4↦3'.
pub fn brady_link() -> LinkGraph {
    link_with_matching([1, 3, 0, 2])
}

fn connecting_from(link: &LinkGraph) -> ConnectingMap {
    ConnectingMap { marks: link.edges.iter().enumerate().map(|(e, edge)| ((0, e), edge.label.clone())).collect() }
}

pub fn autf2_type() -> LabelledType {
    let link = brady_link();
    LabelledType {
        name: "Aut(F2)".into(),
        connecting: connecting_from(&link),
        links: vec![link],
        shapes: vec![Shape::triangle(), Shape::lozenge()],
        mode: IsoMode::Label,
    }
}

/// Metric type with equilateral triangles and regular hexagons; links are
/// compared up to isometry only.
pub fn metric_type_a() -> LabelledType {
    let mut link = brady_link();
    for e in &mut link.edges {
        e.label = if e.length == AngleUnits(4) { "h".into() } else { "t".into() };
    }
    LabelledType {
        name: "A".into(),
        connecting: connecting_from(&link),
        links: vec![link],
        shapes: vec![Shape::triangle(), Shape::hexagon()],
        mode: IsoMode::Isometry,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum VertexVerdict {
    /// Full link isomorphic to type link `link`, with the vertex map.
    Interior {
        link: usize,
        mapping: Vec<usize>,
    },
    /// Partial link embedding into type link `link` (fragments only).
    Boundary {
        link: usize,
        mapping: Vec<usize>,
    },
    Fail {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeReport {
    pub type_name: String,
    pub pass: bool,
    pub vertices: Vec<VertexVerdict>,
    pub reasons: Vec<String>,
}

impl TypeReport {
    pub fn interior_count(&self) -> usize {
        self.vertices.iter().filter(|v| matches!(v, VertexVerdict::Interior { .. })).count()
    }
}

/// Checks faces against shapes and vertex links against type links. With
/// `fragment` set, vertices whose links are not full only need to embed
/// into a type link.
pub fn is_of_type(complex: &Complex2, ty: &LabelledType, fragment: bool) -> TypeReport {
    let mut reasons = Vec::new();
    if let Err(e) = complex.validate() {
        reasons.push(format!("malformed complex: {e}"));
        return TypeReport { type_name: ty.name.clone(), pass: false, vertices: Vec::new(), reasons };
    }
    let mut missing_shapes: Vec<&str> = Vec::new();
    for (f, face) in complex.faces().iter().enumerate() {
        match ty.shape(&face.shape) {
            None => {
                if !missing_shapes.contains(&face.shape.as_str()) {
                    missing_shapes.push(&face.shape);
                    reasons.push(format!("shape {} not in type", face.shape));
                }
            }
            Some(s) if !s.matches(&face.corners) => {
                reasons.push(format!("face {f}: corners do not match shape {}", s.id));
            }
            Some(_) => {}
        }
    }
    let mut vertices = Vec::with_capacity(complex.vertex_count());
    for v in complex.vertices() {
        let link = compute_link(complex, v).expect("vertex in range");
        let verdict = vertex_verdict(&link, ty, fragment);
        if let VertexVerdict::Fail { reason } = &verdict {
            reasons.push(format!("vertex {v}: {reason}"));
        }
        vertices.push(verdict);
    }
    TypeReport { type_name: ty.name.clone(), pass: reasons.is_empty(), vertices, reasons }
}

fn vertex_verdict(link: &LinkGraph, ty: &LabelledType, fragment: bool) -> VertexVerdict {
    for (i, reference) in ty.links.iter().enumerate() {
        if let Some(w) = find_isomorphism(link, reference, ty.mode) {
            // Induced corner labels must agree with the connecting map.
            let Some(emap) = induced_edge_map(link, reference, &w.mapping, ty.mode) else {
                continue;
            };
            let labelled = ty.mode != IsoMode::Label
                || emap.iter().enumerate().all(|(e, &r)| ty.connecting.label(i, r) == Some(link.edges[e].label.as_str()));
            if labelled {
                return VertexVerdict::Interior { link: i, mapping: w.mapping };
            }
        }
    }
    if fragment {
        for (i, reference) in ty.links.iter().enumerate() {
            let full = link.vertex_count() == reference.vertex_count() && link.edge_count() == reference.edge_count();
            if full {
                continue;
            }
            if let Some(m) = embeddings(link, reference, ty.mode, 1).pop() {
                return VertexVerdict::Boundary { link: i, mapping: m };
            }
        }
    }
    let reason = match link.shortest_cycle() {
        Some(c) if c.length < AngleUnits::FULL_TURN => format!("link has a cycle of length {} < 12", c.length.0),
        _ => format!("link ({} vertices, {} edges) matches no type link", link.vertex_count(), link.edge_count()),
    };
    VertexVerdict::Fail { reason }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingBranch {
    /// τ as primed names for 1, 2, 3, 4.
    pub tau: [String; 4],
    pub girth: u32,
    /// Vertex names along a shortest cycle.
    pub shortest_cycle: Vec<String>,
    pub survives: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfcheckReport {
    pub branches: Vec<MatchingBranch>,
    pub survivors: usize,
    pub survivor_is_reference: bool,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.survivors == 1 && self.survivor_is_reference
    }

    /// Branches with `τ(d) = target`.
    pub fn branch_where(&self, d: usize, target: &str) -> Vec<&MatchingBranch> {
        self.branches.iter().filter(|b| b.tau[d - 1] == target).collect()
    }
}

fn cycle_names(g: &LinkGraph, c: &CycleWitness) -> Vec<String> {
    let first = &g.edges[c.edges[0]];
    let mut names = vec![g.vertices[first.a].name.clone()];
    let mut at = first.b;
    for &e in &c.edges[1..] {
        names.push(g.vertices[at].name.clone());
        at = g.edges[e].other(at);
    }
    if c.edges.len() == 1 && !first.is_loop() {
        names.push(g.vertices[first.b].name.clone());
    }
    names
}

/// Rederives the Brady matching: among all bijections with τ(1) = 2', only
/// one keeps the link girth at 12.
pub fn brady_link_selfcheck() -> SelfcheckReport {
    let reference = brady_link();
    let mut branches = Vec::new();
    let mut survivor_is_reference = false;
    let rest = [0usize, 2, 3];
    for a in rest {
        for b in rest {
            for c in rest {
                if a == b || b == c || a == c {
                    continue;
                }
                let matching = [1, a, b, c];
                let g = link_with_matching(matching);
                let cyc = g.shortest_cycle().expect("link has cycles");
                let survives = cyc.length >= AngleUnits::FULL_TURN;
                if survives && find_isomorphism(&g, &reference, IsoMode::Label).is_some() && matching == [1, 3, 0, 2] {
                    survivor_is_reference = true;
                }
                branches.push(MatchingBranch {
                    tau: matching.map(|j| PRIMED[j].to_string()),
                    girth: cyc.length.0,
                    shortest_cycle: cycle_names(&g, &cyc),
                    survives,
                });
            }
        }
    }
    let survivors = branches.iter().filter(|b| b.survives).count();
    SelfcheckReport { branches, survivors, survivor_is_reference: survivor_is_reference && survivors == 1 }
}
