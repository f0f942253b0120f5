//! Balls of the universal complex grown from a single face, unique
//! extension of face maps to coverings, and frames on `B_n`.
//!
//! Growth completes vertex stars in `(distance, id)` order. Each completion
//! adds the faces missing from the vertex link with fresh boundary cells;
//! folding then identifies cells forced to coincide:
//! - two corners at a vertex sharing an edge-end and a corner label belong to
//!   the same face;
//! - two edges with the same endpoints are the same edge;
//! - two edge-ends at a vertex reached by the same label walk in the type
//!   link are the same edge-end.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complex::{AngleUnits, Complex2, Corner, EdgeEnd, End, Face, Traversal};
use crate::error::RigidityError;
use crate::iso::{automorphisms, embeddings, find_isomorphism, induced_edge_map, isomorphisms, verify_witness};
use crate::link::{compute_link, LinkGraph};
use crate::toric::BasicConstruction;
use crate::typesys::LabelledType;

/// Which shape a corner label calls for, and the label at the next corner.
fn shape_for(label: &str) -> Result<(&'static str, usize, u32, &'static str, u32), String> {
    match label {
        "t" => Ok(("triangle", 3, 2, "t", 2)),
        "p" => Ok(("lozenge", 4, 2, "q", 4)),
        "q" => Ok(("lozenge", 4, 4, "p", 2)),
        other => Err(format!("no shape for corner label {other}")),
    }
}

#[derive(Clone, Debug)]
struct RawEdge {
    from: usize,
    to: usize,
}

/// A complex under construction, with union-find identifications.
#[derive(Clone, Debug, Default)]
struct Growth {
    vparent: Vec<usize>,
    dist: Vec<usize>,
    complete: Vec<bool>,
    edges: Vec<RawEdge>,
    eparent: Vec<usize>,
    /// Orientation of an edge relative to its parent.
    eflip: Vec<bool>,
    faces: Vec<Face>,
    fdead: Vec<bool>,
}

impl Growth {
    fn add_vertex(&mut self, dist: usize) -> usize {
        self.vparent.push(self.vparent.len());
        self.dist.push(dist);
        self.complete.push(false);
        self.vparent.len() - 1
    }

    fn add_edge(&mut self, from: usize, to: usize) -> usize {
        self.edges.push(RawEdge { from, to });
        self.eparent.push(self.eparent.len());
        self.eflip.push(false);
        self.edges.len() - 1
    }

    fn vroot(&mut self, v: usize) -> usize {
        let mut r = v;
        while self.vparent[r] != r {
            r = self.vparent[r];
        }
        let mut x = v;
        while self.vparent[x] != r {
            let next = self.vparent[x];
            self.vparent[x] = r;
            x = next;
        }
        r
    }

    fn vfind(&self, v: usize) -> usize {
        let mut r = v;
        while self.vparent[r] != r {
            r = self.vparent[r];
        }
        r
    }

    /// Root edge and orientation of `e` relative to it.
    fn efind(&self, e: usize) -> (usize, bool) {
        let mut r = e;
        let mut flip = false;
        while self.eparent[r] != r {
            flip ^= self.eflip[r];
            r = self.eparent[r];
        }
        (r, flip)
    }

    fn vunion(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.vroot(a), self.vroot(b));
        if ra == rb {
            return false;
        }
        let (keep, gone) = (ra.min(rb), ra.max(rb));
        self.vparent[gone] = keep;
        self.dist[keep] = self.dist[keep].min(self.dist[gone]);
        self.complete[keep] |= self.complete[gone];
        true
    }

    /// Identifies raw edges `a` and `b`; `flip` says whether `b` runs
    /// against `a`.
    fn eunion(&mut self, a: usize, b: usize, flip: bool) -> Result<bool, RigidityError> {
        let (ra, fa) = self.efind(a);
        let (rb, fb) = self.efind(b);
        let rel = fa ^ fb ^ flip;
        if ra == rb {
            if rel {
                return Err(RigidityError::Conflict {
                    vertex: self.vfind(self.edges[ra].from),
                    reason: "edge identified with its reverse".into(),
                });
            }
            return Ok(false);
        }
        let (keep, gone) = (ra.min(rb), ra.max(rb));
        self.eparent[gone] = keep;
        self.eflip[gone] = rel;
        let (kf, kt) = (self.edges[keep].from, self.edges[keep].to);
        let (gf, gt) = (self.edges[gone].from, self.edges[gone].to);
        if rel {
            self.vunion(kf, gt);
            self.vunion(kt, gf);
        } else {
            self.vunion(kf, gf);
            self.vunion(kt, gt);
        }
        Ok(true)
    }

    fn canon_traversal(&self, t: Traversal) -> Traversal {
        let (r, flip) = self.efind(t.edge);
        Traversal { edge: r, reversed: t.reversed ^ flip }
    }

    fn canon_end(&self, end: EdgeEnd) -> EdgeEnd {
        let (r, flip) = self.efind(end.edge);
        EdgeEnd { edge: r, end: if flip { end.end.opposite() } else { end.end } }
    }

    fn end_vertex(&self, end: EdgeEnd) -> usize {
        let e = &self.edges[end.edge];
        self.vfind(if end.end == End::Tail { e.from } else { e.to })
    }

    fn live_faces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.faces.len()).filter(|&f| !self.fdead[f])
    }

    /// Identifies faces `f` (corner `i`) and `g` (corner `j`); `same` says
    /// whether their boundaries run the same way around the shared corner.
    fn merge_faces(&mut self, f: usize, i: usize, g: usize, j: usize, same: bool) -> Result<(), RigidityError> {
        let k = self.faces[f].len();
        if self.faces[g].len() != k {
            return Err(RigidityError::Conflict {
                vertex: self.vfind(self.corner_vertex(f, i)),
                reason: "faces of different size share a corner".into(),
            });
        }
        for step in 0..k {
            let ci = (i + step) % k;
            let cj = if same { (j + step) % k } else { (j + k - step % k) % k };
            if self.faces[f].corners[ci] != self.faces[g].corners[cj] {
                return Err(RigidityError::Conflict {
                    vertex: self.vfind(self.corner_vertex(f, i)),
                    reason: "merged faces disagree on corner labels".into(),
                });
            }
            let tf = self.faces[f].boundary[ci];
            let tg = if same { self.faces[g].boundary[cj] } else { self.faces[g].boundary[(cj + k - 1) % k].inverse() };
            self.eunion(tf.edge, tg.edge, tf.reversed != tg.reversed)?;
        }
        self.fdead[f.max(g)] = true;
        Ok(())
    }

    fn corner_vertex(&self, f: usize, i: usize) -> usize {
        let t = self.faces[f].boundary[i];
        self.end_vertex(self.canon_end(t.start_end()))
    }

    /// One pass of both folding rules; returns whether anything changed.
    fn fold_pass(&mut self) -> Result<bool, RigidityError> {
        let mut changed = false;
        // Corners sharing an edge-end and a label.
        let mut seen: BTreeMap<(EdgeEnd, String), (usize, usize, bool)> = BTreeMap::new();
        let mut merges = Vec::new();
        for f in self.live_faces() {
            let face = &self.faces[f];
            let k = face.len();
            for i in 0..k {
                let arrive = self.canon_end(face.boundary[(i + k - 1) % k].finish_end());
                let leave = self.canon_end(face.boundary[i].start_end());
                for (end, leaving) in [(arrive, false), (leave, true)] {
                    let key = (end, face.corners[i].label.clone());
                    match seen.get(&key) {
                        None => {
                            seen.insert(key, (f, i, leaving));
                        }
                        Some(&(g, j, other_leaving)) => {
                            if g == f && j != i {
                                return Err(RigidityError::Conflict {
                                    vertex: self.end_vertex(end),
                                    reason: "face meets itself at a corner".into(),
                                });
                            }
                            if g != f {
                                merges.push((g, j, f, i, leaving == other_leaving));
                            }
                        }
                    }
                }
            }
        }
        for (g, j, f, i, same) in merges {
            if self.fdead[f] || self.fdead[g] {
                continue;
            }
            self.merge_faces(g, j, f, i, same)?;
            changed = true;
        }
        // Parallel edges.
        let mut by_ends: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let roots: Vec<usize> = (0..self.edges.len()).filter(|&e| self.eparent[e] == e).collect();
        for e in roots {
            if self.eparent[e] != e {
                continue;
            }
            let a = self.vfind(self.edges[e].from);
            let b = self.vfind(self.edges[e].to);
            if a == b {
                return Err(RigidityError::Loop(a));
            }
            match by_ends.get(&(a.min(b), a.max(b))) {
                None => {
                    by_ends.insert((a.min(b), a.max(b)), e);
                }
                Some(&other) => {
                    let oa = self.vfind(self.edges[other].from);
                    self.eunion(other, e, oa != a)?;
                    changed = true;
                }
            }
        }
        Ok(changed)
    }

    /// Identifies edge-ends at one vertex that a label walk in the reference
    /// link sends to the same place. Requires each reference vertex to have
    /// at most one edge of each label.
    fn fold_links(&mut self, reference: &LinkGraph) -> Result<bool, RigidityError> {
        let mut step: BTreeMap<(usize, String), usize> = BTreeMap::new();
        for e in &reference.edges {
            step.insert((e.a, e.label.clone()), e.b);
            step.insert((e.b, e.label.clone()), e.a);
        }
        let mut corners: BTreeMap<usize, Vec<(EdgeEnd, EdgeEnd, String)>> = BTreeMap::new();
        for f in self.live_faces() {
            let face = &self.faces[f];
            let k = face.len();
            for i in 0..k {
                let arrive = self.canon_end(face.boundary[(i + k - 1) % k].finish_end());
                let leave = self.canon_end(face.boundary[i].start_end());
                corners.entry(self.end_vertex(leave)).or_default().push((arrive, leave, face.corners[i].label.clone()));
            }
        }
        let mut unions = Vec::new();
        for (v, list) in corners {
            let mut adj: BTreeMap<EdgeEnd, Vec<(EdgeEnd, String)>> = BTreeMap::new();
            for (a, b, l) in &list {
                adj.entry(*a).or_default().push((*b, l.clone()));
                adj.entry(*b).or_default().push((*a, l.clone()));
            }
            let mut placed: BTreeMap<EdgeEnd, usize> = BTreeMap::new();
            for &start in adj.keys() {
                if placed.contains_key(&start) {
                    continue;
                }
                let mut walk = None;
                for r in 0..reference.vertex_count() {
                    if let Some(m) = label_walk(&adj, start, r, &step) {
                        walk = Some(m);
                        break;
                    }
                }
                let Some(m) = walk else {
                    return Err(RigidityError::Impossible {
                        vertex: v,
                        reason: "partial link admits no label walk into the type link".into(),
                    });
                };
                let mut by_image: BTreeMap<usize, EdgeEnd> = BTreeMap::new();
                for (end, img) in m {
                    placed.insert(end, img);
                    match by_image.get(&img) {
                        None => {
                            by_image.insert(img, end);
                        }
                        Some(&other) => unions.push((other, end)),
                    }
                }
            }
        }
        let mut changed = false;
        for (x, y) in unions {
            let (x, y) = (self.canon_end(x), self.canon_end(y));
            if x == y {
                continue;
            }
            changed |= self.eunion(x.edge, y.edge, x.end != y.end)?;
        }
        Ok(changed)
    }

    fn fold(&mut self, reference: &LinkGraph) -> Result<(), RigidityError> {
        loop {
            let a = self.fold_pass()?;
            let b = self.fold_links(reference)?;
            if !a && !b {
                return Ok(());
            }
        }
    }

    /// Link of vertex root `v` in canonical cells.
    fn link_at(&self, v: usize) -> LinkGraph {
        let mut ends: Vec<EdgeEnd> = Vec::new();
        for e in 0..self.edges.len() {
            if self.eparent[e] != e {
                continue;
            }
            if self.vfind(self.edges[e].from) == v {
                ends.push(EdgeEnd::new(e, End::Tail));
            }
            if self.vfind(self.edges[e].to) == v {
                ends.push(EdgeEnd::new(e, End::Head));
            }
        }
        let mut g = LinkGraph::new();
        for end in &ends {
            g.vertices.push(crate::link::LinkVertex { name: format!("e{}{:?}", end.edge, end.end), end: Some(*end) });
        }
        for f in self.live_faces() {
            let face = &self.faces[f];
            let k = face.len();
            for i in 0..k {
                let leave = self.canon_end(face.boundary[i].start_end());
                if self.end_vertex(leave) != v {
                    continue;
                }
                let arrive = self.canon_end(face.boundary[(i + k - 1) % k].finish_end());
                let a = ends.binary_search(&arrive).expect("end at vertex");
                let b = ends.binary_search(&leave).expect("end at vertex");
                g.edges.push(crate::link::LinkEdge {
                    a,
                    b,
                    length: face.corners[i].angle,
                    label: face.corners[i].label.clone(),
                    source: Some((f, i)),
                });
            }
        }
        g
    }

    fn live_vertices(&self) -> Vec<usize> {
        (0..self.vparent.len()).filter(|&v| self.vparent[v] == v).collect()
    }

    /// Compact canonical complex, with the raw ids of surviving cells.
    fn snapshot(&self) -> (Complex2, Vec<usize>, Vec<usize>, Vec<usize>) {
        let verts = self.live_vertices();
        let vindex: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<usize> = (0..self.edges.len()).filter(|&e| self.eparent[e] == e).collect();
        let eindex: BTreeMap<usize, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let faces: Vec<usize> = self.live_faces().collect();
        let mut c = Complex2::with_vertices(verts.len());
        for &e in &edges {
            let r = &self.edges[e];
            c.add_edge(vindex[&self.vfind(r.from)], vindex[&self.vfind(r.to)], None).expect("live vertices");
        }
        for &f in &faces {
            let face = &self.faces[f];
            let boundary = face
                .boundary
                .iter()
                .map(|&t| {
                    let ct = self.canon_traversal(t);
                    Traversal { edge: eindex[&ct.edge], reversed: ct.reversed }
                })
                .collect();
            c.add_face(Face { shape: face.shape.clone(), boundary, corners: face.corners.clone() }).expect("folded faces close");
        }
        (c, verts, edges, faces)
    }
}

/// Sends `start` to reference vertex `r` and follows labels; `None` if some
/// walk leaves the reference link or two walks disagree.
fn label_walk(
    adj: &BTreeMap<EdgeEnd, Vec<(EdgeEnd, String)>>,
    start: EdgeEnd,
    r: usize,
    step: &BTreeMap<(usize, String), usize>,
) -> Option<BTreeMap<EdgeEnd, usize>> {
    let mut m = BTreeMap::from([(start, r)]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        let img = m[&x];
        for (y, label) in &adj[&x] {
            let target = *step.get(&(img, label.clone()))?;
            match m.get(y) {
                Some(&t) if t != target => return None,
                Some(_) => {}
                None => {
                    m.insert(*y, target);
                    queue.push_back(*y);
                }
            }
        }
    }
    Some(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedShape {
    Triangle,
    Lozenge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Raw id of the completed vertex.
    pub vertex: usize,
    pub distance: usize,
    pub embeddings: usize,
    pub admissible: usize,
    pub added_faces: usize,
}

#[derive(Clone, Debug)]
pub struct Ball {
    pub complex: Complex2,
    pub seed_face: usize,
    pub radius: usize,
    /// Completed (interior) vertices.
    pub interior: Vec<bool>,
    pub distance: Vec<usize>,
    /// Creation ids of the surviving cells.
    pub vertex_origin: Vec<usize>,
    pub edge_origin: Vec<usize>,
    pub face_origin: Vec<usize>,
    pub steps: Vec<StepRecord>,
}

impl Ball {
    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.interior.len()).filter(|&v| self.interior[v]).collect()
    }

    /// Every completion step admitted exactly one extension.
    pub fn unique_steps(&self) -> bool {
        self.steps.iter().all(|s| s.admissible == 1)
    }
}

fn seed(shape: SeedShape) -> Growth {
    let mut g = Growth::default();
    let (k, corners): (usize, Vec<Corner>) = match shape {
        SeedShape::Triangle => (3, crate::toric::triangle_corners()),
        SeedShape::Lozenge => (4, crate::toric::lozenge_corners()),
    };
    for _ in 0..k {
        g.add_vertex(0);
    }
    for i in 0..k {
        g.add_edge(i, (i + 1) % k);
    }
    g.faces.push(Face {
        shape: if k == 3 { "triangle" } else { "lozenge" }.into(),
        boundary: (0..k).map(Traversal::forward).collect(),
        corners,
    });
    g.fdead.push(false);
    g
}

/// Completes the star of vertex root `v` to the type link.
fn complete(
    g: &mut Growth,
    v: usize,
    reference: &LinkGraph,
    aut: &[Vec<usize>],
    mode: crate::iso::IsoMode,
) -> Result<StepRecord, RigidityError> {
    let link = g.link_at(v);
    let embs = embeddings(&link, reference, mode, usize::MAX);
    let mut orbits: BTreeSet<Vec<usize>> = BTreeSet::new();
    for m in &embs {
        let key = aut.iter().map(|a| m.iter().map(|&x| a[x]).collect::<Vec<_>>()).min().expect("identity");
        orbits.insert(key);
    }
    if orbits.len() != 1 {
        if orbits.is_empty() {
            return Err(RigidityError::Impossible { vertex: v, reason: "partial link does not embed in the type link".into() });
        }
        return Err(RigidityError::Ambiguous { vertex: v, count: orbits.len() });
    }
    let m = embs[0].clone();
    let used = induced_edge_map(&link, reference, &m, mode).expect("embedding carries edges");
    let d = g.dist[v] + 1;
    let mut end_of: Vec<Option<EdgeEnd>> = vec![None; reference.vertex_count()];
    for (lv, &r) in m.iter().enumerate() {
        end_of[r] = link.vertices[lv].end;
    }
    for slot in end_of.iter_mut() {
        if slot.is_none() {
            let w = g.add_vertex(d);
            let e = g.add_edge(v, w);
            *slot = Some(EdgeEnd::new(e, End::Tail));
        }
    }
    let mut added = 0;
    let used: BTreeSet<usize> = used.into_iter().collect();
    for (re, edge) in reference.edges.iter().enumerate() {
        if used.contains(&re) {
            continue;
        }
        let arrive = end_of[edge.a].expect("filled");
        let leave = end_of[edge.b].expect("filled");
        let (shape, k, a0, next_label, a1) = shape_for(&edge.label).map_err(|reason| RigidityError::Impossible { vertex: v, reason })?;
        if AngleUnits(a0) != edge.length {
            return Err(RigidityError::Impossible { vertex: v, reason: format!("label {} has length {}", edge.label, edge.length.0) });
        }
        let t_out = Traversal { edge: leave.edge, reversed: leave.end == End::Head };
        let t_in = Traversal { edge: arrive.edge, reversed: arrive.end == End::Tail };
        let u_out = g.end_vertex(EdgeEnd::new(leave.edge, leave.end.opposite()));
        let u_in = g.end_vertex(EdgeEnd::new(arrive.edge, arrive.end.opposite()));
        let mut boundary = vec![t_out];
        let mut at = u_out;
        for _ in 0..k - 3 {
            let z = g.add_vertex(d);
            boundary.push(Traversal::forward(g.add_edge(at, z)));
            at = z;
        }
        boundary.push(Traversal::forward(g.add_edge(at, u_in)));
        boundary.push(t_in);
        let corners = (0..k)
            .map(|i| if i % 2 == 0 { Corner { angle: AngleUnits(a0), label: edge.label.clone() } } else { Corner::new(a1, next_label) })
            .collect();
        g.faces.push(Face { shape: shape.into(), boundary, corners });
        g.fdead.push(false);
        added += 1;
    }
    g.complete[v] = true;
    Ok(StepRecord { vertex: v, distance: g.dist[v], embeddings: embs.len(), admissible: orbits.len(), added_faces: added })
}

/// The star-radius `radius` ball of the universal complex of `ty`, grown
/// from one face.
pub fn free_ball(ty: &LabelledType, radius: usize, seed_shape: SeedShape) -> Result<Ball, RigidityError> {
    let reference = ty.links.first().ok_or_else(|| RigidityError::Seed("type has no link".into()))?;
    let aut: Vec<Vec<usize>> = automorphisms(reference, ty.mode).into_iter().map(|w| w.mapping).collect();
    let mut g = seed(seed_shape);
    let mut steps = Vec::new();
    loop {
        let next = g.live_vertices().into_iter().filter(|&v| !g.complete[v] && g.dist[v] < radius).min_by_key(|&v| (g.dist[v], v));
        let Some(v) = next else { break };
        steps.push(complete(&mut g, v, reference, &aut, ty.mode)?);
        g.fold(reference)?;
    }
    let (complex, vertex_origin, edge_origin, face_origin) = g.snapshot();
    let interior = vertex_origin.iter().map(|&v| g.complete[v]).collect();
    let distance = vertex_origin.iter().map(|&v| g.dist[v]).collect();
    Ok(Ball { complex, seed_face: 0, radius, interior, distance, vertex_origin, edge_origin, face_origin, steps })
}

/// Checks that `small` sits inside `big` by the identity on creation ids.
pub fn embeds_by_origin(small: &Ball, big: &Ball) -> Result<(), String> {
    let vpos: BTreeMap<usize, usize> = big.vertex_origin.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let epos: BTreeMap<usize, usize> = big.edge_origin.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let fpos: BTreeMap<usize, usize> = big.face_origin.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    for o in &small.vertex_origin {
        if !vpos.contains_key(o) {
            return Err(format!("vertex {o} lost"));
        }
    }
    for (e, o) in small.edge_origin.iter().enumerate() {
        let Some(&be) = epos.get(o) else { return Err(format!("edge {o} lost")) };
        let se = small.complex.edge(e);
        let ee = big.complex.edge(be);
        let from = vpos[&small.vertex_origin[se.from]];
        let to = vpos[&small.vertex_origin[se.to]];
        if (from, to) != (ee.from, ee.to) {
            return Err(format!("edge {o} moved"));
        }
    }
    for (f, o) in small.face_origin.iter().enumerate() {
        let Some(&bf) = fpos.get(o) else { return Err(format!("face {o} lost")) };
        let sf = small.complex.face(f);
        let bface = big.complex.face(bf);
        let same =
            sf.boundary.iter().zip(&bface.boundary).all(|(a, b)| epos[&small.edge_origin[a.edge]] == b.edge && a.reversed == b.reversed);
        if !same || sf.corners != bface.corners {
            return Err(format!("face {o} changed"));
        }
    }
    Ok(())
}

/// A face of the domain mapped onto a face of the target: domain corner `j`
/// goes to target corner `offset + j` (or `offset - j` when reflected).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceMap {
    pub face: usize,
    pub offset: usize,
    pub reflect: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PartialMorphism {
    pub vertex_map: Vec<Option<usize>>,
    pub edge_map: Vec<Option<(usize, bool)>>,
    pub face_map: Vec<Option<FaceMap>>,
    /// Per processed interior vertex: number of link isomorphisms consistent
    /// with the cells already mapped.
    pub choices: Vec<(usize, usize)>,
    /// Interior vertices whose link map is a bijection onto the target link.
    pub certified: Vec<usize>,
}

impl PartialMorphism {
    pub fn is_total(&self) -> bool {
        self.vertex_map.iter().all(Option::is_some)
            && self.edge_map.iter().all(Option::is_some)
            && self.face_map.iter().all(Option::is_some)
    }

    pub fn deterministic(&self) -> bool {
        self.choices.iter().all(|&(_, c)| c == 1)
    }

    pub fn vertex_injective(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.vertex_map.iter().flatten().all(|v| seen.insert(*v))
    }

    pub fn face_injective(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.face_map.iter().flatten().all(|f| seen.insert(f.face))
    }
}

struct Extender<'a> {
    dom: &'a Complex2,
    tgt: &'a Complex2,
    pm: PartialMorphism,
}

impl Extender<'_> {
    fn conflict(&self, v: usize, reason: impl Into<String>) -> RigidityError {
        RigidityError::Conflict { vertex: v, reason: reason.into() }
    }

    fn set_vertex(&mut self, v: usize, w: usize) -> Result<(), RigidityError> {
        match self.pm.vertex_map[v] {
            None => {
                self.pm.vertex_map[v] = Some(w);
                Ok(())
            }
            Some(x) if x == w => Ok(()),
            Some(x) => Err(self.conflict(v, format!("vertex sent to {x} and {w}"))),
        }
    }

    fn set_face(&mut self, f: usize, fm: FaceMap) -> Result<bool, RigidityError> {
        if let Some(old) = self.pm.face_map[f] {
            if old != fm {
                return Err(self.conflict(self.dom.corner_vertex(f, 0), format!("face {f} sent two ways")));
            }
            return Ok(false);
        }
        let df = self.dom.face(f);
        let tf = self.tgt.face(fm.face);
        let k = df.len();
        if tf.len() != k || tf.shape != df.shape {
            return Err(self.conflict(self.dom.corner_vertex(f, 0), "shape mismatch"));
        }
        for j in 0..k {
            let (tc, tt) = if fm.reflect {
                let c = (fm.offset + k - j % k) % k;
                (c, tf.boundary[(c + k - 1) % k].inverse())
            } else {
                let c = (fm.offset + j) % k;
                (c, tf.boundary[c])
            };
            if df.corners[j] != tf.corners[tc] {
                return Err(self.conflict(self.dom.corner_vertex(f, j), "corner mismatch"));
            }
            let dt = df.boundary[j];
            self.set_vertex(self.dom.traversal_start(dt), self.tgt.traversal_start(tt))?;
            let want = (tt.edge, dt.reversed != tt.reversed);
            match self.pm.edge_map[dt.edge] {
                None => self.pm.edge_map[dt.edge] = Some(want),
                Some(x) if x == want => {}
                Some(_) => return Err(self.conflict(self.dom.traversal_start(dt), "edge sent two ways")),
            }
        }
        self.pm.face_map[f] = Some(fm);
        Ok(true)
    }

    /// Image of a domain edge-end under the current edge map.
    fn end_image(&self, end: EdgeEnd) -> Option<EdgeEnd> {
        let (e, flip) = self.pm.edge_map[end.edge]?;
        Some(EdgeEnd::new(e, if flip { end.end.opposite() } else { end.end }))
    }

    /// Extends over the star of interior vertex `v`, whose image is known.
    fn extend_at(&mut self, v: usize, mode: crate::iso::IsoMode) -> Result<(), RigidityError> {
        let w = self.pm.vertex_map[v].ok_or_else(|| self.conflict(v, "unmapped"))?;
        let dl = compute_link(self.dom, v)?;
        let tl = compute_link(self.tgt, w)?;
        let all = isomorphisms(&dl, &tl, mode, usize::MAX);
        let consistent: Vec<_> = all
            .into_iter()
            .filter(|iso| {
                dl.vertices.iter().enumerate().all(|(i, lv)| match self.end_image(lv.end.expect("computed link")) {
                    Some(img) => tl.vertices[iso.mapping[i]].end == Some(img),
                    None => true,
                })
            })
            .collect();
        self.pm.choices.push((v, consistent.len()));
        let Some(iso) = consistent.first().cloned() else {
            return Err(self.conflict(v, "no link isomorphism consistent with mapped cells"));
        };
        if !verify_witness(&dl, &tl, &iso) {
            return Err(self.conflict(v, "link map is not a bijection"));
        }
        let emap = induced_edge_map(&dl, &tl, &iso.mapping, mode).ok_or_else(|| self.conflict(v, "link edges do not correspond"))?;
        for (de, &te) in emap.iter().enumerate() {
            let (df, di) = dl.edges[de].source.expect("computed link");
            let (tf, ti) = tl.edges[te].source.expect("computed link");
            // Same reading direction iff the arriving ends correspond.
            let d_arrive = self.dom.face(df).corner_ends(di).0;
            let t_arrive = self.tgt.face(tf).corner_ends(ti).0;
            let a = dl.vertices.iter().position(|x| x.end == Some(d_arrive)).expect("end in link");
            let same = tl.vertices[iso.mapping[a]].end == Some(t_arrive);
            let k = self.dom.face(df).len();
            let offset = if same { (ti + k - di % k) % k } else { (ti + di) % k };
            self.set_face(df, FaceMap { face: tf, offset, reflect: !same })?;
        }
        self.pm.certified.push(v);
        Ok(())
    }
}

/// Extends `seed` (domain face ↦ target face) over `ball` into `target`.
pub fn extend_map(ball: &Ball, target: &Complex2, ty: &LabelledType, seed: FaceMap) -> Result<PartialMorphism, RigidityError> {
    let dom = &ball.complex;
    let mut ex = Extender {
        dom,
        tgt: target,
        pm: PartialMorphism {
            vertex_map: vec![None; dom.vertex_count()],
            edge_map: vec![None; dom.edges().len()],
            face_map: vec![None; dom.faces().len()],
            choices: Vec::new(),
            certified: Vec::new(),
        },
    };
    if seed.face >= target.faces().len() {
        return Err(RigidityError::Seed(format!("target has no face {}", seed.face)));
    }
    ex.set_face(ball.seed_face, seed).map_err(|e| RigidityError::Seed(e.to_string()))?;
    let mut done = vec![false; dom.vertex_count()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut order: Vec<usize> = ball.interior_vertices();
    order.sort_by_key(|&v| (ball.distance[v], v));
    loop {
        let next = order.iter().copied().find(|&v| !done[v] && ex.pm.vertex_map[v].is_some());
        match next {
            Some(v) => queue.push_back(v),
            None => break,
        }
        while let Some(v) = queue.pop_front() {
            if done[v] {
                continue;
            }
            done[v] = true;
            ex.extend_at(v, ty.mode)?;
        }
    }
    Ok(ex.pm)
}

/// All alignments of domain face `face` onto target face `target_face` that
/// match corners.
pub fn seed_alignments(dom: &Complex2, face: usize, target: &Complex2, target_face: usize) -> Vec<FaceMap> {
    let df = dom.face(face);
    let tf = target.face(target_face);
    let k = df.len();
    if tf.len() != k || tf.shape != df.shape {
        return Vec::new();
    }
    let mut out = Vec::new();
    for reflect in [false, true] {
        for offset in 0..k {
            let ok = (0..k).all(|j| {
                let c = if reflect { (offset + k - j) % k } else { (offset + j) % k };
                df.corners[j] == tf.corners[c]
            });
            if ok {
                out.push(FaceMap { face: target_face, offset, reflect });
            }
        }
    }
    out
}

/// Edge letter and orientation relative to the stored edge direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameEdge {
    pub letter: char,
    pub flipped: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub edges: Vec<FrameEdge>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameReport {
    pub lozenges: usize,
    pub certified: usize,
    pub failures: Vec<String>,
}

impl FrameReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Torus frame (horizontal `e` along +x, vertical `f` along +y) carried to
/// `B_n` through the edge bijection.
pub fn build_frame(bc: &BasicConstruction) -> Frame {
    frame_for(&bc.complex)
}

/// The same frame for any complex whose edges keep the torus numbering
/// (horizontal edges even, vertical edges odd).
pub fn frame_for(complex: &Complex2) -> Frame {
    let edges = (0..complex.edges().len()).map(|e| FrameEdge { letter: if e % 2 == 0 { 'e' } else { 'f' }, flipped: false }).collect();
    Frame { edges }
}

/// Per-lozenge certificate: opposite sides carry the same letter and point
/// the same way across the lozenge, adjacent sides carry different letters.
pub fn check_frame(complex: &Complex2, frame: &Frame) -> FrameReport {
    let mut lozenges = 0;
    let mut certified = 0;
    let mut failures = Vec::new();
    for (f, face) in complex.faces().iter().enumerate() {
        if face.shape != "lozenge" {
            continue;
        }
        lozenges += 1;
        let b = &face.boundary;
        let dir = |t: Traversal| t.reversed ^ frame.edges[t.edge].flipped;
        let letter = |t: Traversal| frame.edges[t.edge].letter;
        let mut ok = true;
        for i in 0..2 {
            let (s, o) = (b[i], b[i + 2]);
            if letter(s) != letter(o) {
                failures.push(format!("lozenge {f}: opposite sides {} and {} carry different letters", s.edge, o.edge));
                ok = false;
            } else if dir(s) == dir(o) {
                failures.push(format!("lozenge {f}: opposite sides {} and {} are not parallel", s.edge, o.edge));
                ok = false;
            }
        }
        if letter(b[0]) == letter(b[1]) {
            failures.push(format!("lozenge {f}: adjacent sides share a letter"));
            ok = false;
        }
        if ok {
            certified += 1;
        }
    }
    FrameReport { lozenges, certified, failures }
}

/// Ball maps into two targets from the same seed; the result certifies that
/// both covers agree on the ball.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoverReport {
    pub radius: usize,
    pub ball_counts: (usize, usize, usize),
    pub interior: usize,
    pub deterministic: bool,
    pub total: bool,
    pub certified: usize,
}

pub fn cover_report(ball: &Ball, target: &Complex2, ty: &LabelledType) -> Result<CoverReport, RigidityError> {
    let seed_face = target
        .faces()
        .iter()
        .position(|f| f.shape == ball.complex.face(ball.seed_face).shape)
        .ok_or_else(|| RigidityError::Seed("target has no face of the seed shape".into()))?;
    let fm = *seed_alignments(&ball.complex, ball.seed_face, target, seed_face)
        .first()
        .ok_or_else(|| RigidityError::Seed("seed corners do not match".into()))?;
    let pm = extend_map(ball, target, ty, fm)?;
    Ok(CoverReport {
        radius: ball.radius,
        ball_counts: ball.complex.euler_counts(),
        interior: ball.interior_vertices().len(),
        deterministic: pm.deterministic(),
        total: pm.is_total(),
        certified: pm.certified.len(),
    })
}

/// The interior vertex links of a ball, each checked against the type link.
pub fn interior_links_match(ball: &Ball, ty: &LabelledType) -> bool {
    ball.interior_vertices().into_iter().all(|v| {
        let l = compute_link(&ball.complex, v).expect("vertex");
        ty.links.iter().any(|r| find_isomorphism(&l, r, ty.mode).is_some())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typesys::autf2_type;

    #[test]
    fn radius_zero_is_the_seed() {
        let b = free_ball(&autf2_type(), 0, SeedShape::Triangle).unwrap();
        assert_eq!(b.complex.euler_counts(), (3, 3, 1));
        assert!(b.steps.is_empty());
    }

    #[test]
    fn radius_one_completes_seed_vertices() {
        let ty = autf2_type();
        let b = free_ball(&ty, 1, SeedShape::Triangle).unwrap();
        assert_eq!(b.interior_vertices().len(), 3);
        assert!(b.unique_steps());
        assert!(interior_links_match(&b, &ty));
    }
}
