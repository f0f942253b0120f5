//! Collars and group cobordisms cut out of the cylinder `T_∞` and its
//! lettered, pinched and filled version `B_∞`.
//!
//! Finite truncations of the cylinder are strips of rows `y_min..=y_max`;
//! the seam identifies `(6, y)` with `(0, y + 6)`. Lozenge galleries are
//! tracked in the universal cover: crossing the bottom, right, top or left
//! side of a lozenge moves by `(0,-1)`, `(1,0)`, `(0,1)`, `(-1,0)`, and a
//! closed gallery generates the cylinder when its total displacement is the
//! seam period `(6,-6)`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complex::{Complex2, Face, Traversal};
use crate::error::CobordismError;
use crate::iso::{find_isomorphism, IsoMode};
use crate::link::LinkGraph;
use crate::toric::{lozenge_corners, triangle_corners, Family, LOZENGE, TRIANGLE, WIDTH};

/// Displacement of one generator of the cylinder.
pub const SEAM_PERIOD: (i64, i64) = (WIDTH, -WIDTH);

/// Exit displacement for each boundary position of a lozenge.
const STEP: [(i64, i64); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];

fn norm(x: i64, y: i64) -> (i64, i64) {
    let q = x.div_euclid(WIDTH);
    (x.rem_euclid(WIDTH), y + WIDTH * q)
}

fn family_at(col: i64) -> Family {
    match col {
        0 => Family::A,
        2 => Family::B,
        _ => Family::C,
    }
}

/// Letter, index and slot written on a strip edge.
fn strip_slot(horizontal: bool, x: i64, y: i64) -> (Family, i64, usize) {
    match (horizontal, x) {
        (false, x) if x % 2 == 0 => (family_at(x), y + 1, 0),
        (false, x) => (family_at(x - 1), y + 4, 2),
        (true, 1) => (Family::D, y, 0),
        (true, 3) => (Family::D, y + 2, 1),
        (true, 5) => (Family::D, y + 4, 2),
        (true, x) => (family_at(x), y + 2, 1),
    }
}

pub fn slot_label(family: Family, index: i64, slot: usize) -> String {
    format!("{family:?}{index}{}", "'".repeat(slot))
}

/// A finite truncation of the lettered cylinder.
#[derive(Clone, Debug)]
pub struct StripFragment {
    pub y_min: i64,
    pub y_max: i64,
    pub complex: Complex2,
    vertex: BTreeMap<(i64, i64), usize>,
    h: BTreeMap<(i64, i64), usize>,
    v: BTreeMap<(i64, i64), usize>,
    square: BTreeMap<(i64, i64), usize>,
    /// Lower-left corner of each lozenge face.
    pub square_of: Vec<(i64, i64)>,
    /// (letter, index, slot) of each edge.
    pub slot_of: Vec<(Family, i64, usize)>,
}

impl StripFragment {
    pub fn new(y_min: i64, y_max: i64) -> Result<StripFragment, CobordismError> {
        if y_max <= y_min {
            return Err(CobordismError::FragmentTooSmall(format!("rows {y_min}..={y_max}")));
        }
        let mut complex = Complex2::new();
        let mut vertex = BTreeMap::new();
        for y in y_min..=y_max {
            for x in 0..WIDTH {
                vertex.insert((x, y), complex.add_vertex());
            }
        }
        let (mut h, mut v, mut slot_of) = (BTreeMap::new(), BTreeMap::new(), Vec::new());
        for (&(x, y), &a) in &vertex {
            if let Some(&b) = vertex.get(&norm(x + 1, y)) {
                let slot = strip_slot(true, x, y);
                h.insert((x, y), complex.add_edge(a, b, Some(slot_label(slot.0, slot.1, slot.2)))?);
                slot_of.push(slot);
            }
            if let Some(&b) = vertex.get(&(x, y + 1)) {
                let slot = strip_slot(false, x, y);
                v.insert((x, y), complex.add_edge(a, b, Some(slot_label(slot.0, slot.1, slot.2)))?);
                slot_of.push(slot);
            }
        }
        let mut frag = StripFragment { y_min, y_max, complex, vertex, h, v, square: BTreeMap::new(), square_of: Vec::new(), slot_of };
        let corners: Vec<(i64, i64)> = frag.vertex.keys().copied().collect();
        for (x, y) in corners {
            let sides = (frag.h_edge(x, y), frag.v_edge(x + 1, y), frag.h_edge(x, y + 1), frag.v_edge(x, y));
            if let (Some(b), Some(r), Some(t), Some(l)) = sides {
                let f = frag.complex.add_face(Face {
                    shape: LOZENGE.into(),
                    boundary: vec![Traversal::forward(b), Traversal::forward(r), Traversal::backward(t), Traversal::backward(l)],
                    corners: lozenge_corners(),
                })?;
                frag.square.insert((x, y), f);
                frag.square_of.push((x, y));
            }
        }
        Ok(frag)
    }

    pub fn vertex(&self, x: i64, y: i64) -> Option<usize> {
        self.vertex.get(&norm(x, y)).copied()
    }

    pub fn h_edge(&self, x: i64, y: i64) -> Option<usize> {
        self.h.get(&norm(x, y)).copied()
    }

    pub fn v_edge(&self, x: i64, y: i64) -> Option<usize> {
        self.v.get(&norm(x, y)).copied()
    }

    pub fn square_face(&self, x: i64, y: i64) -> Option<usize> {
        self.square.get(&norm(x, y)).copied()
    }

    pub fn label(&self, edge: usize) -> String {
        let (f, i, s) = self.slot_of[edge];
        slot_label(f, i, s)
    }

    /// Strip coordinates of each vertex.
    pub fn coords(&self) -> Vec<(i64, i64)> {
        let mut out = vec![(0, 0); self.vertex.len()];
        for (&p, &id) in &self.vertex {
            out[id] = p;
        }
        out
    }
}

/// The knight triangle of `(family, index)`: strip edges and directions.
fn knight_sides(strip: &StripFragment, family: Family, index: i64) -> Option<[Traversal; 3]> {
    let y = index;
    match family {
        Family::D => Some([
            Traversal::forward(strip.h_edge(1, y)?),
            Traversal::forward(strip.h_edge(3, y - 2)?),
            Traversal::forward(strip.h_edge(5, y - 4)?),
        ]),
        _ => {
            let x = family.column();
            Some([
                Traversal::forward(strip.v_edge(x, y - 1)?),
                Traversal::backward(strip.h_edge(x, y - 2)?),
                Traversal::forward(strip.v_edge(x + 1, y - 4)?),
            ])
        }
    }
}

/// A truncation of `B_∞`: the strip pinched by σ with every knight triangle
/// that closes inside it. Edge and lozenge ids agree with the strip.
#[derive(Clone, Debug)]
pub struct Ambient {
    pub strip: StripFragment,
    pub complex: Complex2,
    knights: BTreeMap<(Family, i64), usize>,
}

impl Ambient {
    pub fn new(y_min: i64, y_max: i64) -> Result<Ambient, CobordismError> {
        let strip = StripFragment::new(y_min, y_max)?;
        let coords = strip.coords();
        let mut class = vec![usize::MAX; coords.len()];
        let mut next = 0;
        for (id, &(x, y)) in coords.iter().enumerate() {
            if class[id] != usize::MAX {
                continue;
            }
            class[id] = next;
            if x % 2 == 0 {
                if let Some(p) = strip.vertex(x + 1, y - 2) {
                    class[p] = next;
                }
            }
            next += 1;
        }
        let mut complex = strip.complex.relabel_vertices(&class, next);
        let mut knights = BTreeMap::new();
        for family in Family::ALL {
            for index in y_min - 1..=y_max + 5 {
                let Some(sides) = knight_sides(&strip, family, index) else { continue };
                let face = Face { shape: TRIANGLE.into(), boundary: sides.to_vec(), corners: triangle_corners() };
                if let Ok(f) = complex.add_face(face) {
                    knights.insert((family, index), f);
                }
            }
        }
        Ok(Ambient { strip, complex, knights })
    }

    pub fn knight_face(&self, family: Family, index: i64) -> Option<usize> {
        self.knights.get(&(family, index)).copied()
    }

    pub fn face_of(&self, cell: CellKey) -> Option<usize> {
        match cell {
            CellKey::Lozenge { x, y } => self.strip.square_face(x, y),
            CellKey::Knight { family, index } => self.knight_face(family, index),
        }
    }

    pub fn cell_of(&self, face: usize) -> CellKey {
        if face < self.strip.square_of.len() {
            let (x, y) = self.strip.square_of[face];
            return CellKey::Lozenge { x, y };
        }
        let (&(family, index), _) = self.knights.iter().find(|(_, &f)| f == face).expect("knight face");
        CellKey::Knight { family, index }
    }
}

/// Cells of `B_∞`, named independently of any truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CellKey {
    Lozenge { x: i64, y: i64 },
    Knight { family: Family, index: i64 },
}

impl CellKey {
    /// Vertical translation by `k` rows.
    pub fn shifted(self, k: i64) -> CellKey {
        match self {
            CellKey::Lozenge { x, y } => CellKey::Lozenge { x, y: y + k },
            CellKey::Knight { family, index } => CellKey::Knight { family, index: index + k },
        }
    }

    fn rows(self) -> (i64, i64) {
        match self {
            CellKey::Lozenge { y, .. } => (y, y + 1),
            CellKey::Knight { index, .. } => (index - 4, index),
        }
    }
}

fn shift_set(cells: &BTreeSet<CellKey>, k: i64) -> BTreeSet<CellKey> {
    cells.iter().map(|c| c.shifted(k)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gallery {
    pub faces: Vec<usize>,
    /// `crossing[i]` is the edge shared by `faces[i-1]` and `faces[i]`
    /// (cyclically when closed).
    pub crossing: Vec<usize>,
    pub closed: bool,
    pub displacement: (i64, i64),
}

impl Gallery {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Consecutive faces share the recorded edge.
    pub fn is_valid(&self, c: &Complex2) -> bool {
        let k = self.faces.len();
        let has = |f: usize, e: usize| c.face(f).boundary.iter().any(|t| t.edge == e);
        self.crossing.len() == k
            && (0..k).all(|i| {
                let prev = if i == 0 { self.faces[k - 1] } else { self.faces[i - 1] };
                (i > 0 || self.closed) && has(prev, self.crossing[i]) && has(self.faces[i], self.crossing[i])
            })
    }

    /// Whether `other` is this closed gallery started elsewhere.
    pub fn is_rotation_of(&self, other: &Gallery) -> bool {
        let k = self.faces.len();
        k == other.faces.len()
            && (0..k.max(1)).any(|r| k == 0 || (other.faces == self.rotated(r).faces && other.crossing == self.rotated(r).crossing))
    }

    /// The same gallery started at position `r`.
    pub fn rotated(&self, r: usize) -> Gallery {
        let mut g = self.clone();
        g.faces.rotate_left(r);
        g.crossing.rotate_left(r);
        g
    }
}

/// Lozenge moves out of face `f`: (exit edge, next face, displacement).
fn lozenge_moves(c: &Complex2, inc: &[Vec<(usize, usize)>], f: usize) -> Vec<(usize, usize, (i64, i64))> {
    let face = c.face(f);
    if face.shape != LOZENGE {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (pos, t) in face.boundary.iter().enumerate() {
        for &(g, j) in &inc[t.edge] {
            if (g, j) != (f, pos) && c.face(g).shape == LOZENGE && j == (pos + 2) % 4 {
                out.push((t.edge, g, STEP[pos]));
            }
        }
    }
    out
}

/// Shortest closed lozenge gallery whose displacement in the universal cover
/// is `target`. Searches lengths up to `|target|₁ + slack`.
pub fn minimal_generating_gallery(c: &Complex2, target: (i64, i64), slack: usize) -> Result<Gallery, CobordismError> {
    let inc = c.edge_incidence();
    let lower = (target.0.abs() + target.1.abs()) as usize;
    let mut bound = lower + slack;
    let mut best: Option<Gallery> = None;
    for f0 in 0..c.faces().len() {
        if c.face(f0).shape != LOZENGE {
            continue;
        }
        type State = (usize, i64, i64);
        let mut parent: BTreeMap<State, (State, usize)> = BTreeMap::new();
        let mut depth: BTreeMap<State, usize> = BTreeMap::new();
        let start = (f0, 0, 0);
        depth.insert(start, 0);
        let mut queue = VecDeque::from([start]);
        let mut goal = None;
        'bfs: while let Some(s) = queue.pop_front() {
            let d = depth[&s];
            for (edge, g, (dx, dy)) in lozenge_moves(c, &inc, s.0) {
                let t = (g, s.1 + dx, s.2 + dy);
                let rest = ((target.0 - t.1).abs() + (target.1 - t.2).abs()) as usize;
                if d + 1 + rest > bound {
                    continue;
                }
                if t == (f0, target.0, target.1) {
                    goal = Some((s, edge, d + 1));
                    break 'bfs;
                }
                if depth.contains_key(&t) {
                    continue;
                }
                depth.insert(t, d + 1);
                parent.insert(t, (s, edge));
                queue.push_back(t);
            }
        }
        let Some((last, closing, len)) = goal else { continue };
        let mut faces = vec![last.0];
        let mut crossing = vec![closing];
        let mut s = last;
        while let Some(&(p, e)) = parent.get(&s) {
            faces.push(p.0);
            crossing.push(e);
            s = p;
        }
        faces.reverse();
        crossing.reverse();
        // crossing[0] is now the edge into faces[1]; rotate so that
        // crossing[i] enters faces[i].
        crossing.rotate_right(1);
        best = Some(Gallery { faces, crossing, closed: true, displacement: target });
        bound = len - 1;
        if len == lower {
            break;
        }
    }
    best.ok_or(CobordismError::Exhausted)
}

/// Knight key of a strip edge.
fn knight_of(strip: &StripFragment, edge: usize) -> (Family, i64) {
    let (f, i, _) = strip.slot_of[edge];
    (f, i)
}

/// Closed monotone (right/down) galleries of length 12 entering the lozenge
/// right of `A_y` through `A_y`, whose crossing edges pair off into knight
/// triangles each having its third side off the gallery.
pub fn zigzag_candidates(y: i64, amb: &Ambient) -> Result<(usize, Vec<Gallery>), CobordismError> {
    let strip = &amb.strip;
    let a = strip.v_edge(0, y - 1).ok_or_else(|| CobordismError::FragmentTooSmall(format!("edge A{y} missing")))?;
    let f0 = strip.square_face(0, y - 1).ok_or_else(|| CobordismError::FragmentTooSmall(format!("lozenge right of A{y} missing")))?;
    let c = &strip.complex;
    let inc = c.edge_incidence();
    let len = (SEAM_PERIOD.0 - SEAM_PERIOD.1) as usize;
    let mut found = Vec::new();
    let mut stack = vec![(vec![f0], vec![a], (0i64, 0i64))];
    while let Some((faces, crossing, disp)) = stack.pop() {
        let here = *faces.last().expect("non-empty");
        for (edge, g, step) in lozenge_moves(c, &inc, here) {
            if step != (1, 0) && step != (0, -1) {
                continue;
            }
            let d = (disp.0 + step.0, disp.1 + step.1);
            if faces.len() == len {
                if g == f0 && edge == a && d == SEAM_PERIOD {
                    found.push(Gallery { faces: faces.clone(), crossing: crossing.clone(), closed: true, displacement: d });
                }
                continue;
            }
            let (mut nf, mut nc) = (faces.clone(), crossing.clone());
            nf.push(g);
            nc.push(edge);
            stack.push((nf, nc, d));
        }
    }
    let total = found.len();
    let good = found
        .into_iter()
        .filter(|g| {
            let gallery_edges: BTreeSet<usize> = g.faces.iter().flat_map(|&f| c.face(f).boundary.iter().map(|t| t.edge)).collect();
            let crossing: BTreeSet<usize> = g.crossing.iter().copied().collect();
            let mut per_knight: BTreeMap<(Family, i64), usize> = BTreeMap::new();
            for &e in &g.crossing {
                *per_knight.entry(knight_of(strip, e)).or_default() += 1;
            }
            per_knight.iter().all(|(&(fam, idx), &count)| {
                count == 2
                    && knight_sides(strip, fam, idx)
                        .is_some_and(|sides| sides.iter().filter(|t| !crossing.contains(&t.edge)).all(|t| !gallery_edges.contains(&t.edge)))
            })
        })
        .collect();
    Ok((total, good))
}

/// The zig-zag generating gallery through `A_y`.
pub fn generating_gallery(y: i64, amb: &Ambient) -> Result<Gallery, CobordismError> {
    let (total, mut good) = zigzag_candidates(y, amb)?;
    match good.len() {
        1 => Ok(good.pop().expect("one gallery")),
        0 if total == 0 => Err(CobordismError::FragmentTooSmall(format!("no closed gallery through A{y}"))),
        k => Err(CobordismError::Certificate(format!("{k} of {total} monotone galleries pair off into knights"))),
    }
}

pub fn gallery_labels(g: &Gallery, strip: &StripFragment) -> Vec<String> {
    g.crossing.iter().map(|&e| strip.label(e)).collect()
}

/// Slots of the crossing edges read in the universal cover, starting at the
/// entry edge of `faces[0]` and ending with its translate after one turn.
/// Letters are periodic in `x` there, so the seam shift shows up as a change
/// of index.
pub fn cover_slots(g: &Gallery, strip: &StripFragment) -> Vec<(Family, i64, usize)> {
    let c = &strip.complex;
    let k = g.faces.len();
    let side = |p: (i64, i64), pos: usize| match pos {
        0 => (true, p.0, p.1),
        1 => (false, p.0 + 1, p.1),
        2 => (true, p.0, p.1 + 1),
        _ => (false, p.0, p.1),
    };
    let slot = |(horizontal, x, y): (bool, i64, i64)| strip_slot(horizontal, x.rem_euclid(WIDTH), y);
    let pos_of = |f: usize, e: usize| c.face(f).boundary.iter().position(|t| t.edge == e).expect("crossing on face");
    let mut p = strip.square_of[g.faces[0]];
    let mut out = vec![slot(side(p, pos_of(g.faces[0], g.crossing[0])))];
    for i in 1..=k {
        let pos = pos_of(g.faces[i - 1], g.crossing[i % k]);
        out.push(slot(side(p, pos)));
        p = (p.0 + STEP[pos].0, p.1 + STEP[pos].1);
    }
    out
}

/// Index drops between consecutive unprimed crossing letters, read in the
/// universal cover around one turn of the gallery.
pub fn letter_drops(g: &Gallery, strip: &StripFragment) -> Vec<i64> {
    let lead: Vec<i64> = cover_slots(g, strip).into_iter().filter(|s| s.2 == 0).map(|s| s.1).collect();
    lead.windows(2).map(|w| w[1] - w[0]).collect()
}

/// A knight triangle of a collar, open along the two gallery edges it
/// contains and missing its third side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollarTriple {
    pub family: Family,
    pub index: i64,
    pub face: usize,
    /// Positions in the gallery's crossing list.
    pub crossing: [usize; 2],
    pub omitted_edge: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collar {
    pub y: i64,
    pub gallery: Gallery,
    pub triples: Vec<CollarTriple>,
}

impl Collar {
    pub fn cells(&self, amb: &Ambient) -> BTreeSet<CellKey> {
        let mut out: BTreeSet<CellKey> = self.gallery.faces.iter().map(|&f| amb.cell_of(f)).collect();
        out.extend(self.triples.iter().map(|t| CellKey::Knight { family: t.family, index: t.index }));
        out
    }

    pub fn triple_names(&self) -> Vec<String> {
        self.triples.iter().map(|t| slot_label(t.family, t.index, 0)).collect()
    }
}

pub fn build_collar(y: i64, amb: &Ambient) -> Result<Collar, CobordismError> {
    let gallery = generating_gallery(y, amb)?;
    let mut by_knight: BTreeMap<(Family, i64), Vec<usize>> = BTreeMap::new();
    for (i, &e) in gallery.crossing.iter().enumerate() {
        by_knight.entry(knight_of(&amb.strip, e)).or_default().push(i);
    }
    let mut triples = Vec::new();
    for ((family, index), pos) in by_knight {
        let face = amb
            .knight_face(family, index)
            .ok_or_else(|| CobordismError::FragmentTooSmall(format!("knight {} does not close", slot_label(family, index, 0))))?;
        let omitted = amb.complex.face(face).boundary.iter().map(|t| t.edge).find(|e| !gallery.crossing.contains(e));
        let omitted_edge = omitted.ok_or_else(|| CobordismError::Certificate("knight lies inside the gallery".into()))?;
        triples.push(CollarTriple { family, index, face, crossing: [pos[0], pos[1]], omitted_edge });
    }
    triples.sort_by_key(|t| t.crossing);
    Ok(Collar { y, gallery, triples })
}

/// The nerve: one vertex per crossing edge, one edge per gallery lozenge
/// (joining consecutive crossings) and one per triple.
pub fn nerve_graph(collar: &Collar, strip: &StripFragment) -> LinkGraph {
    let mut h = LinkGraph::new();
    for &e in &collar.gallery.crossing {
        h.add_vertex(strip.label(e));
    }
    let k = collar.gallery.crossing.len();
    for i in 0..k {
        h.add_edge(i, (i + 1) % k, 1, "lozenge");
    }
    for t in &collar.triples {
        h.add_edge(t.crossing[0], t.crossing[1], 1, "triangle");
    }
    h
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductCertificate {
    pub cells: usize,
    pub crossing_edges: usize,
    /// Every face touching a crossing edge belongs to the collar.
    pub full: bool,
}

/// Checks that the collar is (open interval) × nerve: each lozenge and each
/// triple meets the crossing edges exactly at its two nerve endpoints, each
/// triple omits one edge lying off the gallery, and every crossing edge sits
/// in exactly one triple with all its faces inside the collar.
pub fn product_certificate(collar: &Collar, amb: &Ambient) -> Result<ProductCertificate, CobordismError> {
    let c = &amb.complex;
    let g = &collar.gallery;
    let k = g.crossing.len();
    let crossing: BTreeSet<usize> = g.crossing.iter().copied().collect();
    if crossing.len() != k || !g.closed || !g.is_valid(c) {
        return Err(CobordismError::Certificate("gallery is not a closed gallery with distinct crossings".into()));
    }
    for (i, &f) in g.faces.iter().enumerate() {
        let on: BTreeSet<usize> = c.face(f).boundary.iter().map(|t| t.edge).filter(|e| crossing.contains(e)).collect();
        let want: BTreeSet<usize> = [g.crossing[i], g.crossing[(i + 1) % k]].into();
        if on != want {
            return Err(CobordismError::Certificate(format!("lozenge {f} meets crossings {on:?}")));
        }
    }
    let gallery_edges: BTreeSet<usize> = g.faces.iter().flat_map(|&f| c.face(f).boundary.iter().map(|t| t.edge)).collect();
    let mut in_triple = vec![0usize; k];
    for t in &collar.triples {
        let sides: Vec<usize> = c.face(t.face).boundary.iter().map(|x| x.edge).collect();
        let on: Vec<usize> = sides.iter().copied().filter(|e| crossing.contains(e)).collect();
        let off: Vec<usize> = sides.iter().copied().filter(|e| !crossing.contains(e)).collect();
        let name = slot_label(t.family, t.index, 0);
        if on.len() != 2 || off != [t.omitted_edge] || gallery_edges.contains(&t.omitted_edge) {
            return Err(CobordismError::Certificate(format!("triple {name} is not semi-open along the gallery")));
        }
        for p in t.crossing {
            in_triple[p] += 1;
        }
    }
    if let Some(p) = in_triple.iter().position(|&n| n != 1) {
        return Err(CobordismError::Certificate(format!(
            "crossing edge {} lies in {} triples",
            amb.strip.label(g.crossing[p]),
            in_triple[p]
        )));
    }
    let own: BTreeSet<usize> = g.faces.iter().copied().chain(collar.triples.iter().map(|t| t.face)).collect();
    let inc = c.edge_incidence();
    let full = g.crossing.iter().all(|&e| inc[e].iter().all(|(f, _)| own.contains(f)));
    if !full {
        return Err(CobordismError::Certificate("a crossing edge has a face outside the collar".into()));
    }
    Ok(ProductCertificate { cells: own.len(), crossing_edges: k, full })
}

/// Certified nerve of a collar.
pub fn collar_nerve(collar: &Collar, amb: &Ambient) -> Result<LinkGraph, CobordismError> {
    product_certificate(collar, amb)?;
    Ok(nerve_graph(collar, &amb.strip))
}

/// The 12-cycle with an extra edge `(n, n+2)` for every `n ≡ 0, 1 mod 4`.
pub fn reference_nerve() -> LinkGraph {
    let mut h = LinkGraph::new();
    for i in 0..12 {
        h.add_vertex(i.to_string());
    }
    for i in 0..12 {
        h.add_edge(i, (i + 1) % 12, 1, "lozenge");
    }
    for i in (0..12).filter(|i| i % 4 == 0 || i % 4 == 1) {
        h.add_edge(i, i + 2, 1, "triangle");
    }
    h
}

pub fn nerve_matches_reference(h: &LinkGraph) -> bool {
    find_isomorphism(h, &reference_nerve(), IsoMode::Plain).is_some()
}

/// Rows of ambient needed around collar `y`.
const BELOW: i64 = 12;
const ABOVE: i64 = 4;

/// Cells of the collar `C_y`.
pub fn collar_cells(y: i64) -> Result<BTreeSet<CellKey>, CobordismError> {
    let amb = Ambient::new(y - BELOW, y + ABOVE)?;
    let collar = build_collar(y, &amb)?;
    product_certificate(&collar, &amb)?;
    Ok(collar.cells(&amb))
}

/// A group cobordism as a set of cells of `B_∞`, with its two collars.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cobordism {
    pub domain_y: i64,
    pub codomain_y: i64,
    pub domain: BTreeSet<CellKey>,
    pub codomain: BTreeSet<CellKey>,
    pub cells: BTreeSet<CellKey>,
    /// Closed triangles, the cells not in any collar.
    pub closed: BTreeSet<CellKey>,
}

impl Cobordism {
    /// The identity arrow on `C_y`.
    pub fn identity(y: i64) -> Result<Cobordism, CobordismError> {
        let c = collar_cells(y)?;
        Ok(Cobordism { domain_y: y, codomain_y: y, domain: c.clone(), codomain: c.clone(), cells: c, closed: BTreeSet::new() })
    }

    /// `C_y ∪ C_{y+1}` with the closed triangle of `D_{y-2}`.
    pub fn elementary(y: i64) -> Result<Cobordism, CobordismError> {
        let domain = collar_cells(y)?;
        let codomain = collar_cells(y + 1)?;
        let d = CellKey::Knight { family: Family::D, index: y - 2 };
        let mut cells: BTreeSet<CellKey> = domain.union(&codomain).copied().collect();
        cells.insert(d);
        Ok(Cobordism { domain_y: y, codomain_y: y + 1, domain, codomain, cells, closed: [d].into() })
    }

    pub fn shifted(&self, k: i64) -> Cobordism {
        Cobordism {
            domain_y: self.domain_y + k,
            codomain_y: self.codomain_y + k,
            domain: shift_set(&self.domain, k),
            codomain: shift_set(&self.codomain, k),
            cells: shift_set(&self.cells, k),
            closed: shift_set(&self.closed, k),
        }
    }

    pub fn closed_triangle_count(&self) -> usize {
        self.closed.len()
    }

    fn rows(&self) -> (i64, i64) {
        let lo = self.cells.iter().map(|c| c.rows().0).min().unwrap_or(self.domain_y);
        let hi = self.cells.iter().map(|c| c.rows().1).max().unwrap_or(self.codomain_y);
        (lo, hi)
    }

    /// The cells as a finite complex (closure of the faces in `B_∞`), with
    /// the cell of each face.
    pub fn realize(&self) -> Result<(Complex2, Vec<CellKey>), CobordismError> {
        let (lo, hi) = self.rows();
        let amb = Ambient::new(lo - 4, hi + 4)?;
        let mut faces = Vec::with_capacity(self.cells.len());
        for &cell in &self.cells {
            faces.push(amb.face_of(cell).ok_or_else(|| CobordismError::FragmentTooSmall(format!("{cell:?} missing")))?);
        }
        let (c, _, _, face_ids) = amb.complex.subcomplex(&faces);
        let keys = face_ids.iter().map(|&f| amb.cell_of(f)).collect();
        Ok((c, keys))
    }
}

/// `b2 ∘ b1`: `b2` is translated so that its domain collar lands on the
/// codomain collar of `b1`, and the cells are united.
pub fn compose(b1: &Cobordism, b2: &Cobordism) -> Result<Cobordism, CobordismError> {
    let b2 = b2.shifted(b1.codomain_y - b2.domain_y);
    if b2.domain != b1.codomain {
        let missing = b1.codomain.symmetric_difference(&b2.domain).count();
        return Err(CobordismError::CollarMismatch(format!("collars differ in {missing} cells")));
    }
    Ok(Cobordism {
        domain_y: b1.domain_y,
        codomain_y: b2.codomain_y,
        domain: b1.domain.clone(),
        codomain: b2.codomain.clone(),
        cells: b1.cells.union(&b2.cells).copied().collect(),
        closed: b1.closed.union(&b2.closed).copied().collect(),
    })
}

/// The `n`-fold composite of the elementary cobordism from `C_y`.
pub fn power(n: usize, y: i64) -> Result<Cobordism, CobordismError> {
    let b = Cobordism::elementary(y)?;
    let mut out = Cobordism::identity(y)?;
    for _ in 0..n {
        out = compose(&out, &b)?;
    }
    Ok(out)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Surgery closure: glues the codomain collar of `b` onto its domain collar
/// by the translation between them.
pub fn close_up(b: &Cobordism) -> Result<Complex2, CobordismError> {
    let shift = b.codomain_y - b.domain_y;
    if shift <= 0 {
        return Err(CobordismError::CollarMismatch("closing needs at least one factor".into()));
    }
    if shift_set(&b.codomain, -shift) != b.domain {
        return Err(CobordismError::CollarMismatch("codomain is not a translate of the domain".into()));
    }
    let (c, keys) = b.realize()?;
    let face_of: BTreeMap<CellKey, usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut vp: Vec<usize> = (0..c.vertex_count()).collect();
    let mut ep: Vec<usize> = (0..c.edges().len()).collect();
    let mut dropped = BTreeSet::new();
    for &cell in &b.codomain {
        let (fa, fb) = (face_of[&cell], face_of[&cell.shifted(-shift)]);
        dropped.insert(fa);
        for (ta, tb) in c.face(fa).boundary.iter().zip(&c.face(fb).boundary) {
            if ta.reversed != tb.reversed {
                return Err(CobordismError::CollarMismatch("collar cells are oriented differently".into()));
            }
            union(&mut ep, ta.edge, tb.edge);
            let (ea, eb) = (c.edge(ta.edge), c.edge(tb.edge));
            union(&mut vp, ea.from, eb.from);
            union(&mut vp, ea.to, eb.to);
        }
    }
    let mut vclass = BTreeMap::new();
    for v in 0..c.vertex_count() {
        let r = find(&mut vp, v);
        let next = vclass.len();
        vclass.entry(r).or_insert(next);
    }
    let mut out = Complex2::with_vertices(vclass.len());
    let mut eclass = BTreeMap::new();
    for e in 0..c.edges().len() {
        let r = find(&mut ep, e);
        if let std::collections::btree_map::Entry::Vacant(slot) = eclass.entry(r) {
            let edge = c.edge(r);
            slot.insert(out.add_edge(vclass[&find(&mut vp, edge.from)], vclass[&find(&mut vp, edge.to)], edge.label.clone())?);
        }
    }
    for (f, face) in c.faces().iter().enumerate() {
        if dropped.contains(&f) {
            continue;
        }
        let boundary = face.boundary.iter().map(|t| Traversal { edge: eclass[&find(&mut ep, t.edge)], reversed: t.reversed }).collect();
        out.add_face(Face { shape: face.shape.clone(), boundary, corners: face.corners.clone() })?;
    }
    Ok(out)
}
