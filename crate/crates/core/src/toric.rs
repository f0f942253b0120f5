//! The lettered torus `T_n`, its knights, the jump involution σ and the
//! basic construction `B_n`.
//!
//! Coordinates live on the strip `[0,6] × Z`; the seam identifies `(6, y)`
//! with `(0, y + 6)`, and `y` is then reduced mod `n`. Vertex `(x, y)` has
//! id `6y + x`; the horizontal edge leaving it rightwards has id
//! `2(6y + x)`, the vertical edge leaving it upwards `2(6y + x) + 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex2, Corner, EdgeEnd, End, Face, Traversal};
use crate::error::ToricError;

pub const WIDTH: i64 = 6;

pub const TRIANGLE: &str = "triangle";
pub const LOZENGE: &str = "lozenge";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TorusCoord {
    pub x: i64,
    pub y: i64,
}

impl TorusCoord {
    /// Canonical representative with `0 <= x < 6` and `0 <= y < n`.
    pub fn normalized(x: i64, y: i64, n: i64) -> Self {
        let q = x.div_euclid(WIDTH);
        let x = x.rem_euclid(WIDTH);
        TorusCoord { x, y: (y + WIDTH * q).rem_euclid(n) }
    }

    pub fn id(self) -> usize {
        (WIDTH * self.y + self.x) as usize
    }

    pub fn from_id(id: usize) -> Self {
        let id = id as i64;
        TorusCoord { x: id % WIDTH, y: id / WIDTH }
    }
}

impl fmt::Display for TorusCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

fn check_n(n: usize) -> Result<i64, ToricError> {
    if n == 0 {
        return Err(ToricError::BadHeight(0));
    }
    Ok(n as i64)
}

/// Horizontal edge from `(x, y)` to `(x + 1, y)`.
pub fn h_edge(x: i64, y: i64, n: i64) -> usize {
    2 * TorusCoord::normalized(x, y, n).id()
}

/// Vertical edge from `(x, y)` to `(x, y + 1)`.
pub fn v_edge(x: i64, y: i64, n: i64) -> usize {
    2 * TorusCoord::normalized(x, y, n).id() + 1
}

/// The jump involution σ.
pub fn jump(c: TorusCoord, n: usize) -> TorusCoord {
    let n = n as i64;
    if c.x.rem_euclid(2) == 0 {
        TorusCoord::normalized(c.x + 1, c.y - 2, n)
    } else {
        TorusCoord::normalized(c.x - 1, c.y + 2, n)
    }
}

/// Counterclockwise direction of an edge-end at a torus vertex:
/// 1 = +x, 2 = +y, 3 = −x, 4 = −y.
pub fn direction(end: EdgeEnd) -> u8 {
    match (end.edge.is_multiple_of(2), end.end) {
        (true, End::Tail) => 1,
        (false, End::Tail) => 2,
        (true, End::Head) => 3,
        (false, End::Head) => 4,
    }
}

pub fn lozenge_corners() -> Vec<Corner> {
    vec![Corner::new(2, "p"), Corner::new(4, "q"), Corner::new(2, "p"), Corner::new(4, "q")]
}

pub fn triangle_corners() -> Vec<Corner> {
    vec![Corner::new(2, "t"); 3]
}

/// The bare torus: lozenge at square `(x, y)` has its acute corners at
/// `(x, y)` and `(x + 1, y + 1)`.
pub fn build_torus(n: usize) -> Result<Complex2, ToricError> {
    let nn = check_n(n)?;
    let mut c = Complex2::with_vertices(6 * n);
    for id in 0..6 * n {
        let p = TorusCoord::from_id(id);
        let right = TorusCoord::normalized(p.x + 1, p.y, nn).id();
        let up = TorusCoord::normalized(p.x, p.y + 1, nn).id();
        c.add_edge(id, right, None)?;
        c.add_edge(id, up, None)?;
    }
    for id in 0..6 * n {
        let p = TorusCoord::from_id(id);
        let (x, y) = (p.x, p.y);
        c.add_face(Face {
            shape: LOZENGE.into(),
            boundary: vec![
                Traversal::forward(h_edge(x, y, nn)),
                Traversal::forward(v_edge(x + 1, y, nn)),
                Traversal::backward(h_edge(x, y + 1, nn)),
                Traversal::backward(v_edge(x, y, nn)),
            ],
            corners: lozenge_corners(),
        })?;
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::A, Family::B, Family::C, Family::D];

    /// Column of the first edge slot.
    pub fn column(self) -> i64 {
        match self {
            Family::A => 0,
            Family::B => 2,
            Family::C => 4,
            Family::D => 1,
        }
    }
}

/// A letter and its three edge slots `(L, L', L'')`, with the traversal
/// direction used when its triangle is attached.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Knight {
    pub family: Family,
    pub index: usize,
    pub edges: [usize; 3],
    pub reversed: [bool; 3],
}

impl Knight {
    pub fn name(&self) -> String {
        format!("{:?}{}", self.family, self.index)
    }

    pub fn slot_name(&self, slot: usize) -> String {
        format!("{}{}", self.name(), "'".repeat(slot))
    }

    pub fn boundary(&self) -> Vec<Traversal> {
        (0..3).map(|i| Traversal { edge: self.edges[i], reversed: self.reversed[i] }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusLabelling {
    pub n: usize,
    pub knights: Vec<Knight>,
    /// For each edge, every (knight, slot) written on it.
    pub slots: Vec<Vec<(usize, usize)>>,
}

impl TorusLabelling {
    pub fn letter_count(&self) -> usize {
        self.knights.len()
    }

    pub fn slot_count(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }

    /// Every edge carries exactly one slot.
    pub fn is_exact_cover(&self) -> bool {
        self.slots.iter().all(|s| s.len() == 1)
    }

    pub fn edge_label(&self, edge: usize) -> Option<String> {
        match self.slots[edge].as_slice() {
            [(k, s)] => Some(self.knights[*k].slot_name(*s)),
            _ => None,
        }
    }

    pub fn knight(&self, family: Family, index: usize) -> Option<&Knight> {
        self.knights.iter().find(|k| k.family == family && k.index == index)
    }
}

pub fn knight(family: Family, y: usize, n: usize) -> Knight {
    let nn = n as i64;
    let y = y as i64;
    let x = family.column();
    match family {
        Family::D => Knight {
            family,
            index: y as usize,
            edges: [h_edge(1, y, nn), h_edge(3, y - 2, nn), h_edge(5, y - 4, nn)],
            reversed: [false, false, false],
        },
        _ => Knight {
            family,
            index: y as usize,
            edges: [v_edge(x, y - 1, nn), h_edge(x, y - 2, nn), v_edge(x + 1, y - 4, nn)],
            reversed: [false, true, false],
        },
    }
}

pub fn place_letters(n: usize) -> Result<TorusLabelling, ToricError> {
    check_n(n)?;
    let mut knights = Vec::with_capacity(4 * n);
    for family in Family::ALL {
        for y in 0..n {
            knights.push(knight(family, y, n));
        }
    }
    let mut slots = vec![Vec::new(); 12 * n];
    for (k, kn) in knights.iter().enumerate() {
        for (s, &e) in kn.edges.iter().enumerate() {
            slots[e].push((k, s));
        }
    }
    Ok(TorusLabelling { n, knights, slots })
}

/// A directed jump from the end of one knight edge to the start of the next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Jump {
    pub from: TorusCoord,
    pub to: TorusCoord,
}

/// The three jumps of each knight, in knight order.
pub fn knight_jumps(torus: &Complex2, labelling: &TorusLabelling) -> Vec<Jump> {
    let mut out = Vec::with_capacity(3 * labelling.knights.len());
    for k in &labelling.knights {
        let b = k.boundary();
        for i in 0..3 {
            let from = torus.traversal_finish(b[i]);
            let to = torus.traversal_start(b[(i + 1) % 3]);
            out.push(Jump { from: TorusCoord::from_id(from), to: TorusCoord::from_id(to) });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvolutionReport {
    pub n: usize,
    pub involution: bool,
    pub fixed_points: Vec<TorusCoord>,
    pub induced_jumps: usize,
    pub distinct_directed: usize,
    pub distinct_supports: usize,
    /// Induced jumps that are not σ.
    pub off_sigma: Vec<Jump>,
    /// Pairs of induced jumps that overlap without sharing support.
    pub overlapping: Vec<(Jump, Jump)>,
    pub orbit_count: usize,
}

impl InvolutionReport {
    pub fn passed(&self) -> bool {
        self.involution && self.fixed_points.is_empty() && self.off_sigma.is_empty() && self.overlapping.is_empty()
    }
}

/// σ² = id, fixed points, agreement of knight jumps with σ, and the
/// disjoint-or-same-support property for every pair of knight jumps.
pub fn involution_check(n: usize) -> Result<InvolutionReport, ToricError> {
    let torus = build_torus(n)?;
    let labelling = place_letters(n)?;
    let coords: Vec<TorusCoord> = (0..6 * n).map(TorusCoord::from_id).collect();
    let involution = coords.iter().all(|&c| jump(jump(c, n), n) == c);
    let fixed_points: Vec<TorusCoord> = coords.iter().copied().filter(|&c| jump(c, n) == c).collect();
    let jumps = knight_jumps(&torus, &labelling);
    let off_sigma: Vec<Jump> = jumps.iter().copied().filter(|j| jump(j.from, n) != j.to).collect();
    let directed: BTreeSet<Jump> = jumps.iter().copied().collect();
    let support = |j: &Jump| {
        let (a, b) = (j.from.min(j.to), j.from.max(j.to));
        (a, b)
    };
    let supports: BTreeSet<_> = jumps.iter().map(support).collect();
    let mut overlapping = Vec::new();
    let unique: Vec<Jump> = directed.iter().copied().collect();
    for (i, a) in unique.iter().enumerate() {
        for b in &unique[i + 1..] {
            let (sa, sb) = (support(a), support(b));
            let meet = sa.0 == sb.0 || sa.0 == sb.1 || sa.1 == sb.0 || sa.1 == sb.1;
            if meet && sa != sb {
                overlapping.push((*a, *b));
            }
        }
    }
    let mut orbits: BTreeSet<(TorusCoord, TorusCoord)> = BTreeSet::new();
    for &c in &coords {
        let d = jump(c, n);
        orbits.insert((c.min(d), c.max(d)));
    }
    Ok(InvolutionReport {
        n,
        involution,
        fixed_points,
        induced_jumps: jumps.len(),
        distinct_directed: directed.len(),
        distinct_supports: supports.len(),
        off_sigma,
        overlapping,
        orbit_count: orbits.len(),
    })
}

/// A permutation of the four directions, `image[d - 1]` being the image of `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perm4(pub [u8; 4]);

impl Perm4 {
    pub fn apply(self, d: u8) -> u8 {
        self.0[(d - 1) as usize]
    }

    pub fn inverse(self) -> Perm4 {
        let mut out = [0; 4];
        for d in 1..=4u8 {
            out[(self.apply(d) - 1) as usize] = d;
        }
        Perm4(out)
    }

    /// Cycle notation starting each cycle at its smallest element, fixed
    /// points omitted.
    pub fn cycles(self) -> Vec<Vec<u8>> {
        let mut seen = [false; 4];
        let mut out = Vec::new();
        for s in 1..=4u8 {
            if seen[(s - 1) as usize] || self.apply(s) == s {
                continue;
            }
            let mut cyc = Vec::new();
            let mut d = s;
            while !seen[(d - 1) as usize] {
                seen[(d - 1) as usize] = true;
                cyc.push(d);
                d = self.apply(d);
            }
            out.push(cyc);
        }
        out
    }

    pub fn from_cycle(cycle: &[u8]) -> Perm4 {
        let mut p = [1, 2, 3, 4];
        for (i, &d) in cycle.iter().enumerate() {
            p[(d - 1) as usize] = cycle[(i + 1) % cycle.len()];
        }
        Perm4(p)
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(u8::to_string).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

/// The permutation of directions carried across the jump `from → σ(from)` by
/// the triangle corners attached there.
pub fn label_permutation(n: usize, from: TorusCoord) -> Result<Perm4, ToricError> {
    let torus = build_torus(n)?;
    let labelling = place_letters(n)?;
    let from = TorusCoord::normalized(from.x, from.y, n as i64);
    let to = jump(from, n);
    let mut image = [0u8; 4];
    for k in &labelling.knights {
        let b = k.boundary();
        for i in 0..3 {
            let arrive = b[i].finish_end();
            let leave = b[(i + 1) % 3].start_end();
            let a = TorusCoord::from_id(torus.vertex_of(arrive));
            let l = TorusCoord::from_id(torus.vertex_of(leave));
            if a == from && l == to {
                image[(direction(arrive) - 1) as usize] = direction(leave);
            } else if a == to && l == from {
                image[(direction(leave) - 1) as usize] = direction(arrive);
            }
        }
    }
    let mut sorted = image;
    sorted.sort_unstable();
    if sorted != [1, 2, 3, 4] {
        return Err(ToricError::OpenKnight(format!("jump at {from} carries {image:?}")));
    }
    Ok(Perm4(image))
}

/// `B_n` together with the data it was sewn from.
#[derive(Clone, Debug)]
pub struct BasicConstruction {
    pub n: usize,
    pub complex: Complex2,
    pub torus: Complex2,
    pub labelling: TorusLabelling,
    /// Torus vertex id → vertex of `B_n`.
    pub vertex_class: Vec<usize>,
}

impl BasicConstruction {
    /// Faces of `B_n` coming from the torus: ids `0..6n`; triangles follow.
    pub fn lozenge_count(&self) -> usize {
        6 * self.n
    }

    pub fn triangle_faces(&self) -> std::ops::Range<usize> {
        6 * self.n..10 * self.n
    }
}

/// Orbit id of a torus vertex under σ: the even member `(x, y)` gives `3y + x/2`.
pub fn orbit_id(c: TorusCoord, n: usize) -> usize {
    let even = if c.x % 2 == 0 { c } else { jump(c, n) };
    (3 * even.y + even.x / 2) as usize
}

pub fn basic_construction(n: usize) -> Result<BasicConstruction, ToricError> {
    let torus = build_torus(n)?;
    let labelling = place_letters(n)?;
    let report = involution_check(n)?;
    if let Some(p) = report.fixed_points.first() {
        return Err(ToricError::FixedPoint(p.x, p.y));
    }
    let vertex_class: Vec<usize> = (0..6 * n).map(|id| orbit_id(TorusCoord::from_id(id), n)).collect();
    let mut complex = Complex2::with_vertices(3 * n);
    for (id, e) in torus.edges().iter().enumerate() {
        complex.add_edge(vertex_class[e.from], vertex_class[e.to], labelling.edge_label(id))?;
    }
    for f in torus.faces() {
        complex.add_face(f.clone())?;
    }
    for k in &labelling.knights {
        complex
            .add_face(Face { shape: TRIANGLE.into(), boundary: k.boundary(), corners: triangle_corners() })
            .map_err(|_| ToricError::OpenKnight(k.name()))?;
    }
    Ok(BasicConstruction { n, complex, torus, labelling, vertex_class })
}

/// Per-letter summary for display.
pub fn letter_table(labelling: &TorusLabelling, torus: &Complex2) -> BTreeMap<String, [(TorusCoord, TorusCoord); 3]> {
    labelling
        .knights
        .iter()
        .map(|k| {
            let ends = k.edges.map(|e| {
                let edge = torus.edge(e);
                (TorusCoord::from_id(edge.from), TorusCoord::from_id(edge.to))
            });
            (k.name(), ends)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::link::compute_link;

    #[test]
    fn seam_wraps_with_shift() {
        assert_eq!(TorusCoord::normalized(6, 0, 5), TorusCoord { x: 0, y: 1 });
        assert_eq!(TorusCoord::normalized(-1, 0, 5), TorusCoord { x: 5, y: 4 });
        assert_eq!(TorusCoord::normalized(3, -2, 5), TorusCoord { x: 3, y: 3 });
    }

    #[test]
    fn torus_counts() {
        assert_eq!(build_torus(5).unwrap().euler_counts(), (30, 60, 30));
        assert_eq!(build_torus(1).unwrap().euler_counts(), (6, 12, 6));
        assert!(build_torus(0).is_err());
    }

    #[test]
    fn torus_links_are_single_cycles() {
        for n in [1, 2, 5] {
            let t = build_torus(n).unwrap();
            for v in t.vertices() {
                let l = compute_link(&t, v).unwrap();
                assert_eq!(l.cycle_component_lengths(), vec![Some(crate::AngleUnits(12))]);
                assert_eq!(l.vertex_count(), 4);
            }
        }
    }

    #[test]
    fn origin_jump() {
        assert_eq!(jump(TorusCoord { x: 0, y: 0 }, 5), TorusCoord { x: 1, y: 3 });
    }

    #[test]
    fn a0_placement() {
        let n = 5;
        let t = build_torus(n).unwrap();
        let l = place_letters(n).unwrap();
        let table = letter_table(&l, &t);
        let a0 = table["A0"];
        let c = |x, y| TorusCoord { x, y };
        assert_eq!(a0[1], (c(0, 3), c(1, 3)));
        assert_eq!(a0[2], (c(1, 1), c(1, 2)));
    }

    #[test]
    fn perm_cycles_roundtrip() {
        let p = Perm4::from_cycle(&[1, 2, 4, 3]);
        assert_eq!(p.to_string(), "(1,2,4,3)");
        assert_eq!(p.inverse().to_string(), "(1,3,4,2)");
        assert_eq!(Perm4([1, 2, 3, 4]).to_string(), "()");
    }

    #[test]
    fn b5_counts() {
        let b = basic_construction(5).unwrap();
        assert_eq!(b.complex.euler_counts(), (15, 60, 50));
        assert_eq!(b.labelling.letter_count(), 20);
    }
}
