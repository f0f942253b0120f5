//! Pinching lozenge tori along a fixed-point-free involution, filling the
//! 3-systoles of the result with triangles, and decomposing a complex of
//! type Aut(F2) back into tori.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complex::{Complex2, EdgeEnd, Face, Traversal};
use crate::error::PinchError;
use crate::link::{compute_link, CycleWitness, LinkGraph};
use crate::toric::{build_torus, jump, triangle_corners, TorusCoord, TRIANGLE};
use crate::typesys::{autf2_type, is_of_type, TypeReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PinchData {
    pub tori: Vec<Complex2Json>,
    /// Vertex pairs over the disjoint union of the tori, ids offset by the
    /// vertex counts of the preceding tori.
    pub sigma: Vec<(usize, usize)>,
}

/// Serde wrapper so complexes travel in their JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "crate::complex::ComplexJson", into = "crate::complex::ComplexJson")]
pub struct Complex2Json(pub Complex2);

impl TryFrom<crate::complex::ComplexJson> for Complex2Json {
    type Error = crate::error::ComplexError;
    fn try_from(raw: crate::complex::ComplexJson) -> Result<Self, Self::Error> {
        Complex2::try_from(raw).map(Complex2Json)
    }
}

impl From<Complex2Json> for crate::complex::ComplexJson {
    fn from(c: Complex2Json) -> Self {
        c.0.to_json_value()
    }
}

impl PinchData {
    pub fn new(tori: Vec<Complex2>, sigma: Vec<(usize, usize)>) -> Self {
        PinchData { tori: tori.into_iter().map(Complex2Json).collect(), sigma }
    }

    /// `T_n` with the jump involution.
    pub fn torus_with_jumps(n: usize) -> Result<PinchData, PinchError> {
        let torus = build_torus(n).map_err(|e| PinchError::Precondition(e.to_string()))?;
        let sigma = (0..6 * n).map(|id| (id, jump(TorusCoord::from_id(id), n).id())).filter(|(a, b)| a < b).collect();
        Ok(PinchData::new(vec![torus], sigma))
    }

    pub fn vertex_total(&self) -> usize {
        self.tori.iter().map(|t| t.0.vertex_count()).sum()
    }

    /// σ as a full map; checks the involution invariants.
    pub fn sigma_map(&self) -> Result<Vec<usize>, PinchError> {
        let total = self.vertex_total();
        let mut map = vec![usize::MAX; total];
        for &(a, b) in &self.sigma {
            if a == b {
                return Err(PinchError::FixedPoint(a));
            }
            for (x, y) in [(a, b), (b, a)] {
                if x >= total {
                    return Err(PinchError::Uncovered(x));
                }
                if map[x] != usize::MAX && map[x] != y {
                    return Err(PinchError::NotInvolution(x));
                }
                map[x] = y;
            }
        }
        if let Some(v) = map.iter().position(|&y| y == usize::MAX) {
            return Err(PinchError::Uncovered(v));
        }
        Ok(map)
    }

    /// Disjoint union of the tori.
    pub fn union(&self) -> Complex2 {
        let mut c = Complex2::with_vertices(self.vertex_total());
        let (mut voff, mut eoff) = (0, 0);
        for t in &self.tori {
            let t = &t.0;
            for e in t.edges() {
                c.add_edge(e.from + voff, e.to + voff, e.label.clone()).expect("offset ids");
            }
            for f in t.faces() {
                let boundary = f.boundary.iter().map(|x| Traversal { edge: x.edge + eoff, reversed: x.reversed }).collect();
                c.add_face(Face { shape: f.shape.clone(), boundary, corners: f.corners.clone() }).expect("offset faces");
            }
            voff += t.vertex_count();
            eoff += t.edges().len();
        }
        c
    }
}

/// `T' = T/σ`; pinched vertex ids follow the smallest member of each pair.
pub fn pinch(data: &PinchData) -> Result<Complex2, PinchError> {
    let sigma = data.sigma_map()?;
    let union = data.union();
    let mut class = vec![usize::MAX; sigma.len()];
    let mut next = 0;
    for v in 0..sigma.len() {
        if class[v] == usize::MAX {
            class[v] = next;
            class[sigma[v]] = next;
            next += 1;
        }
    }
    Ok(union.relabel_vertices(&class, next))
}

/// A closed 3-path stored in its least rotation/reversal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Systole3 {
    pub path: [Traversal; 3],
}

impl Systole3 {
    pub fn canonical(path: [Traversal; 3]) -> Systole3 {
        let key = |p: &[Traversal; 3]| p.map(|t| (t.edge, t.reversed));
        let rev = [path[2].inverse(), path[1].inverse(), path[0].inverse()];
        let mut best = path;
        for base in [path, rev] {
            for r in 0..3 {
                let cand = [base[r], base[(r + 1) % 3], base[(r + 2) % 3]];
                if key(&cand) < key(&best) {
                    best = cand;
                }
            }
        }
        Systole3 { path: best }
    }

    pub fn edges(&self) -> [usize; 3] {
        self.path.map(|t| t.edge)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystoleReport {
    pub systoles: Vec<Systole3>,
    /// Number of systoles through each edge (with multiplicity).
    pub membership: Vec<usize>,
    /// Edges whose membership is not exactly one.
    pub flagged: Vec<usize>,
    /// Shortest closed edge path whose corners all jump between the two
    /// circles of a pinched vertex; `None` if there is none up to length 3.
    pub shortest_jump_cycle: Option<usize>,
    pub loops: usize,
}

impl SystoleReport {
    /// Every edge lies in exactly one systole.
    pub fn unique_membership(&self) -> bool {
        self.flagged.is_empty()
    }
}

/// For each vertex: edge-end → index of its link component.
fn end_circles(c: &Complex2) -> BTreeMap<EdgeEnd, (usize, usize)> {
    let mut out = BTreeMap::new();
    for v in c.vertices() {
        let link = compute_link(c, v).expect("vertex in range");
        for (ci, comp) in link.components().into_iter().enumerate() {
            for lv in comp {
                out.insert(link.vertices[lv].end.expect("computed link"), (v, ci));
            }
        }
    }
    out
}

fn outgoing(c: &Complex2) -> Vec<Vec<Traversal>> {
    let mut out = vec![Vec::new(); c.vertex_count()];
    for (id, e) in c.edges().iter().enumerate() {
        out[e.from].push(Traversal::forward(id));
        out[e.to].push(Traversal::backward(id));
    }
    out
}

/// Closed non-backtracking edge paths of length 3 whose three corners all
/// jump between link components.
pub fn find_systoles(tprime: &Complex2) -> SystoleReport {
    let circles = end_circles(tprime);
    let out = outgoing(tprime);
    let jumps = |a: Traversal, b: Traversal| circles[&a.finish_end()] != circles[&b.start_end()];
    let mut found: BTreeSet<Systole3> = BTreeSet::new();
    let mut shortest = None;
    for v in tprime.vertices() {
        for &t0 in &out[v] {
            let w = tprime.traversal_finish(t0);
            for &t1 in &out[w] {
                if !jumps(t0, t1) {
                    continue;
                }
                if tprime.traversal_finish(t1) == v && jumps(t1, t0) {
                    shortest = Some(shortest.map_or(2, |s: usize| s.min(2)));
                }
                let x = tprime.traversal_finish(t1);
                for &t2 in &out[x] {
                    if jumps(t1, t2) && tprime.traversal_finish(t2) == v && jumps(t2, t0) {
                        found.insert(Systole3::canonical([t0, t1, t2]));
                        shortest = Some(shortest.map_or(3, |s: usize| s.min(3)));
                    }
                }
            }
            if tprime.traversal_finish(t0) == v && jumps(t0, t0) {
                shortest = Some(1);
            }
        }
    }
    let systoles: Vec<Systole3> = found.into_iter().collect();
    let mut membership = vec![0; tprime.edges().len()];
    for s in &systoles {
        for e in s.edges() {
            membership[e] += 1;
        }
    }
    let flagged = (0..membership.len()).filter(|&e| membership[e] != 1).collect();
    let loops = tprime.edges().iter().filter(|e| e.is_loop()).count();
    SystoleReport { systoles, membership, flagged, shortest_jump_cycle: shortest, loops }
}

/// Attaches one triangle to each systole.
pub fn fill(tprime: &Complex2, systoles: &[Systole3]) -> Result<Complex2, PinchError> {
    let mut b = tprime.clone();
    for s in systoles {
        b.add_face(Face { shape: TRIANGLE.into(), boundary: s.path.to_vec(), corners: triangle_corners() })?;
    }
    Ok(b)
}

/// Shortest link cycle over all vertices.
pub fn min_link_cycle(c: &Complex2) -> Option<(usize, CycleWitness)> {
    c.vertices()
        .filter_map(|v| compute_link(c, v).ok().and_then(|l: LinkGraph| l.shortest_cycle()).map(|w| (v, w)))
        .min_by_key(|(v, w)| (w.length, *v))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FillReport {
    pub systoles: SystoleReport,
    /// Exact covers of the edge set by systoles that were examined.
    pub covers: usize,
    /// Covers whose filling keeps every link girth at 12 or more.
    pub valid_covers: usize,
    pub chosen: Vec<Systole3>,
    pub min_girth: Option<u32>,
    pub type_check: TypeReport,
}

#[derive(Clone, Debug)]
pub struct Filling {
    pub complex: Complex2,
    pub report: FillReport,
}

fn exact_covers(edge_count: usize, systoles: &[Systole3], limit: usize) -> Vec<Vec<usize>> {
    let mut by_edge = vec![Vec::new(); edge_count];
    for (i, s) in systoles.iter().enumerate() {
        let es = s.edges();
        // A systole through the same edge twice cannot be part of a cover.
        if es[0] == es[1] || es[1] == es[2] || es[0] == es[2] {
            continue;
        }
        for e in es {
            by_edge[e].push(i);
        }
    }
    let mut out = Vec::new();
    let mut covered = vec![false; edge_count];
    let mut chosen = Vec::new();
    fn go(
        by_edge: &[Vec<usize>],
        systoles: &[Systole3],
        covered: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        let open = (0..covered.len())
            .filter(|&e| !covered[e])
            .min_by_key(|&e| by_edge[e].iter().filter(|&&s| systoles[s].edges().iter().all(|&x| !covered[x])).count());
        let Some(e) = open else {
            out.push(chosen.clone());
            return;
        };
        for &s in &by_edge[e] {
            let es = systoles[s].edges();
            if es.iter().any(|&x| covered[x]) {
                continue;
            }
            for x in es {
                covered[x] = true;
            }
            chosen.push(s);
            go(by_edge, systoles, covered, chosen, out, limit);
            chosen.pop();
            for x in es {
                covered[x] = false;
            }
        }
    }
    go(&by_edge, systoles, &mut covered, &mut chosen, &mut out, limit);
    out
}

const COVER_LIMIT: usize = 100_000;

/// Fills the systoles of `T'`. When some edge lies in several systoles the
/// filling is the unique exact cover by systoles whose links keep girth 12.
pub fn systolic_filling(tprime: &Complex2) -> Result<Filling, PinchError> {
    let systoles = find_systoles(tprime);
    let girth_ok = |c: &Complex2| min_link_cycle(c).is_none_or(|(_, w)| w.length.0 >= 12);
    let (complex, covers, valid) = if systoles.unique_membership() {
        let b = fill(tprime, &systoles.systoles)?;
        if !girth_ok(&b) {
            let (vertex, w) = min_link_cycle(&b).expect("short cycle");
            return Err(PinchError::Girth { vertex, length: w.length.0, edges: w.edges });
        }
        (b, 1, 1)
    } else {
        let covers = exact_covers(tprime.edges().len(), &systoles.systoles, COVER_LIMIT);
        let mut valid = Vec::new();
        let mut witness = None;
        for cover in &covers {
            let chosen: Vec<Systole3> = cover.iter().map(|&i| systoles.systoles[i].clone()).collect();
            let b = fill(tprime, &chosen)?;
            if girth_ok(&b) {
                valid.push(b);
            } else if witness.is_none() {
                witness = min_link_cycle(&b);
            }
        }
        match valid.len() {
            1 => (valid.pop().expect("one cover"), covers.len(), 1),
            0 => {
                return Err(match witness {
                    Some((vertex, w)) => PinchError::Girth { vertex, length: w.length.0, edges: w.edges },
                    None => PinchError::Filling("no exact cover of the edges by 3-systoles".into()),
                });
            }
            k => return Err(PinchError::Filling(format!("{k} distinct systolic fillings keep link girth 12"))),
        }
    };
    let chosen: Vec<Systole3> = complex.faces()[tprime.faces().len()..]
        .iter()
        .map(|f| Systole3::canonical([f.boundary[0], f.boundary[1], f.boundary[2]]))
        .collect();
    let min_girth = min_link_cycle(&complex).map(|(_, w)| w.length.0);
    let type_check = is_of_type(&complex, &autf2_type(), false);
    Ok(Filling { complex, report: FillReport { systoles, covers, valid_covers: valid, chosen, min_girth, type_check } })
}

/// A torus recovered from a lozenge gallery class.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusPiece {
    pub complex: Complex2Json,
    /// Period lattice in Hermite normal form: rows `(width, shift)`, `(0, height)`.
    pub width: i64,
    pub shift: i64,
    pub height: i64,
    /// Original edge id of each torus edge.
    pub edge_origin: Vec<usize>,
    /// (vertex of the input, link circle) of each torus vertex.
    pub vertex_origin: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProxyReport {
    /// Faces meeting some vertex more than once.
    pub degenerate_faces: Vec<usize>,
    /// Edges that are loops.
    pub loops: Vec<usize>,
    /// Pairs of distinct edges with the same endpoints.
    pub bigons: Vec<(usize, usize)>,
}

impl ProxyReport {
    pub fn holds(&self) -> bool {
        self.degenerate_faces.is_empty() && self.loops.is_empty() && self.bigons.is_empty()
    }
}

/// Checkable stand-in for injectivity radius above 1: closed face stars
/// embed, and no closed edge path of length at most 2 exists.
pub fn injectivity_proxy(c: &Complex2) -> ProxyReport {
    let mut degenerate_faces = Vec::new();
    for (f, face) in c.faces().iter().enumerate() {
        let mut seen = BTreeSet::new();
        if !(0..face.len()).all(|i| seen.insert(c.corner_vertex(f, i))) {
            degenerate_faces.push(f);
        }
    }
    let loops = (0..c.edges().len()).filter(|&e| c.edge(e).is_loop()).collect();
    let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (id, e) in c.edges().iter().enumerate() {
        if !e.is_loop() {
            by_pair.entry((e.from.min(e.to), e.from.max(e.to))).or_default().push(id);
        }
    }
    let mut bigons = Vec::new();
    for ids in by_pair.values() {
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                bigons.push((ids[i], ids[j]));
            }
        }
    }
    ProxyReport { degenerate_faces, loops, bigons }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Decomposition {
    pub tori: Vec<TorusPiece>,
    pub sigma: Vec<(usize, usize)>,
    /// Gallery class of each edge.
    pub edge_class: Vec<usize>,
    /// For each input vertex, the two torus vertices it was blown up into.
    pub blowup: Vec<[usize; 2]>,
    pub proxy: ProxyReport,
}

impl Decomposition {
    pub fn pinch_data(&self) -> PinchData {
        PinchData { tori: self.tori.iter().map(|t| t.complex.clone()).collect(), sigma: self.sigma.clone() }
    }

    pub fn sizes(&self) -> Vec<(i64, i64)> {
        let mut s: Vec<_> = self.tori.iter().map(|t| (t.width, t.height)).collect();
        s.sort_unstable();
        s
    }
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Hermite normal form `(a, b, c)` of the lattice spanned by `vectors`:
/// basis `(a, b)`, `(0, c)` with `a, c > 0` and `0 <= b < c`.
pub fn lattice_hnf(vectors: &[(i64, i64)]) -> Option<(i64, i64, i64)> {
    let mut r1 = (0i64, 0i64);
    let mut c = 0i64;
    for &v in vectors {
        let mut v = v;
        while v.0 != 0 {
            let q = r1.0 / v.0;
            r1 = (r1.0 - q * v.0, r1.1 - q * v.1);
            std::mem::swap(&mut r1, &mut v);
        }
        c = gcd(c, v.1);
    }
    if r1.0 < 0 {
        r1 = (-r1.0, -r1.1);
    }
    if r1.0 == 0 || c == 0 {
        return None;
    }
    Some((r1.0, r1.1.rem_euclid(c), c))
}

/// Orientation and letter of each edge of a lozenge torus, derived from the
/// corner angles: at an acute corner both sides point out or both point in.
/// Returns (flip, letter) per edge, letter 0 or 1.
fn derive_frame(t: &Complex2) -> Result<Vec<(bool, u8)>, PinchError> {
    let m = t.edges().len();
    let mut frame: Vec<Option<(bool, u8)>> = vec![None; m];
    let inc = t.edge_incidence();
    let mut queue = VecDeque::new();
    for s in 0..m {
        if frame[s].is_some() {
            continue;
        }
        frame[s] = Some((false, 0));
        queue.push_back(s);
        while let Some(e) = queue.pop_front() {
            for &(f, i) in &inc[e] {
                let face = t.face(f);
                let k = face.len();
                let (fe, le) = frame[e].expect("assigned");
                // Frame direction of the traversal at position i.
                let along = |t: Traversal, flip: bool| !(t.reversed ^ flip);
                let base_dir = along(face.boundary[i], fe);
                let mut dir = base_dir;
                let mut letter = le;
                for step in 1..k {
                    let j = (i + step) % k;
                    let acute = face.corners[j].angle.0 == 2;
                    dir = if acute { !dir } else { dir };
                    letter ^= 1;
                    let tj = face.boundary[j];
                    let flip = !(dir ^ tj.reversed);
                    let want = (flip, letter);
                    match frame[tj.edge] {
                        None => {
                            frame[tj.edge] = Some(want);
                            queue.push_back(tj.edge);
                        }
                        Some(x) if x == want => {}
                        Some(_) => return Err(PinchError::Decompose(format!("edge {} gets two frame directions", tj.edge))),
                    }
                }
            }
        }
    }
    Ok(frame.into_iter().map(|x| x.expect("every edge assigned")).collect())
}

/// Length of the closed straight line of `letter` through edge `start`.
fn line_length(t: &Complex2, frame: &[(bool, u8)], start: usize) -> usize {
    let letter = frame[start].1;
    let head = |e: usize| if frame[e].0 { t.edge(e).from } else { t.edge(e).to };
    let tail = |e: usize| if frame[e].0 { t.edge(e).to } else { t.edge(e).from };
    let mut e = start;
    let mut len = 0;
    loop {
        len += 1;
        let w = head(e);
        let next = (0..t.edges().len()).find(|&x| frame[x].1 == letter && tail(x) == w).expect("straight line continues");
        if next == start || len > t.edges().len() {
            return len;
        }
        e = next;
    }
}

fn develop(t: &Complex2) -> Result<(i64, i64, i64), PinchError> {
    let mut frame = derive_frame(t)?;
    let lines: [usize; 2] =
        [0u8, 1].map(|l| (0..t.edges().len()).find(|&e| frame[e].1 == l).map_or(usize::MAX, |e| line_length(t, &frame, e)));
    // The letter with the shorter straight lines becomes the second axis.
    if lines[0] < lines[1] {
        for f in &mut frame {
            f.1 ^= 1;
        }
    }
    let mut coord: Vec<Option<(i64, i64)>> = vec![None; t.vertex_count()];
    let mut periods = Vec::new();
    let step = |letter: u8| if letter == 0 { (1, 0) } else { (0, 1) };
    let mut adj: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); t.vertex_count()];
    for (id, e) in t.edges().iter().enumerate() {
        let (a, b) = if frame[id].0 { (e.to, e.from) } else { (e.from, e.to) };
        adj[a].push((b, id, 1));
        adj[b].push((a, id, -1));
    }
    for s in 0..t.vertex_count() {
        if coord[s].is_some() {
            continue;
        }
        if s != 0 {
            return Err(PinchError::Decompose("torus is disconnected".into()));
        }
        coord[s] = Some((0, 0));
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let cu = coord[u].expect("placed");
            for &(w, e, sign) in &adj[u] {
                let (dx, dy) = step(frame[e].1);
                let cw = (cu.0 + sign * dx, cu.1 + sign * dy);
                match coord[w] {
                    None => {
                        coord[w] = Some(cw);
                        queue.push_back(w);
                    }
                    Some(old) => {
                        if old != cw {
                            periods.push((cw.0 - old.0, cw.1 - old.1));
                        }
                    }
                }
            }
        }
    }
    let hnf = lattice_hnf(&periods).ok_or_else(|| PinchError::Decompose("development is not a torus".into()))?;
    if (hnf.0 * hnf.2) as usize != t.vertex_count() {
        return Err(PinchError::Decompose(format!(
            "period lattice index {} differs from vertex count {}",
            hnf.0 * hnf.2,
            t.vertex_count()
        )));
    }
    Ok(hnf)
}

/// Splits `b` into lozenge tori and the involution that pinches them back.
pub fn decompose(b: &Complex2) -> Result<Decomposition, PinchError> {
    let type_report = is_of_type(b, &autf2_type(), false);
    if !type_report.pass {
        return Err(PinchError::Precondition(format!("not of type Aut(F2): {}", type_report.reasons.join("; "))));
    }
    let proxy = injectivity_proxy(b);
    let m = b.edges().len();
    let mut parent: Vec<usize> = (0..m).collect();
    for face in b.faces() {
        if face.shape != "lozenge" {
            continue;
        }
        let first = face.boundary[0].edge;
        for t in &face.boundary[1..] {
            let (x, y) = (find(&mut parent, first), find(&mut parent, t.edge));
            parent[x.max(y)] = x.min(y);
        }
    }
    let mut class_of_root: BTreeMap<usize, usize> = BTreeMap::new();
    let edge_class: Vec<usize> = (0..m)
        .map(|e| {
            let r = find(&mut parent, e);
            let next = class_of_root.len();
            *class_of_root.entry(r).or_insert(next)
        })
        .collect();
    // Blow up: each vertex splits along the lozenge circles of its link.
    let mut end_point: BTreeMap<EdgeEnd, (usize, usize)> = BTreeMap::new();
    let mut circles_at = Vec::with_capacity(b.vertex_count());
    for v in b.vertices() {
        let link = compute_link(b, v)?;
        let mut loz = LinkGraph { vertices: link.vertices.clone(), edges: Vec::new() };
        loz.edges = link.edges.iter().filter(|e| e.label != "t").cloned().collect();
        let comps = loz.components();
        for (ci, comp) in comps.iter().enumerate() {
            for &lv in comp {
                end_point.insert(link.vertices[lv].end.expect("computed link"), (v, ci));
            }
        }
        circles_at.push(comps.len());
    }
    let class_count = class_of_root.len();
    let mut points_of_class: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); class_count];
    for (e, edge) in b.edges().iter().enumerate() {
        let _ = edge;
        for end in [crate::complex::End::Tail, crate::complex::End::Head] {
            points_of_class[edge_class[e]].insert(end_point[&EdgeEnd::new(e, end)]);
        }
    }
    let mut tori = Vec::with_capacity(class_count);
    let mut global: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut offset = 0;
    for (cls, points) in points_of_class.iter().enumerate() {
        let vertex_origin: Vec<(usize, usize)> = points.iter().copied().collect();
        let local: BTreeMap<(usize, usize), usize> = vertex_origin.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        for (i, &p) in vertex_origin.iter().enumerate() {
            global.insert(p, offset + i);
        }
        offset += vertex_origin.len();
        let edge_origin: Vec<usize> = (0..m).filter(|&e| edge_class[e] == cls).collect();
        let eloc: BTreeMap<usize, usize> = edge_origin.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut t = Complex2::with_vertices(vertex_origin.len());
        for &e in &edge_origin {
            let edge = b.edge(e);
            let from = local[&end_point[&EdgeEnd::new(e, crate::complex::End::Tail)]];
            let to = local[&end_point[&EdgeEnd::new(e, crate::complex::End::Head)]];
            t.add_edge(from, to, edge.label.clone())?;
        }
        for face in b.faces() {
            if face.shape == "lozenge" && edge_class[face.boundary[0].edge] == cls {
                let boundary = face.boundary.iter().map(|x| Traversal { edge: eloc[&x.edge], reversed: x.reversed }).collect();
                t.add_face(Face { shape: face.shape.clone(), boundary, corners: face.corners.clone() })
                    .map_err(|e| PinchError::Decompose(format!("lozenge does not close after blow-up: {e}")))?;
            }
        }
        let (width, shift, height) = develop(&t)?;
        tori.push(TorusPiece { complex: Complex2Json(t), width, shift, height, edge_origin, vertex_origin });
    }
    let mut sigma = Vec::new();
    let mut blowup = Vec::with_capacity(b.vertex_count());
    for v in b.vertices() {
        if circles_at[v] != 2 {
            return Err(PinchError::Decompose(format!("vertex {v} blows up into {} points", circles_at[v])));
        }
        let pair = [global[&(v, 0)], global[&(v, 1)]];
        sigma.push((pair[0].min(pair[1]), pair[0].max(pair[1])));
        blowup.push(pair);
    }
    sigma.sort_unstable();
    Ok(Decomposition { tori, sigma, edge_class, blowup, proxy })
}

/// Refills a decomposition: `systolic_filling(pinch(tori, σ))`.
pub fn refill(d: &Decomposition) -> Result<Filling, PinchError> {
    systolic_filling(&pinch(&d.pinch_data())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_examples() {
        assert_eq!(lattice_hnf(&[(6, -6), (0, 5)]), Some((6, 4, 5)));
        assert_eq!(lattice_hnf(&[(0, 5), (12, -12), (6, -6)]), Some((6, 4, 5)));
        assert_eq!(lattice_hnf(&[(2, 0), (0, 3), (4, 3)]), Some((2, 0, 3)));
        assert_eq!(lattice_hnf(&[(1, 1)]), None);
    }

    #[test]
    fn fixed_point_is_rejected() {
        let t = build_torus(1).unwrap();
        let mut sigma: Vec<(usize, usize)> = vec![(0, 0)];
        sigma.extend([(1, 2), (3, 4)]);
        assert_eq!(pinch(&PinchData::new(vec![t], sigma)), Err(PinchError::FixedPoint(0)));
    }

    #[test]
    fn uncovered_vertex_is_rejected() {
        let t = build_torus(1).unwrap();
        let err = pinch(&PinchData::new(vec![t], vec![(0, 1), (2, 3)])).unwrap_err();
        assert_eq!(err, PinchError::Uncovered(4));
    }

    #[test]
    fn bare_torus_has_no_systoles() {
        let r = find_systoles(&build_torus(5).unwrap());
        assert!(r.systoles.is_empty());
    }

    #[test]
    fn systole_canonical_form_is_rotation_invariant() {
        let p = [Traversal::forward(4), Traversal::backward(1), Traversal::forward(7)];
        let a = Systole3::canonical(p);
        let b = Systole3::canonical([p[1], p[2], p[0]]);
        let c = Systole3::canonical([p[2].inverse(), p[1].inverse(), p[0].inverse()]);
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}
