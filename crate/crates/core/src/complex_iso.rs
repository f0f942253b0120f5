//! Cellular isomorphisms of 2-complexes preserving shapes and corner data.
//!
//! Edge orientations and edge labels are not part of the structure compared
//! here; an edge may map onto its target reversed.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::complex::{Complex2, Traversal};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexIsoWitness {
    pub vertices: Vec<usize>,
    /// (target edge, orientation flipped)
    pub edges: Vec<(usize, bool)>,
    pub faces: Vec<usize>,
}

const NONE: usize = usize::MAX;

/// Boundary of `face` read from `offset`, optionally backwards; each entry is
/// the traversal and the index of the corner at its start.
fn aligned(c: &Complex2, face: usize, offset: usize, reflect: bool) -> Vec<(Traversal, usize)> {
    let b = &c.face(face).boundary;
    let k = b.len();
    (0..k)
        .map(|j| {
            if reflect {
                let m = (offset + k - j % k) % k;
                (b[m].inverse(), (m + 1) % k)
            } else {
                let m = (offset + j) % k;
                (b[m], m)
            }
        })
        .collect()
}

struct State<'a> {
    a: &'a Complex2,
    b: &'a Complex2,
    order: Vec<usize>,
    inc_b: Vec<Vec<(usize, usize)>>,
    vmap: Vec<usize>,
    vused: Vec<bool>,
    emap: Vec<(usize, bool)>,
    eused: Vec<bool>,
    fmap: Vec<usize>,
    fused: Vec<bool>,
    limit: usize,
    found: Vec<ComplexIsoWitness>,
}

impl State<'_> {
    /// Tries to map face `f` to `g` with the given alignment; on success
    /// returns the undo log of newly assigned vertices and edges.
    fn assign(&mut self, f: usize, g: usize, offset: usize, reflect: bool) -> Option<(Vec<usize>, Vec<usize>)> {
        let fa = self.a.face(f);
        let fb = self.b.face(g);
        let mut new_v = Vec::new();
        let mut new_e = Vec::new();
        let mut ok = true;
        for (j, (tb, cb)) in aligned(self.b, g, offset, reflect).into_iter().enumerate() {
            let ta = fa.boundary[j];
            if fa.corners[j] != fb.corners[cb] {
                ok = false;
                break;
            }
            let va = self.a.traversal_start(ta);
            let vb = self.b.traversal_start(tb);
            if self.vmap[va] == NONE {
                if self.vused[vb] {
                    ok = false;
                    break;
                }
                self.vmap[va] = vb;
                self.vused[vb] = true;
                new_v.push(va);
            } else if self.vmap[va] != vb {
                ok = false;
                break;
            }
            let flip = ta.reversed != tb.reversed;
            if self.emap[ta.edge].0 == NONE {
                if self.eused[tb.edge] {
                    ok = false;
                    break;
                }
                self.emap[ta.edge] = (tb.edge, flip);
                self.eused[tb.edge] = true;
                new_e.push(ta.edge);
            } else if self.emap[ta.edge] != (tb.edge, flip) {
                ok = false;
                break;
            }
        }
        if !ok {
            self.undo(&new_v, &new_e);
            return None;
        }
        // Endpoints of newly mapped edges must be consistent with the vertex map.
        for &e in &new_e {
            let (te, flip) = self.emap[e];
            let ea = self.a.edge(e);
            let eb = self.b.edge(te);
            let (x, y) = if flip { (eb.to, eb.from) } else { (eb.from, eb.to) };
            if self.vmap[ea.from] != x || self.vmap[ea.to] != y {
                self.undo(&new_v, &new_e);
                return None;
            }
        }
        Some((new_v, new_e))
    }

    fn undo(&mut self, vs: &[usize], es: &[usize]) {
        for &v in vs {
            self.vused[self.vmap[v]] = false;
            self.vmap[v] = NONE;
        }
        for &e in es {
            self.eused[self.emap[e].0] = false;
            self.emap[e] = (NONE, false);
        }
    }

    fn candidates(&self, f: usize) -> Vec<usize> {
        let fa = self.a.face(f);
        let anchored = fa.boundary.iter().find(|t| self.emap[t.edge].0 != NONE);
        let pool: Vec<usize> = match anchored {
            Some(t) => {
                let mut v: Vec<usize> = self.inc_b[self.emap[t.edge].0].iter().map(|&(g, _)| g).collect();
                v.dedup();
                v
            }
            None => (0..self.b.faces().len()).collect(),
        };
        pool.into_iter().filter(|&g| !self.fused[g] && self.b.face(g).len() == fa.len() && self.b.face(g).shape == fa.shape).collect()
    }

    fn run(&mut self, depth: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        if depth == self.order.len() {
            if let Some(w) = self.finish() {
                self.found.push(w);
            }
            return;
        }
        let f = self.order[depth];
        let k = self.a.face(f).len();
        for g in self.candidates(f) {
            for reflect in [false, true] {
                for offset in 0..k {
                    if let Some((vs, es)) = self.assign(f, g, offset, reflect) {
                        self.fmap[f] = g;
                        self.fused[g] = true;
                        self.run(depth + 1);
                        self.fused[g] = false;
                        self.fmap[f] = NONE;
                        self.undo(&vs, &es);
                        if self.found.len() >= self.limit {
                            return;
                        }
                    }
                }
            }
        }
    }

    /// Extends the face-determined maps over free edges and isolated vertices.
    fn finish(&self) -> Option<ComplexIsoWitness> {
        let mut vmap = self.vmap.clone();
        let mut vused = self.vused.clone();
        let mut emap = self.emap.clone();
        let mut eused = self.eused.clone();
        if !extend_free(self.a, self.b, &mut vmap, &mut vused, &mut emap, &mut eused, 0) {
            return None;
        }
        Some(ComplexIsoWitness { vertices: vmap, edges: emap, faces: self.fmap.clone() })
    }
}

fn extend_free(
    a: &Complex2,
    b: &Complex2,
    vmap: &mut Vec<usize>,
    vused: &mut Vec<bool>,
    emap: &mut Vec<(usize, bool)>,
    eused: &mut Vec<bool>,
    start: usize,
) -> bool {
    let Some(e) = (start..a.edges().len()).find(|&e| emap[e].0 == NONE) else {
        let mut free = (0..b.vertex_count()).filter(|&w| !vused[w]);
        for slot in vmap.iter_mut().take(a.vertex_count()) {
            if *slot == NONE {
                let Some(w) = free.next() else { return false };
                *slot = w;
            }
        }
        return true;
    };
    let ea = a.edge(e).clone();
    for te in 0..b.edges().len() {
        if eused[te] {
            continue;
        }
        for flip in [false, true] {
            let eb = b.edge(te);
            let (x, y) = if flip { (eb.to, eb.from) } else { (eb.from, eb.to) };
            if (ea.from == ea.to) != (x == y) {
                continue;
            }
            let mut assigned = Vec::new();
            let mut ok = true;
            for (v, w) in [(ea.from, x), (ea.to, y)] {
                if vmap[v] == NONE {
                    if vused[w] {
                        ok = false;
                        break;
                    }
                    vmap[v] = w;
                    vused[w] = true;
                    assigned.push(v);
                } else if vmap[v] != w {
                    ok = false;
                    break;
                }
            }
            if ok {
                emap[e] = (te, flip);
                eused[te] = true;
                if extend_free(a, b, vmap, vused, emap, eused, e + 1) {
                    return true;
                }
                emap[e] = (NONE, false);
                eused[te] = false;
            }
            for v in assigned {
                vused[vmap[v]] = false;
                vmap[v] = NONE;
            }
        }
    }
    false
}

/// Faces in breadth-first order over shared edges.
fn face_order(c: &Complex2) -> Vec<usize> {
    let inc = c.edge_incidence();
    let n = c.faces().len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(f) = q.pop_front() {
            order.push(f);
            for t in &c.face(f).boundary {
                for &(g, _) in &inc[t.edge] {
                    if !seen[g] {
                        seen[g] = true;
                        q.push_back(g);
                    }
                }
            }
        }
    }
    order
}

fn search(a: &Complex2, b: &Complex2, limit: usize) -> Vec<ComplexIsoWitness> {
    if a.euler_counts() != b.euler_counts() {
        return Vec::new();
    }
    let mut shapes_a: Vec<_> = a.faces().iter().map(|f| (f.shape.clone(), f.len())).collect();
    let mut shapes_b: Vec<_> = b.faces().iter().map(|f| (f.shape.clone(), f.len())).collect();
    shapes_a.sort();
    shapes_b.sort();
    let mut deg_a = a.degrees();
    let mut deg_b = b.degrees();
    deg_a.sort_unstable();
    deg_b.sort_unstable();
    if shapes_a != shapes_b || deg_a != deg_b {
        return Vec::new();
    }
    let mut st = State {
        a,
        b,
        order: face_order(a),
        inc_b: b.edge_incidence(),
        vmap: vec![NONE; a.vertex_count()],
        vused: vec![false; b.vertex_count()],
        emap: vec![(NONE, false); a.edges().len()],
        eused: vec![false; b.edges().len()],
        fmap: vec![NONE; a.faces().len()],
        fused: vec![false; b.faces().len()],
        limit,
        found: Vec::new(),
    };
    st.run(0);
    st.found
}

pub fn find_complex_isomorphism(a: &Complex2, b: &Complex2) -> Option<ComplexIsoWitness> {
    search(a, b, 1).pop()
}

pub fn is_isomorphic(a: &Complex2, b: &Complex2) -> bool {
    find_complex_isomorphism(a, b).is_some()
}

/// Automorphisms of a complex whose faces determine every cell. Distinct
/// witnesses differ on faces or on face-bearing cells.
pub fn complex_automorphisms(c: &Complex2, limit: usize) -> Vec<ComplexIsoWitness> {
    search(c, c, limit)
}

/// Independent check that a witness is an isomorphism.
pub fn verify_complex_witness(a: &Complex2, b: &Complex2, w: &ComplexIsoWitness) -> bool {
    let bij = |m: &[usize], n: usize| {
        let mut seen = vec![false; n];
        m.len() == n && m.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
    };
    let emap: Vec<usize> = w.edges.iter().map(|&(e, _)| e).collect();
    if !bij(&w.vertices, b.vertex_count())
        || !bij(&emap, b.edges().len())
        || !bij(&w.faces, b.faces().len())
        || a.vertex_count() != b.vertex_count()
    {
        return false;
    }
    for (e, ea) in a.edges().iter().enumerate() {
        let (te, flip) = w.edges[e];
        let eb = b.edge(te);
        let (x, y) = if flip { (eb.to, eb.from) } else { (eb.from, eb.to) };
        if w.vertices[ea.from] != x || w.vertices[ea.to] != y {
            return false;
        }
    }
    for (f, fa) in a.faces().iter().enumerate() {
        let g = w.faces[f];
        let fb = b.face(g);
        if fb.len() != fa.len() || fb.shape != fa.shape {
            return false;
        }
        let image: Vec<Traversal> = fa
            .boundary
            .iter()
            .map(|t| {
                let (te, flip) = w.edges[t.edge];
                Traversal { edge: te, reversed: t.reversed != flip }
            })
            .collect();
        let k = fa.len();
        let hit = (0..k).any(|o| {
            [false, true]
                .into_iter()
                .any(|r| aligned(b, g, o, r).iter().enumerate().all(|(j, &(tb, cb))| tb == image[j] && fb.corners[cb] == fa.corners[j]))
        });
        if !hit {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Corner, Face};

    fn polygon(k: usize, reversed_edge: Option<usize>) -> Complex2 {
        let mut c = Complex2::with_vertices(k);
        for i in 0..k {
            if reversed_edge == Some(i) {
                c.add_edge((i + 1) % k, i, None).unwrap();
            } else {
                c.add_edge(i, (i + 1) % k, None).unwrap();
            }
        }
        let boundary = (0..k).map(|i| Traversal { edge: i, reversed: reversed_edge == Some(i) }).collect();
        c.add_face(Face { shape: "poly".into(), boundary, corners: vec![Corner::new(2, "t"); k] }).unwrap();
        c
    }

    #[test]
    fn orientation_is_ignored() {
        let a = polygon(3, None);
        let b = polygon(3, Some(1));
        let w = find_complex_isomorphism(&a, &b).unwrap();
        assert!(verify_complex_witness(&a, &b, &w));
    }

    #[test]
    fn triangle_has_dihedral_symmetry() {
        assert_eq!(complex_automorphisms(&polygon(3, None), usize::MAX).len(), 6);
    }

    #[test]
    fn corner_labels_distinguish() {
        let a = polygon(3, None);
        let mut b = polygon(3, None);
        b.face_mut(0).corners[0].label = "p".into();
        assert!(!is_isomorphic(&a, &b));
    }

    #[test]
    fn free_edges_are_matched() {
        let mut a = polygon(3, None);
        a.add_edge(0, 0, None).unwrap();
        let mut b = polygon(3, None);
        b.add_edge(2, 2, None).unwrap();
        let w = find_complex_isomorphism(&a, &b).unwrap();
        assert!(verify_complex_witness(&a, &b, &w));
        let mut c = polygon(3, None);
        c.add_edge(0, 1, None).unwrap();
        assert!(!is_isomorphic(&a, &c));
    }
}
