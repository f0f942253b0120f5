//! Aggregate verification run over every construction, with optional
//! single-cell corruptions to show that the checks bite.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cobordism::{
    build_collar, collar_nerve, gallery_labels, generating_gallery, letter_drops, nerve_matches_reference, power, Ambient,
};
use crate::complex::{AngleUnits, Complex2};
use crate::complex_iso::is_isomorphic;
use crate::exotic::{build_xprime, link_checks, sigma_witness, vertex_transitivity, without_face, TRIANGLE};
use crate::iso::{find_isomorphism, IsoMode};
use crate::link::all_links;
use crate::pinchfill::{decompose, find_systoles, pinch, refill, systolic_filling, PinchData};
use crate::rigidity::{build_frame, check_frame, cover_report, free_ball, interior_links_match, SeedShape};
use crate::toric::{basic_construction, involution_check, jump, label_permutation, Perm4, TorusCoord};
use crate::typesys::{autf2_type, brady_link, brady_link_selfcheck, is_of_type, metric_type_a};

/// The twelve labels of the generating gallery at height 0.
pub const GALLERY_LABELS: [&str; 12] = ["A0", "A1'", "A0'", "A1''", "B-2", "B-1'", "B-2'", "B-1''", "C-4", "C-3'", "C-4'", "C-3''"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Turn an acute lozenge corner of `B_n` obtuse.
    CornerFlip,
    /// Drop a triangle of `X'`.
    DeletedTriangle,
    /// Give one edge of `B_n` the label of another.
    RelabeledEdge,
    /// Remove a chord from the collar nerve.
    BrokenChord,
    /// Remove one systole triangle from the filling.
    RemovedSystole,
}

impl Mutation {
    pub const ALL: [Mutation; 5] =
        [Mutation::CornerFlip, Mutation::DeletedTriangle, Mutation::RelabeledEdge, Mutation::BrokenChord, Mutation::RemovedSystole];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::CornerFlip => "corner-flip",
            Mutation::DeletedTriangle => "deleted-triangle",
            Mutation::RelabeledEdge => "relabeled-edge",
            Mutation::BrokenChord => "broken-chord",
            Mutation::RemovedSystole => "removed-systole",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Mutation::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Mutation::ALL.iter().map(|m| m.name()).collect();
            format!("unknown mutation {s:?}, expected one of {}", names.join(", "))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    /// Witness on success, counterexample on failure.
    pub detail: String,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub ns: Vec<usize>,
    pub radius: usize,
    pub mutation: Option<Mutation>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{} {} ({} ms): {}\n", if c.pass { "PASS" } else { "FAIL" }, c.id, c.elapsed_ms, c.detail));
        }
        let failed = self.failures().len();
        out.push_str(&format!("{} checks, {} passed, {} failed\n", self.checks.len(), self.checks.len() - failed, failed));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub ns: Vec<usize>,
    pub radius: usize,
    pub mutation: Option<Mutation>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { ns: (1..=8).collect(), radius: 3, mutation: None }
    }
}

type Outcome = Result<String, String>;

struct Runner {
    checks: Vec<Check>,
}

impl Runner {
    fn run(&mut self, id: impl Into<String>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = f();
        let elapsed_ms = start.elapsed().as_millis() as u64;
        let (pass, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(Check { id: id.into(), pass, detail, elapsed_ms });
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn built(n: usize, mutation: Option<Mutation>) -> Result<Complex2, String> {
    let mut c = basic_construction(n).map_err(|e| e.to_string())?.complex;
    match mutation {
        Some(Mutation::CornerFlip) => {
            let corner = c.face(0).corners.iter().position(|k| k.angle == AngleUnits(2)).unwrap_or(0);
            c.face_mut(0).corners[corner].angle = AngleUnits(4);
        }
        Some(Mutation::RelabeledEdge) => {
            let other = c.edge(1).label.clone();
            c.edge_mut(0).label = other;
        }
        _ => {}
    }
    Ok(c)
}

fn letter_of(label: &str) -> &str {
    label.trim_end_matches('\'')
}

fn check_labels(n: usize, c: &Complex2) -> Outcome {
    let labels: Vec<&str> = c.edges().iter().filter_map(|e| e.label.as_deref()).collect();
    ensure(labels.len() == c.edges().len(), || format!("n={n}: {} unlabelled edges", c.edges().len() - labels.len()))?;
    let mut slots = BTreeMap::new();
    let mut letters = BTreeMap::new();
    for l in &labels {
        *slots.entry(*l).or_insert(0) += 1;
        *letters.entry(letter_of(l)).or_insert(0) += 1;
    }
    if let Some((l, k)) = slots.iter().find(|(_, &k)| k != 1) {
        return Err(format!("n={n}: label {l} used on {k} edges"));
    }
    if let Some((l, k)) = letters.iter().find(|(_, &k)| k != 3) {
        return Err(format!("n={n}: letter {l} labels {k} edges"));
    }
    ensure(letters.len() == 4 * n, || format!("n={n}: {} letters, expected {}", letters.len(), 4 * n))?;
    let counts = c.euler_counts();
    ensure(counts == (3 * n, 12 * n, 10 * n), || format!("n={n}: counts {counts:?}"))?;
    Ok(format!("{} letters, (V,E,F) = {counts:?}", letters.len()))
}

fn check_links(n: usize, c: &Complex2) -> Outcome {
    let reference = brady_link();
    for (v, l) in all_links(c).iter().enumerate() {
        if find_isomorphism(l, &reference, IsoMode::Label).is_none() {
            return Err(format!("n={n}: link at vertex {v} is not the reference link"));
        }
        let g = l.girth();
        ensure(g == Some(AngleUnits(12)), || format!("n={n}: link at vertex {v} has girth {g:?}"))?;
    }
    Ok(format!("{} links labelled-isomorphic, girth 12", c.vertex_count()))
}

fn check_type(n: usize, c: &Complex2) -> Outcome {
    let r = is_of_type(c, &autf2_type(), false);
    ensure(r.pass, || format!("n={n}: {}", r.reasons.join("; ")))?;
    Ok(format!("{} vertices of type Aut(F2)", r.vertices.len()))
}

fn per_n(ns: &[usize], f: impl Fn(usize) -> Outcome) -> Outcome {
    let mut details = Vec::with_capacity(ns.len());
    for &n in ns {
        details.push(format!("n={n}: {}", f(n)?));
    }
    Ok(details.join("; "))
}

/// Runs every check. An empty `ns` gives an empty, passing report.
pub fn verify_all(opts: &VerifyOptions) -> Report {
    let mut r = Runner { checks: Vec::new() };
    let ns = &opts.ns;
    let m = opts.mutation;
    if ns.is_empty() {
        return Report { ns: Vec::new(), radius: opts.radius, mutation: m, checks: r.checks };
    }

    r.run("toric.labels", || per_n(ns, |n| check_labels(n, &built(n, m)?)));
    r.run("toric.jumps", || {
        per_n(ns, |n| {
            let rep = involution_check(n).map_err(|e| e.to_string())?;
            ensure(rep.passed(), || format!("n={n}: {rep:?}"))?;
            Ok(format!("{} jumps, {} orbits", rep.induced_jumps, rep.orbit_count))
        })
    });
    r.run("toric.permutation", || {
        let forward = Perm4::from_cycle(&[1, 2, 4, 3]);
        for id in 0..30 {
            let c = TorusCoord::from_id(id);
            let p = label_permutation(5, c).map_err(|e| e.to_string())?;
            let want = if c.x % 2 == 0 { forward } else { forward.inverse() };
            ensure(p == want, || format!("jump from {c} induces {p}, expected {want}"))?;
        }
        let image = jump(TorusCoord { x: 0, y: 0 }, 5);
        ensure(image == TorusCoord { x: 1, y: 3 }, || format!("origin jumps to {image}"))?;
        Ok(format!("forward {forward}, reverse {}, origin ↦ {image}", forward.inverse()))
    });
    r.run("typesys.selfcheck", || {
        let s = brady_link_selfcheck();
        ensure(s.passed(), || format!("{} surviving matchings", s.survivors))?;
        let killed = s.branch_where(4, "4'");
        ensure(killed.iter().all(|b| !b.survives && b.girth < 12), || "a branch with τ(4) = 4' survives".into())?;
        let g: Vec<u32> = killed.iter().map(|b| b.girth).collect();
        Ok(format!("unique survivor; τ(4) = 4' branch girths {g:?}"))
    });
    r.run("links", || per_n(ns, |n| check_links(n, &built(n, m)?)));
    r.run("type.autf2", || per_n(ns, |n| check_type(n, &built(n, m)?)));

    let ty = autf2_type();
    let mut ball = None;
    r.run("rigidity.ball", || {
        let b = ball.insert(free_ball(&ty, opts.radius, SeedShape::Triangle)).as_ref().map_err(|e| e.to_string())?;
        ensure(b.unique_steps(), || "a completion step admitted several extensions".into())?;
        ensure(interior_links_match(b, &ty), || "an interior link is not the reference link".into())?;
        Ok(format!("radius {}: {} steps, (V,E,F) = {:?}", b.radius, b.steps.len(), b.complex.euler_counts()))
    });
    r.run("rigidity.cover", || {
        let b = ball.as_ref().expect("ball check ran").as_ref().map_err(|e| e.to_string())?;
        per_n(ns, |n| {
            let target = built(n, m)?;
            let c = cover_report(b, &target, &ty).map_err(|e| format!("n={n}: {e}"))?;
            ensure(c.total && c.deterministic, || format!("n={n}: total {} deterministic {}", c.total, c.deterministic))?;
            ensure(c.certified == c.interior, || format!("n={n}: {} of {} germs certified", c.certified, c.interior))?;
            Ok(format!("{} germs", c.certified))
        })
    });
    r.run("rigidity.frame", || {
        per_n(ns, |n| {
            let bc = basic_construction(n).map_err(|e| e.to_string())?;
            let f = check_frame(&built(n, m)?, &build_frame(&bc));
            ensure(f.passed(), || format!("n={n}: {}", f.failures.join("; ")))?;
            Ok(format!("{}/{} lozenges", f.certified, f.lozenges))
        })
    });

    r.run("pinchfill.fill", || {
        per_n(ns, |n| {
            let tp = pinch(&PinchData::torus_with_jumps(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let mut filled = systolic_filling(&tp).map_err(|e| format!("n={n}: {e}"))?.complex;
            if m == Some(Mutation::RemovedSystole) {
                filled = without_face(&filled, filled.faces().len() - 1);
            }
            let b = basic_construction(n).map_err(|e| e.to_string())?.complex;
            ensure(is_isomorphic(&filled, &b), || format!("n={n}: filling is not isomorphic to B_{n}"))?;
            Ok("≅ B_n".into())
        })
    });
    r.run("pinchfill.decompose", || {
        per_n(ns, |n| {
            let b = built(n, m)?;
            let d = decompose(&b).map_err(|e| format!("n={n}: {e}"))?;
            let again = refill(&d).map_err(|e| format!("n={n}: {e}"))?;
            ensure(is_isomorphic(&again.complex, &b), || format!("n={n}: refill is not isomorphic"))?;
            Ok(format!("tori {:?}", d.sizes()))
        })
    });
    r.run("pinchfill.systoles", || {
        let tp = pinch(&PinchData::torus_with_jumps(5).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let s = find_systoles(&tp);
        ensure(s.systoles.len() == 20, || format!("{} systoles", s.systoles.len()))?;
        ensure(s.unique_membership(), || "an edge lies on more or fewer than one systole".into())?;
        Ok("20 systoles, each edge on exactly one".into())
    });

    r.run("cobordism.gallery", || {
        let amb = Ambient::new(-12, 4).map_err(|e| e.to_string())?;
        let g = generating_gallery(0, &amb).map_err(|e| e.to_string())?;
        let labels = gallery_labels(&g, &amb.strip);
        ensure(labels == GALLERY_LABELS, || format!("labels {labels:?}"))?;
        let drops = letter_drops(&g, &amb.strip);
        Ok(format!("length {}, letter drops {drops:?}", g.len()))
    });
    r.run("cobordism.nerve", || {
        let amb = Ambient::new(-12, 4).map_err(|e| e.to_string())?;
        let collar = build_collar(0, &amb).map_err(|e| e.to_string())?;
        let mut h = collar_nerve(&collar, &amb).map_err(|e| e.to_string())?;
        if m == Some(Mutation::BrokenChord) {
            h.edges.pop();
        }
        ensure(nerve_matches_reference(&h), || {
            format!("nerve has {} vertices, {} edges, degrees {:?}", h.vertex_count(), h.edge_count(), h.degrees())
        })?;
        Ok(format!("{} vertices, {} edges, 3-regular", h.vertex_count(), h.edge_count()))
    });
    r.run("cobordism.powers", || {
        let mut complexes = Vec::new();
        let mut counts = Vec::new();
        for k in 1..=3 {
            let p = power(k, 0).map_err(|e| e.to_string())?;
            counts.push(p.closed_triangle_count());
            complexes.push(p.realize().map_err(|e| e.to_string())?.0);
        }
        ensure(counts == [1, 2, 3], || format!("closed triangle counts {counts:?}"))?;
        for i in 0..3 {
            for j in i + 1..3 {
                ensure(!is_isomorphic(&complexes[i], &complexes[j]), || format!("powers {} and {} are isomorphic", i + 1, j + 1))?;
            }
        }
        Ok(format!("closed triangle counts {counts:?}"))
    });

    let xp = build_xprime().map_err(|e| e.to_string()).map(|c| {
        if m == Some(Mutation::DeletedTriangle) {
            let f = c.faces().iter().position(|f| f.shape == TRIANGLE).expect("triangle");
            without_face(&c, f)
        } else {
            c
        }
    });
    r.run("exotic.counts", || {
        let c = xp.as_ref().map_err(Clone::clone)?;
        let counts = c.euler_counts();
        ensure(counts == (6, 24, 20), || format!("(V,E,F) = {counts:?}"))?;
        ensure(c.degrees().iter().all(|&d| d == 8), || format!("degrees {:?}", c.degrees()))?;
        Ok(format!("(V,E,F) = {counts:?}, 8-regular"))
    });
    r.run("exotic.links", || {
        let c = xp.as_ref().map_err(Clone::clone)?;
        let checks = link_checks(c).map_err(|e| e.to_string())?;
        if let Some(bad) = checks.iter().find(|l| !l.isometric) {
            return Err(format!("link at {} is not isometric to the reference link", bad.vertex));
        }
        Ok(format!("{} links isometric, total length 32", checks.len()))
    });
    r.run("exotic.type", || {
        let c = xp.as_ref().map_err(Clone::clone)?;
        let a = is_of_type(c, &autf2_type(), false);
        ensure(!a.pass && a.reasons.iter().any(|s| s == "shape hexagon not in type"), || "hexagons accepted by the Aut(F2) type".into())?;
        let ma = is_of_type(c, &metric_type_a(), false);
        ensure(ma.pass, || format!("metric type: {}", ma.reasons.join("; ")))?;
        Ok("not of type Aut(F2) (shape hexagon not in type); of the metric type".into())
    });
    r.run("exotic.transitivity", || {
        let c = xp.as_ref().map_err(Clone::clone)?;
        ensure(sigma_witness(c).is_some(), || "σ is not an automorphism".into())?;
        let t = vertex_transitivity(c);
        ensure(t.transitive(6), || format!("orbit {:?}", t.orbit_of_first))?;
        Ok(format!("{} automorphisms, orbit size {}", t.automorphisms, t.orbit_of_first.len()))
    });

    Report { ns: ns.clone(), radius: opts.radius, mutation: m, checks: r.checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_range_is_vacuous() {
        let r = verify_all(&VerifyOptions { ns: Vec::new(), radius: 3, mutation: None });
        assert!(r.checks.is_empty());
        assert!(r.passed());
    }

    #[test]
    fn check_order_is_fixed() {
        let opts = VerifyOptions { ns: vec![2], radius: 1, mutation: None };
        let ids = |r: &Report| r.checks.iter().map(|c| (c.id.clone(), c.pass, c.detail.clone())).collect::<Vec<_>>();
        let a = verify_all(&opts);
        assert!(a.passed(), "{}", a.to_text());
        assert_eq!(ids(&a), ids(&verify_all(&opts)));
        assert_eq!(a.checks.first().map(|c| c.id.as_str()), Some("toric.labels"));
    }

    #[test]
    fn mutation_names_parse() {
        for m in Mutation::ALL {
            assert_eq!(m.name().parse::<Mutation>(), Ok(m));
        }
        assert!("flip".parse::<Mutation>().is_err());
    }
}
