use std::collections::BTreeSet;

use forge_core::complex_iso::verify_complex_witness;
use forge_core::exotic::*;
use forge_core::typesys::{brady_link, is_of_type, metric_type_a};
use forge_core::{find_isomorphism, AngleUnits, IsoMode};

#[test]
fn counts_and_degrees() {
    let c = build_xprime().unwrap();
    c.validate().unwrap();
    assert_eq!(c.euler_counts(), (6, 24, 20));
    assert_eq!(c.degrees(), vec![8; 6]);
    let hexagons = c.faces().iter().filter(|f| f.shape == HEXAGON).count();
    assert_eq!(hexagons, 4);
    assert_eq!(c.euler_characteristic(), 2);
    assert_eq!(angle_sums(&c), vec![AngleUnits(32); 6]);
}

#[test]
fn every_link_is_the_reference_link() {
    let c = build_xprime().unwrap();
    let reference = brady_link();
    for check in link_checks(&c).unwrap() {
        assert!(check.isometric, "{}", check.vertex);
        assert_eq!((check.vertices, check.edges, check.total_length), (8, 12, 32));
        assert_eq!(check.witness.len(), 8);
        let images: BTreeSet<_> = check.witness.iter().map(|(_, r)| r.clone()).collect();
        assert_eq!(images.len(), 8);
        assert!(images.iter().all(|n| reference.index_of(n).is_some()));
    }
}

#[test]
fn link_at_first_vertex_has_the_listed_edges() {
    let c = build_xprime().unwrap();
    let link = named_link(&c, 0).unwrap();
    // The two hexagon edges at 1+ are 1 and 6.
    let got: BTreeSet<(u32, [String; 2])> = link
        .edges
        .iter()
        .map(|e| {
            let mut p = [link.vertices[e.a].name.clone(), link.vertices[e.b].name.clone()];
            p.sort();
            (e.length.0, p)
        })
        .collect();
    let pair = |a: &str, b: &str, l: u32| {
        let mut p = [a.to_string(), b.to_string()];
        p.sort();
        (l, p)
    };
    let want: BTreeSet<_> = [
        pair("a1", "b1", 4),
        pair("a3", "c1", 4),
        pair("b3", "d1", 4),
        pair("1", "6", 4),
        pair("a1", "d1", 2),
        pair("d1", "1", 2),
        pair("b1", "c1", 2),
        pair("c1", "1", 2),
        pair("b3", "6", 2),
        pair("a3", "6", 2),
        pair("a1", "a3", 2),
        pair("b1", "b3", 2),
    ]
    .into_iter()
    .collect();
    assert_eq!(got, want);
}

#[test]
fn not_of_autf2_type_but_of_metric_type() {
    let c = build_xprime().unwrap();
    let r = verify_xprime(&c).unwrap();
    assert!(r.all_links_isometric());
    assert!(!r.autf2.pass);
    assert!(r.autf2.reasons.iter().any(|s| s == "shape hexagon not in type"));
    assert!(r.type_a.pass, "{:?}", r.type_a.reasons);
}

#[test]
fn sigma_is_an_automorphism_of_order_three() {
    let c = build_xprime().unwrap();
    let w = sigma_witness(&c).expect("sigma");
    assert!(verify_complex_witness(&c, &c, &w));
    assert_eq!(w.vertices, vec![4, 5, 0, 1, 2, 3]);
    let t = vertex_transitivity(&c);
    assert_eq!(t.sigma_order, Some(3));
    assert!(t.identity_found);
    assert!(t.transitive(6));
    assert!(t.automorphisms >= 6);
}

#[test]
fn deleting_any_triangle_breaks_a_link() {
    let c = build_xprime().unwrap();
    let reference = brady_link();
    for (f, face) in c.faces().iter().enumerate() {
        if face.shape != TRIANGLE {
            continue;
        }
        let d = without_face(&c, f);
        assert!(!is_of_type(&d, &metric_type_a(), false).pass);
        let broken = link_checks(&d).unwrap().iter().filter(|l| !l.isometric).count();
        assert_eq!(broken, 3, "face {f}");
        let touched = (0..3).map(|i| c.corner_vertex(f, i)).collect::<BTreeSet<_>>();
        for v in touched {
            let link = named_link(&d, v).unwrap();
            assert!(find_isomorphism(&link, &reference, IsoMode::Isometry).is_none());
        }
    }
}

#[test]
fn every_edge_has_three_face_sides() {
    let c = build_xprime().unwrap();
    // Each edge bounds three face sides in total.
    let counts = c.edge_face_counts();
    assert!(counts.iter().all(|&k| k == 3), "{counts:?}");
}
