use proptest::prelude::*;

use forge_core::complex::{Complex2, Face};
use forge_core::exotic::build_xprime;
use forge_core::iso::{find_isomorphism, verify_witness, IsoMode};
use forge_core::link::{compute_link, LinkGraph};
use forge_core::pinchfill::decompose;
use forge_core::toric::{basic_construction, build_torus};
use forge_core::AngleUnits;

const MODES: [IsoMode; 3] = [IsoMode::Plain, IsoMode::Isometry, IsoMode::Label];

/// A small multigraph: vertex count plus edges (a, b, length, label index).
fn small_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, u32, u8)>)> {
    (2usize..7).prop_flat_map(|n| {
        let edge = (0..n, 0..n, prop::sample::select(vec![2u32, 4]), 0u8..2);
        (Just(n), prop::collection::vec(edge, 1..10))
    })
}

fn graph(n: usize, edges: &[(usize, usize, u32, u8)], perm: Option<&[usize]>) -> LinkGraph {
    let mut g = LinkGraph::new();
    for i in 0..n {
        g.add_vertex(i.to_string());
    }
    let p = |v: usize| perm.map_or(v, |p| p[v]);
    for &(a, b, len, lab) in edges {
        g.add_edge(p(a), p(b), len, if lab == 0 { "t" } else { "q" });
    }
    g
}

fn shuffled(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

/// Relabels vertices by `perm` and lists faces in `order`.
fn scrambled(c: &Complex2, perm: &[usize], order: &[usize]) -> Complex2 {
    let r = c.relabel_vertices(perm, c.vertex_count());
    let mut out = Complex2::with_vertices(r.vertex_count());
    for e in r.edges() {
        out.add_edge(e.from, e.to, e.label.clone()).unwrap();
    }
    for &f in order {
        let face: &Face = r.face(f);
        out.add_face(face.clone()).unwrap();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn isomorphism_search_is_symmetric((n, e1) in small_graph(), (m, e2) in small_graph()) {
        let g1 = graph(n, &e1, None);
        let g2 = graph(m, &e2, None);
        for mode in MODES {
            prop_assert_eq!(find_isomorphism(&g1, &g2, mode).is_some(), find_isomorphism(&g2, &g1, mode).is_some());
        }
    }

    #[test]
    fn relabelled_graphs_are_isomorphic_with_equal_girth(
        (n, edges, perm) in small_graph().prop_flat_map(|(n, e)| (Just(n), Just(e), shuffled(n)))
    ) {
        let g1 = graph(n, &edges, None);
        let g2 = graph(n, &edges, Some(&perm));
        for mode in MODES {
            let w = find_isomorphism(&g1, &g2, mode);
            prop_assert!(w.is_some());
            let w = w.unwrap();
            prop_assert!(verify_witness(&g1, &g2, &w));
            let back = find_isomorphism(&g2, &g1, mode);
            prop_assert!(back.is_some());
        }
        prop_assert_eq!(g1.girth(), g2.girth());
    }

    #[test]
    fn isometric_graphs_share_girth((n, e1) in small_graph(), (m, e2) in small_graph()) {
        let g1 = graph(n, &e1, None);
        let g2 = graph(m, &e2, None);
        if find_isomorphism(&g1, &g2, IsoMode::Isometry).is_some() {
            prop_assert_eq!(g1.girth(), g2.girth());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn json_round_trip(
        (c, perm) in (1usize..=8, 0usize..3)
            .prop_map(|(n, kind)| match kind {
                0 => build_torus(n).unwrap(),
                1 => basic_construction(n).unwrap().complex,
                _ => build_xprime().unwrap(),
            })
            .prop_flat_map(|c| { let v = c.vertex_count(); (Just(c), shuffled(v)) })
    ) {
        let r = c.relabel_vertices(&perm, c.vertex_count());
        let text = r.to_json();
        let back = Complex2::from_json(&text).unwrap();
        prop_assert_eq!(&back, &r);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn torus_counts_and_flat_links(n in 1usize..=12) {
        let t = build_torus(n).unwrap();
        prop_assert_eq!(t.euler_counts(), (6 * n, 12 * n, 6 * n));
        for v in t.vertices() {
            let l = compute_link(&t, v).unwrap();
            prop_assert_eq!(l.cycle_component_lengths(), vec![Some(AngleUnits(12))]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn decomposition_sizes_survive_relabelling(
        (n, perm, order) in (1usize..=8).prop_flat_map(|n| (Just(n), shuffled(3 * n), shuffled(10 * n)))
    ) {
        let b = basic_construction(n).unwrap().complex;
        let sizes = decompose(&b).unwrap().sizes();
        let s = scrambled(&b, &perm, &order);
        let d = decompose(&s).unwrap();
        prop_assert_eq!(d.sizes(), sizes);
        prop_assert_eq!(d.sigma.len(), 3 * n);
    }
}
