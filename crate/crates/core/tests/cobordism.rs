use forge_core::cobordism::{
    build_collar, close_up, collar_nerve, compose, gallery_labels, generating_gallery, letter_drops, minimal_generating_gallery,
    nerve_graph, nerve_matches_reference, power, product_certificate, Ambient, Cobordism, StripFragment, SEAM_PERIOD,
};
use forge_core::complex_iso::is_isomorphic;
use forge_core::error::CobordismError;
use forge_core::link::compute_link;
use forge_core::toric::{basic_construction, build_torus};
use forge_core::AngleUnits;

const EXPECTED: [&str; 12] = ["A0", "A1'", "A0'", "A1''", "B-2", "B-1'", "B-2'", "B-1''", "C-4", "C-3'", "C-4'", "C-3''"];

fn expected_at(y: i64) -> Vec<String> {
    // Shift every index in the y = 0 list by y.
    EXPECTED
        .iter()
        .map(|s| {
            let primes = s.chars().filter(|&c| c == '\'').count();
            let idx: i64 = s[1..s.len() - primes].parse().unwrap();
            format!("{}{}{}", &s[..1], idx + y, "'".repeat(primes))
        })
        .collect()
}

#[test]
fn strip_interior_links_are_twelve_cycles() {
    let frag = StripFragment::new(-3, 3).unwrap();
    let v = frag.vertex(2, 0).unwrap();
    let link = compute_link(&frag.complex, v).unwrap();
    assert_eq!(link.cycle_component_lengths(), vec![Some(AngleUnits(12))]);
    assert_eq!(link.vertex_count(), 4);
}

#[test]
fn generating_gallery_label_sequence() {
    for y in [0, 3, -2] {
        let amb = Ambient::new(y - 12, y + 4).unwrap();
        let g = generating_gallery(y, &amb).unwrap();
        assert_eq!(g.len(), 12);
        assert!(g.is_valid(&amb.strip.complex));
        assert_eq!(gallery_labels(&g, &amb.strip), expected_at(y));
        assert_eq!(letter_drops(&g, &amb.strip), vec![-2, -2, -2]);
        assert_eq!(letter_drops(&g, &amb.strip).iter().sum::<i64>(), -6);
    }
}

#[test]
fn rotations_are_the_same_gallery() {
    let amb = Ambient::new(-12, 4).unwrap();
    let g = generating_gallery(0, &amb).unwrap();
    let r = g.rotated(5);
    assert!(r.is_valid(&amb.strip.complex));
    assert!(g.is_rotation_of(&r));
    let mut broken = g.clone();
    broken.faces.swap(0, 1);
    assert!(!g.is_rotation_of(&broken));
}

#[test]
fn minimal_gallery_lengths() {
    let frag = StripFragment::new(-20, 20).unwrap();
    let g = minimal_generating_gallery(&frag.complex, SEAM_PERIOD, 6).unwrap();
    assert_eq!(g.len(), 12);
    assert!(g.is_valid(&frag.complex));
    let g2 = minimal_generating_gallery(&frag.complex, (12, -12), 6).unwrap();
    assert_eq!(g2.len(), 24);
    for n in 1..=8 {
        let t = build_torus(n).unwrap();
        assert_eq!(minimal_generating_gallery(&t, (0, n as i64), 4).unwrap().len(), n);
    }
}

#[test]
fn small_fragments_are_rejected() {
    let frag = StripFragment::new(0, 3).unwrap();
    assert_eq!(minimal_generating_gallery(&frag.complex, SEAM_PERIOD, 4), Err(CobordismError::Exhausted));
    let amb = Ambient::new(-3, 1).unwrap();
    assert!(matches!(generating_gallery(0, &amb), Err(CobordismError::FragmentTooSmall(_))));
}

#[test]
fn collar_nerve_is_the_reference_graph() {
    let amb = Ambient::new(-12, 4).unwrap();
    let collar = build_collar(0, &amb).unwrap();
    let mut names = collar.triple_names();
    names.sort();
    assert_eq!(names, ["A0", "A1", "B-1", "B-2", "C-3", "C-4"]);
    let h = collar_nerve(&collar, &amb).unwrap();
    assert_eq!((h.vertex_count(), h.edge_count()), (12, 18));
    assert!(h.degrees().iter().all(|&d| d == 3));
    assert!(nerve_matches_reference(&h));
    let chords: Vec<(usize, usize)> = h.edges[12..].iter().map(|e| (e.a, e.b)).collect();
    assert_eq!(chords, [(0, 2), (1, 3), (4, 6), (5, 7), (8, 10), (9, 11)]);
}

#[test]
fn collar_without_a_triple_fails() {
    let amb = Ambient::new(-12, 4).unwrap();
    let mut collar = build_collar(0, &amb).unwrap();
    collar.triples.remove(2);
    assert!(matches!(product_certificate(&collar, &amb), Err(CobordismError::Certificate(_))));
    let h = nerve_graph(&collar, &amb.strip);
    assert!(h.degrees().contains(&2));
    assert!(!nerve_matches_reference(&h));
}

#[test]
fn powers_are_distinct() {
    let ps: Vec<Cobordism> = (0..=3).map(|n| power(n, 0).unwrap()).collect();
    assert_eq!(ps.iter().map(|p| p.closed_triangle_count()).collect::<Vec<_>>(), [0, 1, 2, 3]);
    assert_eq!(ps[0], Cobordism::identity(0).unwrap());
    let cs: Vec<_> = ps.iter().map(|p| p.realize().unwrap().0).collect();
    for i in 1..=3 {
        for j in i + 1..=3 {
            assert!(!is_isomorphic(&cs[i], &cs[j]));
        }
    }
}

#[test]
fn composition_is_associative() {
    let b = Cobordism::elementary(0).unwrap();
    let left = compose(&compose(&b, &b).unwrap(), &b).unwrap();
    let right = compose(&b, &compose(&b, &b).unwrap()).unwrap();
    assert!(is_isomorphic(&left.realize().unwrap().0, &right.realize().unwrap().0));
    assert!(is_isomorphic(
        &Cobordism::elementary(0).unwrap().realize().unwrap().0,
        &Cobordism::elementary(1).unwrap().realize().unwrap().0
    ));
}

#[test]
fn mismatched_collars_do_not_compose() {
    let b = Cobordism::elementary(0).unwrap();
    let mut bad = b.clone();
    let first = *bad.domain.iter().next().unwrap();
    bad.domain.remove(&first);
    assert!(matches!(compose(&b, &bad), Err(CobordismError::CollarMismatch(_))));
}

#[test]
fn surgery_closes_up_to_basic_construction() {
    for n in [5, 6] {
        let closed = close_up(&power(n, 0).unwrap()).unwrap();
        let b = basic_construction(n).unwrap().complex;
        assert_eq!(closed.euler_counts(), b.euler_counts());
        assert!(is_isomorphic(&closed, &b));
    }
}
