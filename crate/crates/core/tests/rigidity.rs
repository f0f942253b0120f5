use forge_core::complex::{Complex2, Face};
use forge_core::rigidity::{
    build_frame, check_frame, cover_report, embeds_by_origin, extend_map, free_ball, interior_links_match, seed_alignments, SeedShape,
};
use forge_core::toric::basic_construction;
use forge_core::typesys::{autf2_type, is_of_type};

#[test]
fn ball_growth_is_forced_at_every_step() {
    let ty = autf2_type();
    let ball = free_ball(&ty, 3, SeedShape::Triangle).unwrap();
    assert!(ball.unique_steps());
    assert!(ball.steps.iter().all(|s| s.admissible == 1));
    assert!(interior_links_match(&ball, &ty));
    assert!(is_of_type(&ball.complex, &ty, true).pass);
    assert_eq!(ball.complex.euler_counts(), (1503, 3144, 1642));
}

#[test]
fn ball_counts_by_radius() {
    let ty = autf2_type();
    let counts: Vec<_> = (0..3).map(|r| free_ball(&ty, r, SeedShape::Triangle).unwrap().complex.euler_counts()).collect();
    assert_eq!(counts, vec![(3, 3, 1), (33, 60, 28), (243, 486, 244)]);
}

#[test]
fn radius_growth_is_monotone() {
    let ty = autf2_type();
    let balls: Vec<_> = (0..=3).map(|r| free_ball(&ty, r, SeedShape::Triangle).unwrap()).collect();
    for w in balls.windows(2) {
        embeds_by_origin(&w[0], &w[1]).unwrap();
    }
}

#[test]
fn ball_covers_basic_constructions_deterministically() {
    let ty = autf2_type();
    let ball = free_ball(&ty, 3, SeedShape::Triangle).unwrap();
    for n in [1, 5] {
        let b = basic_construction(n).unwrap();
        let r = cover_report(&ball, &b.complex, &ty).unwrap();
        assert!(r.deterministic, "n={n}");
        assert!(r.total, "n={n}");
        assert_eq!(r.certified, ball.interior_vertices().len());
    }
}

#[test]
fn lozenge_seed_ball_sits_in_triangle_seed_ball() {
    let ty = autf2_type();
    let tri = free_ball(&ty, 3, SeedShape::Triangle).unwrap();
    let loz = free_ball(&ty, 2, SeedShape::Lozenge).unwrap();
    let tgt = &tri.complex;
    let f = (0..tgt.faces().len()).find(|&i| tgt.face(i).shape == "lozenge" && (0..4).any(|j| tgt.corner_vertex(i, j) == 0)).unwrap();
    let fm = seed_alignments(&loz.complex, 0, tgt, f)[0];
    let pm = extend_map(&loz, tgt, &ty, fm).unwrap();
    assert!(pm.is_total());
    assert!(pm.deterministic());
    assert!(pm.vertex_injective());
    assert!(pm.face_injective());
}

#[test]
fn frame_certifies_every_lozenge() {
    for n in 1..=8 {
        let bc = basic_construction(n).unwrap();
        let r = check_frame(&bc.complex, &build_frame(&bc));
        assert!(r.passed(), "n={n}: {:?}", r.failures);
        assert_eq!((r.lozenges, r.certified), (6 * n, 6 * n));
    }
}

#[test]
fn frame_mutation_is_caught() {
    let bc = basic_construction(5).unwrap();
    let mut frame = build_frame(&bc);
    frame.edges[7].flipped = !frame.edges[7].flipped;
    let r = check_frame(&bc.complex, &frame);
    assert!(!r.passed());
    let mut frame = build_frame(&bc);
    frame.edges[4].letter = 'f';
    assert!(!check_frame(&bc.complex, &frame).passed());
}

fn without_face(c: &Complex2, f: usize) -> Complex2 {
    let mut out = Complex2::with_vertices(c.vertex_count());
    for e in c.edges() {
        out.add_edge(e.from, e.to, e.label.clone()).unwrap();
    }
    for (i, face) in c.faces().iter().enumerate() {
        if i != f {
            out.add_face(Face { shape: face.shape.clone(), boundary: face.boundary.clone(), corners: face.corners.clone() }).unwrap();
        }
    }
    out
}

#[test]
fn cover_fails_on_a_damaged_target() {
    let ty = autf2_type();
    let ball = free_ball(&ty, 2, SeedShape::Triangle).unwrap();
    let b = basic_construction(5).unwrap();
    let damaged = without_face(&b.complex, b.triangle_faces().start + 3);
    let ok = cover_report(&ball, &damaged, &ty).map(|r| r.total && r.deterministic).unwrap_or(false);
    assert!(!ok);
}
