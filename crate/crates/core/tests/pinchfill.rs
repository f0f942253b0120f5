use forge_core::complex_iso::is_isomorphic;
use forge_core::error::PinchError;
use forge_core::pinchfill::{decompose, find_systoles, injectivity_proxy, pinch, refill, systolic_filling, PinchData};
use forge_core::toric::{basic_construction, build_torus, TorusCoord};

#[test]
fn pinched_torus_counts() {
    for n in 1..=8 {
        let tp = pinch(&PinchData::torus_with_jumps(n).unwrap()).unwrap();
        assert_eq!(tp.euler_counts(), (3 * n, 12 * n, 6 * n));
        assert!(tp.degrees().iter().all(|&d| d == 8));
    }
}

#[test]
fn n5_has_twenty_systoles_each_edge_once() {
    let tp = pinch(&PinchData::torus_with_jumps(5).unwrap()).unwrap();
    let r = find_systoles(&tp);
    assert_eq!(r.systoles.len(), 20);
    assert!(r.unique_membership());
}

#[test]
fn bare_torus_has_no_systoles() {
    assert!(find_systoles(&build_torus(5).unwrap()).systoles.is_empty());
}

#[test]
fn filling_matches_basic_construction() {
    for n in 1..=8 {
        let f = systolic_filling(&pinch(&PinchData::torus_with_jumps(n).unwrap()).unwrap()).unwrap();
        assert_eq!(f.report.valid_covers, 1);
        assert!(f.report.type_check.pass, "n={n}");
        assert_eq!(f.report.min_girth, Some(12));
        assert!(is_isomorphic(&f.complex, &basic_construction(n).unwrap().complex), "n={n}");
    }
}

#[test]
fn decomposition_recovers_one_torus_and_round_trips() {
    for n in 1..=8 {
        let b = basic_construction(n).unwrap().complex;
        let d = decompose(&b).unwrap();
        assert_eq!(d.sizes(), vec![(6, n as i64)], "n={n}");
        assert_eq!(d.sigma.len(), 3 * n);
        let again = refill(&d).unwrap();
        assert!(is_isomorphic(&again.complex, &b), "n={n}");
    }
}

#[test]
fn proxy_reports_short_closed_paths() {
    let counts: Vec<_> = (1..=8)
        .map(|n| {
            let p = injectivity_proxy(&basic_construction(n).unwrap().complex);
            (p.degenerate_faces.len(), p.loops.len(), p.bigons.len())
        })
        .collect();
    assert_eq!(counts, vec![(9, 9, 0), (12, 6, 18), (9, 0, 27), (0, 0, 18), (0, 0, 15), (0, 0, 18), (0, 0, 21), (0, 0, 24)]);
}

#[test]
fn involution_errors() {
    let t = build_torus(2).unwrap();
    let mut sigma: Vec<(usize, usize)> = (0..6).map(|i| (2 * i, 2 * i + 1)).collect();
    assert!(pinch(&PinchData::new(vec![t.clone()], sigma.clone())).is_ok());
    sigma[0] = (3, 3);
    assert_eq!(pinch(&PinchData::new(vec![t.clone()], sigma.clone())), Err(PinchError::FixedPoint(3)));
    sigma[0] = (0, 2);
    assert_eq!(pinch(&PinchData::new(vec![t], sigma)), Err(PinchError::NotInvolution(2)));
}

/// Even x ↦ (x+5, y−2): a valid involution whose only systolic filling
/// has a short link cycle.
#[test]
fn bad_involution_is_rejected_with_witness() {
    let n = 6;
    let sigma = (0..6 * n)
        .filter_map(|id| {
            let p = TorusCoord::from_id(id);
            (p.x % 2 == 0).then(|| {
                let q = TorusCoord::normalized(p.x + 5, p.y - 2, n as i64).id();
                (id.min(q), id.max(q))
            })
        })
        .collect();
    let tp = pinch(&PinchData::new(vec![build_torus(n).unwrap()], sigma)).unwrap();
    match systolic_filling(&tp) {
        Err(PinchError::Girth { length, edges, .. }) => {
            assert!(length < 12);
            assert!(!edges.is_empty());
        }
        other => panic!("expected a girth witness, got {other:?}"),
    }
}

#[test]
fn decompose_rejects_a_torus() {
    assert!(matches!(decompose(&build_torus(5).unwrap()), Err(PinchError::Precondition(_))));
}
