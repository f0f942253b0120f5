//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use forge_core::cobordism::{
    build_collar, collar_nerve, gallery_labels, generating_gallery, minimal_generating_gallery, nerve_matches_reference, power, Ambient,
    StripFragment, SEAM_PERIOD,
};
use forge_core::complex_iso::is_isomorphic;
use forge_core::exotic::{build_xprime, link_checks, sigma_witness, vertex_transitivity};
use forge_core::iso::{find_isomorphism, verify_witness, IsoMode};
use forge_core::link::all_links;
use forge_core::pinchfill::{decompose, find_systoles, pinch, refill, systolic_filling, PinchData};
use forge_core::report::{verify_all, Mutation, VerifyOptions, GALLERY_LABELS};
use forge_core::rigidity::{build_frame, check_frame, cover_report, free_ball, interior_links_match, SeedShape};
use forge_core::toric::{basic_construction, involution_check, jump, label_permutation, place_letters, Perm4, TorusCoord};
use forge_core::typesys::{autf2_type, brady_link, brady_link_selfcheck, is_of_type};
use forge_core::AngleUnits;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn toric_construction() -> Outcome {
    for n in 1..=8 {
        let l = place_letters(n).map_err(|e| e.to_string())?;
        ensure(l.is_exact_cover(), || format!("n={n}: slots do not cover the edges exactly once"))?;
        let b = basic_construction(n).map_err(|e| e.to_string())?;
        let labels: BTreeSet<_> = b.complex.edges().iter().filter_map(|e| e.label.clone()).collect();
        ensure(labels.len() == 12 * n, || format!("n={n}: {} distinct edge labels", labels.len()))?;
    }
    let b5 = basic_construction(5).map_err(|e| e.to_string())?;
    let letters = b5.labelling.letter_count();
    let counts = b5.complex.euler_counts();
    ensure(letters == 20 && counts == (15, 60, 50), || format!("n=5: {letters} letters, {counts:?}"))?;
    Ok(format!("n=1..8 labelled exactly once; B_5 has {letters} letters and (V,E,F) = {counts:?}"))
}

fn jump_involution() -> Outcome {
    for n in 1..=12 {
        let r = involution_check(n).map_err(|e| e.to_string())?;
        ensure(r.involution && r.fixed_points.is_empty(), || format!("n={n}: σ is not a free involution"))?;
        ensure(r.overlapping.is_empty(), || format!("n={n}: overlapping jumps {:?}", r.overlapping[0]))?;
        ensure(r.off_sigma.is_empty(), || format!("n={n}: jump outside σ"))?;
    }
    Ok("n=1..12: jumps disjoint or same-support, σ² = id".into())
}

fn label_permutations() -> Outcome {
    let forward = Perm4::from_cycle(&[1, 2, 4, 3]);
    for id in 0..30 {
        let c = TorusCoord::from_id(id);
        let p = label_permutation(5, c).map_err(|e| e.to_string())?;
        let want = if c.x % 2 == 0 { forward } else { forward.inverse() };
        ensure(p == want, || format!("jump from {c}: {p}"))?;
    }
    let origin = TorusCoord { x: 0, y: 0 };
    let image = jump(origin, 5);
    ensure(image == TorusCoord { x: 1, y: 3 }, || format!("(0,0) ↦ {image}"))?;
    let p = label_permutation(5, origin).map_err(|e| e.to_string())?;
    ensure(p.to_string() == "(1,2,4,3)", || format!("origin permutation {p}"))?;
    Ok(format!("forward {forward}, reverse {}, (0,0) ↦ {image}", forward.inverse()))
}

fn vertex_links() -> Outcome {
    let reference = brady_link();
    for n in 1..=8 {
        let b = basic_construction(n).map_err(|e| e.to_string())?;
        for (v, l) in all_links(&b.complex).iter().enumerate() {
            let w = find_isomorphism(l, &reference, IsoMode::Label).ok_or_else(|| format!("n={n} vertex {v}: no labelled isomorphism"))?;
            ensure(verify_witness(l, &reference, &w), || format!("n={n} vertex {v}: witness rejected"))?;
            ensure(l.girth() == Some(AngleUnits(12)), || format!("n={n} vertex {v}: girth {:?}", l.girth()))?;
        }
        ensure(is_of_type(&b.complex, &autf2_type(), false).pass, || format!("n={n}: type check failed"))?;
    }
    Ok("n=1..8: every link labelled-isomorphic to the reference, girth 12".into())
}

fn brady_derivation() -> Outcome {
    let r = brady_link_selfcheck();
    ensure(r.passed(), || format!("{} survivors", r.survivors))?;
    let survivor = r.branches.iter().find(|b| b.survives).ok_or("no survivor")?;
    ensure(survivor.tau == ["2'", "4'", "1'", "3'"], || format!("survivor τ = {:?}", survivor.tau))?;
    let killed = r.branch_where(4, "4'");
    ensure(!killed.is_empty() && killed.iter().all(|b| !b.survives && b.girth < 12), || "τ(4) = 4' not eliminated".into())?;
    Ok(format!(
        "unique matching τ = {:?}; τ(4) = 4' killed by cycles of length {:?}",
        survivor.tau,
        killed.iter().map(|b| b.girth).collect::<Vec<_>>()
    ))
}

fn rigidity() -> Outcome {
    let ty = autf2_type();
    let ball = free_ball(&ty, 3, SeedShape::Triangle).map_err(|e| e.to_string())?;
    ensure(ball.unique_steps(), || "a step admitted several extensions".into())?;
    ensure(interior_links_match(&ball, &ty), || "interior link mismatch".into())?;
    let mut germs = Vec::new();
    for n in [1, 5] {
        let b = basic_construction(n).map_err(|e| e.to_string())?;
        let c = cover_report(&ball, &b.complex, &ty).map_err(|e| format!("n={n}: {e}"))?;
        ensure(c.total && c.deterministic, || format!("n={n}: extension not total and forced"))?;
        ensure(c.certified == c.interior, || format!("n={n}: {} of {} germs link-bijective", c.certified, c.interior))?;
        germs.push(c.certified);
    }
    Ok(format!(
        "radius 3 ball {:?}, {} forced steps; B_1 and B_5 pull back with {germs:?} certified germs",
        ball.complex.euler_counts(),
        ball.steps.len()
    ))
}

fn frame() -> Outcome {
    for n in 1..=8 {
        let bc = basic_construction(n).map_err(|e| e.to_string())?;
        let r = check_frame(&bc.complex, &build_frame(&bc));
        ensure(r.passed() && r.certified == r.lozenges, || format!("n={n}: {:?}", r.failures))?;
    }
    let bc = basic_construction(5).map_err(|e| e.to_string())?;
    let mut f = build_frame(&bc);
    f.edges[7].flipped = !f.edges[7].flipped;
    ensure(!check_frame(&bc.complex, &f).passed(), || "flipped edge not caught".into())?;
    Ok("n=1..8 certified on every lozenge; a flipped edge is caught".into())
}

fn pinch_and_fill() -> Outcome {
    for n in 1..=8 {
        let b = basic_construction(n).map_err(|e| e.to_string())?.complex;
        let tp = pinch(&PinchData::torus_with_jumps(n).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let filled = systolic_filling(&tp).map_err(|e| format!("n={n}: {e}"))?;
        ensure(is_isomorphic(&filled.complex, &b), || format!("n={n}: round trip A failed"))?;
        let d = decompose(&b).map_err(|e| format!("n={n}: {e}"))?;
        let again = refill(&d).map_err(|e| format!("n={n}: {e}"))?;
        ensure(is_isomorphic(&again.complex, &b), || format!("n={n}: round trip B failed"))?;
    }
    let d5 = decompose(&basic_construction(5).map_err(|e| e.to_string())?.complex).map_err(|e| e.to_string())?;
    ensure(d5.sizes() == [(6, 5)], || format!("B_5 decomposes into {:?}", d5.sizes()))?;
    let tp = pinch(&PinchData::torus_with_jumps(5).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let s = find_systoles(&tp);
    ensure(s.systoles.len() == 20 && s.unique_membership(), || format!("{} systoles", s.systoles.len()))?;
    Ok("round trips A and B for n=1..8; B_5 is one 6x5 torus; 20 systoles, each edge once".into())
}

fn cobordism() -> Outcome {
    let frag = StripFragment::new(-20, 20).map_err(|e| e.to_string())?;
    let minimal = minimal_generating_gallery(&frag.complex, SEAM_PERIOD, 6).map_err(|e| e.to_string())?;
    ensure(minimal.len() == 12, || format!("minimal gallery length {}", minimal.len()))?;
    let amb = Ambient::new(-12, 4).map_err(|e| e.to_string())?;
    let g = generating_gallery(0, &amb).map_err(|e| e.to_string())?;
    let labels = gallery_labels(&g, &amb.strip);
    ensure(g.len() == 12 && labels == GALLERY_LABELS, || format!("labels {labels:?}"))?;
    let collar = build_collar(0, &amb).map_err(|e| e.to_string())?;
    let h = collar_nerve(&collar, &amb).map_err(|e| e.to_string())?;
    ensure(h.vertex_count() == 12 && h.edge_count() == 18 && h.degrees().iter().all(|&d| d == 3), || "nerve shape".into())?;
    ensure(nerve_matches_reference(&h), || "nerve is not the 12-cycle with chords".into())?;
    let mut counts = Vec::new();
    let mut complexes = Vec::new();
    for k in 1..=3 {
        let p = power(k, 0).map_err(|e| e.to_string())?;
        counts.push(p.closed_triangle_count());
        complexes.push(p.realize().map_err(|e| e.to_string())?.0);
    }
    ensure(counts == [1, 2, 3], || format!("closed triangles {counts:?}"))?;
    for i in 0..3 {
        for j in i + 1..3 {
            ensure(!is_isomorphic(&complexes[i], &complexes[j]), || format!("powers {} and {} isomorphic", i + 1, j + 1))?;
        }
    }
    Ok(format!("gallery length 12 with labels {}; nerve 12 vertices 18 edges; powers {counts:?}", labels.join(" ")))
}

fn exotic() -> Outcome {
    let c = build_xprime().map_err(|e| e.to_string())?;
    ensure(c.euler_counts() == (6, 24, 20), || format!("{:?}", c.euler_counts()))?;
    ensure(c.degrees().iter().all(|&d| d == 8), || format!("degrees {:?}", c.degrees()))?;
    let links = link_checks(&c).map_err(|e| e.to_string())?;
    ensure(links.iter().all(|l| l.isometric), || "a link is not isometric to the reference".into())?;
    let r = is_of_type(&c, &autf2_type(), false);
    ensure(!r.pass && r.reasons.iter().any(|s| s == "shape hexagon not in type"), || format!("{:?}", r.reasons))?;
    ensure(sigma_witness(&c).is_some(), || "σ is not an automorphism".into())?;
    let t = vertex_transitivity(&c);
    ensure(t.orbit_of_first.len() == 6, || format!("orbit {:?}", t.orbit_of_first))?;
    Ok(format!(
        "(6, 24, 20), 8-regular, 6 isometric links, rejected by the Aut(F2) type, orbit size 6 under {} automorphisms",
        t.automorphisms
    ))
}

fn mutation_sensitivity() -> Outcome {
    let opts = |mutation| VerifyOptions { ns: vec![5], radius: 2, mutation };
    let clean = verify_all(&opts(None));
    ensure(clean.passed(), || format!("unmutated run fails: {:?}", clean.failures()))?;
    let mut caught = Vec::new();
    for m in Mutation::ALL {
        let r = verify_all(&opts(Some(m)));
        let failed: Vec<&str> = r.failures().iter().map(|c| c.id.as_str()).collect();
        ensure(!failed.is_empty(), || format!("{m} went undetected"))?;
        caught.push(format!("{m} by {}", failed.join(",")));
    }
    Ok(caught.join("; "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("toric construction", toric_construction),
        ("jump involution", jump_involution),
        ("label permutations", label_permutations),
        ("vertex links", vertex_links),
        ("reference link derivation", brady_derivation),
        ("rigidity", rigidity),
        ("frame", frame),
        ("pinch and fill", pinch_and_fill),
        ("cobordism", cobordism),
        ("exotic complex", exotic),
        ("mutation sensitivity", mutation_sensitivity),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(d) => println!("criterion {:>2} PASS {name} ({ms} ms): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({ms} ms): {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
