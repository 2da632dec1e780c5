use super::*;
use crate::catalog::standard;
use crate::diagram::{GluedCircle, InternalMaps};
use crate::random::{perturb, random_link, random_multi_piece, relabel, rng};
use crate::tangle::{Crossing, Role, Strand, Visit};

fn id(s: &str) -> Id {
    Id::from(s)
}

fn yes(d1: &Diagram, d2: &Diagram, opts: &EquivOptions) -> Isomorphism {
    match isomorphic(d1, d2, opts).unwrap() {
        Verdict::Yes(w) => {
            verify_witness(d1, d2, &w).unwrap();
            w
        }
        v => panic!("expected yes, got {v:?}"),
    }
}

fn trefoil(sign: Sign) -> Diagram {
    let mut d = Diagram::empty();
    let t = &mut d.pieces.get_mut(&id("P1")).unwrap().tangle;
    for x in ["X1", "X2", "X3"] {
        t.crossings.insert(id(x), Crossing { sign });
    }
    let (o, u) = if sign == Sign::Plus { (Role::Over, Role::Under) } else { (Role::Under, Role::Over) };
    let path = ["X1", "X2", "X3", "X1", "X2", "X3"]
        .iter()
        .enumerate()
        .map(|(k, x)| Visit::new(id(x), if k % 2 == 0 { o } else { u }))
        .collect();
    t.strands.insert(id("S1"), Strand::closed(path));
    d.circles.insert(id("C1"), GluedCircle::new(vec![StrandRef::new("P1", "S1")], 0));
    d.normalized()
}

#[test]
fn catalog_entries_are_self_isomorphic() {
    for name in ["s4-polar", "cp2", "s2xs2", "s1xs3", "n-s1s3(3)", "two-piece-cp2", "s4-with-cancelling-pair"] {
        let d = standard(name).unwrap();
        yes(&d, &d, &EquivOptions::default());
    }
}

#[test]
fn unknot_framing_sign_matters_without_mirror() {
    let (p, m) = (standard("cp2").unwrap(), {
        let mut d = standard("cp2").unwrap();
        d.circles.get_mut(&id("C1")).unwrap().framing = -1;
        d
    });
    let v = isomorphic(&p, &m, &EquivOptions::default()).unwrap();
    let Verdict::No(ob) = v else { panic!("{v:?}") };
    assert!(ob.to_string().contains("framing"));
    let w = yes(&p, &m, &EquivOptions { mirror: true, ..Default::default() });
    assert!(w.mirror);
}

#[test]
fn hopf_is_not_split() {
    let hopf = standard("s2xs2").unwrap();
    let mut split = Diagram::empty();
    let t = &mut split.pieces.get_mut(&id("P1")).unwrap().tangle;
    t.strands.insert(id("S1"), Strand::closed(vec![]));
    t.strands.insert(id("S2"), Strand::closed(vec![]));
    split.circles.insert(id("C1"), GluedCircle::new(vec![StrandRef::new("P1", "S1")], 0));
    split.circles.insert(id("C2"), GluedCircle::new(vec![StrandRef::new("P1", "S2")], 0));
    let v = isomorphic(&hopf, &split, &EquivOptions::default()).unwrap();
    let Verdict::No(ob) = v else { panic!("{v:?}") };
    assert!(ob.to_string().contains("det"), "{ob}");
}

#[test]
fn reversed_circle_is_found() {
    let d = standard("s2xs2").unwrap();
    let mut e = d.clone();
    e.reverse_circle(&id("C2"));
    assert_ne!(d, e);
    let w = yes(&d, &e, &EquivOptions::default());
    assert_eq!(w.reversed.len(), 1);
}

#[test]
fn trefoil_is_chiral() {
    let (r, l) = (trefoil(Sign::Plus), trefoil(Sign::Minus));
    assert!(r.validate().ok, "{}", r.validate());
    yes(&r, &r, &EquivOptions::default());
    let v = isomorphic(&r, &l, &EquivOptions::default()).unwrap();
    let Verdict::No(ob) = v else { panic!("{v:?}") };
    assert!(ob.to_string().contains("no label bijection"), "{ob}");
    assert!(yes(&r, &l, &EquivOptions { mirror: true, ..Default::default() }).mirror);
}

#[test]
fn perturbed_and_relabeled_copies() {
    let mut r = rng(11);
    for _ in 0..40 {
        let d = random_link(&mut r, 6, 3);
        let p = perturb(&mut r, &d, 2);
        let e = relabel(&mut r, &p, true);
        yes(&d, &e, &EquivOptions::default());
    }
}

#[test]
fn multi_piece_relabeled_copies() {
    let mut r = rng(12);
    for _ in 0..40 {
        let d = random_multi_piece(&mut r, 4);
        let e = relabel(&mut r, &d, true);
        yes(&d, &e, &EquivOptions::default());
    }
}

#[test]
fn tampered_witness_fails() {
    let d = standard("s2xs2").unwrap();
    let mut w = yes(&d, &d, &EquivOptions::default());
    let flip = w.circles.keys().next().unwrap().clone();
    if !w.reversed.remove(&flip) {
        w.reversed.insert(flip);
    }
    assert!(verify_witness(&d, &d, &w).is_err());
    w.circles.clear();
    assert!(verify_witness(&d, &d, &w).is_err());
}

#[test]
fn witnesses_compose() {
    let mut r = rng(13);
    for _ in 0..20 {
        let d1 = random_multi_piece(&mut r, 3);
        let d2 = relabel(&mut r, &d1, true);
        let d3 = relabel(&mut r, &d2, true);
        let opts = EquivOptions::default();
        let (phi, psi) = (yes(&d1, &d2, &opts), yes(&d2, &d3, &opts));
        let chi = compose(&phi, &psi).unwrap();
        verify_witness(&d1, &d3, &chi).unwrap();
    }
}

#[test]
fn small_budget_gives_unknown_on_large_codes() {
    let mut r = rng(14);
    let d = random_link(&mut r, 8, 2);
    let p = perturb(&mut r, &d, 4);
    let e = relabel(&mut r, &p, false);
    let v = isomorphic(&d, &e, &EquivOptions { budget: 0, mirror: false }).unwrap();
    assert!(!v.is_no(), "{v:?}");
}

fn identity_diffeo() -> Diagram {
    let mut d = standard("swap-diffeo").unwrap();
    d.internal_maps = Some(InternalMaps::identity(&d));
    d
}

#[test]
fn swap_is_conjugate_to_its_relabeling() {
    let d = standard("swap-diffeo").unwrap();
    let e = relabel(&mut rng(15), &d, true);
    let c = conjugate(&d, &e, &EquivOptions::default()).unwrap();
    let Verdict::Yes(w) = &c.verdict else { panic!("{c:?}") };
    verify_witness(&d, &e, w).unwrap();
    assert!(c.exhaustive);
}

#[test]
fn swap_is_not_conjugate_to_identity() {
    let c = conjugate(&standard("swap-diffeo").unwrap(), &identity_diffeo(), &EquivOptions::default()).unwrap();
    assert!(c.verdict.is_no(), "{c:?}");
    assert!(c.exhaustive);
    assert!(c.enumerated > 0);
}

#[test]
fn conjugacy_needs_diffeomorphisms() {
    let d = standard("s2xs2").unwrap();
    assert!(matches!(conjugate(&d, &d, &EquivOptions::default()), Err(EquivError::Precondition(_))));
}

#[test]
fn internal_maps_checks() {
    assert!(verify_internal_maps(&standard("swap-diffeo").unwrap()).ok);
    assert!(verify_internal_maps(&identity_diffeo()).ok);
    assert!(!verify_internal_maps(&standard("s2xs2").unwrap()).ok);
    let mut bad = standard("swap-diffeo").unwrap();
    bad.circles.get_mut(&id("C1")).unwrap().framing = 2;
    let r = verify_internal_maps(&bad);
    assert!(!r.ok);
    assert!(r.to_string().contains("framing"), "{r}");
    let mut dup = standard("swap-diffeo").unwrap();
    dup.internal_maps.as_mut().unwrap().circles.insert(id("C2"), id("C2"));
    assert!(!verify_internal_maps(&dup).ok);
}
