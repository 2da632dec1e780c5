use super::*;
use crate::catalog::standard;
use crate::diagram::Piece;
use crate::tangle::{fixtures::v, TangleCode};
use Role::*;

fn id(s: &str) -> Id {
    Id::from(s)
}

/// Single-piece diagram from closed strands `S<k>` with framings; circle `C<k>` owns `S<k>`.
fn link(crossings: &[(&str, Sign)], strands: &[(Vec<Visit>, i64)]) -> Diagram {
    let mut d = Diagram::empty();
    let mut t = TangleCode::default();
    for (x, s) in crossings {
        t.crossings.insert(id(x), Crossing { sign: *s });
    }
    for (k, (path, f)) in strands.iter().enumerate() {
        let sid = Id::new(format!("S{}", k + 1));
        t.strands.insert(sid.clone(), Strand::closed(path.clone()));
        d.circles.insert(Id::new(format!("C{}", k + 1)), GluedCircle::new(vec![StrandRef { piece: id("P1"), strand: sid }], *f));
    }
    t.normalize();
    d.pieces.insert(id("P1"), Piece { tangle: t, walls: Default::default() });
    assert!(d.validate().ok, "{}", d.validate());
    d
}

fn matrix(d: &Diagram) -> Vec<Vec<i64>> {
    invariants::linking_matrix(d).unwrap().matrix.to_rows()
}

/// Linking matrix after blowing down circle `c` with framing `eps`.
fn blow_down_oracle(l: &[Vec<i64>], c: usize) -> Vec<Vec<i64>> {
    let eps = l[c][c];
    let keep: Vec<usize> = (0..l.len()).filter(|&i| i != c).collect();
    keep.iter().map(|&i| keep.iter().map(|&j| l[i][j] - eps * l[i][c] * l[j][c]).collect()).collect()
}

/// `EᵀLE` for the elementary `E` adding `rho` times basis vector `j` to `i`.
fn slide_oracle(l: &[Vec<i64>], i: usize, j: usize, rho: i64) -> Vec<Vec<i64>> {
    let n = l.len();
    let mut e = vec![vec![0i64; n]; n];
    for (k, row) in e.iter_mut().enumerate() {
        row[k] = 1;
    }
    e[j][i] = rho;
    let mul = |a: &[Vec<i64>], b: &[Vec<i64>]| -> Vec<Vec<i64>> {
        (0..n).map(|r| (0..n).map(|c| (0..n).map(|k| a[r][k] * b[k][c]).sum()).collect()).collect()
    };
    let et: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| e[c][r]).collect()).collect();
    mul(&mul(&et, l), &e)
}

#[test]
fn blow_up_empty_is_cp2() {
    let d = blow_up(&Diagram::empty(), &BlowUpSite::outer("P1"), Sign::Plus).unwrap();
    assert_eq!(d, standard("cp2").unwrap());
    let m = blow_up(&Diagram::empty(), &BlowUpSite::outer("P1"), Sign::Minus).unwrap();
    assert_eq!(matrix(&m), vec![vec![-1]]);
}

#[test]
fn blow_up_extends_form() {
    let d = standard("s2xs2").unwrap();
    let e = blow_up(&d, &BlowUpSite::outer("P1"), Sign::Plus).unwrap();
    assert_eq!(matrix(&e), vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]);
    assert_eq!(e.handle_counts().0[2], 3);
    assert_eq!(invariants::euler_characteristic(&e), 5);
}

#[test]
fn blow_up_rejects_missing_face() {
    // Hopf link: 2 crossings + 1 + 1 component = 4 faces
    let d = standard("s2xs2").unwrap();
    assert_eq!(face_count(&d, &id("P1")), Some(4));
    assert!(blow_up(&d, &BlowUpSite { piece: id("P1"), region: 3 }, Sign::Plus).is_ok());
    assert!(matches!(
        blow_up(&d, &BlowUpSite { piece: id("P1"), region: 4 }, Sign::Plus),
        Err(MoveError::InvalidSite(_))
    ));
    assert!(matches!(blow_up(&d, &BlowUpSite::outer("P9"), Sign::Plus), Err(MoveError::Unknown(..))));
}

#[test]
fn blow_down_cp2_is_empty() {
    let d = blow_down(&standard("cp2").unwrap(), &id("C1")).unwrap();
    assert_eq!(d, Diagram::empty());
}

#[test]
fn blow_down_split_leaves_rest() {
    let d = link(&[], &[(vec![], 1), (vec![], 0)]);
    let e = blow_down(&d, &id("C1")).unwrap();
    assert_eq!(e.circles.len(), 1);
    assert_eq!(matrix(&e), vec![vec![0]]);
}

#[test]
fn blow_down_clasped_circle() {
    // Hopf link, C1 framed 0, C2 framed +1
    let d = link(
        &[("X1", Sign::Plus), ("X2", Sign::Plus)],
        &[(vec![v("X1", Over), v("X2", Under)], 0), (vec![v("X1", Under), v("X2", Over)], 1)],
    );
    let e = blow_down(&d, &id("C2")).unwrap();
    assert_eq!(matrix(&e), vec![vec![-1]]);
    assert_eq!(e.pieces[&id("P1")].tangle.crossing_count(), 0);
}

#[test]
fn blow_down_twists_two_strands() {
    // C3 (+1) encircles C1 and C2; C2 passes with either orientation
    for o in [Sign::Plus, Sign::Minus] {
        let d = link(
            &[("X1", Sign::Plus), ("Y1", Sign::Plus), ("X2", o), ("Y2", o)],
            &[
                (vec![v("X1", Under), v("Y1", Over)], 2),
                (vec![v("X2", Under), v("Y2", Over)], 0),
                (vec![v("X1", Over), v("X2", Over), v("Y2", Under), v("Y1", Under)], 1),
            ],
        );
        let before = matrix(&d);
        let e = blow_down(&d, &id("C3")).unwrap();
        assert_eq!(matrix(&e), blow_down_oracle(&before, 2), "orientation {o}");
        assert_eq!(e.pieces[&id("P1")].tangle.crossing_count(), 2);
    }
}

#[test]
fn blow_down_three_strands_matches_oracle() {
    let d = link(
        &[
            ("X1", Sign::Plus),
            ("Y1", Sign::Plus),
            ("X2", Sign::Minus),
            ("Y2", Sign::Minus),
            ("X3", Sign::Plus),
            ("Y3", Sign::Plus),
        ],
        &[
            (vec![v("X1", Under), v("Y1", Over), v("X3", Under), v("Y3", Over)], 0),
            (vec![v("X2", Under), v("Y2", Over)], 3),
            (vec![v("X1", Over), v("X2", Over), v("X3", Over), v("Y3", Under), v("Y2", Under), v("Y1", Under)], -1),
        ],
    );
    let before = matrix(&d);
    let e = blow_down(&d, &id("C3")).unwrap();
    assert_eq!(matrix(&e), blow_down_oracle(&before, 2));
}

#[test]
fn blow_down_refusals() {
    let trefoil = link(
        &[("X1", Sign::Plus), ("X2", Sign::Plus), ("X3", Sign::Plus)],
        &[(vec![v("X1", Over), v("X2", Under), v("X3", Over), v("X1", Under), v("X2", Over), v("X3", Under)], 1)],
    );
    assert!(matches!(blow_down(&trefoil, &id("C1")), Err(MoveError::Refused(_))));
    let zero = link(&[], &[(vec![], 0)]);
    assert!(matches!(blow_down(&zero, &id("C1")), Err(MoveError::Refused(_))));
    assert!(matches!(blow_down(&zero, &id("C7")), Err(MoveError::Unknown(..))));
    let surf = standard("s4-with-cancelling-pair").unwrap();
    let mut one = surf.clone();
    one.circles.get_mut(&id("C1")).unwrap().framing = 1;
    assert!(matches!(blow_down(&one, &id("C1")), Err(MoveError::Refused(_))));
}

#[test]
fn blow_up_then_down_is_identity() {
    let d = standard("s2xs2").unwrap();
    let e = blow_up(&d, &BlowUpSite::outer("P1"), Sign::Minus).unwrap();
    let back = blow_down(&e, &id("C3")).unwrap();
    assert_eq!(back, d);
}

#[test]
fn slide_split_zero_unknots() {
    let d = link(&[], &[(vec![], 0), (vec![], 0)]);
    let e = handle_slide(&d, &id("C1"), &id("C2"), &Band::simple(false)).unwrap();
    assert_eq!(matrix(&e), slide_oracle(&matrix(&d), 0, 1, 1));
    assert_eq!(e.circles[&id("C1")].framing, 0);
}

#[test]
fn slide_plus_one_over_plus_one() {
    let d = link(&[], &[(vec![], 1), (vec![], 1)]);
    let e = handle_slide(&d, &id("C1"), &id("C2"), &Band::simple(false)).unwrap();
    assert_eq!(e.circles[&id("C1")].framing, 2);
    assert_eq!(matrix(&e), vec![vec![2, 1], vec![1, 1]]);
    let r = handle_slide(&d, &id("C1"), &id("C2"), &Band::simple(true)).unwrap();
    assert_eq!(matrix(&r), vec![vec![2, -1], vec![-1, 1]]);
}

#[test]
fn slide_over_knotted_linked_circle() {
    // C2 is a figure-eight-like code with self-crossings, linked with C1 and C3
    let d = link(
        &[
            ("A1", Sign::Plus),
            ("A2", Sign::Plus),
            ("K1", Sign::Minus),
            ("B1", Sign::Minus),
            ("B2", Sign::Minus),
        ],
        &[
            (vec![v("A1", Over), v("A2", Under)], 1),
            (vec![v("A1", Under), v("K1", Over), v("B1", Over), v("K1", Under), v("A2", Over), v("B2", Under)], 2),
            (vec![v("B1", Under), v("B2", Over)], -3),
        ],
    );
    let l = matrix(&d);
    for (i, j) in [(0, 1), (2, 1), (1, 0), (0, 2)] {
        for rho in [1, -1] {
            let (ci, cj) = (Id::new(format!("C{}", i + 1)), Id::new(format!("C{}", j + 1)));
            let e = handle_slide(&d, &ci, &cj, &Band { strand: None, arc: 1, target_arc: 1, reversed: rho < 0 }).unwrap();
            assert!(e.validate().ok, "{}", e.validate());
            assert_eq!(matrix(&e), slide_oracle(&l, i, j, rho), "slide C{} over C{} rho {rho}", i + 1, j + 1);
        }
    }
}

#[test]
fn slide_errors() {
    let d = link(&[], &[(vec![], 0), (vec![], 0)]);
    assert!(matches!(handle_slide(&d, &id("C1"), &id("C1"), &Band::simple(false)), Err(MoveError::InvalidSite(_))));
    let bad = Band { strand: None, arc: 5, target_arc: 0, reversed: false };
    assert!(matches!(handle_slide(&d, &id("C1"), &id("C2"), &bad), Err(MoveError::InvalidSite(_))));
    // sliding over a circle that runs through a pair
    let two = standard("two-piece-cp2").unwrap();
    let e = blow_up(&two, &BlowUpSite::outer("P1"), Sign::Plus).unwrap();
    let new = e.circles.keys().find(|c| c.as_str() != "C1").unwrap().clone();
    assert!(matches!(handle_slide(&e, &new, &id("C1"), &Band::simple(false)), Err(MoveError::BandCrossesWall(_))));
    // a band between pieces
    let mut f = blow_up(&two, &BlowUpSite::outer("P2"), Sign::Plus).unwrap();
    f = blow_up(&f, &BlowUpSite::outer("P1"), Sign::Plus).unwrap();
    let ids: Vec<Id> = f.circles.keys().cloned().collect();
    assert!(matches!(handle_slide(&f, &ids[1], &ids[2], &Band::simple(false)), Err(MoveError::BandCrossesWall(_))));
}

#[test]
fn moves_refuse_diffeomorphisms() {
    let d = standard("swap-diffeo").unwrap();
    assert!(matches!(blow_up(&d, &BlowUpSite::outer("P1"), Sign::Plus), Err(MoveError::Precondition(_))));
}

#[test]
fn surgery_presentations() {
    assert_eq!(spherical_surgery(&Diagram::empty()).h1(), HomologyGroup::default());
    let zero = link(&[], &[(vec![], 0)]);
    assert_eq!(spherical_surgery(&zero).h1(), HomologyGroup { betti: 1, torsion: vec![] });
    assert_eq!(spherical_surgery(&standard("cp2").unwrap()).h1(), HomologyGroup::default());
    let s = spherical_surgery(&standard("s1xs3").unwrap());
    assert_eq!(s.generators, vec![id("H1")]);
    assert_eq!(s.spheres, vec![id("F1")]);
    assert_eq!(s.h1(), HomologyGroup { betti: 1, torsion: vec![] });
    let five = link(&[], &[(vec![], 5)]);
    assert_eq!(spherical_surgery(&five).h1(), HomologyGroup { betti: 0, torsion: vec![5] });
}

#[test]
fn recognize_single_unknots() {
    for s in [Sign::Plus, Sign::Minus] {
        let d = blow_up(&Diagram::empty(), &BlowUpSite::outer("P1"), s).unwrap();
        let v = recognize_s3(&d, 1).unwrap();
        assert_eq!(v, Verdict::Yes(vec![KirbyMove::BlowDown { circle: id("C1") }]));
    }
    let v = recognize_s3(&link(&[], &[(vec![], 0)]), 3).unwrap();
    let Verdict::No(ob) = v else { panic!("expected No, got {v:?}") };
    assert!(ob.invariants[0].contains("|det L| = 0"));
}

#[test]
fn recognize_chain_of_three() {
    let d = link(&[], &[(vec![], 1), (vec![], -1), (vec![], 1)]);
    let Verdict::Yes(w) = recognize_s3(&d, 3).unwrap() else { panic!() };
    assert_eq!(w.len(), 3);
    assert!(!recognize_s3(&d, 2).unwrap().is_yes());
}

#[test]
fn recognize_clasp_needs_two_moves() {
    let d = link(
        &[("X1", Sign::Plus), ("X2", Sign::Plus)],
        &[(vec![v("X1", Over), v("X2", Under)], 0), (vec![v("X1", Under), v("X2", Over)], 1)],
    );
    let Verdict::Yes(w) = recognize_s3(&d, 2).unwrap() else { panic!() };
    let mut cur = d.clone();
    for m in &w {
        cur = apply_move(&cur, m).unwrap();
    }
    assert!(cur.circles.is_empty());
}

#[test]
fn recognize_preconditions() {
    assert!(matches!(recognize_s3(&standard("s1xs3").unwrap(), 2), Err(MoveError::Precondition(_))));
}

#[test]
fn canonical_key_ignores_labels() {
    let a = link(
        &[("X1", Sign::Plus), ("X2", Sign::Plus)],
        &[(vec![v("X1", Over), v("X2", Under)], 0), (vec![v("X1", Under), v("X2", Over)], 0)],
    );
    let b = link(
        &[("Q7", Sign::Plus), ("Z2", Sign::Plus)],
        &[(vec![v("Z2", Over), v("Q7", Under)], 0), (vec![v("Q7", Over), v("Z2", Under)], 0)],
    );
    assert_eq!(canonical_key(&a), canonical_key(&b));
    let c = link(
        &[("X1", Sign::Minus), ("X2", Sign::Minus)],
        &[(vec![v("X1", Over), v("X2", Under)], 0), (vec![v("X1", Under), v("X2", Over)], 0)],
    );
    assert_ne!(canonical_key(&a), canonical_key(&c));
}
