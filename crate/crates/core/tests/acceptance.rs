//! The seven acceptance criteria, run as one binary that prints a PASS or
//! FAIL line per criterion and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use msd::calculus::{apply_move, blow_down, blow_up, handle_slide, recognize_s3, Band, BlowUpSite};
use msd::catalog::{self, standard};
use msd::diagram::{GluedCircle, StrandRef};
use msd::equivalence::{conjugate, isomorphic, verify_witness, EquivOptions};
use msd::invariants::{bettis, euler_characteristic, homology, intersection_form, linking_matrix, surgered_h1};
use msd::io::{parse, serialize};
use msd::random::{perturb, random_from_empty, random_link, random_multi_piece, relabel, rng};
use msd::reduction::{merge_all_logged, reduce, to_kirby};
use msd::tangle::{Sign, Strand};
use msd::{Diagram, Id, Verdict};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

// ---- independent oracles: floating-point linear algebra on the linking matrix

fn float_rows(rows: &[Vec<i64>]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect()
}

/// Gaussian elimination with partial pivoting: (rank, |det|).
fn rank_and_det(rows: &[Vec<i64>]) -> (usize, i128) {
    let n = rows.len();
    let mut a = float_rows(rows);
    let mut det = 1.0f64;
    let mut rank = 0;
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())) else { break };
        if a[p][col].abs() < 1e-9 {
            det = 0.0;
            continue;
        }
        a.swap(row, p);
        det *= a[row][col];
        for i in row + 1..n {
            let f = a[i][col] / a[row][col];
            for j in col..n {
                a[i][j] -= f * a[row][j];
            }
        }
        row += 1;
        rank += 1;
    }
    (rank, if rank == n { det.abs().round() as i128 } else { 0 })
}

fn link_rows(d: &Diagram) -> Vec<Vec<i64>> {
    linking_matrix(d).unwrap().matrix.to_rows()
}

fn h1_summary(d: &Diagram) -> (usize, i128) {
    let g = surgered_h1(d).unwrap();
    (g.betti, g.torsion.iter().product::<i128>())
}

/// H1 of the surgered manifold against the float oracle: the free rank is
/// the nullity of L, and for nonsingular L the order is |det L|.
fn check_h1(d: &Diagram) -> Result<(usize, i128), String> {
    let rows = link_rows(d);
    let (rank, det) = rank_and_det(&rows);
    let h = h1_summary(d);
    ensure!(h.0 == rows.len() - rank, "H1 rank {} vs nullity {}", h.0, rows.len() - rank);
    ensure!(det == 0 || h.1 == det, "H1 order {} vs |det| {det}", h.1);
    Ok(h)
}

// ---- criteria

fn catalog_golden() -> Outcome {
    let expect: [(&str, i64, [usize; 5], Option<Vec<Vec<i64>>>); 4] = [
        ("s4-polar", 2, [1, 0, 0, 0, 1], Some(vec![])),
        ("cp2", 3, [1, 0, 1, 0, 1], Some(vec![vec![1]])),
        ("s2xs2", 4, [1, 0, 2, 0, 1], Some(vec![vec![0, 1], vec![1, 0]])),
        ("s1xs3", 0, [1, 1, 0, 1, 1], None),
    ];
    for (name, chi, b, form) in expect {
        let d = standard(name).unwrap();
        ensure!(euler_characteristic(&d) == chi, "{name}: chi {} != {chi}", euler_characteristic(&d));
        let h = homology(&d).unwrap();
        ensure!(bettis(&h) == b, "{name}: betti {:?} != {b:?}", bettis(&h));
        ensure!(h.iter().all(|g| g.torsion.is_empty()), "{name}: unexpected torsion");
        if let Some(f) = form {
            let got = intersection_form(&d).unwrap().to_rows();
            ensure!(got == f, "{name}: form {got:?} != {f:?}");
        }
    }
    for n in 0..=4usize {
        let d = standard(&format!("n-s1s3({n})")).unwrap();
        let h = homology(&d).unwrap();
        ensure!(h[1].betti == n, "n-s1s3({n}): b1 = {}", h[1].betti);
        ensure!(euler_characteristic(&d) == 2 - 2 * n as i64, "n-s1s3({n}): chi");
    }
    Ok("4 named entries and n-s1s3(0..=4)".into())
}

fn move_invariance() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2024);
    let (mut ups, mut downs, mut slides) = (0, 0, 0);
    for case in 0..200 {
        let d = random_link(&mut r, 8, 4);
        let rows = link_rows(&d);
        let h1 = check_h1(&d).map_err(|e| format!("case {case}: {e}"))?;
        let det = rank_and_det(&rows).1;
        let chi = euler_characteristic(&d);

        let eps = if case % 2 == 0 { Sign::Plus } else { Sign::Minus };
        let up = blow_up(&d, &BlowUpSite::outer("P1"), eps).map_err(|e| format!("case {case}: {e}"))?;
        ups += 1;
        let new: Vec<&Id> = up.circles.keys().filter(|c| !d.circles.contains_key(*c)).collect();
        ensure!(new.len() == 1, "case {case}: blow-up added {} circles", new.len());
        let lm = linking_matrix(&up).unwrap();
        let pos: BTreeMap<&Id, usize> = lm.circles.iter().enumerate().map(|(i, c)| (c, i)).collect();
        let old: Vec<&Id> = d.circles.keys().collect();
        for (i, a) in old.iter().enumerate() {
            for (j, b) in old.iter().enumerate() {
                ensure!(lm.matrix[(pos[a], pos[b])] == rows[i][j], "case {case}: blow-up changed L");
            }
            ensure!(lm.matrix[(pos[a], pos[new[0]])] == 0, "case {case}: blow-up circle links {a}");
        }
        ensure!(lm.matrix[(pos[new[0]], pos[new[0]])] == eps.value(), "case {case}: blow-up framing");
        ensure!(euler_characteristic(&up) == chi + 1, "case {case}: chi after blow-up");
        ensure!(check_h1(&up)? == h1, "case {case}: H1 after blow-up");

        let back = blow_down(&up, new[0]).map_err(|e| format!("case {case}: blow-down: {e}"))?;
        downs += 1;
        ensure!(link_rows(&back) == rows, "case {case}: blow-down did not undo the blow-up");
        ensure!(check_h1(&back)? == h1, "case {case}: H1 after blow-down");

        for (c, circle) in &d.circles {
            if circle.framing.abs() == 1 {
                if let Ok(e) = blow_down(&d, c) {
                    downs += 1;
                    ensure!(rank_and_det(&link_rows(&e)).1 == det, "case {case}: |det| after blowing down {c}");
                    ensure!(check_h1(&e)? == h1, "case {case}: H1 after blowing down {c}");
                }
            }
        }

        if d.circles.len() >= 2 {
            let ids: Vec<Id> = d.circles.keys().cloned().collect();
            let (m, o) = (&ids[case % ids.len()], &ids[(case + 1) % ids.len()]);
            let s = handle_slide(&d, m, o, &Band::simple(case % 3 == 0)).map_err(|e| format!("case {case}: slide: {e}"))?;
            slides += 1;
            let srows = link_rows(&s);
            ensure!(rank_and_det(&srows).1 == det, "case {case}: |det| after slide");
            ensure!(check_h1(&s)? == h1, "case {case}: H1 after slide");
        }
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(30), "took {t:?}");
    Ok(format!("200 diagrams, {ups} blow-ups, {downs} blow-downs, {slides} slides in {t:.1?}"))
}

fn split_unknots(framings: &[i64]) -> Diagram {
    let mut d = Diagram::empty();
    for (k, f) in framings.iter().enumerate() {
        let s = Id::new(format!("S{}", k + 1));
        d.pieces.get_mut(&Id::from("P1")).unwrap().tangle.strands.insert(s.clone(), Strand::closed(vec![]));
        d.circles.insert(Id::new(format!("C{}", k + 1)), GluedCircle::new(vec![StrandRef::new("P1", s)], *f));
    }
    d
}

fn recognizer() -> Outcome {
    let start = Instant::now();
    for f in [1, -1] {
        ensure!(recognize_s3(&split_unknots(&[f]), 1).unwrap().is_yes(), "{f}-unknot at depth 1");
    }
    let mut r = rng(7);
    for k in 1..=4 {
        let signs: Vec<i64> = (0..k).map(|i| if (i + k) % 3 == 0 { -1 } else { 1 }).collect();
        let v = recognize_s3(&split_unknots(&signs), k).unwrap();
        ensure!(v.is_yes(), "{k} split unknots {signs:?} at depth {k}: {}", v.label());
    }
    ensure!(recognize_s3(&split_unknots(&[0]), 3).unwrap().is_no(), "0-framed unknot");
    for case in 0..50 {
        let (d, log) = random_from_empty(&mut r, 3);
        let v = recognize_s3(&d, 3).unwrap();
        let Verdict::Yes(moves) = &v else {
            return Err(format!("case {case} built by {log:?}: {}", v.label()));
        };
        let mut e = d.clone();
        for m in moves {
            e = apply_move(&e, m).map_err(|x| format!("case {case}: replay {m}: {x}"))?;
        }
        ensure!(e.circles.is_empty(), "case {case}: replay leaves circles");
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(30), "took {t:?}");
    Ok(format!("unknots, chains k<=4, 0-unknot, 50 random in {t:.1?}"))
}

fn reduction() -> Outcome {
    let mut r = rng(99);
    for case in 0..50 {
        let d = random_multi_piece(&mut r, 4);
        let (m, log) = merge_all_logged(&d).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(log.len() == d.pieces.len() - 1, "case {case}: {} merges for {} pieces", log.len(), d.pieces.len());
        ensure!(m.pieces.len() == 1, "case {case}: {} pieces left", m.pieces.len());
        let h = homology(&d).unwrap();
        let mut cur = d.clone();
        for (k, mv) in log.iter().enumerate() {
            cur = apply_move(&cur, mv).map_err(|e| format!("case {case} step {k}: {e}"))?;
            ensure!(homology(&cur).unwrap() == h, "case {case}: homology changed at step {k} ({mv})");
        }
        let full = reduce(&d).map_err(|e| format!("case {case}: reduce: {e}"))?;
        ensure!(homology(&full.diagram).unwrap() == h, "case {case}: homology changed by reduce");
    }
    let e = reduce(&standard("s4-with-cancelling-pair").unwrap()).unwrap();
    ensure!(e.diagram == Diagram::empty(), "s4-with-cancelling-pair did not reduce to empty");
    let k = to_kirby(&standard("s1xs3").unwrap()).unwrap();
    let a = k.annotation.ok_or("no annotation")?;
    ensure!((a.one_handles, a.three_handles, a.sinks) == (1, 1, 1), "annotation {a:?}");
    let h1 = &homology(&k).unwrap()[1];
    ensure!(h1.betti == 1 && h1.torsion.is_empty(), "H1 = {h1}");
    Ok("50 multi-piece diagrams, cancelling pair, s1xs3".into())
}

fn equivalence() -> Outcome {
    let mut r = rng(5);
    let opts = EquivOptions::default();
    for case in 0..100 {
        let d = random_link(&mut r, 6, 3);
        let p = perturb(&mut r, &d, 1 + case % 3);
        let e = relabel(&mut r, &p, true);
        let v = isomorphic(&d, &e, &opts).unwrap();
        let Verdict::Yes(w) = &v else {
            return Err(format!("case {case}: {}\n{}", v.label(), serialize(&d)));
        };
        verify_witness(&d, &e, w).map_err(|x| format!("case {case}: witness: {x}"))?;
    }
    let (mut framing, mut congruence) = (0, 0);
    for case in 0..100 {
        let d = random_link(&mut r, 6, 3);
        let mut e = relabel(&mut r, &d, false);
        let c = e.circles.keys().next().unwrap().clone();
        e.circles.get_mut(&c).unwrap().framing += 1;
        ensure!(isomorphic(&d, &e, &opts).unwrap().is_no(), "case {case}: framing change not separated");
        framing += 1;

        // same framings, different linking: compare by the float oracle
        let mut f = random_link(&mut r, 6, 3);
        if f.circles.len() != d.circles.len() {
            continue;
        }
        for (x, y) in f.circles.values_mut().zip(d.circles.values()) {
            x.framing = y.framing;
        }
        let (od, of) = (rank_and_det(&link_rows(&d)), rank_and_det(&link_rows(&f)));
        if od != of {
            congruence += 1;
            let v = isomorphic(&d, &f, &opts).unwrap();
            ensure!(v.is_no(), "case {case}: |det|/rank differ ({od:?} vs {of:?}) but answer {}", v.label());
        }
    }
    ensure!(congruence >= 10, "only {congruence} congruence cases generated");
    Ok(format!("100 yes with verified witnesses, {framing} framing and {congruence} congruence no"))
}

fn conjugacy() -> Outcome {
    let start = Instant::now();
    let swap = standard("swap-diffeo").unwrap();
    let copy = relabel(&mut rng(3), &swap, true);
    let opts = EquivOptions::default();
    let c = conjugate(&swap, &copy, &opts).unwrap();
    let Verdict::Yes(w) = &c.verdict else { return Err(format!("relabeled copy: {}", c.verdict.label())) };
    verify_witness(&swap, &copy, w)?;
    let mut ident = swap.clone();
    ident.internal_maps = Some(msd::diagram::InternalMaps::identity(&ident));
    let n = conjugate(&swap, &ident, &opts).unwrap();
    ensure!(n.verdict.is_no(), "identity maps: {}", n.verdict.label());
    ensure!(n.exhaustive, "enumeration not exhaustive");
    println!("  conjugacy: swap vs identity, {} isomorphisms enumerated exhaustively, none commutes", n.enumerated);
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(5), "took {t:?}");
    Ok(format!("yes on relabeled copy, no on identity ({} enumerated) in {t:.1?}", n.enumerated))
}

fn msd_cli(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_msd")).args(args).output().expect("run msd").status.code().unwrap_or(-1)
}

fn serialization() -> Outcome {
    let mut corpus: Vec<(String, Diagram)> = Vec::new();
    for e in catalog::ENTRIES {
        let name = e.name.replace("(n)", "(3)");
        corpus.push((name.clone(), standard(&name).unwrap()));
    }
    let mut r = rng(77);
    for k in 0..100 {
        let d = if k % 2 == 0 { random_link(&mut r, 8, 4) } else { random_multi_piece(&mut r, 4) };
        corpus.push((format!("random #{k}"), d));
    }
    for (name, d) in &corpus {
        let s = serialize(d);
        let back = parse(&s).map_err(|e| format!("{name}: {e}\n{s}"))?;
        ensure!(&back == d, "{name}: structure changed");
        ensure!(serialize(&back) == s, "{name}: bytes changed");
    }

    let dir = tempfile::tempdir().unwrap();
    let p = |f: &str| dir.path().join(f).to_string_lossy().into_owned();
    let put = |f: &str, d: &Diagram| std::fs::write(Path::new(&p(f)), serialize(d)).unwrap();
    put("cp2.msd", &standard("cp2").unwrap());
    put("zero.msd", &split_unknots(&[0]));
    put("swap.msd", &standard("swap-diffeo").unwrap());
    let mut ident = standard("swap-diffeo").unwrap();
    ident.internal_maps = Some(msd::diagram::InternalMaps::identity(&ident));
    put("ident.msd", &ident);
    let big = random_link(&mut rng(1), 8, 2);
    let mut pr = rng(2);
    let mut bigger = perturb(&mut pr, &big, 4);
    while bigger.pieces[&Id::from("P1")].tangle.crossing_count() <= 6 {
        bigger = perturb(&mut pr, &bigger, 2);
    }
    put("big.msd", &big);
    put("bigger.msd", &bigger);
    let mut swap_big = perturb(&mut pr, &standard("swap-diffeo").unwrap(), 4);
    while swap_big.pieces[&Id::from("P1")].tangle.crossing_count() <= 6 {
        swap_big = perturb(&mut pr, &swap_big, 2);
    }
    put("swapbig.msd", &swap_big);
    let mut broken = standard("cp2").unwrap();
    broken.circles.get_mut(&Id::from("C1")).unwrap().strands.clear();
    put("invalid.msd", &broken);
    std::fs::write(p("garbage.msd"), "msd 1\npiece\n").unwrap();

    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["validate".into(), p("cp2.msd")], 0),
        (vec!["validate".into(), p("invalid.msd")], 1),
        (vec!["validate".into(), p("garbage.msd")], 3),
        (vec!["validate".into(), p("missing.msd")], 3),
        (vec!["invariants".into(), p("cp2.msd")], 0),
        (vec!["invariants".into(), p("invalid.msd")], 1),
        (vec!["reduce".into(), p("cp2.msd"), "-o".into(), p("out.msd"), "--log".into(), p("log.txt")], 0),
        (vec!["reduce".into(), p("invalid.msd"), "-o".into(), p("out2.msd")], 1),
        (vec!["recognize-s3".into(), p("cp2.msd"), "--depth".into(), "1".into()], 0),
        (vec!["recognize-s3".into(), p("zero.msd"), "--depth".into(), "2".into()], 1),
        (vec!["recognize-s3".into(), p("cp2.msd"), "--depth".into(), "0".into()], 2),
        (vec!["equiv".into(), p("swap.msd"), p("ident.msd"), "--budget".into(), "8".into()], 0),
        (vec!["equiv".into(), p("cp2.msd"), p("zero.msd"), "--budget".into(), "8".into()], 1),
        (vec!["equiv".into(), p("big.msd"), p("bigger.msd"), "--budget".into(), "0".into()], 2),
        (vec!["conj".into(), p("swap.msd"), p("swap.msd"), "--budget".into(), "8".into()], 0),
        (vec!["conj".into(), p("swap.msd"), p("ident.msd"), "--budget".into(), "8".into()], 1),
        (vec!["conj".into(), p("swap.msd"), p("swapbig.msd"), "--budget".into(), "0".into()], 2),
        (vec!["catalog".into(), "s2xs2".into(), "-o".into(), p("c.msd")], 0),
        (vec!["catalog".into(), "k3".into(), "-o".into(), p("c.msd")], 3),
        (vec!["render".into(), p("cp2.msd"), "-o".into(), p("cp2.svg")], 0),
        (vec!["render".into(), p("garbage.msd"), "-o".into(), p("g.svg")], 3),
        (vec!["frobnicate".into()], 3),
        (vec!["equiv".into(), p("cp2.msd")], 3),
    ];
    for (args, want) in &cases {
        let a: Vec<&str> = args.iter().map(String::as_str).collect();
        let got = msd_cli(&a);
        ensure!(got == *want, "msd {}: exit {got}, expected {want}", args.join(" "));
    }
    let svg = std::fs::read_to_string(p("cp2.svg")).unwrap();
    ensure!(svg.contains("+1"), "rendered cp2 lacks its framing label");
    ensure!(parse(&std::fs::read_to_string(p("c.msd")).unwrap()).unwrap() == standard("s2xs2").unwrap(), "catalog output");
    Ok(format!("{} diagrams round-trip, {} CLI exit codes", corpus.len(), cases.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("catalog golden suite", catalog_golden),
        ("move invariance", move_invariance),
        ("S^3 recognition", recognizer),
        ("reduction", reduction),
        ("equivalence", equivalence),
        ("conjugacy", conjugacy),
        ("serialization and CLI", serialization),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(run) {
            Ok(Ok(note)) => println!("criterion {} {name}: PASS ({note})", k + 1),
            Ok(Err(why)) => {
                failed += 1;
                println!("criterion {} {name}: FAIL: {why}", k + 1);
            }
            Err(_) => {
                failed += 1;
                println!("criterion {} {name}: FAIL: panicked", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
