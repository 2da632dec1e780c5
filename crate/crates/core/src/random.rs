//! Seeded generators: random framed links, connected multi-piece diagrams,
//! diagrams built from the empty one by inverse moves, plus relabeling and
//! Reidemeister perturbation of existing diagrams.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{apply_move, Band, BlowUpSite, KirbyMove};
use crate::diagram::{
    BoundaryItem, Diagram, GluedCircle, Piece, SphereWall, SpherePair, SpanningSurface, StrandRef, WallRef,
};
use crate::equivalence::{apply_isomorphism, Isomorphism};
use crate::id::{FreshIds, Id};
use crate::tangle::{Crossing, ReidemeisterMove, Role, Sign, Strand, Visit, WallPoint};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sign(rng: &mut Rng8) -> Sign {
    if rng.gen() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// A framed link in one piece with at most `max_crossings` crossings and
/// `1..=max_circles` closed circles. Crossings come from clasps between
/// circles (two equal-sign crossings), kinks and bigons. Framings lie in
/// `-3..=3`.
pub fn random_link(rng: &mut Rng8, max_crossings: usize, max_circles: usize) -> Diagram {
    let mut d = Diagram::empty();
    let n = rng.gen_range(1..=max_circles.max(1));
    let p1 = Id::from("P1");
    let piece = d.pieces.get_mut(&p1).unwrap();
    for k in 1..=n {
        piece.tangle.strands.insert(Id::new(format!("S{k}")), Strand::closed(vec![]));
    }
    let target = rng.gen_range(0..=max_crossings);
    let mut ids = FreshIds::new("X", std::iter::empty());
    let strands: Vec<Id> = piece.tangle.strands.keys().cloned().collect();
    let mut guard = 0;
    while piece.tangle.crossing_count() < target && guard < 64 {
        guard += 1;
        let room = target - piece.tangle.crossing_count();
        let t = &mut piece.tangle;
        match rng.gen_range(0..3) {
            0 if n >= 2 && room >= 2 => {
                let pick: Vec<&Id> = strands.choose_multiple(rng, 2).collect();
                let (a, b) = (pick[0].clone(), pick[1].clone());
                let s = sign(rng);
                let (x, y) = (ids.next_id(), ids.next_id());
                t.crossings.insert(x.clone(), Crossing { sign: s });
                t.crossings.insert(y.clone(), Crossing { sign: s });
                let i = rng.gen_range(0..=t.strands[&a].path.len());
                let j = rng.gen_range(0..=t.strands[&b].path.len());
                let pa = &mut t.strands.get_mut(&a).unwrap().path;
                pa.insert(i, Visit::new(y.clone(), Role::Under));
                pa.insert(i, Visit::new(x.clone(), Role::Over));
                let pb = &mut t.strands.get_mut(&b).unwrap().path;
                pb.insert(j, Visit::new(y, Role::Over));
                pb.insert(j, Visit::new(x, Role::Under));
            }
            1 => {
                let s = strands.choose(rng).unwrap().clone();
                let arc = rng.gen_range(0..t.strands[&s].arc_count());
                let mv = ReidemeisterMove::R1Add { strand: s, arc, sign: sign(rng), over_first: rng.gen() };
                *t = t.reidemeister(&mv).expect("arc in range");
                ids = FreshIds::new("X", t.crossings.keys());
            }
            _ if room >= 2 => {
                let a = strands.choose(rng).unwrap().clone();
                let b = strands.choose(rng).unwrap().clone();
                let over_arc = rng.gen_range(0..t.strands[&a].arc_count());
                let under_arc = rng.gen_range(0..t.strands[&b].arc_count());
                let mv = ReidemeisterMove::R2Add { over: a, over_arc, under: b, under_arc, parallel: rng.gen(), sign: sign(rng) };
                if let Ok(nt) = t.reidemeister(&mv) {
                    *t = nt;
                    ids = FreshIds::new("X", t.crossings.keys());
                }
            }
            _ => {}
        }
    }
    for (k, s) in strands.iter().enumerate() {
        let c = GluedCircle::new(vec![StrandRef::new("P1", s.clone())], rng.gen_range(-3..=3));
        d.circles.insert(Id::new(format!("C{}", k + 1)), c);
    }
    d.normalized()
}

/// A connected diagram with `2..=max_pieces` pieces: a spanning tree of
/// pairs, sometimes one extra pair closing a loop (with a sphere surface),
/// local framed unknots, circles threading tree pairs twice, and sometimes
/// a planted cancelling surface on a 0-framed unknot.
pub fn random_multi_piece(rng: &mut Rng8, max_pieces: usize) -> Diagram {
    let n = rng.gen_range(2..=max_pieces.max(2));
    let pid = |k: usize| Id::new(format!("P{k}"));
    let mut d = Diagram::empty();
    for k in 2..=n {
        d.pieces.insert(pid(k), Piece::default());
    }
    let mut next_wall: BTreeMap<Id, usize> = BTreeMap::new();
    let mut wall = |p: &Id| {
        let k = next_wall.entry(p.clone()).or_insert(0);
        *k += 1;
        WallRef { piece: p.clone(), wall: Id::new(format!("W{k}")) }
    };
    let mut circles = 0;
    let mut strands: BTreeMap<Id, usize> = BTreeMap::new();
    let mut add_strand = |d: &mut Diagram, p: &Id, s: Strand| {
        let k = strands.entry(p.clone()).or_insert(0);
        *k += 1;
        let sid = Id::new(format!("S{k}"));
        d.pieces.get_mut(p).unwrap().tangle.strands.insert(sid.clone(), s);
        StrandRef { piece: p.clone(), strand: sid }
    };
    let mut pairs = 0;
    for k in 2..=n {
        let parent = pid(rng.gen_range(1..k));
        let (a, b) = (wall(&parent), wall(&pid(k)));
        let threaded = rng.gen_bool(0.4);
        let points = if threaded { 2 } else { 0 };
        d.pieces.get_mut(&a.piece).unwrap().walls.insert(a.wall.clone(), SphereWall { points });
        d.pieces.get_mut(&b.piece).unwrap().walls.insert(b.wall.clone(), SphereWall { points });
        pairs += 1;
        let (orientation, matching) = if rng.gen() { (Sign::Plus, vec![0, 1]) } else { (Sign::Minus, vec![1, 0]) };
        let matching = if threaded { matching } else { vec![] };
        d.pairs.insert(Id::new(format!("H{pairs}")), SpherePair { a: a.clone(), b: b.clone(), matching: matching.clone(), orientation });
        if threaded {
            let sa = add_strand(
                &mut d,
                &a.piece,
                Strand { path: vec![], from: Some(WallPoint::new(a.wall.clone(), 0)), to: Some(WallPoint::new(a.wall.clone(), 1)) },
            );
            let (q1, q0) = (matching[1], matching[0]);
            let sb = add_strand(
                &mut d,
                &b.piece,
                Strand { path: vec![], from: Some(WallPoint::new(b.wall.clone(), q1)), to: Some(WallPoint::new(b.wall.clone(), q0)) },
            );
            circles += 1;
            d.circles.insert(Id::new(format!("C{circles}")), GluedCircle::new(vec![sa, sb], rng.gen_range(-3..=3)));
        }
    }
    if rng.gen_bool(0.3) {
        let (x, y) = (pid(rng.gen_range(1..=n)), pid(rng.gen_range(1..=n)));
        let (a, b) = (wall(&x), wall(&y));
        d.pieces.get_mut(&x).unwrap().walls.insert(a.wall.clone(), SphereWall { points: 0 });
        d.pieces.get_mut(&y).unwrap().walls.insert(b.wall.clone(), SphereWall { points: 0 });
        pairs += 1;
        d.pairs.insert(Id::new(format!("H{pairs}")), SpherePair { a, b, matching: vec![], orientation: Sign::Plus });
        d.surfaces.insert(Id::new(format!("F{}", d.surfaces.len() + 1)), SpanningSurface { genus: 0, boundary: vec![] });
    }
    for _ in 0..rng.gen_range(0..=2) {
        let p = pid(rng.gen_range(1..=n));
        let s = add_strand(&mut d, &p, Strand::closed(vec![]));
        circles += 1;
        d.circles.insert(Id::new(format!("C{circles}")), GluedCircle::new(vec![s], rng.gen_range(-3..=3)));
    }
    if rng.gen_bool(0.3) {
        let p = pid(rng.gen_range(1..=n));
        let s = add_strand(&mut d, &p, Strand::closed(vec![]));
        circles += 1;
        let c = Id::new(format!("C{circles}"));
        d.circles.insert(c.clone(), GluedCircle::new(vec![s], 0));
        let f = Id::new(format!("F{}", d.surfaces.len() + 1));
        d.surfaces.insert(f, SpanningSurface { genus: 0, boundary: vec![BoundaryItem::FramingParallel { circle: c, sign: Sign::Plus }] });
    }
    d.normalized()
}

/// Up to `max_moves` random blow-ups and handle slides applied to the empty
/// diagram, with the moves that were applied.
pub fn random_from_empty(rng: &mut Rng8, max_moves: usize) -> (Diagram, Vec<KirbyMove>) {
    let mut d = Diagram::empty();
    let mut log = Vec::new();
    let k = rng.gen_range(1..=max_moves.max(1));
    while log.len() < k {
        let circles: Vec<Id> = d.circles.keys().cloned().collect();
        let mv = if circles.len() >= 2 && rng.gen_bool(0.5) {
            let pick: Vec<&Id> = circles.choose_multiple(rng, 2).collect();
            KirbyMove::HandleSlide { moving: pick[0].clone(), over: pick[1].clone(), band: Band::simple(rng.gen()) }
        } else {
            KirbyMove::BlowUp { site: BlowUpSite::outer("P1"), sign: sign(rng) }
        };
        if let Ok(next) = apply_move(&d, &mv) {
            d = next;
            log.push(mv);
        }
    }
    (d, log)
}

/// Apply `count` random R1/R2 insertions to the codes of `d`.
pub fn perturb(rng: &mut Rng8, d: &Diagram, count: usize) -> Diagram {
    let mut out = d.clone();
    let pieces: Vec<Id> = out.pieces.keys().filter(|p| !out.pieces[*p].tangle.strands.is_empty()).cloned().collect();
    if pieces.is_empty() {
        return out;
    }
    for _ in 0..count {
        let p = pieces.choose(rng).unwrap();
        let t = &mut out.pieces.get_mut(p).unwrap().tangle;
        let strands: Vec<Id> = t.strands.keys().cloned().collect();
        let a = strands.choose(rng).unwrap().clone();
        let mv = if rng.gen_bool(0.4) {
            let arc = rng.gen_range(0..t.strands[&a].arc_count());
            ReidemeisterMove::R1Add { strand: a, arc, sign: sign(rng), over_first: rng.gen() }
        } else {
            let b = strands.choose(rng).unwrap().clone();
            let over_arc = rng.gen_range(0..t.strands[&a].arc_count());
            let under_arc = rng.gen_range(0..t.strands[&b].arc_count());
            ReidemeisterMove::R2Add { over: a, over_arc, under: b, under_arc, parallel: rng.gen(), sign: sign(rng) }
        };
        if let Ok(nt) = t.reidemeister(&mv) {
            *t = nt;
        }
    }
    out.normalized()
}

fn shuffled_names(rng: &mut Rng8, prefix: &str, n: usize) -> Vec<Id> {
    let mut v: Vec<Id> = (1..=n).map(|k| Id::new(format!("{prefix}{k}"))).collect();
    v.shuffle(rng);
    v
}

/// Rename every label of `d` by random permutations and, with `twist`, also
/// reverse random circles and swap the sides of random pairs.
pub fn relabel(rng: &mut Rng8, d: &Diagram, twist: bool) -> Diagram {
    let mut iso = Isomorphism::default();
    let pnames = shuffled_names(rng, "P", d.pieces.len());
    for (p, q) in d.pieces.keys().zip(pnames) {
        iso.pieces.insert(p.clone(), q);
    }
    for (p, piece) in &d.pieces {
        let q = iso.pieces[p].clone();
        for (w, name) in piece.walls.keys().zip(shuffled_names(rng, "W", piece.walls.len())) {
            iso.walls.insert(WallRef { piece: p.clone(), wall: w.clone() }, WallRef { piece: q.clone(), wall: name });
        }
        for (s, name) in piece.tangle.strands.keys().zip(shuffled_names(rng, "S", piece.tangle.strands.len())) {
            iso.strands.insert(StrandRef { piece: p.clone(), strand: s.clone() }, StrandRef { piece: q.clone(), strand: name });
        }
        for (x, name) in piece.tangle.crossings.keys().zip(shuffled_names(rng, "X", piece.tangle.crossing_count())) {
            iso.crossings.insert((p.clone(), x.clone()), name);
        }
    }
    // points on walls of a pair carry the same matching in the image, so
    // points stay in place
    for (p, piece) in &d.pieces {
        for (w, sw) in &piece.walls {
            iso.points.insert(WallRef { piece: p.clone(), wall: w.clone() }, (0..sw.points).collect());
        }
    }
    for (h, name) in d.pairs.keys().zip(shuffled_names(rng, "H", d.pairs.len())) {
        iso.pairs.insert(h.clone(), name);
    }
    for (c, name) in d.circles.keys().zip(shuffled_names(rng, "C", d.circles.len())) {
        iso.circles.insert(c.clone(), name);
    }
    for (f, name) in d.surfaces.keys().zip(shuffled_names(rng, "F", d.surfaces.len())) {
        iso.surfaces.insert(f.clone(), name);
    }
    iso.sinks = (0..d.sinks.count).collect();
    if d.sinks.incidence.is_some() {
        iso.sinks.shuffle(rng);
    }
    if twist {
        iso.reversed = d.circles.keys().filter(|_| rng.gen()).cloned().collect();
        iso.swapped = d.pairs.keys().filter(|_| rng.gen()).cloned().collect::<BTreeSet<_>>();
    }
    let mut out = apply_isomorphism(d, &iso).expect("total label maps");
    if let Some(m) = &d.internal_maps {
        let map = |f: &BTreeMap<Id, Id>, g: &BTreeMap<Id, Id>| f.iter().map(|(a, b)| (g[a].clone(), g[b].clone())).collect();
        let mut sinks = vec![0; m.sinks.len()];
        for (k, &v) in m.sinks.iter().enumerate() {
            sinks[iso.sinks[k]] = iso.sinks[v];
        }
        out.internal_maps = Some(crate::diagram::InternalMaps {
            pieces: map(&m.pieces, &iso.pieces),
            pairs: map(&m.pairs, &iso.pairs),
            circles: map(&m.circles, &iso.circles),
            surfaces: map(&m.surfaces, &iso.surfaces),
            sinks,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_links_are_valid() {
        let mut r = rng(1);
        for _ in 0..100 {
            let d = random_link(&mut r, 8, 4);
            assert!(d.validate().ok, "{}\n{}", d.validate(), crate::io::serialize(&d));
            assert!(d.pieces[&Id::from("P1")].tangle.crossing_count() <= 8);
            assert!((1..=4).contains(&d.circles.len()));
        }
    }

    #[test]
    fn multi_piece_diagrams_are_valid_and_connected() {
        let mut r = rng(2);
        for _ in 0..100 {
            let d = random_multi_piece(&mut r, 4);
            assert!(d.validate().ok, "{}\n{}", d.validate(), crate::io::serialize(&d));
            assert!(d.pieces.len() >= 2);
            assert!(crate::reduction::merge_all(&d).is_ok());
        }
    }

    #[test]
    fn seeds_reproduce() {
        assert_eq!(random_link(&mut rng(7), 8, 4), random_link(&mut rng(7), 8, 4));
    }

    #[test]
    fn from_empty_logs_every_move() {
        let mut r = rng(3);
        for _ in 0..30 {
            let (d, log) = random_from_empty(&mut r, 3);
            assert!(!log.is_empty() && log.len() <= 3);
            let mut e = Diagram::empty();
            for m in &log {
                e = apply_move(&e, m).unwrap();
            }
            assert_eq!(e, d);
        }
    }

    #[test]
    fn relabel_keeps_shape() {
        let mut r = rng(4);
        for _ in 0..30 {
            let d = random_multi_piece(&mut r, 3);
            let e = relabel(&mut r, &d, true);
            assert!(e.validate().ok, "{}", e.validate());
            assert_eq!(e.handle_counts(), d.handle_counts());
            assert_eq!(crate::invariants::homology(&e).unwrap(), crate::invariants::homology(&d).unwrap());
        }
    }

    #[test]
    fn perturb_adds_crossings() {
        let mut r = rng(5);
        let d = crate::catalog::standard("s2xs2").unwrap();
        let e = perturb(&mut r, &d, 3);
        assert!(e.validate().ok);
        assert!(e.pieces[&Id::from("P1")].tangle.crossing_count() > 2);
    }
}
