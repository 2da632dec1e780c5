//! Replaying, composing and checking isomorphism witnesses.

use std::collections::BTreeMap;

use super::Isomorphism;
use crate::diagram::{BoundaryItem, Diagram, GluedCircle, Piece, SphereWall, SpherePair, SpanningSurface, StrandRef, WallRef};
use crate::id::Id;
use crate::tangle::{Crossing, ReidemeisterMove, Strand, TangleCode, Visit, WallPoint};

/// Apply a logged Reidemeister sequence piece by piece.
pub fn replay(d: &Diagram, moves: &[(Id, ReidemeisterMove)]) -> Result<Diagram, String> {
    let mut out = d.clone();
    for (p, m) in moves {
        let piece = out.pieces.get_mut(p).ok_or_else(|| format!("move names unknown piece {p}"))?;
        piece.tangle = piece.tangle.reidemeister(m).map_err(|e| format!("{} in {p}: {e}", m.tag()))?;
    }
    Ok(out.normalized())
}

fn get<'m, K: Ord + std::fmt::Debug, V>(m: &'m BTreeMap<K, V>, k: &K, what: &str) -> Result<&'m V, String> {
    m.get(k).ok_or_else(|| format!("witness has no image for {what} {k:?}"))
}

/// Image of `d` (already in simplified form) under the label maps of `iso`.
/// Internal maps are dropped.
pub fn apply_isomorphism(d: &Diagram, iso: &Isomorphism) -> Result<Diagram, String> {
    let mut src = d.clone();
    src.internal_maps = None;
    for c in &iso.reversed {
        if !src.circles.contains_key(c) {
            return Err(format!("witness reverses unknown circle {c}"));
        }
        src.reverse_circle(c);
    }
    if iso.mirror {
        for p in src.pieces.values_mut() {
            p.tangle = p.tangle.mirrored();
        }
        for c in src.circles.values_mut() {
            c.framing = -c.framing;
        }
    }
    let point = |w: &WallRef, p: usize| -> Result<usize, String> {
        get(&iso.points, w, "wall")?.get(p).copied().ok_or_else(|| format!("witness has no image for point {w}:{p}"))
    };

    let mut pieces = BTreeMap::new();
    for (pid, piece) in &src.pieces {
        let pb = get(&iso.pieces, pid, "piece")?.clone();
        let mut walls = BTreeMap::new();
        for (w, sw) in &piece.walls {
            let wb = get(&iso.walls, &WallRef { piece: pid.clone(), wall: w.clone() }, "wall")?;
            walls.insert(wb.wall.clone(), SphereWall { points: sw.points });
        }
        let mut t = TangleCode::default();
        for (x, c) in &piece.tangle.crossings {
            t.crossings.insert(get(&iso.crossings, &(pid.clone(), x.clone()), "crossing")?.clone(), Crossing { sign: c.sign });
        }
        let end = |e: &Option<WallPoint>| -> Result<Option<WallPoint>, String> {
            let Some(e) = e else { return Ok(None) };
            let w = WallRef { piece: pid.clone(), wall: e.wall.clone() };
            Ok(Some(WallPoint { wall: get(&iso.walls, &w, "wall")?.wall.clone(), point: point(&w, e.point)? }))
        };
        for (s, strand) in &piece.tangle.strands {
            let sb = get(&iso.strands, &StrandRef { piece: pid.clone(), strand: s.clone() }, "strand")?;
            let path = strand
                .path
                .iter()
                .map(|v| Ok(Visit::new(get(&iso.crossings, &(pid.clone(), v.crossing.clone()), "crossing")?.clone(), v.role)))
                .collect::<Result<Vec<_>, String>>()?;
            t.strands.insert(sb.strand.clone(), Strand { path, from: end(&strand.from)?, to: end(&strand.to)? });
        }
        pieces.insert(pb, Piece { tangle: t, walls });
    }

    let mut pairs = BTreeMap::new();
    for (h, pair) in &src.pairs {
        let hb = get(&iso.pairs, h, "pair")?.clone();
        let (wa, wb) = (get(&iso.walls, &pair.a, "wall")?.clone(), get(&iso.walls, &pair.b, "wall")?.clone());
        let mut matching = vec![0; pair.matching.len()];
        let swapped = iso.swapped.contains(h);
        for (p, &q) in pair.matching.iter().enumerate() {
            let (ip, iq) = (point(&pair.a, p)?, point(&pair.b, q)?);
            let (from, to) = if swapped { (iq, ip) } else { (ip, iq) };
            *matching.get_mut(from).ok_or("point image out of range")? = to;
        }
        let (a, b) = if swapped { (wb, wa) } else { (wa, wb) };
        pairs.insert(hb, SpherePair { a, b, matching, orientation: pair.orientation });
    }

    let mut circles = BTreeMap::new();
    for (c, circle) in &src.circles {
        let strands = circle.strands.iter().map(|s| get(&iso.strands, s, "strand").cloned()).collect::<Result<Vec<_>, _>>()?;
        circles.insert(
            get(&iso.circles, c, "circle")?.clone(),
            GluedCircle { strands, framing: circle.framing, dotted: circle.dotted },
        );
    }

    let mut surfaces = BTreeMap::new();
    for (f, surf) in &src.surfaces {
        let mut boundary = Vec::new();
        for item in &surf.boundary {
            boundary.push(match item {
                BoundaryItem::FramingParallel { circle, sign } => {
                    BoundaryItem::FramingParallel { circle: get(&iso.circles, circle, "circle")?.clone(), sign: *sign }
                }
                BoundaryItem::WallCurve { pair, index } => {
                    BoundaryItem::WallCurve { pair: get(&iso.pairs, pair, "pair")?.clone(), index: *index }
                }
            });
        }
        surfaces.insert(get(&iso.surfaces, f, "surface")?.clone(), SpanningSurface { genus: surf.genus, boundary });
    }

    let mut sinks = src.sinks.clone();
    if iso.sinks.len() != sinks.count {
        return Err(format!("witness maps {} sinks, diagram has {}", iso.sinks.len(), sinks.count));
    }
    if let Some(inc) = &src.sinks.incidence {
        let mut out = BTreeMap::new();
        for (f, row) in inc {
            let mut r = vec![0; row.len()];
            for (k, &v) in row.iter().enumerate() {
                *r.get_mut(iso.sinks[k]).ok_or("sink image out of range")? = v;
            }
            out.insert(get(&iso.surfaces, f, "surface")?.clone(), r);
        }
        sinks.incidence = Some(out);
    }

    Ok(Diagram { pieces, pairs, circles, surfaces, sinks, internal_maps: None, annotation: src.annotation }.normalized())
}

/// Replay both move logs and check that the label maps carry the first
/// diagram exactly onto the second. Internal maps are not compared.
pub fn verify_witness(d1: &Diagram, d2: &Diagram, iso: &Isomorphism) -> Result<(), String> {
    let a = replay(d1, &iso.moves[0])?;
    let mut b = replay(d2, &iso.moves[1])?;
    b.internal_maps = None;
    let img = apply_isomorphism(&a, iso)?;
    if img == b {
        Ok(())
    } else {
        Err("image of the first diagram differs from the second".into())
    }
}

fn xor_set(a: &std::collections::BTreeSet<Id>, b: &std::collections::BTreeSet<Id>) -> std::collections::BTreeSet<Id> {
    a.symmetric_difference(b).cloned().collect()
}

fn then<K: Ord + Clone + std::fmt::Debug>(f: &BTreeMap<K, K>, g: &BTreeMap<K, K>, what: &str) -> Result<BTreeMap<K, K>, String> {
    f.iter().map(|(k, v)| Ok((k.clone(), get(g, v, what)?.clone()))).collect()
}

/// `psi ∘ phi` for `phi: d1 -> d2` and `psi: d2 -> d3`. Both must simplify
/// `d2` with the same moves.
pub fn compose(phi: &Isomorphism, psi: &Isomorphism) -> Result<Isomorphism, String> {
    if phi.moves[1] != psi.moves[0] {
        return Err("the two witnesses bring the middle diagram to different forms".into());
    }
    let pull = |set: &std::collections::BTreeSet<Id>, map: &BTreeMap<Id, Id>| {
        map.iter().filter(|(_, v)| set.contains(*v)).map(|(k, _)| k.clone()).collect()
    };
    let mut points = BTreeMap::new();
    for (w, img) in &phi.points {
        let w2 = get(&phi.walls, w, "wall")?;
        let img2 = get(&psi.points, w2, "wall")?;
        let v = img.iter().map(|&p| img2.get(p).copied().ok_or("point image out of range")).collect::<Result<Vec<_>, _>>()?;
        points.insert(w.clone(), v);
    }
    let mut crossings = BTreeMap::new();
    for ((p, x), y) in &phi.crossings {
        let p2 = get(&phi.pieces, p, "piece")?.clone();
        crossings.insert((p.clone(), x.clone()), get(&psi.crossings, &(p2, y.clone()), "crossing")?.clone());
    }
    let sinks = phi.sinks.iter().map(|&k| psi.sinks.get(k).copied().ok_or("sink image out of range")).collect::<Result<Vec<_>, _>>()?;
    Ok(Isomorphism {
        mirror: phi.mirror ^ psi.mirror,
        moves: [phi.moves[0].clone(), psi.moves[1].clone()],
        pieces: then(&phi.pieces, &psi.pieces, "piece")?,
        walls: then(&phi.walls, &psi.walls, "wall")?,
        points,
        pairs: then(&phi.pairs, &psi.pairs, "pair")?,
        swapped: xor_set(&phi.swapped, &pull(&psi.swapped, &phi.pairs)),
        strands: then(&phi.strands, &psi.strands, "strand")?,
        crossings,
        circles: then(&phi.circles, &psi.circles, "circle")?,
        reversed: xor_set(&phi.reversed, &pull(&psi.reversed, &phi.circles)),
        surfaces: then(&phi.surfaces, &psi.surfaces, "surface")?,
        sinks,
    })
}
