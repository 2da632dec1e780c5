//! Reduction of a diagram to a Kirby diagram: merge pieces along pairs,
//! cancel superfluous surfaces against their circles, then trade the
//! remaining pairs for dotted circles and the surfaces for a 3-handle count.

use std::collections::{BTreeMap, BTreeSet};

use crate::calculus::{KirbyMove, MoveError};
use crate::diagram::{Annotation, BoundaryItem, Diagram, GluedCircle, Kind, Piece, StrandRef, WallRef};
use crate::id::{fresh_id, FreshIds, Id};
use crate::tangle::{Crossing, Role, Sign, Strand, TangleCode, Visit, WallPoint};

/// Result of the full pipeline together with its replayable move log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub diagram: Diagram,
    pub moves: Vec<KirbyMove>,
}

fn precheck(d: &Diagram) -> Result<(), MoveError> {
    crate::calculus::ensure_valid(d)?;
    if d.kind() == Kind::Diffeomorphism {
        return Err(MoveError::Precondition("reduction is defined on vector-field diagrams".into()));
    }
    Ok(())
}

/// Connected sum of the two pieces joined by an external pair.
pub fn merge_pieces(d: &Diagram, pair: &Id) -> Result<Diagram, MoveError> {
    precheck(d)?;
    let h = d.pairs.get(pair).ok_or_else(|| MoveError::Unknown("pair", pair.clone()))?.clone();
    if h.is_internal() {
        return Err(MoveError::PairInternal(pair.clone()));
    }
    let (pa, pb) = (h.a.piece.clone(), h.b.piece.clone());
    let a = &d.pieces[&pa];
    let mut b = d.pieces[&pb].clone();
    let mut out = d.clone();

    if h.orientation == Sign::Minus {
        b.tangle = b.tangle.mirrored();
        for c in out.circles.values_mut() {
            if c.strands.iter().all(|s| s.piece == pb) {
                c.framing = -c.framing;
            }
        }
    }

    // walls of b other than the glued one, renamed away from a's
    let mut wall_ids = FreshIds::new("W", a.walls.keys().chain(b.walls.keys()));
    let mut wall_map: BTreeMap<Id, Id> = BTreeMap::new();
    for w in b.walls.keys() {
        if *w == h.b.wall {
            continue;
        }
        let nw = if a.walls.contains_key(w) { wall_ids.next_id() } else { w.clone() };
        wall_map.insert(w.clone(), nw);
    }
    let mut cross_ids = FreshIds::new("X", a.tangle.crossings.keys().chain(b.tangle.crossings.keys()));
    let mut cross_map: BTreeMap<Id, Id> = BTreeMap::new();
    for x in b.tangle.crossings.keys() {
        let nx = if a.tangle.crossings.contains_key(x) { cross_ids.next_id() } else { x.clone() };
        cross_map.insert(x.clone(), nx);
    }

    let mut merged = Piece { tangle: TangleCode::default(), walls: a.walls.clone() };
    merged.walls.remove(&h.a.wall);
    for (w, nw) in &wall_map {
        merged.walls.insert(nw.clone(), b.walls[w].clone());
    }
    merged.tangle.crossings = a.tangle.crossings.clone();
    for (x, c) in &b.tangle.crossings {
        merged.tangle.crossings.insert(cross_map[x].clone(), c.clone());
    }

    // b's strands in merged coordinates; glued endpoints keep the pair wall id
    let rename = |s: &Strand| -> Strand {
        let ep = |e: &Option<WallPoint>| {
            e.as_ref().map(|wp| {
                if wp.wall == h.b.wall {
                    wp.clone()
                } else {
                    WallPoint { wall: wall_map[&wp.wall].clone(), point: wp.point }
                }
            })
        };
        Strand {
            path: s.path.iter().map(|v| Visit::new(cross_map[&v.crossing].clone(), v.role)).collect(),
            from: ep(&s.from),
            to: ep(&s.to),
        }
    };
    let mut parts: BTreeMap<StrandRef, Strand> = BTreeMap::new();
    for (sid, s) in &a.tangle.strands {
        parts.insert(StrandRef { piece: pa.clone(), strand: sid.clone() }, s.clone());
    }
    for (sid, s) in &b.tangle.strands {
        parts.insert(StrandRef { piece: pb.clone(), strand: sid.clone() }, rename(s));
    }

    let glued = |r: &StrandRef, wp: &WallPoint| -> bool {
        (r.piece == pa && wp.wall == h.a.wall) || (r.piece == pb && wp.wall == h.b.wall)
    };
    // strand starting at the point glued to the end of `r`
    let mut starts: BTreeMap<(Id, WallPoint), StrandRef> = BTreeMap::new();
    for (r, s) in &parts {
        if let Some(f) = &s.from {
            starts.insert((r.piece.clone(), f.clone()), r.clone());
        }
    }
    let inv = h.inverse_matching();
    let next = |r: &StrandRef, s: &Strand| -> Option<StrandRef> {
        let to = s.to.as_ref()?;
        if !glued(r, to) {
            return None;
        }
        let (piece, wp) = if r.piece == pa {
            (pb.clone(), WallPoint { wall: h.b.wall.clone(), point: h.matching[to.point] })
        } else {
            (pa.clone(), WallPoint { wall: h.a.wall.clone(), point: inv[to.point] })
        };
        starts.get(&(piece, wp)).cloned()
    };
    let prev_glued = |r: &StrandRef, s: &Strand| s.from.as_ref().is_some_and(|f| glued(r, f));

    let mut composite: BTreeMap<StrandRef, Id> = BTreeMap::new();
    let mut sid_gen = FreshIds::new("S", std::iter::empty());
    // open chains first (they begin at an unglued endpoint), then cycles
    let order: Vec<StrandRef> = parts
        .iter()
        .filter(|(r, s)| !prev_glued(r, s))
        .map(|(r, _)| r.clone())
        .chain(parts.iter().filter(|(r, s)| prev_glued(r, s)).map(|(r, _)| r.clone()))
        .collect();
    for start in order {
        if composite.contains_key(&start) {
            continue;
        }
        let nid = sid_gen.next_id();
        let first = &parts[&start];
        let mut strand = Strand { path: vec![], from: first.from.clone(), to: None };
        let mut cur = start.clone();
        let closed = loop {
            composite.insert(cur.clone(), nid.clone());
            let s = &parts[&cur];
            strand.path.extend(s.path.iter().cloned());
            match next(&cur, s) {
                Some(n) if n == start => break true,
                Some(n) => cur = n,
                None => {
                    strand.to = s.to.clone();
                    break false;
                }
            }
        };
        if closed {
            strand.from = None;
            strand.to = None;
        }
        merged.tangle.strands.insert(nid, strand);
    }
    merged.tangle.normalize();

    for c in out.circles.values_mut() {
        let mapped: Vec<StrandRef> = c
            .strands
            .iter()
            .map(|r| match composite.get(r) {
                Some(nid) => StrandRef { piece: pa.clone(), strand: nid.clone() },
                None => r.clone(),
            })
            .collect();
        c.strands = dedup_cyclic(mapped);
    }
    out.pieces.remove(&pb);
    out.pieces.insert(pa.clone(), merged);
    out.pairs.remove(pair);
    for p in out.pairs.values_mut() {
        for w in [&mut p.a, &mut p.b] {
            if w.piece == pb {
                *w = WallRef { piece: pa.clone(), wall: wall_map[&w.wall].clone() };
            }
        }
    }
    for s in out.surfaces.values_mut() {
        s.boundary.retain(|b| !matches!(b, BoundaryItem::WallCurve { pair: p, .. } if p == pair));
    }
    Ok(out.normalized())
}

fn dedup_cyclic(v: Vec<StrandRef>) -> Vec<StrandRef> {
    let n = v.len();
    let mut out: Vec<StrandRef> = Vec::with_capacity(n);
    for (i, r) in v.iter().enumerate() {
        let prev = &v[(i + n - 1) % n];
        if n == 1 || r != prev {
            out.push(r.clone());
        }
    }
    if out.is_empty() {
        out.push(v[0].clone());
    }
    out
}

/// Smallest pair joining two distinct pieces.
fn first_external(d: &Diagram) -> Option<Id> {
    d.pairs.iter().find(|(_, p)| !p.is_internal()).map(|(k, _)| k.clone())
}

fn connected(d: &Diagram) -> bool {
    let Some(first) = d.pieces.keys().next() else { return true };
    let mut seen: BTreeSet<&Id> = BTreeSet::from([first]);
    let mut stack = vec![first];
    while let Some(p) = stack.pop() {
        for h in d.pairs.values() {
            for (x, y) in [(&h.a.piece, &h.b.piece), (&h.b.piece, &h.a.piece)] {
                if x == p && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    seen.len() == d.pieces.len()
}

/// Merge along external pairs (smallest id first) until one piece remains.
pub fn merge_all(d: &Diagram) -> Result<Diagram, MoveError> {
    Ok(merge_all_logged(d)?.0)
}

pub fn merge_all_logged(d: &Diagram) -> Result<(Diagram, Vec<KirbyMove>), MoveError> {
    precheck(d)?;
    if !connected(d) {
        return Err(MoveError::Disconnected);
    }
    let mut cur = d.clone();
    let mut log = Vec::new();
    while let Some(h) = first_external(&cur) {
        cur = merge_pieces(&cur, &h)?;
        log.push(KirbyMove::MergePieces { pair: h });
    }
    Ok((cur, log))
}

/// The circle a surface cancels against, if the surface is bounded exactly
/// once by one framing parallel of a circle no other surface touches.
pub fn cancellation_partner(d: &Diagram, surface: &Id) -> Option<Id> {
    let s = d.surfaces.get(surface)?;
    let [BoundaryItem::FramingParallel { circle, .. }] = s.boundary.as_slice() else { return None };
    let c = d.circles.get(circle)?;
    if c.dotted {
        return None;
    }
    let alone = d.surfaces.iter().all(|(k, f)| k == surface || !f.touches(circle));
    alone.then(|| circle.clone())
}

/// First surface (by id) with a cancellation partner.
pub fn find_superfluous_surface(d: &Diagram) -> Option<(Id, Id)> {
    d.surfaces.keys().find_map(|f| cancellation_partner(d, f).map(|c| (f.clone(), c)))
}

/// Cancel a 3-handle against its partner 2-handle.
pub fn delete_superfluous(d: &Diagram, surface: &Id, partner: &Id) -> Result<Diagram, MoveError> {
    precheck(d)?;
    if cancellation_partner(d, surface).as_ref() != Some(partner) {
        return Err(MoveError::Refused(format!("{surface} and {partner} are not a cancelling pair")));
    }
    let mut out = remove_circle(d, partner);
    out.surfaces.remove(surface);
    if let Some(inc) = out.sinks.incidence.as_mut() {
        inc.remove(surface);
    }
    Ok(out.normalized())
}

/// Drop a circle with its strands, crossings and wall points.
fn remove_circle(d: &Diagram, c: &Id) -> Diagram {
    let mut out = d.clone();
    let Some(circle) = out.circles.remove(c) else { return out };
    let mut freed: BTreeMap<WallRef, BTreeSet<usize>> = BTreeMap::new();
    for r in &circle.strands {
        let piece = out.pieces.get_mut(&r.piece).unwrap();
        if let Some(s) = piece.tangle.strands.get(&r.strand) {
            for wp in s.from.iter().chain(s.to.iter()) {
                freed.entry(WallRef { piece: r.piece.clone(), wall: wp.wall.clone() }).or_default().insert(wp.point);
            }
        }
        piece.tangle.remove_strands(&BTreeSet::from([r.strand.clone()]));
    }
    // old point -> new point on each affected wall
    let mut renumber: BTreeMap<WallRef, Vec<Option<usize>>> = BTreeMap::new();
    for (w, gone) in &freed {
        let wall = out.pieces.get_mut(&w.piece).unwrap().walls.get_mut(&w.wall).unwrap();
        let mut k = 0;
        let map: Vec<Option<usize>> = (0..wall.points)
            .map(|p| {
                if gone.contains(&p) {
                    None
                } else {
                    k += 1;
                    Some(k - 1)
                }
            })
            .collect();
        wall.points = k;
        renumber.insert(w.clone(), map);
    }
    for (pid, piece) in out.pieces.iter_mut() {
        for s in piece.tangle.strands.values_mut() {
            for wp in s.from.iter_mut().chain(s.to.iter_mut()) {
                if let Some(map) = renumber.get(&WallRef { piece: pid.clone(), wall: wp.wall.clone() }) {
                    wp.point = map[wp.point].unwrap();
                }
            }
        }
    }
    for p in out.pairs.values_mut() {
        let (ma, mb) = (renumber.get(&p.a), renumber.get(&p.b));
        if ma.is_none() && mb.is_none() {
            continue;
        }
        let new: Vec<usize> = p
            .matching
            .iter()
            .enumerate()
            .filter(|&(i, _)| ma.is_none_or(|m| m[i].is_some()))
            .map(|(_, &j)| mb.map_or(j, |m| m[j].unwrap()))
            .collect();
        p.matching = new;
    }
    out
}

/// Replace the pairs of a single-piece admissible diagram by dotted circles
/// and drop its surfaces, recording the trade in the annotation.
pub fn to_kirby(d: &Diagram) -> Result<Diagram, MoveError> {
    precheck(d)?;
    if d.pieces.len() != 1 {
        return Err(MoveError::Precondition("to_kirby needs a single-piece diagram".into()));
    }
    let adm = d.check_admissible();
    if !adm.ok {
        return Err(MoveError::Precondition(format!("diagram is not admissible: {adm}")));
    }
    if d.pairs.is_empty() && d.surfaces.is_empty() {
        return Ok(d.clone());
    }
    let pid = d.pieces.keys().next().unwrap().clone();
    let mut out = d.clone();
    let pairs: Vec<Id> = d.pairs.keys().cloned().collect();
    for h in &pairs {
        out = splice_pair(&out, &pid, h);
    }
    let prev = d.annotation.unwrap_or_default();
    out.annotation = Some(Annotation {
        one_handles: prev.one_handles + pairs.len(),
        three_handles: prev.three_handles + d.surfaces.len(),
        sinks: d.sinks.count,
    });
    out.surfaces.clear();
    out.sinks.incidence = None;
    Ok(out.normalized())
}

/// Close up the strands through an internal pair and encircle them with a
/// dotted unknot.
fn splice_pair(d: &Diagram, pid: &Id, pair: &Id) -> Diagram {
    let mut out = d.clone();
    let h = out.pairs.remove(pair).unwrap();
    let piece = out.pieces.get_mut(pid).unwrap();
    let t = &mut piece.tangle;
    let k = piece.walls[&h.a.wall].points;
    let mut ids = FreshIds::new("X", t.crossings.keys());
    let xs: Vec<Id> = (0..k).map(|_| ids.next_id()).collect();
    let ys: Vec<Id> = (0..k).map(|_| ids.next_id()).collect();

    let at = |t: &TangleCode, end: bool, wp: &WallPoint| -> Option<Id> {
        t.strands
            .iter()
            .find(|(_, s)| if end { s.to.as_ref() == Some(wp) } else { s.from.as_ref() == Some(wp) })
            .map(|(k, _)| k.clone())
    };
    // each glued point: append the clasp to the strand ending there
    for p in 0..k {
        let wa = WallPoint { wall: h.a.wall.clone(), point: p };
        let wb = WallPoint { wall: h.b.wall.clone(), point: h.matching[p] };
        let (ending, visits, sign) = if let Some(s) = at(t, true, &wa) {
            (s, [Visit::new(xs[p].clone(), Role::Under), Visit::new(ys[p].clone(), Role::Over)], Sign::Plus)
        } else {
            let s = at(t, true, &wb).expect("glued point without strand");
            (s, [Visit::new(ys[p].clone(), Role::Over), Visit::new(xs[p].clone(), Role::Under)], Sign::Minus)
        };
        t.crossings.insert(xs[p].clone(), Crossing { sign });
        t.crossings.insert(ys[p].clone(), Crossing { sign });
        t.strands.get_mut(&ending).unwrap().path.extend(visits);
    }
    // splice across the pair
    let mut joined: BTreeMap<Id, Id> = BTreeMap::new();
    while let Some((sid, to)) = t.strands.iter().find_map(|(k, s)| {
        let to = s.to.as_ref()?;
        (to.wall == h.a.wall || to.wall == h.b.wall).then(|| (k.clone(), to.clone()))
    }) {
        let partner = if to.wall == h.a.wall {
            WallPoint { wall: h.b.wall.clone(), point: h.matching[to.point] }
        } else {
            WallPoint { wall: h.a.wall.clone(), point: h.inverse_matching()[to.point] }
        };
        let nid = at(t, false, &partner).expect("glued point without strand");
        if nid == sid {
            let s = t.strands.get_mut(&sid).unwrap();
            s.from = None;
            s.to = None;
        } else {
            let n = t.strands.remove(&nid).unwrap();
            let s = t.strands.get_mut(&sid).unwrap();
            s.path.extend(n.path);
            s.to = n.to;
            joined.insert(nid, sid.clone());
        }
    }
    let dot = fresh_id("S", t.strands.keys());
    let mut path: Vec<Visit> = xs.iter().map(|x| Visit::new(x.clone(), Role::Over)).collect();
    path.extend(ys.iter().rev().map(|y| Visit::new(y.clone(), Role::Under)));
    t.strands.insert(dot.clone(), Strand::closed(path));
    piece.walls.remove(&h.a.wall);
    piece.walls.remove(&h.b.wall);

    let resolve = |mut s: Id| {
        while let Some(n) = joined.get(&s) {
            s = n.clone();
        }
        s
    };
    for c in out.circles.values_mut() {
        let mapped: Vec<StrandRef> =
            c.strands.iter().map(|r| StrandRef { piece: r.piece.clone(), strand: resolve(r.strand.clone()) }).collect();
        c.strands = dedup_cyclic(mapped);
    }
    let cid = fresh_id("D", out.circles.keys());
    out.circles.insert(cid, GluedCircle { strands: vec![StrandRef { piece: pid.clone(), strand: dot }], framing: 0, dotted: true });
    for s in out.surfaces.values_mut() {
        s.boundary.retain(|b| !matches!(b, BoundaryItem::WallCurve { pair: p, .. } if p == pair));
    }
    out
}

/// Full pipeline: merge, cancel, convert.
pub fn reduce(d: &Diagram) -> Result<Reduction, MoveError> {
    let (mut cur, mut moves) = merge_all_logged(d)?;
    while let Some((f, c)) = find_superfluous_surface(&cur) {
        cur = delete_superfluous(&cur, &f, &c)?;
        moves.push(KirbyMove::DeleteSurface { surface: f });
    }
    Ok(Reduction { diagram: to_kirby(&cur)?, moves })
}
