//! Kirby-calculus moves on diagrams, spherical surgery, and the bounded
//! 3-sphere recognizer.
//!
//! Framings are declared integers, not blackboard framings: isotopy moves
//! never touch them and the moves here update them by the standard
//! formulas while rewriting crossings so that linking numbers follow.

mod recognize;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use recognize::{canonical_key, recognize_s3, Exhausted, Obstruction, Verdict};

use crate::diagram::{Diagram, GluedCircle, Kind, StrandRef};
use crate::id::{fresh_id, FreshIds, Id};
use crate::invariants::{self, HomologyGroup, LinkingMatrix, Matrix};
use crate::tangle::{Crossing, Role, Sign, Strand, Visit};

/// Budget of Reidemeister moves used to normalise a piece before blow-down.
pub const BLOW_DOWN_BUDGET: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("diagram is invalid: {0}")]
    Invalid(String),
    #[error("unknown {0} {1}")]
    Unknown(&'static str, Id),
    #[error("invalid site: {0}")]
    InvalidSite(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("band crosses a wall: {0}")]
    BandCrossesWall(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("pair {0} joins a piece to itself")]
    PairInternal(Id),
    #[error("piece/pair incidence graph is disconnected")]
    Disconnected,
}

/// A face of a piece's planar code; region 0 is the outer face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowUpSite {
    pub piece: Id,
    pub region: usize,
}

impl BlowUpSite {
    pub fn outer(piece: impl Into<Id>) -> Self {
        BlowUpSite { piece: piece.into(), region: 0 }
    }
}

/// Where the band of a handle slide attaches. Arc `k` of a strand is the
/// stretch just before its `k`-th visit (the end, for `k = len`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Band {
    /// Strand of the sliding circle that carries the band; defaults to the
    /// circle's unique strand in the piece of the target circle.
    pub strand: Option<Id>,
    pub arc: usize,
    pub target_arc: usize,
    /// Band sum with the reversed parallel (handle subtraction).
    pub reversed: bool,
}

impl Band {
    pub fn simple(reversed: bool) -> Self {
        Band { strand: None, arc: 0, target_arc: 0, reversed }
    }

    pub fn sign(&self) -> i64 {
        if self.reversed {
            -1
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KirbyMove {
    BlowUp { site: BlowUpSite, sign: Sign },
    BlowDown { circle: Id },
    HandleSlide { moving: Id, over: Id, band: Band },
    MergePieces { pair: Id },
    DeleteSurface { surface: Id },
}

impl fmt::Display for KirbyMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KirbyMove::BlowUp { site, sign } => write!(f, "blow-up {} region {} {sign}", site.piece, site.region),
            KirbyMove::BlowDown { circle } => write!(f, "blow-down {circle}"),
            KirbyMove::HandleSlide { moving, over, band } => {
                write!(f, "slide {moving} over {over}{}", if band.reversed { " (reversed band)" } else { "" })
            }
            KirbyMove::MergePieces { pair } => write!(f, "merge along {pair}"),
            KirbyMove::DeleteSurface { surface } => write!(f, "delete surface {surface}"),
        }
    }
}

/// Apply one logged move.
pub fn apply_move(d: &Diagram, mv: &KirbyMove) -> Result<Diagram, MoveError> {
    match mv {
        KirbyMove::BlowUp { site, sign } => blow_up(d, site, *sign),
        KirbyMove::BlowDown { circle } => blow_down(d, circle),
        KirbyMove::HandleSlide { moving, over, band } => handle_slide(d, moving, over, band),
        KirbyMove::MergePieces { pair } => crate::reduction::merge_pieces(d, pair),
        KirbyMove::DeleteSurface { surface } => {
            let partner = crate::reduction::cancellation_partner(d, surface)
                .ok_or_else(|| MoveError::Refused(format!("surface {surface} has no cancelling circle")))?;
            crate::reduction::delete_superfluous(d, surface, &partner)
        }
    }
}

pub(crate) fn ensure_valid(d: &Diagram) -> Result<(), MoveError> {
    let r = d.validate();
    if r.ok {
        Ok(())
    } else {
        let msg: Vec<String> = r.errors().map(|f| format!("[{}] {}", f.location, f.message)).collect();
        Err(MoveError::Invalid(msg.join("; ")))
    }
}

fn ensure_vector_field(d: &Diagram) -> Result<(), MoveError> {
    if d.kind() == Kind::Diffeomorphism {
        return Err(MoveError::Precondition("moves are defined on vector-field diagrams".into()));
    }
    Ok(())
}

/// Number of faces of the projection of a piece: one per crossing, plus one,
/// plus one per connected component of strands and walls.
pub fn face_count(d: &Diagram, piece: &Id) -> Option<usize> {
    let p = d.pieces.get(piece)?;
    let strands: Vec<&Id> = p.tangle.strands.keys().collect();
    let walls: Vec<&Id> = p.walls.keys().collect();
    let n = strands.len() + walls.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let join = |a: usize, b: usize, p: &mut Vec<usize>| {
        let (ra, rb) = (find(p, a), find(p, b));
        p[ra] = rb;
    };
    for (_, slots) in p.tangle.visit_index() {
        if let [Some((s1, _)), Some((s2, _))] = slots {
            let i = strands.iter().position(|s| **s == s1).unwrap();
            let j = strands.iter().position(|s| **s == s2).unwrap();
            join(i, j, &mut parent);
        }
    }
    for (i, s) in p.tangle.strands.values().enumerate() {
        for wp in s.from.iter().chain(s.to.iter()) {
            if let Some(k) = walls.iter().position(|w| **w == wp.wall) {
                join(i, strands.len() + k, &mut parent);
            }
        }
    }
    let comps = (0..n).filter(|&x| find(&mut parent, x) == x).count();
    Some(p.tangle.crossing_count() + 1 + comps)
}

/// Add a split unknot with framing `sign·1` in the given face.
pub fn blow_up(d: &Diagram, site: &BlowUpSite, sign: Sign) -> Result<Diagram, MoveError> {
    ensure_vector_field(d)?;
    let faces = face_count(d, &site.piece).ok_or_else(|| MoveError::Unknown("piece", site.piece.clone()))?;
    if site.region >= faces {
        return Err(MoveError::InvalidSite(format!(
            "piece {} has {faces} faces, region {} requested",
            site.piece, site.region
        )));
    }
    let mut out = d.clone();
    let piece = out.pieces.get_mut(&site.piece).unwrap();
    let sid = fresh_id("S", piece.tangle.strands.keys());
    piece.tangle.strands.insert(sid.clone(), Strand::closed(vec![]));
    let cid = fresh_id("C", d.circles.keys());
    out.circles.insert(cid, GluedCircle::new(vec![StrandRef { piece: site.piece.clone(), strand: sid }], sign.value()));
    Ok(out.normalized())
}

/// One strand passing through the spanning disk of the circle being blown down.
struct Passage {
    strand: Id,
    /// Position of the first of the two adjacent visits in the strand's path.
    at: usize,
    orientation: i64,
}

/// Remove a ±1-framed unknot, twisting the strands through its disk.
pub fn blow_down(d: &Diagram, circle: &Id) -> Result<Diagram, MoveError> {
    ensure_vector_field(d)?;
    let c = d.circles.get(circle).ok_or_else(|| MoveError::Unknown("circle", circle.clone()))?;
    let eps = c.framing;
    if eps.abs() != 1 || c.dotted {
        return Err(MoveError::Refused(format!("circle {circle} has framing {eps}, not ±1")));
    }
    if d.surfaces.values().any(|s| s.touches(circle)) {
        return Err(MoveError::Refused(format!("circle {circle} bounds part of a spanning surface")));
    }
    let sref = d
        .local_strand(circle)
        .ok_or_else(|| MoveError::Refused(format!("circle {circle} runs through a 1-handle")))?;

    let lm = invariants::linking_matrix_unchecked(d);
    let ci = lm.circles.iter().position(|x| x == circle).unwrap();

    let mut out = d.clone();
    let pid = sref.piece.clone();
    let (mut t, _) = d.pieces[&pid].tangle.simplify(BLOW_DOWN_BUDGET);
    let cs = sref.strand.clone();
    let path = t.strands[&cs].path.clone();

    let idx = t.visit_index();
    let mut counts: BTreeMap<&Id, usize> = BTreeMap::new();
    for v in &path {
        *counts.entry(&v.crossing).or_insert(0) += 1;
    }
    if counts.values().any(|&n| n > 1) {
        return Err(MoveError::Refused(format!("circle {circle} is not recognisably unknotted")));
    }

    // rotate to one run of over-visits followed by one run of under-visits
    let n = path.len();
    let k = n / 2;
    let path: Vec<Visit> = if n == 0 {
        vec![]
    } else {
        let start = (0..n)
            .find(|&i| path[i].role == Role::Over && path[(i + n - 1) % n].role == Role::Under)
            .unwrap_or(0);
        let mut p = path.clone();
        p.rotate_left(start);
        p
    };
    let one_region = n % 2 == 0
        && path[..k].iter().all(|v| v.role == Role::Over)
        && path[k..].iter().all(|v| v.role == Role::Under);
    if !one_region {
        return Err(MoveError::Refused(format!("foreign crossings of {circle} do not form one twist region")));
    }

    let mut passages = Vec::with_capacity(k);
    let mut dead: BTreeSet<Id> = BTreeSet::new();
    for i in 0..k {
        let x = &path[i].crossing;
        let y = &path[n - 1 - i].crossing;
        let (sx, px) = idx[x][1].clone().unwrap();
        let (sy, py) = idx[y][0].clone().unwrap();
        let (gx, gy) = (t.crossings[x].sign, t.crossings[y].sign);
        let s = &t.strands[&sx];
        let len = s.path.len();
        let adjacent = |a: usize, b: usize| b == a + 1 || (s.is_closed() && len > 1 && a + 1 == len && b == 0);
        if sx != sy || gx != gy || !(adjacent(px, py) || adjacent(py, px)) {
            return Err(MoveError::Refused(format!("foreign crossings of {circle} do not form one twist region")));
        }
        let at = if adjacent(px, py) { px } else { py };
        passages.push(Passage { strand: sx, at, orientation: gx.value() });
        dead.insert(x.clone());
        dead.insert(y.clone());
    }

    // undo wrap-around pairs so every passage occupies (at, at + 1)
    let wrapped: Vec<Id> = passages
        .iter()
        .filter(|p| p.at + 1 == t.strands[&p.strand].path.len() && t.strands[&p.strand].is_closed())
        .map(|p| p.strand.clone())
        .collect();
    for sid in wrapped {
        let s = t.strands.get_mut(&sid).unwrap();
        let len = s.path.len();
        s.path.rotate_left(1);
        for p in passages.iter_mut().filter(|p| p.strand == sid) {
            p.at = (p.at + len - 1) % len;
        }
    }

    // full twist (σ1…σ_{k-1})^k with sign -ε, recorded per passage in braid order
    let mut fresh = FreshIds::new("X", t.crossings.keys());
    let mut seqs: Vec<Vec<Visit>> = vec![Vec::new(); k];
    let mut pos: Vec<usize> = (0..k).collect(); // pos[slot] = passage
    let twist = -eps;
    if k > 1 {
        for _ in 0..k {
            for m in 0..k - 1 {
                let (p, q) = (pos[m], pos[m + 1]);
                let x = fresh.next_id();
                let sign = Sign::of(twist * passages[p].orientation * passages[q].orientation);
                t.crossings.insert(x.clone(), Crossing { sign });
                let (over, under) = if twist > 0 { (p, q) } else { (q, p) };
                seqs[over].push(Visit::new(x.clone(), Role::Over));
                seqs[under].push(Visit::new(x, Role::Under));
                pos.swap(m, m + 1);
            }
        }
    }

    let mut replace: BTreeMap<(Id, usize), Vec<Visit>> = BTreeMap::new();
    for (i, p) in passages.iter().enumerate() {
        let mut seq = seqs[i].clone();
        if p.orientation < 0 {
            seq.reverse();
        }
        replace.insert((p.strand.clone(), p.at), seq);
    }
    let sids: Vec<Id> = t.strands.keys().cloned().collect();
    for sid in sids {
        if sid == cs {
            continue;
        }
        let old = std::mem::take(&mut t.strands.get_mut(&sid).unwrap().path);
        let mut new = Vec::with_capacity(old.len());
        let mut i = 0;
        while i < old.len() {
            if let Some(seq) = replace.get(&(sid.clone(), i)) {
                new.extend(seq.iter().cloned());
                i += 2;
            } else {
                new.push(old[i].clone());
                i += 1;
            }
        }
        t.strands.get_mut(&sid).unwrap().path = new;
    }
    t.strands.remove(&cs);
    for x in &dead {
        t.crossings.remove(x);
    }
    t.normalize();
    out.pieces.get_mut(&pid).unwrap().tangle = t;

    for (j, cid) in lm.circles.iter().enumerate() {
        if j != ci {
            let l = lm.matrix[(j, ci)];
            out.circles.get_mut(cid).unwrap().framing -= eps * l * l;
        }
    }
    out.circles.remove(circle);
    Ok(out.normalized())
}

/// Band-sum `moving` with a framed parallel of `over`.
pub fn handle_slide(d: &Diagram, moving: &Id, over: &Id, band: &Band) -> Result<Diagram, MoveError> {
    ensure_vector_field(d)?;
    if moving == over {
        return Err(MoveError::InvalidSite("a circle cannot slide over itself".into()));
    }
    let c1 = d.circles.get(moving).ok_or_else(|| MoveError::Unknown("circle", moving.clone()))?;
    let c2 = d.circles.get(over).ok_or_else(|| MoveError::Unknown("circle", over.clone()))?;
    if c1.dotted || c2.dotted {
        return Err(MoveError::Precondition("slides involving dotted circles are not supported".into()));
    }
    let target = d
        .local_strand(over)
        .ok_or_else(|| MoveError::BandCrossesWall(format!("circle {over} runs through a 1-handle")))?;
    let pid = target.piece.clone();
    let mine: Vec<&StrandRef> = c1.strands.iter().filter(|s| s.piece == pid).collect();
    let s1 = match &band.strand {
        Some(s) => mine
            .iter()
            .find(|r| &r.strand == s)
            .map(|r| r.strand.clone())
            .ok_or_else(|| MoveError::BandCrossesWall(format!("strand {s} of {moving} is not in piece {pid}")))?,
        None => match mine.as_slice() {
            [one] => one.strand.clone(),
            [] => return Err(MoveError::BandCrossesWall(format!("{moving} has no strand in piece {pid}"))),
            _ => return Err(MoveError::InvalidSite(format!("{moving} has several strands in {pid}; name one"))),
        },
    };
    let t = &d.pieces[&pid].tangle;
    let s2 = target.strand.clone();
    let p1 = &t.strands[&s1];
    let p2 = &t.strands[&s2];
    if band.arc > p1.path.len() || band.target_arc > p2.path.len() {
        return Err(MoveError::InvalidSite("band end outside the strand".into()));
    }

    let lk = invariants::linking_number(d, moving, over).map_err(|e| MoveError::Invalid(e.to_string()))?;
    let w2 = invariants::writhe(d, over).map_err(|e| MoveError::Invalid(e.to_string()))?;
    let rho = band.sign();
    let (f1, f2) = (c1.framing, c2.framing);

    let mut nt = t.clone();
    let mut fresh = FreshIds::new("X", t.crossings.keys());
    let idx = t.visit_index();
    let m = p2.path.len();
    let a = if m == 0 { 0 } else { band.target_arc % m };
    // the parallel starts at arc `a` of the target
    let order: Vec<usize> = (0..m).map(|i| (a + i) % m).collect();
    let mut copy: Vec<Vec<Visit>> = vec![Vec::new(); m]; // visits of the parallel at each position of c2
    let mut after: BTreeMap<(Id, usize), Vec<Visit>> = BTreeMap::new();
    let mut done_self: BTreeSet<Id> = BTreeSet::new();
    let sgn = |s: Sign, f: i64| Sign::of(s.value() * f);

    for &i in &order {
        let v = &p2.path[i];
        let x = &v.crossing;
        let sign = t.crossings[x].sign;
        let slots = &idx[x];
        let (other_strand, other_pos) = match v.role {
            Role::Over => slots[1].clone().unwrap(),
            Role::Under => slots[0].clone().unwrap(),
        };
        if other_strand != s2 {
            let x2 = fresh.next_id();
            nt.crossings.insert(x2.clone(), Crossing { sign: sgn(sign, rho) });
            copy[i].push(Visit::new(x2.clone(), v.role));
            after.entry((other_strand, other_pos)).or_default().push(Visit::new(x2, v.role.other()));
        } else if done_self.insert(x.clone()) {
            let j = other_pos;
            let (ri, rj) = (v.role, p2.path[j].role);
            let (ca, cb, cd) = (fresh.next_id(), fresh.next_id(), fresh.next_id());
            nt.crossings.insert(ca.clone(), Crossing { sign: sgn(sign, rho) });
            nt.crossings.insert(cb.clone(), Crossing { sign: sgn(sign, rho) });
            nt.crossings.insert(cd.clone(), Crossing { sign });
            // parallel at i meets c2 at j (A) then itself at j (D)
            copy[i].push(Visit::new(ca.clone(), ri));
            copy[i].push(Visit::new(cd.clone(), ri));
            // parallel at j meets c2 at i (B) then itself at i (D)
            copy[j].push(Visit::new(cb.clone(), rj));
            copy[j].push(Visit::new(cd, rj));
            after.entry((s2.clone(), i)).or_default().push(Visit::new(cb, ri));
            after.entry((s2.clone(), j)).or_default().push(Visit::new(ca, rj));
        }
    }
    let mut seq: Vec<Visit> = Vec::new();
    // twists at the start of the parallel fix lk(c2, parallel) = f2
    let tw = f2 - w2;
    let mut c2_prefix: Vec<Visit> = Vec::new();
    for _ in 0..tw.abs() {
        let (x, y) = (fresh.next_id(), fresh.next_id());
        let s = Sign::of(tw.signum() * rho);
        nt.crossings.insert(x.clone(), Crossing { sign: s });
        nt.crossings.insert(y.clone(), Crossing { sign: s });
        c2_prefix.push(Visit::new(x.clone(), Role::Over));
        c2_prefix.push(Visit::new(y.clone(), Role::Under));
        seq.push(Visit::new(x, Role::Under));
        seq.push(Visit::new(y, Role::Over));
    }
    for &i in &order {
        seq.extend(copy[i].iter().cloned());
    }
    if band.reversed {
        seq.reverse();
    }

    let rebuild = |sid: &Id, path: &[Visit], splice: Option<(usize, &[Visit])>, prefix: Option<(usize, &[Visit])>| {
        let mut out = Vec::new();
        for (k, v) in path.iter().enumerate() {
            if let Some((at, s)) = splice {
                if at == k {
                    out.extend(s.iter().cloned());
                }
            }
            if let Some((at, s)) = prefix {
                if at == k {
                    out.extend(s.iter().cloned());
                }
            }
            out.push(v.clone());
            if let Some(extra) = after.get(&(sid.clone(), k)) {
                out.extend(extra.iter().cloned());
            }
        }
        if let Some((at, s)) = splice {
            if at == path.len() {
                out.extend(s.iter().cloned());
            }
        }
        if let Some((at, s)) = prefix {
            if at == path.len() || path.is_empty() {
                out.extend(s.iter().cloned());
            }
        }
        out
    };
    let sids: Vec<Id> = t.strands.keys().cloned().collect();
    for sid in &sids {
        let path = &t.strands[sid].path;
        let splice = (sid == &s1).then_some((band.arc, seq.as_slice()));
        let prefix = (sid == &s2).then_some((a, c2_prefix.as_slice()));
        let new = rebuild(sid, path, splice, prefix);
        nt.strands.get_mut(sid).unwrap().path = new;
    }
    nt.normalize();

    let mut out = d.clone();
    out.pieces.get_mut(&pid).unwrap().tangle = nt;
    out.circles.get_mut(moving).unwrap().framing = f1 + f2 + 2 * rho * lk;
    Ok(out.normalized())
}

/// Presentation of the 3-manifold obtained from the glued boundary of the
/// 0- and 1-handles by surgery on every framed circle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryPresentation {
    /// Pairs outside a spanning forest of the piece graph: free generators.
    pub generators: Vec<Id>,
    pub linking: LinkingMatrix,
    /// Signed passage counts of each circle through each generator pair.
    pub passages: Matrix,
    /// Surfaces, which become embedded 2-spheres after surgery.
    pub spheres: Vec<Id>,
}

impl SurgeryPresentation {
    /// Relation matrix `[[L, A], [Aᵀ, 0]]`.
    pub fn relations(&self) -> Matrix {
        let n = self.linking.circles.len();
        let b = self.generators.len();
        let mut m = Matrix::zeros(n + b, n + b);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.linking.matrix[(i, j)];
            }
            for g in 0..b {
                m[(i, n + g)] = self.passages[(i, g)];
                m[(n + g, i)] = self.passages[(i, g)];
            }
        }
        m
    }

    pub fn h1(&self) -> HomologyGroup {
        let r = self.relations();
        let f = invariants::smith::invariant_factors(&r);
        HomologyGroup { betti: r.rows() - f.len(), torsion: f.into_iter().filter(|&x| x > 1).collect() }
    }
}

pub fn spherical_surgery(d: &Diagram) -> SurgeryPresentation {
    let pieces: Vec<&Id> = d.pieces.keys().collect();
    let mut parent: Vec<usize> = (0..pieces.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut generators = Vec::new();
    for (hid, pair) in &d.pairs {
        let a = pieces.iter().position(|p| **p == pair.a.piece).unwrap();
        let b = pieces.iter().position(|p| **p == pair.b.piece).unwrap();
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            generators.push(hid.clone());
        } else {
            parent[ra] = rb;
        }
    }
    let linking = invariants::linking_matrix_unchecked(d);
    let pass = d.passages();
    let mut passages = Matrix::zeros(linking.circles.len(), generators.len());
    for (i, c) in linking.circles.iter().enumerate() {
        for (g, h) in generators.iter().enumerate() {
            passages[(i, g)] = pass.get(&(h.clone(), c.clone())).copied().unwrap_or(0);
        }
    }
    SurgeryPresentation { generators, linking, passages, spheres: d.surfaces.keys().cloned().collect() }
}

#[cfg(test)]
mod tests;
