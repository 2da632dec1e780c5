//! Backtracking search for label bijections between two diagrams whose
//! codes are already simplified. Circles are matched first (walking the
//! oriented strand sequences in parallel binds strands, crossings, walls
//! and points), then pairs, bare pieces, surfaces and sinks.

use std::collections::{BTreeMap, BTreeSet};

use super::Isomorphism;
use crate::diagram::{BoundaryItem, Diagram, StrandRef, WallRef};
use crate::id::Id;
use crate::tangle::{Visit, WallPoint};

#[derive(Clone, Debug)]
struct Bij<K, V> {
    fwd: BTreeMap<K, V>,
    used: BTreeSet<V>,
}

impl<K, V> Default for Bij<K, V> {
    fn default() -> Self {
        Bij { fwd: BTreeMap::new(), used: BTreeSet::new() }
    }
}

impl<K: Ord + Clone, V: Ord + Clone> Bij<K, V> {
    fn bind(&mut self, k: &K, v: &V) -> bool {
        match self.fwd.get(k) {
            Some(x) => x == v,
            None if self.used.contains(v) => false,
            None => {
                self.fwd.insert(k.clone(), v.clone());
                self.used.insert(v.clone());
                true
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
struct State {
    pieces: Bij<Id, Id>,
    walls: Bij<WallRef, WallRef>,
    points: Bij<(WallRef, usize), (WallRef, usize)>,
    strands: Bij<StrandRef, StrandRef>,
    crossings: Bij<(Id, Id), (Id, Id)>,
    circles: Bij<Id, Id>,
    reversed: BTreeSet<Id>,
    pairs: Bij<Id, Id>,
    swapped: BTreeSet<Id>,
    surfaces: Bij<Id, Id>,
    sinks: Vec<usize>,
}

struct Oriented {
    r: StrandRef,
    path: Vec<Visit>,
    from: Option<WallPoint>,
    to: Option<WallPoint>,
}

fn oriented(d: &Diagram, c: &Id, reversed: bool) -> Vec<Oriented> {
    let mut out: Vec<Oriented> = d.circles[c]
        .strands
        .iter()
        .map(|r| {
            let s = &d.pieces[&r.piece].tangle.strands[&r.strand];
            Oriented { r: r.clone(), path: s.path.clone(), from: s.from.clone(), to: s.to.clone() }
        })
        .collect();
    if reversed {
        out.reverse();
        for s in &mut out {
            s.path.reverse();
            std::mem::swap(&mut s.from, &mut s.to);
        }
    }
    out
}

/// Crossing `(piece, x)` -> circles of its over and under visits.
fn owners(d: &Diagram) -> BTreeMap<(Id, Id), (Id, Id)> {
    let own = d.strand_owner();
    let mut m = BTreeMap::new();
    for (pid, piece) in &d.pieces {
        for (x, slots) in piece.tangle.visit_index() {
            if let [Some((so, _)), Some((su, _))] = slots {
                let o = own.get(&StrandRef { piece: pid.clone(), strand: so });
                let u = own.get(&StrandRef { piece: pid.clone(), strand: su });
                if let (Some(o), Some(u)) = (o, u) {
                    m.insert((pid.clone(), x), (o.clone(), u.clone()));
                }
            }
        }
    }
    m
}

fn wall_points(d: &Diagram, w: &WallRef) -> Option<usize> {
    d.pieces.get(&w.piece)?.walls.get(&w.wall).map(|w| w.points)
}

pub(super) struct Search<'a> {
    a: &'a Diagram,
    b: &'a Diagram,
    mirror: bool,
    owners: BTreeMap<(Id, Id), (Id, Id)>,
    circles: Vec<Id>,
    pairs: Vec<Id>,
    surfaces: Vec<Id>,
    limit: usize,
    collect_all: bool,
    cap: usize,
    pub nodes: usize,
    pub exhausted: bool,
    pub found: Vec<Isomorphism>,
}

impl<'a> Search<'a> {
    pub fn new(a: &'a Diagram, b: &'a Diagram, mirror: bool, limit: usize) -> Self {
        Search {
            a,
            b,
            mirror,
            owners: owners(a),
            circles: a.circles.keys().cloned().collect(),
            pairs: a.pairs.keys().cloned().collect(),
            surfaces: a.surfaces.keys().cloned().collect(),
            limit,
            collect_all: false,
            cap: usize::MAX,
            nodes: 0,
            exhausted: false,
            found: Vec::new(),
        }
    }

    /// Enumerate every isomorphism instead of stopping at the first; at
    /// most `cap` are kept (hitting the cap counts as exhaustion).
    pub fn collect_all(mut self, cap: usize) -> Self {
        self.collect_all = true;
        self.cap = cap;
        self
    }

    pub fn run(&mut self) {
        if !self.sizes_agree() {
            return;
        }
        self.circle_step(0, State::default());
    }

    fn sizes_agree(&self) -> bool {
        let size = |d: &Diagram| {
            let mut n = [0usize; 3];
            for p in d.pieces.values() {
                n[0] += p.walls.len();
                n[1] += p.tangle.strands.len();
                n[2] += p.tangle.crossing_count();
            }
            (n, d.handle_counts())
        };
        size(self.a) == size(self.b)
    }

    fn stop(&self) -> bool {
        self.exhausted || if self.collect_all { self.found.len() >= self.cap } else { !self.found.is_empty() }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.exhausted = true;
        }
        !self.exhausted
    }

    fn bind_wall(&self, st: &mut State, wa: &WallRef, wb: &WallRef) -> bool {
        wall_points(self.a, wa).is_some()
            && wall_points(self.a, wa) == wall_points(self.b, wb)
            && st.pieces.bind(&wa.piece, &wb.piece)
            && st.walls.bind(wa, wb)
    }

    fn bind_end(&self, st: &mut State, pa: &Id, ea: &Option<WallPoint>, pb: &Id, eb: &Option<WallPoint>) -> bool {
        match (ea, eb) {
            (None, None) => true,
            (Some(x), Some(y)) => {
                let wa = WallRef { piece: pa.clone(), wall: x.wall.clone() };
                let wb = WallRef { piece: pb.clone(), wall: y.wall.clone() };
                self.bind_wall(st, &wa, &wb) && st.points.bind(&(wa, x.point), &(wb, y.point))
            }
            _ => false,
        }
    }

    fn bind_strand(&self, st: &mut State, sa: &Oriented, path_a: &[Visit], sb: &Oriented) -> bool {
        if path_a.len() != sb.path.len() || !st.pieces.bind(&sa.r.piece, &sb.r.piece) || !st.strands.bind(&sa.r, &sb.r) {
            return false;
        }
        for (va, vb) in path_a.iter().zip(&sb.path) {
            if (va.role == vb.role) == self.mirror {
                return false;
            }
            let ka = (sa.r.piece.clone(), va.crossing.clone());
            let kb = (sb.r.piece.clone(), vb.crossing.clone());
            if !st.crossings.bind(&ka, &kb) {
                return false;
            }
        }
        self.bind_end(st, &sa.r.piece, &sa.from, &sb.r.piece, &sb.from)
            && self.bind_end(st, &sa.r.piece, &sa.to, &sb.r.piece, &sb.to)
    }

    /// Signs of crossings on `c` whose two circles are both placed.
    fn signs_agree(&self, st: &State, strands: &[Oriented]) -> bool {
        let o = |c: &Id| if st.reversed.contains(c) { -1 } else { 1 };
        for s in strands {
            for v in &s.path {
                let ka = (s.r.piece.clone(), v.crossing.clone());
                let Some((co, cu)) = self.owners.get(&ka) else { return false };
                if !st.circles.fwd.contains_key(co) || !st.circles.fwd.contains_key(cu) {
                    continue;
                }
                let Some(kb) = st.crossings.fwd.get(&ka) else { return false };
                let mut f = if co != cu { o(co) * o(cu) } else { 1 };
                if self.mirror {
                    f = -f;
                }
                let sa = self.a.pieces[&ka.0].tangle.crossings[&ka.1].sign.value();
                let sb = self.b.pieces[&kb.0].tangle.crossings[&kb.1].sign.value();
                if sb != sa * f {
                    return false;
                }
            }
        }
        true
    }

    fn circle_step(&mut self, k: usize, st: State) {
        if k == self.circles.len() {
            return self.pair_step(0, st);
        }
        let ca = self.circles[k].clone();
        let (a, b) = (self.a, self.b);
        let circle_a = &a.circles[&ca];
        let want = if self.mirror { -circle_a.framing } else { circle_a.framing };
        for (cb, circle_b) in &b.circles {
            if st.circles.used.contains(cb) || circle_b.framing != want || circle_b.dotted != circle_a.dotted {
                continue;
            }
            if circle_b.strands.len() != circle_a.strands.len() {
                continue;
            }
            let sb = oriented(b, cb, false);
            for rev in [false, true] {
                let sa = oriented(a, &ca, rev);
                let n = sa.len();
                let single_closed = n == 1 && sa[0].from.is_none();
                let choices = if single_closed { sa[0].path.len().max(1) } else { n };
                for shift in 0..choices {
                    if !self.tick() {
                        return;
                    }
                    let mut s = st.clone();
                    let ok = if single_closed {
                        let mut p = sa[0].path.clone();
                        if !p.is_empty() {
                            p.rotate_left(shift);
                        }
                        self.bind_strand(&mut s, &sa[0], &p, &sb[0])
                    } else {
                        (0..n).all(|i| {
                            let x = &sa[(i + shift) % n];
                            self.bind_strand(&mut s, x, &x.path, &sb[i])
                        })
                    };
                    if !ok || !s.circles.bind(&ca, cb) {
                        continue;
                    }
                    if rev {
                        s.reversed.insert(ca.clone());
                    }
                    if !self.signs_agree(&s, &sa) {
                        continue;
                    }
                    self.circle_step(k + 1, s);
                    if self.stop() {
                        return;
                    }
                }
            }
        }
    }

    fn point(st: &State, w: &WallRef, p: usize) -> Option<usize> {
        st.points.fwd.get(&(w.clone(), p)).map(|(_, q)| *q)
    }

    fn pair_step(&mut self, k: usize, st: State) {
        if k == self.pairs.len() {
            return self.piece_step(st);
        }
        let ha = self.pairs[k].clone();
        let pa = &self.a.pairs[&ha];
        for (hb, pb) in &self.b.pairs {
            if st.pairs.used.contains(hb) || pb.orientation != pa.orientation {
                continue;
            }
            for swap in [false, true] {
                if !self.tick() {
                    return;
                }
                let (ta, tb) = if swap { (&pb.b, &pb.a) } else { (&pb.a, &pb.b) };
                let mut s = st.clone();
                if !self.bind_wall(&mut s, &pa.a, ta) || !self.bind_wall(&mut s, &pa.b, tb) || !s.pairs.bind(&ha, hb) {
                    continue;
                }
                let commutes = pa.matching.iter().enumerate().all(|(p, &q)| {
                    let (Some(ia), Some(ib)) = (Self::point(&s, &pa.a, p), Self::point(&s, &pa.b, q)) else {
                        return false;
                    };
                    if swap {
                        pb.matching.get(ib) == Some(&ia)
                    } else {
                        pb.matching.get(ia) == Some(&ib)
                    }
                });
                if !commutes {
                    continue;
                }
                if swap {
                    s.swapped.insert(ha.clone());
                }
                self.pair_step(k + 1, s);
                if self.stop() {
                    return;
                }
            }
        }
    }

    /// Pieces still unplaced carry nothing: any bijection among them works.
    fn piece_step(&mut self, st: State) {
        let rest_a: Vec<Id> = self.a.pieces.keys().filter(|p| !st.pieces.fwd.contains_key(*p)).cloned().collect();
        let Some(pa) = rest_a.first() else {
            return self.surface_step(0, st);
        };
        for pb in self.b.pieces.keys() {
            if st.pieces.used.contains(pb) {
                continue;
            }
            let bare = |d: &Diagram, p: &Id| d.pieces[p].walls.is_empty() && d.pieces[p].tangle.strands.is_empty();
            if !bare(self.a, pa) || !bare(self.b, pb) || !self.tick() {
                continue;
            }
            let mut s = st.clone();
            s.pieces.bind(pa, pb);
            self.piece_step(s);
            if self.stop() {
                return;
            }
        }
    }

    fn image_boundary(&self, st: &State, f: &Id) -> Option<Vec<BoundaryItem>> {
        let mut out = Vec::new();
        for item in &self.a.surfaces[f].boundary {
            out.push(match item {
                BoundaryItem::FramingParallel { circle, sign } => BoundaryItem::FramingParallel {
                    circle: st.circles.fwd.get(circle)?.clone(),
                    sign: if st.reversed.contains(circle) { sign.flip() } else { *sign },
                },
                BoundaryItem::WallCurve { pair, index } => {
                    BoundaryItem::WallCurve { pair: st.pairs.fwd.get(pair)?.clone(), index: *index }
                }
            });
        }
        out.sort();
        Some(out)
    }

    fn surface_step(&mut self, k: usize, st: State) {
        if k == self.surfaces.len() {
            return self.sink_step(st);
        }
        let fa = self.surfaces[k].clone();
        let Some(img) = self.image_boundary(&st, &fa) else { return };
        let genus = self.a.surfaces[&fa].genus;
        for (fb, sb) in &self.b.surfaces {
            if st.surfaces.used.contains(fb) || sb.genus != genus {
                continue;
            }
            let mut target = sb.boundary.clone();
            target.sort();
            if target != img || !self.tick() {
                continue;
            }
            let mut s = st.clone();
            s.surfaces.bind(&fa, fb);
            self.surface_step(k + 1, s);
            if self.stop() {
                return;
            }
        }
    }

    fn sink_step(&mut self, st: State) {
        let n = self.a.sinks.count;
        match (&self.a.sinks.incidence, &self.b.sinks.incidence) {
            (None, None) => {
                let mut s = st;
                s.sinks = (0..n).collect();
                self.emit(s);
            }
            (Some(ia), Some(ib)) => {
                let col = |m: &BTreeMap<Id, Vec<i64>>, f: &Id, k: usize| m.get(f).and_then(|r| r.get(k)).copied().unwrap_or(0);
                let mut sigma = Vec::with_capacity(n);
                let mut used = vec![false; n];
                self.sink_perm(&st, ia, ib, &col, &mut sigma, &mut used);
            }
            _ => {}
        }
    }

    fn sink_perm(
        &mut self,
        st: &State,
        ia: &BTreeMap<Id, Vec<i64>>,
        ib: &BTreeMap<Id, Vec<i64>>,
        col: &dyn Fn(&BTreeMap<Id, Vec<i64>>, &Id, usize) -> i64,
        sigma: &mut Vec<usize>,
        used: &mut [bool],
    ) {
        let k = sigma.len();
        if k == used.len() {
            let mut s = st.clone();
            s.sinks = sigma.clone();
            return self.emit(s);
        }
        for j in 0..used.len() {
            if used[j] || !self.tick() {
                continue;
            }
            let fits = st.surfaces.fwd.iter().all(|(fa, fb)| col(ia, fa, k) == col(ib, fb, j));
            if !fits {
                continue;
            }
            used[j] = true;
            sigma.push(j);
            self.sink_perm(st, ia, ib, col, sigma, used);
            sigma.pop();
            used[j] = false;
            if self.stop() {
                return;
            }
        }
    }

    fn emit(&mut self, st: State) {
        let mut points: BTreeMap<WallRef, Vec<usize>> = BTreeMap::new();
        for (w, wb) in &st.walls.fwd {
            let n = wall_points(self.a, w).unwrap_or(0);
            let img: Option<Vec<usize>> = (0..n).map(|p| Self::point(&st, w, p)).collect();
            let Some(img) = img else { return };
            debug_assert!(wall_points(self.b, wb) == Some(n));
            points.insert(w.clone(), img);
        }
        let iso = Isomorphism {
            mirror: self.mirror,
            moves: [Vec::new(), Vec::new()],
            pieces: st.pieces.fwd,
            walls: st.walls.fwd,
            points,
            pairs: st.pairs.fwd,
            swapped: st.swapped,
            strands: st.strands.fwd,
            crossings: st.crossings.fwd.into_iter().map(|(k, (_, x))| (k, x)).collect(),
            circles: st.circles.fwd,
            reversed: st.reversed,
            surfaces: st.surfaces.fwd,
            sinks: st.sinks,
        };
        self.found.push(iso);
    }
}
