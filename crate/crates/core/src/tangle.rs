//! Combinatorial encoding of the framed tangle inside one piece.
//!
//! A [`TangleCode`] is a signed Gauss code: every strand is the ordered list
//! of crossings it meets, each visit tagged over or under, and every crossing
//! carries its sign. The PD-style arc ends of the file format are derived
//! from this data, so they can never disagree with the paths.
//!
//! Planarity of the code is not enforced; all moves and invariants in the
//! crate are well defined on arbitrary signed Gauss codes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::id::{fresh_id, Id};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn of(v: i64) -> Sign {
        if v < 0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        Sign::of(self.value() * other.value())
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Over,
    Under,
}

impl Role {
    pub fn other(self) -> Role {
        match self {
            Role::Over => Role::Under,
            Role::Under => Role::Over,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Visit {
    pub crossing: Id,
    pub role: Role,
}

impl Visit {
    pub fn new(crossing: Id, role: Role) -> Self {
        Visit { crossing, role }
    }
}

/// A marked point on a wall of the enclosing piece.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WallPoint {
    pub wall: Id,
    pub point: usize,
}

impl WallPoint {
    pub fn new(wall: impl Into<Id>, point: usize) -> Self {
        WallPoint { wall: wall.into(), point }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Strand {
    pub path: Vec<Visit>,
    pub from: Option<WallPoint>,
    pub to: Option<WallPoint>,
}

impl Strand {
    pub fn closed(path: Vec<Visit>) -> Self {
        Strand { path, from: None, to: None }
    }

    pub fn is_closed(&self) -> bool {
        self.from.is_none() && self.to.is_none()
    }

    /// Number of arcs: open strands have `len + 1`, closed ones `max(len, 1)`.
    pub fn arc_count(&self) -> usize {
        if self.is_closed() {
            self.path.len().max(1)
        } else {
            self.path.len() + 1
        }
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        let n = self.path.len();
        if j == i + 1 {
            return true;
        }
        self.is_closed() && n > 1 && i + 1 == n && j == 0
    }
}

/// One end of an arc at a crossing, `strand:arc` in the file format.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcEnd {
    pub strand: Id,
    pub arc: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TangleError {
    #[error("unknown strand {0}")]
    UnknownStrand(Id),
    #[error("unknown crossing {0}")]
    UnknownCrossing(Id),
    #[error("site does not match {0}")]
    SiteMismatch(String),
    #[error("signed crossing sum between {0} and {1} is odd")]
    OddLinking(Id, Id),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReidemeisterMove {
    /// Insert a kink on `strand` before position `arc`.
    R1Add { strand: Id, arc: usize, sign: Sign, over_first: bool },
    R1Remove { crossing: Id },
    /// Insert a bigon: `over` passes over `under`. With `parallel` the under
    /// strand meets the two new crossings in the same order as the over strand.
    /// `sign` is the sign of the first crossing met by the over strand.
    R2Add { over: Id, over_arc: usize, under: Id, under_arc: usize, parallel: bool, sign: Sign },
    R2Remove { first: Id, second: Id },
    R3 { a: Id, b: Id, c: Id },
}

impl ReidemeisterMove {
    pub fn tag(&self) -> &'static str {
        match self {
            ReidemeisterMove::R1Add { .. } => "R1+",
            ReidemeisterMove::R1Remove { .. } => "R1-",
            ReidemeisterMove::R2Add { .. } => "R2+",
            ReidemeisterMove::R2Remove { .. } => "R2-",
            ReidemeisterMove::R3 { .. } => "R3",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TangleCode {
    pub crossings: BTreeMap<Id, Crossing>,
    pub strands: BTreeMap<Id, Strand>,
}

impl TangleCode {
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn strand(&self, id: &Id) -> Result<&Strand, TangleError> {
        self.strands.get(id).ok_or_else(|| TangleError::UnknownStrand(id.clone()))
    }

    /// Positions `(strand, index)` at which crossing `x` is visited.
    pub fn visits_of(&self, x: &Id) -> Vec<(Id, usize)> {
        let mut out = Vec::with_capacity(2);
        for (sid, s) in &self.strands {
            for (i, v) in s.path.iter().enumerate() {
                if &v.crossing == x {
                    out.push((sid.clone(), i));
                }
            }
        }
        out
    }

    /// Map crossing -> (over visit, under visit).
    pub fn visit_index(&self) -> BTreeMap<Id, [Option<(Id, usize)>; 2]> {
        let mut m: BTreeMap<Id, [Option<(Id, usize)>; 2]> = BTreeMap::new();
        for (sid, s) in &self.strands {
            for (i, v) in s.path.iter().enumerate() {
                let slot = match v.role {
                    Role::Over => 0,
                    Role::Under => 1,
                };
                m.entry(v.crossing.clone()).or_default()[slot] = Some((sid.clone(), i));
            }
        }
        m
    }

    /// Structural problems of the code alone (walls are checked by the piece).
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen: BTreeMap<&Id, (usize, usize)> = BTreeMap::new();
        for (sid, s) in &self.strands {
            if s.from.is_some() != s.to.is_some() {
                out.push(format!("strand {sid} has exactly one wall endpoint"));
            }
            for v in &s.path {
                if !self.crossings.contains_key(&v.crossing) {
                    out.push(format!("strand {sid} visits unknown crossing {}", v.crossing));
                    continue;
                }
                let e = seen.entry(&v.crossing).or_default();
                match v.role {
                    Role::Over => e.0 += 1,
                    Role::Under => e.1 += 1,
                }
            }
        }
        for x in self.crossings.keys() {
            match seen.get(x) {
                Some((1, 1)) => {}
                Some((o, u)) => out.push(format!(
                    "crossing {x} has {o} over and {u} under visits (expected 1 and 1)"
                )),
                None => out.push(format!("crossing {x} is not visited by any strand")),
            }
        }
        out
    }

    /// Rotate every closed path so it starts at its smallest visit.
    pub fn normalize(&mut self) {
        for s in self.strands.values_mut() {
            if s.is_closed() && !s.path.is_empty() {
                let k = (0..s.path.len()).min_by(|&a, &b| s.path[a].cmp(&s.path[b])).unwrap();
                s.path.rotate_left(k);
            }
        }
    }

    /// The four arc ends at `x` in counterclockwise order, starting with the
    /// incoming under arc. Positive crossings list the outgoing over arc
    /// second, negative ones the incoming over arc.
    pub fn ends(&self, x: &Id) -> Result<[ArcEnd; 4], TangleError> {
        let idx = self.visit_index();
        let slots = idx.get(x).ok_or_else(|| TangleError::UnknownCrossing(x.clone()))?;
        let (Some(over), Some(under)) = (&slots[0], &slots[1]) else {
            return Err(TangleError::SiteMismatch(format!("crossing {x} is not visited twice")));
        };
        let (ui, uo) = self.arcs_at(under);
        let (oi, oo) = self.arcs_at(over);
        let sign = self.crossings[x].sign;
        Ok(match sign {
            Sign::Plus => [ui, oo, uo, oi],
            Sign::Minus => [ui, oi, uo, oo],
        })
    }

    fn arcs_at(&self, (sid, i): &(Id, usize)) -> (ArcEnd, ArcEnd) {
        let s = &self.strands[sid];
        let n = s.path.len();
        let out = if s.is_closed() { (i + 1) % n } else { i + 1 };
        (
            ArcEnd { strand: sid.clone(), arc: *i },
            ArcEnd { strand: sid.clone(), arc: out },
        )
    }

    /// Signed sum over crossings whose two visits lie on strands `a` and `b`
    /// (self-crossings when `a == b`).
    fn signed_sum(&self, a: &Id, b: &Id) -> i64 {
        let idx = self.visit_index();
        let mut sum = 0;
        for (x, slots) in &idx {
            if let [Some((s1, _)), Some((s2, _))] = slots {
                if (s1 == a && s2 == b) || (s1 == b && s2 == a) {
                    sum += self.crossings[x].sign.value();
                }
            }
        }
        sum
    }

    /// Half the signed sum of crossings between two distinct strands.
    pub fn linking_number(&self, a: &Id, b: &Id) -> Result<i64, TangleError> {
        self.strand(a)?;
        self.strand(b)?;
        if a == b {
            return Err(TangleError::SiteMismatch("linking number needs two distinct strands".into()));
        }
        let s = self.signed_sum(a, b);
        if s % 2 != 0 {
            return Err(TangleError::OddLinking(a.clone(), b.clone()));
        }
        Ok(s / 2)
    }

    /// Sum of signs of the self-crossings of strand `s`.
    pub fn writhe(&self, s: &Id) -> Result<i64, TangleError> {
        self.strand(s)?;
        Ok(self.signed_sum(s, s))
    }

    /// Signed sum per unordered pair of strand groups. `group` assigns each
    /// strand to a component index; returns a symmetric matrix whose
    /// off-diagonal entries are full signed sums and whose diagonal entries
    /// are writhes.
    pub fn signed_sum_matrix(&self, group: &BTreeMap<Id, usize>, n: usize) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; n]; n];
        for (x, slots) in self.visit_index() {
            if let [Some((s1, _)), Some((s2, _))] = slots {
                let (Some(&g1), Some(&g2)) = (group.get(&s1), group.get(&s2)) else { continue };
                let v = self.crossings[&x].sign.value();
                m[g1][g2] += v;
                if g1 != g2 {
                    m[g2][g1] += v;
                }
            }
        }
        m
    }

    fn fresh_crossing(&self) -> Id {
        fresh_id("X", self.crossings.keys())
    }

    fn fresh_crossings(&self, n: usize) -> Vec<Id> {
        let mut taken: Vec<Id> = self.crossings.keys().cloned().collect();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let x = fresh_id("X", taken.iter());
            taken.push(x.clone());
            out.push(x);
        }
        out
    }

    /// Drop crossing `x` together with both of its visits.
    pub fn remove_crossing(&mut self, x: &Id) {
        self.crossings.remove(x);
        for s in self.strands.values_mut() {
            s.path.retain(|v| &v.crossing != x);
        }
    }

    /// Remove the given strands and every crossing they touch.
    pub fn remove_strands(&mut self, ids: &BTreeSet<Id>) {
        let mut dead = BTreeSet::new();
        for id in ids {
            if let Some(s) = self.strands.remove(id) {
                dead.extend(s.path.into_iter().map(|v| v.crossing));
            }
        }
        for x in &dead {
            self.remove_crossing(x);
        }
    }

    /// Apply one Reidemeister move at an explicit site.
    pub fn reidemeister(&self, mv: &ReidemeisterMove) -> Result<TangleCode, TangleError> {
        let mut t = self.clone();
        match mv {
            ReidemeisterMove::R1Add { strand, arc, sign, over_first } => {
                let s = t.strand(strand)?;
                if *arc >= s.arc_count() {
                    return Err(TangleError::SiteMismatch(format!("strand {strand} has no arc {arc}")));
                }
                let x = t.fresh_crossing();
                let (r1, r2) = if *over_first { (Role::Over, Role::Under) } else { (Role::Under, Role::Over) };
                t.crossings.insert(x.clone(), Crossing { sign: *sign });
                let s = t.strands.get_mut(strand).unwrap();
                s.path.insert(*arc, Visit::new(x.clone(), r2));
                s.path.insert(*arc, Visit::new(x, r1));
            }
            ReidemeisterMove::R1Remove { crossing } => {
                let v = t.visits_of(crossing);
                if v.len() != 2 {
                    return Err(TangleError::UnknownCrossing(crossing.clone()));
                }
                let ((s1, i), (s2, j)) = (&v[0], &v[1]);
                let s = &t.strands[s1];
                if s1 != s2 || !(s.adjacent(*i, *j) || s.adjacent(*j, *i)) {
                    return Err(TangleError::SiteMismatch(format!("{crossing} is not a kink")));
                }
                t.remove_crossing(crossing);
            }
            ReidemeisterMove::R2Add { over, over_arc, under, under_arc, parallel, sign } => {
                let so = t.strand(over)?;
                let su = t.strand(under)?;
                if *over_arc >= so.arc_count() || *under_arc >= su.arc_count() {
                    return Err(TangleError::SiteMismatch("arc out of range".into()));
                }
                if over == under && over_arc == under_arc {
                    return Err(TangleError::SiteMismatch("R2 needs two different arcs".into()));
                }
                let ids = t.fresh_crossings(2);
                let (x, y) = (ids[0].clone(), ids[1].clone());
                t.crossings.insert(x.clone(), Crossing { sign: *sign });
                t.crossings.insert(y.clone(), Crossing { sign: sign.flip() });
                let over_ins = vec![Visit::new(x.clone(), Role::Over), Visit::new(y.clone(), Role::Over)];
                let under_ins = if *parallel {
                    vec![Visit::new(x, Role::Under), Visit::new(y, Role::Under)]
                } else {
                    vec![Visit::new(y, Role::Under), Visit::new(x, Role::Under)]
                };
                // insert at the later position first so indices stay valid
                let mut jobs = [(over.clone(), *over_arc, over_ins), (under.clone(), *under_arc, under_ins)];
                if over == under && under_arc > over_arc {
                    jobs.swap(0, 1);
                }
                for (sid, at, ins) in jobs {
                    let p = &mut t.strands.get_mut(&sid).unwrap().path;
                    for (k, v) in ins.into_iter().enumerate() {
                        p.insert(at + k, v);
                    }
                }
            }
            ReidemeisterMove::R2Remove { first, second } => {
                if !t.is_r2_site(first, second) {
                    return Err(TangleError::SiteMismatch(format!("{first},{second} is not a bigon")));
                }
                t.remove_crossing(first);
                t.remove_crossing(second);
            }
            ReidemeisterMove::R3 { a, b, c } => {
                let segs = t.r3_segments(a, b, c).ok_or_else(|| {
                    TangleError::SiteMismatch(format!("{a},{b},{c} is not a triangle"))
                })?;
                for (sid, i, j) in segs {
                    t.strands.get_mut(&sid).unwrap().path.swap(i, j);
                }
            }
        }
        t.normalize();
        Ok(t)
    }

    fn is_r2_site(&self, x: &Id, y: &Id) -> bool {
        if x == y {
            return false;
        }
        let (Some(cx), Some(cy)) = (self.crossings.get(x), self.crossings.get(y)) else { return false };
        if cx.sign == cy.sign {
            return false;
        }
        let idx = self.visit_index();
        let (Some(vx), Some(vy)) = (idx.get(x), idx.get(y)) else { return false };
        for slot in 0..2 {
            let (Some((s1, i)), Some((s2, j))) = (&vx[slot], &vy[slot]) else { return false };
            if s1 != s2 {
                return false;
            }
            let s = &self.strands[s1];
            if !(s.adjacent(*i, *j) || s.adjacent(*j, *i)) {
                return false;
            }
        }
        true
    }

    /// For a triangle `a, b, c`: the three adjacent visit pairs to swap.
    fn r3_segments(&self, a: &Id, b: &Id, c: &Id) -> Option<Vec<(Id, usize, usize)>> {
        if a == b || b == c || a == c {
            return None;
        }
        let idx = self.visit_index();
        let mut visits = Vec::with_capacity(6);
        for x in [a, b, c] {
            let slots = idx.get(x)?;
            for (k, s) in slots.iter().enumerate() {
                let (sid, i) = s.clone()?;
                visits.push((x.clone(), if k == 0 { Role::Over } else { Role::Under }, sid, i));
            }
        }
        // try all perfect matchings of the six visits
        fn matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
            if items.is_empty() {
                return vec![vec![]];
            }
            let first = items[0];
            let mut out = Vec::new();
            for k in 1..items.len() {
                let rest: Vec<usize> = items[1..].iter().copied().filter(|&z| z != items[k]).collect();
                for mut m in matchings(&rest) {
                    m.push((first, items[k]));
                    out.push(m);
                }
            }
            out
        }
        'outer: for m in matchings(&[0, 1, 2, 3, 4, 5]) {
            let mut segs = Vec::new();
            let mut kinds = Vec::new();
            for &(p, q) in &m {
                let (xp, rp, sp, ip) = &visits[p];
                let (xq, rq, sq, iq) = &visits[q];
                if xp == xq || sp != sq {
                    continue 'outer;
                }
                let s = &self.strands[sp];
                let (i, j) = if s.adjacent(*ip, *iq) {
                    (*ip, *iq)
                } else if s.adjacent(*iq, *ip) {
                    (*iq, *ip)
                } else {
                    continue 'outer;
                };
                segs.push((sp.clone(), i, j));
                kinds.push(match (rp, rq) {
                    (Role::Over, Role::Over) => 2,
                    (Role::Under, Role::Under) => 0,
                    _ => 1,
                });
            }
            kinds.sort();
            if kinds == [0, 1, 2] {
                return Some(segs);
            }
        }
        None
    }

    fn first_r1_site(&self) -> Option<Id> {
        for (sid, s) in &self.strands {
            let n = s.path.len();
            for i in 0..n {
                let j = if i + 1 < n { i + 1 } else if s.is_closed() && n > 1 { 0 } else { continue };
                if s.path[i].crossing == s.path[j].crossing {
                    let _ = sid;
                    return Some(s.path[i].crossing.clone());
                }
            }
        }
        None
    }

    fn adjacent_pairs(&self, role: Role) -> Vec<(Id, Id)> {
        let mut out = Vec::new();
        for s in self.strands.values() {
            let n = s.path.len();
            for i in 0..n {
                let j = if i + 1 < n { i + 1 } else if s.is_closed() && n > 2 { 0 } else { continue };
                let (v, w) = (&s.path[i], &s.path[j]);
                if v.role == role && w.role == role && v.crossing != w.crossing {
                    out.push((v.crossing.clone(), w.crossing.clone()));
                }
            }
        }
        out
    }

    fn first_r2_site(&self) -> Option<(Id, Id)> {
        self.adjacent_pairs(Role::Over).into_iter().find(|(x, y)| self.is_r2_site(x, y))
    }

    /// Every R3 triangle, in a deterministic order.
    pub fn r3_sites(&self) -> Vec<(Id, Id, Id)> {
        let mut found = BTreeSet::new();
        let idx = self.visit_index();
        let mut neighbours: BTreeMap<Id, BTreeSet<Id>> = BTreeMap::new();
        for s in self.strands.values() {
            let n = s.path.len();
            for i in 0..n {
                let j = if i + 1 < n { i + 1 } else if s.is_closed() && n > 1 { 0 } else { continue };
                let (p, q) = (&s.path[i].crossing, &s.path[j].crossing);
                if p != q {
                    neighbours.entry(p.clone()).or_default().insert(q.clone());
                    neighbours.entry(q.clone()).or_default().insert(p.clone());
                }
            }
        }
        for (p, q) in self.adjacent_pairs(Role::Over) {
            let Some(np) = neighbours.get(&p) else { continue };
            for r in np {
                if r == &p || r == &q || !idx.contains_key(r) {
                    continue;
                }
                let mut t = [p.clone(), q.clone(), r.clone()];
                t.sort();
                if found.contains(&t) {
                    continue;
                }
                if self.r3_segments(&t[0], &t[1], &t[2]).is_some() {
                    found.insert(t);
                }
            }
        }
        found.into_iter().map(|[a, b, c]| (a, b, c)).collect()
    }

    fn first_reduction(&self) -> Option<ReidemeisterMove> {
        if let Some(x) = self.first_r1_site() {
            return Some(ReidemeisterMove::R1Remove { crossing: x });
        }
        self.first_r2_site().map(|(first, second)| ReidemeisterMove::R2Remove { first, second })
    }

    /// Greedy crossing reduction with at most `budget` moves: R1/R2 removals
    /// first, then R3 detours of length one or two that unlock a removal.
    /// Returns the reduced code and the applied moves.
    pub fn simplify(&self, budget: usize) -> (TangleCode, Vec<ReidemeisterMove>) {
        let mut t = self.clone();
        t.normalize();
        let mut log = Vec::new();
        let mut left = budget;
        'main: while left > 0 {
            if let Some(mv) = t.first_reduction() {
                t = t.reidemeister(&mv).expect("site found by scan");
                log.push(mv);
                left -= 1;
                continue;
            }
            if t.crossing_count() > 40 {
                break;
            }
            // one R3 then a removal
            if left >= 2 {
                for (a, b, c) in t.r3_sites() {
                    let m1 = ReidemeisterMove::R3 { a, b, c };
                    let t1 = t.reidemeister(&m1).expect("listed site");
                    if let Some(m2) = t1.first_reduction() {
                        t = t1.reidemeister(&m2).expect("site found by scan");
                        log.push(m1);
                        log.push(m2);
                        left -= 2;
                        continue 'main;
                    }
                }
            }
            // two R3 then a removal
            if left >= 3 {
                for (a, b, c) in t.r3_sites() {
                    let m1 = ReidemeisterMove::R3 { a: a.clone(), b: b.clone(), c: c.clone() };
                    let t1 = t.reidemeister(&m1).expect("listed site");
                    for (a2, b2, c2) in t1.r3_sites() {
                        if (&a2, &b2, &c2) == (&a, &b, &c) {
                            continue;
                        }
                        let m2 = ReidemeisterMove::R3 { a: a2, b: b2, c: c2 };
                        let t2 = t1.reidemeister(&m2).expect("listed site");
                        if let Some(m3) = t2.first_reduction() {
                            t = t2.reidemeister(&m3).expect("site found by scan");
                            log.extend([m1, m2, m3]);
                            left -= 3;
                            continue 'main;
                        }
                    }
                }
            }
            break;
        }
        (t, log)
    }

    /// Mirror image: every over becomes under and every sign flips.
    pub fn mirrored(&self) -> TangleCode {
        let mut t = self.clone();
        for c in t.crossings.values_mut() {
            c.sign = c.sign.flip();
        }
        for s in t.strands.values_mut() {
            for v in &mut s.path {
                v.role = v.role.other();
            }
        }
        t.normalize();
        t
    }
}
