//! The diagram of a gradient-like Morse-Smale system.
//!
//! Pieces are the 3-spheres (one per source), walls are the boundary
//! spheres of deleted disks, pairs glue two walls (one per index-1 point),
//! glued circles are the attaching circles of 2-handles, spanning surfaces
//! are traces of index-3 stable manifolds, and `sinks` counts index-4 points.

mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use validate::{Finding, Severity, ValidationReport};

use crate::id::Id;
use crate::tangle::{Sign, TangleCode, WallPoint};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SphereWall {
    /// Marked points `0..points` in cyclic order.
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Piece {
    pub tangle: TangleCode,
    pub walls: BTreeMap<Id, SphereWall>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WallRef {
    pub piece: Id,
    pub wall: Id,
}

impl WallRef {
    pub fn new(piece: impl Into<Id>, wall: impl Into<Id>) -> Self {
        WallRef { piece: piece.into(), wall: wall.into() }
    }
}

impl fmt::Display for WallRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.piece, self.wall)
    }
}

/// Two walls identified by a sphere homeomorphism, recorded as the induced
/// bijection on marked points plus an orientation flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpherePair {
    pub a: WallRef,
    pub b: WallRef,
    /// `matching[i]` is the point of wall `b` glued to point `i` of wall `a`.
    pub matching: Vec<usize>,
    pub orientation: Sign,
}

impl SpherePair {
    pub fn is_internal(&self) -> bool {
        self.a.piece == self.b.piece
    }

    pub fn inverse_matching(&self) -> Vec<usize> {
        let mut inv = vec![0; self.matching.len()];
        for (i, &j) in self.matching.iter().enumerate() {
            if j < inv.len() {
                inv[j] = i;
            }
        }
        inv
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrandRef {
    pub piece: Id,
    pub strand: Id,
}

impl StrandRef {
    pub fn new(piece: impl Into<Id>, strand: impl Into<Id>) -> Self {
        StrandRef { piece: piece.into(), strand: strand.into() }
    }
}

impl fmt::Display for StrandRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.piece, self.strand)
    }
}

/// Attaching circle of a 2-handle: a cyclic sequence of strands closed up
/// through pair identifications.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedCircle {
    pub strands: Vec<StrandRef>,
    pub framing: i64,
    /// Surrogate for a replaced 1-handle (dotted-circle notation).
    pub dotted: bool,
}

impl GluedCircle {
    pub fn new(strands: Vec<StrandRef>, framing: i64) -> Self {
        GluedCircle { strands, framing, dotted: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryItem {
    /// A boundary component running along the framing parallel of a circle.
    FramingParallel { circle: Id, sign: Sign },
    /// A boundary curve on the sphere of a pair, left by cutting along it.
    WallCurve { pair: Id, index: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningSurface {
    pub genus: u32,
    pub boundary: Vec<BoundaryItem>,
}

impl SpanningSurface {
    /// Signed multiplicity of the framing parallel of `circle` in the boundary.
    pub fn multiplicity(&self, circle: &Id) -> i64 {
        self.boundary
            .iter()
            .map(|b| match b {
                BoundaryItem::FramingParallel { circle: c, sign } if c == circle => sign.value(),
                _ => 0,
            })
            .sum()
    }

    pub fn touches(&self, circle: &Id) -> bool {
        self.boundary
            .iter()
            .any(|b| matches!(b, BoundaryItem::FramingParallel { circle: c, .. } if c == circle))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sinks {
    pub count: usize,
    /// Boundary of the 4-handles on the 3-handles: one row per surface,
    /// one column per sink. Required when `count > 1`.
    pub incidence: Option<BTreeMap<Id, Vec<i64>>>,
}

impl Default for Sinks {
    fn default() -> Self {
        Sinks { count: 1, incidence: None }
    }
}

/// Permutations induced by a diffeomorphism on the five structural sets.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct InternalMaps {
    pub pieces: BTreeMap<Id, Id>,
    pub pairs: BTreeMap<Id, Id>,
    pub circles: BTreeMap<Id, Id>,
    pub surfaces: BTreeMap<Id, Id>,
    pub sinks: Vec<usize>,
}

impl InternalMaps {
    pub fn identity(d: &Diagram) -> Self {
        let id = |ks: Vec<&Id>| ks.into_iter().map(|k| (k.clone(), k.clone())).collect();
        InternalMaps {
            pieces: id(d.pieces.keys().collect()),
            pairs: id(d.pairs.keys().collect()),
            circles: id(d.circles.keys().collect()),
            surfaces: id(d.surfaces.keys().collect()),
            sinks: (0..d.sinks.count).collect(),
        }
    }
}

/// Handles that were folded away by the reduction pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Annotation {
    pub one_handles: usize,
    pub three_handles: usize,
    pub sinks: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    VectorField,
    Diffeomorphism,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HandleCounts(pub [usize; 5]);

impl HandleCounts {
    pub fn euler(&self) -> i64 {
        let h = self.0;
        h[0] as i64 - h[1] as i64 + h[2] as i64 - h[3] as i64 + h[4] as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub pieces: BTreeMap<Id, Piece>,
    pub pairs: BTreeMap<Id, SpherePair>,
    pub circles: BTreeMap<Id, GluedCircle>,
    pub surfaces: BTreeMap<Id, SpanningSurface>,
    pub sinks: Sinks,
    pub internal_maps: Option<InternalMaps>,
    pub annotation: Option<Annotation>,
}

impl Default for Diagram {
    fn default() -> Self {
        Diagram::empty()
    }
}

impl Diagram {
    /// One piece `P1`, nothing in it, one sink.
    pub fn empty() -> Self {
        let mut pieces = BTreeMap::new();
        pieces.insert(Id::from("P1"), Piece::default());
        Diagram {
            pieces,
            pairs: BTreeMap::new(),
            circles: BTreeMap::new(),
            surfaces: BTreeMap::new(),
            sinks: Sinks::default(),
            internal_maps: None,
            annotation: None,
        }
    }

    pub fn kind(&self) -> Kind {
        if self.internal_maps.is_some() {
            Kind::Diffeomorphism
        } else {
            Kind::VectorField
        }
    }

    pub fn handle_counts(&self) -> HandleCounts {
        HandleCounts([
            self.pieces.len(),
            self.pairs.len(),
            self.circles.len(),
            self.surfaces.len(),
            self.sinks.count,
        ])
    }

    /// Handle counts of the presented manifold: dotted circles count as
    /// 1-handles and annotated handles are added back.
    pub fn presented_handle_counts(&self) -> HandleCounts {
        let dotted = self.circles.values().filter(|c| c.dotted).count();
        let a = self.annotation.unwrap_or_default();
        HandleCounts([
            self.pieces.len(),
            self.pairs.len() + dotted,
            self.circles.len() - dotted,
            self.surfaces.len() + a.three_handles,
            self.sinks.count,
        ])
    }

    pub fn wall_pair(&self, w: &WallRef) -> Option<(&Id, &SpherePair)> {
        self.pairs.iter().find(|(_, p)| &p.a == w || &p.b == w)
    }

    /// The point glued to `(piece, wp)` across its pair, if any.
    pub fn across(&self, piece: &Id, wp: &WallPoint) -> Option<(Id, WallPoint)> {
        let w = WallRef { piece: piece.clone(), wall: wp.wall.clone() };
        let (_, pair) = self.wall_pair(&w)?;
        if pair.a == w {
            let q = *pair.matching.get(wp.point)?;
            Some((pair.b.piece.clone(), WallPoint { wall: pair.b.wall.clone(), point: q }))
        } else {
            let q = pair.inverse_matching().get(wp.point).copied()?;
            Some((pair.a.piece.clone(), WallPoint { wall: pair.a.wall.clone(), point: q }))
        }
    }

    /// Owning circle of every strand.
    pub fn strand_owner(&self) -> BTreeMap<StrandRef, Id> {
        let mut m = BTreeMap::new();
        for (cid, c) in &self.circles {
            for s in &c.strands {
                m.insert(s.clone(), cid.clone());
            }
        }
        m
    }

    /// Is circle `c` a single closed strand inside one piece?
    pub fn local_strand(&self, c: &Id) -> Option<StrandRef> {
        let circle = self.circles.get(c)?;
        if circle.strands.len() != 1 {
            return None;
        }
        let s = &circle.strands[0];
        let strand = self.pieces.get(&s.piece)?.tangle.strands.get(&s.strand)?;
        strand.is_closed().then(|| s.clone())
    }

    /// Rotate closed paths and circle strand cycles to their canonical start.
    pub fn normalize(&mut self) {
        for p in self.pieces.values_mut() {
            p.tangle.normalize();
        }
        for c in self.circles.values_mut() {
            if let Some(k) = (0..c.strands.len()).min_by(|&a, &b| c.strands[a].cmp(&c.strands[b])) {
                c.strands.rotate_left(k);
            }
        }
        for s in self.surfaces.values_mut() {
            s.boundary.sort();
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    /// Per-circle passage counts through each pair: `+1` for every step
    /// from wall `a` to wall `b`, `-1` for the reverse.
    pub fn passages(&self) -> BTreeMap<(Id, Id), i64> {
        let mut m = BTreeMap::new();
        for (cid, c) in &self.circles {
            for s in &c.strands {
                let Some(strand) = self.pieces.get(&s.piece).and_then(|p| p.tangle.strands.get(&s.strand)) else {
                    continue;
                };
                let Some(to) = &strand.to else { continue };
                let w = WallRef { piece: s.piece.clone(), wall: to.wall.clone() };
                if let Some((pid, pair)) = self.wall_pair(&w) {
                    let v = if pair.a == w { 1 } else { -1 };
                    *m.entry((pid.clone(), cid.clone())).or_insert(0) += v;
                }
            }
        }
        m
    }

    /// Reverse the orientation of a circle. The presented manifold does not
    /// change: signs of crossings with other circles and the surface boundary
    /// signs along the circle flip.
    pub fn reverse_circle(&mut self, c: &Id) {
        let Some(circle) = self.circles.get_mut(c) else { return };
        circle.strands.reverse();
        let members: BTreeSet<StrandRef> = circle.strands.iter().cloned().collect();
        for (pid, piece) in self.pieces.iter_mut() {
            let mine: BTreeSet<Id> = members.iter().filter(|s| &s.piece == pid).map(|s| s.strand.clone()).collect();
            if mine.is_empty() {
                continue;
            }
            let idx = piece.tangle.visit_index();
            for (x, slots) in idx {
                if let [Some((s1, _)), Some((s2, _))] = slots {
                    if mine.contains(&s1) != mine.contains(&s2) {
                        let cr = piece.tangle.crossings.get_mut(&x).unwrap();
                        cr.sign = cr.sign.flip();
                    }
                }
            }
            for sid in &mine {
                let s = piece.tangle.strands.get_mut(sid).unwrap();
                s.path.reverse();
                std::mem::swap(&mut s.from, &mut s.to);
            }
        }
        for surf in self.surfaces.values_mut() {
            for b in &mut surf.boundary {
                if let BoundaryItem::FramingParallel { circle, sign } = b {
                    if circle == c {
                        *sign = sign.flip();
                    }
                }
            }
        }
        self.normalize();
    }
}
