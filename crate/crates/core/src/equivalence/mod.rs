//! Isomorphism of diagrams and conjugacy of diffeomorphism diagrams.
//!
//! Both sides are brought to a simplified code by greedy Reidemeister
//! moves, then label bijections are searched that carry one onto the other.
//! A `Yes` always comes with a witness that [`verify_witness`] replays.

mod search;
mod witness;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

pub use witness::{apply_isomorphism, compose, replay, verify_witness};

use crate::calculus::{Exhausted, Obstruction, Verdict};
use crate::diagram::{BoundaryItem, Diagram, Finding, InternalMaps, Kind, Severity, StrandRef, ValidationReport, WallRef};
use crate::id::Id;
use crate::invariants::{linking_matrix_unchecked, smith};
use crate::tangle::{ReidemeisterMove, Sign};

/// Search nodes allowed per unit of budget.
const NODES_PER_BUDGET: usize = 5_000;

/// A failed search on codes this small is taken as a `No`.
pub const SMALL_CROSSINGS: usize = 6;

/// At most this many isomorphisms are enumerated for a conjugacy check.
const ENUMERATION_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EquivOptions {
    /// Reidemeister moves per piece when simplifying, and the search
    /// allowance (in units of `NODES_PER_BUDGET` nodes).
    pub budget: usize,
    /// Also accept orientation-reversing maps (mirror images).
    pub mirror: bool,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions { budget: 64, mirror: false }
    }
}

impl EquivOptions {
    pub fn with_budget(budget: usize) -> Self {
        EquivOptions { budget, ..Self::default() }
    }

    fn node_limit(&self) -> usize {
        self.budget.max(1).saturating_mul(NODES_PER_BUDGET)
    }

    fn mirrors(&self) -> &'static [bool] {
        if self.mirror {
            &[false, true]
        } else {
            &[false]
        }
    }
}

/// Witness of an isomorphism `d1 -> d2`: Reidemeister moves bringing each
/// side to its simplified form, then label bijections between those forms.
/// Crossings are keyed by `(piece, crossing)` of the source and map to a
/// crossing of the image piece. `reversed` lists source circles whose
/// orientation is flipped first; `swapped` lists pairs whose sides trade.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Isomorphism {
    pub mirror: bool,
    pub moves: [Vec<(Id, ReidemeisterMove)>; 2],
    pub pieces: BTreeMap<Id, Id>,
    pub walls: BTreeMap<WallRef, WallRef>,
    pub points: BTreeMap<WallRef, Vec<usize>>,
    pub pairs: BTreeMap<Id, Id>,
    pub swapped: BTreeSet<Id>,
    pub strands: BTreeMap<StrandRef, StrandRef>,
    pub crossings: BTreeMap<(Id, Id), Id>,
    pub circles: BTreeMap<Id, Id>,
    pub reversed: BTreeSet<Id>,
    pub surfaces: BTreeMap<Id, Id>,
    pub sinks: Vec<usize>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error("diagram {0} is invalid: {1}")]
    Invalid(usize, String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

fn check(which: usize, d: &Diagram) -> Result<(), EquivError> {
    let r = d.validate();
    if r.ok {
        Ok(())
    } else {
        let msg: Vec<String> = r.errors().map(|f| format!("[{}] {}", f.location, f.message)).collect();
        Err(EquivError::Invalid(which, msg.join("; ")))
    }
}

/// Per-piece greedy simplification with a logged move list.
pub fn simplify_diagram(d: &Diagram, budget: usize) -> (Diagram, Vec<(Id, ReidemeisterMove)>) {
    let mut out = d.clone();
    let mut log = Vec::new();
    for (pid, piece) in out.pieces.iter_mut() {
        let (t, moves) = piece.tangle.simplify(budget);
        piece.tangle = t;
        log.extend(moves.into_iter().map(|m| (pid.clone(), m)));
    }
    (out.normalized(), log)
}

/// Invariants that any isomorphism preserves. Mirror images negate framings
/// and the signature.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Profile {
    counts: [usize; 5],
    annotation: Option<crate::diagram::Annotation>,
    framings: Vec<(i64, bool)>,
    det: i128,
    even: bool,
    signature: i64,
    factors: Vec<i128>,
    degrees: Vec<Vec<(usize, usize, usize)>>,
}

fn profile(d: &Diagram, mirror: bool) -> Profile {
    let m = if mirror { -1 } else { 1 };
    let lm = linking_matrix_unchecked(d).matrix;
    let mut framings: Vec<(i64, bool)> = d.circles.values().map(|c| (m * c.framing, c.dotted)).collect();
    framings.sort();
    let sorted = |mut v: Vec<(usize, usize, usize)>| {
        v.sort();
        v
    };
    let circles = d
        .circles
        .iter()
        .map(|(cid, c)| (c.strands.len(), d.surfaces.values().filter(|s| s.touches(cid)).count(), c.dotted as usize))
        .collect();
    let pairs = d.pairs.values().map(|p| (p.matching.len(), (p.orientation == Sign::Minus) as usize, p.is_internal() as usize)).collect();
    let surfaces = d
        .surfaces
        .values()
        .map(|s| {
            let walls = s.boundary.iter().filter(|b| matches!(b, BoundaryItem::WallCurve { .. })).count();
            (s.genus as usize, s.boundary.len(), walls)
        })
        .collect();
    let pieces = d.pieces.values().map(|p| (p.walls.len(), p.tangle.strands.len(), 0)).collect();
    Profile {
        counts: d.handle_counts().0,
        annotation: d.annotation,
        framings,
        det: smith::determinant(&lm).abs(),
        even: lm.diagonal().iter().all(|x| x % 2 == 0),
        signature: m * smith::signature(&lm),
        factors: smith::invariant_factors(&lm),
        degrees: vec![sorted(circles), sorted(pairs), sorted(surfaces), sorted(pieces)],
    }
}

/// Names of the invariants that differ, empty when none does.
fn separating(a: &Diagram, b: &Diagram, mirror: bool) -> Vec<String> {
    let (pa, pb) = (profile(a, mirror), profile(b, false));
    let mut out = Vec::new();
    let mut note = |differs: bool, what: String| {
        if differs {
            out.push(what);
        }
    };
    note(pa.counts != pb.counts, format!("handle counts {:?} vs {:?}", pa.counts, pb.counts));
    note(pa.annotation != pb.annotation, "annotations differ".into());
    note(pa.framings != pb.framings, "framing multisets differ".into());
    note(pa.det != pb.det, format!("|det L| {} vs {}", pa.det, pb.det));
    note(pa.even != pb.even, "parity of the linking form differs".into());
    note(pa.signature != pb.signature, format!("signature {} vs {}", pa.signature, pb.signature));
    note(pa.factors != pb.factors, "invariant factors of L differ".into());
    note(pa.degrees != pb.degrees, "degree sequences differ".into());
    out
}

fn crossings(d: &Diagram) -> usize {
    d.pieces.values().map(|p| p.tangle.crossing_count()).sum()
}

/// Search isomorphisms `a -> b` between the simplified forms, for every
/// allowed orientation behaviour. Returns found witnesses (with moves
/// filled in), nodes explored and whether any search ran out.
fn search_all(
    a: &Diagram,
    b: &Diagram,
    moves: &[Vec<(Id, ReidemeisterMove)>; 2],
    opts: &EquivOptions,
    all: bool,
) -> (Vec<Isomorphism>, usize, bool) {
    let mut found = Vec::new();
    let mut nodes = 0;
    let mut exhausted = false;
    for &m in opts.mirrors() {
        let mut s = search::Search::new(a, b, m, opts.node_limit());
        if all {
            s = s.collect_all(ENUMERATION_CAP);
        }
        s.run();
        nodes += s.nodes;
        exhausted |= s.exhausted || (all && s.found.len() >= ENUMERATION_CAP);
        for mut iso in s.found {
            iso.moves = moves.clone();
            found.push(iso);
        }
        if !all && !found.is_empty() {
            break;
        }
    }
    (found, nodes, exhausted)
}

/// Decide whether two diagrams are isomorphic. `No` comes either from a
/// separating invariant or from an exhaustive search on small codes.
pub fn isomorphic(d1: &Diagram, d2: &Diagram, opts: &EquivOptions) -> Result<Verdict<Isomorphism>, EquivError> {
    check(1, d1)?;
    check(2, d2)?;
    let reasons: Vec<Vec<String>> = opts.mirrors().iter().map(|&m| separating(d1, d2, m)).collect();
    if reasons.iter().all(|r| !r.is_empty()) {
        return Ok(Verdict::No(Obstruction { invariants: reasons.concat() }));
    }
    let (a, ma) = simplify_diagram(d1, opts.budget);
    let (b, mb) = simplify_diagram(d2, opts.budget);
    let (found, nodes, exhausted) = search_all(&a, &b, &[ma, mb], opts, false);
    if let Some(iso) = found.into_iter().next() {
        return Ok(Verdict::Yes(iso));
    }
    if !exhausted && crossings(&a).max(crossings(&b)) <= SMALL_CROSSINGS {
        return Ok(Verdict::No(Obstruction {
            invariants: vec![format!(
                "no label bijection between the simplified codes ({} and {} crossings, {nodes} nodes searched)",
                crossings(&a),
                crossings(&b)
            )],
        }));
    }
    Ok(Verdict::Unknown(Exhausted { budget: opts.budget, explored: nodes }))
}

/// Result of a conjugacy check, with the size of the enumeration behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjugacy {
    pub verdict: Verdict<Isomorphism>,
    /// Isomorphisms between the simplified forms that were examined.
    pub enumerated: usize,
    /// Every isomorphism was examined.
    pub exhaustive: bool,
}

fn commutes(iso: &Isomorphism, i1: &InternalMaps, i2: &InternalMaps) -> bool {
    fn square(phi: &BTreeMap<Id, Id>, f: &BTreeMap<Id, Id>, g: &BTreeMap<Id, Id>) -> bool {
        phi.iter().all(|(x, y)| {
            let lhs = f.get(x).and_then(|fx| phi.get(fx));
            let rhs = g.get(y);
            lhs.is_some() && lhs == rhs
        })
    }
    square(&iso.pieces, &i1.pieces, &i2.pieces)
        && square(&iso.pairs, &i1.pairs, &i2.pairs)
        && square(&iso.circles, &i1.circles, &i2.circles)
        && square(&iso.surfaces, &i1.surfaces, &i2.surfaces)
        && (0..iso.sinks.len()).all(|k| {
            let lhs = i1.sinks.get(k).and_then(|&j| iso.sinks.get(j));
            let rhs = iso.sinks.get(k).and_then(|&j| i2.sinks.get(j));
            lhs.is_some() && lhs == rhs
        })
}

/// Decide whether two diffeomorphism diagrams are conjugate: is there an
/// isomorphism `phi` of the underlying diagrams with `phi ∘ I1 = I2 ∘ phi`
/// on pieces, pairs, circles, surfaces and sinks?
pub fn conjugate(d1: &Diagram, d2: &Diagram, opts: &EquivOptions) -> Result<Conjugacy, EquivError> {
    check(1, d1)?;
    check(2, d2)?;
    let (Some(i1), Some(i2)) = (&d1.internal_maps, &d2.internal_maps) else {
        return Err(EquivError::Precondition("conjugacy needs two diffeomorphism diagrams".into()));
    };
    for (k, d) in [(1, d1), (2, d2)] {
        let r = verify_internal_maps(d);
        if !r.ok {
            return Err(EquivError::Invalid(k, r.errors().map(|f| f.message.clone()).collect::<Vec<_>>().join("; ")));
        }
    }
    let reasons: Vec<Vec<String>> = opts.mirrors().iter().map(|&m| separating(d1, d2, m)).collect();
    if reasons.iter().all(|r| !r.is_empty()) {
        let verdict = Verdict::No(Obstruction { invariants: reasons.concat() });
        return Ok(Conjugacy { verdict, enumerated: 0, exhaustive: true });
    }
    let (a, ma) = simplify_diagram(d1, opts.budget);
    let (b, mb) = simplify_diagram(d2, opts.budget);
    let (found, nodes, exhausted) = search_all(&a, &b, &[ma, mb], opts, true);
    let enumerated = found.len();
    if let Some(iso) = found.into_iter().find(|iso| commutes(iso, i1, i2)) {
        return Ok(Conjugacy { verdict: Verdict::Yes(iso), enumerated, exhaustive: !exhausted });
    }
    let small = crossings(&a).max(crossings(&b)) <= SMALL_CROSSINGS;
    let verdict = if !exhausted && small {
        Verdict::No(Obstruction {
            invariants: vec![format!("none of the {enumerated} isomorphisms commutes with the internal maps (enumeration exhaustive)")],
        })
    } else {
        Verdict::Unknown(Exhausted { budget: opts.budget, explored: nodes })
    };
    Ok(Conjugacy { verdict, enumerated, exhaustive: !exhausted })
}

/// Check that the internal maps of a diffeomorphism diagram are bijections
/// that respect framings, incidences and genera.
pub fn verify_internal_maps(d: &Diagram) -> ValidationReport {
    let mut findings = Vec::new();
    let mut err = |loc: &str, msg: String| findings.push(Finding { severity: Severity::Error, location: loc.into(), message: msg });
    let Some(m) = &d.internal_maps else {
        err("imap", "not a diffeomorphism diagram".into());
        return ValidationReport { ok: false, findings };
    };
    if d.kind() != Kind::Diffeomorphism {
        err("imap", "not a diffeomorphism diagram".into());
    }
    fn bijective<T>(map: &BTreeMap<Id, Id>, keys: &BTreeMap<Id, T>) -> bool {
        let img: BTreeSet<&Id> = map.values().collect();
        map.len() == keys.len() && img.len() == keys.len() && keys.keys().all(|k| map.contains_key(k) && img.contains(k))
    }
    let sets = [
        ("pieces", bijective(&m.pieces, &d.pieces)),
        ("pairs", bijective(&m.pairs, &d.pairs)),
        ("circles", bijective(&m.circles, &d.circles)),
        ("surfaces", bijective(&m.surfaces, &d.surfaces)),
    ];
    let mut all_bijective = true;
    for (what, ok) in sets {
        if !ok {
            all_bijective = false;
            err("imap", format!("{what} map is not a bijection of the {what}"));
        }
    }
    let sinks: BTreeSet<usize> = m.sinks.iter().copied().collect();
    if m.sinks.len() != d.sinks.count || sinks.len() != d.sinks.count || sinks.iter().any(|&s| s >= d.sinks.count) {
        all_bijective = false;
        err("imap", "sinks map is not a permutation".into());
    }
    if !all_bijective {
        return ValidationReport { ok: false, findings };
    }

    let walls = |p: &Id| d.pieces[p].walls.len();
    for (p, q) in &m.pieces {
        if walls(p) != walls(q) || d.pieces[p].tangle.strands.len() != d.pieces[q].tangle.strands.len() {
            err("imap", format!("piece {p} and its image {q} differ in walls or strands"));
        }
    }
    for (h, g) in &m.pairs {
        let (a, b) = (&d.pairs[h], &d.pairs[g]);
        let ends = |p: &crate::diagram::SpherePair| {
            let mut v = [p.a.piece.clone(), p.b.piece.clone()];
            v.sort();
            v
        };
        let mut mapped = [m.pieces[&a.a.piece].clone(), m.pieces[&a.b.piece].clone()];
        mapped.sort();
        if mapped != ends(b) || a.matching.len() != b.matching.len() {
            err("imap", format!("pair {h} and its image {g} join different pieces or carry different point counts"));
        }
    }
    let passes = |c: &Id| -> BTreeMap<Id, usize> {
        let mut out = BTreeMap::new();
        for ((h, cc), v) in d.passages() {
            if &cc == c && v != 0 {
                *out.entry(h).or_default() += v.unsigned_abs() as usize;
            }
        }
        out
    };
    for (c, e) in &m.circles {
        let (a, b) = (&d.circles[c], &d.circles[e]);
        if a.framing != b.framing || a.dotted != b.dotted {
            err("imap", format!("circle {c} (framing {}) maps to {e} (framing {})", a.framing, b.framing));
        }
        if a.strands.len() != b.strands.len() {
            err("imap", format!("circle {c} and its image {e} have different strand counts"));
        }
        let img: BTreeMap<Id, usize> = passes(c).into_iter().map(|(h, v)| (m.pairs[&h].clone(), v)).collect();
        if img != passes(e) {
            err("imap", format!("circle {c} and its image {e} pass through different pairs"));
        }
    }
    let strip = |items: &[BoundaryItem], map: bool| -> Vec<(u8, Id, usize)> {
        let mut v: Vec<(u8, Id, usize)> = items
            .iter()
            .map(|b| match b {
                BoundaryItem::FramingParallel { circle, .. } => (0, if map { m.circles[circle].clone() } else { circle.clone() }, 0),
                BoundaryItem::WallCurve { pair, index } => (1, if map { m.pairs[pair].clone() } else { pair.clone() }, *index),
            })
            .collect();
        v.sort();
        v
    };
    for (f, g) in &m.surfaces {
        let (a, b) = (&d.surfaces[f], &d.surfaces[g]);
        if a.genus != b.genus {
            err("imap", format!("surface {f} (genus {}) maps to {g} (genus {})", a.genus, b.genus));
        }
        if strip(&a.boundary, true) != strip(&b.boundary, false) {
            err("imap", format!("boundary of surface {f} does not map to that of {g}"));
        }
    }
    let ok = findings.iter().all(|f| f.severity != Severity::Error);
    ValidationReport { ok, findings }
}

#[cfg(test)]
mod tests;
