use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{BoundaryItem, Diagram, GluedCircle, StrandRef, WallRef};
use crate::id::Id;
use crate::tangle::{Sign, WallPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub location: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    fn from_findings(findings: Vec<Finding>) -> Self {
        let ok = findings.iter().all(|f| f.severity != Severity::Error);
        ValidationReport { ok, findings }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", if self.ok { "ok" } else { "invalid" })?;
        for x in &self.findings {
            let sev = match x.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{sev} [{}]: {}", x.location, x.message)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Collector(Vec<Finding>);

impl Collector {
    fn error(&mut self, loc: impl Into<String>, msg: impl Into<String>) {
        self.0.push(Finding { severity: Severity::Error, location: loc.into(), message: msg.into() });
    }

    fn warn(&mut self, loc: impl Into<String>, msg: impl Into<String>) {
        self.0.push(Finding { severity: Severity::Warning, location: loc.into(), message: msg.into() });
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircleError {
    #[error("strand chain starting at {start} does not close (stuck at {at})")]
    NotClosing { start: StrandRef, at: String },
}

impl Diagram {
    /// Check every structural invariant; violations become findings.
    pub fn validate(&self) -> ValidationReport {
        let mut c = Collector::default();
        if self.pieces.is_empty() {
            c.error("diagram", "no pieces: a closed 4-manifold needs at least one 0-handle");
        }
        let all_ids = self
            .pieces
            .keys()
            .chain(self.pairs.keys())
            .chain(self.circles.keys())
            .chain(self.surfaces.keys());
        for id in all_ids {
            if !Id::is_well_formed(id.as_str()) {
                c.error(id.to_string(), "identifier must be non-empty [A-Za-z0-9_]");
            }
        }
        self.check_pieces(&mut c);
        self.check_pairs(&mut c);
        self.check_circles(&mut c);
        self.check_surfaces(&mut c);
        self.check_sinks(&mut c);
        self.check_maps_domain(&mut c);
        self.check_linking_parity(&mut c);
        if let Some(a) = &self.annotation {
            let dotted = self.circles.values().filter(|c| c.dotted).count();
            if dotted != a.one_handles {
                c.error("annotation", format!("one_handles={} but {dotted} dotted circles", a.one_handles));
            }
            if a.sinks != self.sinks.count {
                c.error("annotation", format!("sinks={} but diagram has {}", a.sinks, self.sinks.count));
            }
        }
        ValidationReport::from_findings(c.0)
    }

    fn check_pieces(&self, c: &mut Collector) {
        for (pid, piece) in &self.pieces {
            for p in piece.tangle.problems() {
                c.error(format!("piece {pid}"), p);
            }
            let mut used: BTreeMap<&WallPoint, usize> = BTreeMap::new();
            for (sid, s) in &piece.tangle.strands {
                for wp in s.from.iter().chain(s.to.iter()) {
                    match piece.walls.get(&wp.wall) {
                        None => c.error(format!("strand {pid}.{sid}"), format!("unknown wall {}", wp.wall)),
                        Some(w) if wp.point >= w.points => c.error(
                            format!("strand {pid}.{sid}"),
                            format!("wall {} has no point {}", wp.wall, wp.point),
                        ),
                        Some(_) => *used.entry(wp).or_insert(0) += 1,
                    }
                }
            }
            for (wid, w) in &piece.walls {
                for k in 0..w.points {
                    let wp = WallPoint { wall: wid.clone(), point: k };
                    match used.get(&wp).copied().unwrap_or(0) {
                        1 => {}
                        n => c.error(
                            format!("wall {pid}.{wid}"),
                            format!("marked point {k} used by {n} strand ends (expected 1)"),
                        ),
                    }
                }
            }
        }
    }

    fn wall_points(&self, w: &WallRef) -> Option<usize> {
        self.pieces.get(&w.piece)?.walls.get(&w.wall).map(|x| x.points)
    }

    fn check_pairs(&self, c: &mut Collector) {
        let mut refs: BTreeMap<WallRef, usize> = BTreeMap::new();
        for (hid, pair) in &self.pairs {
            let loc = format!("pair {hid}");
            if pair.a == pair.b {
                c.error(&loc, "wall_a equals wall_b");
            }
            let (na, nb) = (self.wall_points(&pair.a), self.wall_points(&pair.b));
            if na.is_none() {
                c.error(&loc, format!("unknown wall {}", pair.a));
            }
            if nb.is_none() {
                c.error(&loc, format!("unknown wall {}", pair.b));
            }
            if let (Some(na), Some(nb)) = (na, nb) {
                if na != nb || pair.matching.len() != na {
                    c.error(&loc, format!("walls carry {na} and {nb} points, matching has {}", pair.matching.len()));
                } else {
                    let img: BTreeSet<usize> = pair.matching.iter().copied().collect();
                    if img.len() != na || img.iter().any(|&j| j >= nb) {
                        c.error(&loc, "matching is not a bijection");
                    }
                }
            }
            if pair.is_internal() && pair.orientation == Sign::Minus {
                c.warn(&loc, "orientation-reversing identification inside one piece (non-orientable 1-handle)");
            }
            *refs.entry(pair.a.clone()).or_insert(0) += 1;
            *refs.entry(pair.b.clone()).or_insert(0) += 1;
        }
        for (pid, piece) in &self.pieces {
            for wid in piece.walls.keys() {
                let w = WallRef { piece: pid.clone(), wall: wid.clone() };
                match refs.get(&w).copied().unwrap_or(0) {
                    1 => {}
                    n => c.error(format!("wall {w}"), format!("referenced by {n} pairs (expected 1)")),
                }
            }
        }
    }

    fn check_circles(&self, c: &mut Collector) {
        let mut owner: BTreeMap<StrandRef, Vec<&Id>> = BTreeMap::new();
        for (cid, circle) in &self.circles {
            let loc = format!("circle {cid}");
            if circle.strands.is_empty() {
                c.error(&loc, "circle has no strands");
                continue;
            }
            if circle.dotted && circle.framing != 0 {
                c.error(&loc, "dotted circle must be 0-framed");
            }
            let n = circle.strands.len();
            for (i, sref) in circle.strands.iter().enumerate() {
                owner.entry(sref.clone()).or_default().push(cid);
                let Some(s) = self.pieces.get(&sref.piece).and_then(|p| p.tangle.strands.get(&sref.strand)) else {
                    c.error(&loc, format!("unknown strand {sref}"));
                    continue;
                };
                if s.is_closed() {
                    if n != 1 {
                        c.error(&loc, format!("closed strand {sref} in a multi-strand circle"));
                    }
                    continue;
                }
                let Some(to) = &s.to else { continue };
                let next = &circle.strands[(i + 1) % n];
                let here = WallRef { piece: sref.piece.clone(), wall: to.wall.clone() };
                let pair_name = self.wall_pair(&here).map(|(h, _)| h.to_string()).unwrap_or_else(|| "?".into());
                let Some((np, nwp)) = self.across(&sref.piece, to) else {
                    c.error(&loc, format!("strand {sref} ends on unpaired wall {here}"));
                    continue;
                };
                let next_from = self
                    .pieces
                    .get(&next.piece)
                    .and_then(|p| p.tangle.strands.get(&next.strand))
                    .and_then(|s| s.from.clone());
                if np != next.piece || next_from.as_ref() != Some(&nwp) {
                    c.error(
                        &loc,
                        format!("cycle fails to close across pair {pair_name}: {sref} leaves at {here}:{} but {next} does not continue from {np}.{}:{}", to.point, nwp.wall, nwp.point),
                    );
                }
            }
        }
        for (pid, piece) in &self.pieces {
            for sid in piece.tangle.strands.keys() {
                let r = StrandRef { piece: pid.clone(), strand: sid.clone() };
                match owner.get(&r).map(|v| v.len()).unwrap_or(0) {
                    1 => {}
                    n => c.error(format!("strand {r}"), format!("belongs to {n} circles (expected 1)")),
                }
            }
        }
    }

    fn check_surfaces(&self, c: &mut Collector) {
        let mut curves: BTreeMap<(Id, usize), Vec<&Id>> = BTreeMap::new();
        for (fid, s) in &self.surfaces {
            let loc = format!("surface {fid}");
            for b in &s.boundary {
                match b {
                    BoundaryItem::FramingParallel { circle, .. } => {
                        if !self.circles.contains_key(circle) {
                            c.error(&loc, format!("unknown circle {circle}"));
                        }
                    }
                    BoundaryItem::WallCurve { pair, index } => {
                        if !self.pairs.contains_key(pair) {
                            c.error(&loc, format!("unknown pair {pair}"));
                        }
                        curves.entry((pair.clone(), *index)).or_default().push(fid);
                    }
                }
            }
        }
        for ((pair, index), owners) in curves {
            if owners.len() != 2 || owners[0] != owners[1] {
                c.error(
                    format!("pair {pair}"),
                    format!("wall curve {index} must appear on both sides within one surface (found {})", owners.len()),
                );
            }
        }
    }

    fn check_sinks(&self, c: &mut Collector) {
        if !self.pieces.is_empty() && self.sinks.count == 0 {
            c.error("sinks", "at least one sink is required");
        }
        if let Some(inc) = &self.sinks.incidence {
            let keys: BTreeSet<&Id> = inc.keys().collect();
            let surf: BTreeSet<&Id> = self.surfaces.keys().collect();
            if keys != surf {
                c.error("sinks", "incidence rows must be exactly one per surface");
            }
            for (k, row) in inc {
                if row.len() != self.sinks.count {
                    c.error("sinks", format!("incidence row {k} has {} entries, expected {}", row.len(), self.sinks.count));
                }
            }
        }
    }

    fn check_maps_domain(&self, c: &mut Collector) {
        let Some(m) = &self.internal_maps else { return };
        fn same<T>(c: &mut Collector, what: &str, map: &BTreeMap<Id, Id>, keys: &BTreeMap<Id, T>) {
            let dom: BTreeSet<&Id> = map.keys().collect();
            let want: BTreeSet<&Id> = keys.keys().collect();
            if dom != want || map.values().any(|v| !keys.contains_key(v)) {
                c.error("imap", format!("{what} map must be defined exactly on the {what} of the diagram"));
            }
        }
        same(c, "pieces", &m.pieces, &self.pieces);
        same(c, "pairs", &m.pairs, &self.pairs);
        same(c, "circles", &m.circles, &self.circles);
        same(c, "surfaces", &m.surfaces, &self.surfaces);
        if m.sinks.len() != self.sinks.count || m.sinks.iter().any(|&s| s >= self.sinks.count) {
            c.error("imap", "sinks map must be defined exactly on the sinks of the diagram");
        }
    }

    fn check_linking_parity(&self, c: &mut Collector) {
        let ids: Vec<&Id> = self.circles.keys().collect();
        let n = ids.len();
        let mut total = vec![vec![0i64; n]; n];
        for (pid, piece) in &self.pieces {
            let mut group = BTreeMap::new();
            for (k, cid) in ids.iter().enumerate() {
                for s in &self.circles[*cid].strands {
                    if &s.piece == pid {
                        group.insert(s.strand.clone(), k);
                    }
                }
            }
            let m = piece.tangle.signed_sum_matrix(&group, n);
            for i in 0..n {
                for j in 0..n {
                    total[i][j] += m[i][j];
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if total[i][j] % 2 != 0 {
                    c.error(
                        format!("circles {} {}", ids[i], ids[j]),
                        "odd signed crossing sum: linking number undefined",
                    );
                }
            }
        }
    }

    /// Surfaces must be spheres with holes whose boundaries are framing
    /// parallels or matched wall curves.
    pub fn check_admissible(&self) -> ValidationReport {
        let base = self.validate();
        let mut c = Collector(base.findings);
        for (fid, s) in &self.surfaces {
            if s.genus != 0 {
                c.error(format!("surface {fid}"), format!("genus {} surface is not a sphere with deleted disks", s.genus));
            }
        }
        ValidationReport::from_findings(c.0)
    }

    /// Recompose strands into closed circles by following pair identifications.
    /// Framings are taken from the circle that owns the first strand.
    pub fn glued_circles(&self) -> Result<Vec<GluedCircle>, CircleError> {
        let owner = self.strand_owner();
        let mut seen: BTreeSet<StrandRef> = BTreeSet::new();
        let mut out = Vec::new();
        for (pid, piece) in &self.pieces {
            for sid in piece.tangle.strands.keys() {
                let start = StrandRef { piece: pid.clone(), strand: sid.clone() };
                if seen.contains(&start) {
                    continue;
                }
                let cycle = self.follow(&start)?;
                seen.extend(cycle.iter().cloned());
                let (framing, dotted) = owner
                    .get(&start)
                    .and_then(|c| self.circles.get(c))
                    .map(|c| (c.framing, c.dotted))
                    .unwrap_or((0, false));
                let mut g = GluedCircle { strands: cycle, framing, dotted };
                if let Some(k) = (0..g.strands.len()).min_by(|&a, &b| g.strands[a].cmp(&g.strands[b])) {
                    g.strands.rotate_left(k);
                }
                out.push(g);
            }
        }
        Ok(out)
    }

    fn follow(&self, start: &StrandRef) -> Result<Vec<StrandRef>, CircleError> {
        let mut cycle = vec![start.clone()];
        let mut cur = start.clone();
        let limit: usize = self.pieces.values().map(|p| p.tangle.strands.len()).sum();
        loop {
            let strand = &self.pieces[&cur.piece].tangle.strands[&cur.strand];
            let Some(to) = &strand.to else {
                if strand.is_closed() {
                    return Ok(cycle);
                }
                return Err(CircleError::NotClosing { start: start.clone(), at: cur.to_string() });
            };
            let stuck = || CircleError::NotClosing { start: start.clone(), at: format!("{}.{}:{}", cur.piece, to.wall, to.point) };
            let (np, nwp) = self.across(&cur.piece, to).ok_or_else(stuck)?;
            let next = self.pieces[&np]
                .tangle
                .strands
                .iter()
                .find(|(_, s)| s.from.as_ref() == Some(&nwp))
                .map(|(sid, _)| StrandRef { piece: np.clone(), strand: sid.clone() })
                .ok_or_else(stuck)?;
            if &next == start {
                return Ok(cycle);
            }
            if cycle.len() > limit {
                return Err(stuck());
            }
            cycle.push(next.clone());
            cur = next;
        }
    }
}
