//! The line-oriented `msd 1` text format.
//!
//! ```text
//! msd 1
//! piece P1
//! wall P1.W1 points=2
//! pair H1 a=P1.W1 b=P1.W2 match=0,1 orient=+
//! crossing P1.X1 ends=S1:0,S2:1,S1:1,S2:0 over=2 sign=+
//! strand P1.S1 path=X1,X2 from=W1:0 to=-
//! circle C1 strands=P1.S1 framing=1
//! surface F1 genus=0 boundary=C1:+,WH1:0
//! sinks 1
//! imap pieces=P1>P1 pairs= circles=C1>C1 surfaces= sinks=0>0
//! annotation one_handles=0 three_handles=0 sinks=1
//! ```
//!
//! Records are written sorted by kind and then by id. Crossing roles are not
//! stored in strand paths; they are recovered from the `ends` of each
//! crossing, whose odd or even positions (`over=1|2`) hold the over arc.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::diagram::{
    Annotation, BoundaryItem, Diagram, GluedCircle, InternalMaps, Piece, Sinks, SpanningSurface, SpherePair,
    SphereWall, StrandRef, WallRef,
};
use crate::id::Id;
use crate::tangle::{ArcEnd, Crossing, Role, Sign, Strand, Visit, WallPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: found {token:?}, expected {expected}")]
pub struct ParseError {
    pub line: usize,
    pub token: String,
    pub expected: String,
}

fn err<T>(line: usize, token: impl Into<String>, expected: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, token: token.into(), expected: expected.into() })
}

const KINDS: [&str; 10] =
    ["piece", "wall", "pair", "crossing", "strand", "circle", "surface", "sinks", "imap", "annotation"];

pub fn serialize(d: &Diagram) -> String {
    let mut out = String::from("msd 1\n");
    let w = &mut out;
    for pid in d.pieces.keys() {
        let _ = writeln!(w, "piece {pid}");
    }
    for (pid, p) in &d.pieces {
        for (wid, wall) in &p.walls {
            let _ = writeln!(w, "wall {pid}.{wid} points={}", wall.points);
        }
    }
    for (hid, h) in &d.pairs {
        let _ = writeln!(
            w,
            "pair {hid} a={}.{} b={}.{} match={} orient={}",
            h.a.piece,
            h.a.wall,
            h.b.piece,
            h.b.wall,
            join(h.matching.iter()),
            h.orientation
        );
    }
    for (pid, p) in &d.pieces {
        for (xid, x) in &p.tangle.crossings {
            let ends = p
                .tangle
                .ends(xid)
                .map(|e| e.iter().map(|a| format!("{}:{}", a.strand, a.arc)).collect::<Vec<_>>().join(","))
                .unwrap_or_default();
            let _ = writeln!(w, "crossing {pid}.{xid} ends={ends} over=2 sign={}", x.sign);
        }
    }
    for (pid, p) in &d.pieces {
        for (sid, s) in &p.tangle.strands {
            let _ = writeln!(
                w,
                "strand {pid}.{sid} path={} from={} to={}",
                join(s.path.iter().map(|v| &v.crossing)),
                endpoint(&s.from),
                endpoint(&s.to)
            );
        }
    }
    for (cid, c) in &d.circles {
        let strands = join(c.strands.iter().map(|r| format!("{}.{}", r.piece, r.strand)));
        let _ = write!(w, "circle {cid} strands={strands} framing={}", c.framing);
        if c.dotted {
            let _ = write!(w, " dotted=1");
        }
        w.push('\n');
    }
    for (fid, f) in &d.surfaces {
        let items = join(f.boundary.iter().map(|b| match b {
            BoundaryItem::FramingParallel { circle, sign } => format!("{circle}:{sign}"),
            BoundaryItem::WallCurve { pair, index } => format!("W{pair}:{index}"),
        }));
        let _ = writeln!(w, "surface {fid} genus={} boundary={items}", f.genus);
    }
    let _ = write!(w, "sinks {}", d.sinks.count);
    if let Some(inc) = &d.sinks.incidence {
        let rows: Vec<String> = inc.values().map(|r| join(r.iter())).collect();
        let _ = write!(w, " incidence={}", rows.join(";"));
    }
    w.push('\n');
    if let Some(m) = &d.internal_maps {
        let perm = |m: &BTreeMap<Id, Id>| join(m.iter().map(|(a, b)| format!("{a}>{b}")));
        let _ = writeln!(
            w,
            "imap pieces={} pairs={} circles={} surfaces={} sinks={}",
            perm(&m.pieces),
            perm(&m.pairs),
            perm(&m.circles),
            perm(&m.surfaces),
            join(m.sinks.iter().enumerate().map(|(a, b)| format!("{a}>{b}")))
        );
    }
    if let Some(a) = &d.annotation {
        let _ = writeln!(w, "annotation one_handles={} three_handles={} sinks={}", a.one_handles, a.three_handles, a.sinks);
    }
    out
}

fn join<T: fmt::Display>(it: impl Iterator<Item = T>) -> String {
    it.map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn endpoint(e: &Option<WallPoint>) -> String {
    match e {
        Some(wp) => format!("{}:{}", wp.wall, wp.point),
        None => "-".into(),
    }
}

struct Line<'a> {
    no: usize,
    words: Vec<&'a str>,
}

impl<'a> Line<'a> {
    /// Positional word `i` (0 is the record kind).
    fn word(&self, i: usize, expected: &str) -> Result<&'a str, ParseError> {
        match self.words.get(i) {
            Some(w) => Ok(w),
            None => err(self.no, "end of line", expected),
        }
    }

    fn fields(&self, from: usize, keys: &[&str], optional: &[&str]) -> Result<BTreeMap<&'a str, &'a str>, ParseError> {
        let mut m = BTreeMap::new();
        for w in self.words.iter().skip(from) {
            let Some((k, v)) = w.split_once('=') else {
                return err(self.no, *w, "key=value");
            };
            if !keys.contains(&k) && !optional.contains(&k) {
                return err(self.no, *w, format!("one of the keys {}", keys.join(", ")));
            }
            if m.insert(k, v).is_some() {
                return err(self.no, *w, format!("{k} given once"));
            }
        }
        for k in keys {
            if !m.contains_key(k) {
                return err(self.no, self.words.join(" "), format!("field {k}="));
            }
        }
        Ok(m)
    }

    fn id(&self, s: &str) -> Result<Id, ParseError> {
        if Id::is_well_formed(s) {
            Ok(Id::from(s))
        } else {
            err(self.no, s, "identifier [A-Za-z0-9_]+")
        }
    }

    fn qualified(&self, s: &str) -> Result<(Id, Id), ParseError> {
        match s.split_once('.') {
            Some((a, b)) => Ok((self.id(a)?, self.id(b)?)),
            None => err(self.no, s, "<piece>.<id>"),
        }
    }

    fn int<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T, ParseError> {
        s.parse().or_else(|_| err(self.no, s, what))
    }

    fn sign(&self, s: &str) -> Result<Sign, ParseError> {
        match s {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            _ => err(self.no, s, "+ or -"),
        }
    }

    fn list(s: &str) -> Vec<&str> {
        if s.is_empty() {
            vec![]
        } else {
            s.split(',').collect()
        }
    }

    fn endpoint(&self, s: &str) -> Result<Option<WallPoint>, ParseError> {
        if s == "-" {
            return Ok(None);
        }
        let Some((w, p)) = s.split_once(':') else { return err(self.no, s, "<wall>:<point> or -") };
        Ok(Some(WallPoint { wall: self.id(w)?, point: self.int(p, "point index")? }))
    }
}

struct PendingCrossing {
    line: usize,
    ends: Vec<ArcEnd>,
    over: usize,
}

pub fn parse(text: &str) -> Result<Diagram, ParseError> {
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        if !words.is_empty() {
            lines.push(Line { no: i + 1, words });
        }
    }
    let Some(head) = lines.first() else { return err(1, "end of file", "header `msd 1`") };
    if head.words != ["msd", "1"] {
        return err(head.no, head.words.join(" "), "header `msd 1`");
    }

    let mut d = Diagram { pieces: BTreeMap::new(), sinks: Sinks { count: 0, incidence: None }, ..Diagram::empty() };
    let mut pending: BTreeMap<(Id, Id), PendingCrossing> = BTreeMap::new();
    let mut strand_lines: BTreeMap<(Id, Id), usize> = BTreeMap::new();
    let mut incidence_rows: Option<(usize, Vec<Vec<i64>>)> = None;
    let mut seen_sinks = false;

    for l in &lines[1..] {
        let kind = l.words[0];
        if !KINDS.contains(&kind) {
            return err(l.no, kind, format!("record kind ({})", KINDS.join(", ")));
        }
        let dup = |l: &Line, what: &str| err(l.no, l.words[1], format!("{what} declared once"));
        match kind {
            "piece" => {
                let id = l.id(l.word(1, "piece id")?)?;
                if l.words.len() > 2 {
                    return err(l.no, l.words[2], "end of line");
                }
                if d.pieces.insert(id, Piece::default()).is_some() {
                    return dup(l, "piece");
                }
            }
            "wall" => {
                let (p, w) = l.qualified(l.word(1, "<piece>.<wall>")?)?;
                let f = l.fields(2, &["points"], &[])?;
                let points = l.int(f["points"], "point count")?;
                let piece = piece_mut(&mut d, &p, l)?;
                if piece.walls.insert(w, SphereWall { points }).is_some() {
                    return dup(l, "wall");
                }
            }
            "pair" => {
                let id = l.id(l.word(1, "pair id")?)?;
                let f = l.fields(2, &["a", "b", "match", "orient"], &[])?;
                let (ap, aw) = l.qualified(f["a"])?;
                let (bp, bw) = l.qualified(f["b"])?;
                let matching = Line::list(f["match"]).iter().map(|s| l.int(s, "point index")).collect::<Result<_, _>>()?;
                let h = SpherePair {
                    a: WallRef { piece: ap, wall: aw },
                    b: WallRef { piece: bp, wall: bw },
                    matching,
                    orientation: l.sign(f["orient"])?,
                };
                if d.pairs.insert(id, h).is_some() {
                    return dup(l, "pair");
                }
            }
            "crossing" => {
                let (p, x) = l.qualified(l.word(1, "<piece>.<crossing>")?)?;
                let f = l.fields(2, &["ends", "over", "sign"], &[])?;
                let ends: Vec<ArcEnd> = Line::list(f["ends"])
                    .iter()
                    .map(|e| match e.split_once(':') {
                        Some((s, a)) => Ok(ArcEnd { strand: l.id(s)?, arc: l.int(a, "arc index")? }),
                        None => err(l.no, *e, "<strand>:<arc>"),
                    })
                    .collect::<Result<_, _>>()?;
                if ends.len() != 4 {
                    return err(l.no, f["ends"], "four arc ends");
                }
                let over = match f["over"] {
                    "1" => 1,
                    "2" => 2,
                    o => return err(l.no, o, "over=1 or over=2"),
                };
                let sign = l.sign(f["sign"])?;
                let piece = piece_mut(&mut d, &p, l)?;
                if piece.tangle.crossings.insert(x.clone(), Crossing { sign }).is_some() {
                    return dup(l, "crossing");
                }
                pending.insert((p, x), PendingCrossing { line: l.no, ends, over });
            }
            "strand" => {
                let (p, s) = l.qualified(l.word(1, "<piece>.<strand>")?)?;
                let f = l.fields(2, &["path", "from", "to"], &[])?;
                let path = Line::list(f["path"])
                    .iter()
                    .map(|x| Ok(Visit::new(l.id(x)?, Role::Over)))
                    .collect::<Result<Vec<_>, ParseError>>()?;
                let strand = Strand { path, from: l.endpoint(f["from"])?, to: l.endpoint(f["to"])? };
                let piece = piece_mut(&mut d, &p, l)?;
                if piece.tangle.strands.insert(s.clone(), strand).is_some() {
                    return dup(l, "strand");
                }
                strand_lines.insert((p, s), l.no);
            }
            "circle" => {
                let id = l.id(l.word(1, "circle id")?)?;
                let f = l.fields(2, &["strands", "framing"], &["dotted"])?;
                let strands = Line::list(f["strands"])
                    .iter()
                    .map(|s| l.qualified(s).map(|(p, s)| StrandRef { piece: p, strand: s }))
                    .collect::<Result<_, _>>()?;
                let dotted = match f.get("dotted") {
                    None | Some(&"0") => false,
                    Some(&"1") => true,
                    Some(o) => return err(l.no, *o, "dotted=0 or dotted=1"),
                };
                let c = GluedCircle { strands, framing: l.int(f["framing"], "integer framing")?, dotted };
                if d.circles.insert(id, c).is_some() {
                    return dup(l, "circle");
                }
            }
            "surface" => {
                let id = l.id(l.word(1, "surface id")?)?;
                let f = l.fields(2, &["genus", "boundary"], &[])?;
                let boundary = Line::list(f["boundary"])
                    .iter()
                    .map(|item| {
                        let Some((a, b)) = item.rsplit_once(':') else {
                            return err(l.no, *item, "<circle>:<sign> or W<pair>:<index>");
                        };
                        if b == "+" || b == "-" {
                            Ok(BoundaryItem::FramingParallel { circle: l.id(a)?, sign: l.sign(b)? })
                        } else {
                            let Some(pair) = a.strip_prefix('W') else {
                                return err(l.no, *item, "<circle>:<sign> or W<pair>:<index>");
                            };
                            Ok(BoundaryItem::WallCurve { pair: l.id(pair)?, index: l.int(b, "curve index")? })
                        }
                    })
                    .collect::<Result<_, _>>()?;
                let s = SpanningSurface { genus: l.int(f["genus"], "genus")?, boundary };
                if d.surfaces.insert(id, s).is_some() {
                    return dup(l, "surface");
                }
            }
            "sinks" => {
                if seen_sinks {
                    return err(l.no, "sinks", "one sinks record");
                }
                seen_sinks = true;
                d.sinks.count = l.int(l.word(1, "sink count")?, "sink count")?;
                let f = l.fields(2, &[], &["incidence"])?;
                if let Some(inc) = f.get("incidence") {
                    let rows = if inc.is_empty() {
                        vec![]
                    } else {
                        inc.split(';')
                            .map(|r| Line::list(r).iter().map(|v| l.int(v, "integer")).collect::<Result<Vec<i64>, _>>())
                            .collect::<Result<Vec<_>, _>>()?
                    };
                    incidence_rows = Some((l.no, rows));
                }
            }
            "imap" => {
                if d.internal_maps.is_some() {
                    return err(l.no, "imap", "one imap record");
                }
                let f = l.fields(1, &["pieces", "pairs", "circles", "surfaces", "sinks"], &[])?;
                let perm = |s: &str| -> Result<BTreeMap<Id, Id>, ParseError> {
                    let mut m = BTreeMap::new();
                    for e in Line::list(s) {
                        let Some((a, b)) = e.split_once('>') else { return err(l.no, e, "<from>><to>") };
                        if m.insert(l.id(a)?, l.id(b)?).is_some() {
                            return err(l.no, e, "each source once");
                        }
                    }
                    Ok(m)
                };
                let mut sinks = Vec::new();
                for (k, e) in Line::list(f["sinks"]).iter().enumerate() {
                    let Some((a, b)) = e.split_once('>') else { return err(l.no, *e, "<from>><to>") };
                    if l.int::<usize>(a, "sink index")? != k {
                        return err(l.no, *e, format!("sink {k} listed in order"));
                    }
                    sinks.push(l.int(b, "sink index")?);
                }
                d.internal_maps = Some(InternalMaps {
                    pieces: perm(f["pieces"])?,
                    pairs: perm(f["pairs"])?,
                    circles: perm(f["circles"])?,
                    surfaces: perm(f["surfaces"])?,
                    sinks,
                });
            }
            "annotation" => {
                if d.annotation.is_some() {
                    return err(l.no, "annotation", "one annotation record");
                }
                let f = l.fields(1, &["one_handles", "three_handles", "sinks"], &[])?;
                d.annotation = Some(Annotation {
                    one_handles: l.int(f["one_handles"], "count")?,
                    three_handles: l.int(f["three_handles"], "count")?,
                    sinks: l.int(f["sinks"], "count")?,
                });
            }
            _ => unreachable!(),
        }
    }
    let last = lines.last().map_or(1, |l| l.no);
    if !seen_sinks {
        return err(last, "end of file", "a sinks record");
    }
    if let Some((no, rows)) = incidence_rows {
        if rows.len() != d.surfaces.len() {
            return err(no, format!("{} rows", rows.len()), format!("{} incidence rows, one per surface", d.surfaces.len()));
        }
        d.sinks.incidence = Some(d.surfaces.keys().cloned().zip(rows).collect());
    }
    assign_roles(&mut d, &pending, &strand_lines)?;
    d.normalize();
    Ok(d)
}

fn piece_mut<'d>(d: &'d mut Diagram, p: &Id, l: &Line) -> Result<&'d mut Piece, ParseError> {
    match d.pieces.get_mut(p) {
        Some(piece) => Ok(piece),
        None => err(l.no, p.as_str(), "a declared piece"),
    }
}

/// Recover over/under roles of every visit from the crossings' arc ends.
fn assign_roles(
    d: &mut Diagram,
    pending: &BTreeMap<(Id, Id), PendingCrossing>,
    strand_lines: &BTreeMap<(Id, Id), usize>,
) -> Result<(), ParseError> {
    for (pid, piece) in d.pieces.iter_mut() {
        let t = &mut piece.tangle;
        let mut visits: BTreeMap<Id, Vec<(Id, usize)>> = BTreeMap::new();
        for (sid, s) in &t.strands {
            for (i, v) in s.path.iter().enumerate() {
                if !t.crossings.contains_key(&v.crossing) {
                    let no = strand_lines[&(pid.clone(), sid.clone())];
                    return err(no, v.crossing.as_str(), format!("a crossing declared in piece {pid}"));
                }
                visits.entry(v.crossing.clone()).or_default().push((sid.clone(), i));
            }
        }
        let mut roles: Vec<(Id, usize, Role)> = Vec::new();
        for x in t.crossings.keys() {
            let pc = &pending[&(pid.clone(), x.clone())];
            let vs = visits.get(x).map(|v| v.as_slice()).unwrap_or(&[]);
            if vs.len() != 2 {
                return err(pc.line, x.as_str(), format!("a crossing visited exactly twice (found {})", vs.len()));
            }
            let sign = t.crossings[x].sign;
            let next_arc = |s: &Strand, i: usize| if s.is_closed() { (i + 1) % s.path.len() } else { i + 1 };
            let visit_at = |e: &ArcEnd| -> Option<usize> {
                vs.iter().find(|(s, i)| *s == e.strand && *i == e.arc).map(|(_, i)| *i)
            };
            let mut found = None;
            // rotations that put an under end first
            for r in 0..4 {
                let is_over = |k: usize| (k % 2 == 0) == (pc.over == 1);
                if is_over(r) {
                    continue;
                }
                let e: Vec<&ArcEnd> = (0..4).map(|k| &pc.ends[(r + k) % 4]).collect();
                let (ui, uo, oi, oo) = match sign {
                    Sign::Plus => (e[0], e[2], e[3], e[1]),
                    Sign::Minus => (e[0], e[2], e[1], e[3]),
                };
                let (Some(iu), Some(io)) = (visit_at(ui), visit_at(oi)) else { continue };
                if ui.strand == oi.strand && iu == io {
                    continue;
                }
                let (su, so) = (&t.strands[&ui.strand], &t.strands[&oi.strand]);
                let out_ok = uo.strand == ui.strand
                    && uo.arc == next_arc(su, iu)
                    && oo.strand == oi.strand
                    && oo.arc == next_arc(so, io);
                if out_ok {
                    found = Some([(ui.strand.clone(), iu, Role::Under), (oi.strand.clone(), io, Role::Over)]);
                    break;
                }
            }
            let Some(pair) = found else {
                let ends = pc.ends.iter().map(|a| format!("{}:{}", a.strand, a.arc)).collect::<Vec<_>>().join(",");
                return err(pc.line, ends, format!("arc ends of {x} consistent with the strand paths and sign {sign}"));
            };
            roles.extend(pair);
        }
        for (sid, i, role) in roles {
            t.strands.get_mut(&sid).unwrap().path[i].role = role;
        }
    }
    Ok(())
}
