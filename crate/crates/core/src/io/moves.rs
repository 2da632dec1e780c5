//! Move logs: one `move <tag> <args>` line per Kirby move, and one
//! `rmove <piece> <tag> <args>` line per Reidemeister move. Isomorphism
//! witnesses are written as side-prefixed `rmove` lines plus `map` lines.

use crate::calculus::{Band, BlowUpSite, KirbyMove};
use crate::diagram::{StrandRef, WallRef};
use crate::equivalence::Isomorphism;
use crate::id::Id;
use crate::io::msd::ParseError;
use crate::tangle::{ReidemeisterMove, Sign};

pub fn format_move(m: &KirbyMove) -> String {
    match m {
        KirbyMove::BlowUp { site, sign } => format!("move blowup {} {} {sign}", site.piece, site.region),
        KirbyMove::BlowDown { circle } => format!("move blowdown {circle}"),
        KirbyMove::HandleSlide { moving, over, band } => {
            let mut s = format!(
                "move slide {moving} {over} {} {} {}",
                band.arc,
                band.target_arc,
                if band.reversed { '-' } else { '+' }
            );
            if let Some(st) = &band.strand {
                s.push_str(&format!(" {st}"));
            }
            s
        }
        KirbyMove::MergePieces { pair } => format!("move merge {pair}"),
        KirbyMove::DeleteSurface { surface } => format!("move delsurf {surface}"),
    }
}

pub fn format_log(moves: &[KirbyMove]) -> String {
    moves.iter().map(|m| format_move(m) + "\n").collect()
}

fn bad<T>(line: usize, token: &str, expected: &str) -> Result<T, ParseError> {
    Err(ParseError { line, token: token.to_string(), expected: expected.to_string() })
}

fn id(line: usize, s: &str) -> Result<Id, ParseError> {
    if Id::is_well_formed(s) {
        Ok(Id::from(s))
    } else {
        bad(line, s, "identifier")
    }
}

fn num(line: usize, s: &str) -> Result<usize, ParseError> {
    s.parse().or_else(|_| bad(line, s, "non-negative integer"))
}

fn sign(line: usize, s: &str) -> Result<Sign, ParseError> {
    match s {
        "+" => Ok(Sign::Plus),
        "-" => Ok(Sign::Minus),
        _ => bad(line, s, "+ or -"),
    }
}

fn flag(line: usize, s: &str) -> Result<bool, ParseError> {
    match s {
        "1" => Ok(true),
        "0" => Ok(false),
        _ => bad(line, s, "0 or 1"),
    }
}

pub fn parse_move(line: usize, text: &str) -> Result<KirbyMove, ParseError> {
    let w: Vec<&str> = text.split_whitespace().collect();
    if w.first() != Some(&"move") {
        return bad(line, w.first().copied().unwrap_or(""), "move");
    }
    let arity = |n: &[usize]| -> Result<(), ParseError> {
        if n.contains(&w.len()) {
            Ok(())
        } else {
            bad(line, text, "the argument count of this move")
        }
    };
    match w.get(1).copied() {
        Some("blowup") => {
            arity(&[5])?;
            Ok(KirbyMove::BlowUp {
                site: BlowUpSite { piece: id(line, w[2])?, region: num(line, w[3])? },
                sign: sign(line, w[4])?,
            })
        }
        Some("blowdown") => {
            arity(&[3])?;
            Ok(KirbyMove::BlowDown { circle: id(line, w[2])? })
        }
        Some("slide") => {
            arity(&[7, 8])?;
            Ok(KirbyMove::HandleSlide {
                moving: id(line, w[2])?,
                over: id(line, w[3])?,
                band: Band {
                    strand: w.get(7).map(|s| id(line, s)).transpose()?,
                    arc: num(line, w[4])?,
                    target_arc: num(line, w[5])?,
                    reversed: sign(line, w[6])? == Sign::Minus,
                },
            })
        }
        Some("merge") => {
            arity(&[3])?;
            Ok(KirbyMove::MergePieces { pair: id(line, w[2])? })
        }
        Some("delsurf") => {
            arity(&[3])?;
            Ok(KirbyMove::DeleteSurface { surface: id(line, w[2])? })
        }
        other => bad(line, other.unwrap_or(""), "blowup, blowdown, slide, merge or delsurf"),
    }
}

/// Parse a whole log; blank lines and `#` comments are skipped.
pub fn parse_log(text: &str) -> Result<Vec<KirbyMove>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if !body.is_empty() {
            out.push(parse_move(i + 1, body)?);
        }
    }
    Ok(out)
}

pub fn format_rmove(piece: &Id, m: &ReidemeisterMove) -> String {
    let b = |x: bool| if x { 1 } else { 0 };
    let args = match m {
        ReidemeisterMove::R1Add { strand, arc, sign, over_first } => format!("r1add {strand} {arc} {sign} {}", b(*over_first)),
        ReidemeisterMove::R1Remove { crossing } => format!("r1rm {crossing}"),
        ReidemeisterMove::R2Add { over, over_arc, under, under_arc, parallel, sign } => {
            format!("r2add {over} {over_arc} {under} {under_arc} {} {sign}", b(*parallel))
        }
        ReidemeisterMove::R2Remove { first, second } => format!("r2rm {first} {second}"),
        ReidemeisterMove::R3 { a, b: y, c } => format!("r3 {a} {y} {c}"),
    };
    format!("rmove {piece} {args}")
}

pub fn parse_rmove(line: usize, text: &str) -> Result<(Id, ReidemeisterMove), ParseError> {
    let w: Vec<&str> = text.split_whitespace().collect();
    if w.len() < 3 || w[0] != "rmove" {
        return bad(line, text, "rmove <piece> <tag> <args>");
    }
    let piece = id(line, w[1])?;
    let n = w.len();
    let need = |k: usize| if n == k { Ok(()) } else { bad(line, text, "the argument count of this move") };
    let m = match w[2] {
        "r1add" => {
            need(7)?;
            ReidemeisterMove::R1Add {
                strand: id(line, w[3])?,
                arc: num(line, w[4])?,
                sign: sign(line, w[5])?,
                over_first: flag(line, w[6])?,
            }
        }
        "r1rm" => {
            need(4)?;
            ReidemeisterMove::R1Remove { crossing: id(line, w[3])? }
        }
        "r2add" => {
            need(9)?;
            ReidemeisterMove::R2Add {
                over: id(line, w[3])?,
                over_arc: num(line, w[4])?,
                under: id(line, w[5])?,
                under_arc: num(line, w[6])?,
                parallel: flag(line, w[7])?,
                sign: sign(line, w[8])?,
            }
        }
        "r2rm" => {
            need(5)?;
            ReidemeisterMove::R2Remove { first: id(line, w[3])?, second: id(line, w[4])? }
        }
        "r3" => {
            need(6)?;
            ReidemeisterMove::R3 { a: id(line, w[3])?, b: id(line, w[4])?, c: id(line, w[5])? }
        }
        t => return bad(line, t, "r1add, r1rm, r2add, r2rm or r3"),
    };
    Ok((piece, m))
}

fn dotted(line: usize, s: &str) -> Result<(Id, Id), ParseError> {
    match s.split_once('.') {
        Some((a, b)) => Ok((id(line, a)?, id(line, b)?)),
        None => bad(line, s, "piece.label"),
    }
}

fn list(line: usize, s: &str) -> Result<Vec<usize>, ParseError> {
    if s.is_empty() {
        return Ok(vec![]);
    }
    s.split(',').map(|t| num(line, t)).collect()
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub fn format_witness(w: &Isomorphism) -> String {
    let mut out = format!("witness 1\nmirror {}\n", w.mirror as u8);
    for (side, moves) in ["a", "b"].iter().zip(&w.moves) {
        for (p, m) in moves {
            out += &format!("{side} {}\n", format_rmove(p, m));
        }
    }
    for (p, q) in &w.pieces {
        out += &format!("map piece {p} {q}\n");
    }
    for (a, b) in &w.walls {
        let pts = w.points.get(a).map(|v| join(v)).unwrap_or_default();
        out += &format!("map wall {a} {b} points={pts}\n");
    }
    for (h, g) in &w.pairs {
        out += &format!("map pair {h} {g}{}\n", if w.swapped.contains(h) { " swapped" } else { "" });
    }
    for (a, b) in &w.strands {
        out += &format!("map strand {a} {b}\n");
    }
    for ((p, x), y) in &w.crossings {
        out += &format!("map crossing {p}.{x} {y}\n");
    }
    for (c, e) in &w.circles {
        out += &format!("map circle {c} {e}{}\n", if w.reversed.contains(c) { " reversed" } else { "" });
    }
    for (f, g) in &w.surfaces {
        out += &format!("map surface {f} {g}\n");
    }
    out += &format!("map sinks {}\n", join(&w.sinks));
    out
}

pub fn parse_witness(text: &str) -> Result<Isomorphism, ParseError> {
    let mut w = Isomorphism::default();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let t: Vec<&str> = body.split_whitespace().collect();
        if !header {
            if t != ["witness", "1"] {
                return bad(line, body, "witness 1");
            }
            header = true;
            continue;
        }
        let flag_word = |k: usize, word: &str| -> Result<bool, ParseError> {
            match t.get(k) {
                None => Ok(false),
                Some(s) if *s == word && t.len() == k + 1 => Ok(true),
                Some(s) => bad(line, s, word),
            }
        };
        match (t[0], t.get(1).copied()) {
            ("mirror", Some(v)) if t.len() == 2 => w.mirror = flag(line, v)?,
            ("a" | "b", Some(_)) => {
                let side = (t[0] == "b") as usize;
                let rest = body[1..].trim_start();
                w.moves[side].push(parse_rmove(line, rest)?);
            }
            ("map", Some(kind)) => {
                let arg = |k: usize| t.get(k).copied().map_or_else(|| bad(line, body, "two labels"), Ok);
                match kind {
                    "piece" => {
                        w.pieces.insert(id(line, arg(2)?)?, id(line, arg(3)?)?);
                    }
                    "wall" => {
                        let (a, b) = (dotted(line, arg(2)?)?, dotted(line, arg(3)?)?);
                        let pts = arg(4)?.strip_prefix("points=").map_or_else(|| bad(line, body, "points="), Ok)?;
                        let a = WallRef { piece: a.0, wall: a.1 };
                        w.points.insert(a.clone(), list(line, pts)?);
                        w.walls.insert(a, WallRef { piece: b.0, wall: b.1 });
                    }
                    "pair" => {
                        let h = id(line, arg(2)?)?;
                        if flag_word(4, "swapped")? {
                            w.swapped.insert(h.clone());
                        }
                        w.pairs.insert(h, id(line, arg(3)?)?);
                    }
                    "strand" => {
                        let (a, b) = (dotted(line, arg(2)?)?, dotted(line, arg(3)?)?);
                        w.strands.insert(StrandRef { piece: a.0, strand: a.1 }, StrandRef { piece: b.0, strand: b.1 });
                    }
                    "crossing" => {
                        let key = dotted(line, arg(2)?)?;
                        w.crossings.insert(key, id(line, arg(3)?)?);
                    }
                    "circle" => {
                        let c = id(line, arg(2)?)?;
                        if flag_word(4, "reversed")? {
                            w.reversed.insert(c.clone());
                        }
                        w.circles.insert(c, id(line, arg(3)?)?);
                    }
                    "surface" => {
                        w.surfaces.insert(id(line, arg(2)?)?, id(line, arg(3)?)?);
                    }
                    "sinks" => w.sinks = list(line, t.get(2).copied().unwrap_or(""))?,
                    other => return bad(line, other, "piece, wall, pair, strand, crossing, circle, surface or sinks"),
                }
            }
            _ => return bad(line, t[0], "mirror, a, b or map"),
        }
    }
    if !header {
        return bad(1, "", "witness 1");
    }
    Ok(w)
}
