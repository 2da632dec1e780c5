//! Static SVG drawing: one panel per piece, crossings on a ring, walls as
//! shaded disks, strands as quadratic curves with gaps at under-crossings,
//! and a framing label per circle.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write;

use crate::diagram::{Diagram, StrandRef};
use crate::id::Id;
use crate::tangle::{Role, WallPoint};

const PANEL: f64 = 360.0;
const RING: f64 = 110.0;
const WALL_RING: f64 = 150.0;
const WALL_R: f64 = 18.0;
const GAP: f64 = 9.0;
const BOW: f64 = 25.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Clone, Copy, Debug, PartialEq)]
struct Pt(f64, f64);

impl Pt {
    fn toward(self, q: Pt, dist: f64) -> Pt {
        let (dx, dy) = (q.0 - self.0, q.1 - self.1);
        let len = (dx * dx + dy * dy).sqrt();
        if len < 1e-9 {
            self
        } else {
            Pt(self.0 + dx / len * dist, self.1 + dy / len * dist)
        }
    }
}

fn on_ring(c: Pt, r: f64, k: usize, n: usize, phase: f64) -> Pt {
    let a = TAU * k as f64 / n.max(1) as f64 + phase;
    Pt(c.0 + r * a.cos(), c.1 + r * a.sin())
}

fn framing_label(f: i64) -> String {
    if f > 0 {
        format!("+{f}")
    } else {
        f.to_string()
    }
}

/// A waypoint on a strand: its position and whether the strand passes
/// under there.
struct Way {
    at: Pt,
    under: bool,
}

fn segment(out: &mut String, a: &Way, b: &Way, stroke: &str, dash: &str) {
    let (p, q) = (a.at, b.at);
    if (p.0 - q.0).abs() < 1e-9 && (p.1 - q.1).abs() < 1e-9 {
        // a kink returning to the same crossing
        let (c1, c2) = (Pt(p.0 + 40.0, p.1 - 40.0), Pt(p.0 + 40.0, p.1 + 40.0));
        let s = if a.under { p.toward(c1, GAP) } else { p };
        let e = if b.under { q.toward(c2, GAP) } else { q };
        let _ = writeln!(
            out,
            r#"<path d="M{:.1},{:.1} C{:.1},{:.1} {:.1},{:.1} {:.1},{:.1}" stroke="{stroke}"{dash}/>"#,
            s.0, s.1, c1.0, c1.1, c2.0, c2.1, e.0, e.1
        );
        return;
    }
    let (mx, my) = ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0);
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let len = (dx * dx + dy * dy).sqrt();
    let ctrl = Pt(mx - dy / len * BOW, my + dx / len * BOW);
    let s = if a.under { p.toward(ctrl, GAP) } else { p };
    let e = if b.under { q.toward(ctrl, GAP) } else { q };
    let _ = writeln!(
        out,
        r#"<path d="M{:.1},{:.1} Q{:.1},{:.1} {:.1},{:.1}" stroke="{stroke}"{dash}/>"#,
        s.0, s.1, ctrl.0, ctrl.1, e.0, e.1
    );
}

/// Render `d` as a standalone SVG document.
pub fn render_svg(d: &Diagram) -> String {
    let owner = d.strand_owner();
    let colour: BTreeMap<&Id, &str> = d.circles.keys().enumerate().map(|(k, c)| (c, PALETTE[k % PALETTE.len()])).collect();
    let mut labelled: BTreeMap<&Id, bool> = BTreeMap::new();
    let width = PANEL * d.pieces.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL}" viewBox="0 0 {width} {PANEL}">"#
    );
    out.push_str(
        "<style>path{fill:none;stroke-width:2.5}.wall{fill:#d0d0d0;stroke:#777}.crossing circle{fill:#000}\
         text{font-family:sans-serif;font-size:13px}.framing{font-weight:bold}</style>\n",
    );
    for (k, (pid, piece)) in d.pieces.iter().enumerate() {
        let c = Pt(PANEL * (k as f64 + 0.5), PANEL / 2.0);
        let _ = writeln!(out, r#"<g class="piece" data-id="{pid}">"#);
        let _ = writeln!(
            out,
            r##"<rect x="{:.1}" y="0" width="{PANEL}" height="{PANEL}" fill="none" stroke="#bbb"/>"##,
            c.0 - PANEL / 2.0
        );
        let _ = writeln!(out, r#"<text x="{:.1}" y="18">{pid}</text>"#, c.0 - PANEL / 2.0 + 8.0);

        let xs: Vec<&Id> = piece.tangle.crossings.keys().collect();
        let xpos: BTreeMap<&Id, Pt> = xs.iter().enumerate().map(|(i, x)| (*x, on_ring(c, RING, i, xs.len(), 0.0))).collect();
        let ws: Vec<&Id> = piece.walls.keys().collect();
        let wpos: BTreeMap<&Id, Pt> =
            ws.iter().enumerate().map(|(i, w)| (*w, on_ring(c, WALL_RING, i, ws.len(), TAU / 8.0))).collect();
        for (w, sw) in &piece.walls {
            let p = wpos[w];
            let _ = writeln!(out, r#"<circle class="wall" data-id="{w}" cx="{:.1}" cy="{:.1}" r="{WALL_R}"/>"#, p.0, p.1);
            let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}">{w} ({})</text>"#, p.0 - 14.0, p.1 + WALL_R + 14.0, sw.points);
        }
        let wall_point = |wp: &WallPoint| -> Pt {
            let centre = wpos.get(&wp.wall).copied().unwrap_or(c);
            let n = piece.walls.get(&wp.wall).map_or(1, |w| w.points);
            on_ring(centre, WALL_R, wp.point, n, 0.0)
        };

        let mut unknots = 0;
        for (sid, s) in &piece.tangle.strands {
            let r = StrandRef { piece: pid.clone(), strand: sid.clone() };
            let cid = owner.get(&r);
            let stroke = cid.and_then(|c| colour.get(c)).copied().unwrap_or("#000");
            let dotted = cid.is_some_and(|c| d.circles[c].dotted);
            let dash = if dotted { r#" stroke-dasharray="4,4""# } else { "" };
            let mut way: Vec<Way> = Vec::new();
            if let Some(f) = &s.from {
                way.push(Way { at: wall_point(f), under: false });
            }
            for v in &s.path {
                way.push(Way { at: xpos.get(&v.crossing).copied().unwrap_or(c), under: v.role == Role::Under });
            }
            if let Some(t) = &s.to {
                way.push(Way { at: wall_point(t), under: false });
            }
            let anchor = if way.is_empty() {
                let p = on_ring(c, RING / 2.0, unknots, 4, TAU / 8.0);
                unknots += 1;
                let _ = writeln!(out, r#"<circle cx="{:.1}" cy="{:.1}" r="28" fill="none" stroke="{stroke}" stroke-width="2.5"{dash}/>"#, p.0, p.1);
                Pt(p.0 + 20.0, p.1 - 24.0)
            } else {
                let closed = s.is_closed();
                for i in 0..way.len() {
                    if i + 1 < way.len() {
                        segment(&mut out, &way[i], &way[i + 1], stroke, dash);
                    } else if closed {
                        segment(&mut out, &way[i], &way[0], stroke, dash);
                    }
                }
                way[0].at
            };
            if let Some(cid) = cid {
                if !labelled.insert(cid, true).unwrap_or(false) {
                    let _ = writeln!(
                        out,
                        r#"<text class="framing" data-circle="{cid}" x="{:.1}" y="{:.1}" fill="{stroke}">{}</text>"#,
                        anchor.0 + 6.0,
                        anchor.1 - 6.0,
                        framing_label(d.circles[cid].framing)
                    );
                }
            }
        }
        for (x, p) in &xpos {
            let _ = writeln!(out, r#"<g class="crossing" data-id="{x}"><circle cx="{:.1}" cy="{:.1}" r="2"/></g>"#, p.0, p.1);
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::standard;

    fn count(s: &str, pat: &str) -> usize {
        s.matches(pat).count()
    }

    #[test]
    fn empty_diagram_is_one_blank_panel() {
        let s = render_svg(&standard("s4-polar").unwrap());
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(count(&s, r#"class="piece""#), 1);
        assert_eq!(count(&s, "<path"), 0);
    }

    #[test]
    fn framing_labels() {
        let s = render_svg(&standard("cp2").unwrap());
        assert!(s.contains(">+1</text>"));
        let s = render_svg(&standard("s2xs2").unwrap());
        assert_eq!(count(&s, r#"class="framing""#), 2);
        assert!(s.contains(">0</text>"));
    }

    #[test]
    fn crossings_and_gaps() {
        let s = render_svg(&standard("s2xs2").unwrap());
        assert_eq!(count(&s, r#"class="crossing""#), 2);
        // four segments, each ending or starting at one under visit
        assert_eq!(count(&s, "<path"), 4);
    }

    #[test]
    fn walls_and_panels() {
        let s = render_svg(&standard("two-piece-cp2").unwrap());
        assert_eq!(count(&s, r#"class="piece""#), 2);
        assert_eq!(count(&s, r#"class="wall""#), 2);
        assert_eq!(count(&s, r#"class="framing""#), 1);
    }

    #[test]
    fn gap_trims_the_under_end() {
        let mut out = String::new();
        let a = Way { at: Pt(0.0, 0.0), under: false };
        let b = Way { at: Pt(100.0, 0.0), under: true };
        segment(&mut out, &a, &b, "#000", "");
        // the curve stops short of (100, 0)
        assert!(out.starts_with("<path d=\"M0.0,0.0 Q50.0,25.0 "));
        assert!(!out.contains(" 100.0,0.0\""));
    }
}
