//! Bounded search for a move sequence reducing a Kirby diagram to the empty
//! diagram.

use std::collections::HashMap;
use std::fmt;

use super::{blow_down, blow_up, ensure_valid, handle_slide, Band, BlowUpSite, KirbyMove, MoveError};
use crate::diagram::Diagram;
use crate::id::Id;
use crate::invariants;
use crate::tangle::{Sign, Visit};

/// Hard cap on visited search nodes, whatever the depth.
pub const NODE_BUDGET: usize = 400_000;

/// Orderings tried by [`canonical_key`] before falling back to the plain key.
const KEY_CHOICES: usize = 2000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub invariants: Vec<String>,
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.invariants.join("; "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exhausted {
    pub budget: usize,
    pub explored: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<W> {
    Yes(W),
    No(Obstruction),
    Unknown(Exhausted),
}

impl<W> Verdict<W> {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Yes(_) => 0,
            Verdict::No(_) => 1,
            Verdict::Unknown(_) => 2,
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Verdict::No(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "yes",
            Verdict::No(_) => "no",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

/// Decide whether surgery on a Kirby diagram (no pairs, no surfaces) gives
/// the 3-sphere, searching move sequences of length at most `depth`.
pub fn recognize_s3(d: &Diagram, depth: usize) -> Result<Verdict<Vec<KirbyMove>>, MoveError> {
    ensure_valid(d)?;
    if d.pieces.len() != 1 || !d.pairs.is_empty() || !d.surfaces.is_empty() {
        return Err(MoveError::Precondition("recognition needs one piece, no pairs and no surfaces".into()));
    }
    if d.circles.values().any(|c| c.dotted) || d.internal_maps.is_some() {
        return Err(MoveError::Precondition("recognition needs a plain framed link".into()));
    }
    let det = invariants::linking_matrix_unchecked(d).determinant();
    if det.abs() != 1 {
        let h1 = super::spherical_surgery(d).h1();
        return Ok(Verdict::No(Obstruction {
            invariants: vec![format!("|det L| = {}", det.abs()), format!("H1 = {h1}")],
        }));
    }
    let mut search = Search { table: HashMap::new(), explored: 0 };
    for limit in 0..=depth {
        let mut path = Vec::new();
        match search.dfs(d, limit, &mut path) {
            Some(true) => return Ok(Verdict::Yes(path)),
            Some(false) => {}
            None => break,
        }
    }
    Ok(Verdict::Unknown(Exhausted { budget: depth, explored: search.explored }))
}

struct Search {
    /// Largest remaining depth at which a state is known to fail.
    table: HashMap<String, usize>,
    explored: usize,
}

impl Search {
    /// `Some(true)` when solved, `None` when the node budget ran out.
    fn dfs(&mut self, d: &Diagram, rem: usize, path: &mut Vec<KirbyMove>) -> Option<bool> {
        if d.circles.is_empty() {
            return Some(true);
        }
        if d.circles.len() > rem {
            return Some(false);
        }
        self.explored += 1;
        if self.explored > NODE_BUDGET {
            return None;
        }
        let key = canonical_key(d);
        if self.table.get(&key).is_some_and(|&r| r >= rem) {
            return Some(false);
        }
        for (mv, next) in successors(d, rem) {
            path.push(mv);
            if self.dfs(&next, rem - 1, path)? {
                return Some(true);
            }
            path.pop();
        }
        let e = self.table.entry(key).or_insert(0);
        *e = (*e).max(rem);
        Some(false)
    }
}

fn successors(d: &Diagram, rem: usize) -> Vec<(KirbyMove, Diagram)> {
    let mut out = Vec::new();
    for (cid, c) in &d.circles {
        if c.framing.abs() == 1 {
            if let Ok(next) = blow_down(d, cid) {
                out.push((KirbyMove::BlowDown { circle: cid.clone() }, next));
            }
        }
    }
    let lm = invariants::linking_matrix_unchecked(d);
    let w = lm.matrix.weight();
    let n = lm.circles.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for reversed in [false, true] {
                let rho = if reversed { -1 } else { 1 };
                let m = &lm.matrix;
                // weight after row/column i += rho * row/column j
                let mut nw = w;
                for k in 0..n {
                    if k != i {
                        nw += 2 * ((m[(i, k)] + rho * m[(j, k)]).abs() - m[(i, k)].abs());
                    }
                }
                nw += (m[(i, i)] + m[(j, j)] + 2 * rho * m[(i, j)]).abs() - m[(i, i)].abs();
                if nw >= w {
                    continue;
                }
                let band = Band::simple(reversed);
                let (c1, c2) = (&lm.circles[i], &lm.circles[j]);
                if let Ok(next) = handle_slide(d, c1, c2, &band) {
                    out.push((KirbyMove::HandleSlide { moving: c1.clone(), over: c2.clone(), band }, next));
                }
            }
        }
    }
    // a blow-up only helps if there is room to remove it again
    if d.circles.len() + 2 <= rem {
        let piece = d.pieces.keys().next().unwrap().clone();
        for sign in [Sign::Plus, Sign::Minus] {
            let site = BlowUpSite::outer(piece.clone());
            if let Ok(next) = blow_up(d, &site, sign) {
                out.push((KirbyMove::BlowUp { site, sign }, next));
            }
        }
    }
    out
}

/// Label-independent key of a single-piece link diagram: minimised over
/// circle orderings among ties and over rotations of closed paths, with
/// crossings relabelled by first occurrence. Falls back to a plain
/// serialisation when there are too many choices.
pub fn canonical_key(d: &Diagram) -> String {
    let Some(piece) = d.pieces.values().next() else { return String::new() };
    if d.pieces.len() != 1 || !d.pairs.is_empty() {
        return plain_key(d);
    }
    let (t, _) = piece.tangle.simplify(16);
    let mut circles: Vec<(i64, usize, bool, Vec<Visit>)> = Vec::new();
    for c in d.circles.values() {
        let [s] = c.strands.as_slice() else { return plain_key(d) };
        let Some(strand) = t.strands.get(&s.strand) else { return plain_key(d) };
        circles.push((c.framing, strand.path.len(), c.dotted, strand.path.clone()));
    }
    circles.sort_by_key(|c| (c.0, c.1, c.2));

    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=circles.len() {
        if i == circles.len() || (circles[i].0, circles[i].1, circles[i].2) != (circles[start].0, circles[start].1, circles[start].2) {
            groups.push((start, i));
            start = i;
        }
    }
    let mut choices: usize = 1;
    for &(a, b) in &groups {
        for k in 1..=(b - a) {
            choices = choices.saturating_mul(k);
        }
    }
    for c in &circles {
        choices = choices.saturating_mul(c.1.max(1));
    }
    if choices > KEY_CHOICES {
        return plain_key(d);
    }

    let mut best: Option<String> = None;
    let mut order: Vec<usize> = (0..circles.len()).collect();
    permute_groups(&groups, 0, &mut order, &mut |ord| {
        let mut rot = vec![0usize; ord.len()];
        loop {
            let key = encode(&circles, ord, &rot, &t);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
            // odometer over rotations
            let mut k = 0;
            loop {
                if k == ord.len() {
                    return;
                }
                rot[k] += 1;
                if rot[k] < circles[ord[k]].1.max(1) {
                    break;
                }
                rot[k] = 0;
                k += 1;
            }
        }
    });
    best.unwrap_or_default()
}

fn permute_groups(groups: &[(usize, usize)], g: usize, order: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if g == groups.len() {
        f(order);
        return;
    }
    let (a, b) = groups[g];
    heap_permute(order, a, b - a, &mut |o| permute_groups(groups, g + 1, o, f));
}

fn heap_permute(order: &mut Vec<usize>, a: usize, k: usize, f: &mut dyn FnMut(&mut Vec<usize>)) {
    if k <= 1 {
        f(order);
        return;
    }
    for i in 0..k - 1 {
        heap_permute(order, a, k - 1, f);
        if k % 2 == 0 {
            order.swap(a + i, a + k - 1);
        } else {
            order.swap(a, a + k - 1);
        }
    }
    heap_permute(order, a, k - 1, f);
}

fn encode(circles: &[(i64, usize, bool, Vec<Visit>)], ord: &[usize], rot: &[usize], t: &crate::tangle::TangleCode) -> String {
    let mut labels: HashMap<&Id, usize> = HashMap::new();
    let mut s = String::new();
    for (k, &ci) in ord.iter().enumerate() {
        let (f, _, dotted, path) = &circles[ci];
        s.push_str(&format!("|{f}{}:", if *dotted { "d" } else { "" }));
        let n = path.len();
        for m in 0..n {
            let v = &path[(rot[k] + m) % n];
            let next = labels.len();
            let l = *labels.entry(&v.crossing).or_insert(next);
            let sign = t.crossings[&v.crossing].sign.symbol();
            let role = if v.role == crate::tangle::Role::Over { 'o' } else { 'u' };
            s.push_str(&format!("{l}{role}{sign},"));
        }
    }
    s
}

fn plain_key(d: &Diagram) -> String {
    format!("{:?}", d)
}
