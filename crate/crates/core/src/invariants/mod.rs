//! Algebraic invariants of the presented 4-manifold and of the surgered
//! 3-manifold: handle chain complex, integral homology, Euler
//! characteristic, linking matrix and intersection form.
//!
//! Sign conventions: a circle passing from wall `a` to wall `b` of a pair
//! contributes `+1` to that pair's row of the second boundary map, and a
//! pair's first boundary is `piece(b) - piece(a)`. Framing and crossing signs
//! use the right-handed orientation of each piece.

pub mod smith;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use smith::Matrix;

use crate::calculus::spherical_surgery;
use crate::diagram::Diagram;
use crate::id::Id;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("diagram is invalid: {0}")]
    Invalid(String),
    #[error("multi-sink diagram without sink incidence data")]
    MissingSinkIncidence,
    #[error("boundary maps do not compose to zero in degree {0}")]
    NonZeroComposite(usize),
    #[error("{0}")]
    Precondition(String),
}

/// Boundary maps `d[k]: C_{k+1} -> C_k`, `k = 0..4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub ranks: [usize; 5],
    pub boundaries: [Matrix; 4],
    /// Basis labels per degree.
    pub bases: [Vec<String>; 5],
}

impl ChainComplex {
    pub fn boundary(&self, k: usize) -> &Matrix {
        &self.boundaries[k - 1]
    }

    pub fn homology(&self) -> Vec<HomologyGroup> {
        let ranks: Vec<usize> = self.boundaries.iter().map(smith::rank).collect();
        (0..5)
            .map(|k| {
                let out = if k == 0 { 0 } else { ranks[k - 1] };
                let (inc, torsion) = if k == 4 {
                    (0, vec![])
                } else {
                    let f = smith::invariant_factors(&self.boundaries[k]);
                    (f.len(), f.into_iter().filter(|&x| x > 1).collect())
                };
                HomologyGroup { betti: self.ranks[k] - out - inc, torsion }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HomologyGroup {
    pub betti: usize,
    pub torsion: Vec<i128>,
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".into()),
            b => parts.push(format!("Z^{b}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

pub fn bettis(h: &[HomologyGroup]) -> Vec<usize> {
    h.iter().map(|g| g.betti).collect()
}

fn ensure_valid(d: &Diagram) -> Result<(), InvariantError> {
    let r = d.validate();
    if r.ok {
        Ok(())
    } else {
        let msg: Vec<String> = r.errors().map(|f| format!("[{}] {}", f.location, f.message)).collect();
        Err(InvariantError::Invalid(msg.join("; ")))
    }
}

/// Linking matrix over circle ids (natural order): framings on the diagonal,
/// linking numbers off it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkingMatrix {
    pub circles: Vec<Id>,
    pub matrix: Matrix,
}

impl LinkingMatrix {
    pub fn determinant(&self) -> i128 {
        smith::determinant(&self.matrix)
    }
}

/// Total signed crossing sums between circles (diagonal: writhe).
pub(crate) fn crossing_sums(d: &Diagram) -> (Vec<Id>, Vec<Vec<i64>>) {
    let ids: Vec<Id> = d.circles.keys().cloned().collect();
    let n = ids.len();
    let mut total = vec![vec![0i64; n]; n];
    for (pid, piece) in &d.pieces {
        let mut group = BTreeMap::new();
        for (k, cid) in ids.iter().enumerate() {
            for s in &d.circles[cid].strands {
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
    (ids, total)
}

pub fn linking_matrix(d: &Diagram) -> Result<LinkingMatrix, InvariantError> {
    ensure_valid(d)?;
    Ok(linking_matrix_unchecked(d))
}

pub(crate) fn linking_matrix_unchecked(d: &Diagram) -> LinkingMatrix {
    let (ids, sums) = crossing_sums(d);
    let n = ids.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = if i == j { d.circles[&ids[i]].framing } else { sums[i][j] / 2 };
        }
    }
    LinkingMatrix { circles: ids, matrix: m }
}

/// Linking number of two distinct circles of the glued diagram.
pub fn linking_number(d: &Diagram, a: &Id, b: &Id) -> Result<i64, InvariantError> {
    let lm = linking_matrix_unchecked(d);
    let pos = |c: &Id| {
        lm.circles
            .iter()
            .position(|x| x == c)
            .ok_or_else(|| InvariantError::Precondition(format!("unknown circle {c}")))
    };
    let (i, j) = (pos(a)?, pos(b)?);
    if i == j {
        return Err(InvariantError::Precondition("linking number needs two distinct circles".into()));
    }
    Ok(lm.matrix[(i, j)])
}

/// Sum of signs of the self-crossings of a circle over all pieces.
pub fn writhe(d: &Diagram, c: &Id) -> Result<i64, InvariantError> {
    let (ids, sums) = crossing_sums(d);
    let i = ids
        .iter()
        .position(|x| x == c)
        .ok_or_else(|| InvariantError::Precondition(format!("unknown circle {c}")))?;
    Ok(sums[i][i])
}

pub fn chain_complex(d: &Diagram) -> Result<ChainComplex, InvariantError> {
    ensure_valid(d)?;
    if d.annotation.is_some_and(|a| a.three_handles > 0) {
        return Err(InvariantError::Precondition(
            "3-handles recorded only as a count: boundary map into them is not available".into(),
        ));
    }
    let pieces: Vec<&Id> = d.pieces.keys().collect();
    let pairs: Vec<&Id> = d.pairs.keys().collect();
    let dotted: Vec<&Id> = d.circles.iter().filter(|(_, c)| c.dotted).map(|(k, _)| k).collect();
    let circles: Vec<&Id> = d.circles.iter().filter(|(_, c)| !c.dotted).map(|(k, _)| k).collect();
    let surfaces: Vec<&Id> = d.surfaces.keys().collect();
    let n = [pieces.len(), pairs.len() + dotted.len(), circles.len(), surfaces.len(), d.sinks.count];

    let mut d1 = Matrix::zeros(n[0], n[1]);
    for (j, h) in pairs.iter().enumerate() {
        let p = &d.pairs[*h];
        let ia = pieces.iter().position(|x| **x == p.a.piece).unwrap();
        let ib = pieces.iter().position(|x| **x == p.b.piece).unwrap();
        d1[(ib, j)] += 1;
        d1[(ia, j)] -= 1;
    }

    let passages = d.passages();
    let lm = linking_matrix_unchecked(d);
    let lpos = |c: &Id| lm.circles.iter().position(|x| x == c).unwrap();
    let mut d2 = Matrix::zeros(n[1], n[2]);
    for (j, c) in circles.iter().enumerate() {
        for (i, h) in pairs.iter().enumerate() {
            d2[(i, j)] = passages.get(&((*h).clone(), (*c).clone())).copied().unwrap_or(0);
        }
        for (k, dc) in dotted.iter().enumerate() {
            d2[(pairs.len() + k, j)] = lm.matrix[(lpos(dc), lpos(c))];
        }
    }

    let mut d3 = Matrix::zeros(n[2], n[3]);
    for (j, f) in surfaces.iter().enumerate() {
        for (i, c) in circles.iter().enumerate() {
            d3[(i, j)] = d.surfaces[*f].multiplicity(c);
        }
    }

    let mut d4 = Matrix::zeros(n[3], n[4]);
    if d.sinks.count > 1 {
        let inc = d.sinks.incidence.as_ref().ok_or(InvariantError::MissingSinkIncidence)?;
        for (i, f) in surfaces.iter().enumerate() {
            for (j, v) in inc[*f].iter().enumerate() {
                d4[(i, j)] = *v;
            }
        }
    }

    let boundaries = [d1, d2, d3, d4];
    for k in 0..3 {
        if !boundaries[k].mul(&boundaries[k + 1]).is_zero() {
            return Err(InvariantError::NonZeroComposite(k + 1));
        }
    }
    let label = |v: &[&Id], pre: &str| v.iter().map(|x| format!("{pre}{x}")).collect::<Vec<_>>();
    let mut b1 = label(&pairs, "pair ");
    b1.extend(label(&dotted, "dotted "));
    Ok(ChainComplex {
        ranks: n,
        boundaries,
        bases: [
            label(&pieces, "piece "),
            b1,
            label(&circles, "circle "),
            label(&surfaces, "surface "),
            (0..d.sinks.count).map(|k| format!("sink {k}")).collect(),
        ],
    })
}

/// Integral homology in degrees 0..=4.
///
/// Diagrams whose 3-handles survive only as an annotated count are handled
/// through Poincaré duality (closed, connected, orientable, one sink).
pub fn homology(d: &Diagram) -> Result<Vec<HomologyGroup>, InvariantError> {
    if d.annotation.is_some_and(|a| a.three_handles > 0) {
        return annotated_homology(d);
    }
    Ok(chain_complex(d)?.homology())
}

fn annotated_homology(d: &Diagram) -> Result<Vec<HomologyGroup>, InvariantError> {
    if d.sinks.count != 1 || !d.surfaces.is_empty() {
        return Err(InvariantError::Precondition(
            "count-only 3-handles need a single sink and no explicit surfaces".into(),
        ));
    }
    let mut low = d.clone();
    low.annotation = None;
    low.sinks.count = 1;
    // C0..C2 are intact; read H0 and H1 from them
    let h = {
        let mut a = d.annotation.unwrap();
        a.three_handles = 0;
        low.annotation = Some(a);
        chain_complex(&low)?.homology()
    };
    let (h0, h1) = (h[0].clone(), h[1].clone());
    if h0.betti != 1 || !h0.torsion.is_empty() {
        return Err(InvariantError::Precondition("presented manifold is not connected".into()));
    }
    let chi = euler_characteristic(d);
    let b1 = h1.betti as i64;
    let b2 = chi - 2 + 2 * b1;
    if b2 < 0 {
        return Err(InvariantError::Precondition("handle counts inconsistent with duality".into()));
    }
    Ok(vec![
        h0,
        h1.clone(),
        HomologyGroup { betti: b2 as usize, torsion: h1.torsion.clone() },
        HomologyGroup { betti: h1.betti, torsion: vec![] },
        HomologyGroup { betti: 1, torsion: vec![] },
    ])
}

pub fn euler_characteristic(d: &Diagram) -> i64 {
    d.presented_handle_counts().euler()
}

/// Intersection form of a diagram without 1- and 3-handles.
pub fn intersection_form(d: &Diagram) -> Result<Matrix, InvariantError> {
    ensure_valid(d)?;
    let a = d.annotation.unwrap_or_default();
    if !d.pairs.is_empty() || !d.surfaces.is_empty() || d.circles.values().any(|c| c.dotted) || a.three_handles > 0 {
        return Err(InvariantError::Precondition(
            "intersection form is read only from diagrams without 1- and 3-handles".into(),
        ));
    }
    Ok(linking_matrix_unchecked(d).matrix)
}

/// Rank and torsion of H1 of the 3-manifold obtained by surgery on all circles.
pub fn surgered_h1(d: &Diagram) -> Result<HomologyGroup, InvariantError> {
    ensure_valid(d)?;
    Ok(spherical_surgery(d).h1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::standard;

    #[test]
    fn empty_is_s4() {
        let d = Diagram::empty();
        let h = homology(&d).unwrap();
        assert_eq!(bettis(&h), [1, 0, 0, 0, 1]);
        assert!(h.iter().all(|g| g.torsion.is_empty()));
        assert_eq!(euler_characteristic(&d), 2);
        assert_eq!(intersection_form(&d).unwrap().rows(), 0);
        let cc = chain_complex(&d).unwrap();
        assert_eq!(cc.ranks, [1, 0, 0, 0, 1]);
    }

    #[test]
    fn cp2() {
        let d = standard("cp2").unwrap();
        let cc = chain_complex(&d).unwrap();
        assert_eq!(cc.ranks, [1, 0, 1, 0, 1]);
        assert!(cc.boundaries.iter().all(|b| b.is_zero()));
        assert_eq!(bettis(&homology(&d).unwrap()), [1, 0, 1, 0, 1]);
        assert_eq!(euler_characteristic(&d), 3);
        let q = intersection_form(&d).unwrap();
        assert_eq!(q.to_rows(), vec![vec![1]]);
        assert_eq!(smith::signature(&q), 1);
    }

    #[test]
    fn s2xs2_linking_and_form() {
        let d = standard("s2xs2").unwrap();
        let lm = linking_matrix(&d).unwrap();
        assert_eq!(lm.matrix.to_rows(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(smith::signature(&intersection_form(&d).unwrap()), 0);
    }

    #[test]
    fn s1xs3() {
        let d = standard("s1xs3").unwrap();
        let cc = chain_complex(&d).unwrap();
        assert_eq!(cc.ranks, [1, 1, 0, 1, 1]);
        assert!(cc.boundaries.iter().all(|b| b.is_zero()));
        assert_eq!(bettis(&homology(&d).unwrap()), [1, 1, 0, 1, 1]);
        assert_eq!(euler_characteristic(&d), 0);
        assert!(intersection_form(&d).is_err());
        assert_eq!(surgered_h1(&d).unwrap(), HomologyGroup { betti: 1, torsion: vec![] });
    }

    #[test]
    fn split_framings_matrix() {
        use crate::calculus::{blow_up, BlowUpSite};
        use crate::tangle::Sign;
        let mut d = blow_up(&Diagram::empty(), &BlowUpSite::outer("P1"), Sign::Plus).unwrap();
        d = blow_up(&d, &BlowUpSite::outer("P1"), Sign::Plus).unwrap();
        let ids: Vec<Id> = d.circles.keys().cloned().collect();
        d.circles.get_mut(&ids[0]).unwrap().framing = 2;
        d.circles.get_mut(&ids[1]).unwrap().framing = 3;
        assert_eq!(linking_matrix(&d).unwrap().matrix.to_rows(), vec![vec![2, 0], vec![0, 3]]);
    }

    #[test]
    fn surgered_h1_small_cases() {
        use crate::calculus::{blow_up, BlowUpSite};
        use crate::tangle::Sign;
        let mut d = blow_up(&Diagram::empty(), &BlowUpSite::outer("P1"), Sign::Plus).unwrap();
        assert_eq!(surgered_h1(&d).unwrap(), HomologyGroup::default());
        d.circles.values_mut().next().unwrap().framing = 0;
        assert_eq!(surgered_h1(&d).unwrap().betti, 1);
        d.circles.values_mut().next().unwrap().framing = -1;
        assert_eq!(surgered_h1(&d).unwrap(), HomologyGroup::default());
    }

    #[test]
    fn multi_sink_needs_incidence() {
        let mut d = Diagram::empty();
        d.sinks.count = 2;
        assert_eq!(chain_complex(&d), Err(InvariantError::MissingSinkIncidence));
    }
}
