//! Standard diagrams with known 4-manifolds.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::diagram::{
    BoundaryItem, Diagram, GluedCircle, InternalMaps, Piece, SpanningSurface, SpherePair, SphereWall, StrandRef,
    WallRef,
};
use crate::id::Id;
use crate::tangle::{Crossing, Role, Sign, Strand, TangleCode, Visit, WallPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Entry {
    pub name: &'static str,
    pub manifold: &'static str,
    /// Fixed points of the flow by index 0..=4.
    pub fixed_points: &'static str,
}

pub const ENTRIES: &[Entry] = &[
    Entry { name: "s4-polar", manifold: "S^4", fixed_points: "1,0,0,0,1" },
    Entry { name: "cp2", manifold: "CP^2", fixed_points: "1,0,1,0,1" },
    Entry { name: "s2xs2", manifold: "S^2 x S^2", fixed_points: "1,0,2,0,1" },
    Entry { name: "s1xs3", manifold: "S^1 x S^3", fixed_points: "1,1,0,1,1" },
    Entry { name: "n-s1s3(n)", manifold: "#n S^1 x S^3", fixed_points: "1,n,0,n,1" },
    Entry { name: "swap-diffeo", manifold: "S^2 x S^2 (diffeomorphism)", fixed_points: "1,0,2,0,1" },
    Entry { name: "s4-with-cancelling-pair", manifold: "S^4", fixed_points: "1,0,1,1,1" },
    Entry { name: "two-piece-cp2", manifold: "CP^2", fixed_points: "2,1,1,0,1" },
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown catalog entry {0:?} (known: {known})", known = names().join(", "))]
pub struct UnknownEntry(pub String);

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

/// Build a catalog diagram. `n-s1s3(n)` also accepts `n-s1s3-n`.
pub fn standard(name: &str) -> Result<Diagram, UnknownEntry> {
    let d = match name {
        "s4-polar" => Diagram::empty(),
        "cp2" => unknot(1),
        "s2xs2" => hopf(0, 0),
        "s1xs3" => sum_s1s3(1),
        "swap-diffeo" => {
            let mut d = hopf(0, 0);
            let mut maps = InternalMaps::identity(&d);
            maps.circles.insert(id("C1"), id("C2"));
            maps.circles.insert(id("C2"), id("C1"));
            d.internal_maps = Some(maps);
            d
        }
        "s4-with-cancelling-pair" => {
            let mut d = unknot(0);
            d.surfaces.insert(
                id("F1"),
                SpanningSurface {
                    genus: 0,
                    boundary: vec![BoundaryItem::FramingParallel { circle: id("C1"), sign: Sign::Plus }],
                },
            );
            d
        }
        "two-piece-cp2" => two_piece_cp2(),
        other => {
            let n = other
                .strip_prefix("n-s1s3(")
                .and_then(|s| s.strip_suffix(')'))
                .or_else(|| other.strip_prefix("n-s1s3-"))
                .and_then(|s| s.parse::<usize>().ok())
                .ok_or_else(|| UnknownEntry(other.to_string()))?;
            sum_s1s3(n)
        }
    };
    Ok(d.normalized())
}

fn id(s: &str) -> Id {
    Id::from(s)
}

fn unknot(framing: i64) -> Diagram {
    let mut d = Diagram::empty();
    let p = d.pieces.get_mut(&id("P1")).unwrap();
    p.tangle.strands.insert(id("S1"), Strand::closed(vec![]));
    d.circles.insert(id("C1"), GluedCircle::new(vec![StrandRef::new("P1", "S1")], framing));
    d
}

/// Positive Hopf link with the given framings.
fn hopf(f1: i64, f2: i64) -> Diagram {
    let mut d = Diagram::empty();
    let t = &mut d.pieces.get_mut(&id("P1")).unwrap().tangle;
    for x in ["X1", "X2"] {
        t.crossings.insert(id(x), Crossing { sign: Sign::Plus });
    }
    let v = |x: &str, r| Visit::new(id(x), r);
    t.strands.insert(id("S1"), Strand::closed(vec![v("X1", Role::Over), v("X2", Role::Under)]));
    t.strands.insert(id("S2"), Strand::closed(vec![v("X1", Role::Under), v("X2", Role::Over)]));
    d.circles.insert(id("C1"), GluedCircle::new(vec![StrandRef::new("P1", "S1")], f1));
    d.circles.insert(id("C2"), GluedCircle::new(vec![StrandRef::new("P1", "S2")], f2));
    d
}

/// Connected sum of `n` copies of S^1 x S^3: `n` strand-free pairs, each
/// with the 2-sphere that carries the 3-handle.
fn sum_s1s3(n: usize) -> Diagram {
    let mut d = Diagram::empty();
    let p = d.pieces.get_mut(&id("P1")).unwrap();
    for k in 1..=n {
        p.walls.insert(Id::new(format!("W{}", 2 * k - 1)), SphereWall { points: 0 });
        p.walls.insert(Id::new(format!("W{}", 2 * k)), SphereWall { points: 0 });
    }
    for k in 1..=n {
        d.pairs.insert(
            Id::new(format!("H{k}")),
            SpherePair {
                a: WallRef::new("P1", format!("W{}", 2 * k - 1)),
                b: WallRef::new("P1", format!("W{}", 2 * k)),
                matching: vec![],
                orientation: Sign::Plus,
            },
        );
        d.surfaces.insert(Id::new(format!("F{k}")), SpanningSurface { genus: 0, boundary: vec![] });
    }
    d
}

/// The +1 unknot cut into two arcs by a pair joining two pieces.
fn two_piece_cp2() -> Diagram {
    let mut d = Diagram::empty();
    let mut walls = BTreeMap::new();
    walls.insert(id("W1"), SphereWall { points: 2 });
    let half = |from, to| {
        let mut t = TangleCode::default();
        t.strands.insert(
            id("S1"),
            Strand { path: vec![], from: Some(WallPoint::new("W1", from)), to: Some(WallPoint::new("W1", to)) },
        );
        Piece { tangle: t, walls: walls.clone() }
    };
    d.pieces.insert(id("P1"), half(0, 1));
    d.pieces.insert(id("P2"), half(1, 0));
    d.pairs.insert(
        id("H1"),
        SpherePair { a: WallRef::new("P1", "W1"), b: WallRef::new("P2", "W1"), matching: vec![0, 1], orientation: Sign::Plus },
    );
    d.circles.insert(id("C1"), GluedCircle::new(vec![StrandRef::new("P1", "S1"), StrandRef::new("P2", "S1")], 1));
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{bettis, euler_characteristic, homology};

    #[test]
    fn every_entry_is_admissible() {
        for e in ENTRIES {
            let name = e.name.replace("(n)", "(3)");
            let d = standard(&name).unwrap();
            let r = d.check_admissible();
            assert!(r.ok, "{name}: {r}");
        }
    }

    #[test]
    fn fixed_point_counts_match_handles() {
        for e in ENTRIES {
            if e.name.contains("(n)") {
                continue;
            }
            let d = standard(e.name).unwrap();
            let c = d.handle_counts().0.map(|k| k.to_string()).join(",");
            assert_eq!(c, e.fixed_points, "{}", e.name);
        }
    }

    #[test]
    fn sums_of_s1s3() {
        for n in 0..=4 {
            let d = standard(&format!("n-s1s3({n})")).unwrap();
            assert_eq!(bettis(&homology(&d).unwrap()), [1, n, 0, n, 1]);
            assert_eq!(euler_characteristic(&d), 2 - 2 * n as i64);
        }
        assert_eq!(standard("n-s1s3-2").unwrap(), standard("n-s1s3(2)").unwrap());
    }

    #[test]
    fn cancelling_pair_is_s4() {
        let d = standard("s4-with-cancelling-pair").unwrap();
        assert_eq!(bettis(&homology(&d).unwrap()), [1, 0, 0, 0, 1]);
        assert_eq!(euler_characteristic(&d), 2);
    }

    #[test]
    fn two_piece_cp2_homology() {
        let d = standard("two-piece-cp2").unwrap();
        assert_eq!(bettis(&homology(&d).unwrap()), [1, 0, 1, 0, 1]);
    }

    #[test]
    fn unknown_name() {
        assert!(standard("k3").is_err());
        assert!(standard("n-s1s3(x)").is_err());
    }
}
