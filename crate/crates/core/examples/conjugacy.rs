//! The diffeomorphism of S^2 x S^2 swapping the two spheres is conjugate to
//! any relabeling of itself but not to the identity.
//!
//!     cargo run --example conjugacy

use msd::catalog::standard;
use msd::diagram::InternalMaps;
use msd::equivalence::{conjugate, EquivOptions};
use msd::random::{relabel, rng};

fn main() {
    let swap = standard("swap-diffeo").unwrap();
    let copy = relabel(&mut rng(9), &swap, true);
    let mut ident = swap.clone();
    ident.internal_maps = Some(InternalMaps::identity(&ident));
    for (name, other) in [("relabeled swap", &copy), ("identity", &ident)] {
        let c = conjugate(&swap, other, &EquivOptions::default()).unwrap();
        println!(
            "swap vs {name}: {} ({} isomorphisms, {})",
            c.verdict.label(),
            c.enumerated,
            if c.exhaustive { "exhaustive" } else { "partial" }
        );
    }
}
