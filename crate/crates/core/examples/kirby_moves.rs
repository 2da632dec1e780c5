//! Blow up, slide and blow down on the Hopf link, watching the linking
//! matrix and H1 of the surgered 3-manifold.
//!
//!     cargo run --example kirby_moves

use msd::calculus::{blow_down, blow_up, handle_slide, Band, BlowUpSite};
use msd::catalog::standard;
use msd::invariants::{linking_matrix, surgered_h1};
use msd::tangle::Sign;
use msd::{Diagram, Id};

fn show(step: &str, d: &Diagram) {
    let lm = linking_matrix(d).unwrap();
    println!("{step:<28} L = {:?}  det {}  H1 = {}", lm.matrix.to_rows(), lm.determinant(), surgered_h1(d).unwrap());
}

fn main() {
    let d = standard("s2xs2").unwrap();
    show("hopf link, framings 0 0", &d);

    let up = blow_up(&d, &BlowUpSite::outer("P1"), Sign::Minus).unwrap();
    show("blow up a -1 unknot", &up);

    let new = up.circles.keys().find(|c| !d.circles.contains_key(*c)).unwrap().clone();
    let slid = handle_slide(&up, &Id::from("C1"), &new, &Band::simple(false)).unwrap();
    show("slide C1 over it", &slid);

    let down = blow_down(&slid, &new).unwrap();
    show("blow it down again", &down);
}
