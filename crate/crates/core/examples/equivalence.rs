//! Perturb and relabel a random link, find the isomorphism back, and print
//! the witness.
//!
//!     cargo run --example equivalence

use msd::equivalence::{isomorphic, verify_witness, EquivOptions};
use msd::io::moves::format_witness;
use msd::random::{perturb, random_link, relabel, rng};
use msd::Verdict;

fn main() {
    let mut r = rng(42);
    let d = random_link(&mut r, 6, 3);
    let p = perturb(&mut r, &d, 3);
    let e = relabel(&mut r, &p, true);
    match isomorphic(&d, &e, &EquivOptions::default()).unwrap() {
        Verdict::Yes(w) => {
            verify_witness(&d, &e, &w).expect("witness replays");
            print!("{}", format_witness(&w));
        }
        v => println!("{}", v.label()),
    }

    let mut f = e.clone();
    let c = f.circles.keys().next().unwrap().clone();
    f.circles.get_mut(&c).unwrap().framing += 2;
    if let Verdict::No(why) = isomorphic(&d, &f, &EquivOptions::default()).unwrap() {
        println!("after changing a framing: no ({why})");
    }
}
