//! Scramble the empty diagram with random inverse moves, then search for a
//! sequence that undoes them.
//!
//!     cargo run --example recognize_s3 -- [seed]

use msd::calculus::recognize_s3;
use msd::random::{random_from_empty, rng};
use msd::Verdict;

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let mut r = rng(seed);
    for _ in 0..5 {
        let (d, built) = random_from_empty(&mut r, 3);
        let built: Vec<String> = built.iter().map(|m| m.to_string()).collect();
        print!("built by [{}]: ", built.join("; "));
        match recognize_s3(&d, 3).unwrap() {
            Verdict::Yes(moves) => {
                let moves: Vec<String> = moves.iter().map(|m| m.to_string()).collect();
                println!("S^3 via [{}]", moves.join("; "));
            }
            Verdict::No(why) => println!("not S^3: {why}"),
            Verdict::Unknown(x) => println!("unknown after {} nodes", x.explored),
        }
    }
    // a 0-framed unknot gives S^1 x S^2
    let zero = msd::io::parse("msd 1\npiece P1\nstrand P1.S1 path= from=- to=-\ncircle C1 strands=P1.S1 framing=0\nsinks 1\n").unwrap();
    println!("0-framed unknot: {}", recognize_s3(&zero, 3).unwrap().label());
}
