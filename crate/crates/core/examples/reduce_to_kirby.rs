//! Run the reduction pipeline on a few multi-piece diagrams: merge pieces,
//! delete superfluous surfaces, trade 1-handles for dotted circles.
//!
//!     cargo run --example reduce_to_kirby

use msd::catalog::standard;
use msd::invariants::homology;
use msd::io::{moves::format_log, serialize};
use msd::random::{random_multi_piece, rng};
use msd::reduction::reduce;

fn main() {
    let mut inputs = vec![
        ("two-piece-cp2".to_string(), standard("two-piece-cp2").unwrap()),
        ("s4-with-cancelling-pair".to_string(), standard("s4-with-cancelling-pair").unwrap()),
        ("n-s1s3(2)".to_string(), standard("n-s1s3(2)").unwrap()),
    ];
    inputs.push(("random".into(), random_multi_piece(&mut rng(3), 4)));
    for (name, d) in inputs {
        let r = reduce(&d).unwrap();
        assert_eq!(homology(&r.diagram).unwrap(), homology(&d).unwrap());
        println!("== {name}: {} pieces -> {}", d.pieces.len(), r.diagram.pieces.len());
        print!("{}", format_log(&r.moves));
        print!("{}", serialize(&r.diagram));
    }
}
