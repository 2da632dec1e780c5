//! Parse a diagram from text, report validation findings, and write it
//! back in canonical form.
//!
//!     cargo run --example text_format

use msd::io::{parse, serialize};

const TEXT: &str = "msd 1
# right-handed trefoil with framing -1
piece P1
crossing P1.X1 ends=S1:3,S1:1,S1:4,S1:0 over=2 sign=+
crossing P1.X2 ends=S1:1,S1:5,S1:2,S1:4 over=2 sign=+
crossing P1.X3 ends=S1:5,S1:3,S1:0,S1:2 over=2 sign=+
strand P1.S1 path=X1,X2,X3,X1,X2,X3 from=- to=-
circle C1 strands=P1.S1 framing=-1
sinks 1
";

fn main() {
    let d = match parse(TEXT) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(3);
        }
    };
    print!("{}", d.validate());
    print!("{}", serialize(&d));

    let broken = TEXT.replace("framing=-1", "framing=-x");
    println!("{}", parse(&broken).unwrap_err());

    // parses, but the closed strand belongs to no circle
    let orphan = parse(&TEXT.replace("circle C1 strands=P1.S1 framing=-1\n", "")).unwrap();
    print!("{}", orphan.validate());
}
