//! Draw a catalog entry as SVG.
//!
//!     cargo run --example render_svg -- two-piece-cp2 out.svg

use msd::catalog::standard;
use msd::io::render_svg;

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "s2xs2".into());
    let d = standard(&name).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(3)
    });
    let svg = render_svg(&d);
    match args.next() {
        Some(path) => std::fs::write(&path, svg).expect("write svg"),
        None => print!("{svg}"),
    }
}
