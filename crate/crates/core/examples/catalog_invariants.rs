//! Print handle counts, Euler characteristic, homology and intersection
//! form for every catalog entry.
//!
//!     cargo run --example catalog_invariants

use msd::catalog::{standard, ENTRIES};
use msd::invariants::{euler_characteristic, homology, intersection_form};

fn main() {
    for e in ENTRIES {
        let name = e.name.replace("(n)", "(2)");
        let d = standard(&name).expect("catalog name");
        let h: Vec<String> = homology(&d).expect("valid entry").iter().map(|g| g.to_string()).collect();
        let form = match intersection_form(&d) {
            Ok(m) => format!("{:?}", m.to_rows()),
            Err(_) => "-".into(),
        };
        println!(
            "{name:<24} {:<28} handles {:?}  chi {:>2}  H = [{}]  form {form}",
            e.manifold,
            d.handle_counts().0,
            euler_characteristic(&d),
            h.join(", ")
        );
    }
}
