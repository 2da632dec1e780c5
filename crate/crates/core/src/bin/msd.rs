//! Command-line front end. Exit codes: 0 yes/ok, 1 no/invalid, 2 unknown,
//! 3 usage, input or parse errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use msd::calculus::{recognize_s3, Verdict};
use msd::catalog;
use msd::equivalence::{conjugate, isomorphic, EquivOptions};
use msd::invariants;
use msd::io::{self, moves};
use msd::reduction::reduce;
use msd::Diagram;

const USAGE: u8 = 3;

#[derive(Parser)]
#[command(name = "msd", version, about = "Diagrams of gradient-like flows on closed 4-manifolds")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a diagram for well-formedness.
    Validate { file: PathBuf },
    /// Print handle counts, Euler characteristic, homology and forms.
    Invariants { file: PathBuf },
    /// Merge pieces, delete superfluous surfaces and convert to a Kirby diagram.
    Reduce {
        file: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Search for moves reducing a framed link to the empty diagram.
    RecognizeS3 {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Decide whether two diagrams are isomorphic.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 64)]
        budget: usize,
        /// Also accept orientation-reversing maps.
        #[arg(long)]
        mirror: bool,
        /// Write the witness of a positive answer here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Decide whether two diffeomorphism diagrams are conjugate.
    Conj {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long)]
        mirror: bool,
    },
    /// Write a catalog diagram.
    Catalog {
        name: String,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Draw a diagram as SVG.
    Render {
        file: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

struct Fail(u8, String);

impl<E: std::fmt::Display> From<(u8, E)> for Fail {
    fn from((code, e): (u8, E)) -> Self {
        Fail(code, e.to_string())
    }
}

fn load(path: &Path) -> Result<Diagram, Fail> {
    let text = fs::read_to_string(path).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))?;
    io::parse(&text).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))
}

fn load_valid(path: &Path) -> Result<Diagram, Fail> {
    let d = load(path)?;
    let r = d.validate();
    if r.ok {
        Ok(d)
    } else {
        Err(Fail(1, format!("{}: {r}", path.display())))
    }
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))
}

fn verdict_code<W>(v: &Verdict<W>) -> u8 {
    v.exit_code() as u8
}

fn run(cmd: Cmd) -> Result<u8, Fail> {
    match cmd {
        Cmd::Validate { file } => {
            let r = load(&file)?.validate();
            print!("{r}");
            Ok(if r.ok { 0 } else { 1 })
        }
        Cmd::Invariants { file } => {
            let d = load_valid(&file)?;
            let h = invariants::homology(&d).map_err(|e| Fail(1, e.to_string()))?;
            let counts = d.handle_counts().0.map(|k| k.to_string()).join(" ");
            println!("handles {counts}");
            println!("euler {}", invariants::euler_characteristic(&d));
            for (k, g) in h.iter().enumerate() {
                println!("H{k} {g}");
            }
            match invariants::intersection_form(&d) {
                Ok(m) => println!("form {:?}", m.to_rows()),
                Err(e) => println!("form n/a ({e})"),
            }
            let lm = invariants::linking_matrix(&d).map_err(|e| Fail(1, e.to_string()))?;
            println!("det {}", lm.determinant());
            println!("signature {}", invariants::smith::signature(&lm.matrix));
            if let Ok(g) = invariants::surgered_h1(&d) {
                println!("surgered_h1 {g}");
            }
            Ok(0)
        }
        Cmd::Reduce { file, out, log } => {
            let d = load_valid(&file)?;
            let r = reduce(&d).map_err(|e| Fail(1, e.to_string()))?;
            write(&out, &io::serialize(&r.diagram))?;
            if let Some(log) = log {
                write(&log, &moves::format_log(&r.moves))?;
            }
            println!("{} moves", r.moves.len());
            Ok(0)
        }
        Cmd::RecognizeS3 { file, depth } => {
            let d = load_valid(&file)?;
            let v = recognize_s3(&d, depth).map_err(|e| Fail(1, e.to_string()))?;
            match &v {
                Verdict::Yes(m) => print!("yes\n{}", moves::format_log(m)),
                Verdict::No(o) => println!("no: {o}"),
                Verdict::Unknown(x) => println!("unknown: depth {} exhausted after {} nodes", x.budget, x.explored),
            }
            Ok(verdict_code(&v))
        }
        Cmd::Equiv { a, b, budget, mirror, witness } => {
            let (d1, d2) = (load_valid(&a)?, load_valid(&b)?);
            let v = isomorphic(&d1, &d2, &EquivOptions { budget, mirror }).map_err(|e| Fail(1, e.to_string()))?;
            match &v {
                Verdict::Yes(w) => {
                    println!("yes");
                    if let Some(p) = witness {
                        write(&p, &moves::format_witness(w))?;
                    }
                }
                Verdict::No(o) => println!("no: {o}"),
                Verdict::Unknown(x) => println!("unknown: budget {} exhausted after {} nodes", x.budget, x.explored),
            }
            Ok(verdict_code(&v))
        }
        Cmd::Conj { a, b, budget, mirror } => {
            let (d1, d2) = (load_valid(&a)?, load_valid(&b)?);
            let c = conjugate(&d1, &d2, &EquivOptions { budget, mirror }).map_err(|e| Fail(1, e.to_string()))?;
            println!("{}", c.verdict.label());
            if let Verdict::No(o) = &c.verdict {
                println!("{o}");
            }
            println!(
                "enumerated {} isomorphisms ({})",
                c.enumerated,
                if c.exhaustive { "exhaustive" } else { "not exhaustive" }
            );
            Ok(verdict_code(&c.verdict))
        }
        Cmd::Catalog { name, out } => {
            let d = catalog::standard(&name).map_err(|e| Fail(USAGE, e.to_string()))?;
            write(&out, &io::serialize(&d))?;
            Ok(0)
        }
        Cmd::Render { file, out } => {
            let d = load(&file)?;
            write(&out, &io::render_svg(&d))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
