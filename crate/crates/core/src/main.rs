use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use qprim::dot::{closed_lattice_dot, specialization_dot};
use qprim::ideal::{format_elements, IdealError};
use qprim::ring::{build_ring, FiniteRing, RingError, RingSpec};
use qprim::sheaf::{is_local, DirectImage, Sheaf, SheafError};
use qprim::topology::{spectrum, Spectrum, SpectrumKind, TopologyError};
use qprim::verify::{
    default_corpus, parse_corpus, report_json, run_suite, summarize, SuiteOptions, VerifyError,
    DEFAULT_SEED,
};

#[derive(Parser)]
#[command(
    name = "qprim",
    version,
    about = "Quasi-primary spectra of finite commutative rings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RingArgs {
    /// JSON ring spec file.
    #[arg(long, conflicts_with = "zmod", required_unless_present = "zmod")]
    ring: Option<PathBuf>,
    /// Shorthand for the ring Z/n.
    #[arg(long)]
    zmod: Option<usize>,
    /// Which spectrum to use.
    #[arg(long, default_value = "qprim")]
    kind: SpectrumKind,
}

#[derive(Subcommand)]
enum Command {
    /// Order, units, idempotents and nilpotents.
    Inspect(RingArgs),
    /// Points with their radicals.
    Spectrum(RingArgs),
    /// Closed sets, components, connectedness, dimension, generic points.
    Topology(RingArgs),
    /// Section rings per open, stalks, direct-image verdict.
    Sheaf(RingArgs),
    /// Run the check suite and write a JSON report.
    Verify {
        /// `default` or a JSON file holding an array of ring specs.
        #[arg(long, default_value = "default")]
        corpus: String,
        /// Report path; the report goes to standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated check-id prefixes, e.g. `C09,C15`.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Record per-check wall time (makes reports differ between runs).
        #[arg(long)]
        timings: bool,
    },
    /// Write specialization.dot and closed_sets.dot.
    ExportDot {
        #[command(flatten)]
        ring: RingArgs,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

enum Failure {
    Input(String),
    Cap(String),
    Checks,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Checks => 1,
            Failure::Input(_) => 2,
            Failure::Cap(_) => 3,
        }
    }
}

impl From<RingError> for Failure {
    fn from(e: RingError) -> Self {
        match e {
            RingError::OrderCapExceeded { .. } => Failure::Cap(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<IdealError> for Failure {
    fn from(e: IdealError) -> Self {
        match e {
            IdealError::IdealCountCapExceeded { .. } => Failure::Cap(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<TopologyError> for Failure {
    fn from(e: TopologyError) -> Self {
        match e {
            TopologyError::Ideal(i) => i.into(),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<SheafError> for Failure {
    fn from(e: SheafError) -> Self {
        match e {
            SheafError::SearchCapExceeded { .. } => Failure::Cap(e.to_string()),
            SheafError::Ring(r) => r.into(),
            SheafError::Topology(t) => t.into(),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn load_ring(args: &RingArgs) -> Result<Arc<FiniteRing>, Failure> {
    let spec = match (&args.ring, args.zmod) {
        (_, Some(n)) => RingSpec::zmod(n),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?
        }
        (None, None) => return Err(Failure::Input("one of --ring or --zmod is required".into())),
    };
    Ok(build_ring(&spec)?)
}

fn list(xs: &[usize]) -> String {
    xs.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn points_label(space: &Spectrum, points: &fixedbitset::FixedBitSet) -> String {
    if points.is_clear() {
        return "∅".into();
    }
    points
        .ones()
        .map(|p| space.point_ideal(p).to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

fn inspect(ring: &FiniteRing) {
    println!("ring: {}", ring.label());
    println!("order: {}", ring.order());
    println!("characteristic: {}", ring.characteristic());
    println!("units: {}", list(&ring.units()));
    println!("idempotents: {}", list(&ring.idempotents()));
    println!("nilpotents: {}", list(&ring.nilpotents()));
}

fn print_spectrum(space: &Spectrum) {
    println!(
        "{}({}): {} points",
        space.kind(),
        space.ring().label(),
        space.len()
    );
    for p in 0..space.len() {
        println!(
            "{}  radical {}",
            space.point_ideal(p),
            space.point_radical(p)
        );
    }
}

fn print_topology(space: &Spectrum) -> Result<(), Failure> {
    let lattice = space.lattice();
    let topo = space.topology();
    println!(
        "{}({}): {} points, {} closed sets",
        space.kind(),
        space.ring().label(),
        space.len(),
        topo.len()
    );
    for c in topo.closed_sets() {
        let irreducible = if space.is_irreducible(&c.points) {
            "  irreducible"
        } else {
            ""
        };
        println!(
            "V({}) = [{}]{}",
            format_elements(&lattice.get(c.witness).elements()),
            points_label(space, &c.points),
            irreducible
        );
    }
    println!("components:");
    for c in space.irreducible_components() {
        println!("  [{}]", points_label(space, &c.points));
    }
    println!("connected: {}", space.is_connected());
    match space.chain_dimension() {
        Ok(d) => println!("dimension: {} terms (krull {})", d.terms, d.krull),
        Err(_) => println!("dimension: undefined (empty spectrum)"),
    }
    println!("generic points:");
    for c in space.irreducible_closed_sets() {
        let generic = space.generic_points(c)?;
        let names: Vec<String> = generic
            .iter()
            .map(|&p| space.point_ideal(p).to_string())
            .collect();
        println!(
            "  [{}]: {}",
            points_label(space, &c.points),
            names.join("; ")
        );
    }
    Ok(())
}

fn print_sheaf(ring: &Arc<FiniteRing>, kind: SpectrumKind) -> Result<(), Failure> {
    let space = Arc::new(spectrum(ring, kind)?);
    let sheaf = Sheaf::new(space.clone())?;
    println!("sections of the sheaf on {}({}):", kind, ring.label());
    for open in space.topology().open_sets() {
        let basic = open.basic.map(|a| format!("  U_{a}")).unwrap_or_default();
        println!(
            "  F([{}]) order {}{}",
            points_label(&space, &open.points),
            sheaf.sections(&open.points).order(),
            basic
        );
    }
    println!("stalks:");
    for p in 0..space.len() {
        let stalk = sheaf.stalk(p)?;
        let local = if is_local(&stalk.ring) {
            "local"
        } else {
            "not local"
        };
        println!(
            "  {}: order {}, {}",
            space.point_ideal(p),
            stalk.ring.order(),
            local
        );
    }
    let qprim = if kind == SpectrumKind::QPrim {
        space
    } else {
        Arc::new(spectrum(ring, SpectrumKind::QPrim)?)
    };
    let spec = Arc::new(spectrum(ring, SpectrumKind::Spec)?);
    let report = DirectImage::new(qprim, spec)?.report()?;
    let verdict = if report.holds() { "holds" } else { "fails" };
    println!(
        "direct image: {} ({} of {} opens isomorphic, natural {}, global sections {})",
        verdict, report.isomorphic_opens, report.opens, report.natural, report.global_sections
    );
    Ok(())
}

fn verify(
    corpus: &str,
    out: Option<PathBuf>,
    checks: Vec<String>,
    seed: u64,
    timings: bool,
) -> Result<(), Failure> {
    let corpus = if corpus == "default" {
        default_corpus()
    } else {
        let text = std::fs::read_to_string(corpus)
            .map_err(|e| Failure::Input(format!("{corpus}: {e}")))?;
        parse_corpus(&text)?
    };
    let opts = SuiteOptions {
        seed,
        filter: checks,
        timings,
    };
    let verdicts = run_suite(&corpus, &opts)?;
    let json = report_json(&verdicts);
    match out {
        Some(path) => std::fs::write(&path, json)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
        None => print!("{json}"),
    }
    let s = summarize(&verdicts);
    eprintln!(
        "{} pass, {} fail, {} skipped ({} over a cap)",
        s.pass, s.fail, s.skipped, s.capped
    );
    for v in verdicts
        .iter()
        .filter(|v| v.counterexample.is_some() || v.reason.is_some() && !v.cap_exceeded)
    {
        if let Some(cx) = &v.counterexample {
            eprintln!(
                "FAIL {} on {}: {}",
                v.check,
                v.ring,
                serde_json::to_string(cx).unwrap_or_default()
            );
        }
    }
    if s.fail > 0 {
        Err(Failure::Checks)
    } else if s.capped > 0 {
        Err(Failure::Cap("some checks were skipped over a cap".into()))
    } else {
        Ok(())
    }
}

fn export_dot(args: &RingArgs, dir: &PathBuf) -> Result<(), Failure> {
    let ring = load_ring(args)?;
    let space = spectrum(&ring, args.kind)?;
    std::fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    for (name, body) in [
        ("specialization.dot", specialization_dot(&space)),
        ("closed_sets.dot", closed_lattice_dot(&space)),
    ] {
        let path = dir.join(name);
        std::fs::write(&path, body)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Inspect(args) => inspect(&*load_ring(&args)?),
        Command::Spectrum(args) => print_spectrum(&spectrum(&load_ring(&args)?, args.kind)?),
        Command::Topology(args) => print_topology(&spectrum(&load_ring(&args)?, args.kind)?)?,
        Command::Sheaf(args) => print_sheaf(&load_ring(&args)?, args.kind)?,
        Command::Verify {
            corpus,
            out,
            checks,
            seed,
            timings,
        } => verify(&corpus, out, checks, seed, timings)?,
        Command::ExportDot { ring, out_dir } => export_dot(&ring, &out_dir)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Cap(m) => eprintln!("cap exceeded: {m}"),
                Failure::Checks => {}
            }
            ExitCode::from(f.code())
        }
    }
}
