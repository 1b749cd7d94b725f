//! Command-line front end: catalog inspection, Voronoi cells, forbidden
//! sets, sublattice verification, searches, and the bound rules, all with
//! deterministic JSON output.
//!
//! Exit codes: 0 success/verified, 2 refuted, 3 inconclusive, 1 error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chromatic_lattice::bounds::{self, EisensteinResult, RuleOutcome};
use chromatic_lattice::error::Error;
use chromatic_lattice::exactlin::{IntMatrix, Rat};
use chromatic_lattice::forbidden::{cone_cell_with_radius, forbidden_set_cached};
use chromatic_lattice::lattice::{catalog, voronoi, Lattice};
use chromatic_lattice::search;
use chromatic_lattice::subverify::{sublattice_from_json, VerificationReport, Verifier, VerifyMethod};
use chromatic_lattice::symmetry::ReflectionGroup;

#[derive(Parser)]
#[command(
    name = "chromatic-lattice",
    about = "Exact lattice toolkit certifying upper bounds on the chromatic number of Euclidean space",
    after_help = "Set CHROMATIC_LATTICE_CACHE_DIR to cache forbidden sets between runs."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct LatticeArgs {
    /// Catalog name, with rank where needed: e.g. Zn:2, An:3,
    /// An_star_dilated:5, Dn:4, Dn_star:3, E6_star, E7_star_paper, E8, Leech
    #[arg(long, conflicts_with = "lattice_file")]
    lattice: Option<String>,
    /// Lattice JSON file instead of a catalog name
    #[arg(long)]
    lattice_file: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Worker threads (default: all cores); results are identical for any value
    #[arg(long)]
    workers: Option<usize>,
    /// Write JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a catalog lattice as JSON
    Catalog {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compute the Voronoi cell and exact covering radius
    Voronoi {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Use the reflection-reduced cone cell instead of the full cell
        #[arg(long)]
        reduced: bool,
    },
    /// Compute the forbidden node set
    Forbidden {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Verify a sublattice against the forbidden set
    Verify {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Sublattice file: { "C": [[...]] }
        #[arg(long, required_unless_present = "recheck")]
        sublattice: Option<PathBuf>,
        /// Half-box radius for the necessary scan (default: 2 when n = 5, else 1)
        #[arg(long)]
        s: Option<u32>,
        /// Which check to run: auto, i, ii, iii
        #[arg(long, default_value = "auto")]
        check: String,
        /// Re-run verification from a previous report and compare verdicts
        #[arg(long)]
        recheck: Option<PathBuf>,
    },
    /// Search for low-index verified sublattices
    #[command(subcommand)]
    Search(SearchCommand),
    /// Certify bounds through the non-computational rules
    #[command(subcommand)]
    Bounds(BoundsCommand),
}

#[derive(Subcommand)]
enum SearchCommand {
    /// Random bases from the pool of short non-forbidden nodes
    Random {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 32)]
        pool: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Mandatory seed: equal seeds give byte-identical reports
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        s: Option<u32>,
    },
    /// Column-substitution descent from a verified start
    Descent {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        sublattice: PathBuf,
        #[arg(long, default_value_t = 32)]
        pool: usize,
        #[arg(long)]
        s: Option<u32>,
    },
    /// Every sublattice by ascending index; first verified hit is minimal
    Exhaustive {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        max_index: i64,
        #[arg(long)]
        s: Option<u32>,
        /// Progress checkpoint file, updated after each finished index
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// k^n colors when the covering-packing ratio is at most k - 1
    Dilation {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Also verify the k-fold sublattice through the full pipeline
        #[arg(long)]
        cross_verify: bool,
    },
    /// 7^(n/2) colors from an order-3 fixed-point-free automorphism
    Eisenstein {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        common: CommonArgs,
        /// Also verify 3I + J through the full pipeline (small ranks)
        #[arg(long)]
        cross_verify: bool,
    },
    /// The laminated covering-radius recursion table
    Laminated {
        #[command(flatten)]
        common: CommonArgs,
        /// Override the bundled data file
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 9)]
        lo: usize,
        #[arg(long, default_value_t = 38)]
        hi: usize,
    },
    /// Ratio arithmetic of a lattice sum from known covering data
    Sum {
        #[command(flatten)]
        common: CommonArgs,
        /// direct or pi3
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n1: usize,
        #[arg(long)]
        n2: usize,
        /// Squared covering-packing ratio of the first factor, e.g. 5/2
        #[arg(long)]
        rho1_sq: String,
        /// Squared covering-packing ratio of the second factor
        #[arg(long)]
        rho2_sq: String,
    },
    /// Construct the direct or pi/3 sum of two catalog lattices
    SumLattice {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        kind: String,
        #[arg(long)]
        lattice_a: String,
        #[arg(long)]
        lattice_b: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_lattice(args: &LatticeArgs) -> Result<Lattice, Error> {
    if let Some(path) = &args.lattice_file {
        let text = std::fs::read_to_string(path)?;
        let json = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("lattice json: {e}")))?;
        return Lattice::from_json(json);
    }
    let spec = args
        .lattice
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("pass --lattice or --lattice-file".to_string()))?;
    let (name, n) = match spec.split_once(':') {
        Some((name, n)) => {
            let n: usize = n
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad rank in `{spec}`")))?;
            (name.to_string(), Some(n))
        }
        None => match short_alias(spec) {
            Some(pair) => pair,
            None => (spec.to_string(), None),
        },
    };
    catalog(&name, n)
}

/// `Z2`, `A5`, `D4` read as `Zn:2`, `An:5`, `Dn:4`.
fn short_alias(spec: &str) -> Option<(String, Option<usize>)> {
    if spec.len() < 2 || !spec.is_ascii() {
        return None;
    }
    let (head, digits) = spec.split_at(1);
    let n: usize = digits.parse().ok()?;
    let family = match head {
        "Z" => "Zn",
        "A" => "An",
        "D" => "Dn",
        _ => return None,
    };
    Some((family.to_string(), Some(n)))
}

fn emit(common: &CommonArgs, value: &impl serde::Serialize) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    match &common.out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn with_workers<T>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    match workers {
        None => f(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("worker pool")
            .install(f),
    }
}

fn parse_method(check: &str) -> Result<VerifyMethod, Error> {
    Ok(match check {
        "auto" => VerifyMethod::Auto,
        "i" => VerifyMethod::CheckIOnly,
        "ii" => VerifyMethod::CheckII,
        "iii" => VerifyMethod::CheckIII,
        other => return Err(Error::InvalidInput(format!("unknown check `{other}`"))),
    })
}

fn verdict_exit(report: &VerificationReport) -> ExitCode {
    match report.verdict.as_str() {
        "verified" => ExitCode::from(0),
        "refuted" => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Catalog { lattice, common } => {
            let lat = load_lattice(&lattice)?;
            emit(&common, &lat.to_json())?;
            Ok(ExitCode::from(0))
        }
        Command::Voronoi { lattice, common, reduced } => {
            let lat = load_lattice(&lattice)?;
            with_workers(common.workers, || -> Result<ExitCode, Error> {
                let (cell, covering_sq) = if reduced {
                    let group = ReflectionGroup::from_lattice(&lat)?;
                    cone_cell_with_radius(&lat, &group)?
                } else {
                    let cell = voronoi::voronoi_cell(&lat)?;
                    let covering = voronoi::covering_radius_sq(&lat)?;
                    (cell, covering)
                };
                #[derive(serde::Serialize)]
                struct VoronoiOut {
                    covering_radius_sq: Rat,
                    packing_radius_sq: Rat,
                    cell: chromatic_lattice::polytope::PolytopeJson,
                }
                emit(
                    &common,
                    &VoronoiOut {
                        covering_radius_sq: covering_sq,
                        packing_radius_sq: lat.packing_radius_sq(),
                        cell: cell.to_json(),
                    },
                )?;
                Ok(ExitCode::from(0))
            })
        }
        Command::Forbidden { lattice, common } => {
            let lat = load_lattice(&lattice)?;
            with_workers(common.workers, || -> Result<ExitCode, Error> {
                let f = forbidden_set_cached(&lat)?;
                emit(&common, &f.to_json())?;
                Ok(ExitCode::from(0))
            })
        }
        Command::Verify { lattice, common, sublattice, s, check, recheck } => {
            let lat = load_lattice(&lattice)?;
            let method = parse_method(&check)?;
            with_workers(common.workers, || -> Result<ExitCode, Error> {
                let (c, expect): (IntMatrix, Option<VerificationReport>) = match (&sublattice, &recheck)
                {
                    (Some(path), None) => {
                        let text = std::fs::read_to_string(path)?;
                        (sublattice_from_json(&text)?, None)
                    }
                    (None, Some(path)) => {
                        let text = std::fs::read_to_string(path)?;
                        let report: VerificationReport = serde_json::from_str(&text)
                            .map_err(|e| Error::InvalidInput(format!("report json: {e}")))?;
                        (IntMatrix::from_rows(&report.c), Some(report))
                    }
                    _ => {
                        return Err(Error::InvalidInput(
                            "pass exactly one of --sublattice or --recheck".to_string(),
                        ))
                    }
                };
                let f = forbidden_set_cached(&lat)?;
                let verifier = Verifier::new(&lat, &f);
                let report = verifier.verify(&c, s, method)?;
                if let Some(previous) = expect {
                    if previous.verdict != report.verdict || previous.index != report.index {
                        return Err(Error::IntegrityMismatch {
                            what: "recheck verdict",
                            declared: format!("{} (index {})", previous.verdict, previous.index),
                            computed: format!("{} (index {})", report.verdict, report.index),
                        });
                    }
                }
                emit(&common, &report)?;
                Ok(verdict_exit(&report))
            })
        }
        Command::Search(cmd) => run_search(cmd),
        Command::Bounds(cmd) => run_bounds(cmd),
    }
}

fn run_search(cmd: SearchCommand) -> Result<ExitCode, Error> {
    match cmd {
        SearchCommand::Random { lattice, common, pool, trials, seed, s } => {
            let lat = load_lattice(&lattice)?;
            with_workers(common.workers, || -> Result<ExitCode, Error> {
                let f = forbidden_set_cached(&lat)?;
                let out = search::random_search(&lat, &f, pool, trials, seed, s)?;
                emit(&common, &out)?;
                Ok(ExitCode::from(if out.best.is_some() { 0 } else { 3 }))
            })
        }
        SearchCommand::Descent { lattice, common, sublattice, pool, s } => {
            let lat = load_lattice(&lattice)?;
            with_workers(common.workers, || -> Result<ExitCode, Error> {
                let f = forbidden_set_cached(&lat)?;
                let text = std::fs::read_to_string(&sublattice)?;
                let c0 = sublattice_from_json(&text)?;
                let pool_nodes = search::build_pool(&lat, &f, pool)?;
                let report = search::descent(&lat, &f, &c0, &pool_nodes, s)?;
                emit(&common, &report)?;
                Ok(ExitCode::from(0))
            })
        }
        SearchCommand::Exhaustive { lattice, common, max_index, s, checkpoint } => {
            let lat = load_lattice(&lattice)?;
            with_workers(common.workers, || -> Result<ExitCode, Error> {
                let f = forbidden_set_cached(&lat)?;
                let hash = lat.content_hash();
                let out = search::exhaustive_search(&lat, &f, max_index, s, |d| {
                    if let Some(path) = &checkpoint {
                        #[derive(serde::Serialize)]
                        struct Checkpoint<'a> {
                            lattice_hash: &'a str,
                            enumerated_up_to_d: i64,
                            best: Option<&'a str>,
                        }
                        let _ = std::fs::write(
                            path,
                            serde_json::to_string(&Checkpoint {
                                lattice_hash: &hash,
                                enumerated_up_to_d: d,
                                best: None,
                            })
                            .expect("serializable"),
                        );
                    }
                })?;
                emit(&common, &out)?;
                Ok(ExitCode::from(if out.minimum.is_some() { 0 } else { 3 }))
            })
        }
    }
}

fn run_bounds(cmd: BoundsCommand) -> Result<ExitCode, Error> {
    match cmd {
        BoundsCommand::Dilation { lattice, common, k, cross_verify } => {
            let lat = load_lattice(&lattice)?;
            with_workers(common.workers, || -> Result<ExitCode, Error> {
                match bounds::dilation_bound(&lat, k)? {
                    RuleOutcome::Certified(cert) => {
                        if cross_verify {
                            let n = lat.n();
                            let mut c = IntMatrix::zero(n, n);
                            for i in 0..n {
                                c[(i, i)] = k as i64;
                            }
                            cross_verify_matrix(&lat, &c)?;
                        }
                        emit(&common, &cert)?;
                        Ok(ExitCode::from(0))
                    }
                    RuleOutcome::NotApplicable { ratio_sq, threshold_sq } => {
                        eprintln!("not applicable: ratio^2 = {ratio_sq} exceeds {threshold_sq}");
                        Ok(ExitCode::from(3))
                    }
                }
            })
        }
        BoundsCommand::Eisenstein { lattice, common, cross_verify } => {
            let lat = load_lattice(&lattice)?;
            with_workers(common.workers, || -> Result<ExitCode, Error> {
                match bounds::eisenstein_bound_full(&lat)? {
                    EisensteinResult::Certified(out) => {
                        if cross_verify {
                            cross_verify_matrix(&lat, &out.c_matrix)?;
                        }
                        emit(&common, &out.certificate)?;
                        Ok(ExitCode::from(0))
                    }
                    EisensteinResult::NotApplicable { ratio_sq, threshold_sq } => {
                        eprintln!("not applicable: ratio^2 = {ratio_sq} exceeds {threshold_sq}");
                        Ok(ExitCode::from(3))
                    }
                }
            })
        }
        BoundsCommand::Laminated { common, data, lo, hi } => {
            let inputs = match data {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    #[derive(serde::Deserialize)]
                    struct DataFile {
                        rows: Vec<bounds::LaminatedInput>,
                    }
                    let file: DataFile = serde_json::from_str(&text)
                        .map_err(|e| Error::InvalidInput(format!("laminated data: {e}")))?;
                    file.rows
                }
                None => bounds::builtin_inputs(),
            };
            let rows = bounds::laminated_chain(&inputs, lo, hi)?;
            emit(&common, &rows)?;
            Ok(ExitCode::from(0))
        }
        BoundsCommand::Sum { common, kind, n1, n2, rho1_sq, rho2_sq } => {
            let r1 = Rat::parse(&rho1_sq)?;
            let r2 = Rat::parse(&rho2_sq)?;
            let cert = bounds::sum_rule_certificate(&kind, n1, n2, &r1, &r2)?;
            emit(&common, &cert)?;
            Ok(ExitCode::from(0))
        }
        BoundsCommand::SumLattice { common, kind, lattice_a, lattice_b } => {
            let la = load_lattice(&LatticeArgs { lattice: Some(lattice_a), lattice_file: None })?;
            let lb = load_lattice(&LatticeArgs { lattice: Some(lattice_b), lattice_file: None })?;
            let out = match kind.as_str() {
                "direct" => bounds::direct_sum(&la, &lb)?,
                "pi3" => bounds::pi3_sum(&la, &lb)?,
                other => return Err(Error::InvalidInput(format!("unknown sum kind `{other}`"))),
            };
            #[derive(serde::Serialize)]
            struct SumOut {
                ratio_bound_sq: Rat,
                packing_verified: bool,
                certificate: bounds::Certificate,
                lattice: chromatic_lattice::lattice::LatticeJson,
            }
            emit(
                &common,
                &SumOut {
                    ratio_bound_sq: out.ratio_bound_sq,
                    packing_verified: out.packing_verified,
                    certificate: out.certificate,
                    lattice: out.lattice.to_json(),
                },
            )?;
            Ok(ExitCode::from(0))
        }
    }
}

/// Full-pipeline verification of a rule-constructed sublattice.
fn cross_verify_matrix(lat: &Lattice, c: &IntMatrix) -> Result<(), Error> {
    let f = forbidden_set_cached(lat)?;
    let verifier = Verifier::new(lat, &f);
    let report = verifier.verify(c, None, VerifyMethod::Auto)?;
    if !report.is_verified() {
        return Err(Error::IntegrityMismatch {
            what: "rule cross-verification",
            declared: "verified".to_string(),
            computed: report.verdict,
        });
    }
    eprintln!("cross-verified: index {}", report.index);
    Ok(())
}
