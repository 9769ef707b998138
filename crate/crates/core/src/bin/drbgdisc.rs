use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use drbgdisc::bounds::{evaluate, BoundQuery, Formula};
use drbgdisc::drbg::{seed_from_entropy, Generator, Mechanism, Seed};
use drbgdisc::harness::{
    planar_search, plot_points_svg, plot_sweep_svg, read_sweep_csv, run_sweep, write_planar, SweepConfig,
};
use drbgdisc::inverse::{empirical_inverse, InverseQuery, Mode};
use drbgdisc::points::{generate_points, load_points, save_points, write_points, Precision, WriteOptions};
use drbgdisc::stardisc::{star_discrepancy_exact, star_discrepancy_oracle, Budget, DiscrepancyResult};
use drbgdisc::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "drbgdisc", version, about = "Star discrepancy of DRBG-generated point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set from a seeded bit generator.
    Generate(GenerateArgs),
    /// Exact star discrepancy of a point file.
    Discrepancy(DiscrepancyArgs),
    /// Evaluate one of the closed-form bounds.
    Bound(BoundArgs),
    /// Smallest N whose generated set reaches D* <= epsilon.
    Inverse(InverseArgs),
    /// Discrepancy-vs-N sweep with CSV and SVG output.
    Sweep(SweepArgs),
    /// Draw SVG figures.
    Plot {
        #[command(subcommand)]
        what: PlotCommand,
    },
}

#[derive(Args)]
struct SeedArgs {
    /// Seed as hex (384 bits for ctr-drbg-256).
    #[arg(long, conflicts_with = "entropy")]
    seed: Option<String>,
    /// Draw the seed from OS entropy (the default); optional bit length.
    #[arg(long, num_args = 0..=1, default_missing_value = "0")]
    entropy: Option<usize>,
    #[arg(long, default_value = "ctr-drbg-256")]
    mechanism: String,
}

impl SeedArgs {
    fn mechanism(&self) -> drbgdisc::Result<Mechanism> {
        self.mechanism.parse()
    }

    fn resolve(&self) -> drbgdisc::Result<Seed> {
        if let Some(hex) = &self.seed {
            return Seed::from_hex(hex);
        }
        let mech = self.mechanism()?;
        let bits = match self.entropy {
            Some(b) if b > 0 => b,
            _ => mech.default_seed_bits(),
        };
        let seed = seed_from_entropy(bits)?;
        eprintln!("seed (from entropy): {}", seed.to_hex());
        Ok(seed)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 52)]
    p: u32,
    #[command(flatten)]
    seed: SeedArgs,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add decimal coordinates as trailing comments.
    #[arg(long)]
    decimal: bool,
}

#[derive(Args)]
struct DiscrepancyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Use the brute-force grid oracle instead of the exact search.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Print JSON instead of CSV and text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    formula: String,
    #[arg(long, default_value_t = 1)]
    d: u32,
    #[arg(long, default_value_t = 1)]
    n: u64,
    #[arg(long, default_value_t = 52)]
    p: u32,
    #[arg(long, default_value_t = 256)]
    b: u32,
    #[arg(long, default_value_t = drbgdisc::bounds::HNWW_CONSTANT)]
    c: f64,
    #[arg(long, default_value_t = 0.5)]
    q: f64,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct InverseArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    cap: usize,
    #[arg(long, default_value = "prefix")]
    mode: String,
    #[arg(long, default_value_t = 52)]
    p: u32,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Write the `N,dstar` trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Key-value config file; flags below override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    /// Comma-separated point counts.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long)]
    seeds: Option<usize>,
    /// Master seed (hex).
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    mechanism: Option<String>,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg_dir: Option<PathBuf>,
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Record wall-clock times in the CSV.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum PlotCommand {
    /// One SVG per dimension from a sweep CSV.
    Sweep {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Scatter of a two-dimensional point file with its witness box.
    Points {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search seeds for small two-dimensional sets below a discrepancy target.
    Planar {
        /// Master seed (hex) from which candidate seeds are derived.
        #[arg(long)]
        seed: String,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 15)]
        small_points: usize,
        #[arg(long, default_value_t = 0.25)]
        small_epsilon: f64,
        #[arg(long, default_value_t = 300)]
        large_points: usize,
        #[arg(long, default_value_t = 0.1)]
        large_epsilon: f64,
        #[arg(long, default_value_t = 10_000)]
        max_tries: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Infeasible(_) => EXIT_INFEASIBLE,
                Error::InvalidArgument(_)
                | Error::UnknownMechanism(_)
                | Error::SeedLength { .. }
                | Error::Domain { .. }
                | Error::Parse { .. } => EXIT_USAGE,
                _ => EXIT_INTERNAL,
            })
        }
    }
}

fn run(cli: Cli) -> drbgdisc::Result<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Discrepancy(a) => discrepancy(a),
        Command::Bound(a) => bound(a),
        Command::Inverse(a) => inverse(a),
        Command::Sweep(a) => sweep(a),
        Command::Plot { what } => plot(what),
    }
}

fn generate(a: GenerateArgs) -> drbgdisc::Result<()> {
    let mech = a.seed.mechanism()?;
    let seed = a.seed.resolve()?;
    let mut gen = Generator::instantiate(mech, &seed)?;
    let ps = generate_points(&mut gen, a.d, a.n, Precision::new(a.p)?)?;
    let opts = WriteOptions { decimal: a.decimal };
    match a.out {
        Some(path) => save_points(&ps, &path, opts),
        None => write_points(&ps, std::io::stdout().lock(), opts),
    }
}

fn discrepancy_csv(r: &DiscrepancyResult) -> String {
    let witness: Vec<String> = r.witness.0.iter().map(|t| t.to_string()).collect();
    format!(
        "value,witness,kind,open_count,closed_count,certified,elapsed_ms\n{},{},{},{},{},{},{:.3}\n",
        r.value,
        witness.join(" "),
        r.kind,
        r.open_count,
        r.closed_count,
        r.certified,
        r.elapsed.as_secs_f64() * 1e3
    )
}

fn discrepancy(a: DiscrepancyArgs) -> drbgdisc::Result<()> {
    let ps = load_points(&a.input)?;
    let r = if a.oracle {
        star_discrepancy_oracle(&ps)?
    } else {
        let budget = a.budget_seconds.map_or(Budget::unlimited(), Budget::seconds);
        star_discrepancy_exact(&ps, budget)?
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&r).expect("result serializes"));
        return Ok(());
    }
    print!("{}", discrepancy_csv(&r));
    println!(
        "D* = {} at t = {} ({}, open {} / closed {} of {}){} in {:.3?}",
        r.value,
        r.witness,
        r.kind,
        r.open_count,
        r.closed_count,
        ps.len(),
        if r.certified { "" } else { " [NOT CERTIFIED: budget exhausted, lower bound only]" },
        r.elapsed
    );
    Ok(())
}

fn bound(a: BoundArgs) -> drbgdisc::Result<()> {
    let formula: Formula = a.formula.parse()?;
    let q = BoundQuery {
        d: a.d,
        n: a.n,
        p: a.p,
        b: a.b,
        c: a.c,
        q: a.q,
        epsilon: a.epsilon,
    };
    let report = evaluate(formula, &q)?;
    if a.json {
        println!("{}", report.to_json());
    } else {
        print!("{report}");
    }
    Ok(())
}

fn inverse(a: InverseArgs) -> drbgdisc::Result<()> {
    let mech = a.seed.mechanism()?;
    let seed = a.seed.resolve()?;
    let mut q = InverseQuery::new(a.d, a.epsilon, seed, a.cap);
    q.mechanism = mech;
    q.mode = a.mode.parse::<Mode>()?;
    q.precision = Precision::new(a.p)?;
    if let Some(s) = a.budget_seconds {
        q.budget = Budget::seconds(s);
    }
    let r = empirical_inverse(&q)?;
    if let Some(path) = &a.trace {
        fs::write(path, r.trace_csv())?;
    }
    println!("{}", r.to_json());
    Ok(())
}

fn sweep(a: SweepArgs) -> drbgdisc::Result<()> {
    let seed = a.seed.as_deref().map(Seed::from_hex).transpose()?;
    let mut cfg = match &a.config {
        Some(path) => SweepConfig::parse(&fs::read_to_string(path)?, seed.clone())?,
        None => {
            if a.d.is_empty() {
                return Err(Error::InvalidArgument("sweep needs --config or --d/--n".into()));
            }
            let seed = match seed.clone() {
                Some(s) => s,
                None => {
                    let s = seed_from_entropy(384)?;
                    eprintln!("master seed (from entropy): {}", s.to_hex());
                    s
                }
            };
            SweepConfig::new(a.d.clone(), a.n.clone(), 1, seed)
        }
    };
    if a.config.is_some() {
        if !a.d.is_empty() {
            cfg.d_list = a.d.clone();
        }
        if !a.n.is_empty() {
            cfg.n_list = a.n.clone();
        }
        if let Some(s) = seed {
            cfg.master_seed = s;
        }
    }
    if let Some(k) = a.seeds {
        cfg.seeds_per_cell = k;
    }
    if let Some(m) = &a.mechanism {
        cfg.mechanism = m.parse()?;
    }
    if let Some(p) = a.p {
        cfg.precision = Precision::new(p)?;
    }
    if a.csv.is_some() {
        cfg.csv = a.csv.clone();
    }
    if a.svg_dir.is_some() {
        cfg.svg_dir = a.svg_dir.clone();
    }
    if a.budget_seconds.is_some() {
        cfg.budget_seconds = a.budget_seconds;
    }
    cfg.timing |= a.timing;

    let out = run_sweep(&cfg)?;
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    if cfg.csv.is_none() {
        print!("{}", out.csv);
    }
    Ok(())
}

fn plot(what: PlotCommand) -> drbgdisc::Result<()> {
    match what {
        PlotCommand::Sweep { csv, out_dir } => {
            let records = read_sweep_csv(&fs::read_to_string(csv)?)?;
            let mut dims: Vec<usize> = records.iter().map(|r| r.d).collect();
            dims.sort_unstable();
            dims.dedup();
            fs::create_dir_all(&out_dir)?;
            for d in dims {
                let recs: Vec<_> = records.iter().filter(|r| r.d == d).cloned().collect();
                let path = out_dir.join(format!("sweep_d{d}.svg"));
                fs::write(&path, plot_sweep_svg(&recs)?)?;
                println!("{}", path.display());
            }
            Ok(())
        }
        PlotCommand::Points { input, out } => {
            let ps = load_points(&input)?;
            let r = star_discrepancy_exact(&ps, Budget::unlimited())?;
            fs::write(&out, plot_points_svg(&ps, &r)?)?;
            println!("{}", out.display());
            Ok(())
        }
        PlotCommand::Planar {
            seed,
            out_dir,
            small_points,
            small_epsilon,
            large_points,
            large_epsilon,
            max_tries,
        } => {
            let master = Seed::from_hex(&seed)?;
            for (stem, cap, eps) in [
                ("small", small_points, small_epsilon),
                ("large", large_points, large_epsilon),
            ] {
                match planar_search(&master, cap, eps, max_tries)? {
                    Some(set) => {
                        let (txt, svg) = write_planar(&set, &out_dir, stem)?;
                        println!(
                            "{stem}: N={} D*={} seed={} (derived index {}, {} tries) -> {}, {}",
                            set.points.len(),
                            set.result.value,
                            set.seed.to_hex(),
                            set.seed_index,
                            set.tries,
                            txt.display(),
                            svg.display()
                        );
                    }
                    None => {
                        return Err(Error::Infeasible(format!(
                            "no seed among {max_tries} reached D* <= {eps} within {cap} points"
                        )))
                    }
                }
            }
            Ok(())
        }
    }
}
