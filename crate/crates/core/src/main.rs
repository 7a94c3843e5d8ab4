use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hyperpoisson::curve::Interval;
use hyperpoisson::runner::{self, verify, ExperimentConfig, OutputFormat, ResultRow, Suite};
use hyperpoisson::Error;

#[derive(Parser, Debug)]
#[command(
    name = "hyperpoisson",
    version,
    about = "Point spacing statistics on hyperelliptic curves mod p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Point counts, |S_I|, N(H) and N(A,B)
    Count(Common),
    /// Gap statistics mu(lambda), optionally distorted by (J, g)
    Gaps(Common),
    /// Window counts P_k(t) against binomial and Poisson models
    Poisson(Common),
    /// Run a fixed verification suite
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[command(flatten)]
        common: Common,
    },
    /// Gap and window statistics over a range of primes
    Sweep(Common),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Identities,
    Bounds,
    Weil,
    Ranks,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug, Default)]
struct Common {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    pmin: Option<u64>,
    #[arg(long)]
    pmax: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    /// Coefficients of f, lowest degree first
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    f: Option<Vec<i64>>,
    /// Interval for y, as lo:hi
    #[arg(long)]
    i: Option<Interval>,
    /// Interval for g, as lo:hi
    #[arg(long)]
    j: Option<Interval>,
    /// Built-in map name or expression in x, y, x0, y0
    #[arg(long)]
    g: Option<String>,
    #[arg(long = "h", value_delimiter = ',', allow_hyphen_values = true)]
    h: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    a: Vec<i64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    b: Vec<i64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// key = value file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tolerance: Option<f64>,
}

impl Common {
    fn resolve(self) -> Result<ExperimentConfig, Error> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let non_empty = |v: Vec<i64>| (!v.is_empty()).then_some(v);
        let flags = ExperimentConfig {
            p: self.p,
            pmin: self.pmin,
            pmax: self.pmax,
            count: self.count,
            f: self.f,
            i: self.i,
            j: self.j,
            g: self.g,
            h: non_empty(self.h),
            a: non_empty(self.a),
            b: non_empty(self.b),
            t: self.t,
            lambdas: self.lambdas,
            kmax: self.kmax,
            seed: self.seed,
            threads: self.threads,
            format: self.format.map(|f| match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            }),
            tolerance: self.tolerance,
        };
        Ok(base.merge(flags))
    }
}

enum Failure {
    Usage(Error),
    Verification,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let (command, common, suite) = match cli.command {
        Command::Count(c) => ("count", c, None),
        Command::Gaps(c) => ("gaps", c, None),
        Command::Poisson(c) => ("poisson", c, None),
        Command::Sweep(c) => ("sweep", c, None),
        Command::Verify { suite, common } => ("verify", common, Some(suite)),
    };
    let cfg = common.resolve().map_err(Failure::Usage)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| Failure::Usage(Error::Config(e.to_string())))?;
    let rows: Vec<ResultRow> = pool
        .install(|| match command {
            "count" => runner::cmd_count(&cfg),
            "gaps" => runner::cmd_gaps(&cfg),
            "poisson" => runner::cmd_poisson(&cfg),
            "sweep" => runner::cmd_sweep(&cfg),
            _ => {
                let suite = match suite.expect("verify carries a suite") {
                    SuiteArg::Identities => Suite::Identities,
                    SuiteArg::Bounds => Suite::Bounds,
                    SuiteArg::Weil => Suite::Weil,
                    SuiteArg::Ranks => Suite::Ranks,
                };
                runner::cmd_verify(suite, &cfg)
            }
        })
        .map_err(Failure::Usage)?;
    runner::write_rows(&rows, cfg.format(), io::stdout().lock()).map_err(Failure::Usage)?;
    if command == "verify" && !verify::all_ok(&rows) {
        return Err(Failure::Verification);
    }
    Ok(())
}
