use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclodiv::bounds::{
    BoundReport, bounds_csv, check_lower, check_upper_grid, decimal, leading_term, survey, survey_csv,
};
use cyclodiv::constructions::{extremal_fk, prefix_witness, suzuki_witness, WitnessReport};
use cyclodiv::cyclotomic::{cyclotomic, cyclotomic_trunc, factor_xn_minus_1};
use cyclodiv::numtheory::primorial;
use cyclodiv::search::{SearchConfig, SearchResult, big_b, big_h, DEFAULT_HEIGHT_BUDGET, DEFAULT_SUBSET_BUDGET};
use cyclodiv::{DEFAULT_MATERIALIZATION_CAP, Error, FactoredInt, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "cyclodiv", version, about = "Cyclotomic polynomials and the divisors of x^n - 1")]
struct Cli {
    #[command(flatten)]
    run: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct RunConfig {
    /// Largest degree expanded in full.
    #[arg(long, global = true, default_value_t = DEFAULT_MATERIALIZATION_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    /// Largest number of subsets enumerated for H(r, n).
    #[arg(long, global = true, default_value_t = DEFAULT_SUBSET_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Largest number of subsets enumerated for B(n).
    #[arg(long, global = true, default_value_t = DEFAULT_HEIGHT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    height_budget: u64,
    /// Threads used by the height grid.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Output format. Tables default to CSV unless json is requested.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,
    /// Truncation order for witness verification (defaults per construction).
    #[arg(long, global = true)]
    trunc_cap: Option<usize>,
    /// Seed for randomized runs.
    #[arg(long, global = true, default_value_t = 20_240_611)]
    seed: u64,
}

impl RunConfig {
    fn search(&self) -> SearchConfig {
        SearchConfig {
            subset_budget: self.budget,
            height_budget: self.height_budget,
            workers: self.workers as usize,
            materialization_cap: self.cap,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// phi_N, in full or modulo x^{R+1}. N may be written as 2^1.3^1.5^1.
    Cyclo {
        n: FactoredInt,
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// x^N - 1 as the product of phi_d over d | N.
    FactorX { n: FactoredInt },
    /// B(N) with a witness subset.
    Bn { n: FactoredInt },
    /// H(R, N) with a witness subset.
    Hrn { r: usize, n: FactoredInt },
    /// Explicit divisors of x^l - 1 with verified properties.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// The primorial product f_K and its R-th coefficient.
    Extremal {
        k: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// H(r, n) against the dominating series, or the primorial lower bound.
    Bounds {
        #[arg(long)]
        r: usize,
        #[arg(long, required_unless_present = "lower")]
        n_max: Option<u64>,
        #[arg(long)]
        lower: bool,
        #[arg(long, required_if_eq("lower", "true"))]
        k_max: Option<usize>,
    },
    /// Exploratory table of logarithmic statistics for 3 <= n <= N_MAX.
    Survey {
        #[arg(long)]
        n_max: u64,
    },
}

#[derive(Subcommand, Debug)]
enum WitnessCommand {
    /// Divisor whose coefficients 1..=r are c1,..,cr.
    Prefix {
        #[arg(allow_hyphen_values = true)]
        target: Target,
    },
    /// Divisor with exactly M irreducible factors covering -N..=N.
    Suzuki { m: usize, n: usize },
    /// Prefix witnesses for random targets drawn from --seed.
    RandomPrefix {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        #[arg(long, default_value_t = 8)]
        max_abs: i64,
    },
}

/// Comma separated coefficients such as `1,-1,0`.
#[derive(Clone, Debug)]
struct Target(Vec<i64>);

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|e| format!("{c:?}: {e}")))
            .collect::<std::result::Result<_, _>>()
            .map(Target)
    }
}

fn list<T: std::fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

fn set<T: std::fmt::Display>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn search_text(label: String, res: &SearchResult) -> String {
    format!("{label} = {}\nwitness: {}\n", res.value, set(&res.witness.members()))
}

fn witness_text(rep: &WitnessReport) -> String {
    let mut out = String::new();
    let indices: Vec<String> = rep.product.indices().iter().map(FactoredInt::factored_string).collect();
    let _ = writeln!(out, "indices: {}", set(&indices));
    let _ = writeln!(out, "order_l: {}", rep.product.order_l());
    let _ = writeln!(out, "truncation: {}", list(rep.truncation.coeffs()));
    for c in &rep.claims {
        let _ = writeln!(out, "  {} {}", if c.pass { "ok  " } else { "FAIL" }, c.name);
    }
    out
}

fn check_witness(rep: &WitnessReport) -> Result<()> {
    match rep.claims.iter().find(|c| !c.pass) {
        Some(c) => Err(Error::VerificationFailed(c.name.clone())),
        None => Ok(()),
    }
}

fn bounds_text(reports: &[BoundReport], fmt: Format) -> String {
    match fmt {
        Format::Json => to_json(&reports),
        _ => bounds_csv(reports),
    }
}

/// Output text plus any error to report after it has been printed.
fn run(cli: &Cli) -> Result<(String, Option<Error>)> {
    let cfg = cli.run.search();
    let fmt = cli.run.format;
    let text = match &cli.command {
        Command::Cyclo { n, trunc: Some(r) } => {
            let s = cyclotomic_trunc(n, *r);
            match fmt {
                Format::Json => to_json(&json!({ "n": n, "order": r, "coefficients": s })),
                _ => format!("{}\n", list(s.coeffs())),
            }
        }
        Command::Cyclo { n, trunc: None } => {
            let phi = cyclotomic(n, cli.run.cap)?;
            match fmt {
                Format::Json => to_json(&json!({ "n": n, "coefficients": phi })),
                _ => format!("{phi}\n"),
            }
        }
        Command::FactorX { n } => {
            let factors = factor_xn_minus_1(n, cli.run.cap)?;
            match fmt {
                Format::Json => to_json(
                    &factors
                        .iter()
                        .map(|(d, phi)| json!({ "d": d, "phi": phi }))
                        .collect::<Vec<_>>(),
                ),
                _ => factors
                    .iter()
                    .map(|(d, phi)| format!("phi_{d}: {phi}\n"))
                    .collect(),
            }
        }
        Command::Bn { n } => {
            let res = big_b(n, &cfg)?;
            match fmt {
                Format::Json => to_json(&res),
                _ => search_text(format!("B({n})"), &res),
            }
        }
        Command::Hrn { r, n } => {
            let res = big_h(*r, n, &cfg)?;
            match fmt {
                Format::Json => to_json(&res),
                _ => search_text(format!("H({r}, {n})"), &res),
            }
        }
        Command::Witness(w) => {
            let reports = match w {
                WitnessCommand::Prefix { target } => vec![prefix_witness(&target.0)?],
                WitnessCommand::Suzuki { m, n } => vec![suzuki_witness(*m, *n, cli.run.trunc_cap)?],
                WitnessCommand::RandomPrefix {
                    count,
                    max_len,
                    max_abs,
                } => random_prefix(cli.run.seed, *count, *max_len, *max_abs)?,
            };
            let failure = reports.iter().map(check_witness).find_map(|r| r.err());
            let text = match (fmt, reports.as_slice()) {
                (Format::Json, [one]) => to_json(one),
                (Format::Json, many) => to_json(&many),
                (_, many) => many.iter().map(witness_text).collect::<Vec<_>>().join("\n"),
            };
            return Ok((text, failure));
        }
        Command::Extremal { k, r } => {
            let fk = extremal_fk(*k)?;
            let s = fk.trunc(*r);
            let d_n = primorial(*k)?.divisor_count();
            let coeff = s.coeff(*r);
            let ratio = BigRational::from_integer(BigInt::from(coeff.magnitude().clone()))
                / leading_term(*r, d_n);
            match fmt {
                Format::Json => to_json(&json!({
                    "k": k,
                    "r": r,
                    "d_n": d_n,
                    "indices": fk.indices(),
                    "truncation": s,
                    "ratio": ratio.to_string(),
                })),
                _ => {
                    let indices: Vec<String> = fk.indices().iter().map(ToString::to_string).collect();
                    format!(
                        "indices: {}\ntruncation: {}\n(f_{k})_{r} = {}\nratio |(f_k)_r| 2^r r! / d^r = {} ({})\n",
                        set(&indices),
                        list(s.coeffs()),
                        coeff,
                        ratio,
                        decimal(&ratio, 12)
                    )
                }
            }
        }
        Command::Bounds {
            r,
            n_max,
            lower: false,
            ..
        } => {
            let n_max = n_max.expect("required by clap");
            let reports: Vec<BoundReport> = check_upper_grid(*r, n_max, &cfg)?
                .into_iter()
                .filter(|rep| rep.r >= 1 || *r == 0)
                .collect();
            bounds_text(&reports, fmt)
        }
        Command::Bounds {
            r,
            lower: true,
            k_max,
            ..
        } => {
            let k_max = k_max.expect("required by clap");
            let reports = (r.max(&1).to_owned()..=k_max)
                .map(|k| check_lower(*r, k, &cfg))
                .collect::<Result<Vec<_>>>()?;
            bounds_text(&reports, fmt)
        }
        Command::Survey { n_max } => {
            let rows = survey(*n_max, &cfg)?;
            match fmt {
                Format::Json => to_json(&rows),
                _ => survey_csv(&rows),
            }
        }
    };
    Ok((text, None))
}

fn random_prefix(seed: u64, count: usize, max_len: usize, max_abs: i64) -> Result<Vec<WitnessReport>> {
    if max_len == 0 {
        return Err(Error::Precondition("--max-len must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            let target: Vec<i64> = (0..len).map(|_| rng.gen_range(-max_abs..=max_abs)).collect();
            prefix_witness(&target)
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, failure)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = write!(stdout, "{text}");
            if !text.ends_with('\n') {
                let _ = writeln!(stdout);
            }
            match failure {
                Some(e) => {
                    eprintln!("{}: {e}", e.name());
                    ExitCode::FAILURE
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("{}: {e}", e.name());
            ExitCode::FAILURE
        }
    }
}

