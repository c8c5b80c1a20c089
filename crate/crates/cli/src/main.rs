//! Command-line front end: load instances, pick a demand oracle, enumerate
//! critical values, solve for the optimal contract, run reductions, generate
//! instances, and run the verification suites.
//!
//! Exit codes: 0 success, 1 property violation, 2 schema or usage error,
//! 3 oracle/instance mismatch, 4 oracle misbehavior (range violation or
//! inconsistent tie-breaking).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use linear_contracts::envelope::{
    all_critical_values, cv_segment, optimal_contract, utility_curve, BestResponse, DemandOracle,
};
use linear_contracts::error::Error;
use linear_contracts::generators::{generate, Family, GeneratorSpec};
use linear_contracts::io::{curve_to_csv, parse_instance, InstanceFile};
use linear_contracts::matching::{make_matching_contract_instance, MatchingDemand};
use linear_contracts::model::{Breakpoint, ContractInstance};
use linear_contracts::oracle::{BruteForceDemand, SupermodularDemand, DEFAULT_DEMAND_CAP};
use linear_contracts::rational::Rational;
use linear_contracts::reductions::{matching_to_demand, path_to_matching};
use linear_contracts::verify::run_suite;

#[derive(Parser)]
#[command(
    name = "lincon",
    about = "Exact linear-contract solver: critical values, optimal contracts, demand oracles, reductions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    /// Exhaustive subset search over the value oracles.
    Brute,
    /// Maximum-weight matching demand (bipartite instances).
    Matching,
    /// Restricted search for supermodular rewards with submodular costs.
    Supermodular,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the optimal contract and the full breakpoint table.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum)]
        oracle: OracleKind,
        /// Ground-set cap for exhaustive search.
        #[arg(long, default_value_t = DEFAULT_DEMAND_CAP)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Enumerate the critical values in a segment of [0, 1].
    Enumerate {
        file: PathBuf,
        #[arg(long, value_enum)]
        oracle: OracleKind,
        /// Segment bounds lo hi; critical values are reported in (lo, hi].
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        segment: Option<Vec<String>>,
        /// Assert the 2k+2 bound on distinct demand queries.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = DEFAULT_DEMAND_CAP)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Export the exact utility curves of both parties.
    Curve {
        file: PathBuf,
        #[arg(long, value_enum)]
        oracle: OracleKind,
        #[arg(long, default_value_t = 21)]
        samples: usize,
        /// Write a CSV file instead of printing a table.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Significant digits for decimal rendering.
        #[arg(long, default_value_t = 12)]
        precision: usize,
        #[arg(long, default_value_t = DEFAULT_DEMAND_CAP)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Rewrite instances along the reduction pipeline.
    Reduce {
        #[command(subcommand)]
        what: ReduceCommand,
    },
    /// Generate a seeded instance from one of the shipped families.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        edges: Option<usize>,
        #[arg(long)]
        max_den: Option<u64>,
        #[arg(long)]
        f_bound: Option<u64>,
        #[arg(long)]
        c_bound: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a property suite at desk scale.
    Verify {
        /// One of: envelope, supermodular, matching, reductions, counting.
        suite: String,
        #[arg(long)]
        instances: Option<usize>,
        /// Parallelize across instances.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// Parametric shortest s-t path to minimum-weight perfect matching.
    PathToMatching {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum-weight perfect matching to a normalized demand instance.
    MatchingToDemand {
        file: PathBuf,
        /// Lower end of the contract window; must be positive (p/q).
        #[arg(long)]
        alpha2: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn schema(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn mismatch(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }

    fn violation(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::RewardOutOfRange { .. }
            | Error::NegativeCost { .. }
            | Error::EqualRewards { .. }
            | Error::InconsistentOracle { .. }
            | Error::ClassViolation { .. } => 4,
            Error::GroundSetTooLarge { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    // Die silently on closed pipes like other unix filters instead of
    // panicking mid-print when output feeds into `head`.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            file,
            oracle,
            cap,
            json,
        } => cmd_solve(&file, oracle, cap, json),
        Command::Enumerate {
            file,
            oracle,
            segment,
            check,
            cap,
            json,
        } => cmd_enumerate(&file, oracle, segment, check, cap, json),
        Command::Curve {
            file,
            oracle,
            samples,
            csv,
            precision,
            cap,
            json,
        } => cmd_curve(&file, oracle, samples, csv, precision, cap, json),
        Command::Reduce { what } => cmd_reduce(what),
        Command::Gen {
            family,
            seed,
            n,
            edges,
            max_den,
            f_bound,
            c_bound,
            out,
        } => cmd_gen(family, seed, n, edges, max_den, f_bound, c_bound, out),
        Command::Verify {
            suite,
            instances,
            jobs,
            json,
        } => cmd_verify(&suite, instances, jobs, json),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::schema(format!("cannot read {}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::schema(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_rational(text: &str) -> Result<Rational, Failure> {
    Rational::parse(text).map_err(Failure::from)
}

/// A contract instance plus the demand oracle chosen by the flags.
enum PreparedOracle<'a> {
    Brute(BruteForceDemand<'a>),
    Supermodular(SupermodularDemand<'a>),
    Matching(MatchingDemand<'a>),
}

impl BestResponse for PreparedOracle<'_> {
    fn best_response(
        &mut self,
        alpha: &Rational,
    ) -> linear_contracts::error::Result<linear_contracts::set::ActionSet> {
        match self {
            PreparedOracle::Brute(o) => o.best_response(alpha),
            PreparedOracle::Supermodular(o) => o.best_response(alpha),
            PreparedOracle::Matching(o) => o.best_response(alpha),
        }
    }
}

/// Holds the data the oracle borrows from.
enum PreparedSource {
    Table(linear_contracts::model::TableInstance),
    Bipartite(linear_contracts::matching::BipartiteInstance),
}

fn prepare_source(file: &Path, oracle: OracleKind) -> Result<PreparedSource, Failure> {
    let parsed = parse_instance(&read_file(file)?)?;
    match (parsed, oracle) {
        (InstanceFile::Table(t), OracleKind::Brute | OracleKind::Supermodular) => {
            Ok(PreparedSource::Table(t))
        }
        (InstanceFile::Table(_), OracleKind::Matching) => Err(Failure::mismatch(
            "the matching oracle needs a bipartite instance, not an explicit table",
        )),
        (InstanceFile::Bipartite(g), OracleKind::Matching | OracleKind::Brute) => {
            if g.normalized {
                Ok(PreparedSource::Bipartite(g))
            } else {
                // Joint scaling preserves demand and every critical value.
                eprintln!(
                    "note: instance not flagged normalized; scaling rewards and costs jointly"
                );
                Ok(PreparedSource::Bipartite(g.normalized_copy()?))
            }
        }
        (InstanceFile::Bipartite(_), OracleKind::Supermodular) => Err(Failure::mismatch(
            "the supermodular oracle needs an explicit table instance",
        )),
        (InstanceFile::Path(_) | InstanceFile::ParametricMatching(_), _) => Err(Failure::mismatch(
            "parametric instances are not demand instances; run `reduce` first",
        )),
    }
}

impl PreparedSource {
    fn instance(&self) -> Result<ContractInstance, Failure> {
        match self {
            PreparedSource::Table(t) => Ok(t.to_contract_instance()?),
            PreparedSource::Bipartite(g) => Ok(make_matching_contract_instance(g)?),
        }
    }
}

/// Everything a demand command needs, with stable borrows.
struct Prepared {
    source: PreparedSource,
    inst: ContractInstance,
}

fn prepare(file: &Path, oracle: OracleKind) -> Result<Prepared, Failure> {
    let source = prepare_source(file, oracle)?;
    if let (PreparedSource::Table(t), OracleKind::Supermodular) = (&source, oracle) {
        // Catch misuse early: the restricted search is only sound for the
        // asserted class, so check it exhaustively where feasible.
        if t.n <= 12 {
            linear_contracts::oracle::verify_monotone_supermodular(t.n, &|s| {
                Ok(t.f[s.to_mask() as usize].clone())
            })
            .and_then(|()| {
                linear_contracts::oracle::verify_monotone_submodular(t.n, &|s| {
                    Ok(t.c[s.to_mask() as usize].clone())
                })
            })
            .map_err(|e| Failure::mismatch(format!("supermodular oracle rejected: {e}")))?;
        }
    }
    let inst = source.instance()?;
    Ok(Prepared { source, inst })
}

impl Prepared {
    fn oracle(&self, kind: OracleKind, cap: usize) -> Result<PreparedOracle<'_>, Failure> {
        match (&self.source, kind) {
            (PreparedSource::Table(_), OracleKind::Brute)
            | (PreparedSource::Bipartite(_), OracleKind::Brute) => Ok(PreparedOracle::Brute(
                BruteForceDemand::with_cap(&self.inst, cap),
            )),
            (PreparedSource::Table(_), OracleKind::Supermodular) => Ok(
                PreparedOracle::Supermodular(SupermodularDemand::with_cap(&self.inst, cap)),
            ),
            (PreparedSource::Bipartite(g), OracleKind::Matching) => {
                Ok(PreparedOracle::Matching(MatchingDemand::new(g)?))
            }
            _ => Err(Failure::mismatch("incompatible oracle for this instance")),
        }
    }
}

fn approx(r: &Rational) -> String {
    format!("{r} (\u{2248}{})", r.to_decimal_string(12))
}

fn breakpoint_line(bp: &Breakpoint) -> String {
    format!(
        "  alpha={} S={} f={} c={} u_a={} u_p={}",
        approx(&bp.alpha),
        bp.demanded,
        bp.reward_value,
        bp.cost_value,
        bp.agent_utility,
        bp.principal_utility
    )
}

fn cmd_solve(file: &Path, oracle: OracleKind, cap: usize, json: bool) -> Result<(), Failure> {
    let prepared = prepare(file, oracle)?;
    let mut demand = DemandOracle::new(prepared.oracle(oracle, cap)?);
    let best = optimal_contract(&mut demand, &prepared.inst)?;
    let curve = all_critical_values(&mut demand, &prepared.inst)?;
    if json {
        let report = serde_json::json!({
            "alpha_star": best.alpha,
            "demanded": best.demanded,
            "reward_value": best.reward_value,
            "cost_value": best.cost_value,
            "agent_utility": best.agent_utility,
            "principal_utility": best.principal_utility,
            "breakpoints": curve.breakpoints,
            "distinct_demand_queries": demand.distinct_queries(),
        });
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!(
            "alpha* = {}, principal utility = {}",
            best.alpha, best.principal_utility
        );
        println!("  alpha*            = {}", approx(&best.alpha));
        println!("  demanded set      = {}", best.demanded);
        println!("  reward f(S)       = {}", approx(&best.reward_value));
        println!("  cost c(S)         = {}", approx(&best.cost_value));
        println!("  agent utility     = {}", approx(&best.agent_utility));
        println!("  principal utility = {}", approx(&best.principal_utility));
        println!("breakpoints ({}):", curve.breakpoints.len());
        for bp in &curve.breakpoints {
            println!("{}", breakpoint_line(bp));
        }
        println!("distinct demand queries: {}", demand.distinct_queries());
    }
    Ok(())
}

fn cmd_enumerate(
    file: &Path,
    oracle: OracleKind,
    segment: Option<Vec<String>>,
    check: bool,
    cap: usize,
    json: bool,
) -> Result<(), Failure> {
    let (lo, hi) = match &segment {
        Some(pair) => (parse_rational(&pair[0])?, parse_rational(&pair[1])?),
        None => (Rational::zero(), Rational::one()),
    };
    let prepared = prepare(file, oracle)?;
    let mut demand = DemandOracle::new(prepared.oracle(oracle, cap)?);
    let values = cv_segment(&mut demand, &prepared.inst, &lo, &hi)?;
    let mut breakpoints = Vec::with_capacity(values.len());
    for alpha in &values {
        let set = demand.query(alpha)?;
        breakpoints.push(Breakpoint::from_parts(&prepared.inst, alpha.clone(), set)?);
    }
    let queries = demand.distinct_queries();
    let bound = 2 * values.len() + 2;
    if json {
        let report = serde_json::json!({
            "segment": [lo, hi],
            "breakpoints": breakpoints,
            "distinct_demand_queries": queries,
            "query_bound": bound,
        });
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!("critical values in ({}, {}]: {}", lo, hi, breakpoints.len());
        for bp in &breakpoints {
            println!("{}", breakpoint_line(bp));
        }
        println!("distinct demand queries: {queries} (bound 2k+2 = {bound})");
    }
    if check && queries > bound {
        return Err(Failure::violation(format!(
            "query complexity violated: {queries} distinct queries > {bound}"
        )));
    }
    Ok(())
}

fn cmd_curve(
    file: &Path,
    oracle: OracleKind,
    samples: usize,
    csv: Option<PathBuf>,
    precision: usize,
    cap: usize,
    json: bool,
) -> Result<(), Failure> {
    let prepared = prepare(file, oracle)?;
    let mut demand = DemandOracle::new(prepared.oracle(oracle, cap)?);
    let points = utility_curve(&mut demand, &prepared.inst, samples)?;
    if let Some(path) = csv {
        let text = curve_to_csv(&points, precision);
        write_output(Some(&path), &text)?;
        println!("wrote {} curve points to {}", points.len(), path.display());
        return Ok(());
    }
    if json {
        println!("{}", serde_json::to_string_pretty(&points).unwrap());
    } else {
        println!("alpha  u_agent  u_principal");
        for p in &points {
            println!(
                "{}  {}  {}",
                p.alpha.to_decimal_string(precision),
                p.agent_utility.to_decimal_string(precision),
                p.principal_utility.to_decimal_string(precision)
            );
        }
    }
    Ok(())
}

fn cmd_reduce(what: ReduceCommand) -> Result<(), Failure> {
    match what {
        ReduceCommand::PathToMatching { file, out } => {
            let parsed = parse_instance(&read_file(&file)?)?;
            let InstanceFile::Path(p) = parsed else {
                return Err(Failure::mismatch(
                    "path-to-matching needs a parametric-path instance",
                ));
            };
            let reduced = path_to_matching(&p)?;
            let text = format!("{}\n", serde_json::to_string_pretty(&reduced).unwrap());
            write_output(out.as_deref(), &text)
        }
        ReduceCommand::MatchingToDemand { file, alpha2, out } => {
            let parsed = parse_instance(&read_file(&file)?)?;
            let InstanceFile::ParametricMatching(m) = parsed else {
                return Err(Failure::mismatch(
                    "matching-to-demand needs a parametric-matching instance",
                ));
            };
            let alpha2 = parse_rational(&alpha2)?;
            let reduced = matching_to_demand(&m, &alpha2)?;
            let text = format!("{}\n", serde_json::to_string_pretty(&reduced).unwrap());
            write_output(out.as_deref(), &text)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    family: String,
    seed: u64,
    n: Option<usize>,
    edges: Option<usize>,
    max_den: Option<u64>,
    f_bound: Option<u64>,
    c_bound: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let family: Family = family.parse()?;
    let spec = GeneratorSpec {
        family,
        seed,
        n,
        edges,
        max_den,
        f_bound,
        c_bound,
    };
    let instance = generate(&spec)?;
    let text = format!("{}\n", serde_json::to_string_pretty(&instance).unwrap());
    write_output(out.as_deref(), &text)
}

fn cmd_verify(
    suite: &str,
    instances: Option<usize>,
    jobs: usize,
    json: bool,
) -> Result<(), Failure> {
    let report = run_suite(suite, instances, jobs)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!(
            "suite {}: {} cases, {} checks, {} violations -> {}",
            report.suite,
            report.cases,
            report.checks,
            report.violations.len(),
            if report.passed() { "PASS" } else { "FAIL" }
        );
        for v in &report.violations {
            println!("  seed {} [{}]: {}", v.seed, v.check, v.detail);
        }
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::violation(format!(
            "suite {} failed with {} violations",
            report.suite,
            report.violations.len()
        )))
    }
}
