//! The `ftp-sdmm` command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid parameters,
//! 3 transport failure.

use std::ffi::OsString;
use std::fmt::Debug;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use ftp_sdmm_core::analysis::{
    costs, crossover_k, prime_search, rat, traditional_bound, AnalysisError, RateForm, RateParams,
};
use ftp_sdmm_core::ftp::{
    build_scheme, security_audit, AuditMode, CostReport, Dims, F16Example, SchemeParams, F16_EXPONENTS,
};
use ftp_sdmm_core::matrix::{mat_mul, random_mat};
use ftp_sdmm_core::{BaseField, Mat, SplitMix64, TowerElem, TowerField};
use num_rational::BigRational;

use crate::config;
use crate::ledger::TrafficLedger;
use crate::net::{configured_timeout, run_remote, NetError, Server};
use crate::rates::{fmt_rational, format_table, parse_rational, rate_rows, write_csv, Baseline, GridPoint};
use crate::sim::run_inprocess;
use crate::wire::Writer;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_TRANSPORT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ftp-sdmm",
    version,
    about = "Field trace polynomial codes for secure distributed matrix multiplication"
)]
pub struct Cli {
    /// key=value file with defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The single-group F_16 example with four servers.
    Demo(DemoArgs),
    /// Encode, compute and decode a random product, in process or over TCP.
    Run(RunArgs),
    /// Exact rate table against a traditional baseline.
    Rates(RatesArgs),
    /// The crossover constant K and the empirical rate threshold.
    Crossover(CrossoverArgs),
    /// Check T-security of the shares.
    Audit(AuditArgs),
    /// Serve the server role over TCP.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 2)]
    pub a: usize,
    #[arg(long, default_value_t = 2)]
    pub b: usize,
    #[arg(long, default_value_t = 2)]
    pub c: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    /// Number of groups.
    #[arg(long = "L", visible_alias = "l", default_value_t = 1)]
    pub l: usize,
    /// Number of colluding servers tolerated.
    #[arg(long = "T", visible_alias = "t", default_value_t = 1)]
    pub t: usize,
    /// Ascending distinct primes, one per group.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub primes: Vec<usize>,
    /// Characteristic of F_q0.
    #[arg(long = "q0-p", default_value_t = 2)]
    pub q0_p: u64,
    /// Degree of F_q0 over its prime field.
    #[arg(long = "q0-d", default_value_t = 2)]
    pub q0_d: usize,
    /// Rows of A (default depends on the command).
    #[arg(long)]
    pub a: Option<usize>,
    /// Columns of A and rows of B (default depends on the command).
    #[arg(long)]
    pub b: Option<usize>,
    /// Columns of B (default depends on the command).
    #[arg(long)]
    pub c: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// host:port of server j, in order; repeat or separate by commas. Empty runs in process.
    #[arg(long, value_delimiter = ',')]
    pub endpoints: Vec<String>,
    /// Per-operation network timeout; defaults to FTP_SDMM_TIMEOUT_MS or 30 s.
    #[arg(long = "timeout-ms")]
    pub timeout_ms: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// a,b,c,L,T,p1;p2;... (repeatable).
    #[arg(long, required = true)]
    pub grid: Vec<GridPoint>,
    #[arg(long, value_enum, default_value_t = Baseline::Matdot)]
    pub baseline: Baseline,
    /// Write the CSV table here ("-" for stdout).
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CrossoverArgs {
    /// Recovery threshold of the traditional code.
    #[arg(long = "N-prime", visible_alias = "n-prime")]
    pub n_prime: u64,
    #[arg(long = "L", visible_alias = "l")]
    pub l: u64,
    #[arg(long = "T", visible_alias = "t")]
    pub t: u64,
    /// Rational such as 1/2.
    #[arg(long, value_parser = parse_eta)]
    pub eta: BigRational,
    /// Use these primes instead of the smallest admissible ones.
    #[arg(long, value_delimiter = ',')]
    pub primes: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Rank,
    Exhaustive,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, value_enum, default_value_t = ModeArg::Rank)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// 0 picks a free port.
    #[arg(long, default_value_t = 0)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
}

fn parse_eta(s: &str) -> Result<BigRational, String> {
    parse_rational(s).filter(|r| *r >= rat(0, 1)).ok_or_else(|| format!("{s:?} is not a non-negative rational"))
}

/// First word of an error's `Debug` form, e.g. `TooFewEvalPoints`.
fn kind_of(e: &impl Debug) -> String {
    let s = format!("{e:?}");
    s.split(|c: char| !c.is_alphanumeric() && c != '_').next().unwrap_or("Error").to_string()
}

fn report_error(err: &mut dyn Write, e: &(impl Debug + std::fmt::Display)) {
    let _ = writeln!(err, "error: kind={} message={}", kind_of(e), e.to_string().replace('\n', " "));
}

/// Parses `args` (program name first), applies `--config`, and runs the command.
pub fn main_with(args: Vec<OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut args = args;
    if let Some(path) = config::take_config_path(&mut args) {
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                let e = config::ConfigError::Io { path: path.to_string_lossy().into(), reason: e.to_string() };
                report_error(err, &e);
                return EXIT_INVALID;
            }
        };
        args = match config::merge(&Cli::command(), &args, &text) {
            Ok(a) => a,
            Err(e) => {
                report_error(err, &e);
                return EXIT_INVALID;
            }
        };
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Demo(a) => demo(&a, out),
        Command::Run(a) => run(&a, out),
        Command::Rates(a) => rates(&a, out),
        Command::Crossover(a) => crossover(&a, out),
        Command::Audit(a) => audit(&a, out),
        Command::Serve(a) => serve(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: kind={} message={}", f.kind, f.message);
            f.code
        }
    }
}

/// A failed command: exit code plus the machine-readable error line.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl Failure {
    fn new(code: i32, e: &(impl Debug + std::fmt::Display)) -> Self {
        Self { code, kind: kind_of(e), message: e.to_string().replace('\n', " ") }
    }

    fn invalid(e: &(impl Debug + std::fmt::Display)) -> Self {
        Self::new(EXIT_INVALID, e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::new(EXIT_TRANSPORT, &e)
    }
}

type CmdResult = Result<i32, Failure>;

/// FNV-1a over the wire encoding of `m`.
pub fn checksum(tower: &TowerField, m: &Mat<TowerElem>) -> u64 {
    let mut w = Writer::new();
    w.mat(tower, m).expect("digits fit in a byte");
    w.as_bytes().iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

fn demo(args: &DemoArgs, out: &mut dyn Write) -> CmdResult {
    let (a, b, c) = (args.a, args.b, args.c);
    if a == 0 || b == 0 || c == 0 {
        return Err(Failure::invalid(&AnalysisError::InvalidParams("matrix dimensions must be positive")));
    }
    let ex = F16Example::new();
    let tower = ex.tower();
    let mut rng = SplitMix64::new(args.seed);
    let ma = random_mat(tower, a, b, &mut rng);
    let mb = random_mat(tower, b, c, &mut rng);
    let decoded = ex.run(&ma, &mb, &mut rng).map_err(|e| Failure::invalid(&e))?;
    let oracle = mat_mul(tower, &ma, &mb).map_err(|e| Failure::invalid(&e))?;
    let weights_match = ex.domain_weights().map(|w| w == ex.server_scalars()).unwrap_or(false);

    writeln!(out, "field: F_16 = F_4(alpha), alpha^4 + alpha + 1 = 0")?;
    writeln!(out, "servers: y = (0, alpha^5, alpha^10, alpha^15)")?;
    let exps: Vec<String> = F16_EXPONENTS.iter().map(|e| format!("alpha^-{e}")).collect();
    writeln!(out, "server scalars: ({}); general construction agrees: {weights_match}", exps.join(", "))?;
    writeln!(out, "matrices: A {a}x{b}, B {b}x{c}, seed {}", args.seed)?;
    writeln!(out, "decode: alpha^4(S1+S2+S3+S4) + alpha^5 S2 + alpha^10 S3 + alpha^15 S4")?;
    writeln!(out, "product checksum: {:016x}", checksum(tower, &decoded))?;

    let scheme =
        build_scheme(1, 1, &[2], tower.base().clone(), Dims::new(a, b, c)).map_err(|e| Failure::invalid(&e))?;
    let cost = CostReport::for_scheme(&scheme);
    let r_trad = traditional_bound(3, 1, a as u64, b as u64, c as u64).map_err(|e| Failure::invalid(&e))?;
    writeln!(out, "upload: {} F_4-symbols", cost.upload)?;
    writeln!(out, "download: {} F_4-symbols", cost.download)?;
    writeln!(out, "R = ac/(4ab+4bc+2ac) = {}", fmt_rational(&cost.rate))?;
    writeln!(out, "R' = ac/(3ab+3bc+3ac) = {}", fmt_rational(&r_trad))?;
    if decoded == oracle && weights_match {
        writeln!(out, "AB verified")?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "AB MISMATCH")?;
        Ok(EXIT_VERIFY)
    }
}

fn scheme_from(args: &SchemeArgs, default_dims: (usize, usize, usize)) -> Result<SchemeParams, Failure> {
    let base = BaseField::new(args.q0_p, args.q0_d).map_err(|e| Failure::invalid(&e))?;
    let dims =
        Dims::new(args.a.unwrap_or(default_dims.0), args.b.unwrap_or(default_dims.1), args.c.unwrap_or(default_dims.2));
    build_scheme(args.l, args.t, &args.primes, base, dims).map_err(|e| Failure::invalid(&e))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn run(args: &RunArgs, out: &mut dyn Write) -> CmdResult {
    let sa = &args.scheme;
    let scheme = scheme_from(sa, (2, 2 * sa.l, 2))?;
    let tower = scheme.tower();
    let dims = scheme.dims();
    let mut rng = SplitMix64::new(args.seed);
    let a = random_mat(tower, dims.a, dims.b, &mut rng);
    let b = random_mat(tower, dims.b, dims.c, &mut rng);
    let enc_seed = rng.next_u64();

    writeln!(
        out,
        "scheme: L={} T={} primes={} q0={}^{} N=[{}] servers={}",
        sa.l,
        sa.t,
        join(&sa.primes),
        sa.q0_p,
        sa.q0_d,
        join(scheme.group_sizes()),
        scheme.servers()
    )?;
    writeln!(out, "matrices: A {}x{}, B {}x{}, seed {}", dims.a, dims.b, dims.b, dims.c, args.seed)?;

    let (product, ledger): (Mat<TowerElem>, TrafficLedger) = if args.endpoints.is_empty() {
        writeln!(out, "mode: in-process")?;
        run_inprocess(&scheme, &a, &b, enc_seed).map_err(|e| Failure::invalid(&e))?
    } else {
        writeln!(out, "mode: remote ({} endpoints)", args.endpoints.len())?;
        let timeout = args.timeout_ms.map(Duration::from_millis).unwrap_or_else(configured_timeout);
        run_remote(&args.endpoints, &scheme, &a, &b, enc_seed, timeout).map_err(|e| match e {
            NetError::Scheme(_) | NetError::InvalidEndpoints { .. } => Failure::invalid(&e),
            _ => Failure::new(EXIT_TRANSPORT, &e),
        })?
    };

    let oracle = mat_mul(tower, &a, &b).map_err(|e| Failure::invalid(&e))?;
    let verified = product == oracle;
    writeln!(out, "product checksum: {:016x}", checksum(tower, &product))?;
    writeln!(out, "verdict: {}", if verified { "AB verified" } else { "AB MISMATCH" })?;

    let primes: Vec<u64> = sa.primes.iter().map(|&p| p as u64).collect();
    let params = RateParams::new(dims.a as u64, dims.b as u64, dims.c as u64, sa.l as u64, sa.t as u64, &primes);
    let (fu, fd, fs) = costs(&params).map_err(|e| Failure::invalid(&e))?;
    let (up, down) = (ledger.upload_total(), ledger.download_total());
    let cost_ok = up.symbols == fu && down.symbols == fd;
    let mark = |ok: bool| if ok { "match" } else { "DIFFER" };
    writeln!(out, "upload: ledger={} formula={} F_q0-symbols ({})", up.symbols, fu, mark(up.symbols == fu))?;
    writeln!(out, "download: ledger={} formula={} F_q0-symbols ({})", down.symbols, fd, mark(down.symbols == fd))?;
    writeln!(
        out,
        "payload bytes: up={} down={} ({} bytes/symbol, {})",
        up.payload_bytes,
        down.payload_bytes,
        ledger.bytes_per_symbol,
        mark(ledger.is_consistent())
    )?;
    writeln!(out, "frame bytes: up={} down={}", up.frame_bytes, down.frame_bytes)?;
    let measured = BigRational::new(fs.into(), (up.symbols + down.symbols).into());
    writeln!(
        out,
        "rate: measured={} formula={}",
        fmt_rational(&measured),
        fmt_rational(&ftp_sdmm_core::analysis::ftp_rate(&params).map_err(|e| Failure::invalid(&e))?)
    )?;
    Ok(if verified && cost_ok && ledger.is_consistent() { EXIT_OK } else { EXIT_VERIFY })
}

fn rates(args: &RatesArgs, out: &mut dyn Write) -> CmdResult {
    let rows = rate_rows(&args.grid, args.baseline).map_err(|e| Failure::invalid(&e))?;
    write!(out, "{}", format_table(&rows))?;
    match &args.csv {
        Some(p) if p.as_os_str() == "-" => write_csv(&rows, &mut *out).map_err(|e| Failure::invalid(&e))?,
        Some(p) => {
            let f = fs::File::create(p)?;
            write_csv(&rows, f).map_err(|e| Failure::invalid(&e))?;
            writeln!(out, "csv written to {}", p.display())?;
        }
        None => {}
    }
    Ok(EXIT_OK)
}

fn crossover(args: &CrossoverArgs, out: &mut dyn Write) -> CmdResult {
    let (l, t, n_prime) = (args.l, args.t, args.n_prime);
    let trad = RateForm::traditional(n_prime, l).map_err(|e| Failure::invalid(&e))?;
    let primes = if args.primes.is_empty() { prime_search(l, t, n_prime, l, &args.eta) } else { args.primes.clone() };
    let ftp = RateForm::ftp(l, t, &primes).map_err(|e| Failure::invalid(&e))?;

    writeln!(out, "L={l} T={t} N'={n_prime} L'={l} eta={}", fmt_rational(&args.eta))?;
    writeln!(
        out,
        "primes: {} (N_L={})",
        join(&primes),
        ftp_sdmm_core::analysis::group_sizes(l, t, &primes).last().unwrap()
    )?;
    let (report, k) = match crossover_k(l, t, n_prime, &args.eta, &primes) {
        Ok(r) => (r.hypotheses, Some(r.k)),
        Err(AnalysisError::HypothesesFail(r)) => (r, None),
        Err(e) => return Err(Failure::invalid(&e)),
    };
    writeln!(
        out,
        "hypotheses: well_formed={} primes_large={} last_prime_bound={} lambda_bound={}",
        report.well_formed, report.primes_large, report.last_prime_bound, report.lambda_bound
    )?;
    match k {
        Some(k) => writeln!(out, "K = {}", fmt_rational(&k))?,
        None => writeln!(out, "K: unavailable (hypotheses fail)")?,
    }
    writeln!(out, "ftp rate: ({} lambda + {})^-1", fmt_rational(&ftp.slope), fmt_rational(&ftp.intercept))?;
    writeln!(out, "traditional rate: ({} lambda + {})^-1", fmt_rational(&trad.slope), fmt_rational(&trad.intercept))?;
    match ftp.crossover(&trad) {
        Some(th) => writeln!(out, "empirical threshold: FTP rate is higher iff b(1/a+1/c) < {}", fmt_rational(&th))?,
        None => writeln!(out, "empirical threshold: none (no lambda range where FTP is strictly better)")?,
    }
    Ok(EXIT_OK)
}

fn audit(args: &AuditArgs, out: &mut dyn Write) -> CmdResult {
    let scheme = scheme_from(&args.scheme, (1, args.scheme.l, 1))?;
    let mode = match args.mode {
        ModeArg::Rank => AuditMode::Rank,
        ModeArg::Exhaustive => AuditMode::Exhaustive,
    };
    let report = security_audit(&scheme, mode).map_err(|e| Failure::invalid(&e))?;
    for s in &report.subsets {
        let detail = match (s.rank, s.frequency) {
            (Some(r), _) => format!("rank={r}/{}", report.t),
            (_, Some((lo, hi))) => format!("frequency min={lo} max={hi}"),
            _ => String::new(),
        };
        writeln!(out, "servers {:?}: {} {detail}", s.servers, if s.passed { "pass" } else { "FAIL" })?;
    }
    let passed = report.subsets.iter().filter(|s| s.passed).count();
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    writeln!(out, "audit {:?}: {verdict} ({passed}/{} subsets of size {})", args.mode, report.subsets.len(), report.t)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY })
}

fn serve(args: &ServeArgs, out: &mut dyn Write) -> CmdResult {
    let server = Server::bind((args.host.as_str(), args.port))?;
    writeln!(out, "listening on {}", server.local_addr()?)?;
    out.flush()?;
    server.run()?;
    Ok(EXIT_OK)
}
