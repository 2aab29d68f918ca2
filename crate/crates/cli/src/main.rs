use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diagpoisson::bounds::{self, BoundOptions};
use diagpoisson::exact::{self, DEFAULT_EXACT_CAP};
use diagpoisson::matrix::MatrixFormat;
use diagpoisson::measures::DEFAULT_TAIL_TOL;
use diagpoisson::stein::{self, TestFunction, TestKind};
use diagpoisson::verify::{self, Suite};
use diagpoisson::{montecarlo, moments, BernoulliMatrix, Check, Error, GeneratorSpec, IndexSelection};
use serde::Serialize;

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CAPACITY: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Parser)]
#[command(name = "diagpoisson", version, about = "Exact laws and Poisson approximation bounds for random diagonal sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// λ, Var S_n and the γ family.
    Moments(Common),
    /// Exact distribution of S_n.
    Pmf(Common),
    /// Every applicable bound next to the exact distance.
    Bounds(Common),
    /// Stein-solution bounds and identities at a given mean.
    Stein(SteinArgs),
    /// Monte Carlo estimate of the law of S_n and its TV distance to Po(λ).
    Mc(Common),
    /// Run the invariant battery; exits with status 4 on any violation.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Matrix file (CSV rows, or JSON `{"p": [[...]]}`).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generator: constant:n:p, identity:n, random:n:seed[:monotone-cols],
    /// matching:a=2/3,b=3/2 or matching:d=2,m=3.
    #[arg(long = "gen", value_name = "SPEC")]
    generator: Option<String>,
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct OptionalSource {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long = "gen", value_name = "SPEC")]
    generator: Option<String>,
}

#[derive(Args)]
struct Options {
    /// Matrix file format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
    tail_tol: f64,
    /// Largest n handled by the exact engine.
    #[arg(long)]
    exact_cap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, value_enum, default_value_t = OutArg::Json)]
    out: OutArg,
}

#[derive(Args)]
struct SteinArgs {
    #[command(flatten)]
    source: OptionalSource,
    /// Poisson mean; defaults to λ of the matrix.
    #[arg(long)]
    t: Option<f64>,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Quick)]
    suite: SuiteArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = OutArg::Table)]
    out: OutArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum OutArg {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Quick,
    Full,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity(_) => EXIT_CAPACITY,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Fixed 12-significant-digit rendering for table output.
fn sig(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        x.to_string()
    }
}

fn load(input: &Option<PathBuf>, generator: &Option<String>, format: Option<FormatArg>) -> CliResult<Option<BernoulliMatrix>> {
    match (input, generator) {
        (Some(path), None) => {
            let fmt = match format {
                Some(FormatArg::Csv) => MatrixFormat::Csv,
                Some(FormatArg::Json) => MatrixFormat::Json,
                None if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => MatrixFormat::Json,
                None => MatrixFormat::Csv,
            };
            Ok(Some(BernoulliMatrix::load(path, fmt)?))
        }
        (None, Some(spec)) => Ok(Some(spec.parse::<GeneratorSpec>()?.build()?)),
        (None, None) => Ok(None),
        (Some(_), Some(_)) => Err(usage("give exactly one of --input and --gen")),
    }
}

fn require(src: &Source, opts: &Options) -> CliResult<BernoulliMatrix> {
    load(&src.input, &src.generator, opts.format)?.ok_or_else(|| usage("give exactly one of --input and --gen"))
}

fn check_options(opts: &Options) -> CliResult<()> {
    if !(opts.tail_tol > 0.0 && opts.tail_tol < 1.0) {
        return Err(usage(format!("--tail-tol must lie in (0, 1), got {}", opts.tail_tol)));
    }
    if let Some(cap) = opts.exact_cap {
        if cap > DEFAULT_EXACT_CAP {
            return Err(usage(format!("--exact-cap may not exceed {DEFAULT_EXACT_CAP}")));
        }
    }
    Ok(())
}

fn emit<T: Serialize>(out: OutArg, report: &T, table: impl FnOnce() -> String) -> String {
    match out {
        OutArg::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        OutArg::Table => table(),
    }
}

fn rows(items: &[(&str, f64)]) -> String {
    let w = items.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in items {
        let pad = w - k.chars().count();
        let _ = writeln!(s, "{k}{}  {}", " ".repeat(pad), sig(*v));
    }
    s
}

fn check_rows(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let _ = writeln!(s, "{:<6} {}  {} ≤ {}", if c.holds { "ok" } else { "FAIL" }, c.name, sig(c.lhs), sig(c.rhs));
    }
    s
}

fn cmd_moments(a: &Common) -> CliResult<String> {
    let m = require(&a.source, &a.opts)?;
    let r = moments::compute_moments(&m);
    Ok(emit(a.opts.out, &r, || {
        rows(&[
            ("n", r.n as f64),
            ("lambda", r.lambda),
            ("var_gamma", r.var_gamma),
            ("var_counts", r.var_counts),
            ("gamma", r.gamma),
            ("gamma_p", r.gamma_p),
            ("gamma_pp", r.gamma_pp),
            ("gamma_ppp", r.gamma_ppp),
            ("m", r.m),
            ("sum_row_means_sq", r.sum_row_means_sq),
            ("sum_col_means_sq", r.sum_col_means_sq),
            ("sum_sq", r.sum_sq),
        ])
    }))
}

#[derive(Serialize)]
struct PmfReport {
    n: usize,
    lambda: f64,
    pmf: Vec<f64>,
    mean: f64,
    variance: f64,
    real_rooted: bool,
}

fn cmd_pmf(a: &Common) -> CliResult<String> {
    let m = require(&a.source, &a.opts)?;
    let cap = a.opts.exact_cap.unwrap_or(DEFAULT_EXACT_CAP);
    let pmf = exact::pmf_exact_with_cap(&m, &IndexSelection::full(m.n()), cap)?;
    let rep = PmfReport {
        n: m.n(),
        lambda: m.lambda(),
        mean: pmf.mean(),
        variance: pmf.variance(),
        real_rooted: exact::real_rooted(&pmf)?,
        pmf: pmf.into_coeffs(),
    };
    Ok(emit(a.opts.out, &rep, || {
        let mut s = rows(&[("n", rep.n as f64), ("lambda", rep.lambda), ("mean", rep.mean), ("variance", rep.variance)]);
        let _ = writeln!(s, "real_rooted  {}", rep.real_rooted);
        for (k, p) in rep.pmf.iter().enumerate() {
            let _ = writeln!(s, "P(S={k})  {}", sig(*p));
        }
        s
    }))
}

fn cmd_bounds(a: &Common) -> CliResult<String> {
    let m = require(&a.source, &a.opts)?;
    let mut opts = BoundOptions { tail_tol: a.opts.tail_tol, ..BoundOptions::default() };
    if let Some(cap) = a.opts.exact_cap {
        opts.exact_cap = cap;
    }
    let rep = bounds::bound_report(&m, &opts, Some(a.opts.seed))?;
    Ok(emit(a.opts.out, &rep, || {
        let mut s = String::new();
        let _ = writeln!(s, "{:<18} {:<5} {:<18} {:<18} {:<5} trivial", "bound", "kind", "value", "exact", "holds");
        for b in &rep.bounds {
            let kind = match b.kind {
                bounds::BoundKind::Upper => "upper",
                bounds::BoundKind::Lower => "lower",
            };
            let exact = b.distance_exact.map_or("-".to_string(), sig);
            let holds = b.holds.map_or("n/a", |h| if h { "true" } else { "false" });
            let _ = writeln!(s, "{:<18} {:<5} {:<18} {:<18} {:<5} {}", b.name, kind, sig(b.value), exact, holds, b.trivial);
        }
        s.push('\n');
        s.push_str(&check_rows(&rep.checks));
        s
    }))
}

#[derive(Serialize)]
struct SteinFunctionReport {
    name: String,
    sup_g: f64,
    sup_delta: f64,
    residual: f64,
}

#[derive(Serialize)]
struct SteinReport {
    t: f64,
    functions: Vec<SteinFunctionReport>,
    checks: Vec<Check>,
}

fn cmd_stein(a: &SteinArgs) -> CliResult<String> {
    let m = load(&a.source.input, &a.source.generator, a.opts.format)?;
    let t = match (a.t, &m) {
        (Some(t), _) => t,
        (None, Some(m)) => m.lambda(),
        (None, None) => return Err(usage("give --t or a matrix")),
    };
    if !(t > 0.0 && t.is_finite()) {
        return Err(usage(format!("--t must be positive, got {t}")));
    }
    let top = (t + 3.0 * t.sqrt()).ceil() as usize + 2;
    let mut functions = Vec::new();
    let mut checks = Vec::new();
    let mut identities = Vec::new();
    let mut run = |name: String, h: TestFunction, kind: TestKind| -> CliResult<()> {
        let sol = stein::stein_solve(t, &h)?;
        functions.push(SteinFunctionReport { name, sup_g: sol.sup_g(), sup_delta: sol.sup_delta(), residual: sol.residual() });
        checks.extend(stein::g_bound_checks(t, &h, &kind)?);
        Ok(())
    };
    let floor_t = t.floor() as usize;
    run(format!("1[0..={floor_t}]"), TestFunction::indicator(&(0..=floor_t).collect::<Vec<_>>()), TestKind::Set)?;
    let lip: Vec<f64> = (0..=top).map(|k| k as f64).collect();
    run(format!("min(k, {top})"), TestFunction::new(lip, top as f64), TestKind::Lipschitz)?;
    for a in 0..=top {
        run(format!("1[{{{a}}}]"), TestFunction::point(a), TestKind::Point(a))?;
        let (lhs, rhs) = stein::point_difference_identity(t, a)?;
        identities.push(Check::le(format!("|Σ|Δg| − 2Δg(a)|, a = {a}"), (lhs - rhs).abs(), 1e-9, 0.0));
    }
    checks.append(&mut identities);
    if let Some(m) = &m {
        let pmf = exact::pmf_exact_with_cap(m, &IndexSelection::leave_out(m.n(), &[0]), a.opts.exact_cap.unwrap_or(DEFAULT_EXACT_CAP))?;
        for a in 0..m.n() {
            checks.push(stein::point_expectation_check(t, a, pmf.coeffs())?);
        }
    }
    let rep = SteinReport { t, functions, checks };
    Ok(emit(a.opts.out, &rep, || {
        let mut s = format!("t  {}\n\n", sig(rep.t));
        let _ = writeln!(s, "{:<16} {:<18} {:<18} residual", "h", "sup|g|", "sup|Δg|");
        for f in &rep.functions {
            let _ = writeln!(s, "{:<16} {:<18} {:<18} {}", f.name, sig(f.sup_g), sig(f.sup_delta), sig(f.residual));
        }
        s.push('\n');
        s.push_str(&check_rows(&rep.checks));
        s
    }))
}

fn cmd_mc(a: &Common) -> CliResult<String> {
    let m = require(&a.source, &a.opts)?;
    let est = montecarlo::estimate(&m, a.opts.samples, a.opts.seed)?;
    Ok(emit(a.opts.out, &est, || {
        let mut s = rows(&[
            ("samples", est.samples as f64),
            ("seed", est.seed as f64),
            ("lambda", est.lambda),
            ("tv_hat", est.tv_hat),
            ("std_err", est.std_err),
            ("bias_bound", est.bias_bound),
        ]);
        for (k, (p, se)) in est.pmf_hat.weights.iter().zip(&est.pmf_std_err).enumerate() {
            let _ = writeln!(s, "P(S={k})  {} ± {}", sig(*p), sig(*se));
        }
        s
    }))
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<(String, bool)> {
    let suite = match a.suite {
        SuiteArg::Quick => Suite::Quick,
        SuiteArg::Full => Suite::Full,
    };
    let rep = verify::run(suite, a.seed)?;
    let text = emit(a.out, &rep, || {
        let mut s = String::new();
        for g in &rep.groups {
            let _ = writeln!(s, "[{}]", g.name);
            for t in &g.tallies {
                let status = if t.holds() { "ok" } else { "FAIL" };
                let _ = writeln!(
                    s,
                    "{status:<6} {} ({} cases, {} failures; worst {} vs {})",
                    t.name,
                    t.cases,
                    t.failures,
                    sig(t.worst_lhs),
                    sig(t.worst_rhs)
                );
            }
        }
        let _ = writeln!(s, "\n{}", if rep.all_hold { "all checks hold" } else { "VERIFICATION FAILED" });
        s
    });
    Ok((text, rep.all_hold))
}

fn run(cli: &Cli) -> CliResult<(String, u8)> {
    let ok = |s: String| Ok((s, 0));
    match &cli.command {
        Command::Moments(a) => check_options(&a.opts).and_then(|_| cmd_moments(a)).and_then(ok),
        Command::Pmf(a) => check_options(&a.opts).and_then(|_| cmd_pmf(a)).and_then(ok),
        Command::Bounds(a) => check_options(&a.opts).and_then(|_| cmd_bounds(a)).and_then(ok),
        Command::Stein(a) => check_options(&a.opts).and_then(|_| cmd_stein(a)).and_then(ok),
        Command::Mc(a) => check_options(&a.opts).and_then(|_| cmd_mc(a)).and_then(ok),
        Command::Verify(a) => cmd_verify(a).map(|(s, pass)| (s, if pass { 0 } else { EXIT_VERIFY })),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
