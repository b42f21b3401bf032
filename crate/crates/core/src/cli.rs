//! The `qgamma` command line: argument grammar, dispatch, and output
//! formatting. Exit codes: 0 success, 1 computation error or failed check,
//! 2 usage error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Integer, Rational};
use serde::Serialize;
use serde_json::json;

use crate::boundscheck::{self, CheckRecord, RateFamily};
use crate::error::{Error, Result};
use crate::gammaengine::{self, AsymMethod};
use crate::irrat::{self, ThresholdKind};
use crate::linforms::{self, reference_gamma};
use crate::numerics::{with_retry, HpReal, PrecisionPlan};
use crate::qlog::{qlog_accel, qlog_series, QLogRequest};
use crate::qpoly::{chi, chi3_closed_form, chi4_closed_form, chi_sequence};
use crate::series::{self, SeriesEstimate};

/// Upper limit on Vacca partial-sum lengths.
const MAX_VACCA_TERMS: u64 = 1 << 26;

#[derive(Parser, Debug)]
#[command(name = "qgamma", version, about = "Euler's constant via q-logarithms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the working precision (bits).
    #[arg(long = "work-bits", global = true, value_parser = clap::value_parser!(u32).range(16..))]
    pub work_bits: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Digits of Euler's constant.
    Gamma(GammaArgs),
    /// The q-logarithm ln_q(1+z).
    Qlog(QlogArgs),
    /// The decomposition I = c·γ + L − A.
    Decompose(DecomposeArgs),
    /// Fractional-part irrationality test certificates.
    Irrat(IrratArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Digits against work for several methods.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GammaMethod {
    Vacca,
    Gosper,
    BaseqAccel,
    #[value(name = "asym-27")]
    Asym27,
    #[value(name = "asym-28")]
    Asym28,
    #[value(name = "asym-29")]
    Asym29,
    #[value(name = "asym-30")]
    Asym30,
    AsymBase3,
    AsymBaseq,
}

impl GammaMethod {
    pub fn name(self) -> &'static str {
        match self {
            GammaMethod::Vacca => "vacca",
            GammaMethod::Gosper => "gosper",
            GammaMethod::BaseqAccel => "baseq-accel",
            GammaMethod::Asym27 => "asym-27",
            GammaMethod::Asym28 => "asym-28",
            GammaMethod::Asym29 => "asym-29",
            GammaMethod::Asym30 => "asym-30",
            GammaMethod::AsymBase3 => "asym-base3",
            GammaMethod::AsymBaseq => "asym-baseq",
        }
    }

    /// Inverse of [`GammaMethod::name`].
    pub fn parse(s: &str) -> Option<Self> {
        Self::value_variants().iter().copied().find(|m| m.name() == s)
    }

    fn asym(self) -> Option<AsymMethod> {
        Some(match self {
            GammaMethod::Asym27 => AsymMethod::Base2M4,
            GammaMethod::Asym28 => AsymMethod::Base2M2,
            GammaMethod::Asym29 => AsymMethod::Base2M1,
            GammaMethod::Asym30 => AsymMethod::Base2Log,
            GammaMethod::AsymBase3 => AsymMethod::Base3,
            GammaMethod::AsymBaseq => AsymMethod::BaseQ,
            _ => return None,
        })
    }
}

#[derive(Args, Debug)]
pub struct GammaArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
    #[arg(long, value_enum, default_value = "gosper")]
    pub method: GammaMethod,
    /// Base for `baseq-accel`, `asym-baseq` and base-q Vacca (default 3 for
    /// the base-q methods, 2 for Vacca).
    #[arg(long)]
    pub q: Option<u64>,
    /// Level `n` for the asymptotic methods; `2^n` terms for Vacca.
    #[arg(long)]
    pub n: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QlogRoute {
    Accel,
    Series,
}

#[derive(Args, Debug)]
pub struct QlogArgs {
    #[arg(long)]
    pub q: u64,
    /// Rational argument, e.g. `1`, `-2/9`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: u32,
    #[arg(long, value_enum, default_value = "accel")]
    pub route: QlogRoute,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    /// `2`, `3` or `q`.
    #[arg(long)]
    pub base: String,
    /// The base when `--base q`.
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub n: u32,
    /// Damping exponent (base 3: must be `6k`).
    #[arg(long)]
    pub m: Option<u32>,
    /// Base 3 only: `m = 6k`.
    #[arg(long)]
    pub k: Option<u32>,
    /// Also compute I from its independent oracle.
    #[arg(long)]
    pub check: bool,
}

#[derive(Args, Debug)]
pub struct IrratArgs {
    #[arg(long, default_value_t = 2)]
    pub base: u64,
    /// A level or an inclusive range `a..b`.
    #[arg(long)]
    pub n: String,
    /// Base 2 only; defaults to `2^n`.
    #[arg(long)]
    pub m: Option<u32>,
    /// eq25 | simplified_5power | eq26 | base3_thm8 | eps_refined.
    #[arg(long)]
    pub kind: Option<String>,
    /// ε for `eps_refined`.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Write one certificate file per test into this directory.
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Bounds,
    Chi,
    Rates,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Comma-separated `gamma` methods.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "gosper,baseq-accel,asym-27,asym-28,asym-29,asym-base3,asym-baseq")]
    pub methods: Vec<GammaMethod>,
    /// Comma-separated digit targets.
    #[arg(long, value_delimiter = ',', default_value = "20,50", value_parser = clap::value_parser!(u32).range(1..))]
    pub digits: Vec<u32>,
    /// Base for the base-q methods.
    #[arg(long)]
    pub q: Option<u64>,
    /// Shorthand for `--format csv`.
    #[arg(long)]
    pub csv: bool,
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Range(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Output of a subcommand, and whether its checks all passed.
struct Output {
    text: String,
    ok: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, ok: true }
    }
}

/// Parses `argv` and runs the command. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    match execute(&cli) {
        Ok(out) => {
            let written = match &cli.out {
                Some(p) => std::fs::write(p, &out.text).map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            match written {
                Ok(()) if out.ok => 0,
                Ok(()) => 1,
                Err(msg) => {
                    eprintln!("error: {msg}");
                    1
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `qgamma --help` for the flag grammar");
            2
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("QGAMMA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("QGAMMA_THREADS must be a positive integer, got {v:?}"))?;
    // A pool may already exist when `run` is called twice in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn format_of(cli: &Cli) -> CliResult<OutputFormat> {
    match (cli.json, cli.format) {
        (true, Some(f)) if f != OutputFormat::Json => Err(Failure::Usage("--json conflicts with --format".into())),
        (true, _) => Ok(OutputFormat::Json),
        (false, f) => Ok(f.unwrap_or(OutputFormat::Text)),
    }
}

fn no_csv(f: OutputFormat) -> CliResult<()> {
    if f == OutputFormat::Csv {
        return Err(Failure::Usage("csv output is available for bench and verify only".into()));
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn execute(cli: &Cli) -> CliResult<Output> {
    let format = format_of(cli)?;
    match &cli.command {
        Command::Gamma(a) => {
            no_csv(format)?;
            cmd_gamma(a, format, cli.work_bits)
        }
        Command::Qlog(a) => {
            no_csv(format)?;
            cmd_qlog(a, format, cli.work_bits)
        }
        Command::Decompose(a) => {
            no_csv(format)?;
            cmd_decompose(a, format, cli.work_bits)
        }
        Command::Irrat(a) => {
            no_csv(format)?;
            no_work_bits(cli)?;
            cmd_irrat(a, format)
        }
        Command::Verify(a) => {
            no_work_bits(cli)?;
            cmd_verify(a, format)
        }
        Command::Bench(a) => {
            no_work_bits(cli)?;
            let f = if a.csv { OutputFormat::Csv } else { format };
            if a.csv && cli.json {
                return Err(Failure::Usage("--csv conflicts with --json".into()));
            }
            cmd_bench(a, f)
        }
    }
}

fn no_work_bits(cli: &Cli) -> CliResult<()> {
    if cli.work_bits.is_some() {
        return Err(Failure::Usage("--work-bits applies to gamma, qlog and decompose only".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gamma

/// One evaluation of γ by a `gamma` method.
#[derive(Clone, Debug, Serialize)]
pub struct GammaRun {
    pub method: String,
    pub q: Option<u64>,
    pub n: Option<u32>,
    pub m: Option<u32>,
    /// Terms summed (series) or q-logarithms evaluated (asymptotic formulas).
    pub terms: u64,
    pub value: HpReal,
}

fn series_run(method: GammaMethod, q: Option<u64>, est: SeriesEstimate) -> GammaRun {
    GammaRun {
        method: method.name().to_string(),
        q,
        n: None,
        m: None,
        terms: est.terms_used,
        value: est.value,
    }
}

fn vacca_terms(digits: u32, q: u64) -> Result<u64> {
    // Tail ≈ q(log_q N + 5)/N; find N with that below 10^{-digits-2}.
    let target = 10f64.powi(-(digits as i32) - 2);
    let mut n: u64 = 16;
    while (q as f64) * ((n as f64).log(q as f64) + 5.0) / n as f64 >= target {
        n = n.checked_mul(2).ok_or_else(|| Error::Plan("vacca term count overflow".into()))?;
        if n > MAX_VACCA_TERMS {
            return Err(Error::Plan(format!(
                "vacca needs more than 2^26 terms for {digits} digits; pass --n for a partial sum"
            )));
        }
    }
    Ok(n)
}

/// Runs one `gamma` method at `digits` decimals.
pub fn gamma_run(method: GammaMethod, digits: u32, q: Option<u64>, n: Option<u32>, work_bits: Option<u32>) -> Result<GammaRun> {
    let plan = match work_bits {
        Some(b) => PrecisionPlan::for_bits(b),
        None => PrecisionPlan::for_digits(digits + 2),
    };
    match method {
        GammaMethod::Vacca => {
            let q = q.unwrap_or(2);
            if q < 2 {
                return Err(Error::Domain("q must be >= 2".into()));
            }
            let terms = match n {
                Some(n) if n <= 26 => 1u64 << n,
                Some(n) => return Err(Error::Range(format!("vacca --n {n} exceeds 26"))),
                None => vacca_terms(digits, q)?,
            };
            let est = if q == 2 { series::vacca_partial(terms) } else { series::baseq_vacca_partial(q, terms)? };
            Ok(series_run(method, Some(q), est))
        }
        GammaMethod::Gosper => Ok(series_run(method, None, series::gosper_gamma(&plan))),
        GammaMethod::BaseqAccel => {
            let q = q.unwrap_or(3);
            Ok(series_run(method, Some(q), series::baseq_accel_gamma(q, &plan)?))
        }
        _ => {
            let am = method.asym().expect("asymptotic method");
            let q = q.unwrap_or(3);
            let mut gp = match n {
                Some(n) => gammaengine::plan_with_n(am, q, n, digits)?,
                None => gammaengine::plan_for_digits(digits, am, q)?,
            };
            if let Some(b) = work_bits {
                gp.work_bits = b;
            }
            let r = gammaengine::gamma_asym(&gp)?;
            let terms = qlog_count(am, gp.q, gp.n, gp.m) as u64;
            Ok(GammaRun {
                method: method.name().to_string(),
                q: (am == AsymMethod::BaseQ).then_some(gp.q),
                n: Some(gp.n),
                m: Some(gp.m),
                terms,
                value: r.value,
            })
        }
    }
}

fn qlog_count(method: AsymMethod, q: u64, n: u32, m: u32) -> usize {
    match method {
        AsymMethod::Base3 => linforms::l_form_base3(n, m / 6).terms.len(),
        AsymMethod::BaseQ => linforms::l_form_baseq(q, n, m).terms.len(),
        _ => linforms::l_form_base2(n, m).terms.len(),
    }
}

/// The longest certified prefix up to `digits` decimals.
fn certified_prefix(v: &HpReal, digits: u32) -> Option<(u32, String)> {
    let start = digits.min(v.certified_digits());
    (0..=start).rev().find_map(|d| v.to_fixed(d).ok().map(|s| (d, s)))
}

#[derive(Serialize)]
struct GammaJson<'a> {
    method: &'a str,
    q: Option<u64>,
    n: Option<u32>,
    m: Option<u32>,
    digits: u32,
    value: &'a str,
    err_exp2: Option<i32>,
    terms: u64,
}

fn cmd_gamma(a: &GammaArgs, format: OutputFormat, wb: Option<u32>) -> CliResult<Output> {
    let run = gamma_run(a.method, a.digits, a.q, a.n, wb)?;
    let (got, text) = certified_prefix(&run.value, a.digits)
        .ok_or_else(|| Failure::Compute("no digits certified".into()))?;
    if got < a.digits {
        if a.n.is_none() && wb.is_none() {
            return Err(Failure::Compute(format!("only {got} of {} digits certified", a.digits)));
        }
        eprintln!("warning: only {got} of {} digits certified at this level", a.digits);
    }
    Ok(Output::ok(match format {
        OutputFormat::Json => to_json(&GammaJson {
            method: &run.method,
            q: run.q,
            n: run.n,
            m: run.m,
            digits: got,
            value: &text,
            err_exp2: run.value.err_exp2(),
            terms: run.terms,
        }),
        _ => format!("{text}\n"),
    }))
}

// ---------------------------------------------------------------------------
// qlog

fn parse_rational(s: &str) -> CliResult<Rational> {
    let t = s.trim();
    let parsed = match t.split_once('/') {
        Some((a, b)) => {
            let num: Integer = a.trim().parse().map_err(|_| Failure::Usage(format!("bad rational {s:?}")))?;
            let den: Integer = b.trim().parse().map_err(|_| Failure::Usage(format!("bad rational {s:?}")))?;
            if den == 0 {
                return Err(Failure::Usage("zero denominator".into()));
            }
            Rational::from((num, den))
        }
        None => Rational::from(t.parse::<Integer>().map_err(|_| Failure::Usage(format!("bad rational {s:?}")))?),
    };
    Ok(parsed)
}

#[derive(Serialize)]
struct QlogJson<'a> {
    q: u64,
    z: String,
    route: &'static str,
    digits: u32,
    value: &'a str,
    err_exp2: Option<i32>,
}

fn cmd_qlog(a: &QlogArgs, format: OutputFormat, wb: Option<u32>) -> CliResult<Output> {
    let z = parse_rational(&a.z)?;
    let plan = match wb {
        Some(b) => PrecisionPlan::for_bits(b),
        None => PrecisionPlan::for_digits(a.digits),
    };
    let (value, text) = with_retry(&plan, |p| {
        let req = QLogRequest::new(a.q, z.clone(), *p)?;
        let v = match a.route {
            QlogRoute::Accel => qlog_accel(&req),
            QlogRoute::Series => qlog_series(&req),
        };
        let s = v.to_fixed(a.digits)?;
        Ok((v, s))
    })?;
    Ok(Output::ok(match format {
        OutputFormat::Json => to_json(&QlogJson {
            q: a.q,
            z: z.to_string(),
            route: if a.route == QlogRoute::Accel { "accel" } else { "series" },
            digits: a.digits,
            value: &text,
            err_exp2: value.err_exp2(),
        }),
        _ => format!("{text}\n"),
    }))
}

// ---------------------------------------------------------------------------
// decompose

fn cmd_decompose(a: &DecomposeArgs, format: OutputFormat, wb: Option<u32>) -> CliResult<Output> {
    let plan = PrecisionPlan::for_bits(wb.unwrap_or(200));
    let (d, oracle) = match a.base.as_str() {
        "2" => {
            let m = a.m.ok_or_else(|| Failure::Usage("--m is required for base 2".into()))?;
            let d = linforms::decompose_base2(a.n, m, &plan)?;
            let o = a.check.then(|| linforms::i_base2_oracle(a.n, m, &plan)).transpose()?;
            (d, o)
        }
        "3" => {
            let k = match (a.k, a.m) {
                (Some(k), None) => k,
                (None, Some(m)) if m % 6 == 0 => m / 6,
                (None, Some(m)) => return Err(Failure::Usage(format!("base 3 needs m = 6k (m = {m})"))),
                _ => return Err(Failure::Usage("base 3 needs exactly one of --k, --m".into())),
            };
            let d = linforms::decompose_base3(a.n, k, &plan)?;
            let o = a.check.then(|| linforms::i_base3_oracle(a.n, 6 * k, &plan)).transpose()?;
            (d, o)
        }
        "q" => {
            let q = a.q.ok_or_else(|| Failure::Usage("--q is required for base q".into()))?;
            let m = a.m.ok_or_else(|| Failure::Usage("--m is required for base q".into()))?;
            let d = linforms::decompose_baseq(q, a.n, m, &plan)?;
            let o = a
                .check
                .then(|| {
                    if q <= series::BASEQ_ACCEL_MAX_Q {
                        linforms::i_baseq_oracle(q, a.n, m, &plan)
                    } else {
                        linforms::i_baseq_oracle_blocked(q, a.n, m, &plan, q)
                    }
                })
                .transpose()?;
            (d, o)
        }
        other => return Err(Failure::Usage(format!("--base must be 2, 3 or q (got {other:?})"))),
    };
    let residual = d.residual.clone().expect("decompose computes the residual");
    let agree = oracle.as_ref().map(|o| o.overlaps(&residual));
    let text = match format {
        OutputFormat::Json => {
            let mut v = serde_json::to_value(&d).expect("serializable");
            if let Some(o) = &oracle {
                v["I_oracle"] = serde_json::to_value(o).expect("serializable");
                v["oracle_agrees"] = json!(agree);
            }
            to_json(&v)
        }
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "base {} n {} m {}", d.base, d.n, d.m);
            let _ = writeln!(s, "gamma_coeff {}", d.gamma_coeff);
            let _ = writeln!(s, "L {}", d.l_part.to_sci(30));
            let _ = writeln!(s, "A {}", d.a_part.to_hp(d.l_part.prec()).to_sci(30));
            let _ = writeln!(s, "I {}", residual.to_sci(30));
            let _ = writeln!(s, "d_m*L integral {}", d.l_integral);
            if let Some(ai) = d.a_integral {
                let _ = writeln!(s, "d*A integral {ai}");
            }
            if let Some(o) = &oracle {
                let _ = writeln!(s, "I oracle {}", o.to_sci(30));
                let _ = writeln!(s, "oracle agrees {}", agree.unwrap_or(false));
            }
            s
        }
    };
    Ok(Output {
        text,
        ok: agree.unwrap_or(true),
    })
}

// ---------------------------------------------------------------------------
// irrat

fn parse_levels(s: &str) -> CliResult<Vec<u32>> {
    let bad = || Failure::Usage(format!("--n must be an integer or a range a..b (got {s:?})"));
    match s.split_once("..") {
        Some((a, b)) => {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![s.trim().parse().map_err(|_| bad())?]),
    }
}

fn cmd_irrat(a: &IrratArgs, format: OutputFormat) -> CliResult<Output> {
    let levels = parse_levels(&a.n)?;
    let mut certs = Vec::new();
    for &n in &levels {
        let cert = match a.base {
            2 => {
                let m = match a.m {
                    Some(m) => m,
                    None => 1u32.checked_shl(n).ok_or_else(|| Failure::Usage("n too large".into()))?,
                };
                let kind = match &a.kind {
                    Some(k) => ThresholdKind::parse(k, a.eps)?,
                    None if m == 1 << n => ThresholdKind::Eq25,
                    None => ThresholdKind::Eq26,
                };
                irrat::test_base2(n, m, kind)?
            }
            3 => {
                if a.m.is_some() {
                    return Err(Failure::Usage("base 3 fixes m = 3^n - 3".into()));
                }
                if let Some(k) = &a.kind {
                    if ThresholdKind::parse(k, a.eps)? != ThresholdKind::Base3Thm8 {
                        return Err(Failure::Usage("base 3 supports --kind base3_thm8 only".into()));
                    }
                }
                irrat::test_base3(n)?
            }
            b => return Err(Failure::Usage(format!("--base must be 2 or 3 (got {b})"))),
        };
        certs.push(cert);
    }
    if let Some(dir) = &a.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Compute(format!("cannot create {}: {e}", dir.display())))?;
        for c in &certs {
            let p = dir.join(format!("cert_base{}_n{}_m{}_{}.json", c.base, c.n, c.m, c.kind));
            std::fs::write(&p, to_json(c)).map_err(|e| Failure::Compute(format!("cannot write {}: {e}", p.display())))?;
        }
    }
    let text = match format {
        OutputFormat::Json if certs.len() == 1 => to_json(&certs[0]),
        OutputFormat::Json => to_json(&certs),
        _ => {
            let mut s = String::new();
            for c in &certs {
                let _ = writeln!(
                    s,
                    "base {} n {} m {} kind {}: frac {} threshold {} -> {}",
                    c.base,
                    c.n,
                    c.m,
                    c.kind,
                    c.frac,
                    c.threshold,
                    if c.passed { "pass" } else { "fail" }
                );
                if let (Some(ex), Some(lb)) = (&c.excluded, c.denominator_lower_bound) {
                    let _ = writeln!(s, "  gamma = a/b with b not dividing {ex}; hence |b| >= {lb}");
                }
            }
            s
        }
    };
    // A failed test is a valid outcome, not an error.
    Ok(Output::ok(text))
}

// ---------------------------------------------------------------------------
// verify

fn record(check: &str, params: serde_json::Value, value: String, upper: Option<String>, passed: bool) -> CheckRecord {
    CheckRecord {
        check: check.to_string(),
        params,
        lower: None,
        value,
        upper,
        passed,
    }
}

/// Decomposition identities at 200 bits: `|I_oracle − (cγ + L − A)| < 10^{-30}`.
pub fn suite_identities() -> Result<Vec<CheckRecord>> {
    let plan = PrecisionPlan::for_bits(200);
    let tol = HpReal::from_rational(64, &Rational::from((1, Integer::from(Integer::u_pow_u(10, 30)))));
    let mut out = Vec::new();
    let mut push = |check: &str, params: serde_json::Value, residual: &HpReal, oracle: &HpReal| {
        let diff = (residual - oracle).abs();
        let hi = HpReal::exact(diff.upper());
        out.push(record(check, params, hi.to_sci(6), Some("1e-30".into()), hi.certainly_lt(&tol)));
    };
    for n in 2..=6u32 {
        for m in [1u32, 1 << (n - 1), 1 << n, 1 << (n + 1)] {
            let d = linforms::decompose_base2(n, m, &plan)?;
            let o = linforms::i_base2_oracle(n, m, &plan)?;
            push("identity_base2", json!({"n": n, "m": m}), d.residual.as_ref().expect("residual"), &o);
        }
    }
    for n in 2..=3u32 {
        for k in 1..=2u32 {
            let d = linforms::decompose_base3(n, k, &plan)?;
            let o = linforms::i_base3_oracle(n, 6 * k, &plan)?;
            push("identity_base3", json!({"n": n, "k": k}), d.residual.as_ref().expect("residual"), &o);
        }
    }
    for q in 2..=4u64 {
        for n in 2..=3u32 {
            for m in 1..=4u32 {
                let d = linforms::decompose_baseq(q, n, m, &plan)?;
                let o = linforms::i_baseq_oracle(q, n, m, &plan)?;
                push("identity_baseq", json!({"q": q, "n": n, "m": m}), d.residual.as_ref().expect("residual"), &o);
            }
        }
    }
    Ok(out)
}

/// `χ_q(k)` certified integral for `q ≤ 8, k ≤ 60`; the `q = 3, 4` closed
/// forms; the `q = 2` weight equal to 1.
pub fn suite_chi() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for q in 2..=8u64 {
        let mut ok = true;
        let seq = chi_sequence(q, 61)?;
        for k in 0..=60u64 {
            ok &= chi(q, k).map(|c| c.value == seq[k as usize]).unwrap_or(false);
        }
        out.push(record("chi_integral", json!({"q": q, "k_max": 60}), seq[60].to_string(), None, ok));
    }
    let mut ok3 = true;
    let mut ok4 = true;
    for k in 0..=30u64 {
        let c3 = chi(3, k)?.value;
        let signed = if k % 2 == 0 { c3 } else { -c3 };
        ok3 &= signed == chi3_closed_form(k);
        ok4 &= chi(4, k)?.value == chi4_closed_form(k);
    }
    out.push(record("chi3_closed_form", json!({"k_max": 30, "form": "(-1)^k chi_3(k)"}), ok3.to_string(), None, ok3));
    out.push(record("chi4_closed_form", json!({"k_max": 30}), ok4.to_string(), None, ok4));
    let mut ok2 = true;
    for k in 0..=30u64 {
        let c = chi(2, k)?.value;
        ok2 &= (if k % 2 == 0 { c } else { -c }) == 1;
    }
    out.push(record("chi2_weight_one", json!({"k_max": 30}), ok2.to_string(), None, ok2));
    Ok(out)
}

/// Directional convergence of the residual decay rates.
pub fn suite_rates() -> Result<Vec<CheckRecord>> {
    let cases: [(RateFamily, &[u32], u64); 7] = [
        (RateFamily::Base2, &[3, 4, 5, 6], 1),
        (RateFamily::Base2, &[3, 4, 5, 6], 2),
        (RateFamily::Base2General, &[1, 2, 3], 3),
        (RateFamily::Base3, &[2, 3], 3),
        (RateFamily::Baseq, &[2, 3, 4], 2),
        (RateFamily::Baseq, &[2, 3, 4], 3),
        (RateFamily::Baseq, &[2, 3, 4], 4),
    ];
    let mut out = Vec::new();
    for (family, grid, param) in cases {
        let r = boundscheck::empirical_rate(family, grid, param)?;
        let passed = r.converging && r.limit_above_minus_one.unwrap_or(true);
        let name = serde_json::to_value(family).expect("serializable");
        out.push(CheckRecord {
            check: format!("rate_{}", name.as_str().unwrap_or("?")),
            params: json!({"param": param, "n_grid": grid, "empirical": r.empirical, "per_q_pow_n": r.per_q_pow_n}),
            lower: None,
            value: format!("{:.9}", r.empirical[r.empirical.len() - 1]),
            upper: Some(format!("{:.9}", r.theoretical)),
            passed,
        });
    }
    Ok(out)
}

fn records_csv(records: &[CheckRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "params", "lower", "value", "upper", "passed"]).expect("in-memory");
    for r in records {
        w.write_record([
            r.check.as_str(),
            &r.params.to_string(),
            r.lower.as_deref().unwrap_or(""),
            &r.value,
            r.upper.as_deref().unwrap_or(""),
            if r.passed { "true" } else { "false" },
        ])
        .expect("in-memory");
    }
    String::from_utf8(w.into_inner().expect("in-memory")).expect("utf8")
}

fn cmd_verify(a: &VerifyArgs, format: OutputFormat) -> CliResult<Output> {
    let records = match a.suite {
        Suite::Identities => suite_identities()?,
        Suite::Bounds => boundscheck::run_suite()?,
        Suite::Chi => suite_chi()?,
        Suite::Rates => suite_rates()?,
    };
    let ok = records.iter().all(|r| r.passed);
    let text = match format {
        OutputFormat::Json => to_json(&records),
        OutputFormat::Csv => records_csv(&records),
        OutputFormat::Text => {
            let mut s = String::new();
            for r in &records {
                let _ = writeln!(
                    s,
                    "{} {} {} value {}{}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.check,
                    r.params,
                    r.value,
                    r.upper.as_ref().map(|u| format!(" bound {u}")).unwrap_or_default()
                );
            }
            let _ = writeln!(s, "{} of {} checks passed", records.iter().filter(|r| r.passed).count(), records.len());
            s
        }
    };
    Ok(Output { text, ok })
}

// ---------------------------------------------------------------------------
// bench

/// One bench row.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub method: String,
    pub q: Option<u64>,
    pub n: Option<u32>,
    pub m: Option<u32>,
    pub digits_requested: u32,
    pub digits_correct: u32,
    pub terms: u64,
    pub wall_ms: u128,
    /// Why the cell was not run (the method cannot reach the target).
    pub skipped: Option<String>,
}

/// Correct decimals of `v` against the reference γ.
fn digits_correct(v: &HpReal, digits: u32) -> Result<u32> {
    let bits = (f64::from(digits + 10) * std::f64::consts::LOG2_10).ceil() as u32;
    let g = reference_gamma(bits)?;
    let err = (&g - v).abs();
    let hi = err.upper();
    if hi.is_zero() {
        return Ok(digits);
    }
    let l = -hi.to_f64().log10();
    Ok(if l.is_finite() && l > 0.0 { (l.floor() as u32).min(digits + 10) } else { 0 })
}

fn cmd_bench(a: &BenchArgs, format: OutputFormat) -> CliResult<Output> {
    let mut rows = Vec::new();
    for &method in &a.methods {
        for &digits in &a.digits {
            let t0 = Instant::now();
            let run = match gamma_run(method, digits, a.q, None, None) {
                Ok(r) => r,
                Err(Error::Plan(why)) => {
                    rows.push(BenchRow {
                        method: method.name().to_string(),
                        q: None,
                        n: None,
                        m: None,
                        digits_requested: digits,
                        digits_correct: 0,
                        terms: 0,
                        wall_ms: 0,
                        skipped: Some(why),
                    });
                    continue;
                }
                Err(e) => return Err(e.into()),
            };
            let wall_ms = t0.elapsed().as_millis();
            rows.push(BenchRow {
                method: run.method,
                q: run.q,
                n: run.n,
                m: run.m,
                digits_requested: digits,
                digits_correct: digits_correct(&run.value, digits)?,
                terms: run.terms,
                wall_ms,
                skipped: None,
            });
        }
    }
    let text = match format {
        OutputFormat::Json => to_json(&rows),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).expect("in-memory");
            }
            String::from_utf8(w.into_inner().expect("in-memory")).expect("utf8")
        }
        OutputFormat::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "{:<12} {:>4} {:>4} {:>8} {:>6} {:>8} {:>10} {:>9}", "method", "q", "n", "m", "asked", "correct", "terms", "wall_ms");
            for r in &rows {
                if let Some(why) = &r.skipped {
                    let _ = writeln!(s, "{:<12} skipped at {} digits: {why}", r.method, r.digits_requested);
                    continue;
                }
                let opt = |x: Option<u64>| x.map_or("-".to_string(), |v| v.to_string());
                let _ = writeln!(
                    s,
                    "{:<12} {:>4} {:>4} {:>8} {:>6} {:>8} {:>10} {:>9}",
                    r.method,
                    opt(r.q),
                    opt(r.n.map(u64::from)),
                    opt(r.m.map(u64::from)),
                    r.digits_requested,
                    r.digits_correct,
                    r.terms,
                    r.wall_ms
                );
            }
            s
        }
    };
    Ok(Output::ok(text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_parses() {
        let c = Cli::try_parse_from(["qgamma", "gamma", "--digits", "50", "--method", "gosper"]).unwrap();
        assert!(matches!(c.command, Command::Gamma(GammaArgs { digits: 50, method: GammaMethod::Gosper, .. })));
        let c = Cli::try_parse_from(["qgamma", "bench", "--methods", "asym-27,asym-28", "--digits", "10,20", "--csv"]).unwrap();
        match c.command {
            Command::Bench(b) => {
                assert_eq!(b.methods, vec![GammaMethod::Asym27, GammaMethod::Asym28]);
                assert_eq!(b.digits, vec![10, 20]);
            }
            _ => panic!(),
        }
        assert!(Cli::try_parse_from(["qgamma", "gamma", "--digits", "0"]).is_err());
        assert!(Cli::try_parse_from(["qgamma", "gamma", "--digits", "5", "--method", "nope"]).is_err());
    }

    #[test]
    fn method_names() {
        for m in GammaMethod::value_variants() {
            assert_eq!(m.to_possible_value().unwrap().get_name(), m.name());
            assert_eq!(GammaMethod::parse(m.name()), Some(*m));
        }
        assert_eq!(GammaMethod::Asym27.name(), "asym-27");
        assert_eq!(GammaMethod::BaseqAccel.name(), "baseq-accel");
        assert_eq!(GammaMethod::AsymBase3.name(), "asym-base3");
    }

    #[test]
    fn rationals_and_levels() {
        assert_eq!(parse_rational("-2/9").ok().unwrap(), Rational::from((-2, 9)));
        assert_eq!(parse_rational("1").ok().unwrap(), Rational::from(1));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(parse_levels("4..8").ok().unwrap(), vec![4, 5, 6, 7, 8]);
        assert_eq!(parse_levels("5").ok().unwrap(), vec![5]);
        assert!(parse_levels("8..4").is_err());
    }

    #[test]
    fn gamma_methods_agree() {
        for m in [GammaMethod::Gosper, GammaMethod::BaseqAccel, GammaMethod::Asym28, GammaMethod::AsymBase3, GammaMethod::AsymBaseq] {
            let r = gamma_run(m, 20, None, None, None).unwrap();
            assert_eq!(r.value.to_fixed(20).unwrap(), "0.57721566490153286060", "{m:?}");
        }
        let v = gamma_run(GammaMethod::Vacca, 2, None, None, None).unwrap();
        assert_eq!(v.value.to_fixed(2).unwrap(), "0.57");
    }

    #[test]
    fn chi_suite_passes() {
        assert!(suite_chi().unwrap().iter().all(|r| r.passed));
    }
}
