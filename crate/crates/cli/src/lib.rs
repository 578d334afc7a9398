//! Command-line driver: argument parsing, dispatch, caching and reports.

pub mod cache;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nekrasov_core::format::{den_text, series_lines};
use nekrasov_core::identities::{
    check_blowup_eq, check_sym, check_vanish_k, check_vanish_t, default_directions, extract_up, f0_tau_derivative,
    solve_recursive,
};
use nekrasov_core::instanton::z_inst;
use nekrasov_core::wallcross::example_blowup_coeff;
use nekrasov_core::{blowup::zhat_inst, BlowupParams, CheckReport, Error, InsertionSpec, LamSeries, RatFrac, TauConvention, Q};
use serde::Serialize;

use cache::{Cache, CacheError, CACHE_ENV};

#[derive(Parser, Debug)]
#[command(name = "nekrasov", version, about = "Exact instanton partition functions and blow-up identities")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Instanton partition function on the plane.
    Z,
    /// Partition function on the blow-up.
    Zhat,
    /// Check an identity order by order.
    Check {
        #[arg(value_enum)]
        identity: Identity,
    },
    /// Recover Z from blow-up equations at two values of d.
    Solve,
    /// ε-limit of the τ_p derivative of the free energy.
    F0Tau,
    /// Spectral curve coefficient U_p.
    SwUp,
    /// Worked wall-crossing example on P^{r-1}.
    WallcrossExample {
        #[arg(long, default_value_t = 0)]
        nf: u32,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    Blowup,
    VanishT,
    VanishK,
    Sym,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    #[arg(long, global = true, default_value_t = 2)]
    pub rank: usize,
    /// Chern–Simons level l.
    #[arg(long, global = true, default_value_t = 0)]
    pub cs: i32,
    /// Exceptional line power; repeat for `solve`.
    #[arg(short = 'd', global = true)]
    pub d: Vec<i32>,
    #[arg(short = 'k', global = true, default_value_t = 0)]
    pub k: i64,
    #[arg(short = 'p', global = true)]
    pub p: Option<i32>,
    #[arg(long, global = true, default_value_t = 4)]
    pub max_order: u32,
    #[arg(long, global = true, default_value_t = 1)]
    pub tau_degree: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,
    /// `tau=scalar` or `tau=adams`.
    #[arg(long, global = true, default_value = "tau=scalar", value_parser = parse_convention)]
    pub convention: TauConvention,
    /// Direction c of the line ε2 = c ε1; repeatable.
    #[arg(long, global = true, value_parser = parse_q)]
    pub direction: Vec<Q>,
}

fn parse_convention(s: &str) -> Result<TauConvention, String> {
    match s.strip_prefix("tau=").unwrap_or(s) {
        "scalar" => Ok(TauConvention::Scalar),
        "adams" => Ok(TauConvention::Adams),
        other => Err(format!("unknown tau convention `{other}`")),
    }
}

fn parse_q(s: &str) -> Result<Q, String> {
    s.parse::<Q>().map_err(|e| e.0)
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Cache(CacheError),
    Compute(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Compute(_) => 1,
            Failure::Config(_) => 2,
            Failure::Cache(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Cache(e) => write!(f, "{e}"),
            Failure::Compute(m) => write!(f, "computation failed: {m}"),
        }
    }
}

impl From<CacheError> for Failure {
    fn from(e: CacheError) -> Self {
        Failure::Cache(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::RangeViolation(_) | Error::InvalidInput(_) | Error::Parse(_) | Error::SingularSystem(_) => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Compute(e.to_string()),
        }
    }
}

/// Report text and whether every asserted identity held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub ok: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }
}

#[derive(Serialize)]
struct Key<'a, T: Serialize> {
    kind: &'a str,
    order: u32,
    params: &'a T,
}

fn cached<T: Serialize>(opts: &Opts, kind: &str, params: &T, compute: impl FnOnce() -> Result<LamSeries, Failure>) -> Result<LamSeries, Failure> {
    match Cache::from_config(opts.cache.as_deref()) {
        Some(c) => {
            let key = serde_json::to_string(&Key { kind, order: opts.max_order, params }).expect("key serializes");
            c.get_or_compute(&key, compute)
        }
        None => compute(),
    }
}

fn single_d(opts: &Opts) -> Result<i32, Failure> {
    match opts.d.as_slice() {
        [] => Ok(0),
        [d] => Ok(*d),
        _ => Err(Failure::Config("give -d once for this command".into())),
    }
}

fn need_p(opts: &Opts) -> Result<i32, Failure> {
    opts.p.ok_or_else(|| Failure::Config("this command needs -p".into()))
}

fn directions(opts: &Opts) -> Vec<Q> {
    if opts.direction.is_empty() {
        default_directions()
    } else {
        opts.direction.clone()
    }
}

fn spec_of(opts: &Opts) -> InsertionSpec {
    match opts.p {
        Some(p) => InsertionSpec::with_taus(opts.rank, opts.cs, vec![p], opts.tau_degree),
        None => InsertionSpec::plain(opts.rank, opts.cs),
    }
}

fn series_text(s: &LamSeries, format: Format) -> String {
    match format {
        Format::Machine => series_lines(s).iter().map(|l| format!("{l}\n")).collect(),
        Format::Text => s.iter().map(|((n, m), c)| format!("Λ^{n}  [{m}]  {c}\n")).collect(),
    }
}

fn report(r: &CheckReport, format: Format) -> Outcome {
    let text = match format {
        Format::Text => r.table(),
        Format::Machine => r.machine(),
    };
    Outcome { text, ok: r.holds() }
}

fn by_order(values: &[(u32, RatFrac)], format: Format) -> String {
    let mut s = String::new();
    for (n, v) in values {
        let _ = match format {
            Format::Machine => writeln!(s, "lambda={n}\tnum={}\tden={}", v.num(), den_text(v.den())),
            Format::Text => writeln!(s, "Λ^{n}  {v}"),
        };
    }
    s
}

pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let o = &cli.opts;
    let (r, l, order) = (o.rank, o.cs, o.max_order);
    match &cli.command {
        Command::Z => {
            let spec = spec_of(o);
            let z = cached(o, "z", &spec, || Ok(z_inst(&spec, order)?))?;
            Ok(Outcome { text: series_text(&z, o.format), ok: true })
        }
        Command::Zhat => {
            let params = BlowupParams { spec: spec_of(o), k: o.k, d: single_d(o)?, order, convention: o.convention };
            let z = cached(o, "zhat", &params, || Ok(zhat_inst(&params)?))?;
            Ok(Outcome { text: series_text(&z, o.format), ok: true })
        }
        Command::Check { identity } => {
            let d = single_d(o)?;
            let rep = match identity {
                Identity::Blowup => check_blowup_eq(r, l, d, order)?,
                Identity::VanishT => check_vanish_t(r, l, d, need_p(o)?, order, o.convention)?,
                Identity::VanishK => check_vanish_k(r, l, d, o.k, order)?,
                Identity::Sym => check_sym(r, l, order)?,
            };
            Ok(report(&rep, o.format))
        }
        Command::Solve => {
            if o.d.len() < 2 {
                return Err(Failure::Config("solve needs two values of -d".into()));
            }
            let z = solve_recursive(r, l, &o.d, order)?;
            Ok(Outcome { text: series_text(&z, o.format), ok: true })
        }
        Command::F0Tau => {
            let v = f0_tau_derivative(r, l, need_p(o)?, order, &directions(o))?;
            Ok(Outcome { text: by_order(&v, o.format), ok: true })
        }
        Command::SwUp => {
            let p = need_p(o)?;
            let p = u32::try_from(p).map_err(|_| Failure::Config(format!("p = {p} must be positive")))?;
            let v = extract_up(r, l, p, order, &directions(o))?;
            Ok(Outcome { text: by_order(&v, o.format), ok: true })
        }
        Command::WallcrossExample { nf } => {
            let r32 = u32::try_from(r).map_err(|_| Failure::Config("rank too large".into()))?;
            let v = example_blowup_coeff(r32, *nf)?;
            let closed = Q::binomial(2 * r as i64 - *nf as i64 - 2, r as i64 - 1).neg();
            let text = match o.format {
                Format::Text => format!("{v}\n"),
                Format::Machine => format!("rank={r}\tnf={nf}\tvalue={v}\tclosed_form={closed}\n"),
            };
            Ok(Outcome { text, ok: v == closed })
        }
    }
}
