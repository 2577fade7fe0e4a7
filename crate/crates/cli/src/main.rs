//! Command-line front end: single form factors, |F|² scans, P tables and the
//! validation suites.

mod validate;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hydroform::exactmath::{PrecisionContext, Real};
use hydroform::formfactor::{form_factor_using, gos_scan_using, BoundLabel, TransitionSpec};
use hydroform::pcoeff::{p_auto, p_gegenbauer, p_series, PEvaluator, PIndex};
use hydroform::Error;
use rug::Float;
use serde_json::json;

#[derive(Parser)]
#[command(version, about = "Hydrogenic and Sturmian form factors in arbitrary precision")]
struct Cli {
    /// Working precision in bits (at least 64)
    #[arg(long, global = true, env = "HYDROFORM_PRECISION_BITS", default_value_t = 128)]
    precision_bits: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one form factor <f| exp(i k.r) |i>
    Compute(ComputeArgs),
    /// Scan |F|², summed over the final m, on a uniform ln k grid
    Scan(ScanArgs),
    /// Run a validation suite; exit 1 if any check fails
    Validate(ValidateArgs),
    /// Tabulate P^(l2)_{n,l;n3,l3}(u, w)
    Table(TableArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Hydrogen,
    Sturmian,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Series,
    Gegenbauer,
    /// Series and Gegenbauer with an agreement check
    Auto,
}

impl BackendArg {
    fn evaluator(self) -> PEvaluator {
        match self {
            BackendArg::Series => p_series,
            BackendArg::Gegenbauer => p_gegenbauer,
            BackendArg::Auto => p_auto,
        }
    }

    fn name(self) -> &'static str {
        match self {
            BackendArg::Series => "series",
            BackendArg::Gegenbauer => "gegenbauer",
            BackendArg::Auto => "auto",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Quantum numbers are principal (n >= 1); internally n - 1 is used.
#[derive(Args)]
struct TransitionArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Hydrogen)]
    mode: ModeArg,
    /// Nuclear charge (hydrogen mode)
    #[arg(long = "Z", default_value = "1")]
    z: String,
    /// Initial-state exponent (sturmian mode)
    #[arg(long)]
    alpha: Option<String>,
    /// Final-state exponent (sturmian mode)
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    ni: u32,
    #[arg(long, default_value_t = 0)]
    li: u32,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    mi: i64,
    #[arg(long)]
    nf: u32,
    #[arg(long, default_value_t = 0)]
    lf: u32,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    mf: i64,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    t: TransitionArgs,
    /// |k| in atomic units
    #[arg(long, default_value = "0")]
    k: String,
    /// Polar angle of k (radians)
    #[arg(long, default_value = "0")]
    theta: String,
    /// Azimuth of k (radians)
    #[arg(long, default_value = "0")]
    phi: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    t: TransitionArgs,
    #[arg(long, default_value = "-3", allow_negative_numbers = true)]
    lnk_min: f64,
    #[arg(long, default_value = "3", allow_negative_numbers = true)]
    lnk_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum)]
    suite: validate::Suite,
    /// Largest principal quantum number covered (P indices run to nmax - 1)
    #[arg(long, default_value_t = 4)]
    nmax: u32,
}

/// Either a single index (--n --l --n3 --l3 --l2) or every valid index with n, n3 <= --nmax.
/// Indices here follow the internal convention n = principal - 1.
#[derive(Args)]
struct TableArgs {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    n3: Option<u32>,
    #[arg(long)]
    l3: Option<u32>,
    #[arg(long)]
    l2: Option<u32>,
    #[arg(long)]
    nmax: Option<u32>,
    #[arg(long)]
    u: String,
    #[arg(long)]
    w: String,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    backend: BackendArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Precision(_)
            | Error::IndexViolation(_)
            | Error::BadQuantumNumbers(_)
            | Error::InvalidChannel(_)
            | Error::DegenerateU
            | Error::InvalidArgument(_)
            | Error::ConvergenceRegionViolated(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

fn digits(ctx: &PrecisionContext) -> usize {
    (ctx.bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

fn dec(x: &Real, ctx: &PrecisionContext) -> String {
    x.to_string_radix(10, Some(digits(ctx)))
}

fn sci(x: &Real) -> String {
    format!("{:.16e}", x.to_f64())
}

fn parse(ctx: &PrecisionContext, flag: &str, s: &str) -> Result<Real, Failure> {
    ctx.parse(s).map_err(|_| Failure::Usage(format!("--{flag}: cannot parse '{s}' as a number")))
}

fn principal(flag: &str, n: u32) -> Result<u32, Failure> {
    n.checked_sub(1).ok_or_else(|| Failure::Usage(format!("--{flag} is a principal quantum number and must be >= 1")))
}

fn transition(a: &TransitionArgs, ctx: &PrecisionContext) -> Result<TransitionSpec, Failure> {
    let ni = principal("ni", a.ni)?;
    let nf = principal("nf", a.nf)?;
    let lab = |n: u32, l: u32, m: i64, side: &str| {
        BoundLabel::new(n, l, m).map_err(|_| {
            if l > n {
                Failure::Usage(format!("{side} state: l exceeds n - 1 (n={}, l={l})", n + 1))
            } else {
                Failure::Usage(format!("{side} state: |m| exceeds l (l={l}, m={m})"))
            }
        })
    };
    let i = lab(ni, a.li, a.mi, "initial")?;
    let f = lab(nf, a.lf, a.mf, "final")?;
    Ok(match a.mode {
        ModeArg::Hydrogen => {
            if a.alpha.is_some() || a.beta.is_some() {
                return Err(Failure::Usage("--alpha/--beta only apply in sturmian mode".into()));
            }
            TransitionSpec::hydrogen(&parse(ctx, "Z", &a.z)?, i, f, ctx)?
        }
        ModeArg::Sturmian => {
            let get = |flag: &str, v: &Option<String>| match v {
                Some(s) => parse(ctx, flag, s),
                None => Err(Failure::Usage(format!("sturmian mode needs --{flag}"))),
            };
            TransitionSpec::sturmian(get("alpha", &a.alpha)?, get("beta", &a.beta)?, i, f)?
        }
    })
}

fn mode_name(a: &TransitionArgs) -> &'static str {
    match a.mode {
        ModeArg::Hydrogen => "hydrogen",
        ModeArg::Sturmian => "sturmian",
    }
}

fn compute(a: &ComputeArgs, ctx: &PrecisionContext, out: &mut dyn Write) -> Result<(), Failure> {
    let t = transition(&a.t, ctx)?;
    let k = parse(ctx, "k", &a.k)?;
    if k < 0 {
        return Err(Failure::Usage("--k must be non-negative".into()));
    }
    let theta = parse(ctx, "theta", &a.theta)?;
    let phi = parse(ctx, "phi", &a.phi)?;
    let b = ctx.bits;
    let (st, ct) = Float::with_val(b, &theta).sin_cos(Float::new(b));
    let (sp, cp) = Float::with_val(b, &phi).sin_cos(Float::new(b));
    let kvec = [
        Float::with_val(b, &k * &st) * &cp,
        Float::with_val(b, &k * &st) * &sp,
        Float::with_val(b, &k * &ct),
    ];
    let ff = form_factor_using(&t, &kvec, a.t.backend.evaluator(), ctx)?;
    let abs2 = ff.value.norm_sqr();
    match a.format {
        Format::Json => {
            let partials: Vec<_> = ff
                .l2_terms
                .iter()
                .map(|(l2, v)| json!({"l2": l2, "real": dec(&v.re, ctx), "imag": dec(&v.im, ctx)}))
                .collect();
            let rec = json!({
                "schema": 1,
                "transition": {
                    "mode": mode_name(&a.t),
                    "initial": {"n": a.t.ni, "l": a.t.li, "m": a.t.mi},
                    "final": {"n": a.t.nf, "l": a.t.lf, "m": a.t.mf},
                    "alpha": dec(&t.channel.alpha, ctx),
                    "beta": dec(&t.channel.beta, ctx),
                },
                "kinematics": {
                    "k": dec(&k, ctx),
                    "theta": dec(&theta, ctx),
                    "phi": dec(&phi, ctx),
                    "u": dec(&ff.kin.u, ctx),
                    "v": dec(&ff.kin.v, ctx),
                    "w": dec(&ff.kin.w, ctx),
                },
                "F_real": dec(&ff.value.re, ctx),
                "F_imag": dec(&ff.value.im, ctx),
                "absF2": dec(&abs2, ctx),
                "l2_partials": partials,
                "backend": a.t.backend.name(),
                "precision_bits": ctx.bits,
            });
            writeln!(out, "{rec}").map_err(|e| Failure::Check(e.to_string()))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let row = |e: csv::Error| Failure::Check(e.to_string());
            w.write_record(["ni", "li", "mi", "nf", "lf", "mf", "k", "F_real", "F_imag", "absF2"]).map_err(row)?;
            w.write_record([
                a.t.ni.to_string(),
                a.t.li.to_string(),
                a.t.mi.to_string(),
                a.t.nf.to_string(),
                a.t.lf.to_string(),
                a.t.mf.to_string(),
                sci(&k),
                sci(&ff.value.re),
                sci(&ff.value.im),
                sci(&abs2),
            ])
            .map_err(row)?;
            w.flush().map_err(|e| Failure::Check(e.to_string()))?;
        }
    }
    Ok(())
}

fn scan(a: &ScanArgs, ctx: &PrecisionContext, out: &mut dyn Write) -> Result<(), Failure> {
    if a.points == 0 {
        return Err(Failure::Usage("--points must be at least 1".into()));
    }
    if !(a.lnk_min < a.lnk_max) && a.points > 1 {
        return Err(Failure::Usage("--lnk-min must be below --lnk-max".into()));
    }
    let t = transition(&a.t, ctx)?;
    let grid: Vec<Real> = (0..a.points)
        .map(|i| {
            if a.points == 1 {
                ctx.f64(a.lnk_min)
            } else {
                let span = ctx.f64(a.lnk_max) - ctx.f64(a.lnk_min);
                ctx.f64(a.lnk_min) + span * i as u32 / (a.points as u32 - 1)
            }
        })
        .collect();
    let rows = gos_scan_using(&t, &grid, a.t.backend.evaluator(), ctx)?;
    let lmax = (a.t.li + a.t.lf) as usize;
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Failure::Check(e.to_string());
    let mut header = vec!["lnk".to_string(), "k".into(), "absF2".into()];
    header.extend((0..=lmax).map(|l| format!("l2_{l}")));
    w.write_record(&header).map_err(err)?;
    for r in rows {
        let mut rec = vec![sci(&r.lnk), sci(&r.k), sci(&r.abs_f2)];
        rec.extend(r.l2_partials.iter().map(sci));
        w.write_record(&rec).map_err(err)?;
    }
    w.flush().map_err(|e| Failure::Check(e.to_string()))
}

fn table(a: &TableArgs, ctx: &PrecisionContext, out: &mut dyn Write) -> Result<(), Failure> {
    let u = parse(ctx, "u", &a.u)?;
    let w = parse(ctx, "w", &a.w)?;
    let single = [a.n, a.l, a.n3, a.l3, a.l2];
    let indices: Vec<PIndex> = match (single, a.nmax) {
        ([Some(n), Some(l), Some(n3), Some(l3), Some(l2)], None) => vec![PIndex::new(n, l, n3, l3, l2)?],
        ([None, None, None, None, None], Some(nmax)) => {
            let mut v = Vec::new();
            for n in 0..=nmax {
                for l in 0..=n {
                    for n3 in 0..=nmax {
                        for l3 in 0..=n3 {
                            for l2 in 0..=l + l3 + 1 {
                                v.push(PIndex { n, l, n3, l3, l2 });
                            }
                        }
                    }
                }
            }
            v
        }
        _ => return Err(Failure::Usage("give either all of --n --l --n3 --l3 --l2 or --nmax".into())),
    };
    let eval = a.backend.evaluator();
    let mut vals = Vec::with_capacity(indices.len());
    for i in &indices {
        vals.push(eval(*i, &u, &w, ctx)?);
    }
    match a.format {
        Format::Csv => {
            let mut wr = csv::Writer::from_writer(out);
            let err = |e: csv::Error| Failure::Check(e.to_string());
            wr.write_record(["n", "l", "n3", "l3", "l2", "u", "w", "value", "backend"]).map_err(err)?;
            for p in &vals {
                let i = p.index;
                wr.write_record([
                    i.n.to_string(),
                    i.l.to_string(),
                    i.n3.to_string(),
                    i.l3.to_string(),
                    i.l2.to_string(),
                    sci(&u),
                    sci(&w),
                    sci(&p.value),
                    a.backend.name().to_string(),
                ])
                .map_err(err)?;
            }
            wr.flush().map_err(|e| Failure::Check(e.to_string()))?;
        }
        Format::Json => {
            for p in &vals {
                let i = p.index;
                let rec = json!({
                    "schema": 1,
                    "index": {"n": i.n, "l": i.l, "n3": i.n3, "l3": i.l3, "l2": i.l2},
                    "u": dec(&u, ctx),
                    "w": dec(&w, ctx),
                    "value": dec(&p.value, ctx),
                    "backend": a.backend.name(),
                    "precision_bits": ctx.bits,
                });
                writeln!(out, "{rec}").map_err(|e| Failure::Check(e.to_string()))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = match PrecisionContext::new(cli.precision_bits) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let res = match &cli.command {
        Command::Compute(a) => compute(a, &ctx, &mut out),
        Command::Scan(a) => scan(a, &ctx, &mut out),
        Command::Table(a) => table(a, &ctx, &mut out),
        Command::Validate(a) => match validate::run(a.suite, a.nmax, &ctx, &mut out) {
            Ok(true) => Ok(()),
            Ok(false) => Err(Failure::Check("validation failed".into())),
            Err(e) => Err(e.into()),
        },
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
