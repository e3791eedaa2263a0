//! Command-line front end. Every invocation prints one JSON document on
//! standard output; exit status 0 on success, 1 on a computation error and 2
//! on a usage error (message on standard error).

use crate::cover::is_good;
use crate::error::{Error, Result};
use crate::etale::{NormOneElement, QuadEtale};
use crate::literal::{parse_element, parse_etale, parse_matrix, parse_rational, split_list};
use crate::localfield::{AdditiveCharacter, LocalField, MuM, SquareClass, DEFAULT_PRECISION};
use crate::packetdata::{dagger_char, epsilon_char, mm_eigen_check, DaggerMethod, Side, TorsionPoint, YParam};
use crate::quadforms::gamma;
use crate::stabconj::{
    cad_sigma, cali_factor, inv_of, kappa_eval, CalibratedElement, KappaSign, SignVector, TorusBlock, TorusParam,
};
use crate::suites;
use crate::symbols::{hilbert_m, product_formula_check};
use crate::transfer::{delta_minus, delta_plus, nabla_rank1};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Overrides the default precision when `--precision` is absent.
pub const PRECISION_ENV: &str = "BDCOVER_PRECISION";

#[derive(Parser, Debug)]
#[command(
    name = "bdcover",
    version,
    about = "Local computations for metaplectic covers of Sp(2n)"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Residue characteristic (odd prime).
    #[arg(long, global = true, default_value_t = 3)]
    p: u64,
    /// Degree of the cover; must divide p − 1.
    #[arg(long, global = true, default_value_t = 2)]
    m: u64,
    /// p-adic digits carried (default 32, or $BDCOVER_PRECISION).
    #[arg(long, global = true)]
    precision: Option<u32>,
    #[arg(long = "psi-level", global = true, default_value_t = 0, allow_hyphen_values = true)]
    psi_level: i64,
    #[arg(long = "psi-twist", global = true, default_value = "1", allow_hyphen_values = true)]
    psi_twist: String,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Hilbert symbol (a, b)_{F,m}.
    Symbol {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// base, u, p or up.
        #[arg(long, default_value = "base")]
        field: String,
    },
    /// Weil index γ_ψ(t).
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, default_value = "base")]
        field: String,
    },
    /// Whether x ∈ K¹ is good.
    Good {
        /// split, u, p or up.
        #[arg(long)]
        torus: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// inv(δ, η) of per-block conjugators and the values of κ±.
    Inv {
        /// Block kinds, `;`-separated.
        #[arg(long)]
        torus: String,
        /// `a,b,c,d` per block, `;`-separated.
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Calibration factor C_m(ν, γ₀).
    Cali {
        /// split, u, p or up.
        #[arg(long)]
        torus: String,
        #[arg(long, allow_hyphen_values = true)]
        nu: String,
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
    },
    /// Calibrated stable conjugation CAd^σ(g).
    Cad {
        #[command(flatten)]
        elem: ElemArgs,
        /// Conjugator `a,b,c,d` per block, `;`-separated.
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Transfer factor Δ^±.
    Delta {
        #[command(flatten)]
        elem: ElemArgs,
        #[arg(long, value_enum, default_value_t = DeltaSign::Plus)]
        sign: DeltaSign,
    },
    /// ∇ on the twofold cover of SL(2).
    Nabla {
        /// γ ∈ SL(2) as `a,b,c,d`.
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        z: i64,
    },
    /// θ†(γ₀).
    Dagger {
        #[command(flatten)]
        packet: PacketArgs,
        /// Signs per block, e.g. `-1,1`.
        #[arg(long, allow_hyphen_values = true)]
        g0: String,
        #[arg(long, value_enum, default_value_t = Method::Hasse)]
        method: Method,
    },
    /// ε_SO / ε_Sp against θ† at every γ₀ ∈ {±1}^n.
    Interplay {
        #[command(flatten)]
        packet: PacketArgs,
    },
    /// Moment-map quadratic space and eigenvalue check.
    Mm {
        #[command(flatten)]
        packet: PacketArgs,
    },
    /// Product over all places of (a, b) for rationals a, b.
    ProductFormula {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Runs the randomized property suites.
    Selftest {
        #[arg(long, default_value_t = 200)]
        iters: u64,
        /// Run a single suite.
        #[arg(long)]
        suite: Option<String>,
    },
}

#[derive(Args, Debug)]
struct ElemArgs {
    /// Block kinds, `;`-separated (split, u, p, up).
    #[arg(long)]
    torus: String,
    /// c′ per block; defaults to 1.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// δ₀ ∈ K¹ per block.
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    /// `+` or `-` per block.
    #[arg(long, allow_hyphen_values = true)]
    sigma: Option<String>,
    /// Kernel coordinate exponent.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    z: i64,
}

#[derive(Args, Debug)]
struct PacketArgs {
    /// Block kinds, `;`-separated (split, u, p, up).
    #[arg(long)]
    torus: String,
    /// c′ per block; defaults to 1.
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    /// y′ per block.
    #[arg(long, allow_hyphen_values = true)]
    y: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DeltaSign {
    Plus,
    Minus,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Hasse,
    Weil,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::BadPrime(_)
            | Error::BadPrecision { .. }
            | Error::BadModulus(_)
            | Error::BadSign => Failure::Usage(e.to_string()),
            e => Failure::Compute(e),
        }
    }
}

/// Parses `argv` (program name first), runs the command and prints its JSON.
pub fn dispatch<I: IntoIterator<Item = String>>(argv: I) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(v) => {
            println!("{v}");
            0
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(Failure::Compute(e)) => {
            println!("{}", json!({ "error": e.to_string() }));
            1
        }
    }
}

/// Runs a parsed command line and returns its JSON document.
pub fn run_args<I: IntoIterator<Item = String>>(argv: I) -> std::result::Result<Value, String> {
    let cli = Cli::try_parse_from(argv).map_err(|e| e.to_string())?;
    run(&cli).map_err(|f| match f {
        Failure::Usage(m) => m,
        Failure::Compute(e) => e.to_string(),
    })
}

struct Ctx {
    f: LocalField,
    m: u64,
    psi: AdditiveCharacter,
}

fn precision(g: &Global) -> std::result::Result<u32, Failure> {
    if let Some(p) = g.precision {
        return Ok(p);
    }
    match std::env::var(PRECISION_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{PRECISION_ENV} is not a number: {s:?}"))),
        Err(_) => Ok(DEFAULT_PRECISION),
    }
}

fn context(g: &Global) -> std::result::Result<Ctx, Failure> {
    let f = LocalField::base(g.p, precision(g)?)?;
    let twist = parse_element(f, &g.psi_twist)?;
    let psi = AdditiveCharacter::new(f, g.psi_level, twist)?;
    Ok(Ctx { f, m: g.m, psi })
}

fn field_of(f: LocalField, s: &str) -> Result<LocalField> {
    match s {
        "base" | "F" => Ok(f),
        c => LocalField::quadratic(f.p(), SquareClass::parse(c)?, f.prec()),
    }
}

fn algebra_of(f: LocalField, s: &str) -> Result<QuadEtale> {
    match s {
        "split" => Ok(QuadEtale::split(f)),
        c => QuadEtale::field(f, SquareClass::parse(c)?),
    }
}

fn torus_of(f: LocalField, kinds: &str, cs: Option<&str>) -> Result<TorusParam> {
    let ks = split_list(kinds);
    let cs: Vec<&str> = match cs {
        Some(c) => split_list(c),
        None => vec!["1"; ks.len()],
    };
    if cs.len() != ks.len() {
        return Err(Error::Parse("one c per block".into()));
    }
    let blocks = ks
        .iter()
        .zip(&cs)
        .map(|(k, c)| TorusBlock::new(algebra_of(f, k)?, parse_element(f, c)?))
        .collect::<Result<_>>()?;
    TorusParam::new(f, blocks)
}

fn norm_one(k: &QuadEtale, s: &str) -> Result<NormOneElement> {
    NormOneElement::new(*k, parse_etale(k, s)?)
}

fn signs(s: &str, n: usize) -> Result<Vec<i8>> {
    let v: Vec<i8> = s
        .split([',', ';'])
        .map(|t| match t.trim() {
            "+" | "1" | "+1" => Ok(1),
            "-" | "-1" => Ok(-1),
            o => Err(Error::Parse(format!("not a sign: {o:?}"))),
        })
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::Parse("one sign per block".into()));
    }
    Ok(v)
}

fn element(ctx: &Ctx, a: &ElemArgs, default_sigma: i8) -> Result<(TorusParam, CalibratedElement)> {
    let torus = torus_of(ctx.f, &a.torus, a.c.as_deref())?;
    let xs = split_list(&a.x0);
    if xs.len() != torus.n() {
        return Err(Error::Parse("one x0 per block".into()));
    }
    let d0 = torus
        .blocks
        .iter()
        .zip(&xs)
        .map(|(b, x)| norm_one(&b.k, x))
        .collect::<Result<Vec<_>>>()?;
    let sigma = match &a.sigma {
        Some(s) => signs(s, torus.n())?,
        None => vec![default_sigma; torus.n()],
    };
    let e = CalibratedElement::new(ctx.m, &torus, d0, SignVector(sigma), MuM::new(ctx.m, a.z))?;
    Ok((torus, e))
}

fn elem_json(e: &CalibratedElement) -> Value {
    json!({
        "blocks": e.tilde.blocks,
        "z": e.tilde.z,
        "delta0": e.delta0.iter().map(|d| d.elem()).collect::<Vec<_>>(),
        "delta0_mat": e.delta0_mat,
        "sigma": e.sigma,
    })
}

fn packet(ctx: &Ctx, a: &PacketArgs) -> Result<(TorusParam, YParam)> {
    let torus = torus_of(ctx.f, &a.torus, a.c.as_deref())?;
    let y = split_list(&a.y)
        .iter()
        .map(|s| parse_element(ctx.f, s))
        .collect::<Result<Vec<_>>>()?;
    let y = YParam::new(&torus, y)?;
    Ok((torus, y))
}

fn run(cli: &Cli) -> std::result::Result<Value, Failure> {
    if let Cmd::Selftest { iters, suite } = &cli.cmd {
        if *iters == 0 {
            return Err(Failure::Usage("--iters must be at least 1".into()));
        }
        let seed = cli.global.seed;
        return match suite {
            None => Ok(serde_json::to_value(suites::run_all(seed, *iters)).expect("serializable")),
            Some(name) => {
                let rep = suites::run_suite(name, seed, *iters).ok_or_else(|| {
                    Failure::Usage(format!("unknown suite {name:?}; known: {}", suites::SUITES.join(", ")))
                })?;
                let failures = rep.failed;
                Ok(json!({ "seed": seed, "iters": iters, "suites": [rep], "failures": failures }))
            }
        };
    }
    if let Cmd::ProductFormula { a, b } = &cli.cmd {
        let (a, b) = (parse_rational(a)?, parse_rational(b)?);
        let small = |(n, d): (i128, i128)| -> Result<(i64, i64)> {
            let n = i64::try_from(n).map_err(|_| Error::Parse("numerator out of range".into()))?;
            let d = i64::try_from(d).map_err(|_| Error::Parse("denominator out of range".into()))?;
            if n == 0 {
                return Err(Error::Parse("rationals must be nonzero".into()));
            }
            Ok((n, d))
        };
        return Ok(serde_json::to_value(product_formula_check(small(a)?, small(b)?)?).expect("serializable"));
    }
    let ctx = context(&cli.global)?;
    let v = match &cli.cmd {
        Cmd::Symbol { a, b, field } => {
            let k = field_of(ctx.f, field)?;
            let (a, b) = (parse_element(k, a)?, parse_element(k, b)?);
            json!({ "mu_m": hilbert_m(k, ctx.m, &a, &b)? })
        }
        Cmd::Gamma { t, field } => {
            let k = field_of(ctx.f, field)?;
            json!({ "gamma": gamma(&ctx.psi, &parse_element(k, t)?)? })
        }
        Cmd::Good { torus, x } => {
            let k = algebra_of(ctx.f, torus)?;
            json!({ "good": is_good(&norm_one(&k, x)?, ctx.m)? })
        }
        Cmd::Inv { torus, g } => {
            let t = torus_of(ctx.f, torus, None)?;
            let gs = split_list(g)
                .iter()
                .map(|s| parse_matrix(ctx.f, s))
                .collect::<Result<Vec<_>>>()?;
            let inv = inv_of(&t, &gs)?;
            json!({
                "inv": inv.nus,
                "signs": inv.signs(&t)?,
                "kappa_plus": kappa_eval(KappaSign::Plus, &t, &inv)?,
                "kappa_minus": kappa_eval(KappaSign::Minus, &t, &inv)?,
            })
        }
        Cmd::Cali { torus, nu, x0 } => {
            let k = algebra_of(ctx.f, torus)?;
            json!({ "cali": cali_factor(ctx.m, &parse_element(ctx.f, nu)?, &norm_one(&k, x0)?)? })
        }
        Cmd::Cad { elem, g } => {
            let (torus, e) = element(&ctx, elem, 1)?;
            let gs = split_list(g)
                .iter()
                .map(|s| parse_matrix(ctx.f, s))
                .collect::<Result<Vec<_>>>()?;
            let inv = inv_of(&torus, &gs)?;
            json!({ "cad": elem_json(&cad_sigma(&gs, &e)?), "inv_signs": inv.signs(&torus)? })
        }
        Cmd::Delta { elem, sign } => {
            let psi = Some(&ctx.psi);
            match sign {
                DeltaSign::Plus => {
                    let (_, e) = element(&ctx, elem, 1)?;
                    json!({ "delta_plus": delta_plus(ctx.m, psi, &e, None)? })
                }
                DeltaSign::Minus => {
                    let s = if ctx.m % 4 == 0 { -1 } else { 1 };
                    let (_, e) = element(&ctx, elem, s)?;
                    json!({ "delta_minus": delta_minus(ctx.m, psi, &e, None)? })
                }
            }
        }
        Cmd::Nabla { g, z } => {
            let g = parse_matrix(ctx.f, g)?;
            let gt = crate::cover::CoverElement { g, z: MuM::new(2, *z) };
            json!({ "nabla": nabla_rank1(&ctx.psi, &gt)? })
        }
        Cmd::Dagger { packet: pa, g0, method } => {
            let (torus, y) = packet(&ctx, pa)?;
            let g0 = TorsionPoint(signs(g0, torus.n())?);
            let method = match method {
                Method::Hasse => DaggerMethod::Hasse,
                Method::Weil => DaggerMethod::Weil(&ctx.psi),
            };
            json!({ "dagger": dagger_char(ctx.m, &torus, &y, &g0, method)? })
        }
        Cmd::Interplay { packet: pa } => {
            let (torus, y) = packet(&ctx, pa)?;
            let mut rows = Vec::new();
            let mut holds = true;
            for g0 in TorsionPoint::all(torus.n()) {
                let sp = epsilon_char(Side::Sp, &torus, &y, &g0)?;
                let so = epsilon_char(Side::SO, &torus, &y, &g0)?;
                let d = dagger_char(ctx.m, &torus, &y, &g0, DaggerMethod::Hasse)?;
                holds &= so * sp == d;
                rows.push(json!({ "g0": g0.0, "epsilon_sp": sp, "epsilon_so": so, "dagger": d }));
            }
            json!({ "rows": rows, "holds": holds })
        }
        Cmd::Mm { packet: pa } => {
            let (torus, y) = packet(&ctx, pa)?;
            serde_json::to_value(mm_eigen_check(&torus, &y)?).expect("serializable")
        }
        Cmd::Selftest { .. } | Cmd::ProductFormula { .. } => unreachable!("handled above"),
    };
    Ok(v)
}
