use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use rlab_core::bohr::BohrSpec;
use rlab_core::certify::{check_empty_cert, find_nonthick_h, find_thick_interval, weyl_sum, CertifyError, EmptyCert};
use rlab_core::exactreal::{parse_const, torus_norm_expr, ConstExpr, DEFAULT_CAP_BITS};
use rlab_core::experiments::{self, validate_params, ExperimentConfig, ExperimentError, ExperimentId};
use rlab_core::hardy::{HardyCombo, IterateSeq, Polynomial, Rounding};
use rlab_core::span::{
    classify_limit, exhaustive_classification, integer_combination, joint_intersective_check, poly_shadow, GenFamily,
    IntPoly,
};

const PASS: u8 = 0;
const VIOLATED: u8 = 1;
const INCONCLUSIVE: u8 = 2;
const FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rlab",
    version,
    about = "Return-time sets of Bohr sets along Hardy sequences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the parameter constraints of a config.
    Validate { config: PathBuf },
    /// Run a pipeline and emit its JSON report.
    Run(RunArgs),
    /// Bohr set enumeration and density.
    #[command(subcommand)]
    Bohr(BohrCmd),
    /// Search for and check certificates.
    #[command(subcommand)]
    Cert(CertCmd),
    /// Derivative-span classification, polynomial shadow, intersectivity.
    #[command(subcommand)]
    Span(SpanCmd),
    /// Normalized exponential sum of `c·n^γ`, in floating point.
    Weyl {
        #[arg(long, default_value = "sqrt(2)")]
        c: String,
        #[arg(long, default_value = "3/2")]
        gamma: String,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// thm-main, thm-empty, thm-q65 or custom.
    experiment: String,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Range of n as A:B.
    #[arg(long)]
    nrange: Option<String>,
    #[arg(long)]
    witness_bound: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dump_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SpecArgs {
    /// Frequency, repeatable.
    #[arg(long = "freq", required = true)]
    freqs: Vec<String>,
    /// Radius per frequency, repeatable.
    #[arg(long = "radius", required = true)]
    radii: Vec<String>,
    /// Declare the irrational frequencies independent over Q together with 1.
    #[arg(long)]
    independent: bool,
    #[arg(long)]
    n: u64,
}

#[derive(Subcommand)]
enum BohrCmd {
    /// Write the elements up to N as CSV.
    Enum {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical and theoretical density.
    Density {
        #[command(flatten)]
        spec: SpecArgs,
    },
}

#[derive(Subcommand)]
enum CertCmd {
    /// Smallest step h certifying that `{n : ‖γP(n)‖ < η}` is not thick.
    Nonthick {
        #[arg(long)]
        gamma: String,
        /// Coefficients from the constant term up, comma separated.
        #[arg(long, default_value = "0,1")]
        poly: String,
        #[arg(long)]
        eta: String,
        #[arg(long, default_value_t = 1_000_000)]
        h_max: u64,
    },
    /// Emptiness certificate for `⌊t^{3/2}⌉` and `⌊λt^{3/2} + L(t+ξ)⌉`.
    Empty {
        #[arg(long, default_value = "sqrt(2)")]
        lambda: String,
        #[arg(long, default_value = "sqrt(2)")]
        xi: String,
        #[arg(long = "L", default_value = "6")]
        l: String,
        #[arg(long, default_value = "1:1000")]
        range: String,
        #[arg(long, value_enum, default_value_t = RoundingArg::Floor)]
        rounding: RoundingArg,
    },
    /// Verified interval of length H+1 inside `{n : ‖c_j n^{3/2}‖ < η}`.
    ThickInterval {
        #[arg(long = "c", required = true)]
        cs: Vec<String>,
        #[arg(long)]
        eta: String,
        #[arg(long = "H")]
        h: u64,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RoundingArg {
    Floor,
    Nearest,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    F,
    G,
    H,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, default_value = "sqrt(2)")]
    lambda: String,
    #[arg(long = "L", default_value = "6")]
    l: String,
    #[arg(long, default_value = "sqrt(2)")]
    xi: String,
}

#[derive(Subcommand)]
enum SpanCmd {
    /// Limit classes of all integer combinations in a box, or of one matrix.
    Classify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 5)]
        order: usize,
        #[arg(long, default_value_t = 10)]
        bound: i64,
        /// One coefficient matrix as rows `a0,a1,..;b0,b1,..`.
        #[arg(long)]
        matrix: Option<String>,
    },
    /// Integer polynomial shadow of the family.
    Shadow {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Common roots modulo every m up to the bound.
    Intersective {
        /// Integer coefficients from the constant term up, repeatable.
        #[arg(long = "poly", required = true)]
        polys: Vec<String>,
        #[arg(long, default_value_t = 100)]
        max_modulus: u64,
    },
}

fn expr(s: &str) -> Result<ConstExpr> {
    parse_const(s).with_context(|| format!("parsing {s:?}"))
}

fn rational(s: &str) -> Result<BigRational> {
    expr(s)?
        .as_literal()
        .ok_or_else(|| anyhow!("{s} is not a rational literal"))
}

fn range(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| anyhow!("range must be A:B, got {s}"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn family(a: &FamilyArgs) -> Result<GenFamily> {
    let (lambda, l, xi) = (expr(&a.lambda)?, expr(&a.l)?, expr(&a.xi)?);
    Ok(match a.family {
        FamilyArg::F => GenFamily::f_family(&lambda)?,
        FamilyArg::G => GenFamily::g_family(&lambda, &l, &xi)?,
        FamilyArg::H => GenFamily::h_family(&lambda, &l)?,
    })
}

fn bohr_spec(a: &SpecArgs) -> Result<BohrSpec> {
    let freqs = a.freqs.iter().map(|f| expr(f)).collect::<Result<Vec<_>>>()?;
    let radii = a.radii.iter().map(|d| rational(d)).collect::<Result<Vec<_>>>()?;
    Ok(BohrSpec::new(freqs, radii, a.independent)?)
}

fn run(args: RunArgs) -> Result<u8> {
    let id: ExperimentId = args.experiment.parse()?;
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::defaults(id),
    };
    if cfg.experiment != id {
        bail!("config is for {}, not {}", cfg.experiment.name(), id.name());
    }
    if let Some(r) = &args.nrange {
        let (a, b) = range(r)?;
        cfg.horizons.n_range = [a, b];
    }
    if let Some(m) = args.witness_bound {
        cfg.horizons.witness_bound = m;
    }
    if args.out.is_some() {
        cfg.output.report = args.out.clone();
    }
    if args.dump_dir.is_some() {
        cfg.output.dump_dir = args.dump_dir.clone();
    }
    let report = match experiments::run(&cfg) {
        Ok(r) => r,
        Err(ExperimentError::ConstraintViolated { constraint, detail }) => {
            eprintln!("constraint violated: {constraint} ({detail})");
            return Ok(VIOLATED);
        }
        Err(e) => return Err(e.into()),
    };
    let text = report.to_json();
    match &cfg.output.report {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    for c in &report.checks {
        eprintln!("{:<28} {:?}  {}", c.clause, c.status, c.detail);
    }
    Ok(report.exit_code() as u8)
}

fn cert(cmd: CertCmd) -> Result<u8> {
    match cmd {
        CertCmd::Nonthick {
            gamma,
            poly,
            eta,
            h_max,
        } => {
            let p = Polynomial::new(poly.split(',').map(expr).collect::<Result<_>>()?);
            match find_nonthick_h(&expr(&gamma)?, &p, &rational(&eta)?, h_max, DEFAULT_CAP_BITS) {
                Ok(c) => {
                    print(&serde_json::to_value(c.record())?);
                    Ok(PASS)
                }
                Err(CertifyError::NotFound(m)) => {
                    print(&json!({ "status": "not_found", "h_max": m }));
                    Ok(INCONCLUSIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
        CertCmd::Empty {
            lambda,
            xi,
            l,
            range: r,
            rounding,
        } => {
            let (lambda, xi, l) = (expr(&lambda)?, expr(&xi)?, expr(&l)?);
            let rounding = match rounding {
                RoundingArg::Floor => Rounding::Floor,
                RoundingArg::Nearest => Rounding::Nearest,
            };
            let cert = EmptyCert {
                thetas: vec![-&lambda, ConstExpr::one()],
                poly: Polynomial::affine(&l, &xi),
                d_bar: ConstExpr::one() + experiments::abs_expr(&lambda, DEFAULT_CAP_BITS)?,
                beta: ConstExpr::one() / &l,
                rho: torus_norm_expr(&xi, DEFAULT_CAP_BITS)?,
            };
            let seqs = [
                IterateSeq::new(HardyCombo::three_halves(), rounding),
                IterateSeq::new(HardyCombo::lambda_plus_affine(&lambda, &l, &xi), rounding),
            ];
            match check_empty_cert(&cert, &seqs, range(&r)?, DEFAULT_CAP_BITS) {
                Ok(v) => {
                    print(&json!({ "status": "VALID", "certificate": cert.record(), "verdict": v }));
                    Ok(PASS)
                }
                Err(CertifyError::CertInvalid(msg)) => {
                    print(&json!({ "status": "INVALID", "certificate": cert.record(), "reason": msg }));
                    Ok(VIOLATED)
                }
                Err(e) => Err(e.into()),
            }
        }
        CertCmd::ThickInterval { cs, eta, h, cap } => {
            let cs = cs.iter().map(|c| expr(c)).collect::<Result<Vec<_>>>()?;
            match find_thick_interval(&cs, &rational(&eta)?, h, cap, DEFAULT_CAP_BITS) {
                Ok(iv) => {
                    print(&json!({ "status": "found", "interval": iv }));
                    Ok(PASS)
                }
                Err(CertifyError::NotFound(m)) => {
                    print(&json!({ "status": "not_found", "search_cap": m }));
                    Ok(INCONCLUSIVE)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<i64>>> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<i64>().map_err(Into::into))
                .collect()
        })
        .collect()
}

fn span(cmd: SpanCmd) -> Result<u8> {
    match cmd {
        SpanCmd::Classify {
            family: fa,
            order,
            bound,
            matrix,
        } => {
            let fam = family(&fa)?;
            if let Some(m) = matrix {
                let g = integer_combination(&fam, &parse_matrix(&m)?)?;
                let class = classify_limit(&g);
                print(&json!({ "combination": g.to_string(), "class": class.name() }));
                return Ok(PASS);
            }
            let c = exhaustive_classification(&fam, order, bound);
            print(&json!({
                "max_order": order,
                "bound": bound,
                "total": c.total().to_string(),
                "zero_function": c.zero_function.to_string(),
                "limit_zero": c.limit_zero.to_string(),
                "limit_infinity": c.limit_infinity.to_string(),
                "finite_nonzero": c.finite_nonzero.to_string(),
            }));
            Ok(if c.finite_nonzero == 0 { PASS } else { VIOLATED })
        }
        SpanCmd::Shadow { family: fa } => {
            print(&serde_json::to_value(poly_shadow(&family(&fa)?)?)?);
            Ok(PASS)
        }
        SpanCmd::Intersective { polys, max_modulus } => {
            let ps = polys
                .iter()
                .map(|p| {
                    p.split(',')
                        .map(|x| x.trim().parse::<BigInt>().map_err(Into::into))
                        .collect::<Result<Vec<_>>>()
                })
                .map(|c| c.map(IntPoly))
                .collect::<Result<Vec<_>>>()?;
            let rep = joint_intersective_check(&ps, max_modulus);
            print(&serde_json::to_value(&rep)?);
            Ok(if rep.passed() { PASS } else { VIOLATED })
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            match validate_params(&cfg) {
                Ok(rep) => {
                    print(&serde_json::to_value(&rep)?);
                    Ok(PASS)
                }
                Err(ExperimentError::ConstraintViolated { constraint, detail }) => {
                    print(&json!({ "violated": constraint, "detail": detail }));
                    Ok(VIOLATED)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Run(args) => run(args),
        Command::Bohr(BohrCmd::Enum { spec, out }) => {
            let (set, _) = bohr_spec(&spec)?.enumerate_with_density(spec.n)?;
            match out {
                Some(p) => set.write_csv(std::io::BufWriter::new(std::fs::File::create(p)?))?,
                None => set.write_csv(std::io::stdout().lock())?,
            }
            Ok(PASS)
        }
        Command::Bohr(BohrCmd::Density { spec }) => {
            let b = bohr_spec(&spec)?;
            let (set, emp) = b.enumerate_with_density(spec.n)?;
            let theo = b
                .density_theoretical()
                .map(|d| d.to_string())
                .map_err(|e| e.to_string());
            print(&json!({
                "spec": b.to_string(),
                "n": spec.n,
                "count": set.len(),
                "empirical": emp.to_string(),
                "theoretical": theo.as_ref().ok(),
                "theoretical_error": theo.as_ref().err(),
            }));
            Ok(PASS)
        }
        Command::Cert(c) => cert(c),
        Command::Span(s) => span(s),
        Command::Weyl { c, gamma, n } => {
            let w = weyl_sum(&expr(&c)?, &rational(&gamma)?, n)?;
            print(&serde_json::to_value(&w)?);
            Ok(PASS)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(FAILURE)
        }
    }
}
