//! `hecke-moments` command-line front end. Every subcommand prints one JSON document.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use hecke_moments::moment_integrals::{weighted_spectral_integral, zeta_moment};
use hecke_moments::motohashi_terms::{cstar_main_terms, dstar_main_term, h_term};
use hecke_moments::oscillatory::{saddle_point_x0, saddle_vs_quadrature};
use hecke_moments::rmt_coefficients::leading_dk_with_cutoff;
use hecke_moments::spectral_data::{ingest_csv, spectral_sum, trace_rhs, SpectralWeight, PSI_ALPHA};
use hecke_moments::transforms::{h_star_detailed, psi_hat_direct, GaussianWeight, LineKernels, Prefactor, DEFAULT_DELTA};
use hecke_moments::verify::{run_suite, Mode};
use hecke_moments::{ComplexValue, Float, HeckeError, PrecisionContext};

use config::Config;

const EXIT_FAILED: u8 = 1;
const EXIT_ARGS: u8 = 2;
const EXIT_CERT: u8 = 3;
const EXIT_DATA: u8 = 4;

#[derive(Parser)]
#[command(name = "hecke-moments", version, about = "Moments of Hecke series at the central point", arg_required_else_help = true)]
struct Cli {
    /// Working precision in decimal digits (at least 30).
    #[arg(long, global = true)]
    digits: Option<u32>,
    /// Relative tolerance for quadratures and series.
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    /// Omit the wall time so repeated runs print identical bytes.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightKind {
    /// `q(r)` damping factor times the Gaussian pair.
    Kuznetsov,
    /// `r^2 + 1/4` times the Gaussian pair.
    Quadratic,
    Unit,
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long)]
    center: f64,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long, value_enum, default_value = "kuznetsov")]
    weight: WeightKind,
}

#[derive(Clone, Copy, ValueEnum)]
enum Transform {
    Hstar,
    Psihat,
    PsiPm,
    #[value(name = "g-k")]
    GK,
    H1,
    PsiKernel,
}

#[derive(Clone, Copy, ValueEnum)]
enum MainKind {
    Cubic,
    Sextic,
}

#[derive(Subcommand)]
enum Command {
    /// Leading moment coefficient d_k with its arithmetic and geometric factors.
    RmtCoeffs {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 100_000)]
        prime_cutoff: usize,
    },
    /// One value of a spectral transform.
    TransformEval {
        #[arg(long, value_enum)]
        which: Transform,
        #[command(flatten)]
        w: WeightArgs,
        /// `re` or `re,im`; an integer order for g-k.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        abscissa: Option<f64>,
    },
    /// `int_0^T |zeta(1/2+it)|^{2k} dt`.
    ZetaMoment {
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        k: u32,
    },
    /// Weighted integral of `|zeta(1/2+ir)|^{2k} / |zeta(1+2ir)|^2` over the continuous spectrum.
    SpectralIntegral {
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        w: WeightArgs,
    },
    /// One of the explicit-formula terms H1..H7 for the quadratic weight.
    MotohashiTerm {
        #[arg(long)]
        which: u32,
        #[arg(long)]
        f: u64,
        #[arg(long = "K")]
        k: f64,
        #[arg(long = "G")]
        g: f64,
        #[arg(long, default_value_t = 50)]
        cutoff: u64,
    },
    /// Residue main term as a Laurent polynomial in log K.
    MainTerm {
        #[arg(long, value_enum)]
        which: MainKind,
        #[arg(long = "K")]
        k: f64,
        #[arg(long = "G", default_value_t = 1.0)]
        g: f64,
    },
    /// Saddle-point approximation against direct quadrature.
    SaddleDemo {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long = "K0")]
        k0: f64,
        /// Bump scale; defaults to two thirds of the saddle point.
        #[arg(long = "N")]
        big_n: Option<f64>,
    },
    /// Weighted sum of central values over a CSV of eigendata.
    SpectralSum {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long = "K")]
        big_k: f64,
        /// Gaussian width; a sharp cutoff at K when absent.
        #[arg(long = "G")]
        g: Option<f64>,
    },
    /// Truncated Kloosterman side of the trace formula.
    TraceRhs {
        #[arg(long)]
        m: u64,
        #[command(flatten)]
        w: WeightArgs,
        #[arg(long, default_value_t = 32)]
        ell_cutoff: u64,
        /// Real part of the Dirichlet exponent u.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        u: f64,
    },
    /// Run the acceptance suite.
    VerifyAll {
        /// Reduced grids for the slowest criteria.
        #[arg(long)]
        quick: bool,
        /// Only these criteria (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

enum Failure {
    Args(String),
    Lib(HeckeError),
}

impl From<HeckeError> for Failure {
    fn from(e: HeckeError) -> Self {
        Failure::Lib(e)
    }
}

struct Output {
    params: Value,
    values: Value,
    error_bounds: Value,
    provenance: Vec<&'static str>,
    passed: bool,
}

impl Output {
    fn new(params: Value, values: Value, error_bounds: Value, provenance: &[&'static str]) -> Self {
        Output { params, values, error_bounds, provenance: provenance.to_vec(), passed: true }
    }
}

fn cv(z: &ComplexValue) -> Value {
    serde_json::to_value(z).expect("complex values serialize")
}

fn fl(x: &Float) -> Value {
    Value::String(hecke_moments::complex::float_string(x))
}

fn weight(w: &WeightArgs, cfg: &Config) -> Result<GaussianWeight, Failure> {
    let width = w.width.or(cfg.width).ok_or_else(|| Failure::Args("--width is required (or set width in the config file)".into()))?;
    let pre = match w.weight {
        WeightKind::Kuznetsov => Prefactor::KuznetsovQ { constant: cfg.q_constant },
        WeightKind::Quadratic => Prefactor::Quadratic,
        WeightKind::Unit => Prefactor::Unit,
    };
    Ok(GaussianWeight::new(w.center, width, pre)?)
}

fn weight_json(w: &GaussianWeight) -> Value {
    serde_json::to_value(w).expect("weights serialize")
}

fn parse_point(s: &str, p: u32) -> Result<ComplexValue, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    // parsed at the working precision so that decimal inputs like 0.2 are not rounded to f64 first
    let num = |t: &str| {
        Float::parse(t).map(|v| Float::with_val(p, v)).map_err(|_| Failure::Args(format!("bad number '{}' in --point", t)))
    };
    match parts.as_slice() {
        [re] => Ok(ComplexValue::real(num(re)?)),
        [re, im] => Ok(ComplexValue::new(num(re)?, num(im)?)),
        _ => Err(Failure::Args(format!("--point takes 're' or 're,im', got '{}'", s))),
    }
}

fn real_point(z: &ComplexValue) -> Result<f64, Failure> {
    if z.im.is_zero() {
        Ok(z.re.to_f64())
    } else {
        Err(Failure::Args("this transform takes a real --point".into()))
    }
}

fn transform_eval(which: Transform, wa: &WeightArgs, point: &str, abscissa: Option<f64>, cfg: &Config, ctx: &PrecisionContext) -> Result<Output, Failure> {
    let w = weight(wa, cfg)?;
    let z = parse_point(point, ctx.bits())?;
    let lk = LineKernels::new(w, ctx);
    let name = match which {
        Transform::Hstar => "hstar",
        Transform::Psihat => "psihat",
        Transform::PsiPm => "psi-pm",
        Transform::GK => "g-k",
        Transform::H1 => "h1",
        Transform::PsiKernel => "psi-kernel",
    };
    let params = json!({"which": name, "weight": weight_json(&w), "point": cv(&z), "abscissa": abscissa});
    let out = match which {
        Transform::Hstar => {
            let v = h_star_detailed(&z, &w, ctx)?;
            Output::new(params, json!({"value": cv(&v.value)}), json!({"value": v.error.to_f64()}), &["hstar transform"])
        }
        Transform::Psihat => {
            let v = psi_hat_direct(&z, &w, ctx)?;
            Output::new(params, json!({"value": cv(&v.value)}), json!({"value": v.error.to_f64()}), &["psi-hat transform"])
        }
        Transform::PsiPm => {
            let x = real_point(&z)?;
            let beta = abscissa.unwrap_or(0.2);
            let a = lk.psi_plus(x, beta)?;
            let b = lk.psi_minus(x, beta)?;
            Output::new(
                params,
                json!({"psi_plus": cv(&a.value), "psi_minus": cv(&b.value)}),
                json!({"psi_plus": a.error.to_f64(), "psi_minus": b.error.to_f64()}),
                &["Psi-plus and Psi-minus line integrals"],
            )
        }
        Transform::GK => {
            let x = real_point(&z)?;
            if x.fract() != 0.0 || x < 0.0 {
                return Err(Failure::Args("g-k takes a nonnegative integer order as --point".into()));
            }
            let v = lk.g_k(x as u32, abscissa.unwrap_or(DEFAULT_DELTA))?;
            Output::new(params, json!({"value": cv(&v.value)}), json!({"value": v.error.to_f64()}), &["g_k transform"])
        }
        Transform::H1 => {
            let v = lk.h1(real_point(&z)?, abscissa.unwrap_or(DEFAULT_DELTA))?;
            Output::new(params, json!({"value": cv(&v.value)}), json!({"value": v.error.to_f64()}), &["h_1 transform"])
        }
        Transform::PsiKernel => {
            let v = lk.psi_kernel(real_point(&z)?, abscissa.unwrap_or(PSI_ALPHA))?;
            Output::new(params, json!({"value": cv(&v.value)}), json!({"value": v.error.to_f64()}), &["psi kernel of the trace formula"])
        }
    };
    Ok(out)
}

fn verify_all(quick: bool, only: &[u32], ctx: &PrecisionContext) -> Result<Output, Failure> {
    let mode = if quick { Mode::Quick } else { Mode::Full };
    if let Some(bad) = only.iter().find(|&&i| !(1..=14).contains(&i)) {
        return Err(Failure::Args(format!("criterion {} not in 1..=14", bad)));
    }
    let report = run_suite(mode, only, ctx, |c| {
        eprintln!("criterion {:>2} {} ({:.1} s)", c.id, if c.passed { "PASS" } else { "FAIL" }, c.wall_time)
    });
    for line in report.lines() {
        eprintln!("{}", line);
    }
    let mut values = Map::new();
    let mut bounds = Map::new();
    for c in &report.criteria {
        values.insert(c.id.to_string(), json!({"name": c.name, "passed": c.passed, "metrics": c.metrics, "notes": c.notes}));
        bounds.insert(c.id.to_string(), json!({"budget_secs": c.budget_secs}));
    }
    values.insert("15".into(), json!({"name": "aggregate", "passed": report.passed}));
    let mut out = Output::new(json!({"mode": mode, "only": only}), Value::Object(values), Value::Object(bounds), &["acceptance suite"]);
    out.passed = report.passed;
    Ok(out)
}

fn dispatch(cmd: &Command, cfg: &Config, ctx: &PrecisionContext) -> Result<(&'static str, Output), Failure> {
    Ok(match cmd {
        Command::RmtCoeffs { k, prime_cutoff } => {
            let m = leading_dk_with_cutoff(*k, *prime_cutoff, ctx)?;
            (
                "rmt-coeffs",
                Output::new(
                    json!({"k": k, "prime_cutoff": prime_cutoff}),
                    json!({"d_k": fl(&m.d_k.value), "a_k": fl(&m.a_k.value), "g_k": m.g_k.to_string()}),
                    json!({"d_k": m.d_k.error, "a_k": m.a_k.error}),
                    &["moment conjecture leading coefficient"],
                ),
            )
        }
        Command::TransformEval { which, w, point, abscissa } => ("transform-eval", transform_eval(*which, w, point, *abscissa, cfg, ctx)?),
        Command::ZetaMoment { t, k } => {
            let v = zeta_moment(*t, *k, ctx)?;
            ("zeta-moment", Output::new(json!({"T": t, "k": k}), json!({"value": fl(&v.value)}), json!({"value": v.error}), &["critical-line moment integral"]))
        }
        Command::SpectralIntegral { k, w } => {
            let gw = weight(w, cfg)?;
            let v = weighted_spectral_integral(*k, &gw, ctx)?;
            (
                "spectral-integral",
                Output::new(json!({"k": k, "weight": weight_json(&gw)}), json!({"value": fl(&v.value)}), json!({"value": v.error}), &["continuous-spectrum integral"]),
            )
        }
        Command::MotohashiTerm { which, f, k, g, cutoff } => {
            let gw = GaussianWeight::quadratic(*k, *g)?;
            let t = h_term(*which, *f, &gw, *cutoff, ctx)?;
            (
                "motohashi-term",
                Output::new(
                    json!({"which": which, "f": f, "K": k, "G": g, "cutoff": cutoff}),
                    json!({"value": cv(&t.value), "terms": t.terms}),
                    json!({"value": t.error, "tail": t.tail_bound}),
                    &["explicit formula term"],
                ),
            )
        }
        Command::MainTerm { which, k, g } => {
            let m = match which {
                MainKind::Cubic => cstar_main_terms(*k, *g, cfg.lambda_constant, ctx)?,
                MainKind::Sextic => dstar_main_term(*k, cfg.lambda_constant, ctx)?,
            };
            (
                "main-term",
                Output::new(
                    json!({"which": match which { MainKind::Cubic => "cubic", MainKind::Sextic => "sextic" }, "K": k, "G": g, "lambda_constant": cfg.lambda_constant}),
                    json!({"coefficients": m.coeffs, "inverse_coefficients": m.inverse_coeffs, "leading": m.leading(), "residue": m.residue, "scaled": m.scaled}),
                    json!({}),
                    &["residue main term"],
                ),
            )
        }
        Command::SaddleDemo { m, n, k0, big_n } => {
            let big_n = match big_n {
                Some(v) => *v,
                None => (saddle_point_x0(*m, *n, *k0, ctx)?.to_f64() / 1.5).round(),
            };
            let r = saddle_vs_quadrature(*m, *n, *k0, big_n, ctx)?;
            (
                "saddle-demo",
                Output::new(
                    json!({"m": m, "n": n, "K0": k0, "N": big_n}),
                    json!({"x0": r.x0, "saddle": cv(&r.saddle_value), "quadrature": cv(&r.quad_value), "rel_err": r.rel_err}),
                    json!({"rel_err": r.rel_err}),
                    &["saddle point approximation"],
                ),
            )
        }
        Command::SpectralSum { file, k, big_k, g } => {
            let ds = ingest_csv(file, ctx)?;
            let w = match g {
                Some(g) => SpectralWeight::Gaussian(GaussianWeight::quadratic(*big_k, *g)?),
                None => SpectralWeight::Sharp(*big_k),
            };
            let v = spectral_sum(&ds, *k, &w, ctx)?;
            (
                "spectral-sum",
                Output::new(
                    json!({"file": file.display().to_string(), "k": k, "K": big_k, "G": g, "source": ds.source, "complete_to": ds.complete_to}),
                    json!({"value": fl(&v), "records": ds.records.len()}),
                    json!({"value": 0.0}),
                    &["spectral moment over eigendata"],
                ),
            )
        }
        Command::TraceRhs { m, w, ell_cutoff, u } => {
            let gw = weight(w, cfg)?;
            let uc = ComplexValue::from_f64(ctx.bits(), *u, 0.0);
            let r = trace_rhs(*m, &uc, &gw, *ell_cutoff, PSI_ALPHA, ctx)?;
            (
                "trace-rhs",
                Output::new(
                    json!({"m": m, "u": u, "weight": weight_json(&gw), "ell_cutoff": ell_cutoff}),
                    json!({"value": cv(&r.value), "terms": r.terms}),
                    json!({"value": r.error, "tail": r.tail_bound}),
                    &["Kloosterman side of the trace formula"],
                ),
            )
        }
        Command::VerifyAll { quick, only } => ("verify-all", verify_all(*quick, only, ctx)?),
    })
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {}", msg);
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_ARGS),
            };
        }
    };
    let cfg = match Config::from_env() {
        Ok(c) => c,
        Err(e) => return fail(EXIT_ARGS, &e),
    };
    let digits = cli.digits.unwrap_or(cfg.digits);
    let rel_tol = cli.rel_tol.or(cfg.rel_tol).unwrap_or(1e-12);
    let ctx = match PrecisionContext::new(digits, rel_tol, cfg.series_cutoff) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_ARGS, &e.to_string()),
    };
    let start = Instant::now();
    let (name, out) = match dispatch(&cli.command, &cfg, &ctx) {
        Ok(r) => r,
        Err(Failure::Args(m)) => return fail(EXIT_ARGS, &m),
        Err(Failure::Lib(e)) => {
            let code = if e.is_certification() {
                EXIT_CERT
            } else if e.is_data() {
                EXIT_DATA
            } else {
                EXIT_ARGS
            };
            return fail(code, &e.to_string());
        }
    };
    let wall_time = if cli.no_timing || !cfg.timing { Value::Null } else { json!(start.elapsed().as_secs_f64()) };
    let doc = json!({
        "command": name,
        "params": out.params,
        "values": out.values,
        "error_bounds": out.error_bounds,
        "provenance": out.provenance,
        "wall_time": wall_time,
        "precision": {"digits": ctx.digits, "rel_tol": ctx.rel_tol, "series_cutoff": ctx.series_cutoff},
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("JSON values serialize"));
    if out.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}
