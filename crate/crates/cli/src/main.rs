//! `circum`: reproducible experiments on circle-contained Julia sets, the
//! two-exponential family and growth of meromorphic functions.
//!
//! Exit codes: 0 success, 1 negative verdict or numerical failure, 2 invalid
//! input, 3 no repelling fixed point.

mod output;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use circum_core::dynamics::{
    chebyshev_conjugacy_check, interval_criterion, julia_sample, line_invariance_check, poincare_eval, render_pgm,
    BranchRule, JuliaSampleConfig, KoenigsChart, RenderWindow,
};
use circum_core::exceptional::{corollary_case_classifier, nonreal_zero_search, CaseVerdict, CircleReason, ExceptionalParams};
use circum_core::nevanlinna::{geometric_radii, order_estimate, QuadratureConfig};
use circum_core::sphere::{is_contained_in_circline, PointCloud, DEFAULT_CONTAINMENT_TOL};
use circum_core::{Complex, ExtendedComplex};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use output::{Run, SCHEMA};
use spec::{parse_complex, parse_function, parse_map, parse_pair, parse_resolution, parse_window, Function};

#[derive(Parser)]
#[command(name = "circum", version, about = "Julia sets in circles, exponential-sum zeros and growth estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the Julia set by backward iteration and fit a circline.
    Julia(JuliaArgs),
    /// Fit a circline to a point-cloud CSV (exit 0 contained, 1 not).
    Circlefit(CirclefitArgs),
    /// Case analysis and strip zero search for 1 - a - e^{iz} + a e^{i(cz+b)}.
    Exceptional(ExceptionalArgs),
    /// Poincaré function residuals at the preferred repelling fixed point.
    Poincare(PoincareArgs),
    /// Interval criterion and Chebyshev conjugacy for a real polynomial.
    Criterion(CriterionArgs),
    /// Ahlfors–Shimizu characteristic and order of growth.
    Order(OrderArgs),
    /// Escape-time image of a polynomial as a binary PGM.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BranchArg {
    UniformRandom,
    Cycling,
}

impl From<BranchArg> for BranchRule {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::UniformRandom => BranchRule::UniformRandom,
            BranchArg::Cycling => BranchRule::Cycling,
        }
    }
}

#[derive(Args, Serialize)]
struct JuliaArgs {
    /// Map spec: poly:..., rat:...|... or @file.json
    #[arg(long, allow_hyphen_values = true)]
    map: String,
    #[arg(long, default_value_t = 5000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    burn_in: usize,
    #[arg(long, value_enum, default_value = "uniform-random")]
    branch_rule: BranchArg,
    /// Containment tolerance on the sphere
    #[arg(long, default_value_t = DEFAULT_CONTAINMENT_TOL)]
    tol: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct CirclefitArgs {
    /// CSV of re,im[,w] or inf[,w] rows
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_CONTAINMENT_TOL)]
    tol: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ExceptionalArgs {
    #[arg(long, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    /// Complex literal, e.g. 2 or -1 or 1+2i
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    /// Real extent re_min,re_max of the search strips
    #[arg(long, allow_hyphen_values = true, default_value = "-10,10")]
    strip: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct PoincareArgs {
    #[arg(long, allow_hyphen_values = true)]
    map: String,
    #[arg(long, default_value_t = 40)]
    depth: usize,
    /// Points per side of the grid on [-1, 1]², restricted to |z| <= 1
    #[arg(long, default_value_t = 11)]
    grid: usize,
    /// Julia CSV for the line-invariance check
    #[arg(long)]
    julia: Option<PathBuf>,
    #[arg(long)]
    validity_radius: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct CriterionArgs {
    #[arg(long, allow_hyphen_values = true)]
    map: String,
    #[arg(long, allow_hyphen_values = true)]
    a: f64,
    #[arg(long, allow_hyphen_values = true)]
    b: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct OrderArgs {
    /// Map spec, expsum:c@mu,..., exceptional:c1,b1,c2,b2 or @file.json
    #[arg(long, allow_hyphen_values = true)]
    function: String,
    #[arg(long, default_value_t = 1.0)]
    r_min: f64,
    #[arg(long, default_value_t = 100.0)]
    r_max: f64,
    #[arg(long, default_value_t = 8)]
    n_radii: usize,
    #[arg(long, default_value_t = 1)]
    density: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct RenderArgs {
    #[arg(long, allow_hyphen_values = true)]
    map: String,
    /// re_min,re_max,im_min,im_max
    #[arg(long, allow_hyphen_values = true, default_value = "-2.5,2.5,-2.5,2.5")]
    window: String,
    /// N or WxH
    #[arg(long, default_value = "512")]
    resolution: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn exit_code(e: &circum_core::Error) -> u8 {
    use circum_core::Error::*;
    match e {
        NoRepellingFixedPoint => 3,
        InvalidInput(_) | Parse(_) | ZeroDenominator | CommonRoot { .. } | SingularMobius { .. } | DegreeTooLow { .. }
        | DegreeCap { .. } | DegenerateSum(_) | DegenerateCloud(_) => 2,
        _ => 1,
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        let code = err.downcast_ref::<circum_core::Error>().map_or(1, exit_code);
        Failure { code, err }
    }
}

impl From<circum_core::Error> for Failure {
    fn from(e: circum_core::Error) -> Self {
        Failure { code: exit_code(&e), err: e.into() }
    }
}

fn bad_input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure { code: 2, err: e.into() }
}

type Outcome = Result<u8, Failure>;

fn julia(a: &JuliaArgs) -> Outcome {
    let f = parse_map(&a.map).map_err(bad_input)?;
    let cfg = JuliaSampleConfig { n_points: a.n, burn_in: a.burn_in, seed: a.seed, branch_rule: a.branch_rule.into() };
    let sample = julia_sample(&f, &cfg)?;
    let (contained, fit) = is_contained_in_circline(&sample.cloud, a.tol)?;
    let mut run = Run::new("julia", a, Some(a.seed), &a.out)?;
    run.write("julia.csv", sample.cloud.to_csv().as_bytes())?;
    let report = json!({
        "schema": SCHEMA,
        "map": f,
        "start": sample.start,
        "skipped": sample.skipped,
        "n_points": sample.cloud.len(),
        "tol": a.tol,
        "contained": contained,
        "fit": fit,
    });
    let text = run.write_json("julia-fit.json", &report)?;
    run.finish()?;
    print!("{text}");
    Ok(0)
}

fn read_cloud(path: &PathBuf) -> Result<PointCloud, Failure> {
    let file = std::fs::File::open(path).with_context(|| format!("cannot open {}", path.display())).map_err(bad_input)?;
    PointCloud::read_csv(std::io::BufReader::new(file)).map_err(bad_input)
}

fn circlefit(a: &CirclefitArgs) -> Outcome {
    let cloud = read_cloud(&a.input)?;
    let (contained, fit) = is_contained_in_circline(&cloud, a.tol)?;
    let mut run = Run::new("circlefit", a, None, &a.out)?;
    let text = run.write_json("circlefit.json", &json!({"schema": SCHEMA, "tol": a.tol, "contained": contained, "fit": fit}))?;
    run.finish()?;
    print!("{text}");
    Ok(if contained { 0 } else { 1 })
}

fn exceptional(a: &ExceptionalArgs) -> Outcome {
    let value = parse_complex(&a.a).map_err(bad_input)?;
    let [x0, x1] = parse_pair(&a.strip, "strip").map_err(bad_input)?;
    let verdict = corollary_case_classifier(a.c, a.b, value).map_err(bad_input)?;
    let search = match verdict {
        CaseVerdict::MapsRealLineToCircle { reason: CircleReason::DegenerateFrequency } => None,
        _ => {
            let params = ExceptionalParams::canonical(a.c, a.b).map_err(bad_input)?;
            let g = params.preimage_equation(ExtendedComplex::Finite(value)).map_err(bad_input)?;
            Some((nonreal_zero_search(&g, x0, x1)?, g))
        }
    };
    let report = json!({
        "schema": SCHEMA,
        "c": a.c,
        "b": a.b,
        "a": value,
        "strip": [x0, x1],
        "classifier": verdict,
        "equation": search.as_ref().map(|s| &s.1),
        "search": search.as_ref().map(|s| &s.0),
        "nonreal_count": search.as_ref().map(|s| s.0.nonreal_count()),
        "all_real": search.as_ref().map(|s| s.0.nonreal_count() == 0),
    });
    let mut run = Run::new("exceptional", a, None, &a.out)?;
    let text = run.write_json("exceptional.json", &report)?;
    run.finish()?;
    print!("{text}");
    Ok(0)
}

#[derive(Serialize)]
struct PoincareRow {
    z: Complex,
    value: ExtendedComplex,
    gap: f64,
    functional_residual: f64,
}

fn poincare(a: &PoincareArgs) -> Outcome {
    let f = parse_map(&a.map).map_err(bad_input)?;
    let mut chart = KoenigsChart::new(&f)?.with_max_depth(a.depth);
    if let Some(r) = a.validity_radius {
        chart = chart.with_validity_radius(r).map_err(bad_input)?;
    }
    if a.grid == 0 {
        return Err(bad_input(anyhow!("grid must be positive")));
    }
    let step = if a.grid > 1 { 2.0 / (a.grid - 1) as f64 } else { 0.0 };
    let offset = if a.grid > 1 { -1.0 } else { 0.0 };
    let mut rows = Vec::new();
    let mut identity_residual: f64 = 0.0;
    for j in 0..a.grid {
        for i in 0..a.grid {
            let z = Complex::new(offset + step * i as f64, offset + step * j as f64);
            if z.norm() > 1.0 + 1e-12 {
                continue;
            }
            let (value, gap) = poincare_eval(&chart, z, a.depth)?;
            let (lhs, _) = poincare_eval(&chart, chart.lambda() * z, a.depth)?;
            if let Some(v) = value.finite() {
                identity_residual = identity_residual.max((v - chart.p() - z).norm());
            }
            rows.push(PoincareRow { z, value, gap, functional_residual: lhs.chordal(&f.eval(value)) });
        }
    }
    let line_check = match &a.julia {
        Some(path) => Some(line_invariance_check(&chart, &read_cloud(path)?)?),
        None => None,
    };
    let max = |g: fn(&PoincareRow) -> f64| rows.iter().map(g).fold(0.0, f64::max);
    let report = json!({
        "schema": SCHEMA,
        "chart": chart,
        "depth": a.depth,
        "max_functional_residual": max(|r| r.functional_residual),
        "max_gap": max(|r| r.gap),
        "identity_residual": (a.depth == 0).then_some(identity_residual),
        "line_check": line_check,
        "rows": rows,
    });
    let mut run = Run::new("poincare", a, None, &a.out)?;
    let text = run.write_json("poincare.json", &report)?;
    run.finish()?;
    print!("{text}");
    Ok(0)
}

fn criterion(a: &CriterionArgs) -> Outcome {
    let f = parse_map(&a.map).map_err(bad_input)?;
    let report = interval_criterion(&f, a.a, a.b)?;
    let chebyshev = if report.verdict { Some(chebyshev_conjugacy_check(&f, a.a, a.b)?) } else { None };
    let out = json!({
        "schema": SCHEMA,
        "map": f,
        "report": report,
        "chebyshev": chebyshev,
    });
    let mut run = Run::new("criterion", a, None, &a.out)?;
    let text = run.write_json("criterion.json", &out)?;
    run.finish()?;
    print!("{text}");
    Ok(0)
}

fn order(a: &OrderArgs) -> Outcome {
    let function = parse_function(&a.function).map_err(bad_input)?;
    let radii = geometric_radii(a.r_min, a.r_max, a.n_radii).map_err(bad_input)?;
    if a.density == 0 {
        return Err(bad_input(anyhow!("density must be positive")));
    }
    let cfg = QuadratureConfig { density: a.density, ..QuadratureConfig::default() };
    let profile = match &function {
        Function::Rational(f) => order_estimate(f, &radii, &cfg),
        Function::ExpSum(f) => order_estimate(f, &radii, &cfg),
        Function::Exceptional(f) => order_estimate(f, &radii, &cfg),
    }?;
    let mut csv = String::from("r,T\n");
    for (r, t) in profile.radii.iter().zip(&profile.t_values) {
        csv.push_str(&format!("{r:.16e},{t:.16e}\n"));
    }
    let report = json!({
        "schema": SCHEMA,
        "function": a.function,
        "order_defined": profile.order_estimate.is_some(),
        "profile": profile,
    });
    let mut run = Run::new("order", a, None, &a.out)?;
    let text = run.write_json("order.json", &report)?;
    run.write("order.csv", csv.as_bytes())?;
    run.finish()?;
    print!("{text}");
    Ok(0)
}

fn render(a: &RenderArgs) -> Outcome {
    let f = parse_map(&a.map).map_err(bad_input)?;
    let [re_min, re_max, im_min, im_max] = parse_window(&a.window).map_err(bad_input)?;
    let (width, height) = parse_resolution(&a.resolution).map_err(bad_input)?;
    let window = RenderWindow { re_min, re_max, im_min, im_max, width, height };
    let bytes = render_pgm(&f, &window)?;
    let mut run = Run::new("render", a, None, &a.out)?;
    let path = run.write("render.pgm", &bytes)?;
    run.finish()?;
    print!(
        "{}",
        output::to_json(&json!({
            "schema": SCHEMA,
            "path": path.display().to_string(),
            "sha256": hex::encode(Sha256::digest(&bytes)),
            "window": window,
        }))?
    );
    Ok(0)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("CIRCUM_THREADS") else { return Ok(()) };
    let n = v
        .trim()
        .parse::<usize>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| bad_input(anyhow!("CIRCUM_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure { code: 1, err: e.into() })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads().and_then(|()| match &cli.command {
        Command::Julia(a) => julia(a),
        Command::Circlefit(a) => circlefit(a),
        Command::Exceptional(a) => exceptional(a),
        Command::Poincare(a) => poincare(a),
        Command::Criterion(a) => criterion(a),
        Command::Order(a) => order(a),
        Command::Render(a) => render(a),
    });
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}
