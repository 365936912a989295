//! Command-line driver for the D-operator toolkit.
//!
//! Every run emits exactly one document to standard output — a JSON
//! report (command echo, resolved config, results, pass flag, wall
//! time) or, with `--csv`, a CSV table for the scan-family commands.
//! Exit codes: 0 pass, 1 a violation or failure was found, 2 error.
//! Identical arguments and seed produce byte-identical JSON except for
//! the wall-time field.

mod input;
mod output;

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use dfz_core::catalog::{CatalogFunction, CatalogName, ClassLabel};
use dfz_core::certify::{certify, GridSpec, VerdictStatus};
use dfz_core::operator::AnalyticInput;
use dfz_core::radius::{
    case_radius, first_zero_radius, positivity_radius, scan_circle,
    sharpness_probe_with_reference, verify_theorem, verify_theorem_at,
    ReferenceRelation, TheoremCase, TheoremReport, SUITE_MARGIN,
};
use dfz_core::schwarz::{make_member, make_u_member, p_from_f, SchwarzFunction};
use dfz_core::stream_seed;

use input::{load_series_file, parse_point, resolve_function, SeriesKind};
use output::{emit, CsvTable, Report};

#[derive(Parser)]
#[command(
    name = "dfz",
    version,
    about = "Evaluate, certify, and solve positivity radii for the operator \
             D(f;z) = 2zf'/f - zf''/f' on the unit disk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for sampled suites and probes
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = automatic)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Also write the emitted document to this file
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Emit a CSV table (scan, radius, verify-theorem, sharpness only)
    #[arg(long, global = true)]
    csv: bool,

    /// key=value file supplying defaults; explicit flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect the built-in function catalog
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Evaluate D(f; z) at one point through a chosen route
    Eval(EvalArgs),
    /// Certify a class membership on a polar grid
    Certify(CertifyArgs),
    /// Minimum of Re D over one circle
    Scan(ScanArgs),
    /// Positivity radius by radial bracketing and bisection
    Radius(RadiusArgs),
    /// Run the class positivity suites at their guaranteed radii
    VerifyTheorem(VerifyArgs),
    /// Search generated class members for small positivity radii
    Sharpness(SharpnessArgs),
    /// Construct class members from generators
    Family {
        #[command(subcommand)]
        action: FamilyAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// All catalog functions with formulas and membership facts
    List,
    /// One catalog function in detail
    Show {
        /// Catalog name: k, f1, f2, f3
        #[arg(long)]
        function: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    /// Closed form (catalog functions)
    Closed,
    /// Raw coefficient series of f (trusted to |z| <= 0.7)
    Series,
    /// Logarithmic-derivative series p = zf'/f
    P,
    /// Defect generator phi (exact rational evaluation)
    Phi,
}

impl Route {
    fn token(self) -> &'static str {
        match self {
            Route::Closed => "closed",
            Route::Series => "series",
            Route::P => "p",
            Route::Phi => "phi",
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Catalog name, coefficient file, or generator spec (phi route)
    #[arg(long)]
    function: String,
    #[arg(long, value_enum)]
    route: Route,
    /// Evaluation point as re,im
    #[arg(long)]
    z: String,
    /// Truncation order for catalog-derived series routes
    #[arg(long)]
    order: Option<usize>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Catalog name, coefficient file, or generator spec
    #[arg(long)]
    function: String,
    /// Class token: S*, S*(a), K, U, G, M(a)
    #[arg(long)]
    class: String,
    /// Order/blend parameter, overriding the one in the class token
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated grid radii (default 0.1..0.9, 0.95, 0.99)
    #[arg(long)]
    grid_radii: Option<String>,
    /// Angles per circle (default 512)
    #[arg(long)]
    angles: Option<usize>,
    /// Grid ceiling (default 0.99)
    #[arg(long)]
    max_radius: Option<f64>,
}

#[derive(Args)]
struct ScanArgs {
    /// Catalog name, coefficient file, or generator spec
    #[arg(long)]
    function: String,
    #[arg(long)]
    radius: f64,
    /// Coarse angles before refinement (default 1024)
    #[arg(long)]
    angles: Option<usize>,
}

#[derive(Args)]
struct RadiusArgs {
    /// Catalog name, coefficient file, or generator spec
    #[arg(long)]
    function: String,
    /// Bisection tolerance in the radius (default 1e-8)
    #[arg(long)]
    tol: Option<f64>,
    /// Reference radius to relate the result to
    #[arg(long)]
    reference: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Case token i..v, or "all" for the full battery
    #[arg(long, default_value = "all")]
    case: String,
    /// Members sampled per generated-family case (default 100)
    #[arg(long)]
    samples: Option<usize>,
    /// Testing aid: pretend the case's guaranteed radius is this value
    #[arg(long, hide = true)]
    radius_override: Option<f64>,
}

#[derive(Args)]
struct SharpnessArgs {
    /// Case token i..iv (the generated families)
    #[arg(long)]
    case: String,
    /// Member-probe budget (default 2000)
    #[arg(long)]
    budget: Option<usize>,
    /// Testing aid: compare against this radius instead of the real one
    #[arg(long, hide = true)]
    reference: Option<f64>,
}

#[derive(Subcommand)]
enum FamilyAction {
    /// Build one member from a generator and print its coefficients
    Make {
        /// Class token: S*, S*(a), G (omega generator) or U (phi generator)
        #[arg(long)]
        class: String,
        /// Generator spec: const:c | monomial:zeta,m | blaschke:[a1,..],zeta,premul_z:<bool>
        #[arg(long)]
        omega: String,
        /// Free z-coefficient of z/f (defect class only), as re,im
        #[arg(long)]
        u1: Option<String>,
        /// Truncation order (default 64)
        #[arg(long)]
        order: Option<usize>,
    },
}

/// key=value defaults loaded from --config; flags always win.
struct Settings(std::collections::BTreeMap<String, String>);

impl Settings {
    fn load(path: Option<&PathBuf>) -> Result<Self> {
        let mut map = std::collections::BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config file {}", p.display()))?;
            for (ln, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| anyhow!("config line {}: expected key=value", ln + 1))?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Self(map))
    }

    fn pick<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.0.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|e| anyhow!("config key {key}={raw}: {e}")),
            None => Ok(default),
        }
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let started = Instant::now();
    match run(cli, argv.join(" "), started) {
        Ok(pass) => {
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let doc = json!({ "error": { "message": format!("{e:#}") } });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            2
        }
    }
}

fn run(cli: Cli, command_echo: String, started: Instant) -> Result<bool> {
    let settings = Settings::load(cli.config.as_ref())?;
    let seed = settings.pick(cli.seed, "seed", 42)?;
    let threads = settings.pick(cli.threads, "threads", 0)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }

    let (config, results, pass, csv) = dispatch(&cli.command, &settings, seed)?;
    let mut config = config;
    config["seed"] = json!(seed);
    config["threads"] = json!(threads);
    let report = Report {
        command: command_echo,
        config,
        results,
        pass,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    emit(&report, csv, cli.csv, cli.out.as_deref())?;
    Ok(pass)
}

type CommandOutput = (Value, Value, bool, Option<CsvTable>);

fn dispatch(command: &Command, settings: &Settings, seed: u64) -> Result<CommandOutput> {
    match command {
        Command::Catalog { action } => run_catalog(action),
        Command::Eval(args) => run_eval(args, settings),
        Command::Certify(args) => run_certify(args, settings),
        Command::Scan(args) => run_scan(args, settings),
        Command::Radius(args) => run_radius(args, settings),
        Command::VerifyTheorem(args) => run_verify(args, settings, seed),
        Command::Sharpness(args) => run_sharpness(args, settings, seed),
        Command::Family { action } => run_family(action, settings),
    }
}

fn fact_json(f: &dfz_core::catalog::MembershipFact) -> Value {
    json!({
        "class": f.label.token(),
        "status": f.status.token(),
        "note": f.note,
    })
}

fn run_catalog(action: &CatalogAction) -> Result<CommandOutput> {
    match action {
        CatalogAction::List => {
            let entries: Vec<Value> = CatalogName::all()
                .into_iter()
                .map(|n| {
                    let cf = CatalogFunction::new(n);
                    json!({
                        "name": n.token(),
                        "formula": n.formula(),
                        "memberships": cf.memberships().iter().map(fact_json).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok((json!({}), json!({ "functions": entries }), true, None))
        }
        CatalogAction::Show { function } => {
            let name = CatalogName::parse(function)
                .ok_or_else(|| anyhow!("unknown catalog function {function:?}"))?;
            let cf = CatalogFunction::new(name);
            let head: Vec<[f64; 2]> = (0..8)
                .map(|k| {
                    let c = cf.series().coeff(k);
                    [c.re, c.im]
                })
                .collect();
            let results = json!({
                "name": name.token(),
                "formula": name.formula(),
                "memberships": cf.memberships().iter().map(fact_json).collect::<Vec<_>>(),
                "series_head": head,
            });
            Ok((json!({"function": name.token()}), results, true, None))
        }
    }
}

/// Build the input for one evaluation route.
fn route_input(spec: &str, route: Route, order: usize) -> Result<AnalyticInput> {
    match route {
        Route::Closed => {
            let name = CatalogName::parse(spec).ok_or_else(|| {
                anyhow!("the closed route needs a catalog name, got {spec:?}")
            })?;
            Ok(AnalyticInput::catalog(CatalogFunction::new(name)))
        }
        Route::Series => {
            if let Some(name) = CatalogName::parse(spec) {
                let f = CatalogFunction::with_order(name, order).series().clone();
                return Ok(AnalyticInput::from_f_series(f)?);
            }
            let (kind, series) = load_series_file(spec.as_ref())?;
            if kind == SeriesKind::P {
                bail!("the series route needs f coefficients, the file holds p");
            }
            Ok(AnalyticInput::from_f_series(series)?)
        }
        Route::P => {
            if let Some(name) = CatalogName::parse(spec) {
                let f = CatalogFunction::with_order(name, order).series().clone();
                let p = p_from_f(&f)?;
                return Ok(AnalyticInput::from_p_series(p)?);
            }
            let (kind, series) = load_series_file(spec.as_ref())?;
            if kind == SeriesKind::F {
                bail!("the p route needs p coefficients, the file holds f");
            }
            Ok(AnalyticInput::from_p_series(series)?)
        }
        Route::Phi => {
            let phi = SchwarzFunction::parse_spec(spec)?;
            Ok(AnalyticInput::from_phi(phi))
        }
    }
}

fn run_eval(args: &EvalArgs, settings: &Settings) -> Result<CommandOutput> {
    let order = settings.pick(args.order, "order", 128)?;
    let z = parse_point(&args.z)?;
    let input = route_input(&args.function, args.route, order)?;
    let v = input.eval_d(z)?;
    let config = json!({
        "function": args.function,
        "route": args.route.token(),
        "z": [z.re, z.im],
        "order": order,
    });
    let results = json!({
        "value_re": v.re,
        "value_im": v.im,
        "route": args.route.token(),
    });
    Ok((config, results, true, None))
}

fn parse_class(token: &str, alpha: Option<f64>) -> Result<ClassLabel> {
    let label = ClassLabel::parse(token)
        .ok_or_else(|| anyhow!("unknown class token {token:?}"))?;
    match alpha {
        None => Ok(label),
        Some(a) => match label {
            ClassLabel::Starlike | ClassLabel::StarlikeOrder(_) => {
                Ok(ClassLabel::StarlikeOrder(a))
            }
            ClassLabel::MAlpha(_) => Ok(ClassLabel::MAlpha(a)),
            _ => bail!("--alpha applies to the starlike-order and blend classes only"),
        },
    }
}

fn run_certify(args: &CertifyArgs, settings: &Settings) -> Result<CommandOutput> {
    let label = parse_class(&args.class, args.alpha)?;
    let input = resolve_function(&args.function)?;
    let angles = settings.pick(args.angles, "angles", 512)?;
    let max_radius = settings.pick(args.max_radius, "max_radius", 0.99)?;
    let grid = match &args.grid_radii {
        None => GridSpec::new(
            GridSpec::default_grid().radii,
            angles,
            max_radius,
        )?,
        Some(list) => {
            let radii: Vec<f64> = list
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| anyhow!("radius {t:?}: {e}")))
                .collect::<Result<_>>()?;
            GridSpec::new(radii, angles, max_radius)?
        }
    };
    let verdict = certify(&input, label, &grid)?;
    let pass = verdict.status == VerdictStatus::GridPass;
    let config = json!({
        "function": args.function,
        "class": label.token(),
        "angles": angles,
        "max_radius": max_radius,
    });
    Ok((config, serde_json::to_value(&verdict)?, pass, None))
}

fn fmt_cell(v: f64) -> String {
    format!("{v}")
}

fn run_scan(args: &ScanArgs, settings: &Settings) -> Result<CommandOutput> {
    let angles = settings.pick(args.angles, "angles", 1024)?;
    let input = resolve_function(&args.function)?;
    let scan = scan_circle(&input, args.radius, angles)?;
    let pass = scan.min_value > 0.0;
    let config = json!({
        "function": args.function,
        "radius": args.radius,
        "angles": angles,
    });
    let csv = CsvTable {
        rows: vec![[
            "-".into(),
            input.describe(),
            fmt_cell(scan.radius),
            fmt_cell(scan.min_value),
            fmt_cell(scan.argmin_angle),
        ]],
    };
    Ok((config, serde_json::to_value(scan)?, pass, Some(csv)))
}

fn run_radius(args: &RadiusArgs, settings: &Settings) -> Result<CommandOutput> {
    let tol = settings.pick(args.tol, "tol", 1e-8)?;
    let input = resolve_function(&args.function)?;
    let report = positivity_radius(&input, tol, args.reference)?;
    let pass = report.relation == ReferenceRelation::NoFailureFound;
    let config = json!({
        "function": args.function,
        "tol": tol,
        "reference": args.reference,
    });
    let csv = CsvTable {
        rows: vec![[
            "-".into(),
            report.function_id.clone(),
            fmt_cell(report.positivity_radius),
            fmt_cell(report.residual),
            String::new(),
        ]],
    };
    Ok((config, serde_json::to_value(report)?, pass, Some(csv)))
}

fn member_rows(report: &TheoremReport, rows: &mut Vec<[String; 5]>) {
    for m in &report.members {
        rows.push([
            report.case.token().to_string(),
            m.member_id.clone(),
            fmt_cell(report.radius),
            m.min_value.map(fmt_cell).unwrap_or_else(|| "error".into()),
            m.argmin_angle.map(fmt_cell).unwrap_or_default(),
        ]);
    }
}

fn run_verify(args: &VerifyArgs, settings: &Settings, seed: u64) -> Result<CommandOutput> {
    let samples = settings.pick(args.samples, "samples", 100)?;
    if samples == 0 {
        bail!("--samples must be at least 1");
    }
    let config = json!({
        "case": args.case,
        "samples": samples,
        "radius_override": args.radius_override,
    });

    if args.case == "all" {
        if args.radius_override.is_some() {
            bail!("--radius-override needs a single named case");
        }
        return run_verify_all(samples, seed, config);
    }

    let case = TheoremCase::parse(&args.case)
        .ok_or_else(|| anyhow!("unknown case {:?} (expected i..v or all)", args.case))?;
    let report = match args.radius_override {
        None => verify_theorem(case, samples, seed),
        Some(r) => {
            if !(r > SUITE_MARGIN && r < 1.0) {
                bail!("override radius must lie in ({SUITE_MARGIN}, 1)");
            }
            verify_theorem_at(case, r - SUITE_MARGIN, samples, seed)
        }
    };
    let pass = report.pass;
    let mut rows = Vec::new();
    member_rows(&report, &mut rows);
    Ok((config, serde_json::to_value(report)?, pass, Some(CsvTable { rows })))
}

/// The full battery: all five cases, both counterexample reproductions,
/// and the cross-route oracle agreement.
fn run_verify_all(samples: usize, seed: u64, config: Value) -> Result<CommandOutput> {
    let mut failures: Vec<String> = Vec::new();
    let mut rows = Vec::new();

    let mut cases = Vec::new();
    for case in TheoremCase::all() {
        let report = verify_theorem(case, samples, seed);
        if !report.pass {
            failures.push(format!(
                "case {case}: min {} at {}",
                report.suite_min, report.worst_member
            ));
        }
        member_rows(&report, &mut rows);
        cases.push(report);
    }

    // counterexample reproductions: thresholds and scan signs
    let f2 = AnalyticInput::catalog(CatalogFunction::new(CatalogName::F2));
    let f3 = AnalyticInput::catalog(CatalogFunction::new(CatalogName::F3));
    let t2 = first_zero_radius(CatalogName::F2);
    let t3 = first_zero_radius(CatalogName::F3);
    let t2_want = 1.0 - (-2.0_f64).exp();
    let t3_want = std::f64::consts::FRAC_1_SQRT_2;
    let f2_087 = scan_circle(&f2, 0.87, 1024)?.min_value;
    let f2_024 = scan_circle(&f2, 0.24, 1024)?.min_value;
    let f3_075 = scan_circle(&f3, 0.75, 4096)?.min_value;
    let thresholds_ok = matches!(t2, Some(r) if (r - t2_want).abs() < 1e-7)
        && matches!(t3, Some(r) if (r - t3_want).abs() < 1e-7);
    let scans_ok = f2_087 < 0.0 && f2_024 > 0.0 && f3_075 < 0.0;
    if !thresholds_ok {
        failures.push(format!("counterexample thresholds off: {t2:?}, {t3:?}"));
    }
    if !scans_ok {
        failures.push(format!(
            "counterexample scans off: {f2_087}, {f2_024}, {f3_075}"
        ));
    }
    let counterexamples = json!({
        "f2_threshold": t2,
        "f2_threshold_expected": t2_want,
        "f3_threshold": t3,
        "f3_threshold_expected": t3_want,
        "f2_scan_at_0.87_min": f2_087,
        "f2_scan_at_0.24_min": f2_024,
        "f3_scan_at_0.75_min": f3_075,
        "pass": thresholds_ok && scans_ok,
    });

    // cross-route oracle: closed vs raw coefficients vs p-identity
    let mut max_dev = 0.0_f64;
    for (fi, name) in CatalogName::all().into_iter().enumerate() {
        let closed = AnalyticInput::catalog(CatalogFunction::new(name));
        let f = CatalogFunction::with_order(name, 128).series().clone();
        let p = p_from_f(&f)?;
        let via_f = AnalyticInput::from_f_series(f)?;
        let via_p = AnalyticInput::from_p_series(p)?;
        use rand::{Rng, SeedableRng};
        let mut rng =
            rand_chacha::ChaCha8Rng::seed_from_u64(stream_seed(seed, 100 + fi as u64));
        for _ in 0..50 {
            let r = 0.7 * rng.random::<f64>().sqrt();
            let th = std::f64::consts::TAU * rng.random::<f64>();
            let z = Complex64::from_polar(r, th);
            let d0 = closed.eval_d(z)?;
            let d1 = via_f.eval_d(z)?;
            let d2 = via_p.eval_d(z)?;
            max_dev = max_dev
                .max((d0 - d1).norm())
                .max((d0 - d2).norm())
                .max((d1 - d2).norm());
        }
    }
    let oracle_ok = max_dev < 1e-8;
    if !oracle_ok {
        failures.push(format!("route disagreement {max_dev:e}"));
    }
    let oracle = json!({
        "max_route_deviation": max_dev,
        "points_per_function": 50,
        "pass": oracle_ok,
    });

    let pass = failures.is_empty();
    let results = json!({
        "cases": cases,
        "counterexamples": counterexamples,
        "oracle": oracle,
        "failures": failures,
    });
    Ok((config, results, pass, Some(CsvTable { rows })))
}

fn run_sharpness(args: &SharpnessArgs, settings: &Settings, seed: u64) -> Result<CommandOutput> {
    let case = TheoremCase::parse(&args.case)
        .ok_or_else(|| anyhow!("unknown case {:?} (expected i..iv)", args.case))?;
    let budget = settings.pick(args.budget, "budget", 2000)?;
    let reference = args.reference.unwrap_or_else(|| case_radius(case));
    let report = sharpness_probe_with_reference(case, budget, seed, reference)?;
    let pass = !report.alert;
    let config = json!({
        "case": case.token(),
        "budget": budget,
        "reference": reference,
    });
    let csv = CsvTable {
        rows: vec![[
            case.token().to_string(),
            report.best_generator.clone(),
            fmt_cell(report.best_radius),
            fmt_cell(report.gap),
            String::new(),
        ]],
    };
    Ok((config, serde_json::to_value(report)?, pass, Some(csv)))
}

fn run_family(action: &FamilyAction, settings: &Settings) -> Result<CommandOutput> {
    let FamilyAction::Make { class, omega, u1, order } = action;
    let label = parse_class(class, None)?;
    let generator = SchwarzFunction::parse_spec(omega)?;
    let order = settings.pick(*order, "order", 64)?;
    let member = match label {
        ClassLabel::U => {
            let u1 = match u1 {
                None => Complex64::ZERO,
                Some(s) => parse_point(s)?,
            };
            make_u_member(&generator, u1, order)?
        }
        ClassLabel::Starlike | ClassLabel::StarlikeOrder(_) | ClassLabel::G => {
            if u1.is_some() {
                bail!("--u1 applies to the defect class only");
            }
            make_member(label, &generator, order)?
        }
        other => bail!("no generator family for class {other}"),
    };
    let coeffs = |s: &dfz_core::series::TaylorSeries| -> Vec<[f64; 2]> {
        (0..16)
            .map(|k| {
                let c = s.coeff(k);
                [c.re, c.im]
            })
            .collect()
    };
    let config = json!({
        "class": label.token(),
        "omega": omega,
        "order": order,
    });
    let results = json!({
        "class": member.class_label.token(),
        "generator": member.generator.spec_string(),
        "u1": [member.u1.re, member.u1.im],
        "f_coefficients": coeffs(&member.f_series),
        "p_coefficients": coeffs(&member.p_series),
    });
    Ok((config, results, true, None))
}
