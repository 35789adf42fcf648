use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hlml::experiment::{run_experiment, write_artifacts, ExperimentSpec};
use hlml::massdensity::{mass_density_region, MassDistribution};
use hlml::reports::{collect_reports, summary_csv, summary_json};
use hlml_core::covering::{greedy_dilation_select, greedy_vitali, verify_cover, GaugedFamily};
use hlml_core::instance::Instance;
use hlml_core::io::{self, AnyFamily, AnyInstance};
use hlml_core::maximal::maximal_function;
use hlml_core::norm::NormEvaluator;
use hlml_core::numeric::{parse_rational, Rational, Scalar};
use hlml_core::search::{empirical_hl_lower_bound_with, SearchParams};

/// Maximal-inequality toolkit: verify constants, run covers, decompose
/// complements and estimate mass-density regions.
#[derive(Parser)]
#[command(name = "hlml", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment spec: build the geometry, verify its constant.
    Run(RunArgs),
    /// Select a disjoint subfamily covering a gauged family.
    Cover(CoverArgs),
    /// Whitney-decompose the window part away from a closed set.
    Whitney(WhitneyArgs),
    /// Searched lower bound and certified upper bounds for an instance.
    Hlc(HlcArgs),
    /// Volume of the region where a cube can capture a mass fraction.
    Massdensity(MassArgs),
    /// Aggregate run reports under a directory.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment spec JSON file.
    spec: PathBuf,
    /// Output directory for report.json / profile.csv / instance.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoverArgs {
    /// Gauged family JSON file.
    family: PathBuf,
    /// Override the family's dilation factor λ.
    #[arg(long)]
    lambda: Option<f64>,
    /// Output file for the selection JSON (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WhitneyArgs {
    /// Closed-set JSON file.
    closedset: PathBuf,
    /// Window corners: n lows then n highs, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    window: Vec<String>,
    /// Scale range: min,max.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    scales: Vec<i32>,
    /// Output directory for cubes.json and cubes.csv (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HlcArgs {
    /// Instance JSON file.
    instance: PathBuf,
    /// Random set functions for the lower-bound search.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Coordinate-ascent steps.
    #[arg(long, default_value_t = 100)]
    ascent: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact-norm family-size cap.
    #[arg(long, default_value_t = 96)]
    cap: usize,
    /// Output directory for report.json and profile.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MassArgs {
    /// Particle list JSON file.
    particles: PathBuf,
    /// Mass fraction in (0,1); overrides the file.
    #[arg(long)]
    alpha: Option<f64>,
    /// Cube side in meters; overrides the file.
    #[arg(long)]
    side: Option<f64>,
    /// Sampling resolution.
    #[arg(long, default_value_t = 0.05)]
    res: f64,
    /// Ignore masses and count particles instead.
    #[arg(long)]
    count_mode: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Directory holding run outputs.
    dir: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Cover(args) => cmd_cover(args),
        Command::Whitney(args) => cmd_whitney(args),
        Command::Hlc(args) => cmd_hlc(args),
        Command::Massdensity(args) => cmd_mass(args),
        Command::Report(args) => cmd_report(args),
    }
}

fn cmd_run(args: RunArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.spec)
        .with_context(|| format!("reading {}", args.spec.display()))?;
    let spec = ExperimentSpec::from_json(&text)?;
    let outcome = run_experiment(&spec)?;
    if let Some(out) = &args.out {
        write_artifacts(out, &outcome)?;
        println!(
            "{}: wrote report.json and profile.csv under {}",
            if outcome.passed { "PASS" } else { "FAIL" },
            out.display()
        );
    } else {
        println!("{}", serde_json::to_string_pretty(&outcome.report)?);
    }
    Ok(if outcome.passed { 0 } else { 2 })
}

fn cmd_cover(args: CoverArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.family)
        .with_context(|| format!("reading {}", args.family.display()))?;
    let family = io::family_from_json(&text, args.lambda)?;
    let (value, pass) = match &family {
        AnyFamily::Exact(f) => cover_one(f)?,
        AnyFamily::Float(f) => cover_one(f)?,
    };
    let rendered = serde_json::to_string_pretty(&value)?;
    match &args.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => println!("{rendered}"),
    }
    Ok(if pass { 0 } else { 2 })
}

fn cover_one<S: Scalar>(family: &GaugedFamily<S>) -> anyhow::Result<(serde_json::Value, bool)> {
    let selection = if family.has_explicit_dilation() {
        greedy_vitali(family)?
    } else {
        greedy_dilation_select(family)?
    };
    let verdict = verify_cover(family, &selection);
    let pass = verdict.pass();
    Ok((io::selection_to_json(family, &selection, &verdict), pass))
}

fn cmd_whitney(args: WhitneyArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.closedset)
        .with_context(|| format!("reading {}", args.closedset.display()))?;
    let spec = io::closed_set_from_json(&text)?;
    if args.window.len() != 2 * spec.dim() {
        bail!(
            "--window needs {} comma-separated coordinates (lows then highs)",
            2 * spec.dim()
        );
    }
    if args.scales.len() != 2 {
        bail!("--scales needs exactly min,max");
    }
    let coords: Vec<Rational> = args
        .window
        .iter()
        .map(|s| parse_coordinate(s))
        .collect::<anyhow::Result<_>>()?;
    let (lo, hi) = coords.split_at(spec.dim());
    let window = hlml_core::euclid::RatBox::new(lo.to_vec(), hi.to_vec())?;
    let cover =
        hlml_core::euclid::whitney_decompose(&spec, &window, args.scales[0], args.scales[1])?;
    let cubes_json = io::whitney_to_json(&cover);
    let csv = io::whitney_to_csv(&cover, &spec);
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("cubes.json"), serde_json::to_string_pretty(&cubes_json)?)?;
            std::fs::write(dir.join("cubes.csv"), csv)?;
            println!("wrote {} cubes under {}", cover.cubes.len(), dir.display());
        }
        None => println!("{}", serde_json::to_string_pretty(&cubes_json)?),
    }
    Ok(0)
}

fn parse_coordinate(s: &str) -> anyhow::Result<Rational> {
    if let Ok(r) = parse_rational(s) {
        return Ok(r);
    }
    let f: f64 = s.parse().with_context(|| format!("bad coordinate {s:?}"))?;
    Rational::from_json(&json!(f)).map_err(Into::into)
}

fn cmd_hlc(args: HlcArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.instance)
        .with_context(|| format!("reading {}", args.instance.display()))?;
    let params = SearchParams {
        random_trials: args.trials,
        ascent_steps: args.ascent,
        seed: args.seed,
        norm_cap: args.cap,
    };
    let (report, profile_csv, consistent) = match io::instance_from_json(&text)? {
        AnyInstance::Exact(inst) => hlc_one(&inst, &params)?,
        AnyInstance::Float(inst) => hlc_one(&inst, &params)?,
    };
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
            std::fs::write(dir.join("profile.csv"), profile_csv)?;
            println!(
                "lower bound {} ≤ certified {} : {}",
                report["lower_bound"],
                report["certified_c"],
                if consistent { "ok" } else { "VIOLATED" }
            );
        }
        None => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(if consistent { 0 } else { 2 })
}

fn hlc_one<S: Scalar>(
    inst: &Instance<S>,
    params: &SearchParams,
) -> anyhow::Result<(serde_json::Value, String, bool)> {
    let eval = NormEvaluator::new(inst, params.norm_cap);
    let lower = empirical_hl_lower_bound_with(inst, &eval, params)?;
    let hull_c = hlml_core::certify::hl4_constant(inst, &S::from_int(2))?;
    let dyadic = hlml_core::certify::check_dyadic_conditions(inst);
    let certified = if dyadic.certifies_c1() && S::one() < hull_c {
        S::one()
    } else {
        hull_c.clone()
    };
    let consistent = lower.best_ratio.le_within(&certified, inst.tol().max(1e-12));
    let profile = maximal_function(inst, &lower.best_f)?;
    let report = json!({
        "points": inst.n_points(),
        "sets": inst.n_sets(),
        "lower_bound": lower.best_ratio.to_json(),
        "lower_bound_strategy": lower.strategy,
        "sweep_ratio": lower.sweep_ratio.to_json(),
        "searched_random": lower.searched_random,
        "hull_certificate": hull_c.to_json(),
        "dyadic_certifies_c1": dyadic.certifies_c1(),
        "certified_c": certified.to_json(),
        "consistent": consistent,
        "passed": consistent,
        "best_f": io::setfunction_to_json(inst, &lower.best_f),
    });
    Ok((report, io::profile_to_csv(inst, &profile), consistent))
}

fn cmd_mass(args: MassArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.particles)
        .with_context(|| format!("reading {}", args.particles.display()))?;
    let mut dist: MassDistribution =
        serde_json::from_str(&text).with_context(|| "parsing particle list")?;
    if let Some(alpha) = args.alpha {
        dist.alpha = alpha;
    }
    if let Some(side) = args.side {
        dist.side = side;
    }
    if args.count_mode {
        for p in &mut dist.particles {
            p.m = 1.0;
        }
    }
    let est = mass_density_region(&dist, args.res)?;
    println!("{}", serde_json::to_string_pretty(&est)?);
    Ok(if est.volume <= est.bound { 0 } else { 2 })
}

fn cmd_report(args: ReportArgs) -> anyhow::Result<i32> {
    let rows = collect_reports(&args.dir)?;
    if rows.is_empty() {
        println!("no reports under {}", args.dir.display());
        return Ok(0);
    }
    for row in &rows {
        println!(
            "{} {} — {}",
            if row.passed == Some(true) { "PASS" } else { "FAIL" },
            row.path.display(),
            row.summary
        );
    }
    let summary = summary_json(&rows);
    std::fs::write(args.dir.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    std::fs::write(args.dir.join("summary.csv"), summary_csv(&rows))?;
    let failed = rows.iter().any(|r| r.passed == Some(false));
    println!(
        "{} reports, {} passed, {} failed",
        summary["reports"], summary["passed"], summary["failed"]
    );
    Ok(if failed { 2 } else { 0 })
}
