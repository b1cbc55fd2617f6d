use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use hcf_core::estimator::{
    build_all_regions, build_grid, estimate_coeffs, fit_exponential, region_counts, BuildMethod,
    CoeffTable, DensityGrids, FitResult, Smoothing,
};
use hcf_core::parse::{parse_complex, parse_complex_exact};
use hcf_core::regions::{mark_digits, parse_word, successor_set};
use hcf_core::validate::{self, Suite, ValidateOptions};
use hcf_core::{
    check_approximation, classify, convergents, default_seed, expand, format_gaussian,
    BigRational, Classification, Complex, Error, FillStrategy, NatExtState, PixelGrid,
    QRecurrence, RegionId, Result,
};
use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::config::{check_k, check_l, Base, Count, KList, Settings};
use crate::heatmap::{self, Format};
use crate::{
    BuildArgs, Cli, Command, FitArgs, FreqArgs, GridAction, PlotArgs, TableArgs, ValidateArgs,
};

/// 2 for broken internal invariants, 1 for bad input or configuration.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::OrbitTerminated { .. } | Error::SingularJet | Error::SingularKernel { .. } => 2,
        _ => 1,
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let settings = Settings::load(cli.config.as_deref())?;
    init_workers(&settings, cli.workers)?;
    match cli.command {
        Command::Expand { z, steps, json } => cmd_expand(&z, steps, json),
        Command::Classify { z } => cmd_classify(&z),
        Command::Admissible { word } => cmd_admissible(&word),
        Command::Grid { action } => cmd_grid(&settings, action),
        Command::Table(args) => cmd_table(&settings, args),
        Command::Fit(args) => cmd_fit(&settings, args),
        Command::Plot(args) => cmd_plot(&settings, args),
        Command::Validate(args) => cmd_validate(&settings, args),
        Command::Freq(args) => cmd_freq(&settings, args),
    }
}

/// `--workers`, then `HCF_WORKERS`, then the config file, then one per core.
fn init_workers(settings: &Settings, flag: Option<usize>) -> Result<()> {
    let env = match std::env::var("HCF_WORKERS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("HCF_WORKERS: bad worker count {v:?}")))?,
        ),
        Err(_) => None,
    };
    let Some(n) = settings.get::<usize>("workers", flag.or(env))? else {
        return Ok(());
    };
    if n == 0 {
        return Err(Error::Config("worker count must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

fn ok() -> Result<ExitCode> {
    Ok(ExitCode::SUCCESS)
}

fn region_arg(settings: &Settings, flag: Option<String>) -> Result<RegionId> {
    settings.get_or("region", flag, "1,1".to_string())?.parse()
}

fn seed_arg(settings: &Settings, flag: Option<String>) -> Result<NatExtState<f64>> {
    match settings.get::<String>("seed", flag)? {
        Some(s) => Ok(NatExtState::new(parse_complex(&s)?, Complex::new(0.0, 0.0))),
        None => Ok(default_seed()),
    }
}

struct Build {
    method: BuildMethod,
    fill: FillStrategy,
    iters: Option<u64>,
    seed: NatExtState<f64>,
}

/// The boundary variant only exists for `V_{1,1}`; other regions default to
/// rotated orbit sampling.
fn build_settings(settings: &Settings, args: BuildArgs, region: RegionId) -> Result<Build> {
    let default_method = if region == RegionId::new(1, 1)? {
        BuildMethod::Boundary
    } else {
        BuildMethod::OrbitRotated
    };
    let method = match settings.get::<String>("method", args.method)? {
        Some(m) => m.parse()?,
        None => default_method,
    };
    let fill = match settings.get::<String>("fill", args.fill)? {
        Some(f) => f.parse()?,
        None => FillStrategy::default(),
    };
    Ok(Build {
        method,
        fill,
        iters: settings.get::<Count>("iters", args.iters)?.map(|c| c.0),
        seed: seed_arg(settings, args.seed)?,
    })
}

fn region_file(r: RegionId) -> String {
    format!("V{}{}.grid", r.k(), r.l())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct ExpandReport {
    z: String,
    digits: Vec<String>,
    marked: Vec<String>,
    convergents: Vec<ConvergentOut>,
    error_bound: Vec<bool>,
    growth: Vec<Option<bool>>,
    terminated: bool,
    pass: bool,
}

#[derive(Serialize)]
struct ConvergentOut {
    p: String,
    q: String,
}

fn cmd_expand(literal: &str, steps: usize, json: bool) -> Result<ExitCode> {
    let z = parse_complex_exact(literal)?;
    let expansion = expand::<BigRational>(&z, steps)?;
    let digits: Vec<_> = expansion.iter().map(|s| s.digit).collect();
    if digits.is_empty() {
        if json {
            write_json(None, &serde_json::json!({ "z": literal.trim(), "digits": [], "terminated": true, "pass": true }))?;
        } else {
            println!("0 digits, exact");
        }
        return ok();
    }
    let convs = convergents::<BigInt>(&digits)?;
    let checks = check_approximation(&z, &expansion, &convs)?;
    // Marks are informational; an unmarkable digit shows as `?`.
    let marked: Vec<String> = match mark_digits(&digits) {
        Ok(ds) => ds.iter().map(|d| d.to_string()).collect(),
        Err(_) => vec!["?".to_string(); digits.len()],
    };
    // Fewer steps than asked, or a zero final remainder, means z is rational.
    let terminated = expansion.len() < steps
        || expansion
            .last()
            .is_some_and(|s| s.remainder.re.is_zero() && s.remainder.im.is_zero());
    let report = ExpandReport {
        z: literal.trim().to_string(),
        digits: digits.iter().map(format_gaussian).collect(),
        marked,
        convergents: convs
            .iter()
            .map(|c| ConvergentOut {
                p: format_gaussian(&c.p),
                q: format_gaussian(&c.q),
            })
            .collect(),
        error_bound: checks.rows.iter().skip(1).map(|r| r.error_bound).collect(),
        growth: checks.rows.iter().map(|r| r.growth).collect(),
        terminated,
        pass: checks.pass,
    };
    if json {
        write_json(None, &report)?;
        return ok();
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "{:>4}  {:<8} {:<10} {:<24} {:<24} {:<6} growth", "n", "digit", "marked", "p", "q", "bound")?;
    for (n, s) in expansion.iter().enumerate() {
        let row = &checks.rows[n + 1];
        writeln!(
            out,
            "{:>4}  {:<8} {:<10} {:<24} {:<24} {:<6} {}",
            n + 1,
            format_gaussian(&s.digit),
            report.marked[n],
            report.convergents[n].p,
            report.convergents[n].q,
            if row.error_bound { "ok" } else { "FAIL" },
            match row.growth {
                Some(true) => "ok",
                Some(false) => "FAIL",
                None => "-",
            }
        )?;
    }
    let how = if terminated { "exact" } else { "truncated" };
    writeln!(out, "{} digits, {how}, checks {}", digits.len(), if checks.pass { "pass" } else { "FAIL" })?;
    ok()
}

fn cmd_classify(literal: &str) -> Result<ExitCode> {
    let z = parse_complex(literal)?;
    match classify(&z)? {
        Classification::Region(r) => println!("{r}"),
        Classification::Boundary => println!("boundary"),
    }
    ok()
}

fn cmd_admissible(word: &str) -> Result<ExitCode> {
    let digits = parse_word(word)?;
    match digits
        .windows(2)
        .position(|p| !successor_set(&p[0]).contains(&p[1]))
    {
        None => println!("admissible"),
        Some(i) => println!(
            "not admissible: {} cannot follow {} at position {}",
            digits[i + 1],
            digits[i],
            i + 2
        ),
    }
    ok()
}

fn cmd_grid(settings: &Settings, action: GridAction) -> Result<ExitCode> {
    match action {
        GridAction::Build {
            region,
            k,
            all,
            out,
            build,
        } => {
            let k = check_k(settings.get_or("k", k, 8)?)?;
            let start = Instant::now();
            if all {
                let b = build_settings(settings, build, RegionId::new(1, 1)?)?;
                std::fs::create_dir_all(&out)?;
                let grids = build_all_regions(k, b.fill, &b.seed, b.iters)?;
                for g in &grids {
                    g.save(&out.join(region_file(g.region())))?;
                }
                eprintln!("built 12 regions at k={k} in {:.1?}", start.elapsed());
            } else {
                let r = region_arg(settings, region)?;
                let b = build_settings(settings, build, r)?;
                let g = build_grid(r, k, b.method, b.fill, &b.seed, b.iters)?;
                g.save(&out)?;
                eprintln!(
                    "built {r} at k={k} ({}, {}) in {:.1?}, occupancy {:.5}",
                    b.method,
                    b.fill,
                    start.elapsed(),
                    g.occupancy()
                );
            }
        }
        GridAction::Info { file } => {
            let g = PixelGrid::load(&file)?;
            println!("region {}", g.region());
            println!("k {}", g.k());
            println!("pixels {}", g.count_ones());
            println!("occupancy {:.6}", g.occupancy());
            println!("bytes {}", g.memory_bytes());
        }
        GridAction::ExportPbm { file, out } => PixelGrid::load(&file)?.export_pbm(&out)?,
    }
    ok()
}

#[derive(Serialize)]
struct FitReport {
    region: String,
    base: (f64, f64),
    resolutions: Vec<u32>,
    fits: Vec<FitResult>,
}

fn fit_table(table: &CoeffTable, only: Option<(usize, usize)>) -> Result<FitReport> {
    let mut fits = Vec::new();
    for m in 0..=table.l {
        for n in 0..=table.l - m {
            if only.is_some_and(|o| o != (m, n)) {
                continue;
            }
            fits.push(fit_exponential(&table.series(m, n))?.for_coefficient(m, n));
        }
    }
    Ok(FitReport {
        region: table.region.to_string(),
        base: table.base,
        resolutions: table.resolutions().collect(),
        fits,
    })
}

fn cmd_table(settings: &Settings, args: TableArgs) -> Result<ExitCode> {
    let region = region_arg(settings, args.region)?;
    let Base(x0, y0) = settings.get_or("base", args.base, Base(-0.5, -0.5))?;
    let ks = settings.get_or("k", args.k, KList(vec![7, 8, 9, 10]))?.0;
    let l = check_l(settings.get_or("L", args.l, 8)?)?;
    let smoothing: Smoothing = settings
        .get_or("smoothing", args.smoothing, "neighborhood".to_string())?
        .parse()?;
    let b = build_settings(settings, args.build, region)?;
    if let Some(dir) = &args.save_grids {
        std::fs::create_dir_all(dir)?;
    }

    let start = Instant::now();
    let mut peak = 0usize;
    let mut table = CoeffTable::new(region, (x0, y0), l);
    for &k in &ks {
        let t = Instant::now();
        let g = build_grid(region, k, b.method, b.fill, &b.seed, b.iters)?;
        peak = peak.max(g.memory_bytes());
        if let Some(dir) = &args.save_grids {
            g.save(&dir.join(format!("V{}{}-k{k}.grid", region.k(), region.l())))?;
        }
        let est = estimate_coeffs(&g, x0, y0, l, smoothing)?;
        eprintln!(
            "k={k}: h00 {:.5}, {} pixels, {:.1?}",
            est.coeffs.get(0, 0),
            est.pixels,
            t.elapsed()
        );
        table.insert(k, est.coeffs);
    }
    eprintln!(
        "{region} {} {}: {:.1?} total, peak grid memory {} bytes",
        b.method,
        b.fill,
        start.elapsed(),
        peak
    );

    match &args.csv {
        Some(p) => table.write_csv(BufWriter::new(File::create(p)?))?,
        None => table.write_csv(std::io::stdout().lock())?,
    }
    if let Some(p) = &args.json {
        write_json(Some(p), &fit_table(&table, None)?)?;
    }
    ok()
}

fn cmd_fit(settings: &Settings, args: FitArgs) -> Result<ExitCode> {
    let region = region_arg(settings, args.region)?;
    let Base(x0, y0) = settings.get_or("base", args.base, Base(-0.5, -0.5))?;
    let table = CoeffTable::read_csv(BufReader::new(File::open(&args.csv)?), region, (x0, y0))?;
    let only = match (args.m, args.n) {
        (Some(m), Some(n)) => Some((m, n)),
        (None, None) => None,
        _ => return Err(Error::Config("--m and --n go together".into())),
    };
    write_json(None, &fit_table(&table, only)?)?;
    ok()
}

fn load_grids(dir: &Path) -> Result<Vec<PixelGrid>> {
    RegionId::all()
        .map(|r| {
            let path = dir.join(region_file(r));
            if !path.exists() {
                return Err(Error::MissingGrid(r));
            }
            let g = PixelGrid::load(&path)?;
            if g.region() != r {
                return Err(Error::RegionMismatch {
                    expected: r,
                    actual: g.region(),
                });
            }
            Ok(g)
        })
        .collect()
}

fn cmd_plot(settings: &Settings, args: PlotArgs) -> Result<ExitCode> {
    let n = settings.get_or("n", args.n, 256)?;
    if n == 0 {
        return Err(Error::Config("image side must be positive".into()));
    }
    let format = match settings.get::<String>("format", args.format)? {
        Some(f) => f.parse()?,
        None => Format::from_path(&args.out),
    };
    let start = Instant::now();
    let grids = match settings.get::<PathBuf>("grids", args.grids)? {
        Some(dir) => load_grids(&dir)?,
        None => {
            let k = check_k(settings.get_or("k", args.k, 8)?)?;
            let b = build_settings(settings, args.build, RegionId::new(1, 1)?)?;
            build_all_regions(k, b.fill, &b.seed, b.iters)?
        }
    };
    let k = grids[0].k();
    let dens = DensityGrids::coarsened(&grids, Smoothing::Neighborhood, k.min(7))?;
    let image = heatmap::render(&dens, n)?;
    heatmap::write(&image, n, format, &args.out)?;
    eprintln!("{n}x{n} {format} from k={k} grids in {:.1?}", start.elapsed());
    ok()
}

fn cmd_validate(settings: &Settings, args: ValidateArgs) -> Result<ExitCode> {
    let suites = if args.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suites
            .iter()
            .flat_map(|s| s.split(','))
            .map(str::parse)
            .collect::<Result<Vec<Suite>>>()?
    };
    let defaults = ValidateOptions::default();
    let opts = ValidateOptions {
        samples: settings.get_or("samples", args.samples, defaults.samples)?,
        depth: settings.get_or("depth", args.depth, defaults.depth)?,
        orbit_steps: settings
            .get_or("steps", args.steps, Count(defaults.orbit_steps))?
            .0,
        q_recurrence: if args.flip_q_sign {
            QRecurrence::Minus
        } else {
            QRecurrence::Plus
        },
        ..defaults
    };
    let report = validate::run(&suites, &opts);
    write_json(None, &report)?;
    if report.pass {
        ok()
    } else {
        let failed: Vec<String> = report
            .suites
            .iter()
            .filter(|s| !s.pass)
            .map(|s| s.suite.to_string())
            .collect();
        eprintln!("error: invariant failure in {}", failed.join(", "));
        Ok(ExitCode::from(2))
    }
}

fn cmd_freq(settings: &Settings, args: FreqArgs) -> Result<ExitCode> {
    let steps = settings.get_or("steps", args.steps, Count(10_000_000))?.0;
    if steps == 0 {
        return Err(Error::Config("steps must be positive".into()));
    }
    let seed = seed_arg(settings, args.seed)?;
    let counts = region_counts(&seed, steps)?;
    match settings.get::<String>("region", args.region)? {
        Some(r) => println!("{:.6}", counts.frequency(r.parse()?)),
        None => {
            for r in RegionId::all() {
                println!("{r} {:.6}", counts.frequency(r));
            }
            println!(
                "boundary {:.6}",
                counts.boundary as f64 / counts.total as f64
            );
        }
    }
    ok()
}
