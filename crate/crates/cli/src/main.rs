//! Batch front end for the sampling library: every subcommand reads CSV
//! inputs, writes CSV outputs plus a `run.manifest` echoing the resolved
//! configuration, and is byte-reproducible given identical arguments.
//!
//! Exit codes: 0 success, 2 usage (from the argument parser), 3 validation
//! or I/O failure, 4 solver failure.

mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pwrec::biorth::BiorthSystem;
use pwrec::gram::{GramError, GramSection};
use pwrec::kadec::{admissibility, asymptotic_ratio, ln2_bound, solve_x_d, sun_zhou_d, KadecError};
use pwrec::kernels::SmoothKernel;
use pwrec::nodes::{NodeSet, PerturbMode};
use pwrec::reconstruct::{
    error_report, reconstruct_oversampled, reconstruct_sinc, sample, stability_bound, Grid,
    ReconstructError,
};
use pwrec::testfn::BandlimitedFn;

const EXIT_DOMAIN: u8 = 3;
const EXIT_SOLVER: u8 = 4;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn domain(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }

    fn solver(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_SOLVER,
            message: message.into(),
        }
    }
}

impl From<ReconstructError> for Failure {
    fn from(e: ReconstructError) -> Self {
        match e {
            ReconstructError::Gram(g) => Failure::from(g),
            other => Failure::domain(other.to_string()),
        }
    }
}

impl From<GramError> for Failure {
    fn from(e: GramError) -> Self {
        match e {
            GramError::BadSectionSize { .. } => Failure::domain(e.to_string()),
            _ => Failure::solver(e.to_string()),
        }
    }
}

impl From<KadecError> for Failure {
    fn from(e: KadecError) -> Self {
        match e {
            KadecError::NotMonotone(_) => Failure::solver(e.to_string()),
            other => Failure::domain(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "pwrec",
    version,
    about = "Nonuniform sampling experiments: node sets, Gram sections, reconstruction, admissibility criteria, biorthogonal functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or load a node set and write its diagnostics
    Nodes(NodesArgs),
    /// Build a Gram section and dump it with its inverse
    Gram(GramArgs),
    /// Sample a function at the nodes and reconstruct it on a grid
    Reconstruct(ReconstructArgs),
    /// Riesz-basis admissibility criteria and dimension sweeps
    Kadec(KadecArgs),
    /// Evaluate biorthogonal functions and residual matrices
    Biorth(BiorthArgs),
    /// Bound and measure the effect of coefficient-vector noise
    Stability(StabilityArgs),
}

#[derive(Args)]
struct NodesArgs {
    /// Load this node CSV instead of generating one
    #[arg(long)]
    nodes: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    w: i64,
    /// lattice | constant | decaying | random | single
    #[arg(long, default_value = "lattice")]
    mode: String,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    displacement: f64,
    /// Covering-radius search window, as `a:b:step`
    #[arg(long)]
    covering: Option<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct GramArgs {
    #[arg(long)]
    nodes: PathBuf,
    /// Section size; defaults to the full window
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.5)]
    lambda0: f64,
    #[arg(long, default_value_t = 64)]
    quad_order: usize,
    /// Ground-truth function CSV (`c,s_1..s_d` rows)
    #[arg(long)]
    f: PathBuf,
    /// Evaluation grid, as `a:b:step`
    #[arg(long)]
    grid: Option<String>,
    /// Sample noise, as `eps` or `eps,uniform`; seeded by --seed
    #[arg(long)]
    perturb: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional error-curve SVG (one-dimensional runs)
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct KadecArgs {
    /// Sweep dimensions 1..=DMAX and tabulate bounds, roots, ratios
    #[arg(long)]
    sweep: Option<usize>,
    /// Report criteria for an explicit (d, L) pair
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, value_name = "L")]
    l_dev: Option<f64>,
    /// Report criteria for a node set
    #[arg(long)]
    nodes: Option<PathBuf>,
    /// Optional x_d curve SVG for sweeps
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct BiorthArgs {
    #[arg(long)]
    nodes: PathBuf,
    /// Truncation level; defaults to the window radius
    #[arg(long)]
    l: Option<usize>,
    /// Evaluate the biorthogonal function with this index on the grid
    #[arg(long)]
    n: Option<i64>,
    #[arg(long)]
    grid: Option<String>,
    /// Emit the residual matrix up to this index range
    #[arg(long)]
    residual: Option<usize>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct StabilityArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1.5)]
    lambda0: f64,
    #[arg(long, default_value_t = 64)]
    quad_order: usize,
    #[arg(long)]
    f: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Nodes(args) => run_nodes(args),
        Command::Gram(args) => run_gram(args),
        Command::Reconstruct(args) => run_reconstruct(args),
        Command::Kadec(args) => run_kadec(args),
        Command::Biorth(args) => run_biorth(args),
        Command::Stability(args) => run_stability(args),
    }
}

// ---------------------------------------------------------------- helpers

fn parse_grid_spec(spec: &str) -> Result<(f64, f64, f64), Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::domain(format!(
            "grid spec must be a:b:step, got {spec:?}"
        )));
    }
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    match nums {
        Ok(v) => Ok((v[0], v[1], v[2])),
        Err(_) => Err(Failure::domain(format!("bad grid spec {spec:?}"))),
    }
}

fn load_nodes(path: &Path) -> Result<NodeSet, Failure> {
    NodeSet::read_csv(path)
        .map_err(|e| Failure::domain(format!("node file {}: {e}", path.display())))
}

fn load_function(path: &Path) -> Result<BandlimitedFn, Failure> {
    BandlimitedFn::read_csv(path)
        .map_err(|e| Failure::domain(format!("function file {}: {e}", path.display())))
}

fn ensure_out_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::domain(format!("output directory {}: {e}", dir.display())))
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| Failure::domain(format!("writing {}: {e}", path.display())))
}

/// `run.manifest`: the full resolved configuration as key=value lines.
fn write_manifest(
    dir: &Path,
    subcommand: &str,
    entries: &[(String, String)],
) -> Result<(), Failure> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let mut out = String::new();
    let _ = writeln!(out, "argv={}", argv.join(" "));
    let _ = writeln!(out, "subcommand={subcommand}");
    for (k, v) in entries {
        let _ = writeln!(out, "{k}={v}");
    }
    write_output(dir, "run.manifest", &out)
}

fn kv(key: &str, value: impl std::fmt::Display) -> (String, String) {
    (key.to_string(), value.to_string())
}

fn write_svg(path: &Path, series: &[(f64, f64)], title: &str) -> Result<(), Failure> {
    let svg = svg::render_curve(series, title).map_err(|e| Failure::domain(e.to_string()))?;
    std::fs::write(path, svg)
        .map_err(|e| Failure::domain(format!("writing {}: {e}", path.display())))
}

// ------------------------------------------------------------ subcommands

fn run_nodes(args: NodesArgs) -> Result<(), Failure> {
    ensure_out_dir(&args.out)?;
    let (set, mode_desc) = match &args.nodes {
        Some(path) => (load_nodes(path)?, format!("loaded:{}", path.display())),
        None => {
            let mode = match args.mode.as_str() {
                "lattice" => None,
                "constant" => Some(PerturbMode::Constant { delta: args.delta }),
                "decaying" => Some(PerturbMode::Decaying {
                    delta: args.delta,
                    rho: args.rho,
                }),
                "random" => Some(PerturbMode::RandomUniform {
                    delta: args.delta,
                    seed: args.seed,
                }),
                "single" => Some(PerturbMode::SingleDisplaced {
                    displacement: args.displacement,
                }),
                other => {
                    return Err(Failure::domain(format!(
                        "unknown mode {other:?} (expected lattice|constant|decaying|random|single)"
                    )))
                }
            };
            let set = match mode {
                None => NodeSet::lattice(args.d, args.w),
                Some(m) => NodeSet::perturbed(args.d, args.w, &m),
            }
            .map_err(|e| Failure::domain(e.to_string()))?;
            (set, args.mode.clone())
        }
    };

    write_output(&args.out, "nodes.csv", &set.to_csv())?;

    let stats = set.deviation_stats();
    let mut report = String::from("key,value\n");
    let _ = writeln!(report, "dim,{}", set.dim());
    let _ = writeln!(report, "window_radius,{}", set.window_radius());
    let _ = writeln!(report, "entries,{}", set.len());
    let _ = writeln!(report, "sup_dev,{}", stats.sup_dev);
    for (r, v) in &stats.tail_dev {
        let _ = writeln!(report, "tail_dev_{r},{v}");
    }
    if set.len() >= 2 {
        let gap = set
            .separation_gap()
            .map_err(|e| Failure::domain(e.to_string()))?;
        let _ = writeln!(report, "separation_gap,{}", gap.gap);
        let _ = writeln!(report, "separation_radius,{}", gap.separation_radius);
        let _ = writeln!(report, "duplicates,{}", gap.duplicate);
        if let Some(spec) = &args.covering {
            let (a, b, step) = parse_grid_spec(spec)?;
            let covering = set
                .covering_radius(a, b, step)
                .map_err(|e| Failure::domain(e.to_string()))?;
            let _ = writeln!(report, "covering_radius,{covering}");
            // Heuristic frame diagnostic: separated nodes with covering
            // radius below pi/2. Reported, never certified.
            let pass = gap.separation_radius > 0.0 && covering < std::f64::consts::FRAC_PI_2;
            let _ = writeln!(
                report,
                "beurling_heuristic,{}",
                if pass { "pass" } else { "fail" }
            );
        }
    }
    let kadec = admissibility(&set)?;
    let _ = writeln!(report, "ln2_bound,{}", kadec.ln2_bound);
    let _ = writeln!(report, "ln2_pass,{}", kadec.ln2_pass);
    if let Some(d) = kadec.d_value {
        let _ = writeln!(report, "sun_zhou_value,{d}");
    }
    let _ = writeln!(report, "sun_zhou_pass,{}", kadec.sun_zhou_pass);
    if let Some(ps) = &kadec.pak_shin {
        let _ = writeln!(report, "limsup_proxy,{}", ps.limsup_proxy);
        let _ = writeln!(report, "pak_shin_pass,{}", ps.pass);
    }
    write_output(&args.out, "stats.csv", &report)?;

    write_manifest(
        &args.out,
        "nodes",
        &[
            kv("mode", mode_desc),
            kv("d", set.dim()),
            kv("w", set.window_radius()),
            kv("delta", args.delta),
            kv("rho", args.rho),
            kv("seed", args.seed),
            kv("displacement", args.displacement),
            kv("covering", args.covering.as_deref().unwrap_or("-")),
        ],
    )
}

fn matrix_csv(get: impl Fn(usize, usize) -> f64, n: usize) -> String {
    let mut out = String::new();
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}", get(i, j));
        }
        out.push('\n');
    }
    out
}

fn run_gram(args: GramArgs) -> Result<(), Failure> {
    ensure_out_dir(&args.out)?;
    let set = load_nodes(&args.nodes)?;
    let l = args.l.unwrap_or(set.len());
    let section = GramSection::build(&set, l)?;
    write_output(
        &args.out,
        "gram.csv",
        &matrix_csv(|i, j| section.matrix().get(i, j), l),
    )?;
    let inverse = section.inverse();
    write_output(
        &args.out,
        "gram_inv.csv",
        &matrix_csv(|i, j| inverse.entry(i, j), l),
    )?;
    println!(
        "gram section l = {l}, condition estimate {:.3e}",
        section.condition_estimate()
    );
    write_manifest(
        &args.out,
        "gram",
        &[kv("nodes", args.nodes.display()), kv("l", l)],
    )
}

fn run_reconstruct(args: ReconstructArgs) -> Result<(), Failure> {
    ensure_out_dir(&args.out)?;
    let set = load_nodes(&args.nodes)?;
    let f = load_function(&args.f)?;
    let l = args.l.unwrap_or(set.len());
    let grid = match &args.grid {
        Some(spec) => {
            let (a, b, step) = parse_grid_spec(spec)?;
            Grid::new(set.dim(), a, b, step)?
        }
        None => Grid::default_for_window(set.dim(), set.window_radius()),
    };

    let mut samples = sample(&f, &set, l, args.lambda)?;
    let mut perturb_desc = String::from("-");
    if let Some(spec) = &args.perturb {
        let eps_str = spec.split(',').next().unwrap_or(spec);
        let eps: f64 = eps_str
            .trim()
            .parse()
            .map_err(|_| Failure::domain(format!("bad perturbation spec {spec:?}")))?;
        if eps < 0.0 {
            return Err(Failure::domain("perturbation size must be nonnegative"));
        }
        samples = samples.perturbed(eps, args.seed);
        perturb_desc = spec.clone();
    }

    let mut result = if args.lambda == 1.0 {
        reconstruct_sinc(&set, l, &samples, &grid)?
    } else {
        let kernel = SmoothKernel::new(set.dim(), args.lambda0, args.quad_order)
            .map_err(|e| Failure::domain(e.to_string()))?;
        reconstruct_oversampled(&set, l, &samples, &kernel, &grid)?
    };
    let metrics = error_report(&f, &mut result);

    let mut out = String::new();
    for i in 1..=set.dim() {
        let _ = write!(out, "t_{i},");
    }
    out.push_str("f_true,f_rec,abs_err\n");
    let truth = result.truth.as_ref().expect("error_report fills truth");
    for ((t, rec), tru) in result
        .grid_points
        .iter()
        .zip(result.values.iter())
        .zip(truth.iter())
    {
        for c in t {
            let _ = write!(out, "{c},");
        }
        let _ = writeln!(out, "{tru},{rec},{}", (tru - rec).abs());
    }
    write_output(&args.out, "recon.csv", &out)?;
    println!(
        "sup error {:.6e}, rms error {:.6e}",
        metrics.sup, metrics.rms
    );

    if let Some(svg_path) = &args.svg {
        if set.dim() == 1 {
            let series: Vec<(f64, f64)> = result
                .grid_points
                .iter()
                .zip(result.values.iter().zip(truth.iter()))
                .map(|(t, (rec, tru))| (t[0], (tru - rec).abs()))
                .collect();
            write_svg(svg_path, &series, "absolute reconstruction error")?;
        } else {
            return Err(Failure::domain("svg output needs a one-dimensional grid"));
        }
    }

    write_manifest(
        &args.out,
        "reconstruct",
        &[
            kv("nodes", args.nodes.display()),
            kv("f", args.f.display()),
            kv("l", l),
            kv("lambda", args.lambda),
            kv("lambda0", args.lambda0),
            kv("quad_order", args.quad_order),
            kv("grid", args.grid.as_deref().unwrap_or("default")),
            kv("perturb", perturb_desc),
            kv("seed", args.seed),
        ],
    )
}

fn run_kadec(args: KadecArgs) -> Result<(), Failure> {
    ensure_out_dir(&args.out)?;
    let mut out = String::new();
    let mut series = Vec::new();
    if let Some(dmax) = args.sweep {
        if dmax == 0 {
            return Err(Failure::domain("sweep bound must be at least 1"));
        }
        out.push_str("d,ln2_bound,x_d,ratio\n");
        for d in 1..=dmax {
            let x = solve_x_d(d)?;
            let ratio = asymptotic_ratio(d)?;
            let _ = writeln!(out, "{d},{},{x},{ratio}", ln2_bound(d));
            series.push((d as f64, x));
        }
    } else if let Some(path) = &args.nodes {
        let set = load_nodes(path)?;
        let report = admissibility(&set)?;
        out.push_str("key,value\n");
        let _ = writeln!(out, "dim,{}", report.dim);
        let _ = writeln!(out, "sup_dev,{}", report.sup_dev);
        let _ = writeln!(out, "ln2_bound,{}", report.ln2_bound);
        let _ = writeln!(out, "ln2_pass,{}", report.ln2_pass);
        if let Some(v) = report.d_value {
            let _ = writeln!(out, "sun_zhou_value,{v}");
        }
        let _ = writeln!(out, "sun_zhou_pass,{}", report.sun_zhou_pass);
        let _ = writeln!(out, "x_d,{}", report.x_d);
        if let Some(ps) = &report.pak_shin {
            let _ = writeln!(out, "limsup_proxy,{}", ps.limsup_proxy);
            let _ = writeln!(out, "pak_shin_pass,{}", ps.pass);
        }
    } else {
        let d = args
            .d
            .ok_or_else(|| Failure::domain("kadec needs --sweep, --nodes, or --d with --l-dev"))?;
        let l_dev = args
            .l_dev
            .ok_or_else(|| Failure::domain("kadec --d needs --l-dev"))?;
        out.push_str("key,value\n");
        let _ = writeln!(out, "d,{d}");
        let _ = writeln!(out, "L,{l_dev}");
        let _ = writeln!(out, "ln2_bound,{}", ln2_bound(d));
        let _ = writeln!(out, "ln2_pass,{}", l_dev < ln2_bound(d));
        if l_dev > 0.0 && l_dev <= 0.25 {
            let v = sun_zhou_d(l_dev, d)?;
            let _ = writeln!(out, "sun_zhou_value,{v}");
            let _ = writeln!(out, "sun_zhou_pass,{}", v < 1.0);
        } else {
            let _ = writeln!(out, "sun_zhou_pass,{}", l_dev == 0.0);
        }
        let _ = writeln!(out, "x_d,{}", solve_x_d(d)?);
    }
    write_output(&args.out, "kadec.csv", &out)?;

    if let Some(svg_path) = &args.svg {
        write_svg(svg_path, &series, "critical deviation by dimension")?;
    }

    write_manifest(
        &args.out,
        "kadec",
        &[
            kv(
                "sweep",
                args.sweep.map(|v| v.to_string()).unwrap_or("-".into()),
            ),
            kv("d", args.d.map(|v| v.to_string()).unwrap_or("-".into())),
            kv(
                "l_dev",
                args.l_dev.map(|v| v.to_string()).unwrap_or("-".into()),
            ),
            kv(
                "nodes",
                args.nodes
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or("-".into()),
            ),
        ],
    )
}

fn run_biorth(args: BiorthArgs) -> Result<(), Failure> {
    ensure_out_dir(&args.out)?;
    let set = load_nodes(&args.nodes)?;
    let level = args.l.unwrap_or(set.window_radius().max(0) as usize);
    let sys =
        BiorthSystem::from_node_set(&set, level).map_err(|e| Failure::domain(e.to_string()))?;
    if args.n.is_none() && args.residual.is_none() {
        return Err(Failure::domain(
            "biorth needs --n with --grid, or --residual",
        ));
    }

    if let Some(n) = args.n {
        let spec = args
            .grid
            .as_ref()
            .ok_or_else(|| Failure::domain("biorth --n needs --grid"))?;
        let (a, b, step) = parse_grid_spec(spec)?;
        let grid = Grid::new(1, a, b, step)?;
        let mut out = String::from("t,g_n\n");
        let mut series = Vec::new();
        for point in grid.points() {
            let t = point[0];
            let v = sys
                .g_eval(n, t)
                .map_err(|e| Failure::domain(e.to_string()))?;
            let _ = writeln!(out, "{t},{v}");
            series.push((t, v));
        }
        write_output(&args.out, "biorth.csv", &out)?;
        if let Some(svg_path) = &args.svg {
            write_svg(svg_path, &series, &format!("biorthogonal function {n}"))?;
        }
    }

    if let Some(m_max) = args.residual {
        let res = sys
            .residual_matrix(m_max)
            .map_err(|e| Failure::domain(e.to_string()))?;
        let mut out = String::from("m,n,residual\n");
        for (mi, row) in res.iter().enumerate() {
            for (ni, v) in row.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{v}",
                    mi as i64 - m_max as i64,
                    ni as i64 - m_max as i64
                );
            }
        }
        write_output(&args.out, "residual.csv", &out)?;
    }

    write_manifest(
        &args.out,
        "biorth",
        &[
            kv("nodes", args.nodes.display()),
            kv("l", level),
            kv("n", args.n.map(|v| v.to_string()).unwrap_or("-".into())),
            kv("grid", args.grid.as_deref().unwrap_or("-")),
            kv(
                "residual",
                args.residual.map(|v| v.to_string()).unwrap_or("-".into()),
            ),
        ],
    )
}

fn run_stability(args: StabilityArgs) -> Result<(), Failure> {
    ensure_out_dir(&args.out)?;
    let set = load_nodes(&args.nodes)?;
    let f = load_function(&args.f)?;
    let l = args.l.unwrap_or(set.len());
    let grid = match &args.grid {
        Some(spec) => {
            let (a, b, step) = parse_grid_spec(spec)?;
            Grid::new(set.dim(), a, b, step)?
        }
        None => Grid::default_for_window(set.dim(), set.window_radius()),
    };
    if args.eps < 0.0 {
        return Err(Failure::domain("noise level must be nonnegative"));
    }
    let kernel = SmoothKernel::new(set.dim(), args.lambda0, args.quad_order)
        .map_err(|e| Failure::domain(e.to_string()))?;
    let samples = sample(&f, &set, l, args.lambda)?;
    let clean = reconstruct_oversampled(&set, l, &samples, &kernel, &grid)?;
    let bound = stability_bound(args.eps, &grid, &set, args.lambda, &kernel)?;

    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
    let points = grid.points();
    let scale = args.lambda.powi(set.dim() as i32).recip();
    let mut max_dev = vec![0.0f64; points.len()];
    let mut arg = vec![0.0f64; set.dim()];
    for _ in 0..args.trials {
        let noisy: Vec<f64> = clean
            .coefficients
            .iter()
            .map(|c| c + args.eps * (2.0 * rng.gen::<f64>() - 1.0))
            .collect();
        for (idx, t) in points.iter().enumerate() {
            let mut v = 0.0;
            for (c, e) in noisy.iter().zip(set.entries()[..l].iter()) {
                for (i, &coord) in e.node.iter().enumerate() {
                    arg[i] = t[i] - coord / args.lambda;
                }
                v += c * kernel.eval(&arg);
            }
            v *= scale;
            max_dev[idx] = max_dev[idx].max((v - clean.values[idx]).abs());
        }
    }

    let mut out = String::new();
    for i in 1..=set.dim() {
        let _ = write!(out, "t_{i},");
    }
    out.push_str("bound,max_dev\n");
    for ((t, b), d) in points.iter().zip(bound.iter()).zip(max_dev.iter()) {
        for c in t {
            let _ = write!(out, "{c},");
        }
        let _ = writeln!(out, "{b},{d}");
    }
    write_output(&args.out, "stability.csv", &out)?;

    write_manifest(
        &args.out,
        "stability",
        &[
            kv("nodes", args.nodes.display()),
            kv("f", args.f.display()),
            kv("l", l),
            kv("lambda", args.lambda),
            kv("lambda0", args.lambda0),
            kv("quad_order", args.quad_order),
            kv("eps", args.eps),
            kv("trials", args.trials),
            kv("seed", args.seed),
            kv("grid", args.grid.as_deref().unwrap_or("default")),
        ],
    )
}
