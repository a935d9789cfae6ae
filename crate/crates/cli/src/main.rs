mod format;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use delone::antiprism_opt::{optimize_lemma1, optimize_lemma2, OptBudget};
use delone::generators::{GeneratorConfig, GeneratorKind};
use delone::io::{write_point_set, PointSetFile};
use delone::point_group::{tower_height, MAX_TOWER_ORDER};
use delone::regularity::{resolve_r, table_to_csv, tower_bound_radius, RSource};
use delone::{
    bound_lookup, classify_scenario, cluster_classes, local_criterion, shtogrin_step_bound, stabilizer, Patch, Point,
    Tolerances, BOUND_TABLE,
};

use format::{num, point, RadiusArg};

#[derive(Parser, Debug)]
#[command(name = "delone", version, about = "Local regularity analysis of 3D Delone sets")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Absolute geometric tolerance.
    #[arg(long = "tol", global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Angular tolerance in radians.
    #[arg(long = "angle-tol", global = true, default_value_t = 1e-9)]
    angle_tol: f64,
    /// Largest rotation order recognised.
    #[arg(long = "max-order", global = true, default_value_t = 24)]
    max_order: u32,
    /// Write the output here instead of standard output.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a point set.
    Generate(GenerateArgs),
    /// Cluster count, cluster group, table bound and local criterion.
    Analyze {
        path: PathBuf,
        /// Cluster radius, a number or a multiple of R such as 2R.
        #[arg(long, default_value = "2R")]
        rho: RadiusArg,
    },
    /// Equivalence classes of ρ-clusters.
    Classes {
        path: PathBuf,
        #[arg(long, default_value = "2R")]
        rho: RadiusArg,
    },
    /// Cluster group at one center.
    Group {
        path: PathBuf,
        #[arg(long, default_value = "2R")]
        rho: RadiusArg,
        /// Center point; defaults to the first usable center.
        #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["X", "Y", "Z"])]
        center: Option<Vec<f64>>,
    },
    /// Local regularity criterion at ρ₀.
    CheckLocal {
        path: PathBuf,
        #[arg(long)]
        rho0: RadiusArg,
    },
    /// Per-group regularity radius bounds.
    BoundsTable {
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
    /// Numerical optimisation of the antiprism problems.
    Optimize(OptimizeArgs),
    /// Contraction factor of one step of the rotation-order descent.
    ShtogrinBound {
        #[arg(long)]
        n: u32,
    },
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_kind)]
    kind: Option<GeneratorKind>,
    /// key = value file; command-line values override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "box", num_args = 6, allow_negative_numbers = true, value_names = ["LX", "LY", "LZ", "HX", "HY", "HZ"])]
    bbox: Option<Vec<f64>>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Vertical shift of the second hexagonal lattice.
    #[arg(long = "t-z", allow_negative_numbers = true)]
    t_z: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Rescale so the minimal distance is 1.
    #[arg(long)]
    normalize: bool,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    #[arg(value_enum)]
    problem: Problem,
    #[arg(long, num_args = 2, value_names = ["N1", "N2"])]
    grid: Option<Vec<usize>>,
    #[arg(long)]
    theta_seeds: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    phi_range: Option<Vec<f64>>,
    /// Vertex pairs closer than this are ignored in problem 1.
    #[arg(long)]
    pair_filter: Option<f64>,
    /// Shrinkage of the strict inequalities in problem 2.
    #[arg(long)]
    eps: Option<f64>,
    /// Write every start as CSV to this file.
    #[arg(long)]
    starts_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Problem {
    Lemma1,
    Lemma2,
}

fn parse_kind(s: &str) -> Result<GeneratorKind, String> {
    s.parse().map_err(|e: delone::generators::GeneratorError| e.to_string())
}

type Res<T> = Result<T, String>;

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Res<()> {
    let g = &cli.global;
    let ctx = Tolerances::new(g.tol, g.angle_tol, g.max_order)?;
    let out = match &cli.command {
        Command::Generate(a) => generate(a)?,
        Command::Analyze { path, rho } => analyze(&load(path, &ctx)?, *rho, &ctx)?,
        Command::Classes { path, rho } => classes(&load(path, &ctx)?, *rho, &ctx)?,
        Command::Group { path, rho, center } => group(&load(path, &ctx)?, *rho, center.as_deref(), &ctx)?,
        Command::CheckLocal { path, rho0 } => check_local(&load(path, &ctx)?, *rho0, &ctx)?,
        Command::BoundsTable { format } => bounds_table(*format),
        Command::Optimize(a) => optimize(a)?,
        Command::ShtogrinBound { n } => shtogrin(*n)?,
    };
    match &g.output {
        Some(p) => std::fs::write(p, out).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn load(path: &Path, ctx: &Tolerances) -> Res<Patch> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let patch = PointSetFile::parse(&text).and_then(|f| f.into_patch()).map_err(err)?;
    if patch.len() < 2 {
        return Err("need at least two points".into());
    }
    patch.validate(ctx).map_err(err)?;
    Ok(patch)
}

/// Resolves a radius, computing R only when needed.
fn radius(patch: &Patch, rho: RadiusArg, ctx: &Tolerances) -> Res<(f64, Option<(f64, RSource)>)> {
    if rho.needs_r() {
        let r = resolve_r(patch, ctx).map_err(err)?;
        Ok((rho.resolve(r.0), Some(r)))
    } else {
        Ok((rho.resolve(0.0), None))
    }
}

fn generate(a: &GenerateArgs) -> Res<String> {
    let mut cfg = match (&a.config, a.kind) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            GeneratorConfig::parse(&text).map_err(err)?
        }
        (None, Some(k)) => GeneratorConfig::new(k),
        (None, None) => return Err("generate needs --kind or --config".into()),
    };
    if let (Some(_), Some(k)) = (&a.config, a.kind) {
        cfg.kind = k;
    }
    if let Some(b) = &a.bbox {
        cfg.box_lo = [b[0], b[1], b[2]];
        cfg.box_hi = [b[3], b[4], b[5]];
    }
    if let Some(v) = a.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = a.mu {
        cfg.mu = v;
    }
    if a.t_z.is_some() {
        cfg.t_z = a.t_z;
    }
    if let Some(v) = a.a {
        cfg.a = v;
    }
    if let Some(v) = a.b {
        cfg.b = v;
    }
    cfg.normalize |= a.normalize;
    let (patch, min_d) = cfg.build().map_err(err)?;
    Ok(write_point_set(&patch, Some(min_d)))
}

fn analyze(patch: &Patch, rho: RadiusArg, ctx: &Tolerances) -> Res<String> {
    let (r, src) = resolve_r(patch, ctx).map_err(err)?;
    let rho_v = rho.resolve(r);
    let mut s = String::new();
    writeln!(s, "points: {}", patch.len()).unwrap();
    writeln!(s, "R: {}", num(r)).unwrap();
    writeln!(s, "R_source: {src}").unwrap();
    writeln!(s, "rho: {rho} = {}", num(rho_v)).unwrap();
    let cl = cluster_classes(patch, rho_v, ctx).map_err(err)?;
    writeln!(s, "N(rho): {}", cl.n()).unwrap();
    if cl.n() == 1 {
        let g = stabilizer(&cl.class_representatives[0], ctx).map_err(err)?;
        let label = g.label().to_string();
        writeln!(s, "group: {label}").unwrap();
        writeln!(s, "group_order: {}", g.order()).unwrap();
        match bound_lookup(&label) {
            Ok(row) => writeln!(s, "table_bound: {}", row.bound).unwrap(),
            Err(_) => writeln!(s, "table_bound: not listed").unwrap(),
        }
    } else {
        writeln!(s, "group: none").unwrap();
    }
    let rep = classify_scenario(patch, r, ctx).map_err(err)?;
    match &rep.criterion {
        Some(v) => {
            writeln!(s, "local_criterion: {}", if v.regular { "regular" } else { "not regular" }).unwrap();
            if let Some(w) = &v.witness {
                writeln!(s, "local_criterion_witness: {w}").unwrap();
            }
        }
        None => writeln!(s, "local_criterion: insufficient margin").unwrap(),
    }
    writeln!(s, "summary: {}", rep.summary()).unwrap();
    Ok(s)
}

fn classes(patch: &Patch, rho: RadiusArg, ctx: &Tolerances) -> Res<String> {
    let (rho_v, rr) = radius(patch, rho, ctx)?;
    let cl = cluster_classes(patch, rho_v, ctx).map_err(err)?;
    let mut s = String::new();
    if let Some((r, src)) = rr {
        writeln!(s, "R: {} ({src})", num(r)).unwrap();
    }
    writeln!(s, "rho: {}", num(rho_v)).unwrap();
    writeln!(s, "centers: {}", cl.centers.len()).unwrap();
    writeln!(s, "N(rho): {}", cl.n()).unwrap();
    for (k, (rep, size)) in cl.class_representatives.iter().zip(cl.class_sizes()).enumerate() {
        let label = match stabilizer(rep, ctx) {
            Ok(g) => g.label().to_string(),
            Err(e) => format!("unclassified ({e})"),
        };
        writeln!(s, "class {k}: size={size} members={} representative={} group={label}", rep.len(), point(rep.center))
            .unwrap();
    }
    Ok(s)
}

fn group(patch: &Patch, rho: RadiusArg, center: Option<&[f64]>, ctx: &Tolerances) -> Res<String> {
    let (rho_v, _) = radius(patch, rho, ctx)?;
    let c = match center {
        Some(v) => Point::new(v[0], v[1], v[2]),
        None => {
            let usable = patch.usable_centers(rho_v, ctx);
            let i = *usable.first().ok_or_else(|| {
                format!("margin violation: no center has a ball of radius {} inside the trusted box", num(rho_v))
            })?;
            patch.points()[i]
        }
    };
    let cluster = patch.cluster(c, rho_v, ctx).map_err(err)?;
    let g = stabilizer(&cluster, ctx).map_err(err)?;
    let mut s = String::new();
    writeln!(s, "center: {}", point(c)).unwrap();
    writeln!(s, "rho: {}", num(rho_v)).unwrap();
    writeln!(s, "members: {}", cluster.len()).unwrap();
    writeln!(s, "group: {}", g.label()).unwrap();
    writeln!(s, "order: {}", g.order()).unwrap();
    writeln!(s, "max_rotation_order: {}", g.max_rotation_order(ctx)).unwrap();
    if g.order() <= MAX_TOWER_ORDER {
        writeln!(s, "tower_height: {}", tower_height(&g, ctx).map_err(err)?).unwrap();
    }
    let names: Vec<String> = g.element_kinds(ctx).iter().map(|k| k.short_name()).collect();
    writeln!(s, "elements: {}", names.join(" ")).unwrap();
    Ok(s)
}

fn check_local(patch: &Patch, rho0: RadiusArg, ctx: &Tolerances) -> Res<String> {
    let (r, src) = resolve_r(patch, ctx).map_err(err)?;
    let rho0_v = rho0.resolve(r);
    let v = local_criterion(patch, rho0_v, r, ctx).map_err(err)?;
    let mut s = String::new();
    writeln!(s, "R: {} ({src})", num(r)).unwrap();
    writeln!(s, "rho0: {}", num(rho0_v)).unwrap();
    writeln!(s, "center: {}", point(v.center)).unwrap();
    writeln!(s, "N(rho0+2R): {}", v.n_at_rho0_plus_2r).unwrap();
    writeln!(s, "group(rho0): {}", v.group_at_rho0).unwrap();
    writeln!(s, "group(rho0+2R): {}", v.group_at_rho0_plus_2r).unwrap();
    writeln!(s, "verdict: {}", if v.regular { "regular" } else { "not regular" }).unwrap();
    if let Some(w) = &v.witness {
        writeln!(s, "witness: {w}").unwrap();
    }
    Ok(s)
}

fn bounds_table(format: TableFormat) -> String {
    match format {
        TableFormat::Csv => table_to_csv(&BOUND_TABLE),
        TableFormat::Text => {
            let mut s = format!("{:<6} {:>5} {:>10} {:>6}  {}\n", "group", "order", "bound", "tower", "reference");
            for row in BOUND_TABLE.iter() {
                let tower = format!("{}R", tower_bound_radius(row.order as u64));
                writeln!(
                    s,
                    "{:<6} {:>5} {:>10} {:>6}  {}",
                    row.label,
                    row.order,
                    row.bound.to_string(),
                    tower,
                    row.reference
                )
                .unwrap();
            }
            s
        }
    }
}

fn optimize(a: &OptimizeArgs) -> Res<String> {
    let mut b = OptBudget::default();
    if let Some(g) = &a.grid {
        b.grid = (g[0], g[1]);
    }
    if let Some(v) = a.theta_seeds {
        b.theta_seeds = v;
    }
    if let Some(v) = a.max_iters {
        b.max_iters = v;
    }
    if let Some(p) = &a.phi_range {
        b.phi_range = Some((p[0], p[1]));
    }
    if let Some(v) = a.pair_filter {
        b.pair_filter = v;
    }
    if let Some(v) = a.eps {
        b.eps = v;
    }
    let mut s = String::new();
    let (csv, fields) = match a.problem {
        Problem::Lemma1 => {
            let r = optimize_lemma1(&b).map_err(err)?;
            let p = r.argmax;
            writeln!(s, "problem = lemma1").unwrap();
            writeln!(s, "best_value = {}", num(r.best_value)).unwrap();
            let f = [("a", p.a), ("b", p.b), ("x", p.x), ("y", p.y), ("z", p.z)];
            (r.start_table_csv(&["phi", "psi"]), (f.to_vec(), r.starts, r.converged_starts, r.constraint_residual))
        }
        Problem::Lemma2 => {
            let r = optimize_lemma2(&b).map_err(err)?;
            let p = r.argmax;
            writeln!(s, "problem = lemma2").unwrap();
            writeln!(s, "best_value = {}", num(r.best_value)).unwrap();
            let f = [("a", p.a), ("b", p.b), ("x", p.x), ("y", p.y)];
            (r.start_table_csv(&["b", "a", "theta"]), (f.to_vec(), r.starts, r.converged_starts, r.constraint_residual))
        }
    };
    let (params, starts, converged, residual) = fields;
    for (k, v) in params {
        writeln!(s, "argmax.{k} = {}", num(v)).unwrap();
    }
    writeln!(s, "starts = {starts}").unwrap();
    writeln!(s, "converged_starts = {converged}").unwrap();
    writeln!(s, "constraint_residual = {}", num(residual)).unwrap();
    if let Some(p) = &a.starts_csv {
        std::fs::write(p, csv).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    Ok(s)
}

fn shtogrin(n: u32) -> Res<String> {
    if n < 2 {
        return Err("n must be at least 2".into());
    }
    let v: f64 = shtogrin_step_bound(n);
    Ok(format!("n = {n}\nbound = {}\n", num(v)))
}
