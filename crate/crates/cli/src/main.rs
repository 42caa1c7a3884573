use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use surfgm_core::fem::{mesh_quality_report, Operators};
use surfgm_core::mesh::build_cubed_sphere;
use surfgm_core::sim::{
    convergence_study, preset, presets, reference_outcome, run_case, CaseResult, InitialCondition, RunConfig, Scale,
    StudyKind,
};
use surfgm_core::{vtk, Error, SchemeOrder};

/// Environment variable that replaces the configured output directory.
const OUTPUT_DIR_ENV: &str = "SURFGM_OUTPUT_DIR";

/// Exit status for runs that violate positivity or another state invariant.
const EXIT_INVARIANT: u8 = 2;

#[derive(Parser)]
#[command(name = "surfgm", version, about = "Surface Gierer-Meinhardt simulator on the unit sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a cubed-sphere mesh and report its statistics.
    Mesh {
        #[arg(long, default_value_t = 3)]
        level: u32,
        /// Write the mesh as legacy VTK polydata.
        #[arg(long)]
        vtk: Option<PathBuf>,
    },
    /// Simulate one configuration file.
    Run {
        config: PathBuf,
        /// Override `t_end` from the file.
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Run the eight reference cases and print a summary table.
    Cases {
        #[arg(long, value_enum, default_value_t = ScaleArg::Desk)]
        scale: ScaleArg,
        #[arg(long, value_parser = ["1", "2"], default_value = "2")]
        order: String,
        /// Shorter horizon for quick looks; must be a multiple of the step.
        #[arg(long)]
        t_end: Option<f64>,
        /// Run only cases whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Print the configuration file of one reference case.
    Preset {
        #[arg(long, default_value = "spike2_180")]
        ic: String,
        #[arg(long, default_value_t = 0.002)]
        k: f64,
        #[arg(long, value_enum, default_value_t = ScaleArg::Desk)]
        scale: ScaleArg,
        #[arg(long, value_parser = ["1", "2"], default_value = "2")]
        order: String,
    },
    /// Run a convergence study: temporal_order1, temporal_order2 or
    /// spatial_laplacian.
    Converge { kind: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Full,
}

impl From<ScaleArg> for Scale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Desk => Scale::Desk,
            ScaleArg::Full => Scale::Full,
        }
    }
}

fn order(s: &str) -> anyhow::Result<SchemeOrder> {
    Ok(s.parse()?)
}

fn apply_env(config: &mut RunConfig) {
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
        config.output_dir = Some(PathBuf::from(dir));
    }
}

fn with_t_end(config: &mut RunConfig, t_end: Option<f64>) -> anyhow::Result<()> {
    if let Some(t) = t_end {
        config.t_end = t;
        config.snapshots.retain(|&s| s <= t);
        let steps = config.n_steps().max(1);
        if !steps.is_multiple_of(config.csv_every) {
            config.csv_every = (1..=config.csv_every).rev().find(|c| steps.is_multiple_of(*c)).unwrap_or(1);
        }
        config.validate()?;
    }
    Ok(())
}

fn mesh_command(level: u32, vtk_path: Option<&Path>) -> anyhow::Result<()> {
    let mesh = build_cubed_sphere(level)?;
    let ops = Operators::assemble(&mesh)?;
    let quality = mesh_quality_report(&ops.stiffness);
    println!("level                      {level}");
    println!("vertices                   {}", mesh.n_vertices());
    println!("edges                      {}", mesh.n_edges());
    println!("triangles                  {}", mesh.n_triangles());
    println!("euler characteristic       {}", mesh.euler_characteristic());
    println!("area                       {:.12}", ops.area);
    println!("area error vs 4 pi         {:.3e}", ops.area - 4.0 * std::f64::consts::PI);
    println!("max edge length            {:.6e}", mesh.max_edge_length());
    println!("max radius deviation       {:.3e}", mesh.max_radius_deviation());
    println!("positive stiffness entries {}", quality.count());
    if let Some(path) = vtk_path {
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        vtk::write_polydata(BufWriter::new(file), &mesh, &format!("cubed sphere level {level}"), &[])?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn print_result(r: &CaseResult, seconds: f64) {
    println!("case        {}", r.name);
    println!("t           {}", r.t);
    println!("steps       {}", r.steps);
    println!("min u       {:.6e}", r.min_u);
    println!("max u       {:.6e}", r.max_u);
    println!("min v       {:.6e}", r.min_v);
    println!("max v       {:.6e}", r.max_v);
    println!("w           {:.6e}", r.w);
    match r.steady_since {
        Some(t) if r.steady => println!("steady      yes (since t = {t})"),
        _ => println!("steady      no"),
    }
    println!("pattern     {}", r.pattern);
    for s in &r.spikes {
        let p = s.position;
        println!("  spike     u = {:.4} at vertex {} ({:+.3}, {:+.3}, {:+.3})", s.value, s.vertex, p[0], p[1], p[2]);
    }
    if r.positive_stiffness_entries > 0 {
        println!("warning     {} positive off-diagonal stiffness entries", r.positive_stiffness_entries);
    }
    println!("wall time   {seconds:.1} s");
}

fn run_command(path: &Path, t_end: Option<f64>) -> anyhow::Result<()> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut config = RunConfig::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    apply_env(&mut config);
    with_t_end(&mut config, t_end)?;
    let start = Instant::now();
    let result = run_case(&config)?;
    print_result(&result, start.elapsed().as_secs_f64());
    Ok(())
}

fn cases_command(scale: Scale, order: SchemeOrder, t_end: Option<f64>, filter: Option<&str>) -> anyhow::Result<()> {
    let mut failures = Vec::new();
    println!(
        "{:<22} {:<22} {:>11} {:>9} {:>7} | {:<18} {:>10} {:>8} time",
        "case", "pattern", "min u", "max u", "steady", "reference", "min u", "max u"
    );
    for mut config in presets(scale, order) {
        if filter.is_some_and(|f| !config.name.contains(f)) {
            continue;
        }
        apply_env(&mut config);
        with_t_end(&mut config, t_end)?;
        let reference = reference_outcome(config.ic, config.params.k).expect("every preset has a reference row");
        let refcols = format!(
            "{:<18} {:>10.3e} {:>8.3}{}",
            reference.pattern,
            reference.min_u,
            reference.max_u,
            if reference.transient { " (*)" } else { "" }
        );
        let start = Instant::now();
        match run_case(&config) {
            Ok(r) => println!(
                "{:<22} {:<22} {:>11.3e} {:>9.4} {:>7} | {refcols} {:.0}s",
                r.name,
                r.pattern.to_string(),
                r.min_u,
                r.max_u,
                if r.steady { "yes" } else { "no" },
                start.elapsed().as_secs_f64()
            ),
            Err(e) => {
                println!("{:<22} FAILED: {e}", config.name);
                failures.push(e);
            }
        }
    }
    if let Some(first) = failures.into_iter().next() {
        return Err(first).context("at least one case failed");
    }
    Ok(())
}

fn preset_command(ic: &str, k: f64, scale: Scale, order: SchemeOrder) -> anyhow::Result<()> {
    let ic: InitialCondition = ic.parse()?;
    if reference_outcome(ic, k).is_none() {
        bail!("no reference case with K = {k}");
    }
    print!("{}", preset(ic, k, scale, order).to_text());
    Ok(())
}

fn converge_command(kind: &str) -> anyhow::Result<()> {
    let kind: StudyKind = kind.parse()?;
    println!("{}", convergence_study(kind)?);
    Ok(())
}

fn is_invariant_violation(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        matches!(
            e.downcast_ref::<Error>(),
            Some(Error::StateInvariant { .. } | Error::PositivityLoss { .. } | Error::PositivityViolation { .. })
        )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mesh { level, vtk } => mesh_command(level, vtk.as_deref()),
        Command::Run { config, t_end } => run_command(&config, t_end),
        Command::Cases {
            scale,
            order: o,
            t_end,
            filter,
        } => order(&o).and_then(|o| cases_command(scale.into(), o, t_end, filter.as_deref())),
        Command::Preset { ic, k, scale, order: o } => order(&o).and_then(|o| preset_command(&ic, k, scale.into(), o)),
        Command::Converge { kind } => converge_command(&kind),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_invariant_violation(&e) {
                ExitCode::from(EXIT_INVARIANT)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
