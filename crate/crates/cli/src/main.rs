use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{CommandFactory, Parser, Subcommand};
use traversal_core::nelson::{backward_transmitted_paths, persist, PathOptions};
use traversal_core::sideband::{
    default_observation_point, solve_rectangular, static_coefficients, time_averaged_transmission, transmitted_current,
};
use traversal_core::SolveMethod;
use traversal_lab::acceptance;
use traversal_lab::config::LabConfig;
use traversal_lab::nelson_run::{propagate_for, run_nelson_on};
use traversal_lab::output::{emit_csv, emit_plot_script, format_g};
use traversal_lab::scan::{run_scan, ScanSpec};
use traversal_lab::Axis;

/// Trajectories written by `nelson`.
const DUMPED_TRAJECTORIES: usize = 20;

#[derive(Parser, Debug)]
#[command(name = "traversal-lab", version, about = "Traversal times through an oscillating barrier")]
struct Cli {
    /// Config file (`section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides `nelson.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, global = true, env = "TRAVERSAL_LAB_THREADS")]
    threads: Option<usize>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the scan described by the config and write CSV plus a gnuplot script.
    Scan,
    /// Transmitted current over one modulation period.
    Current,
    /// Time-averaged transmission against modulation frequency.
    Tbar,
    /// One Nelson ensemble with a trajectory dump.
    Nelson,
    /// Run the acceptance suite and print a summary table.
    Check {
        /// Comma-separated criterion numbers, e.g. `1,2,6`.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Exit with status 1 when any criterion fails.
        #[arg(long)]
        strict: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load(cli: &Cli) -> Result<LabConfig> {
    let mut cfg = match &cli.config {
        Some(p) => LabConfig::from_path(p)?,
        None => LabConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.nelson.seed = s;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Scan => {
            if cli.config.is_none() {
                Cli::command()
                    .error(clap::error::ErrorKind::MissingRequiredArgument, "scan needs --config")
                    .exit();
            }
            scan(cli)?
        }
        Command::Current => current(cli)?,
        Command::Tbar => tbar(cli)?,
        Command::Nelson => nelson(cli)?,
        Command::Check { only, strict } => return check(cli, only, *strict),
    }
    Ok(ExitCode::SUCCESS)
}

fn out_dir(cli: &Cli) -> Result<&Path> {
    fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    Ok(&cli.out)
}

fn stem(cli: &Cli, fallback: &str) -> String {
    cli.config
        .as_ref()
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| fallback.to_string())
}

fn scan(cli: &Cli) -> Result<()> {
    let cfg = load(cli)?;
    let spec = ScanSpec::from_config(&cfg)?;
    let dir = out_dir(cli)?;
    if cli.verbose {
        eprintln!("scanning {} over {} points", spec.axis(), spec.scan.n_points);
    }
    let rows = run_scan(&spec, cfg.nelson.seed);
    let name = stem(cli, "scan");
    let csv_name = format!("{name}.csv");
    emit_csv(&rows, &dir.join(&csv_name))?;
    let label = match spec.axis() {
        Axis::Width => "d",
        Axis::HeightRatio => "V0/E0",
        Axis::Frequency => "omega",
    };
    emit_plot_script(&rows, &dir.join(format!("{name}.gp")), &csv_name, label)?;
    if cli.verbose {
        for r in &rows {
            if !r.flags.is_empty() {
                eprintln!("{} = {}: {}", spec.axis(), format_g(r.axis_value), r.flags.join("; "));
            }
        }
    }
    println!("wrote {} rows to {}", rows.len(), dir.join(&csv_name).display());
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn line_plot(csv: &str, x: &str, y: &str, cols: &str) -> String {
    let stem = csv.trim_end_matches(".csv");
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset terminal svg size 800,560 dynamic\n\
         set output '{stem}.svg'\nset xlabel '{x}'\nset ylabel '{y}'\nset grid\nplot '{csv}' using {cols} with lines lw 2\n"
    )
}

fn current(cli: &Cli) -> Result<()> {
    let cfg = load(cli)?;
    let barrier = cfg.barrier.spec()?;
    let (sol, nudged) = solve_rectangular(cfg.energy, &barrier, &cfg.units, cfg.n_eff, SolveMethod::FullMatching)?;
    if cfg.barrier.omega <= 0.0 {
        bail!("current needs barrier.omega > 0");
    }
    let l = default_observation_point(&sol);
    let period = std::f64::consts::TAU / cfg.barrier.omega;
    let n = cfg.current_samples;
    let mut text = String::from("t,current\n");
    for j in 0..=n {
        let t = period * j as f64 / n as f64;
        text.push_str(&format!("{},{}\n", format_g(t), format_g(transmitted_current(&sol, l, t)?)));
    }
    let dir = out_dir(cli)?;
    write_text(&dir.join("current.csv"), &text)?;
    write_text(&dir.join("current.gp"), &line_plot("current.csv", "t", "T(t)", "1:2"))?;
    if nudged {
        eprintln!("note: incident energy nudged off a branch point");
    }
    println!("detection point L = {}, {} samples over one period", format_g(l), n + 1);
    Ok(())
}

fn tbar(cli: &Cli) -> Result<()> {
    let cfg = load(cli)?;
    let t = &cfg.tbar;
    let mut text = String::from("omega,T_bar,T_static,flags\n");
    for j in 0..t.n_points {
        let omega = t.omega_lo + (t.omega_hi - t.omega_lo) * j as f64 / (t.n_points - 1) as f64;
        let mut c = cfg.clone();
        c.barrier.omega = omega;
        let barrier = c.barrier.spec()?;
        let (_, d0) = static_coefficients(c.energy, &barrier, &c.units)?;
        let (sol, nudged) = solve_rectangular(c.energy, &barrier, &c.units, c.n_eff, SolveMethod::FullMatching)?;
        let mut flags = Vec::new();
        if nudged {
            flags.push("branch_nudged");
        }
        if !sol.closed_orders().is_empty() {
            flags.push("closed_channels");
        }
        text.push_str(&format!(
            "{},{},{},{}\n",
            format_g(omega),
            format_g(time_averaged_transmission(&sol)),
            format_g(d0.norm_sqr()),
            flags.join(";")
        ));
    }
    let dir = out_dir(cli)?;
    write_text(&dir.join("tbar.csv"), &text)?;
    write_text(&dir.join("tbar.gp"), &line_plot("tbar.csv", "omega", "time-averaged T", "1:2"))?;
    println!("wrote {} frequencies to {}", t.n_points, dir.join("tbar.csv").display());
    Ok(())
}

fn nelson(cli: &Cli) -> Result<()> {
    let cfg = load(cli)?;
    let seed = cfg.nelson.seed;
    let opts = PathOptions::new(cfg.nelson.sde_dt);
    if cli.verbose {
        eprintln!("propagating and sampling {} transmitted paths (seed {seed})", cfg.nelson.paths);
    }
    let field = propagate_for(&cfg)?;
    let out = run_nelson_on(&field, cfg.nelson.paths, seed, &opts)?;
    let dir = out_dir(cli)?;
    let file = fs::File::create(dir.join("nelson_paths.csv"))?;
    persist::write_ensemble_csv(&out.ensemble, std::io::BufWriter::new(file))?;

    // path i depends only on (seed, i), so the first paths re-run identically
    // with recording switched on
    let steps = (field.grid.duration() / cfg.nelson.sde_dt).round() as usize;
    let every = (steps / 500).max(1);
    let traced = backward_transmitted_paths(&field, DUMPED_TRAJECTORIES, seed, &opts.recording(every))?;
    let file = fs::File::create(dir.join("nelson_trajectories.csv"))?;
    persist::write_trajectories_csv(&traced, std::io::BufWriter::new(file))?;

    let mut summary = String::new();
    summary.push_str(&format!("tau_nelson = {} +- {}\n", format_g(out.tau.mean), format_g(out.tau.std_error)));
    summary.push_str(&format!("paths_used = {}\n", out.tau.n_used));
    if let Some(c) = out.crossing {
        summary.push_str(&format!("tau_last_crossing = {} +- {}\n", format_g(c.mean), format_g(c.std_error)));
    }
    summary.push_str(&format!("transmitted_weight = {}\n", format_g(out.transmitted_weight)));
    summary.push_str(&format!("clamped_paths = {}\n", out.ensemble.n_clamped()));
    summary.push_str(&format!("exited_paths = {}\n", out.ensemble.n_exited()));
    summary.push_str(&format!("broad_spectrum = {}\n", out.broad_spectrum));
    summary.push_str(&format!("seed = {seed}\n"));
    write_text(&dir.join("nelson_summary.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn check(cli: &Cli, only: &[u8], strict: bool) -> Result<ExitCode> {
    if cli.config.is_some() {
        load(cli)?;
    }
    let ids: Vec<u8> = if only.is_empty() { acceptance::ALL.to_vec() } else { only.to_vec() };
    if let Some(bad) = ids.iter().find(|i| !acceptance::ALL.contains(i)) {
        Cli::command()
            .error(clap::error::ErrorKind::InvalidValue, format!("no acceptance criterion {bad}"))
            .exit();
    }
    let mut results = Vec::new();
    let mut stdout = std::io::stdout();
    for id in ids {
        let c = acceptance::run(id);
        writeln!(stdout, "{}", c.line())?;
        stdout.flush()?;
        results.push(c);
    }
    let passed = results.iter().filter(|c| c.passed).count();
    println!("{passed}/{} criteria passed", results.len());
    Ok(if strict && passed < results.len() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}
