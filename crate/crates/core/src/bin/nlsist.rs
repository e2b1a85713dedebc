use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nlsist::flow::Convention;
use nlsist::io::{save_field, save_spectral};
use nlsist::manifest::{ExperimentKind, ExperimentManifest};
use nlsist::runner::{self, ExperimentReport};
use nlsist::validation::{self, IDS};
use nlsist::{Error, Result};

#[derive(Parser)]
#[command(name = "nlsist", version, about = "Inverse scattering toolkit for the focusing cubic NLS equation")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Common {
    /// Experiment manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Times overriding the manifest, comma separated.
    #[arg(long = "t", value_delimiter = ',', allow_negative_numbers = true)]
    t: Vec<f64>,
    /// Output file, or directory for verbs writing several files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sign convention of the spectral flow.
    #[arg(long)]
    convention: Option<Convention>,
}

#[derive(Subcommand)]
enum Verb {
    /// Scatter the manifest datum and write its spectral data as JSON.
    Scatter(Common),
    /// Rebuild u(t, x) from spectral data by RH solves.
    Reconstruct(Common),
    /// Evolve spectral data in time and write the result as JSON.
    EvolveSpectral(Common),
    /// Run the strip / evolve / recombine pipeline against split-step.
    Backlund(Common),
    /// Integrate the datum with the split-step reference solver.
    Simulate(Common),
    /// Write the leading-order long-time prediction.
    Asymptote(Common),
    /// Run the manifest as declared by its `kind`.
    Run(Common),
    /// Run the acceptance suite.
    Validate {
        /// Criteria to run, comma separated (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(c: &Common, kind: Option<ExperimentKind>) -> Result<ExperimentManifest> {
    let mut m = ExperimentManifest::load(&c.manifest)?;
    if !c.t.is_empty() {
        m.times = c.t.clone();
    }
    if let Some(conv) = c.convention {
        m.convention = conv;
    }
    if let Some(k) = kind {
        m.kind = k;
    }
    if let Some(out) = &c.out {
        m.output_dir = out.clone();
    }
    Ok(m)
}

fn single_time(m: &ExperimentManifest) -> Result<f64> {
    match m.times.as_slice() {
        [] => Ok(0.0),
        [t] => Ok(*t),
        ts => Err(Error::Manifest(format!("this verb takes one time, got {}", ts.len()))),
    }
}

/// `--out` when given, otherwise `name` inside the manifest output directory.
fn target(c: &Common, m: &ExperimentManifest, name: &str) -> Result<PathBuf> {
    let path = c.out.clone().unwrap_or_else(|| m.output_dir.join(name));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(path)
}

fn finish_report(report: &ExperimentReport) -> ExitCode {
    for row in &report.rows {
        let verdict = match row.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "    ",
        };
        println!("{} {verdict} {} = {:.6e}{}", row.criterion, row.quantity, row.value, row.limit.as_deref().map(|l| format!(" ({l})")).unwrap_or_default());
    }
    for e in &report.errors {
        eprintln!("error in {}: {}", e.stage, e.message);
    }
    for p in &report.outputs {
        println!("wrote {}", p.display());
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn wrote(path: &Path) -> ExitCode {
    println!("wrote {}", path.display());
    ExitCode::SUCCESS
}

fn execute(verb: Verb) -> Result<ExitCode> {
    Ok(match verb {
        Verb::Scatter(c) => {
            let m = load(&c, None)?;
            let data = runner::scatter_manifest(&m)?;
            for e in data.discrete() {
                println!("eigenvalue {} norming constant {}", e.z, e.c);
            }
            println!("sup |r| = {:.3e}", data.sup_r());
            let path = target(&c, &m, "spectral.json")?;
            save_spectral(&path, &data)?;
            wrote(&path)
        }
        Verb::EvolveSpectral(c) => {
            let m = load(&c, None)?;
            let t = single_time(&m)?;
            let path = target(&c, &m, &format!("spectral_t{t}.json"))?;
            save_spectral(&path, &runner::evolve_spectral_data(&m, t)?)?;
            wrote(&path)
        }
        Verb::Reconstruct(c) => {
            let m = load(&c, None)?;
            let t = single_time(&m)?;
            let data = match &m.spectral {
                Some(p) => nlsist::io::load_spectral(p)?,
                None => runner::scatter_manifest(&m)?,
            };
            let f = runner::reconstruct_field(&data, t, m.convention, &m.grids.x, m.window())?;
            let path = target(&c, &m, &format!("u_t{t}.csv"))?;
            save_field(&path, &f)?;
            wrote(&path)
        }
        Verb::Simulate(c) => {
            let m = load(&c, None)?;
            let times = if m.times.is_empty() { vec![m.integrator.t_end] } else { m.times.clone() };
            let snaps = runner::simulate(&m, &times)?;
            let dir = c.out.clone().unwrap_or_else(|| m.output_dir.clone());
            std::fs::create_dir_all(&dir)?;
            for (t, s) in times.iter().zip(&snaps) {
                let path = dir.join(format!("u_t{t}.bin"));
                save_field(&path, s)?;
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Verb::Asymptote(c) => {
            let m = load(&c, None)?;
            let t = single_time(&m)?;
            let path = target(&c, &m, &format!("asymptote_t{t}.csv"))?;
            save_field(&path, &runner::asymptote(&m, t)?)?;
            wrote(&path)
        }
        Verb::Backlund(c) => finish_report(&runner::run(&load(&c, Some(ExperimentKind::BacklundPipeline))?)),
        Verb::Run(c) => finish_report(&runner::run(&load(&c, None)?)),
        Verb::Validate { only, out } => {
            let ids: Vec<&str> = if only.is_empty() { IDS.to_vec() } else { only.iter().map(String::as_str).collect() };
            let report = validation::run_with(&ids, |c| println!("{c}"));
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_string_pretty(&report)?)?;
                println!("wrote {}", path.display());
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("NLSIST_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("warning: NLSIST_THREADS ignored: {e}");
        }
    }
    match execute(cli.verb) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
