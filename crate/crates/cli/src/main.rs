//! `sdlab`: experiment runner for the Schrödinger-Debye laboratory.
//!
//! Exit codes: 0 on success, 2 on configuration or usage errors, 3 on numerical aborts.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sdlab_core::config::ExperimentConfig;
use sdlab_core::experiments::{
    run_almost_conservation, run_audit, run_conservation, run_norms, run_sigma_limit, run_v_bound,
};
use sdlab_core::rational::{format_rational, parse_rational};
use sdlab_core::report::{self, Manifest, Table};
use sdlab_core::{experiments, Error, Result};

#[derive(Parser)]
#[command(
    name = "sdlab",
    version,
    about = "Schrödinger-Debye numerical experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Key-value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `out.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured data; trajectory and conservation diagnostics.
    Simulate(Common),
    /// Scaling sweep of one counter-example family.
    Audit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Modified-energy increments over a local window for each cutoff.
    AlmostConservation(Common),
    /// Distance to cubic NLS along a decreasing sigma list.
    SigmaLimit(Common),
    /// Sobolev and windowed Bourgain norms.
    Norms(Common),
    /// Exact threshold -6l/(5+8l).
    GwpExponent {
        #[arg(long = "l", allow_hyphen_values = true)]
        ell: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Sup of the v norm against max(|v0|, C |u0|^2).
    VBound(Common),
}

fn load(common: &Common, required: bool) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None if required => return Err(Error::Config("--config is required".into())),
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn emit(
    name: &str,
    cfg: &ExperimentConfig,
    tables: Vec<(&str, Table)>,
    summary: &impl serde::Serialize,
) -> Result<()> {
    let names: Vec<&str> = tables.iter().map(|(n, _)| *n).collect();
    let manifest = Manifest::new(name, cfg, &names, summary)?;
    let files: Vec<(&str, String)> = tables.iter().map(|(n, t)| (*n, t.to_csv())).collect();
    report::write_outputs(Path::new(&cfg.out_dir), &files, &manifest)?;
    log::info!(
        "wrote {} files to {}",
        files.len() + 1,
        cfg.out_dir.display()
    );
    println!("{}", serde_json::to_string_pretty(&manifest.summary)?);
    Ok(())
}

fn named(cfg: &mut ExperimentConfig, name: &str) -> String {
    cfg.experiment
        .get_or_insert_with(|| name.to_string())
        .clone()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(c) => {
            let mut cfg = load(&c, true)?;
            let name = named(&mut cfg, "simulate");
            let r = run_conservation(&cfg)?;
            let tables = vec![
                ("report.csv", report::trajectory_table(&r.trajectory)?),
                ("conservation.csv", report::conservation_table(&r)?),
            ];
            emit(&name, &cfg, tables, &r)
        }
        Command::Audit {
            common,
            family,
            k,
            s,
            nmax,
        } => {
            let mut cfg = load(&common, false)?;
            if let Some(f) = family {
                cfg.audit.family = f.parse()?;
            }
            if let Some(k) = k {
                cfg.audit.k = parse_rational(&k)?;
            }
            if let Some(s) = s {
                cfg.audit.s = parse_rational(&s)?;
            }
            if let Some(n) = nmax {
                cfg.audit.nmax = n;
            }
            let name = named(&mut cfg, "audit");
            let r = run_audit(&cfg)?;
            emit(
                &name,
                &cfg,
                vec![("report.csv", report::audit_table(&r)?)],
                &r,
            )
        }
        Command::AlmostConservation(c) => {
            let mut cfg = load(&c, true)?;
            let name = named(&mut cfg, "almost-conservation");
            let r = run_almost_conservation(&cfg)?;
            emit(&name, &cfg, vec![("report.csv", report::ac_table(&r)?)], &r)
        }
        Command::SigmaLimit(c) => {
            let mut cfg = load(&c, true)?;
            let name = named(&mut cfg, "sigma-limit");
            let r = run_sigma_limit(&cfg)?;
            emit(
                &name,
                &cfg,
                vec![("report.csv", report::sigma_table(&r)?)],
                &r,
            )
        }
        Command::Norms(c) => {
            let mut cfg = load(&c, true)?;
            let name = named(&mut cfg, "norms");
            let rows = run_norms(&cfg)?;
            emit(
                &name,
                &cfg,
                vec![("report.csv", report::norms_table(&rows)?)],
                &rows,
            )
        }
        Command::VBound(c) => {
            let mut cfg = load(&c, true)?;
            let name = named(&mut cfg, "v-bound");
            let r = run_v_bound(&cfg)?;
            emit(
                &name,
                &cfg,
                vec![("report.csv", report::v_bound_table(&r)?)],
                &r,
            )
        }
        Command::GwpExponent { ell, common } => {
            let mut cfg = load(&common, false)?;
            if let Some(l) = ell {
                cfg.sweep.ell = parse_rational(&l)?;
            }
            let r = experiments::gwp_exponent(cfg.sweep.ell)?;
            println!("{}", format_rational(&r));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
