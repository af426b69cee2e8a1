use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use nlets::css::{css_distance_with_limit, CssCode, MAX_CSS_DISTANCE_DIM};
use nlets::expansion::{empirical_vertex_theorem, TrialConfig};
use nlets::hgp::{hypergraph_product, structural_report};
use nlets::pipeline::{
    run_structural_audit, run_warmup, write_atomic, write_json_atomic, AuditConfig,
    ExperimentConfig, GraphSpec, NletsRunner, WarmupConfig,
};

#[derive(Parser)]
#[command(
    name = "nlets",
    about = "Hypergraph-product codes and circuit-depth lower bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Builds the product code of a graph and writes it as a CSS code file.
    Build(Common),
    /// Structural audit of a product code.
    Audit(Common),
    /// Class masses and depth bound of an error-free code state.
    Warmup(Common),
    /// Seeded impostor runs on residual subcodes.
    Nlets {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        runs: Option<u64>,
    },
    /// Random-circuit checks of the vertex-expansion bound.
    ExpansionTrials {
        #[command(flatten)]
        common: Common,
        /// Ignore checks whose stated radius is below 1, where every boundary is empty.
        #[arg(long)]
        nonvacuous: bool,
    },
    /// Parameters of a CSS code file.
    Css {
        #[arg(long)]
        code: PathBuf,
        #[arg(long, default_value_t = MAX_CSS_DISTANCE_DIM)]
        max_dim: usize,
    },
}

#[derive(Deserialize)]
struct BuildConfig {
    graph: GraphSpec,
}

#[derive(Serialize)]
struct CssParams {
    n: usize,
    k: usize,
    rank_x: usize,
    rank_z: usize,
    max_check_weight: usize,
    distance: Option<usize>,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn reseed(graph: &mut GraphSpec, seed: Option<u64>) {
    if let (GraphSpec::RandomRegular { seed: s, .. }, Some(new)) = (graph, seed) {
        *s = new;
    }
}

/// Exit status: 0 when every assertion holds, 2 on a falsification.
fn verdict(holds: bool) -> u8 {
    if holds {
        0
    } else {
        2
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Build(c) => {
            let mut cfg: BuildConfig = read_json(&c.config)?;
            reseed(&mut cfg.graph, c.seed);
            let h = hypergraph_product(&cfg.graph.build()?)?;
            write_atomic(&c.out, h.code.to_text().as_bytes())?;
            println!(
                "{}",
                serde_json::to_string_pretty(&structural_report(&h, MAX_CSS_DISTANCE_DIM))?
            );
            Ok(0)
        }
        Command::Audit(c) => {
            let mut cfg: AuditConfig = read_json(&c.config)?;
            reseed(&mut cfg.graph, c.seed);
            let r = run_structural_audit(&cfg)?;
            write_json_atomic(&c.out, &r)?;
            Ok(verdict(r.holds()))
        }
        Command::Warmup(c) => {
            let cfg: WarmupConfig = read_json(&c.config)?;
            let code = cfg.code.build()?;
            let a = Complex64::new(cfg.alpha[0], cfg.alpha[1]);
            let b = Complex64::new(cfg.beta[0], cfg.beta[1]);
            let r = run_warmup(&code, cfg.logical_index, a, b, cfg.cap)?;
            write_json_atomic(&c.out, &r)?;
            Ok(verdict(r.holds()))
        }
        Command::Nlets { common: c, runs } => {
            let mut cfg: ExperimentConfig = read_json(&c.config)?;
            if let Some(s) = c.seed {
                cfg.seed = s;
            }
            if let Some(r) = runs {
                cfg.runs = r;
            }
            let batch = NletsRunner::new(cfg)?.run_all()?;
            write_json_atomic(&c.out, &batch)?;
            eprintln!(
                "{} runs, {} falsified",
                batch.runs.len(),
                batch.falsified_runs
            );
            Ok(verdict(batch.falsified_runs == 0))
        }
        Command::ExpansionTrials {
            common: c,
            nonvacuous,
        } => {
            let mut cfg: TrialConfig = read_json(&c.config)?;
            if let Some(s) = c.seed {
                cfg.seed = s;
            }
            let r = empirical_vertex_theorem(&cfg)?;
            write_json_atomic(&c.out, &r)?;
            let stated: u64 = if nonvacuous {
                r.per_gamma.iter().map(|g| g.violations_stated_unit).sum()
            } else {
                r.violations_stated()
            };
            eprintln!(
                "{} candidates; violations at stated radius {} ({} with radius >= 1), at proof radius {}",
                r.candidates,
                r.violations_stated(),
                r.per_gamma.iter().map(|g| g.violations_stated_unit).sum::<u64>(),
                r.violations_proof()
            );
            Ok(verdict(
                stated == 0 && r.violations_proof() == 0 && r.exhaustive_inconsistencies == 0,
            ))
        }
        Command::Css { code, max_dim } => {
            let text =
                fs::read_to_string(&code).with_context(|| format!("reading {}", code.display()))?;
            let c = CssCode::parse(&text)?;
            let p = CssParams {
                n: c.n(),
                k: c.k(),
                rank_x: c.rank_x(),
                rank_z: c.rank_z(),
                max_check_weight: c.hx().max_row_weight().max(c.hz().max_row_weight()),
                distance: css_distance_with_limit(&c, max_dim).ok(),
            };
            println!("{}", serde_json::to_string_pretty(&p)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
