use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use helmsource::degeneracy::DegeneracyPolicy;
use helmsource::dtn::neumann_from_dirichlet;
use helmsource::experiment::{run_experiment, sweep_noise, synthesize, ExperimentConfig, Method, Status};
use helmsource::noise::add_noise;
use helmsource::output::{data_csv, summary_json, write_atomic, write_run, write_sweep};
use helmsource::sources::{ProfileId, SourceSpec};
use helmsource::validate::validate;
use helmsource::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

#[derive(Parser)]
#[command(name = "helmsource", version, about = "Multi-frequency inverse source experiments for the 2-D Helmholtz equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize (optionally noisy) near-field data and write data.csv.
    Forward(Common),
    /// Reconstruct the source at each selected wavenumber.
    Reconstruct(Common),
    /// Mean reconstruction error over seeds for several noise levels.
    SweepNoise {
        #[command(flatten)]
        common: Common,
        /// Comma-separated noise levels; overrides the config sweep.
        #[arg(long, value_delimiter = ',')]
        deltas: Vec<f64>,
        /// Truncation per noise level, comma-separated.
        #[arg(long, value_delimiter = ',')]
        truncations: Vec<usize>,
        /// Number of seeds, starting from --seed (or 0).
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Run the built-in oracle checks and write validation.json.
    Validate(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["dl", "ft"])]
    method: Option<String>,
    /// Catalog profile f1..f5.
    #[arg(long)]
    source: Option<String>,
    /// Comma-separated wavenumbers.
    #[arg(long, value_delimiter = ',')]
    k: Vec<f64>,
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long)]
    noise_delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    k_shift: Option<f64>,
    /// Treat modes at the branch point sqrt(0) as failures.
    #[arg(long)]
    paper_faithful_degeneracy: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn build(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<ExperimentConfig>(&text)
                    .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))?
            }
            None => {
                let source = self
                    .source
                    .as_deref()
                    .ok_or_else(|| Error::Config("either --config or --source is required".into()))?;
                let method = self.method.as_deref().unwrap_or("dl").parse::<Method>()?;
                ExperimentConfig::new(method, SourceSpec::catalog(source.parse::<ProfileId>()?))
            }
        };
        if self.config.is_some() {
            if let Some(m) = &self.method {
                cfg.method = m.parse()?;
            }
            if let Some(s) = &self.source {
                cfg.source = SourceSpec::catalog(s.parse()?);
            }
        }
        if !self.k.is_empty() {
            cfg.k_values = self.k.clone();
            cfg.k_indices.clear();
        }
        if let Some(n) = self.truncation {
            cfg.truncation = Some(n);
        }
        if let Some(d) = self.noise_delta {
            cfg.noise.delta = d;
        }
        if let Some(s) = self.seed {
            cfg.noise.seed = s;
        }
        if let Some(shift) = self.k_shift {
            cfg.k_shift = shift;
        }
        if self.paper_faithful_degeneracy {
            cfg.degeneracy = DegeneracyPolicy { paper_faithful: true, ..cfg.degeneracy };
        }
        if let Some(out) = &self.out {
            cfg.output_dir = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Degenerate { .. } => EXIT_DEGENERATE,
        Error::QuadratureNotConverged { .. } => EXIT_VALIDATION,
        _ => EXIT_CONFIG,
    }
}

fn forward(common: &Common) -> Result<u8, Error> {
    let cfg = common.build()?;
    let data = add_noise(&synthesize(&cfg)?, &cfg.noise)?;
    let data = neumann_from_dirichlet(&data, cfg.dtn_order)?;
    let dir = out_dir(&cfg);
    write_atomic(&dir.join("data.csv"), &data_csv(&data)?)?;
    let body = serde_json::json!({ "grid": data.grid, "dtn_order": data.dtn_order, "notes": data.notes });
    write_atomic(&dir.join("summary.json"), &summary_json(&cfg, body)?)?;
    println!("wrote {} wavenumbers x {} angles to {}", data.grid.wavenumbers.len(), data.grid.angles, dir.display());
    Ok(0)
}

fn reconstruct(common: &Common) -> Result<u8, Error> {
    let cfg = common.build()?;
    let outcome = run_experiment(&cfg)?;
    let dir = out_dir(&cfg);
    write_run(&dir, &cfg, &outcome.data, &outcome.results)?;
    let mut code = 0;
    for r in &outcome.results {
        match (r.status, r.relative_l2_error) {
            (Status::Ok, Some(e)) => println!("{} k={:.6} N={} error={e:.6e}", r.method, r.k, r.truncation),
            (status, _) => {
                if status == Status::Degenerate {
                    code = EXIT_DEGENERATE;
                }
                let msg = r.message.as_deref().unwrap_or("");
                eprintln!("{} k={:.6} N={} {status:?}: {msg}", r.method, r.k, r.truncation);
            }
        }
    }
    Ok(code)
}

fn sweep(common: &Common, deltas: &[f64], truncations: &[usize], seeds: Option<usize>) -> Result<u8, Error> {
    let cfg = common.build()?;
    let from_cfg = cfg.sweep.clone();
    // flags replace the config sweep as a whole
    let (deltas, truncations) = match (&from_cfg, deltas.is_empty()) {
        (Some(s), true) => (s.deltas.clone(), s.truncations.clone()),
        _ => (deltas.to_vec(), truncations.to_vec()),
    };
    let first = common.seed.or(from_cfg.as_ref().map(|s| s.first_seed)).unwrap_or(0);
    let count = seeds.or(from_cfg.as_ref().map(|s| s.seed_count)).unwrap_or(20);
    let seeds: Vec<u64> = (0..count as u64).map(|i| first + i).collect();
    let table = sweep_noise(&cfg, &deltas, &truncations, &seeds)?;
    let dir = out_dir(&cfg);
    write_sweep(&dir, &cfg, &table)?;
    for m in &table.means {
        match m.mean_error {
            Some(e) => println!("delta={} N={} k={:.6} mean_error={e:.6e} ({} seeds)", m.delta, m.truncation, m.k, m.successes),
            None => println!("delta={} N={} k={:.6} all {} seeds failed", m.delta, m.truncation, m.k, m.failures),
        }
    }
    Ok(if table.means.iter().any(|m| m.mean_error.is_none()) { EXIT_DEGENERATE } else { 0 })
}

fn run_validate(common: &Common) -> Result<u8, Error> {
    let cfg = common.build()?;
    let report = validate(&cfg)?;
    let dir = out_dir(&cfg);
    let mut bytes = serde_json::to_vec_pretty(&report)?;
    bytes.push(b'\n');
    write_atomic(&dir.join("validation.json"), &bytes)?;
    for c in &report.checks {
        let value = c.value.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into());
        println!("{} {} value={value} tolerance={:.1e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.tolerance);
    }
    Ok(if report.passed { 0 } else { EXIT_VALIDATION })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors share the config exit code; help and version succeed
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Forward(c) => forward(c),
        Command::Reconstruct(c) => reconstruct(c),
        Command::SweepNoise { common, deltas, truncations, seeds } => sweep(common, deltas, truncations, *seeds),
        Command::Validate(c) => run_validate(c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
