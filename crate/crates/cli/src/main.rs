mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use commands::*;
use config::{Command, ConfigError, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;
use stdmap::Exec;

#[derive(Parser)]
#[command(name = "stdmap", version, about = "Cocycle and spectral experiments for standard-map families")]
struct Cli {
    /// Worker threads for the parallel pool.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run every sweep sequentially in a fixed order.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Output directory; without it the JSON report goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print the effective config as JSON instead of running.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    cmd: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Run a JSON config file.
    Run { config: PathBuf },
    /// Grid-averaged Lyapunov exponent of the standard map.
    Lyapunov(LyapunovParams),
    /// Bound constants over a λ grid.
    Bounds(BoundsParams),
    /// Cube-exchange approximation of the standard map.
    Lax(LaxParams),
    /// Spectral curves of a periodic Jacobi operator.
    Spectrum(SpectrumParams),
    /// w-spectrum over a periodic base.
    Wspectrum(WSpectrumParams),
    /// Density of states from pooled truncations.
    Dos(DosParams),
    /// Thouless formula residual.
    Thouless(ThoulessParams),
    /// Determinant product formula for a product of two operators.
    Detprod(DetProdParams),
    /// Jensen formula in annular sectors.
    Jensen(JensenParams),
    /// Harnack harness and harmonic continuation.
    Harmonic(HarmonicParams),
    /// Wiener test for point spectrum.
    Wiener(WienerParams),
    /// Aubry duality gap.
    Duality(DualityParams),
    /// Momentum diffusion of the standard map.
    Diffusion(DiffusionParams),
    /// Distribution of finite-time exponents.
    Distribution(DistributionParams),
    /// Rotated Jacobian cocycles and cone certificates.
    Herman(HermanParams),
    /// Acceptance criteria or invariants battery.
    Suite {
        /// `acceptance` or `invariants`.
        name: String,
        /// Only the criteria that finish in seconds.
        #[arg(long)]
        quick: bool,
        /// Run a single criterion.
        #[arg(long)]
        only: Option<String>,
    },
}

/// Acceptance criteria that run in seconds.
const QUICK: [&str; 6] = ["constants", "mu_n_anchor", "jacobi_oracles", "jensen_sector", "herman_spectrum", "harnack_harness"];

fn command_of(sub: Sub) -> Option<Command> {
    Some(match sub {
        Sub::Lyapunov(p) => Command::Lyapunov(p),
        Sub::Bounds(p) => Command::Bounds(p),
        Sub::Lax(p) => Command::Lax(p),
        Sub::Spectrum(p) => Command::Spectrum(p),
        Sub::Wspectrum(p) => Command::WSpectrum(p),
        Sub::Dos(p) => Command::Dos(p),
        Sub::Thouless(p) => Command::Thouless(p),
        Sub::Detprod(p) => Command::DetProd(p),
        Sub::Jensen(p) => Command::Jensen(p),
        Sub::Harmonic(p) => Command::Harmonic(p),
        Sub::Wiener(p) => Command::Wiener(p),
        Sub::Duality(p) => Command::Duality(p),
        Sub::Diffusion(p) => Command::Diffusion(p),
        Sub::Distribution(p) => Command::Distribution(p),
        Sub::Herman(p) => Command::Herman(p),
        Sub::Run { .. } | Sub::Suite { .. } => return None,
    })
}

fn dispatch(c: &Command, exec: Exec) -> anyhow::Result<output::Artifacts> {
    match c {
        Command::Lyapunov(p) => lyapunov(p, exec),
        Command::Bounds(p) => bounds_cmd(p, exec),
        Command::Lax(p) => lax(p, exec),
        Command::Spectrum(p) => spectrum(p, exec),
        Command::WSpectrum(p) => wspectrum(p, exec),
        Command::Dos(p) => dos(p, exec),
        Command::Thouless(p) => thouless(p, exec),
        Command::DetProd(p) => detprod(p, exec),
        Command::Jensen(p) => jensen(p, exec),
        Command::Harmonic(p) => harmonic(p, exec),
        Command::Wiener(p) => wiener(p, exec),
        Command::Duality(p) => duality(p, exec),
        Command::Diffusion(p) => diffusion_cmd(p, exec),
        Command::Distribution(p) => distribution(p, exec),
        Command::Herman(p) => herman(p, exec),
    }
}

fn install_threads(threads: Option<usize>) -> anyhow::Result<()> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(config::config_err("threads must be positive"));
        }
        stdmap::exec::set_threads(t);
    }
    Ok(())
}

fn exec_for(deterministic: bool) -> Exec {
    if deterministic {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

fn run_experiment(cfg: ExperimentConfig, print_config: bool) -> anyhow::Result<()> {
    if print_config {
        println!("{}", serde_json::to_string_pretty(&cfg.to_json())?);
        return Ok(());
    }
    install_threads(cfg.threads)?;
    let a = dispatch(&cfg.command, exec_for(cfg.deterministic))?;
    let name = cfg.command.name();
    let hash = cfg.hash();
    let canonical = serde_json::json!({
        "version": config::CONFIG_VERSION,
        "subcommand": name,
        "params": cfg.command.params_json(),
        "deterministic": cfg.deterministic,
    });
    match &cfg.out {
        Some(dir) => {
            for p in output::write_all(dir, name, &hash, &canonical, &a)? {
                eprintln!("wrote {}", p.display());
            }
        }
        None => print!("{}", output::report_json(name, &hash, &canonical, &a.report)),
    }
    Ok(())
}

fn run_suite(name: &str, quick: bool, only: Option<&str>, deterministic: bool, out: Option<&PathBuf>) -> anyhow::Result<bool> {
    let exec = exec_for(deterministic);
    let verdicts = match name {
        "acceptance" => {
            let names: Vec<&str> = match only {
                Some(o) if stdmap::suite::ACCEPTANCE.contains(&o) => vec![o],
                Some(o) => return Err(config::config_err(format!("unknown criterion {:?}", o))),
                None if quick => QUICK.to_vec(),
                None => stdmap::suite::ACCEPTANCE.to_vec(),
            };
            let mut v = Vec::new();
            for n in names {
                let r = stdmap::suite::acceptance_one(n, exec).expect("listed criterion");
                println!("{}", r.line());
                v.push(r);
            }
            v
        }
        "invariants" => {
            if only.is_some() {
                return Err(config::config_err("--only applies to acceptance"));
            }
            let v = stdmap::suite::invariants(exec);
            for r in &v {
                println!("{}", r.line());
            }
            v
        }
        other => return Err(config::config_err(format!("unknown suite {:?} (acceptance or invariants)", other))),
    };
    let pass = verdicts.iter().all(|v| v.pass);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let body = serde_json::json!({"stdmap_version": output::VERSION, "suite": name, "pass": pass, "verdicts": verdicts});
        std::fs::write(dir.join(format!("suite_{}.json", name)), serde_json::to_string_pretty(&body)? + "\n")?;
    }
    Ok(pass)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match e.downcast_ref::<stdmap::Error>() {
        Some(s) if s.is_numerical() => 3,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Sub::Suite { name, quick, only } => install_threads(cli.threads).and_then(|_| run_suite(&name, quick, only.as_deref(), cli.deterministic, cli.out.as_ref())).map(|pass| if pass { 0 } else { 1 }),
        Sub::Run { config } => ExperimentConfig::load(&config)
            .map(|mut c| {
                // flags override the file
                c.threads = cli.threads.or(c.threads);
                c.out = cli.out.clone().or(c.out);
                c.deterministic |= cli.deterministic;
                c
            })
            .and_then(|c| run_experiment(c, cli.print_config))
            .map(|_| 0),
        sub => {
            let command = command_of(sub).expect("experiment subcommand");
            run_experiment(ExperimentConfig { command, deterministic: cli.deterministic, threads: cli.threads, out: cli.out }, cli.print_config).map(|_| 0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}
