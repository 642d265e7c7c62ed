use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use serde_json::json;

use roughflow::experiment::{aggregate, certify_options, format_report, run_theorem_a, run_theorem_b, ExperimentConfig};
use roughflow::noise::{io::write_samples_csv, CoupledNoise, StationaryFouSampler};
use roughflow::rough::{io::write_lift_binary, lift_piecewise_linear, rough_distance};
use roughflow::solver::{
    default_initial_field, energy_audit, noise_hash, read_checkpoint, run_epsilon_system, run_limit_davie,
    write_checkpoints, NoiseForcing, RunMetadata, Scheme,
};
use roughflow::spectral::normalized_test_fields;
use roughflow::urd::{certify_solution, DriverPair};
use roughflow::{Error, Result, TimeGrid};

#[derive(Parser)]
#[command(name = "roughflow", version, about = "Homogenisation experiments for Navier-Stokes with fractional transport noise")]
struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// First seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated, strictly decreasing ε list.
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long, global = true)]
    hurst: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Worker threads (0 for the default).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Eps,
    Davie,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a stationary fOU ensemble and compare variances with theory.
    Noise {
        /// Fast-time horizon of the sample.
        #[arg(long, default_value_t = 50.0)]
        length: f64,
        /// Grid step of the sample.
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
    /// Build coupled lifts and check Chen, geometricity and distances.
    Lift,
    /// Run one solver and write checkpoints.
    Solve {
        #[arg(long, value_enum, default_value_t = SchemeArg::Davie)]
        scheme: SchemeArg,
    },
    /// Certify checkpoints written by `solve --scheme davie`.
    Certify {
        /// Checkpoint directory (defaults to the output directory).
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Lift convergence sweep over ε.
    Thma,
    /// Solution convergence sweep over ε with certificates.
    Thmb,
    /// Aggregate record CSV files in the output directory.
    Report,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.to_string_lossy().to_string();
    }
    if let Some(e) = &cli.eps {
        cfg.eps = e.clone();
    }
    if let Some(h) = cli.hurst {
        cfg.hurst = h;
    }
    if let Some(a) = cli.alpha {
        cfg.alpha = a;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn cmd_noise(cfg: &ExperimentConfig, length: f64, step: f64) -> Result<bool> {
    let spec = cfg.spectrum()?;
    spec.check_theorem_range()?;
    let intervals = (length / step).round() as usize;
    let grid = TimeGrid::uniform(0.0, intervals as f64 * step, intervals);
    let ens = StationaryFouSampler::new(&spec, &grid, 4, cfg.burn_in_factor)?.sample(cfg.seed)?;
    let out = PathBuf::from(&cfg.out);
    fs::create_dir_all(&out)?;
    write_samples_csv(&grid, &ens.w, BufWriter::new(File::create(out.join("fou.csv"))?))?;
    let theory = spec.stationary_variances()?;
    let empirical: Vec<f64> =
        ens.w.iter().map(|row| row.iter().map(|x| x * x).sum::<f64>() / row.len() as f64).collect();
    write_json(
        &out.join("noise.json"),
        &json!({
            "config_hash": cfg.hash(), "seed": cfg.seed, "hurst": spec.hurst,
            "trace_tail_estimate": spec.trace_tail_estimate(),
            "stationary_variance": theory, "time_average_variance": empirical,
        }),
    )?;
    println!("wrote {} components on {} points to {}", ens.w.len(), grid.len(), out.display());
    Ok(true)
}

fn cmd_lift(cfg: &ExperimentConfig) -> Result<bool> {
    let spec = cfg.spectrum()?;
    let noise = CoupledNoise::sample(&spec, &cfg.coupling(), cfg.seed)?;
    let b = lift_piecewise_linear(&noise.limit()?);
    let out = PathBuf::from(&cfg.out);
    fs::create_dir_all(&out)?;
    write_lift_binary(&b, BufWriter::new(File::create(out.join("lift_limit.bin"))?))?;
    let obs = TimeGrid::uniform(0.0, cfg.horizon, cfg.obs_points - 1);
    let bo = b.restrict(&obs)?;
    let mut ok = bo.chen_defect() <= 1e-12 && bo.geometricity_defect() <= 1e-12;
    let mut rows = Vec::new();
    for (k, &e) in cfg.eps.iter().enumerate() {
        let x = lift_piecewise_linear(&noise.realize(e)?.x);
        write_lift_binary(&x, BufWriter::new(File::create(out.join(format!("lift_eps{k}.bin")))?))?;
        let xo = x.restrict(&obs)?;
        let (chen, geo) = (xo.chen_defect(), xo.geometricity_defect());
        ok &= chen <= 1e-12 && geo <= 1e-12;
        let dist = rough_distance(&xo, &bo, cfg.alpha)?;
        println!("eps {e:.6e}: chen {chen:.2e} geometricity {geo:.2e} rough distance {dist:.4e}");
        rows.push(json!({"eps": e, "chen": chen, "geometricity": geo, "rough_distance": dist}));
    }
    write_json(&out.join("lift.json"), &json!({"config_hash": cfg.hash(), "seed": cfg.seed, "lifts": rows, "pass": ok}))?;
    Ok(ok)
}

/// Energy defect bound for the ε-system; Davie runs only report theirs.
const ENERGY_TOL: f64 = 1e-4;

fn cmd_solve(cfg: &ExperimentConfig, scheme: SchemeArg) -> Result<bool> {
    let spec = cfg.spectrum()?;
    let grid = cfg.grid()?;
    let basis = spec.mode_map(&grid)?;
    let noise = CoupledNoise::sample(&spec, &cfg.coupling(), cfg.seed)?;
    let u0 = default_initial_field(&grid)?;
    let out = PathBuf::from(&cfg.out);
    let (traj, scheme_name, dt, hash) = match scheme {
        SchemeArg::Davie => {
            let b = noise.limit()?;
            let hash = noise_hash(&(0..b.dim()).map(|i| b.component(i)).collect::<Vec<_>>());
            let driver = DriverPair::new(lift_piecewise_linear(&b), basis)?;
            let sc = cfg.solver(Scheme::LimitDavie)?;
            (run_limit_davie(&sc, &u0, &driver)?, "limit_davie", sc.dt, hash)
        }
        SchemeArg::Eps => {
            let e = *cfg.eps.last().unwrap();
            let r = noise.realize(e)?;
            let hash = noise_hash(&r.w.w);
            let sc = cfg.solver(Scheme::EpsilonSystemRk2)?;
            let forcing = NoiseForcing::from_epsilon_noise(&r)?;
            (run_epsilon_system(&sc, &u0, &forcing, &basis)?, "epsilon_system_rk2", sc.dt, hash)
        }
    };
    let meta = RunMetadata {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        noise_hash: hash,
        scheme: scheme_name.into(),
        dt,
        steps: traj.len() - 1,
    };
    let files = write_checkpoints(&out, &traj, 1, &meta)?;
    let audit = energy_audit(&traj)?;
    write_json(&out.join("energy.json"), &serde_json::to_value(&audit)?)?;
    println!(
        "{scheme_name}: {} states written to {}, energy defect {:.3e}",
        files.len(),
        out.display(),
        audit.max_defect
    );
    Ok(matches!(scheme, SchemeArg::Davie) || audit.max_defect <= ENERGY_TOL)
}

fn cmd_certify(cfg: &ExperimentConfig, input: &Path) -> Result<bool> {
    let meta: RunMetadata = serde_json::from_reader(File::open(input.join("run.json"))?)?;
    if meta.scheme != "limit_davie" {
        return Err(Error::Config("certify expects checkpoints of a Davie run".into()));
    }
    if meta.config_hash != cfg.hash() || meta.seed != cfg.seed {
        return Err(Error::Config("checkpoints were written with a different configuration or seed".into()));
    }
    let mut names: Vec<PathBuf> = fs::read_dir(input)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().is_some_and(|n| n.to_string_lossy().starts_with("state_")))
        .collect();
    names.sort();
    let states = names.iter().map(|p| read_checkpoint(p)).collect::<Result<Vec<_>>>()?;
    let grid = TimeGrid::uniform(0.0, meta.dt * meta.steps as f64, meta.steps);
    let spec = cfg.spectrum()?;
    let noise = CoupledNoise::sample(&spec, &cfg.coupling(), cfg.seed)?;
    let driver = DriverPair::new(lift_piecewise_linear(&noise.limit()?), spec.mode_map(&cfg.grid()?)?)?;
    let phis = normalized_test_fields(&cfg.grid()?, 8, 3.0)?;
    let mut cert = certify_solution(&grid, &states, &driver, &phis, &certify_options(cfg))?;
    cert.config_hash = cfg.hash();
    cert.seed = cfg.seed;
    let out = PathBuf::from(&cfg.out);
    fs::create_dir_all(&out)?;
    fs::write(out.join("certificate.json"), cert.to_json()? + "\n")?;
    println!("certificate verdict: {:?}", cert.verdict);
    for f in &cert.failures {
        println!("  {f}");
    }
    Ok(cert.passed())
}

fn run(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    if cfg.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    }
    info!("config hash {}", cfg.hash());
    match &cli.command {
        Command::Noise { length, step } => cmd_noise(&cfg, *length, *step),
        Command::Lift => cmd_lift(&cfg),
        Command::Solve { scheme } => cmd_solve(&cfg, *scheme),
        Command::Certify { input } => {
            let input = input.clone().unwrap_or_else(|| PathBuf::from(&cfg.out));
            cmd_certify(&cfg, &input)
        }
        Command::Thma | Command::Thmb => {
            let rec = if matches!(cli.command, Command::Thma) { run_theorem_a(&cfg)? } else { run_theorem_b(&cfg)? };
            let paths = rec.write(Path::new(&cfg.out), &cfg.formats)?;
            println!("{}", serde_json::to_string_pretty(&rec.summary)?);
            for p in paths {
                println!("wrote {}", p.display());
            }
            Ok(rec.pass)
        }
        Command::Report => {
            let lines = aggregate(Path::new(&cfg.out))?;
            print!("{}", format_report(&lines));
            write_json(&Path::new(&cfg.out).join("report.json"), &serde_json::to_value(&lines)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("tolerance check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
