//! `kgnf` command line: config resolution and dispatch.
//!
//! A run is resolved in three layers: the experiment defaults, then the
//! optional `--config` file, then flags. The file holds one `key = value`
//! per line; `#` starts a comment. Keys are the ones echoed by
//! [`Config::entries`], plus `T` for `t_final` and `L` for `length`.
//!
//! Exit codes: 0 when every gate passes, 1 when a gate fails, 2 for a bad
//! configuration and 3 when the run itself fails. On 2 and 3 a JSON error
//! record is printed to stdout.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use kgnf_experiments::report::write_file;
use kgnf_experiments::{
    drift::drift_sweep, lifespan::lifespan_probe, lipschitz::lipschitz_test, nfcheck::nf_verify,
    strichartz::strichartz_tracker, trajectory::run_evolve, Config, ExpError, Experiment,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_GATE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUN: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kgnf", version, about = "Normal-form energy laboratory for quasilinear Klein-Gordon flows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal-form symbol residual battery.
    NfCheck(RunArgs),
    /// One trajectory with energy diagnostics.
    Evolve(RunArgs),
    /// Cubic-estimate drift sweep over ε.
    DriftSweep(RunArgs),
    /// Lifespan against ε⁻².
    Lifespan(RunArgs),
    /// Lipschitz ratio of the flow on nearby data.
    Lipschitz(RunArgs),
    /// Strichartz-norm tracker on the long torus.
    Strichartz(RunArgs),
}

impl Command {
    pub fn experiment(&self) -> Experiment {
        match self {
            Command::NfCheck(_) => Experiment::NfCheck,
            Command::Evolve(_) => Experiment::Evolve,
            Command::DriftSweep(_) => Experiment::DriftSweep,
            Command::Lifespan(_) => Experiment::Lifespan,
            Command::Lipschitz(_) => Experiment::Lipschitz,
            Command::Strichartz(_) => Experiment::Strichartz,
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::NfCheck(a)
            | Command::Evolve(a)
            | Command::DriftSweep(a)
            | Command::Lifespan(a)
            | Command::Lipschitz(a)
            | Command::Strichartz(a) => a,
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Key-value config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Extra `key=value` overrides, applied after the named flags.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long)]
    pub model: Option<String>,
    /// Comma-separated ε list.
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long = "L")]
    pub length: Option<String>,
    #[arg(long)]
    pub dt: Option<String>,
    #[arg(long = "T")]
    pub t_final: Option<String>,
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long)]
    pub mass: Option<String>,
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub samples: Option<String>,
    #[arg(long)]
    pub every: Option<String>,
    #[arg(long)]
    pub fault: Option<String>,
    #[arg(long)]
    pub skip_conjugation_nf: bool,
    #[arg(long)]
    pub no_dealias: bool,
    /// CSV output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary path; the summary always goes to stdout too.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Print the resolved config and exit.
    #[arg(long)]
    pub print_config: bool,
}

/// `(line, key, value)` triples of a key-value file.
pub fn parse_kv(text: &str) -> Result<Vec<(usize, String, String)>, ExpError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ExpError::Config {
            key: line.to_string(),
            msg: format!("line {}: expected `key = value`", i + 1),
        })?;
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Defaults, then the file text, then the flags.
pub fn resolve(exp: Experiment, file: Option<&str>, args: &RunArgs) -> Result<Config, ExpError> {
    let mut cfg = Config::defaults(exp);
    if let Some(text) = file {
        for (line, k, v) in parse_kv(text)? {
            if k == "experiment" {
                if Experiment::parse(&v) != Some(exp) {
                    return Err(ExpError::Config {
                        key: k,
                        msg: format!("line {line}: file names `{v}` but the subcommand is `{exp}`"),
                    });
                }
                continue;
            }
            cfg.set(&k, &v).map_err(|e| match e {
                ExpError::Config { key, msg } => ExpError::Config {
                    key,
                    msg: format!("line {line}: {msg}"),
                },
                e => e,
            })?;
        }
    }
    let named = [
        ("model", &args.model),
        ("eps", &args.eps),
        ("n", &args.n),
        ("length", &args.length),
        ("dt", &args.dt),
        ("t_final", &args.t_final),
        ("s", &args.s),
        ("mass", &args.mass),
        ("profile", &args.profile),
        ("seed", &args.seed),
        ("samples", &args.samples),
        ("every", &args.every),
        ("fault", &args.fault),
    ];
    for (k, v) in named {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    if args.skip_conjugation_nf {
        cfg.skip_conjugation_nf = true;
    }
    if args.no_dealias {
        cfg.dealias = false;
    }
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| ExpError::Config {
            key: kv.clone(),
            msg: "expected `--set key=value`".into(),
        })?;
        cfg.set(k.trim(), v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Resolved config as key-value text, readable back by [`resolve`].
pub fn render_config(cfg: &Config) -> String {
    cfg.entries()
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

pub fn error_record(e: &ExpError) -> String {
    let (kind, key) = match e {
        ExpError::Config { key, .. } => ("config", Some(key.clone())),
        ExpError::Core(_) => ("core", None),
        ExpError::Io(_) => ("io", None),
        ExpError::Csv(_) | ExpError::Json(_) => ("output", None),
        ExpError::Run(_) => ("run", None),
    };
    serde_json::json!({ "error": kind, "key": key, "message": e.to_string() }).to_string()
}

/// Report output after a finished run.
pub struct Outcome {
    pub passed: bool,
    pub csv: String,
    pub json: String,
}

pub fn dispatch(cfg: &Config) -> Result<Outcome, ExpError> {
    let sweep = |r: kgnf_experiments::SweepReport| -> Result<Outcome, ExpError> {
        Ok(Outcome {
            passed: r.passed(),
            csv: r.csv()?,
            json: r.json()?,
        })
    };
    match cfg.experiment {
        Experiment::NfCheck => {
            let r = nf_verify(cfg)?;
            Ok(Outcome {
                passed: r.passed(),
                csv: r.csv()?,
                json: r.json()?,
            })
        }
        Experiment::Evolve => sweep(run_evolve(cfg)?),
        Experiment::DriftSweep => sweep(drift_sweep(cfg)?),
        Experiment::Lifespan => sweep(lifespan_probe(cfg)?),
        Experiment::Lipschitz => sweep(lipschitz_test(cfg)?),
        Experiment::Strichartz => sweep(strichartz_tracker(cfg)?),
    }
}

fn write_outputs(o: &Outcome, csv: Option<&Path>, json: Option<&Path>) -> Result<(), ExpError> {
    if let Some(p) = csv {
        write_file(p, &o.csv)?;
    }
    if let Some(p) = json {
        write_file(p, &o.json)?;
    }
    Ok(())
}

/// Runs a parsed command line; returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let exp = cli.command.experiment();
    let args = cli.command.args();
    let file = match &args.config {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                println!("{}", error_record(&ExpError::Io(e)));
                return EXIT_CONFIG;
            }
        },
        None => None,
    };
    let cfg = match resolve(exp, file.as_deref(), args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("kgnf: {e}");
            println!("{}", error_record(&e));
            return EXIT_CONFIG;
        }
    };
    if args.print_config {
        print!("{}", render_config(&cfg));
        return EXIT_PASS;
    }
    let outcome = dispatch(&cfg)
        .and_then(|o| write_outputs(&o, args.out.as_deref(), args.summary.as_deref()).map(|_| o));
    match outcome {
        Ok(o) => {
            println!("{}", o.json);
            if o.passed {
                EXIT_PASS
            } else {
                eprintln!("kgnf: {exp}: at least one gate failed");
                EXIT_GATE
            }
        }
        Err(e) => {
            eprintln!("kgnf: {e}");
            println!("{}", error_record(&e));
            match e {
                ExpError::Config { .. } => EXIT_CONFIG,
                _ => EXIT_RUN,
            }
        }
    }
}
