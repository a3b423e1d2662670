//! `gfunc`: solve, continue, validate, and map scalar Riemann-Hilbert
//! g-function problems from a JSON config with flag overrides.

use gfunc_cli::config::RunConfig;
use gfunc_cli::{cmd_continue, cmd_derivs, cmd_signs, cmd_solve, cmd_validate, CommandOutcome};
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "\
usage: gfunc <command> [options]

commands:
  solve      solve the modulation equations at one parameter point
  continue   sweep one parameter with predictor-corrector continuation
  derivs     compare the perturbation-formula derivatives against finite
             differences at a solved point
  validate   run named oracle suites
  signs      solve, then write an Im h grid for offline plotting

options:
  --config FILE     JSON config (a run record replays its embedded config)
  --set KEY=VALUE   override a config field by dotted path, repeatable
  --out DIR         output directory (default: config output.dir)
  --suite A,B       suites for `validate`
  --seed N          seed for sampled suites

exit codes: 0 ok, 1 validation failure, 2 no convergence,
            3 continuation stall, 64 usage error";

struct Args {
    command: String,
    config_path: Option<PathBuf>,
    overrides: Vec<(String, String)>,
    out_dir: Option<PathBuf>,
    suites: Vec<String>,
    seed: Option<u64>,
}

fn parse_args(mut argv: impl Iterator<Item = String>) -> Result<Args, String> {
    let command = argv.next().ok_or_else(|| USAGE.to_string())?;
    if !["solve", "continue", "derivs", "validate", "signs"].contains(&command.as_str()) {
        return Err(format!("unknown command '{command}'\n\n{USAGE}"));
    }
    let mut args = Args {
        command,
        config_path: None,
        overrides: Vec::new(),
        out_dir: None,
        suites: Vec::new(),
        seed: None,
    };
    while let Some(flag) = argv.next() {
        let mut take = |name: &str| {
            argv.next()
                .ok_or_else(|| format!("{name} needs a value\n\n{USAGE}"))
        };
        match flag.as_str() {
            "--config" => args.config_path = Some(PathBuf::from(take("--config")?)),
            "--set" => {
                let kv = take("--set")?;
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| format!("--set expects KEY=VALUE, got '{kv}'"))?;
                args.overrides.push((k.to_string(), v.to_string()));
            }
            "--out" => args.out_dir = Some(PathBuf::from(take("--out")?)),
            "--suite" => {
                args.suites
                    .extend(take("--suite")?.split(',').map(|s| s.trim().to_string()));
            }
            "--seed" => {
                args.seed = Some(
                    take("--seed")?
                        .parse()
                        .map_err(|e| format!("bad --seed: {e}"))?,
                );
            }
            "--help" | "-h" => return Err(USAGE.to_string()),
            other => return Err(format!("unknown option '{other}'\n\n{USAGE}")),
        }
    }
    Ok(args)
}

fn run() -> Result<i32, String> {
    let args = parse_args(std::env::args().skip(1)).map_err(|e| e)?;
    let mut cfg = match &args.config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            RunConfig::from_json_str(&text).map_err(|e| format!("{e}"))?
        }
        None => RunConfig::default(),
    };
    for (k, v) in &args.overrides {
        cfg.apply_override(k, v).map_err(|e| format!("{e}"))?;
    }
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    let out_dir = args
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output.dir));

    let outcome: CommandOutcome = match args.command.as_str() {
        "solve" => cmd_solve(&cfg),
        "continue" => cmd_continue(&cfg),
        "derivs" => cmd_derivs(&cfg),
        "validate" => cmd_validate(&cfg, &args.suites),
        "signs" => cmd_signs(&cfg),
        _ => unreachable!(),
    };

    for line in &outcome.summary {
        println!("{line}");
    }
    if !outcome.files.is_empty() {
        std::fs::create_dir_all(&out_dir)
            .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;
        for (name, contents) in &outcome.files {
            let path = out_dir.join(name);
            std::fs::write(&path, contents)
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(outcome.exit)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(gfunc_cli::EXIT_USAGE as u8)
        }
    }
}
