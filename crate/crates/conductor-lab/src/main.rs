//! `conductor-lab`: scenario runner and verification batteries for
//! ramification invariants of covers of rigid annuli.
//!
//! Usage:
//!   conductor-lab swan         --scenario FILE [--out DIR] [--svg] [--precision N] [--grid K]
//!   conductor-lab discriminant --scenario FILE [--out DIR] [--svg] [--precision N]
//!   conductor-lab decompose    --scenario FILE [--out DIR] [--precision N]
//!   conductor-lab zeros        [--scenario FILE] [--fuzz N] [--out DIR]
//!   conductor-lab corpus DIR   [--out DIR] [--precision N] [--grid K] [--threads N] [--update-golden]
//!
//! Exit codes: 0 success, 2 check failure, 3 scenario error.
//! CONDUCTOR_LAB_SEED seeds the fuzz generator.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use conductor_lab::commands::{cmd_corpus, cmd_decompose, cmd_discriminant, cmd_swan, cmd_zeros, CmdOptions, ZerosDoc};
use conductor_lab::report::{Report, ReportStatus};
use conductor_lab::scenario::Scenario;

struct Args {
    command: String,
    scenario: Option<PathBuf>,
    corpus_dir: Option<PathBuf>,
    opts: CmdOptions,
}

fn parse_args() -> Result<Args, String> {
    let mut args = std::env::args().skip(1);
    let command = args.next().ok_or_else(usage)?;
    let mut parsed = Args {
        command,
        scenario: None,
        corpus_dir: None,
        opts: CmdOptions::default(),
    };
    if let Ok(seed) = std::env::var("CONDUCTOR_LAB_SEED") {
        parsed.opts.seed = seed
            .parse()
            .map_err(|_| format!("bad CONDUCTOR_LAB_SEED `{seed}`"))?;
    }
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--scenario" => parsed.scenario = Some(PathBuf::from(next(&mut args, &arg)?)),
            "--out" => parsed.opts.out_dir = Some(PathBuf::from(next(&mut args, &arg)?)),
            "--svg" => parsed.opts.svg = true,
            "--update-golden" => parsed.opts.update_golden = true,
            "--fuzz" => parsed.opts.fuzz = parse_num(&next(&mut args, &arg)?)?,
            "--precision" => parsed.opts.precision = Some(parse_num(&next(&mut args, &arg)?)? as i64),
            "--grid" => parsed.opts.grid = parse_num(&next(&mut args, &arg)?)? as usize,
            "--threads" => parsed.opts.threads = parse_num(&next(&mut args, &arg)?)? as usize,
            other if !other.starts_with("--") && parsed.corpus_dir.is_none() => {
                parsed.corpus_dir = Some(PathBuf::from(other));
            }
            other => return Err(format!("unknown argument `{other}`\n{}", usage())),
        }
    }
    Ok(parsed)
}

fn next(args: &mut impl Iterator<Item = String>, flag: &str) -> Result<String, String> {
    args.next().ok_or_else(|| format!("{flag} needs a value"))
}

fn parse_num(s: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("bad number `{s}`"))
}

fn usage() -> String {
    "usage: conductor-lab <swan|zeros|discriminant|decompose|corpus> \
     [--scenario FILE] [DIR] [--out DIR] [--svg] [--fuzz N] [--precision N] \
     [--grid K] [--threads N] [--update-golden]"
        .to_string()
}

fn main() -> ExitCode {
    let args = match parse_args() {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(3);
        }
    };
    let started = Instant::now();
    let code = run(&args);
    eprintln!(
        "conductor-lab {} finished in {:.1} ms",
        args.command,
        started.elapsed().as_secs_f64() * 1e3
    );
    ExitCode::from(code)
}

fn run(args: &Args) -> u8 {
    match args.command.as_str() {
        "swan" | "discriminant" | "decompose" => {
            let Some(path) = &args.scenario else {
                eprintln!("{} needs --scenario FILE", args.command);
                return 3;
            };
            let scenario = match Scenario::load(path) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("scenario error: {e}");
                    return 3;
                }
            };
            let result = match args.command.as_str() {
                "swan" => cmd_swan(&scenario, &args.opts),
                "discriminant" => cmd_discriminant(&scenario, &args.opts),
                _ => cmd_decompose(&scenario, &args.opts),
            };
            finish(result, &args.opts)
        }
        "zeros" => {
            let doc = match &args.scenario {
                None => None,
                Some(path) => match ZerosDoc::load(path) {
                    Ok(d) => Some(d),
                    Err(e) => {
                        eprintln!("scenario error: {e}");
                        return 3;
                    }
                },
            };
            if doc.is_none() && args.opts.fuzz == 0 {
                eprintln!("zeros needs --scenario FILE and/or --fuzz N");
                return 3;
            }
            finish(cmd_zeros(doc.as_ref(), &args.opts), &args.opts)
        }
        "corpus" => {
            let Some(dir) = &args.corpus_dir else {
                eprintln!("corpus needs a directory argument");
                return 3;
            };
            let outcome = cmd_corpus(dir, &args.opts);
            for (id, ok, detail) in &outcome.results {
                if *ok {
                    println!("PASS {id}");
                } else {
                    println!("FAIL {id}: {detail}");
                }
            }
            println!(
                "{}/{} scenarios passed",
                outcome.results.iter().filter(|(_, ok, _)| *ok).count(),
                outcome.results.len()
            );
            outcome.exit_code as u8
        }
        other => {
            eprintln!("unknown command `{other}`\n{}", usage());
            3
        }
    }
}

fn finish(result: conductor_core::error::CoreResult<Report>, opts: &CmdOptions) -> u8 {
    match result {
        Err(e) => {
            eprintln!("scenario error: {e}");
            3
        }
        Ok(report) => {
            let json = report.to_json();
            if let Some(dir) = &opts.out_dir {
                if std::fs::create_dir_all(dir).is_err() {
                    eprintln!("cannot create {}", dir.display());
                    return 3;
                }
                let path = dir.join(format!("{}-{}.json", report.scenario, report.command));
                if std::fs::write(&path, &json).is_err() {
                    eprintln!("cannot write {}", path.display());
                    return 3;
                }
            }
            print!("{json}");
            if report.status == ReportStatus::Pass {
                0
            } else {
                let fail = report
                    .checks
                    .iter()
                    .chain(report.characters.iter().flat_map(|c| c.checks.iter()))
                    .find(|c| c.status == conductor_core::ramify::CheckStatus::Fail);
                if let Some(f) = fail {
                    eprintln!("check `{}` failed at {}", f.name, f.witness);
                }
                2
            }
        }
    }
}
