mod args;
mod commands;
mod config;
mod units;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Context, Failure};

const OUTPUT_DIR_VAR: &str = "QSOURCE_OUTPUT_DIR";

fn run(argv: Vec<String>) -> Result<String, Failure> {
    let argv = config::expand(argv).map_err(Failure::Usage)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Some(n) = cli.command.common().threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Run(e.to_string()))?;
    }
    let mut words = vec!["qsource".to_owned()];
    words.extend(argv.iter().skip(1).cloned());
    let ctx = Context {
        command_line: words.join(" "),
        output_dir: std::env::var_os(OUTPUT_DIR_VAR).map(PathBuf::from),
    };
    match &cli.command {
        Command::TotalCurrent(a) => commands::total_current(a, &ctx),
        Command::DensityProfile(a) => commands::density_profile(a, &ctx),
        Command::DetectorImage(a) => commands::image(a, &ctx),
        Command::AtomLaser(a) => commands::atom_laser(a, &ctx),
        Command::Transition(a) => commands::transition(a, &ctx),
        Command::Validate(a) => {
            let checks = validate::run(a.suite)?;
            for c in &checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            let line = format!("validate: {} of {} checks passed", checks.len() - failed, checks.len());
            if failed > 0 {
                return Err(Failure::Run(line));
            }
            Ok(line)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = match std::env::args_os().map(|a| a.into_string()).collect() {
        Ok(v) => v,
        Err(bad) => {
            eprintln!("error: argument {bad:?} is not valid UTF-8");
            return ExitCode::from(2);
        }
    };
    match run(argv) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
