use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use orbitlens::job::{self, Command, Timing};
use orbitlens::Error;

/// orbitlens <command> --config <path.json> [--out <path>] [--image <path.{svg,ppm}>]
#[derive(Parser)]
#[command(
    version,
    about = "Orbits, series and limit sets of cyclic automorphism groups"
)]
struct Args {
    /// classify, orbit, series, limitset, verify or render
    command: String,
    #[arg(long)]
    config: PathBuf,
    /// Report path; stdout when absent. Wall time goes to `<out>.timing.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    image: Option<PathBuf>,
}

fn threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("ORBITLENS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config {
            path: "ORBITLENS_THREADS".into(),
            message: format!("`{v}` is not a positive integer"),
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Io(e.to_string()))
}

fn main_inner(args: Args) -> Result<i32, Error> {
    threads()?;
    let start = Instant::now();
    let command: Command = args.command.parse()?;
    let config = job::load_config(&args.config)?;
    let out = args
        .out
        .or(config.outputs.report.as_ref().map(PathBuf::from));
    let image = args
        .image
        .or(config.outputs.image.as_ref().map(PathBuf::from));
    if command == Command::Render && image.is_none() {
        return Err(Error::Config {
            path: "outputs.image".into(),
            message: "render needs --image".into(),
        });
    }
    let report = job::run(command, &config)?;
    if let Some(path) = &image {
        job::render(&report, path)?;
    }
    let json = job::to_json(&report);
    let timing = Timing {
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    match out {
        Some(path) => {
            std::fs::write(&path, json)?;
            let mut sidecar = path.into_os_string();
            sidecar.push(".timing.json");
            std::fs::write(
                sidecar,
                serde_json::to_string_pretty(&timing).expect("timing serializes") + "\n",
            )?;
        }
        None => {
            print!("{json}");
            eprintln!("wall time {:.3}s", timing.wall_time_seconds);
        }
    }
    Ok(job::exit_code(&report))
}

fn main() -> ExitCode {
    match main_inner(Args::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("orbitlens: {e}");
            ExitCode::from(1)
        }
    }
}
