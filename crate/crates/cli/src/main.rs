use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use diracspec_cli::{run, threads_from_env, Failure, Task};

#[derive(Parser, Debug)]
#[command(name = "diracspec", version, about = "Spectral experiments for Dirac-type systems")]
struct Args {
    /// Task to run.
    #[arg(value_enum)]
    task: Task,
    /// Path to the JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(args: &Args) -> Result<(), Failure> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(format!("cannot configure thread pool: {e}")))?;
    }
    let summary = run(args.task, &args.config, args.out.as_deref())?;
    println!("manifest {}", summary.manifest_hash);
    for f in &summary.files {
        println!("wrote {}", summary.out_dir.join(f).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
