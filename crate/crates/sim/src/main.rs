use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use rydberg_sim::commands::display_path;
use rydberg_sim::{load_config, run, Command, Format, OutputOptions, SimError, ThreadPool};

/// Three-level ladder atom in a thermal vapor driven by nanosecond pulses.
#[derive(Debug, Parser)]
#[command(name = "rydberg-sim", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Configuration file of `key = value` lines; defaults apply when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,

    /// Override one configuration key, e.g. `--set "omega_480_peak = 2.3 GHz"`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output directory.
    #[arg(long, short, default_value = ".")]
    out: PathBuf,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Also render SVG heatmaps for scan commands.
    #[arg(long)]
    heatmap: bool,

    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { SimError::Usage(String::new()).exit_code() } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<(), SimError> {
    let cfg = load_config(cli.config.as_deref(), &cli.overrides)?;
    if cli.print_config {
        print!("{}", cfg.to_config_text());
        return Ok(());
    }
    let pool = ThreadPool::new(cli.threads)?;
    let out = OutputOptions { dir: cli.out.clone(), format: cli.format, heatmap: cli.heatmap };
    let report = run(cli.command, &cfg, &out, &pool)?;
    for (k, v) in &report.summary {
        println!("{k}: {v}");
    }
    for f in &report.files {
        println!("wrote {}", display_path(f, &cli.out));
    }
    Ok(())
}
