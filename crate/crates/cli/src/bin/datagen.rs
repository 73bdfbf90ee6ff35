//! `qforest-datagen`: regenerate the bundled dataset fixtures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qforest_cli::datagen::{write_fixtures, FIXTURE_SEED, FIXTURE_SIGNAL};

#[derive(Parser, Debug)]
#[command(
    name = "qforest-datagen",
    about = "Write the synthetic cleveland.data and statlog.dat fixtures",
    version
)]
struct Args {
    /// Output directory.
    #[arg(long, default_value = "data")]
    out: PathBuf,

    /// Generation seed.
    #[arg(long, default_value_t = FIXTURE_SEED)]
    seed: u64,

    /// Class-separation scale (1.0 = the base clinical marginals).
    #[arg(long, default_value_t = FIXTURE_SIGNAL)]
    signal: f64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match write_fixtures(&args.out, args.seed, args.signal) {
        Ok((cleveland, statlog)) => {
            eprintln!("wrote {}", cleveland.display());
            eprintln!("wrote {}", statlog.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
