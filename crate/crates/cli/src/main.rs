use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cli::{cmd_check_certificate, cmd_prove, cmd_verify_nhim, Overrides};

#[derive(Parser)]
#[command(version, about = "Computer-assisted proofs of transversal homoclinic intersections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// NHIM cells along the unstable fiber coordinate.
    #[arg(long)]
    subdivisions: Option<usize>,
    /// Order of the rate conditions.
    #[arg(long)]
    order: Option<usize>,
}

impl RunArgs {
    fn split(self) -> (PathBuf, Overrides) {
        (
            self.config,
            Overrides {
                out: self.out,
                threads: self.threads,
                subdivisions: self.subdivisions,
                order: self.order,
            },
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Verify the NHIM and report L and M.
    VerifyNhim(RunArgs),
    /// Run the full proof and write the certificate and plot data.
    Prove(RunArgs),
    /// Re-check a stored certificate.
    CheckCertificate { path: PathBuf },
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::VerifyNhim(a) => {
            let (c, o) = a.split();
            cmd_verify_nhim(&c, o)
        }
        Command::Prove(a) => {
            let (c, o) = a.split();
            cmd_prove(&c, o)
        }
        Command::CheckCertificate { path } => cmd_check_certificate(&path),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
