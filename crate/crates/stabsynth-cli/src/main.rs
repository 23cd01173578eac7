use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stabsynth_cli::commands::{self, CliError, Outcome};

#[derive(Parser)]
#[command(name = "stabsynth", version, about = "Stabilizer circuit synthesis")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a layered circuit for a tableau file.
    Synth {
        matrix: PathBuf,
        #[arg(long, default_value = "7", value_parser = ["7", "9"])]
        stages: String,
        /// Nearest-neighbour circuit in two-qubit depth at most 14n-4.
        #[arg(long)]
        lnn: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exit 0 iff the circuit's tableau equals the matrix.
    Verify { circuit: PathBuf, matrix: PathBuf },
    /// Rewrite a {P, CNOT, CZ, SWAP} circuit as three stages.
    Fold {
        circuit: PathBuf,
        #[arg(long, default_value = "P-CZ-C")]
        order: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Two-qubit depth and nearest-neighbour legality.
    Depth { circuit: PathBuf },
    /// Bruhat cell of a tableau.
    Cell { matrix: PathBuf },
    /// Random Clifford word (or its tableau).
    Random {
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        length: Option<usize>,
        /// Print the word's tableau instead of the word.
        #[arg(long)]
        tableau: bool,
        /// Print a tableau drawn through a random Bruhat cell.
        #[arg(long, conflicts_with_all = ["tableau", "length"])]
        cell: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Optimal gate counts by exhaustive search.
    Oracle {
        /// Print the worst-case counts (CZ over {CZ}, CZ over {P,CZ,CNOT},
        /// C over {CNOT}, C over {P,CZ,CNOT}).
        #[arg(long, requires = "n")]
        table1: bool,
        #[arg(short)]
        n: Option<usize>,
        /// Tableau whose optimal cost to compute (n <= 4).
        #[arg(conflicts_with = "table1", required_unless_present = "table1")]
        matrix: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "P,CZ,CNOT")]
        alphabet: Vec<String>,
    },
    /// Shorten a CZ stage with CNOT and P gates.
    Czopt { matrix: PathBuf },
}

fn read(path: &Path) -> Result<String, CliError> {
    let mut s = String::new();
    let r = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut s).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| s = t)
    };
    r.map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
    Ok(s)
}

fn run(cmd: Cmd) -> Result<(Outcome, Option<PathBuf>), CliError> {
    Ok(match cmd {
        Cmd::Synth { matrix, stages, lnn, output } => {
            (commands::synth(&read(&matrix)?, stages.parse().unwrap(), lnn)?, output)
        }
        Cmd::Verify { circuit, matrix } => (commands::verify(&read(&circuit)?, &read(&matrix)?)?, None),
        Cmd::Fold { circuit, order, output } => (commands::fold_cmd(&read(&circuit)?, &order)?, output),
        Cmd::Depth { circuit } => (commands::depth(&read(&circuit)?)?, None),
        Cmd::Cell { matrix } => (commands::cell(&read(&matrix)?)?, None),
        Cmd::Random { n, seed, length, tableau, cell, output } => {
            (commands::random(n, seed, length, tableau, cell)?, output)
        }
        Cmd::Oracle { table1: true, n, .. } => (commands::oracle_table1(n.unwrap())?, None),
        Cmd::Oracle { matrix, alphabet, .. } => (commands::oracle_cost(&read(&matrix.unwrap())?, &alphabet)?, None),
        Cmd::Czopt { matrix } => (commands::czopt(&read(&matrix)?)?, None),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok((out, path)) => {
            let written = match path {
                Some(p) => std::fs::write(&p, &out.stdout).map_err(|e| format!("{}: {e}", p.display())),
                None => std::io::stdout().write_all(out.stdout.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            eprint!("{}", out.report);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
