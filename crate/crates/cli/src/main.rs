//! `jatam`: enumerate tile-set spaces, run GA sweeps, render and hash shapes.

mod enumerate;
mod ga;
mod hash;
mod render;
mod space;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "jatam", version, about = "Tile self-assembly genotype-phenotype tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every genome of a search space and write a shape histogram.
    Enumerate(enumerate::Args),
    /// Sweep mutation rates of the GA on a fitness landscape.
    Ga(ga::Args),
    /// Draw the structure a genome assembles into.
    Render(render::Args),
    /// Print the 32-bit hash of bytes or of a shape.
    Hash(hash::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enumerate(a) => enumerate::run(a),
        Command::Ga(a) => ga::run(a),
        Command::Render(a) => render::run(a),
        Command::Hash(a) => hash::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
