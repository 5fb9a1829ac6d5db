// Copyright 2026 The bec-lattice Contributors
// SPDX-License-Identifier: Apache-2.0

use std::process::ExitCode;

use bec_lattice_cli::{load_config, run, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    if g.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(g.threads).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = load_config(g.config.as_deref(), &g.overrides)
        .and_then(|cfg| run(cli.command.into(), &cfg, &g.out, g.seed));
    match result {
        Ok(m) => {
            for w in &m.regime_warnings {
                eprintln!("warning: regime condition {:?} at ratio {:.3}", w.condition, w.ratio);
            }
            println!("{}: wrote {} to {}", m.subcommand, m.outputs.join(", "), g.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
