use std::process::ExitCode;

use clap::Parser;

use hufftok::cli::{run, Cli};
use hufftok::pipeline::init_thread_pool;
use hufftok::Error;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_thread_pool().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hufftok: error: {e}");
            ExitCode::from(if matches!(e, Error::Usage(_)) { 2 } else { 1 })
        }
    }
}
