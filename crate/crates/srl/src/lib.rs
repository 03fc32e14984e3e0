//! File formats, CSV output, run manifests and the `srl` command line.
//!
//! Exit codes: 0 when every artifact is complete, 2 for malformed or
//! invalid input, 3 when an enumeration budget ran out and the artifacts
//! hold a partial result, 1 for anything else (I/O, numerical failure).

pub mod cli;
pub mod commands;
pub mod formats;
pub mod output;

use output::Status;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_PARTIAL: u8 = 3;

pub fn status_code(s: Status) -> u8 {
    match s {
        Status::Complete => EXIT_OK,
        Status::Partial => EXIT_PARTIAL,
    }
}

/// Maps an error to its exit code by the first recognized cause.
pub fn error_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<formats::InputError>() {
            return EXIT_INVALID;
        }
        if let Some(c) = cause.downcast_ref::<srl_core::Error>() {
            return match c {
                srl_core::Error::NoConvergence { .. } | srl_core::Error::UnstableSpectrum { .. } => EXIT_FAILURE,
                _ => EXIT_INVALID,
            };
        }
    }
    EXIT_FAILURE
}

/// Sizes the global thread pool from `SRL_THREADS` when it is set.
pub fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var("SRL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| srl_core::Error::Validation(format!("SRL_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}
