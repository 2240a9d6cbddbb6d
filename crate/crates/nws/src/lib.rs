//! File formats, IO and the `nws` command line around [`nws_core`].
//!
//! * [`io`]: embedding and corpus files, the binary embedding cache.
//! * [`scores`]: score TSVs, checkpoints and loss logs.
//! * [`datasets`]: STS datasets and rating norms.
//! * [`report`]: evaluation reports.
//! * [`cli`]: the subcommands.

pub mod cli;
pub mod datasets;
mod error;
pub mod io;
pub mod report;
pub mod scores;

pub use error::{NwsError, Result};
