//! Synthesis algorithms: state preparation, column-by-column QR, and the
//! recursive Shannon decomposition with its two-qubit end cases.

use std::fmt;

use crate::circuit::GateCounts;
use crate::error::{Error, Result};

mod qr;
mod qsd;
mod state;
mod two_qubit;

pub use qr::synth_qr;
pub use qsd::{demultiplex, synth_qsd, Demultiplexed};
pub use state::{disentangle_lsb, prepare_state};
pub use two_qubit::{interaction, kak, synth_two_qubit, two_qubit_up_to_diagonal, KakDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Qsd,
    Qr,
    StatePrep,
    /// Circuit of unknown origin, e.g. read from a file.
    External,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Qsd => "qsd",
            Method::Qr => "qr",
            Method::StatePrep => "prep",
            Method::External => "external",
        })
    }
}

/// Knobs for [`synth_qsd`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QsdOptions {
    /// Width at which recursion stops: 1 (ZYZ leaves) or 2 (two-qubit leaves).
    pub base_size: usize,
    /// Lower the central multiplexed Ry with CZ and fold one CZ into the
    /// neighboring block.
    pub opt_a1: bool,
    /// Synthesize two-qubit leaves up to a diagonal and push the diagonal
    /// into the next leaf.
    pub opt_a2: bool,
    /// Map the result onto a linear nearest-neighbor chain.
    pub nn: bool,
}

impl Default for QsdOptions {
    fn default() -> Self {
        QsdOptions {
            base_size: 2,
            opt_a1: true,
            opt_a2: true,
            nn: false,
        }
    }
}

impl QsdOptions {
    /// Recursion at the given base with both optimizations off.
    pub fn plain(base_size: usize) -> Self {
        QsdOptions {
            base_size,
            opt_a1: false,
            opt_a2: false,
            nn: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_size != 1 && self.base_size != 2 {
            return Err(Error::OptionConflict(format!(
                "base size must be 1 or 2, got {}",
                self.base_size
            )));
        }
        if self.opt_a2 && self.base_size != 2 {
            return Err(Error::OptionConflict("diagonal migration needs base size 2".into()));
        }
        Ok(())
    }
}

/// What a synthesizer produced and how well it reproduces its input.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisReport {
    pub method: Method,
    pub counts: GateCounts,
    /// Exact-mode max entry error of the emitted circuit.
    pub recon_err: f64,
    pub options: QsdOptions,
    /// Wall time in seconds.
    pub elapsed: f64,
}
