//! Exact synthesis of quantum circuits from unitary matrices and state
//! vectors.
//!
//! The toolkit lowers arbitrary `n`-qubit operators to `Ry`, `Rz`, `CNOT`,
//! `CZ` and an explicit global phase using the quantum Shannon decomposition
//! (cosine-sine split, multiplexor demultiplexing, two-qubit end cases), a
//! column-by-column QR synthesis built from state preparation, and a
//! diagonal-operator synthesizer. Every emitted circuit reproduces its input
//! exactly, global phase included, and can be checked with the dense
//! simulator in [`sim`].
//!
//! Conventions: qubit 0 is the most significant bit of a basis index and the
//! top wire of a circuit. Gate lists are in time order, so the matrix of a
//! circuit is the product of its gate matrices in reverse list order.
//!
//! ```
//! use qsynth::linalg::random_unitary;
//! use qsynth::synth::{synth_qsd, QsdOptions};
//!
//! let u = random_unitary(3, 7);
//! let (circuit, report) = synth_qsd(&u, &QsdOptions::default()).unwrap();
//! assert_eq!(report.counts.cnot_equivalent(), 20);
//! assert!(report.recon_err < 1e-8);
//! assert_eq!(circuit.width(), 3);
//! ```

pub mod circuit;
pub mod cli;
pub mod error;
pub mod io;
pub mod layout;
pub mod linalg;
pub mod mux;
pub mod sim;
pub mod synth;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
