//! Meta-learned initialization for single-layer QAOA on Max-Cut.
//!
//! This crate is `no_std` (it needs `alloc`) and holds every numerical piece of
//! the pipeline:
//!
//! * [`graphlab`]: Erdős–Rényi instances, cut values, brute-force optimum.
//! * [`qsim`]: dense statevector simulator, the QAOA ansatz and its exact
//!   gradient, variational readout circuits and the fidelity kernel.
//! * [`gradkit`]: a scalar reverse-mode tape with custom-gradient nodes, plus
//!   RMSprop and SGD.
//! * [`seqmodels`]: LSTM, QLSTM, QK-LSTM and QFWP meta-optimizers.
//! * [`metaloop`]: the weighted meta-loss and the BPTT training loop.
//! * [`bench`]: the two-phase test protocol, the random-seed baseline and the
//!   reported metrics.
//!
//! File formats, the command line and thread-parallel drivers live in the
//! `qmeta` companion crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bench;
pub mod error;
pub mod gradkit;
pub mod graphlab;
pub mod math;
pub mod metaloop;
pub mod qsim;
pub mod rng;
pub mod seqmodels;

pub use error::{Error, Result};
