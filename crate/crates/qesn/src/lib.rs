//! Simulator and benchmark harness for a gate-based quantum echo state
//! network driven by mid-circuit measurements.
//!
//! The crate is organised in layers:
//!
//! * [`state`] — complex quantum-state primitives: state vectors, density
//!   matrices, gate application, trace distance, partial trace.
//! * [`gates`] — one- and two-qubit unitary gates and tensor embedding.
//! * [`channels`] — Kraus noise channels (amplitude damping, phase damping,
//!   depolarizing, flips, thermal relaxation) and their composition.
//! * [`diagnostics`] — channel analysis: unitality, Bloch-affine
//!   representation, pure-output classification, contraction coefficients
//!   and fixed-point spectra.
//! * [`reservoir`] — the echo state network itself: input encoding layers,
//!   noisy per-step evolution, mid-circuit measurement, and the exact
//!   (infinite-shot) and trajectory (finite-shot) backends.
//! * [`learning`] — readout training by pseudoinverse, benchmark task
//!   generation (NARMA, delay memory) and metrics (NMSE, memory capacity,
//!   shot correlation).
//! * [`experiments`] — scripted sweeps and diagnostics reproducing the
//!   noise-versus-performance studies, with CSV/JSON artifact emission.

pub mod channels;
pub mod diagnostics;
pub mod experiments;
pub mod gates;
pub mod learning;
pub mod reservoir;
pub mod state;

pub use channels::{ChannelKind, KrausChannel, NoiseSpec};
pub use gates::UnitaryGate;
pub use state::{trace_distance, DensityMatrix, StateVector};
