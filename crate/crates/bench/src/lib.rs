//! Intentionally empty: this package only carries the `kernels` benchmark
//! target (see `benches/kernels.rs`).
