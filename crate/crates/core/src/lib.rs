//! Keyword spotting with a convolutional Tsetlin machine over binarized
//! log-mel and spectral-flux features, plus the deployment toolchain:
//! block-compressed include masks with matched group sharing, PE
//! scheduling, and a state-driven sparse accelerator model.

pub mod accel;
pub mod compress;
pub mod config;
pub mod ctm;
pub mod dataset;
pub mod error;
pub mod frontend;
pub mod registry;
pub mod schedule;

pub use error::{Error, Result};
