//! Convolutional Tsetlin machine over binarized spectral feature maps.
//!
//! A clause is a conjunction over the literals of one window: `W` whole
//! frame columns (every channel and mel bin), optionally followed by a
//! thermometer code of the window position. The window slides along time
//! with stride 1 and a clause votes if it matches at any position.

mod clause;
mod io;
mod model;
mod train;
mod windows;

pub use clause::{clause_literals, eval_clause_window, Clause, ClauseEval, EvalMode};
pub use io::{read_model_file, write_model_file, MODEL_MAGIC, MODEL_VERSION};
pub use model::{CtmConfig, CtmModel, FeatureDims};
pub use train::{feedback_probability, train, train_step, type_i_feedback, type_ii_feedback, TrainTrace};
pub use windows::WindowInputs;
