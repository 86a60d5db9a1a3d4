//! Face identification in a transformed domain.
//!
//! Whole-image DCT/DFT coefficients cut down by a zonal mask are used as
//! feature vectors and compared with the eigenface (KLT) projection. Four
//! classifiers (nearest neighbour, MLP, PNN, RBF) and mean-rule score fusion
//! sit on top, together with the experiment protocols that measure
//! identification rates on ORL-layout corpora.

pub mod classifiers;
pub mod dataset;
pub mod eigenfaces;
pub mod error;
pub mod eval;
pub mod exec;
pub mod fusion;
pub mod stats;
pub mod transforms;

pub use error::{Error, Result};
pub use exec::Execution;
