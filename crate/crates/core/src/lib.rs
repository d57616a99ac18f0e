//! Two-stage covering array construction.

pub mod bounds;
pub mod combin;
pub mod coverage;
pub mod error;
pub mod field;
pub mod groups;
pub mod model;
pub mod pipeline;
pub mod rng;
pub mod stage1;
pub mod stage2;

pub use error::{Error, Result};
pub use groups::GroupKind;
pub use model::{Array, Interaction, Parameters};
