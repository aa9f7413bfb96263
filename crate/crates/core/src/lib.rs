//! Density-based clustering with a classical reference implementation and a
//! Grover-accelerated counterpart evaluated under an idealized query model.

pub mod clue;
pub mod datagen;
pub mod error;
pub mod grover;
pub mod io;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod qcircuit;

pub use clue::{run_clue, ClusterResult, NOISE};
pub use datagen::{DatasetSpec, EnergyProfile};
pub use error::{Error, Result};
pub use grover::{GroverModel, GroverOutcome, PhaseCounts, QueryLedger};
pub use metrics::{NoiseHandling, Scores};
pub use model::{Dataset, NhSearch, Params, Point, Quantizer, Role, SearchSpace, SqDist, TileGrid};
pub use pipeline::{run_qlue, PipelineRun};
