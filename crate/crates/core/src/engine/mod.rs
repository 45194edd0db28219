//! Runtime: states, transitions, observations, playouts and batched
//! environments.

pub mod batch;
pub mod observe;
pub mod playout;
pub mod rng;
pub mod state;
mod step;

pub use batch::{BatchEnv, BatchError};
pub use observe::Observation;
pub use playout::{random_playout, PlayoutResult, TrajectoryRecord};
pub use state::{ActionKind, GameState, LastAction, Outcome, PlayerResult};
pub use step::StepError;

/// Default turn cap for playouts.
pub const DEFAULT_MAX_TURNS: u32 = 200;
