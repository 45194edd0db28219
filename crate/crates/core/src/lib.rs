//! Game description language, compiler and batched simulator for
//! two-player abstract board games, with search agents, a game-quality
//! evaluator and a random game generator.

pub mod agents;
pub mod compiler;
pub mod corpus;
pub mod dsl;
pub mod engine;
pub mod generator;
pub mod eval;
pub mod topology;

pub use compiler::{compile, compile_str, CompileError, CompiledGame};
pub use dsl::ast::Player;
pub use engine::{GameState, Outcome};
