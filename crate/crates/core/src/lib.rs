//! Novelty-search-augmented genetic algorithm with an agent-based 2-D
//! tumor-treatment simulator as its evaluation function.
//!
//! The crate is organized around four layers:
//!
//! - simulator: [`oxygen`], [`world`], [`snapshot`], [`sim`] — grows a tumor,
//!   injects worker/cargo agents, and maps a genome plus a seed to a
//!   remaining-cell count and the workers' final center of gravity;
//! - search: [`evo`] — generational GA with tournament selection, uniform
//!   crossover, and step mutation over the bounded 6-parameter genome;
//! - novelty: [`novelty`] — behavior archive, k-NN sparseness, and the
//!   hybrid objective/novelty fitness;
//! - harness: [`config`], [`harness`] — experiment orchestration, CSV/SVG
//!   outputs, and the fast deceptive surrogate in [`bench`].

pub mod bench;
pub mod cell;
pub mod config;
pub mod error;
pub mod evo;
pub mod genome;
pub mod harness;
pub mod novelty;
pub mod oxygen;
pub mod params;
pub mod rng;
pub mod sim;
pub mod snapshot;
pub mod text;
pub mod vec2;
pub mod world;

pub use error::{Error, Result};
