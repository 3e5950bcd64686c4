//! Exact-geometry testbed for continual learning over satisfaction regions.
//!
//! A task is a finite empirical measure over input/output pairs. A binary
//! criterion carves out the convex region of parameter space that satisfies
//! it on one task; learning a stream of tasks without forgetting means
//! staying inside the running intersection of those regions. This crate
//! builds that picture out of exact rational arithmetic so every feasibility
//! question has a yes/no answer with a witness:
//!
//! - [`geometry`]: halfspace/ball regions, an exact phase-1/2 simplex over
//!   rationals, Chebyshev centers, ball feasibility by subgradient descent.
//! - [`criteria`]: empirical tasks, the three criterion kinds, and the map
//!   from task to satisfaction region.
//! - [`cl`]: the continual-learning recursion, traces, optimality and
//!   invariance checks, and the lift to region-fed (idealized) algorithms.
//! - [`algorithms`]: an exact optimal learner, a replay/coreset heuristic,
//!   and a quadratic-penalty regularization heuristic.
//! - [`equivalence`]: sign vectors, cell enumeration over region families,
//!   minimal representations, and the perfect-memory checker.
//! - [`harness`]: seeded stream generators, experiment drivers, and CSV
//!   emission; [`taskfile`] holds the JSON task format.
//!
//! With the default `parallel` feature, cell enumeration and experiment
//! runs fan out over rayon; disabling it compiles the sequential fallback
//! with identical outputs.

pub mod algorithms;
pub mod cl;
pub mod criteria;
pub mod equivalence;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod rat;
pub mod taskfile;

pub use error::{Error, Result};
pub use rat::{Rat, RatVec};
