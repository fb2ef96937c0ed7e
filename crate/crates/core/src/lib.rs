//! Requirements decomposition as a coalition game.
//!
//! Requirements are players. A coalition's utility sums pairwise interactions
//! derived from how relevant requirements are to each other and how their
//! quality attributes trade off. A decomposition is a solution when each
//! coalition is cohesive and no two coalitions gain by merging.
//!
//! ```
//! use archgame_core::{corpus, solver, GameContext};
//!
//! let m = corpus::running_example();
//! let ctx = GameContext::new(m.primitive.clone(), m.params_or_default()).unwrap();
//! let report = solver::solve_exact(&ctx).unwrap();
//! assert_eq!(report.decomposition.len(), 2);
//! assert!((report.utilities[0] - 2.5).abs() < 1e-9);
//! ```

pub mod corpus;
pub mod error;
pub mod io;
pub mod model;
pub mod reduction;
pub mod relevance;
pub mod solver;
pub mod utility;

pub use error::{Error, Result};
pub use model::{
    AttributePrimitive, ClosureMode, Coalition, Constraint, Decomposition, GameParams, Model, Requirement,
    RequirementId, RequirementKind, TradeoffMatrix, Violation,
};
pub use solver::{SolveMode, SolveReport};
pub use utility::GameContext;
