//! Recursive decomposition sessions.
//!
//! A session starts from one primitive. Each node is decomposed by a solver,
//! and the architect accepts coalitions as child primitives (optionally
//! edited), terminates leaves, or drops requirements. The tree is served
//! over HTTP under `/v1`.

pub mod http;
pub mod restrict;
pub mod session;
pub mod store;

pub use http::router;
pub use session::{SessionError, SessionTree};
pub use store::Store;
