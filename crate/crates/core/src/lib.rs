//! Offline evaluation for carousel recommendation interfaces.
//!
//! A carousel interface shows a user several stacked recommendation lists
//! (a page). Evaluating the lists one at a time ignores two things: users
//! scan the page from the top-left corner outward rather than row by row,
//! and an item repeated across carousels helps the user only once. This
//! crate provides the pieces needed to measure both effects offline:
//!
//! - [`data`]: MovieLens-format ingestion, sparse user-item matrices, and
//!   seeded holdout splits.
//! - [`models`]: six recommender families (TopPopular, hybrid ItemKNN,
//!   RP3beta, EASE, FunkSVD, NMF) and top-k list generation.
//! - [`metrics`]: per-list NDCG and the two-dimensional, deduplicating
//!   page metric NDCG2D.
//! - [`eval`]: the individual and page-conditional evaluation protocols
//!   and rank-comparison reports.
//! - [`tuning`]: seeded random hyperparameter search.
//! - [`synth`]: deterministic synthetic datasets for tests and demos.

pub mod data;
pub mod dense;
pub mod error;
pub mod eval;
pub mod metrics;
pub mod models;
pub mod sparse;
pub mod synth;
pub mod tuning;

pub use error::{Error, Result};
