//! The book chapters from `book/src`, embedded as rustdoc modules so that
//! `cargo test --doc` compiles and runs every code sample in the guide. The
//! book and the library cannot drift apart: a snippet that stops working
//! fails the test suite.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/scoring.md")]
pub mod scoring {}

#[doc = include_str!("../../../book/src/notation.md")]
pub mod notation {}

#[doc = include_str!("../../../book/src/uniformity.md")]
pub mod uniformity {}

#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}

#[doc = include_str!("../../../book/src/fitting.md")]
pub mod fitting {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
