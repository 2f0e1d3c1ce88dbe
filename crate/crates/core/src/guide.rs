//! The guide's chapters, compiled as documentation tests.
//!
//! Each module below embeds one chapter of the book (`book/src/*.md`) as
//! its documentation, so `cargo test` executes every code block in the
//! guide and the prose can never drift from the library. The rendered
//! book lives at `book/` and is built with `mdbook build book`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}

#[doc = include_str!("../../../book/src/separators.md")]
pub mod separators {}

#[doc = include_str!("../../../book/src/oracles.md")]
pub mod oracles {}

#[doc = include_str!("../../../book/src/learning.md")]
pub mod learning {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
