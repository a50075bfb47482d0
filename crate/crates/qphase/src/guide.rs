//! The mdbook guide, attached chapter by chapter as doc comments so that
//! `cargo test --doc` compiles and runs every code block in the book.
//! Build the rendered book with `mdbook build book/` at the repository
//! root.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/posterior.md")]
pub mod posterior {}

#[doc = include_str!("../../../book/src/interferometer.md")]
pub mod interferometer {}

#[doc = include_str!("../../../book/src/protocols.md")]
pub mod protocols {}

#[doc = include_str!("../../../book/src/limits.md")]
pub mod limits {}

#[doc = include_str!("../../../book/src/discrimination.md")]
pub mod discrimination {}

#[doc = include_str!("../../../book/src/montecarlo.md")]
pub mod montecarlo {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
