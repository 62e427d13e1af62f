//! The book chapters from `book/src`, included as module docs so that
//! `cargo test --doc` compiles and runs every code block in the guide.
//! Rendered copies live under `target/book` after `mdbook build book`.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/special-functions.md")]
pub mod special_functions {}

#[doc = include_str!("../../../book/src/quadrature.md")]
pub mod quadrature_rules {}

#[doc = include_str!("../../../book/src/eigenbasis.md")]
pub mod eigenbasis {}

#[doc = include_str!("../../../book/src/forward.md")]
pub mod forward_problem {}

#[doc = include_str!("../../../book/src/inverse.md")]
pub mod source_reconstruction {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod command_line {}
