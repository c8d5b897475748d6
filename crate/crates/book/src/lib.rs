//! mdbook cannot test snippets that use workspace crates, so each chapter
//! is included here as a module doc and rustdoc runs it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/utility.md")]
pub mod utility {}
#[doc = include_str!("../../../book/src/frontier.md")]
pub mod frontier {}
#[doc = include_str!("../../../book/src/conflict.md")]
pub mod conflict {}
#[doc = include_str!("../../../book/src/elicitation.md")]
pub mod elicitation {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/interfaces.md")]
pub mod interfaces {}
