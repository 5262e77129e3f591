//! The guide's code blocks, compiled as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/spaces.md")]
pub mod spaces {}
#[doc = include_str!("../../../book/src/greedy.md")]
pub mod greedy {}
#[doc = include_str!("../../../book/src/selectors.md")]
pub mod selectors {}
#[doc = include_str!("../../../book/src/diagnostics.md")]
pub mod diagnostics {}
#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
