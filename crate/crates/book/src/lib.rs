//! Compiles and runs the code blocks of the guide in `book/src` as
//! doc-tests, so the guide cannot drift from the library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/instances.md")]
pub mod instances {}

#[doc = include_str!("../../../book/src/laminar.md")]
pub mod laminar {}

#[doc = include_str!("../../../book/src/lp.md")]
pub mod lp {}

#[doc = include_str!("../../../book/src/dp.md")]
pub mod dp {}

#[doc = include_str!("../../../book/src/decomposition.md")]
pub mod decomposition {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
