//! Runs the code in the book as doctests.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../book/src/images.md")]
pub mod images {}

#[doc = include_str!("../../book/src/genomes.md")]
pub mod genomes {}

#[doc = include_str!("../../book/src/rendering.md")]
pub mod rendering {}

#[doc = include_str!("../../book/src/fitness.md")]
pub mod fitness {}

#[doc = include_str!("../../book/src/coevolution.md")]
pub mod coevolution {}

#[doc = include_str!("../../book/src/reproducibility.md")]
pub mod reproducibility {}

#[doc = include_str!("../../book/src/command-line.md")]
pub mod command_line {}
