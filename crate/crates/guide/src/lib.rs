//! The guide in `book/` as doc modules, so `cargo test --doc` runs every
//! snippet in it against the current crates.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/stimuli.md")]
pub mod stimuli {}
#[doc = include_str!("../../../book/src/rdms.md")]
pub mod rdms {}
#[doc = include_str!("../../../book/src/statistics.md")]
pub mod statistics {}
#[doc = include_str!("../../../book/src/ablation.md")]
pub mod ablation {}
#[doc = include_str!("../../../book/src/service.md")]
pub mod service {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
