//! Structural recursion over inductive types: term encodings, a reduction
//! engine, abstract state machines, shortcut emulators, dataset generation
//! and evaluation.

pub mod asm;
pub mod binary;
pub mod dataset;
pub mod eval;
pub mod reduce;
pub mod remap;
pub mod shortcut;
pub mod term;
pub mod tree;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/encoding.md")]
    mod encoding {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/traces.md")]
    mod traces {}
    #[doc = include_str!("../../../book/src/machines.md")]
    mod machines {}
    #[doc = include_str!("../../../book/src/shortcuts.md")]
    mod shortcuts {}
    #[doc = include_str!("../../../book/src/datasets.md")]
    mod datasets {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
