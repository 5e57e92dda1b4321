//! Small-step reduction of structurally recursive programs over inductive
//! values, with traces at single-redex and level granularity.

mod engine;
mod expr;
mod program;
pub mod render;

pub use engine::{Partial, Redex, ReduceError, ReductionStep, Trace, CONCAT_RULE};
pub use expr::Expr;
pub use program::{
    add_program, builtin, builtin_programs, inorder_program, preorder_program, successor_program, Clause, Pattern,
    PayloadRef, Program, ProgramError, Programs, Template,
};
pub use render::{render_trace, TraceStyle};
