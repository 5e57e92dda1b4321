//! Abstract state machines: guarded rules fired simultaneously over a
//! location store, and a recursive runner where callers wait on child agents.

mod machine;
mod rasm;
mod store;
pub mod successor;
pub mod traversal;

pub use machine::{
    asm_run, asm_run_from, asm_step, asm_step_logged, AsmError, AsmMachine, AsmRun, Guard, GuardedRule, StepRecord,
    UpdateClash, Updates,
};
pub use rasm::{rasm_run, Argument, CallRule, RasmRun, RasmSpec, RET, RET_LEN};
pub use store::{AsmState, Loc, StateView, Value};
pub use successor::{successor_asm, successor_rasm};
pub use traversal::{agent_input, traversal_rasm};

/// Default per-agent step budget.
pub const DEFAULT_BUDGET: usize = 1 << 16;

#[cfg(test)]
mod tests;
