use std::sync::Arc;

use super::machine::{asm_step_logged, AsmError, AsmMachine, Guard};
use super::store::{AsmState, Loc, StateView};
use crate::term::Token;

/// Where a finished child's output lands in its caller.
pub const RET: &str = "ret";
pub const RET_LEN: Loc = Loc::new("ret_len");

pub type Argument = Arc<dyn Fn(&StateView) -> Vec<Token> + Send + Sync>;

/// When `guard` holds the agent waits on a child started on `argument`.
/// The child's output is written to `ret(0..)` and `ret_len`; the guard must
/// turn false once `ret_len` is set.
#[derive(Clone)]
pub struct CallRule {
    pub guard: Guard,
    pub argument: Argument,
}

#[derive(Clone)]
pub struct RasmSpec {
    pub machine: AsmMachine,
    pub call: CallRule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasmRun {
    pub output: Vec<Token>,
    /// Agents spawned besides the main one.
    pub children: usize,
    /// Longest chain of waiting callers below the main agent.
    pub max_depth: usize,
    pub steps: usize,
}

struct Agent {
    state: AsmState,
    steps: usize,
}

/// Run the main agent on `input`. Only the innermost agent fires rules; its
/// callers wait. `budget` bounds the steps of each agent.
pub fn rasm_run(spec: &RasmSpec, input: &[Token], budget: usize) -> Result<RasmRun, AsmError> {
    if budget == 0 {
        return Err(AsmError::ZeroBudget);
    }
    let m = &spec.machine;
    let mut stack = vec![Agent {
        state: (m.init)(input)?,
        steps: 0,
    }];
    let (mut children, mut max_depth, mut steps) = (0, 0, 0);
    loop {
        let top = stack.last_mut().expect("stack is non-empty");
        if (m.halted)(&top.state) {
            let out = (m.output)(&top.state);
            stack.pop();
            match stack.last_mut() {
                None => {
                    return Ok(RasmRun {
                        output: out,
                        children,
                        max_depth,
                        steps,
                    })
                }
                Some(caller) => caller.state.load(RET, RET_LEN, &out),
            }
            continue;
        }
        let view = StateView::new(&top.state);
        if (spec.call.guard)(&view) {
            let arg = (spec.call.argument)(&view);
            stack.push(Agent {
                state: (m.init)(&arg)?,
                steps: 0,
            });
            children += 1;
            max_depth = max_depth.max(stack.len() - 1);
            continue;
        }
        if top.steps == budget {
            return Err(AsmError::BudgetExhausted(budget));
        }
        let (next, _) = asm_step_logged(m, &top.state, top.steps + 1)?;
        top.state = next;
        top.steps += 1;
        steps += 1;
    }
}
