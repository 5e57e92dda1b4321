use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::store::{AsmState, Loc, StateView, Value};
use crate::term::Token;

pub type Guard = Arc<dyn Fn(&StateView) -> bool + Send + Sync>;
pub type Updates = Arc<dyn Fn(&StateView) -> Vec<(Loc, Value)> + Send + Sync>;
pub type Init = Arc<dyn Fn(&[Token]) -> Result<AsmState, AsmError> + Send + Sync>;
pub type Halted = Arc<dyn Fn(&AsmState) -> bool + Send + Sync>;
pub type Output = Arc<dyn Fn(&AsmState) -> Vec<Token> + Send + Sync>;

/// Two fired rules wrote different values to one location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("update clash on {loc}: rule {first} writes {a}, rule {second} writes {b}")]
pub struct UpdateClash {
    pub loc: Loc,
    pub first: String,
    pub second: String,
    pub a: Value,
    pub b: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsmError {
    #[error(transparent)]
    Clash(Box<UpdateClash>),
    #[error("step budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("machine is already halted")]
    Halted,
    #[error("malformed input: {0}")]
    Malformed(String),
}

/// `if guard then updates`.
#[derive(Clone)]
pub struct GuardedRule {
    pub id: String,
    pub guard: Guard,
    pub updates: Updates,
}

impl GuardedRule {
    pub fn new(
        id: &str,
        guard: impl Fn(&StateView) -> bool + Send + Sync + 'static,
        updates: impl Fn(&StateView) -> Vec<(Loc, Value)> + Send + Sync + 'static,
    ) -> Self {
        GuardedRule {
            id: id.to_owned(),
            guard: Arc::new(guard),
            updates: Arc::new(updates),
        }
    }
}

impl fmt::Debug for GuardedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GuardedRule({})", self.id)
    }
}

#[derive(Clone)]
pub struct AsmMachine {
    pub name: String,
    pub rules: Vec<GuardedRule>,
    pub init: Init,
    pub halted: Halted,
    pub output: Output,
}

impl fmt::Debug for AsmMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AsmMachine")
            .field("name", &self.name)
            .field("rules", &self.rules)
            .finish()
    }
}

impl AsmMachine {
    pub fn rule_ids(&self) -> Vec<&str> {
        self.rules.iter().map(|r| r.id.as_str()).collect()
    }

    /// The same machine with its rule list permuted by `order`.
    pub fn with_rule_order(&self, order: &[usize]) -> AsmMachine {
        AsmMachine {
            rules: order.iter().map(|&i| self.rules[i].clone()).collect(),
            ..self.clone()
        }
    }
}

/// What one step did.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub fired: Vec<String>,
    pub updates: Vec<(Loc, Value)>,
    /// Locations read by guards, per rule id, including rules that did not fire.
    #[serde(skip)]
    pub guard_reads: BTreeMap<String, Vec<Loc>>,
}

impl fmt::Display for StepRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {}: [{}]", self.step, self.fired.join(", "))?;
        for (l, v) in &self.updates {
            write!(f, " {l}:={v}")?;
        }
        Ok(())
    }
}

fn fire(m: &AsmMachine, s: &AsmState, step: usize) -> Result<(AsmState, StepRecord), AsmError> {
    let view = StateView::new(s);
    let mut fired = Vec::new();
    let mut guard_reads = BTreeMap::new();
    let mut writes: BTreeMap<Loc, (Value, &str)> = BTreeMap::new();
    let mut updates = Vec::new();
    for r in &m.rules {
        let on = (r.guard)(&view);
        guard_reads.insert(r.id.clone(), view.take_reads());
        if !on {
            continue;
        }
        fired.push(r.id.clone());
        for (loc, v) in (r.updates)(&view) {
            match writes.get(&loc) {
                Some((prev, _)) if *prev == v => {}
                Some((prev, who)) => {
                    // Report the clash in a rule-order independent way.
                    let (first, a, second, b) = if *who <= r.id.as_str() {
                        (who.to_string(), prev.clone(), r.id.clone(), v)
                    } else {
                        (r.id.clone(), v, who.to_string(), prev.clone())
                    };
                    return Err(AsmError::Clash(Box::new(UpdateClash {
                        loc,
                        first,
                        second,
                        a,
                        b,
                    })));
                }
                None => {
                    writes.insert(loc, (v.clone(), &r.id));
                    updates.push((loc, v));
                }
            }
        }
        view.take_reads();
    }
    let mut next = s.clone();
    for (loc, (v, _)) in writes {
        next.set(loc, v);
    }
    updates.sort_by_key(|u| u.0);
    fired.sort();
    Ok((
        next,
        StepRecord {
            step,
            fired,
            updates,
            guard_reads,
        },
    ))
}

/// Fire every rule whose guard holds in `s`, applying all updates at once.
pub fn asm_step(m: &AsmMachine, s: &AsmState) -> Result<AsmState, AsmError> {
    asm_step_logged(m, s, 0).map(|(s, _)| s)
}

pub fn asm_step_logged(m: &AsmMachine, s: &AsmState, step: usize) -> Result<(AsmState, StepRecord), AsmError> {
    if (m.halted)(s) {
        return Err(AsmError::Halted);
    }
    fire(m, s, step)
}

#[derive(Debug, Clone)]
pub struct AsmRun {
    pub state: AsmState,
    pub steps: usize,
    pub log: Vec<StepRecord>,
}

impl AsmRun {
    pub fn log_text(&self) -> String {
        self.log.iter().map(|r| format!("{r}\n")).collect()
    }
}

/// Step from `init(input)` until halted.
pub fn asm_run(m: &AsmMachine, input: &[Token], budget: usize) -> Result<AsmRun, AsmError> {
    asm_run_from(m, (m.init)(input)?, budget)
}

pub fn asm_run_from(m: &AsmMachine, mut state: AsmState, budget: usize) -> Result<AsmRun, AsmError> {
    if budget == 0 {
        return Err(AsmError::ZeroBudget);
    }
    let mut log = Vec::new();
    let mut steps = 0;
    while !(m.halted)(&state) {
        if steps == budget {
            return Err(AsmError::BudgetExhausted(budget));
        }
        let (next, rec) = fire(m, &state, steps + 1)?;
        state = next;
        log.push(rec);
        steps += 1;
    }
    Ok(AsmRun { state, steps, log })
}

#[cfg(test)]
mod tests {
    use super::*;

    const OUT: Loc = Loc::new("out");
    const DONE: Loc = Loc::new("done");

    fn machine(rules: Vec<GuardedRule>) -> AsmMachine {
        AsmMachine {
            name: "t".into(),
            rules,
            init: Arc::new(|_| Ok(AsmState::new())),
            halted: Arc::new(|s| s.get(DONE).truthy()),
            output: Arc::new(|_| Vec::new()),
        }
    }

    #[test]
    fn no_true_guard_leaves_state() {
        let m = machine(vec![GuardedRule::new(
            "never",
            |_| false,
            |_| vec![(OUT, Value::tok("X0"))],
        )]);
        let s = AsmState::new().with(Loc::new("x"), 1usize);
        assert_eq!(asm_step(&m, &s).unwrap(), s);
    }

    #[test]
    fn inconsistent_updates_clash() {
        let m = machine(vec![
            GuardedRule::new("a", |_| true, |_| vec![(OUT, Value::tok("X0"))]),
            GuardedRule::new("b", |_| true, |_| vec![(OUT, Value::tok("X1"))]),
        ]);
        let err = asm_step(&m, &AsmState::new()).unwrap_err();
        assert!(matches!(&err, AsmError::Clash(c) if c.loc == OUT));
        let swapped = asm_step(&m.with_rule_order(&[1, 0]), &AsmState::new()).unwrap_err();
        assert_eq!(err, swapped);
    }

    #[test]
    fn agreeing_updates_do_not_clash() {
        let m = machine(vec![
            GuardedRule::new("a", |_| true, |_| vec![(OUT, Value::tok("X0"))]),
            GuardedRule::new("b", |_| true, |_| vec![(OUT, Value::tok("X0")), (DONE, true.into())]),
        ]);
        let s = asm_step(&m, &AsmState::new()).unwrap();
        assert!(s.get(OUT).is_token("X0"));
    }

    #[test]
    fn updates_read_the_old_state() {
        let a = Loc::new("a");
        let b = Loc::new("b");
        let m = machine(vec![
            GuardedRule::new("ab", |_| true, move |v| vec![(a, v.get(b).clone())]),
            GuardedRule::new("ba", |_| true, move |v| vec![(b, v.get(a).clone())]),
        ]);
        let s = AsmState::new().with(a, 1usize).with(b, 2usize);
        let t = asm_step(&m, &s).unwrap();
        assert_eq!((t.get(a), t.get(b)), (&Value::Nat(2), &Value::Nat(1)));
    }

    #[test]
    fn halted_start_takes_zero_steps() {
        let m = machine(vec![]);
        let run = asm_run_from(&m, AsmState::new().with(DONE, true), 5).unwrap();
        assert_eq!(run.steps, 0);
        assert_eq!(asm_step(&m, &run.state), Err(AsmError::Halted));
    }

    #[test]
    fn budget() {
        let m = machine(vec![]);
        assert_eq!(asm_run(&m, &[], 0).unwrap_err(), AsmError::ZeroBudget);
        assert_eq!(asm_run(&m, &[], 3).unwrap_err(), AsmError::BudgetExhausted(3));
    }
}
