use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use strec::asm::{agent_input, asm_run, rasm_run, successor_asm, successor_rasm, traversal_rasm, AsmError};
use strec::binary::{bin_parse, peano};
use strec::dataset::{generate, read_jsonl, to_jsonl, DatasetSpec, ExampleRecord, JsonlError, Task};
use strec::eval::{
    render_report, validate_trace, BreakdownKey, EvalError, MetricsReport, PredictionRecord, ReportFormat,
    TraceJudgment,
};
use strec::reduce::render::{lex, render_state, style_for};
use strec::reduce::{builtin_programs, render_trace, Expr, ReduceError, TraceStyle};
use strec::shortcut::{diff_against_oracle, emulate_logged, Mode, ShortcutError, ShortcutKind};
use strec::term::{delinearize, join, linearize, peano_def, reorder, Order, Term, Token, TokenSeq};
use strec::tree::{leaf, tree_parse, LEAF_TOKEN};

use crate::args::*;
use crate::CliError;

macro_rules! outln {
    ($out:expr, $($arg:tt)*) => {{
        let _ = writeln!($out, $($arg)*);
    }};
}

macro_rules! outs {
    ($out:expr, $($arg:tt)*) => {{
        let _ = write!($out, $($arg)*);
    }};
}

/// Run one subcommand, appending what it prints to `out`.
pub fn run(cli: Cli, out: &mut String) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => gen(out, a),
        Command::Reduce(a) => reduce(out, a),
        Command::Shortcut(a) => shortcut(out, a),
        Command::Asm(a) => asm(out, a),
        Command::Eval(a) => eval(out, a),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn jsonl_err(e: JsonlError) -> CliError {
    match e {
        JsonlError::Io { path, source } => CliError::Io { path, source },
        e @ JsonlError::Schema { .. } => CliError::Malformed(e.to_string()),
    }
}

fn order(o: OrderArg) -> Order {
    match o {
        OrderArg::Reverse => Order::ConstructorReverse,
        OrderArg::Natural => Order::Natural,
        OrderArg::Tree => Order::TreeAppendix,
    }
}

// ---- gen -------------------------------------------------------------------

#[derive(Serialize)]
struct ManifestFile {
    split: String,
    file: String,
    records: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    spec: &'a DatasetSpec,
    seed: u64,
    files: Vec<ManifestFile>,
}

fn gen_task(a: &GenArgs) -> Task {
    match (a.task, a.func, a.trace) {
        (GenTask::Trees, TraversalFunc::Inorder, false) => Task::Inorder,
        (GenTask::Trees, TraversalFunc::Inorder, true) => Task::InorderTrace,
        (GenTask::Trees, TraversalFunc::Preorder, false) => Task::Preorder,
        (GenTask::Trees, TraversalFunc::Preorder, true) => Task::PreorderTrace,
        (GenTask::Successor, ..) => Task::Successor,
        (GenTask::SuccessorStep, ..) => Task::SuccessorStep,
        (GenTask::SuccessorTrace, ..) => Task::SuccessorTrace,
        (GenTask::Preorder, ..) => Task::Preorder,
        (GenTask::Inorder, ..) => Task::Inorder,
        (GenTask::PreorderTrace, ..) => Task::PreorderTrace,
        (GenTask::InorderTrace, ..) => Task::InorderTrace,
    }
}

fn gen(out: &mut String, a: GenArgs) -> Result<(), CliError> {
    let task = gen_task(&a);
    let mut spec = DatasetSpec::new(task);
    if let Some(o) = a.order {
        spec.order = order(o);
    }
    spec.values = a.range.map(|s| s.0);
    spec.random_bits = a.random_bits.map(|s| s.0);
    spec.random_count = a.random_count;
    spec.edge_bits = a.edge_cases.map(|s| s.0);
    spec.depths = a.depths.0;
    spec.alphabet = a.alphabet;
    spec.train_count = a.train;
    spec.test_count = a.test;
    spec.k = a.k;
    spec.remap = a.remap;
    spec.pad_max = a.pad_max;
    spec.pad_token = a.pad_token;
    spec.k1 = a.k1;
    spec.k2 = a.k2;
    spec.upweight = a.upweight;
    spec.seed = a.seed;

    let splits = generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    fs::create_dir_all(&a.out_dir).map_err(io_err(&a.out_dir))?;
    let stem = a.name.unwrap_or_else(|| task.name().to_owned());
    let mut files = Vec::new();
    for s in &splits {
        let file = format!("{stem}-{}.jsonl", s.name);
        let path = a.out_dir.join(&file);
        let text = to_jsonl(&s.records);
        fs::write(&path, &text).map_err(io_err(&path))?;
        outln!(out, "{}: {} records -> {}", s.name, s.records.len(), path.display());
        files.push(ManifestFile {
            split: s.name.clone(),
            file,
            records: s.records.len(),
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
        });
    }
    let manifest = Manifest {
        spec: &spec,
        seed: spec.seed,
        files,
    };
    let path = a.out_dir.join(format!("{stem}.manifest.json"));
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))?;
    outln!(out, "manifest -> {}", path.display());
    Ok(())
}

// ---- reduce ------------------------------------------------------------------

fn parse_binary(text: &str, o: Order) -> Result<Term, CliError> {
    bin_parse(&lex(text), o).map_err(|e| CliError::Malformed(format!("`{text}`: {e}")))
}

fn parse_peano(text: &str) -> Result<Term, CliError> {
    if let Ok(n) = text.trim().parse::<u64>() {
        return peano(n).map_err(|e| CliError::Malformed(e.to_string()));
    }
    let toks: Vec<Token> = lex(text).into_iter().filter(|t| t != "(" && t != ")").collect();
    delinearize(&TokenSeq::new(toks, Order::ConstructorReverse), &peano_def())
        .map_err(|e| CliError::Malformed(format!("`{text}`: {e}")))
}

fn parse_tree(text: &str) -> Result<Term, CliError> {
    let toks = lex(text);
    if toks.len() == 1 && toks[0] == LEAF_TOKEN {
        return Ok(leaf());
    }
    tree_parse(&toks).map_err(|e| CliError::Malformed(format!("`{text}`: {e}")))
}

/// A paren-style successor state read right to left.
fn natural_paren(mut toks: Vec<Token>) -> Vec<Token> {
    toks.reverse();
    for t in &mut toks {
        if t == "(" {
            *t = Token::from(")");
        } else if t == ")" {
            *t = Token::from("(");
        }
    }
    toks
}

fn reduce_err(e: ReduceError) -> CliError {
    match e {
        ReduceError::FuelExhausted(_) => CliError::Fuel(e.to_string()),
        other => CliError::Malformed(other.to_string()),
    }
}

fn reduce(out: &mut String, a: ReduceArgs) -> Result<(), CliError> {
    let o = order(a.order);
    let (name, args) = match a.func {
        Func::S => ("s", vec![parse_binary(&a.args[0], o)?]),
        Func::Add => {
            if a.args.len() != 2 {
                return Err(CliError::Usage("add takes two arguments".into()));
            }
            ("add", vec![parse_peano(&a.args[0])?, parse_peano(&a.args[1])?])
        }
        Func::Inorder => ("inorder", vec![parse_tree(&a.args[0])?]),
        Func::Preorder => ("preorder", vec![parse_tree(&a.args[0])?]),
    };
    if a.func != Func::Add && a.args.len() != 1 {
        return Err(CliError::Usage(format!("{name} takes one argument")));
    }
    let style = match a.style {
        Some(StyleArg::Paren) => Some(TraceStyle::Paren),
        Some(StyleArg::Arrow) => Some(TraceStyle::Arrow),
        None => style_for(name),
    };
    let show = |e: &Expr| -> Result<String, CliError> {
        if let (Func::S, Some(t)) = (a.func, e.to_term()) {
            let seq = reorder(&linearize(&t), o).map_err(|e| CliError::Malformed(e.to_string()))?;
            return Ok(seq.text());
        }
        match style {
            Some(s) => {
                let mut toks = render_state(e, s).map_err(|e| CliError::Usage(e.to_string()))?;
                if a.func == Func::S && o == Order::Natural {
                    toks = natural_paren(toks);
                }
                Ok(join(&toks))
            }
            None => Ok(e.to_string()),
        }
    };
    let p = builtin_programs();
    let e = Expr::apply(name, &args);
    let fuel = a.fuel.unwrap_or(2 * e.size());
    if let Some(k) = a.k {
        let r = p.reduce_k(&e, k).map_err(reduce_err)?;
        outln!(out, "{}", show(&r.expr)?);
        return Ok(());
    }
    if a.single {
        let mut cur = e;
        let mut lines = vec![show(&cur)?];
        while let Some(step) = p.step_single(&cur).map_err(reduce_err)? {
            if lines.len() > fuel {
                return Err(CliError::Fuel(format!("no normal form within {fuel} steps")));
            }
            cur = step.after;
            lines.push(show(&cur)?);
        }
        if a.trace {
            outln!(
                out,
                "{}",
                lines.join(if style == Some(TraceStyle::Arrow) {
                    " -> "
                } else {
                    " = "
                })
            );
        } else {
            outln!(out, "{}", lines.last().expect("at least the input"));
        }
        return Ok(());
    }
    let tr = p.reduce(&e, fuel).map_err(reduce_err)?;
    if a.trace {
        let text = match style {
            Some(s) if a.func != Func::S => render_trace(&tr, s).map_err(|e| CliError::Usage(e.to_string()))?,
            _ => tr
                .states()
                .into_iter()
                .map(show)
                .collect::<Result<Vec<_>, _>>()?
                .join(" = "),
        };
        outln!(out, "{text}");
    } else {
        outln!(out, "{}", show(&tr.result)?);
    }
    Ok(())
}

// ---- shortcut ----------------------------------------------------------------

fn shortcut_err(e: ShortcutError) -> CliError {
    match e {
        ShortcutError::Machine(AsmError::BudgetExhausted(_)) => CliError::Fuel(e.to_string()),
        other => CliError::Malformed(other.to_string()),
    }
}

fn shortcut(out: &mut String, a: ShortcutArgs) -> Result<(), CliError> {
    let o = match a.order {
        ShortcutOrder::Natural => Order::Natural,
        ShortcutOrder::Reverse => Order::ConstructorReverse,
    };
    let mode = match a.mode {
        ModeArg::Faithful => Mode::Faithful,
        ModeArg::Corrected => Mode::Corrected,
    };
    let kind = ShortcutKind::new(o, mode).map_err(shortcut_err)?;
    if a.diff {
        let values = a.range.map(|s| s.0).unwrap_or(1..=1024);
        let report = diff_against_oracle(kind, values);
        match a.format {
            DiffFormat::Text => outs!(out, "{}", report.summary_table()),
            DiffFormat::Jsonl => outs!(out, "{}", report.to_jsonl()),
        }
        return Ok(());
    }
    let inputs: Vec<Vec<Token>> = if let Some(text) = &a.input {
        vec![lex(text)]
    } else if let Some(path) = &a.input_file {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        text.lines().filter(|l| !l.trim().is_empty()).map(lex).collect()
    } else if let Some(span) = &a.range {
        span.0
            .clone()
            .filter(|&n| n >= 1)
            .map(|n| strec::binary::bin_tokens(n, o).expect("positive"))
            .collect()
    } else {
        return Err(CliError::Usage("give --input, --input-file, --range or --diff".into()));
    };
    let single = inputs.len() == 1 && a.input.is_some();
    for input in inputs {
        let (result, run) = emulate_logged(kind, &input).map_err(shortcut_err)?;
        if single {
            outln!(out, "{}", join(&result));
        } else {
            outln!(out, "{} -> {}", join(&input), join(&result));
        }
        if a.log {
            outs!(out, "{}", run.log_text());
        }
    }
    Ok(())
}

// ---- asm -----------------------------------------------------------------------

fn asm_err(e: AsmError) -> CliError {
    match e {
        AsmError::BudgetExhausted(_) => CliError::Fuel(e.to_string()),
        other => CliError::Malformed(other.to_string()),
    }
}

fn asm(out: &mut String, a: AsmArgs) -> Result<(), CliError> {
    match a.machine {
        MachineArg::Successor => {
            let m = successor_asm();
            let run = asm_run(&m, &lex(&a.input), a.budget).map_err(asm_err)?;
            let result = (m.output)(&run.state);
            match a.format {
                LogFormat::Text => {
                    if a.log {
                        outs!(out, "{}", run.log_text());
                    }
                    outln!(out, "{}", join(&result));
                }
                LogFormat::Json => {
                    let v = serde_json::json!({
                        "output": result,
                        "steps": run.steps,
                        "log": if a.log { serde_json::to_value(&run.log).expect("log serializes") } else { serde_json::Value::Null },
                    });
                    outln!(out, "{v}");
                }
            }
        }
        MachineArg::SuccessorRasm | MachineArg::Inorder | MachineArg::Preorder => {
            let (spec, input) = match a.machine {
                MachineArg::SuccessorRasm => (successor_rasm(), lex(&a.input)),
                m => {
                    let func = if m == MachineArg::Inorder {
                        "inorder"
                    } else {
                        "preorder"
                    };
                    (
                        traversal_rasm(func).map_err(asm_err)?,
                        agent_input(&parse_tree(&a.input)?),
                    )
                }
            };
            let run = rasm_run(&spec, &input, a.budget).map_err(asm_err)?;
            match a.format {
                LogFormat::Text => {
                    outln!(out, "{}", join(&run.output));
                    if a.log {
                        outln!(
                            out,
                            "children {} max_depth {} steps {}",
                            run.children,
                            run.max_depth,
                            run.steps
                        );
                    }
                }
                LogFormat::Json => {
                    let v = serde_json::json!({
                        "output": run.output,
                        "children": run.children,
                        "max_depth": run.max_depth,
                        "steps": run.steps,
                    });
                    outln!(out, "{v}");
                }
            }
        }
    }
    Ok(())
}

// ---- eval ----------------------------------------------------------------------

fn eval_err(e: EvalError) -> CliError {
    match e {
        EvalError::MissingPrediction(_)
        | EvalError::DuplicatePrediction(_)
        | EvalError::DuplicateGold(_)
        | EvalError::UnknownId(_) => CliError::IdMismatch(e.to_string()),
        EvalError::NoCandidates(_) => CliError::Malformed(e.to_string()),
        EvalError::ZeroK | EvalError::UnknownKey(_) | EvalError::UnknownTask(_) => CliError::Usage(e.to_string()),
    }
}

fn read<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<Vec<T>, CliError> {
    read_jsonl(path).map_err(jsonl_err)
}

fn eval(out: &mut String, a: EvalArgs) -> Result<(), CliError> {
    let keys: Vec<BreakdownKey> = a
        .breakdown
        .iter()
        .map(|k| k.parse().map_err(eval_err))
        .collect::<Result<_, _>>()?;
    let gold: Vec<ExampleRecord> = read(&a.gold)?;
    let preds: Option<Vec<PredictionRecord>> = a.pred.as_deref().map(read).transpose()?;
    let format = match a.format {
        ReportFormatArg::Text => ReportFormat::Text,
        ReportFormatArg::Json => ReportFormat::Json,
    };
    if a.validate_traces {
        return validate(out, &gold, preds.as_deref(), format);
    }
    let preds = preds.ok_or_else(|| CliError::Usage("--pred is required unless --validate-traces".into()))?;
    let mut report = MetricsReport::build(&preds, &gold, &a.k).map_err(eval_err)?;
    if !keys.is_empty() {
        report
            .breakdowns
            .retain(|name, _| keys.iter().any(|k| k.name() == name));
    }
    outs!(out, "{}", render_report(&report, format));
    Ok(())
}

#[derive(Serialize)]
struct TraceRow<'a> {
    id: &'a str,
    #[serde(flatten)]
    judgment: TraceJudgment,
}

fn validate(
    out: &mut String,
    gold: &[ExampleRecord],
    preds: Option<&[PredictionRecord]>,
    format: ReportFormat,
) -> Result<(), CliError> {
    let mut rows = Vec::new();
    match preds {
        None => {
            for g in gold {
                rows.push((g.id.as_str(), judge(&g.target, g)?));
            }
        }
        Some(preds) => {
            let by_id: std::collections::HashMap<&str, &ExampleRecord> =
                gold.iter().map(|g| (g.id.as_str(), g)).collect();
            if by_id.len() != gold.len() {
                return Err(CliError::IdMismatch("duplicate gold ids".into()));
            }
            let mut seen = std::collections::HashSet::new();
            for p in preds {
                let g = by_id
                    .get(p.id.as_str())
                    .ok_or_else(|| eval_err(EvalError::UnknownId(p.id.clone())))?;
                if !seen.insert(p.id.as_str()) {
                    return Err(eval_err(EvalError::DuplicatePrediction(p.id.clone())));
                }
                let first = p
                    .candidates
                    .first()
                    .ok_or_else(|| eval_err(EvalError::NoCandidates(p.id.clone())))?;
                rows.push((p.id.as_str(), judge(&first.0, g)?));
            }
            if let Some(g) = gold.iter().find(|g| !seen.contains(g.id.as_str())) {
                return Err(eval_err(EvalError::MissingPrediction(g.id.clone())));
            }
        }
    }
    let valid = rows.iter().filter(|(_, j)| j.is_valid()).count();
    let mut labels = std::collections::BTreeMap::new();
    for (_, j) in &rows {
        if let Some(l) = j.label {
            *labels.entry(l.label()).or_insert(0usize) += 1;
        }
    }
    let n = rows.len();
    let fraction = if n == 0 { 0.0 } else { valid as f64 / n as f64 };
    match format {
        ReportFormat::Text => {
            let mut s = format!("N={n}\nvalid {valid} ({fraction:.4})\n");
            for (l, c) in &labels {
                let _ = writeln!(s, "  {l:<22} {c}");
            }
            outs!(out, "{s}");
        }
        ReportFormat::Json => {
            let traces: Vec<TraceRow> = rows
                .into_iter()
                .map(|(id, judgment)| TraceRow { id, judgment })
                .collect();
            let v =
                serde_json::json!({ "n": n, "valid": valid, "fraction": fraction, "labels": labels, "traces": traces });
            outln!(out, "{}", serde_json::to_string_pretty(&v).expect("report serializes"));
        }
    }
    Ok(())
}

fn judge(trace: &[Token], g: &ExampleRecord) -> Result<TraceJudgment, CliError> {
    let input = strec::dataset::strip_padding(g).input;
    validate_trace(&join(trace), &g.task, Some(&input)).map_err(eval_err)
}
