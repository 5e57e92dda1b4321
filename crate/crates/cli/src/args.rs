use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use strec::dataset::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "strec", version, about = "Structural recursion workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dataset as JSONL splits plus a manifest sidecar.
    Gen(GenArgs),
    /// Reduce a builtin program call to normal form.
    Reduce(ReduceArgs),
    /// Run a shortcut emulator on inputs, or diff it against reduction.
    Shortcut(ShortcutArgs),
    /// Run an abstract state machine and print its step log.
    Asm(AsmArgs),
    /// Score predictions, or validate reduction traces.
    Eval(EvalArgs),
}

/// `a:b`, inclusive on both ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span<T>(pub RangeInclusive<T>);

impl<T: FromStr + PartialOrd + Copy> FromStr for Span<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `a:b`, got `{s}`"))?;
        let a = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
        let b = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
        if a > b {
            return Err(format!("empty range `{s}`"));
        }
        Ok(Span(a..=b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenTask {
    Successor,
    #[value(alias = "successor_step")]
    SuccessorStep,
    #[value(alias = "successor_trace")]
    SuccessorTrace,
    Preorder,
    Inorder,
    #[value(alias = "preorder_trace")]
    PreorderTrace,
    #[value(alias = "inorder_trace")]
    InorderTrace,
    /// A traversal task; `--func` picks the traversal.
    Trees,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TraversalFunc {
    Inorder,
    Preorder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Reverse,
    Natural,
    Tree,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub task: GenTask,
    /// Traversal used by `trees`.
    #[arg(long, value_enum, default_value = "inorder")]
    pub func: TraversalFunc,
    /// Also emit step-by-step traces for `trees`.
    #[arg(long)]
    pub trace: bool,
    /// Token order; defaults to `reverse` for successor tasks and `tree` for traversals.
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    /// Training values `a:b` (successor tasks).
    #[arg(long)]
    pub range: Option<Span<u64>>,
    /// Bit lengths `a:b` of the random test split (successor).
    #[arg(long)]
    pub random_bits: Option<Span<u32>>,
    /// Records in the random test split.
    #[arg(long, default_value_t = 1000)]
    pub random_count: usize,
    /// Bit lengths `a:b` of the edge-case test split (successor).
    #[arg(long)]
    pub edge_cases: Option<Span<u32>>,
    /// Tree depths `a:b` (traversals).
    #[arg(long, default_value = "5:6")]
    pub depths: Span<usize>,
    /// Node labels for generated trees.
    #[arg(long, default_value = strec::dataset::DEFAULT_ALPHABET)]
    pub alphabet: String,
    /// Training trees.
    #[arg(long, default_value_t = 20_000)]
    pub train: usize,
    /// Held-out trees.
    #[arg(long, default_value_t = 1_000)]
    pub test: usize,
    /// Reduction levels for traversal targets; full evaluation when absent.
    #[arg(long)]
    pub k: Option<usize>,
    /// Token renaming `from=to,...` applied to every record.
    #[arg(long)]
    pub remap: Option<String>,
    /// Maximum number of leading pad tokens.
    #[arg(long, default_value_t = 0)]
    pub pad_max: usize,
    #[arg(long, default_value = strec::dataset::PAD)]
    pub pad_token: String,
    /// Copies (or weight) of edge group 1 training records.
    #[arg(long, default_value_t = 1)]
    pub k1: usize,
    /// Copies (or weight) of edge group 2 training records.
    #[arg(long, default_value_t = 1)]
    pub k2: usize,
    /// Record `k1`/`k2` as weights instead of repeating records.
    #[arg(long)]
    pub upweight: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Directory for the JSONL files and manifest.
    #[arg(long, env = "STREC_OUT_DIR", default_value = "data")]
    pub out_dir: PathBuf,
    /// File name prefix; defaults to the task name.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Func {
    #[value(alias = "successor")]
    S,
    Add,
    Inorder,
    Preorder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StyleArg {
    Paren,
    Arrow,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    pub func: Func,
    /// Arguments: binary tokens for `s`, Peano terms or numbers for `add`,
    /// a serialized tree for traversals.
    #[arg(required = true, num_args = 1..=2)]
    pub args: Vec<String>,
    /// Print every state, not just the normal form.
    #[arg(long)]
    pub trace: bool,
    /// Apply only `k` reduction levels.
    #[arg(long, conflicts_with = "trace")]
    pub k: Option<usize>,
    /// Rewrite one redex per step instead of a whole level.
    #[arg(long)]
    pub single: bool,
    /// Trace rendering; defaults to `paren` for `s` and `arrow` for traversals.
    #[arg(long, value_enum)]
    pub style: Option<StyleArg>,
    /// Token order of binary input and output.
    #[arg(long, value_enum, default_value = "reverse")]
    pub order: OrderArg,
    /// Maximum reduction levels; defaults to twice the input size.
    #[arg(long)]
    pub fuel: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShortcutOrder {
    Natural,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Faithful,
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiffFormat {
    Text,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct ShortcutArgs {
    pub order: ShortcutOrder,
    #[arg(long, value_enum, default_value = "faithful")]
    pub mode: ModeArg,
    /// One input token sequence, in the emulator's order.
    #[arg(long, conflicts_with_all = ["range", "input_file"])]
    pub input: Option<String>,
    /// Values `a:b` to run (or diff).
    #[arg(long)]
    pub range: Option<Span<u64>>,
    /// File with one token sequence per line.
    #[arg(long, conflicts_with = "range")]
    pub input_file: Option<PathBuf>,
    /// Compare against reduction and report disagreements; range defaults to 1:1024.
    #[arg(long, conflicts_with_all = ["input", "input_file"])]
    pub diff: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: DiffFormat,
    /// Print the step log of each run.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MachineArg {
    /// Single-agent successor machine.
    Successor,
    /// Recursive successor machine with child agents.
    #[value(alias = "successor_rasm")]
    SuccessorRasm,
    Inorder,
    Preorder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LogFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct AsmArgs {
    pub machine: MachineArg,
    /// Binary tokens (constructor order) or a serialized tree.
    #[arg(long)]
    pub input: String,
    /// Step budget per agent.
    #[arg(long, default_value_t = strec::asm::DEFAULT_BUDGET)]
    pub budget: usize,
    /// Print the step log (single-agent machines).
    #[arg(long)]
    pub log: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: LogFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormatArg {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Gold records (JSONL).
    #[arg(long)]
    pub gold: PathBuf,
    /// Predictions (JSONL of `{id, candidates}`).
    #[arg(long)]
    pub pred: Option<PathBuf>,
    /// Comma-separated k values for Hit@k.
    #[arg(long, value_delimiter = ',', default_values_t = strec::eval::DEFAULT_KS)]
    pub k: Vec<usize>,
    /// Breakdown tables: bits, depth, edge_group, tree_depth.
    #[arg(long)]
    pub breakdown: Vec<String>,
    /// Judge traces instead of scoring answers. Without `--pred` the gold
    /// targets themselves are judged.
    #[arg(long)]
    pub validate_traces: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormatArg,
}
