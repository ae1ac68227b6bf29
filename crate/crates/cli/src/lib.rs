//! Command-line front end: argument parsing, dispatch and JSON reports.
//!
//! Every command except `convert` prints one report on stdout:
//!
//! ```json
//! {"schema":"hornlab-report-1","version":"0.1.0","command":{...},"exit_code":0,"result":{...}}
//! ```
//!
//! Exit codes: 0 positive decision or success, 1 negative decision,
//! 2 usage or input error, 3 budget exhausted.

mod commands;

use std::io::BufRead;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hornlab::hom::Limits;
use hornlab::{Error, FormatError};
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA: &str = "hornlab-report-1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hornlab",
    version,
    args_conflicts_with_subcommands = true,
    about = "Finite hypergraph structures: homomorphisms, membership, dichotomy, EF games"
)]
pub struct Cli {
    /// Cap on worker threads for parallel sections.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Re-run the command recorded in a report and print the new report.
    #[arg(long, value_name = "REPORT")]
    pub replay: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

/// Search limits shared by the solving commands.
#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct BudgetArgs {
    /// Search-node cap for each homomorphism search.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_nodes: u64,
    /// Wall-clock cap in seconds for each search; 0 disables it.
    #[arg(long, default_value_t = 60.0)]
    pub time_limit: f64,
}

impl BudgetArgs {
    pub fn limits(&self) -> Limits {
        Limits {
            max_nodes: self.max_nodes,
            time_limit: (self.time_limit > 0.0).then(|| Duration::from_secs_f64(self.time_limit)),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Girth, forest test, chromatic number and flags of a structure.
    Analyze {
        /// khs-1 document to analyse.
        file: PathBuf,
        /// Arity used when the input is a hypergraph.
        #[arg(long)]
        k: Option<usize>,
        /// Largest colour count tried for the chromatic number.
        #[arg(long, default_value_t = hornlab::analysis::DEFAULT_COLOUR_CAP)]
        colour_cap: usize,
    },
    /// Decide (or enumerate) homomorphisms from source to target.
    Hom {
        /// khs-1 document mapped from.
        source: PathBuf,
        /// khs-1 document mapped to.
        target: PathBuf,
        /// Arity used when an input is a hypergraph.
        #[arg(long)]
        k: Option<usize>,
        /// List up to N homomorphisms instead of stopping at the first.
        #[arg(long, value_name = "N")]
        enumerate: Option<usize>,
        /// Run on a single worker thread.
        #[arg(long)]
        deterministic: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Chromatic number, or a colouring with a given number of colours.
    Colour {
        /// khs-1 hypergraph to colour.
        file: PathBuf,
        /// Decide colourability with exactly this many colours.
        #[arg(long)]
        colours: Option<usize>,
        /// Largest colour count tried for the chromatic number.
        #[arg(long, default_value_t = hornlab::analysis::DEFAULT_COLOUR_CAP)]
        cap: usize,
    },
    /// Membership in the class generated by the templates.
    Member {
        /// khs-1 document tested for membership.
        structure: PathBuf,
        /// Generating template; repeat for several.
        #[arg(long = "template", required = true)]
        templates: Vec<PathBuf>,
        /// Arity used when an input is a hypergraph.
        #[arg(long)]
        k: Option<usize>,
        /// Write the full certificate to this file.
        #[arg(long, value_name = "FILE")]
        certificate: Option<PathBuf>,
        /// Enumerated homomorphisms kept per template before per-query search.
        #[arg(long, default_value_t = hornlab::membership::DEFAULT_HOM_CAP)]
        hom_cap: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Tractable / NP-complete verdict with validated evidence.
    Classify {
        /// khs-1 template to classify.
        file: PathBuf,
        /// Arity used when an input is a hypergraph.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Search for a cyclic polymorphism of a given arity.
    Polymorphism {
        /// khs-1 template searched.
        file: PathBuf,
        /// Arity of the cyclic operation.
        #[arg(long, value_name = "P")]
        arity: usize,
        /// Only operations fixing every constant tuple.
        #[arg(long)]
        idempotent: bool,
        /// Arity used when an input is a hypergraph.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Build fixtures and seeded witness structures.
    Generate(GenerateArgs),
    /// Play the EF game on the ball construction over a base structure.
    Efgame(EfgameArgs),
    /// Rewrite a khs-1 document as the other kind.
    Convert {
        /// khs-1 document to rewrite.
        file: PathBuf,
        /// Kind of document to produce.
        #[arg(long, value_enum)]
        to: ConvertTarget,
        /// Arity used when an input is a hypergraph.
        #[arg(long)]
        k: Option<usize>,
        /// Write the document here instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConvertTarget {
    Hypergraph,
    Kstructure,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub kind: GenerateKind,
    /// Seed for the randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Candidate cap for randomized searches.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub budget: u64,
    /// Smallest vertex count tried by the searches.
    #[arg(long, global = true, default_value_t = 5)]
    pub min_vertices: usize,
    /// Largest vertex count tried by the searches.
    #[arg(long, global = true, default_value_t = 15)]
    pub max_vertices: usize,
    /// Try the known fixtures before searching.
    #[arg(long, global = true)]
    pub fixture: bool,
    /// Also write the generated structure to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// Every k-subset of n vertices.
    Complete {
        /// Vertex count.
        #[arg(long)]
        n: usize,
        /// Edge size.
        #[arg(long)]
        k: usize,
    },
    /// One edge on `size` vertices.
    Edge {
        /// Vertices in the edge.
        #[arg(long)]
        size: usize,
    },
    /// Random k-uniform hyperforest.
    Forest {
        /// Edge size.
        #[arg(long)]
        k: usize,
        /// Number of edges.
        #[arg(long)]
        edges: usize,
    },
    /// k-uniform, girth above `girth`, not `colours`-colourable.
    Sparse {
        /// Edge size.
        #[arg(long)]
        k: usize,
        /// Every cycle is longer than this.
        #[arg(long)]
        girth: usize,
        /// Colour count that must fail.
        #[arg(long)]
        colours: usize,
    },
    /// Girth above `girth`, maps into h2 but not into h1.
    Incomparability {
        /// Template the result must not map into.
        #[arg(long)]
        h1: PathBuf,
        /// Template the result must map into.
        #[arg(long)]
        h2: PathBuf,
        /// Every cycle is longer than this.
        #[arg(long)]
        girth: usize,
    },
    /// A structure strictly between g1 and g2.
    Density {
        /// Lower structure; maps into g2 but not back.
        #[arg(long)]
        g1: PathBuf,
        /// Upper structure.
        #[arg(long)]
        g2: PathBuf,
    },
    /// Witness that no level-n axiomatisation exists for the template's class.
    Nfa {
        /// khs-1 template of the class.
        #[arg(long)]
        template: PathBuf,
        /// Level whose axiomatisation is refuted.
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpoilerMode {
    Exhaustive,
    Random,
    Stdin,
    Scripted,
}

#[derive(Debug, Args)]
pub struct EfgameArgs {
    /// khs-1 base structure whose balls are copied.
    #[arg(long)]
    pub base: PathBuf,
    /// Number of rounds played.
    #[arg(long)]
    pub rounds: usize,
    /// Ball radius.
    #[arg(long)]
    pub radius: usize,
    /// How Spoiler chooses moves.
    #[arg(long, value_enum, default_value_t = SpoilerMode::Exhaustive)]
    pub spoiler: SpoilerMode,
    /// Plays for `--spoiler random`.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Seed for `--spoiler random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Moves for `--spoiler scripted`, separated by commas, e.g. "G 3,H 7".
    #[arg(long)]
    pub moves: Option<String>,
    /// Allow radii at or below 2^(rounds+1).
    #[arg(long)]
    pub non_strict: bool,
    /// Arity used when the base is a hypergraph.
    #[arg(long)]
    pub k: Option<usize>,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct CommandSpec {
    pub subcommand: String,
    pub args: Vec<String>,
    pub inputs: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub budget: Option<Value>,
    /// Lines read from stdin, replayed by `--replay`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stdin: Option<Vec<String>>,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, message: String },
    Format { path: PathBuf, error: FormatError },
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_budget() || matches!(e, Error::CapExceeded(_)) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CliError::Usage(m) => json!({"kind": "usage", "message": m}),
            CliError::Io { path, message } => json!({"kind": "io", "path": path, "message": message}),
            CliError::Format { path, error } => json!({
                "kind": "format",
                "path": path,
                "line": error.line,
                "column": error.column,
                "field": error.field,
                "message": error.message,
            }),
            CliError::Lib(e) => json!({
                "kind": if e.is_budget() || matches!(e, Error::CapExceeded(_)) { "budget" } else { "input" },
                "message": e.to_string(),
            }),
        }
    }

    fn diagnostic(&self) -> String {
        match self {
            CliError::Usage(m) => format!("error: {m}"),
            CliError::Io { path, message } => format!("error: {}: {message}", path.display()),
            CliError::Format { path, error } => format!("error: {}: {error}", path.display()),
            CliError::Lib(e) if e.is_budget() => format!("budget exhausted: {e}"),
            CliError::Lib(e) => format!("error: {e}"),
        }
    }
}

/// A handler's successful outcome.
pub struct Success {
    pub code: i32,
    pub result: Value,
    pub summary: String,
}

/// Runs the command line `args` (without the program name), reading
/// interactive input from `input`.
pub fn run(args: &[String], input: &mut dyn BufRead) -> Output {
    let argv = std::iter::once("hornlab".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_YES };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    if let Some(path) = &cli.replay {
        return replay(path);
    }
    let Some(command) = cli.command else {
        return Output {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: "error: a subcommand or --replay is required\n".into(),
        };
    };
    let jobs = match &command {
        Command::Hom {
            deterministic: true, ..
        } => Some(1),
        _ => cli.jobs,
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            return Output {
                code: EXIT_USAGE,
                stdout: String::new(),
                stderr: format!("error: cannot start worker pool: {e}\n"),
            }
        }
    };
    if matches!(&command, Command::Efgame(e) if e.spoiler == SpoilerMode::Stdin) {
        // interactive play is sequential and keeps the caller's input
        return dispatch(args, command, input);
    }
    pool.install(|| dispatch(args, command, &mut std::io::empty()))
}

fn replay(path: &PathBuf) -> Output {
    let failure = |message: String| Output {
        code: EXIT_USAGE,
        stdout: String::new(),
        stderr: format!("error: {}: {message}\n", path.display()),
    };
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return failure(e.to_string()),
    };
    let (args, stdin) = match parse_replay(&text) {
        Ok(parsed) => parsed,
        Err(message) => return failure(message),
    };
    let mut input = std::io::Cursor::new(stdin.join("\n").into_bytes());
    run(&args, &mut input)
}

/// Extracts the recorded arguments and stdin lines from a report.
pub fn parse_replay(text: &str) -> Result<(Vec<String>, Vec<String>), String> {
    let report: Value = serde_json::from_str(text).map_err(|e| format!("not a JSON report: {e}"))?;
    if report.get("schema").and_then(Value::as_str) != Some(SCHEMA) {
        return Err(format!("report schema is not {SCHEMA}"));
    }
    let strings = |v: Option<&Value>| -> Option<Vec<String>> {
        v?.as_array()?
            .iter()
            .map(|a| a.as_str().map(str::to_string))
            .collect()
    };
    let args = strings(report.pointer("/command/args")).ok_or("report has no command arguments")?;
    // a recorded replay would recurse without bound
    if args.iter().any(|a| a == "--replay" || a.starts_with("--replay=")) {
        return Err("recorded arguments contain --replay".into());
    }
    let stdin = strings(report.pointer("/command/stdin")).unwrap_or_default();
    Ok((args, stdin))
}

fn dispatch(args: &[String], command: Command, input: &mut dyn BufRead) -> Output {
    let mut spec = commands::spec_for(args, &command);
    match commands::execute(command, input, &mut spec) {
        Ok(Success {
            code,
            result,
            summary,
        }) => {
            if spec.subcommand == "convert" {
                // convert emits the document itself, not a report
                let doc = result["document"].as_str().unwrap_or_default().to_string() + "\n";
                return Output {
                    code,
                    stdout: doc,
                    stderr: summary,
                };
            }
            Output {
                code,
                stdout: report(&spec, code, "result", result),
                stderr: summary,
            }
        }
        Err(e) => {
            let code = e.code();
            Output {
                code,
                stdout: report(&spec, code, "error", e.to_json()),
                stderr: e.diagnostic() + "\n",
            }
        }
    }
}

fn report(spec: &CommandSpec, code: i32, key: &str, body: Value) -> String {
    let mut map = serde_json::Map::new();
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("version".into(), json!(VERSION));
    map.insert(
        "command".into(),
        serde_json::to_value(spec).expect("spec serialises"),
    );
    map.insert("exit_code".into(), json!(code));
    map.insert(key.into(), body);
    let mut text = serde_json::to_string_pretty(&Value::Object(map)).expect("report serialises");
    text.push('\n');
    text
}
