//! The `sdnnf` command.
//!
//! Exit codes: 0 success, 1 other failure, 2 unreadable input, 3 budget
//! exceeded, 10 formula true, 20 formula false.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use sdnnf_core::circuit::check_determinism_bruteforce;
use sdnnf_core::compile::compile_with_budget;
use sdnnf_core::formula::primal_graph;
use sdnnf_core::oracle::cnf_truth_table;
use sdnnf_core::project::{forall_project_dual, project_with_budget};
use sdnnf_core::qbf::{solve_via_obdd, solve_with_strategy};
use sdnnf_core::treedec::{decompose, make_nice, Strategy};
use sdnnf_core::{Budget, Error, StructuredCircuit, Var, OUT_EXISTS, OUT_MAIN, OUT_NOT_EXISTS};

use crate::dimacs::{parse_dimacs, parse_qdimacs};
use crate::serial::{parse_circuit, parse_vtree, write_circuit, write_vtree};
use crate::td_format::write_td;
use crate::FormatError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_TRUE: i32 = 10;
pub const EXIT_FALSE: i32 = 20;

/// Largest variable count for brute-force checks in `verify`.
pub const VERIFY_LIMIT: usize = 16;

#[derive(Debug, Parser)]
#[command(name = "sdnnf", version, about = "Compile CNF to structured d-DNNF, project, count and solve QBF")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Abort when a circuit gets wider than this.
    #[arg(long, default_value_t = Budget::default().max_width)]
    pub max_width: usize,
    /// Abort when a circuit gets more gates than this.
    #[arg(long, default_value_t = Budget::default().max_gates)]
    pub max_gates: usize,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_width: self.max_width,
            max_gates: self.max_gates,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Decomposition {
    MinFill,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exists,
    Forall,
    Negate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Dnnf,
    Obdd,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a DIMACS CNF into `<prefix>.vtree` and `<prefix>.sdnnf`.
    Compile {
        input: PathBuf,
        /// Output prefix; defaults to the input path without extension.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "min-fill")]
        decomposition: Decomposition,
        /// Also write the tree decomposition in PACE format.
        #[arg(long)]
        td: Option<PathBuf>,
        #[arg(long)]
        stats_json: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Quantify variables away or negate.
    Project {
        circuit: PathBuf,
        /// Vtree file; defaults to the circuit path with extension `vtree`.
        #[arg(long)]
        vtree: Option<PathBuf>,
        /// Comma-separated variables to quantify.
        #[arg(long, value_delimiter = ',')]
        vars: Vec<Var>,
        #[arg(long, value_enum, default_value = "exists")]
        mode: Mode,
        /// Output of the input circuit to use.
        #[arg(long)]
        output_name: Option<String>,
        /// Output prefix; defaults to `<circuit-stem>.<mode>`.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        stats_json: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Print the model count of a deterministic circuit.
    Count {
        circuit: PathBuf,
        #[arg(long)]
        vtree: Option<PathBuf>,
        #[arg(long)]
        output_name: Option<String>,
    },
    /// Solve a QDIMACS formula: TRUE/FALSE when closed, otherwise the number
    /// of models over the free variables.
    Qbf {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "dnnf")]
        engine: Engine,
        #[arg(long, value_enum, default_value = "min-fill")]
        decomposition: Decomposition,
        /// Print the width after each stage.
        #[arg(long)]
        stage_stats: bool,
        #[arg(long)]
        stats_json: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Check structuredness, recount width and optionally compare against a
    /// CNF or another circuit by brute force.
    Verify {
        circuit: PathBuf,
        #[arg(long)]
        vtree: Option<PathBuf>,
        #[arg(long)]
        output_name: Option<String>,
        /// CNF the circuit should be equivalent to.
        #[arg(long)]
        cnf: Option<PathBuf>,
        /// Circuit (with its `.vtree` alongside) the output should equal.
        #[arg(long)]
        equiv: Option<PathBuf>,
        #[arg(long)]
        equiv_output: Option<String>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Stats {
    pub width: usize,
    pub gates: usize,
    pub vtree_nodes: usize,
    pub maxbag: usize,
    pub stage_widths: Vec<usize>,
    pub wall_ms: f64,
}

impl Stats {
    pub fn to_text(&self) -> String {
        let stages: Vec<String> = self.stage_widths.iter().map(|w| w.to_string()).collect();
        format!(
            "width {}\ngates {}\nvtree_nodes {}\nmaxbag {}\nstage_widths {}\nwall_ms {:.3}\n",
            self.width,
            self.gates,
            self.vtree_nodes,
            self.maxbag,
            stages.join(" "),
            self.wall_ms
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("stats serialize") + "\n"
    }
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_FAILURE,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_FAILURE, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", path.display())))
}

/// Errors raised while reading input files count as parse errors.
fn parsed<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, Failure> {
    r.map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

pub fn vtree_path_for(circuit: &Path) -> PathBuf {
    circuit.with_extension("vtree")
}

pub fn load_circuit(circuit: &Path, vtree: Option<&Path>) -> Result<StructuredCircuit, Failure> {
    let vpath = vtree.map(Path::to_path_buf).unwrap_or_else(|| vtree_path_for(circuit));
    let vt = parsed(&vpath, parse_vtree(&read(&vpath)?))?;
    parsed(circuit, parse_circuit(&read(circuit)?, &vt))
}

fn save_circuit(c: &StructuredCircuit, prefix: &Path) -> Result<(PathBuf, PathBuf), Failure> {
    let cpath = with_suffix(prefix, "sdnnf");
    let vpath = with_suffix(prefix, "vtree");
    std::fs::write(&vpath, write_vtree(c.vtree()))?;
    std::fs::write(&cpath, write_circuit(c))?;
    Ok((cpath, vpath))
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

/// `main` if present, then `exists`, then the first output.
fn pick_output(c: &StructuredCircuit, name: Option<&str>) -> Result<String, Failure> {
    if let Some(n) = name {
        c.output(n)?;
        return Ok(n.to_string());
    }
    [OUT_MAIN, OUT_EXISTS]
        .into_iter()
        .find(|n| c.outputs().contains_key(*n))
        .map(str::to_string)
        .or_else(|| c.outputs().keys().next().cloned())
        .ok_or_else(|| Failure::new(EXIT_FAILURE, "circuit has no outputs"))
}

fn strategy(d: Decomposition) -> Strategy {
    match d {
        Decomposition::MinFill => Strategy::MinFill,
        Decomposition::Exact => Strategy::Exact,
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1000.0
}

fn print_stats(out: &mut dyn Write, stats: &Stats, json: bool) -> std::io::Result<()> {
    if json {
        out.write_all(stats.to_json().as_bytes())
    } else {
        out.write_all(stats.to_text().as_bytes())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_PARSE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Compile {
            input,
            output,
            decomposition,
            td,
            stats_json,
            budget,
        } => {
            let start = Instant::now();
            let f = parsed(&input, parse_dimacs(&read(&input)?))?;
            let tree = decompose(&primal_graph(&f), strategy(decomposition));
            if let Some(path) = td {
                std::fs::write(path, write_td(&tree, f.num_vars()))?;
            }
            let nice = make_nice(&tree)?;
            let c = compile_with_budget(&f, &nice, &budget.budget())?;
            save_circuit(&c, &output.unwrap_or_else(|| input.with_extension("")))?;
            let stats = Stats {
                width: c.width(),
                gates: c.len(),
                vtree_nodes: c.vtree().len(),
                maxbag: nice.max_bag(),
                stage_widths: vec![c.width()],
                wall_ms: elapsed_ms(start),
            };
            print_stats(out, &stats, stats_json)?;
            Ok(EXIT_OK)
        }
        Command::Project {
            circuit,
            vtree,
            vars,
            mode,
            output_name,
            output,
            stats_json,
            budget,
        } => {
            let start = Instant::now();
            let c = load_circuit(&circuit, vtree.as_deref())?;
            let name = pick_output(&c, output_name.as_deref())?;
            let b = budget.budget();
            let result = match mode {
                Mode::Exists => project_with_budget(&c, &name, &vars, &b)?,
                Mode::Forall => {
                    let dual = if name == OUT_EXISTS && c.outputs().contains_key(OUT_NOT_EXISTS) {
                        c.clone()
                    } else {
                        project_with_budget(&c, &name, &[], &b)?
                    };
                    forall_project_dual(&dual, &vars, &b)?
                }
                Mode::Negate => {
                    if !vars.is_empty() {
                        return Err(Failure::new(EXIT_FAILURE, "--mode negate takes no variables"));
                    }
                    project_with_budget(&c, &name, &[], &b)?.select_outputs(&[(OUT_NOT_EXISTS, OUT_MAIN)])?
                }
            };
            let mode_name = match mode {
                Mode::Exists => "exists",
                Mode::Forall => "forall",
                Mode::Negate => "negate",
            };
            let prefix = output.unwrap_or_else(|| circuit.with_extension(mode_name));
            save_circuit(&result, &prefix)?;
            let stats = Stats {
                width: result.width(),
                gates: result.len(),
                vtree_nodes: result.vtree().len(),
                maxbag: 0,
                stage_widths: vec![c.width(), result.width()],
                wall_ms: elapsed_ms(start),
            };
            print_stats(out, &stats, stats_json)?;
            Ok(EXIT_OK)
        }
        Command::Count {
            circuit,
            vtree,
            output_name,
        } => {
            let c = load_circuit(&circuit, vtree.as_deref())?;
            c.check_structuredness()?;
            let name = pick_output(&c, output_name.as_deref())?;
            writeln!(out, "{}", c.count_models(&name)?)?;
            Ok(EXIT_OK)
        }
        Command::Qbf {
            input,
            engine,
            decomposition,
            stage_stats,
            stats_json,
            budget,
        } => {
            let start = Instant::now();
            let q = parsed(&input, parse_qdimacs(&read(&input)?))?;
            let b = budget.budget();
            let (truth, count, mut stats, labels) = match engine {
                Engine::Dnnf => {
                    let s = solve_with_strategy(&q, strategy(decomposition), &b)?;
                    let stats = Stats {
                        width: s.stats.width,
                        gates: s.stats.gates,
                        vtree_nodes: s.stats.vtree_nodes,
                        maxbag: s.stats.maxbag,
                        stage_widths: s.stats.stage_widths,
                        wall_ms: 0.0,
                    };
                    let labels = ["compile".to_string(), "dual".to_string()];
                    (s.truth, s.model_count, stats, labels.to_vec())
                }
                Engine::Obdd => {
                    let s = solve_via_obdd(&q, None)?;
                    let stats = Stats {
                        width: s.widths.iter().copied().max().unwrap_or(0),
                        gates: s.result.len(),
                        vtree_nodes: 0,
                        maxbag: 0,
                        stage_widths: s.widths,
                        wall_ms: 0.0,
                    };
                    b.check("obdd", stats.width, stats.gates)?;
                    (s.truth, s.model_count, stats, vec!["matrix".to_string()])
                }
            };
            stats.wall_ms = elapsed_ms(start);
            let code = match truth {
                Some(true) => {
                    writeln!(out, "TRUE")?;
                    EXIT_TRUE
                }
                Some(false) => {
                    writeln!(out, "FALSE")?;
                    EXIT_FALSE
                }
                None => {
                    writeln!(out, "{count}")?;
                    EXIT_OK
                }
            };
            if stage_stats {
                let blocks = q.prefix().iter().rev().map(|blk| {
                    let vars: Vec<String> = blk.vars.iter().map(|v| v.to_string()).collect();
                    let q = match blk.quant {
                        sdnnf_core::Quant::Exists => "exists",
                        sdnnf_core::Quant::Forall => "forall",
                    };
                    format!("{q}:{}", vars.join(","))
                });
                for (i, (label, w)) in labels.into_iter().chain(blocks).zip(&stats.stage_widths).enumerate() {
                    writeln!(out, "stage {i} {label} width {w}")?;
                }
            }
            if stats_json {
                print_stats(out, &stats, true)?;
            }
            Ok(code)
        }
        Command::Verify {
            circuit,
            vtree,
            output_name,
            cnf,
            equiv,
            equiv_output,
        } => {
            let c = load_circuit(&circuit, vtree.as_deref())?;
            verify(&c, output_name.as_deref(), cnf.as_deref(), equiv.as_deref(), equiv_output.as_deref(), out)
        }
    }
}

fn verify(
    c: &StructuredCircuit,
    output_name: Option<&str>,
    cnf: Option<&Path>,
    equiv: Option<&Path>,
    equiv_output: Option<&str>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let mut ok = true;
    match c.check_structuredness() {
        Ok(()) => writeln!(out, "structured ok")?,
        Err(e) => {
            writeln!(out, "structured FAIL {e}")?;
            ok = false;
        }
    }
    writeln!(out, "width {}", c.width())?;
    writeln!(out, "gates {}", c.len())?;
    let n = c.vtree().vars().into_iter().max().unwrap_or(0);
    if !ok {
        return Ok(EXIT_FAILURE);
    }
    let small = c.vtree().num_vars() <= VERIFY_LIMIT && n as usize <= VERIFY_LIMIT;
    if c.is_deterministic() {
        if small {
            if check_determinism_bruteforce(c)? {
                writeln!(out, "deterministic ok")?;
            } else {
                writeln!(out, "deterministic FAIL")?;
                ok = false;
            }
        } else {
            writeln!(out, "deterministic skipped")?;
        }
    }
    let name = pick_output(c, output_name)?;
    if let Some(path) = cnf {
        let f = parsed(path, parse_dimacs(&read(path)?))?;
        if n > f.num_vars() {
            writeln!(out, "cnf FAIL circuit mentions variable {n} beyond the CNF")?;
            ok = false;
        } else if f.num_vars() as usize > VERIFY_LIMIT {
            writeln!(out, "cnf skipped")?;
        } else if c.truth_table(&name, f.num_vars())? == cnf_truth_table(&f)? {
            writeln!(out, "cnf ok")?;
        } else {
            writeln!(out, "cnf FAIL")?;
            ok = false;
        }
    }
    if let Some(path) = equiv {
        let other = load_circuit(path, None)?;
        let other_name = pick_output(&other, equiv_output)?;
        let m = n.max(other.vtree().vars().into_iter().max().unwrap_or(0));
        if m as usize > VERIFY_LIMIT {
            writeln!(out, "equiv skipped")?;
        } else if c.truth_table(&name, m)? == other.truth_table(&other_name, m)? {
            writeln!(out, "equiv ok")?;
        } else {
            writeln!(out, "equiv FAIL")?;
            ok = false;
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}
