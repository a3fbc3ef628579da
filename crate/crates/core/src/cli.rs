//! The `copeland` command line.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::alpha::Alpha;
use crate::control::{ControlInstance, ControlKind, Decision, Direction, Problem, Witness};
use crate::election::Election;
use crate::error::Error;
use crate::exact::{solve_control_exact, SizeLimits};
use crate::fast::{
    destructive_microbribery_dp, destructive_partition_candidate, fpt_candidate_control, fpt_voter_control,
    greedy_destructive_candidate, BoundParameter,
};
use crate::format::{parse_candidate_list, parse_election, parse_graph, parse_pool, serialize_election, witness_text, ParseError};
use crate::goal::GoalSpec;
use crate::reductions::{reduce_vc_to_ccacu, reduce_vc_to_ccdc, reduce_vc_to_ccrpc, verify_reduction, Graph};
use crate::score::{copeland_scores, ScoreVector, WinnerModel};
use crate::selftest::{self, Hooks};
use crate::two_stage::TieRule;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser)]
#[command(name = "copeland", version, about = "Copeland^alpha scoring, control solvers and reduction generators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Nonunique,
    Unique,
}

impl From<Model> for WinnerModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Nonunique => WinnerModel::NonUnique,
            Model::Unique => WinnerModel::Unique,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Greedy,
    Dp,
    Fpt,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::Greedy => "greedy",
            Method::Dp => "dp",
            Method::Fpt => "fpt",
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    #[value(name = "CCACu", alias = "CCAC_u")]
    Ccacu,
    #[value(name = "CCDC")]
    Ccdc,
    #[value(name = "CCRPC-TP")]
    CcrpcTp,
    #[value(name = "CCRPC-TE")]
    CcrpcTe,
}

#[derive(Subcommand)]
enum Command {
    /// Print each candidate's scaled score as `name<TAB>scaled/t`.
    Score {
        #[arg(long)]
        alpha: Alpha,
        #[arg(long)]
        election: PathBuf,
    },
    /// Print the winners in declaration order.
    Winners {
        #[arg(long)]
        alpha: Alpha,
        #[arg(long)]
        election: PathBuf,
        #[arg(long, value_enum, default_value = "nonunique")]
        model: Model,
    },
    /// Decide a control or bribery problem.
    Solve {
        #[arg(long)]
        problem: Problem,
        #[arg(long, value_enum, default_value = "exact")]
        method: Method,
        #[arg(long)]
        alpha: Alpha,
        #[arg(long)]
        election: PathBuf,
        #[arg(long)]
        spoiler_candidates: Option<PathBuf>,
        #[arg(long)]
        voter_pool: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        p: Option<String>,
        #[arg(long, value_enum, default_value = "nonunique")]
        model: Model,
        #[arg(long)]
        goal: Option<GoalSpec>,
        /// Parameter for `--method fpt`, e.g. `BC_4` or `BV_6`; defaults to
        /// the candidate count.
        #[arg(long)]
        bound: Option<BoundParameter>,
        /// Also print the scores of the registered election.
        #[arg(long)]
        scores: bool,
        /// Print the method and elapsed time on stderr.
        #[arg(long)]
        timing: bool,
    },
    /// Generate a control instance from a vertex-cover instance.
    Reduce {
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        alpha: Alpha,
        #[arg(long, value_enum, default_value = "nonunique")]
        model: Model,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate an instance, solve it exactly and compare with vertex cover.
    VerifyReduction {
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        alpha: Alpha,
        #[arg(long, value_enum, default_value = "nonunique")]
        model: Model,
    },
    /// Run the built-in verification suites.
    Selftest {
        /// Extra `*.cop` and `*.graph` files to round-trip.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

/// The result of `solve`.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub answer: bool,
    pub witness: Option<Witness>,
    pub scores: Option<ScoreVector>,
    pub method: Method,
    pub elapsed_ms: u128,
}

impl SolveReport {
    /// `YES` or `NO`, the witness block and the optional score table.
    pub fn render(&self, election: &Election) -> String {
        let mut out = String::from(if self.answer { "YES\n" } else { "NO\n" });
        if let Some(w) = &self.witness {
            out.push_str(&witness_text(w, election.candidates()));
        }
        if let Some(s) = &self.scores {
            out.push_str(&score_table(s));
        }
        out
    }
}

enum Failure {
    Usage(String),
    Budget(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) => Failure::Budget(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn parsed<T>(path: &Path, r: Result<T, ParseError>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_election(path: &Path) -> Result<Election, Failure> {
    parsed(path, parse_election(&read(path)?))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    parsed(path, parse_graph(&read(path)?))
}

fn score_table(s: &ScoreVector) -> String {
    let t = s.alpha().den();
    s.candidates().iter().zip(s.scaled()).map(|(c, x)| format!("{c}\t{x}/{t}\n")).collect()
}

fn generate(to: Target, g: &Graph, k: usize, alpha: Alpha, model: WinnerModel) -> crate::error::Result<ControlInstance> {
    match to {
        Target::Ccacu => reduce_vc_to_ccacu(g, k, alpha, model),
        Target::Ccdc => reduce_vc_to_ccdc(g, k, alpha, model),
        Target::CcrpcTp => reduce_vc_to_ccrpc(g, k, TieRule::Promote, alpha, model),
        Target::CcrpcTe => reduce_vc_to_ccrpc(g, k, TieRule::Eliminate, alpha, model),
    }
}

fn model_name(m: WinnerModel) -> &'static str {
    match m {
        WinnerModel::NonUnique => "nonunique",
        WinnerModel::Unique => "unique",
    }
}

/// Solves `inst` with the chosen method.
pub fn solve(inst: &ControlInstance, method: Method, bound: Option<BoundParameter>) -> crate::error::Result<Decision> {
    let kind = inst.problem.kind;
    match method {
        Method::Exact => solve_control_exact(inst, &SizeLimits::default()),
        Method::Greedy => match kind {
            ControlKind::PartitionCandidates(_) | ControlKind::RunoffPartitionCandidates(_) => destructive_partition_candidate(inst),
            _ => greedy_destructive_candidate(inst),
        },
        Method::Dp => {
            let default = inst.problem.default_goal(inst.model, &inst.p);
            if inst.problem != Problem::new(Direction::Destructive, ControlKind::Microbribery)
                || inst.goal.as_ref().is_some_and(|g| g.to_string() != default.to_string())
            {
                return Err(Error::WrongProblem(format!("the dp method handles destructive microbribery only, not {}", inst.problem)));
            }
            inst.validate()?;
            destructive_microbribery_dp(&inst.election, inst.alpha, &inst.p, inst.budget(), inst.model)
        }
        Method::Fpt => {
            let bound = bound.unwrap_or(BoundParameter::candidates(inst.election.len().max(1)));
            let goal = inst.goal();
            if inst.problem.is_candidate_control() {
                fpt_candidate_control(inst, &bound, &goal)
            } else {
                fpt_voter_control(inst, &bound, &goal)
            }
        }
    }
}

fn execute(cli: Cli, hooks: &Hooks, out: &mut String) -> Result<i32, Failure> {
    match cli.command {
        Command::Score { alpha, election } => {
            let e = load_election(&election)?;
            out.push_str(&score_table(&copeland_scores(&e, alpha)));
        }
        Command::Winners { alpha, election, model } => {
            let e = load_election(&election)?;
            let w = copeland_scores(&e, alpha).winners(model.into());
            let names: Vec<&str> = w.iter().map(|&i| e.candidate(i).as_str()).collect();
            out.push_str(&names.join(" "));
            out.push('\n');
        }
        Command::Solve {
            problem,
            method,
            alpha,
            election,
            spoiler_candidates,
            voter_pool,
            k,
            p,
            model,
            goal,
            bound,
            scores,
            timing,
        } => {
            let e = load_election(&election)?;
            let p = match (p, &goal) {
                (Some(p), _) => p,
                (None, Some(g)) if !g.names().is_empty() => g.names()[0].to_string(),
                _ => return Err(Failure::Usage("--p is required unless --goal names a candidate".into())),
            };
            let mut inst = ControlInstance::new(problem, model.into(), alpha, e.clone(), p);
            if let Some(path) = spoiler_candidates {
                let names = parsed(&path, parse_candidate_list(&read(&path)?))?;
                let idx = names.iter().map(|n| e.index_of(n)).collect::<crate::error::Result<Vec<_>>>()?;
                inst = inst.with_spoilers(idx);
            }
            if let Some(path) = voter_pool {
                let pool = parsed(&path, parse_pool(&read(&path)?, &e))?;
                inst = inst.with_pool(pool);
            }
            if let Some(k) = k {
                inst = inst.with_k(k);
            }
            if let Some(g) = goal {
                inst = inst.with_goal(g);
            }
            let start = Instant::now();
            let decision = solve(&inst, method, bound)?;
            let report = SolveReport {
                answer: decision.is_yes(),
                witness: decision.witness().cloned(),
                scores: scores.then(|| crate::score::scores_from_table(&crate::table::outcome_table(&e).restrict(&inst.registered()), alpha)),
                method,
                elapsed_ms: start.elapsed().as_millis(),
            };
            if timing {
                eprintln!("method: {}\telapsed-ms: {}", report.method, report.elapsed_ms);
            }
            out.push_str(&report.render(&e));
        }
        Command::Reduce { to, graph, k, alpha, model, out: dir } => {
            let g = load_graph(&graph)?;
            let inst = generate(to, &g, k, alpha, model.into())?;
            fs::create_dir_all(&dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
            let write = |name: &str, text: String| {
                let path = dir.join(name);
                fs::write(&path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
            };
            write("election.cop", serialize_election(&inst.election))?;
            let mut meta = format!("problem: {}\np: {}\n", inst.problem, inst.p);
            if let Some(k) = inst.k {
                meta.push_str(&format!("k: {k}\n"));
            }
            meta.push_str(&format!("alpha: {}\nmodel: {}\n", inst.alpha, model_name(inst.model)));
            meta.push_str(&format!("cover-size: {k}\n"));
            if let Some(d) = &inst.spoilers {
                let names: Vec<&str> = d.iter().map(|&c| inst.election.candidate(c).as_str()).collect();
                write("spoilers.cop", format!("candidates: {}\n", names.join(" ")))?;
                meta.push_str("spoilers: spoilers.cop\n");
            }
            write("instance.txt", meta.clone())?;
            out.push_str(&meta);
            out.push_str(&format!("candidates: {}\n", inst.election.len()));
        }
        Command::VerifyReduction { to, graph, k, alpha, model } => {
            let g = load_graph(&graph)?;
            let inst = generate(to, &g, k, alpha, model.into())?;
            let report = verify_reduction(&g, k, &inst, &SizeLimits::default())?;
            out.push_str(&report.to_string());
            if !report.equal {
                return Err(Failure::Failed("reduction answer differs from vertex cover".into()));
            }
        }
        Command::Selftest { fixtures } => {
            let report = selftest::run(hooks, fixtures.as_deref());
            out.push_str(&report.to_string());
            if !report.passed() {
                return Ok(EXIT_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Runs the command line `args` (program name first), writing normal
/// output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run_with_hooks<I, T>(args: I, hooks: &Hooks, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut text = String::new();
    let result = execute(cli, hooks, &mut text);
    let _ = out.write_all(text.as_bytes());
    match result {
        Ok(code) => code,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m),
                Failure::Budget(m) => (EXIT_BUDGET, m),
                Failure::Failed(m) => (EXIT_FAILED, m),
            };
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with_hooks(args, &Hooks::default(), out, err)
}
