//! Subcommands. Each returns an [`Output`] instead of printing so tests can
//! run them in-process.
//!
//! Exit codes: 0 success/found, 1 negative result, 2 unsupported,
//! 3 input error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use probgames::game::{Membership, Verdict};
use probgames::laws::{run_law_suite_with, Composer, LawReport};
use probgames::solver::on_grid;
use probgames::{backward_induction, grid_oracle, support_enumeration, Dist, GameError, GenConfig, SolveError, Value};
use serde_json::{json, Value as Json};

use crate::build::{load, Built};
use crate::format::{serialize, FileError};
use crate::profile::{joint, parse_joint, parse_profile, parse_witness, show};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNSUPPORTED: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// What a command printed and how it exits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(stdout: String) -> Output {
        Output { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn with(code: i32, stdout: String) -> Output {
        Output { code, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: String) -> Output {
        Output { code, stdout: String::new(), stderr }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    SupportEnum,
    BackwardInduction,
    Grid,
}

#[derive(Debug, Parser)]
#[command(name = "probgames", version, about = "Build, check and solve probabilistic open games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a profile is an equilibrium.
    Check {
        file: PathBuf,
        /// Per-component distributions, e.g. `p1: H=1/2,T=1/2; p2: H=1`.
        profile: Option<String>,
        /// A joint distribution over composite strategies instead of a profile.
        #[arg(long, conflicts_with = "profile")]
        joint: Option<String>,
        /// Decomposition witness as inline JSON or a path to a JSON file.
        #[arg(long)]
        witness: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// List equilibria.
    Solve {
        file: PathBuf,
        /// Defaults to backward induction for sequential games, support
        /// enumeration otherwise.
        #[arg(long, value_enum)]
        method: Option<Method>,
        #[arg(long, default_value_t = 12)]
        resolution: u32,
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run the law suite on generated games.
    Laws {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Use a deliberately broken tensor (harness self-test).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Walk through a bundled example.
    Demo { name: String },
    /// Print a game file in canonical form.
    Fmt { file: PathBuf },
}

/// Parses arguments and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { Output::fail(EXIT_INPUT, text) } else { Output::ok(text) };
        }
    };
    match cli.command {
        Command::Check { file, profile, joint, witness, format } => {
            with_file(&file, |b| check(b, profile.as_deref(), joint.as_deref(), witness.as_deref(), format))
        }
        Command::Solve { file, method, resolution, epsilon, format } => {
            with_file(&file, |b| solve(b, method, resolution, epsilon, format))
        }
        Command::Laws { seed, cases, format, inject_fault } => laws(seed, cases, format, inject_fault),
        Command::Demo { name } => crate::demo::demo(&name),
        Command::Fmt { file } => match read(&file).and_then(|t| {
            crate::format::parse_game_file(&t).map_err(|e| located(&file, &e))
        }) {
            Ok(g) => Output::ok(serialize(&g)),
            Err(msg) => Output::fail(EXIT_INPUT, msg),
        },
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("error: cannot read {}: {e}\n", path.display()))
}

fn located(path: &Path, e: &FileError) -> String {
    format!("error: {}:{e}\n", path.display())
}

fn with_file(path: &Path, f: impl FnOnce(&Built) -> Output) -> Output {
    match read(path).and_then(|t| load(&t).map_err(|e| located(path, &e))) {
        Ok((_, b)) => f(&b),
        Err(msg) => Output::fail(EXIT_INPUT, msg),
    }
}

fn witness_json(arg: &str) -> Result<Json, String> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        read(Path::new(arg))?
    };
    serde_json::from_str(&text).map_err(|e| format!("error: witness is not valid JSON: {e}\n"))
}

/// Membership of a profile (or joint) in the equilibrium set.
pub fn check(b: &Built, profile: Option<&str>, joint_text: Option<&str>, witness: Option<&str>, format: Format) -> Output {
    let candidate = match (profile, joint_text) {
        (Some(p), None) => parse_profile(b, p).map(|ds| joint(&b.tree, &ds)),
        (None, Some(j)) => parse_joint(b, j),
        _ => return Output::fail(EXIT_INPUT, "error: give either a profile or --joint\n".into()),
    };
    let candidate = match candidate {
        Ok(c) => c,
        Err(e) => return Output::fail(EXIT_INPUT, format!("error: {e}\n")),
    };
    let witness = match witness.map(witness_json).transpose() {
        Ok(Some(j)) => match parse_witness(b, &j) {
            Ok(w) => Some(w),
            Err(e) => return Output::fail(EXIT_INPUT, format!("error: {e}\n")),
        },
        Ok(None) => None,
        Err(msg) => return Output::fail(EXIT_INPUT, msg),
    };
    let ctx = match &witness {
        Some(w) => Membership::with_witness(w),
        None => Membership::new(),
    };
    match ctx.check(&b.game, &b.state, &b.table, &candidate) {
        Ok(v) => {
            let (code, result) = match &v {
                Verdict::Member => (EXIT_OK, "EQUILIBRIUM"),
                Verdict::NotMember(_) => (EXIT_NEGATIVE, "NOT AN EQUILIBRIUM"),
            };
            let reason = v.failure().map(|f| f.to_string());
            let stdout = match format {
                Format::Text => match &reason {
                    Some(r) => format!("{result}\nreason: {r}\n"),
                    None => format!("{result}\n"),
                },
                Format::Json => json_line(&json!({
                    "result": result,
                    "reason": reason,
                    "candidate": candidate.to_string(),
                })),
            };
            Output::with(code, stdout)
        }
        Err(e @ GameError::UnsupportedComposition { .. }) => Output::fail(
            EXIT_UNSUPPORTED,
            format!(
                "unsupported: {e}\nhint: pass --witness '{{\"branches\": {{\"<state>\": {{\"<strategy>\": \"<weight>\"}}}}}}' \
                 giving the second component's distribution at each state\n"
            ),
        ),
        Err(e) => Output::fail(EXIT_INPUT, format!("error: {e}\n")),
    }
}

fn json_line(v: &Json) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("json values serialize"))
}

fn default_method(b: &Built) -> Method {
    match b.tree {
        crate::format::Expr::Seq(..) => Method::BackwardInduction,
        _ => Method::SupportEnum,
    }
}

/// Equilibria by the chosen method.
pub fn solve(b: &Built, method: Option<Method>, resolution: u32, epsilon: f64, format: Format) -> Output {
    let method = method.unwrap_or_else(|| default_method(b));
    let pairs = |r: Vec<(Dist<Value>, Dist<Value>)>| r.into_iter().map(|(a, c)| vec![a, c]).collect::<Vec<_>>();
    let found: Result<(Vec<Vec<Dist<Value>>>, Vec<String>), SolveError> = match method {
        Method::SupportEnum => support_enumeration(&b.game, &b.state, &b.table).map(|r| {
            let notes = if r.degenerate {
                vec!["degenerate game: only the vertices of each equilibrium polytope are listed".to_string()]
            } else {
                vec![]
            };
            (pairs(r.equilibria), notes)
        }),
        Method::BackwardInduction => backward_induction(&b.game, &b.state, &b.table).map(|r| (pairs(r), vec![])),
        Method::Grid => grid_oracle(&b.game, &b.state, &b.table, resolution, epsilon).map(|pts| {
            let notes = vec![format!(
                "approximate: grid resolution {resolution}, epsilon {epsilon:e}; points are weights with denominator {resolution} whose payoffs are within epsilon of best"
            )];
            debug_assert!(pts.iter().all(|p| p.leaves.iter().all(|d| on_grid(d, resolution))));
            (pts.into_iter().map(|p| p.leaves).collect(), notes)
        }),
    };
    let (eqs, notes) = match found {
        Ok(x) => x,
        Err(e @ (SolveError::UnsupportedShape(_) | SolveError::GridTooLarge { .. })) => {
            return Output::fail(EXIT_UNSUPPORTED, format!("unsupported: {e}\n"))
        }
        Err(e) => return Output::fail(EXIT_INPUT, format!("error: {e}\n")),
    };
    let code = if eqs.is_empty() { EXIT_NEGATIVE } else { EXIT_OK };
    let name = match method {
        Method::SupportEnum => "support-enum",
        Method::BackwardInduction => "backward-induction",
        Method::Grid => "grid",
    };
    let stdout = match format {
        Format::Text => {
            let mut s: String = notes.iter().map(|n| format!("# {n}\n")).collect();
            if eqs.is_empty() {
                s.push_str("no equilibria found\n");
            }
            for e in &eqs {
                s.push_str(&show(b, e));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let list: Vec<Json> = eqs
                .iter()
                .map(|e| {
                    Json::Object(b.leaves.iter().zip(e).map(|(l, d)| (l.name.clone(), Json::String(d.to_string()))).collect())
                })
                .collect();
            let mut v = json!({
                "result": if eqs.is_empty() { "none" } else { "found" },
                "method": name,
                "equilibria": list,
                "notes": notes,
            });
            if method == Method::Grid {
                v["resolution"] = json!(resolution);
                v["epsilon"] = json!(epsilon);
            }
            json_line(&v)
        }
    };
    Output::with(code, stdout)
}

/// Text rendering of a law report.
pub fn report_text(r: &LawReport) -> String {
    let mut s = format!("law suite: seed {}, {} cases\n", r.seed, r.cases);
    s.push_str(&format!("{:<20} {:>6} {:>12} {:>9} {:>6}\n", "law", "cases", "comparisons", "failures", "skips"));
    for l in &r.laws {
        s.push_str(&format!(
            "{:<20} {:>6} {:>12} {:>9} {:>6}\n",
            l.law,
            l.cases,
            l.comparisons,
            l.failures.len(),
            l.skips.len()
        ));
    }
    for l in &r.laws {
        for c in &l.failures {
            s.push_str(&format!("FAIL {} case {}: {}\n", l.law, c.case, c.detail));
        }
        for k in &l.skips {
            s.push_str(&format!("skip {} case {}: {}\n", l.law, k.case, k.reason));
        }
    }
    s.push_str(&format!(
        "seq-assoc lifted predicate decided by: flow {}, point mass {}, witness {}\n",
        r.seq_rules.flow, r.seq_rules.point_mass, r.seq_rules.witness
    ));
    s.push_str(&format!(
        "lifting vs unit: {} [{}]\n",
        r.non_unit_witness,
        if r.non_unit_witness.holds() { "checked" } else { "CHECK FAILED" }
    ));
    if r.is_vacuous() {
        s.push_str("warning: no cases were generated; zero comparisons were made, so this report is vacuous\n");
    }
    s.push_str(&format!(
        "{}: {} failures, {} skips ({:.1}% of seq-assoc cases)\n",
        if r.failures() == 0 { "PASS" } else { "FAIL" },
        r.failures(),
        r.skips(),
        100.0 * r.seq_skip_ratio()
    ));
    s
}

pub fn laws(seed: u64, cases: usize, format: Format, inject_fault: bool) -> Output {
    let cfg = GenConfig { seed, cases, ..GenConfig::default() };
    let composer = if inject_fault { Composer::Faulty } else { Composer::Sound };
    let r = run_law_suite_with(&cfg, composer);
    let code = if r.failures() == 0 { EXIT_OK } else { EXIT_NEGATIVE };
    let stdout = match format {
        Format::Text => report_text(&r),
        Format::Json => {
            let mut v = serde_json::to_value(&r).expect("reports serialize");
            v["result"] = json!(if code == EXIT_OK { "pass" } else { "fail" });
            v["total_failures"] = json!(r.failures());
            v["total_skips"] = json!(r.skips());
            if r.is_vacuous() {
                v["warning"] = json!("no cases were generated; the report is vacuous");
            }
            json_line(&v)
        }
    };
    Output::with(code, stdout)
}
