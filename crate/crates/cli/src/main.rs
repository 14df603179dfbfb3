use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use apartness::cobisim::{cobisim_fixpoint, verify_coupling, CouplingAnswer};
use apartness::proof::{self, CheckResult, Rule, Synthesis};
use apartness::random::{random_system, RandomSpec};
use apartness::{
    apartness_tower, behavioural_apartness, behavioural_equivalence, parse_system, print_system, system_hash,
    FunctorExpr, Relation, StateId, System,
};
use clap::{Parser, Subcommand, ValueEnum};

const NOT_APART: u8 = 1;
const INVALID_PROOF: u8 = 2;
const USAGE: u8 = 64;
const DATA: u8 = 65;

#[derive(Parser)]
#[command(name = "apart", version, about = "Behavioural apartness: decide, prove and check")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the apartness relation and the equivalence partition.
    Relation { file: PathBuf },
    /// Decide whether two states are apart.
    Check { file: PathBuf, x: String, y: String },
    /// Synthesize a proof that two states are apart.
    Prove {
        file: PathBuf,
        x: String,
        y: String,
        #[arg(long, value_enum, default_value_t = Style::Covering)]
        style: Style,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Write the proof here instead of standard output.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Check a structured proof against a system.
    Verify { file: PathBuf, proof: PathBuf },
    /// Print the pairs that become apart at each level of the tower.
    Tower {
        file: PathBuf,
        #[arg(long)]
        max: Option<usize>,
    },
    /// Compare the coupling-based fixpoint with behavioural apartness (Ds Id only).
    Cobisim { file: PathBuf },
    /// Print a random system.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Use the functor `Ds Id` instead of a random one.
        #[arg(long)]
        subdist: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Basic,
    Covering,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// A failure with its exit status; the message goes to standard error.
struct Fail(u8, String);

type Outcome = Result<(u8, String), Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli.command) {
        Ok((code, out)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn read(path: &Path) -> Result<String, Fail> {
    std::fs::read_to_string(path).map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<System, Fail> {
    parse_system(&read(path)?).map_err(|e| Fail(DATA, format!("{}: {e}", path.display())))
}

fn state(c: &System, name: &str) -> Result<StateId, Fail> {
    c.lookup(name).cloned().map_err(|e| Fail(USAGE, e.to_string()))
}

fn data<T>(r: Result<T, apartness::Error>) -> Result<T, Fail> {
    r.map_err(|e| Fail(DATA, e.to_string()))
}

fn class_text(class: &[StateId]) -> String {
    let names: Vec<&str> = class.iter().map(|s| s.name()).collect();
    format!("{{{}}}", names.join(", "))
}

fn pairs_text(r: &Relation) -> Vec<String> {
    let u = r.universe();
    r.unordered_index_pairs().into_iter().map(|(i, j)| format!("({}, {})", u.state(i), u.state(j))).collect()
}

fn run(command: Command) -> Outcome {
    let mut out = String::new();
    match command {
        Command::Relation { file } => {
            let c = load(&file)?;
            let apart = data(behavioural_apartness(&c))?;
            let eq = data(behavioural_equivalence(&c))?;
            let pairs = pairs_text(&apart);
            let _ = writeln!(out, "apart ({} unordered pairs):", pairs.len());
            for p in pairs {
                let _ = writeln!(out, "  {p}");
            }
            let _ = writeln!(out, "classes: {eq}");
            Ok((0, out))
        }
        Command::Check { file, x, y } => {
            let c = load(&file)?;
            let (x, y) = (state(&c, &x)?, state(&c, &y)?);
            let eq = data(behavioural_equivalence(&c))?;
            if eq.same_block(&x, &y) {
                let class: Vec<StateId> = eq.block_containing(&x).unwrap().into_iter().cloned().collect();
                let _ = writeln!(out, "equivalent (class: {})", class_text(&class));
                Ok((NOT_APART, out))
            } else {
                let _ = writeln!(out, "apart");
                Ok((0, out))
            }
        }
        Command::Prove { file, x, y, style, format, out: target } => {
            let c = load(&file)?;
            let (x, y) = (state(&c, &x)?, state(&c, &y)?);
            let rule = match style {
                Style::Basic => Rule::Basic,
                Style::Covering => Rule::Covering,
            };
            match data(proof::synthesize(&c, &x, &y, rule))? {
                Synthesis::NotApart { class } => {
                    let _ = writeln!(out, "equivalent (class: {})", class_text(&class));
                    Ok((NOT_APART, out))
                }
                Synthesis::Proved(t) => {
                    let doc = match format {
                        Format::Text => proof::render_text(&t),
                        Format::Json => proof::to_json(&c, &t),
                    };
                    match target {
                        Some(path) => std::fs::write(&path, doc)
                            .map_err(|e| Fail(USAGE, format!("{}: {e}", path.display())))?,
                        None => out.push_str(&doc),
                    }
                    Ok((0, out))
                }
            }
        }
        Command::Verify { file, proof: proof_path } => {
            let c = load(&file)?;
            let text = read(&proof_path)?;
            let doc = proof::from_json(&text, &c)
                .map_err(|e| Fail(INVALID_PROOF, format!("{}: {e}", proof_path.display())))?;
            if doc.system_hash != system_hash(&c) {
                eprintln!("warning: proof was written for a different system text; checking anyway");
            }
            match proof::check(&c, &doc.root) {
                CheckResult::Valid => {
                    let _ = writeln!(out, "valid: {} # {}", doc.root.goal.0, doc.root.goal.1);
                    Ok((0, out))
                }
                CheckResult::Invalid { path, goal, reason } => {
                    let mut at = String::from("root");
                    for i in path {
                        let _ = write!(at, ".children[{i}]");
                    }
                    let _ = writeln!(out, "invalid at {at} ({} # {}): {reason}", goal.0, goal.1);
                    Ok((INVALID_PROOF, out))
                }
            }
        }
        Command::Tower { file, max } => {
            let c = load(&file)?;
            let tower = data(apartness_tower(&c, max.unwrap_or(usize::MAX)))?;
            for level in 1..tower.levels().len() {
                let pairs: Vec<String> =
                    tower.newly_apart(level).iter().map(|(a, b)| format!("({a}, {b})")).collect();
                let _ = writeln!(out, "level {level}: {}", pairs.join(" "));
            }
            if tower.is_stable() {
                let _ = writeln!(out, "stable after level {}", tower.levels().len() - 1);
            } else {
                let _ = writeln!(out, "not yet stable");
            }
            Ok((0, out))
        }
        Command::Cobisim { file } => {
            let c = load(&file)?;
            let report = data(cobisim_fixpoint(&c))?;
            let apart = data(behavioural_apartness(&c))?;
            let mut agree = true;
            if report.apart != apart {
                agree = false;
                let u = apart.universe();
                for (i, j) in report.apart.symmetric_closure().union(&apart).unwrap().unordered_index_pairs() {
                    let (a, b) = (u.state(i), u.state(j));
                    if report.apart.contains(a, b) != apart.contains(a, b) {
                        let _ = writeln!(
                            out,
                            "({a}, {b}): couplings say {}, behaviour says {}",
                            report.apart.contains(a, b),
                            apart.contains(a, b)
                        );
                    }
                }
            }
            for (q, answer) in &report.answers {
                if let CouplingAnswer::Exists(coupling) = answer {
                    if !verify_coupling(q, coupling) {
                        agree = false;
                        let _ = writeln!(out, "coupling with wrong marginals: {coupling:?}");
                    }
                }
            }
            let _ = writeln!(out, "{}", if agree { "agree" } else { "disagree" });
            Ok((if agree { 0 } else { NOT_APART }, out))
        }
        Command::Random { seed, states, depth, subdist } => {
            let spec = RandomSpec {
                max_states: states.max(1),
                max_depth: depth,
                functor: subdist.then(|| FunctorExpr::subdist(FunctorExpr::Identity)),
                ..RandomSpec::default()
            };
            let c: System = random_system(seed, &spec);
            out.push_str(&print_system(&c));
            Ok((0, out))
        }
    }
}
