use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use atlsc::game::{AgentId, Cgso};
use atlsc::gen;
use atlsc::logic::{self, StateFormula};
use atlsc::qctl::{self, QctlOptions};
use atlsc::reduce;
use atlsc::report::{sha256_hex, CheckReport, Inputs, Stats};
use atlsc::strategy::{self, CheckOptions};

#[derive(Parser)]
#[command(
    name = "atlsc",
    version,
    about = "Strategic logics over concurrent games with partial observation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a game file for structural problems
    Validate { game: PathBuf },
    /// Decide a formula on a game and print a JSON report
    Check(CheckArgs),
    /// Compile a game and formula into a structure plus a quantified formula
    Translate(TranslateArgs),
    /// Split joint moves into rounds of single-agent moves
    ToTurnbased(TurnArgs),
    /// Compare the direct engine against the reduction on random inputs
    Crosscheck(CrosscheckArgs),
}

#[derive(Args)]
struct CheckArgs {
    game: PathBuf,
    formula: String,
    /// Engine override; the default picks by formula shape
    #[arg(long, value_enum)]
    engine: Option<EngineKind>,
    /// Window length for the windowed engine
    #[arg(long)]
    window: Option<usize>,
    /// State to evaluate at (defaults to the game's init state)
    #[arg(long)]
    state: Option<String>,
    /// Include wall-clock time in the report
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineKind {
    Direct,
    Reduction,
    Windowed,
}

#[derive(Args)]
struct TranslateArgs {
    game: PathBuf,
    formula: String,
    #[arg(long, value_enum)]
    semantics: Semantics,
    /// Output prefix; writes `<prefix>.kripke` and `<prefix>.qctl`
    #[arg(long)]
    out: Option<PathBuf>,
    /// State to anchor at (defaults to the game's init state)
    #[arg(long)]
    state: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Semantics {
    /// Unfolding of the observation quotient, unrestricted quantifiers
    Tree,
    /// Underlying structure, `_0` quantifiers only
    Structure,
}

#[derive(Args)]
struct TurnArgs {
    game: PathBuf,
    /// Comma-separated agent order (defaults to declaration order)
    #[arg(long)]
    order: Option<String>,
    /// Rewrite this formula for the transformed game as well
    #[arg(long)]
    formula: Option<String>,
    /// Output path (defaults to `<stem>-tb.game` next to the input)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    cases: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Prints a line to stdout, swallowing broken pipes from truncated readers.
fn emit(line: impl AsRef<str>) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{}", line.as_ref());
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Validate { game } => cmd_validate(&game),
        Cmd::Check(a) => cmd_check(a),
        Cmd::Translate(a) => cmd_translate(a),
        Cmd::ToTurnbased(a) => cmd_to_turnbased(a),
        Cmd::Crosscheck(a) => cmd_crosscheck(a),
    }
}

fn load_game(path: &Path) -> Result<(String, Cgso)> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let g = Cgso::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok((text, g))
}

fn anchor(g: &Cgso, state: &Option<String>) -> Result<atlsc::StateId> {
    match state {
        Some(name) => g
            .state_id(name)
            .with_context(|| format!("unknown state `{name}`")),
        None => g
            .init()
            .context("game declares no init state; pass --state"),
    }
}

fn strategy_opts() -> Result<CheckOptions> {
    let mut o = CheckOptions::default();
    if let Ok(v) = std::env::var("ATLSC_MAX_WINDOW_NODES") {
        o.max_window_nodes = v.parse().context("ATLSC_MAX_WINDOW_NODES")?;
    }
    if let Ok(v) = std::env::var("ATLSC_MAX_TABLES") {
        o.max_tables = v.parse().context("ATLSC_MAX_TABLES")?;
    }
    Ok(o)
}

fn qctl_opts() -> Result<QctlOptions> {
    let mut o = QctlOptions::default();
    if let Ok(v) = std::env::var("ATLSC_MAX_QUANTIFIER_DEPTH") {
        o.max_quantifier_depth = v.parse().context("ATLSC_MAX_QUANTIFIER_DEPTH")?;
    }
    Ok(o)
}

fn cmd_validate(path: &Path) -> Result<ExitCode> {
    let (_, g) = load_game(path)?;
    let issues = g.validate();
    if issues.is_empty() {
        emit(format!(
            "ok: {} states, {} agents, {} moves",
            g.n_states(),
            g.agents().len(),
            g.moves().len()
        ));
        return Ok(ExitCode::SUCCESS);
    }
    for d in &issues {
        eprintln!("{d}");
    }
    Ok(ExitCode::from(2))
}

fn cmd_check(a: CheckArgs) -> Result<ExitCode> {
    let (text, g) = load_game(&a.game)?;
    let issues = g.validate();
    if let Some(first) = issues.first() {
        bail!("invalid game ({} problems): {first}", issues.len());
    }
    let phi = StateFormula::parse(&a.formula)?;
    let at = anchor(&g, &a.state)?;
    let engine = a.engine.unwrap_or({
        if phi.memoryless_shaped() && a.window.is_none() {
            EngineKind::Reduction
        } else {
            EngineKind::Windowed
        }
    });

    let start = Instant::now();
    let (verdict, engine_name, witnesses, mut stats) = match engine {
        EngineKind::Direct => {
            if !phi.memoryless_shaped() {
                bail!(
                    "the direct engine needs every quantifier marked `_0`; \
                     use --engine windowed for memoryful quantifiers"
                );
            }
            let r = strategy::check_memoryless(&g, &phi, at, strategy_opts()?)?;
            (
                r.holds,
                "memoryless-direct".to_string(),
                r.witness.iter().map(|t| t.render(&g)).collect(),
                Stats {
                    states_explored: r.stats.states_explored,
                    tables_enumerated: r.stats.tables_enumerated,
                    wall_ms: None,
                },
            )
        }
        EngineKind::Windowed => {
            let k = a.window.unwrap_or(3);
            let r = strategy::check_windowed(&g, &phi, at, k, strategy_opts()?)?;
            (
                r.holds,
                format!("windowed({k})"),
                r.witness.iter().map(|t| t.render(&g)).collect(),
                Stats {
                    states_explored: r.stats.states_explored,
                    tables_enumerated: r.stats.tables_enumerated,
                    wall_ms: None,
                },
            )
        }
        EngineKind::Reduction => {
            if !phi.memoryless_shaped() {
                bail!(
                    "the reduction engine needs every quantifier marked `_0`; \
                     use --engine windowed for memoryful quantifiers"
                );
            }
            let red = reduce::build_memoryless_reduction(&g, &phi, at)?;
            let rat = red
                .structure
                .state_id(&red.at)
                .expect("reduction keeps state names");
            let out = qctl::check_structure(&red.structure, &red.formula, rat, qctl_opts()?)?;
            // formulas with their own prop quantifiers report the structure
            // semantics they are actually checked under
            let tag = if phi.has_prop_quantifiers() {
                "qctl-structure"
            } else {
                "memoryless-reduction"
            };
            (
                out.holds,
                tag.to_string(),
                out.witness
                    .iter()
                    .map(|(p, ext)| format!("{p} = {{{}}}", ext.join(" ")))
                    .collect(),
                Stats {
                    states_explored: red.structure.n_states(),
                    tables_enumerated: 0,
                    wall_ms: None,
                },
            )
        }
    };
    if a.timing {
        stats.wall_ms = Some(start.elapsed().as_millis() as u64);
    }

    let report = CheckReport {
        verdict,
        engine: engine_name,
        witnesses,
        stats,
        inputs: Inputs {
            game_sha256: sha256_hex(&text),
            formula_sha256: sha256_hex(&a.formula),
        },
    };
    emit(report.to_json());
    Ok(if verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_translate(a: TranslateArgs) -> Result<ExitCode> {
    let (_, g) = load_game(&a.game)?;
    let issues = g.validate();
    if let Some(first) = issues.first() {
        bail!("invalid game ({} problems): {first}", issues.len());
    }
    let phi = StateFormula::parse(&a.formula)?;
    let at = anchor(&g, &a.state)?;
    let (red, tag) = match a.semantics {
        Semantics::Tree => (reduce::build_uniform_reduction(&g, &phi, at)?, "tree"),
        Semantics::Structure => {
            (reduce::build_memoryless_reduction(&g, &phi, at)?, "structure")
        }
    };
    let prefix = match a.out {
        Some(p) => p,
        None => {
            let stem = a
                .game
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "out".into());
            PathBuf::from(format!("{stem}-{tag}"))
        }
    };
    let kripke_path = prefix.with_extension("kripke");
    let formula_path = prefix.with_extension("qctl");
    let structure_text = format!("# at: {}\n{}", red.at, red.structure.to_text());
    fs::write(&kripke_path, &structure_text)
        .with_context(|| format!("writing {}", kripke_path.display()))?;
    fs::write(&formula_path, format!("{}\n", red.formula))
        .with_context(|| format!("writing {}", formula_path.display()))?;
    emit(format!(
        "wrote {} ({} structure nodes)",
        kripke_path.display(),
        red.structure.description_size()
    ));
    emit(format!(
        "wrote {} ({} formula nodes)",
        formula_path.display(),
        red.formula.count_nodes()
    ));
    emit(format!(
        "at: {} (|Q| = {}, moves = {}, agents = {}, input nodes = {})",
        red.at,
        g.n_states(),
        g.moves().len(),
        g.agents().len(),
        phi.count_nodes()
    ));
    Ok(ExitCode::SUCCESS)
}

fn cmd_to_turnbased(a: TurnArgs) -> Result<ExitCode> {
    let (_, g) = load_game(&a.game)?;
    let order: Vec<AgentId> = match &a.order {
        Some(list) => list
            .split(',')
            .map(|name| {
                let name = name.trim();
                g.agent_id(name)
                    .with_context(|| format!("unknown agent `{name}`"))
            })
            .collect::<Result<_>>()?,
        None => (0..g.agents().len()).map(AgentId).collect(),
    };
    let tb = g.to_turn_based(&order)?;
    let out = a.out.unwrap_or_else(|| {
        let stem = a
            .game
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into());
        PathBuf::from(format!("{stem}-tb.game"))
    });
    fs::write(&out, tb.to_text()).with_context(|| format!("writing {}", out.display()))?;
    emit(format!(
        "wrote {} ({} states, was {})",
        out.display(),
        tb.n_states(),
        g.n_states()
    ));
    if let Some(raw) = &a.formula {
        let phi = StateFormula::parse(raw)?;
        let rewritten = logic::translate_turn_based(&phi, g.agents().len(), "mid");
        let fpath = out.with_extension("formula");
        fs::write(&fpath, format!("{rewritten}\n"))
            .with_context(|| format!("writing {}", fpath.display()))?;
        emit(format!("wrote {}", fpath.display()));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_crosscheck(a: CrosscheckArgs) -> Result<ExitCode> {
    let mut rng = gen::rng(a.seed);
    let gspec = gen::GameSpec::default();
    let fspec = gen::FormulaSpec::default();
    for case in 0..a.cases {
        let g = gen::random_game(&mut rng, &gspec);
        let phi = gen::random_state_formula(&mut rng, g.agents(), g.props(), &fspec);
        let at = g.init().expect("generated games have an init state");
        let direct = strategy::check_memoryless(&g, &phi, at, strategy_opts()?)
            .with_context(|| format!("direct engine on case {case}"))?;
        let red = reduce::build_memoryless_reduction(&g, &phi, at)
            .with_context(|| format!("reduction on case {case}"))?;
        let rat = red
            .structure
            .state_id(&red.at)
            .expect("reduction keeps state names");
        let via_qctl = qctl::check_structure(&red.structure, &red.formula, rat, qctl_opts()?)
            .with_context(|| format!("structure check on case {case}"))?;
        if direct.holds != via_qctl.holds {
            eprintln!("disagreement on case {case} (seed {})", a.seed);
            eprintln!("formula: {phi}");
            eprintln!("game:\n{}", g.to_text());
            eprintln!(
                "direct says {}, reduction says {}",
                direct.holds, via_qctl.holds
            );
            return Ok(ExitCode::from(2));
        }
    }
    emit(format!("{} cases agree (seed {})", a.cases, a.seed));
    Ok(ExitCode::SUCCESS)
}
