use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use kolab::invariants::Mode;
use kolab::ko::{KoModel, Potential};
use kolab::linalg::NilOracle;
use kolab::superalg::Shape;
use kolab::syntax::parse_poly;
use kolab::verify::{self, Suite, VerifyConfig};
use kolab::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Raw,
    Certified,
}

#[derive(Parser, Debug)]
#[command(name = "kolab", version, about = "Exact computations in the odd Contact superalgebra KO(n,n+1) over F_p")]
struct Cli {
    /// Characteristic, an odd prime.
    #[arg(long, global = true, default_value_t = 3, env = "KOLAB_P")]
    p: u32,
    /// Number of even variables.
    #[arg(long, global = true, default_value_t = 1, env = "KOLAB_N")]
    n: usize,
    /// Heights of the even variables, comma separated; defaults to all 1.
    #[arg(long, global = true, value_delimiter = ',', env = "KOLAB_T")]
    t: Vec<u32>,
    #[arg(long, global = true, value_enum, default_value = "certified", env = "KOLAB_MODE")]
    mode: ModeArg,
    #[arg(long, global = true, default_value_t = 0, env = "KOLAB_SEED")]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value = "text", env = "KOLAB_OUTPUT")]
    output: Output,
    /// Largest model dimension accepted.
    #[arg(long, global = true, default_value_t = 5000, env = "KOLAB_MAX_DIM")]
    max_dim: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimensions of the graded components.
    Dims,
    /// Bracket of two potentials, printed as a potential.
    Bracket { a: String, b: String },
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        #[arg(long, default_value = "all", env = "KOLAB_SUITE")]
        suite: Suite,
        /// Count conditional verdicts as passing (default: only in raw mode).
        #[arg(long)]
        conditional_passes: Option<bool>,
    },
    /// Write the structure constants as JSON ("-" for stdout).
    Export { path: PathBuf },
    /// Ad-nilpotency verdict for an element given by its potential.
    Nil { element: String },
}

enum Failure {
    Mismatch,
    Usage(String),
    Cap(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionCap { .. } => Failure::Cap(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn index_map(n: usize) -> String {
    let block = |a: usize, b: usize| if a == b { format!("x{a}") } else { format!("x{a}..x{b}") };
    format!(
        "even {}, odd {} (x_i' = x(i+{n})), distinguished x{}",
        block(1, n),
        block(n + 1, 2 * n),
        2 * n + 1
    )
}

fn build(cli: &Cli) -> Result<KoModel, Failure> {
    if cli.n == 0 {
        return Err(Failure::Usage("n must be positive".into()));
    }
    let heights = if cli.t.is_empty() { vec![1; cli.n] } else { cli.t.clone() };
    let shape = Shape::contact(cli.n, heights, cli.p)?;
    Ok(KoModel::with_cap(shape, cli.max_dim)?)
}

fn header(cli: &Cli, model: &KoModel) {
    if cli.output == Output::Text {
        println!(
            "# KO({}, {}) over F_{}, t = {:?}, dim {}",
            cli.n,
            cli.n + 1,
            cli.p,
            model.shape().heights(),
            model.dim()
        );
        println!("# {}", index_map(cli.n));
    }
}

fn envelope(cli: &Cli, model: &KoModel) -> serde_json::Map<String, serde_json::Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(1));
    m.insert("p".into(), json!(cli.p));
    m.insert("n".into(), json!(cli.n));
    m.insert("t".into(), json!(model.shape().heights()));
    m.insert("index_map".into(), json!(index_map(cli.n)));
    m
}

fn print_json(m: serde_json::Map<String, serde_json::Value>) {
    println!("{}", serde_json::to_string_pretty(&serde_json::Value::Object(m)).expect("json value"));
}

fn potential(model: &KoModel, text: &str) -> Result<Potential, Failure> {
    Ok(Potential::new(parse_poly(model.shape(), text)?)?)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let model = build(cli)?;
    let mode = match cli.mode {
        ModeArg::Raw => Mode::Raw,
        ModeArg::Certified => Mode::Certified,
    };
    header(cli, &model);
    match &cli.command {
        Command::Dims => {
            let dims: Vec<(i32, usize)> = (-2..=model.max_degree())
                .map(|d| (d, model.component_range(d).len()))
                .collect();
            if cli.output == Output::Json {
                let mut m = envelope(cli, &model);
                m.insert(
                    "degrees".into(),
                    json!(dims.iter().map(|(d, k)| json!({"degree": d, "dim": k})).collect::<Vec<_>>()),
                );
                m.insert("total".into(), json!(model.dim()));
                print_json(m);
            } else {
                println!("{:>6}  {:>6}", "degree", "dim");
                for (d, k) in &dims {
                    println!("{d:>6}  {k:>6}");
                }
                println!("{:>6}  {:>6}", "total", model.dim());
            }
        }
        Command::Bracket { a, b } => {
            let (pa, pb) = (potential(&model, a)?, potential(&model, b)?);
            let shape = model.shape();
            let c = shape.bracket_ko(&pa, &pb)?;
            let direct = shape.bracket_w(&shape.d_ko_expand(&pa)?, &shape.d_ko_expand(&pb)?)?;
            if shape.d_ko_expand(&c)? != direct {
                return Err(Failure::Usage("bracket disagrees with the operator commutator".into()));
            }
            if cli.output == Output::Json {
                let mut m = envelope(cli, &model);
                m.insert("a".into(), json!(pa.to_string()));
                m.insert("b".into(), json!(pb.to_string()));
                m.insert("bracket".into(), json!(c.to_string()));
                print_json(m);
            } else {
                println!("{c}");
            }
        }
        Command::Verify { suite, conditional_passes } => {
            let mut cfg = VerifyConfig::new(mode, cli.seed);
            if let Some(c) = conditional_passes {
                cfg.conditional_passes = *c;
            }
            let reports = verify::run(&model, *suite, &cfg)?;
            let all = reports.iter().all(|r| cfg.passes(r));
            if cli.output == Output::Json {
                let mut m = envelope(cli, &model);
                m.insert("suite".into(), json!(suite.to_string()));
                m.insert("mode".into(), json!(mode));
                m.insert("reports".into(), json!(reports));
                m.insert("passed".into(), json!(all));
                print_json(m);
            } else {
                println!("# suite {suite}, mode {mode}, seed {}", cli.seed);
                for r in &reports {
                    let tag = if cfg.passes(r) { "pass" } else { "FAIL" };
                    println!(
                        "{tag}  {:<28} {:<11} {}/{}",
                        r.name,
                        format!("{:?}", r.verdict).to_lowercase(),
                        r.computed_dim,
                        r.expected_dim
                    );
                    if let Some(d) = &r.diagnostic {
                        println!("      {d}");
                    }
                    for w in r.witnesses.iter().take(5) {
                        println!("      - {w}");
                    }
                }
                let failed = reports.iter().filter(|r| !cfg.passes(r)).count();
                println!("{} checks, {failed} failed", reports.len());
            }
            if !all {
                return Err(Failure::Mismatch);
            }
        }
        Command::Export { path } => {
            let text = model.export_json();
            if path.as_os_str() == "-" {
                println!("{text}");
            } else {
                std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                if cli.output == Output::Text {
                    println!("wrote {} ({} basis elements)", path.display(), model.dim());
                }
            }
        }
        Command::Nil { element } => {
            let y = model.coords(&parse_poly(model.shape(), element)?)?;
            let verdict = NilOracle::standard(&model).classify(&y)?;
            if cli.output == Output::Json {
                let mut m = envelope(cli, &model);
                m.insert("element".into(), json!(element));
                m.insert("result".into(), json!(verdict));
                print_json(m);
            } else {
                println!("{}", serde_json::to_string_pretty(&verdict).expect("json value"));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
