use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use gwp_core::bridge::{check_correspondence, synthetic_fixture, TheoryTable, Verdict};
use gwp_core::cohomology::CohomRing;
use gwp_core::correspondence::{bar_transform, BarInput, BarOptions, Rule};
use gwp_core::descendents::{evaluate_on_ring, DescendentWord, SymbolTable, TransformedExpr};
use gwp_core::dsl::parse_word;
use gwp_core::kmatrix::{KMatrix, ValidationOptions};
use gwp_core::partitions::{SetPartition, DEFAULT_ENUM_CAP};
use gwp_core::selftest::{run_all, SelftestOptions};

const EXIT_PARSE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gwp",
    version,
    about = "Descendent correspondence transforms with exact arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a correspondence rule to a descendent word.
    Transform(TransformArgs),
    /// Check a K matrix file against the structural constraints.
    ValidateKmatrix {
        file: PathBuf,
        /// Accept constant corrections above the leading diagonal term.
        #[arg(long)]
        loose_diagonal: bool,
    },
    /// Compare pairs and GW series tables through a given order.
    Bridge(BridgeArgs),
    /// Write theory tables that satisfy a correspondence by construction.
    Fixture(FixtureArgs),
    /// Run the acceptance invariant suite.
    Selftest {
        #[arg(long, default_value_t = 6)]
        max_size: u32,
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_parser = parse_rule)]
    rule: Rule,
    /// A DSL word, or a file containing one.
    #[arg(long)]
    expr: String,
    #[arg(long)]
    kmatrix: PathBuf,
    /// Cohomology ring; its basis names become class symbols.
    #[arg(long)]
    ring: Option<PathBuf>,
    /// Opaque symbol `name:degree:parity[:arity]`.
    #[arg(long = "declare")]
    declare: Vec<String>,
    #[arg(long)]
    loose_diagonal: bool,
    /// Use the K matrix even if it has violations.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    common: Common,
    /// Truncate coefficients at this power of u.
    #[arg(long)]
    order: Option<i64>,
    /// Keep only the summand of this set partition, e.g. `{{1,3},{2}}`.
    #[arg(long)]
    setpartition: Option<String>,
    /// Expand the result on the basis of `--ring`.
    #[arg(long, requires = "ring")]
    evaluate: bool,
}

#[derive(Args)]
struct BridgeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    zp: PathBuf,
    #[arg(long)]
    zgw: PathBuf,
    #[arg(long)]
    order: i64,
}

#[derive(Args)]
struct FixtureArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    dbeta: i64,
    #[arg(long, default_value_t = 0)]
    dimy: i64,
    #[arg(long)]
    order: i64,
    #[arg(long, default_value_t = 17)]
    seed: u64,
    #[arg(long)]
    zp: PathBuf,
    #[arg(long)]
    zgw: PathBuf,
}

fn parse_rule(s: &str) -> Result<Rule, String> {
    s.parse::<Rule>().map_err(|e| e.to_string())
}

/// An error with the exit code of its failure class.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code,
            error: error.into(),
        }
    }
}

impl From<gwp_core::Error> for Failure {
    fn from(e: gwp_core::Error) -> Self {
        let code = match e {
            gwp_core::Error::InvalidKMatrix(_) => EXIT_VALIDATION,
            _ => EXIT_PARSE,
        };
        Failure::new(code, e)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::new(EXIT_PARSE, e)
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn enum_cap() -> Result<usize, Failure> {
    match std::env::var("GWP_ENUM_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::new(
                EXIT_PARSE,
                anyhow!("GWP_ENUM_CAP must be a positive integer, found `{v}`"),
            )
        }),
        Err(_) => Ok(DEFAULT_ENUM_CAP),
    }
}

struct Loaded {
    table: SymbolTable,
    ring: Option<CohomRing>,
    kmatrix: KMatrix,
    word: DescendentWord,
    input: BarInput,
}

fn load(c: &Common) -> Result<Loaded, Failure> {
    let ring = match &c.ring {
        Some(p) => Some(
            CohomRing::parse(&read(p)?).with_context(|| format!("in ring file {}", p.display()))?,
        ),
        None => None,
    };
    let mut table = ring
        .as_ref()
        .map(SymbolTable::from_ring)
        .unwrap_or_default();
    for d in &c.declare {
        table
            .declare_spec(d)
            .with_context(|| format!("in --declare {d}"))?;
    }
    let opts = ValidationOptions {
        strict_diagonal: !c.loose_diagonal,
    };
    let (kmatrix, report) =
        KMatrix::load(&read(&c.kmatrix)?, c.force, opts).map_err(|e| match e {
            gwp_core::Error::Parse(p) => {
                Failure::new(EXIT_PARSE, anyhow!("{}: {p}", c.kmatrix.display()))
            }
            gwp_core::Error::InvalidKMatrix(_) => {
                let report = KMatrix::parse(&read(&c.kmatrix).unwrap_or_default())
                    .map(|k| k.validate(opts).to_string())
                    .unwrap_or_default();
                Failure::new(
                    EXIT_VALIDATION,
                    anyhow!("{}: {e}\n{}", c.kmatrix.display(), report.trim_end()),
                )
            }
            other => other.into(),
        })?;
    if !report.is_clean() {
        eprint!("warning: using a K matrix with violations (--force)\n{report}");
    }
    let text = if Path::new(&c.expr).is_file() {
        read(Path::new(&c.expr))?
    } else {
        c.expr.clone()
    };
    let word = parse_word(text.trim(), &table)
        .map_err(|e| Failure::new(EXIT_PARSE, anyhow!("in --expr: {e}")))?;
    let input = BarInput::from_word(c.rule, &word)?;
    Ok(Loaded {
        table,
        ring,
        kmatrix,
        word,
        input,
    })
}

/// Applies the rule to the input word, carrying the word's sign.
fn transformed(l: &Loaded, opts: &BarOptions) -> Result<TransformedExpr, Failure> {
    let out = bar_transform(&l.input, &l.kmatrix, opts)?;
    Ok(if l.word.sign < 0 { out.neg() } else { out })
}

fn transform(a: &TransformArgs) -> Outcome {
    let l = load(&a.common)?;
    let only = match &a.setpartition {
        Some(s) => Some(
            SetPartition::parse(s)
                .map_err(|e| Failure::new(EXIT_PARSE, anyhow!("in --setpartition: {e}")))?,
        ),
        None => None,
    };
    let opts = BarOptions {
        enum_cap: enum_cap()?,
        order: a.order,
        only,
        ..BarOptions::default()
    };
    let mut out = transformed(&l, &opts)?;
    if a.evaluate {
        let ring = l.ring.as_ref().expect("clap enforces --ring");
        out = evaluate_on_ring(&out, ring, &l.table)?;
    }
    print!("{}", out.display(&l.table));
    Ok(0)
}

fn validate_kmatrix(file: &Path, loose: bool) -> Outcome {
    let k = KMatrix::parse(&read(file)?)
        .map_err(|e| Failure::new(EXIT_PARSE, anyhow!("{}: {e}", file.display())))?;
    let report = k.validate(ValidationOptions {
        strict_diagonal: !loose,
    });
    print!("{report}");
    Ok(if report.is_clean() {
        0
    } else {
        EXIT_VALIDATION
    })
}

fn bridge(a: &BridgeArgs) -> Outcome {
    let l = load(&a.common)?;
    let opts = BarOptions {
        enum_cap: enum_cap()?,
        ..BarOptions::default()
    };
    let bar = transformed(&l, &opts)?;
    let table_of = |p: &Path| -> Result<TheoryTable, Failure> {
        TheoryTable::parse(&read(p)?, &l.table)
            .map_err(|e| Failure::new(EXIT_PARSE, anyhow!("{}: {e}", p.display())))
    };
    let (zp, zgw) = (table_of(&a.zp)?, table_of(&a.zgw)?);
    let report = check_correspondence(&l.word, &bar, &zp, &zgw, a.order, &l.table)?;
    print!("{report}");
    Ok(match report.verdict {
        Verdict::Equal { .. } => 0,
        _ => EXIT_MISMATCH,
    })
}

fn fixture(a: &FixtureArgs) -> Outcome {
    let l = load(&a.common)?;
    let opts = BarOptions {
        enum_cap: enum_cap()?,
        ..BarOptions::default()
    };
    let bar = transformed(&l, &opts)?;
    let f = synthetic_fixture(&l.word, &bar, a.dbeta, a.dimy, a.order, a.seed, &l.table)?;
    write(&a.zp, &f.zp.serialize(&l.table))?;
    write(&a.zgw, &f.zgw.serialize(&l.table))?;
    println!("wrote {} pairs and {} gw series", f.zp.len(), f.zgw.len());
    Ok(0)
}

fn selftest(max_size: u32, seed: u64) -> Outcome {
    let outcomes = run_all(&SelftestOptions { max_size, seed });
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "{} of {} criteria passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    Ok(if failed == 0 { 0 } else { EXIT_MISMATCH })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Transform(a) => transform(a),
        Command::ValidateKmatrix {
            file,
            loose_diagonal,
        } => validate_kmatrix(file, *loose_diagonal),
        Command::Bridge(a) => bridge(a),
        Command::Fixture(a) => fixture(a),
        Command::Selftest { max_size, seed } => selftest(*max_size, *seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
