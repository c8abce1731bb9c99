mod grid;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use xfam::bounds::{theorem_bound, Achiever, BoundReport, EqualityCase};
use xfam::compress::{is_left_compressed, left_compress};
use xfam::extremal::{self, classify, CaseMatch};
use xfam::genset::{cell, extent, generating_family};
use xfam::oracle::{exhaustive_oracle, linitial_oracle, verify_sweep, OracleConfig, OracleResult, VerificationReport};
use xfam::set::{format_rank_list, parse_rank_list};
use xfam::{ElementSet, FamilyTuple, Instance, RankSet, SetFamily};

use crate::grid::{parse_instance_file, GridSpec};

/// Cross-intersecting families: bounds, exact oracles, sweeps and constructions.
///
/// Rank lists are written `"a,b;c"`: one rank set per family, separated by
/// `;`. Family files hold a `n=<n>` header followed by one set per line.
/// Family indices (γ) are 1-based in tables and 0-based in `--json` output.
#[derive(Parser, Debug)]
#[command(name = "xfam", version)]
struct Cli {
    /// Print JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,

    /// Largest universe the oracles accept (beyond 12 is untested).
    #[arg(long, global = true, env = "XFAM_MAX_N", default_value_t = 12)]
    max_n: usize,

    /// Report search wall time (otherwise printed as 0 so output is reproducible).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form maximum of sum |F_j| with its candidates and equality cases.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ranks: String,
    },
    /// Exact maximum by search.
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ranks: String,
        #[arg(long, default_value_t = 1)]
        t: usize,
        #[arg(long, value_enum, default_value_t = OracleMethod::Linitial)]
        method: OracleMethod,
    },
    /// Compare oracle and bound over a grid. Exits 3 on any mismatch.
    ///
    /// GRID is either an instance file (lines `<n> <ranks> [<t>]`) or an
    /// inline spec such as `n=5..8 m=2 maxk=4 shape=singleton`
    /// (`shape=subsets` takes every non-empty subset of [maxk]; `t=` sets the depth).
    Verify {
        #[arg(long)]
        grid: String,
    },
    /// Write an extremal family or tuple.
    ///
    /// PARAMS is a list of key=value pairs: `n=7 ranks=3,2` for star,
    /// `n=7 ranks=3,2 k=2` for m1/m2, `n=7 ranks=3;2 k=2 gamma=1` for hub,
    /// `n=7 ranks=3;2` for stars, `n=5 k1=3 k2=2` with --from for case3,
    /// `n=6 k=3 m=3` with --from for case4. Tuples are written to `<out>.<j>`.
    Construct {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value = "")]
        params: String,
        /// Family file used by case3 (F2) and case4 (F).
        #[arg(long)]
        from: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Left-compress a family file.
    Compress {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generators, extent and cell sizes of a monotone family.
    Genset {
        #[arg(long = "in")]
        input: PathBuf,
        /// Rank set of the family, e.g. `3,2`.
        #[arg(long)]
        ranks: String,
    },
    /// Which equality cases a maximal tuple realises.
    Classify {
        #[arg(long = "in", num_args = 2.., required = true)]
        input: Vec<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ranks: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleMethod {
    Linitial,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Star,
    M1,
    M2,
    Hub,
    Stars,
    Case3,
    Case4,
}

#[derive(Debug)]
enum Failure {
    /// exit 2
    Usage(String),
    /// exit 1
    Precondition(String),
    /// exit 3, after the report has been printed
    Mismatch(usize),
}

impl From<xfam::Error> for Failure {
    fn from(e: xfam::Error) -> Self {
        Failure::Precondition(e.to_string())
    }
}

fn usage<E: ToString>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Precondition(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Mismatch(count)) => {
            eprintln!("{count} mismatches");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let config = OracleConfig {
        max_n: cli.max_n,
        ..OracleConfig::default()
    };
    match &cli.command {
        Command::Bound { n, ranks } => {
            let ranks = parse_rank_list(ranks).map_err(usage)?;
            let report = theorem_bound(*n, &ranks).map_err(usage)?;
            emit(cli.json, &report, render_bound)
        }
        Command::Oracle { n, ranks, t, method } => {
            let ranks = parse_rank_list(ranks).map_err(usage)?;
            let instance = Instance::new(*n, *t, ranks).map_err(usage)?;
            let mut result = match method {
                OracleMethod::Linitial => linitial_oracle(&instance, &config)?,
                OracleMethod::Exhaustive => exhaustive_oracle(&instance, &config)?,
            };
            if !cli.timing {
                result.stats.wall_ms = 0;
            }
            emit(cli.json, &result, render_oracle)
        }
        Command::Verify { grid } => {
            let instances = load_grid(grid)?;
            let report = verify_sweep(&instances, &config);
            emit(cli.json, &report, render_verify)?;
            match report.mismatches {
                0 => Ok(()),
                k => Err(Failure::Mismatch(k)),
            }
        }
        Command::Construct { kind, params, from, out } => {
            let written = construct(*kind, params, from.as_deref(), out)?;
            let summary = Written { written };
            emit(cli.json, &summary, |w| {
                w.written.iter().map(|p| format!("wrote {p}\n")).collect()
            })
        }
        Command::Compress { input, out } => {
            let family = read_family(input)?;
            let compressed = left_compress(&family);
            match out {
                Some(path) => {
                    write_file(path, &compressed.to_text())?;
                    let summary = Written {
                        written: vec![path.display().to_string()],
                    };
                    emit(cli.json, &summary, |w| format!("wrote {}\n", w.written[0]))
                }
                None if cli.json => emit(true, &compressed, |_| String::new()),
                None => {
                    write_stdout(&compressed.to_text())
                }
            }
        }
        Command::Genset { input, ranks } => {
            let family = read_family(input)?;
            let ranks: RankSet = ranks.parse().map_err(usage)?;
            family.check_ranks(&ranks)?;
            let report = genset_report(&family, &ranks)?;
            emit(cli.json, &report, render_genset)
        }
        Command::Classify { input, n, ranks } => {
            let ranks = parse_rank_list(ranks).map_err(usage)?;
            if ranks.len() != input.len() {
                return Err(Failure::Usage(format!(
                    "{} rank sets for {} family files",
                    ranks.len(),
                    input.len()
                )));
            }
            let families = input.iter().map(|p| read_family(p)).collect::<Result<Vec<_>, _>>()?;
            if let Some(f) = families.iter().find(|f| f.universe() != *n) {
                return Err(Failure::Precondition(format!(
                    "family file has n={}, expected n={n}",
                    f.universe()
                )));
            }
            let tuple = FamilyTuple::new(*n, ranks, families)?;
            let cases = classify(&tuple)?;
            emit(cli.json, &cases, |c| render_cases(c))
        }
    }
}

fn emit<T: Serialize>(json: bool, value: &T, human: impl Fn(&T) -> String) -> Outcome {
    if json {
        let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Precondition(e.to_string()))?;
        write_stdout(&format!("{text}\n"))?;
    } else {
        write_stdout(&human(value))?;
    }
    Ok(())
}

/// A closed pipe (e.g. `| head`) is not an error.
fn write_stdout(text: &str) -> Outcome {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Precondition(e.to_string())),
        _ => Ok(()),
    }
}

fn read_family(path: &Path) -> Result<SetFamily, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Precondition(format!("{}: {e}", path.display())))?;
    SetFamily::parse(&text).map_err(|e| Failure::Precondition(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Precondition(format!("{}: {e}", path.display())))
}

fn load_grid(grid: &str) -> Result<Vec<Instance>, Failure> {
    let path = Path::new(grid);
    if path.exists() && !path.is_dir() {
        let text = fs::read_to_string(path).map_err(|e| Failure::Precondition(format!("{grid}: {e}")))?;
        parse_instance_file(&text).map_err(|e| Failure::Usage(format!("{grid}: {e}")))
    } else {
        GridSpec::parse(grid).and_then(|g| g.instances()).map_err(Failure::Usage)
    }
}

#[derive(Serialize)]
struct Written {
    written: Vec<String>,
}

/// `key=value` pairs separated by whitespace.
struct Params(Vec<(String, String)>);

impl Params {
    fn parse(text: &str) -> Result<Self, Failure> {
        text.split_whitespace()
            .map(|tok| {
                tok.split_once('=')
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .ok_or_else(|| Failure::Usage(format!("expected key=value, found {tok:?}")))
            })
            .collect::<Result<_, _>>()
            .map(Params)
    }

    fn raw(&self, key: &str) -> Result<&str, Failure> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Failure::Usage(format!("missing parameter {key}")))
    }

    fn number(&self, key: &str) -> Result<usize, Failure> {
        let v = self.raw(key)?;
        v.parse().map_err(|_| Failure::Usage(format!("bad value {key}={v}")))
    }
}

fn construct(kind: Kind, params: &str, from: Option<&Path>, out: &Path) -> Result<Vec<String>, Failure> {
    let p = Params::parse(params)?;
    let n = p.number("n")?;
    let single_ranks = || -> Result<RankSet, Failure> { p.raw("ranks")?.parse().map_err(usage) };
    let rank_list = || -> Result<Vec<RankSet>, Failure> { parse_rank_list(p.raw("ranks")?).map_err(usage) };
    let source = || -> Result<SetFamily, Failure> {
        let path = from.ok_or_else(|| Failure::Usage(format!("--from is required for {kind:?}")))?;
        read_family(path)
    };
    let result: Result<Result<SetFamily, FamilyTuple>, xfam::Error> = match kind {
        Kind::Star => extremal::star(n, &single_ranks()?).map(Ok),
        Kind::M1 => extremal::m1(n, &single_ranks()?, p.number("k")?).map(Ok),
        Kind::M2 => extremal::m2(n, &single_ranks()?, p.number("k")?).map(Ok),
        Kind::Stars => extremal::star_tuple(n, &rank_list()?).map(Err),
        Kind::Hub => {
            let gamma = p.number("gamma")?;
            if gamma == 0 {
                return Err(Failure::Usage("gamma is 1-based".into()));
            }
            extremal::hub_tuple(n, &rank_list()?, gamma - 1, p.number("k")?).map(Err)
        }
        Kind::Case3 => extremal::case_iii(n, p.number("k1")?, p.number("k2")?, &source()?).map(Err),
        Kind::Case4 => extremal::case_iv(n, p.number("k")?, p.number("m")?, &source()?).map(Err),
    };
    match result? {
        Ok(family) => {
            write_file(out, &family.to_text())?;
            Ok(vec![out.display().to_string()])
        }
        Err(tuple) => {
            let mut written = Vec::new();
            for (j, family) in tuple.families().iter().enumerate() {
                let mut name = out.as_os_str().to_owned();
                name.push(format!(".{}", j + 1));
                let path = PathBuf::from(name);
                write_file(&path, &family.to_text())?;
                written.push(path.display().to_string());
            }
            Ok(written)
        }
    }
}

#[derive(Serialize)]
struct CellSize {
    generator: ElementSet,
    size: usize,
}

#[derive(Serialize)]
struct GensetReport {
    n: usize,
    ranks: RankSet,
    family_size: usize,
    left_compressed: bool,
    extent: Option<usize>,
    generators: SetFamily,
    cells: Vec<CellSize>,
}

fn genset_report(family: &SetFamily, ranks: &RankSet) -> Result<GensetReport, Failure> {
    let g = generating_family(family, ranks)?;
    let n = family.universe();
    let cells = g
        .generators()
        .iter()
        .map(|e| {
            Ok(CellSize {
                generator: *e,
                size: cell(e, ranks, n)?.len(),
            })
        })
        .collect::<Result<Vec<_>, xfam::Error>>()?;
    Ok(GensetReport {
        n,
        ranks: ranks.clone(),
        family_size: family.len(),
        left_compressed: is_left_compressed(family),
        extent: extent(&g).ok(),
        generators: g.generators().clone(),
        cells,
    })
}

fn case_name(case: &EqualityCase) -> String {
    match case {
        EqualityCase::Hub { gamma } => format!("ii (γ={})", gamma + 1),
        other => other.label().to_string(),
    }
}

fn render_bound(r: &BoundReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n = {}, ranks = {}", r.n, format_rank_list(&r.ranks));
    let _ = writeln!(s, "{:<8} {:>6} {:>12}", "γ", "k_min", "F_γ(k_min)");
    for c in &r.candidates {
        let _ = writeln!(s, "{:<8} {:>6} {:>12}", c.gamma + 1, c.k_min, c.value);
    }
    let _ = writeln!(s, "{:<8} {:>6} {:>12}", "stars", "", r.star_total);
    let argmax: Vec<String> = r
        .argmax
        .iter()
        .map(|a| match a {
            Achiever::Star => "stars".to_string(),
            Achiever::Gamma { gamma } => format!("γ={}", gamma + 1),
        })
        .collect();
    let _ = writeln!(s, "maximum {} attained by {}", r.maximum, argmax.join(", "));
    let cases: Vec<String> = r.predicted_cases.iter().map(case_name).collect();
    let _ = writeln!(s, "predicted cases: {}", cases.join(", "));
    if !r.valid {
        let _ = writeln!(s, "warning: n < k1 + k2, the bound is not asserted here");
    }
    s
}

fn render_profile(profile: &[Vec<(usize, usize)>]) -> String {
    profile
        .iter()
        .map(|layers| {
            layers
                .iter()
                .map(|(r, size)| format!("{r}:{size}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

fn render_oracle(r: &OracleResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "maximum {}", r.maximum);
    let _ = writeln!(s, "profile (rank:size per family) {}", render_profile(&r.profile));
    let _ = writeln!(s, "method {:?}, {} nodes, {} ms", r.method, r.stats.nodes, r.stats.wall_ms);
    for (j, family) in r.witness.families().iter().enumerate() {
        let _ = writeln!(s, "F_{} = {}", j + 1, family);
    }
    s
}

fn render_verify(r: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<4} {:<16} {:>8} {:>8} {:<6} cases", "n", "ranks", "oracle", "bound", "equal");
    for e in &r.entries {
        let cases = match (&e.classification_error, e.classified_case.is_empty()) {
            (Some(err), _) => err.clone(),
            (None, true) => "none".into(),
            (None, false) => e.classified_case.iter().map(case_name).collect::<Vec<_>>().join(", "),
        };
        let _ = writeln!(
            s,
            "{:<4} {:<16} {:>8} {:>8} {:<6} {}",
            e.instance.n,
            format_rank_list(&e.instance.ranks),
            e.oracle_max,
            e.bound_max,
            if e.equal { "yes" } else { "NO" },
            cases
        );
    }
    for k in &r.skipped {
        let _ = writeln!(s, "skipped {}: {}", k.instance, k.reason);
    }
    let _ = writeln!(s, "{} mismatches in {} instances", r.mismatches, r.entries.len());
    s
}

fn render_genset(r: &GensetReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "n = {}, ranks = {}, |F| = {}, left-compressed: {}",
        r.n,
        r.ranks,
        r.family_size,
        if r.left_compressed { "yes" } else { "no" }
    );
    match r.extent {
        Some(l) => {
            let _ = writeln!(s, "extent {l}");
        }
        None => {
            let _ = writeln!(s, "extent undefined (empty family)");
        }
    }
    let _ = writeln!(s, "{:<20} {:>10}", "generator", "cell size");
    for c in &r.cells {
        let _ = writeln!(s, "{:<20} {:>10}", c.generator.to_string(), c.size);
    }
    s
}

fn render_cases(cases: &[CaseMatch]) -> String {
    if cases.is_empty() {
        return "none\n".into();
    }
    cases
        .iter()
        .map(|c| match &c.witness_permutation {
            Some(p) => format!("case {} via {:?}\n", case_name(&c.case), p),
            None => format!("case {}\n", case_name(&c.case)),
        })
        .collect()
}
