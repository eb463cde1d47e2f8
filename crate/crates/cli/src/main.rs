use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qcluster::explore::DEFAULT_BUDGET;
use qcluster::io::{rational_rows, read_text};
use qcluster::{
    centralizer_report, check_compatible, check_total_sign_coherence, duplicate_seed, explore, lambda_from_bcd,
    periodicity_scan, save_seed, BcdFile, ExplorationReport, ExploreError, ExploreOptions, FormatError,
    MutationWord, QuantumSeed, SeedError, SeedFile,
};

const EXIT_COUNTEREXAMPLE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTEGRITY: u8 = 3;
const EXIT_INCOMPLETE: u8 = 4;

/// Quantum cluster seeds: compatibility, mutation, exploration.
#[derive(Parser)]
#[command(name = "qcl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that Lambda is compatible with B and print D.
    CheckCompat { path: PathBuf },
    /// Apply a mutation word and print the resulting cluster variables.
    Mutate {
        path: PathBuf,
        /// Comma-separated directions starting at 1, e.g. "1,2,1".
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Breadth-first exploration of the mutation class.
    Explore {
        path: PathBuf,
        #[arg(long)]
        depth: usize,
        /// Mutate B only and check sign coherence.
        #[arg(long)]
        matrix_only: bool,
        /// Maximum number of processed nodes.
        #[arg(long, env = "QCL_BUDGET", default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Skip the q = 1 Poisson bracket check.
        #[arg(long)]
        no_classical: bool,
        /// Also count seeds up to relabeling.
        #[arg(long)]
        up_to_permutation: bool,
    },
    /// Write the duplicated seed, which is principal and integrable.
    Duplicate {
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print Lambda built from a {B, C, D} file.
    LambdaFromBcd { path: PathBuf },
    /// Print the monomial centralizer of the first n cluster variables.
    Centralizer { path: PathBuf },
    /// Apply a word and compare with the start, exactly and up to relabeling.
    Periodicity {
        path: PathBuf,
        #[arg(long)]
        word: String,
    },
}

enum Failure {
    Input(String),
    Integrity(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Integrity(_) => EXIT_INTEGRITY,
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        if e.is_integrity() {
            Failure::Integrity(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<SeedError> for Failure {
    fn from(e: SeedError) -> Self {
        FormatError::from(e).into()
    }
}

impl From<ExploreError> for Failure {
    fn from(e: ExploreError) -> Self {
        if e.is_integrity() {
            Failure::Integrity(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

fn input(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn load(path: &Path) -> Result<(SeedFile, QuantumSeed), Failure> {
    let file = SeedFile::parse(&read_text(path)?)?;
    let seed = file.to_seed()?;
    Ok((file, seed))
}

fn parse_word(s: &str, n: usize) -> Result<MutationWord, Failure> {
    let word: MutationWord = s.parse().map_err(input)?;
    word.check_range(n).map_err(|_| input(format!("word {s:?} has an index outside 1..={n}")))?;
    Ok(word)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| input(format!("cannot write {}: {e}", path.display())))
}

fn check_compat(path: &Path) -> Result<u8, Failure> {
    let file = SeedFile::parse(&read_text(path)?)?;
    let b = qcluster::IntMatrix::from_rows(&file.b).map_err(input)?;
    let lambda = qcluster::IntMatrix::from_rows(&file.lambda).map_err(input)?;
    let d = check_compatible(&b, &lambda).map_err(input)?;
    file.to_seed()?;
    println!("D = {d}");
    Ok(0)
}

fn mutate(path: &Path, word: &str, out: Option<&Path>) -> Result<u8, Failure> {
    let (file, seed) = load(path)?;
    let word = parse_word(word, seed.n())?;
    let result = seed.mutate_word(word.letters())?;
    for (i, v) in result.vars().iter().enumerate() {
        println!("X{} = {v}", i + 1);
    }
    if let Some(out) = out {
        let mut saved = SeedFile::from_seed(&result);
        saved.name = file.name;
        save_seed(out, &saved)?;
    }
    Ok(0)
}

fn exit_for(report: &ExplorationReport) -> u8 {
    if report.has_counterexamples() {
        EXIT_COUNTEREXAMPLE
    } else if !report.complete {
        EXIT_INCOMPLETE
    } else {
        0
    }
}

fn explore_cmd(path: &Path, opts: ExploreOptions, matrix_only: bool, report_path: Option<&Path>) -> Result<u8, Failure> {
    let report = if matrix_only {
        let file = SeedFile::parse(&read_text(path)?)?;
        let b = qcluster::IntMatrix::from_rows(&file.b).map_err(input)?;
        check_total_sign_coherence(&b, &opts)?
    } else {
        let (_, seed) = load(path)?;
        explore(&seed, &opts)?
    };
    let json = report.to_json();
    match report_path {
        Some(p) => {
            write_file(p, &(json + "\n"))?;
            println!(
                "{} distinct seeds, {} nodes, {} counterexamples{}",
                report.distinct_seeds,
                report.nodes_visited,
                report.counterexamples.len(),
                if report.complete { "" } else { " (budget exhausted)" }
            );
        }
        None => println!("{json}"),
    }
    Ok(exit_for(&report))
}

fn duplicate(path: &Path, out: &Path) -> Result<u8, Failure> {
    let (file, seed) = load(path)?;
    let dup = duplicate_seed(&seed)?;
    let mut saved = SeedFile::from_seed(dup.seed());
    saved.name = file.name.map(|n| format!("{n} (duplicated)"));
    save_seed(out, &saved)?;
    println!("m = {}, n = {}, D = {}", dup.seed().m(), dup.seed().n(), dup.seed().d());
    Ok(0)
}

fn lambda_from_bcd_cmd(path: &Path) -> Result<u8, Failure> {
    let bcd = BcdFile::parse(&read_text(path)?)?;
    let lambda = lambda_from_bcd(&bcd.b()?, &bcd.c()?, &bcd.d()?).map_err(input)?;
    let json = serde_json::to_string(&rational_rows(&lambda)).expect("strings always serialize");
    println!("{json}");
    Ok(0)
}

fn centralizer(path: &Path) -> Result<u8, Failure> {
    let (_, seed) = load(path)?;
    let report = centralizer_report(seed.lambda(), seed.n()).map_err(input)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("reports always serialize"));
    Ok(0)
}

fn periodicity(path: &Path, word: &str) -> Result<u8, Failure> {
    let (_, seed) = load(path)?;
    let word = parse_word(word, seed.n())?;
    let p = periodicity_scan(&seed, &word)?;
    let json = serde_json::json!({
        "word": word,
        "returnsToStart": p.returns_to_start,
        "upToPermutation": p.up_to_permutation,
        "permutation": p.permutation.map(|s| s.into_iter().map(|i| i + 1).collect::<Vec<_>>()),
    });
    println!("{}", serde_json::to_string_pretty(&json).expect("values always serialize"));
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::CheckCompat { path } => check_compat(&path),
        Command::Mutate { path, word, out } => mutate(&path, &word, out.as_deref()),
        Command::Explore { path, depth, matrix_only, budget, report, jobs, no_classical, up_to_permutation } => {
            let mut opts = ExploreOptions::new(depth).budget(budget).classical(!no_classical).up_to_permutation(up_to_permutation);
            opts.jobs = jobs;
            explore_cmd(&path, opts, matrix_only, report.as_deref())
        }
        Command::Duplicate { path, out } => duplicate(&path, &out),
        Command::LambdaFromBcd { path } => lambda_from_bcd_cmd(&path),
        Command::Centralizer { path } => centralizer(&path),
        Command::Periodicity { path, word } => periodicity(&path, &word),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match &f {
                Failure::Input(msg) => eprintln!("error: {msg}"),
                Failure::Integrity(msg) => eprintln!("integrity error: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}
