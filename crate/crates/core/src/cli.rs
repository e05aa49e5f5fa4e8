//! The `vdatalog` command line.
//!
//! ```text
//! vdatalog program.dl -F facts/ -D out/ --fm fm.pc [--stats] [--check] ...
//! ```
//!
//! Input relations are read from `<F>/<Relation>.facts`, output relations are
//! written to `<D>/<Relation>.csv`. Exit status is 0 on success, 1 when
//! `--check` finds a counterexample, 2 on any error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;

use crate::engine::{infer, post_prune, Database, EngineConfig, Stats};
use crate::error::Error;
use crate::facts_io::{load_records, read_facts, write_facts, WriteMode};
use crate::oracle::{check_theorem1, Verdict, DEFAULT_MAX_CONFIGURATIONS};
use crate::pcbdd::{BddManager, PresenceCondition};
use crate::syntax::{parse_pc, parse_program, pc_to_bdd, register_features};

#[derive(Debug, Clone, Parser)]
#[command(
    name = "vdatalog",
    version,
    about = "Datalog over facts annotated with presence conditions"
)]
pub struct RunOptions {
    /// Datalog program.
    pub program: PathBuf,
    /// Directory holding `<Relation>.facts` for every input relation.
    #[arg(short = 'F', long = "facts", default_value = ".")]
    pub fact_dir: PathBuf,
    /// Directory receiving `<Relation>.csv` for every output relation.
    #[arg(short = 'D', long = "output", default_value = "output")]
    pub output_dir: PathBuf,
    /// File containing the feature model as a presence condition. Defaults to `True`.
    #[arg(long = "fm")]
    pub feature_model: Option<PathBuf>,
    /// Field delimiter of fact files: a single character, or `tab`.
    #[arg(long, default_value = "tab", value_parser = parse_delimiter)]
    pub delimiter: char,
    /// Skip the per-derivation satisfiability check.
    #[arg(long)]
    pub no_sat_check: bool,
    /// With --no-sat-check, keep tuples that exist in no valid configuration.
    #[arg(long)]
    pub no_post_prune: bool,
    /// Store presence conditions conjoined with the feature model.
    #[arg(long)]
    pub conjoin_fm: bool,
    /// Compare the lifted result with a plain run per valid configuration
    /// instead of writing outputs.
    #[arg(long)]
    pub check: bool,
    /// Largest number of configurations --check will enumerate.
    #[arg(long, default_value_t = DEFAULT_MAX_CONFIGURATIONS)]
    pub max_configurations: usize,
    /// Print timing and size statistics to standard error.
    #[arg(long)]
    pub stats: bool,
    /// Drop every presence condition and the feature model.
    #[arg(long)]
    pub ignore_pcs: bool,
    /// Write the BDD node table to this file after inference.
    #[arg(long)]
    pub dump_bdd: Option<PathBuf>,
    /// Allow the fact and output directories to be the same.
    #[arg(long)]
    pub allow_same_dir: bool,
}

fn parse_delimiter(s: &str) -> Result<char, String> {
    match s {
        "tab" | "\\t" | "\t" => Ok('\t'),
        _ => {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if c != '\n' && c != '\r' && c != '"' && c != '@' => Ok(c),
                _ => Err(format!("expected a single character or `tab`, got {s:?}")),
            }
        }
    }
}

/// What a successful run did.
#[derive(Debug, Clone)]
pub struct Report {
    /// Set in check mode.
    pub verdict: Option<Verdict>,
    /// Output relations with their file and tuple count.
    pub outputs: Vec<(String, PathBuf, usize)>,
    pub stats: Stats,
    pub elapsed: Duration,
    pub bytes_written: u64,
}

impl Report {
    /// The `--stats` text: one summary line, then one line per output
    /// relation and the BDD node count.
    pub fn stats_text(&self) -> String {
        let mut s = format!(
            "time_ms={} db_bytes={} iterations={} sat_checks={}\n",
            self.elapsed.as_millis(),
            self.bytes_written,
            self.stats.iterations,
            self.stats.sat_checks
        );
        for (name, _, n) in &self.outputs {
            s.push_str(&format!("relation={name} tuples={n}\n"));
        }
        s.push_str(&format!("bdd_nodes={}\n", self.stats.bdd_nodes));
        s
    }
}

/// Parses a feature model file into `mgr`.
pub fn load_feature_model(path: &Path, mgr: &mut BddManager) -> Result<PresenceCondition, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let expr = parse_pc(&text).map_err(|source| Error::Parse {
        path: path.to_owned(),
        source,
    })?;
    Ok(pc_to_bdd(&expr, mgr))
}

fn same_directory(a: &Path, b: &Path) -> bool {
    match (fs::canonicalize(a), fs::canonicalize(b)) {
        (Ok(x), Ok(y)) => x == y,
        _ => a == b,
    }
}

/// Executes one run. Nothing is printed; see [`main`].
pub fn run(opts: &RunOptions) -> Result<Report, Error> {
    let started = Instant::now();
    let text = fs::read_to_string(&opts.program).map_err(|source| Error::Io {
        path: opts.program.clone(),
        source,
    })?;
    let mut program = parse_program(&text).map_err(|source| Error::Parse {
        path: opts.program.clone(),
        source,
    })?;
    if opts.ignore_pcs {
        program = program.without_pcs();
    }
    if !opts.check && !opts.allow_same_dir && same_directory(&opts.fact_dir, &opts.output_dir) {
        return Err(Error::Usage(format!(
            "fact directory and output directory are both {}; pass --allow-same-dir to permit this",
            opts.fact_dir.display()
        )));
    }

    let mut mgr = BddManager::new();
    register_features(&program, &mut mgr);
    let fm = match &opts.feature_model {
        Some(path) if !opts.ignore_pcs => load_feature_model(path, &mut mgr)?,
        _ => mgr.pc_true(),
    };

    let mut db = Database::for_program(&program);
    for decl in program.inputs() {
        let path = opts.fact_dir.join(format!("{}.facts", decl.name));
        let records = read_facts(&path, decl, opts.delimiter)?;
        load_records(&mut db, &decl.name, &records, opts.ignore_pcs, &mut mgr)?;
    }
    let config = EngineConfig::new(&mgr)
        .with_feature_model(fm)
        .with_sat_pruning(!opts.no_sat_check)
        .with_conjoined_fm(opts.conjoin_fm);

    if opts.check {
        let verdict = check_theorem1(&program, &db, &config, &mut mgr, opts.max_configurations)?;
        return Ok(Report {
            verdict: Some(verdict),
            outputs: Vec::new(),
            stats: Stats::default(),
            elapsed: started.elapsed(),
            bytes_written: 0,
        });
    }

    let inference = infer(&program, db, &config, &mut mgr)?;
    let mut database = inference.database;
    if opts.no_sat_check && !opts.no_post_prune {
        database = post_prune(database, fm, &mut mgr);
    }

    let mode = if opts.ignore_pcs {
        WriteMode::Plain
    } else {
        WriteMode::WithPcs
    };
    let mut outputs = Vec::new();
    let mut bytes_written = 0;
    for decl in program.outputs() {
        let path = opts.output_dir.join(format!("{}.csv", decl.name));
        bytes_written += write_facts(&path, &database, &decl.name, mode, opts.delimiter, &mgr)?;
        let n = database.relation(&decl.name).map_or(0, |r| r.len());
        outputs.push((decl.name.clone(), path, n));
    }
    if let Some(path) = &opts.dump_bdd {
        let io_err = |source| Error::Io {
            path: path.clone(),
            source,
        };
        let mut file = io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
        mgr.dump(&mut file)
            .and_then(|_| file.flush())
            .map_err(io_err)?;
    }
    let mut stats = inference.stats;
    stats.bdd_nodes = mgr.node_count();
    Ok(Report {
        verdict: None,
        outputs,
        stats,
        elapsed: started.elapsed(),
        bytes_written,
    })
}

/// Parses the process arguments, runs, and reports.
pub fn main() -> ExitCode {
    let opts = RunOptions::parse();
    match run(&opts) {
        Ok(report) => {
            if opts.stats {
                eprint!("{}", report.stats_text());
            }
            match report.verdict {
                Some(Verdict::Pass { configurations }) => {
                    println!("pass: {configurations} configurations checked");
                    ExitCode::SUCCESS
                }
                Some(Verdict::Counterexample(c)) => {
                    print!("{}", c.report());
                    ExitCode::from(1)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("vdatalog: {e}");
            ExitCode::from(2)
        }
    }
}
