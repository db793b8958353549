//! `veronese`: predictions, certificates, Betti oracle and validation sweeps
//! for Veronese embeddings of weighted projective spaces.
//!
//! Exit codes: 0 success, 1 hard failure, 2 usage or config error,
//! 3 resource limit or cache integrity error.

mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use veronese_syzygy::harness::{
    load_or_compute, sweep, validate, Cache, SweepConfig, ValidateOptions,
};
use veronese_syzygy::koszul::{OracleOptions, PrimeField, DEFAULT_MAX_CELL, DEFAULT_PRIME};
use veronese_syzygy::predictions::{
    back_shape, certify, front_shape, prediction_table, Certificate,
};
use veronese_syzygy::weighted_ring::variable_names;
use veronese_syzygy::{Error, ErrorKind, QuotientModule, VeroneseModel, Weights};

#[derive(Parser)]
#[command(
    name = "veronese",
    version,
    about = "Nonvanishing syzygies of Veronese embeddings of P(1^n,2)"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    M2,
    Json,
    Csv,
}

#[derive(clap::Args)]
struct OracleArgs {
    /// Comma-separated weights of the variables.
    #[arg(long, default_value = "1,1,2")]
    weights: String,
    #[arg(long)]
    d: u32,
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    /// Largest strand dimension computed.
    #[arg(long, default_value_t = DEFAULT_MAX_CELL)]
    max_cell: u64,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, env = "VERONESE_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form column ranges `[F_q, B_q]` for P(1^n,2).
    Predict {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value = "m2")]
        format: Format,
    },
    /// Divisor and annihilator sets of a monomial, or the certificates of a row.
    #[command(group(ArgGroup::new("target").required(true).args(["monomial", "row"])))]
    Certify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: u32,
        /// Exponents in variable order x0,...,x{n-1},y.
        #[arg(long)]
        monomial: Option<String>,
        #[arg(long)]
        row: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Betti table of the Artinian reduction over GF(p).
    Betti {
        #[command(flatten)]
        oracle: OracleArgs,
        #[arg(long, value_enum, default_value = "m2")]
        format: Format,
    },
    /// Compare predictions with the oracle for one instance.
    Validate {
        #[command(flatten)]
        oracle: OracleArgs,
        /// Skip the witness search for cells over the cap.
        #[arg(long)]
        no_witness: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Validate a grid of instances (the default grid without --config).
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, env = "VERONESE_CACHE_DIR")]
        cache_dir: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Lib(Error),
    Exit(u8, String),
}

fn usage(msg: String) -> Failure {
    Failure::Exit(2, format!("error: {msg}"))
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = Result<(), Failure>;

fn code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Usage => 2,
        ErrorKind::Resource | ErrorKind::Integrity | ErrorKind::Io => 3,
        ErrorKind::Invariant => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Predict { n, d, format } => cmd_predict(n, d, format),
        Cmd::Certify {
            n,
            d,
            monomial,
            row,
            json,
        } => cmd_certify(n, d, monomial, row, json),
        Cmd::Betti { oracle, format } => cmd_betti(&oracle, format),
        Cmd::Validate {
            oracle,
            no_witness,
            output,
        } => cmd_validate(&oracle, !no_witness, output.as_deref()),
        Cmd::Sweep {
            config,
            cache_dir,
            threads,
            output,
        } => cmd_sweep(config.as_deref(), cache_dir, threads, output.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(code(e.kind()))
        }
        Err(Failure::Exit(c, msg)) => {
            eprintln!("{msg}");
            ExitCode::from(c)
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn emit(text: &str, output: Option<&Path>) -> CmdResult {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Lib(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_predict(n: usize, d: u32, format: Format) -> CmdResult {
    if n < 2 {
        return Err(usage(format!("n = {n}: predictions need n > 1")));
    }
    let table = prediction_table(&VeroneseModel::one_n_two(n, d)?)?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    let text = match format {
        Format::M2 => render::predictions_text(&table),
        Format::Json => json(&table),
        Format::Csv => render::predictions_csv(&table),
    };
    emit(&text, None)
}

#[derive(Serialize)]
struct LabeledCertificate {
    label: &'static str,
    #[serde(flatten)]
    certificate: Option<Certificate>,
    error: Option<String>,
}

fn cmd_certify(
    n: usize,
    d: u32,
    monomial: Option<String>,
    row: Option<u32>,
    as_json: bool,
) -> CmdResult {
    if n < 2 {
        return Err(usage(format!("n = {n}: certificates need n > 1")));
    }
    let model = VeroneseModel::one_n_two(n, d)?;
    let qm = QuotientModule::new(model.clone());
    let names = variable_names(model.weights());
    let mut found: Vec<LabeledCertificate> = Vec::new();
    if let Some(s) = monomial {
        let m = render::parse_exponents(&s).map_err(usage)?;
        found.push(LabeledCertificate {
            label: "",
            certificate: Some(certify(&qm, &m)?),
            error: None,
        });
    } else if let Some(q) = row {
        for (label, shape) in [
            ("front", front_shape(&model, q)),
            ("back", back_shape(&model, q)),
        ] {
            let entry = match shape.and_then(|m| certify(&qm, &m)) {
                Ok(c) => LabeledCertificate {
                    label,
                    certificate: Some(c),
                    error: None,
                },
                Err(e @ Error::RowOutOfRange { .. }) => return Err(e.into()),
                Err(e) => LabeledCertificate {
                    label,
                    certificate: None,
                    error: Some(e.to_string()),
                },
            };
            found.push(entry);
        }
    }
    if as_json {
        return emit(&json(&found), None);
    }
    let mut text = String::new();
    for c in &found {
        let label = if c.label.is_empty() {
            String::new()
        } else {
            format!("{}: ", c.label)
        };
        match (&c.certificate, &c.error) {
            (Some(cert), _) => {
                text += &render::certificate_text(&label, cert, qm.generators(), &names)
            }
            (None, Some(e)) => text += &format!("{label}undefined ({e})\n"),
            (None, None) => {}
        }
    }
    emit(&text, None)
}

fn model_of(
    o: &OracleArgs,
) -> Result<(VeroneseModel, PrimeField, OracleOptions, Option<Cache>), Failure> {
    let weights: Vec<u32> = o
        .weights
        .split(',')
        .map(|w| w.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("bad --weights {:?}: {e}", o.weights)))?;
    if o.threads == Some(0) {
        return Err(usage("--threads must be positive".into()));
    }
    let model = VeroneseModel::new(Weights::new(weights)?, o.d)?;
    let field = PrimeField::new(o.prime)?;
    let opts = OracleOptions {
        max_cell: o.max_cell,
        threads: o.threads,
        ..OracleOptions::default()
    };
    let cache = o.cache_dir.as_ref().map(Cache::new).transpose()?;
    Ok((model, field, opts, cache))
}

fn cmd_betti(o: &OracleArgs, format: Format) -> CmdResult {
    let (model, field, opts, cache) = model_of(o)?;
    let (entry, hit) = load_or_compute(&model, &field, &opts, cache.as_ref())?;
    if let (Some(c), false) = (&cache, hit) {
        c.store(entry.clone())?;
    }
    let table = entry.table();
    let text = match format {
        Format::M2 => render::betti_m2(&table),
        Format::Json => json(&table),
        Format::Csv => render::betti_csv(&table),
    };
    emit(&text, None)?;
    match table.incomplete_cells.first() {
        None => Ok(()),
        Some(c) => Err(Error::Resource {
            i: c.i,
            t: c.t,
            dim: c.dim,
            cap: opts.max_cell,
        }
        .into()),
    }
}

fn cmd_validate(o: &OracleArgs, witness: bool, output: Option<&Path>) -> CmdResult {
    let (model, field, oracle, cache) = model_of(o)?;
    let opts = ValidateOptions {
        oracle,
        witness,
        witness_limit: oracle.max_cell,
    };
    let v = validate(&model, &field, &opts, cache.as_ref())?;
    emit(&json(&v.report), output)?;
    for w in &v.report.warnings {
        eprintln!("warning: {w}");
    }
    if v.report.passed() {
        Ok(())
    } else {
        Err(Failure::Exit(
            1,
            format!("hard failures at (i, q): {:?}", v.report.hard_failures),
        ))
    }
}

fn cmd_sweep(
    config: Option<&Path>,
    cache_dir: Option<PathBuf>,
    threads: Option<usize>,
    output: Option<&Path>,
) -> CmdResult {
    let mut cfg = match config {
        Some(p) => SweepConfig::load(p)?,
        None => SweepConfig::default_grid(),
    };
    if cache_dir.is_some() {
        cfg.cache_dir = cache_dir;
    }
    if threads.is_some() {
        cfg.threads = threads;
    }
    let (report, stats) = sweep(&cfg)?;
    emit(&json(&report), output)?;
    let s = &report.summary;
    eprintln!(
        "{} instances, {} errors, {} hard failures, sharp rows {}/{} ({} unknown); {} oracle runs, {} cache hits, {} ms",
        s.instances,
        s.errors,
        s.hard_failures,
        s.rows_sharp,
        s.rows_sharp + s.rows_not_sharp + s.rows_unknown,
        s.rows_unknown,
        stats.oracle_invocations,
        stats.cache_hits,
        stats.elapsed_ms
    );
    let mut worst = None;
    for o in &report.outcomes {
        if let (Some(e), Some(k)) = (&o.error, o.error_kind) {
            eprintln!("error in {}: {e}", o.key);
            let rank = |c: u8| if c == 1 { 0 } else { c };
            if worst.map_or(true, |w| rank(code(k)) > rank(w)) {
                worst = Some(code(k));
            }
        }
    }
    if let Some(c) = worst {
        return Err(Failure::Exit(c, format!("{} instances failed", s.errors)));
    }
    if s.hard_failures > 0 {
        return Err(Failure::Exit(
            1,
            format!("{} hard failures", s.hard_failures),
        ));
    }
    Ok(())
}
