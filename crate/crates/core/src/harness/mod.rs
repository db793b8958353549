//! Validation of predicted nonvanishing ranges against the oracle, and sweeps
//! over grids of instances with an on-disk cache.

mod cache;
mod witness;

use std::path::{Path, PathBuf};
use std::time::Instant;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

pub use cache::{cache_key, Cache, CacheEntry, Timings, SCHEMA_VERSION};
pub use witness::{find_witness, Witness};

use crate::error::{Error, ErrorKind, Result};
use crate::koszul::{
    betti_table, BettiTable, KoszulContext, OracleChecks, OracleOptions, PrimeField, DEFAULT_PRIME,
};
use crate::predictions::{asymptotic_threshold, prediction_table, rho, PredictionTable};
use crate::veronese_model::{bottom_row_index, QuotientModule, VeroneseModel};
use crate::weighted_ring::Weights;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateOptions {
    pub oracle: OracleOptions,
    /// Look for single-degree witnesses in predicted cells the oracle skipped.
    pub witness: bool,
    /// Largest block (sizes `i` and `i + 1` together) a witness may use.
    pub witness_limit: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            oracle: OracleOptions::default(),
            witness: true,
            witness_limit: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowReport {
    pub q: u32,
    /// `(F_q, B_q)`, absent for weights without closed forms.
    pub predicted: Option<(i64, i64)>,
    /// First and last nonzero column among computed cells.
    pub observed: Option<(u32, u32)>,
    pub observed_nonzero: u32,
    /// `None` if some predicted cell is neither computed nor witnessed.
    pub all_predicted_nonzero: Option<bool>,
    /// Predicted columns the oracle found to be zero.
    pub zero_cells: Vec<u32>,
    pub witnessed_cells: Vec<u32>,
    pub unverified_cells: Vec<u32>,
    pub sharp_left: Option<bool>,
    pub sharp_right: Option<bool>,
    pub rho_predicted: Option<String>,
    /// Only when every cell of the row was computed.
    pub rho_observed: Option<String>,
}

impl RowReport {
    pub fn sharp(&self) -> Option<bool> {
        match (self.sharp_left, self.sharp_right) {
            (Some(false), _) | (_, Some(false)) => Some(false),
            (Some(true), Some(true)) => Some(true),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub key: String,
    pub weights: Vec<u32>,
    pub d: u32,
    pub prime: u64,
    pub n: Option<usize>,
    /// `d >= n + 2`: a zero predicted cell counts as a hard failure.
    pub hard_check_applies: bool,
    /// `d >= 2n + 4`.
    pub above_threshold: bool,
    pub rows: Vec<RowReport>,
    /// `(i, q)` of predicted cells observed to vanish, when the check applies.
    pub hard_failures: Vec<(u32, u32)>,
    /// A hard failure at `d >= 2n + 4`.
    pub contradiction: bool,
    pub observed_pdim: u32,
    pub expected_pdim: u32,
    pub pdim_match: Option<bool>,
    pub observed_max_row: u32,
    pub expected_bottom_row: Option<u32>,
    pub row_count_match: Option<bool>,
    pub complete: bool,
    pub incomplete_cells: usize,
    pub checks: OracleChecks,
    pub witnesses: Vec<Witness>,
    pub warnings: Vec<String>,
    pub timings: Timings,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.hard_failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub report: ValidationReport,
    pub table: BettiTable,
    pub cache_hit: bool,
    pub oracle_invoked: bool,
}

/// Runs (or loads) the oracle table, searches witnesses for skipped predicted
/// cells, and compares against the predictions when they exist.
pub fn validate(
    model: &VeroneseModel,
    field: &PrimeField,
    opts: &ValidateOptions,
    cache: Option<&Cache>,
) -> Result<Validation> {
    let qm = QuotientModule::new(model.clone());
    let (mut entry, cache_hit) = load_or_compute(model, field, &opts.oracle, cache)?;
    let mut dirty = !cache_hit;
    let table = entry.table();
    let predictions = prediction_table(model).ok();

    if let (Some(pred), true) = (&predictions, opts.witness) {
        let pending: Vec<(u32, u32)> = predicted_cells(pred, table.num_generators)
            .filter(|&(i, q)| table.is_incomplete(i, q))
            .filter(|&(i, q)| !entry.witnesses.iter().any(|w| w.i == i && w.q == q))
            .collect();
        if !pending.is_empty() {
            let ctx = KoszulContext::new(&qm)?;
            for (i, q) in pending {
                if let Some(w) = find_witness(&qm, &ctx, i, q, field, opts.witness_limit)? {
                    entry.witnesses.push(w);
                    dirty = true;
                }
            }
            entry.witnesses.sort_by_key(|w| (w.q, w.i));
        }
    }
    if let (Some(c), true) = (cache, dirty) {
        entry = c.store(entry)?;
    }
    let report = build_report(model, &table, predictions.as_ref(), &entry);
    Ok(Validation {
        report,
        table,
        cache_hit,
        oracle_invoked: !cache_hit,
    })
}

/// The cached oracle table for `(model, p)` if one exists with at least the
/// requested cap (or is complete), otherwise a fresh oracle run. A fresh entry
/// is returned unsealed and not yet stored.
pub fn load_or_compute(
    model: &VeroneseModel,
    field: &PrimeField,
    opts: &OracleOptions,
    cache: Option<&Cache>,
) -> Result<(CacheEntry, bool)> {
    let key = cache_key(model.weights().degrees(), model.d(), field.p());
    let cached = match cache {
        Some(c) => c
            .load(&key)?
            .filter(|e| e.complete || e.max_cell >= opts.max_cell),
        None => None,
    };
    if let Some(e) = cached {
        return Ok((e, true));
    }
    let start = Instant::now();
    let table = betti_table(&QuotientModule::new(model.clone()), field, opts)?;
    let oracle_ms = start.elapsed().as_millis() as u64;
    Ok((
        CacheEntry::new(&table, opts.max_cell, Vec::new(), Timings { oracle_ms }),
        false,
    ))
}

fn predicted_cells(pred: &PredictionTable, g: u32) -> impl Iterator<Item = (u32, u32)> + '_ {
    pred.rows.iter().flat_map(move |r| {
        let (f, b) = bounds(r.f.to_i64(), r.b.to_i64(), g);
        (f..=b).map(move |i| (i, r.q))
    })
}

/// Predicted columns clipped to `0..=g + 1`; anything past `g` is zero anyway.
fn bounds(f: Option<i64>, b: Option<i64>, g: u32) -> (u32, u32) {
    let f = f.unwrap_or(i64::MAX).max(0);
    let b = b.unwrap_or(i64::MAX).min(g as i64 + 1);
    if f > b {
        (1, 0)
    } else {
        (f as u32, b as u32)
    }
}

fn build_report(
    model: &VeroneseModel,
    table: &BettiTable,
    pred: Option<&PredictionTable>,
    entry: &CacheEntry,
) -> ValidationReport {
    let g = table.num_generators;
    let n = model.n();
    let hard_check_applies = pred.is_some() && n.is_some_and(|n| model.d() as usize >= n + 2);
    let above_threshold = n.is_some_and(|n| model.d() >= asymptotic_threshold(n));
    let last_row = pred.and_then(|p| p.rows.last().map(|r| r.q)).unwrap_or(0);
    let top = table.max_row().max(last_row).max(
        table
            .incomplete_cells
            .iter()
            .map(|c| c.t - c.i)
            .max()
            .unwrap_or(0),
    );
    let witnessed = |i: u32, q: u32| {
        entry
            .witnesses
            .iter()
            .any(|w| w.i == i && w.q == q && w.beta > 0)
    };

    let mut rows = Vec::new();
    let mut hard_failures = Vec::new();
    for q in 0..=top {
        let row_incomplete = (0..=g).any(|i| table.is_incomplete(i, q));
        let nonzero: Vec<u32> = table.row(q).iter().map(|e| e.0).collect();
        let mut r = RowReport {
            q,
            predicted: None,
            observed: nonzero.first().map(|&a| (a, *nonzero.last().unwrap())),
            observed_nonzero: nonzero.len() as u32,
            all_predicted_nonzero: None,
            zero_cells: Vec::new(),
            witnessed_cells: Vec::new(),
            unverified_cells: Vec::new(),
            sharp_left: None,
            sharp_right: None,
            rho_predicted: None,
            rho_observed: (!row_incomplete).then(|| rho(table, q).to_string()),
        };
        if let Some(range) = pred.and_then(|p| p.row(q)) {
            let (fi, bi) = (range.f.to_i64(), range.b.to_i64());
            r.predicted = fi.zip(bi);
            r.rho_predicted = Some(rho(pred.unwrap(), q).to_string());
            let (f, b) = bounds(fi, bi, g);
            for i in f..=b {
                if table.at(i, q) > 0 {
                    continue;
                }
                if table.is_incomplete(i, q) {
                    if witnessed(i, q) {
                        r.witnessed_cells.push(i);
                    } else {
                        r.unverified_cells.push(i);
                    }
                } else {
                    r.zero_cells.push(i);
                    if hard_check_applies {
                        hard_failures.push((i, q));
                    }
                }
            }
            r.all_predicted_nonzero = if !r.zero_cells.is_empty() {
                Some(false)
            } else if r.unverified_cells.is_empty() {
                Some(true)
            } else {
                None
            };
            if f <= b {
                let edge_ok = |i: u32| table.at(i, q) > 0 || witnessed(i, q);
                let outside = |lo: u32, hi: u32| -> Option<bool> {
                    if (lo..hi).any(|i| table.at(i, q) > 0) {
                        Some(false)
                    } else if (lo..hi).any(|i| table.is_incomplete(i, q)) {
                        None
                    } else {
                        Some(true)
                    }
                };
                r.sharp_left = match (edge_ok(f), outside(0, f)) {
                    (_, Some(false)) => Some(false),
                    (false, _) if !table.is_incomplete(f, q) => Some(false),
                    (true, Some(true)) => Some(true),
                    _ => None,
                };
                r.sharp_right = match (edge_ok(b), outside(b + 1, g + 1)) {
                    (_, Some(false)) => Some(false),
                    (false, _) if !table.is_incomplete(b, q) => Some(false),
                    (true, Some(true)) => Some(true),
                    _ => None,
                };
            }
        }
        rows.push(r);
    }

    let observed_pdim = table.pdim();
    let observed_max_row = table.max_row();
    let pdim_match = if table.complete || observed_pdim == g {
        Some(observed_pdim == g)
    } else {
        None
    };
    let expected_bottom_row = bottom_row_index(model).ok();
    let row_count_match = expected_bottom_row.and_then(|e| {
        let undecided = table
            .incomplete_cells
            .iter()
            .any(|c| c.t - c.i > observed_max_row);
        (!undecided).then_some(observed_max_row == e)
    });
    let mut warnings = pred.map(|p| p.warnings.clone()).unwrap_or_default();
    if pred.is_none() {
        warnings.push("no closed-form predictions for these weights; oracle only".into());
    } else if !hard_check_applies {
        warnings.push(format!(
            "d = {} < n + 2: zero predicted cells are not failures",
            model.d()
        ));
    }
    ValidationReport {
        key: entry.key.clone(),
        weights: table.weights.clone(),
        d: table.d,
        prime: table.prime,
        n,
        hard_check_applies,
        above_threshold,
        rows,
        contradiction: above_threshold && !hard_failures.is_empty(),
        hard_failures,
        observed_pdim,
        expected_pdim: g,
        pdim_match,
        observed_max_row,
        expected_bottom_row,
        row_count_match,
        complete: table.complete,
        incomplete_cells: table.incomplete_cells.len(),
        checks: table.checks.clone(),
        witnesses: entry.witnesses.clone(),
        warnings,
        timings: entry.timings.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub weights: Vec<u32>,
    pub d: u32,
    /// Overrides the sweep-wide cap for this instance.
    #[serde(default)]
    pub max_cell: Option<u64>,
    /// Incomplete cells are expected and reported as unknown.
    #[serde(default)]
    pub best_effort: bool,
}

fn default_primes() -> Vec<u64> {
    vec![DEFAULT_PRIME]
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub instances: Vec<InstanceSpec>,
    #[serde(default = "default_primes")]
    pub primes: Vec<u64>,
    #[serde(default)]
    pub max_cell: Option<u64>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "yes")]
    pub witness: bool,
}

impl SweepConfig {
    /// `P(1,1,2)` for `d` in 3..7 and 9, `P(1,1,1,2)` at `d = 3`, `P(1,1,3)` at `d = 5`.
    pub fn default_grid() -> Self {
        let mut instances: Vec<InstanceSpec> = [3, 4, 5, 6, 7]
            .into_iter()
            .map(|d| InstanceSpec {
                weights: vec![1, 1, 2],
                d,
                max_cell: None,
                best_effort: false,
            })
            .collect();
        instances.push(InstanceSpec {
            weights: vec![1, 1, 2],
            d: 9,
            max_cell: Some(2_000_000),
            best_effort: true,
        });
        instances.push(InstanceSpec {
            weights: vec![1, 1, 1, 2],
            d: 3,
            max_cell: None,
            best_effort: false,
        });
        instances.push(InstanceSpec {
            weights: vec![1, 1, 3],
            d: 5,
            max_cell: None,
            best_effort: false,
        });
        SweepConfig {
            instances,
            primes: default_primes(),
            max_cell: None,
            cache_dir: None,
            threads: None,
            witness: true,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.primes.is_empty() {
            return Err(Error::Config("no primes".into()));
        }
        for &p in &cfg.primes {
            PrimeField::new(p)?;
        }
        if cfg.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceOutcome {
    pub key: String,
    pub best_effort: bool,
    pub report: Option<ValidationReport>,
    pub error: Option<String>,
    pub error_kind: Option<ErrorKind>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub instances: usize,
    pub succeeded: usize,
    pub errors: usize,
    pub integrity_errors: usize,
    pub hard_failure_instances: usize,
    pub hard_failures: usize,
    pub contradictions: usize,
    pub exempt_instances: usize,
    pub incomplete_instances: usize,
    pub rows_sharp: usize,
    pub rows_not_sharp: usize,
    pub rows_unknown: usize,
    pub witnessed_cells: usize,
    pub unverified_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub outcomes: Vec<InstanceOutcome>,
    pub summary: SweepSummary,
}

/// Counters that differ between a cold and a warm cache.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub oracle_invocations: usize,
    pub cache_hits: usize,
    pub elapsed_ms: u64,
}

/// Validates every `(instance, prime)` pair in config order. A failing
/// instance is recorded and does not stop the others.
pub fn sweep(cfg: &SweepConfig) -> Result<(SweepReport, RunStats)> {
    let start = Instant::now();
    let cache = cfg.cache_dir.as_ref().map(Cache::new).transpose()?;
    let mut outcomes = Vec::new();
    let mut stats = RunStats::default();
    for inst in &cfg.instances {
        for &p in &cfg.primes {
            let key = cache_key(&inst.weights, inst.d, p);
            let result = (|| {
                let model = VeroneseModel::new(Weights::new(inst.weights.clone())?, inst.d)?;
                let field = PrimeField::new(p)?;
                let max_cell = inst
                    .max_cell
                    .or(cfg.max_cell)
                    .unwrap_or(OracleOptions::default().max_cell);
                let opts = ValidateOptions {
                    oracle: OracleOptions {
                        max_cell,
                        threads: cfg.threads,
                        ..OracleOptions::default()
                    },
                    witness: cfg.witness,
                    witness_limit: max_cell,
                };
                validate(&model, &field, &opts, cache.as_ref())
            })();
            let outcome = match result {
                Ok(v) => {
                    stats.cache_hits += v.cache_hit as usize;
                    stats.oracle_invocations += v.oracle_invoked as usize;
                    InstanceOutcome {
                        key,
                        best_effort: inst.best_effort,
                        report: Some(v.report),
                        error: None,
                        error_kind: None,
                    }
                }
                Err(e) => InstanceOutcome {
                    key,
                    best_effort: inst.best_effort,
                    report: None,
                    error: Some(e.to_string()),
                    error_kind: Some(e.kind()),
                },
            };
            outcomes.push(outcome);
        }
    }
    let summary = summarize(&outcomes);
    stats.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok((SweepReport { outcomes, summary }, stats))
}

fn summarize(outcomes: &[InstanceOutcome]) -> SweepSummary {
    let mut s = SweepSummary {
        instances: outcomes.len(),
        ..SweepSummary::default()
    };
    for o in outcomes {
        let Some(r) = &o.report else {
            s.errors += 1;
            s.integrity_errors += (o.error_kind == Some(ErrorKind::Integrity)) as usize;
            continue;
        };
        s.succeeded += 1;
        s.hard_failures += r.hard_failures.len();
        s.hard_failure_instances += !r.hard_failures.is_empty() as usize;
        s.contradictions += r.contradiction as usize;
        s.exempt_instances += (r.n.is_some() && !r.hard_check_applies) as usize;
        s.incomplete_instances += !r.complete as usize;
        for row in r.rows.iter().filter(|row| row.predicted.is_some()) {
            match row.sharp() {
                Some(true) => s.rows_sharp += 1,
                Some(false) => s.rows_not_sharp += 1,
                None => s.rows_unknown += 1,
            }
            s.witnessed_cells += row.witnessed_cells.len();
            s.unverified_cells += row.unverified_cells.len();
        }
    }
    s
}
