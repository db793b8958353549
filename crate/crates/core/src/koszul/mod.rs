//! Betti numbers of `M̄` over `S̄` as homology of graded Koszul strands over `GF(p)`.
//!
//! `β_{i,t} = dim C_{i,t} - rank d_i - rank d_{i+1}` where
//! `C_{i,t} = ⊕ ∧^i(S̄ generators) ⊗ M̄` in internal degree `t`. Row `q` of the
//! table collects `β_{i,i+q}`.

mod fine;
mod rank;
mod strand;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predictions::RowCounts;
use crate::veronese_model::QuotientModule;

pub use fine::{fine_betti, fine_betti_entry, fine_block_size};
pub use rank::{rank_gfp, SparseMatrix, DENSE_CELL_LIMIT};
pub use strand::{
    koszul_differential, strand_basis, KoszulContext, StrandBasis, StrandDims, StrandElement,
};

pub const DEFAULT_PRIME: u64 = 32003;
pub const DEFAULT_MAX_CELL: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        let is_prime = p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| p % k != 0);
        if !(p > 2 && p < 1 << 31 && is_prime) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p - b as u64) % self.p) as u32
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        (a as u64 * b as u64 % self.p) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        ((self.p - a as u64) % self.p) as u32
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a as u64 % self.p;
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        r as u32
    }

    pub fn inv(&self, a: u32) -> u32 {
        assert!(a as u64 % self.p != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Largest strand dimension computed; larger cells are left incomplete.
    pub max_cell: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Fine blocks with at most this many elements get an explicit `d ∘ d = 0` check.
    pub dd_check_limit: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            max_cell: DEFAULT_MAX_CELL,
            threads: None,
            dd_check_limit: 2_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncompleteCell {
    pub i: u32,
    pub t: u32,
    pub dim: u128,
}

/// Counts of invariant checks performed while building a table.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleChecks {
    pub dd_blocks_checked: u64,
    pub euler_degrees_checked: u32,
    pub strand_counts_checked: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub weights: Vec<u32>,
    pub d: u32,
    pub prime: u64,
    pub num_generators: u32,
    /// nonzero `(i, t, β_{i,t})`, sorted
    pub entries: Vec<(u32, u32, u64)>,
    pub complete: bool,
    pub incomplete_cells: Vec<IncompleteCell>,
    pub checks: OracleChecks,
}

impl BettiTable {
    pub fn get(&self, i: u32, t: u32) -> u64 {
        self.entries
            .binary_search_by_key(&(i, t), |e| (e.0, e.1))
            .map_or(0, |k| self.entries[k].2)
    }

    /// `β_{i, i+q}`.
    pub fn at(&self, i: u32, q: u32) -> u64 {
        self.get(i, i + q)
    }

    /// Largest `i` with a nonzero entry.
    pub fn pdim(&self) -> u32 {
        self.entries.iter().map(|e| e.0).max().unwrap_or(0)
    }

    /// Largest row index `t - i` with a nonzero entry.
    pub fn max_row(&self) -> u32 {
        self.entries.iter().map(|e| e.1 - e.0).max().unwrap_or(0)
    }

    /// `(i, β_{i,i+q})` for the nonzero entries of row `q`.
    pub fn row(&self, q: u32) -> Vec<(u32, u64)> {
        self.entries
            .iter()
            .filter(|e| e.1 - e.0 == q)
            .map(|e| (e.0, e.2))
            .collect()
    }

    /// Whether `(i, i+q)` was left uncomputed.
    pub fn is_incomplete(&self, i: u32, q: u32) -> bool {
        self.incomplete_cells
            .iter()
            .any(|c| c.i == i && c.t == i + q)
    }
}

impl RowCounts for BettiTable {
    fn pdim(&self) -> BigInt {
        BigInt::from(BettiTable::pdim(self))
    }

    fn nonzero_in_row(&self, q: u32) -> BigInt {
        BigInt::from(self.row(q).len())
    }
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn table_shell(qm: &QuotientModule, ctx: &KoszulContext, field: &PrimeField) -> BettiTable {
    BettiTable {
        weights: qm.model().weights().degrees().to_vec(),
        d: qm.model().d(),
        prime: field.p(),
        num_generators: ctx.num_generators() as u32,
        entries: Vec::new(),
        complete: true,
        incomplete_cells: Vec::new(),
        checks: OracleChecks::default(),
    }
}

/// Cells whose strands `(i, t)` and `(i+1, t)` both fit under the cap.
fn plan_cells(dims: &StrandDims, cap: u64) -> (BTreeMap<u32, Vec<u32>>, Vec<IncompleteCell>) {
    let mut cells: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut incomplete = Vec::new();
    for t in 0..=dims.max_t() {
        for i in 0..=dims.max_i() {
            let dim = dims.get(i, t);
            if dim == 0 {
                continue;
            }
            let worst = dim.max(dims.get(i + 1, t));
            if worst > cap as u128 {
                incomplete.push(IncompleteCell { i, t, dim: worst });
            } else {
                cells.entry(t).or_default().push(i);
            }
        }
    }
    (cells, incomplete)
}

fn finish(
    mut table: BettiTable,
    dims: &StrandDims,
    betti: BTreeMap<(u32, u32), u64>,
    incomplete: Vec<IncompleteCell>,
) -> Result<BettiTable> {
    table.entries = betti
        .into_iter()
        .filter(|(_, b)| *b > 0)
        .map(|((i, t), b)| (i, t, b))
        .collect();
    table.complete = incomplete.is_empty();
    table.incomplete_cells = incomplete;
    if !table.is_incomplete(0, 0) && table.get(0, 0) != 1 {
        return Err(Error::Invariant(format!("beta_00 = {}", table.get(0, 0))));
    }
    if let Some(e) = table.entries.iter().find(|e| e.0 == 0 && e.1 > 0) {
        return Err(Error::Invariant(format!(
            "beta_0{} = {} but M̄ is cyclic",
            e.1, e.2
        )));
    }
    for t in 0..=dims.max_t() {
        if table.incomplete_cells.iter().any(|c| c.t == t) {
            continue;
        }
        let sign = |i: u32| if i % 2 == 0 { 1i128 } else { -1 };
        let chain: i128 = (0..=dims.max_i())
            .map(|i| sign(i) * dims.get(i, t) as i128)
            .sum();
        let homology: i128 = (0..=dims.max_i())
            .map(|i| sign(i) * table.get(i, t) as i128)
            .sum();
        if chain != homology {
            return Err(Error::Invariant(format!(
                "Euler characteristic at t={t}: {chain} != {homology}"
            )));
        }
        table.checks.euler_degrees_checked += 1;
    }
    Ok(table)
}

/// Full Betti table via the fine-graded decomposition.
pub fn betti_table(
    qm: &QuotientModule,
    field: &PrimeField,
    opts: &OracleOptions,
) -> Result<BettiTable> {
    let ctx = KoszulContext::new(qm)?;
    let dims = StrandDims::new(&ctx);
    let (cells, incomplete) = plan_cells(&dims, opts.max_cell);
    let mut table = table_shell(qm, &ctx, field);

    let results = in_pool(opts.threads, || {
        let work: Vec<(u32, Vec<u32>, u64)> = cells
            .par_iter()
            .flat_map_iter(|(&t, _)| {
                fine::representatives(&ctx, t)
                    .into_iter()
                    .map(move |(a, o)| (t, a, o))
            })
            .collect();
        work.par_iter()
            .map(|(t, alpha, orbit)| {
                let r = fine::eval_alpha(&ctx, alpha, &cells[t], field, opts.dd_check_limit);
                (*t, *orbit, r)
            })
            .collect::<Vec<_>>()
    })?;

    let mut betti: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut counts: BTreeMap<(u32, u32), u128> = BTreeMap::new();
    for (t, orbit, r) in results {
        for (i, b) in r.betti {
            *betti.entry((i, t)).or_default() += b * orbit;
        }
        for (i, c) in r.counts {
            *counts.entry((i, t)).or_default() += c as u128 * orbit as u128;
        }
        if r.dd_checked {
            if !r.dd_ok {
                return Err(Error::Invariant(format!("d∘d != 0 in a block at t={t}")));
            }
            table.checks.dd_blocks_checked += 1;
        }
    }
    for (&t, is) in &cells {
        for &i in is {
            let got = counts.get(&(i, t)).copied().unwrap_or(0);
            if got != dims.get(i, t) {
                return Err(Error::Invariant(format!(
                    "strand ({i},{t}) has {got} elements across blocks, expected {}",
                    dims.get(i, t)
                )));
            }
            table.checks.strand_counts_checked += 1;
        }
    }
    finish(table, &dims, betti, incomplete)
}

/// Full Betti table by assembling every strand differential; slower, used to
/// cross-check the fine-graded path.
pub fn betti_table_strands(
    qm: &QuotientModule,
    field: &PrimeField,
    opts: &OracleOptions,
) -> Result<BettiTable> {
    let ctx = KoszulContext::new(qm)?;
    let dims = StrandDims::new(&ctx);
    let (cells, incomplete) = plan_cells(&dims, opts.max_cell);
    let mut table = table_shell(qm, &ctx, field);
    let cap = opts.max_cell as u128;

    // rank of d_i at t, for every (i, t) needed by a planned cell
    let mut needed: Vec<(u32, u32)> = Vec::new();
    for (&t, is) in &cells {
        for &i in is {
            for k in [i, i + 1] {
                if k >= 1
                    && dims.get(k, t) > 0
                    && dims.get(k - 1, t) <= cap
                    && !needed.contains(&(k, t))
                {
                    needed.push((k, t));
                }
            }
        }
    }
    let ranks = in_pool(opts.threads, || {
        needed
            .par_iter()
            .map(|&(i, t)| {
                let src = strand::RawStrand::build(&ctx, i, t);
                let dst = strand::RawStrand::build(&ctx, i - 1, t);
                let m = strand::differential_raw(&ctx, &src, &dst, t, field);
                let mut dd = None;
                if i >= 2 && src.elems.len() <= opts.dd_check_limit {
                    let below = strand::RawStrand::build(&ctx, i - 2, t);
                    let m2 = strand::differential_raw(&ctx, &dst, &below, t, field);
                    dd = Some(m2.mul(&m, field).is_zero(field));
                }
                ((i, t), rank_gfp(&m, field), dd)
            })
            .collect::<Vec<_>>()
    })?;
    let mut rank_map = BTreeMap::new();
    for (key, r, dd) in ranks {
        if let Some(ok) = dd {
            if !ok {
                return Err(Error::Invariant(format!("d∘d != 0 at (i,t) = {key:?}")));
            }
            table.checks.dd_blocks_checked += 1;
        }
        rank_map.insert(key, r as u128);
    }
    let mut betti = BTreeMap::new();
    for (&t, is) in &cells {
        for &i in is {
            let r = |k: u32| rank_map.get(&(k, t)).copied().unwrap_or(0);
            let b = dims.get(i, t) - r(i) - r(i + 1);
            betti.insert((i, t), b as u64);
        }
    }
    finish(table, &dims, betti, incomplete)
}

/// One Betti number `β_{i,t}` from the strands at `(i-1, t)`, `(i, t)`, `(i+1, t)`.
pub fn betti_entry(
    ctx: &KoszulContext,
    i: u32,
    t: u32,
    field: &PrimeField,
    max_cell: u64,
) -> Result<u64> {
    let dims = StrandDims::new(ctx);
    for k in [i.saturating_sub(1), i, i + 1] {
        let dim = dims.get(k, t);
        if dim > max_cell as u128 {
            return Err(Error::Resource {
                i: k,
                t,
                dim,
                cap: max_cell,
            });
        }
    }
    let dim = dims.get(i, t);
    if dim == 0 {
        return Ok(0);
    }
    let rank = |k: u32| -> usize {
        if k == 0 || dims.get(k, t) == 0 {
            return 0;
        }
        rank_gfp(&koszul_differential(ctx, k, t, field), field)
    };
    Ok((dim - rank(i) as u128 - rank(i + 1) as u128) as u64)
}
