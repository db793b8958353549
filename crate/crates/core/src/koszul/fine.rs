//! Fine-graded evaluation. The Koszul complex of `M̄` is graded by exponent
//! vectors `α = Σ T + m`, and `β_{i,t} = Σ_{deg α = t d} β_{i,α}`. Within one `α`
//! the monomial `m` is determined by the subset `T`, so blocks are indexed by
//! subsets alone. Permuting variables of equal weight permutes the blocks, so
//! only sorted representatives are evaluated.

use std::collections::HashMap;

use super::rank::rank_rows;
use super::strand::KoszulContext;
use super::PrimeField;
use crate::weighted_ring::for_each_monomial;
use crate::weighted_ring::Weights;

/// Subsets of each size in one `α`-block, with the complementary monomial.
pub(crate) struct Block {
    /// by size: (mask, m)
    pub(crate) by_size: Vec<Vec<(u64, Vec<u32>)>>,
}

/// All `T` with `α - ΣT` a basis monomial of `M̄`, restricted to sizes in `wanted`.
pub(crate) fn decompose(ctx: &KoszulContext, alpha: &[u32], wanted: u128) -> Block {
    let mut by_size: Vec<Vec<(u64, Vec<u32>)>> = vec![Vec::new(); ctx.g + 1];
    if wanted == 0 {
        return Block { by_size };
    }
    let min = wanted.trailing_zeros() as usize;
    let max = 127 - wanted.leading_zeros() as usize;
    // suffix[k]: coordinatewise sum of generators k..
    let mut suffix = vec![0u32; (ctx.g + 1) * ctx.nv];
    for k in (0..ctx.g).rev() {
        for j in 0..ctx.nv {
            suffix[k * ctx.nv + j] = suffix[(k + 1) * ctx.nv + j] + ctx.gen(k)[j];
        }
    }
    let mut rem = alpha.to_vec();
    dfs(
        ctx,
        &suffix,
        0,
        &mut rem,
        0,
        0,
        min,
        max,
        wanted,
        &mut by_size,
    );
    Block { by_size }
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    ctx: &KoszulContext,
    suffix: &[u32],
    k: usize,
    rem: &mut [u32],
    mask: u64,
    size: usize,
    min: usize,
    max: usize,
    wanted: u128,
    out: &mut [Vec<(u64, Vec<u32>)>],
) {
    let sfx = &suffix[k * ctx.nv..(k + 1) * ctx.nv];
    if rem
        .iter()
        .zip(&ctx.caps)
        .zip(sfx)
        .any(|((&r, &c), &s)| r >= c + s)
    {
        return;
    }
    if size + (ctx.g - k) < min {
        return;
    }
    if k == ctx.g {
        if wanted >> size & 1 == 1 {
            out[size].push((mask, rem.to_vec()));
        }
        return;
    }
    let g = ctx.gen(k);
    if size < max && g.iter().zip(rem.iter()).all(|(a, r)| a <= r) {
        for (r, a) in rem.iter_mut().zip(g) {
            *r -= a;
        }
        dfs(
            ctx,
            suffix,
            k + 1,
            rem,
            mask | 1 << k,
            size + 1,
            min,
            max,
            wanted,
            out,
        );
        for (r, a) in rem.iter_mut().zip(g) {
            *r += a;
        }
    }
    dfs(ctx, suffix, k + 1, rem, mask, size, min, max, wanted, out);
}

/// Rank of `d_i` restricted to the block: rows are the size-`i` elements,
/// columns the size-`(i-1)` subsets they hit.
pub(crate) fn block_rank(
    ctx: &KoszulContext,
    elems: &[(u64, Vec<u32>)],
    field: &PrimeField,
) -> usize {
    if elems.is_empty() {
        return 0;
    }
    let mut cols: HashMap<u64, u32> = HashMap::new();
    let mut rows = Vec::with_capacity(elems.len());
    let mut prod = vec![0u32; ctx.nv];
    for (mask, m) in elems {
        let mut row: Vec<(u32, u32)> = Vec::new();
        let mut bits = *mask;
        let mut pos = 0;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            for (j, p) in prod.iter_mut().enumerate() {
                *p = m[j] + ctx.gen(k)[j];
            }
            if ctx.fits(&prod) {
                let next = cols.len() as u32;
                let c = *cols.entry(mask & !(1 << k)).or_insert(next);
                row.push((c, if pos % 2 == 0 { 1 } else { field.neg(1) }));
            }
            pos += 1;
        }
        row.sort_unstable_by_key(|e| e.0);
        rows.push(row);
    }
    rank_rows(rows, cols.len(), field)
}

/// Verifies `d ∘ d = 0` on every element of a block by expanding both steps.
pub(crate) fn block_dd_zero(ctx: &KoszulContext, block: &Block, field: &PrimeField) -> bool {
    let mut prod = vec![0u32; ctx.nv];
    let mut prod2 = vec![0u32; ctx.nv];
    for elems in block.by_size.iter().skip(2) {
        for (mask, m) in elems {
            let mut acc: HashMap<u64, u32> = HashMap::new();
            let positions: Vec<usize> = (0..64).filter(|k| mask >> k & 1 == 1).collect();
            for (a, &k) in positions.iter().enumerate() {
                for (j, p) in prod.iter_mut().enumerate() {
                    *p = m[j] + ctx.gen(k)[j];
                }
                if !ctx.fits(&prod) {
                    continue;
                }
                let rest: Vec<usize> = positions.iter().copied().filter(|&x| x != k).collect();
                for (b, &l) in rest.iter().enumerate() {
                    for (j, p) in prod2.iter_mut().enumerate() {
                        *p = prod[j] + ctx.gen(l)[j];
                    }
                    if !ctx.fits(&prod2) {
                        continue;
                    }
                    let sign = (a + b) % 2 == 0;
                    let e = acc.entry(mask & !(1 << k) & !(1 << l)).or_insert(0);
                    *e = if sign {
                        field.add(*e, 1)
                    } else {
                        field.sub(*e, 1)
                    };
                }
            }
            if acc.values().any(|&v| v != 0) {
                return false;
            }
        }
    }
    true
}

/// Partition of variable indices into classes of equal weight.
pub(crate) fn weight_classes(weights: &[u32]) -> Vec<Vec<usize>> {
    let mut classes: Vec<(u32, Vec<usize>)> = Vec::new();
    for (j, &w) in weights.iter().enumerate() {
        match classes.iter_mut().find(|c| c.0 == w) {
            Some(c) => c.1.push(j),
            None => classes.push((w, vec![j])),
        }
    }
    classes.into_iter().map(|c| c.1).collect()
}

/// Whether `α` is non-increasing within each class, and if so the size of its orbit.
pub(crate) fn orbit_size(alpha: &[u32], classes: &[Vec<usize>]) -> Option<u64> {
    let mut size = 1u64;
    for class in classes {
        let vals: Vec<u32> = class.iter().map(|&j| alpha[j]).collect();
        if vals.windows(2).any(|w| w[0] < w[1]) {
            return None;
        }
        let mut denom = 1u64;
        let mut run = 1u64;
        for w in vals.windows(2) {
            if w[0] == w[1] {
                run += 1;
                denom *= run;
            } else {
                run = 1;
            }
        }
        let fact: u64 = (1..=vals.len() as u64).product();
        size *= fact / denom;
    }
    Some(size)
}

/// Sorted representatives `α` of internal degree `t`.
pub(crate) fn representatives(ctx: &KoszulContext, t: u32) -> Vec<(Vec<u32>, u64)> {
    let classes = weight_classes(&ctx.weights);
    let bound: Vec<u32> = (0..ctx.nv)
        .map(|j| (0..ctx.g).map(|k| ctx.gen(k)[j]).sum::<u32>() + ctx.caps[j] - 1)
        .collect();
    let w = Weights::new(ctx.weights.clone()).expect("validated weights");
    let mut out = Vec::new();
    for_each_monomial(&w, t as u64 * ctx.d, Some(&bound), |a| {
        if let Some(o) = orbit_size(a, &classes) {
            out.push((a.to_vec(), o));
        }
    });
    out
}

/// Per-`α` contribution: `β_{i,α}` for every `i` in `cells`, plus element counts.
pub(crate) struct AlphaResult {
    pub(crate) betti: Vec<(u32, u64)>,
    pub(crate) counts: Vec<(u32, u64)>,
    pub(crate) dd_checked: bool,
    pub(crate) dd_ok: bool,
}

pub(crate) fn eval_alpha(
    ctx: &KoszulContext,
    alpha: &[u32],
    cells: &[u32],
    field: &PrimeField,
    dd_limit: usize,
) -> AlphaResult {
    let mut wanted = 0u128;
    for &i in cells {
        wanted |= 1 << i;
        if (i as usize) < ctx.g {
            wanted |= 1 << (i + 1);
        }
    }
    let block = decompose(ctx, alpha, wanted);
    let total: usize = block.by_size.iter().map(Vec::len).sum();
    let mut ranks: HashMap<u32, usize> = HashMap::new();
    let mut rank_of = |i: u32| -> usize {
        if i == 0 || i as usize > ctx.g {
            return 0;
        }
        *ranks
            .entry(i)
            .or_insert_with(|| block_rank(ctx, &block.by_size[i as usize], field))
    };
    let mut betti = Vec::new();
    let mut counts = Vec::new();
    for &i in cells {
        let dim = block.by_size[i as usize].len();
        counts.push((i, dim as u64));
        if dim == 0 {
            continue;
        }
        let b = dim - rank_of(i) - rank_of(i + 1);
        if b > 0 {
            betti.push((i, b as u64));
        }
    }
    let dd_checked = total <= dd_limit;
    let dd_ok = !dd_checked || block_dd_zero(ctx, &block, field);
    AlphaResult {
        betti,
        counts,
        dd_checked,
        dd_ok,
    }
}

/// `β_{i,α}` for all `i` at one exponent vector.
pub fn fine_betti(ctx: &KoszulContext, alpha: &[u32], field: &PrimeField) -> Vec<(u32, u64)> {
    let cells: Vec<u32> = (0..=ctx.g as u32).collect();
    eval_alpha(ctx, alpha, &cells, field, 0).betti
}

/// `β_{i,α}` for one `i`, enumerating only sizes `i` and `i + 1`.
pub fn fine_betti_entry(ctx: &KoszulContext, alpha: &[u32], i: u32, field: &PrimeField) -> u64 {
    if i as usize > ctx.g {
        return 0;
    }
    eval_alpha(ctx, alpha, &[i], field, 0)
        .betti
        .first()
        .map_or(0, |e| e.1)
}

/// Number of block elements of size `i` at `α` without storing them.
pub fn fine_block_size(ctx: &KoszulContext, alpha: &[u32], i: u32) -> usize {
    if i as usize > ctx.g {
        return 0;
    }
    decompose(ctx, alpha, 1 << i).by_size[i as usize].len()
}
