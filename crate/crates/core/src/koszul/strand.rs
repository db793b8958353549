//! Strand bases `∧^i (S̄ generators) ⊗ M̄` at internal degree `t` and the Koszul
//! differential between them.

use std::collections::HashMap;

use serde::Serialize;

use super::rank::SparseMatrix;
use super::PrimeField;
use crate::error::{Error, Result};
use crate::veronese_model::{mbar_basis, QuotientModule};
use crate::weighted_ring::Monomial;

/// Flattened data of `M̄` over `S̄` shared by both oracle paths.
#[derive(Debug, Clone)]
pub struct KoszulContext {
    pub(crate) nv: usize,
    pub(crate) g: usize,
    /// exponent vectors of the `S̄` generators, `g * nv`
    pub(crate) gens: Vec<u32>,
    pub(crate) sdeg: Vec<u32>,
    /// z-index of each `S̄` generator
    pub(crate) z: Vec<usize>,
    pub(crate) caps: Vec<u32>,
    pub(crate) weights: Vec<u32>,
    pub(crate) d: u64,
    /// `M̄` basis by degree
    pub(crate) mbar: Vec<Vec<Vec<u32>>>,
    pub(crate) mbar_index: Vec<HashMap<Vec<u32>, u32>>,
}

impl KoszulContext {
    pub fn new(qm: &QuotientModule) -> Result<Self> {
        let table = qm.generators();
        let zs: Vec<usize> = qm.sbar_generators().collect();
        if zs.len() > 64 {
            return Err(Error::TooManyGenerators(zs.len()));
        }
        let nv = qm.model().nvars();
        let mut gens = Vec::with_capacity(zs.len() * nv);
        for &z in &zs {
            gens.extend_from_slice(table.exponents(z));
        }
        let maxq = qm.max_mbar_degree();
        let mbar: Vec<Vec<Vec<u32>>> = (0..=maxq)
            .map(|q| mbar_basis(qm, q).into_iter().map(|m| m.0).collect())
            .collect();
        let mbar_index = mbar
            .iter()
            .map(|b| {
                b.iter()
                    .enumerate()
                    .map(|(k, e)| (e.clone(), k as u32))
                    .collect()
            })
            .collect();
        Ok(KoszulContext {
            nv,
            g: zs.len(),
            gens,
            sdeg: zs.iter().map(|&z| table.s_degree(z)).collect(),
            z: zs,
            caps: qm.exponent_caps().to_vec(),
            weights: qm.model().weights().degrees().to_vec(),
            d: qm.model().d() as u64,
            mbar,
            mbar_index,
        })
    }

    pub fn num_generators(&self) -> usize {
        self.g
    }

    pub(crate) fn gen(&self, k: usize) -> &[u32] {
        &self.gens[k * self.nv..(k + 1) * self.nv]
    }

    pub(crate) fn max_mbar_degree(&self) -> usize {
        self.mbar.len() - 1
    }

    /// Largest internal degree with a nonempty strand.
    pub fn max_t(&self) -> u32 {
        self.sdeg.iter().sum::<u32>() + self.max_mbar_degree() as u32
    }

    pub(crate) fn fits(&self, e: &[u32]) -> bool {
        e.iter().zip(&self.caps).all(|(x, c)| x < c)
    }
}

/// `dim` of every strand, from counting subsets by size and degree.
#[derive(Debug, Clone)]
pub struct StrandDims {
    dims: Vec<Vec<u128>>,
}

impl StrandDims {
    pub fn new(ctx: &KoszulContext) -> Self {
        let smax: usize = ctx.sdeg.iter().map(|&s| s as usize).sum();
        // count[i][s]: i-subsets with degree sum s
        let mut count = vec![vec![0u128; smax + 1]; ctx.g + 1];
        count[0][0] = 1;
        for &s in &ctx.sdeg {
            let s = s as usize;
            for i in (1..=ctx.g).rev() {
                for sum in (s..=smax).rev() {
                    count[i][sum] += count[i - 1][sum - s];
                }
            }
        }
        let tmax = ctx.max_t() as usize;
        let dims = (0..=ctx.g)
            .map(|i| {
                (0..=tmax)
                    .map(|t| {
                        (0..=smax.min(t))
                            .filter(|&s| t - s <= ctx.max_mbar_degree())
                            .map(|s| count[i][s] * ctx.mbar[t - s].len() as u128)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        StrandDims { dims }
    }

    pub fn get(&self, i: u32, t: u32) -> u128 {
        self.dims
            .get(i as usize)
            .and_then(|r| r.get(t as usize))
            .copied()
            .unwrap_or(0)
    }

    pub fn max_i(&self) -> u32 {
        self.dims.len() as u32 - 1
    }

    pub fn max_t(&self) -> u32 {
        self.dims[0].len() as u32 - 1
    }
}

/// Basis of one strand: subsets in lex order, then `M̄` monomials in
/// descending lex order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrandBasis {
    pub i: u32,
    pub t: u32,
    pub elements: Vec<StrandElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrandElement {
    /// z-indices, strictly increasing
    pub subset: Vec<usize>,
    pub monomial: Monomial,
}

impl StrandBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Internal form: generator positions as a bitmask plus monomial index in its degree.
#[derive(Debug, Clone)]
pub(crate) struct RawStrand {
    pub(crate) elems: Vec<(u64, u32)>,
    /// colex rank of the subset -> offset of its block, or a hash map when the
    /// rank space is large
    lookup: Lookup,
}

#[derive(Debug, Clone)]
enum Lookup {
    Colex(Vec<u32>),
    Hashed(HashMap<u64, u32>),
}

const COLEX_TABLE_LIMIT: u128 = 1 << 22;

pub(crate) fn binom_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for j in 0..k {
        r = r * (n - j) as u128 / (j + 1) as u128;
    }
    r
}

/// Colex rank of a subset given as a bitmask.
pub(crate) fn colex_rank(mask: u64) -> u64 {
    let mut r = 0u64;
    let mut m = mask;
    let mut k = 1;
    while m != 0 {
        let c = m.trailing_zeros() as u64;
        r += binom_u128(c, k) as u64;
        k += 1;
        m &= m - 1;
    }
    r
}

fn for_each_subset_lex(g: usize, i: usize, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..i).collect();
    if i > g {
        return;
    }
    loop {
        f(&idx);
        let mut k = i;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if idx[k] < g - i + k {
                idx[k] += 1;
                for j in k + 1..i {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

impl RawStrand {
    pub(crate) fn build(ctx: &KoszulContext, i: u32, t: u32) -> Self {
        let mut elems = Vec::new();
        let mut offsets: Vec<(u64, u32)> = Vec::new();
        for_each_subset_lex(ctx.g, i as usize, |sub| {
            let s: u32 = sub.iter().map(|&k| ctx.sdeg[k]).sum();
            if s > t || (t - s) as usize > ctx.max_mbar_degree() {
                return;
            }
            let q = (t - s) as usize;
            if ctx.mbar[q].is_empty() {
                return;
            }
            let mask = sub.iter().fold(0u64, |m, &k| m | 1 << k);
            offsets.push((mask, elems.len() as u32));
            for mi in 0..ctx.mbar[q].len() {
                elems.push((mask, mi as u32));
            }
        });
        let lookup = if binom_u128(ctx.g as u64, i as u64) <= COLEX_TABLE_LIMIT {
            let mut v = vec![u32::MAX; binom_u128(ctx.g as u64, i as u64) as usize];
            for (mask, off) in offsets {
                v[colex_rank(mask) as usize] = off;
            }
            Lookup::Colex(v)
        } else {
            Lookup::Hashed(offsets.into_iter().collect())
        };
        RawStrand { elems, lookup }
    }

    pub(crate) fn position(&self, mask: u64, mono: u32) -> Option<usize> {
        let off = match &self.lookup {
            Lookup::Colex(v) => *v.get(colex_rank(mask) as usize)?,
            Lookup::Hashed(h) => *h.get(&mask)?,
        };
        (off != u32::MAX).then_some(off as usize + mono as usize)
    }
}

fn mask_positions(mask: u64) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let k = m.trailing_zeros() as usize;
            m &= m - 1;
            k
        })
    })
}

pub(crate) fn mask_degree(ctx: &KoszulContext, mask: u64) -> u32 {
    mask_positions(mask).map(|k| ctx.sdeg[k]).sum()
}

pub fn strand_basis(ctx: &KoszulContext, i: u32, t: u32) -> StrandBasis {
    let raw = RawStrand::build(ctx, i, t);
    let elements = raw
        .elems
        .iter()
        .map(|&(mask, mi)| {
            let q = (t - mask_degree(ctx, mask)) as usize;
            StrandElement {
                subset: mask_positions(mask).map(|k| ctx.z[k]).collect(),
                monomial: Monomial(ctx.mbar[q][mi as usize].clone()),
            }
        })
        .collect();
    StrandBasis { i, t, elements }
}

/// Matrix of `d_i: C_{i,t} -> C_{i-1,t}`, rows indexed by the target basis.
/// `(g_1 ∧ ... ∧ g_i) ⊗ m ↦ Σ_k (-1)^(k+1) (... ĝ_k ...) ⊗ g_k m`, dropping
/// products that reach a cap.
pub(crate) fn differential_raw(
    ctx: &KoszulContext,
    src: &RawStrand,
    dst: &RawStrand,
    t: u32,
    field: &PrimeField,
) -> SparseMatrix {
    let mut mat = SparseMatrix::new(dst.elems.len(), src.elems.len());
    let mut prod = vec![0u32; ctx.nv];
    for (col, &(mask, mi)) in src.elems.iter().enumerate() {
        let q = (t - mask_degree(ctx, mask)) as usize;
        let m = &ctx.mbar[q][mi as usize];
        for (pos, k) in mask_positions(mask).enumerate() {
            for (j, p) in prod.iter_mut().enumerate() {
                *p = m[j] + ctx.gen(k)[j];
            }
            if !ctx.fits(&prod) {
                continue;
            }
            let q2 = q + ctx.sdeg[k] as usize;
            let mi2 = ctx.mbar_index[q2][&prod];
            let row = dst
                .position(mask & !(1 << k), mi2)
                .expect("target element in strand");
            let v = if pos % 2 == 0 { 1 } else { field.neg(1) };
            mat.push(row, col, v);
        }
    }
    mat
}

pub fn koszul_differential(
    ctx: &KoszulContext,
    i: u32,
    t: u32,
    field: &PrimeField,
) -> SparseMatrix {
    if i == 0 {
        let n = RawStrand::build(ctx, 0, t).elems.len();
        return SparseMatrix::new(0, n);
    }
    let src = RawStrand::build(ctx, i, t);
    let dst = RawStrand::build(ctx, i - 1, t);
    differential_raw(ctx, &src, &dst, t, field)
}
