//! Nonvanishing of single cells too large for the full strand computation.
//! For a certificate `m` and `D(m) ⊆ T ⊆ A(m)` with `|T| = i`, the homology in
//! exponent degree `α = ΣT + m` is computed exactly; `β_{i,α} > 0` forces
//! `β_{i,t} > 0` because `β_{i,t}` is the sum of the `β_{i,α}` over `deg α = t`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::koszul::{fine_betti_entry, fine_block_size, KoszulContext, PrimeField};
use crate::predictions::{back_shape, front_shape};
use crate::veronese_model::{divisor_report, QuotientModule};
use crate::weighted_ring::Monomial;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub i: u32,
    pub q: u32,
    pub monomial: Vec<u32>,
    pub alpha: Vec<u32>,
    pub block_size: u64,
    pub beta: u64,
}

/// Searches the row-`q` certificate monomials for an exponent degree with
/// `β_{i,α} > 0`, trying the smallest blocks first. Blocks above `limit`
/// elements are skipped.
pub fn find_witness(
    qm: &QuotientModule,
    ctx: &KoszulContext,
    i: u32,
    q: u32,
    field: &PrimeField,
    limit: u64,
) -> Result<Option<Witness>> {
    let model = qm.model();
    let gens = qm.generators();
    let mut shapes: Vec<Monomial> = Vec::new();
    for m in [front_shape(model, q), back_shape(model, q)]
        .into_iter()
        .flatten()
    {
        if !shapes.contains(&m) {
            shapes.push(m);
        }
    }
    let mut candidates: Vec<(u64, Vec<u32>, Vec<u32>)> = Vec::new();
    for m in shapes {
        let r = divisor_report(qm, &m)?;
        let (dn, an) = (r.divisors.len() as u32, r.annihilators.len() as u32);
        if !r.d_subset_a() || i < dn || i > an {
            continue;
        }
        let extra: Vec<usize> = r
            .annihilators
            .iter()
            .copied()
            .filter(|z| !r.divisors.contains(z))
            .collect();
        let rev: Vec<usize> = extra.iter().rev().copied().collect();
        for order in [extra, rev] {
            let mut alpha = m.0.clone();
            for &z in r
                .divisors
                .iter()
                .chain(order.iter().take((i - dn) as usize))
            {
                for (a, e) in alpha.iter_mut().zip(gens.exponents(z)) {
                    *a += e;
                }
            }
            if candidates.iter().any(|c| c.2 == alpha) {
                continue;
            }
            let size =
                (fine_block_size(ctx, &alpha, i) + fine_block_size(ctx, &alpha, i + 1)) as u64;
            candidates.push((size, m.0.clone(), alpha));
        }
    }
    candidates.sort();
    for (size, monomial, alpha) in candidates {
        if size > limit {
            break;
        }
        let beta = fine_betti_entry(ctx, &alpha, i, field);
        if beta > 0 {
            return Ok(Some(Witness {
                i,
                q,
                monomial,
                alpha,
                block_size: size,
                beta,
            }));
        }
    }
    Ok(None)
}
