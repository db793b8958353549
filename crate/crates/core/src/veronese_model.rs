//! The `d`-th Veronese subring `M = R^(d)` as a module over the polynomial ring
//! `S` with one variable per algebra generator, and its Artinian reduction
//! `M̄ = M / (pure powers)` over `S̄ = S / (z_0, ..., z_n)`.
//!
//! Generators are indexed `z_0, ..., z_N`. The pure powers come first in variable
//! order, then the remaining generators by ascending `S`-degree and descending lex.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weighted_ring::{degree_of, divides, for_each_monomial, hilb, Monomial, Weights};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VeroneseModel {
    weights: Weights,
    d: u32,
}

impl VeroneseModel {
    pub fn new(weights: Weights, d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDegree(d));
        }
        Ok(VeroneseModel { weights, d })
    }

    /// The model for `P(1^n, 2)`.
    pub fn one_n_two(n: usize, d: u32) -> Result<Self> {
        Self::new(Weights::one_n_two(n), d)
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    /// Dimension of the weighted projective space.
    pub fn dimension(&self) -> usize {
        self.weights.len() - 1
    }

    /// `n` when the weights are `(1^n, 2)`.
    pub fn n(&self) -> Option<usize> {
        self.weights.as_one_n_two()
    }

    /// Per-variable cap: the least `e >= 1` with `a_j * e ≡ 0 (mod d)`.
    pub fn caps(&self) -> Vec<u32> {
        self.weights
            .degrees()
            .iter()
            .map(|&a| self.d / a.gcd(&self.d))
            .collect()
    }

    /// Canonical identifier, e.g. `w=1,1,2;d=5`.
    pub fn key(&self) -> String {
        let w: Vec<String> = self
            .weights
            .degrees()
            .iter()
            .map(|a| a.to_string())
            .collect();
        format!("w={};d={}", w.join(","), self.d)
    }

    /// Symonds constant without materializing the generators when the closed
    /// description applies.
    pub fn symonds(&self) -> u64 {
        match self.n() {
            Some(_) => u64::from(self.d % 2 == 1),
            None => symonds_constant(&build_generators(self)),
        }
    }
}

/// Ordered generator list of `R^(d)` with `S`-degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorTable {
    nvars: usize,
    exps: Vec<u32>,
    s_degrees: Vec<u32>,
    num_pure: usize,
}

/// One row of a [`GeneratorTable`].
#[derive(Debug, Clone, Copy)]
pub struct GeneratorEntry<'a> {
    pub z: usize,
    pub exponents: &'a [u32],
    pub s_degree: u32,
}

impl GeneratorTable {
    pub fn len(&self) -> usize {
        self.s_degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_degrees.is_empty()
    }

    /// `N`, the largest z-index.
    pub fn big_n(&self) -> usize {
        self.len() - 1
    }

    pub fn num_pure_powers(&self) -> usize {
        self.num_pure
    }

    pub fn exponents(&self, z: usize) -> &[u32] {
        &self.exps[z * self.nvars..(z + 1) * self.nvars]
    }

    pub fn monomial(&self, z: usize) -> Monomial {
        Monomial(self.exponents(z).to_vec())
    }

    pub fn s_degree(&self, z: usize) -> u32 {
        self.s_degrees[z]
    }

    pub fn entries(&self) -> impl Iterator<Item = GeneratorEntry<'_>> + '_ {
        (0..self.len()).map(move |z| GeneratorEntry {
            z,
            exponents: self.exponents(z),
            s_degree: self.s_degrees[z],
        })
    }

    /// z-index of a monomial, if it is a generator.
    pub fn position(&self, exponents: &[u32]) -> Option<usize> {
        (0..self.len()).find(|&z| self.exponents(z) == exponents)
    }

    fn from_parts(model: &VeroneseModel, mut others: Vec<(u32, Vec<u32>)>) -> Self {
        let nvars = model.nvars();
        let caps = model.caps();
        let w = model.weights.degrees();
        let mut exps = Vec::with_capacity((others.len() + nvars) * nvars);
        let mut s_degrees = Vec::with_capacity(others.len() + nvars);
        for (j, &c) in caps.iter().enumerate() {
            let mut e = vec![0; nvars];
            e[j] = c;
            s_degrees.push((w[j] as u64 * c as u64 / model.d as u64) as u32);
            exps.extend_from_slice(&e);
        }
        others.retain(|(_, e)| !is_pure(e, &caps));
        others.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
        for (s, e) in others {
            s_degrees.push(s);
            exps.extend_from_slice(&e);
        }
        GeneratorTable {
            nvars,
            exps,
            s_degrees,
            num_pure: nvars,
        }
    }
}

fn is_pure(e: &[u32], caps: &[u32]) -> bool {
    e.iter()
        .zip(caps)
        .filter(|(&x, _)| x > 0)
        .all(|(&x, &c)| x == c)
        && e.iter().filter(|&&x| x > 0).count() == 1
}

/// Generators of `R^(d)`. Uses the closed description for `(1^n, 2)` and the
/// greedy sieve otherwise.
pub fn build_generators(model: &VeroneseModel) -> GeneratorTable {
    match model.n() {
        Some(_) => closed_generators(model),
        None => sieve_generators(model),
    }
}

/// For `(1^n, 2)`: every monomial of degree `d`, plus `y^d` in `S`-degree 2 when
/// `d` is odd.
pub fn closed_generators(model: &VeroneseModel) -> GeneratorTable {
    let d = model.d as u64;
    let mut others = Vec::new();
    for_each_monomial(&model.weights, d, None, |e| others.push((1, e.to_vec())));
    GeneratorTable::from_parts(model, others)
}

/// Minimal generators by sieving: a monomial of degree `s*d` with `s >= 2` is a
/// generator iff it has no proper divisor of positive degree divisible by `d`.
/// Generators use at most `d` variables with multiplicity, so `s <= max a_j`.
pub fn sieve_generators(model: &VeroneseModel) -> GeneratorTable {
    let d = model.d as u64;
    let w = model.weights.degrees();
    let max_s = *w.iter().max().unwrap() as u64;
    let mut others = Vec::new();
    for s in 1..=max_s {
        for_each_monomial(&model.weights, s * d, None, |e| {
            if s == 1 || !has_proper_veronese_divisor(e, w, d) {
                others.push((s as u32, e.to_vec()));
            }
        });
    }
    GeneratorTable::from_parts(model, others)
}

fn has_proper_veronese_divisor(e: &[u32], w: &[u32], d: u64) -> bool {
    let total = degree_of(e, w);
    let mut u = vec![0u32; e.len()];
    loop {
        // odometer over all divisors
        let mut j = 0;
        loop {
            if j == e.len() {
                return false;
            }
            if u[j] < e[j] {
                u[j] += 1;
                break;
            }
            u[j] = 0;
            j += 1;
        }
        let deg = degree_of(&u, w);
        if deg < total && deg % d == 0 {
            return true;
        }
    }
}

/// `N` from the Hilbert-function sums: `Hilb(d, R)` for odd `d`, `Hilb(d, R) - 1`
/// for even `d`.
pub fn big_n(model: &VeroneseModel) -> Result<BigUint> {
    let n = model.n().ok_or_else(|| Error::UnsupportedWeights {
        weights: model.weights.degrees().to_vec(),
    })?;
    let h = hilb(model.d as i64, n as u32);
    Ok(if model.d % 2 == 1 {
        h
    } else {
        h - BigUint::one()
    })
}

/// `sigma(S) = sum (deg z_i - 1)`.
pub fn symonds_constant(gens: &GeneratorTable) -> u64 {
    gens.s_degrees.iter().map(|&s| s as u64 - 1).sum()
}

/// Index of the last nonzero row: `reg(M) + sigma(S)` with `reg(M)` the
/// dimension of the weighted projective space, valid once `d >= sum a_j`.
pub fn bottom_row_index(model: &VeroneseModel) -> Result<u32> {
    let bound = model.weights.sum();
    if (model.d as u64) < bound {
        return Err(Error::BelowRegularityThreshold { d: model.d, bound });
    }
    Ok(model.dimension() as u32 + model.symonds() as u32)
}

/// `M̄` over `S̄` for a model: the generator table, caps, and the reduced
/// generators (everything but the pure powers).
#[derive(Debug, Clone)]
pub struct QuotientModule {
    model: VeroneseModel,
    table: GeneratorTable,
    caps: Vec<u32>,
}

impl QuotientModule {
    pub fn new(model: VeroneseModel) -> Self {
        let table = build_generators(&model);
        Self::with_table(model, table)
    }

    pub fn with_table(model: VeroneseModel, table: GeneratorTable) -> Self {
        let caps = model.caps();
        QuotientModule { model, table, caps }
    }

    pub fn model(&self) -> &VeroneseModel {
        &self.model
    }

    pub fn generators(&self) -> &GeneratorTable {
        &self.table
    }

    pub fn exponent_caps(&self) -> &[u32] {
        &self.caps
    }

    /// z-indices of the generators of `S̄`.
    pub fn sbar_generators(&self) -> std::ops::Range<usize> {
        self.table.num_pure..self.table.len()
    }

    pub fn num_sbar_generators(&self) -> usize {
        self.table.len() - self.table.num_pure
    }

    /// Whether an exponent vector is a basis monomial of `M̄`.
    pub fn contains(&self, e: &[u32]) -> bool {
        e.len() == self.caps.len()
            && e.iter().zip(&self.caps).all(|(x, c)| x < c)
            && degree_of(e, self.model.weights.degrees()) % self.model.d as u64 == 0
    }

    /// `M̄`-degree (weighted degree divided by `d`).
    pub fn mbar_degree(&self, e: &[u32]) -> u64 {
        degree_of(e, self.model.weights.degrees()) / self.model.d as u64
    }

    /// Largest `q` with `M̄_q` nonzero.
    pub fn max_mbar_degree(&self) -> u64 {
        let top: Vec<u32> = self.caps.iter().map(|c| c - 1).collect();
        self.mbar_degree(&top)
    }

    fn check(&self, m: &Monomial) -> Result<()> {
        if m.len() != self.caps.len() {
            return Err(Error::LengthMismatch {
                expected: self.caps.len(),
                got: m.len(),
            });
        }
        if !self.contains(m.exponents()) {
            return Err(Error::NotInQuotient {
                exponents: m.0.clone(),
            });
        }
        Ok(())
    }
}

/// Basis of `M̄_q`: monomials of degree `q*d` strictly below every cap, descending lex.
pub fn mbar_basis(qm: &QuotientModule, q: u64) -> Vec<Monomial> {
    let maxes: Vec<u32> = qm.caps.iter().map(|c| c - 1).collect();
    let mut out = Vec::new();
    for_each_monomial(
        qm.model.weights(),
        q * qm.model.d as u64,
        Some(&maxes),
        |e| out.push(Monomial(e.to_vec())),
    );
    out
}

/// `D(m)`, `A(m)` and `NA(m)` as z-indices of `S̄` generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorReport {
    pub monomial: Monomial,
    pub divisors: Vec<usize>,
    pub annihilators: Vec<usize>,
    pub non_annihilators: Vec<usize>,
}

impl DivisorReport {
    pub fn d_subset_a(&self) -> bool {
        self.divisors
            .iter()
            .all(|z| self.annihilators.binary_search(z).is_ok())
    }
}

pub fn divisor_report(qm: &QuotientModule, m: &Monomial) -> Result<DivisorReport> {
    qm.check(m)?;
    let mut divisors = Vec::new();
    let mut annihilators = Vec::new();
    let mut non_annihilators = Vec::new();
    for z in qm.sbar_generators() {
        let g = qm.table.exponents(z);
        if divides(g, m.exponents()) {
            divisors.push(z);
        }
        if annihilates(g, m.exponents(), &qm.caps) {
            annihilators.push(z);
        } else {
            non_annihilators.push(z);
        }
    }
    Ok(DivisorReport {
        monomial: m.clone(),
        divisors,
        annihilators,
        non_annihilators,
    })
}

#[inline]
pub(crate) fn annihilates(g: &[u32], m: &[u32], caps: &[u32]) -> bool {
    g.iter().zip(m).zip(caps).any(|((a, b), c)| a + b >= *c)
}

/// Set sizes of a [`DivisorReport`] without allocating the sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DivisorCounts {
    pub d_size: u64,
    pub a_size: u64,
    pub na_size: u64,
    pub d_subset_a: bool,
}

pub fn divisor_counts(qm: &QuotientModule, m: &Monomial) -> Result<DivisorCounts> {
    qm.check(m)?;
    let mut c = DivisorCounts {
        d_size: 0,
        a_size: 0,
        na_size: 0,
        d_subset_a: true,
    };
    for z in qm.sbar_generators() {
        let g = qm.table.exponents(z);
        let div = divides(g, m.exponents());
        let ann = annihilates(g, m.exponents(), &qm.caps);
        c.d_size += div as u64;
        if ann {
            c.a_size += 1;
        } else {
            c.na_size += 1;
            if div {
                c.d_subset_a = false;
            }
        }
    }
    Ok(c)
}

/// Divisor counts for several monomials in one pass over the `S̄` generators.
/// For `(1^n, 2)` the generators are streamed without building a table.
pub fn divisor_counts_many(model: &VeroneseModel, ms: &[Monomial]) -> Result<Vec<DivisorCounts>> {
    let caps = model.caps();
    let w = model.weights.degrees();
    for m in ms {
        if m.len() != caps.len() {
            return Err(Error::LengthMismatch {
                expected: caps.len(),
                got: m.len(),
            });
        }
        let e = m.exponents();
        if !(e.iter().zip(&caps).all(|(x, c)| x < c) && degree_of(e, w) % model.d as u64 == 0) {
            return Err(Error::NotInQuotient {
                exponents: e.to_vec(),
            });
        }
    }
    let mut out = vec![
        DivisorCounts {
            d_size: 0,
            a_size: 0,
            na_size: 0,
            d_subset_a: true
        };
        ms.len()
    ];
    let mut visit = |g: &[u32]| {
        for (m, c) in ms.iter().zip(out.iter_mut()) {
            let div = divides(g, m.exponents());
            c.d_size += div as u64;
            if annihilates(g, m.exponents(), &caps) {
                c.a_size += 1;
            } else {
                c.na_size += 1;
                if div {
                    c.d_subset_a = false;
                }
            }
        }
    };
    match model.n() {
        Some(_) => for_each_monomial(&model.weights, model.d as u64, None, |g| {
            if !is_pure(g, &caps) {
                visit(g)
            }
        }),
        None => {
            let t = build_generators(model);
            for z in t.num_pure..t.len() {
                visit(t.exponents(z));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(w: &[u32], d: u32) -> VeroneseModel {
        VeroneseModel::new(Weights::new(w.to_vec()).unwrap(), d).unwrap()
    }

    fn mons(t: &GeneratorTable) -> Vec<Vec<u32>> {
        (0..t.len()).map(|z| t.exponents(z).to_vec()).collect()
    }

    #[test]
    fn generators_p112_d3_follow_listing_order() {
        let t = build_generators(&model(&[1, 1, 2], 3));
        assert_eq!(
            mons(&t),
            vec![
                vec![3, 0, 0],
                vec![0, 3, 0],
                vec![0, 0, 3],
                vec![2, 1, 0],
                vec![1, 2, 0],
                vec![1, 0, 1],
                vec![0, 1, 1]
            ]
        );
        assert_eq!(t.s_degree(2), 2);
        assert!((0..7).filter(|&z| z != 2).all(|z| t.s_degree(z) == 1));
    }

    #[test]
    fn generators_p112_d4_all_degree_one() {
        let m = model(&[1, 1, 2], 4);
        let t = build_generators(&m);
        assert_eq!(t.len(), 9);
        assert!(t.entries().all(|g| g.s_degree == 1));
        assert_eq!(t.exponents(2), &[0, 0, 2]);
    }

    #[test]
    fn generators_p113_d5() {
        let t = build_generators(&model(&[1, 1, 3], 5));
        assert_eq!(t.len(), 12);
        let count = |s| t.entries().filter(|g| g.s_degree == s).count();
        assert_eq!((count(1), count(2), count(3)), (9, 2, 1));
        assert_eq!(t.exponents(2), &[0, 0, 5]);
        assert_eq!(t.s_degree(2), 3);
        assert_eq!(t.exponents(10), &[1, 0, 3]);
        assert_eq!(t.exponents(11), &[0, 1, 3]);
        assert_eq!(symonds_constant(&t), 4);
    }

    #[test]
    fn sieve_agrees_with_closed_description() {
        for n in 1..=3 {
            for d in 1..=8 {
                let m = VeroneseModel::one_n_two(n, d).unwrap();
                assert_eq!(sieve_generators(&m), closed_generators(&m), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn big_n_examples() {
        let n = |n, d| big_n(&VeroneseModel::one_n_two(n, d).unwrap()).unwrap();
        assert_eq!(n(2, 5), BigUint::from(12u32));
        assert_eq!(n(2, 4), BigUint::from(8u32));
        assert_eq!(n(3, 3), BigUint::from(13u32));
        assert!(matches!(
            big_n(&model(&[1, 1, 3], 5)),
            Err(Error::UnsupportedWeights { .. })
        ));
        for nn in 1..=4 {
            for d in 1..=12 {
                let m = VeroneseModel::one_n_two(nn, d).unwrap();
                assert_eq!(
                    big_n(&m).unwrap(),
                    BigUint::from(build_generators(&m).big_n())
                );
            }
        }
    }

    #[test]
    fn symonds_and_bottom_row() {
        assert_eq!(
            symonds_constant(&build_generators(&model(&[1, 1, 2], 5))),
            1
        );
        for d in [4, 6, 8] {
            assert_eq!(
                symonds_constant(&build_generators(&model(&[1, 1, 2], d))),
                0
            );
        }
        assert_eq!(bottom_row_index(&model(&[1, 1, 2], 5)).unwrap(), 3);
        assert_eq!(bottom_row_index(&model(&[1, 1, 2], 6)).unwrap(), 2);
        assert_eq!(bottom_row_index(&model(&[1, 1, 3], 5)).unwrap(), 6);
        assert_eq!(
            bottom_row_index(&model(&[1, 1, 2], 3)),
            Err(Error::BelowRegularityThreshold { d: 3, bound: 4 })
        );
    }

    #[test]
    fn mbar_basis_examples() {
        let qm = QuotientModule::new(model(&[1, 1, 2], 3));
        assert_eq!(mbar_basis(&qm, 0), vec![Monomial(vec![0, 0, 0])]);
        let got: Vec<Vec<u32>> = mbar_basis(&qm, 1).into_iter().map(|m| m.0).collect();
        assert_eq!(
            got,
            vec![vec![2, 1, 0], vec![1, 2, 0], vec![1, 0, 1], vec![0, 1, 1]]
        );

        let qm = QuotientModule::new(model(&[1, 1, 2], 5));
        let b2 = mbar_basis(&qm, 2);
        assert!(b2.contains(&Monomial(vec![4, 4, 1])));
        assert!(b2.contains(&Monomial(vec![2, 0, 4])));
    }

    #[test]
    fn divisor_report_examples() {
        let qm = QuotientModule::new(model(&[1, 1, 2], 3));
        let r = divisor_report(&qm, &Monomial(vec![0, 1, 1])).unwrap();
        assert_eq!(r.divisors, vec![6]);
        assert_eq!(r.annihilators, vec![4]);
        assert!(!r.d_subset_a());

        let qm = QuotientModule::new(model(&[1, 1, 2], 5));
        let r = divisor_report(&qm, &Monomial(vec![4, 4, 1])).unwrap();
        assert_eq!((r.divisors.len(), r.annihilators.len()), (8, 10));
        let r = divisor_report(&qm, &Monomial(vec![2, 0, 4])).unwrap();
        assert_eq!((r.divisors.len(), r.annihilators.len()), (1, 8));
        assert_eq!(qm.generators().exponents(r.divisors[0]), &[1, 0, 2]);

        assert!(matches!(
            divisor_report(&qm, &Monomial(vec![5, 0, 0])),
            Err(Error::NotInQuotient { .. })
        ));
        assert!(matches!(
            divisor_report(&qm, &Monomial(vec![1, 0, 0])),
            Err(Error::NotInQuotient { .. })
        ));
    }

    #[test]
    fn divisor_sets_follow_definitions_on_random_monomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (w, d) in [
            (vec![1, 1, 2], 7),
            (vec![1, 1, 1, 2], 5),
            (vec![1, 1, 3], 5),
        ] {
            let qm = QuotientModule::new(model(&w, d));
            let caps = qm.exponent_caps().to_vec();
            let mut tried = 0;
            while tried < 50 {
                let e: Vec<u32> = caps.iter().map(|&c| rng.gen_range(0..c)).collect();
                if !qm.contains(&e) {
                    continue;
                }
                tried += 1;
                let m = Monomial(e.clone());
                let r = divisor_report(&qm, &m).unwrap();
                let counts = divisor_counts(&qm, &m).unwrap();
                assert_eq!(
                    r.annihilators.len() + r.non_annihilators.len(),
                    qm.num_sbar_generators()
                );
                assert_eq!(counts.d_size as usize, r.divisors.len());
                assert_eq!(counts.a_size as usize, r.annihilators.len());
                assert_eq!(counts.d_subset_a, r.d_subset_a());
                let streamed = divisor_counts_many(qm.model(), std::slice::from_ref(&m)).unwrap();
                assert_eq!(streamed[0], counts);
                for z in r.divisors.iter() {
                    let g = qm.generators().exponents(*z);
                    let sum: Vec<u32> = g.iter().zip(&e).map(|(a, b)| a + b).collect();
                    let breaks = sum.iter().zip(&caps).any(|(s, c)| s >= c);
                    assert_eq!(r.annihilators.contains(z), breaks);
                }
            }
        }
    }
}
