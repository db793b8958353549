//! Closed-form row ranges `[F_q(d), B_q(d)]` for `P(1^n, 2)`, the monomials
//! that certify them, certificate checking and the ratio `rho_q`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::veronese_model::{
    big_n, divisor_counts_many, divisor_report, QuotientModule, VeroneseModel,
};
use crate::weighted_ring::{degree_of, hilb, Monomial};

/// Below this `d` the ranges are reported with a warning: `2n + 4`.
pub fn asymptotic_threshold(n: usize) -> u32 {
    2 * n as u32 + 4
}

pub(crate) fn serialize_bigint<S: Serializer>(
    x: &BigInt,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

pub(crate) fn serialize_biguint<S: Serializer>(
    x: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match x.to_u64() {
        Some(v) => s.serialize_u64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

/// `n` for the prediction pathway: weights `(1^n, 2)` with `n > 1`.
pub fn prediction_n(model: &VeroneseModel) -> Result<usize> {
    match model.n() {
        Some(n) if n > 1 => Ok(n),
        _ => Err(Error::UnsupportedWeights {
            weights: model.weights().degrees().to_vec(),
        }),
    }
}

/// Number of predicted rows: `n` for even `d`, `n + 1` for odd `d`.
pub fn last_predicted_row(model: &VeroneseModel) -> Result<u32> {
    let n = prediction_n(model)? as u32;
    Ok(n + model.d() % 2)
}

fn check_row(model: &VeroneseModel, q: u32) -> Result<usize> {
    let n = prediction_n(model)?;
    let max_row = last_predicted_row(model)?;
    if q == 0 || q > max_row {
        return Err(Error::RowOutOfRange { q, max_row });
    }
    Ok(n)
}

fn finish_shape(model: &VeroneseModel, q: u32, e: Vec<u32>) -> Result<Monomial> {
    let caps = model.caps();
    if e.iter().zip(&caps).any(|(x, c)| x >= c) {
        return Err(Error::MonomialUndefined {
            exponents: e,
            d: model.d(),
        });
    }
    debug_assert_eq!(
        degree_of(&e, model.weights().degrees()),
        q as u64 * model.d() as u64
    );
    Ok(Monomial(e))
}

/// The monomial whose divisor count gives `F_q(d)`, without the `D ⊆ A` check.
pub fn front_shape(model: &VeroneseModel, q: u32) -> Result<Monomial> {
    let n = check_row(model, q)?;
    let d = model.d();
    let q_ = q as usize;
    let mut e = vec![0u32; n + 1];
    if q == 1 {
        e[0] = d - 1;
        e[1] = 1;
    } else if d % 2 == 1 {
        e[..q_ - 2].fill(d - 1);
        e[q_ - 2] = q;
        e[n] = d - 1;
    } else {
        e[..q_ - 1].fill(d - 1);
        e[q_ - 1] = q + 1;
        e[n] = d / 2 - 1;
    }
    finish_shape(model, q, e)
}

/// The monomial whose non-annihilator count gives `B_q(d)`, without the `D ⊆ A` check.
pub fn back_shape(model: &VeroneseModel, q: u32) -> Result<Monomial> {
    let n = check_row(model, q)?;
    let d = model.d();
    let q_ = q as usize;
    let nn = n as u32;
    let mut e = vec![0u32; n + 1];
    if q_ < n {
        e[..q_].fill(d - 1);
        e[q_] = q;
    } else {
        e[..n].fill(d - 1);
        let odd_n = n % 2 == 1;
        let top_row = q_ == n + 1;
        // One fewer on the last x keeps the y-exponent integral.
        let bump = if top_row { !odd_n } else { odd_n };
        if bump {
            e[n - 1] = d - 2;
        }
        e[n] = match (top_row, odd_n) {
            (false, false) => nn / 2,
            (false, true) => (nn + 1) / 2,
            (true, true) => (d + nn) / 2,
            (true, false) => (d + nn + 1) / 2,
        };
    }
    finish_shape(model, q, e)
}

fn checked(model: &VeroneseModel, m: Monomial) -> Result<Monomial> {
    let c = divisor_counts_many(model, std::slice::from_ref(&m))?;
    if !c[0].d_subset_a {
        return Err(Error::InvalidCertificate { exponents: m.0 });
    }
    Ok(m)
}

/// Front monomial of row `q`, verified to satisfy `D(m) ⊆ A(m)`.
pub fn front_monomial(model: &VeroneseModel, q: u32) -> Result<Monomial> {
    checked(model, front_shape(model, q)?)
}

/// Back monomial of row `q`, verified to satisfy `D(m) ⊆ A(m)`.
pub fn back_monomial(model: &VeroneseModel, q: u32) -> Result<Monomial> {
    checked(model, back_shape(model, q)?)
}

fn h(s: i64, i: usize) -> BigInt {
    BigInt::from(hilb(s, i as u32))
}

/// `F_q(d)`.
pub fn closed_f(model: &VeroneseModel, q: u32) -> Result<BigInt> {
    check_row(model, q)?;
    let d = model.d() as i64;
    let qi = q as i64;
    let q_ = q as usize;
    Ok(if q == 1 {
        BigInt::from(1)
    } else if d % 2 == 1 {
        h(d, q_ - 1) - h(d - qi - 1, q_ - 1) - (qi - 2)
    } else {
        h(d, q_) - h(d - qi - 2, q_) - qi
    })
}

/// `B_q(d)`.
pub fn closed_b(model: &VeroneseModel, q: u32) -> Result<BigInt> {
    let n = check_row(model, q)?;
    let d = model.d() as i64;
    let top = BigInt::from(big_n(model)?) - n;
    let q_ = q as usize;
    if q_ < n {
        let k = n - q_;
        let tail = if d % 2 == 1 { k as i64 - 1 } else { k as i64 };
        return Ok(&top - h(d, k) + h(q as i64, k) + tail);
    }
    Ok(if d % 2 == 1 && q_ == n && n % 2 == 1 {
        top - 1
    } else {
        top
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowRange {
    pub q: u32,
    #[serde(serialize_with = "serialize_bigint")]
    pub f: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub b: BigInt,
    /// `d` is below the asymptotic threshold, or the range is empty.
    pub warning: bool,
}

impl RowRange {
    pub fn contains(&self, i: u64) -> bool {
        BigInt::from(i) >= self.f && BigInt::from(i) <= self.b
    }

    pub fn width(&self) -> BigInt {
        let w: BigInt = &self.b - &self.f + 1;
        if w.sign() == num_bigint::Sign::Minus {
            BigInt::zero()
        } else {
            w
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PredictionTable {
    pub model: VeroneseModel,
    pub n: usize,
    #[serde(serialize_with = "serialize_biguint")]
    pub big_n: BigUint,
    pub sigma: u64,
    pub bottom_row: u32,
    pub rows: Vec<RowRange>,
    pub warnings: Vec<String>,
}

impl PredictionTable {
    /// `N - n`, the number of `S̄` generators.
    pub fn pdim(&self) -> BigInt {
        BigInt::from(self.big_n.clone()) - self.n
    }

    pub fn row(&self, q: u32) -> Option<&RowRange> {
        self.rows.iter().find(|r| r.q == q)
    }
}

pub fn prediction_table(model: &VeroneseModel) -> Result<PredictionTable> {
    let n = prediction_n(model)?;
    let d = model.d();
    let last = last_predicted_row(model)?;
    let below = d < asymptotic_threshold(n);
    let mut warnings = Vec::new();
    if below {
        warnings.push(format!(
            "d = {d} is below the asymptotic threshold 2n+4 = {}; ranges are not guaranteed",
            asymptotic_threshold(n)
        ));
    }
    if (d as usize) < n + 2 {
        warnings.push(format!(
            "d = {d} is below the regularity threshold n+2 = {}",
            n + 2
        ));
    }
    let mut rows = Vec::new();
    for q in 1..=last {
        let f = closed_f(model, q)?;
        let b = closed_b(model, q)?;
        let empty = f > b;
        if empty {
            warnings.push(format!("row {q}: empty range [{f}, {b}]"));
        }
        rows.push(RowRange {
            q,
            f,
            b,
            warning: below || empty,
        });
    }
    Ok(PredictionTable {
        model: model.clone(),
        n,
        big_n: big_n(model)?,
        sigma: model.symonds(),
        bottom_row: last,
        rows,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub monomial: Monomial,
    pub row: u64,
    pub divisors: Vec<usize>,
    pub annihilators: Vec<usize>,
    pub d_size: u64,
    pub a_size: u64,
    pub valid: bool,
}

impl Certificate {
    /// Certified columns `[|D|, |A|]` of row `row` when the certificate is valid.
    pub fn block(&self) -> Option<(u64, u64)> {
        self.valid.then_some((self.d_size, self.a_size))
    }
}

/// Checks `D(m) ⊆ A(m)`. Valid certificates give `beta_{i, i+q} != 0` for
/// `|D(m)| <= i <= |A(m)|`, `q` the degree of `m` in `M̄`.
pub fn certify(qm: &QuotientModule, m: &Monomial) -> Result<Certificate> {
    let r = divisor_report(qm, m)?;
    Ok(Certificate {
        monomial: m.clone(),
        row: qm.mbar_degree(m.exponents()),
        d_size: r.divisors.len() as u64,
        a_size: r.annihilators.len() as u64,
        valid: r.d_subset_a(),
        divisors: r.divisors,
        annihilators: r.annihilators,
    })
}

/// Anything with a projective dimension and per-row nonzero counts.
pub trait RowCounts {
    fn pdim(&self) -> BigInt;
    fn nonzero_in_row(&self, q: u32) -> BigInt;
}

impl RowCounts for PredictionTable {
    fn pdim(&self) -> BigInt {
        PredictionTable::pdim(self)
    }

    /// Certified count only, so `rho` of a prediction is a lower bound.
    fn nonzero_in_row(&self, q: u32) -> BigInt {
        if q == 0 {
            return BigInt::from(1);
        }
        self.row(q).map(RowRange::width).unwrap_or_default()
    }
}

/// `rho_q`: fraction of the columns `0..=pdim` with a nonzero entry in row `q`.
pub fn rho<T: RowCounts + ?Sized>(table: &T, q: u32) -> BigRational {
    BigRational::new(table.nonzero_in_row(q), table.pdim() + 1)
}

/// Growth of the row ends in `d` for fixed parity: `F_q ~ c d^front` and
/// `N - B_q ~ C d^back`. `back_exponent` is `None` when `B_q` is `N - n` or `N - n - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticRange {
    pub q: u32,
    pub d_odd: bool,
    pub front_exponent: u32,
    pub back_exponent: Option<u32>,
    pub front_coefficient: Option<f64>,
    pub back_coefficient: Option<f64>,
}

const FIT_D: u32 = 200;

/// Step-2 forward difference of order `e` at `d0`, divided by `e! 2^e`.
fn fitted_leading(e: u32, d0: u32, f: impl Fn(u32) -> Result<BigInt>) -> Result<Option<f64>> {
    let mut vals = Vec::with_capacity(e as usize + 1);
    for k in 0..=e {
        vals.push(f(d0 + 2 * k)?);
    }
    for _ in 0..e {
        vals = vals.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    let denom: f64 = (1..=e).map(|k| k as f64 * 2.0).product();
    Ok(vals[0].to_f64().map(|v| v / denom))
}

pub fn asymptotic_range(model: &VeroneseModel, q: u32) -> Result<AsymptoticRange> {
    let n = check_row(model, q)?;
    let d_odd = model.d() % 2 == 1;
    let front_exponent = match (q, d_odd) {
        (1, _) => 0,
        (_, true) => q - 2,
        (_, false) => q - 1,
    };
    let back_exponent = ((q as usize) < n).then(|| (n - q as usize) as u32);
    let d0 = FIT_D + d_odd as u32;
    let at = |d: u32| VeroneseModel::one_n_two(n, d);
    let front_coefficient = fitted_leading(front_exponent, d0, |d| closed_f(&at(d)?, q))?;
    let back_coefficient = match back_exponent {
        Some(e) => fitted_leading(e, d0, |d| {
            let m = at(d)?;
            Ok(BigInt::from(big_n(&m)?) - closed_b(&m, q)?)
        })?,
        None => None,
    };
    Ok(AsymptoticRange {
        q,
        d_odd,
        front_exponent,
        back_exponent,
        front_coefficient,
        back_coefficient,
    })
}
