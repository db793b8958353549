//! Monomials in a weighted polynomial ring `k[x_0, ..., x_n]` with `deg x_j = a_j`.
//!
//! Everything downstream is phrased in terms of exponent vectors, so this module
//! only has to get three things right: weighted degrees, enumeration of a graded
//! piece in a fixed order, and counting (closed form and brute force).

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degrees `(a_0, ..., a_n)` of the variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Weights(Vec<u32>);

impl Weights {
    pub fn new(degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidWeights("no variables".into()));
        }
        if degrees.iter().any(|&a| a == 0) {
            return Err(Error::InvalidWeights(format!(
                "{degrees:?} has a zero entry"
            )));
        }
        Ok(Weights(degrees))
    }

    /// `(1^n, 2)`: `n` variables of degree one followed by a single variable of degree two.
    pub fn one_n_two(n: usize) -> Self {
        let mut v = vec![1; n];
        v.push(2);
        Weights(v)
    }

    pub fn degrees(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&a| a as u64).sum()
    }

    /// `Some(n)` when the weights are exactly `(1^n, 2)`.
    pub fn as_one_n_two(&self) -> Option<usize> {
        let (last, init) = self.0.split_last()?;
        (*last == 2 && init.iter().all(|&a| a == 1)).then_some(init.len())
    }
}

impl TryFrom<Vec<u32>> for Weights {
    type Error = Error;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Weights::new(v)
    }
}

impl From<Weights> for Vec<u32> {
    fn from(w: Weights) -> Self {
        w.0
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        divides(&self.0, &other.0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Descending lex comparison with variable 0 most significant; `Less` means
    /// `self` comes first.
    pub fn lex_cmp_desc(&self, other: &Monomial) -> Ordering {
        other.0.cmp(&self.0)
    }

    /// Renders as `x0^4*x1*y` style text using `names` for the variables.
    pub fn display_with(&self, names: &[String]) -> String {
        let mut parts = Vec::new();
        for (e, name) in self.0.iter().zip(names) {
            match e {
                0 => {}
                1 => parts.push(name.clone()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Variable names: `x0, ..., x{n-1}, y` for `(1^n, 2)`, otherwise `x0, x1, ...`.
pub fn variable_names(w: &Weights) -> Vec<String> {
    let mut names: Vec<String> = (0..w.len()).map(|j| format!("x{j}")).collect();
    if w.as_one_n_two().is_some() {
        *names.last_mut().unwrap() = "y".into();
    }
    names
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.0.len()).map(|j| format!("x{j}")).collect();
        f.write_str(&self.display_with(&names))
    }
}

pub(crate) fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Query for the Hilbert function of `R_{i,1} = k[x_1..x_i, y]`, `deg y = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HilbertQuery {
    pub num_degree1_vars: u32,
    pub degree: u64,
}

pub fn weighted_degree(m: &Monomial, w: &Weights) -> Result<u64> {
    if m.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            got: m.len(),
        });
    }
    Ok(degree_of(m.exponents(), w.degrees()))
}

#[inline]
pub(crate) fn degree_of(exps: &[u32], w: &[u32]) -> u64 {
    exps.iter().zip(w).map(|(&e, &a)| e as u64 * a as u64).sum()
}

/// Calls `f` on every exponent vector of weighted degree `s` (respecting the
/// inclusive per-variable `max_exponents`), in descending lex order.
pub fn for_each_monomial<F: FnMut(&[u32])>(
    w: &Weights,
    s: u64,
    max_exponents: Option<&[u32]>,
    mut f: F,
) {
    let degs = w.degrees();
    let mut buf = vec![0u32; degs.len()];
    fn rec<F: FnMut(&[u32])>(
        j: usize,
        remaining: u64,
        degs: &[u32],
        maxes: Option<&[u32]>,
        buf: &mut [u32],
        f: &mut F,
    ) {
        let a = degs[j] as u64;
        let mut top = remaining / a;
        if let Some(m) = maxes {
            top = top.min(m[j] as u64);
        }
        if j + 1 == degs.len() {
            if remaining % a == 0 && remaining / a <= top {
                buf[j] = (remaining / a) as u32;
                f(buf);
            }
            return;
        }
        for e in (0..=top).rev() {
            buf[j] = e as u32;
            rec(j + 1, remaining - e * a, degs, maxes, buf, f);
        }
        buf[j] = 0;
    }
    rec(0, s, degs, max_exponents, &mut buf, &mut f);
}

/// Every monomial of weighted degree `s`, descending lex, optionally capped
/// (inclusive maxima per variable).
pub fn enumerate_monomials(w: &Weights, s: u64, caps: Option<&[u32]>) -> Vec<Monomial> {
    let mut out = Vec::new();
    for_each_monomial(w, s, caps, |e| out.push(Monomial(e.to_vec())));
    out
}

pub fn count_monomials(w: &Weights, s: u64, caps: Option<&[u32]>) -> u64 {
    let mut c = 0u64;
    for_each_monomial(w, s, caps, |_| c += 1);
    c
}

/// Exact binomial coefficient; zero when `x < 0` or `x < k`.
pub fn binomial(x: i64, k: u64) -> BigUint {
    if x < 0 || (x as u64) < k {
        return BigUint::zero();
    }
    let x = x as u64;
    let k = k.min(x - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= x - j;
        acc /= j + 1;
    }
    acc
}

/// `Hilb(s, R_{i,1}) = sum_{b=0}^{floor(s/2)} C(s - 2b + i - 1, i - 1)`.
///
/// With no degree-one variables the ring is `k[y]`, whose Hilbert function is
/// the indicator of even `s`.
pub fn hilbert_closed(q: HilbertQuery) -> BigUint {
    let i = q.num_degree1_vars as i64;
    let s = q.degree as i64;
    if i == 0 {
        return if s % 2 == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    (0..=s / 2)
        .map(|b| binomial(s - 2 * b + i - 1, (i - 1) as u64))
        .sum()
}

/// Signed helper: `Hilb(s, R_{i,1})` with `Hilb = 0` for negative `s`.
pub(crate) fn hilb(s: i64, i: u32) -> BigUint {
    if s < 0 {
        return BigUint::zero();
    }
    hilbert_closed(HilbertQuery {
        num_degree1_vars: i,
        degree: s as u64,
    })
}

/// Brute-force dimension of the degree-`s` piece: length of the enumeration.
pub fn hilbert_brute(w: &Weights, s: u64) -> u64 {
    count_monomials(w, s, None)
}
