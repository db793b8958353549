//! Exact rank over `GF(p)`.

use super::PrimeField;

/// Matrices with at most this many cells use dense elimination.
pub const DENSE_CELL_LIMIT: usize = 250_000;

/// Sparse matrix in coordinate form. Values are stored reduced mod `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(u32, u32, u32)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n, n);
        for k in 0..n {
            m.entries.push((k as u32, k as u32, 1));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(u32, u32, u32)] {
        &self.entries
    }

    /// Adds `v` at `(r, c)`; zero values are dropped.
    pub fn push(&mut self, r: usize, c: usize, v: u32) {
        assert!(
            r < self.rows && c < self.cols,
            "index ({r}, {c}) out of range"
        );
        if v != 0 {
            self.entries.push((r as u32, c as u32, v));
        }
    }

    /// Row lists with duplicates summed and zeros removed, columns ascending.
    pub fn row_lists(&self, field: &PrimeField) -> Vec<Vec<(u32, u32)>> {
        let mut rows: Vec<Vec<(u32, u32)>> = vec![Vec::new(); self.rows];
        for &(r, c, v) in &self.entries {
            rows[r as usize].push((c, v));
        }
        for row in rows.iter_mut() {
            row.sort_unstable_by_key(|e| e.0);
            let mut out: Vec<(u32, u32)> = Vec::with_capacity(row.len());
            for &(c, v) in row.iter() {
                match out.last_mut() {
                    Some(last) if last.0 == c => last.1 = field.add(last.1, v),
                    _ => out.push((c, v)),
                }
            }
            out.retain(|e| e.1 != 0);
            *row = out;
        }
        rows
    }

    pub fn mul(&self, other: &SparseMatrix, field: &PrimeField) -> SparseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let b = other.row_lists(field);
        let mut out = SparseMatrix::new(self.rows, other.cols);
        for (r, row) in self.row_lists(field).into_iter().enumerate() {
            let mut acc: std::collections::BTreeMap<u32, u32> = Default::default();
            for (k, v) in row {
                for &(c, w) in &b[k as usize] {
                    let e = acc.entry(c).or_insert(0);
                    *e = field.add(*e, field.mul(v, w));
                }
            }
            for (c, v) in acc {
                out.push(r, c as usize, v);
            }
        }
        out
    }

    pub fn is_zero(&self, field: &PrimeField) -> bool {
        self.row_lists(field).iter().all(Vec::is_empty)
    }
}

pub fn rank_gfp(m: &SparseMatrix, field: &PrimeField) -> usize {
    rank_rows(m.row_lists(field), m.cols, field)
}

/// Rank of a matrix given as row lists with ascending, distinct, nonzero entries.
pub(crate) fn rank_rows(rows: Vec<Vec<(u32, u32)>>, ncols: usize, field: &PrimeField) -> usize {
    let nrows = rows.iter().filter(|r| !r.is_empty()).count();
    if nrows == 0 || ncols == 0 {
        return 0;
    }
    if nrows.saturating_mul(ncols) <= DENSE_CELL_LIMIT {
        dense_rank(&rows, ncols, field)
    } else {
        sparse_rank(rows, ncols, field)
    }
}

fn dense_rank(rows: &[Vec<(u32, u32)>], ncols: usize, field: &PrimeField) -> usize {
    let mut a: Vec<Vec<u32>> = rows
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let mut v = vec![0u32; ncols];
            for &(c, x) in r {
                v[c as usize] = x;
            }
            v
        })
        .collect();
    let nrows = a.len();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = field.inv(a[rank][col]);
        let pivot_row: Vec<u32> = a[rank].iter().map(|&x| field.mul(x, inv)).collect();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[col];
            if f != 0 {
                for c in col..ncols {
                    if pivot_row[c] != 0 {
                        row[c] = field.sub(row[c], field.mul(f, pivot_row[c]));
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Leading-column elimination after a static column ordering by ascending
/// column count; rows are processed shortest first.
fn sparse_rank(rows: Vec<Vec<(u32, u32)>>, ncols: usize, field: &PrimeField) -> usize {
    let mut count = vec![0u32; ncols];
    for row in &rows {
        for &(c, _) in row {
            count[c as usize] += 1;
        }
    }
    let mut order: Vec<u32> = (0..ncols as u32).collect();
    order.sort_by_key(|&c| (count[c as usize], c));
    let mut relabel = vec![0u32; ncols];
    for (new, &old) in order.iter().enumerate() {
        relabel[old as usize] = new as u32;
    }
    let mut rows: Vec<Vec<(u32, u32)>> = rows
        .into_iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let mut r: Vec<(u32, u32)> = r
                .into_iter()
                .map(|(c, v)| (relabel[c as usize], v))
                .collect();
            r.sort_unstable_by_key(|e| e.0);
            r
        })
        .collect();
    rows.sort_by_key(|r| (r.len(), r[0].0));

    let mut pivots: Vec<Option<Vec<(u32, u32)>>> = vec![None; ncols];
    let mut rank = 0;
    let mut scratch = Vec::new();
    for mut row in rows {
        loop {
            let Some(&(lead, v)) = row.first() else { break };
            match &pivots[lead as usize] {
                Some(p) => {
                    // row -= v * p, with p normalized to leading 1
                    scratch.clear();
                    let (mut a, mut b) = (1usize, 1usize);
                    while a < row.len() || b < p.len() {
                        let ca = row.get(a).map_or(u32::MAX, |e| e.0);
                        let cb = p.get(b).map_or(u32::MAX, |e| e.0);
                        if ca < cb {
                            scratch.push(row[a]);
                            a += 1;
                        } else if cb < ca {
                            scratch.push((cb, field.neg(field.mul(v, p[b].1))));
                            b += 1;
                        } else {
                            let x = field.sub(row[a].1, field.mul(v, p[b].1));
                            if x != 0 {
                                scratch.push((ca, x));
                            }
                            a += 1;
                            b += 1;
                        }
                    }
                    std::mem::swap(&mut row, &mut scratch);
                }
                None => {
                    let inv = field.inv(v);
                    for e in row.iter_mut() {
                        e.1 = field.mul(e.1, inv);
                    }
                    pivots[lead as usize] = Some(row);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f() -> PrimeField {
        PrimeField::new(32003).unwrap()
    }

    fn random_dense(rng: &mut ChaCha8Rng, r: usize, c: usize, p: u32) -> SparseMatrix {
        let mut m = SparseMatrix::new(r, c);
        for i in 0..r {
            for j in 0..c {
                m.push(i, j, rng.gen_range(0..p));
            }
        }
        m
    }

    #[test]
    fn trivial_ranks() {
        assert_eq!(rank_gfp(&SparseMatrix::new(4, 7), &f()), 0);
        assert_eq!(rank_gfp(&SparseMatrix::new(0, 0), &f()), 0);
        assert_eq!(rank_gfp(&SparseMatrix::identity(5), &f()), 5);
    }

    #[test]
    fn product_of_random_factors_has_inner_rank() {
        let field = f();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_dense(&mut rng, 50, 30, 32003);
        let b = random_dense(&mut rng, 30, 50, 32003);
        assert_eq!(rank_gfp(&a, &field), 30);
        assert_eq!(rank_gfp(&b, &field), 30);
        assert_eq!(rank_gfp(&a.mul(&b, &field), &field), 30);
    }

    #[test]
    fn dense_and_sparse_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for p in [101u32, 32003] {
            let field = PrimeField::new(p as u64).unwrap();
            for _ in 0..30 {
                let r = rng.gen_range(1..60);
                let c = rng.gen_range(1..60);
                let density = rng.gen_range(0.02..0.4);
                let mut rows = vec![Vec::new(); r];
                for (i, row) in rows.iter_mut().enumerate() {
                    for j in 0..c {
                        if rng.gen_bool(density) {
                            row.push((j as u32, rng.gen_range(1..p)));
                        }
                    }
                    // force dependencies
                    if i % 4 == 3 {
                        row.clear();
                    }
                }
                let extra: Vec<(u32, u32)> = {
                    let mut acc = vec![0u32; c];
                    for row in rows.iter().take(3) {
                        for &(j, v) in row {
                            acc[j as usize] = field.add(acc[j as usize], v);
                        }
                    }
                    acc.iter()
                        .enumerate()
                        .filter(|e| *e.1 != 0)
                        .map(|(j, &v)| (j as u32, v))
                        .collect()
                };
                rows.push(extra);
                assert_eq!(
                    dense_rank(&rows, c, &field),
                    sparse_rank(rows.clone(), c, &field)
                );
            }
        }
    }

    #[test]
    fn large_sparse_identity_blocks() {
        let field = f();
        // block diagonal with a repeated row in each block
        let mut m = SparseMatrix::new(3000, 2000);
        for b in 0..1000 {
            m.push(3 * b, 2 * b, 1);
            m.push(3 * b, 2 * b + 1, 2);
            m.push(3 * b + 1, 2 * b + 1, 5);
            m.push(3 * b + 2, 2 * b, 3);
            m.push(3 * b + 2, 2 * b + 1, 6);
        }
        assert_eq!(rank_gfp(&m, &field), 2000);
    }
}
