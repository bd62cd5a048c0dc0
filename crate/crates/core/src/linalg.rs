//! Exact rational linear algebra: sparse matrices, rank, and linear solves.
//!
//! Everything here is exact — `BigRational` coefficients, no floating point.
//! Ranks are the workhorse of the cohomology engine, so the sparse
//! elimination uses Markowitz-style pivoting to limit fill-in. A dense
//! fraction-free (Bareiss) elimination is provided as an independent oracle
//! and is also convenient for the small dense solves.

use num::rational::BigRational;
use num::{BigInt, One, Zero};

pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

// ==================== sparse matrices ====================

/// Sparse row-major matrix over the rationals.
///
/// Each row holds `(column, value)` pairs sorted by column with no explicit
/// zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMat {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<Vec<(usize, Rat)>>,
}

impl SparseMat {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMat { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, Rat::one())]).collect();
        SparseMat { nrows: n, ncols: n, rows }
    }

    pub fn from_dense(d: &[Vec<Rat>]) -> Self {
        let nrows = d.len();
        let ncols = d.first().map_or(0, |r| r.len());
        let rows = d
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, v.clone()))
                    .collect()
            })
            .collect();
        SparseMat { nrows, ncols, rows }
    }

    pub fn to_dense(&self) -> Vec<Vec<Rat>> {
        let mut d = vec![vec![Rat::zero(); self.ncols]; self.nrows];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                d[i][*j] = v.clone();
            }
        }
        d
    }

    /// Add `v` to entry `(i, j)`, keeping the row sorted and zero-free.
    pub fn add_entry(&mut self, i: usize, j: usize, v: Rat) {
        if v.is_zero() {
            return;
        }
        let row = &mut self.rows[i];
        match row.binary_search_by_key(&j, |e| e.0) {
            Ok(pos) => {
                row[pos].1 += v;
                if row[pos].1.is_zero() {
                    row.remove(pos);
                }
            }
            Err(pos) => row.insert(pos, (j, v)),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> Rat {
        match self.rows[i].binary_search_by_key(&j, |e| e.0) {
            Ok(pos) => self.rows[i][pos].1.clone(),
            Err(_) => Rat::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn transpose(&self) -> SparseMat {
        let mut t = SparseMat::zero(self.ncols, self.nrows);
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                t.rows[*j].push((i, v.clone()));
            }
        }
        t
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &SparseMat) -> SparseMat {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch in matmul");
        let mut out = SparseMat::zero(self.nrows, other.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc: std::collections::BTreeMap<usize, Rat> = Default::default();
            for (k, a) in row {
                for (j, b) in &other.rows[*k] {
                    let e = acc.entry(*j).or_insert_with(Rat::zero);
                    *e += a * b;
                }
            }
            out.rows[i] = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        out
    }

    /// self − other.
    pub fn sub(&self, other: &SparseMat) -> SparseMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut out = self.clone();
        for (i, row) in other.rows.iter().enumerate() {
            for (j, v) in row {
                out.add_entry(i, *j, -v.clone());
            }
        }
        out
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Rat) -> SparseMat {
        if c.is_zero() {
            return SparseMat::zero(self.nrows, self.ncols);
        }
        let mut out = self.clone();
        for row in out.rows.iter_mut() {
            for (_, v) in row.iter_mut() {
                *v *= c;
            }
        }
        out
    }

    /// Row index of the first nonzero entry in a column, if any.
    pub fn col_first_row(&self, col: usize) -> Option<usize> {
        self.rows.iter().position(|row| {
            row.binary_search_by_key(&col, |e| e.0)
                .map(|p| !row[p].1.is_zero())
                .unwrap_or(false)
        })
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.ncols);
        self.rows
            .iter()
            .map(|row| {
                let mut s = Rat::zero();
                for (j, a) in row {
                    if !v[*j].is_zero() {
                        s += a * &v[*j];
                    }
                }
                s
            })
            .collect()
    }

    /// Exact rank by sparse Gaussian elimination.
    ///
    /// Pivots are chosen greedily to minimize a Markowitz-style fill score
    /// (shortest eligible row, then rarest column within it).
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<(usize, Rat)>> =
            self.rows.iter().filter(|r| !r.is_empty()).cloned().collect();
        let mut rank = 0;
        let mut col_count = vec![0usize; self.ncols];
        loop {
            rows.retain(|r| !r.is_empty());
            if rows.is_empty() {
                break;
            }
            for c in col_count.iter_mut() {
                *c = 0;
            }
            for r in &rows {
                for (j, _) in r {
                    col_count[*j] += 1;
                }
            }
            // Pick the pivot in the shortest row; among its columns take the
            // one appearing in the fewest other rows.
            let (pi, _) = rows
                .iter()
                .enumerate()
                .min_by_key(|(_, r)| r.len())
                .expect("nonempty");
            let prow = rows.swap_remove(pi);
            let &(pcol, ref pval) = prow
                .iter()
                .min_by_key(|(j, _)| col_count[*j])
                .expect("nonempty row");
            let pval = pval.clone();
            rank += 1;
            for r in rows.iter_mut() {
                let coef = match r.binary_search_by_key(&pcol, |e| e.0) {
                    Ok(pos) => r[pos].1.clone(),
                    Err(_) => continue,
                };
                let factor = &coef / &pval;
                *r = sub_scaled(r, &prow, &factor);
            }
        }
        rank
    }
}

/// `a - factor * b` for sorted sparse rows.
fn sub_scaled(a: &[(usize, Rat)], b: &[(usize, Rat)], factor: &Rat) -> Vec<(usize, Rat)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((ca, va)), Some((cb, vb))) if ca == cb => {
                let v = va - factor * vb;
                if !v.is_zero() {
                    out.push((*ca, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ca, va)), Some((cb, _))) if ca < cb => {
                out.push((*ca, va.clone()));
                i += 1;
            }
            (Some(_), Some((cb, vb))) => {
                let v = -(factor * vb);
                if !v.is_zero() {
                    out.push((*cb, v));
                }
                j += 1;
            }
            (Some((ca, va)), None) => {
                out.push((*ca, va.clone()));
                i += 1;
            }
            (None, Some((cb, vb))) => {
                let v = -(factor * vb);
                if !v.is_zero() {
                    out.push((*cb, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

// ==================== dense elimination ====================

/// Rank by dense fraction-free (Bareiss) elimination over the integers.
///
/// Independent of the sparse path; used as a cross-check oracle in tests.
pub fn bareiss_rank(dense: &[Vec<Rat>]) -> usize {
    let nrows = dense.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = dense[0].len();
    // Clear denominators row by row: rank is unchanged.
    let mut m: Vec<Vec<BigInt>> = dense
        .iter()
        .map(|row| {
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, v| num::integer::lcm(acc, v.denom().clone()));
            row.iter()
                .map(|v| v.numer() * (&lcm / v.denom()))
                .collect()
        })
        .collect();
    let mut rank = 0;
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..ncols {
        if row >= nrows {
            break;
        }
        // Find a pivot in this column.
        let piv = (row..nrows).find(|&r| !m[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        m.swap(row, piv);
        for r in row + 1..nrows {
            for c in col + 1..ncols {
                let val = &m[row][col] * &m[r][c] - &m[r][col] * &m[row][c];
                m[r][c] = &val / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[row][col].clone();
        row += 1;
        rank += 1;
    }
    rank
}

/// Solve `a * x = b` by dense Gaussian elimination. Returns `None` if the
/// system is inconsistent. For underdetermined systems, free variables are
/// set to zero (deterministically, in column order).
pub fn solve_dense(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let sols = solve_dense_multi(a, &b.iter().map(|v| vec![v.clone()]).collect::<Vec<_>>())?;
    Some(sols.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Solve `a * X = B` for a matrix of right-hand sides.
///
/// `a` is `n × m`, `rhs` is `n × k`; the result is `m × k`. Returns `None`
/// if any column system is inconsistent.
pub fn solve_dense_multi(a: &[Vec<Rat>], rhs: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let k = rhs.first().map_or(0, |r| r.len());
    assert_eq!(rhs.len(), nrows, "rhs row count mismatch");
    // Augmented matrix [a | rhs].
    let mut m: Vec<Vec<Rat>> = (0..nrows)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend(rhs[i].iter().cloned());
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut row = 0;
    for col in 0..ncols {
        if row >= nrows {
            break;
        }
        let piv = (row..nrows).find(|&r| !m[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        m.swap(row, piv);
        let inv = m[row][col].recip();
        for c in col..ncols + k {
            let v = &m[row][c] * &inv;
            m[row][c] = v;
        }
        for r in 0..nrows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..ncols + k {
                    let v = &m[r][c] - &factor * &m[row][c];
                    m[r][c] = v;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
    }
    // Consistency: zero rows of `a` must have zero rhs.
    for r in row..nrows {
        for c in ncols..ncols + k {
            if !m[r][c].is_zero() {
                return None;
            }
        }
    }
    let mut x = vec![vec![Rat::zero(); k]; ncols];
    for (r, c) in pivots {
        for j in 0..k {
            x[c][j] = m[r][ncols + j].clone();
        }
    }
    Some(x)
}

// ==================== modular arithmetic (test oracle support) ====================

const MOD_P: u64 = 2_147_483_629; // prime below 2^31

fn rat_mod_p(v: &Rat) -> Option<u64> {
    use num::ToPrimitive;
    let p = BigInt::from(MOD_P);
    let num = (((v.numer() % &p) + &p) % &p).to_u64()?;
    let den = (((v.denom() % &p) + &p) % &p).to_u64()?;
    if den == 0 {
        return None; // denominator divisible by p; caller falls back to exact
    }
    Some((num as u128 * mod_inv(den) as u128 % MOD_P as u128) as u64)
}

fn mod_pow(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    b %= MOD_P;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % MOD_P as u128) as u64;
        }
        b = (b as u128 * b as u128 % MOD_P as u128) as u64;
        e >>= 1;
    }
    acc
}

fn mod_inv(a: u64) -> u64 {
    mod_pow(a, MOD_P - 2)
}

/// Rank over the prime field F_p. Returns `None` if some denominator is
/// divisible by p (then only the exact path is valid). The result is a lower
/// bound for the rational rank, with equality away from a measure-zero set
/// of bad primes; tests use it as a fast cross-check.
pub fn rank_mod_p(m: &SparseMat) -> Option<usize> {
    let mut rows: Vec<Vec<(usize, u64)>> = Vec::with_capacity(m.nrows);
    for row in &m.rows {
        let mut r = Vec::with_capacity(row.len());
        for (j, v) in row {
            let x = rat_mod_p(v)?;
            if x != 0 {
                r.push((*j, x));
            }
        }
        if !r.is_empty() {
            rows.push(r);
        }
    }
    let mut rank = 0;
    while let Some(pi) = {
        rows.retain(|r| !r.is_empty());
        (0..rows.len()).min_by_key(|&i| rows[i].len())
    } {
        if rows.is_empty() {
            break;
        }
        let prow = rows.swap_remove(pi);
        let (pcol, pval) = prow[0];
        let pinv = mod_inv(pval);
        rank += 1;
        for r in rows.iter_mut() {
            if let Ok(pos) = r.binary_search_by_key(&pcol, |e| e.0) {
                let factor = (r[pos].1 as u128 * pinv as u128 % MOD_P as u128) as u64;
                let mut out = Vec::with_capacity(r.len() + prow.len());
                let (mut i, mut j) = (0, 0);
                while i < r.len() || j < prow.len() {
                    match (r.get(i), prow.get(j)) {
                        (Some(&(ca, va)), Some(&(cb, vb))) if ca == cb => {
                            let sub = (factor as u128 * vb as u128 % MOD_P as u128) as u64;
                            let v = (va + MOD_P - sub) % MOD_P;
                            if v != 0 {
                                out.push((ca, v));
                            }
                            i += 1;
                            j += 1;
                        }
                        (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                            out.push((ca, va));
                            i += 1;
                        }
                        (Some(_), Some(&(cb, vb))) => {
                            let sub = (factor as u128 * vb as u128 % MOD_P as u128) as u64;
                            let v = (MOD_P - sub) % MOD_P;
                            if v != 0 {
                                out.push((cb, v));
                            }
                            j += 1;
                        }
                        (Some(&(ca, va)), None) => {
                            out.push((ca, va));
                            i += 1;
                        }
                        (None, Some(&(cb, vb))) => {
                            let sub = (factor as u128 * vb as u128 % MOD_P as u128) as u64;
                            let v = (MOD_P - sub) % MOD_P;
                            if v != 0 {
                                out.push((cb, v));
                            }
                            j += 1;
                        }
                        (None, None) => unreachable!(),
                    }
                }
                *r = out;
            }
        }
    }
    Some(rank)
}
