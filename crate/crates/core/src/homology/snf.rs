//! Sparse elimination and Smith normal form.
//!
//! Unit pivots are eliminated first, shortest rows first and sparsest
//! column within a row, to limit fill-in. Entries are checked `i64`; on
//! overflow the whole elimination is redone over `BigInt`. Whatever is left
//! after the unit phase goes through a dense `BigInt` Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::complex::SparseMatrix;
use crate::error::{Error, Result};

pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    /// `self − f·b`, or `None` on overflow.
    fn sub_mul(&self, f: &Self, b: &Self) -> Option<Self>;
    /// `self · u⁻¹` for a unit `u`.
    fn div_unit(&self, u: &Self) -> Self;
    fn zero_like(&self) -> Self;
}

impl Coeff for i64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn sub_mul(&self, f: &Self, b: &Self) -> Option<Self> {
        f.checked_mul(*b).and_then(|p| self.checked_sub(p))
    }
    fn div_unit(&self, u: &Self) -> Self {
        self * u
    }
    fn zero_like(&self) -> Self {
        0
    }
}

impl Coeff for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.magnitude().is_one()
    }
    fn sub_mul(&self, f: &Self, b: &Self) -> Option<Self> {
        Some(self - f * b)
    }
    fn div_unit(&self, u: &Self) -> Self {
        self * u
    }
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
}

/// Element of GF(p) for a prime `p` carried alongside.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp {
    pub v: u64,
    pub p: u64,
}

impl Fp {
    pub fn new(x: i64, p: u64) -> Self {
        Fp { v: x.rem_euclid(p as i64) as u64, p }
    }

    fn inv(&self) -> Self {
        // Fermat
        let mut r = 1u64;
        let mut b = self.v;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % self.p;
            }
            b = b * b % self.p;
            e >>= 1;
        }
        Fp { v: r, p: self.p }
    }
}

impl Coeff for Fp {
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn is_unit(&self) -> bool {
        self.v != 0
    }
    fn sub_mul(&self, f: &Self, b: &Self) -> Option<Self> {
        let p = self.p;
        Some(Fp { v: (self.v + p - f.v * b.v % p) % p, p })
    }
    fn div_unit(&self, u: &Self) -> Self {
        Fp { v: self.v * u.inv().v % self.p, p: self.p }
    }
    fn zero_like(&self) -> Self {
        Fp { v: 0, p: self.p }
    }
}

type Row<C> = Vec<(u32, C)>;

/// Result of the unit-pivot phase: number of pivots and the rows left over.
pub struct Eliminated<C> {
    pub pivots: usize,
    pub rest: Vec<Row<C>>,
}

fn row_get<C>(row: &Row<C>, col: u32) -> Option<&C> {
    row.binary_search_by_key(&col, |&(c, _)| c).ok().map(|i| &row[i].1)
}

/// `a − f·b` on sorted sparse rows.
fn row_sub_mul<C: Coeff>(a: &Row<C>, f: &C, b: &Row<C>) -> Option<Row<C>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(u32::MAX, |x| x.0);
        let cb = b.get(j).map_or(u32::MAX, |x| x.0);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else {
            let base = if ca == cb {
                i += 1;
                a[i - 1].1.clone()
            } else {
                b[j].1.zero_like()
            };
            let v = base.sub_mul(f, &b[j].1)?;
            if !v.is_zero() {
                out.push((cb, v));
            }
            j += 1;
        }
    }
    Some(out)
}

/// Eliminates unit pivots from a sparse matrix given by rows.
///
/// Rows are visited shortest first; each takes as pivot the unit entry whose
/// column is shortest. Rows that gain a unit after being passed over are
/// revisited until no unit entries remain.
pub fn eliminate_units<C: Coeff>(rows: Vec<Row<C>>, ncols: usize) -> Option<Eliminated<C>> {
    let mut rows = rows;
    let mut active = vec![true; rows.len()];
    let mut col_rows: Vec<Vec<u32>> = vec![vec![]; ncols];
    for (i, r) in rows.iter().enumerate() {
        for (c, _) in r {
            col_rows[*c as usize].push(i as u32);
        }
    }
    let unlink = |col: &mut Vec<u32>, k: u32| {
        let pos = col.iter().position(|&x| x == k).expect("column index in sync");
        col.swap_remove(pos);
    };
    let mut order: Vec<u32> = (0..rows.len() as u32).collect();
    order.sort_by_key(|&i| rows[i as usize].len());
    let mut pivots = 0;
    let mut touched = vec![false; rows.len()];
    while !order.is_empty() {
        let mut skipped = vec![];
        for &i in &order {
            let iu = i as usize;
            touched[iu] = false;
            if !active[iu] {
                continue;
            }
            let best = rows[iu]
                .iter()
                .filter(|(_, v)| v.is_unit())
                .min_by_key(|(c, _)| col_rows[*c as usize].len())
                .map(|(c, v)| (*c, v.clone()));
            let Some((j, p)) = best else {
                skipped.push(i);
                continue;
            };
            let pivot_row = std::mem::take(&mut rows[iu]);
            active[iu] = false;
            for (c, _) in &pivot_row {
                unlink(&mut col_rows[*c as usize], i);
            }
            let others = std::mem::take(&mut col_rows[j as usize]);
            for &k in &others {
                let ku = k as usize;
                let a = row_get(&rows[ku], j).expect("column index in sync").clone();
                let f = a.div_unit(&p);
                let new = row_sub_mul(&rows[ku], &f, &pivot_row)?;
                let (mut x, mut y) = (0, 0);
                let old = &rows[ku];
                while x < old.len() || y < new.len() {
                    let co = old.get(x).map_or(u32::MAX, |e| e.0);
                    let cn = new.get(y).map_or(u32::MAX, |e| e.0);
                    if co < cn {
                        if co != j {
                            unlink(&mut col_rows[co as usize], k);
                        }
                        x += 1;
                    } else if cn < co {
                        col_rows[cn as usize].push(k);
                        y += 1;
                    } else {
                        x += 1;
                        y += 1;
                    }
                }
                rows[ku] = new;
                if rows[ku].is_empty() {
                    active[ku] = false;
                }
                touched[ku] = true;
            }
            debug_assert!(col_rows[j as usize].is_empty());
            pivots += 1;
        }
        // only rows changed since they were passed over can have gained a unit
        skipped.retain(|&i| touched[i as usize] && active[i as usize]);
        skipped.sort_by_key(|&i| rows[i as usize].len());
        order = skipped;
    }
    let rest = rows.into_iter().zip(active).filter(|(r, a)| *a && !r.is_empty()).map(|(r, _)| r).collect();
    Some(Eliminated { pivots, rest })
}

fn rows_of(m: &SparseMatrix) -> Vec<Row<i64>> {
    let mut rows = vec![vec![]; m.rows];
    for (j, col) in m.columns.iter().enumerate() {
        for &(i, v) in col {
            rows[i as usize].push((j as u32, v));
        }
    }
    rows
}

/// Invariant factors of a dense integer matrix (nonzero diagonal of its
/// Smith normal form, each dividing the next).
#[allow(clippy::needless_range_loop)]
pub fn dense_invariant_factors(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = vec![];
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !Zero::is_zero(&a[i][j]) && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        for r in a.iter_mut() {
            r.swap(t, bj);
        }
        let mut clean = true;
        let p = a[t][t].clone();
        for i in t + 1..rows {
            if Zero::is_zero(&a[i][t]) {
                continue;
            }
            let q = a[i][t].div_floor(&p);
            for j in t..cols {
                let d = &q * &a[t][j];
                a[i][j] -= d;
            }
            if !Zero::is_zero(&a[i][t]) {
                clean = false;
            }
        }
        for j in t + 1..cols {
            if Zero::is_zero(&a[t][j]) {
                continue;
            }
            let q = a[t][j].div_floor(&p);
            for i in t..rows {
                let d = &q * &a[i][t];
                a[i][j] -= d;
            }
            if !Zero::is_zero(&a[t][j]) {
                clean = false;
            }
        }
        if clean {
            diag.push(p.abs());
            t += 1;
        }
    }
    normalize_factors(diag)
}

/// Turns a diagonal into a divisibility chain with the same cokernel.
pub fn normalize_factors(mut d: Vec<BigInt>) -> Vec<BigInt> {
    d.retain(|x| !Zero::is_zero(x));
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = d[i].lcm(&d[j]);
            d[i] = g;
            d[j] = l;
        }
    }
    d.sort();
    d
}

/// Smith data of a matrix: rank and the invariant factors greater than one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Smith {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

fn finish<C: Coeff>(e: Eliminated<C>, to_big: impl Fn(&C) -> BigInt) -> Result<Smith> {
    let mut cols: Vec<u32> = e.rest.iter().flat_map(|r| r.iter().map(|x| x.0)).collect();
    cols.sort_unstable();
    cols.dedup();
    let dense: Vec<Vec<BigInt>> = e
        .rest
        .iter()
        .map(|r| {
            let mut row = vec![BigInt::zero(); cols.len()];
            for (c, v) in r {
                let j = cols.binary_search(c).expect("column present");
                row[j] = to_big(v);
            }
            row
        })
        .collect();
    if !dense.is_empty() {
        log::debug!("dense SNF on {}x{} remainder", dense.len(), cols.len());
    }
    let factors = dense_invariant_factors(dense);
    let mut torsion = vec![];
    for f in &factors {
        if !f.is_one() {
            torsion.push(f.to_u64().ok_or_else(|| Error::Overflow(format!("torsion coefficient {f}")))?);
        }
    }
    Ok(Smith { rank: e.pivots + factors.len(), torsion })
}

/// Rank and torsion coefficients of an integer matrix.
pub fn smith(m: &SparseMatrix) -> Result<Smith> {
    if m.is_zero() {
        return Ok(Smith::default());
    }
    if let Some(e) = eliminate_units(rows_of(m), m.cols) {
        return finish(e, |&v| BigInt::from(v));
    }
    log::debug!("i64 overflow in elimination, retrying over BigInt");
    let rows = rows_of(m).into_iter().map(|r| r.into_iter().map(|(c, v)| (c, BigInt::from(v))).collect()).collect();
    let e = eliminate_units::<BigInt>(rows, m.cols).expect("BigInt elimination cannot overflow");
    finish(e, |v| v.clone())
}

/// Rank over GF(p).
pub fn rank_mod_p(m: &SparseMatrix, p: u64) -> usize {
    let rows = rows_of(m)
        .into_iter()
        .map(|r| r.into_iter().map(|(c, v)| (c, Fp::new(v, p))).filter(|(_, v)| v.v != 0).collect())
        .collect();
    let e = eliminate_units::<Fp>(rows, m.cols).expect("field elimination cannot overflow");
    debug_assert!(e.rest.is_empty());
    e.pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn textbook_snf() {
        assert_eq!(smith(&SparseMatrix::from_dense(&[vec![2]])).unwrap(), Smith { rank: 1, torsion: vec![2] });
        let m = SparseMatrix::from_dense(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        // known SNF: diag(2, 6, 12)
        assert_eq!(smith(&m).unwrap(), Smith { rank: 3, torsion: vec![2, 6, 12] });
        assert_eq!(dense_invariant_factors(big(&[&[2, 0], &[0, 3]])), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn unit_phase_handles_sparse_blocks() {
        let m = SparseMatrix::from_dense(&[vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 1], vec![1, 0, 0, 1]]);
        // circulant: determinant 0, rank 3, cokernel Z
        assert_eq!(smith(&m).unwrap(), Smith { rank: 3, torsion: vec![] });
        let m = SparseMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        // determinant 2
        assert_eq!(smith(&m).unwrap(), Smith { rank: 3, torsion: vec![2] });
        assert_eq!(rank_mod_p(&m, 2), 2);
        assert_eq!(rank_mod_p(&m, 3), 3);
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let big = i64::MAX / 2;
        let m = SparseMatrix::from_dense(&[vec![1, big], vec![big, 1]]);
        // det = 1 − big², SNF = diag(1, big² − 1)
        let want = (BigInt::from(big) * BigInt::from(big) - 1u32).to_u64();
        let r = smith(&m);
        match want {
            Some(w) => assert_eq!(r.unwrap(), Smith { rank: 2, torsion: vec![w] }),
            None => assert!(matches!(r, Err(Error::Overflow(_)))),
        }
        let m = SparseMatrix::from_dense(&[vec![1, 4_000_000_000], vec![4_000_000_000, 1]]);
        let w = 4_000_000_000u64 * 4_000_000_000u64 - 1;
        assert_eq!(smith(&m).unwrap(), Smith { rank: 2, torsion: vec![w] });
    }

    #[test]
    fn normalization_is_a_divisibility_chain() {
        let d = normalize_factors(vec![4.into(), 6.into(), 0.into(), 9.into()]);
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(6), BigInt::from(36)]);
    }
}
