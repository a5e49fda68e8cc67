//! Integer matrices and their Hermite and Smith normal forms.
//!
//! Matrices are read row-wise: the rows generate a lattice in `Z^n`, where `n` is the column
//! count. All entries are arbitrary-precision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    ncols: usize,
    rows: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn new(ncols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch {
                expected: ncols,
                found: bad.len(),
            });
        }
        Ok(IntMatrix { ncols, rows })
    }

    pub fn from_i64<R: AsRef<[i64]>>(ncols: usize, rows: impl IntoIterator<Item = R>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        IntMatrix::new(ncols, rows)
    }

    /// A matrix with no rows; generates the zero lattice.
    pub fn empty(ncols: usize) -> Self {
        IntMatrix {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        IntMatrix { ncols: n, rows }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn into_rows(self) -> Vec<Vec<BigInt>> {
        self.rows
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        Error::check_dim(self.ncols, other.nrows())?;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                (0..other.ncols)
                    .map(|j| r.iter().zip(&other.rows).map(|(a, o)| a * &o[j]).sum())
                    .collect()
            })
            .collect();
        Ok(IntMatrix {
            ncols: other.ncols,
            rows,
        })
    }

    /// Row concatenation.
    pub fn stack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        Error::check_dim(self.ncols, other.ncols)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(IntMatrix {
            ncols: self.ncols,
            rows,
        })
    }

    pub fn to_i128_rows(&self) -> Option<Vec<Vec<i128>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_i128()).collect())
            .collect()
    }

    /// Absolute determinant of a square matrix (fraction-free elimination).
    pub fn abs_det(&self) -> Result<BigInt> {
        Error::check_dim(self.ncols, self.nrows())?;
        let h = hnf(self);
        if h.nrows() < self.ncols {
            return Ok(BigInt::zero());
        }
        Ok((0..h.nrows()).map(|i| h.rows[i][i].clone()).product())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in r.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

fn sub_row_multiple(a: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let s = a[src].clone();
    for (x, y) in a[target].iter_mut().zip(&s) {
        *x -= q * y;
    }
}

fn negate_row(row: &mut [BigInt]) {
    for x in row.iter_mut() {
        *x = -&*x;
    }
}

/// Canonical row-style Hermite normal form.
///
/// Rows are in echelon form with positive pivots, every entry above a pivot lies in
/// `[0, pivot)`, and zero rows are dropped. Two matrices generate the same row lattice iff
/// their normal forms are equal.
pub fn hnf(m: &IntMatrix) -> IntMatrix {
    let mut a = m.rows.clone();
    let nrows = a.len();
    let mut r = 0;
    for c in 0..m.ncols {
        if r == nrows {
            break;
        }
        loop {
            let pivot = (r..nrows)
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()));
            let Some(p) = pivot else { break };
            a.swap(r, p);
            let mut clean = true;
            for i in r + 1..nrows {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[r][c]);
                    sub_row_multiple(&mut a, i, r, &q);
                    clean &= a[i][c].is_zero();
                }
            }
            if clean {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            negate_row(&mut a[r]);
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            sub_row_multiple(&mut a, i, r, &q);
        }
        r += 1;
    }
    a.truncate(r);
    IntMatrix {
        ncols: m.ncols,
        rows: a,
    }
}

/// Smith normal form `left · M · right = diag(d_1, …, d_k, 0, …)` with `d_1 | d_2 | … | d_k`.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Nonzero invariant factors, all positive.
    pub diagonal: Vec<BigInt>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

pub fn snf(m: &IntMatrix) -> Snf {
    let (nr, nc) = (m.nrows(), m.ncols());
    let mut a = m.rows.clone();
    let mut left = IntMatrix::identity(nr).rows;
    let mut right = IntMatrix::identity(nc).rows;

    let swap_cols = |mat: &mut [Vec<BigInt>], i: usize, j: usize| {
        for row in mat.iter_mut() {
            row.swap(i, j);
        }
    };
    // col_j -= q * col_t
    let sub_col = |mat: &mut [Vec<BigInt>], j: usize, t: usize, q: &BigInt| {
        for row in mat.iter_mut() {
            let v = &row[t] * q;
            row[j] -= v;
        }
    };

    let mut diagonal = Vec::new();
    for t in 0..nr.min(nc) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..nr {
                for j in t..nc {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Snf {
                    diagonal,
                    left: IntMatrix { ncols: nr, rows: left },
                    right: IntMatrix { ncols: nc, rows: right },
                };
            };
            a.swap(t, pi);
            left.swap(t, pi);
            swap_cols(&mut a, t, pj);
            swap_cols(&mut right, t, pj);

            let mut dirty = false;
            for i in t + 1..nr {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    sub_row_multiple(&mut a, i, t, &q);
                    sub_row_multiple(&mut left, i, t, &q);
                    dirty |= !a[i][t].is_zero();
                }
            }
            for j in t + 1..nc {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    sub_col(&mut a, j, t, &q);
                    sub_col(&mut right, j, t, &q);
                    dirty |= !a[t][j].is_zero();
                }
            }
            if dirty {
                continue;
            }
            let offender = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match offender {
                Some(i) => {
                    sub_row_multiple(&mut a, t, i, &BigInt::from(-1));
                    sub_row_multiple(&mut left, t, i, &BigInt::from(-1));
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            negate_row(&mut a[t]);
            negate_row(&mut left[t]);
        }
        diagonal.push(a[t][t].clone());
    }
    Snf {
        diagonal,
        left: IntMatrix { ncols: nr, rows: left },
        right: IntMatrix { ncols: nc, rows: right },
    }
}

/// True iff every row of `b` is an integer combination of the rows of `a`.
pub fn lattice_contains(a: &IntMatrix, b: &IntMatrix) -> Result<bool> {
    Error::check_dim(a.ncols, b.ncols)?;
    let h = hnf(a);
    Ok(b.rows.iter().all(|row| reduces_to_zero(&h, row)))
}

/// Reduction of `v` against a matrix already in Hermite normal form.
pub(crate) fn reduces_to_zero(h: &IntMatrix, v: &[BigInt]) -> bool {
    let mut v = v.to_vec();
    let mut r = 0;
    for c in 0..h.ncols {
        if r < h.nrows() && !h.rows[r][c].is_zero() {
            let (q, rem) = v[c].div_rem(&h.rows[r][c]);
            if !rem.is_zero() {
                return false;
            }
            if !q.is_zero() {
                for (x, y) in v.iter_mut().zip(&h.rows[r]) {
                    *x -= &q * y;
                }
            }
            r += 1;
        } else if !v[c].is_zero() {
            return false;
        }
    }
    true
}

/// `(rank, [Λ_sat : Λ])` for the row lattice `Λ` of `m`.
pub fn saturation_data(m: &IntMatrix) -> (usize, BigInt) {
    let s = snf(m);
    let torsion = s.diagonal.iter().product();
    (s.diagonal.len(), torsion)
}
