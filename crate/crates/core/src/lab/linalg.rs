//! Dense exact linear algebra: rank and nullspace over any `Field`, and
//! fraction-free integer elimination used by the rational rank override.

use super::field::Field;
use num_bigint::BigInt;
use num_traits::Zero;
use std::ops::{Index, IndexMut};

/// Row-major dense matrix over field elements.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<E> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn filled(rows: usize, cols: usize, fill: E) -> Mat<E> {
        Mat {
            rows,
            cols,
            data: vec![fill; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Mat<E> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn into_data(self) -> Vec<E> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl<E> Index<[usize; 2]> for Mat<E> {
    type Output = E;
    fn index(&self, ix: [usize; 2]) -> &E {
        &self.data[ix[0] * self.cols + ix[1]]
    }
}

impl<E> IndexMut<[usize; 2]> for Mat<E> {
    fn index_mut(&mut self, ix: [usize; 2]) -> &mut E {
        &mut self.data[ix[0] * self.cols + ix[1]]
    }
}

/// Rank via the field's own elimination routine.
pub fn rank_field<F: Field>(f: &F, m: &Mat<F::Elem>) -> usize {
    let mut data = m.data.clone();
    f.mat_rank(m.rows, m.cols, &mut data)
}

/// Basis of the right nullspace, one column vector per free column of the
/// reduced form, with free columns taken in ascending order.
pub fn nullspace_field<F: Field>(f: &F, m: &Mat<F::Elem>) -> Vec<Vec<F::Elem>> {
    let rows = m.rows;
    let cols = m.cols;
    let mut a = m.data.clone();
    let mut pivot_col_of_row = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !f.is_zero(&a[i * cols + c])) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.swap(r * cols + j, piv * cols + j);
            }
        }
        let inv = f.inv(&a[r * cols + c]).expect("pivot is nonzero");
        for j in c..cols {
            a[r * cols + j] = f.mul(&a[r * cols + j], &inv);
        }
        for i in 0..rows {
            if i == r || f.is_zero(&a[i * cols + c]) {
                continue;
            }
            let factor = a[i * cols + c].clone();
            for j in c..cols {
                let t = f.mul(&factor, &a[r * cols + j]);
                a[i * cols + j] = f.sub(&a[i * cols + j], &t);
            }
        }
        pivot_col_of_row.push(c);
        r += 1;
    }
    let pivot_set: Vec<bool> = {
        let mut v = vec![false; cols];
        for &c in &pivot_col_of_row {
            v[c] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set[free] {
            continue;
        }
        let mut vec_out = vec![f.zero(); cols];
        vec_out[free] = f.one();
        for (row, &pc) in pivot_col_of_row.iter().enumerate() {
            vec_out[pc] = f.neg(&a[row * cols + free]);
        }
        basis.push(vec_out);
    }
    basis
}

/// Rank of an integer matrix by Bareiss fraction-free elimination; exact
/// and far cheaper than rational pivoting on the same input.
pub fn bareiss_rank(rows: usize, cols: usize, a: &mut [BigInt]) -> usize {
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.swap(r * cols + j, piv * cols + j);
            }
        }
        for i in (r + 1)..rows {
            for j in (c + 1)..cols {
                let num = &a[r * cols + c] * &a[i * cols + j] - &a[i * cols + c] * &a[r * cols + j];
                a[i * cols + j] = num / &prev;
            }
            a[i * cols + c] = BigInt::zero();
        }
        prev = a[r * cols + c].clone();
        r += 1;
    }
    r
}
