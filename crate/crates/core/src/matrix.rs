//! 2×2 matrices over any [`Field`].

use std::fmt;

use crate::exactfield::{Field, FieldError};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix2<F> {
    pub e: [[F; 2]; 2],
}

impl<F: Field> Matrix2<F> {
    pub fn new(e11: F, e12: F, e21: F, e22: F) -> Self {
        Matrix2 { e: [[e11, e12], [e21, e22]] }
    }

    pub fn identity() -> Self {
        Matrix2::new(F::one(), F::zero(), F::zero(), F::one())
    }

    pub fn zero() -> Self {
        Matrix2::new(F::zero(), F::zero(), F::zero(), F::zero())
    }

    pub fn get(&self, row: usize, col: usize) -> &F {
        &self.e[row][col]
    }

    pub fn mul(&self, rhs: &Matrix2<F>) -> Matrix2<F> {
        let a = &self.e;
        let b = &rhs.e;
        let entry = |r: usize, c: usize| a[r][0].clone() * b[0][c].clone() + a[r][1].clone() * b[1][c].clone();
        Matrix2::new(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1))
    }

    pub fn sub(&self, rhs: &Matrix2<F>) -> Matrix2<F> {
        self.zip(rhs, |a, b| a.clone() - b.clone())
    }

    pub fn add(&self, rhs: &Matrix2<F>) -> Matrix2<F> {
        self.zip(rhs, |a, b| a.clone() + b.clone())
    }

    pub fn scale(&self, k: &F) -> Matrix2<F> {
        self.map(|a| k.clone() * a.clone())
    }

    pub fn det(&self) -> F {
        let e = &self.e;
        e[0][0].clone() * e[1][1].clone() - e[0][1].clone() * e[1][0].clone()
    }

    pub fn map<G>(&self, mut f: impl FnMut(&F) -> G) -> Matrix2<G> {
        Matrix2 {
            e: [[f(&self.e[0][0]), f(&self.e[0][1])], [f(&self.e[1][0]), f(&self.e[1][1])]],
        }
    }

    pub fn try_map<G>(&self, mut f: impl FnMut(&F) -> Result<G, FieldError>) -> Result<Matrix2<G>, FieldError> {
        Ok(Matrix2 {
            e: [
                [f(&self.e[0][0])?, f(&self.e[0][1])?],
                [f(&self.e[1][0])?, f(&self.e[1][1])?],
            ],
        })
    }

    fn zip(&self, rhs: &Matrix2<F>, f: impl Fn(&F, &F) -> F) -> Matrix2<F> {
        Matrix2::new(
            f(&self.e[0][0], &rhs.e[0][0]),
            f(&self.e[0][1], &rhs.e[0][1]),
            f(&self.e[1][0], &rhs.e[1][0]),
            f(&self.e[1][1], &rhs.e[1][1]),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.entries().all(|(_, _, v)| v.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        self.e[0][1].is_zero() && self.e[1][0].is_zero()
    }

    /// `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &F)> {
        (0..2).flat_map(move |r| (0..2).map(move |c| (r, c, &self.e[r][c])))
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &[F; 2]) -> [F; 2] {
        let e = &self.e;
        [
            e[0][0].clone() * v[0].clone() + e[0][1].clone() * v[1].clone(),
            e[1][0].clone() * v[0].clone() + e[1][1].clone() * v[1].clone(),
        ]
    }
}

/// A basis of the right nullspace of `rows` (each of equal length), by exact
/// Gauss-Jordan elimination.
pub fn nullspace<F: Field>(mut rows: Vec<Vec<F>>, ncols: usize) -> Result<Vec<Vec<F>>, FieldError> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][col].inv()?;
        rows[r] = rows[r].iter().map(|v| v.clone() * inv.clone()).collect();
        for i in 0..rows.len() {
            if i == r || rows[i][col].is_zero() {
                continue;
            }
            let k = rows[i][col].clone();
            let (pivot_row, other) = if i < r {
                let (lo, hi) = rows.split_at_mut(r);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = rows.split_at_mut(i);
                (&lo[r], &mut hi[0])
            };
            for (o, pv) in other.iter_mut().zip(pivot_row.iter()) {
                if !pv.is_zero() {
                    *o = o.clone() - k.clone() * pv.clone();
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); ncols];
        v[free] = F::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[row][free].clone();
        }
        basis.push(v);
    }
    Ok(basis)
}

impl<F: Field + fmt::Display> fmt::Display for Matrix2<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.e[0][0], self.e[0][1], self.e[1][0], self.e[1][1]
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::GaussianRational;

    fn m(a: i64, b: i64, c: i64, d: i64) -> Matrix2<GaussianRational> {
        let g = GaussianRational::from_integer;
        Matrix2::new(g(a), g(b), g(c), g(d))
    }

    #[test]
    fn antisymmetric_block_cubes_to_minus_itself() {
        let n = m(0, 1, -1, 0);
        assert_eq!(n.mul(&n), m(-1, 0, 0, -1));
        assert_eq!(n.mul(&n).mul(&n), m(0, -1, 1, 0));
    }

    #[test]
    fn nullspace_of_rank_one_rows() {
        let g = GaussianRational::from_integer;
        let rows = vec![vec![g(1), g(2), g(3)], vec![g(2), g(4), g(6)]];
        let basis = nullspace(rows.clone(), 3).unwrap();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let dot = rows[0].iter().zip(v).fold(g(0), |acc, (a, b)| &acc + &(a * b));
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn determinant_is_multiplicative() {
        let a = m(2, 3, -1, 4);
        let b = m(0, 5, 7, -2);
        assert_eq!(a.mul(&b).det(), &a.det() * &b.det());
    }
}
