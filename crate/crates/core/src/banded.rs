//! Banded matrices with LU factorisation under partial pivoting.

use crate::error::{Error, Result};
use crate::real::Real;

/// Square matrix with `lower` sub- and `upper` super-diagonals.
///
/// Rows are stored with room for the `lower` extra super-diagonals that row
/// interchanges can create during elimination.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix<T> {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> BandedMatrix<T> {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let width = 2 * lower + upper + 1;
        Self {
            n,
            lower,
            upper,
            width,
            data: vec![T::zero(); n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        // column offset relative to i - lower
        let off = j as isize - i as isize + self.lower as isize;
        if off < 0 || off as usize >= self.width || i >= self.n || j >= self.n {
            None
        } else {
            Some(i * self.width + off as usize)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.data[s])
    }

    /// Adds `v` to entry `(i, j)`; panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        let off = j as isize - i as isize;
        assert!(
            off >= -(self.lower as isize) && off <= self.upper as isize,
            "entry ({i}, {j}) outside band"
        );
        let s = self.slot(i, j).expect("entry inside matrix");
        self.data[s] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let s = self.slot(i, j).expect("entry inside band");
        self.data[s] = v;
    }

    /// Nonzero entries of row `i` of the declared band as `(column, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let lo = i.saturating_sub(self.lower);
        let hi = (i + self.upper).min(self.n - 1);
        (lo..=hi).map(move |j| (j, self.get(i, j))).filter(|(_, v)| *v != T::zero())
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n).map(|i| self.row(i).map(|(j, a)| a * x[j]).sum()).collect()
    }

    /// Solves `A x = b` by banded Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if b.len() != self.n {
            return Err(Error::Shape {
                what: "right-hand side".into(),
                expected: self.n,
                found: b.len(),
            });
        }
        let n = self.n;
        let mut a = self.data.clone();
        let mut x = b.to_vec();
        let w = self.width;
        let kl = self.lower;
        let idx = |i: usize, j: usize| i * w + (j + kl - i);
        let scale = self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let tiny = scale * T::epsilon() * T::count(n.max(1));

        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + self.upper + kl).min(n - 1);
            let mut p = k;
            let mut best = a[idx(k, k)].abs();
            for i in k + 1..=last_row {
                let v = a[idx(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > tiny) {
                return Err(Error::Singular { pivot: k });
            }
            if p != k {
                for j in k..=last_col {
                    a.swap(idx(k, j), idx(p, j));
                }
                x.swap(k, p);
            }
            let pivot = a[idx(k, k)];
            for i in k + 1..=last_row {
                let l = a[idx(i, k)] / pivot;
                if l == T::zero() {
                    continue;
                }
                a[idx(i, k)] = T::zero();
                for j in k + 1..=last_col {
                    let u = a[idx(k, j)];
                    a[idx(i, j)] -= l * u;
                }
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + self.upper + kl).min(n - 1);
            let mut s = x[k];
            for j in k + 1..=last_col {
                s -= a[idx(k, j)] * x[j];
            }
            x[k] = s / a[idx(k, k)];
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("banded solution".into()));
        }
        Ok(x)
    }
}
