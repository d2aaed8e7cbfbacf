//! Complex linear solves.
//!
//! Dense systems go through nalgebra's LU with partial pivoting. The fitting
//! grid search additionally uses a banded LU specialization: the coupled
//! solve of a row-major UPA only touches matrix bands within `cols + 1` of
//! the diagonal, which turns each candidate evaluation from O(N^3) into
//! O(N b^2).
//!
//! Condition numbers are estimated as the ratio of the largest to the
//! smallest pivot magnitude. That is a cheap lower-bound heuristic, used
//! only for error reporting.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Solves beyond this pivot-ratio estimate are treated as failed.
const COND_LIMIT: f64 = 1e12;

fn check_cond(context: &'static str, cond: f64) -> Result<()> {
    if !cond.is_finite() || cond > COND_LIMIT {
        return Err(Error::Singular {
            context,
            cond_estimate: cond,
        });
    }
    Ok(())
}

fn pivot_ratio(u_diag: impl Iterator<Item = f64>) -> f64 {
    let mut max = 0.0_f64;
    let mut min = f64::INFINITY;
    for m in u_diag {
        max = max.max(m);
        min = min.min(m);
    }
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Dense LU solve with a matrix right-hand side.
pub(crate) fn solve_dense_matrix(
    a: &DMatrix<Complex64>,
    b: &DMatrix<Complex64>,
    context: &'static str,
) -> Result<DMatrix<Complex64>> {
    let lu = a.clone().lu();
    let cond = pivot_ratio((0..a.nrows()).map(|i| lu.lu_internal()[(i, i)].norm()));
    check_cond(context, cond)?;
    lu.solve(b).ok_or(Error::Singular {
        context,
        cond_estimate: f64::INFINITY,
    })
}

/// Dense LU solve with a vector right-hand side.
pub(crate) fn solve_dense_vector(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    context: &'static str,
) -> Result<DVector<Complex64>> {
    let lu = a.clone().lu();
    let cond = pivot_ratio((0..a.nrows()).map(|i| lu.lu_internal()[(i, i)].norm()));
    check_cond(context, cond)?;
    lu.solve(b).ok_or(Error::Singular {
        context,
        cond_estimate: f64::INFINITY,
    })
}

/// Square complex matrix stored by diagonals, rows `i` holding columns
/// `[i - kl, i + kl + ku]` (the extra `kl` upper diagonals absorb pivoting
/// fill). Entries outside the band are fixed zeros.
pub(crate) struct Banded {
    n: usize,
    kl: usize,
    ku_work: usize,
    stride: usize,
    data: Vec<Complex64>,
}

impl Banded {
    /// Zero matrix of size `n` with lower/upper bandwidth `kl`/`ku`.
    pub(crate) fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        assert!(n > 0);
        let kl = kl.min(n - 1);
        let ku = ku.min(n - 1);
        let ku_work = (kl + ku).min(n - 1);
        let stride = kl + ku_work + 1;
        Banded {
            n,
            kl,
            ku_work,
            stride,
            data: vec![Complex64::new(0.0, 0.0); n * stride],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku_work);
        i * self.stride + (j + self.kl - i)
    }

    /// Adds `v` to entry (i, j); (i, j) must lie inside the declared band.
    pub(crate) fn add(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Factorizes in place with partial pivoting.
    pub(crate) fn factorize(mut self, context: &'static str) -> Result<BandedLu> {
        let n = self.n;
        let kl = self.kl;
        let kw = self.ku_work;
        let mut pivots = vec![0usize; n];
        let mut max_pivot = 0.0_f64;
        let mut min_pivot = f64::INFINITY;

        for k in 0..n {
            let i_max = (k + kl).min(n - 1);
            let mut piv = k;
            let mut best = self.data[self.idx(k, k)].norm();
            for i in (k + 1)..=i_max {
                let m = self.data[self.idx(i, k)].norm();
                if m > best {
                    best = m;
                    piv = i;
                }
            }
            pivots[k] = piv;
            if best == 0.0 {
                return Err(Error::Singular {
                    context,
                    cond_estimate: f64::INFINITY,
                });
            }
            max_pivot = max_pivot.max(best);
            min_pivot = min_pivot.min(best);

            let j_max = (k + kw).min(n - 1);
            if piv != k {
                for j in k..=j_max {
                    let a = self.idx(k, j);
                    let b = self.idx(piv, j);
                    self.data.swap(a, b);
                }
            }
            let pivot_val = self.data[self.idx(k, k)];
            for i in (k + 1)..=i_max {
                let m = self.data[self.idx(i, k)] / pivot_val;
                self.data[self.idx(i, k)] = m;
                for j in (k + 1)..=j_max {
                    let upper = self.data[self.idx(k, j)];
                    let t = self.idx(i, j);
                    self.data[t] -= m * upper;
                }
            }
        }

        let cond = if min_pivot == 0.0 {
            f64::INFINITY
        } else {
            max_pivot / min_pivot
        };
        check_cond(context, cond)?;
        Ok(BandedLu {
            inner: self,
            pivots,
        })
    }
}

/// Banded LU factorization with its pivot sequence.
pub(crate) struct BandedLu {
    inner: Banded,
    pivots: Vec<usize>,
}

impl BandedLu {
    /// Solves A x = b in place.
    pub(crate) fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.inner.n;
        assert_eq!(b.len(), n);
        let kl = self.inner.kl;
        let kw = self.inner.ku_work;
        for k in 0..n {
            let piv = self.pivots[k];
            if piv != k {
                b.swap(k, piv);
            }
            let i_max = (k + kl).min(n - 1);
            let bk = b[k];
            for i in (k + 1)..=i_max {
                b[i] -= self.inner.data[self.inner.idx(i, k)] * bk;
            }
        }
        for i in (0..n).rev() {
            let j_max = (i + kw).min(n - 1);
            let mut acc = b[i];
            for j in (i + 1)..=j_max {
                acc -= self.inner.data[self.inner.idx(i, j)] * b[j];
            }
            b[i] = acc / self.inner.data[self.inner.idx(i, i)];
        }
    }
}
