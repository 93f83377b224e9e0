//! Linear algebra support: exact Gaussian elimination over the coefficient
//! field, and the f64 eigensolvers used on truncated Jacobi matrices.

use alloc::vec;
use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{Float, One, Zero};

use crate::sample::SplitMix64;
use crate::scalars::FieldScalar;

/// Entry of an exact field, with context-aware zero/one.
pub trait FieldEntry: Clone + PartialEq {
    fn zero_of(&self) -> Self;
    fn one_of(&self) -> Self;
    fn add_ref(&self, o: &Self) -> Self;
    fn sub_ref(&self, o: &Self) -> Self;
    fn mul_ref(&self, o: &Self) -> Self;
    /// None exactly when the entry is zero.
    fn inv_entry(&self) -> Option<Self>;
    fn is_zero_entry(&self) -> bool;
}

impl FieldEntry for BigRational {
    fn zero_of(&self) -> Self {
        BigRational::zero()
    }
    fn one_of(&self) -> Self {
        BigRational::one()
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn inv_entry(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_zero_entry(&self) -> bool {
        self.is_zero()
    }
}

impl FieldEntry for FieldScalar {
    fn zero_of(&self) -> Self {
        FieldScalar::zero(self.ctx())
    }
    fn one_of(&self) -> Self {
        FieldScalar::one(self.ctx())
    }
    fn add_ref(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_ref(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_ref(&self, o: &Self) -> Self {
        self * o
    }
    fn inv_entry(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn is_zero_entry(&self) -> bool {
        self.is_zero()
    }
}

/// Dense row-major matrix over an exact field.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: FieldEntry> Mat<T> {
    pub fn filled(rows: usize, cols: usize, entry: T) -> Self {
        Mat {
            rows,
            cols,
            data: vec![entry; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        assert!(!self.data.is_empty() || !other.data.is_empty());
        let proto = self
            .data
            .first()
            .or_else(|| other.data.first())
            .expect("nonempty matrix");
        let zero = proto.zero_of();
        Mat::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = zero.clone();
            for k in 0..self.cols {
                acc = acc.add_ref(&self.at(r, k).mul_ref(other.at(k, c)));
            }
            acc
        })
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        let zero = self.data[0].zero_of();
        (0..self.rows)
            .map(|r| {
                let mut acc = zero.clone();
                for (c, x) in v.iter().enumerate() {
                    acc = acc.add_ref(&self.at(r, c).mul_ref(x));
                }
                acc
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols || self.data.is_empty() {
            return self.rows == self.cols;
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.at(r, c);
                if r == c {
                    if *e != e.one_of() {
                        return false;
                    }
                } else if !e.is_zero_entry() {
                    return false;
                }
            }
        }
        true
    }

    /// Reduced row echelon form; returns pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let pivot_row = (row..self.rows).find(|&r| !self.at(r, col).is_zero_entry());
            let Some(p) = pivot_row else { continue };
            for c in 0..self.cols {
                self.data.swap(row * self.cols + c, p * self.cols + c);
            }
            let inv = self.at(row, col).inv_entry().expect("pivot nonzero");
            for c in col..self.cols {
                let v = self.at(row, c).mul_ref(&inv);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.at(r, col).is_zero_entry() {
                    let factor = self.at(r, col).clone();
                    for c in col..self.cols {
                        let v = self.at(r, c).sub_ref(&factor.mul_ref(self.at(row, c)));
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel, as columns of the returned matrix.
    ///
    /// `proto` supplies the field context when the matrix has no entries.
    pub fn kernel_basis(&self, proto: &T) -> Mat<T> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let zero = proto.zero_of();
        let one = proto.one_of();
        let mut basis = Mat::filled(self.cols, free.len(), zero.clone());
        for (k, &fc) in free.iter().enumerate() {
            basis.set(fc, k, one.clone());
            for (r, &pc) in pivots.iter().enumerate() {
                // x_pc = −m[r][fc]
                let v = zero.sub_ref(m.at(r, fc));
                basis.set(pc, k, v);
            }
        }
        basis
    }

    /// Solves `A x = b` for square invertible `A`.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, b.len());
        if b.is_empty() {
            return Some(Vec::new());
        }
        let n = self.rows;
        let mut aug = Mat::from_fn(n, n + 1, |r, c| {
            if c < n {
                self.at(r, c).clone()
            } else {
                b[r].clone()
            }
        });
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| i != c) {
            return None;
        }
        Some((0..n).map(|r| aug.at(r, n).clone()).collect())
    }

    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let proto = &self.data[0];
        let zero = proto.zero_of();
        let mut m = self.clone();
        let mut det = proto.one_of();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.at(r, col).is_zero_entry()) else {
                return zero;
            };
            if p != col {
                for c in 0..n {
                    m.data.swap(col * n + c, p * n + c);
                }
                det = zero.sub_ref(&det);
            }
            let pivot = m.at(col, col).clone();
            det = det.mul_ref(&pivot);
            let inv = pivot.inv_entry().expect("pivot nonzero");
            for r in col + 1..n {
                if !m.at(r, col).is_zero_entry() {
                    let factor = m.at(r, col).mul_ref(&inv);
                    for c in col..n {
                        let v = m.at(r, c).sub_ref(&factor.mul_ref(m.at(col, c)));
                        m.set(r, c, v);
                    }
                }
            }
        }
        det
    }
}

// ---------------------------------------------------------------------------
// f64 eigensolvers
// ---------------------------------------------------------------------------

/// Eigenvalues and squared first components of the eigenvectors of a
/// symmetric tridiagonal matrix (implicit-shift QL with accumulation of the
/// first eigenvector row only). Returns pairs sorted by eigenvalue.
///
/// The weight attached to eigenvalue λᵢ is ⟨vᵢ, e₀⟩², i.e. the atom mass of
/// the spectral measure of the matrix at the cyclic vector e₀.
pub fn tridiag_eigen_weights(diag: &[f64], offdiag: &[f64]) -> Result<Vec<(f64, f64)>, &'static str> {
    let n = diag.len();
    assert_eq!(offdiag.len(), n.saturating_sub(1));
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        'outer: loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err("tridiagonal QL did not converge");
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = Float::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + Float::copysign(r, g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = Float::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    continue 'outer;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z.into_iter().map(|x| x * x)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
    Ok(pairs)
}

/// Counts eigenvalues strictly below `lambda` via the Sturm sequence.
pub fn sturm_count(diag: &[f64], offdiag: &[f64], lambda: f64) -> usize {
    let n = diag.len();
    if n == 0 {
        return 0;
    }
    let guard = 1e-300;
    let mut count = 0;
    let mut q = diag[0] - lambda;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let q_safe = if q.abs() < guard {
            Float::copysign(guard, q)
        } else {
            q
        };
        q = (diag[i] - lambda) - offdiag[i - 1] * offdiag[i - 1] / q_safe;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues of a symmetric tridiagonal matrix by Sturm bisection.
/// Independent of the QL path; used as a cross-check oracle.
pub fn sturm_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Vec<f64> {
    let n = diag.len();
    if n == 0 {
        return Vec::new();
    }
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for i in 0..n {
        let el = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let er = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - el - er);
        hi = hi.max(diag[i] + el + er);
    }
    lo -= 1.0;
    hi += 1.0;
    (0..n)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if b - a < 2.0 * f64::EPSILON * mid.abs().max(1.0) {
                    break;
                }
                if sturm_count(diag, offdiag, mid) <= k {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Eigenvalues of a dense symmetric matrix by the cyclic Jacobi method.
pub fn jacobi_eigenvalues(mat: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(mat.len(), n * n);
    let mut a = mat.to_vec();
    let idx = |r: usize, c: usize| r * n + c;
    for _sweep in 0..100 {
        let mut off = 0.0;
        for r in 0..n {
            for c in r + 1..n {
                off += a[idx(r, c)] * a[idx(r, c)];
            }
        }
        if off <= 1e-28 * (n as f64) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[idx(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[idx(q, q)] - a[idx(p, p)]) / (2.0 * apq);
                let t = Float::copysign(1.0, theta) / (theta.abs() + Float::sqrt(theta * theta + 1.0));
                let c = 1.0 / Float::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[idx(k, p)];
                    let akq = a[idx(k, q)];
                    a[idx(k, p)] = c * akp - s * akq;
                    a[idx(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[idx(p, k)];
                    let aqk = a[idx(q, k)];
                    a[idx(p, k)] = c * apk - s * aqk;
                    a[idx(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[idx(i, i)]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    eig
}

/// Operator norm (largest singular value) of a dense matrix, via the Jacobi
/// eigensolver on AᵀA.
pub fn dense_opnorm(mat: &[f64], rows: usize, cols: usize) -> f64 {
    assert_eq!(mat.len(), rows * cols);
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let mut gram = vec![0.0; cols * cols];
    for i in 0..cols {
        for j in 0..cols {
            let mut acc = 0.0;
            for k in 0..rows {
                acc += mat[k * cols + i] * mat[k * cols + j];
            }
            gram[i * cols + j] = acc;
        }
    }
    let eig = jacobi_eigenvalues(&gram, cols);
    Float::sqrt(eig.last().copied().unwrap_or(0.0).max(0.0))
}

/// Sparse matrix in triplet form with row/column apply.
pub struct SparseMat {
    pub rows: usize,
    pub cols: usize,
    pub triplets: Vec<(u32, u32, f64)>,
}

impl SparseMat {
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for &(r, c, val) in &self.triplets {
            out[r as usize] += val * v[c as usize];
        }
    }

    pub fn apply_transpose(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for &(r, c, val) in &self.triplets {
            out[c as usize] += val * v[r as usize];
        }
    }

    /// Largest singular value by power iteration on AᵀA. The estimate is a
    /// lower bound on the true norm, converging from below.
    pub fn opnorm_lower(&self, max_iters: usize, seed: u64) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        let mut rng = SplitMix64::new(seed);
        let mut v: Vec<f64> = (0..self.cols).map(|_| rng.f64() - 0.5).collect();
        let norm = Float::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        v.iter_mut().for_each(|x| *x /= norm);
        let mut av = vec![0.0; self.rows];
        let mut w = vec![0.0; self.cols];
        let mut sigma = 0.0f64;
        for _ in 0..max_iters {
            self.apply(&v, &mut av);
            let s = Float::sqrt(av.iter().map(|x| x * x).sum::<f64>());
            self.apply_transpose(&av, &mut w);
            let wn = Float::sqrt(w.iter().map(|x| x * x).sum::<f64>());
            if wn == 0.0 {
                return 0.0;
            }
            v.iter_mut().zip(&w).for_each(|(x, y)| *x = y / wn);
            if (s - sigma).abs() <= 1e-13 * s.max(1.0) {
                return s;
            }
            sigma = s;
        }
        sigma
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{rat, rat_int};
    use core::f64::consts::PI;

    #[test]
    fn rational_kernel_and_rank() {
        // [[1,2,3],[2,4,6]] has rank 1 and a 2-dimensional kernel.
        let m = Mat::from_fn(2, 3, |r, c| rat_int(((r + 1) * (c + 1)) as i64));
        assert_eq!(m.rank(), 1);
        let k = m.kernel_basis(&BigRational::zero());
        assert_eq!(k.cols(), 2);
        for j in 0..k.cols() {
            let col: Vec<BigRational> = (0..3).map(|r| k.at(r, j).clone()).collect();
            let img = m.matvec(&col);
            assert!(img.iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_and_det() {
        let m = Mat::from_fn(2, 2, |r, c| {
            rat_int(match (r, c) {
                (0, 0) => 2,
                (1, 1) => 1,
                _ => 1,
            })
        });
        assert_eq!(m.det(), rat_int(1));
        let x = m.solve(&[rat_int(3), rat_int(2)]).unwrap();
        assert_eq!(x, vec![rat_int(1), rat_int(1)]);
        let sing = Mat::from_fn(2, 2, |_, _| rat_int(1));
        assert_eq!(sing.det(), rat_int(0));
        assert!(sing.solve(&[rat_int(1), rat_int(0)]).is_none());
        assert_eq!(sing.solve(&[rat(1, 2), rat(1, 2)]), None);
    }

    #[test]
    fn free_jacobi_closed_form() {
        // s+s* truncated to N×N: eigenvalues 2cos(kπ/(N+1)),
        // weights 2/(N+1)·sin²(kπ/(N+1)).
        let n = 60;
        let d = vec![0.0; n];
        let e = vec![1.0; n - 1];
        let atoms = tridiag_eigen_weights(&d, &e).unwrap();
        let nn = (n + 1) as f64;
        for (k, (lambda, w)) in atoms.iter().enumerate() {
            let j = (n - k) as f64; // ascending eigenvalue order
            let expect = 2.0 * (j * PI / nn).cos();
            let expect_w = 2.0 / nn * (j * PI / nn).sin().powi(2);
            assert!((lambda - expect).abs() < 1e-10, "eig {k}");
            assert!((w - expect_w).abs() < 1e-10, "weight {k}");
        }
        let wsum: f64 = atoms.iter().map(|(_, w)| w).sum();
        assert!((wsum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ql_matches_sturm() {
        let mut rng = SplitMix64::new(42);
        for _ in 0..20 {
            let n = 3 + rng.below(40) as usize;
            let d: Vec<f64> = (0..n).map(|_| rng.f64() * 2.0 - 1.0).collect();
            let e: Vec<f64> = (0..n - 1).map(|_| rng.f64() + 0.05).collect();
            let ql: Vec<f64> = tridiag_eigen_weights(&d, &e)
                .unwrap()
                .into_iter()
                .map(|(l, _)| l)
                .collect();
            let st = sturm_eigenvalues(&d, &e);
            for (a, b) in ql.iter().zip(&st) {
                assert!((a - b).abs() < 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn jacobi_small_symmetric() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let eig = jacobi_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((eig[0] - 1.0).abs() < 1e-12);
        assert!((eig[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn opnorms_agree() {
        let mut rng = SplitMix64::new(9);
        let (r, c) = (8, 5);
        let m: Vec<f64> = (0..r * c).map(|_| rng.f64() * 2.0 - 1.0).collect();
        let dense = dense_opnorm(&m, r, c);
        let mut trip = Vec::new();
        for i in 0..r {
            for j in 0..c {
                trip.push((i as u32, j as u32, m[i * c + j]));
            }
        }
        let sp = SparseMat {
            rows: r,
            cols: c,
            triplets: trip,
        };
        let p = sp.opnorm_lower(3000, 1);
        assert!((dense - p).abs() < 1e-8, "{dense} vs {p}");
        assert!(p <= dense + 1e-9);
    }
}
