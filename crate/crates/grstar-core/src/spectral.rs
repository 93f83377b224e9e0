//! The spectral side: the free Jacobi operator s+s*, its eigenpolynomials,
//! the perturbed fibers c_t with corner entries t/δ and √(1−δ⁻²), the
//! cyclicity polynomials S_{n,t}, the h(z) outlier-exclusion bound, and
//! discrete spectral measures of truncations.
//!
//! Everything stated exact runs in the coefficient ring with zero tolerance;
//! float diagnostics carry explicit tolerances at their call sites.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::linalg::{tridiag_eigen_weights, FieldEntry};
use crate::pairings::catalan;
use crate::scalars::{Ctx, DeltaContext, FieldScalar, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectralError {
    /// δ must be > 1 for the perturbed fiber operators.
    InvalidDelta,
    /// t must lie in [−2, 2], the support of the semicircle distribution.
    TOutOfRange,
    /// Truncation too small.
    TruncationTooSmall,
    /// The eigensolver did not converge.
    EigenFailure,
}

impl core::fmt::Display for SpectralError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SpectralError::InvalidDelta => write!(f, "delta must be > 1"),
            SpectralError::TOutOfRange => write!(f, "t must lie in [-2, 2]"),
            SpectralError::TruncationTooSmall => write!(f, "truncation size too small"),
            SpectralError::EigenFailure => write!(f, "eigensolver failed to converge"),
        }
    }
}

/// Symmetric tridiagonal truncation with exact entries and float views.
#[derive(Debug, Clone)]
pub struct JacobiMatrix {
    diag: Vec<FieldScalar>,
    offdiag: Vec<FieldScalar>,
    ctx: Ctx,
}

impl JacobiMatrix {
    /// Truncation of the free Jacobi operator s+s*: zero diagonal, unit
    /// off-diagonal.
    pub fn free(ctx: &Ctx, n: usize) -> Result<Self, SpectralError> {
        if n < 2 {
            return Err(SpectralError::TruncationTooSmall);
        }
        Ok(JacobiMatrix {
            diag: vec![FieldScalar::zero(ctx); n],
            offdiag: vec![FieldScalar::one(ctx); n - 1],
            ctx: ctx.clone(),
        })
    }

    /// N×N truncation of the fiber operator c_t: diagonal (t/δ, 0, 0, …),
    /// off-diagonal (√(1−δ⁻²), 1, 1, …).
    pub fn ct(t: &Rational, delta: &Rational, n: usize) -> Result<Self, SpectralError> {
        if delta <= &Rational::one() {
            return Err(SpectralError::InvalidDelta);
        }
        if t.abs() > Rational::from_integer(2.into()) {
            return Err(SpectralError::TOutOfRange);
        }
        if n < 2 {
            return Err(SpectralError::TruncationTooSmall);
        }
        let ctx = DeltaContext::new(delta.clone()).map_err(|_| SpectralError::InvalidDelta)?;
        let mut diag = vec![FieldScalar::zero(&ctx); n];
        diag[0] = FieldScalar::from_rational(&ctx, t / delta);
        let mut offdiag = vec![FieldScalar::one(&ctx); n - 1];
        offdiag[0] = FieldScalar::sqrt_one_minus_inv_sq(&ctx);
        Ok(JacobiMatrix { diag, offdiag, ctx })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn diag(&self) -> &[FieldScalar] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[FieldScalar] {
        &self.offdiag
    }

    pub fn diag_f64(&self) -> Vec<f64> {
        self.diag.iter().map(FieldScalar::to_f64).collect()
    }

    pub fn offdiag_f64(&self) -> Vec<f64> {
        self.offdiag.iter().map(FieldScalar::to_f64).collect()
    }

    /// Exact matrix-vector product.
    pub fn apply_exact(&self, v: &[FieldScalar]) -> Vec<FieldScalar> {
        let n = self.n();
        assert_eq!(v.len(), n);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = &self.diag[i] * &v[i];
            if i > 0 {
                acc += &(&self.offdiag[i - 1] * &v[i - 1]);
            }
            if i + 1 < n {
                acc += &(&self.offdiag[i] * &v[i + 1]);
            }
            out.push(acc);
        }
        out
    }

    /// Exact basis vector e_k.
    pub fn basis_vector(&self, k: usize) -> Vec<FieldScalar> {
        let mut v = vec![FieldScalar::zero(&self.ctx); self.n()];
        v[k] = FieldScalar::one(&self.ctx);
        v
    }

    /// ⟨Jᵐ e₀, e₀⟩ in floating point.
    pub fn moment_f64(&self, m: usize) -> f64 {
        let d = self.diag_f64();
        let e = self.offdiag_f64();
        let n = self.n();
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        for _ in 0..m {
            let mut next = vec![0.0; n];
            for i in 0..n {
                let mut acc = d[i] * v[i];
                if i > 0 {
                    acc += e[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    acc += e[i] * v[i + 1];
                }
                next[i] = acc;
            }
            v = next;
        }
        v[0]
    }
}

/// Atoms (eigenvalue, weight) of the spectral measure of a truncation at the
/// cyclic vector e₀; weights are squared first eigenvector components.
#[derive(Debug, Clone)]
pub struct DiscreteSpectralMeasure {
    pub atoms: Vec<(f64, f64)>,
}

impl DiscreteSpectralMeasure {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    pub fn max_weight(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| *w).fold(0.0, f64::max)
    }

    pub fn min_eig(&self) -> f64 {
        self.atoms.first().map(|(l, _)| *l).unwrap_or(f64::NAN)
    }

    pub fn max_eig(&self) -> f64 {
        self.atoms.last().map(|(l, _)| *l).unwrap_or(f64::NAN)
    }

    /// Σ w·λⁿ.
    pub fn moment(&self, n: usize) -> f64 {
        self.atoms.iter().map(|(l, w)| w * l.powi(n as i32)).sum()
    }

    /// Largest |Σ w·λⁿ − ⟨Jⁿe₀,e₀⟩| over n ≤ upto.
    pub fn moment_error(&self, j: &JacobiMatrix, upto: usize) -> f64 {
        (0..=upto)
            .map(|n| (self.moment(n) - j.moment_f64(n)).abs())
            .fold(0.0, f64::max)
    }
}

/// Full symmetric eigen-decomposition of the truncation, keeping the e₀
/// overlaps.
pub fn spectral_measure(j: &JacobiMatrix) -> Result<DiscreteSpectralMeasure, SpectralError> {
    let atoms = tridiag_eigen_weights(&j.diag_f64(), &j.offdiag_f64())
        .map_err(|_| SpectralError::EigenFailure)?;
    Ok(DiscreteSpectralMeasure { atoms })
}

/// Max atom weight of the spectral measure of the c_t truncation: the
/// finite-scale proxy for absence of point spectrum (decreasing in N).
pub fn pp_mass_bound(t: &Rational, delta: &Rational, n: usize) -> Result<f64, SpectralError> {
    if n < 100 {
        return Err(SpectralError::TruncationTooSmall);
    }
    let j = JacobiMatrix::ct(t, delta, n)?;
    Ok(spectral_measure(&j)?.max_weight())
}

// ---------------------------------------------------------------------------
// Polynomials
// ---------------------------------------------------------------------------

/// Dense univariate polynomial over an exact field, ascending coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: FieldEntry> Poly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty());
        Poly { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Poly { coeffs: vec![c] }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        let mut d = self.coeffs.len() - 1;
        while d > 0 && self.coeffs[d].is_zero_entry() {
            d -= 1;
        }
        d
    }

    fn zero_entry(&self) -> T {
        self.coeffs[0].zero_of()
    }

    /// X·p
    pub fn mul_x(&self) -> Self {
        let mut c = Vec::with_capacity(self.coeffs.len() + 1);
        c.push(self.zero_entry());
        c.extend_from_slice(&self.coeffs);
        Poly { coeffs: c }
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.mul_ref(s)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = self.zero_entry();
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).unwrap_or(&zero);
            let b = other.coeffs.get(i).unwrap_or(&zero);
            c.push(a.sub_ref(b));
        }
        Poly { coeffs: c }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let zero = self.zero_entry();
        let mut c = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_entry() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] = c[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Poly { coeffs: c }
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = self.zero_entry();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_ref(x).add_ref(c);
        }
        acc
    }
}

impl Poly<FieldScalar> {
    /// p(J)e₀ by exact Horner with tridiagonal matrix-vector products.
    pub fn apply_to_e0(&self, j: &JacobiMatrix) -> Vec<FieldScalar> {
        let n = j.n();
        let mut acc = vec![FieldScalar::zero(j.ctx()); n];
        for c in self.coeffs.iter().rev() {
            acc = j.apply_exact(&acc);
            acc[0] += c;
        }
        acc
    }
}

/// The eigenpolynomials of s+s*: P₀ = 1, P₁ = X, Pₙ = X·P_{n−1} − P_{n−2};
/// Pₙ(s+s*)e₀ = eₙ on any truncation of size > n.
pub fn chebyshev_p(n: usize) -> Poly<Rational> {
    let mut p0 = Poly::constant(Rational::one());
    if n == 0 {
        return p0;
    }
    let mut p1 = Poly::new(vec![Rational::zero(), Rational::one()]);
    for _ in 1..n {
        let next = p1.mul_x().sub(&p0);
        p0 = p1;
        p1 = next;
    }
    p1
}

/// The cyclicity polynomials of c_t: S₀ = 1, S₁ = (X − t/δ)/√(1−δ⁻²),
/// S₂ = X·S₁ − √(1−δ⁻²), Sₙ = X·S_{n−1} − S_{n−2} for n ≥ 3;
/// S_{n,t}(c_t)e₀ = eₙ exactly on truncations of size > n.
pub fn s_poly(ctx: &Ctx, t: &Rational, n: usize) -> Poly<FieldScalar> {
    let one = FieldScalar::one(ctx);
    let s0 = Poly::constant(one.clone());
    if n == 0 {
        return s0;
    }
    let w = FieldScalar::sqrt_one_minus_inv_sq(ctx);
    let w_inv = w.inv().expect("delta > 1");
    let t_over_delta = FieldScalar::from_rational(ctx, t / ctx.delta());
    let s1 = Poly::new(vec![-&t_over_delta, one]).scale(&w_inv);
    if n == 1 {
        return s1;
    }
    let s2 = s1.mul_x().sub(&Poly::constant(w));
    if n == 2 {
        return s2;
    }
    let mut prev = s1;
    let mut cur = s2;
    for _ in 3..=n {
        let next = cur.mul_x().sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

// ---------------------------------------------------------------------------
// Moments of the semicircle distribution
// ---------------------------------------------------------------------------

/// The moment functional of the radius-2 semicircle law: even moments are
/// Catalan numbers, odd moments vanish.
pub struct MomentFunctional;

impl MomentFunctional {
    pub fn moment(n: usize) -> Rational {
        if n % 2 == 1 {
            Rational::zero()
        } else {
            Rational::from_integer(catalan(n / 2))
        }
    }

    /// ∫ p dν, exact.
    pub fn apply(p: &Poly<Rational>) -> Rational {
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| c * Self::moment(n))
            .sum()
    }

    /// Hankel matrix [m_{i+j}] of the moment sequence.
    pub fn hankel(size: usize) -> crate::linalg::Mat<Rational> {
        crate::linalg::Mat::from_fn(size, size, |i, j| Self::moment(i + j))
    }
}

/// ∫ tⁿ dν(t) for the semicircle distribution √(4−t²)/(2π): Catalan(n/2) for
/// even n, 0 for odd.
pub fn semicircle_moments(n: usize) -> Rational {
    MomentFunctional::moment(n)
}

// ---------------------------------------------------------------------------
// Outlier exclusion
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct OutlierReport {
    pub pass: bool,
    /// min over the grid of h(z) − (1−δ⁻²) − (δ⁻¹−1)².
    pub min_margin: f64,
    pub monotone: bool,
}

/// h(z) = (z − t/δ)·(z + √(z²−4))/2, the eigenvalue-exclusion function: for
/// z > 2 it satisfies h(z) − (1−δ⁻²) > (δ⁻¹−1)² > 0, so the truncated
/// resolvent equation admits no square-summable eigenvector.
pub fn h_function(t: f64, delta: f64, z: f64) -> f64 {
    (z - t / delta) * (z + Float::sqrt(z * z - 4.0)) / 2.0
}

/// Verifies the strict exclusion inequality and the monotonicity of h on a
/// grid of z values > 2.
pub fn no_outlier_check(t: &Rational, delta: &Rational, zgrid: &[f64]) -> Result<OutlierReport, SpectralError> {
    if delta <= &Rational::one() {
        return Err(SpectralError::InvalidDelta);
    }
    if t.abs() > Rational::from_integer(2.into()) {
        return Err(SpectralError::TOutOfRange);
    }
    let tf = t.to_f64().expect("finite");
    let df = delta.to_f64().expect("finite");
    let d_inv = 1.0 / df;
    let bound = (1.0 - d_inv * d_inv) + (d_inv - 1.0) * (d_inv - 1.0);
    let mut min_margin = f64::INFINITY;
    let mut monotone = true;
    let mut prev = f64::NEG_INFINITY;
    let mut pass = true;
    for &z in zgrid {
        if z <= 2.0 {
            pass = false;
            continue;
        }
        let h = h_function(tf, df, z);
        min_margin = min_margin.min(h - bound);
        if h <= bound {
            pass = false;
        }
        if h <= prev {
            monotone = false;
        }
        prev = h;
    }
    Ok(OutlierReport {
        pass: pass && monotone,
        min_margin,
        monotone,
    })
}

/// Uniform grid of `count` points in (2, hi].
pub fn default_zgrid(hi: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|i| 2.0 + (hi - 2.0) * i as f64 / count as f64)
        .collect()
}

// ---------------------------------------------------------------------------
// The model operator α + (s+s*)⊗1 in float form
// ---------------------------------------------------------------------------

/// Float matrix of α + (s+s*)⊗1 on the grid basis {e_k⊗e_r} with
/// k ≤ k_cap, r ≤ r_cap, row-major with index k·(r_cap+1)+r. The exact
/// comparison against the cup action lives in the cup-subalgebra module;
/// this view feeds float spectral diagnostics.
pub fn alpha_matrix(delta: &Rational, k_cap: usize, r_cap: usize) -> (Vec<f64>, usize) {
    let kk = k_cap + 1;
    let rr = r_cap + 1;
    let dim = kk * rr;
    let df = delta.to_f64().expect("finite");
    let coupling = Float::sqrt(1.0 - 1.0 / (df * df)) - 1.0;
    let idx = |k: usize, r: usize| k * rr + r;
    let mut m = vec![0.0; dim * dim];
    for k in 0..kk {
        for r in 0..rr {
            let col = idx(k, r);
            // (s+s*)⊗1
            if k + 1 < kk {
                m[idx(k + 1, r) * dim + col] += 1.0;
            }
            if k >= 1 {
                m[idx(k - 1, r) * dim + col] += 1.0;
            }
            // α
            if k == 0 {
                if 1 < kk {
                    m[idx(1, r) * dim + col] += coupling;
                }
                if r + 1 < rr {
                    m[idx(0, r + 1) * dim + col] += 1.0 / df;
                }
                if r >= 1 {
                    m[idx(0, r - 1) * dim + col] += 1.0 / df;
                }
            } else if k == 1 {
                m[idx(0, r) * dim + col] += coupling;
            }
        }
    }
    (m, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::jacobi_eigenvalues;
    use crate::scalars::{rat, rat_int};

    #[test]
    fn ct_entries() {
        let j = JacobiMatrix::ct(&rat_int(1), &rat_int(2), 5).unwrap();
        assert_eq!(j.diag()[0], FieldScalar::from_rational(j.ctx(), rat(1, 2)));
        assert!(j.diag()[1].is_zero());
        assert_eq!(j.offdiag()[0], FieldScalar::sqrt_one_minus_inv_sq(j.ctx()));
        assert!(j.offdiag()[1].is_one());
        assert!(JacobiMatrix::ct(&rat_int(3), &rat_int(2), 5).is_err());
        assert!(JacobiMatrix::ct(&rat_int(1), &rat_int(1), 5).is_err());
        assert!(JacobiMatrix::ct(&rat_int(1), &rat_int(2), 1).is_err());
        // t = 0, δ large: approaches the free matrix, the (0,1) entry → 1
        let big = JacobiMatrix::ct(&rat_int(0), &rat_int(10_000), 3).unwrap();
        assert!(big.diag()[0].is_zero());
        assert!((big.offdiag()[0].to_f64() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ct_two_by_two_eigenvalues() {
        // N=2, t=2, δ=2: [[1, √3/2], [√3/2, 0]] has eigenvalues 3/2, −1/2.
        let j = JacobiMatrix::ct(&rat_int(2), &rat_int(2), 2).unwrap();
        let m = spectral_measure(&j).unwrap();
        assert!((m.atoms[0].0 + 0.5).abs() < 1e-12);
        assert!((m.atoms[1].0 - 1.5).abs() < 1e-12);
        assert!((m.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_small() {
        assert_eq!(chebyshev_p(0).coeffs(), &[rat_int(1)]);
        assert_eq!(chebyshev_p(1).coeffs(), &[rat_int(0), rat_int(1)]);
        // P₂ = X²−1, P₃ = X³−2X
        assert_eq!(chebyshev_p(2).coeffs(), &[rat_int(-1), rat_int(0), rat_int(1)]);
        assert_eq!(
            chebyshev_p(3).coeffs(),
            &[rat_int(0), rat_int(-2), rat_int(0), rat_int(1)]
        );
    }

    #[test]
    fn chebyshev_orthonormal_under_moments() {
        for n in 0..=10usize {
            for m in 0..=10usize {
                let prod = chebyshev_p(n).mul(&chebyshev_p(m));
                let val = MomentFunctional::apply(&prod);
                let expect = if n == m { rat_int(1) } else { rat_int(0) };
                assert_eq!(val, expect, "P_{n}·P_{m}");
            }
        }
    }

    #[test]
    fn chebyshev_maps_e0_to_en() {
        let ctx = DeltaContext::from_letters(2);
        let j = JacobiMatrix::free(&ctx, 14).unwrap();
        for n in 0..=12usize {
            let p = chebyshev_p(n);
            let pf = Poly::new(
                p.coeffs()
                    .iter()
                    .map(|c| FieldScalar::from_rational(&ctx, c.clone()))
                    .collect(),
            );
            assert_eq!(pf.apply_to_e0(&j), j.basis_vector(n), "P_{n}");
        }
    }

    #[test]
    fn hankel_determinants_are_one() {
        // The Catalan Hankel determinants are all 1, so the moment matrices
        // are positive definite.
        for size in 1..=6usize {
            let h = MomentFunctional::hankel(size);
            assert_eq!(h.det(), rat_int(1), "size {size}");
        }
    }

    #[test]
    fn s_polys_give_basis_vectors() {
        for t in [rat_int(0), rat(1, 2), rat_int(1), rat_int(2)] {
            let j = JacobiMatrix::ct(&t, &rat_int(2), 34).unwrap();
            let ctx = j.ctx().clone();
            // vector recursion: v_n = S_n(c_t)e₀ computed incrementally
            let w = FieldScalar::sqrt_one_minus_inv_sq(&ctx);
            let w_inv = w.inv().unwrap();
            let t_over_delta = FieldScalar::from_rational(&ctx, &t / ctx.delta());
            let mut v_prev = j.basis_vector(0);
            let mut v_cur: Vec<FieldScalar> = j
                .apply_exact(&v_prev)
                .iter()
                .zip(&v_prev)
                .map(|(av, v)| &(av - &(&t_over_delta * v)) * &w_inv)
                .collect();
            assert_eq!(v_cur, j.basis_vector(1));
            for n in 2..=30usize {
                let av = j.apply_exact(&v_cur);
                let next: Vec<FieldScalar> = if n == 2 {
                    av.iter().zip(&v_prev).map(|(a, p)| a - &(&w * p)).collect()
                } else {
                    av.iter().zip(&v_prev).map(|(a, p)| a - p).collect()
                };
                v_prev = v_cur;
                v_cur = next;
                assert_eq!(v_cur, j.basis_vector(n), "t={t}, n={n}");
            }
            // polynomial route agrees
            for n in [1usize, 5, 13] {
                let p = s_poly(&ctx, &t, n);
                assert_eq!(p.apply_to_e0(&j), j.basis_vector(n), "s_poly n={n}");
            }
        }
    }

    #[test]
    fn s1_formula() {
        let ctx = DeltaContext::new(rat_int(2)).unwrap();
        let p = s_poly(&ctx, &rat_int(1), 1);
        // S₁ = (X − t/δ)/√(1−δ⁻²)
        let w_inv = FieldScalar::sqrt_one_minus_inv_sq(&ctx).inv().unwrap();
        assert_eq!(p.coeffs()[1], w_inv);
        assert_eq!(
            p.coeffs()[0],
            -&(&FieldScalar::from_rational(&ctx, rat(1, 2)) * &w_inv)
        );
    }

    #[test]
    fn free_moments_are_catalan() {
        let ctx = DeltaContext::from_letters(2);
        let j = JacobiMatrix::free(&ctx, 24).unwrap();
        let m = spectral_measure(&j).unwrap();
        for n in 0..=8usize {
            let even = m.moment(2 * n);
            let expect = catalan(n).to_f64().unwrap();
            assert!((even - expect).abs() < 1e-9 * expect.max(1.0), "n={n}");
            assert!(m.moment(2 * n + 1).abs() < 1e-9);
        }
        assert!(m.moment_error(&j, 16) < 1e-8);
    }

    #[test]
    fn semicircle_moment_values() {
        assert_eq!(semicircle_moments(0), rat_int(1));
        assert_eq!(semicircle_moments(2), rat_int(1));
        assert_eq!(semicircle_moments(3), rat_int(0));
        assert_eq!(semicircle_moments(4), rat_int(2));
        assert_eq!(semicircle_moments(8), rat_int(14));
    }

    #[test]
    fn outlier_bound_examples() {
        // δ=2, t=2: h(2) = 1 = 2(1−δ⁻¹) exactly at the edge
        assert!((h_function(2.0, 2.0, 2.0) - 1.0).abs() < 1e-12);
        // δ=2, t=0, z=3: h(3) = 3(3+√5)/2 ≈ 7.854
        assert!((h_function(0.0, 2.0, 3.0) - 7.854101966249685).abs() < 1e-9);
        let grid = default_zgrid(6.0, 100);
        for t in [rat_int(-2), rat_int(0), rat_int(2)] {
            for d in [rat_int(2), rat_int(3)] {
                let rep = no_outlier_check(&t, &d, &grid).unwrap();
                assert!(rep.pass && rep.min_margin > 0.0 && rep.monotone);
            }
        }
        assert!(no_outlier_check(&rat_int(0), &rat_int(1), &grid).is_err());
    }

    #[test]
    fn pp_mass_small_for_free_truncation() {
        let ctx = DeltaContext::from_letters(2);
        let j = JacobiMatrix::free(&ctx, 1000).unwrap();
        let m = spectral_measure(&j).unwrap();
        // explicit sine eigenvectors give max weight ≤ 2/(N+1)
        assert!(m.max_weight() <= 0.002);
        assert!(pp_mass_bound(&rat_int(1), &rat_int(2), 400).unwrap() < 0.01);
        assert!(pp_mass_bound(&rat_int(1), &rat_int(2), 99).is_err());
    }

    #[test]
    fn weyl_interlacing_rank_two() {
        // c_t − (s+s*) has rank 2 on truncations, so eigenvalue indices shift
        // by at most 2.
        let t = rat_int(1);
        let d = rat_int(2);
        let n = 160;
        let jc = JacobiMatrix::ct(&t, &d, n).unwrap();
        let ctx = DeltaContext::from_letters(2);
        let jf = JacobiMatrix::free(&ctx, n).unwrap();
        let ec: Vec<f64> = spectral_measure(&jc).unwrap().atoms.iter().map(|a| a.0).collect();
        let ef: Vec<f64> = spectral_measure(&jf).unwrap().atoms.iter().map(|a| a.0).collect();
        for i in 0..n {
            if i + 2 < n {
                assert!(ec[i] <= ef[i + 2] + 1e-9);
                assert!(ef[i] <= ec[i + 2] + 1e-9);
            }
        }
    }

    #[test]
    fn dense_solver_agrees_with_tridiagonal_path() {
        let n = 120;
        let j = JacobiMatrix::ct(&rat(1, 2), &rat_int(3), n).unwrap();
        let d = j.diag_f64();
        let e = j.offdiag_f64();
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            dense[i * n + i] = d[i];
            if i + 1 < n {
                dense[i * n + i + 1] = e[i];
                dense[(i + 1) * n + i] = e[i];
            }
        }
        let from_dense = jacobi_eigenvalues(&dense, n);
        let from_ql: Vec<f64> = spectral_measure(&j)
            .unwrap()
            .atoms
            .iter()
            .map(|a| a.0)
            .collect();
        for (a, b) in from_dense.iter().zip(&from_ql) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn alpha_matrix_structure() {
        let (m, dim) = alpha_matrix(&rat_int(2), 4, 4);
        // symmetric
        for i in 0..dim {
            for j in 0..dim {
                assert!((m[i * dim + j] - m[j * dim + i]).abs() < 1e-15);
            }
        }
        let rr = 5;
        let coupling = (1.0f64 - 0.25).sqrt();
        // coupling of (0,r) to (1,r) is √(1−δ⁻²)
        assert!((m[rr * dim] - (coupling - 1.0 + 1.0)).abs() < 1e-12);
        // (0,r)↦(0,r±1) entries are δ⁻¹
        assert!((m[dim] - 0.5).abs() < 1e-12);
        // rows k ≥ 2 couple only in k
        let idx = |k: usize, r: usize| k * rr + r;
        assert_eq!(m[idx(2, 0) * dim + idx(2, 1)], 0.0);
        assert_eq!(m[idx(3, 0) * dim + idx(2, 0)], 1.0);
        // eigenvalues stay within [−2−ε, 2+ε] heuristically on this grid
        let eig = jacobi_eigenvalues(&m, dim);
        assert!(eig.first().unwrap() >= &-2.6 && eig.last().unwrap() <= &2.6);
    }
}
