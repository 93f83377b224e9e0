//! Exact arithmetic in the ring ℚ[√δ, √(δ²−1)].
//!
//! Every normalization constant that shows up in the cup-subalgebra
//! identities (√δ, √(δ−δ⁻¹), √(1−δ⁻²), δ^{±k/2}) lives in this ring, so all
//! of those identities can be checked with zero tolerance.
//!
//! An element is stored as a 4-tuple of rationals
//! `a + b·√δ + c·√(δ²−1) + d·√δ·√(δ²−1)` against a shared [`DeltaContext`].
//! When δ or δ²−1 happens to be a rational square the corresponding radical
//! is folded into the rational part on construction, so the representation
//! stays canonical and the ring is a field for every admissible δ.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number, always reduced, denominator > 0.
pub type Rational = BigRational;

/// `p/q` as a [`Rational`].
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Integer as a [`Rational`].
pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalarError {
    /// δ must be a rational ≥ 1 (δ²−1 must have a real square root).
    InvalidDelta,
    /// Inverse of zero requested.
    ZeroInverse,
    /// The 4-dimensional representation contained a zero divisor. This is
    /// unreachable once construction-time folding is in place; it is kept as
    /// a guard against invariant violations.
    DegenerateExtension,
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::InvalidDelta => write!(f, "delta must be a rational number >= 1"),
            ScalarError::ZeroInverse => write!(f, "inverse of zero"),
            ScalarError::DegenerateExtension => write!(f, "degenerate extension"),
        }
    }
}

/// √x as an exact rational, when x is a perfect rational square.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    if x.is_zero() {
        return Some(Rational::zero());
    }
    let ns = x.numer().sqrt();
    let ds = x.denom().sqrt();
    if &(&ns * &ns) == x.numer() && &(&ds * &ds) == x.denom() {
        Some(Rational::new(ns, ds))
    } else {
        None
    }
}

/// Shared coefficient-ring context for a fixed loop parameter δ.
///
/// Two [`FieldScalar`]s combine only when their contexts agree (same δ).
#[derive(Debug)]
pub struct DeltaContext {
    delta: Rational,
    d2m1: Rational,
    /// √δ when it is rational.
    sq_delta: Option<Rational>,
    /// √(δ²−1) when it is rational.
    sq_d2m1: Option<Rational>,
    /// √(δ·(δ²−1)) when it is rational (and the two factors are not).
    sq_prod: Option<Rational>,
}

impl PartialEq for DeltaContext {
    fn eq(&self, other: &Self) -> bool {
        self.delta == other.delta
    }
}
impl Eq for DeltaContext {}

/// Handle to a [`DeltaContext`]; cheap to clone and share.
pub type Ctx = Arc<DeltaContext>;

impl DeltaContext {
    pub fn new(delta: Rational) -> Result<Ctx, ScalarError> {
        if delta < Rational::one() {
            return Err(ScalarError::InvalidDelta);
        }
        let d2m1 = &delta * &delta - Rational::one();
        let sq_delta = rational_sqrt(&delta);
        let sq_d2m1 = rational_sqrt(&d2m1);
        let sq_prod = if sq_delta.is_none() && sq_d2m1.is_none() {
            rational_sqrt(&(&delta * &d2m1))
        } else {
            None
        };
        Ok(Arc::new(DeltaContext {
            delta,
            d2m1,
            sq_delta,
            sq_d2m1,
            sq_prod,
        }))
    }

    /// Context with δ = l, the closed-loop value of the l-letter polynomial
    /// planar algebra.
    pub fn from_letters(l: u8) -> Ctx {
        DeltaContext::new(rat_int(l as i64)).expect("letter count is a valid delta")
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    /// δ²−1.
    pub fn delta_sq_minus_1(&self) -> &Rational {
        &self.d2m1
    }
}

/// Exact element of ℚ[√δ, √(δ²−1)].
#[derive(Clone, PartialEq, Eq)]
pub struct FieldScalar {
    // a + b·√δ + c·√(δ²−1) + d·√δ·√(δ²−1)
    c: [Rational; 4],
    ctx: Ctx,
}

impl FieldScalar {
    pub fn new(ctx: &Ctx, coeffs: [Rational; 4]) -> Self {
        let mut s = FieldScalar {
            c: coeffs,
            ctx: ctx.clone(),
        };
        s.normalize();
        s
    }

    /// Folds rational radicals into the rational component so that the
    /// stored basis coordinates are canonical.
    fn normalize(&mut self) {
        let ctx = self.ctx.clone();
        if let Some(s) = &ctx.sq_delta {
            // √δ = s, so √δ·√(δ²−1) = s·√(δ²−1).
            let b = core::mem::replace(&mut self.c[1], Rational::zero());
            self.c[0] += s * b;
            let d = core::mem::replace(&mut self.c[3], Rational::zero());
            self.c[2] += s * d;
        }
        if let Some(r) = &ctx.sq_d2m1 {
            let c = core::mem::replace(&mut self.c[2], Rational::zero());
            self.c[0] += r * c;
            let d = core::mem::replace(&mut self.c[3], Rational::zero());
            self.c[1] += r * d;
        }
        if let Some(p) = &ctx.sq_prod {
            // √δ·√(δ²−1) = p and √(δ²−1) = p·√δ/δ.
            let d = core::mem::replace(&mut self.c[3], Rational::zero());
            self.c[0] += p * d;
            let c = core::mem::replace(&mut self.c[2], Rational::zero());
            self.c[1] += c * p / &ctx.delta;
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[Rational; 4] {
        &self.c
    }

    pub fn zero(ctx: &Ctx) -> Self {
        FieldScalar {
            c: [
                Rational::zero(),
                Rational::zero(),
                Rational::zero(),
                Rational::zero(),
            ],
            ctx: ctx.clone(),
        }
    }

    pub fn one(ctx: &Ctx) -> Self {
        FieldScalar::from_rational(ctx, Rational::one())
    }

    pub fn from_rational(ctx: &Ctx, q: Rational) -> Self {
        FieldScalar {
            c: [q, Rational::zero(), Rational::zero(), Rational::zero()],
            ctx: ctx.clone(),
        }
    }

    pub fn from_int(ctx: &Ctx, n: i64) -> Self {
        FieldScalar::from_rational(ctx, rat_int(n))
    }

    /// √δ.
    pub fn sqrt_delta(ctx: &Ctx) -> Self {
        FieldScalar::new(
            ctx,
            [
                Rational::zero(),
                Rational::one(),
                Rational::zero(),
                Rational::zero(),
            ],
        )
    }

    /// √(δ²−1).
    pub fn sqrt_d2m1(ctx: &Ctx) -> Self {
        FieldScalar::new(
            ctx,
            [
                Rational::zero(),
                Rational::zero(),
                Rational::one(),
                Rational::zero(),
            ],
        )
    }

    /// √(δ−δ⁻¹) = √δ·√(δ²−1)/δ.
    pub fn sqrt_delta_minus_inv(ctx: &Ctx) -> Self {
        FieldScalar::new(
            ctx,
            [
                Rational::zero(),
                Rational::zero(),
                Rational::zero(),
                ctx.delta.recip(),
            ],
        )
    }

    /// √(1−δ⁻²) = √(δ²−1)/δ.
    pub fn sqrt_one_minus_inv_sq(ctx: &Ctx) -> Self {
        FieldScalar::new(
            ctx,
            [
                Rational::zero(),
                Rational::zero(),
                ctx.delta.recip(),
                Rational::zero(),
            ],
        )
    }

    /// δ^k for k ∈ ℤ.
    pub fn delta_pow(ctx: &Ctx, k: i64) -> Self {
        let mut q = Rational::one();
        let base = if k >= 0 {
            ctx.delta.clone()
        } else {
            ctx.delta.recip()
        };
        for _ in 0..k.unsigned_abs() {
            q *= &base;
        }
        FieldScalar::from_rational(ctx, q)
    }

    /// δ^{k/2} for k ∈ ℤ (half-integer powers of δ are exact in the ring).
    pub fn sqrt_delta_pow(ctx: &Ctx, k: i64) -> Self {
        let whole = FieldScalar::delta_pow(ctx, k.div_euclid(2));
        if k.rem_euclid(2) == 0 {
            whole
        } else {
            &whole * &FieldScalar::sqrt_delta(ctx)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Rational::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(Rational::is_zero)
    }

    /// Rational part, if the element is purely rational.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.c[1..].iter().all(Rational::is_zero) {
            Some(&self.c[0])
        } else {
            None
        }
    }

    fn assert_ctx(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx,
            "delta context mismatch: {} vs {}",
            self.ctx.delta,
            other.ctx.delta
        );
    }

    /// Exact multiplicative inverse.
    ///
    /// Works down the tower ℚ ⊂ ℚ(√δ) ⊂ ℚ(√δ, √(δ²−1)): conjugate over the
    /// outer radical, then over the inner one.
    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::ZeroInverse);
        }
        let ctx = &self.ctx;
        // x = A + B·v with A = a + b·u, B = c + d·u, u = √δ, v = √(δ²−1).
        // x·(A − B·v) = A² − (δ²−1)·B², an element of ℚ(u).
        let (a, b, c, d) = (&self.c[0], &self.c[1], &self.c[2], &self.c[3]);
        let delta = &ctx.delta;
        let d2m1 = &ctx.d2m1;
        // A² − (δ²−1)B² = p + q·u
        let p = a * a + delta * (b * b) - d2m1 * (c * c + delta * (d * d));
        let q = rat_int(2) * (a * b - d2m1 * (c * d));
        // (p + q·u)⁻¹ = (p − q·u)/(p² − δ·q²)
        let norm = &p * &p - delta * (&q * &q);
        if norm.is_zero() {
            return Err(ScalarError::DegenerateExtension);
        }
        // (p − q·u)/norm, then multiply by (A − B·v).
        let pr = &p / &norm;
        let qr = -(&q / &norm);
        let k_inv = FieldScalar::new(
            ctx,
            [pr, qr, Rational::zero(), Rational::zero()],
        );
        let conj = FieldScalar::new(
            ctx,
            [a.clone(), b.clone(), -c.clone(), -d.clone()],
        );
        let result = &k_inv * &conj;
        debug_assert!((&result * self).is_one());
        Ok(result)
    }

    /// Floating-point value, consistent in sign with the exact sign.
    pub fn to_f64(&self) -> f64 {
        let naive = self.to_f64_naive();
        if naive.abs() > 1e-9 {
            return naive;
        }
        match self.sign() {
            Ordering::Equal => 0.0,
            Ordering::Greater => naive.abs(),
            Ordering::Less => -naive.abs(),
        }
    }

    fn to_f64_naive(&self) -> f64 {
        use num_traits::Float;
        let delta = self.ctx.delta.to_f64().unwrap_or(f64::NAN);
        let d2m1 = self.ctx.d2m1.to_f64().unwrap_or(f64::NAN);
        let u = Float::sqrt(delta);
        let v = Float::sqrt(d2m1);
        let f = |q: &Rational| q.to_f64().unwrap_or(f64::NAN);
        f(&self.c[0]) + f(&self.c[1]) * u + f(&self.c[2]) * v + f(&self.c[3]) * u * v
    }

    /// Exact sign, decided by interval refinement of the radicals.
    pub fn sign(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if let Some(q) = self.as_rational() {
            return q.cmp(&Rational::zero());
        }
        // Nonzero and genuinely irrational: the enclosing interval shrinks to
        // a point away from zero, so this terminates.
        let mut bits = 32u32;
        loop {
            let (ul, uh) = sqrt_enclosure(&self.ctx.delta, bits);
            let (vl, vh) = sqrt_enclosure(&self.ctx.d2m1, bits);
            let (mut lo, mut hi) = (self.c[0].clone(), self.c[0].clone());
            add_scaled_interval(&mut lo, &mut hi, &self.c[1], &ul, &uh);
            add_scaled_interval(&mut lo, &mut hi, &self.c[2], &vl, &vh);
            let (pl, ph) = (&ul * &vl, &uh * &vh);
            add_scaled_interval(&mut lo, &mut hi, &self.c[3], &pl, &ph);
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }
}

/// Accumulates coeff·[lo_i, hi_i] into a running interval.
fn add_scaled_interval(lo: &mut Rational, hi: &mut Rational, coeff: &Rational, il: &Rational, ih: &Rational) {
    if coeff.is_zero() {
        return;
    }
    if coeff.is_positive() {
        *lo += coeff * il;
        *hi += coeff * ih;
    } else {
        *lo += coeff * ih;
        *hi += coeff * il;
    }
}

/// Rational enclosure `lo ≤ √x ≤ hi` with `hi − lo ≤ 2^{−bits}`-scale width.
fn sqrt_enclosure(x: &Rational, bits: u32) -> (Rational, Rational) {
    let scale = BigInt::one() << bits;
    let m = x.numer() * x.denom() * (&scale * &scale);
    let s = m.sqrt();
    let den = x.denom() * &scale;
    (
        Rational::new(s.clone(), den.clone()),
        Rational::new(s + BigInt::one(), den),
    )
}

impl fmt::Debug for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["", "*sd", "*sq", "*sd*sq"];
        let mut parts: Vec<String> = Vec::new();
        for (q, name) in self.c.iter().zip(names) {
            if !q.is_zero() {
                parts.push(alloc::format!("{}{}", q, name));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl<'a> core::ops::Add<&'a FieldScalar> for &FieldScalar {
    type Output = FieldScalar;
    fn add(self, rhs: &'a FieldScalar) -> FieldScalar {
        self.assert_ctx(rhs);
        let c = [
            &self.c[0] + &rhs.c[0],
            &self.c[1] + &rhs.c[1],
            &self.c[2] + &rhs.c[2],
            &self.c[3] + &rhs.c[3],
        ];
        // Sums of normalized values are normalized.
        FieldScalar {
            c,
            ctx: self.ctx.clone(),
        }
    }
}

impl<'a> core::ops::Sub<&'a FieldScalar> for &FieldScalar {
    type Output = FieldScalar;
    fn sub(self, rhs: &'a FieldScalar) -> FieldScalar {
        self.assert_ctx(rhs);
        let c = [
            &self.c[0] - &rhs.c[0],
            &self.c[1] - &rhs.c[1],
            &self.c[2] - &rhs.c[2],
            &self.c[3] - &rhs.c[3],
        ];
        FieldScalar {
            c,
            ctx: self.ctx.clone(),
        }
    }
}

impl<'a> core::ops::Mul<&'a FieldScalar> for &FieldScalar {
    type Output = FieldScalar;
    fn mul(self, rhs: &'a FieldScalar) -> FieldScalar {
        self.assert_ctx(rhs);
        let (a1, b1, c1, d1) = (&self.c[0], &self.c[1], &self.c[2], &self.c[3]);
        let (a2, b2, c2, d2) = (&rhs.c[0], &rhs.c[1], &rhs.c[2], &rhs.c[3]);
        let delta = &self.ctx.delta;
        let d2m1 = &self.ctx.d2m1;
        let prod = delta * d2m1;
        // (√δ)² = δ, (√(δ²−1))² = δ²−1.
        let a = a1 * a2 + delta * (b1 * b2) + d2m1 * (c1 * c2) + &prod * (d1 * d2);
        let b = a1 * b2 + b1 * a2 + d2m1 * (c1 * d2 + d1 * c2);
        let c = a1 * c2 + c1 * a2 + delta * (b1 * d2 + d1 * b2);
        let d = a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2;
        // Products of normalized values are normalized: folding only fires
        // when a radical is rational, in which case its coordinate stays 0.
        FieldScalar {
            c: [a, b, c, d],
            ctx: self.ctx.clone(),
        }
    }
}

impl core::ops::Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        FieldScalar {
            c: [
                -self.c[0].clone(),
                -self.c[1].clone(),
                -self.c[2].clone(),
                -self.c[3].clone(),
            ],
            ctx: self.ctx.clone(),
        }
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl core::ops::$tr<FieldScalar> for FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: FieldScalar) -> FieldScalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> core::ops::$tr<&'a FieldScalar> for FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: &'a FieldScalar) -> FieldScalar {
                (&self).$method(rhs)
            }
        }
        impl core::ops::$tr<FieldScalar> for &FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: FieldScalar) -> FieldScalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl core::ops::Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        -&self
    }
}

impl core::ops::AddAssign<&FieldScalar> for FieldScalar {
    fn add_assign(&mut self, rhs: &FieldScalar) {
        *self = &*self + rhs;
    }
}

impl core::ops::SubAssign<&FieldScalar> for FieldScalar {
    fn sub_assign(&mut self, rhs: &FieldScalar) {
        *self = &*self - rhs;
    }
}

impl core::ops::MulAssign<&FieldScalar> for FieldScalar {
    fn mul_assign(&mut self, rhs: &FieldScalar) {
        *self = &*self * rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::SplitMix64;

    fn ctx2() -> Ctx {
        DeltaContext::from_letters(2)
    }

    #[test]
    fn basis_products() {
        let ctx = ctx2();
        let sd = FieldScalar::sqrt_delta(&ctx);
        let sq = FieldScalar::sqrt_d2m1(&ctx);
        // √δ·√δ = δ
        assert_eq!(&sd * &sd, FieldScalar::from_int(&ctx, 2));
        // √(δ²−1)·√(δ²−1) = δ²−1
        assert_eq!(&sq * &sq, FieldScalar::from_int(&ctx, 3));
        // √δ·√(δ²−1) is the fourth basis element
        let p = &sd * &sq;
        assert_eq!(p.coeffs()[3], Rational::one());
    }

    #[test]
    fn componentwise_add() {
        let ctx = ctx2();
        let one = FieldScalar::one(&ctx);
        let sd = FieldScalar::sqrt_delta(&ctx);
        let s = &one + &sd;
        assert_eq!(s.coeffs()[0], Rational::one());
        assert_eq!(s.coeffs()[1], Rational::one());
        let half = FieldScalar::from_rational(&ctx, rat(1, 2));
        assert_eq!(&half + &half, one);
        let x = FieldScalar::new(&ctx, [rat(3, 7), rat(-1, 2), rat(5, 3), rat(0, 1)]);
        assert_eq!(&x + &FieldScalar::zero(&ctx), x);
    }

    #[test]
    fn inverse_rationalizes() {
        let ctx = ctx2();
        // inv(√δ) = √δ/δ
        let sd = FieldScalar::sqrt_delta(&ctx);
        let inv = sd.inv().unwrap();
        assert_eq!(
            inv,
            FieldScalar::new(
                &ctx,
                [Rational::zero(), rat(1, 2), Rational::zero(), Rational::zero()]
            )
        );
        assert!(FieldScalar::one(&ctx).inv().unwrap().is_one());
        // δ=2: inv(√3) = √3/3
        let sq = FieldScalar::sqrt_d2m1(&ctx);
        let inv = sq.inv().unwrap();
        assert_eq!(
            inv,
            FieldScalar::new(
                &ctx,
                [Rational::zero(), Rational::zero(), rat(1, 3), Rational::zero()]
            )
        );
        assert!(FieldScalar::zero(&ctx).inv().is_err());
    }

    #[test]
    fn float_views() {
        let ctx = ctx2();
        assert_eq!(FieldScalar::one(&ctx).to_f64(), 1.0);
        let ctx4 = DeltaContext::from_letters(4);
        assert_eq!(FieldScalar::sqrt_delta(&ctx4).to_f64(), 2.0);
        let sq = FieldScalar::sqrt_d2m1(&ctx);
        assert!((sq.to_f64() - 1.7320508).abs() < 1e-6);
    }

    #[test]
    fn degenerate_delta_folds() {
        // δ = 4: √δ = 2 is rational, so the √δ coordinate must fold away.
        let ctx = DeltaContext::from_letters(4);
        let sd = FieldScalar::sqrt_delta(&ctx);
        assert_eq!(sd, FieldScalar::from_int(&ctx, 2));
        let x = FieldScalar::new(&ctx, [rat(1, 1), rat(1, 2), rat(0, 1), rat(1, 3)]);
        assert_eq!(x.coeffs()[1], Rational::zero());
        assert_eq!(x.coeffs()[3], Rational::zero());
        // Inverses still work in the folded representation.
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
    }

    #[test]
    fn normalizers_are_consistent() {
        let ctx = ctx2();
        let z = FieldScalar::sqrt_delta_minus_inv(&ctx);
        // (√(δ−δ⁻¹))² = δ−δ⁻¹ = 3/2 at δ=2
        assert_eq!(&z * &z, FieldScalar::from_rational(&ctx, rat(3, 2)));
        let w = FieldScalar::sqrt_one_minus_inv_sq(&ctx);
        assert_eq!(&w * &w, FieldScalar::from_rational(&ctx, rat(3, 4)));
        // √(δ−δ⁻¹) = √δ·√(1−δ⁻²)
        assert_eq!(&FieldScalar::sqrt_delta(&ctx) * &w, z);
        // δ^{k/2} half-powers
        let h = FieldScalar::sqrt_delta_pow(&ctx, 5);
        assert_eq!(
            h,
            &FieldScalar::delta_pow(&ctx, 2) * &FieldScalar::sqrt_delta(&ctx)
        );
        assert_eq!(
            &FieldScalar::sqrt_delta_pow(&ctx, -3) * &FieldScalar::sqrt_delta_pow(&ctx, 3),
            FieldScalar::one(&ctx)
        );
    }

    fn random_scalar(rng: &mut SplitMix64, ctx: &Ctx) -> FieldScalar {
        let mut c = [
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
            Rational::zero(),
        ];
        for q in c.iter_mut() {
            let p = (rng.next_u64() % 21) as i64 - 10;
            let d = (rng.next_u64() % 9) as i64 + 1;
            *q = rat(p, d);
        }
        FieldScalar::new(ctx, c)
    }

    #[test]
    fn ring_axioms_random() {
        let ctx = ctx2();
        let mut rng = SplitMix64::new(0x5ca1ab1e);
        for _ in 0..1000 {
            let x = random_scalar(&mut rng, &ctx);
            let y = random_scalar(&mut rng, &ctx);
            let z = random_scalar(&mut rng, &ctx);
            assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            assert_eq!(&x * &y, &y * &x);
            assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        }
    }

    #[test]
    fn inverse_random_nonsquare_delta() {
        for l in [2u8, 3, 5] {
            let ctx = DeltaContext::from_letters(l);
            let mut rng = SplitMix64::new(l as u64);
            for _ in 0..200 {
                let x = random_scalar(&mut rng, &ctx);
                if x.is_zero() {
                    continue;
                }
                assert!((&x * &x.inv().unwrap()).is_one());
            }
        }
    }

    #[test]
    fn float_is_ring_hom() {
        let ctx = DeltaContext::from_letters(3);
        let mut rng = SplitMix64::new(7);
        for _ in 0..500 {
            let x = random_scalar(&mut rng, &ctx);
            let y = random_scalar(&mut rng, &ctx);
            let s = (&x + &y).to_f64();
            let p = (&x * &y).to_f64();
            let rel = |a: f64, b: f64| (a - b).abs() / (1.0 + a.abs().max(b.abs()));
            assert!(rel(s, x.to_f64() + y.to_f64()) < 1e-12);
            assert!(rel(p, x.to_f64() * y.to_f64()) < 1e-12);
        }
    }

    #[test]
    fn exact_sign_near_zero() {
        let ctx = ctx2();
        // √δ·√(δ²−1) − √(δ(δ²−1)) = 0 exactly; perturb by tiny rationals.
        let p = &FieldScalar::sqrt_delta(&ctx) * &FieldScalar::sqrt_d2m1(&ctx);
        assert_eq!(p.sign(), Ordering::Greater);
        let tiny = FieldScalar::from_rational(&ctx, Rational::new(BigInt::one(), BigInt::from(10u8).pow(30)));
        let above = &p + &tiny;
        let below = &p - &(&p + &tiny);
        assert_eq!(above.sign(), Ordering::Greater);
        assert_eq!(below.sign(), Ordering::Less);
        assert_eq!((&p - &p).sign(), Ordering::Equal);
        assert_eq!(below.to_f64(), -tiny.to_f64_naive());
    }
}
