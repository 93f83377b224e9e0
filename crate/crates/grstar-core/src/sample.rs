//! Deterministic sampling for verification suites and tests.
//!
//! A tiny SplitMix64 generator keeps `verify --seed` runs reproducible across
//! platforms without pulling a full RNG stack into a `no_std` crate.

use alloc::vec::Vec;

use crate::ncpoly::{Context, GrElement, Word};
use crate::scalars::{rat, FieldScalar};

/// SplitMix64 PRNG (Steele, Lea, Flood).
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Random word of exactly `degree` letters over `1..=l`.
pub fn random_word(rng: &mut SplitMix64, l: u8, degree: usize) -> Word {
    let letters: Vec<u8> = (0..degree).map(|_| rng.below(l as u64) as u8 + 1).collect();
    Word::new(letters)
}

/// Random element: `terms` words of degree ≤ `max_degree` with small rational
/// coefficients.
pub fn random_element(rng: &mut SplitMix64, ctx: &Context, max_degree: usize, terms: usize) -> GrElement {
    let mut out = GrElement::zero(ctx);
    for _ in 0..terms {
        let deg = rng.below(max_degree as u64 + 1) as usize;
        let w = random_word(rng, ctx.letters(), deg);
        let p = rng.below(9) as i64 - 4;
        let q = rng.below(3) as i64 + 1;
        if p != 0 {
            out += &GrElement::monomial(ctx, w, FieldScalar::from_rational(ctx.scalars(), rat(p, q)));
        }
    }
    out
}

/// Random homogeneous element of exact degree `degree`.
pub fn random_homogeneous(rng: &mut SplitMix64, ctx: &Context, degree: usize, terms: usize) -> GrElement {
    let mut out = GrElement::zero(ctx);
    for _ in 0..terms {
        let w = random_word(rng, ctx.letters(), degree);
        let p = rng.below(9) as i64 - 4;
        let q = rng.below(3) as i64 + 1;
        if p != 0 {
            out += &GrElement::monomial(ctx, w, FieldScalar::from_rational(ctx.scalars(), rat(p, q)));
        }
    }
    out
}
