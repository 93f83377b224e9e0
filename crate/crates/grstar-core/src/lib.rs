//! Computational core for the graded ⋆-algebra of noncommutative polynomials.
//!
//! Everything in this crate is `no_std` (with `alloc`): exact arithmetic in
//! the coefficient ring ℚ[√δ, √(δ²−1)], words and graded elements with the
//! ⋆ and • products, combinatorial planar tangles and their evaluation, the
//! cup-subalgebra machinery (E_b basis, coarse correspondences, the tower
//! product ∧_k), and the Jacobi-matrix spectral side (Chebyshev-type
//! recursions, truncated eigenproblems, outlier bounds).
//!
//! IO, file formats and the command-line front end live in the companion
//! `grstar` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cupalg;
pub mod linalg;
pub mod ncpoly;
pub mod pairings;
pub mod sample;
pub mod scalars;
pub mod spectral;
pub mod tangle;
