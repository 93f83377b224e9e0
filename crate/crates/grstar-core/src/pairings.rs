//! Counting oracles: Catalan numbers, non-crossing pair partitions with
//! letter constraints, and Dyck-path counts on the half-line.
//!
//! These are independent routes to the ⋆-trace moments and are used to
//! cross-check the engine rather than the other way around.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Catalan number C_n, by the exact recurrence C_{n+1} = C_n·2(2n+1)/(n+2).
pub fn catalan(n: usize) -> BigInt {
    let mut c = BigInt::one();
    for k in 0..n {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

/// Number of non-crossing pair partitions of the positions of `letters`
/// whose blocks pair equal letters.
///
/// This is the combinatorial value of the mixed moment
/// tr(X_{i₁} ⋆ ⋯ ⋆ X_{i_{2n}}) for a free semicircular family.
pub fn noncrossing_pairings(letters: &[u8]) -> BigInt {
    fn count(letters: &[u8], lo: usize, hi: usize, memo: &mut Vec<Vec<Option<BigInt>>>) -> BigInt {
        // counts pairings of the slice positions lo..hi
        if (hi - lo) % 2 == 1 {
            return BigInt::zero();
        }
        if lo == hi {
            return BigInt::one();
        }
        if let Some(v) = &memo[lo][hi] {
            return v.clone();
        }
        let mut acc = BigInt::zero();
        // position lo pairs with some odd-offset j; the pairing splits the
        // rest into an inside and an outside block.
        let mut j = lo + 1;
        while j < hi {
            if letters[lo] == letters[j] {
                acc += count(letters, lo + 1, j, memo) * count(letters, j + 1, hi, memo);
            }
            j += 2;
        }
        memo[lo][hi] = Some(acc.clone());
        acc
    }
    let n = letters.len();
    let mut memo = vec![vec![None; n + 1]; n + 1];
    count(letters, 0, n, &mut memo)
}

/// Number of Dyck paths of length `2n` (walks 0 → 0 on ℕ with ±1 steps),
/// i.e. ⟨(s+s*)^{2n} e₀, e₀⟩ by direct path counting.
pub fn dyck_paths(n: usize) -> BigInt {
    moment_walk(&[], 2 * n)
}

/// ⟨Jᵐ e₀, e₀⟩ for the free Jacobi operator with an optional finite diagonal
/// prefix — counts weighted Motzkin-style walks. With an empty diagonal this
/// is the Dyck count for even m.
fn moment_walk(diag_prefix: &[BigInt], m: usize) -> BigInt {
    let size = m + 1;
    let mut state = vec![BigInt::zero(); size];
    state[0] = BigInt::one();
    for _ in 0..m {
        let mut next = vec![BigInt::zero(); size];
        for (k, v) in state.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if k + 1 < size {
                next[k + 1] += v;
            }
            if k > 0 {
                next[k - 1] += v;
            }
            if let Some(d) = diag_prefix.get(k) {
                next[k] += v * d;
            }
        }
        state = next;
    }
    state[0].clone()
}
