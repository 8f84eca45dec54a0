//! Exact rank of small integer matrices by fraction-free (Bareiss) elimination.
//!
//! Elimination runs in `i128` with checked arithmetic and restarts in
//! arbitrary precision if any intermediate overflows.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Rank of the row-major `rows x cols` matrix.
pub fn integer_rank(entries: &[i64], rows: usize, cols: usize) -> usize {
    assert_eq!(entries.len(), rows * cols);
    let mut small: Vec<i128> = entries.iter().map(|&x| x as i128).collect();
    match bareiss(&mut small, rows, cols) {
        Some(r) => r,
        None => {
            let mut big: Vec<BigInt> = entries.iter().map(|&x| BigInt::from(x)).collect();
            bareiss(&mut big, rows, cols).expect("bigint elimination cannot overflow")
        }
    }
}

trait Ring: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    /// `(a*d - b*c) / e`, exact by the Bareiss identity; `None` on overflow.
    fn cross_div(a: &Self, d: &Self, b: &Self, c: &Self, e: &Self) -> Option<Self>;
}

impl Ring for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn cross_div(a: &Self, d: &Self, b: &Self, c: &Self, e: &Self) -> Option<Self> {
        let num = a.checked_mul(*d)?.checked_sub(b.checked_mul(*c)?)?;
        debug_assert_eq!(num % e, 0);
        Some(num / e)
    }
}

impl Ring for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cross_div(a: &Self, d: &Self, b: &Self, c: &Self, e: &Self) -> Option<Self> {
        Some((a * d - b * c) / e)
    }
}

fn bareiss<T: Ring>(m: &mut [T], rows: usize, cols: usize) -> Option<usize> {
    let mut rank = 0;
    let mut prev = T::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot_row) = (rank..rows).find(|&r| !m[r * cols + col].is_zero()) else {
            continue;
        };
        if pivot_row != rank {
            for c in 0..cols {
                m.swap(pivot_row * cols + c, rank * cols + c);
            }
        }
        let pivot = m[rank * cols + col].clone();
        for r in rank + 1..rows {
            let lead = m[r * cols + col].clone();
            for c in col + 1..cols {
                let v = T::cross_div(
                    &pivot,
                    &m[r * cols + c],
                    &lead,
                    &m[rank * cols + c],
                    &prev,
                )?;
                m[r * cols + c] = v;
            }
            m[r * cols + col] = T::zero();
        }
        prev = pivot;
        rank += 1;
    }
    Some(rank)
}
