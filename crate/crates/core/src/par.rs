//! Seeded batch evaluation with order-independent reductions.
//!
//! Sample `i` of a batch always draws from `substream(seed, i)`, so results do
//! not depend on scheduling or thread count.

use crate::error::Result;
use crate::rng::{substream, StreamRng};

/// Smallest value over a batch together with the index that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchMin {
    pub value: f64,
    pub index: usize,
    pub count: usize,
}

impl BatchMin {
    fn merge(a: BatchMin, b: BatchMin) -> BatchMin {
        let count = a.count + b.count;
        let pick = if b.value < a.value || (b.value == a.value && b.index < a.index) {
            b
        } else {
            a
        };
        BatchMin { count, ..pick }
    }

    fn empty() -> BatchMin {
        BatchMin { value: f64::INFINITY, index: usize::MAX, count: 0 }
    }

    /// Value at least `floor - tol`.
    pub fn passes(&self, floor: f64, tol: f64) -> bool {
        self.value >= floor - tol
    }
}

/// Evaluates `f(rng_i, i)` for `i in 0..count` and returns the minimum.
///
/// NaN results are treated as failures and reported as `-∞`.
pub fn batch_min<F>(count: usize, seed: u64, f: F) -> Result<BatchMin>
where
    F: Fn(&mut StreamRng, usize) -> Result<f64> + Sync + Send,
{
    let eval = |i: usize| -> Result<BatchMin> {
        let mut rng = substream(seed, i as u64);
        let v = f(&mut rng, i)?;
        let value = if v.is_nan() { f64::NEG_INFINITY } else { v };
        Ok(BatchMin { value, index: i, count: 1 })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count)
            .into_par_iter()
            .map(eval)
            .try_reduce(BatchMin::empty, |a, b| Ok(BatchMin::merge(a, b)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut acc = BatchMin::empty();
        for i in 0..count {
            acc = BatchMin::merge(acc, eval(i)?);
        }
        Ok(acc)
    }
}

/// Maps `f` over `items` in parallel when enabled, preserving order.
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn deterministic_min() {
        let a = batch_min(500, 3, |rng, _| Ok(rng.random::<f64>())).unwrap();
        let b = batch_min(500, 3, |rng, _| Ok(rng.random::<f64>())).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.count, 500);
        let direct = (0..500)
            .map(|i| substream(3, i).random::<f64>())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(a.value, direct);
    }

    #[test]
    fn nan_is_failure() {
        let r = batch_min(4, 0, |_, i| Ok(if i == 2 { f64::NAN } else { 1.0 })).unwrap();
        assert_eq!(r.index, 2);
        assert!(r.value.is_infinite());
    }
}
