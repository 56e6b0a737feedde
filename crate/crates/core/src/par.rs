//! Switch between rayon and plain iteration for the data-parallel parts of
//! the crate (flux sweeps, batches of independent lattice runs, eigenvalue
//! refinement).

use serde::{Deserialize, Serialize};

/// Execution strategy for batch work.
///
/// `Rayon` silently degrades to `Sequential` when the crate is built without
/// the `parallel` feature, so callers never need their own `cfg` gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Parallelism {
    Sequential,
    #[default]
    Rayon,
}

impl Parallelism {
    /// Whether work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Rayon
    }
}

/// Order-preserving map over a slice.
pub fn map<T, U, F>(items: &[T], parallelism: Parallelism, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallelism.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = parallelism;
    items.iter().map(f).collect()
}

/// Run two closures, concurrently when allowed.
pub fn join<A, B, RA, RB>(parallelism: Parallelism, a: A, b: B) -> (RA, RB)
where
    A: FnOnce() -> RA + Send,
    B: FnOnce() -> RB + Send,
    RA: Send,
    RB: Send,
{
    #[cfg(feature = "parallel")]
    if parallelism.is_parallel() {
        return rayon::join(a, b);
    }
    let _ = parallelism;
    (a(), b())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order_in_both_modes() {
        let xs: Vec<u64> = (0..1000).collect();
        let seq = map(&xs, Parallelism::Sequential, |x| x * x);
        let par = map(&xs, Parallelism::Rayon, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 999 * 999);
    }

    #[test]
    fn join_returns_both() {
        let (a, b) = join(Parallelism::Rayon, || 1, || "two");
        assert_eq!((a, b), (1, "two"));
    }
}
