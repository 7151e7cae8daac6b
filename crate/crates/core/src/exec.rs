//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) the helpers dispatch to rayon;
//! without it, or when [`Execution::Sequential`] is requested, they run on the
//! calling thread. Results are identical either way: every helper is an
//! element-wise map with no cross-element reduction order to worry about.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many elements the per-site kernels stay on one thread.
pub const PAR_MIN_LEN: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Map `f` over `items`, preserving order.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Apply `f` to every pair `(a[i], b[i])` in place.
pub fn zip_mut<A, B, F>(exec: Execution, a: &mut [A], b: &mut [B], f: F)
where
    A: Send,
    B: Send,
    F: Fn(&mut A, &mut B) + Sync + Send,
{
    debug_assert_eq!(a.len(), b.len());
    #[cfg(feature = "parallel")]
    if exec.is_parallel() && a.len() >= PAR_MIN_LEN {
        a.par_iter_mut()
            .zip(b.par_iter_mut())
            .with_min_len(PAR_MIN_LEN / 4)
            .for_each(|(x, y)| f(x, y));
        return;
    }
    let _ = exec;
    a.iter_mut().zip(b.iter_mut()).for_each(|(x, y)| f(x, y));
}
