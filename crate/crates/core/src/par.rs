//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature and `parallel == true` work is spread over the
//! current rayon pool. Results always come back in input order, so callers
//! see identical output either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether this build can run anything in parallel at all.
pub const fn available() -> bool {
    cfg!(feature = "parallel")
}

pub fn map<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel && items.len() > 1 {
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

/// Number of workers a parallel map would use.
pub fn workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}
