//! Execution lane for the sampling loops: data-parallel when the
//! `parallel` feature is on, plain iteration otherwise.  Results are
//! collected in index order either way, so the lane never changes output.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Uses the rayon pool when compiled in; silently sequential
    /// otherwise (check `Exec::parallel_available`).
    Parallel,
}

impl Exec {
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Best-effort override of the worker count for the parallel lane.  Keeps
/// whatever pool is already running (or the sequential build) and reports
/// whether the override took.
#[cfg(feature = "parallel")]
pub fn set_worker_threads(count: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(count)
        .build_global()
        .is_ok()
}

#[cfg(not(feature = "parallel"))]
pub fn set_worker_threads(_count: usize) -> bool {
    false
}

#[cfg(feature = "parallel")]
pub fn map_indexed<T: Send>(exec: Exec, count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    match exec {
        Exec::Sequential => (0..count).map(f).collect(),
        Exec::Parallel => (0..count).into_par_iter().map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T: Send>(_exec: Exec, count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..count).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_lanes_agree() {
        let seq = map_indexed(Exec::Sequential, 100, |i| i * i);
        let par = map_indexed(Exec::Parallel, 100, |i| i * i);
        assert_eq!(seq, par);
    }

    #[test]
    fn test_order_preserved() {
        let out = map_indexed(Exec::Parallel, 1000, |i| i);
        assert!(out.windows(2).all(|w| w[0] + 1 == w[1]));
    }
}
