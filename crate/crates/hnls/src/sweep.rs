//! Concurrent execution of independent cells with a deterministic merge.

use rayon::prelude::*;

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "HNLS_THREADS";

/// Worker count from `HNLS_THREADS`, else the available cores.
pub fn worker_count() -> usize {
    std::env::var(THREADS_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Outcome of one cell. Failures are kept as messages so one bad cell does
/// not stop the others.
pub type CellResult<T> = Result<T, String>;

/// Runs `f` on every cell and returns results ordered by cell, regardless of
/// the order in which cells were given or finished. Duplicate cells run once.
pub fn sweep<C, T, E, F>(cells: &[C], f: F) -> Vec<(C, CellResult<T>)>
where
    C: Ord + Clone + Send + Sync,
    T: Send,
    E: std::fmt::Display,
    F: Fn(&C) -> Result<T, E> + Sync,
{
    let mut ordered = cells.to_vec();
    ordered.sort();
    ordered.dedup();
    let run = || {
        ordered
            .par_iter()
            .map(|c| {
                let r = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(c)));
                let r = match r {
                    Ok(Ok(v)) => Ok(v),
                    Ok(Err(e)) => Err(e.to_string()),
                    Err(_) => Err("cell panicked".to_string()),
                };
                (c.clone(), r)
            })
            .collect::<Vec<_>>()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(worker_count()).build() {
        Ok(pool) => pool.install(run),
        Err(_) => run(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_does_not_depend_on_input_order() {
        let f = |c: &u32| if *c == 3 { Err("three") } else { Ok(c * 10) };
        let a = sweep(&[5, 3, 1, 2], f);
        let b = sweep(&[1, 2, 3, 5, 2], f);
        assert_eq!(a, b);
        assert_eq!(a[2], (3, Err("three".to_string())));
        assert_eq!(a[3], (5, Ok(50)));
    }
}
