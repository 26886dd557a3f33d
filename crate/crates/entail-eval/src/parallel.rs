//! Data-parallel mapping over evaluation items.
//!
//! With the `parallel` feature (default) the work is spread over a rayon
//! pool sized by the caller; without it, the same API runs sequentially.
//! Both paths return outputs in input order, so downstream code is
//! oblivious to the execution mode.

/// Map `f` over `items` sequentially, preserving order.
pub fn map_items_sequential<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U + Sync + Send,
{
    items.into_iter().map(f).collect()
}

/// Map `f` over `items` with up to `workers` threads, preserving order.
///
/// `workers == 0` picks rayon's default. Falls back to the sequential path
/// when the `parallel` feature is disabled or a single worker is requested.
#[cfg(feature = "parallel")]
pub fn map_items<T, U, F>(items: Vec<T>, workers: usize, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;

    if workers == 1 {
        return map_items_sequential(items, f);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("failed to build rayon pool");
    pool.install(|| items.into_par_iter().map(f).collect())
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn map_items<T, U, F>(items: Vec<T>, _workers: usize, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    map_items_sequential(items, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_output_preserves_input_order() {
        let items: Vec<u64> = (0..1000).collect();
        let expected: Vec<u64> = items.iter().map(|x| x * x).collect();
        assert_eq!(map_items(items.clone(), 8, |x| x * x), expected);
        assert_eq!(map_items(items.clone(), 1, |x| x * x), expected);
        assert_eq!(map_items_sequential(items, |x| x * x), expected);
    }

    #[test]
    fn worker_counts_do_not_change_results() {
        let items: Vec<String> = (0..200).map(|i| format!("item-{i}")).collect();
        let a = map_items(items.clone(), 1, |s| s.len());
        let b = map_items(items.clone(), 4, |s| s.len());
        let c = map_items(items, 13, |s| s.len());
        assert_eq!(a, b);
        assert_eq!(b, c);
    }
}
