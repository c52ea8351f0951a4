//! Thread pool configuration.

/// Environment variable capping the worker thread count.
pub const THREADS_VAR: &str = "XTAL_THREADS";

/// Sizes the global rayon pool from `XTAL_THREADS` when set to a positive
/// integer. Returns the thread count in effect.
pub fn configure_from_env() -> usize {
    if let Some(n) = std::env::var(THREADS_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // fails only if the pool was already built
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    rayon::current_num_threads()
}
