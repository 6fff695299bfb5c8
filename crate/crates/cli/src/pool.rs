use crate::error::{config, Result};

pub const THREADS_VAR: &str = "SHRINK_THREADS";

/// Caps the global rayon pool at `SHRINK_THREADS` when set.
pub fn configure_from_env() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(None);
    };
    let threads = parse_threads(&raw)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| config(THREADS_VAR, e.to_string()))?;
    Ok(Some(threads))
}

fn parse_threads(raw: &str) -> Result<usize> {
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(config(THREADS_VAR, format!("{raw:?} is not a positive integer"))),
    }
}
