//! Parallel drivers over independent work units.

use rayon::prelude::*;
use rhw_core::calib::{calibrate_expiry, CalibrationConfig, CalibrationResult, QuoteSet};
use rhw_core::mixture::{simulate_chunk, EulerGrid, LocalVolField};
use rhw_core::{DiscountCurve, Result};

/// Euler simulation split into chunks of at most `chunk` paths. Chunk `i`
/// uses substream `i` of `seed`, so the output does not depend on the
/// number of worker threads.
pub fn simulate<C>(field: &LocalVolField, curve: &C, grid: &EulerGrid, paths: usize, chunk: usize, seed: u64) -> Result<Vec<Vec<f64>>>
where
    C: DiscountCurve + Sync + ?Sized,
{
    let chunk = chunk.max(1);
    let sizes: Vec<usize> = (0..paths.div_ceil(chunk)).map(|i| chunk.min(paths - i * chunk)).collect();
    let parts: Vec<Vec<Vec<f64>>> = sizes
        .par_iter()
        .enumerate()
        .map(|(i, &n)| simulate_chunk(field, curve, grid, n, seed, i as u64))
        .collect::<Result<_>>()?;
    let mut out: Vec<Vec<f64>> = vec![Vec::with_capacity(paths); grid.observations.len()];
    for part in parts {
        for (dst, src) in out.iter_mut().zip(part) {
            dst.extend(src);
        }
    }
    Ok(out)
}

/// Per-expiry calibrations run concurrently; results are ordered by expiry.
pub fn calibrate<C>(curve: &C, quotes: &QuoteSet, config: &CalibrationConfig) -> Result<Vec<CalibrationResult>>
where
    C: DiscountCurve + Sync + ?Sized,
{
    quotes
        .by_expiry()
        .par_iter()
        .map(|(_, strip)| calibrate_expiry(curve, strip, config))
        .collect()
}
