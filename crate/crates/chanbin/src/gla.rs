//! Weighted 1-D Lloyd quantizer over a channel histogram, used as the
//! conventional baseline. Unlike the binning pipeline it must be told the
//! cluster count `k` up front and its result depends on initialization.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::binning::{channelized_binning, BinningConfig};
use crate::channel::{ChannelHistogram, ChannelId};
use crate::error::{Error, Result};
use crate::eval::ChannelReport;
use crate::merge::{finalize_report, merge_bins, DominantColor, MergeConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GlaInit {
    /// Centroids at `lo + (i + 0.5) * (hi - lo) / k`: deterministic.
    #[default]
    UniformSpread,
    /// Centroids drawn uniformly from `[lo, hi]` with the configured seed;
    /// exists to demonstrate initialization sensitivity.
    SeededRandom,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlaConfig {
    pub k: usize,
    pub max_iters: usize,
    /// Convergence threshold on the largest centroid movement.
    pub tol: f64,
    pub init: GlaInit,
    pub seed: u64,
}

impl GlaConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_iters: 100,
            tol: 1e-6,
            init: GlaInit::UniformSpread,
            seed: 0,
        }
    }
}

/// Quantizer outcome with the per-iteration objective for inspection.
#[derive(Debug, Clone)]
pub struct LloydRun {
    pub colors: Vec<DominantColor>,
    /// Weighted within-cluster sum of squares after each assignment step.
    pub objective: Vec<f64>,
    pub iterations: usize,
}

/// Output of running both methods on the same histogram.
#[derive(Debug, Clone)]
pub struct ComparisonRecord {
    pub channel: ChannelId,
    pub binning: ChannelReport,
    pub gla: ChannelReport,
    /// Number of dominant values the binning pipeline discovered on its own.
    pub binning_k: usize,
    pub binning_time: Duration,
    pub gla_time: Duration,
}

fn init_centroids(hist: &ChannelHistogram, config: &GlaConfig) -> Vec<f64> {
    let lo = hist.occupied().next().map(|(v, _)| v as f64).unwrap_or(0.0);
    let hi = hist.occupied().last().map(|(v, _)| v as f64).unwrap_or(0.0);
    let mut centroids: Vec<f64> = match config.init {
        GlaInit::UniformSpread => (0..config.k)
            .map(|i| lo + (i as f64 + 0.5) * (hi - lo) / config.k as f64)
            .collect(),
        GlaInit::SeededRandom => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            (0..config.k).map(|_| rng.random_range(lo..=hi)).collect()
        }
    };
    centroids.sort_by(f64::total_cmp);
    centroids
}

fn nearest_centroid(centroids: &[f64], v: f64) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, &c) in centroids.iter().enumerate() {
        let d = (v - c).abs();
        // strict comparison keeps ties on the lower centroid
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Lloyd iteration on the weighted histogram. Returns ascending dominant
/// colors with percentages once centroid movement drops below `tol` or the
/// iteration cap is reached.
pub fn lloyd_run(hist: &ChannelHistogram, config: &GlaConfig) -> Result<LloydRun> {
    if config.k == 0 {
        return Err(Error::InvalidConfig("k must be positive".into()));
    }
    let distinct = hist.distinct_values();
    if config.k > 256 || config.k > distinct {
        return Err(Error::KTooLarge {
            k: config.k,
            distinct,
        });
    }

    let occupied: Vec<(f64, u64)> = hist.occupied().map(|(v, c)| (v as f64, c)).collect();
    let mut centroids = init_centroids(hist, config);
    let k = config.k;
    let mut objective = Vec::new();
    let mut iterations = 0;

    let mut mass = vec![0u64; k];
    let mut wsum = vec![0f64; k];
    for _ in 0..config.max_iters {
        iterations += 1;
        mass.fill(0);
        wsum.fill(0.0);
        let mut wcss = 0.0;
        for &(v, c) in &occupied {
            let i = nearest_centroid(&centroids, v);
            mass[i] += c;
            wsum[i] += v * c as f64;
            let d = v - centroids[i];
            wcss += c as f64 * d * d;
        }
        if let Some(&prev) = objective.last() {
            debug_assert!(
                wcss <= prev + 1e-9 * (1.0 + prev),
                "Lloyd objective increased: {prev} -> {wcss}"
            );
        }
        objective.push(wcss);

        // Reseed empty clusters at the occupied value farthest from its
        // centroid within the most massive cluster.
        let mut reseeded = false;
        let mut taken: Vec<f64> = Vec::new();
        for i in 0..k {
            if mass[i] > 0 {
                continue;
            }
            let largest = (0..k)
                .max_by(|&a, &b| mass[a].cmp(&mass[b]).then(b.cmp(&a)))
                .unwrap();
            let target = occupied
                .iter()
                .map(|&(v, _)| v)
                .filter(|v| {
                    nearest_centroid(&centroids, *v) == largest && !taken.contains(v)
                })
                .max_by(|a, b| {
                    let da = (a - centroids[largest]).abs();
                    let db = (b - centroids[largest]).abs();
                    da.total_cmp(&db).then(b.total_cmp(a))
                });
            if let Some(v) = target {
                centroids[i] = v;
                taken.push(v);
                reseeded = true;
            }
        }

        let mut movement = 0.0f64;
        for i in 0..k {
            if mass[i] > 0 {
                let next = wsum[i] / mass[i] as f64;
                movement = movement.max((next - centroids[i]).abs());
                centroids[i] = next;
            }
        }
        centroids.sort_by(f64::total_cmp);
        if !reseeded && movement < config.tol {
            break;
        }
    }

    // Final assignment with the converged centroids.
    mass.fill(0);
    wsum.fill(0.0);
    for &(v, c) in &occupied {
        let i = nearest_centroid(&centroids, v);
        mass[i] += c;
        wsum[i] += v * c as f64;
    }
    let total = hist.total() as f64;
    let mut colors: Vec<DominantColor> = (0..k)
        .filter(|&i| mass[i] > 0)
        .map(|i| DominantColor {
            value: wsum[i] / mass[i] as f64,
            percent: 100.0 * mass[i] as f64 / total,
        })
        .collect();
    colors.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(LloydRun {
        colors,
        objective,
        iterations,
    })
}

/// Convenience wrapper returning only the dominant colors.
pub fn lloyd_quantize(hist: &ChannelHistogram, config: &GlaConfig) -> Result<Vec<DominantColor>> {
    lloyd_run(hist, config).map(|run| run.colors)
}

/// Runs the binning pipeline and the Lloyd baseline on the same histogram,
/// recording outputs and wall times. The binning side discovers its own
/// color count; only the baseline consumes `gla_cfg.k`.
pub fn compare_methods(
    hist: &ChannelHistogram,
    channel: ChannelId,
    binning_cfg: &BinningConfig,
    merge_cfg: &MergeConfig,
    gla_cfg: &GlaConfig,
) -> Result<ComparisonRecord> {
    let start = Instant::now();
    let bins = channelized_binning(hist, binning_cfg)?;
    let merged = merge_bins(bins, hist.total(), merge_cfg)?;
    let colors = finalize_report(merged, hist.total(), merge_cfg);
    let binning_time = start.elapsed();
    let binning_k = colors.len();
    let binning = ChannelReport { channel, colors };

    let start = Instant::now();
    let gla_colors = lloyd_quantize(hist, gla_cfg)?;
    let gla_time = start.elapsed();
    let gla = ChannelReport {
        channel,
        colors: gla_colors,
    };

    Ok(ComparisonRecord {
        channel,
        binning,
        gla,
        binning_k,
        binning_time,
        gla_time,
    })
}
