//! Iterative per-channel binning.
//!
//! The bin width `rho` is the average consecutive difference of the sorted
//! pixel values, which telescopes to `(hi - lo) / (m - 1)`. A working set is
//! partitioned into bins of width `rho`; runs of consecutive non-empty bins
//! are re-binned recursively until an iteration produces no empty bins (or a
//! working set collapses to a single value / `rho < 1`).
//!
//! `rho` is kept as an exact rational so bin indices for integer pixel
//! values are well-defined at bin boundaries.

use crate::channel::{ChannelHistogram, RhoMode};
use crate::error::{Error, Result};

/// Configuration for the binning phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinningConfig {
    pub rho_mode: RhoMode,
    /// Safety valve only; the recursion provably needs at most 256 levels.
    pub max_recursion_depth: usize,
}

impl Default for BinningConfig {
    fn default() -> Self {
        Self {
            rho_mode: RhoMode::Distinct,
            max_recursion_depth: 300,
        }
    }
}

/// Adaptive bin width `span / intervals`, exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rho {
    span: u32,
    intervals: u32,
}

impl Rho {
    pub fn new(span: u32, intervals: u32) -> Self {
        assert!(intervals > 0, "rho denominator must be positive");
        Self { span, intervals }
    }

    /// Integer-width rho, convenient for direct binning.
    pub fn from_width(width: u32) -> Self {
        Self::new(width, 1)
    }

    pub fn as_f64(self) -> f64 {
        self.span as f64 / self.intervals as f64
    }

    pub fn is_zero(self) -> bool {
        self.span == 0
    }

    pub fn is_less_than_one(self) -> bool {
        self.span < self.intervals
    }
}

/// A contiguous-by-value sub-multiset of a channel: the unit of recursion.
///
/// Holds the occupied `(value, count)` pairs in ascending order; never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkingSet {
    values: Vec<(u8, u64)>,
}

impl WorkingSet {
    pub fn from_histogram(hist: &ChannelHistogram) -> Result<Self> {
        let values: Vec<(u8, u64)> = hist.occupied().collect();
        if values.is_empty() {
            return Err(Error::EmptyWorkingSet);
        }
        Ok(Self { values })
    }

    fn from_pairs(values: Vec<(u8, u64)>) -> Self {
        debug_assert!(!values.is_empty());
        debug_assert!(values.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(values.iter().all(|&(_, c)| c > 0));
        Self { values }
    }

    pub fn lo(&self) -> u8 {
        self.values[0].0
    }

    pub fn hi(&self) -> u8 {
        self.values[self.values.len() - 1].0
    }

    pub fn distinct(&self) -> usize {
        self.values.len()
    }

    pub fn total(&self) -> u64 {
        self.values.iter().map(|&(_, c)| c).sum()
    }

    pub fn occupied(&self) -> &[(u8, u64)] {
        &self.values
    }

    fn value_sum(&self) -> u64 {
        self.values.iter().map(|&(v, c)| v as u64 * c).sum()
    }
}

/// A value range with the pixel mass that landed in it. `count == 0` only
/// occurs transiently inside `assign_bins` output; final bins are non-empty.
///
/// `min_value`/`max_value` track the occupied extremes, which the merge
/// phase uses to tell value-contiguous bins (noise spread over consecutive
/// values) from genuinely separated ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorBin {
    pub range_lo: f64,
    pub range_hi: f64,
    pub count: u64,
    pub value_sum: u64,
    pub min_value: u8,
    pub max_value: u8,
}

impl ColorBin {
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Mean of the member pixel values.
    pub fn centroid(&self) -> f64 {
        debug_assert!(self.count > 0, "centroid of an empty bin");
        self.value_sum as f64 / self.count as f64
    }
}

/// Average consecutive difference of the working set's sorted values, which
/// telescopes to `(hi - lo) / (m - 1)`. Returns zero when the sequence has a
/// single entry.
pub fn compute_rho(ws: &WorkingSet, mode: RhoMode) -> Rho {
    let span = (ws.hi() - ws.lo()) as u32;
    let m = match mode {
        RhoMode::Distinct => ws.distinct() as u64,
        RhoMode::AllPixels => ws.total(),
    };
    if m <= 1 {
        return Rho::new(0, 1);
    }
    // intervals fits u32: at most total pixels, and rho only matters as a
    // ratio; counts beyond u32::MAX would make rho 0-ish anyway.
    let intervals = u64::min(m - 1, u32::MAX as u64) as u32;
    Rho::new(span, intervals)
}

fn bin_index(v: u8, lo: u8, rho: Rho) -> usize {
    ((v - lo) as u64 * rho.intervals as u64 / rho.span as u64) as usize
}

/// Partitions the working set into bins of width `rho` starting at its
/// lowest value. Empty bins are included; the first and last are always
/// occupied.
pub fn assign_bins(ws: &WorkingSet, rho: Rho) -> Result<Vec<ColorBin>> {
    if rho.is_zero() {
        return Err(Error::NonPositiveRho);
    }
    let lo = ws.lo();
    let span = (ws.hi() - lo) as u64;
    let num_bins = (span * rho.intervals as u64 / rho.span as u64) as usize + 1;
    let width = rho.as_f64();
    let mut bins: Vec<ColorBin> = (0..num_bins)
        .map(|i| ColorBin {
            range_lo: lo as f64 + i as f64 * width,
            range_hi: lo as f64 + (i + 1) as f64 * width,
            count: 0,
            value_sum: 0,
            min_value: 0,
            max_value: 0,
        })
        .collect();
    for &(v, c) in ws.occupied() {
        let i = bin_index(v, lo, rho);
        if bins[i].count == 0 {
            bins[i].min_value = v;
        }
        bins[i].max_value = v;
        bins[i].count += c;
        bins[i].value_sum += v as u64 * c;
    }
    debug_assert!(!bins[0].is_empty() && !bins[num_bins - 1].is_empty());
    Ok(bins)
}

/// Splits the working set along empty bins: one working set per maximal run
/// of consecutive non-empty bins, ascending. `rho` must be the width used
/// for `assign_bins`.
pub fn segment_runs(bins: &[ColorBin], ws: &WorkingSet, rho: Rho) -> Vec<WorkingSet> {
    let lo = ws.lo();
    let mut runs = Vec::new();
    let mut current: Vec<(u8, u64)> = Vec::new();
    let mut prev_index: Option<usize> = None;
    for &(v, c) in ws.occupied() {
        let i = bin_index(v, lo, rho);
        debug_assert!(!bins[i].is_empty());
        if let Some(p) = prev_index {
            if i > p + 1 {
                runs.push(WorkingSet::from_pairs(std::mem::take(&mut current)));
            }
        }
        current.push((v, c));
        prev_index = Some(i);
    }
    runs.push(WorkingSet::from_pairs(current));
    runs
}

/// Binning outcome plus the deepest recursion level reached.
#[derive(Debug, Clone)]
pub struct BinningRun {
    pub bins: Vec<ColorBin>,
    pub max_depth: usize,
}

/// Runs the full iterative binning on a channel histogram and returns the
/// final non-empty bins in ascending value order.
pub fn channelized_binning(hist: &ChannelHistogram, config: &BinningConfig) -> Result<Vec<ColorBin>> {
    channelized_binning_run(hist, config).map(|run| run.bins)
}

/// Same as [`channelized_binning`] but also reports the recursion depth.
pub fn channelized_binning_run(
    hist: &ChannelHistogram,
    config: &BinningConfig,
) -> Result<BinningRun> {
    if config.max_recursion_depth < 256 {
        return Err(Error::InvalidConfig(format!(
            "max_recursion_depth {} is below the provable bound 256",
            config.max_recursion_depth
        )));
    }
    let ws = WorkingSet::from_histogram(hist)?;
    let mut bins = Vec::new();
    let mut max_depth = 0;
    recurse(ws, config, 1, &mut max_depth, &mut bins)?;
    debug_assert_eq!(bins.iter().map(|b| b.count).sum::<u64>(), hist.total());
    Ok(BinningRun { bins, max_depth })
}

fn recurse(
    ws: WorkingSet,
    config: &BinningConfig,
    depth: usize,
    max_depth: &mut usize,
    out: &mut Vec<ColorBin>,
) -> Result<()> {
    *max_depth = (*max_depth).max(depth);
    if depth > config.max_recursion_depth {
        return Err(Error::RecursionLimitExceeded {
            depth,
            limit: config.max_recursion_depth,
        });
    }

    if ws.distinct() == 1 {
        let v = ws.lo();
        out.push(ColorBin {
            range_lo: v as f64,
            range_hi: v as f64,
            count: ws.total(),
            value_sum: ws.value_sum(),
            min_value: v,
            max_value: v,
        });
        return Ok(());
    }

    let rho = compute_rho(&ws, config.rho_mode);
    if rho.is_less_than_one() {
        // m distinct 8-bit values span at least m-1, so this is reachable
        // only when rho counts duplicate pixels.
        debug_assert_eq!(config.rho_mode, RhoMode::AllPixels);
        out.push(ColorBin {
            range_lo: ws.lo() as f64,
            range_hi: ws.hi() as f64 + 1.0,
            count: ws.total(),
            value_sum: ws.value_sum(),
            min_value: ws.lo(),
            max_value: ws.hi(),
        });
        return Ok(());
    }

    let bins = assign_bins(&ws, rho)?;
    if bins.iter().all(|b| !b.is_empty()) {
        // The last bin's nominal range can reach up to rho past the top
        // value; clamp final ranges so emitted bins from sibling runs stay
        // disjoint (the next run starts at hi + 1 or later).
        let cap = ws.hi() as f64 + 1.0;
        out.extend(bins.into_iter().map(|mut b| {
            b.range_hi = b.range_hi.min(cap);
            b
        }));
        return Ok(());
    }

    let runs = segment_runs(&bins, &ws, rho);
    debug_assert!(runs.len() >= 2, "empty bins imply at least two runs");
    for run in runs {
        recurse(run, config, depth + 1, max_depth, out)?;
    }
    Ok(())
}
