//! Merging of small or contiguous bins into their neighbors.
//!
//! Two kinds of bins get folded into a neighbor:
//!
//! * bins below the count threshold whose nearest neighboring centroid is
//!   closer than `thresh_distance` (isolated low-mass satellites), and
//! * bins that are value-contiguous with a neighbor (no unoccupied pixel
//!   value between them) whose centroids are closer than `contig_distance`.
//!   Contiguous occupancy is what noise spread around one mode looks like,
//!   so these merge regardless of their own mass; two contiguous blocks
//!   that belong to distinct modes keep their centroids far apart (the
//!   mass hugs each mode) and stay separate.
//!
//! The merge runs to a fixpoint with deterministic tie-breaks (smallest
//! count first; nearest eligible centroid as target) so the result does
//! not depend on scan direction.

use crate::binning::ColorBin;
use crate::error::{Error, Result};

/// Thresholds for the merge phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeConfig {
    /// Count threshold as a percentage of the channel's pixel total.
    pub thresh_count_pct: f64,
    /// Maximum centroid distance at which a small bin is absorbed.
    pub thresh_distance: f64,
    /// Maximum centroid distance at which value-contiguous bins merge
    /// irrespective of count.
    pub contig_distance: f64,
    /// Hard cap on reported colors; `None` disables the cap.
    pub max_colors: Option<usize>,
}

impl Default for MergeConfig {
    fn default() -> Self {
        Self {
            thresh_count_pct: 5.0,
            thresh_distance: 40.0,
            contig_distance: 12.0,
            max_colors: Some(8),
        }
    }
}

impl MergeConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.thresh_count_pct.is_finite() || !(0.0..=100.0).contains(&self.thresh_count_pct) {
            return Err(Error::InvalidConfig(format!(
                "thresh_count_pct {} must be in [0, 100]",
                self.thresh_count_pct
            )));
        }
        for (name, value) in [
            ("thresh_distance", self.thresh_distance),
            ("contig_distance", self.contig_distance),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} {value} must be finite and non-negative"
                )));
            }
        }
        if self.max_colors == Some(0) {
            return Err(Error::InvalidConfig("max_colors must be positive".into()));
        }
        Ok(())
    }
}

/// One reported dominant value: the bin centroid and its pixel share.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominantColor {
    pub value: f64,
    pub percent: f64,
}

impl DominantColor {
    /// Integer pixel value used for serialization.
    pub fn rounded_value(&self) -> u8 {
        self.value.round().clamp(0.0, 255.0) as u8
    }
}

/// No unoccupied pixel value between the two bins.
fn contiguous(left: &ColorBin, right: &ColorBin) -> bool {
    right.min_value as i32 - left.max_value as i32 <= 1
}

fn distance(a: &ColorBin, b: &ColorBin) -> f64 {
    (a.centroid() - b.centroid()).abs()
}

/// Whether bin `i` may merge into adjacent bin `j` under `config`.
fn side_eligible(bins: &[ColorBin], i: usize, j: usize, threshold: f64, config: &MergeConfig) -> bool {
    let d = distance(&bins[i], &bins[j]);
    if (bins[i].count as f64) < threshold && d < config.thresh_distance {
        return true;
    }
    let (left, right) = if i < j { (i, j) } else { (j, i) };
    contiguous(&bins[left], &bins[right]) && d < config.contig_distance
}

/// Adjacent neighbors of `i` that `i` may merge into.
fn eligible_sides(
    bins: &[ColorBin],
    i: usize,
    threshold: f64,
    config: MergeConfig,
) -> impl Iterator<Item = usize> + '_ {
    [i.checked_sub(1), (i + 1 < bins.len()).then_some(i + 1)]
        .into_iter()
        .flatten()
        .filter(move |&j| side_eligible(bins, i, j, threshold, &config))
}

/// Picks the merge target among eligible sides: nearest centroid, ties to
/// the neighbor with the larger count, then the lower centroid.
fn pick_target(bins: &[ColorBin], i: usize, sides: impl Iterator<Item = usize>) -> Option<usize> {
    sides.min_by(|&a, &b| {
        distance(&bins[i], &bins[a])
            .total_cmp(&distance(&bins[i], &bins[b]))
            .then(bins[b].count.cmp(&bins[a].count))
            .then(bins[a].centroid().total_cmp(&bins[b].centroid()))
    })
}

fn merge_into(bins: &mut Vec<ColorBin>, src: usize, dst: usize) {
    debug_assert_ne!(src, dst);
    let s = bins[src].clone();
    let d = &mut bins[dst];
    d.count += s.count;
    d.value_sum += s.value_sum;
    d.range_lo = d.range_lo.min(s.range_lo);
    d.range_hi = d.range_hi.max(s.range_hi);
    d.min_value = d.min_value.min(s.min_value);
    d.max_value = d.max_value.max(s.max_value);
    bins.remove(src);
}

/// Smallest-count bin among `candidates`, breaking ties by lower centroid.
fn smallest(bins: &[ColorBin], candidates: impl Iterator<Item = usize>) -> Option<usize> {
    candidates.min_by(|&a, &b| {
        bins[a]
            .count
            .cmp(&bins[b].count)
            .then(bins[a].centroid().total_cmp(&bins[b].centroid()))
    })
}

/// Runs the threshold merge to a fixpoint. On return no bin both falls
/// below the count threshold and sits within `thresh_distance` of a
/// neighboring centroid, and no value-contiguous pair of bins remains
/// within `contig_distance` of each other.
pub fn merge_bins(mut bins: Vec<ColorBin>, total: u64, config: &MergeConfig) -> Result<Vec<ColorBin>> {
    if bins.is_empty() {
        return Err(Error::EmptyInput);
    }
    config.validate()?;
    let threshold = config.thresh_count_pct * total as f64 / 100.0;
    loop {
        let candidate = smallest(
            &bins,
            (0..bins.len())
                .filter(|&i| eligible_sides(&bins, i, threshold, *config).next().is_some()),
        );
        match candidate {
            None => break,
            Some(i) => {
                let j = pick_target(&bins, i, eligible_sides(&bins, i, threshold, *config))
                    .expect("candidate has an eligible side");
                merge_into(&mut bins, i, j);
            }
        }
    }
    Ok(bins)
}

/// Converts merged bins into the final report, enforcing the color cap by
/// folding the smallest bins into their nearest neighbors.
pub fn finalize_report(bins: Vec<ColorBin>, total: u64, config: &MergeConfig) -> Vec<DominantColor> {
    let mut bins = bins;
    if let Some(cap) = config.max_colors {
        while bins.len() > cap && bins.len() > 1 {
            let i = smallest(&bins, 0..bins.len()).expect("bins non-empty");
            let sides = [i.checked_sub(1), (i + 1 < bins.len()).then_some(i + 1)]
                .into_iter()
                .flatten();
            let j = pick_target(&bins, i, sides).expect("more than one bin");
            merge_into(&mut bins, i, j);
        }
    }
    bins.iter()
        .map(|b| DominantColor {
            value: b.centroid(),
            percent: 100.0 * b.count as f64 / total as f64,
        })
        .collect()
}
