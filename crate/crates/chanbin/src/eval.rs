//! Error metric between estimated and actual dominant-color sets.
//!
//! The per-channel error is the mean Euclidean distance over matched
//! (value, percent) pairs. Because the two sets carry no inherent
//! alignment, pairs are chosen by a minimum-total-cost injective matching
//! from the smaller set into the larger; unmatched entries are excluded
//! from the mean and reported separately.

use serde::Serialize;

use crate::channel::ChannelId;
use crate::error::{Error, Result};
use crate::merge::DominantColor;

/// Matching is exhaustive over subsets, so cap the list size.
pub const MAX_MATCH_COLORS: usize = 16;

/// Dominant colors reported for one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub channel: ChannelId,
    pub colors: Vec<DominantColor>,
}

/// Per-channel error breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelErrorStats {
    pub epsilon: f64,
    /// `(estimated index, actual index)` pairs, ascending by estimated index.
    pub matched_pairs: Vec<(usize, usize)>,
    pub unmatched_estimated: usize,
    pub unmatched_actual: usize,
}

/// Error breakdown for a full three-channel image.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub per_channel: PerChannelErrors,
    /// Unweighted mean of the three channel epsilons.
    pub image_epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerChannelErrors {
    pub red: ChannelErrorStats,
    pub green: ChannelErrorStats,
    pub blue: ChannelErrorStats,
}

impl PerChannelErrors {
    pub fn get(&self, channel: ChannelId) -> &ChannelErrorStats {
        match channel {
            ChannelId::Red => &self.red,
            ChannelId::Green => &self.green,
            ChannelId::Blue => &self.blue,
        }
    }
}

fn pair_cost(e: &DominantColor, a: &DominantColor) -> f64 {
    let dv = e.value - a.value;
    let dp = e.percent - a.percent;
    (dv * dv + dp * dp).sqrt()
}

/// Minimum-total-cost injective matching from the smaller list into the
/// larger, as `(estimated index, actual index)` pairs sorted by estimated
/// index. Cost ties resolve to the lexicographically smallest assignment.
pub fn match_pairs(
    estimated: &[DominantColor],
    actual: &[DominantColor],
) -> Result<Vec<(usize, usize)>> {
    if estimated.is_empty() || actual.is_empty() {
        return Err(Error::EmptyReport);
    }
    for len in [estimated.len(), actual.len()] {
        if len > MAX_MATCH_COLORS {
            return Err(Error::TooManyColors {
                len,
                limit: MAX_MATCH_COLORS,
            });
        }
    }

    let est_is_small = estimated.len() <= actual.len();
    let (small, large) = if est_is_small {
        (estimated, actual)
    } else {
        (actual, estimated)
    };
    let k = small.len();
    let n = large.len();
    let cost = |i: usize, j: usize| {
        if est_is_small {
            pair_cost(&small[i], &large[j])
        } else {
            pair_cost(&large[j], &small[i])
        }
    };

    // best[mask] = minimum cost of matching small[popcount(mask)..k) into
    // the large-side indices outside `mask`.
    let full = 1usize << n;
    let mut best = vec![f64::INFINITY; full];
    let mut masks: Vec<usize> = (0..full).collect();
    masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    for &mask in &masks {
        let i = mask.count_ones() as usize;
        if i > k {
            continue;
        }
        if i == k {
            best[mask] = 0.0;
            continue;
        }
        let mut m = f64::INFINITY;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                let c = cost(i, j) + best[mask | (1 << j)];
                if c < m {
                    m = c;
                }
            }
        }
        best[mask] = m;
    }

    // Reconstruct, preferring the lowest large-side index at each step.
    let mut pairs = Vec::with_capacity(k);
    let mut mask = 0usize;
    for i in 0..k {
        let j = (0..n)
            .find(|&j| {
                mask & (1 << j) == 0 && cost(i, j) + best[mask | (1 << j)] == best[mask]
            })
            .expect("optimal assignment is reconstructible");
        pairs.push(if est_is_small { (i, j) } else { (j, i) });
        mask |= 1 << j;
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// Full error statistics for one channel pair.
pub fn channel_error(estimated: &ChannelReport, actual: &ChannelReport) -> Result<ChannelErrorStats> {
    if estimated.channel != actual.channel {
        return Err(Error::ChannelMismatch {
            estimated: estimated.channel,
            actual: actual.channel,
        });
    }
    let pairs = match_pairs(&estimated.colors, &actual.colors)?;
    let sum: f64 = pairs
        .iter()
        .map(|&(e, a)| pair_cost(&estimated.colors[e], &actual.colors[a]))
        .sum();
    Ok(ChannelErrorStats {
        epsilon: sum / pairs.len() as f64,
        unmatched_estimated: estimated.colors.len() - pairs.len(),
        unmatched_actual: actual.colors.len() - pairs.len(),
        matched_pairs: pairs,
    })
}

/// Mean matched-pair distance for one channel.
pub fn epsilon(estimated: &ChannelReport, actual: &ChannelReport) -> Result<f64> {
    channel_error(estimated, actual).map(|stats| stats.epsilon)
}

fn find_channel(reports: &[ChannelReport], channel: ChannelId) -> Result<&ChannelReport> {
    reports
        .iter()
        .find(|r| r.channel == channel)
        .ok_or(Error::MissingChannel(channel))
}

/// Per-channel errors plus their unweighted mean.
pub fn image_epsilon(estimated: &[ChannelReport], actual: &[ChannelReport]) -> Result<ErrorReport> {
    let mut stats = Vec::with_capacity(3);
    for channel in ChannelId::ALL {
        let est = find_channel(estimated, channel)?;
        let act = find_channel(actual, channel)?;
        stats.push(channel_error(est, act)?);
    }
    let image_epsilon = stats.iter().map(|s| s.epsilon).sum::<f64>() / 3.0;
    let mut it = stats.into_iter();
    Ok(ErrorReport {
        per_channel: PerChannelErrors {
            red: it.next().unwrap(),
            green: it.next().unwrap(),
            blue: it.next().unwrap(),
        },
        image_epsilon,
    })
}
