//! Shared test support: a deliberately naive reference binning that works
//! on sorted pixel arrays, plus fixture compositions and helpers.

#![allow(dead_code)]

use chanbin::channel::{ChannelId, RhoMode};
use chanbin::eval::ChannelReport;
use chanbin::imageio::{CompositionSpec, RgbImage, Stripe};
use chanbin::merge::DominantColor;

/// Reference implementation of the binning recursion over a literal sorted
/// pixel array. Returns the final `(count, value_sum)` per bin, ascending.
///
/// Independent of the histogram implementation: rho comes from summing the
/// consecutive differences of the sorted sequence, and bin membership is
/// decided by walking the array against each bin's upper boundary with
/// exact integer arithmetic (`v < lo + (i+1)*rho` iff
/// `(v-lo)*(m-1) < (i+1)*sum_diffs`).
pub fn naive_binning(pixels: &[u8], mode: RhoMode) -> Vec<(u64, u64)> {
    assert!(!pixels.is_empty());
    let mut sorted = pixels.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    naive_recurse(&sorted, mode, &mut out);
    out
}

fn emit_whole(sorted: &[u8], out: &mut Vec<(u64, u64)>) {
    out.push((
        sorted.len() as u64,
        sorted.iter().map(|&v| v as u64).sum(),
    ));
}

fn naive_recurse(sorted: &[u8], mode: RhoMode, out: &mut Vec<(u64, u64)>) {
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    if lo == hi {
        emit_whole(sorted, out);
        return;
    }

    let seq: Vec<u8> = match mode {
        RhoMode::AllPixels => sorted.to_vec(),
        RhoMode::Distinct => {
            let mut d = sorted.to_vec();
            d.dedup();
            d
        }
    };
    let m = seq.len() as u64;
    let sum_diffs: u64 = seq.windows(2).map(|w| (w[1] - w[0]) as u64).sum();
    if sum_diffs < m - 1 {
        // rho < 1: the run is final
        emit_whole(sorted, out);
        return;
    }

    // Walk the array into consecutive bins of width rho = sum_diffs/(m-1).
    let mut bins: Vec<Vec<u8>> = Vec::new();
    let mut pos = 0;
    let mut i: u64 = 0;
    while pos < sorted.len() {
        let mut members = Vec::new();
        while pos < sorted.len()
            && ((sorted[pos] - lo) as u64) * (m - 1) < (i + 1) * sum_diffs
        {
            members.push(sorted[pos]);
            pos += 1;
        }
        bins.push(members);
        i += 1;
    }

    if bins.iter().all(|b| !b.is_empty()) {
        for members in &bins {
            emit_whole(members, out);
        }
        return;
    }

    // Runs of consecutive non-empty bins, recursed separately.
    let mut current: Vec<u8> = Vec::new();
    for members in &bins {
        if members.is_empty() {
            if !current.is_empty() {
                naive_recurse(&current, mode, out);
                current.clear();
            }
        } else {
            current.extend_from_slice(members);
        }
    }
    if !current.is_empty() {
        naive_recurse(&current, mode, out);
    }
}

/// Ground-truth report of an image by direct pixel counting: every occupied
/// value of every channel with its exact percentage.
pub fn counted_report(image: &RgbImage) -> [ChannelReport; 3] {
    let mut counts = [[0u64; 256]; 3];
    for px in image.pixels() {
        for (c, &component) in px.iter().enumerate() {
            counts[c][component as usize] += 1;
        }
    }
    let total = image.pixels().len() as f64;
    ChannelId::ALL.map(|channel| ChannelReport {
        channel,
        colors: counts[channel.index()]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(v, &c)| DominantColor {
                value: v as f64,
                percent: 100.0 * c as f64 / total,
            })
            .collect(),
    })
}

/// Report built from literal `(value, percent)` rows.
pub fn report_from_rows(channel: ChannelId, rows: &[(f64, f64)]) -> ChannelReport {
    ChannelReport {
        channel,
        colors: rows
            .iter()
            .map(|&(value, percent)| DominantColor { value, percent })
            .collect(),
    }
}

fn composition(colors: &[[u8; 3]], percents: &[f64], noise_sigma: f64, seed: u64) -> CompositionSpec {
    let total: f64 = percents.iter().sum();
    CompositionSpec {
        stripes: colors
            .iter()
            .zip(percents)
            .map(|(&color, &p)| Stripe {
                color,
                fraction: p / total,
            })
            .collect(),
        noise_sigma,
        seed,
    }
}

/// The three known test compositions: stripe colors with their nominal
/// percentages (normalized to fractions).
pub fn known_composition(index: usize, noise_sigma: f64, seed: u64) -> CompositionSpec {
    match index {
        1 => composition(
            &[[255, 242, 0], [237, 28, 36]],
            &[50.0, 50.0],
            noise_sigma,
            seed,
        ),
        2 => composition(
            &[
                [0, 162, 232],
                [34, 177, 76],
                [153, 217, 234],
                [163, 73, 164],
                [255, 201, 14],
            ],
            &[25.2, 19.8, 7.41, 28.2, 19.3],
            noise_sigma,
            seed,
        ),
        3 => composition(
            &[
                [185, 122, 87],
                [153, 153, 234],
                [239, 239, 176],
                [181, 230, 29],
            ],
            &[8.5, 32.2, 18.3, 40.9],
            noise_sigma,
            seed,
        ),
        other => panic!("no composition #{other}"),
    }
}
