//! Per-channel histogram view of an image.
//!
//! A 256-bucket histogram is the canonical representation of one channel's
//! pixel multiset; it encodes the same information as the sorted pixel array
//! while keeping extraction linear in the pixel count.

use crate::error::{Error, Result};
use crate::imageio::RgbImage;

/// One of the three 8-bit color channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelId {
    Red,
    Green,
    Blue,
}

impl ChannelId {
    pub const ALL: [ChannelId; 3] = [ChannelId::Red, ChannelId::Green, ChannelId::Blue];

    pub fn index(self) -> usize {
        match self {
            ChannelId::Red => 0,
            ChannelId::Green => 1,
            ChannelId::Blue => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ChannelId::Red => "red",
            ChannelId::Green => "green",
            ChannelId::Blue => "blue",
        }
    }
}

/// How a channel's sorted multiset is read: one entry per occupied value,
/// or one entry per pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhoMode {
    #[default]
    Distinct,
    AllPixels,
}

/// 256-bucket count array for one 8-bit channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelHistogram {
    counts: [u64; 256],
    total: u64,
}

impl ChannelHistogram {
    /// Builds a histogram from raw bucket counts. At least one bucket must
    /// be non-zero.
    pub fn from_counts(counts: [u64; 256]) -> Result<Self> {
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyWorkingSet);
        }
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn count(&self, value: u8) -> u64 {
        self.counts[value as usize]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct_values(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Occupied `(value, count)` pairs in ascending value order.
    pub fn occupied(&self) -> impl Iterator<Item = (u8, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(v, &c)| (v as u8, c))
    }
}

/// Splits an image into per-channel histograms, ordered red, green, blue.
pub fn split_channels(image: &RgbImage) -> [ChannelHistogram; 3] {
    let mut counts = [[0u64; 256]; 3];
    for px in image.pixels() {
        counts[0][px[0] as usize] += 1;
        counts[1][px[1] as usize] += 1;
        counts[2][px[2] as usize] += 1;
    }
    let total = image.pixels().len() as u64;
    counts.map(|c| ChannelHistogram { counts: c, total })
}

/// Builds a histogram from a list of raw values, rejecting anything outside
/// the 8-bit range.
pub fn histogram_from_values(values: &[u16]) -> Result<ChannelHistogram> {
    if values.is_empty() {
        return Err(Error::EmptyWorkingSet);
    }
    let mut counts = [0u64; 256];
    for (index, &value) in values.iter().enumerate() {
        if value > 255 {
            return Err(Error::OutOfRange { index, value });
        }
        counts[value as usize] += 1;
    }
    Ok(ChannelHistogram {
        counts,
        total: values.len() as u64,
    })
}

/// Ascending value sequence of a histogram: each occupied value once
/// (`Distinct`) or repeated by its count (`AllPixels`).
pub fn sorted_values(hist: &ChannelHistogram, mode: RhoMode) -> Vec<u8> {
    let mut out = Vec::new();
    for (v, c) in hist.occupied() {
        match mode {
            RhoMode::Distinct => out.push(v),
            RhoMode::AllPixels => out.extend(std::iter::repeat_n(v, c as usize)),
        }
    }
    out
}
